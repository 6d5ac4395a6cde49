//! Command-line front end: scenario files, sweeps, the system comparison table and plot scripts.

pub mod error;
pub mod eval;
pub mod plot;
pub mod scenario;
pub mod sweep;
pub mod table3;

use std::fmt::Write as _;

pub use error::CliError;
pub use scenario::{Catalogs, RawScenario, Scenario};

use eval::{entry_compare, evaluate, fmt_vec};
use scenario::DataType;

/// Text report for a single evaluation, plus an optional one-row CSV.
pub fn run_report(s: &Scenario) -> Result<(String, Option<String>), CliError> {
    let mut out = String::new();
    let _ = writeln!(out, "data_type={} preset={} p={} stm={:?}", s.data_type.name(), s.preset.name(), s.days, s.mode);
    if s.data_type == DataType::EntryCompare {
        let c = entry_compare(s)?;
        let _ = writeln!(out, "apriori_frobenius={:.6e}", c.pulsar.apriori_frobenius);
        for (name, r) in [("pulsar", &c.pulsar), ("cpf", &c.cpf)] {
            let _ = writeln!(
                out,
                "{name}: measurement_frobenius={:.6e} sigma_xx_km={:.6e} sigma_yy_km={:.6e}",
                r.measurement_frobenius, r.sigma_xx, r.sigma_yy
            );
        }
        return Ok((out, None));
    }
    let e = evaluate(s, s.angle(), s.days)?;
    let d = &e.dilution;
    let _ = writeln!(out, "angle_rad={:.10}", e.angle);
    let _ = writeln!(out, "sigma_agg_km={:.10e}", d.sigma_agg);
    let _ = writeln!(out, "sqrt_Gxx={:.10e} sqrt_Gyy={:.10e} rho_xy={:.10e} pdop={:.10e}", d.sqrt_gxx(), d.sqrt_gyy(), d.rho_xy, d.pdop);
    let _ = writeln!(out, "sigma_xx_km={:.10e} sigma_yy_km={:.10e}", d.sigma_xx, d.sigma_yy);
    let _ = writeln!(out, "eigenvalues_unit_noise={}", fmt_vec(&e.spectrum.eigenvalues));
    let _ = writeln!(out, "condition_number={:.6e}", e.spectrum.condition_number);
    let csv = format!("{}\n{}\n", sweep::DILUTION_HEADER, sweep::dilution_row(&e));
    Ok((out, Some(csv)))
}
