//! Parallel grid sweeps written as CSV.

use rayon::prelude::*;

use crate::error::CliError;
use crate::eval::{evaluate, evaluate_spectrum, fmt_vec, stm_errors, Evaluation};
use crate::scenario::{Scenario, SweepOutput};

pub const DILUTION_HEADER: &str = "angle_rad,sqrt_Gxx,sqrt_Gyy,rho_xy,pdop,sigma_xx_km,sigma_yy_km,sigma_agg_km";
pub const SPECTRUM_HEADER: &str = "angle_rad,lambda1,lambda2,lambda3,lambda4,condition_number";
pub const STM_ERROR_HEADER: &str = "t_day,e2,e3";

pub fn dilution_row(e: &Evaluation) -> String {
    let d = &e.dilution;
    format!(
        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
        e.angle,
        d.sqrt_gxx(),
        d.sqrt_gyy(),
        d.rho_xy,
        d.pdop,
        d.sigma_xx,
        d.sigma_yy,
        d.sigma_agg
    )
}

fn at_point<T>(x: f64, r: Result<T, CliError>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        CliError::Numerical(n) => CliError::Numerical(navdop::NavError::Degenerate(format!("at grid value {x:.6}: {n}"))),
        other => other,
    })
}

/// Evaluate every grid point; rows keep grid order.
pub fn sweep_csv(s: &Scenario) -> Result<String, CliError> {
    s.check_sweep()?;
    let by_p = s.sweep.var == "p";
    let grid = &s.sweep.grid;
    let (header, rows): (String, Vec<String>) = match s.sweep.output {
        SweepOutput::StmError => (
            STM_ERROR_HEADER.to_string(),
            grid.par_iter()
                .map(|&t| at_point(t, stm_errors(s, t)).map(|(e2, e3)| format!("{t:.16e},{e2:.16e},{e3:.16e}")))
                .collect::<Result<_, _>>()?,
        ),
        SweepOutput::Dilution => {
            let rows = grid
                .par_iter()
                .map(|&x| {
                    let (angle, p) = if by_p { (s.angle(), x) } else { (x, s.days) };
                    let e = at_point(x, evaluate(s, angle, p))?;
                    let row = dilution_row(&e);
                    Ok(if by_p { format!("{p:.16e},{row}") } else { row })
                })
                .collect::<Result<_, CliError>>()?;
            let header = if by_p { format!("p,{DILUTION_HEADER}") } else { DILUTION_HEADER.to_string() };
            (header, rows)
        }
        SweepOutput::Spectrum => {
            let rows = grid
                .par_iter()
                .map(|&x| {
                    let (angle, p) = if by_p { (s.angle(), x) } else { (x, s.days) };
                    let sp = at_point(x, evaluate_spectrum(s, angle, p))?;
                    let row = format!("{angle:.16e},{},{:.16e}", fmt_vec(&sp.eigenvalues), sp.condition_number);
                    Ok(if by_p { format!("{p:.16e},{row}") } else { row })
                })
                .collect::<Result<_, CliError>>()?;
            let header = if by_p { format!("p,{SPECTRUM_HEADER}") } else { SPECTRUM_HEADER.to_string() };
            (header, rows)
        }
    };
    let mut out = header;
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}
