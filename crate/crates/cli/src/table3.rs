//! System comparison table: Mars and Neptune regimes across the three data types.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::CliError;
use crate::eval::{aggregate_sigma, evaluate};
use crate::scenario::{default_angle_grid, Catalogs, RawScenario, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub what: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table3Row {
    pub regime: &'static str,
    pub case: &'static str,
    pub sigma_t: f64,
    pub ref_sigma_t: f64,
    pub scale: String,
    pub ref_scale: &'static str,
    pub uncertainty: String,
    pub ref_uncertainty: &'static str,
    pub checks: Vec<Check>,
}

impl Table3Row {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target.abs()
}

/// Round to `digits` significant figures.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.abs().log10().floor() as i32 - digits + 1;
    let f = 10f64.powi(e);
    (x / f).round() * f
}

fn rel_check(what: &str, x: f64, target: f64, rel: f64) -> Check {
    Check { what: format!("{what} {x:.4e} vs {target:e} (+-{}%)", rel * 100.0), pass: within(x, target, rel) }
}

fn case(base: &RawScenario, preset: &str, data_type: &str, selection: Option<&str>) -> Result<RawScenario, CliError> {
    let mut raw = base.clone();
    for k in ["data_type", "preset", "days", "pulsar.selection", "pulsar.n_tau", "sweep.var", "sweep.grid", "sweep.output", "range.jet"] {
        raw.remove(k);
    }
    raw.set(&format!("preset={preset}"))?;
    raw.set(&format!("data_type={data_type}"))?;
    if let Some(s) = selection {
        raw.set(&format!("pulsar.selection={s}"))?;
    }
    Ok(raw)
}

struct Envelope {
    best_scale: f64,
    best: (f64, f64),
    gxx: (f64, f64),
    gyy: (f64, f64),
    sxx: (f64, f64),
    syy: (f64, f64),
}

fn envelope(s: &Scenario, grid: &[f64]) -> Result<Envelope, CliError> {
    let evals: Vec<_> = grid.par_iter().map(|&x| evaluate(s, x, 1.0)).collect::<Result<_, _>>()?;
    let mut env = Envelope {
        best_scale: f64::INFINITY,
        best: (0.0, 0.0),
        gxx: (f64::INFINITY, 0.0),
        gyy: (f64::INFINITY, 0.0),
        sxx: (f64::INFINITY, 0.0),
        syy: (f64::INFINITY, 0.0),
    };
    let upd = |r: &mut (f64, f64), v: f64| *r = (r.0.min(v), r.1.max(v));
    for e in &evals {
        let d = &e.dilution;
        let m = d.sqrt_gxx().max(d.sqrt_gyy());
        if m < env.best_scale {
            env.best_scale = m;
            env.best = (d.sigma_xx, d.sigma_yy);
        }
        upd(&mut env.gxx, d.sqrt_gxx());
        upd(&mut env.gyy, d.sqrt_gyy());
        upd(&mut env.sxx, d.sigma_xx);
        upd(&mut env.syy, d.sigma_yy);
    }
    Ok(env)
}

/// Compute the eight table rows. `base` supplies shared overrides such as camera or cadence.
pub fn table3_rows(base: &RawScenario, catalogs: &Catalogs, grid_count: usize) -> Result<Vec<Table3Row>, CliError> {
    let grid = default_angle_grid(grid_count);
    let mut rows = Vec::new();
    for (regime, optical, sextant, best4, range) in [
        ("mars", (14.8, "(3.2, 3.2)", "(47, 47)", 3.2, 47.0), (24.1, "3", "(72, 72)", 72.0), (7.1, "3", "(21, 21)", 21.0), 6.1e-5),
        ("neptune", (1541.6, "(1.7, 1.7)", "(2621, 2621)", 1.7, 2621.0), (436.5, "3", "(1310, 1310)", 1310.0), (11.4, "3", "(34, 34)", 34.0), 8.2e-4),
    ] {
        let s = Scenario::from_raw(&case(base, regime, "optical", None)?, catalogs)?;
        let sig = aggregate_sigma(&s, 1.0)?;
        let env = envelope(&s, &grid)?;
        let (ref_sig, ref_scale, ref_unc, scale_t, unc_t) = optical;
        rows.push(Table3Row {
            regime,
            case: "optical",
            sigma_t: sig,
            ref_sigma_t: ref_sig,
            scale: format!("({:.2}, {:.2})", env.best_scale, env.best_scale),
            ref_scale,
            uncertainty: format!("({:.1}, {:.1})", env.best.0, env.best.1),
            ref_uncertainty: ref_unc,
            checks: vec![
                rel_check("sigma(T)", sig, ref_sig, 0.05),
                Check {
                    what: format!("scale {:.3} vs {scale_t} (+-0.1)", env.best_scale),
                    pass: (env.best_scale - scale_t).abs() <= 0.1,
                },
                rel_check("uncertainty", env.best.0.max(env.best.1), unc_t, 0.05),
            ],
        });

        for (label, sel, (ref_sig, ref_scale, ref_unc, unc_t)) in
            [("pulsar-sextant", "sextant", sextant), ("pulsar-best4", "best4", best4)]
        {
            let s = Scenario::from_raw(&case(base, regime, "pulsar", Some(sel))?, catalogs)?;
            let sig = aggregate_sigma(&s, 1.0)?;
            let env = envelope(&s, &grid)?;
            let unc = env.best_scale * sig;
            rows.push(Table3Row {
                regime,
                case: label,
                sigma_t: sig,
                ref_sigma_t: ref_sig,
                scale: format!("{:.3}", env.best_scale),
                ref_scale,
                uncertainty: format!("({unc:.1}, {unc:.1})"),
                ref_uncertainty: ref_unc,
                checks: vec![rel_check("sigma(T)", sig, ref_sig, 0.03), rel_check("uncertainty", unc, unc_t, 0.05)],
            });
        }

        let s = Scenario::from_raw(&case(base, regime, "range", None)?, catalogs)?;
        let sig = aggregate_sigma(&s, 1.0)?;
        let env = envelope(&s, &grid)?;
        let mut checks = vec![rel_check("sigma(T)", sig, range, 0.02)];
        let (scale, ref_scale, unc, ref_unc) = if regime == "mars" {
            // Bounds are printed to one significant figure.
            let lo = round_sig(env.sxx.0, 1);
            let hi = round_sig(env.sxx.1, 1);
            checks.push(Check {
                what: format!("sigma_xx [{:.2e}, {:.3}] within [2e-4, 2.5]", env.sxx.0, env.sxx.1),
                pass: lo >= 2e-4 && hi <= 2.5,
            });
            checks.push(Check {
                what: format!("sigma_yy [{:.3}, {:.3}] within [1, 8]", env.syy.0, env.syy.1),
                pass: round_sig(env.syy.0, 1) >= 1.0 && round_sig(env.syy.1, 1) <= 8.0,
            });
            (
                format!("sqrt Gxx {:.1}-{:.0}, sqrt Gyy {:.0}-{:.0}", env.gxx.0, env.gxx.1, env.gyy.0, env.gyy.1),
                "sqrt Gxx 3-41000, sqrt Gyy 16300-98000",
                format!("sigma_xx {:.1e}-{:.2}, sigma_yy {:.2}-{:.2}", env.sxx.0, env.sxx.1, env.syy.0, env.syy.1),
                "sigma_xx 0.0002-2.5, sigma_yy 1-6",
            )
        } else {
            checks.push(Check {
                what: format!("sigma_yy [{:.0}, {:.0}] within [820, 3200]", env.syy.0, env.syy.1),
                pass: env.syy.0 >= 820.0 && env.syy.1 <= 3200.0,
            });
            (
                format!("sqrt Gyy {:.0}-{:.0}", env.gyy.0, env.gyy.1),
                "sqrt Gyy 1004290-1200250",
                format!("sigma_yy {:.0}-{:.0}", env.syy.0, env.syy.1),
                "sigma_yy 820-980",
            )
        };
        rows.push(Table3Row {
            regime,
            case: "range",
            sigma_t: sig,
            ref_sigma_t: range,
            scale,
            ref_scale,
            uncertainty: unc,
            ref_uncertainty: ref_unc,
            checks,
        });
    }
    Ok(rows)
}

pub fn render(rows: &[Table3Row]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(
            out,
            "{} {:<8} {:<15} sigma(T) = {:.4e} km (ref {:e})",
            if r.pass() { "PASS" } else { "FAIL" },
            r.regime,
            r.case,
            r.sigma_t,
            r.ref_sigma_t
        );
        let _ = writeln!(out, "    scale       {}  (ref {})", r.scale, r.ref_scale);
        let _ = writeln!(out, "    uncertainty {} km  (ref {} km)", r.uncertainty, r.ref_uncertainty);
        for c in &r.checks {
            let _ = writeln!(out, "    [{}] {}", if c.pass { "ok" } else { "FAIL" }, c.what);
        }
    }
    out
}
