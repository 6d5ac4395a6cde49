//! Composite Gauss-Legendre quadrature for matrix-valued integrands.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use nalgebra::Matrix4;

use crate::error::{NavError, Result};

pub const NODES_PER_PANEL: usize = 64;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(NODES_PER_PANEL).unwrap()))
        .as_node_weight_pairs()
}

/// Integrate `f` over `[a, b]` split into `panels` equal panels.
pub fn composite<F>(a: f64, b: f64, panels: usize, f: &F) -> Matrix4<f64>
where
    F: Fn(f64) -> Matrix4<f64>,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = Matrix4::zeros();
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule() {
            acc += f(mid + 0.5 * h * x) * w;
        }
    }
    acc * (0.5 * h)
}

/// Scalar variant of [`composite`].
pub fn composite_scalar<F>(a: f64, b: f64, panels: usize, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for &(x, w) in rule() {
            acc += f(mid + 0.5 * h * x) * w;
        }
    }
    acc * (0.5 * h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Panels per unit length of the integration variable.
    pub panels_per_unit: f64,
    /// Relative tolerance on the Frobenius norm of the result.
    pub rel_tol: f64,
    /// Maximum number of panel doublings.
    pub max_doublings: u32,
}

impl QuadOptions {
    pub const OPTICAL: Self = Self { panels_per_unit: 1.0, rel_tol: 1e-9, max_doublings: 6 };
    pub const PULSAR: Self = Self { panels_per_unit: 1.0, rel_tol: 1e-9, max_doublings: 6 };
    pub const RANGE: Self = Self { panels_per_unit: 2.0, rel_tol: 1e-7, max_doublings: 6 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Matrix4<f64>,
    /// Relative difference between the last two refinements.
    pub rel_error: f64,
    pub panels: usize,
}

/// Integrate over a union of intervals, doubling panels until two refinements agree.
pub fn integrate_intervals<F>(intervals: &[(f64, f64)], opts: QuadOptions, f: F) -> Result<QuadResult>
where
    F: Fn(f64) -> Matrix4<f64>,
{
    let eval = |mult: usize| -> (Matrix4<f64>, usize) {
        let mut total = Matrix4::zeros();
        let mut used = 0;
        for &(a, b) in intervals {
            let n = (((b - a) * opts.panels_per_unit).ceil() as usize).max(1) * mult;
            total += composite(a, b, n, &f);
            used += n;
        }
        (total, used)
    };
    let (mut coarse, _) = eval(1);
    let mut mult = 2;
    let mut last_err = f64::INFINITY;
    for _ in 0..=opts.max_doublings {
        let (fine, used) = eval(mult);
        let scale = fine.norm().max(f64::MIN_POSITIVE);
        let err = (fine - coarse).norm() / scale;
        if err <= opts.rel_tol || fine.norm() == 0.0 {
            return Ok(QuadResult { value: fine, rel_error: err, panels: used });
        }
        last_err = err;
        coarse = fine;
        mult *= 2;
    }
    Err(NavError::Quadrature { achieved: last_err, requested: opts.rel_tol })
}
