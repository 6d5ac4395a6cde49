//! Circular reference orbit, state transition matrices and their jets.
//!
//! States are `[r; dr]` with `dr = T v`, so every component carries length.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use std::f64::consts::PI;

use crate::error::{domain, Result};

pub type State4 = Vector4<f64>;

/// Heliocentric circular orbit used as the estimation reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConfig {
    /// Orbit radius [AU].
    pub a: f64,
    /// Mean motion [rad/day].
    pub n: f64,
    /// Initial central angle [rad].
    pub theta0: f64,
    /// Canonical observation period [day].
    pub t_scale: f64,
}

impl OrbitConfig {
    pub fn new(a: f64, n: f64) -> Result<Self> {
        let orbit = Self { a, n, theta0: 0.0, t_scale: 1.0 };
        orbit.validate()?;
        Ok(orbit)
    }

    /// Build from a gravitational parameter [AU^3/day^2].
    pub fn from_mu(mu: f64, a: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return domain("mu must be positive");
        }
        Self::new(a, (mu / (a * a * a)).sqrt())
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn with_t_scale(mut self, t_scale: f64) -> Result<Self> {
        self.t_scale = t_scale;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return domain(format!("orbit radius must be positive, got {}", self.a));
        }
        // n = 0 is accepted as the frozen-dynamics limit.
        if !(self.n >= 0.0) || !self.n.is_finite() {
            return domain(format!("mean motion must be non-negative, got {}", self.n));
        }
        if !(self.t_scale > 0.0) || !self.t_scale.is_finite() {
            return domain(format!("period T must be positive, got {}", self.t_scale));
        }
        if !self.theta0.is_finite() {
            return domain("theta0 must be finite");
        }
        Ok(())
    }

    /// Mars-distance regime: a = 1.5 AU, n = 0.009 rad/day.
    pub fn mars() -> Self {
        Self { a: 1.5, n: 0.009, theta0: 0.0, t_scale: 1.0 }
    }

    /// Neptune-distance regime: a = 30 AU, n = 2 pi / 60182 rad/day.
    pub fn neptune() -> Self {
        Self { a: 30.0, n: 2.0 * PI / 60182.0, theta0: 0.0, t_scale: 1.0 }
    }

    /// Gravitational parameter implied by (a, n) [AU^3/day^2].
    pub fn mu(&self) -> f64 {
        self.n * self.n * self.a.powi(3)
    }
}

/// Which approximation produced an [`Stm4`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StmForm {
    Exact,
    Jet0,
    Jet1,
    Jet2,
}

/// 4x4 state transition matrix in `[r; dr]` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stm4 {
    pub m: Matrix4<f64>,
    pub form: StmForm,
}

impl Stm4 {
    pub fn rr(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn r_dr(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 2).into_owned()
    }

    pub fn dr_r(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(2, 0).into_owned()
    }

    pub fn dr_dr(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Position rows `[Phi_rr : Phi_rdr]`.
    pub fn position_rows(&self) -> nalgebra::Matrix2x4<f64> {
        self.m.fixed_rows::<2>(0).into_owned()
    }
}

fn rot2(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn block_rotate(m: Matrix4<f64>, theta: f64) -> Matrix4<f64> {
    if theta == 0.0 {
        return m;
    }
    let r = rot2(theta);
    let mut big = Matrix4::zeros();
    big.fixed_view_mut::<2, 2>(0, 0).copy_from(&r);
    big.fixed_view_mut::<2, 2>(2, 2).copy_from(&r);
    big * m * big.transpose()
}

fn assemble(rr: Matrix2<f64>, rd: Matrix2<f64>, dr: Matrix2<f64>, dd: Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&rr);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&rd);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&dr);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&dd);
    m
}

/// Spacecraft state on the reference orbit at time `t` [day].
pub fn circular_state(orbit: &OrbitConfig, t: f64) -> State4 {
    let th = orbit.theta0 + orbit.n * t;
    let (s, c) = th.sin_cos();
    let v = orbit.t_scale * orbit.a * orbit.n;
    Vector4::new(orbit.a * c, orbit.a * s, -v * s, v * c)
}

/// Spacecraft position on the reference orbit [AU].
pub fn circular_position(orbit: &OrbitConfig, t: f64) -> Vector2<f64> {
    let th = orbit.theta0 + orbit.n * t;
    Vector2::new(orbit.a * th.cos(), orbit.a * th.sin())
}

fn stm_exact_raw(n: f64, tt: f64, t: f64) -> Matrix4<f64> {
    if n == 0.0 {
        return jet0_raw(tt, t);
    }
    let x = n * t;
    let (s, c) = x.sin_cos();
    let (s2, c2) = (2.0 * x).sin_cos();
    let nt_ = n * tt;

    let rr = Matrix2::new(
        0.5 * (-3.0 + 4.0 * c + c2 + 6.0 * x * s),
        (1.0 - c) * s,
        0.5 * (4.0 * s + s2 - 6.0 * x * c),
        1.0 - (1.0 - c) * c,
    );
    let rd = Matrix2::new(
        (2.0 - c) * s,
        -3.0 + 2.0 * c + c2 + 3.0 * x * s,
        (1.0 - c) * (1.0 - c),
        2.0 * s + s2 - 3.0 * x * c,
    ) / nt_;
    // T * d(Phi_rr)/dt
    let dr = Matrix2::new(
        s - s2 + 3.0 * x * c,
        s * s + c - c * c,
        -c + c2 + 3.0 * x * s,
        s - s2,
    ) * nt_;
    let dd = Matrix2::new(
        2.0 * c - c2,
        s - 2.0 * s2 + 3.0 * x * c,
        2.0 * (1.0 - c) * s,
        -c + 2.0 * c2 + 3.0 * x * s,
    );
    assemble(rr, rd, dr, dd)
}

fn jet0_raw(tt: f64, t: f64) -> Matrix4<f64> {
    let k = t / tt;
    let mut m = Matrix4::identity();
    m[(0, 2)] = k;
    m[(1, 3)] = k;
    m
}

fn jet2_term_raw(n: f64, tt: f64, t: f64) -> Matrix4<f64> {
    let n2 = n * n;
    let t2 = t * t;
    let t3 = t2 * t;
    Matrix4::new(
        n2 * t2, 0.0, n2 * t3 / (3.0 * tt), 0.0,
        0.0, -0.5 * n2 * t2, 0.0, -n2 * t3 / (6.0 * tt),
        2.0 * n2 * t * tt, 0.0, n2 * t2, 0.0,
        0.0, -n2 * t * tt, 0.0, -0.5 * n2 * t2,
    )
}

/// Exact STM `Phi(t, 0)` of the circular two-body flow.
pub fn stm_exact(orbit: &OrbitConfig, t: f64) -> Stm4 {
    let m = stm_exact_raw(orbit.n, orbit.t_scale, t);
    Stm4 { m: block_rotate(m, orbit.theta0), form: StmForm::Exact }
}

/// Exact STM `Phi(t, t0)` between two epochs on the same orbit.
pub fn stm_between(orbit: &OrbitConfig, t: f64, t0: f64) -> Stm4 {
    let shifted = OrbitConfig { theta0: orbit.theta0 + orbit.n * t0, ..*orbit };
    stm_exact(&shifted, t - t0)
}

/// Asymptotic STM through the given order in the ordering parameter.
///
/// The first-order term vanishes, so orders 0 and 1 coincide.
pub fn stm_jet(orbit: &OrbitConfig, t: f64, order: u8) -> Result<Stm4> {
    let (m, form) = match order {
        0 => (jet0_raw(orbit.t_scale, t), StmForm::Jet0),
        1 => (jet0_raw(orbit.t_scale, t), StmForm::Jet1),
        2 => (
            jet0_raw(orbit.t_scale, t) + jet2_term_raw(orbit.n, orbit.t_scale, t),
            StmForm::Jet2,
        ),
        _ => return domain(format!("jet order must be 0, 1 or 2, got {order}")),
    };
    Ok(Stm4 { m: block_rotate(m, orbit.theta0), form })
}

/// Relative Frobenius error of the jet through `approx_order` against the exact STM.
pub fn stm_error_norm(orbit: &OrbitConfig, t: f64, approx_order: u8) -> Result<f64> {
    if !(1..=2).contains(&approx_order) {
        return domain(format!("approximation order must be 1 or 2, got {approx_order}"));
    }
    if !(t >= 0.0) {
        return domain("t must be non-negative");
    }
    let exact = stm_exact(orbit, t).m;
    let approx = stm_jet(orbit, t, approx_order)?.m;
    Ok((approx - exact).norm() / exact.norm())
}
