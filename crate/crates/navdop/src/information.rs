//! Fisher information accumulation, closed-form blocks, Schur-complement covariance
//! and dilution-of-precision diagnostics.

use nalgebra::{Complex, DMatrix, Matrix2, Matrix4, SymmetricEigen, Vector4};
use std::f64::consts::PI;

use crate::error::{domain, NavError, Result};
use crate::geometry::{range_timeline, SceneConfig};
use crate::kinematics::{circular_position, OrbitConfig};
use crate::measurements::{optical_gradient, pulsar_gradient, range_gradient, MeasGradient, StmMode};
use crate::quadrature::{integrate_intervals, QuadOptions};

/// Symmetric 4x4 information matrix in `[r; dr]` coordinates [1/km^2 or 1/AU^2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoMatrix4 {
    pub m: Matrix4<f64>,
}

impl InfoMatrix4 {
    /// Wrap and symmetrize.
    pub fn new(m: Matrix4<f64>) -> Self {
        Self { m: (m + m.transpose()) * 0.5 }
    }

    pub fn zeros() -> Self {
        Self { m: Matrix4::zeros() }
    }

    pub fn rr(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn r_dr(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 2).into_owned()
    }

    pub fn dr_dr(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn frobenius(&self) -> f64 {
        self.m.norm()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { m: self.m * k }
    }

    /// Symmetric and positive semidefinite up to `-1e-10 * ||I||_2`.
    pub fn is_psd(&self) -> bool {
        let sym = (self.m - self.m.transpose()).norm() <= 1e-12 * self.m.norm().max(f64::MIN_POSITIVE);
        let eig = SymmetricEigen::new(self.m).eigenvalues;
        let top = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        sym && eig.iter().all(|&l| l >= -1e-10 * top)
    }
}

impl std::ops::Add for InfoMatrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.m + rhs.m)
    }
}

/// Sum of `h h^T / sigma^2`.
pub fn accumulate_discrete(gradients: &[MeasGradient], sigmas: &[f64]) -> Result<InfoMatrix4> {
    if gradients.len() != sigmas.len() {
        return domain(format!("{} gradients but {} sigmas", gradients.len(), sigmas.len()));
    }
    let mut m = Matrix4::zeros();
    for (g, &s) in gradients.iter().zip(sigmas) {
        if !(s > 0.0) {
            return domain(format!("measurement sigma must be positive, got {s}"));
        }
        m += g.h * g.h.transpose() / (s * s);
    }
    Ok(InfoMatrix4::new(m))
}

fn sun_blocked(orbit: &OrbitConfig, scene: &SceneConfig, alpha: f64, t: f64) -> bool {
    let Some(keepout) = scene.sun_keepout else { return false };
    let r = circular_position(orbit, t);
    let los = crate::geometry::asteroid_position(scene.asteroid_mean_dist, alpha) - r;
    let sun = -r;
    let cosang = los.dot(&sun) / (los.norm() * sun.norm());
    cosang.clamp(-1.0, 1.0).acos() < keepout
}

/// Optical scan information over `p` periods, starting at beacon angle `alpha0`.
///
/// Gradients are scaled by the spacecraft radius so `sigma_agg` is a distance [km].
pub fn integrate_optical_info(
    orbit: &OrbitConfig,
    scene: &SceneConfig,
    alpha0: f64,
    p: f64,
    sigma_agg: f64,
    mode: StmMode,
) -> Result<InfoMatrix4> {
    check_span(p, sigma_agg)?;
    let tt = orbit.t_scale;
    let err = std::cell::RefCell::new(None);
    let q = integrate_intervals(&[(0.0, p)], QuadOptions::OPTICAL, |tb| {
        let alpha = alpha0 + 2.0 * PI * tb;
        if sun_blocked(orbit, scene, alpha, tb * tt) {
            return Matrix4::zeros();
        }
        match optical_gradient(orbit, scene, alpha, tb * tt, mode) {
            Ok(g) => {
                let h = g.h * orbit.a;
                h * h.transpose()
            }
            Err(e) => {
                err.borrow_mut().get_or_insert(e.to_string());
                Matrix4::zeros()
            }
        }
    })?;
    if let Some(e) = err.into_inner() {
        return Err(NavError::Degenerate(e));
    }
    Ok(InfoMatrix4::new(q.value / (p * sigma_agg * sigma_agg)))
}

/// Position block of the normalized optical information for a full beacon-belt scan
/// with the spacecraft held at its initial position.
pub fn optical_rr_closed_form(a: f64, asteroid_mean_dist: f64) -> Result<Matrix2<f64>> {
    let ab = asteroid_mean_dist / a;
    let d = ab * ab - 1.0;
    if d.abs() < 1e-12 {
        return Err(NavError::Degenerate("spacecraft on the beacon belt".into()));
    }
    if d > 0.0 {
        let v = 1.0 / (2.0 * d);
        Ok(Matrix2::new(v, 0.0, 0.0, v))
    } else {
        let e = -d;
        Ok(Matrix2::new(ab * ab / (2.0 * e), 0.0, 0.0, (2.0 - ab * ab) / (2.0 * e)))
    }
}

/// (1/p) int_0^p t^k exp(i (w t + phi)) dt for k = 0, 1, 2.
fn oscillatory_moments(p: f64, w: f64, phi: f64) -> [Complex<f64>; 3] {
    let i = Complex::new(0.0, 1.0);
    let e0 = Complex::from_polar(1.0, phi);
    let ep = Complex::from_polar(1.0, w * p + phi);
    let iw = i * w;
    let j0 = (ep - e0) / iw;
    let j1 = (ep * p - j0) / iw;
    let j2 = (ep * (p * p) - j1 * 2.0) / iw;
    [j0 / p, j1 / p, j2 / p]
}

/// Closed-form pulsar scan information for `beta(t) = beta0 + 2 pi t / T`.
pub fn pulsar_info_closed_form(p: f64, beta0: f64, sigma: f64) -> Result<InfoMatrix4> {
    check_span(p, sigma)?;
    let mom = oscillatory_moments(p, 4.0 * PI, 2.0 * beta0);
    let block = |k: usize| {
        let mk = p.powi(k as i32) / (k as f64 + 1.0);
        let (ck, sk) = (mom[k].re, mom[k].im);
        Matrix2::new(mk + ck, sk, sk, mk - ck) * 0.5
    };
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&block(0));
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&block(1));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&block(1));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&block(2));
    Ok(InfoMatrix4::new(m / (sigma * sigma)))
}

/// Pulsar scan information by quadrature.
pub fn integrate_pulsar_info(orbit: &OrbitConfig, beta0: f64, p: f64, sigma: f64, mode: StmMode) -> Result<InfoMatrix4> {
    check_span(p, sigma)?;
    let tt = orbit.t_scale;
    let q = integrate_intervals(&[(0.0, p)], QuadOptions::PULSAR, |tb| {
        let h = pulsar_gradient(orbit, beta0 + 2.0 * PI * tb, tb * tt, mode).h;
        h * h.transpose()
    })?;
    Ok(InfoMatrix4::new(q.value / (p * sigma * sigma)))
}

/// Two-station ranging information over `p` periods for initial Earth angle `xi0`.
pub fn integrate_range_info(
    orbit: &OrbitConfig,
    scene: &SceneConfig,
    xi0: f64,
    p: f64,
    sigma_pt: f64,
    mode: StmMode,
) -> Result<InfoMatrix4> {
    check_span(p, sigma_pt)?;
    let scene = scene.with_xi0(orbit.a, xi0)?;
    Ok(range_average(orbit, &scene, p, mode)?.scaled(1.0 / (sigma_pt * sigma_pt)))
}

fn range_average(orbit: &OrbitConfig, scene: &SceneConfig, p: f64, mode: StmMode) -> Result<InfoMatrix4> {
    let tt = orbit.t_scale;
    let timeline = range_timeline(p, 1.0)?;
    let mut total = Matrix4::zeros();
    for (station, intervals) in timeline.iter().enumerate() {
        let err = std::cell::RefCell::new(None);
        let q = integrate_intervals(intervals, QuadOptions::RANGE, |tb| {
            match range_gradient(orbit, scene, station, tb * tt, mode) {
                Ok(g) => g.h * g.h.transpose(),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e.to_string());
                    Matrix4::zeros()
                }
            }
        })?;
        if let Some(e) = err.into_inner() {
            return Err(NavError::Degenerate(e));
        }
        total += q.value;
    }
    Ok(InfoMatrix4::new(total / p))
}

fn check_span(p: f64, sigma: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("tracking span p must be >= 1, got {p}"));
    }
    if !(sigma > 0.0) {
        return domain(format!("aggregate sigma must be positive, got {sigma}"));
    }
    Ok(())
}

fn inv2(m: &Matrix2<f64>, what: &'static str) -> Result<Matrix2<f64>> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    // |det| / ||m||^2 is roughly the reciprocal condition number.
    if !(det.abs() > 1e-15 * m.norm_squared()) {
        let eig = SymmetricEigen::new((m + m.transpose()) * 0.5).eigenvalues;
        return Err(NavError::Singular { what, eigenvalue: eig.min() });
    }
    Ok(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// Marginal position covariance via the Schur complement of the displacement block.
pub fn position_covariance(info: &InfoMatrix4) -> Result<Matrix2<f64>> {
    let dd_inv = inv2(&info.dr_dr(), "displacement information block")?;
    let b = info.r_dr();
    let schur = info.rr() - b * dd_inv * b.transpose();
    let p = inv2(&schur, "Schur complement")?;
    let p = (p + p.transpose()) * 0.5;
    if p[(0, 0)] <= 0.0 || p[(1, 1)] <= 0.0 || p.determinant() <= 0.0 {
        let eig = SymmetricEigen::new(schur).eigenvalues;
        return Err(NavError::Singular { what: "Schur complement", eigenvalue: eig.min() });
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilutionResult {
    pub g_rr: Matrix2<f64>,
    pub pdop: f64,
    pub sigma_xx: f64,
    pub sigma_yy: f64,
    pub rho_xy: f64,
    pub sigma_agg: f64,
}

impl DilutionResult {
    pub fn sqrt_gxx(&self) -> f64 {
        self.g_rr[(0, 0)].sqrt()
    }

    pub fn sqrt_gyy(&self) -> f64 {
        self.g_rr[(1, 1)].sqrt()
    }

    pub fn max_sigma(&self) -> f64 {
        self.sigma_xx.max(self.sigma_yy)
    }
}

pub fn dilution(p_rr: &Matrix2<f64>, sigma_agg: f64) -> Result<DilutionResult> {
    if !(sigma_agg > 0.0) {
        return domain("aggregate sigma must be positive");
    }
    let g = p_rr / (sigma_agg * sigma_agg);
    let g = (g + g.transpose()) * 0.5;
    let tol = 1e-12 * g.norm();
    if g[(0, 0)] < -tol || g[(1, 1)] < -tol || g.determinant() < -tol * g.norm() {
        return domain("position covariance is not positive semidefinite");
    }
    let (gxx, gyy) = (g[(0, 0)].max(0.0), g[(1, 1)].max(0.0));
    let rho = if gxx > 0.0 && gyy > 0.0 { (g[(0, 1)] / (gxx * gyy).sqrt()).clamp(-1.0, 1.0) } else { 0.0 };
    Ok(DilutionResult {
        g_rr: g,
        pdop: (gxx + gyy).sqrt(),
        sigma_xx: sigma_agg * gxx.sqrt(),
        sigma_yy: sigma_agg * gyy.sqrt(),
        rho_xy: rho,
        sigma_agg,
    })
}

/// Position covariance and dilution from an information matrix built with `sigma_agg`.
pub fn dilution_from_info(info: &InfoMatrix4, sigma_agg: f64) -> Result<DilutionResult> {
    dilution(&position_covariance(info)?, sigma_agg)
}

/// Inflate a pulsar position covariance by unestimated pulsar direction errors.
///
/// Each direction error maps to at most `a * sigma_beta` of path length, averaged over `n_tau` sources.
pub fn consider_pulsar_covariance(
    p_rr: &Matrix2<f64>,
    g_rr: &Matrix2<f64>,
    a_km: f64,
    sigma_beta: f64,
    n_tau: u32,
) -> Result<Matrix2<f64>> {
    if n_tau == 0 {
        return domain("n_tau must be at least 1");
    }
    let c = a_km * sigma_beta / n_tau as f64;
    Ok(p_rr + g_rr * (c * c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vector4<f64>,
    /// Largest over smallest, with the smallest kept signed.
    pub condition_number: f64,
}

pub fn info_spectrum(info: &InfoMatrix4) -> Spectrum {
    let mut e: Vec<f64> = SymmetricEigen::new(info.m).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    let ev = Vector4::new(e[0], e[1], e[2], e[3]);
    Spectrum { eigenvalues: ev, condition_number: e[3] / e[0] }
}

/// Chebyshev sample points in [0, 1] for the epsilon fit.
pub const EPS_SAMPLES: usize = 9;
pub const EPS_DEGREE: usize = 6;

pub fn epsilon_nodes() -> [f64; EPS_SAMPLES] {
    std::array::from_fn(|k| 0.5 * (1.0 + ((2 * k + 1) as f64 * PI / (2 * EPS_SAMPLES) as f64).cos()))
}

/// Scale the first-order quantities {n, n_E, R_E} by `eps`.
pub fn epsilon_scaled(orbit: &OrbitConfig, scene: &SceneConfig, eps: f64) -> (OrbitConfig, SceneConfig) {
    let o = OrbitConfig { n: orbit.n * eps, ..*orbit };
    let mut s = scene.clone();
    s.n_earth *= eps;
    s.r_earth *= eps;
    (o, s)
}

/// Polynomial coefficients in epsilon of the one-period normalized range information.
pub fn range_info_epsilon_coefficients(
    orbit: &OrbitConfig,
    scene: &SceneConfig,
    xi0: f64,
    mode: StmMode,
) -> Result<Vec<Matrix4<f64>>> {
    let scene = scene.with_xi0(orbit.a, xi0)?;
    let nodes = epsilon_nodes();
    let mut y = DMatrix::<f64>::zeros(EPS_SAMPLES, 16);
    for (k, &e) in nodes.iter().enumerate() {
        let (o, s) = epsilon_scaled(orbit, &scene, e);
        let m = range_average(&o, &s, 1.0, mode)?.m;
        for j in 0..16 {
            y[(k, j)] = m[j];
        }
    }
    let v = DMatrix::from_fn(EPS_SAMPLES, EPS_DEGREE + 1, |k, j| nodes[k].powi(j as i32));
    let svd = v.clone().svd(true, true);
    let c = svd.solve(&y, 1e-14).map_err(|e| NavError::Domain(e.to_string()))?;
    let resid = &v * &c - &y;
    let mut worst = 0.0f64;
    for j in 0..16 {
        let scale = y.column(j).amax();
        if scale > 0.0 {
            worst = worst.max(resid.column(j).amax() / scale);
        }
    }
    let tol = 1e-8;
    if worst > tol {
        return Err(NavError::FitResidual { residual: worst, tolerance: tol });
    }
    Ok((0..=EPS_DEGREE).map(|d| Matrix4::from_fn(|r, cc| c[(d, r + 4 * cc)])).collect())
}

/// Partial sum through order `k` of the epsilon expansion of the normalized range information.
pub fn range_info_epsilon_jet(orbit: &OrbitConfig, scene: &SceneConfig, xi0: f64, k: usize) -> Result<InfoMatrix4> {
    if !(2..=4).contains(&k) {
        return domain(format!("jet order must be 2, 3 or 4, got {k}"));
    }
    let c = range_info_epsilon_coefficients(orbit, scene, xi0, StmMode::Jet)?;
    Ok(InfoMatrix4::new(c[..=k].iter().sum()))
}

/// One-period normalized range information with no expansion.
pub fn range_info_normalized(orbit: &OrbitConfig, scene: &SceneConfig, xi0: f64, p: f64, mode: StmMode) -> Result<InfoMatrix4> {
    integrate_range_info(orbit, scene, xi0, p, 1.0, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_gradient() {
        let g = MeasGradient { h: Vector4::new(1.0, 0.0, 0.0, 0.0), kind: crate::measurements::MeasKind::Pulsar, t: 0.0 };
        let i = accumulate_discrete(&[g], &[2.0]).unwrap();
        assert_eq!(i.m[(0, 0)], 0.25);
        assert_eq!(i.m.sum(), 0.25);
        assert!(accumulate_discrete(&[g], &[]).is_err());
    }

    #[test]
    fn identity_gradients_pdop() {
        let grads: Vec<_> = (0..4)
            .flat_map(|k| {
                let mut h = Vector4::zeros();
                h[k] = 1.0;
                std::iter::repeat(MeasGradient { h, kind: crate::measurements::MeasKind::Range, t: 0.0 }).take(3)
            })
            .collect();
        let i = accumulate_discrete(&grads, &vec![2.0; 12]).unwrap();
        assert_relative_eq!(i.m, Matrix4::identity() * 0.75);
        let d = dilution_from_info(&i, 2.0 / 3f64.sqrt()).unwrap();
        assert_relative_eq!(d.pdop, 2f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn pulsar_rr_block() {
        for b in [0.0, 0.3, 2.0] {
            let i = pulsar_info_closed_form(3.0, b, 2.0).unwrap();
            assert_relative_eq!(i.rr(), Matrix2::identity() * 0.125, epsilon = 1e-15);
        }
    }

    #[test]
    fn pulsar_limit() {
        let i = pulsar_info_closed_form(400.0, 0.4, 1.0).unwrap();
        let d = dilution_from_info(&i, 1.0).unwrap();
        assert_relative_eq!(d.g_rr, Matrix2::identity() * 8.0, epsilon = 0.01);
        assert_relative_eq!(d.pdop, 4.0, max_relative = 1e-3);
    }

    #[test]
    fn block_diagonal_covariance() {
        let mut m = Matrix4::identity();
        m[(0, 0)] = 4.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        let p = position_covariance(&InfoMatrix4::new(m)).unwrap();
        assert_relative_eq!(p, Matrix2::new(4.0, 1.0, 1.0, 1.0).try_inverse().unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn singular_reported() {
        let mut m = Matrix4::identity();
        m[(3, 3)] = 0.0;
        assert!(matches!(position_covariance(&InfoMatrix4::new(m)), Err(NavError::Singular { .. })));
    }

    #[test]
    fn spectrum_basic() {
        let s = info_spectrum(&InfoMatrix4::new(Matrix4::from_diagonal(&Vector4::new(3.0, 1.0, 4.0, 2.0))));
        assert_relative_eq!(s.eigenvalues, Vector4::new(1.0, 2.0, 3.0, 4.0), epsilon = 1e-14);
        assert_relative_eq!(s.condition_number, 4.0, epsilon = 1e-13);
    }

    #[test]
    fn consider_zero_beta() {
        let p = Matrix2::new(2.0, 0.1, 0.1, 3.0);
        assert_eq!(consider_pulsar_covariance(&p, &p, 1e8, 0.0, 8).unwrap(), p);
    }
}
