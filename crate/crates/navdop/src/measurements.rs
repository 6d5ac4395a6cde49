//! Measurement sensitivity gradients and noise models for optical, pulsar and range data.

use nalgebra::{Matrix2x4, RowVector2, Vector2, Vector4};

use crate::catalog::CameraSpec;
use crate::error::{domain, NavError, Result};
use crate::geometry::{asteroid_position, pointing_angle, station_position, SceneConfig};
use crate::kinematics::{circular_position, stm_exact, stm_jet, OrbitConfig};
use crate::units::{au_to_km, URAD};

/// Ranging noise strength at 1 AU [sqrt(hr)].
pub const RANGE_NOISE_STRENGTH: f64 = 8.6e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasKind {
    Optical,
    Pulsar,
    Range,
}

/// Which STM the chain rule uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StmMode {
    #[default]
    Exact,
    Jet,
}

/// Row gradient of one scalar measurement with respect to the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasGradient {
    pub h: Vector4<f64>,
    pub kind: MeasKind,
    pub t: f64,
}

impl MeasGradient {
    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.h[0], self.h[1])
    }

    pub fn displacement(&self) -> Vector2<f64> {
        Vector2::new(self.h[2], self.h[3])
    }
}

/// Noise parameters for each data type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Optical { theta: f64, sigma_s: f64, sigma_s_bar: f64, asteroid_mean_dist: f64 },
    Pulsar { s_tau: f64, area: f64, sigma_beta: f64 },
    Range { s_rho: f64, rho0: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NoiseModel::Optical { theta, sigma_s, sigma_s_bar, asteroid_mean_dist } => {
                theta > 0.0 && sigma_s > 0.0 && sigma_s_bar >= sigma_s && asteroid_mean_dist > 0.0
            }
            NoiseModel::Pulsar { s_tau, area, sigma_beta } => s_tau > 0.0 && area > 0.0 && sigma_beta > 0.0,
            NoiseModel::Range { s_rho, rho0 } => s_rho > 0.0 && rho0 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            domain(format!("noise parameters must be positive: {self:?}"))
        }
    }
}

fn position_rows(orbit: &OrbitConfig, t: f64, mode: StmMode) -> Matrix2x4<f64> {
    match mode {
        StmMode::Exact => stm_exact(orbit, t).position_rows(),
        StmMode::Jet => stm_jet(orbit, t, 1).expect("order 1 is valid").position_rows(),
    }
}

/// Jacobian of the pointing angle with respect to spacecraft position.
///
/// Moving the spacecraft shifts the line of sight opposite to the beacon offset.
pub fn optical_partial(gamma: f64, distance: f64) -> RowVector2<f64> {
    RowVector2::new(gamma.sin(), -gamma.cos()) / distance
}

/// Pointing-angle gradient for a beacon at angle `alpha_j` on the mean belt.
///
/// Jet mode returns the first-order expansion about the initial spacecraft position.
pub fn optical_gradient(
    orbit: &OrbitConfig,
    scene: &SceneConfig,
    alpha_j: f64,
    t: f64,
    mode: StmMode,
) -> Result<MeasGradient> {
    let aa = scene.asteroid_mean_dist;
    let h = match mode {
        StmMode::Exact => {
            let r = circular_position(orbit, t);
            let pa = pointing_angle(&r, &asteroid_position(aa, alpha_j))?;
            let row = optical_partial(pa.gamma, pa.distance) * position_rows(orbit, t, mode);
            row.transpose()
        }
        StmMode::Jet => optical_jet(orbit, aa, alpha_j, t)?,
    };
    Ok(MeasGradient { h, kind: MeasKind::Optical, t })
}

fn optical_jet(orbit: &OrbitConfig, aa: f64, alpha_j: f64, t: f64) -> Result<Vector4<f64>> {
    let a = orbit.a;
    // Expansion is carried out in the frame where theta0 = 0.
    let alpha = alpha_j - orbit.theta0;
    let d2 = a * a + aa * aa - 2.0 * a * aa * alpha.cos();
    if !(d2 > 0.0) {
        return Err(NavError::Degenerate("spacecraft and beacon coincide".into()));
    }
    let (s, c) = alpha.sin_cos();
    let tau = t / orbit.t_scale;
    let h0 = Vector4::new(aa * s, -(aa * c - a), tau * aa * s, -tau * (aa * c - a)) / d2;
    let p = a * a - 2.0 * a * aa * c + aa * aa * (2.0 * alpha).cos();
    let q = 2.0 * aa * (aa * c - a) * s;
    let nt = orbit.n * t;
    let h1 = -(a / (d2 * d2)) * Vector4::new(nt * p, nt * q, nt * tau * p, nt * tau * q);
    let h = h0 + h1;
    Ok(rotate_gradient(h, orbit.theta0))
}

fn rotate_gradient(h: Vector4<f64>, theta0: f64) -> Vector4<f64> {
    if theta0 == 0.0 {
        return h;
    }
    let (s, c) = theta0.sin_cos();
    let rot = |x: f64, y: f64| (c * x - s * y, s * x + c * y);
    let (x, y) = rot(h[0], h[1]);
    let (u, v) = rot(h[2], h[3]);
    Vector4::new(x, y, u, v)
}

/// Per-sample noise inflated by beacon ephemeris error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalNoise {
    /// Rescaled sample uncertainty [pixel].
    pub sigma_s_bar: f64,
    /// Angular ephemeris contribution [rad].
    pub ephemeris_angle: f64,
    /// Equivalent single-sample distance error at the spacecraft radius [km].
    pub distance_factor_km: f64,
}

/// Sample noise with the beacon ephemeris error folded in.
///
/// `a` and `a_a` are in AU, `sigma_a_km` is the beacon position error.
pub fn optical_noise(camera: &CameraSpec, a: f64, a_a: f64, sigma_a_km: f64) -> Result<OpticalNoise> {
    if a_a == a {
        return Err(NavError::Degenerate("beacon radius equals spacecraft radius".into()));
    }
    if !(sigma_a_km >= 0.0) || !(a > 0.0) || !(a_a > 0.0) {
        return domain("distances and ephemeris error must be positive");
    }
    let theta = camera.theta_urad * URAD;
    let gain = (a_a / (a_a - a)).abs();
    let ephemeris_angle = gain * sigma_a_km / au_to_km(a_a);
    let sigma_s_bar = (camera.sigma_s.powi(2) + (ephemeris_angle / theta).powi(2)).sqrt();
    Ok(OpticalNoise { sigma_s_bar, ephemeris_angle, distance_factor_km: theta * sigma_s_bar * au_to_km(a) })
}

/// Aggregate optical uncertainty over `p` days at `n_gamma` samples per day [km].
pub fn optical_aggregate_sigma(theta_urad: f64, sigma_s_bar: f64, a: f64, p: f64, n_gamma: f64) -> Result<f64> {
    if !(p * n_gamma >= 1.0) {
        return domain("need at least one optical sample");
    }
    Ok(theta_urad * URAD * sigma_s_bar * au_to_km(a) / (p * n_gamma).sqrt())
}

/// Pulsar time-of-arrival gradient for line of sight angle `beta_k`.
pub fn pulsar_gradient(orbit: &OrbitConfig, beta_k: f64, t: f64, mode: StmMode) -> MeasGradient {
    let u = RowVector2::new(beta_k.cos(), beta_k.sin());
    let row = u * position_rows(orbit, t, mode);
    MeasGradient { h: row.transpose(), kind: MeasKind::Pulsar, t }
}

/// Single-pulsar range-equivalent TOA uncertainty [km].
pub fn pulsar_sigma(s_tau: f64, area_cm2: f64, h_tau_hr: f64) -> Result<f64> {
    if !(area_cm2 > 0.0) || !(h_tau_hr > 0.0) {
        return domain("area and integration time must be positive");
    }
    Ok(s_tau / (area_cm2 * h_tau_hr).sqrt())
}

/// TOA uncertainty over one period with pulsar location errors folded in [km].
pub fn pulsar_effective_sigma(
    s_tau_mean: f64,
    area_cm2: f64,
    t_hr: f64,
    a_km: f64,
    sigma_beta_mean: f64,
    n_tau: u32,
) -> Result<f64> {
    if n_tau == 0 {
        return domain("n_tau must be at least 1");
    }
    let base = pulsar_sigma(s_tau_mean, area_cm2, t_hr)?;
    let loc = pulsar_location_error_bound(a_km, sigma_beta_mean) / n_tau as f64;
    Ok((base * base + loc * loc).sqrt())
}

/// Position error induced by a pulsar direction error [km].
pub fn pulsar_location_error_bound(a_km: f64, sigma_beta: f64) -> f64 {
    a_km * sigma_beta
}

/// Slant-range gradient from station `station_i`.
///
/// Jet mode contracts the line of sight with the second-order STM.
pub fn range_gradient(
    orbit: &OrbitConfig,
    scene: &SceneConfig,
    station_i: usize,
    t: f64,
    mode: StmMode,
) -> Result<MeasGradient> {
    let r = circular_position(orbit, t);
    let rho = r - station_position(scene, station_i, t)?;
    let d = rho.norm();
    if !(d > 0.0) {
        return Err(NavError::Degenerate("spacecraft at station".into()));
    }
    let rows = match mode {
        StmMode::Exact => stm_exact(orbit, t).position_rows(),
        StmMode::Jet => stm_jet(orbit, t, 2)?.position_rows(),
    };
    let row = (rho / d).transpose() * rows;
    Ok(MeasGradient { h: row.transpose(), kind: MeasKind::Range, t })
}

/// Range noise for a slant range `rho0_km` and integration time [km].
pub fn range_sigma(rho0_km: f64, h_rho_hr: f64) -> Result<f64> {
    range_sigma_from_factor(RANGE_NOISE_STRENGTH * rho0_km, h_rho_hr)
}

/// Range noise from a precomputed `s_rho * rho0` factor [km sqrt(hr)].
pub fn range_sigma_from_factor(factor: f64, h_rho_hr: f64) -> Result<f64> {
    if !(h_rho_hr > 0.0) {
        return domain("integration time must be positive");
    }
    Ok(factor / h_rho_hr.sqrt())
}
