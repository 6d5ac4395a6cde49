//! Information content of approach tracking in the final hours before Mars entry.
//!
//! Units are km and seconds; states are `[r; v]` relative to Mars with the x-axis along periapsis.

use nalgebra::{Matrix2, Matrix4, RowVector2, SVector, Vector2, Vector4};
use ode_solvers::{Dop853, OutputType, System};

use crate::error::{domain, NavError, Result};
use crate::information::{position_covariance, InfoMatrix4};
use crate::units::DEG;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicApproach {
    /// Gravitational parameter [km^3/s^2].
    pub mu: f64,
    /// Entry interface radius [km].
    pub entry_radius: f64,
    /// True anomaly at entry [deg], negative on the inbound leg.
    pub entry_true_anomaly_deg: f64,
    /// Hyperbolic excess speed [km/s].
    pub v_inf: f64,
}

impl Default for HyperbolicApproach {
    fn default() -> Self {
        Self { mu: 42_828.37, entry_radius: 3522.2, entry_true_anomaly_deg: -19.0, v_inf: 3.0 }
    }
}

/// Conic elements derived from an approach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub eccentricity: f64,
    /// Semi-latus rectum [km].
    pub semi_latus: f64,
    pub periapsis: f64,
}

impl HyperbolicApproach {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.entry_radius > 0.0 && self.v_inf > 0.0) {
            return domain("mu, entry radius and v_inf must be positive");
        }
        if !(self.entry_true_anomaly_deg < 0.0) {
            return domain("entry true anomaly must be negative (inbound)");
        }
        Ok(())
    }

    pub fn conic(&self) -> Conic {
        let a_abs = self.mu / (self.v_inf * self.v_inf);
        let r = self.entry_radius;
        let c = (self.entry_true_anomaly_deg * DEG).cos();
        // r (1 + e cos th) = |a| (e^2 - 1)
        let e = (r * c + (r * r * c * c + 4.0 * a_abs * (a_abs + r)).sqrt()) / (2.0 * a_abs);
        let p = a_abs * (e * e - 1.0);
        Conic { eccentricity: e, semi_latus: p, periapsis: p / (1.0 + e) }
    }

    /// Position and velocity at true anomaly `theta` [rad].
    pub fn state_at(&self, theta: f64) -> Vector4<f64> {
        let k = self.conic();
        let r = k.semi_latus / (1.0 + k.eccentricity * theta.cos());
        let vs = (self.mu / k.semi_latus).sqrt();
        Vector4::new(r * theta.cos(), r * theta.sin(), -vs * theta.sin(), vs * (k.eccentricity + theta.cos()))
    }

    pub fn entry_state(&self) -> Vector4<f64> {
        self.state_at(self.entry_true_anomaly_deg * DEG)
    }
}

type Aug = SVector<f64, 20>;

struct Variational {
    mu: f64,
}

impl System<f64, Aug> for Variational {
    fn system(&self, _t: f64, y: &Aug, dy: &mut Aug) {
        let r = Vector2::new(y[0], y[1]);
        let rn = r.norm();
        let r3 = rn.powi(3);
        let acc = -self.mu * r / r3;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = acc.x;
        dy[3] = acc.y;
        let g = (r * r.transpose() * (3.0 / (rn * rn)) - Matrix2::identity()) * (self.mu / r3);
        let mut a = Matrix4::zeros();
        a.fixed_view_mut::<2, 2>(0, 2).copy_from(&Matrix2::identity());
        a.fixed_view_mut::<2, 2>(2, 0).copy_from(&g);
        let phi = Matrix4::from_column_slice(&y.as_slice()[4..20]);
        let dphi = a * phi;
        dy.as_mut_slice()[4..20].copy_from_slice(dphi.as_slice());
    }
}

const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-12;

fn propagate(mu: f64, y0: Aug, t0: f64, t1: f64) -> Result<Aug> {
    if t0 == t1 {
        return Ok(y0);
    }
    let mut solver = Dop853::new(Variational { mu }, t0, t1, t1 - t0, y0, RTOL, ATOL);
    solver.set_output(OutputType::Sparse);
    solver.integrate().map_err(|e| NavError::Integration(format!("{e:?}")))?;
    match (solver.x_out().last(), solver.y_out().last()) {
        (Some(&x), Some(&y)) if (x - t1).abs() <= 1e-9 * (1.0 + t1.abs()) => Ok(y),
        (x, _) => Err(NavError::Integration(format!("stopped at {x:?} before reaching {t1}"))),
    }
}

fn augmented(state: Vector4<f64>, phi: Matrix4<f64>) -> Aug {
    let mut y = Aug::zeros();
    y.as_mut_slice()[..4].copy_from_slice(state.as_slice());
    y.as_mut_slice()[4..].copy_from_slice(phi.as_slice());
    y
}

fn split(y: &Aug) -> (Vector4<f64>, Matrix4<f64>) {
    (Vector4::from_column_slice(&y.as_slice()[..4]), Matrix4::from_column_slice(&y.as_slice()[4..]))
}

/// Nominal state at time `t` [s] relative to entry (t = 0).
pub fn nominal_state(approach: &HyperbolicApproach, t: f64) -> Result<Vector4<f64>> {
    let y = propagate(approach.mu, augmented(approach.entry_state(), Matrix4::identity()), 0.0, t)?;
    Ok(split(&y).0)
}

/// STM `Phi(t, t_e)` mapping state deviations at `t_e` to `t`, times in seconds relative to entry.
pub fn hyperbolic_stm(approach: &HyperbolicApproach, t: f64, t_e: f64) -> Result<Matrix4<f64>> {
    approach.validate()?;
    let y_e = propagate(approach.mu, augmented(approach.entry_state(), Matrix4::identity()), 0.0, t_e)?;
    let (x_e, _) = split(&y_e);
    let y = propagate(approach.mu, augmented(x_e, Matrix4::identity()), t_e, t)?;
    Ok(split(&y).1)
}

/// STMs `Phi(t_i, 0)` for many epochs, propagating once through the sorted times.
pub fn hyperbolic_stm_table(approach: &HyperbolicApproach, times: &[f64]) -> Result<Vec<Matrix4<f64>>> {
    approach.validate()?;
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[b].total_cmp(&times[a]));
    let mut out = vec![Matrix4::zeros(); times.len()];
    let mut y = augmented(approach.entry_state(), Matrix4::identity());
    let mut t_now = 0.0;
    for k in order {
        y = propagate(approach.mu, y, t_now, times[k])?;
        t_now = times[k];
        out[k] = split(&y).1;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Cpf,
    Pulsar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryMeasurement {
    /// Minutes relative to entry, in [-120, 0].
    pub t_min: f64,
    pub kind: EntryKind,
    /// Angle of the line-of-sight unit vector [deg].
    pub angle_deg: f64,
    /// [km]
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntrySchedule {
    pub measurements: Vec<EntryMeasurement>,
}

impl EntrySchedule {
    pub fn validate(&self) -> Result<()> {
        for m in &self.measurements {
            if !(-120.0..=0.0).contains(&m.t_min) {
                return domain(format!("measurement time {} min outside the final two hours", m.t_min));
            }
            if !(m.sigma > 0.0) {
                return domain("measurement sigma must be positive");
            }
        }
        Ok(())
    }

    /// Four best-set pulsar TOAs at 30-minute spacing.
    pub fn pulsar_default() -> Self {
        let rows = [(-90.0, 162.0, 97.0), (-60.0, 283.0, 5.0), (-30.0, 42.0, 8.0), (0.0, 46.0, 87.0)];
        Self {
            measurements: rows
                .iter()
                .map(|&(t, b, s)| EntryMeasurement { t_min: t, kind: EntryKind::Pulsar, angle_deg: b, sigma: s })
                .collect(),
        }
    }

    /// 120 one-minute CPF-phase points at 0.5 m along the Earth direction `xi - 81 deg`.
    pub fn cpf_default(xi_deg: f64) -> Self {
        Self {
            measurements: (1..=120)
                .map(|k| EntryMeasurement {
                    t_min: -120.0 + k as f64,
                    kind: EntryKind::Cpf,
                    angle_deg: xi_deg - 81.0,
                    sigma: 5e-4,
                })
                .collect(),
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self {
            measurements: self.measurements.iter().map(|m| EntryMeasurement { sigma, ..*m }).collect(),
        }
    }
}

/// Line-of-sight gradient through the position rows of `stm`.
pub fn entry_gradient(angle_rad: f64, stm: &Matrix4<f64>) -> Vector4<f64> {
    let u = RowVector2::new(angle_rad.cos(), angle_rad.sin());
    (u * stm.fixed_rows::<2>(0)).transpose()
}

pub fn entry_information(schedule: &EntrySchedule, approach: &HyperbolicApproach) -> Result<InfoMatrix4> {
    if schedule.measurements.is_empty() {
        return domain("entry schedule is empty");
    }
    schedule.validate()?;
    let times: Vec<f64> = schedule.measurements.iter().map(|m| m.t_min * 60.0).collect();
    let stms = hyperbolic_stm_table(approach, &times)?;
    let mut m = Matrix4::zeros();
    for (meas, phi) in schedule.measurements.iter().zip(&stms) {
        let h = entry_gradient(meas.angle_deg * DEG, phi);
        m += h * h.transpose() / (meas.sigma * meas.sigma);
    }
    Ok(InfoMatrix4::new(m))
}

/// A priori information at entry from covariance `p0` at the start epoch.
///
/// `stm_e0` maps start-epoch deviations to entry.
pub fn apriori_entry_info(p0: &Matrix4<f64>, stm_e0: &Matrix4<f64>) -> Result<InfoMatrix4> {
    if p0.cholesky().is_none() {
        return domain("a priori covariance must be symmetric positive definite");
    }
    let pe = stm_e0 * p0 * stm_e0.transpose();
    let pe = (pe + pe.transpose()) * 0.5;
    let inv = pe.cholesky().map(|c| c.inverse()).ok_or(NavError::Singular {
        what: "propagated a priori covariance",
        eigenvalue: pe.symmetric_eigenvalues().min(),
    })?;
    Ok(InfoMatrix4::new(inv))
}

/// Default a priori covariance: 20 km and 1e-4 km/s per component.
pub fn default_apriori() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(400.0, 400.0, 1e-8, 1e-8))
}

/// STM from the start of the two-hour window to entry.
pub fn window_stm(approach: &HyperbolicApproach) -> Result<Matrix4<f64>> {
    let back = hyperbolic_stm(approach, -7200.0, 0.0)?;
    back.try_inverse().ok_or(NavError::Singular { what: "window STM", eigenvalue: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryReport {
    pub p_rr: Matrix2<f64>,
    pub sigma_xx: f64,
    pub sigma_yy: f64,
    pub apriori_frobenius: f64,
    pub measurement_frobenius: f64,
}

pub fn entry_covariance(i0: &InfoMatrix4, imeas: &InfoMatrix4) -> Result<EntryReport> {
    let total = *i0 + *imeas;
    let p_rr = position_covariance(&total)?;
    Ok(EntryReport {
        p_rr,
        sigma_xx: p_rr[(0, 0)].sqrt(),
        sigma_yy: p_rr[(1, 1)].sqrt(),
        apriori_frobenius: i0.frobenius(),
        measurement_frobenius: imeas.frobenius(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conic_matches_entry_radius() {
        let a = HyperbolicApproach::default();
        let k = a.conic();
        assert!(k.eccentricity > 1.0);
        let x = a.entry_state();
        assert_relative_eq!(Vector2::new(x[0], x[1]).norm(), a.entry_radius, max_relative = 1e-12);
        let v2 = x[2] * x[2] + x[3] * x[3];
        assert_relative_eq!(v2 / 2.0 - a.mu / a.entry_radius, a.v_inf * a.v_inf / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn identity_at_entry() {
        let a = HyperbolicApproach::default();
        assert_eq!(hyperbolic_stm(&a, 0.0, 0.0).unwrap(), Matrix4::identity());
    }

    #[test]
    fn inverse_composition() {
        let a = HyperbolicApproach::default();
        let f = hyperbolic_stm(&a, -3600.0, 0.0).unwrap();
        let b = hyperbolic_stm(&a, 0.0, -3600.0).unwrap();
        assert_relative_eq!(f * b, Matrix4::identity(), epsilon = 1e-8);
    }

    #[test]
    fn unit_gradient() {
        assert_eq!(entry_gradient(0.0, &Matrix4::identity()), Vector4::new(1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn apriori_identity_map() {
        let p0 = default_apriori();
        let i = apriori_entry_info(&p0, &Matrix4::identity()).unwrap();
        assert_relative_eq!(i.m, p0.try_inverse().unwrap(), max_relative = 1e-12);
    }
}
