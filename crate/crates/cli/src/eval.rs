//! Evaluate a scenario at one grid point.

use nalgebra::Vector4;
use navdop::catalog::selection_stats;
use navdop::entry::{self, EntryReport, EntrySchedule};
use navdop::information::{
    dilution_from_info, info_spectrum, integrate_optical_info, integrate_pulsar_info,
    pulsar_info_closed_form, range_info_epsilon_jet, range_info_normalized, Spectrum,
};
use navdop::kinematics::stm_error_norm;
use navdop::measurements::{optical_aggregate_sigma, optical_noise, pulsar_effective_sigma, range_sigma_from_factor};
use navdop::units::{au_to_km, DAY_HR};
use navdop::{DilutionResult, InfoMatrix4};

use crate::error::{invalid, CliError};
use crate::scenario::{DataType, RangeJet, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub angle: f64,
    pub p: f64,
    pub dilution: DilutionResult,
    /// Spectrum of the information normalized to unit measurement noise.
    pub spectrum: Spectrum,
}

/// Aggregate measurement uncertainty over `p` periods [km].
pub fn aggregate_sigma(s: &Scenario, p: f64) -> Result<f64, CliError> {
    let hours = p * s.orbit.t_scale * DAY_HR;
    Ok(match s.data_type {
        DataType::Optical => {
            let noise = optical_noise(&s.optical.camera, s.orbit.a, s.scene.asteroid_mean_dist, s.optical.sigma_asteroid_km)?;
            optical_aggregate_sigma(s.optical.camera.theta_urad, noise.sigma_s_bar, s.orbit.a, p, s.optical.images_per_day)?
        }
        DataType::Pulsar => {
            let refs: Vec<_> = s.pulsar.selection.iter().collect();
            let stats = selection_stats(&refs)?;
            let sigma_beta = if s.pulsar.consider { stats.mean_sigma_beta_rad() } else { 0.0 };
            pulsar_effective_sigma(stats.mean_s_tau, s.pulsar.area_cm2, hours, au_to_km(s.orbit.a), sigma_beta, s.pulsar.n_tau)?
        }
        DataType::Range => range_sigma_from_factor(s.range.noise_factor, hours)?,
        DataType::EntryCompare => return invalid("entry_compare has no aggregate sigma"),
    })
}

/// Information matrix for unit measurement noise.
pub fn normalized_info(s: &Scenario, angle: f64, p: f64) -> Result<InfoMatrix4, CliError> {
    Ok(match s.data_type {
        DataType::Optical => integrate_optical_info(&s.orbit, &s.scene, angle, p, 1.0, s.mode)?,
        DataType::Pulsar if s.pulsar.closed_form => pulsar_info_closed_form(p, angle, 1.0)?,
        DataType::Pulsar => integrate_pulsar_info(&s.orbit, angle, p, 1.0, s.mode)?,
        DataType::Range => match s.range.jet {
            RangeJet::Full => range_info_normalized(&s.orbit, &s.scene, angle, p, s.mode)?,
            RangeJet::Order(k) => {
                if p != 1.0 {
                    return invalid("range jets are defined for a single period (p = 1)");
                }
                range_info_epsilon_jet(&s.orbit, &s.scene, angle, k)?
            }
        },
        DataType::EntryCompare => return invalid("entry_compare has no scan information"),
    })
}

pub fn evaluate(s: &Scenario, angle: f64, p: f64) -> Result<Evaluation, CliError> {
    let sigma = aggregate_sigma(s, p)?;
    let unit = normalized_info(s, angle, p)?;
    let spectrum = info_spectrum(&unit);
    let dilution = dilution_from_info(&unit.scaled(1.0 / (sigma * sigma)), sigma)?;
    Ok(Evaluation { angle, p, dilution, spectrum })
}

/// Spectrum only; avoids the covariance inversion that fails for indefinite jets.
pub fn evaluate_spectrum(s: &Scenario, angle: f64, p: f64) -> Result<Spectrum, CliError> {
    Ok(info_spectrum(&normalized_info(s, angle, p)?))
}

/// Jet STM error norms at `t` days: (e2, e3).
pub fn stm_errors(s: &Scenario, t: f64) -> Result<(f64, f64), CliError> {
    Ok((stm_error_norm(&s.orbit, t, 1)?, stm_error_norm(&s.orbit, t, 2)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryComparison {
    pub pulsar: EntryReport,
    pub cpf: EntryReport,
}

pub fn entry_compare(s: &Scenario) -> Result<EntryComparison, CliError> {
    let approach = &s.entry.approach;
    let i0 = entry::apriori_entry_info(&entry::default_apriori(), &entry::window_stm(approach)?)?;
    let mut pulsar = EntrySchedule::pulsar_default();
    if let Some(sig) = s.entry.pulsar_sigma_km {
        pulsar = pulsar.with_sigma(sig);
    }
    let cpf = EntrySchedule::cpf_default(s.entry.xi_deg).with_sigma(s.entry.cpf_sigma_km);
    let ip = entry::entry_information(&pulsar, approach)?;
    let ic = entry::entry_information(&cpf, approach)?;
    Ok(EntryComparison { pulsar: entry::entry_covariance(&i0, &ip)?, cpf: entry::entry_covariance(&i0, &ic)? })
}

pub(crate) fn fmt_vec(v: &Vector4<f64>) -> String {
    v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",")
}
