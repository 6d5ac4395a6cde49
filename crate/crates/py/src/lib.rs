//! Python bindings for the navdop core.

use nalgebra::{Matrix2, Matrix4};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use navdop::catalog::{builtin_pulsars, selection_stats, PulsarSelection};
use navdop::entry::{self, EntrySchedule, HyperbolicApproach};
use navdop::geometry::SceneConfig;
use navdop::information::{
    dilution_from_info, info_spectrum, integrate_optical_info, integrate_pulsar_info, integrate_range_info,
    pulsar_info_closed_form, range_info_epsilon_jet,
};
use navdop::kinematics::{stm_error_norm, stm_exact, stm_jet};
use navdop::measurements::{pulsar_sigma as core_pulsar_sigma, range_sigma_from_factor};
use navdop::{InfoMatrix4, NavError, OrbitConfig, StmMode};

fn to_py(e: NavError) -> PyErr {
    match e {
        NavError::Domain(_) | NavError::MissingField { .. } | NavError::NotFound(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn mode(name: &str) -> PyResult<StmMode> {
    match name {
        "exact" => Ok(StmMode::Exact),
        "jet" => Ok(StmMode::Jet),
        _ => Err(PyValueError::new_err(format!("unknown stm mode '{name}', expected exact or jet"))),
    }
}

fn rows4(m: &Matrix4<f64>) -> Vec<Vec<f64>> {
    (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
}

fn rows2(m: &Matrix2<f64>) -> Vec<Vec<f64>> {
    (0..2).map(|i| (0..2).map(|j| m[(i, j)]).collect()).collect()
}

/// Circular reference orbit.
#[pyclass(name = "Orbit", frozen)]
struct PyOrbit {
    inner: OrbitConfig,
}

#[pymethods]
impl PyOrbit {
    #[new]
    #[pyo3(signature = (a, n, theta0 = 0.0))]
    fn new(a: f64, n: f64, theta0: f64) -> PyResult<Self> {
        Ok(Self { inner: OrbitConfig::new(a, n).map_err(to_py)?.with_theta0(theta0) })
    }

    #[staticmethod]
    fn mars() -> Self {
        Self { inner: OrbitConfig::mars() }
    }

    #[staticmethod]
    fn neptune() -> Self {
        Self { inner: OrbitConfig::neptune() }
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    #[getter]
    fn n(&self) -> f64 {
        self.inner.n
    }

    #[getter]
    fn theta0(&self) -> f64 {
        self.inner.theta0
    }

    /// State transition matrix at `t` days; `order` selects a truncated jet.
    #[pyo3(signature = (t, order = None))]
    fn stm(&self, t: f64, order: Option<u8>) -> PyResult<Vec<Vec<f64>>> {
        let s = match order {
            None => stm_exact(&self.inner, t),
            Some(k) => stm_jet(&self.inner, t, k).map_err(to_py)?,
        };
        Ok(rows4(&s.m))
    }

    fn stm_error(&self, t: f64, order: u8) -> PyResult<f64> {
        stm_error_norm(&self.inner, t, order).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Orbit(a={}, n={}, theta0={})", self.inner.a, self.inner.n, self.inner.theta0)
    }
}

/// Earth, station and beacon-belt configuration.
#[pyclass(name = "Scene", frozen)]
struct PyScene {
    inner: SceneConfig,
}

#[pymethods]
impl PyScene {
    #[new]
    #[pyo3(signature = (orbit, xi0 = 0.0, asteroid_dist = 2.7))]
    fn new(orbit: &PyOrbit, xi0: f64, asteroid_dist: f64) -> PyResult<Self> {
        Ok(Self { inner: SceneConfig::new(&orbit.inner, xi0, asteroid_dist).map_err(to_py)? })
    }

    #[staticmethod]
    fn mars() -> Self {
        Self { inner: SceneConfig::mars() }
    }

    #[staticmethod]
    fn neptune() -> Self {
        Self { inner: SceneConfig::neptune() }
    }

    #[getter]
    fn asteroid_dist(&self) -> f64 {
        self.inner.asteroid_mean_dist
    }
}

/// Position dilution of precision.
#[pyclass(name = "Dilution", frozen, get_all)]
struct PyDilution {
    pdop: f64,
    sqrt_gxx: f64,
    sqrt_gyy: f64,
    rho_xy: f64,
    sigma_xx: f64,
    sigma_yy: f64,
    sigma_agg: f64,
}

#[pymethods]
impl PyDilution {
    fn __repr__(&self) -> String {
        format!(
            "Dilution(pdop={:.6}, sqrt_gxx={:.6}, sqrt_gyy={:.6}, rho_xy={:.6})",
            self.pdop, self.sqrt_gxx, self.sqrt_gyy, self.rho_xy
        )
    }
}

/// Symmetric 4x4 information matrix for the initial state.
#[pyclass(name = "InfoMatrix", frozen)]
struct PyInfo {
    inner: InfoMatrix4,
}

#[pymethods]
impl PyInfo {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(PyValueError::new_err("information matrix must be 4x4"));
        }
        Ok(Self { inner: InfoMatrix4::new(Matrix4::from_fn(|i, j| rows[i][j])) })
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows4(&self.inner.m)
    }

    fn rr(&self) -> Vec<Vec<f64>> {
        rows2(&self.inner.rr())
    }

    fn frobenius(&self) -> f64 {
        self.inner.frobenius()
    }

    fn is_psd(&self) -> bool {
        self.inner.is_psd()
    }

    /// Ascending eigenvalues.
    fn eigenvalues(&self) -> Vec<f64> {
        info_spectrum(&self.inner).eigenvalues.iter().copied().collect()
    }

    fn condition_number(&self) -> f64 {
        info_spectrum(&self.inner).condition_number
    }

    /// Dilution for an information matrix built with aggregate noise `sigma_agg`.
    #[pyo3(signature = (sigma_agg = 1.0))]
    fn dilution(&self, sigma_agg: f64) -> PyResult<PyDilution> {
        let d = dilution_from_info(&self.inner, sigma_agg).map_err(to_py)?;
        Ok(PyDilution {
            pdop: d.pdop,
            sqrt_gxx: d.sqrt_gxx(),
            sqrt_gyy: d.sqrt_gyy(),
            rho_xy: d.rho_xy,
            sigma_xx: d.sigma_xx,
            sigma_yy: d.sigma_yy,
            sigma_agg: d.sigma_agg,
        })
    }

    fn __add__(&self, other: &PyInfo) -> PyInfo {
        PyInfo { inner: self.inner + other.inner }
    }
}

#[pyfunction]
#[pyo3(signature = (orbit, scene, alpha0, p = 1.0, sigma = 1.0, stm = "exact"))]
fn optical_info(orbit: &PyOrbit, scene: &PyScene, alpha0: f64, p: f64, sigma: f64, stm: &str) -> PyResult<PyInfo> {
    let i = integrate_optical_info(&orbit.inner, &scene.inner, alpha0, p, sigma, mode(stm)?).map_err(to_py)?;
    Ok(PyInfo { inner: i })
}

/// Pulsar scan information; the closed form is used unless `orbit` is given.
#[pyfunction]
#[pyo3(signature = (beta0, p = 1.0, sigma = 1.0, orbit = None, stm = "exact"))]
fn pulsar_info(beta0: f64, p: f64, sigma: f64, orbit: Option<&PyOrbit>, stm: &str) -> PyResult<PyInfo> {
    let i = match orbit {
        None => pulsar_info_closed_form(p, beta0, sigma),
        Some(o) => integrate_pulsar_info(&o.inner, beta0, p, sigma, mode(stm)?),
    }
    .map_err(to_py)?;
    Ok(PyInfo { inner: i })
}

#[pyfunction]
#[pyo3(signature = (orbit, scene, xi0, p = 1.0, sigma = 1.0, stm = "exact"))]
fn range_info(orbit: &PyOrbit, scene: &PyScene, xi0: f64, p: f64, sigma: f64, stm: &str) -> PyResult<PyInfo> {
    let i = integrate_range_info(&orbit.inner, &scene.inner, xi0, p, sigma, mode(stm)?).map_err(to_py)?;
    Ok(PyInfo { inner: i })
}

/// Normalized one-period range information truncated at order `k` in the rotation ratio.
#[pyfunction]
fn range_info_jet(orbit: &PyOrbit, scene: &PyScene, xi0: f64, k: usize) -> PyResult<PyInfo> {
    let i = range_info_epsilon_jet(&orbit.inner, &scene.inner, xi0, k).map_err(to_py)?;
    Ok(PyInfo { inner: i })
}

/// Single-pulsar range noise [km] for stability `s_tau`, area [cm^2] and integration [hr].
#[pyfunction]
fn pulsar_sigma(s_tau: f64, area_cm2: f64, hours: f64) -> PyResult<f64> {
    core_pulsar_sigma(s_tau, area_cm2, hours).map_err(to_py)
}

#[pyfunction]
fn range_sigma(factor: f64, hours: f64) -> PyResult<f64> {
    range_sigma_from_factor(factor, hours).map_err(to_py)
}

/// Mean stability [km cm sqrt(hr)], mean location error [mas] and count for `sextant` or `best4`.
#[pyfunction]
fn pulsar_selection_stats(selection: &str) -> PyResult<(f64, f64, usize)> {
    let sel = match selection {
        "sextant" => PulsarSelection::Sextant,
        "best4" => PulsarSelection::BestFour,
        other => PulsarSelection::Named(other.split(',').map(|s| s.trim().to_string()).collect()),
    };
    let catalog = builtin_pulsars();
    let chosen = sel.resolve(&catalog).map_err(to_py)?;
    let s = selection_stats(&chosen).map_err(to_py)?;
    Ok((s.mean_s_tau, s.mean_sigma_beta_mas, s.count))
}

/// Entry-window comparison of pulsar and Earth-range schedules.
///
/// Returns a dict per schedule with position sigmas [km] and Frobenius norms.
#[pyfunction]
#[pyo3(signature = (xi_deg = 0.0, pulsar_sigma_km = None, cpf_sigma_km = None))]
fn entry_compare(
    py: Python<'_>,
    xi_deg: f64,
    pulsar_sigma_km: Option<f64>,
    cpf_sigma_km: Option<f64>,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let approach = HyperbolicApproach::default();
    let i0 = entry::apriori_entry_info(&entry::default_apriori(), &entry::window_stm(&approach).map_err(to_py)?)
        .map_err(to_py)?;
    let mut psr = EntrySchedule::pulsar_default();
    if let Some(s) = pulsar_sigma_km {
        psr = psr.with_sigma(s);
    }
    let mut cpf = EntrySchedule::cpf_default(xi_deg);
    if let Some(s) = cpf_sigma_km {
        cpf = cpf.with_sigma(s);
    }
    let out = pyo3::types::PyDict::new(py);
    for (name, sched) in [("pulsar", psr), ("cpf", cpf)] {
        let im = entry::entry_information(&sched, &approach).map_err(to_py)?;
        let r = entry::entry_covariance(&i0, &im).map_err(to_py)?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("sigma_xx", r.sigma_xx)?;
        d.set_item("sigma_yy", r.sigma_yy)?;
        d.set_item("apriori_frobenius", r.apriori_frobenius)?;
        d.set_item("measurement_frobenius", r.measurement_frobenius)?;
        out.set_item(name, d)?;
    }
    Ok(out.unbind())
}

#[pymodule]
fn navdop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrbit>()?;
    m.add_class::<PyScene>()?;
    m.add_class::<PyInfo>()?;
    m.add_class::<PyDilution>()?;
    m.add_function(wrap_pyfunction!(optical_info, m)?)?;
    m.add_function(wrap_pyfunction!(pulsar_info, m)?)?;
    m.add_function(wrap_pyfunction!(range_info, m)?)?;
    m.add_function(wrap_pyfunction!(range_info_jet, m)?)?;
    m.add_function(wrap_pyfunction!(pulsar_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(range_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(pulsar_selection_stats, m)?)?;
    m.add_function(wrap_pyfunction!(entry_compare, m)?)?;
    Ok(())
}
