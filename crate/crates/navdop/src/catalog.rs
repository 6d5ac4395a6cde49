//! Pulsar and camera catalogs, selection statistics and beacon brightness screening.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{domain, NavError, Result};
use crate::units::MAS_RAD;

#[derive(Debug, Clone, PartialEq)]
pub struct PulsarEntry {
    pub name: String,
    /// Right ascension [deg, ecliptic J2000].
    pub ra_deg: f64,
    /// Declination [deg, ecliptic J2000].
    pub dec_deg: f64,
    /// Timing stability figure [km (cm sqrt(hr))].
    pub s_tau: Option<f64>,
    /// Sky position uncertainty [mas].
    pub sigma_beta_mas: Option<f64>,
    /// Used in the SEXTANT flight experiment.
    pub sextant: bool,
}

impl PulsarEntry {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..360.0).contains(&self.ra_deg) {
            return domain(format!("{}: RA {} outside [0, 360)", self.name, self.ra_deg));
        }
        if !(-90.0..=90.0).contains(&self.dec_deg) {
            return domain(format!("{}: declination {} outside [-90, 90]", self.name, self.dec_deg));
        }
        if self.s_tau.is_some_and(|s| !(s > 0.0)) || self.sigma_beta_mas.is_some_and(|s| !(s > 0.0)) {
            return domain(format!("{}: stability and location figures must be positive", self.name));
        }
        Ok(())
    }

    pub fn require_s_tau(&self) -> Result<f64> {
        self.s_tau.ok_or_else(|| NavError::MissingField { name: self.name.clone(), field: "s_tau" })
    }

    pub fn require_sigma_beta_mas(&self) -> Result<f64> {
        self.sigma_beta_mas.ok_or_else(|| NavError::MissingField { name: self.name.clone(), field: "sigma_beta" })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraSpec {
    pub name: String,
    pub fov_deg: f64,
    /// Instantaneous field of view of one pixel [urad].
    pub theta_urad: f64,
    /// Limiting apparent magnitude.
    pub m_max: f64,
    /// Limiting magnitude with real-time image co-adding, where available.
    pub m_max_coadd: Option<f64>,
    /// Minimum Sun-spacecraft-beacon angle [deg].
    pub alpha_min_deg: f64,
    /// Centroid sample uncertainty [pixel].
    pub sigma_s: f64,
}

impl CameraSpec {
    pub fn validate(&self) -> Result<()> {
        let fov_urad = self.fov_deg.to_radians() * 1e6;
        if !(self.theta_urad > 0.0) || !(self.sigma_s > 0.0) || !(fov_urad > self.theta_urad) {
            return domain(format!("{}: require theta > 0, sigma_s > 0, fov > theta", self.name));
        }
        Ok(())
    }

    /// Brightest limit the camera can use, preferring co-adding.
    pub fn limiting_magnitude(&self) -> f64 {
        self.m_max_coadd.unwrap_or(self.m_max)
    }
}

fn psr(name: &str, ra: f64, dec: f64, s: Option<f64>, sb: Option<f64>, sextant: bool) -> PulsarEntry {
    PulsarEntry { name: name.into(), ra_deg: ra, dec_deg: dec, s_tau: s, sigma_beta_mas: sb, sextant }
}

/// The 15-pulsar navigation catalog, sorted on right ascension.
pub fn builtin_pulsars() -> Vec<PulsarEntry> {
    vec![
        psr("PSR J0030+0451", 8.91, 1.45, Some(431.2), Some(21.35), true),
        psr("PSR J0218+4232", 47.05, 27.01, Some(200.3), Some(31.12), true),
        psr("PSR J0437-4715", 50.47, -67.87, Some(697.1), Some(0.05), true),
        psr("PSR B0531+21 (M1 - Crab Pulsar)", 84.10, -1.29, Some(28.9), Some(3.43), true),
        psr("PSR J0751+1807", 116.33, -2.81, None, Some(7.23), false),
        psr("PSR J1012+5307", 133.36, 38.76, Some(1474.7), Some(0.48), true),
        psr("PSR B0833-45", 153.37, -60.36, Some(778.9), Some(0.37), false),
        psr("PSR J1024-0719", 160.73, -16.04, Some(2_791_358.2), Some(0.67), false),
        psr("PSR B1055-52", 195.77, -52.39, None, Some(209.51), false),
        psr("PSR B1509-58", 243.89, -39.40, Some(1672.3), Some(1216.4), true),
        psr("PSR B1821-24 (J1824-2452A)", 275.56, -1.55, Some(41.1), Some(6.01), true),
        psr("PSR B0540-69", 301.60, -86.66, Some(573.9), Some(69.07), false),
        psr("PSR B1937+21", 301.99, 42.33, Some(62.1), Some(0.04), true),
        psr("PSR J2124-3358", 312.74, -17.82, None, Some(0.79), false),
        psr("PSR J2214+3000", 348.81, 37.71, None, None, false),
    ]
}

pub const BEST_FOUR: [&str; 4] = ["J0437-4715", "B0833-45", "B1821-24", "B1937+21"];

/// Navigation camera tiers: low-end, mid-level and high-end.
pub fn builtin_cameras() -> Vec<CameraSpec> {
    let cam = |name: &str, fov, theta, m_max, coadd| CameraSpec {
        name: String::from(name),
        fov_deg: fov,
        theta_urad: theta,
        m_max,
        m_max_coadd: coadd,
        alpha_min_deg: 30.0,
        sigma_s: 0.25,
    };
    vec![
        cam("low-end", 26.9, 128.0, 9.5, None),
        cam("mid-level", 7.0, 60.0, 10.5, None),
        cam("high-end", 0.6, 10.0, 13.5, Some(25.0)),
    ]
}

pub fn find_camera<'a>(cameras: &'a [CameraSpec], name: &str) -> Result<&'a CameraSpec> {
    let key = name.trim().to_ascii_lowercase();
    cameras
        .iter()
        .find(|c| c.name.to_ascii_lowercase() == key || c.name.to_ascii_lowercase().starts_with(&key))
        .ok_or_else(|| NavError::NotFound(name.into()))
}

fn normalize_name(s: &str) -> String {
    s.replace('\u{2212}', "-").replace(' ', "").to_ascii_uppercase()
}

/// Look up a pulsar by designation, e.g. "B1937+21" or "PSR J0437-4715".
pub fn find_pulsar<'a>(catalog: &'a [PulsarEntry], designation: &str) -> Result<&'a PulsarEntry> {
    let key = normalize_name(designation);
    let key = key.strip_prefix("PSR").unwrap_or(&key).to_string();
    catalog
        .iter()
        .find(|p| normalize_name(&p.name).contains(&key))
        .ok_or_else(|| NavError::NotFound(designation.into()))
}

/// Named subsets of a catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PulsarSelection {
    Sextant,
    BestFour,
    Named(Vec<String>),
}

impl PulsarSelection {
    pub fn resolve<'a>(&self, catalog: &'a [PulsarEntry]) -> Result<Vec<&'a PulsarEntry>> {
        match self {
            PulsarSelection::Sextant => Ok(catalog.iter().filter(|p| p.sextant).collect()),
            PulsarSelection::BestFour => BEST_FOUR.iter().map(|n| find_pulsar(catalog, n)).collect(),
            PulsarSelection::Named(names) => names.iter().map(|n| find_pulsar(catalog, n)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionStats {
    pub mean_s_tau: f64,
    pub mean_sigma_beta_mas: f64,
    pub count: usize,
}

impl SelectionStats {
    pub fn mean_sigma_beta_rad(&self) -> f64 {
        self.mean_sigma_beta_mas * MAS_RAD
    }
}

pub fn selection_stats(selection: &[&PulsarEntry]) -> Result<SelectionStats> {
    if selection.is_empty() {
        return domain("pulsar selection is empty");
    }
    let mut s = 0.0;
    let mut b = 0.0;
    for p in selection {
        s += p.require_s_tau()?;
        b += p.require_sigma_beta_mas()?;
    }
    let n = selection.len() as f64;
    Ok(SelectionStats { mean_s_tau: s / n, mean_sigma_beta_mas: b / n, count: selection.len() })
}

fn opt_field(s: &str) -> std::result::Result<Option<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        Ok(None)
    } else {
        s.replace('_', "").parse::<f64>().map(Some).map_err(|e| format!("bad number '{s}': {e}"))
    }
}

fn num_field(s: &str) -> std::result::Result<f64, String> {
    opt_field(s)?.ok_or_else(|| "missing required number".to_string())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn csv_err(line: usize, e: csv::Error) -> NavError {
    NavError::CatalogParse { line, reason: e.to_string() }
}

/// Parse pulsar records: name, ra_deg, dec_deg, s_tau, sigma_beta_mas, sextant(0/1).
pub fn parse_pulsars<R: Read>(input: R) -> Result<Vec<PulsarEntry>> {
    let mut out = Vec::new();
    for (k, rec) in reader(input).records().enumerate() {
        let rec = rec.map_err(|e| csv_err(k + 1, e))?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        let bad = |reason: String| NavError::CatalogParse { line, reason };
        if rec.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", rec.len())));
        }
        let sextant = match rec[5].trim() {
            "1" => true,
            "0" | "" => false,
            other => return Err(bad(format!("sextant flag must be 0 or 1, got '{other}'"))),
        };
        let entry = PulsarEntry {
            name: rec[0].to_string(),
            ra_deg: num_field(&rec[1]).map_err(bad)?,
            dec_deg: num_field(&rec[2]).map_err(bad)?,
            s_tau: opt_field(&rec[3]).map_err(bad)?,
            sigma_beta_mas: opt_field(&rec[4]).map_err(bad)?,
            sextant,
        };
        entry.validate().map_err(|e| bad(e.to_string()))?;
        out.push(entry);
    }
    Ok(out)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_pulsars<W: Write>(catalog: &[PulsarEntry], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for p in catalog {
        w.write_record([
            p.name.clone(),
            p.ra_deg.to_string(),
            p.dec_deg.to_string(),
            fmt_opt(p.s_tau),
            fmt_opt(p.sigma_beta_mas),
            if p.sextant { "1" } else { "0" }.to_string(),
        ])
        .map_err(|e| csv_err(0, e))?;
    }
    w.flush()?;
    Ok(())
}

/// Parse camera records: name, fov_deg, theta_urad, m_max, alpha_min_deg, sigma_s[, m_max_coadd].
pub fn parse_cameras<R: Read>(input: R) -> Result<Vec<CameraSpec>> {
    let mut out = Vec::new();
    for (k, rec) in reader(input).records().enumerate() {
        let rec = rec.map_err(|e| csv_err(k + 1, e))?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        let bad = |reason: String| NavError::CatalogParse { line, reason };
        if rec.len() != 6 && rec.len() != 7 {
            return Err(bad(format!("expected 6 or 7 fields, found {}", rec.len())));
        }
        let cam = CameraSpec {
            name: rec[0].to_string(),
            fov_deg: num_field(&rec[1]).map_err(bad)?,
            theta_urad: num_field(&rec[2]).map_err(bad)?,
            m_max: num_field(&rec[3]).map_err(bad)?,
            alpha_min_deg: num_field(&rec[4]).map_err(bad)?,
            sigma_s: num_field(&rec[5]).map_err(bad)?,
            m_max_coadd: rec.get(6).map(opt_field).transpose().map_err(bad)?.flatten(),
        };
        cam.validate().map_err(|e| bad(e.to_string()))?;
        out.push(cam);
    }
    Ok(out)
}

pub fn write_cameras<W: Write>(cameras: &[CameraSpec], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).flexible(true).from_writer(out);
    for c in cameras {
        let mut row = vec![
            c.name.clone(),
            c.fov_deg.to_string(),
            c.theta_urad.to_string(),
            c.m_max.to_string(),
            c.alpha_min_deg.to_string(),
            c.sigma_s.to_string(),
        ];
        if let Some(m) = c.m_max_coadd {
            row.push(m.to_string());
        }
        w.write_record(&row).map_err(|e| csv_err(0, e))?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_pulsars(path: &Path) -> Result<Vec<PulsarEntry>> {
    parse_pulsars(std::fs::File::open(path)?)
}

pub fn load_cameras(path: &Path) -> Result<Vec<CameraSpec>> {
    parse_cameras(std::fs::File::open(path)?)
}

/// Apparent magnitude with no phase-angle correction.
pub fn apparent_magnitude(h: f64, r_helio: f64, delta_obs: f64) -> Result<f64> {
    if !(r_helio > 0.0) || !(delta_obs > 0.0) {
        return domain("distances must be positive");
    }
    Ok(h + 5.0 * (r_helio * delta_obs).log10())
}

/// Linear absolute-magnitude trend H(a_A) = intercept + slope * a_A for outer-belt beacons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeFit {
    pub intercept: f64,
    /// [mag/AU]
    pub slope: f64,
}

impl Default for MagnitudeFit {
    /// Calibrated so the dimmest object at 43 AU seen from 30 AU sits at magnitude 26.
    fn default() -> Self {
        Self::calibrated(-0.15, 30.0, 43.0, 26.0)
    }
}

impl MagnitudeFit {
    /// Fix the intercept so that `max_magnitude(a, a_a) == m`.
    pub fn calibrated(slope: f64, a: f64, a_a: f64, m: f64) -> Self {
        let geom = 5.0 * (a_a * (a + a_a)).log10();
        Self { intercept: m - geom - slope * a_a, slope }
    }

    pub fn absolute(&self, a_a: f64) -> f64 {
        self.intercept + self.slope * a_a
    }

    /// Dimmest apparent magnitude, at the far side of the object's orbit.
    pub fn max_magnitude(&self, a: f64, a_a: f64) -> Result<f64> {
        apparent_magnitude(self.absolute(a_a), a_a, a + a_a)
    }

    /// Brightest apparent magnitude, at closest approach.
    pub fn min_magnitude(&self, a: f64, a_a: f64) -> Result<f64> {
        apparent_magnitude(self.absolute(a_a), a_a, (a_a - a).abs())
    }

    pub fn visible(&self, a: f64, a_a: f64, camera_limit: f64) -> Result<bool> {
        Ok(self.max_magnitude(a, a_a)? < camera_limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let c = builtin_pulsars();
        assert_eq!(c.len(), 15);
        assert_eq!(c.iter().filter(|p| p.sextant).count(), 8);
        let b = find_pulsar(&c, "B1937+21").unwrap();
        assert_eq!((b.s_tau, b.sigma_beta_mas, b.sextant), (Some(62.1), Some(0.04), true));
        let j = find_pulsar(&c, "J0751+1807").unwrap();
        assert_eq!((j.s_tau, j.sigma_beta_mas), (None, Some(7.23)));
        assert!(find_pulsar(&c, "J9999+0000").is_err());
        assert!(c.iter().all(|p| p.validate().is_ok()));
    }

    #[test]
    fn sextant_and_best_four() {
        let c = builtin_pulsars();
        let s = selection_stats(&PulsarSelection::Sextant.resolve(&c).unwrap()).unwrap();
        assert!((s.mean_s_tau - 576.0).abs() < 1.0);
        assert!((s.mean_sigma_beta_mas - 160.0).abs() < 1.0);
        let b = selection_stats(&PulsarSelection::BestFour.resolve(&c).unwrap()).unwrap();
        assert_eq!(b.count, 4);
        assert!((b.mean_s_tau - (697.1 + 778.9 + 41.1 + 62.1) / 4.0).abs() < 1e-9);
        assert!((b.mean_sigma_beta_mas - 1.62).abs() < 0.02);
    }

    #[test]
    fn missing_fields_fail() {
        let c = builtin_pulsars();
        let sel = vec![find_pulsar(&c, "J2214+3000").unwrap()];
        assert!(matches!(selection_stats(&sel), Err(NavError::MissingField { .. })));
        assert!(selection_stats(&[]).is_err());
    }

    #[test]
    fn cameras() {
        let c = builtin_cameras();
        assert_eq!(c[2].theta_urad, 10.0);
        assert_eq!(c[0].theta_urad, 128.0);
        assert!(c.iter().all(|x| x.sigma_s == 0.25 && x.validate().is_ok()));
        assert_eq!(find_camera(&c, "high").unwrap().name, "high-end");
    }

    #[test]
    fn parse_errors_carry_line() {
        let text = "# comment\nPSR A,10,0,1,1,1\nPSR B,abc,0,,,0\n";
        match parse_pulsars(text.as_bytes()) {
            Err(NavError::CatalogParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_pulsars("PSR A,400,0,1,1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn magnitude_screening() {
        assert_eq!(apparent_magnitude(7.0, 1.0, 1.0).unwrap(), 7.0);
        let fit = MagnitudeFit::default();
        assert!((fit.max_magnitude(30.0, 43.0).unwrap() - 26.0).abs() < 1e-12);
        for a_a in [43.5, 45.0, 48.0, 50.0] {
            assert!(fit.visible(30.0, a_a, 26.0).unwrap());
        }
        assert!(!fit.visible(30.0, 40.0, 26.0).unwrap());
    }
}
