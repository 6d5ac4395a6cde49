//! Scenario files: `key = value` lines grouped under `[section]` headers.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use navdop::catalog::{self, CameraSpec, PulsarEntry, PulsarSelection};
use navdop::entry::HyperbolicApproach;
use navdop::geometry::SceneConfig;
use navdop::units::{AU_KM, DEG};
use navdop::{OrbitConfig, StmMode};

use crate::error::{invalid, CliError};

const KEYS: &[&str] = &[
    "data_type",
    "preset",
    "days",
    "stm",
    "orbit.a",
    "orbit.n",
    "orbit.theta0",
    "orbit.period",
    "scene.asteroid_dist",
    "scene.sun_keepout_deg",
    "optical.alpha0",
    "optical.camera",
    "optical.sigma_asteroid_km",
    "optical.images_per_day",
    "pulsar.beta0",
    "pulsar.selection",
    "pulsar.area_cm2",
    "pulsar.consider",
    "pulsar.n_tau",
    "pulsar.closed_form",
    "range.xi0",
    "range.noise_factor",
    "range.jet",
    "entry.mu",
    "entry.radius_km",
    "entry.anomaly_deg",
    "entry.v_inf",
    "entry.xi_deg",
    "entry.pulsar_sigma_km",
    "entry.cpf_sigma_km",
    "sweep.var",
    "sweep.grid",
    "sweep.output",
];

/// Parsed but uninterpreted key/value pairs, remembering source lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawScenario {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawScenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = Self::default();
        let mut section = String::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Parse { line: line_no, reason: format!("unterminated section header '{line}'") })?;
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Parse { line: line_no, reason: format!("expected key = value, got '{line}'") })?;
            let k = k.trim().to_ascii_lowercase();
            let key = if section.is_empty() { k } else { format!("{section}.{k}") };
            raw.insert(&key, v.trim(), line_no)?;
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn insert(&mut self, key: &str, value: &str, line: usize) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::Parse { line, reason: format!("unknown key '{key}'") });
        }
        if value.is_empty() {
            return Err(CliError::Parse { line, reason: format!("empty value for '{key}'") });
        }
        self.entries.insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    /// Apply a `key=value` override; overrides win over file values.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Parse { line: 0, reason: format!("override '{assignment}' is not key=value") })?;
        self.insert(&k.trim().to_ascii_lowercase(), v.trim(), 0)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.remove(key);
    }

    fn num(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => parse_number(v)
                .map(Some)
                .ok_or_else(|| CliError::Parse { line: *line, reason: format!("'{key}' is not a number: '{v}'") }),
        }
    }

    fn flag(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(Some(true)),
                "false" | "no" | "off" | "0" => Ok(Some(false)),
                _ => Err(CliError::Parse { line: *line, reason: format!("'{key}' is not a boolean: '{v}'") }),
            },
        }
    }
}

/// Numbers may also be written as `pi`, `2pi`, `pi/2` or `<x>deg`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim().to_ascii_lowercase();
    if let Some(d) = s.strip_suffix("deg") {
        return d.trim().parse::<f64>().ok().map(|x| x * DEG);
    }
    if let Some((num, den)) = s.split_once('/') {
        return Some(parse_number(num)? / parse_number(den)?);
    }
    if let Some(k) = s.strip_suffix("pi") {
        let k = k.trim().trim_end_matches('*');
        let k = if k.is_empty() { 1.0 } else { k.parse::<f64>().ok()? };
        return Some(k * PI);
    }
    s.parse::<f64>().ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataType {
    Optical,
    Pulsar,
    Range,
    EntryCompare,
}

impl DataType {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "optical" => Ok(Self::Optical),
            "pulsar" => Ok(Self::Pulsar),
            "range" => Ok(Self::Range),
            "entry_compare" | "entry" => Ok(Self::EntryCompare),
            other => invalid(format!("unknown data_type '{other}'")),
        }
    }

    pub fn angle_var(self) -> &'static str {
        match self {
            Self::Optical => "alpha0",
            Self::Pulsar => "beta0",
            Self::Range | Self::EntryCompare => "xi0",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Optical => "optical",
            Self::Pulsar => "pulsar",
            Self::Range => "range",
            Self::EntryCompare => "entry_compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Mars,
    Neptune,
    Custom,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "mars" => Ok(Self::Mars),
            "neptune" => Ok(Self::Neptune),
            "custom" => Ok(Self::Custom),
            other => invalid(format!("unknown preset '{other}'")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mars => "mars",
            Self::Neptune => "neptune",
            Self::Custom => "custom",
        }
    }
}

/// Which information matrix a range spectrum is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeJet {
    Full,
    Order(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOutput {
    Dilution,
    Spectrum,
    StmError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalSettings {
    pub alpha0: f64,
    pub camera: CameraSpec,
    pub sigma_asteroid_km: f64,
    pub images_per_day: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulsarSettings {
    pub beta0: f64,
    pub selection: Vec<PulsarEntry>,
    pub selection_name: String,
    pub area_cm2: f64,
    pub consider: bool,
    pub n_tau: u32,
    pub closed_form: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSettings {
    pub xi0: f64,
    /// sigma(T) * sqrt(hours) [km sqrt(hr)].
    pub noise_factor: f64,
    pub jet: RangeJet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntrySettings {
    pub approach: HyperbolicApproach,
    pub xi_deg: f64,
    pub pulsar_sigma_km: Option<f64>,
    pub cpf_sigma_km: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub var: String,
    pub grid: Vec<f64>,
    pub output: SweepOutput,
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub data_type: DataType,
    pub preset: Preset,
    pub days: f64,
    pub mode: StmMode,
    pub orbit: OrbitConfig,
    pub scene: SceneConfig,
    pub optical: OpticalSettings,
    pub pulsar: PulsarSettings,
    pub range: RangeSettings,
    pub entry: EntrySettings,
    pub sweep: SweepSettings,
    /// Non-fatal notes raised during validation.
    pub warnings: Vec<String>,
}

pub struct Catalogs {
    pub pulsars: Vec<PulsarEntry>,
    pub cameras: Vec<CameraSpec>,
}

impl Catalogs {
    pub fn builtin() -> Self {
        Self { pulsars: catalog::builtin_pulsars(), cameras: catalog::builtin_cameras() }
    }

    /// Built-in tables, with the pulsar table replaced by `NAVDOP_CATALOG` when set.
    pub fn from_env() -> Result<Self, CliError> {
        let mut c = Self::builtin();
        if let Ok(path) = std::env::var("NAVDOP_CATALOG") {
            c.pulsars = catalog::load_pulsars(Path::new(&path))?;
        }
        Ok(c)
    }
}

/// Uniform grid over `[0, 2 pi)`.
pub fn default_angle_grid(count: usize) -> Vec<f64> {
    (0..count).map(|k| 2.0 * PI * k as f64 / count as f64).collect()
}

/// `start:stop:count` (inclusive ends) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Parse { line: 0, reason: format!("grid '{s}': {why}") };
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, n] => {
            let a = parse_number(a).ok_or_else(|| bad("bad start"))?;
            let b = parse_number(b).ok_or_else(|| bad("bad stop"))?;
            let n: usize = n.trim().parse().map_err(|_| bad("bad count"))?;
            match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            }
        }
        [list] => list
            .split(',')
            .map(|x| parse_number(x).ok_or_else(|| bad("bad list entry")))
            .collect::<Result<_, _>>()?,
        _ => return Err(bad("expected start:stop:count or a comma list")),
    };
    if grid.is_empty() {
        return invalid(format!("grid '{s}' is empty"));
    }
    Ok(grid)
}

fn parse_selection(s: &str) -> PulsarSelection {
    match s.to_ascii_lowercase().as_str() {
        "sextant" => PulsarSelection::Sextant,
        "best4" | "best-4" | "best_four" => PulsarSelection::BestFour,
        _ => PulsarSelection::Named(s.split(',').map(|x| x.trim().to_string()).collect()),
    }
}

impl Scenario {
    pub fn from_raw(raw: &RawScenario, catalogs: &Catalogs) -> Result<Self, CliError> {
        let data_type = DataType::parse(raw.get("data_type").unwrap_or("optical"))?;
        let preset = Preset::parse(raw.get("preset").unwrap_or("mars"))?;
        let mut warnings = Vec::new();

        let (a, n, a_a, sigma_ast, range_factor) = match preset {
            Preset::Mars => (Some(1.5), Some(0.009), Some(2.7), 100.0, Some(0.0003)),
            Preset::Neptune => (Some(30.0), Some(2.0 * PI / 60182.0), Some(40.0), 0.00013 * AU_KM, Some(0.004)),
            Preset::Custom => (None, None, None, 100.0, None),
        };
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| CliError::Validation(format!("custom preset requires '{key}'")));
        let a = need(raw.num("orbit.a")?.or(a), "orbit.a")?;
        let n = need(raw.num("orbit.n")?.or(n), "orbit.n")?;
        let a_a = need(raw.num("scene.asteroid_dist")?.or(a_a), "scene.asteroid_dist")?;
        if preset != Preset::Custom {
            for key in ["orbit.a", "scene.asteroid_dist"] {
                if raw.get(key).is_some() {
                    warnings.push(format!("'{key}' overrides the {} preset", preset.name()));
                }
            }
        }
        if a_a < a {
            warnings.push(format!(
                "beacon belt radius {a_a} AU is inside the orbit radius {a} AU: optical geometry uses the lower closed-form branch"
            ));
        }

        let orbit = OrbitConfig::new(a, n)?
            .with_theta0(raw.num("orbit.theta0")?.unwrap_or(0.0))
            .with_t_scale(raw.num("orbit.period")?.unwrap_or(1.0))?;
        let days = raw.num("days")?.unwrap_or(1.0);
        if !(days > 0.0) {
            return invalid(format!("days must be positive, got {days}"));
        }
        let mode = match raw.get("stm").unwrap_or("exact").to_ascii_lowercase().as_str() {
            "exact" => StmMode::Exact,
            "jet" => StmMode::Jet,
            other => return invalid(format!("stm must be exact or jet, got '{other}'")),
        };

        let xi0 = raw.num("range.xi0")?.unwrap_or(0.0);
        let mut scene = SceneConfig::new(&orbit, xi0, a_a)?;
        if let Some(k) = raw.num("scene.sun_keepout_deg")? {
            if !(0.0..180.0).contains(&k) {
                return invalid("sun keep-out angle must lie in [0, 180) deg");
            }
            scene.sun_keepout = Some(k * DEG);
        }

        let camera_name = raw.get("optical.camera").unwrap_or("high-end");
        let camera = catalog::find_camera(&catalogs.cameras, camera_name)?.clone();
        let optical = OpticalSettings {
            alpha0: raw.num("optical.alpha0")?.unwrap_or(0.0),
            camera,
            sigma_asteroid_km: raw.num("optical.sigma_asteroid_km")?.unwrap_or(sigma_ast),
            images_per_day: raw.num("optical.images_per_day")?.unwrap_or(1440.0),
        };
        if !(optical.sigma_asteroid_km >= 0.0) || !(optical.images_per_day > 0.0) {
            return invalid("optical noise inputs must be non-negative and images_per_day positive");
        }

        let selection_name = raw.get("pulsar.selection").unwrap_or("sextant").to_string();
        let selection: Vec<PulsarEntry> =
            parse_selection(&selection_name).resolve(&catalogs.pulsars)?.into_iter().cloned().collect();
        if selection.is_empty() {
            return invalid(format!("pulsar selection '{selection_name}' is empty"));
        }
        let n_tau = match raw.num("pulsar.n_tau")? {
            Some(v) if v >= 1.0 && v.fract() == 0.0 => v as u32,
            Some(v) => return invalid(format!("pulsar.n_tau must be a positive integer, got {v}")),
            None => selection.len() as u32,
        };
        let pulsar = PulsarSettings {
            beta0: raw.num("pulsar.beta0")?.unwrap_or(0.0),
            selection,
            selection_name,
            area_cm2: raw.num("pulsar.area_cm2")?.unwrap_or(129.0),
            consider: raw.flag("pulsar.consider")?.unwrap_or(true),
            n_tau,
            closed_form: raw.flag("pulsar.closed_form")?.unwrap_or(true),
        };
        if !(pulsar.area_cm2 > 0.0) {
            return invalid("pulsar.area_cm2 must be positive");
        }

        let jet = match raw.get("range.jet").unwrap_or("full").to_ascii_lowercase().as_str() {
            "full" => RangeJet::Full,
            "2" => RangeJet::Order(2),
            "3" => RangeJet::Order(3),
            "4" => RangeJet::Order(4),
            other => return invalid(format!("range.jet must be full, 2, 3 or 4, got '{other}'")),
        };
        let range = RangeSettings {
            xi0,
            noise_factor: need(raw.num("range.noise_factor")?.or(range_factor), "range.noise_factor")?,
            jet,
        };
        if !(range.noise_factor > 0.0) {
            return invalid("range.noise_factor must be positive");
        }

        let d = HyperbolicApproach::default();
        let approach = HyperbolicApproach {
            mu: raw.num("entry.mu")?.unwrap_or(d.mu),
            entry_radius: raw.num("entry.radius_km")?.unwrap_or(d.entry_radius),
            entry_true_anomaly_deg: raw.num("entry.anomaly_deg")?.unwrap_or(d.entry_true_anomaly_deg),
            v_inf: raw.num("entry.v_inf")?.unwrap_or(d.v_inf),
        };
        approach.validate()?;
        let entry = EntrySettings {
            approach,
            xi_deg: raw.num("entry.xi_deg")?.unwrap_or(0.0),
            pulsar_sigma_km: raw.num("entry.pulsar_sigma_km")?,
            cpf_sigma_km: raw.num("entry.cpf_sigma_km")?.unwrap_or(5e-4),
        };

        let var = raw.get("sweep.var").unwrap_or(data_type.angle_var()).to_ascii_lowercase();
        let output = match raw.get("sweep.output").unwrap_or("dilution").to_ascii_lowercase().as_str() {
            "dilution" => SweepOutput::Dilution,
            "spectrum" => SweepOutput::Spectrum,
            "stm_error" => SweepOutput::StmError,
            other => return invalid(format!("sweep.output must be dilution, spectrum or stm_error, got '{other}'")),
        };
        let grid = match raw.get("sweep.grid") {
            Some(g) => parse_grid(g)?,
            None if var == "p" => vec![1.0, 2.0, 7.0, 14.0],
            None if var == "t" => (1..=14).map(f64::from).collect(),
            None => default_angle_grid(360),
        };
        let sweep = SweepSettings { var, grid, output };

        let s = Self { data_type, preset, days, mode, orbit, scene, optical, pulsar, range, entry, sweep, warnings };
        if data_type != DataType::EntryCompare || raw.get("sweep.var").is_some() {
            s.check_sweep()?;
        }
        Ok(s)
    }

    pub fn load(path: &Path, overrides: &[String], catalogs: &Catalogs) -> Result<Self, CliError> {
        let mut raw = RawScenario::load(path)?;
        for o in overrides {
            raw.set(o)?;
        }
        Self::from_raw(&raw, catalogs)
    }

    /// Check that the sweep variable fits the data type.
    pub fn check_sweep(&self) -> Result<(), CliError> {
        let var = self.sweep.var.as_str();
        let ok = match var {
            "p" => self.data_type != DataType::EntryCompare,
            "t" => true,
            _ => var == self.data_type.angle_var() && self.data_type != DataType::EntryCompare,
        };
        if !ok {
            return invalid(format!("sweep variable '{var}' does not apply to data_type {}", self.data_type.name()));
        }
        if self.sweep.grid.iter().any(|x| !x.is_finite()) {
            return invalid("sweep grid values must be finite");
        }
        if var == "p" && self.sweep.grid.iter().any(|&p| !(p > 0.0)) {
            return invalid("p grid values must be positive");
        }
        if self.sweep.output == SweepOutput::StmError && var != "t" {
            return invalid("stm_error output requires sweep.var = t");
        }
        if var == "t" && self.sweep.output != SweepOutput::StmError {
            return invalid("sweep.var = t requires sweep.output = stm_error");
        }
        Ok(())
    }

    /// Initial angle of the active data type.
    pub fn angle(&self) -> f64 {
        match self.data_type {
            DataType::Optical => self.optical.alpha0,
            DataType::Pulsar => self.pulsar.beta0,
            DataType::Range | DataType::EntryCompare => self.range.xi0,
        }
    }
}
