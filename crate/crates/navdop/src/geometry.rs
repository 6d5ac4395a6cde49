//! Planar heliocentric geometry: Earth, tracking stations, beacons and pass timelines.

use nalgebra::Vector2;
use std::f64::consts::PI;

use crate::error::{domain, NavError, Result};
use crate::kinematics::OrbitConfig;
use crate::units::{km_to_au, wrap_pi, EARTH_MEAN_MOTION, EARTH_ORBIT_AU, EARTH_RADIUS_KM, EARTH_ROTATION};

pub type Vec2 = Vector2<f64>;

/// Earth, station and beacon-belt configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    /// Earth orbit radius [AU].
    pub a_earth: f64,
    /// Earth mean motion [rad/day].
    pub n_earth: f64,
    /// Initial Earth angle [rad].
    pub xi0: f64,
    /// Earth radius [AU].
    pub r_earth: f64,
    /// Earth rotation rate [rad/day].
    pub omega_earth: f64,
    /// Initial station angles [rad].
    pub station_phases: Vec<f64>,
    /// Mean beacon (asteroid) orbit radius [AU].
    pub asteroid_mean_dist: f64,
    /// Optional Sun keep-out half-angle [rad]; off by default.
    pub sun_keepout: Option<f64>,
}

impl SceneConfig {
    /// Default Earth model with stations phased for the given spacecraft orbit.
    pub fn new(orbit: &OrbitConfig, xi0: f64, asteroid_mean_dist: f64) -> Result<Self> {
        let mut scene = Self {
            a_earth: EARTH_ORBIT_AU,
            n_earth: EARTH_MEAN_MOTION,
            xi0,
            r_earth: km_to_au(EARTH_RADIUS_KM),
            omega_earth: EARTH_ROTATION,
            station_phases: Vec::new(),
            asteroid_mean_dist,
            sun_keepout: None,
        };
        scene.rephase_stations(orbit.a)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn mars() -> Self {
        Self::new(&OrbitConfig::mars(), 0.0, 2.7).expect("mars preset is valid")
    }

    pub fn neptune() -> Self {
        Self::new(&OrbitConfig::neptune(), 0.0, 40.0).expect("neptune preset is valid")
    }

    /// Recompute the two station phases from the rise condition at `xi0`.
    pub fn rephase_stations(&mut self, a: f64) -> Result<()> {
        let phi0 = station_rise_phase(self, a, self.xi0)?;
        self.station_phases = vec![phi0.rem_euclid(2.0 * PI), (phi0 - PI).rem_euclid(2.0 * PI)];
        Ok(())
    }

    pub fn with_xi0(&self, a: f64, xi0: f64) -> Result<Self> {
        let mut s = self.clone();
        s.xi0 = xi0;
        s.rephase_stations(a)?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_earth > 0.0) || !(self.a_earth > self.r_earth) {
            return domain("require a_earth > r_earth > 0");
        }
        if !(self.n_earth >= 0.0) || !(self.omega_earth > 0.0) {
            return domain("Earth rates must be positive");
        }
        if !(self.asteroid_mean_dist > 0.0) {
            return domain("asteroid mean distance must be positive");
        }
        if self.station_phases.iter().any(|p| !(0.0..2.0 * PI).contains(p)) {
            return domain("station phases must lie in [0, 2pi)");
        }
        Ok(())
    }
}

/// Camera boresight direction from spacecraft to beacon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingAngle {
    pub gamma: f64,
    /// Spacecraft to beacon distance [AU].
    pub distance: f64,
}

impl PointingAngle {
    pub fn unit(&self) -> Vec2 {
        Vec2::new(self.gamma.cos(), self.gamma.sin())
    }
}

pub fn earth_angle(scene: &SceneConfig, t: f64) -> f64 {
    scene.n_earth * t + scene.xi0
}

pub fn earth_position(scene: &SceneConfig, t: f64) -> Vec2 {
    let xi = earth_angle(scene, t);
    scene.a_earth * Vec2::new(xi.cos(), xi.sin())
}

/// Angle of station `i` about the Earth center at time `t`.
pub fn station_angle(scene: &SceneConfig, i: usize, t: f64) -> Result<f64> {
    let phi0 = scene
        .station_phases
        .get(i)
        .ok_or_else(|| NavError::Domain(format!("station index {i} out of range ({} stations)", scene.station_phases.len())))?;
    Ok(scene.omega_earth * t + phi0)
}

pub fn station_position(scene: &SceneConfig, i: usize, t: f64) -> Result<Vec2> {
    let phi = station_angle(scene, i, t)?;
    Ok(earth_position(scene, t) + scene.r_earth * Vec2::new(phi.cos(), phi.sin()))
}

/// Beacon on a circular orbit of radius `a_a` at angle `alpha`.
pub fn asteroid_position(a_a: f64, alpha: f64) -> Vec2 {
    a_a * Vec2::new(alpha.cos(), alpha.sin())
}

pub fn pointing_angle(spacecraft_r: &Vec2, asteroid_r: &Vec2) -> Result<PointingAngle> {
    let d = asteroid_r - spacecraft_r;
    let distance = d.norm();
    if !(distance > 0.0) {
        return Err(NavError::Degenerate("spacecraft and beacon coincide".into()));
    }
    Ok(PointingAngle { gamma: d.y.atan2(d.x), distance })
}

pub fn slant_range(spacecraft_r: &Vec2, station_r: &Vec2) -> f64 {
    (spacecraft_r - station_r).norm()
}

/// Station angle at which the spacecraft rises for station 0.
///
/// The second station is phased at `phi - pi`.
pub fn station_rise_phase(scene: &SceneConfig, a: f64, xi0: f64) -> Result<f64> {
    let ae = scene.a_earth;
    let d = (ae * ae + a * a - 2.0 * ae * a * xi0.cos()).max(0.0).sqrt();
    if !(d > 0.0) {
        return Err(NavError::Degenerate("spacecraft at Earth center".into()));
    }
    let s = -(a - ae * xi0.cos()) / d;
    let c = -ae * xi0.sin() / d;
    Ok(wrap_pi(s.atan2(c)))
}

/// Rise angle of the Earth limb seen from a station, to first order in R_E.
///
/// Pass boundaries use the zeroth-order value pi/2.
pub fn rise_angle(scene: &SceneConfig, a: f64, xi: f64) -> f64 {
    let ae = scene.a_earth;
    let d = (ae * ae + a * a - 2.0 * ae * a * xi.cos()).sqrt();
    PI / 2.0 - scene.r_earth / d
}

/// Active half-day ranging intervals for each of the two stations.
///
/// Station 0 tracks the first half of each day and station 1 the second; a
/// trailing partial day is truncated at `p * t_scale`.
pub fn range_timeline(p: f64, t_scale: f64) -> Result<[Vec<(f64, f64)>; 2]> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("tracking span must be at least one period, got {p}"));
    }
    if !(t_scale > 0.0) {
        return domain("period T must be positive");
    }
    let end = p * t_scale;
    let mut out: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    let mut j = 0usize;
    loop {
        let day0 = j as f64 * t_scale;
        if day0 >= end {
            break;
        }
        let mid = (day0 + 0.5 * t_scale).min(end);
        out[0].push((day0, mid));
        let stop = (day0 + t_scale).min(end);
        if stop > mid {
            out[1].push((mid, stop));
        }
        j += 1;
    }
    Ok(out)
}

/// Index of the station tracking at time `t`; boundaries go to the later station.
pub fn active_station(t: f64, t_scale: f64) -> usize {
    let frac = (t / t_scale).rem_euclid(1.0);
    if frac < 0.5 {
        0
    } else {
        1
    }
}
