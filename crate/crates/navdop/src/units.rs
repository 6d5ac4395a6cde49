//! Unit constants. Lengths are AU and times are days internally.

use std::f64::consts::PI;

pub const AU_KM: f64 = 149_597_870.7;
pub const DAY_S: f64 = 86_400.0;
pub const DAY_HR: f64 = 24.0;
pub const MAS_RAD: f64 = PI / (180.0 * 3600.0 * 1000.0);
pub const URAD: f64 = 1e-6;
pub const DEG: f64 = PI / 180.0;

pub const EARTH_RADIUS_KM: f64 = 6378.0;
pub const EARTH_ORBIT_AU: f64 = 1.0;
pub const EARTH_MEAN_MOTION: f64 = 2.0 * PI / 365.0;
pub const EARTH_ROTATION: f64 = 2.0 * PI;

pub fn au_to_km(x: f64) -> f64 {
    x * AU_KM
}

pub fn km_to_au(x: f64) -> f64 {
    x / AU_KM
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Wrap an angle into [0, 2pi).
pub fn wrap_2pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y >= 2.0 * PI {
        0.0
    } else {
        y
    }
}
