//! Conversions between radians and the "units of π/2" used in reports.

use std::f64::consts::FRAC_PI_2;

pub fn to_half_pi(radians: f64) -> f64 {
    radians / FRAC_PI_2
}

pub fn from_half_pi(units: f64) -> f64 {
    units * FRAC_PI_2
}

/// Time in units of `π/(2g)`.
pub fn time_to_half_pi_over_g(t: f64, g: f64) -> f64 {
    t * g / FRAC_PI_2
}

pub fn time_from_half_pi_over_g(units: f64, g: f64) -> f64 {
    units * FRAC_PI_2 / g
}
