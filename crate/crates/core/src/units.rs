//! Unit helpers. Internally everything is SI: angular frequencies in rad/s,
//! times in seconds. Configuration files speak MHz (as f = omega/2pi) and
//! microseconds; these helpers do the conversions in one obvious place.

use std::f64::consts::TAU;

/// Cyclic frequency in MHz -> angular frequency in rad/s.
pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e6
}

/// Angular frequency in rad/s -> cyclic frequency in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

pub fn us(t: f64) -> f64 {
    t * 1e-6
}

pub fn to_us(t: f64) -> f64 {
    t * 1e6
}

pub fn ns(t: f64) -> f64 {
    t * 1e-9
}
