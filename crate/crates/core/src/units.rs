//! Unit conversions. Internal units: ns and rad/ns.

use std::f64::consts::PI;

/// f/2π in MHz to angular frequency in rad/ns.
pub fn mhz(f: f64) -> f64 {
    2.0 * PI * f * 1e-3
}

/// f/2π in kHz to angular frequency in rad/ns.
pub fn khz(f: f64) -> f64 {
    2.0 * PI * f * 1e-6
}

/// f/2π in GHz to angular frequency in rad/ns.
pub fn ghz(f: f64) -> f64 {
    2.0 * PI * f
}

/// Angular frequency in rad/ns back to f/2π in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI) * 1e3
}

/// Angular frequency in rad/ns back to f/2π in kHz.
pub fn to_khz(omega: f64) -> f64 {
    omega / (2.0 * PI) * 1e6
}

pub fn us(t: f64) -> f64 {
    t * 1e3
}

pub fn ms(t: f64) -> f64 {
    t * 1e6
}
