//! Unit conversions and physical constants shared across the crate.
//!
//! Powers are carried in linear milliwatts internally; dB conversions happen
//! only at module boundaries, because omnidirectional synthesis sums powers
//! in the linear domain.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Convert a power in dBm to linear milliwatts.
pub fn dbm_to_milliwatts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Convert a linear power in milliwatts to dBm.
///
/// Zero maps to negative infinity.
pub fn milliwatts_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Wavelength in metres for a carrier frequency in Hz.
pub fn wavelength_m(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT_M_S / frequency_hz
}
