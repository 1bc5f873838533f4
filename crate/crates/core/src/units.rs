//! Power and gain unit conversions.
//!
//! Powers are stored in watts everywhere inside the library; dBm and dB
//! appear only at file/CLI boundaries.

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Converts a gain/loss in dB to a linear factor.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear factor to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
