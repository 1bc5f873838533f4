//! Power-consumption models and energy efficiency.
//!
//! Energy efficiency is `B * R_sum / P_total` in bits per joule, with
//! `R_sum` the two users' summed spectral efficiency. The pinching relay
//! burns its radiated power through an amplifier of efficiency `nu`; the
//! RIS dissipates one phase-shifter budget per element and nothing else.

use thiserror::Error;

use crate::config::PowerModel;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EnergyError {
    #[error("amplifier efficiency out of (0,1], got {0}")]
    AmplifierEfficiency(f64),
    #[error("sum rate must be nonnegative and finite, got {0}")]
    InvalidSumRate(f64),
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("the surface needs at least one element")]
    EmptyArray,
}

/// Consumed-power decomposition and the resulting efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// RF power leaving antennas (users plus relay/surface path).
    pub radiated_w: f64,
    /// Amplifier dissipation beyond the radiated power.
    pub amplifier_overhead_w: f64,
    /// Static equipment and phase-shifter power.
    pub static_w: f64,
    /// `radiated + amplifier_overhead + static`.
    pub total_w: f64,
    /// `bandwidth * sum_rate / total`.
    pub ee_bits_per_joule: f64,
}

fn check_common(sum_rate_se: f64, power: &PowerModel) -> Result<(), EnergyError> {
    if !sum_rate_se.is_finite() || sum_rate_se < 0.0 {
        return Err(EnergyError::InvalidSumRate(sum_rate_se));
    }
    if power.bandwidth_hz <= 0.0 || power.bandwidth_hz.is_nan() {
        return Err(EnergyError::NonPositiveBandwidth(power.bandwidth_hz));
    }
    Ok(())
}

/// Energy efficiency of the four-slot pinching relay.
///
/// Total consumption `P/nu + P_RE + sum_k (P/2 + P_UE)`: the two users
/// each radiate `P/2`, the relay radiates `P` through its amplifier, and
/// the static terms add on top.
pub fn ee_pinching(sum_rate_se: f64, power: &PowerModel) -> Result<EnergyBreakdown, EnergyError> {
    check_common(sum_rate_se, power)?;
    let nu = power.amplifier_efficiency;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(EnergyError::AmplifierEfficiency(nu));
    }
    let p = power.per_user_power_w;
    let radiated = 2.0 * p; // users P/2 each + relay P
    let amplifier_overhead = p / nu - p;
    let static_w = power.relay_static_w + 2.0 * power.ue_static_w;
    let total = radiated + amplifier_overhead + static_w;
    Ok(EnergyBreakdown {
        radiated_w: radiated,
        amplifier_overhead_w: amplifier_overhead,
        static_w,
        total_w: total,
        ee_bits_per_joule: power.bandwidth_hz * sum_rate_se / total,
    })
}

/// Energy efficiency of the RIS-assisted exchange.
///
/// Total consumption `M * P_ph-sh + sum_k (P + P_UE)`: each user radiates
/// its full budget in its slot and the surface holds `M` phase shifters.
pub fn ee_ris(
    sum_rate_se: f64,
    power: &PowerModel,
    num_elements: usize,
) -> Result<EnergyBreakdown, EnergyError> {
    check_common(sum_rate_se, power)?;
    if num_elements == 0 {
        return Err(EnergyError::EmptyArray);
    }
    let radiated = 2.0 * power.per_user_power_w;
    let static_w = num_elements as f64 * power.phase_shifter_w + 2.0 * power.ue_static_w;
    let total = radiated + static_w;
    Ok(EnergyBreakdown {
        radiated_w: radiated,
        amplifier_overhead_w: 0.0,
        static_w,
        total_w: total,
        ee_bits_per_joule: power.bandwidth_hz * sum_rate_se / total,
    })
}
