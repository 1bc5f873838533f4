//! Channel primitives shared by both schemes: free-space gain, the
//! offset/exponent path-loss model, unit-power Rician amplitude sampling,
//! and the order-½ Laguerre function that appears in the Rician mean.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ChannelError {
    #[error("carrier frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("Rician factor must be nonnegative, got {0}")]
    NegativeRicianFactor(f64),
    #[error("Laguerre-1/2 argument must be <= 0, got {0}")]
    LaguerreDomain(f64),
}

/// Free-space channel gain constant `eta = c^2 / (16 pi^2 f_c^2)`.
///
/// The received power over a line-of-sight distance `r` is
/// `P * eta / r^2`.
pub fn free_space_gain(carrier_frequency_hz: f64) -> Result<f64, ChannelError> {
    if carrier_frequency_hz <= 0.0 || carrier_frequency_hz.is_nan() {
        return Err(ChannelError::NonPositiveFrequency(carrier_frequency_hz));
    }
    let c_over_f = SPEED_OF_LIGHT_M_S / carrier_frequency_hz;
    Ok(c_over_f * c_over_f / (16.0 * std::f64::consts::PI * std::f64::consts::PI))
}

/// Path loss in dB at `distance_m`: `a + 10 b log10(distance) + xi`.
pub fn sv_path_loss_db(
    distance_m: f64,
    a_db: f64,
    b: f64,
    shadow_db: f64,
) -> Result<f64, ChannelError> {
    if distance_m <= 0.0 || distance_m.is_nan() {
        return Err(ChannelError::NonPositiveDistance(distance_m));
    }
    Ok(a_db + 10.0 * b * distance_m.log10() + shadow_db)
}

/// Path loss as a linear power ratio (`>= 1` for typical parameters).
pub fn sv_path_loss_linear(
    distance_m: f64,
    a_db: f64,
    b: f64,
    shadow_db: f64,
) -> Result<f64, ChannelError> {
    Ok(10f64.powf(sv_path_loss_db(distance_m, a_db, b, shadow_db)? / 10.0))
}

/// Sampler for the amplitude of a unit-mean-square-power Rician channel.
///
/// Draws `|x|` with `x = sqrt(K/(K+1)) + CN(0, 1/(K+1))`, so that
/// `E[|x|^2] = 1` and `E[|x|] = sqrt(pi/(4(K+1))) * L_1/2(-K)`.
#[derive(Debug, Clone, Copy)]
pub struct RicianAmplitude {
    rician_factor: f64,
    los_amplitude: f64,
    component_sd: f64,
}

impl RicianAmplitude {
    pub fn new(rician_factor: f64) -> Result<Self, ChannelError> {
        if !rician_factor.is_finite() || rician_factor < 0.0 {
            return Err(ChannelError::NegativeRicianFactor(rician_factor));
        }
        Ok(Self {
            rician_factor,
            los_amplitude: (rician_factor / (rician_factor + 1.0)).sqrt(),
            component_sd: (0.5 / (rician_factor + 1.0)).sqrt(),
        })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let re: f64 = self.los_amplitude + self.component_sd * rng.sample::<f64, _>(StandardNormal);
        let im: f64 = self.component_sd * rng.sample::<f64, _>(StandardNormal);
        (re * re + im * im).sqrt()
    }

    /// Exact mean amplitude `sqrt(pi/(4(K+1))) * L_1/2(-K)`.
    pub fn mean(&self) -> f64 {
        let k = self.rician_factor;
        (std::f64::consts::PI / (4.0 * (k + 1.0))).sqrt()
            * laguerre_half(-k).expect("-K <= 0 by construction")
    }

    /// Mean-square amplitude; unity by normalization.
    pub fn mean_square(&self) -> f64 {
        1.0
    }
}

/// One draw of a Rician amplitude. See [`RicianAmplitude`] for reuse
/// across many draws.
pub fn sample_rician_amplitude<R: Rng + ?Sized>(
    rician_factor: f64,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    Ok(RicianAmplitude::new(rician_factor)?.sample(rng))
}

/// Incident/reflected amplitude pair for one RIS element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianAmplitudePair {
    pub incident: f64,
    pub reflected: f64,
}

impl RicianAmplitudePair {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(sampler: &RicianAmplitude, rng: &mut R) -> Self {
        Self {
            incident: sampler.sample(rng),
            reflected: sampler.sample(rng),
        }
    }
}

/// Laguerre function of order ½ for nonpositive arguments, via the
/// modified-Bessel closed form
/// `L_1/2(x) = e^{x/2} [(1-x) I0(-x/2) - x I1(-x/2)]`.
///
/// Strictly increasing in `-x`; `L_1/2(0) = 1`.
pub fn laguerre_half(x: f64) -> Result<f64, ChannelError> {
    if x > 0.0 || x.is_nan() {
        return Err(ChannelError::LaguerreDomain(x));
    }
    let z = -x / 2.0;
    // e^{x/2} = e^{-z} folds into the scaled Bessel functions.
    Ok((1.0 - x) * bessel_i0_scaled(z) - x * bessel_i1_scaled(z))
}

// Power series below the switch point, asymptotic expansion above. The
// smallest asymptotic term at z = 18 is ~e^{-36}, so both branches hold
// near machine precision.
const BESSEL_SERIES_MAX_Z: f64 = 18.0;

/// `e^{-z} I0(z)` for `z >= 0`.
fn bessel_i0_scaled(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < BESSEL_SERIES_MAX_Z {
        let q = z * z / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum * (-z).exp()
    } else {
        bessel_asymptotic_scaled(z, 0.0)
    }
}

/// `e^{-z} I1(z)` for `z >= 0`.
fn bessel_i1_scaled(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < BESSEL_SERIES_MAX_Z {
        let q = z * z / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / ((k * (k + 1)) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum * (z / 2.0) * (-z).exp()
    } else {
        bessel_asymptotic_scaled(z, 4.0)
    }
}

/// Large-argument expansion of `e^{-z} I_nu(z)` with `mu = 4 nu^2`,
/// truncated at the smallest term.
fn bessel_asymptotic_scaled(z: f64, mu: f64) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..40u32 {
        let j = (2 * k + 1) as f64;
        let next = term * (j * j - mu) / (8.0 * (k as f64 + 1.0) * z);
        if next.abs() >= term.abs() || next.abs() < sum.abs() * 1e-17 {
            sum += next;
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}
