//! Pinching-antenna relaying.
//!
//! The active scheme runs over four time slots: each user exchanges data
//! with a single-RF-chain relay through the pinching antenna activated at
//! the point of the waveguide closest to it, `(x_user, 0, h)`. Both the
//! user and the relay transmit with half the per-user power budget, and
//! the delivered rate of each stream is limited by the weaker of its two
//! hops. The passive variant couples the two pinching antennas directly
//! through the waveguide in two slots, which squares the free-space
//! attenuation.
//!
//! Hardware impairments: a lossy antenna emits only a fraction `beta` of
//! the transmit power, and a lossy waveguide attenuates by a fixed dB/m
//! rate over the feeder-to-antenna run (single end feeder, or two
//! co-located mid feeders serving each side).

use thiserror::Error;

use crate::channel::{free_space_gain, ChannelError};
use crate::config::{
    FeederMode, PinchingConfig, PositionDraw, PositionModel, ScenarioGeometry, SimConfig,
    UserPositions, ValidationErrors,
};
use crate::mc::{self, McError, McEstimate};

#[derive(Debug, Clone, Error)]
pub enum PinchingError {
    #[error(transparent)]
    Config(#[from] ValidationErrors),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
    #[error("pinching antenna at x = {0} m lies outside the waveguide extent ±{1} m")]
    OutsideWaveguide(f64, f64),
    #[error("the closed form models ideal hardware; clear the impairments first")]
    ImpairedClosedForm,
}

/// Power accounting for one hop of the active scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchingLinkBudget {
    /// Lateral offset of the served user from the waveguide axis.
    pub user_y_m: f64,
    /// Power fed into this hop (`P/2`: half the per-user budget).
    pub transmit_power_w: f64,
    /// Power actually radiated after the emission fraction and the
    /// waveguide run; never exceeds `transmit_power_w`.
    pub effective_power_w: f64,
    /// Received SNR `effective * eta / (noise * (h^2 + y^2))`.
    pub snr: f64,
}

/// Linear waveguide attenuation in `(0, 1]` from the feed point to a
/// pinching antenna at `pin_x_m`.
///
/// The waveguide spans `[-(d+L), +(d+L)]`. An end feeder sits at
/// `-(d+L)`; mid feeders measure from the origin. `Ideal` ignores the
/// loss rate entirely.
pub fn waveguide_attenuation_linear(
    pinching: &PinchingConfig,
    geometry: &ScenarioGeometry,
    pin_x_m: f64,
) -> Result<f64, PinchingError> {
    let extent = geometry.waveguide_half_extent_m();
    if pin_x_m < -extent || pin_x_m > extent || !pin_x_m.is_finite() {
        return Err(PinchingError::OutsideWaveguide(pin_x_m, extent));
    }
    let run_m = match pinching.feeder {
        FeederMode::Ideal => return Ok(1.0),
        FeederMode::EndFeeder => pin_x_m + extent,
        FeederMode::MidFeeder => pin_x_m.abs(),
    };
    Ok(10f64.powf(-pinching.waveguide_loss_db_per_m * run_m / 10.0))
}

/// Full link budget for one hop of the active scheme; `power_w` is the
/// per-user budget `P`, of which half drives each hop.
pub fn link_budget(
    power_w: f64,
    noise_w: f64,
    eta: f64,
    geometry: &ScenarioGeometry,
    pinching: &PinchingConfig,
    pin_x_m: f64,
    user_y_m: f64,
) -> Result<PinchingLinkBudget, PinchingError> {
    if power_w <= 0.0 || power_w.is_nan() {
        return Err(PinchingError::NonPositive("power_w", power_w));
    }
    if noise_w <= 0.0 || noise_w.is_nan() {
        return Err(PinchingError::NonPositive("noise_w", noise_w));
    }
    if geometry.height_m <= 0.0 || geometry.height_m.is_nan() {
        return Err(PinchingError::NonPositive("height_m", geometry.height_m));
    }
    let attenuation = waveguide_attenuation_linear(pinching, geometry, pin_x_m)?;
    let transmit = power_w / 2.0;
    let effective = pinching.emission_fraction * attenuation * transmit;
    let h = geometry.height_m;
    Ok(PinchingLinkBudget {
        user_y_m,
        transmit_power_w: transmit,
        effective_power_w: effective,
        snr: effective * eta / (noise_w * (h * h + user_y_m * user_y_m)),
    })
}

/// Received SNR of one hop (user-to-relay or relay-to-user).
pub fn pinching_snr(
    power_w: f64,
    noise_w: f64,
    eta: f64,
    geometry: &ScenarioGeometry,
    pinching: &PinchingConfig,
    pin_x_m: f64,
    user_y_m: f64,
) -> Result<f64, PinchingError> {
    Ok(link_budget(power_w, noise_w, eta, geometry, pinching, pin_x_m, user_y_m)?.snr)
}

/// Precomputed evaluator for per-trial rate samples.
#[derive(Debug, Clone)]
pub struct PinchingModel {
    h_sq: f64,
    extent: f64,
    feeder: FeederMode,
    loss_db_per_m: f64,
    /// `beta * eta * (P/2) / sigma^2`; hop SNR is this over
    /// `(h^2 + y^2)` times the waveguide attenuation.
    hop_scale: f64,
    /// `eta^2 * P / sigma^2` for the passive two-slot variant.
    passive_scale: f64,
}

impl PinchingModel {
    pub fn new(cfg: &SimConfig) -> Result<Self, PinchingError> {
        cfg.validate()?;
        let eta = free_space_gain(cfg.geometry.carrier_frequency_hz)?;
        let h = cfg.geometry.height_m;
        let p = cfg.power.per_user_power_w;
        let noise = cfg.power.noise_power_w;
        Ok(Self {
            h_sq: h * h,
            extent: cfg.geometry.waveguide_half_extent_m(),
            feeder: cfg.pinching.feeder,
            loss_db_per_m: cfg.pinching.waveguide_loss_db_per_m,
            hop_scale: cfg.pinching.emission_fraction * eta * (p / 2.0) / noise,
            passive_scale: eta * eta * p / noise,
        })
    }

    #[inline]
    fn attenuation(&self, pin_x: f64) -> f64 {
        let run = match self.feeder {
            FeederMode::Ideal => return 1.0,
            FeederMode::EndFeeder => pin_x + self.extent,
            FeederMode::MidFeeder => pin_x.abs(),
        };
        10f64.powf(-self.loss_db_per_m * run / 10.0)
    }

    /// SNR of the hop served by the pinching antenna at `pin_x`.
    #[inline]
    pub fn hop_snr(&self, pin_x: f64, user_y: f64) -> f64 {
        self.hop_scale * self.attenuation(pin_x) / (self.h_sq + user_y * user_y)
    }

    /// Per-user spectral efficiency of the four-slot relayed exchange.
    ///
    /// Both directions traverse the same two hops, so the two users see
    /// the identical min-SNR and rate.
    #[inline]
    pub fn per_user_rate(&self, pos: &UserPositions) -> f64 {
        let snr_1 = self.hop_snr(pos.x1, pos.y1);
        let snr_2 = self.hop_snr(pos.x2, pos.y2);
        0.25 * (1.0 + snr_1.min(snr_2)).log2()
    }

    /// Per-user spectral efficiency of the passive two-slot variant,
    /// where the waveguide couples the two pinching antennas directly
    /// and the SNR carries the product of both free-space losses (plus
    /// the inter-antenna waveguide run when lossy).
    #[inline]
    pub fn passive_rate(&self, pos: &UserPositions) -> f64 {
        let attenuation = match self.feeder {
            FeederMode::Ideal => 1.0,
            _ => 10f64.powf(-self.loss_db_per_m * (pos.x1 - pos.x2).abs() / 10.0),
        };
        let d1_sq = self.h_sq + pos.y1 * pos.y1;
        let d2_sq = self.h_sq + pos.y2 * pos.y2;
        let snr = self.passive_scale * attenuation / (d1_sq * d2_sq);
        0.5 * (1.0 + snr).log2()
    }
}

/// Monte-Carlo average spectral efficiency per user of the active scheme.
pub fn pinching_rate_mc(
    cfg: &SimConfig,
    positions: PositionModel,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, PinchingError> {
    let model = PinchingModel::new(cfg)?;
    let geometry = cfg.geometry;
    Ok(mc::estimate(
        |streams| {
            let draw = PositionDraw::sample(positions, &mut streams.lane(0));
            model.per_user_rate(&geometry.place(&draw))
        },
        trials,
        seed,
    )?)
}

/// Monte-Carlo average spectral efficiency per user of the passive
/// two-slot variant.
pub fn passive_pinching_rate_mc(
    cfg: &SimConfig,
    positions: PositionModel,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, PinchingError> {
    let model = PinchingModel::new(cfg)?;
    let geometry = cfg.geometry;
    Ok(mc::estimate(
        |streams| {
            let draw = PositionDraw::sample(positions, &mut streams.lane(0));
            model.passive_rate(&geometry.place(&draw))
        },
        trials,
        seed,
    )?)
}

/// Closed-form per-user spectral efficiency under symmetric user
/// locations and ideal hardware:
///
/// ```text
/// R = 1/4 [ log2(L^2/4 + h^2 + g) - log2(L^2/4 + h^2)
///         + (4/L) log2(e) ( sqrt(h^2+g) atan(L / (2 sqrt(h^2+g)))
///                            - h atan(L / (2h)) ) ]
/// ```
///
/// with `g = eta P / (2 sigma^2)`. Impaired hardware has no closed form
/// and is rejected.
pub fn pinching_rate_closed_form(cfg: &SimConfig) -> Result<f64, PinchingError> {
    cfg.validate()?;
    if !cfg.pinching.is_ideal() {
        return Err(PinchingError::ImpairedClosedForm);
    }
    let eta = free_space_gain(cfg.geometry.carrier_frequency_hz)?;
    let g = eta * cfg.power.per_user_power_w / (2.0 * cfg.power.noise_power_w);
    let h = cfg.geometry.height_m;
    let l = cfg.geometry.region_side_m;
    let quarter_l_sq = l * l / 4.0;
    let s = (h * h + g).sqrt();
    let arc_scale = (4.0 / l) * std::f64::consts::LOG2_E;
    Ok(0.25
        * ((quarter_l_sq + h * h + g).log2() - (quarter_l_sq + h * h).log2()
            + arc_scale * (s * (l / (2.0 * s)).atan() - h * (l / (2.0 * h)).atan())))
}
