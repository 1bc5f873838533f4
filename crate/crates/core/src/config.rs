//! Scenario configuration: geometry, power model, scheme parameters.
//!
//! A validated [`SimConfig`] is immutable plain data and safe to share
//! across workers. Powers are kept in watts internally; the on-disk
//! format ([`FileConfig`]) uses the units of the reference parameter
//! table (GHz, dBm, mW) and converts at the boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{dbm_to_watts, watts_to_dbm};

/// Placement of user regions and the waveguide/RIS plane.
///
/// Each user `k` is served inside a square region of side `region_side_m`
/// (symbol `L`) with `x` spanning `[±region_offset_m, ±(region_offset_m +
/// region_side_m)]` (symbol `d`, sign per user) and `y` in `[-L/2, +L/2]`,
/// so the waveguide axis bisects each region. The waveguide and the RIS
/// sit at height `height_m` (symbol `h`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGeometry {
    /// Carrier frequency in Hz (symbol `f_c`).
    pub carrier_frequency_hz: f64,
    /// Waveguide/RIS height above the user plane in metres (symbol `h`).
    pub height_m: f64,
    /// Distance from the origin to the near edge of each region (symbol `d`).
    pub region_offset_m: f64,
    /// Side length of each square user region (symbol `L`).
    pub region_side_m: f64,
}

impl ScenarioGeometry {
    /// Half-extent of the waveguide along `x`; it spans both regions.
    pub fn waveguide_half_extent_m(&self) -> f64 {
        self.region_offset_m + self.region_side_m
    }

    /// Straight-line distance from a user at `(x, y, 0)` to the RIS at
    /// `(0, 0, h)`.
    pub fn distance_to_ris_m(&self, x: f64, y: f64) -> f64 {
        (x * x + y * y + self.height_m * self.height_m).sqrt()
    }

    /// Distance from the RIS to the centre of a user region.
    pub fn region_center_distance_m(&self) -> f64 {
        let xc = self.region_offset_m + self.region_side_m / 2.0;
        (xc * xc + self.height_m * self.height_m).sqrt()
    }
}

/// Transmit and consumption powers shared by both schemes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Total transmit power budget per user in watts (symbol `P_k`).
    pub per_user_power_w: f64,
    /// Noise power in watts (symbol `sigma^2`).
    pub noise_power_w: f64,
    /// Transmission bandwidth in Hz (symbol `B`).
    pub bandwidth_hz: f64,
    /// Relay power-amplifier efficiency in `(0, 1]` (symbol `nu`).
    pub amplifier_efficiency: f64,
    /// Static power of the relay equipment in watts (symbol `P_RE`).
    pub relay_static_w: f64,
    /// Static power of each user equipment in watts (symbol `P_UE,k`).
    pub ue_static_w: f64,
    /// Power drawn by one RIS phase shifter in watts (symbol `P_ph-sh`).
    pub phase_shifter_w: f64,
}

/// RIS array size, fading statistics, and path-loss parameterisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisConfig {
    /// Number of reflecting elements (symbol `M`).
    pub num_elements: usize,
    /// Rician factor of the incident/reflection channels (symbol `K`).
    pub rician_factor: f64,
    /// Phase-noise severity in `[0, 1]` (symbol `epsilon`); 0 is perfect
    /// phase adjustment, 1 the worst case.
    pub phase_noise_severity: f64,
    /// Path-loss offset in dB at 1 m (symbol `a`).
    pub pl_offset_db: f64,
    /// Path-loss exponent (symbol `b`).
    pub pl_exponent: f64,
    /// Shadow-fading term in dB (symbol `xi`); kept constant, 0 by default.
    pub shadow_db: f64,
}

/// Feed-point placement on the dielectric waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeederMode {
    /// Lossless waveguide; feed position irrelevant.
    Ideal,
    /// Single feed point at the `-x` end of the waveguide.
    EndFeeder,
    /// Two co-located feed points at the waveguide centre.
    MidFeeder,
}

/// Pinching-antenna hardware model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinchingConfig {
    /// Fraction of transmit power actually emitted by the pinching
    /// antenna, in `[0, 1]` (symbol `beta`); 1 is lossless.
    pub emission_fraction: f64,
    /// Waveguide propagation loss in dB per metre.
    pub waveguide_loss_db_per_m: f64,
    /// Feed-point placement; `Ideal` ignores the loss rate entirely.
    pub feeder: FeederMode,
}

impl PinchingConfig {
    /// Lossless hardware: full emission, lossless waveguide.
    pub fn ideal() -> Self {
        Self {
            emission_fraction: 1.0,
            waveguide_loss_db_per_m: WAVEGUIDE_LOSS_DB_PER_M,
            feeder: FeederMode::Ideal,
        }
    }

    /// True when no impairment is active.
    pub fn is_ideal(&self) -> bool {
        self.emission_fraction == 1.0 && self.feeder == FeederMode::Ideal
    }
}

/// Teflon dielectric waveguide propagation loss at 28 GHz, dB/m.
pub const WAVEGUIDE_LOSS_DB_PER_M: f64 = 0.08;

/// Full scenario configuration bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub geometry: ScenarioGeometry,
    pub power: PowerModel,
    pub ris: RisConfig,
    pub pinching: PinchingConfig,
}

/// Reference simulation parameters (the paper's Table 1 operating point).
///
/// The per-user transmit power defaults to 15 dBm, the value used by the
/// spectral-efficiency experiments; sweeps override it. The RIS size
/// defaults to `10^4` elements, the order of magnitude the reference
/// results revolve around.
pub fn default_table1() -> SimConfig {
    SimConfig {
        geometry: ScenarioGeometry {
            carrier_frequency_hz: 28e9,
            height_m: 3.0,
            region_offset_m: 25.0,
            region_side_m: 10.0,
        },
        power: PowerModel {
            per_user_power_w: dbm_to_watts(15.0),
            noise_power_w: dbm_to_watts(-80.0),
            bandwidth_hz: 1e9,
            amplifier_efficiency: 0.5,
            relay_static_w: dbm_to_watts(10.0),
            ue_static_w: dbm_to_watts(10.0),
            phase_shifter_w: 17.5e-3,
        },
        ris: RisConfig {
            num_elements: 10_000,
            rician_factor: 10.0,
            phase_noise_severity: 0.5,
            pl_offset_db: 61.4,
            pl_exponent: 2.0,
            shadow_db: 0.0,
        },
        pinching: PinchingConfig::ideal(),
    }
}

/// How user locations are drawn for a Monte-Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositionModel {
    /// Mirrored placements: `x_2 = -x_1`, `y_2 = y_1`, drawn uniformly in
    /// the `+x` region. Matches the symmetric-locations assumption of the
    /// pinching closed form.
    SymmetricMirrored,
    /// Both users drawn independently and uniformly in their regions.
    IndependentUniform,
    /// Both users pinned at their region centres (the RIS closed-form
    /// assumption).
    RegionCenters,
}

/// Raw uniform draws for one trial's user placement, kept in `[0, 1]^4`
/// so the same draw can be placed under different geometries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionDraw {
    ux1: f64,
    uy1: f64,
    ux2: f64,
    uy2: f64,
}

impl PositionDraw {
    pub fn sample<R: rand::Rng + ?Sized>(model: PositionModel, rng: &mut R) -> Self {
        match model {
            PositionModel::SymmetricMirrored => {
                let ux = rng.gen::<f64>();
                let uy = rng.gen::<f64>();
                Self { ux1: ux, uy1: uy, ux2: ux, uy2: uy }
            }
            PositionModel::IndependentUniform => Self {
                ux1: rng.gen::<f64>(),
                uy1: rng.gen::<f64>(),
                ux2: rng.gen::<f64>(),
                uy2: rng.gen::<f64>(),
            },
            PositionModel::RegionCenters => Self { ux1: 0.5, uy1: 0.5, ux2: 0.5, uy2: 0.5 },
        }
    }
}

/// Concrete user coordinates in the ground plane (`z = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPositions {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl ScenarioGeometry {
    /// Places a raw draw inside the two service regions: user 1 on the
    /// `-x` side, user 2 on the `+x` side.
    pub fn place(&self, draw: &PositionDraw) -> UserPositions {
        let d = self.region_offset_m;
        let l = self.region_side_m;
        UserPositions {
            x1: -(d + draw.ux1 * l),
            y1: (draw.uy1 - 0.5) * l,
            x2: d + draw.ux2 * l,
            y2: (draw.uy2 - 0.5) * l,
        }
    }
}

/// One or more violated invariants, each named individually.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid configuration: {}", .0.join("; "))]
pub struct ValidationErrors(pub Vec<String>);

fn check(violations: &mut Vec<String>, ok: bool, msg: &str) {
    if !ok {
        violations.push(msg.to_string());
    }
}

impl SimConfig {
    /// Checks every field invariant, returning the config untouched on
    /// success or the list of violated invariants otherwise.
    pub fn validate(&self) -> Result<&Self, ValidationErrors> {
        let mut v = Vec::new();
        let g = &self.geometry;
        check(&mut v, g.carrier_frequency_hz.is_finite() && g.carrier_frequency_hz > 0.0,
            "carrier_frequency_hz must be finite and positive");
        check(&mut v, g.height_m.is_finite() && g.height_m > 0.0,
            "height_m must be finite and positive");
        check(&mut v, g.region_offset_m.is_finite() && g.region_offset_m >= 0.0,
            "region_offset_m must be finite and nonnegative");
        check(&mut v, g.region_side_m.is_finite() && g.region_side_m > 0.0,
            "region_side_m must be finite and positive");

        let p = &self.power;
        check(&mut v, p.per_user_power_w.is_finite() && p.per_user_power_w > 0.0,
            "per_user_power_w must be finite and positive");
        check(&mut v, p.noise_power_w.is_finite() && p.noise_power_w > 0.0,
            "noise_power_w must be finite and positive");
        check(&mut v, p.bandwidth_hz.is_finite() && p.bandwidth_hz > 0.0,
            "bandwidth_hz must be finite and positive");
        check(&mut v, p.amplifier_efficiency.is_finite()
                && p.amplifier_efficiency > 0.0 && p.amplifier_efficiency <= 1.0,
            "amplifier_efficiency out of (0,1]");
        check(&mut v, p.relay_static_w.is_finite() && p.relay_static_w >= 0.0,
            "relay_static_w must be finite and nonnegative");
        check(&mut v, p.ue_static_w.is_finite() && p.ue_static_w >= 0.0,
            "ue_static_w must be finite and nonnegative");
        check(&mut v, p.phase_shifter_w.is_finite() && p.phase_shifter_w >= 0.0,
            "phase_shifter_w must be finite and nonnegative");

        let r = &self.ris;
        check(&mut v, r.num_elements >= 1, "num_elements must be a positive integer");
        check(&mut v, r.rician_factor.is_finite() && r.rician_factor >= 0.0,
            "rician_factor must be finite and nonnegative");
        check(&mut v, r.phase_noise_severity.is_finite()
                && (0.0..=1.0).contains(&r.phase_noise_severity),
            "phase_noise_severity out of [0,1]");
        check(&mut v, r.pl_offset_db.is_finite(), "pl_offset_db must be finite");
        check(&mut v, r.pl_exponent.is_finite(), "pl_exponent must be finite");
        check(&mut v, r.shadow_db.is_finite(), "shadow_db must be finite");

        let w = &self.pinching;
        check(&mut v, w.emission_fraction.is_finite()
                && (0.0..=1.0).contains(&w.emission_fraction),
            "emission_fraction out of [0,1]");
        check(&mut v, w.waveguide_loss_db_per_m.is_finite() && w.waveguide_loss_db_per_m >= 0.0,
            "waveguide_loss_db_per_m must be finite and nonnegative");

        if v.is_empty() {
            Ok(self)
        } else {
            Err(ValidationErrors(v))
        }
    }
}

/// On-disk configuration. Keys mirror the reference parameter table and
/// its units: frequencies in GHz, powers in dBm, the phase shifter in mW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub carrier_frequency_ghz: f64,
    pub bandwidth_ghz: f64,
    pub height_m: f64,
    pub region_offset_m: f64,
    pub region_side_m: f64,
    pub per_user_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub relay_static_dbm: f64,
    pub ue_static_dbm: f64,
    pub amplifier_efficiency: f64,
    pub pl_offset_db: f64,
    pub pl_exponent: f64,
    pub shadow_db: f64,
    pub phase_noise_severity: f64,
    pub rician_factor: f64,
    pub phase_shifter_mw: f64,
    pub ris_elements: u64,
    pub emission_fraction: f64,
    pub waveguide_loss_db_per_m: f64,
    pub feeder: FeederMode,
}

/// Errors from reading or writing a configuration file.
#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("failed to parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("failed to serialize config: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}

impl FileConfig {
    pub fn from_sim(cfg: &SimConfig) -> Self {
        Self {
            carrier_frequency_ghz: cfg.geometry.carrier_frequency_hz / 1e9,
            bandwidth_ghz: cfg.power.bandwidth_hz / 1e9,
            height_m: cfg.geometry.height_m,
            region_offset_m: cfg.geometry.region_offset_m,
            region_side_m: cfg.geometry.region_side_m,
            per_user_power_dbm: watts_to_dbm(cfg.power.per_user_power_w),
            noise_power_dbm: watts_to_dbm(cfg.power.noise_power_w),
            relay_static_dbm: watts_to_dbm(cfg.power.relay_static_w),
            ue_static_dbm: watts_to_dbm(cfg.power.ue_static_w),
            amplifier_efficiency: cfg.power.amplifier_efficiency,
            pl_offset_db: cfg.ris.pl_offset_db,
            pl_exponent: cfg.ris.pl_exponent,
            shadow_db: cfg.ris.shadow_db,
            phase_noise_severity: cfg.ris.phase_noise_severity,
            rician_factor: cfg.ris.rician_factor,
            phase_shifter_mw: cfg.power.phase_shifter_w * 1e3,
            ris_elements: cfg.ris.num_elements as u64,
            emission_fraction: cfg.pinching.emission_fraction,
            waveguide_loss_db_per_m: cfg.pinching.waveguide_loss_db_per_m,
            feeder: cfg.pinching.feeder,
        }
    }

    pub fn to_sim(&self) -> SimConfig {
        SimConfig {
            geometry: ScenarioGeometry {
                carrier_frequency_hz: self.carrier_frequency_ghz * 1e9,
                height_m: self.height_m,
                region_offset_m: self.region_offset_m,
                region_side_m: self.region_side_m,
            },
            power: PowerModel {
                per_user_power_w: dbm_to_watts(self.per_user_power_dbm),
                noise_power_w: dbm_to_watts(self.noise_power_dbm),
                bandwidth_hz: self.bandwidth_ghz * 1e9,
                amplifier_efficiency: self.amplifier_efficiency,
                relay_static_w: dbm_to_watts(self.relay_static_dbm),
                ue_static_w: dbm_to_watts(self.ue_static_dbm),
                phase_shifter_w: self.phase_shifter_mw * 1e-3,
            },
            ris: RisConfig {
                num_elements: self.ris_elements as usize,
                rician_factor: self.rician_factor,
                phase_noise_severity: self.phase_noise_severity,
                pl_offset_db: self.pl_offset_db,
                pl_exponent: self.pl_exponent,
                shadow_db: self.shadow_db,
            },
            pinching: PinchingConfig {
                emission_fraction: self.emission_fraction,
                waveguide_loss_db_per_m: self.waveguide_loss_db_per_m,
                feeder: self.feeder,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, ConfigFileError> {
        Ok(toml::to_string(self)?)
    }
}
