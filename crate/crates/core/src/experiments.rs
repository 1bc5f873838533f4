//! Declarative sweep experiments over the two schemes.
//!
//! A [`SweepSpec`] names a swept variable, a grid, a set of scheme and
//! impairment combinations, and the Monte-Carlo budget; [`run_sweep`]
//! evaluates every cell and returns one row per grid point and scheme.
//!
//! All cells of one trial share that trial's substreams, so expensive
//! draws are reused across the grid: an element sweep accumulates the
//! whole array once per trial and records the gain at each checkpoint,
//! and offset/power sweeps redraw neither fading nor positions. Every
//! cell remains bit-identical to evaluating it in isolation with the
//! same seed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{PositionDraw, PositionModel, SimConfig, ValidationErrors};
use crate::energy::{ee_pinching, ee_ris, EnergyError};
use crate::mc::{self, McError, McEstimate};
use crate::pinching::{pinching_rate_closed_form, PinchingError, PinchingModel};
use crate::ris::{ris_rate_closed_form, RisError, RisModel, RisPreLog};
use crate::units::dbm_to_watts;

/// Independent variable of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    /// Number of RIS elements `M` (positive integers).
    RisElements,
    /// Distance `d` from the origin to each user region, metres.
    RegionOffsetM,
    /// Per-user transmit power in dBm.
    TransmitPowerDbm,
}

/// Reported metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "se")]
    SpectralEfficiency,
    #[serde(rename = "ee")]
    EnergyEfficiency,
}

impl Metric {
    pub fn column_name(&self) -> &'static str {
        match self {
            Metric::SpectralEfficiency => "se_bps_hz",
            Metric::EnergyEfficiency => "ee_gbit_per_joule",
        }
    }
}

/// Scheme and impairment combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Active pinching relay, lossless hardware.
    PaIdeal,
    /// Active pinching relay emitting a fraction `beta` of the power
    /// (taken from the configuration's `emission_fraction`).
    PaLossyAntenna,
    /// Active pinching relay on a lossy waveguide fed from the centre.
    PaMidFeeder,
    /// Active pinching relay on a lossy waveguide fed from one end.
    PaEndFeeder,
    /// Passive two-slot pinching variant, lossless hardware.
    PaPassive,
    /// RIS with perfect phase adjustment.
    RisIdeal,
    /// RIS with per-element phase noise (severity from the
    /// configuration's `phase_noise_severity`).
    RisPhaseNoise,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::PaIdeal,
        Scheme::PaLossyAntenna,
        Scheme::PaMidFeeder,
        Scheme::PaEndFeeder,
        Scheme::PaPassive,
        Scheme::RisIdeal,
        Scheme::RisPhaseNoise,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Scheme::PaIdeal => "pa-ideal",
            Scheme::PaLossyAntenna => "pa-lossy-antenna",
            Scheme::PaMidFeeder => "pa-mid-feeder",
            Scheme::PaEndFeeder => "pa-end-feeder",
            Scheme::PaPassive => "pa-passive",
            Scheme::RisIdeal => "ris-ideal",
            Scheme::RisPhaseNoise => "ris-phase-noise",
        }
    }

    pub fn parse(id: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|s| s.id() == id)
    }

    pub fn is_ris(&self) -> bool {
        matches!(self, Scheme::RisIdeal | Scheme::RisPhaseNoise)
    }

    pub fn is_passive(&self) -> bool {
        matches!(self, Scheme::PaPassive)
    }

    /// Wires the scheme's impairment case into a configuration. Knobs
    /// not owned by the scheme keep their configured values.
    pub fn apply(&self, base: &SimConfig) -> SimConfig {
        use crate::config::FeederMode;
        let mut cfg = *base;
        match self {
            Scheme::PaIdeal | Scheme::PaPassive => {
                cfg.pinching.emission_fraction = 1.0;
                cfg.pinching.feeder = FeederMode::Ideal;
            }
            Scheme::PaLossyAntenna => {
                cfg.pinching.feeder = FeederMode::Ideal;
            }
            Scheme::PaMidFeeder => {
                cfg.pinching.emission_fraction = 1.0;
                cfg.pinching.feeder = FeederMode::MidFeeder;
            }
            Scheme::PaEndFeeder => {
                cfg.pinching.emission_fraction = 1.0;
                cfg.pinching.feeder = FeederMode::EndFeeder;
            }
            Scheme::RisIdeal => {
                cfg.ris.phase_noise_severity = 0.0;
            }
            Scheme::RisPhaseNoise => {}
        }
        cfg
    }
}

fn default_trials() -> u64 {
    10_000
}

fn default_seed() -> u64 {
    42
}

fn default_pa_positions() -> PositionModel {
    PositionModel::SymmetricMirrored
}

fn default_ris_positions() -> PositionModel {
    PositionModel::IndependentUniform
}

/// Declarative description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub experiment_id: String,
    pub variable: SweepVariable,
    /// Strictly increasing, non-empty grid of the swept variable.
    pub grid: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub metric: Metric,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Placement model for pinching-antenna trials.
    #[serde(default = "default_pa_positions")]
    pub pa_positions: PositionModel,
    /// Placement model for RIS trials.
    #[serde(default = "default_ris_positions")]
    pub ris_positions: PositionModel,
}

/// One output cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub experiment_id: String,
    pub x_value: f64,
    pub scheme: Scheme,
    pub metric: Metric,
    pub mc_mean: f64,
    pub mc_ci95: f64,
    /// Closed-form value where one is defined (ideal pinching, ideal
    /// RIS); seed-independent.
    pub closed_form: Option<f64>,
    pub seed: u64,
    pub trials: u64,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep grid must be non-empty")]
    EmptyGrid,
    #[error("sweep grid must be strictly increasing and finite")]
    NonIncreasingGrid,
    #[error("ris-elements grid values must be positive integers, got {0}")]
    BadElementCount(f64),
    #[error("region offsets must be nonnegative, got {0}")]
    NegativeOffset(f64),
    #[error("no schemes requested")]
    NoSchemes,
    #[error("scheme {0} listed twice")]
    DuplicateScheme(&'static str),
    #[error("energy efficiency is not defined for scheme {0}")]
    MetricMismatch(&'static str),
    #[error("scheme {0} is absent from the table")]
    SchemeMissing(&'static str),
    #[error("crossover requires both schemes on identical grids")]
    MismatchedGrids,
    #[error(transparent)]
    Config(#[from] ValidationErrors),
    #[error(transparent)]
    Pinching(#[from] PinchingError),
    #[error(transparent)]
    Ris(#[from] RisError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Mc(#[from] McError),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.grid.is_empty() {
            return Err(SweepError::EmptyGrid);
        }
        if self.grid.iter().any(|v| !v.is_finite())
            || self.grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(SweepError::NonIncreasingGrid);
        }
        match self.variable {
            SweepVariable::RisElements => {
                for &v in &self.grid {
                    if v < 1.0 || v.fract() != 0.0 || v > 1e9 {
                        return Err(SweepError::BadElementCount(v));
                    }
                }
            }
            SweepVariable::RegionOffsetM => {
                for &v in &self.grid {
                    if v < 0.0 {
                        return Err(SweepError::NegativeOffset(v));
                    }
                }
            }
            SweepVariable::TransmitPowerDbm => {}
        }
        if self.schemes.is_empty() {
            return Err(SweepError::NoSchemes);
        }
        let mut seen = Vec::new();
        for s in &self.schemes {
            if seen.contains(s) {
                return Err(SweepError::DuplicateScheme(s.id()));
            }
            seen.push(*s);
        }
        if self.metric == Metric::EnergyEfficiency {
            if let Some(s) = self.schemes.iter().find(|s| s.is_passive()) {
                return Err(SweepError::MetricMismatch(s.id()));
            }
        }
        Ok(())
    }
}

fn with_variable(cfg: &SimConfig, variable: SweepVariable, value: f64) -> SimConfig {
    let mut cfg = *cfg;
    match variable {
        SweepVariable::RisElements => cfg.ris.num_elements = value as usize,
        SweepVariable::RegionOffsetM => cfg.geometry.region_offset_m = value,
        SweepVariable::TransmitPowerDbm => cfg.power.per_user_power_w = dbm_to_watts(value),
    }
    cfg
}

fn pa_estimates(
    spec: &SweepSpec,
    cell_cfgs: &[SimConfig],
    passive: bool,
) -> Result<Vec<McEstimate>, SweepError> {
    let models: Vec<PinchingModel> = cell_cfgs
        .iter()
        .map(PinchingModel::new)
        .collect::<Result<_, _>>()?;
    let geometries: Vec<_> = cell_cfgs.iter().map(|c| c.geometry).collect();
    let mode = spec.pa_positions;
    Ok(mc::estimate_grid(
        cell_cfgs.len(),
        spec.trials,
        spec.seed,
        |streams, out| {
            let draw = PositionDraw::sample(mode, &mut streams.lane(0));
            for (i, value) in out.iter_mut().enumerate() {
                let pos = geometries[i].place(&draw);
                *value = if passive {
                    models[i].passive_rate(&pos)
                } else {
                    models[i].per_user_rate(&pos)
                };
            }
        },
    )?)
}

fn ris_estimates(
    spec: &SweepSpec,
    cell_cfgs: &[SimConfig],
) -> Result<Vec<McEstimate>, SweepError> {
    let cells = cell_cfgs.len();
    let mode = spec.ris_positions;
    match spec.variable {
        SweepVariable::RisElements => {
            let model = RisModel::new(&cell_cfgs[0])?;
            let geometry = cell_cfgs[0].geometry;
            let checkpoints: Vec<usize> =
                spec.grid.iter().map(|&v| v as usize).collect();
            Ok(mc::estimate_grid(cells, spec.trials, spec.seed, |streams, out| {
                let mut amp_rng = streams.lane(0);
                let draw = PositionDraw::sample(mode, &mut amp_rng);
                let pos = geometry.place(&draw);
                let loss = model.path_loss_product(&geometry, &pos);
                model.gain_prefixes(&checkpoints, &mut amp_rng, &mut streams.lane(1), out);
                for gain in out.iter_mut() {
                    *gain = model.rate_from_gain(*gain, loss);
                }
            })?)
        }
        SweepVariable::TransmitPowerDbm => {
            let models: Vec<RisModel> = cell_cfgs
                .iter()
                .map(RisModel::new)
                .collect::<Result<_, _>>()?;
            let geometry = cell_cfgs[0].geometry;
            Ok(mc::estimate_grid(cells, spec.trials, spec.seed, |streams, out| {
                let mut amp_rng = streams.lane(0);
                let draw = PositionDraw::sample(mode, &mut amp_rng);
                let pos = geometry.place(&draw);
                let loss = models[0].path_loss_product(&geometry, &pos);
                let gain = models[0].gain_sample(&mut amp_rng, &mut streams.lane(1));
                for (i, value) in out.iter_mut().enumerate() {
                    *value = models[i].rate_from_gain(gain, loss);
                }
            })?)
        }
        SweepVariable::RegionOffsetM => {
            let model = RisModel::new(&cell_cfgs[0])?;
            let geometries: Vec<_> = cell_cfgs.iter().map(|c| c.geometry).collect();
            Ok(mc::estimate_grid(cells, spec.trials, spec.seed, |streams, out| {
                let mut amp_rng = streams.lane(0);
                let draw = PositionDraw::sample(mode, &mut amp_rng);
                let gain = model.gain_sample(&mut amp_rng, &mut streams.lane(1));
                for (i, value) in out.iter_mut().enumerate() {
                    let pos = geometries[i].place(&draw);
                    let loss = model.path_loss_product(&geometries[i], &pos);
                    *value = model.rate_from_gain(gain, loss);
                }
            })?)
        }
    }
}

/// Closed-form per-user spectral efficiency for schemes that have one.
fn closed_form_se(scheme: Scheme, cfg: &SimConfig) -> Result<Option<f64>, SweepError> {
    Ok(match scheme {
        Scheme::PaIdeal => Some(pinching_rate_closed_form(cfg)?),
        Scheme::RisIdeal => Some(ris_rate_closed_form(cfg, RisPreLog::TwoSlot)?),
        _ => None,
    })
}

/// Converts a per-user SE figure into the scheme's energy efficiency in
/// Gb/J (sum rate of the two users over total consumed power).
fn ee_gbit_per_joule(scheme: Scheme, cfg: &SimConfig, per_user_se: f64) -> Result<f64, SweepError> {
    let sum_rate = 2.0 * per_user_se;
    let breakdown = if scheme.is_ris() {
        ee_ris(sum_rate, &cfg.power, cfg.ris.num_elements)?
    } else {
        ee_pinching(sum_rate, &cfg.power)?
    };
    Ok(breakdown.ee_bits_per_joule / 1e9)
}

/// Runs every cell of the sweep. Rows are ordered by grid value, then by
/// scheme name; output is a pure function of `(spec, config)`.
pub fn run_sweep(spec: &SweepSpec, base: &SimConfig) -> Result<Vec<SweepRow>, SweepError> {
    base.validate()?;
    spec.validate()?;

    let mut schemes = spec.schemes.clone();
    schemes.sort_by_key(|s| s.id());

    let mut columns: Vec<Vec<SweepRow>> = Vec::with_capacity(schemes.len());
    for &scheme in &schemes {
        let scheme_cfg = scheme.apply(base);
        let cell_cfgs: Vec<SimConfig> = spec
            .grid
            .iter()
            .map(|&v| with_variable(&scheme_cfg, spec.variable, v))
            .collect();
        for cfg in &cell_cfgs {
            cfg.validate()?;
        }
        let estimates = if scheme.is_ris() {
            ris_estimates(spec, &cell_cfgs)?
        } else {
            pa_estimates(spec, &cell_cfgs, scheme.is_passive())?
        };

        let mut rows = Vec::with_capacity(cell_cfgs.len());
        for ((cfg, est), &x) in cell_cfgs.iter().zip(estimates).zip(&spec.grid) {
            let cf_se = closed_form_se(scheme, cfg)?;
            let (mc_mean, mc_ci95, closed_form) = match spec.metric {
                Metric::SpectralEfficiency => (est.mean, est.ci_half_width_95, cf_se),
                Metric::EnergyEfficiency => {
                    let mean = ee_gbit_per_joule(scheme, cfg, est.mean)?;
                    // efficiency is linear in the rate, so the CI scales
                    // by the same factor
                    let ci = if est.mean > 0.0 {
                        mean * est.ci_half_width_95 / est.mean
                    } else {
                        0.0
                    };
                    let cf = match cf_se {
                        Some(se) => Some(ee_gbit_per_joule(scheme, cfg, se)?),
                        None => None,
                    };
                    (mean, ci, cf)
                }
            };
            rows.push(SweepRow {
                experiment_id: spec.experiment_id.clone(),
                x_value: x,
                scheme,
                metric: spec.metric,
                mc_mean,
                mc_ci95,
                closed_form,
                seed: spec.seed,
                trials: spec.trials,
            });
        }
        columns.push(rows);
    }

    let mut out = Vec::with_capacity(spec.grid.len() * schemes.len());
    let mut column_iters: Vec<_> = columns.into_iter().map(|c| c.into_iter()).collect();
    for _ in 0..spec.grid.len() {
        for column in &mut column_iters {
            out.push(column.next().expect("column length equals grid length"));
        }
    }
    Ok(out)
}

/// Smallest grid value at which `scheme_a`'s metric reaches
/// `scheme_b`'s, linearly interpolated between bracketing grid points;
/// `None` when the curves never cross.
pub fn crossover(
    rows: &[SweepRow],
    scheme_a: Scheme,
    scheme_b: Scheme,
) -> Result<Option<f64>, SweepError> {
    let series = |scheme: Scheme| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| (r.x_value, r.mc_mean))
            .collect()
    };
    let a = series(scheme_a);
    let b = series(scheme_b);
    if a.is_empty() {
        return Err(SweepError::SchemeMissing(scheme_a.id()));
    }
    if b.is_empty() {
        return Err(SweepError::SchemeMissing(scheme_b.id()));
    }
    if a.len() != b.len() || a.iter().zip(&b).any(|(pa, pb)| pa.0 != pb.0) {
        return Err(SweepError::MismatchedGrids);
    }
    let diff: Vec<(f64, f64)> = a
        .iter()
        .zip(&b)
        .map(|(&(x, ya), &(_, yb))| (x, ya - yb))
        .collect();
    if diff[0].1 >= 0.0 {
        return Ok(Some(diff[0].0));
    }
    for w in diff.windows(2) {
        let (x0, d0) = w[0];
        let (x1, d1) = w[1];
        if d1 >= 0.0 {
            return Ok(Some(x0 + (x1 - x0) * (-d0) / (d1 - d0)));
        }
    }
    Ok(None)
}

/// Spectral efficiency versus RIS element count at the reference power:
/// all seven scheme curves on a log-spaced grid `10^2 .. 10^5`.
pub fn fig2_spec(trials: u64, seed: u64) -> SweepSpec {
    let grid = (0..=24)
        .map(|k| 10f64.powf(2.0 + k as f64 / 8.0).round())
        .collect();
    SweepSpec {
        experiment_id: "fig2".into(),
        variable: SweepVariable::RisElements,
        grid,
        schemes: Scheme::ALL.to_vec(),
        metric: Metric::SpectralEfficiency,
        trials,
        seed,
        pa_positions: default_pa_positions(),
        ris_positions: default_ris_positions(),
    }
}

/// Spectral efficiency versus region offset `d` (5..50 m).
pub fn fig3_spec(trials: u64, seed: u64) -> SweepSpec {
    SweepSpec {
        experiment_id: "fig3".into(),
        variable: SweepVariable::RegionOffsetM,
        grid: (0..=18).map(|i| 5.0 + 2.5 * i as f64).collect(),
        schemes: vec![
            Scheme::PaIdeal,
            Scheme::PaMidFeeder,
            Scheme::PaEndFeeder,
            Scheme::RisIdeal,
        ],
        metric: Metric::SpectralEfficiency,
        trials,
        seed,
        pa_positions: default_pa_positions(),
        ris_positions: default_ris_positions(),
    }
}

/// Energy efficiency versus transmit power (-10..50 dBm).
pub fn fig4_spec(trials: u64, seed: u64) -> SweepSpec {
    SweepSpec {
        experiment_id: "fig4".into(),
        variable: SweepVariable::TransmitPowerDbm,
        grid: (0..=24).map(|i| -10.0 + 2.5 * i as f64).collect(),
        schemes: vec![
            Scheme::PaIdeal,
            Scheme::PaMidFeeder,
            Scheme::PaEndFeeder,
            Scheme::RisIdeal,
            Scheme::RisPhaseNoise,
        ],
        metric: Metric::EnergyEfficiency,
        trials,
        seed,
        pa_positions: default_pa_positions(),
        ris_positions: default_ris_positions(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_table1;
    use crate::pinching::pinching_rate_mc;
    use crate::ris::ris_rate_mc;

    fn tiny_spec() -> SweepSpec {
        SweepSpec {
            experiment_id: "test".into(),
            variable: SweepVariable::TransmitPowerDbm,
            grid: vec![10.0],
            schemes: vec![Scheme::PaIdeal],
            metric: Metric::SpectralEfficiency,
            trials: 100,
            seed: 1,
            pa_positions: PositionModel::SymmetricMirrored,
            ris_positions: PositionModel::IndependentUniform,
        }
    }

    #[test]
    fn single_point_single_scheme_yields_one_row() {
        let rows = run_sweep(&tiny_spec(), &default_table1()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].scheme, Scheme::PaIdeal);
        assert_eq!(rows[0].x_value, 10.0);
        assert!(rows[0].closed_form.is_some());
    }

    #[test]
    fn rows_are_grid_major_and_scheme_sorted() {
        let mut spec = tiny_spec();
        spec.grid = vec![0.0, 10.0];
        spec.schemes = vec![Scheme::RisIdeal, Scheme::PaIdeal];
        spec.ris_positions = PositionModel::RegionCenters;
        let rows = run_sweep(&spec, &default_table1()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(
            rows.iter().map(|r| (r.x_value, r.scheme)).collect::<Vec<_>>(),
            vec![
                (0.0, Scheme::PaIdeal),
                (0.0, Scheme::RisIdeal),
                (10.0, Scheme::PaIdeal),
                (10.0, Scheme::RisIdeal),
            ]
        );
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut spec = tiny_spec();
        spec.schemes = vec![Scheme::PaIdeal, Scheme::RisPhaseNoise];
        spec.grid = vec![0.0, 15.0];
        let cfg = default_table1();
        let a = run_sweep(&spec, &cfg).unwrap();
        let b = run_sweep(&spec, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_validation_errors() {
        let mut spec = tiny_spec();
        spec.grid = vec![];
        assert!(matches!(spec.validate(), Err(SweepError::EmptyGrid)));
        spec.grid = vec![1.0, 1.0];
        assert!(matches!(spec.validate(), Err(SweepError::NonIncreasingGrid)));
        spec.grid = vec![2.0, 1.0];
        assert!(matches!(spec.validate(), Err(SweepError::NonIncreasingGrid)));

        spec = tiny_spec();
        spec.variable = SweepVariable::RisElements;
        spec.grid = vec![10.5];
        assert!(matches!(spec.validate(), Err(SweepError::BadElementCount(_))));
        spec.grid = vec![0.0];
        assert!(matches!(spec.validate(), Err(SweepError::BadElementCount(_))));

        spec = tiny_spec();
        spec.schemes = vec![];
        assert!(matches!(spec.validate(), Err(SweepError::NoSchemes)));
        spec.schemes = vec![Scheme::PaIdeal, Scheme::PaIdeal];
        assert!(matches!(spec.validate(), Err(SweepError::DuplicateScheme(_))));
    }

    #[test]
    fn energy_metric_rejects_passive_scheme() {
        let mut spec = tiny_spec();
        spec.metric = Metric::EnergyEfficiency;
        spec.schemes = vec![Scheme::PaPassive];
        assert!(matches!(spec.validate(), Err(SweepError::MetricMismatch(_))));
    }

    #[test]
    fn crossover_linear_fixture() {
        let mk = |scheme: Scheme, x: f64, y: f64| SweepRow {
            experiment_id: "x".into(),
            x_value: x,
            scheme,
            metric: Metric::SpectralEfficiency,
            mc_mean: y,
            mc_ci95: 0.0,
            closed_form: None,
            seed: 0,
            trials: 2,
        };
        // a(x) = x, b(x) = 84 - x: curves meet at exactly x = 42
        let mut rows = Vec::new();
        for &x in &[30.0, 40.0, 44.0, 60.0] {
            rows.push(mk(Scheme::RisIdeal, x, x));
            rows.push(mk(Scheme::PaIdeal, x, 84.0 - x));
        }
        let x = crossover(&rows, Scheme::RisIdeal, Scheme::PaIdeal).unwrap().unwrap();
        assert!((x - 42.0).abs() < 1e-12, "crossover {x}");

        // never crosses
        let rows_low: Vec<SweepRow> = rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.scheme == Scheme::RisIdeal {
                    r.mc_mean = -1.0;
                }
                r
            })
            .collect();
        assert_eq!(crossover(&rows_low, Scheme::RisIdeal, Scheme::PaIdeal).unwrap(), None);

        // already above at the first grid point
        let x0 = crossover(&rows, Scheme::PaIdeal, Scheme::RisIdeal).unwrap().unwrap();
        assert_eq!(x0, 30.0);

        // absent scheme and mismatched grids are detected
        assert!(crossover(&rows, Scheme::PaPassive, Scheme::PaIdeal).is_err());
        let mut mismatched = rows.clone();
        mismatched.retain(|r| !(r.scheme == Scheme::RisIdeal && r.x_value == 30.0));
        assert!(matches!(
            crossover(&mismatched, Scheme::RisIdeal, Scheme::PaIdeal),
            Err(SweepError::MismatchedGrids)
        ));
    }

    #[test]
    fn figure_presets_are_well_formed() {
        let fig2 = fig2_spec(100, 1);
        assert_eq!(fig2.schemes.len(), 7);
        assert_eq!(fig2.grid.len(), 25);
        assert_eq!(fig2.grid[0], 100.0);
        assert_eq!(*fig2.grid.last().unwrap(), 100_000.0);
        fig2.validate().unwrap();

        let fig3 = fig3_spec(100, 1);
        assert_eq!(fig3.grid[0], 5.0);
        assert_eq!(*fig3.grid.last().unwrap(), 50.0);
        fig3.validate().unwrap();

        let fig4 = fig4_spec(100, 1);
        assert_eq!(fig4.metric, Metric::EnergyEfficiency);
        assert_eq!(fig4.grid[0], -10.0);
        assert_eq!(*fig4.grid.last().unwrap(), 50.0);
        fig4.validate().unwrap();
    }

    #[test]
    fn element_sweep_matches_isolated_cells_bitwise() {
        let mut spec = tiny_spec();
        spec.variable = SweepVariable::RisElements;
        spec.grid = vec![4.0, 16.0];
        spec.schemes = vec![Scheme::RisPhaseNoise];
        spec.trials = 512;
        spec.ris_positions = PositionModel::IndependentUniform;
        let cfg = default_table1();
        let rows = run_sweep(&spec, &cfg).unwrap();
        for row in &rows {
            let mut cell_cfg = Scheme::RisPhaseNoise.apply(&cfg);
            cell_cfg.ris.num_elements = row.x_value as usize;
            let single = ris_rate_mc(
                &cell_cfg,
                PositionModel::IndependentUniform,
                spec.trials,
                spec.seed,
            )
            .unwrap();
            assert_eq!(single.mean.to_bits(), row.mc_mean.to_bits());
            assert_eq!(single.ci_half_width_95.to_bits(), row.mc_ci95.to_bits());
        }
    }

    #[test]
    fn power_sweep_matches_isolated_cells_bitwise() {
        let mut spec = tiny_spec();
        spec.grid = vec![0.0, 15.0];
        spec.schemes = vec![Scheme::PaEndFeeder];
        spec.trials = 512;
        let cfg = default_table1();
        let rows = run_sweep(&spec, &cfg).unwrap();
        for row in &rows {
            let mut cell_cfg = Scheme::PaEndFeeder.apply(&cfg);
            cell_cfg.power.per_user_power_w = dbm_to_watts(row.x_value);
            let single = pinching_rate_mc(
                &cell_cfg,
                PositionModel::SymmetricMirrored,
                spec.trials,
                spec.seed,
            )
            .unwrap();
            assert_eq!(single.mean.to_bits(), row.mc_mean.to_bits());
        }
    }

    #[test]
    fn pinching_curves_are_constant_in_element_count() {
        let mut spec = tiny_spec();
        spec.variable = SweepVariable::RisElements;
        spec.grid = vec![100.0, 1000.0, 10_000.0];
        spec.schemes = vec![Scheme::PaIdeal, Scheme::PaPassive];
        let rows = run_sweep(&spec, &default_table1()).unwrap();
        for scheme in [Scheme::PaIdeal, Scheme::PaPassive] {
            let means: Vec<u64> = rows
                .iter()
                .filter(|r| r.scheme == scheme)
                .map(|r| r.mc_mean.to_bits())
                .collect();
            assert_eq!(means.len(), 3);
            assert!(means.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn energy_rows_scale_the_rate_by_the_power_budget() {
        let mut se_spec = tiny_spec();
        se_spec.grid = vec![10.0];
        se_spec.schemes = vec![Scheme::RisIdeal];
        se_spec.ris_positions = PositionModel::RegionCenters;
        let mut ee_spec = se_spec.clone();
        ee_spec.metric = Metric::EnergyEfficiency;
        let cfg = default_table1();
        let se = &run_sweep(&se_spec, &cfg).unwrap()[0];
        let ee = &run_sweep(&ee_spec, &cfg).unwrap()[0];
        // B * 2 * SE / (M * P_phsh + 2P + 2P_UE) / 1e9
        let p = dbm_to_watts(10.0);
        let total = 10_000.0 * 0.0175 + 2.0 * p + 0.02;
        let expected = 1e9 * 2.0 * se.mc_mean / total / 1e9;
        approx::assert_relative_eq!(ee.mc_mean, expected, max_relative = 1e-12);
        approx::assert_relative_eq!(
            ee.closed_form.unwrap(),
            1e9 * 2.0 * se.closed_form.unwrap() / total / 1e9,
            max_relative = 1e-12
        );
    }
}
