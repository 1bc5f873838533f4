//! Cross-validation of the closed forms against Monte-Carlo estimates.
//!
//! Three checks, each with an explicit tolerance:
//! symmetric pinching rate vs its closed form (within twice the 95% CI
//! half-width at several powers), the coherent RIS gain second moment vs
//! the closed-form bracket (1%), and the phase-noise attenuation vs the
//! analytic sinc factor (1%).

use thiserror::Error;

use crate::channel::RicianAmplitudePair;
use crate::config::{PositionModel, SimConfig, ValidationErrors};
use crate::mc::{self, McError};
use crate::pinching::{pinching_rate_closed_form, pinching_rate_mc, PinchingError};
use crate::ris::{coherent_gain_bracket, ris_effective_gain, RisError, RisModel};
use crate::units::dbm_to_watts;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error(transparent)]
    Config(#[from] ValidationErrors),
    #[error(transparent)]
    Pinching(#[from] PinchingError),
    #[error(transparent)]
    Ris(#[from] RisError),
    #[error(transparent)]
    Mc(#[from] McError),
}

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Human-readable comparison, worst case across the check's points.
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Transmit powers (dBm) probed by the pinching closed-form check.
const PINCHING_CHECK_POWERS_DBM: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];
/// Array sizes probed by the gain-moment check.
const BRACKET_CHECK_SIZES: [usize; 3] = [8, 64, 512];
const MOMENT_TOLERANCE: f64 = 0.01;

/// Full validation suite on the given configuration.
pub fn run_validation(
    cfg: &SimConfig,
    trials: u64,
    seed: u64,
) -> Result<ValidationReport, ValidationError> {
    Ok(ValidationReport {
        checks: vec![
            pinching_closed_form_check(cfg, trials, seed, 1.0)?,
            ris_bracket_check(cfg, trials, seed)?,
            phase_noise_sinc_check(trials, seed)?,
        ],
    })
}

/// Symmetric-locations pinching rate: Monte Carlo against the closed
/// form at several powers, each within twice the CI half-width.
///
/// `mc_power_scale` exists for fault-injection tests: it perturbs only
/// the Monte-Carlo side, so any value other than 1 must trip the check.
pub(crate) fn pinching_closed_form_check(
    cfg: &SimConfig,
    trials: u64,
    seed: u64,
    mc_power_scale: f64,
) -> Result<CheckResult, ValidationError> {
    let mut ideal = *cfg;
    ideal.pinching = crate::config::PinchingConfig::ideal();
    let mut passed = true;
    let mut worst: Option<(f64, f64, f64, f64)> = None;
    for p_dbm in PINCHING_CHECK_POWERS_DBM {
        let mut point = ideal;
        point.power.per_user_power_w = dbm_to_watts(p_dbm);
        let reference = pinching_rate_closed_form(&point)?;
        point.power.per_user_power_w *= mc_power_scale;
        let est = pinching_rate_mc(&point, PositionModel::SymmetricMirrored, trials, seed)?;
        let error = (est.mean - reference).abs();
        let tolerance = 2.0 * est.ci_half_width_95;
        if error > tolerance {
            passed = false;
        }
        if worst.is_none_or(|(_, _, e, t)| error / t.max(f64::MIN_POSITIVE) > e / t) {
            worst = Some((p_dbm, reference, error, tolerance));
        }
    }
    let (p, reference, error, tolerance) = worst.expect("at least one power probed");
    Ok(CheckResult {
        name: "pinching-rate-closed-form-vs-mc",
        passed,
        detail: format!(
            "worst at {p} dBm: |mc - {reference:.6}| = {error:.2e}, tolerance 2*ci = {tolerance:.2e}"
        ),
    })
}

/// Coherent-gain second moment `E[(sum delta zeta)^2]` against the
/// closed-form bracket `M + (M^2-M) (pi L_1/2(-K)^2 / (4(K+1)))^2`.
fn ris_bracket_check(
    cfg: &SimConfig,
    trials: u64,
    seed: u64,
) -> Result<CheckResult, ValidationError> {
    let mut coherent = *cfg;
    coherent.ris.phase_noise_severity = 0.0;
    coherent.ris.num_elements = *BRACKET_CHECK_SIZES.last().unwrap();
    let model = RisModel::new(&coherent)?;
    let estimates = mc::estimate_grid(BRACKET_CHECK_SIZES.len(), trials, seed, |streams, out| {
        model.gain_prefixes(
            &BRACKET_CHECK_SIZES,
            &mut streams.lane(0),
            &mut streams.lane(1),
            out,
        );
    })?;
    let mut passed = true;
    let mut worst = (0usize, 0.0f64);
    for (m, est) in BRACKET_CHECK_SIZES.into_iter().zip(estimates) {
        let bracket = coherent_gain_bracket(m, coherent.ris.rician_factor)?;
        let rel = (est.mean / bracket - 1.0).abs();
        if rel > MOMENT_TOLERANCE {
            passed = false;
        }
        if rel >= worst.1 {
            worst = (m, rel);
        }
    }
    Ok(CheckResult {
        name: "ris-gain-moment-vs-bracket",
        passed,
        detail: format!(
            "worst at M = {}: relative error {:.4e}, tolerance {MOMENT_TOLERANCE}",
            worst.0, worst.1
        ),
    })
}

/// Uniform phase noise at severity 1/2 over deterministic unit
/// amplitudes: `E[gain] = M + (M^2 - M) (2/pi)^2`.
fn phase_noise_sinc_check(trials: u64, seed: u64) -> Result<CheckResult, ValidationError> {
    const M: usize = 256;
    let pairs = vec![RicianAmplitudePair { incident: 1.0, reflected: 1.0 }; M];
    let est = mc::estimate(
        |streams| ris_effective_gain(&pairs, 0.5, &mut streams.lane(1)).unwrap(),
        trials,
        seed,
    )?;
    let m = M as f64;
    let expected = m + (m * m - m) * (2.0 / std::f64::consts::PI).powi(2);
    let rel = (est.mean / expected - 1.0).abs();
    Ok(CheckResult {
        name: "phase-noise-sinc-attenuation",
        passed: rel <= MOMENT_TOLERANCE,
        detail: format!(
            "M = {M}, eps = 0.5: E[gain] = {:.2} vs {expected:.2}, relative error {rel:.4e}, tolerance {MOMENT_TOLERANCE}",
            est.mean
        ),
    })
}
