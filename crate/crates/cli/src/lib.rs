//! Command-line front end: subcommands that reproduce the reference
//! experiments, run custom sweeps, and cross-validate the closed forms.
//!
//! Every run resolves its configuration as defaults -> config file ->
//! flags, embeds the resolved parameters in the output, and is
//! bit-reproducible for a given seed, trial count, and any worker count.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mmlink_core::config::{default_table1, FeederMode, FileConfig, PositionModel, SimConfig};
use mmlink_core::experiments::{
    self, fig2_spec, fig3_spec, fig4_spec, run_sweep, Scheme, SweepRow, SweepSpec,
};
use mmlink_core::validation::run_validation;

pub const TOOL_NAME: &str = "mmlink";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Versioned schema tag embedded in every CSV.
pub const CSV_SCHEMA: &str = "mmlink-csv/1";
/// Fixed column order of the tabular output.
pub const CSV_HEADER: &str =
    "experiment_id,x_value,scheme,metric_name,mc_mean,mc_ci95,closed_form,seed,trials";

/// Default Monte-Carlo budget for figure reproductions.
pub const DEFAULT_TRIALS: u64 = 10_000;
/// Default budget for the validation suite (tighter tolerances).
pub const DEFAULT_VALIDATE_TRIALS: u64 = 100_000;
/// Emission fraction used for the lossy-antenna curve when none is
/// configured explicitly (the reference leaves the value unstated).
pub const DEFAULT_LOSSY_BETA: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(name = "mmlink", version, about = "Link-level comparison of pinching-antenna relaying and RIS-assisted mmWave links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Configuration file (TOML); flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Base RNG seed; echoed into every output file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte-Carlo trials per cell (default 10000; validate 100000).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on
    /// the worker count.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// User placement for pinching-antenna trials.
    #[arg(long, global = true, value_enum)]
    pub pa_positions: Option<PositionArg>,
    /// User placement for RIS trials.
    #[arg(long, global = true, value_enum)]
    pub ris_positions: Option<PositionArg>,
}

/// Per-parameter overrides, named after the configuration-file keys.
#[derive(Debug, Clone, Args)]
pub struct Overrides {
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub carrier_frequency_ghz: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub bandwidth_ghz: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub height_m: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub region_offset_m: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub region_side_m: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub per_user_power_dbm: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub noise_power_dbm: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub relay_static_dbm: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub ue_static_dbm: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub amplifier_efficiency: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub pl_offset_db: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub pl_exponent: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub shadow_db: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub phase_noise_severity: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub rician_factor: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub phase_shifter_mw: Option<f64>,
    /// RIS element count; required by fig4.
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub ris_elements: Option<u64>,
    /// Emitted power fraction for the lossy-antenna case.
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub emission_fraction: Option<f64>,
    #[arg(long, global = true, help_heading = "Parameter overrides")]
    pub waveguide_loss_db_per_m: Option<f64>,
    #[arg(long, global = true, value_enum, help_heading = "Parameter overrides")]
    pub feeder: Option<FeederArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeederArg {
    Ideal,
    EndFeeder,
    MidFeeder,
}

impl From<FeederArg> for FeederMode {
    fn from(arg: FeederArg) -> Self {
        match arg {
            FeederArg::Ideal => FeederMode::Ideal,
            FeederArg::EndFeeder => FeederMode::EndFeeder,
            FeederArg::MidFeeder => FeederMode::MidFeeder,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PositionArg {
    /// Mirrored symmetric placements (closed-form assumption).
    Symmetric,
    /// Independent uniform placements.
    Independent,
    /// Users pinned at their region centres.
    Centers,
}

impl From<PositionArg> for PositionModel {
    fn from(arg: PositionArg) -> Self {
        match arg {
            PositionArg::Symmetric => PositionModel::SymmetricMirrored,
            PositionArg::Independent => PositionModel::IndependentUniform,
            PositionArg::Centers => PositionModel::RegionCenters,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral efficiency vs RIS element count: all seven scheme curves.
    Fig2,
    /// Spectral efficiency vs region offset d.
    Fig3,
    /// Energy efficiency vs transmit power; requires --ris-elements.
    Fig4,
    /// Run a custom sweep described by a TOML spec file.
    Sweep {
        /// Sweep specification (TOML).
        spec: PathBuf,
    },
    /// Cross-validate the closed forms against Monte Carlo.
    Validate,
}

impl Overrides {
    fn apply(&self, file: &mut FileConfig) {
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    file.$field = v;
                }
            };
        }
        set!(carrier_frequency_ghz);
        set!(bandwidth_ghz);
        set!(height_m);
        set!(region_offset_m);
        set!(region_side_m);
        set!(per_user_power_dbm);
        set!(noise_power_dbm);
        set!(relay_static_dbm);
        set!(ue_static_dbm);
        set!(amplifier_efficiency);
        set!(pl_offset_db);
        set!(pl_exponent);
        set!(shadow_db);
        set!(phase_noise_severity);
        set!(rician_factor);
        set!(phase_shifter_mw);
        set!(ris_elements);
        set!(emission_fraction);
        if let Some(v) = self.waveguide_loss_db_per_m {
            file.waveguide_loss_db_per_m = v;
        }
        if let Some(f) = self.feeder {
            file.feeder = f.into();
        }
    }
}

/// Resolves defaults -> config file -> flag overrides and validates.
pub fn resolve_config(run: &RunArgs, overrides: &Overrides) -> Result<(SimConfig, FileConfig)> {
    let mut file = match &run.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            FileConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FileConfig::from_sim(&default_table1()),
    };
    overrides.apply(&mut file);
    let sim = file.to_sim();
    sim.validate().map_err(anyhow::Error::from)?;
    Ok((sim, file))
}

/// A real with 9 significant digits, the fixed serialization of every
/// numeric CSV field.
pub fn format_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Renders the versioned CSV: a commented preamble embedding the tool
/// version, seed, trial count, and full resolved configuration, followed
/// by the fixed header row and one row per cell.
pub fn render_csv(rows: &[SweepRow], resolved: &FileConfig, seed: u64, trials: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!("# schema = {CSV_SCHEMA}\n"));
    out.push_str(&format!("# tool = {TOOL_NAME} {TOOL_VERSION}\n"));
    out.push_str(&format!("# seed = {seed}\n"));
    out.push_str(&format!("# trials = {trials}\n"));
    let config_toml = resolved.to_toml().expect("resolved config serializes");
    for line in config_toml.lines() {
        out.push_str("# config.");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.experiment_id,
            format_sig9(row.x_value),
            row.scheme.id(),
            row.metric.column_name(),
            format_sig9(row.mc_mean),
            format_sig9(row.mc_ci95),
            row.closed_form.map(format_sig9).unwrap_or_default(),
            row.seed,
            row.trials,
        ));
    }
    out
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn apply_position_flags(spec: &mut SweepSpec, run: &RunArgs) {
    if let Some(p) = run.pa_positions {
        spec.pa_positions = p.into();
    }
    if let Some(p) = run.ris_positions {
        spec.ris_positions = p.into();
    }
}

/// Prints the peak of each scheme's EE curve (on stderr, so the CSV on
/// stdout stays clean).
fn report_peaks(rows: &[SweepRow]) {
    let mut schemes: Vec<Scheme> = Vec::new();
    for row in rows {
        if !schemes.contains(&row.scheme) {
            schemes.push(row.scheme);
        }
    }
    for scheme in schemes {
        if let Some(best) = rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .max_by(|a, b| a.mc_mean.total_cmp(&b.mc_mean))
        {
            eprintln!(
                "peak {}: {} = {:.6} at {} dBm",
                best.scheme.id(),
                best.metric.column_name(),
                best.mc_mean,
                best.x_value,
            );
        }
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> Result<u8> {
    let (mut cfg, mut resolved) = resolve_config(&cli.run, &cli.overrides)?;
    let seed = cli.run.seed.unwrap_or(42);
    let trials = cli.run.trials.unwrap_or(match cli.command {
        Command::Validate => DEFAULT_VALIDATE_TRIALS,
        _ => DEFAULT_TRIALS,
    });

    match &cli.command {
        Command::Fig2 => {
            // the lossy-antenna curve needs an explicit emission
            // fraction; fall back to the documented default when the
            // configuration still has the ideal value
            if cfg.pinching.emission_fraction == 1.0 {
                cfg.pinching.emission_fraction = DEFAULT_LOSSY_BETA;
                resolved.emission_fraction = DEFAULT_LOSSY_BETA;
            }
            let mut spec = fig2_spec(trials, seed);
            apply_position_flags(&mut spec, &cli.run);
            let rows = in_pool(cli.run.workers, || run_sweep(&spec, &cfg))??;
            write_output(&cli.run.out, &render_csv(&rows, &resolved, seed, trials))?;
            Ok(0)
        }
        Command::Fig3 => {
            let mut spec = fig3_spec(trials, seed);
            apply_position_flags(&mut spec, &cli.run);
            let rows = in_pool(cli.run.workers, || run_sweep(&spec, &cfg))??;
            write_output(&cli.run.out, &render_csv(&rows, &resolved, seed, trials))?;
            Ok(0)
        }
        Command::Fig4 => {
            if cli.overrides.ris_elements.is_none() && cli.run.config.is_none() {
                bail!("fig4 requires an explicit RIS size: pass --ris-elements (or a config file)");
            }
            let mut spec = fig4_spec(trials, seed);
            apply_position_flags(&mut spec, &cli.run);
            let rows = in_pool(cli.run.workers, || run_sweep(&spec, &cfg))??;
            report_peaks(&rows);
            write_output(&cli.run.out, &render_csv(&rows, &resolved, seed, trials))?;
            Ok(0)
        }
        Command::Sweep { spec: path } => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading sweep spec {}", path.display()))?;
            let mut spec: SweepSpec =
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(t) = cli.run.trials {
                spec.trials = t;
            }
            if let Some(s) = cli.run.seed {
                spec.seed = s;
            }
            apply_position_flags(&mut spec, &cli.run);
            spec.validate().map_err(anyhow::Error::from)?;
            let rows = in_pool(cli.run.workers, || run_sweep(&spec, &cfg))??;
            write_output(
                &cli.run.out,
                &render_csv(&rows, &resolved, spec.seed, spec.trials),
            )?;
            Ok(0)
        }
        Command::Validate => {
            let report = in_pool(cli.run.workers, || run_validation(&cfg, trials, seed))??;
            let mut text = String::new();
            for check in &report.checks {
                text.push_str(&format!(
                    "{} {}: {}\n",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                ));
            }
            text.push_str(&format!(
                "{}: {} of {} checks passed (seed {seed}, {trials} trials)\n",
                if report.all_passed() { "OK" } else { "FAILED" },
                report.checks.iter().filter(|c| c.passed).count(),
                report.checks.len(),
            ));
            match &cli.run.out {
                Some(path) => {
                    std::fs::write(path, &text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    print!("{text}");
                }
                None => print!("{text}"),
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

/// Convenience for tests: full sweep for a figure command without going
/// through process spawning.
pub fn figure_rows(
    which: u8,
    cfg: &SimConfig,
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let spec = match which {
        2 => fig2_spec(trials, seed),
        3 => fig3_spec(trials, seed),
        4 => fig4_spec(trials, seed),
        _ => bail!("unknown figure {which}"),
    };
    Ok(run_sweep(&spec, cfg)?)
}

/// Parses CSV text produced by [`render_csv`] back into (x, mean) series
/// for one scheme; used by tests and downstream tooling.
pub fn parse_series(csv: &str, scheme_id: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("experiment_id"))
        .filter_map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() == 9 && fields[2] == scheme_id {
                Some((fields[1].parse().ok()?, fields[4].parse().ok()?))
            } else {
                None
            }
        })
        .collect()
}

/// Experiment ids carried by rows of each figure command, exposed so
/// integration tests can assert on them.
pub fn experiment_schemes(rows: &[SweepRow]) -> Vec<&'static str> {
    let mut ids: Vec<&'static str> = rows.iter().map(|r| r.scheme.id()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

pub use experiments::{crossover, Metric};
