//! `qrabi`: sweeps, figure presets, validation and data export for the
//! generalized quantum Rabi model.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod validate;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use qrabi_core::ModelParams;

use crate::commands::Outcome;
use crate::config::{Command, Format, Method, Preset, RunConfig};
use crate::error::{CliError, Result};

const MAX_LISTED_WARNINGS: usize = 8;

#[derive(Debug, Parser)]
#[command(
    name = "qrabi",
    version,
    about = "Spectra, dynamics and emission spectra of the quantum Rabi model with one- and two-photon couplings",
    after_long_help = presets::PRESET_HELP,
    allow_negative_numbers = true
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Flat `key = value` file; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Qubit frequency Δ
    #[arg(long)]
    pub delta: Option<f64>,
    /// One-photon coupling g1
    #[arg(long)]
    pub g1: Option<f64>,
    /// Two-photon coupling g2, below the collapse point 0.5
    #[arg(long)]
    pub g2: Option<f64>,
    /// Static bias ε
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fock truncation per spin block [default: 60]
    #[arg(long)]
    pub ntr: Option<usize>,
    /// param:start:stop:step with param one of delta, g1, g2, epsilon
    #[arg(long)]
    pub sweep: Option<String>,
    /// Comma-separated solvers
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Output file; a directory for `reproduce`. Standard output if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads [default: logical cores]
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Levels per point for spectrum and rabi [default: 12]
    #[arg(long)]
    pub levels: Option<usize>,
    /// End of the time grid [default: 200]
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Time step [default: 0.05]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Manifolds in the non-RWA emission spectrum [default: 60]
    #[arg(long = "m-max")]
    pub m_max: Option<usize>,
    /// Perturb one overlap-matrix entry before validating
    #[arg(long = "inject-fault")]
    pub inject_fault: bool,
}

impl Cli {
    /// Builds the run configuration: defaults, then the config file, then
    /// command-line flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let mut c = RunConfig::from_config_str(&text)?;
                c.command = self.command;
                c
            }
            None => RunConfig::new(self.command),
        };
        let p = cfg.params;
        cfg.params = ModelParams::with_bias(
            self.delta.unwrap_or(p.delta()),
            self.g1.unwrap_or(p.g1()),
            self.g2.unwrap_or(p.g2()),
            self.epsilon.unwrap_or(p.epsilon()),
        )
        .map_err(CliError::Params)?;
        if let Some(s) = &self.sweep {
            cfg.sweep = Some(s.parse()?);
        }
        if let Some(m) = self.methods {
            cfg.methods = m;
        }
        cfg.n_tr = self.ntr.unwrap_or(cfg.n_tr);
        cfg.out = self.out.or(cfg.out);
        cfg.format = self.format.unwrap_or(cfg.format);
        cfg.jobs = self.jobs.or(cfg.jobs);
        cfg.preset = self.preset.or(cfg.preset);
        cfg.levels = self.levels.unwrap_or(cfg.levels);
        cfg.t_max = self.t_max.unwrap_or(cfg.t_max);
        cfg.dt = self.dt.unwrap_or(cfg.dt);
        cfg.m_max = self.m_max.unwrap_or(cfg.m_max);
        cfg.inject_fault |= self.inject_fault;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn write_text(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            std::fs::write(p, text).map_err(|e| CliError::io(p, e))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn emit(cfg: &RunConfig, outcome: &Outcome, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    if cfg.command == Command::Reproduce {
        let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
        for t in &outcome.tables {
            let path = dir.join(format!("{}.{}", t.name, extension(cfg.format)));
            t.write_to(&path, cfg.format)?;
            writeln!(stdout, "{}", path.display()).map_err(|e| CliError::io("<stdout>", e))?;
        }
    } else {
        for t in &outcome.tables {
            write_text(cfg.out.as_deref(), &t.render(cfg.format), stdout)?;
        }
    }
    for w in outcome.warnings.iter().take(MAX_LISTED_WARNINGS) {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if outcome.warnings.len() > MAX_LISTED_WARNINGS {
        let _ = writeln!(stderr, "warning: ... and {} more", outcome.warnings.len() - MAX_LISTED_WARNINGS);
    }
    if !outcome.failures.is_empty() {
        let report = serde_json::json!({ "failures": outcome.failures });
        let _ = writeln!(stderr, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Err(CliError::PartialFailure { failed: outcome.failures.len() });
    }
    Ok(())
}

/// Runs a validated configuration, writing data to `cfg.out` or `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    qrabi_core::linalg::use_sequential_kernels();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    match cfg.command {
        Command::Validate => {
            let report = pool.install(|| validate::run_validation(cfg));
            write_text(cfg.out.as_deref(), &report.to_json(), stdout)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Validation(report.failed().join(", ")))
            }
        }
        Command::Reproduce => emit(cfg, &pool.install(|| commands::reproduce(cfg))?, stdout, stderr),
        _ => {
            let outcome = pool.install(|| commands::execute(cfg, &config::name_of(&cfg.command)))?;
            emit(cfg, &outcome, stdout, stderr)
        }
    }
}

/// Full entry point: parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let result = cli.into_config().and_then(|cfg| run(&cfg, stdout, stderr));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
