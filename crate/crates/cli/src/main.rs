//! `rosenau`: classify regimes, solve for solitary-wave profiles, sweep
//! speeds, run the validation suite and evolve profiles in time.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid parameters or
//! arguments, 3 not converged (files still written), 4 resonant
//! wavenumber, 5 validation failure.

mod commands;
mod config;
mod io;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{parse_family, parse_list, parse_nonlinearity, parse_range, Format, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_RESONANT: u8 = 4;
pub const EXIT_VALIDATION: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "rosenau", version, about = "Solitary waves of Rosenau-type equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regime, coercivity and predicted wave types for one or more speeds.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        speeds: SpeedArgs,
    },
    /// Petviashvili solve: profile.csv, trace.csv and report.json.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_negative_numbers = true)]
        cs: Option<f64>,
        /// Report the distance to the matching closed-form wave.
        #[arg(long)]
        compare_exact: bool,
    },
    /// Independent solves over a list of speeds.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        speeds: SpeedArgs,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Solve speeds that fail the coercivity condition.
        #[arg(long)]
        force: bool,
    },
    /// Closed-form benchmarks and invariant checks.
    Validate {
        /// Coarse grid (L = 50, N = 256) with looser tolerances.
        #[arg(long)]
        quick: bool,
        /// Machine-readable verdicts on stdout.
        #[arg(long)]
        json: bool,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Time propagation of a profile.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Speed of the wave; solved for when no --input is given.
        #[arg(long, allow_negative_numbers = true)]
        cs: Option<f64>,
        /// Initial profile in the profile CSV format.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "t-final", visible_alias = "T")]
        t_final: Option<f64>,
        #[arg(long)]
        record_every: Option<usize>,
    },
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// JSON run configuration; inline flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// quadratic, power:P, cubic-quintic:R, sum:C^D,... or derivative:A:B:M:S.
    #[arg(long, value_name = "SPEC")]
    nonlinearity: Option<String>,
    /// Half-length L of the periodic domain [-L, L).
    #[arg(short = 'L', long = "half-length")]
    half_length: Option<f64>,
    /// Number of nodes N (a power of two).
    #[arg(short = 'N', long = "nodes")]
    nodes: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// auto, sech2, sech4:A:w, gaussian:A:w or file:PATH.
    #[arg(long)]
    guess: Option<String>,
    #[arg(long)]
    allow_resonance: bool,
    #[arg(long)]
    resonance_tol: Option<f64>,
    #[arg(long)]
    dealias: bool,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug, Default)]
struct SpeedArgs {
    #[arg(long, allow_negative_numbers = true)]
    cs: Option<f64>,
    /// START:END:STEP, inclusive.
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    cs_range: Option<String>,
    /// Comma-separated speeds.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    cs_list: Option<String>,
}

impl CommonArgs {
    fn resolve(&self, command: &str) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.command = command.to_string();
        if let Some(f) = &self.family {
            cfg.family = Some(parse_family(f)?);
        }
        let p = &mut cfg.params;
        for (slot, value) in [
            (&mut p.alpha, self.alpha),
            (&mut p.beta, self.beta),
            (&mut p.gamma, self.gamma),
            (&mut p.epsilon, self.epsilon),
            (&mut p.eta, self.eta),
        ] {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(n) = &self.nonlinearity {
            cfg.nonlinearity = parse_nonlinearity(n)?;
        }
        if let Some(l) = self.half_length {
            cfg.grid.half_length = l;
        }
        if let Some(n) = self.nodes {
            cfg.grid.nodes = n;
        }
        let s = &mut cfg.solver;
        if self.nu.is_some() {
            s.nu = self.nu;
        }
        if let Some(t) = self.tol {
            s.tol = t;
        }
        if let Some(m) = self.max_iter {
            s.max_iter = m;
        }
        if let Some(g) = &self.guess {
            s.guess = g.clone();
        }
        s.allow_resonance |= self.allow_resonance;
        if self.resonance_tol.is_some() {
            s.resonance_tol = self.resonance_tol;
        }
        s.dealias |= self.dealias;
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        cfg.svg |= self.svg;
        Ok(cfg)
    }
}

impl SpeedArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if self.cs.is_some() || self.cs_range.is_some() || self.cs_list.is_some() {
            cfg.speeds.cs = self.cs;
            cfg.speeds.range = self.cs_range.as_deref().map(parse_range).transpose()?;
            cfg.speeds.list = self.cs_list.as_deref().map(parse_list).transpose()?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify { common, speeds } => {
            let mut cfg = common.resolve("classify")?;
            speeds.apply(&mut cfg)?;
            commands::classify(&cfg)
        }
        Command::Solve { common, cs, compare_exact } => {
            let mut cfg = common.resolve("solve")?;
            if cs.is_some() {
                cfg.speeds.cs = cs;
            }
            cfg.compare_exact |= compare_exact;
            commands::solve(&cfg)
        }
        Command::Sweep { common, speeds, jobs, force } => {
            let mut cfg = common.resolve("sweep")?;
            speeds.apply(&mut cfg)?;
            if jobs.is_some() {
                cfg.jobs = jobs;
            }
            cfg.force |= force;
            commands::sweep(&cfg)
        }
        Command::Validate { quick, json, out } => commands::validate(quick, json, out.as_deref()),
        Command::Evolve { common, cs, input, dt, t_final, record_every } => {
            let mut cfg = common.resolve("evolve")?;
            if cs.is_some() {
                cfg.speeds.cs = cs;
            }
            if input.is_some() {
                cfg.evolve.input = input;
            }
            if let Some(dt) = dt {
                cfg.evolve.dt = dt;
            }
            if let Some(t) = t_final {
                cfg.evolve.t_final = t;
            }
            if let Some(r) = record_every {
                cfg.evolve.record_every = r;
            }
            commands::evolve_cmd(&cfg)
        }
    }
}

/// Exit code for an error that escaped a command.
fn exit_code(err: &anyhow::Error) -> u8 {
    use rosenau_core::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::ResonantWavenumber { .. }) => EXIT_RESONANT,
        Some(E::NotConverged { .. }) => EXIT_NOT_CONVERGED,
        Some(
            E::InvalidParams(_)
            | E::InvalidNonlinearity(_)
            | E::InvalidGrid(_)
            | E::InvalidArgument(_)
            | E::UnsupportedPattern { .. }
            | E::ConstraintViolated(_)
            | E::DegenerateSpeed { .. }
            | E::ExponentRequired
            | E::StepTooLarge { .. },
        ) => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
