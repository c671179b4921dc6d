//! Run configuration: file values, inline overrides and the replayable echo.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rosenau_core::solver::Guess;
use rosenau_core::{EquationParams, EvolveConfig, FamilyTag, Grid, NonlinearitySpec, SolveConfig};
use serde::{Deserialize, Serialize};

use crate::io::read_profile;

pub const EFFECTIVE_CONFIG: &str = "effective-config.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamValues {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub eta: f64,
}

impl Default for ParamValues {
    fn default() -> Self {
        Self { alpha: 0.0, beta: 1.0, gamma: 0.0, epsilon: 1.0, eta: 0.0 }
    }
}

impl ParamValues {
    pub fn to_params(self) -> EquationParams {
        EquationParams::new(self.alpha, self.beta, self.gamma, self.epsilon, self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridValues {
    pub half_length: f64,
    pub nodes: usize,
}

impl Default for GridValues {
    fn default() -> Self {
        let g = Grid::default();
        Self { half_length: g.half_length(), nodes: g.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverValues {
    pub nu: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    /// `auto`, `sech2`, `sech4:A:w`, `gaussian:A:w` or `file:PATH`.
    pub guess: String,
    pub allow_resonance: bool,
    pub resonance_tol: Option<f64>,
    pub dealias: bool,
}

impl Default for SolverValues {
    fn default() -> Self {
        let d = SolveConfig::default();
        Self {
            nu: d.nu,
            tol: d.tol,
            max_iter: d.max_iter,
            guess: String::from("auto"),
            allow_resonance: d.allow_resonance,
            resonance_tol: d.resonance_tol,
            dealias: d.dealias,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Speeds {
    pub cs: Option<f64>,
    /// Inclusive `(start, end, step)`.
    pub range: Option<(f64, f64, f64)>,
    pub list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveValues {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    /// Initial profile in the profile CSV format; solved from `cs` when absent.
    pub input: Option<PathBuf>,
}

impl Default for EvolveValues {
    fn default() -> Self {
        let d = EvolveConfig::default();
        Self { dt: d.dt, t_final: 10.0, record_every: 1000, input: None }
    }
}

fn quadratic() -> NonlinearitySpec {
    NonlinearitySpec::QUADRATIC
}

/// Everything a command needs; written back as `effective-config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub family: Option<FamilyTag>,
    pub params: ParamValues,
    #[serde(default = "quadratic")]
    pub nonlinearity: NonlinearitySpec,
    pub grid: GridValues,
    pub solver: SolverValues,
    pub speeds: Speeds,
    pub evolve: EvolveValues,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub jobs: Option<usize>,
    pub force: bool,
    pub compare_exact: bool,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            family: None,
            params: ParamValues::default(),
            nonlinearity: quadratic(),
            grid: GridValues::default(),
            solver: SolverValues::default(),
            speeds: Speeds::default(),
            evolve: EvolveValues::default(),
            output: None,
            format: Format::Csv,
            jobs: None,
            force: false,
            compare_exact: false,
            svg: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn params(&self) -> EquationParams {
        self.params.to_params()
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.grid.half_length, self.grid.nodes)?)
    }

    pub fn solve_config(&self) -> Result<SolveConfig> {
        let s = &self.solver;
        Ok(SolveConfig {
            nu: s.nu,
            tol: s.tol,
            max_iter: s.max_iter,
            guess: parse_guess(&s.guess, self.grid.nodes)?,
            allow_resonance: s.allow_resonance,
            resonance_tol: s.resonance_tol,
            dealias: s.dealias,
        })
    }

    pub fn evolve_config(&self) -> EvolveConfig {
        EvolveConfig {
            dt: self.evolve.dt,
            t_final: self.evolve.t_final,
            record_every: self.evolve.record_every,
            dealias: self.solver.dealias,
            linear_only: false,
        }
    }

    /// Speeds in the order given; a range is expanded inclusively.
    pub fn speed_list(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        if let Some(cs) = self.speeds.cs {
            out.push(cs);
        }
        if let Some((start, end, step)) = self.speeds.range {
            out.extend(expand_range(start, end, step)?);
        }
        if let Some(list) = &self.speeds.list {
            out.extend(list.iter().copied());
        }
        if out.is_empty() {
            bail!("no wave speed given (use --cs, --cs-range or --cs-list)");
        }
        Ok(out)
    }

    pub fn write_effective(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(dir.join(EFFECTIVE_CONFIG), text + "\n")?;
        Ok(())
    }
}

/// `start..=end` in steps of `step`; the count is rounded so that
/// floating-point drift never drops the endpoint.
pub fn expand_range(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        bail!("invalid range {start}:{end}:{step}");
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn parse_range(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("range must be START:END:STEP, got {text:?}");
    }
    let num = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?} in range"));
    Ok((num(parts[0])?, num(parts[1])?, num(parts[2])?))
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad speed {s:?}")))
        .collect()
}

pub fn parse_family(text: &str) -> Result<FamilyTag> {
    FamilyTag::from_name(text).with_context(|| {
        let names: Vec<&str> = FamilyTag::ALL.iter().map(|t| t.name()).collect();
        format!("unknown family {text:?}; expected one of {}", names.join(", "))
    })
}

/// `power:P`, `cubic-quintic:R`, `sum:C^D,C^D,...` or `derivative:A:B:M:S`.
pub fn parse_nonlinearity(text: &str) -> Result<NonlinearitySpec> {
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let spec = match head {
        "quadratic" => NonlinearitySpec::QUADRATIC,
        "power" => NonlinearitySpec::SinglePower { p: rest.parse().context("power:P needs an integer P")? },
        "cubic-quintic" => NonlinearitySpec::CubicQuintic { r: rest.parse().context("cubic-quintic:R needs a number")? },
        "sum" => {
            let terms = rest
                .split(',')
                .map(|t| {
                    let (c, d) = t.split_once('^').with_context(|| format!("term {t:?} is not C^D"))?;
                    Ok((c.trim().parse::<f64>()?, d.trim().parse::<u32>()?))
                })
                .collect::<Result<Vec<_>>>()?;
            NonlinearitySpec::PowerSum { terms }
        }
        "derivative" => {
            let f: Vec<&str> = rest.split(':').collect();
            if f.len() != 4 {
                bail!("derivative form needs A:B:M:S");
            }
            NonlinearitySpec::DerivativeForm {
                a: f[0].parse()?,
                b: f[1].parse()?,
                m: f[2].parse()?,
                s: f[3].parse()?,
            }
        }
        _ => bail!("unknown nonlinearity {text:?}"),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn parse_guess(text: &str, nodes: usize) -> Result<Guess> {
    let parts: Vec<&str> = text.splitn(3, ':').collect();
    let pair = |kind: &str| -> Result<(f64, f64)> {
        if parts.len() != 3 {
            bail!("{kind} guess needs {kind}:AMPLITUDE:WIDTH");
        }
        Ok((parts[1].parse()?, parts[2].parse()?))
    };
    Ok(match parts[0] {
        "auto" => Guess::Auto,
        "sech2" => Guess::SechSquared,
        "sech4" => {
            let (amplitude, width) = pair("sech4")?;
            Guess::SechFourth { amplitude, width }
        }
        "gaussian" => {
            let (amplitude, width) = pair("gaussian")?;
            Guess::Gaussian { amplitude, width }
        }
        "file" => {
            let path = text.strip_prefix("file:").unwrap_or_default();
            let profile = read_profile(Path::new(path))?;
            if profile.u.len() != nodes {
                bail!("guess file has {} nodes, grid has {nodes}", profile.u.len());
            }
            Guess::Samples { values: profile.u }
        }
        other => bail!("unknown guess {other:?}"),
    })
}
