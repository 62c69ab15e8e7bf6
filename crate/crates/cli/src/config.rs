use crate::error::CliError;
use clap::{Args, ValueEnum};
use qmvop::families::LqjParams;
use qmvop::lqj::LqjPipelineParams;
use qmvop::qsu2::Qsu2Params;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

pub const MAX_TOL: f64 = 1e-2;
pub const GRAM_CAP: usize = 10;
pub const DEPTH_CAP: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Five-term operator on the little q-Jacobi lattice.
    Lqj,
    /// Quantum SU(2) example with parameters (σ, τ, φ).
    Qsu2,
    /// Scalar little q-Jacobi polynomials and the unfolded five-term sequence.
    Scalar,
    /// Constant coefficients aₙ ≡ a, bₙ ≡ b, cₙ ≡ 0.
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Lqj => "lqj",
            Family::Qsu2 => "qsu2",
            Family::Scalar => "scalar",
            Family::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    #[arg(long, value_enum, default_value_t = Family::Lqj)]
    pub family: Family,
    /// Base q in (0, 1). Default 0.5, or 0.6 for qsu2.
    #[arg(long)]
    pub q: Option<f64>,
    /// Default 0.3 (lqj, scalar) or 0.5 (custom).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Default 0.4 (lqj, scalar) or 0 (custom).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Default 0.5.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Default 0.2.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Default 0.3.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Recurrence depth N.
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Pass threshold for checks, in (0, 1e-2]. Quadrature runs at tol/100.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// A point count, or a comma-separated list of points.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Lqj(LqjPipelineParams),
    Qsu2 { input: [f64; 4], params: Qsu2Params },
    Scalar(LqjParams),
    Custom { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Count(usize),
    Points(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: Family,
    pub params: Params,
    pub n_max: usize,
    pub tol: f64,
    pub grid: Grid,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn reject(family: Family, flags: &[(&str, Option<f64>)]) -> Result<(), CliError> {
    match flags.iter().find(|(_, v)| v.is_some()) {
        Some((name, _)) => Err(CliError::Usage(format!("--{name} does not apply to family {}", family.name()))),
        None => Ok(()),
    }
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} = {v} must be finite")))
    }
}

fn parse_grid(s: Option<&str>) -> Result<Grid, CliError> {
    let Some(s) = s else { return Ok(Grid::Count(10)) };
    let s = s.trim();
    if !s.contains(',') {
        if let Ok(n) = s.parse::<usize>() {
            return if n == 0 {
                Err(CliError::Usage("--grid count must be at least 1".into()))
            } else {
                Ok(Grid::Count(n))
            };
        }
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("--grid entry '{}' is not a finite number", p.trim())))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Grid::Points)
}

impl RunConfig {
    pub fn from_opts(o: &Opts) -> Result<Self, CliError> {
        if !(o.tol > 0.0 && o.tol <= MAX_TOL) {
            return Err(CliError::Usage(format!("--tol = {} must lie in (0, {MAX_TOL}]", o.tol)));
        }
        let f = o.family;
        let params = match f {
            Family::Lqj | Family::Scalar => {
                reject(f, &[("sigma", o.sigma), ("tau", o.tau), ("phi", o.phi)])?;
                let q = finite("q", o.q.unwrap_or(0.5))?;
                let a = finite("a", o.a.unwrap_or(0.3))?;
                let b = finite("b", o.b.unwrap_or(0.4))?;
                if f == Family::Lqj {
                    Params::Lqj(LqjPipelineParams::new(q, a, b)?)
                } else {
                    Params::Scalar(LqjParams::new(q, a, b)?)
                }
            }
            Family::Qsu2 => {
                reject(f, &[("a", o.a), ("b", o.b)])?;
                let input = [
                    finite("q", o.q.unwrap_or(0.6))?,
                    finite("sigma", o.sigma.unwrap_or(0.5))?,
                    finite("tau", o.tau.unwrap_or(0.2))?,
                    finite("phi", o.phi.unwrap_or(0.3))?,
                ];
                let params = Qsu2Params::new(input[0], input[1], input[2], input[3])?;
                Params::Qsu2 { input, params }
            }
            Family::Custom => {
                reject(f, &[("q", o.q), ("sigma", o.sigma), ("tau", o.tau), ("phi", o.phi)])?;
                let a = finite("a", o.a.unwrap_or(0.5))?;
                if a == 0.0 {
                    return Err(CliError::Usage("--a must be nonzero for family custom (A_n would be singular)".into()));
                }
                Params::Custom { a, b: finite("b", o.b.unwrap_or(0.0))? }
            }
        };
        Ok(RunConfig {
            family: f,
            params,
            n_max: o.n_max,
            tol: o.tol,
            grid: parse_grid(o.grid.as_deref())?,
            format: o.format,
            out: o.out.clone(),
        })
    }

    pub fn require_depth(&self, cap: usize) -> Result<(), CliError> {
        if self.n_max > cap {
            Err(CliError::Usage(format!("--n-max = {} exceeds the cap {cap} for this command", self.n_max)))
        } else {
            Ok(())
        }
    }

    pub fn params_json(&self) -> Value {
        match &self.params {
            Params::Lqj(p) => json!({ "q": p.q.value(), "a": p.a, "b": p.b }),
            Params::Scalar(p) => json!({ "q": p.q.value(), "a": p.a, "b": p.b }),
            Params::Qsu2 { input, params } => json!({
                "q": params.q.value(),
                "sigma": params.sigma,
                "tau": params.tau,
                "phi": params.phi,
                "input": { "sigma": input[1], "tau": input[2], "phi": input[3] },
            }),
            Params::Custom { a, b } => json!({ "a": a, "b": b }),
        }
    }
}
