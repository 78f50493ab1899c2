use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;
use tunnelwell::Potential;

use crate::error::CliError;

/// Top-level run configuration, read from a JSON file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    #[serde(default)]
    pub command: CommandBlocks,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Quartic {
        v0: f64,
        #[serde(default)]
        eta: f64,
    },
    Parabolic {
        v0: f64,
        #[serde(default)]
        eta: f64,
    },
    Expr {
        expr: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
        window: [f64; 2],
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandBlocks {
    pub sweep: Option<SweepSpec>,
    pub exact_compare: Option<ExactSpec>,
    pub zeno: Option<ZenoSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl RangeSpec {
    /// min, min + step, … up to max (inclusive within rounding).
    pub fn values(&self, key: &str) -> Result<Vec<f64>, CliError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(CliError::Config(format!(
                "`{key}`: need finite min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(CliError::Config(format!(
                "`{key}.step` must be positive, got {}",
                self.step
            )));
        }
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.min + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub eta: RangeSpec,
    /// Barrier scales for built-in families; one output table each.
    pub v0: Option<Vec<f64>>,
    /// Parameter swept for expression potentials.
    #[serde(default = "default_param")]
    pub param: String,
}

fn default_param() -> String {
    "eta".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSpec {
    pub v0: RangeSpec,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: f64,
}

fn default_n() -> usize {
    tunnelwell::exact::DEFAULT_N
}

fn default_m() -> f64 {
    tunnelwell::exact::DEFAULT_M
}

/// Schedule in units of the transfer time T = πħ/(2ν₀).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZenoSpec {
    /// Overrides the amplitude computed from the potential.
    pub nu0: Option<f64>,
    #[serde(default = "default_nu_ratio")]
    pub nu1_over_nu0: f64,
    #[serde(default = "default_t0")]
    pub t0_over_transfer: f64,
    #[serde(default = "default_t1")]
    pub t1_over_t0: f64,
    #[serde(default = "one")]
    pub horizon_over_transfer: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for ZenoSpec {
    fn default() -> Self {
        Self {
            nu0: None,
            nu1_over_nu0: default_nu_ratio(),
            t0_over_transfer: default_t0(),
            t1_over_t0: default_t1(),
            horizon_over_transfer: one(),
            samples: default_samples(),
        }
    }
}

fn default_nu_ratio() -> f64 {
    0.005
}

fn default_t0() -> f64 {
    1.0 / 16.0
}

fn default_t1() -> f64 {
    1.0 / 8.0
}

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub prefix: Option<String>,
    #[serde(default)]
    pub emit_plot_script: bool,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential, CliError> {
        Ok(match self {
            PotentialSpec::Quartic { v0, eta } => Potential::quartic(*v0, *eta)?,
            PotentialSpec::Parabolic { v0, eta } => Potential::parabolic(*v0, *eta)?,
            PotentialSpec::Expr { expr, params, window } => {
                let b: HashMap<String, f64> = params.clone().into_iter().collect();
                Potential::custom(expr, b, (window[0], window[1])).map_err(|e| match e {
                    tunnelwell::Error::Parse(p) => CliError::Config(format!("`potential.expr`: {p}")),
                    other => other.into(),
                })?
            }
        })
    }

    /// Same family with v0 and/or the swept parameter replaced.
    pub fn with(&self, v0: Option<f64>, param: &str, value: f64) -> PotentialSpec {
        match self.clone() {
            PotentialSpec::Quartic { v0: v, .. } => PotentialSpec::Quartic {
                v0: v0.unwrap_or(v),
                eta: value,
            },
            PotentialSpec::Parabolic { v0: v, .. } => PotentialSpec::Parabolic {
                v0: v0.unwrap_or(v),
                eta: value,
            },
            PotentialSpec::Expr {
                expr,
                mut params,
                window,
            } => {
                params.insert(param.to_string(), value);
                PotentialSpec::Expr { expr, params, window }
            }
        }
    }

    pub fn with_v0(&self, v0: f64) -> Result<PotentialSpec, CliError> {
        match self {
            PotentialSpec::Quartic { eta, .. } => Ok(PotentialSpec::Quartic { v0, eta: *eta }),
            PotentialSpec::Parabolic { eta, .. } => Ok(PotentialSpec::Parabolic { v0, eta: *eta }),
            PotentialSpec::Expr { .. } => Err(CliError::Config(
                "a V0 range needs `potential.kind` quartic or parabolic".into(),
            )),
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, PotentialSpec::Expr { .. })
    }

    /// η for built-ins, the `eta` binding for expressions if there is one.
    pub fn eta(&self) -> Option<f64> {
        match self {
            PotentialSpec::Quartic { eta, .. } | PotentialSpec::Parabolic { eta, .. } => Some(*eta),
            PotentialSpec::Expr { params, .. } => params.get("eta").copied(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PotentialSpec::Quartic { v0, eta } => format!(
                "quartic v0={} eta={}",
                crate::output::fmt(*v0),
                crate::output::fmt(*eta)
            ),
            PotentialSpec::Parabolic { v0, eta } => format!(
                "parabolic v0={} eta={}",
                crate::output::fmt(*v0),
                crate::output::fmt(*eta)
            ),
            PotentialSpec::Expr { expr, params, window } => {
                let p: Vec<String> = params
                    .iter()
                    .map(|(k, v)| format!("{k}={}", crate::output::fmt(*v)))
                    .collect();
                format!(
                    "expr \"{expr}\" {} window=[{}, {}]",
                    p.join(" "),
                    crate::output::fmt(window[0]),
                    crate::output::fmt(window[1])
                )
            }
        }
    }
}
