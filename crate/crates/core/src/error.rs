use thiserror::Error;

use crate::exprparser::{EvalError, ParseError};
use crate::numerics::NumericsError;
use crate::potential::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("asymmetry {eta} is outside the admissible range (must be below {bound})")]
    AsymmetryTooLarge { eta: f64, bound: f64 },
    #[error("potential is not a double well: found {count} stationary points in the window")]
    NotDoubleWell { count: usize },
    #[error("resonance regime: eps_L - eps_R = {delta_eps} reaches the {side:?} excitation quantum {quantum}")]
    ResonanceRegime { delta_eps: f64, side: Side, quantum: f64 },
    #[error("energy {energy} has no turning point on the {side:?} barrier flank")]
    NoTurningPoint { energy: f64, side: Side },
    #[error("localized level {level} on the {side:?} side is not below the barrier top {v_top}")]
    LevelAboveBarrier { level: f64, v_top: f64, side: Side },
    #[error("symmetric well is invalid: {0}")]
    InvalidWell(String),
    #[error("grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("grid [{x_min}, {x_max}] extends outside the potential window [{w_min}, {w_max}]")]
    GridOutsideWindow {
        x_min: f64,
        x_max: f64,
        w_min: f64,
        w_max: f64,
    },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("two-level parameters are invalid: {0}")]
    InvalidTwoLevel(String),
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),
}
