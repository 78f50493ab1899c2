use std::fmt;

use crate::potential::Side;

/// Non-fatal conditions attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Barrier height above the minimum does not exceed the well's quantum ħω.
    LocalizationViolated { side: Side, barrier: f64, quantum: f64 },
    /// |Δε| is at least 90% of the opposite well's quantum.
    NearResonance { ratio: f64 },
    /// Past the resonance boundary; only produced by lenient evaluation.
    Resonance { ratio: f64 },
    /// The barrier top is a cusp, so the smooth-maximum matching at the top
    /// is applied without its premise.
    CuspBarrier,
    /// The switching interval is shorter than the slowest well period.
    NonAdiabaticSchedule { t1: f64, period: f64 },
}

impl Warning {
    /// Short machine-readable tag used in CSV output.
    pub fn tag(&self) -> &'static str {
        match self {
            Warning::LocalizationViolated { side: Side::Left, .. } => "localization_L",
            Warning::LocalizationViolated { side: Side::Right, .. } => "localization_R",
            Warning::NearResonance { .. } => "near_resonance",
            Warning::Resonance { .. } => "resonance",
            Warning::CuspBarrier => "cusp",
            Warning::NonAdiabaticSchedule { .. } => "non_adiabatic",
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::LocalizationViolated { side, barrier, quantum } => write!(
                f,
                "{side:?} well is weakly localized: barrier {barrier} vs quantum {quantum}"
            ),
            Warning::NearResonance { ratio } => {
                write!(f, "level offset is {:.1}% of the resonance condition", 100.0 * ratio)
            }
            Warning::Resonance { ratio } => {
                write!(
                    f,
                    "resonance regime reached (offset ratio {ratio:.3}); two-level model invalid"
                )
            }
            Warning::CuspBarrier => write!(f, "barrier top is a cusp"),
            Warning::NonAdiabaticSchedule { t1, period } => {
                write!(f, "switching interval {t1} is shorter than the well period {period}")
            }
        }
    }
}

/// Join warning tags with `;` (empty string when there are none).
pub fn tags(warnings: &[Warning]) -> String {
    let mut v: Vec<&str> = warnings.iter().map(Warning::tag).collect();
    v.dedup();
    v.join(";")
}
