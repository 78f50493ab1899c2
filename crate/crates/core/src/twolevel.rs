//! Effective two-level dynamics of the lowest doublet.

use crate::diagnostics::Warning;
use crate::error::{Error, Result};
use crate::potential::{WellGeometry, HBAR};
use std::f64::consts::PI;

/// H = [[ε_L, −ν], [−ν, ε_R]] in the basis of the localized states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    pub eps_l: f64,
    pub eps_r: f64,
    pub nu: f64,
}

impl TwoLevelParams {
    pub fn new(eps_l: f64, eps_r: f64, nu: f64) -> Result<Self> {
        if !(eps_l.is_finite() && eps_r.is_finite()) {
            return Err(Error::InvalidTwoLevel(format!(
                "levels must be finite, got {eps_l}, {eps_r}"
            )));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidTwoLevel(format!("amplitude must be positive, got {nu}")));
        }
        Ok(Self { eps_l, eps_r, nu })
    }

    pub fn delta_eps(&self) -> f64 {
        self.eps_l - self.eps_r
    }

    /// √((Δε/2)² + ν²), half the gap.
    fn half_gap(&self) -> f64 {
        (0.5 * self.delta_eps()).hypot(self.nu)
    }
}

/// θ ∈ (0, π/4] with sin 2θ = ν/√(ν² + (Δε/2)²).
pub fn mixing_angle(p: &TwoLevelParams) -> f64 {
    0.5 * p.nu.atan2((0.5 * p.delta_eps()).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenlevels {
    pub e0: f64,
    pub e1: f64,
    /// Ω = (E₁ − E₀)/ħ.
    pub omega: f64,
}

/// Mean ∓ half-gap of the 2×2 Hamiltonian.
pub fn eigenlevels(p: &TwoLevelParams) -> Eigenlevels {
    let mean = 0.5 * (p.eps_l + p.eps_r);
    let half = p.half_gap();
    Eigenlevels {
        e0: mean - half,
        e1: mean + half,
        omega: 2.0 * half / HBAR,
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// P_R(t) = sin²2θ·sin²(Ωt/2), starting in the left state.
pub fn p_right(p: &TwoLevelParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let s2 = (2.0 * mixing_angle(p)).sin();
    let omega = eigenlevels(p).omega;
    Ok(s2 * s2 * (0.5 * omega * t).sin().powi(2))
}

/// dP_R/dt = sin²2θ·(Ω/2)·sin Ωt.
pub fn p_right_rate(p: &TwoLevelParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let s2 = (2.0 * mixing_angle(p)).sin();
    let omega = eigenlevels(p).omega;
    Ok(s2 * s2 * 0.5 * omega * (omega * t).sin())
}

/// Periodic amplitude: ν₀ for a time t₀, then ν₁ for t₁, repeated up to
/// `horizon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoSchedule {
    pub nu0: f64,
    pub nu1: f64,
    pub t0: f64,
    pub t1: f64,
    pub horizon: f64,
}

impl ZenoSchedule {
    /// `nu1 = nu0` and `t1 = t0` are accepted so the constant amplitude and
    /// equal blocks are expressible.
    pub fn new(nu0: f64, nu1: f64, t0: f64, t1: f64, horizon: f64) -> Result<Self> {
        for (name, v) in [("nu0", nu0), ("nu1", nu1), ("t0", t0), ("t1", t1), ("horizon", horizon)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if nu1 > nu0 {
            return Err(Error::InvalidSchedule(format!("nu1 = {nu1} exceeds nu0 = {nu0}")));
        }
        if t1 > t0 {
            return Err(Error::InvalidSchedule(format!("t1 = {t1} exceeds t0 = {t0}")));
        }
        Ok(Self {
            nu0,
            nu1,
            t0,
            t1,
            horizon,
        })
    }

    /// ν₁/ν₀ = 0.005, t₀ = T/16, t₁ = t₀/8 and horizon T = πħ/(2ν₀), the
    /// time the constant amplitude needs to empty the left well.
    pub fn reference(nu0: f64) -> Result<Self> {
        let t = transfer_time(nu0);
        let t0 = t / 16.0;
        Self::new(nu0, 0.005 * nu0, t0, t0 / 8.0, t)
    }

    pub fn period(&self) -> f64 {
        self.t0 + self.t1
    }

    /// ν(t).
    pub fn nu_at(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let (_, r) = self.split(t);
        Ok(if r < self.t0 { self.nu0 } else { self.nu1 })
    }

    fn split(&self, t: f64) -> (f64, f64) {
        let period = self.period();
        let k = (t / period).floor();
        let r = (t - k * period).clamp(0.0, period);
        (k, r)
    }

    /// [`Warning::NonAdiabaticSchedule`] when t₁ is shorter than the slowest
    /// well period 2π/min(ω_L, ω_R).
    pub fn adiabaticity(&self, g: &WellGeometry) -> Option<Warning> {
        let period = 2.0 * PI / g.omega_l.min(g.omega_r);
        (self.t1 < period).then_some(Warning::NonAdiabaticSchedule { t1: self.t1, period })
    }
}

/// πħ/(2ν₀).
pub fn transfer_time(nu0: f64) -> f64 {
    PI * HBAR / (2.0 * nu0)
}

/// ∫₀ᵗ ν(t′) dt′/ħ, summed block by block.
pub fn phase_integral(s: &ZenoSchedule, t: f64) -> Result<f64> {
    check_time(t)?;
    if s.nu1 == s.nu0 {
        return Ok(s.nu0 * t / HBAR);
    }
    let (k, r) = s.split(t);
    let full = k * (s.nu0 * s.t0 + s.nu1 * s.t1);
    let tail = s.nu0 * r.min(s.t0) + s.nu1 * (r - s.t0).max(0.0);
    Ok((full + tail) / HBAR)
}

/// P_L(t) = cos²(∫₀ᵗ ν/ħ) for degenerate levels.
pub fn zeno_probability(s: &ZenoSchedule, t: f64) -> Result<f64> {
    Ok(phase_integral(s, t)?.cos().powi(2))
}

/// P_L(t) = cos²(ν₀t/ħ).
pub fn constant_probability(nu0: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((nu0 * t / HBAR).cos().powi(2))
}
