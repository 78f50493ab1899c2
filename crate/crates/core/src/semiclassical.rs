//! Semiclassical tunneling amplitude of an asymmetric double well.
//!
//! Each half of the potential, cut at the barrier top, is reflected into a
//! symmetric double well. The instanton amplitudes ν_L and ν_R of the two
//! reflected wells combine into ν = A·√(ν_L ν_R), where the asymmetry factor
//! A depends only on how far each localized level sits below the barrier.

use std::f64::consts::PI;

use crate::diagnostics::Warning;
use crate::error::{Error, Result};
use crate::numerics::{brent, try_integrate, Quadrature};
use crate::potential::{characterize, characterize_with, Potential, Side, Strictness, WellGeometry, HBAR, MASS};

/// Tolerance of the action integral.
pub const ACTION_TOL: f64 = 1e-10;
/// Tolerance of the prefactor integral for noise-free potentials.
pub const PREFACTOR_TOL: f64 = 1e-10;
/// Tolerance of the prefactor integral when the rise carries rounding noise.
pub const NOISY_PREFACTOR_TOL: f64 = 1e-8;
/// Relative rounding level of the rise at the start of the noisy prefactor
/// quadrature.
const NOISY_RISE_REL: f64 = 1e-10;

/// One half of a double well, read as the symmetric well obtained by
/// reflecting it about the barrier top.
///
/// The reflection is never built: integrals over the full symmetric well
/// fold onto the half between the minimum and the barrier top.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricWell<'a> {
    potential: &'a Potential,
    geometry: &'a WellGeometry,
    side: Side,
}

impl<'a> SymmetricWell<'a> {
    pub fn new(potential: &'a Potential, geometry: &'a WellGeometry, side: Side) -> Result<Self> {
        let w = Self {
            potential,
            geometry,
            side,
        };
        let a = w.a();
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidWell(format!("barrier-to-minimum distance {a}")));
        }
        if !(w.omega().is_finite() && w.omega() > 0.0) {
            return Err(Error::InvalidWell(format!("frequency {}", w.omega())));
        }
        if !(w.v_top() > w.v_min()) {
            return Err(Error::InvalidWell(format!(
                "barrier top {} is not above the minimum {}",
                w.v_top(),
                w.v_min()
            )));
        }
        Ok(w)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Distance from the barrier top to the minimum.
    pub fn a(&self) -> f64 {
        self.geometry.half_width(self.side)
    }

    pub fn omega(&self) -> f64 {
        self.geometry.omega(self.side)
    }

    pub fn v_min(&self) -> f64 {
        self.geometry.v_min(self.side)
    }

    pub fn v_top(&self) -> f64 {
        self.geometry.v_top
    }

    /// Localized level V_min + ħω/2.
    pub fn eps(&self) -> f64 {
        self.geometry.eps(self.side)
    }

    /// Half potential at distance `x` from the barrier top, 0 ≤ x ≤ a.
    pub fn half_potential(&self, x: f64) -> Result<f64> {
        Ok(self.v_min() + self.rise(self.a() - x)?)
    }

    /// V − V_min at distance `h` from the minimum toward the barrier.
    pub fn rise(&self, h: f64) -> Result<f64> {
        self.potential.rise_from_minimum(self.geometry, self.side, h)
    }

    fn noise(&self) -> f64 {
        self.potential.rise_noise(self.geometry)
    }
}

/// Classical turning point on the barrier flank of `side`: the position
/// between a_s and a_C where V = ε.
pub fn turning_point(p: &Potential, energy: f64, side: Side) -> Result<f64> {
    let g = characterize_with(p, Strictness::Lenient)?;
    turning_point_in(p, &g, energy, side)
}

fn turning_point_in(p: &Potential, g: &WellGeometry, energy: f64, side: Side) -> Result<f64> {
    if !(energy > g.v_min(side) && energy < g.v_top) {
        return Err(Error::NoTurningPoint { energy, side });
    }
    let well = SymmetricWell::new(p, g, side)?;
    let target = energy - g.v_min(side);
    let a = well.a();
    let tol = 1e-12 * a.max(g.minimum(side).abs()).max(1.0);
    let h = brent(|h| Ok::<_, Error>(well.rise(h)? - target), 0.0, a, tol)?.root;
    Ok(match side {
        Side::Left => g.a_l + h,
        Side::Right => g.a_r - h,
    })
}

/// S = 2∫₀^a √(2m[V − V_min]) over the half well, in units of ħ.
pub fn action_integral(w: &SymmetricWell) -> Result<f64> {
    let q = Quadrature::with_tolerance(ACTION_TOL, ACTION_TOL);
    let half = try_integrate(
        |h| Ok::<_, Error>((2.0 * MASS * w.rise(h)?.max(0.0)).sqrt()),
        0.0,
        w.a(),
        &q,
    )?;
    Ok(2.0 * half / HBAR)
}

/// C = ∫₀^a [mω/√(2m[V − V_min]) − 1/(a − x)] dx.
///
/// With a − x = a·u² the integrand becomes
/// g(u) = 2[mωa·u/√(2m·ΔV(a·u²)) − 1/u], which is odd in u and tends to 0
/// at u = 0 for a quadratic minimum.
pub fn prefactor_c(w: &SymmetricWell) -> Result<f64> {
    let a = w.a();
    let omega = w.omega();
    let g = |u: f64| -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        let dv = w.rise(a * u * u)?;
        if !(dv > 0.0) {
            return Err(crate::numerics::NumericsError::NonFiniteIntegrand { x: a * (1.0 - u * u) }.into());
        }
        let r = MASS * omega * a * u * u / (2.0 * MASS * dv).sqrt();
        let y = 2.0 * (r - 1.0) / u;
        if !y.is_finite() {
            return Err(crate::numerics::NumericsError::NonFiniteIntegrand { x: a * (1.0 - u * u) }.into());
        }
        Ok(y)
    };

    let noise = w.noise();
    if noise == 0.0 {
        let q = Quadrature::with_tolerance(PREFACTOR_TOL, PREFACTOR_TOL);
        return try_integrate(g, 0.0, 1.0, &q);
    }

    // Below u0 the subtraction V − V_min is dominated by rounding; replace g
    // there by the odd fit αu + βu³ through g(u0) and g(2u0).
    let dv0 = noise / NOISY_RISE_REL;
    let u0 = (2.0 * dv0 / (MASS * omega * omega * a * a)).powf(0.25).min(0.05);
    let (g1, g2) = (g(u0)?, g(2.0 * u0)?);
    let beta = (g2 - 2.0 * g1) / (6.0 * u0.powi(3));
    let alpha = (g1 - beta * u0.powi(3)) / u0;
    let head = 0.5 * alpha * u0 * u0 + 0.25 * beta * u0.powi(4);
    let q = Quadrature::with_tolerance(NOISY_PREFACTOR_TOL, NOISY_PREFACTOR_TOL);
    Ok(head + try_integrate(g, u0, 1.0, &q)?)
}

/// Parts of the instanton amplitude of one symmetric well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricAmplitude {
    pub nu: f64,
    pub action: f64,
    pub prefactor: f64,
}

/// ν = ħω·√(mωa²/πħ)·e^C·e^(−S/ħ).
pub fn symmetric_amplitude(w: &SymmetricWell) -> Result<f64> {
    Ok(symmetric_parts(w)?.nu)
}

pub fn symmetric_parts(w: &SymmetricWell) -> Result<SymmetricAmplitude> {
    let action = action_integral(w)?;
    let prefactor = prefactor_c(w)?;
    let omega = w.omega();
    let a = w.a();
    let nu = HBAR * omega * (MASS * omega * a * a / (PI * HBAR)).sqrt() * prefactor.exp() * (-action).exp();
    Ok(SymmetricAmplitude { nu, action, prefactor })
}

/// A = ½[r + 1/r] with r = ((V_top − ε_L)/(V_top − ε_R))^(1/4).
pub fn asymmetry_factor(g: &WellGeometry) -> Result<f64> {
    if g.eps_l == g.eps_r {
        return Ok(1.0);
    }
    for side in [Side::Left, Side::Right] {
        if g.eps(side) >= g.v_top {
            return Err(Error::LevelAboveBarrier {
                level: g.eps(side),
                v_top: g.v_top,
                side,
            });
        }
    }
    let r = ((g.v_top - g.eps_l) / (g.v_top - g.eps_r)).powf(0.25);
    Ok(0.5 * (r + 1.0 / r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunnelingResult {
    pub nu_l: f64,
    pub nu_r: f64,
    /// Asymmetry factor A.
    pub a: f64,
    pub nu: f64,
    /// ε_L − ε_R.
    pub delta_eps: f64,
    /// Ω with ħΩ = 2√((Δε/2)² + ν²).
    pub omega_rabi: f64,
    pub s_l: f64,
    pub s_r: f64,
    pub c_l: f64,
    pub c_r: f64,
    pub geometry: WellGeometry,
    pub warnings: Vec<Warning>,
}

pub fn tunneling_amplitude(p: &Potential) -> Result<TunnelingResult> {
    tunneling_amplitude_with(p, Strictness::Strict)
}

/// As [`tunneling_amplitude`]; `Lenient` lets the resonance regime through
/// with a warning.
pub fn tunneling_amplitude_with(p: &Potential, strictness: Strictness) -> Result<TunnelingResult> {
    let g = characterize_with(p, strictness)?;
    tunneling_from_geometry(p, g)
}

pub fn tunneling_from_geometry(p: &Potential, g: WellGeometry) -> Result<TunnelingResult> {
    let left = symmetric_parts(&SymmetricWell::new(p, &g, Side::Left)?)?;
    let right = symmetric_parts(&SymmetricWell::new(p, &g, Side::Right)?)?;
    let a = asymmetry_factor(&g)?;
    let nu = a * (left.nu * right.nu).sqrt();
    let delta_eps = g.delta_eps();
    let omega_rabi = 2.0 * ((0.5 * delta_eps).powi(2) + nu * nu).sqrt() / HBAR;
    let mut warnings = g.warnings.clone();
    if g.cusp {
        warnings.push(Warning::CuspBarrier);
    }
    Ok(TunnelingResult {
        nu_l: left.nu,
        nu_r: right.nu,
        a,
        nu,
        delta_eps,
        omega_rabi,
        s_l: left.action,
        s_r: right.action,
        c_l: left.prefactor,
        c_r: right.prefactor,
        geometry: g,
        warnings,
    })
}

/// Barrier-top decay rate k_s(0) = √(2m(V_top − ε_s)).
fn barrier_k(g: &WellGeometry, side: Side) -> Result<f64> {
    let d = g.v_top - g.eps(side);
    if !(d > 0.0) {
        return Err(Error::LevelAboveBarrier {
            level: g.eps(side),
            v_top: g.v_top,
            side,
        });
    }
    Ok((2.0 * MASS * d).sqrt())
}

/// ν = (ħ²/2m)[φ_L φ_R′ − φ_R φ_L′] at the barrier top.
///
/// Each φ_s is normalized so that its own reflected symmetric well returns
/// ν_s = (ħ²/m)·k_s(0)·φ_s(0)², and the slopes follow from φ_s′(0) = ±k_s(0)φ_s(0)/ħ.
pub fn herring_amplitude(p: &Potential) -> Result<f64> {
    let g = characterize(p)?;
    let nu_l = symmetric_amplitude(&SymmetricWell::new(p, &g, Side::Left)?)?;
    let nu_r = symmetric_amplitude(&SymmetricWell::new(p, &g, Side::Right)?)?;
    let (k_l, k_r) = (barrier_k(&g, Side::Left)?, barrier_k(&g, Side::Right)?);
    let phi_l = (MASS * nu_l / (HBAR * HBAR * k_l)).sqrt();
    let phi_r = (MASS * nu_r / (HBAR * HBAR * k_r)).sqrt();
    Ok(herring_combination(
        phi_l,
        -k_l * phi_l / HBAR,
        phi_r,
        k_r * phi_r / HBAR,
    ))
}

fn herring_combination(phi_l: f64, dphi_l: f64, phi_r: f64, dphi_r: f64) -> f64 {
    HBAR * HBAR / (2.0 * MASS) * (phi_l * dphi_r - phi_r * dphi_l)
}

/// Herring combination with the barrier wavefunctions
/// φ_s(x) = √(mω_s/(2πe·k_s(x)))·exp(−∫ k_s/ħ) taken from the turning point
/// to x, i.e. without matching to the instanton amplitude.
pub fn wkb_amplitude(p: &Potential) -> Result<f64> {
    let g = characterize(p)?;
    let mut phi = [0.0; 2];
    let mut k0 = [0.0; 2];
    for (i, side) in [Side::Left, Side::Right].into_iter().enumerate() {
        let eps = g.eps(side);
        let k = barrier_k(&g, side)?;
        let xt = turning_point_in(p, &g, eps, side)?;
        let (lo, hi) = if xt < g.a_c { (xt, g.a_c) } else { (g.a_c, xt) };
        let q = Quadrature::with_tolerance(ACTION_TOL, ACTION_TOL);
        let exponent = try_integrate(
            |x| Ok::<_, Error>((2.0 * MASS * (p.value(x)? - eps).max(0.0)).sqrt()),
            lo,
            hi,
            &q,
        )?;
        let omega = g.omega(side);
        phi[i] = (MASS * omega / (2.0 * PI * std::f64::consts::E * k)).sqrt() * (-exponent / HBAR).exp();
        k0[i] = k;
    }
    Ok(herring_combination(
        phi[0],
        -k0[0] * phi[0] / HBAR,
        phi[1],
        k0[1] * phi[1] / HBAR,
    ))
}
