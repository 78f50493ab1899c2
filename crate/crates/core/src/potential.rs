//! Double-well potentials and extraction of their skeleton.
//!
//! Units: ħ = m = 1 and the frequency of the symmetric reference well is 1,
//! so energies are in ħω and lengths in √(ħ/mω). Built-in families take the
//! dimensionless inputs V₀/ħω and η directly.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::diagnostics::Warning;
use crate::error::{Error, Result};
use crate::exprparser::{parse_with_params, Expr};
use crate::numerics::brent;

pub const HBAR: f64 = 1.0;
pub const MASS: f64 = 1.0;
/// Frequency of the symmetric reference well.
pub const OMEGA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Upper bound on η for the biased quartic: 8/(3√3).
pub fn quartic_eta_bound() -> f64 {
    8.0 / (3.0 * 3f64.sqrt())
}

/// V(x) = V₀{[(x/a)² − 1]² − 1 − η x/a} with V₀ = mω²a²/8.
#[derive(Debug, Clone, PartialEq)]
pub struct Quartic {
    v0: f64,
    eta: f64,
    a: f64,
}

impl Quartic {
    pub fn new(v0: f64, eta: f64) -> Result<Self> {
        check_v0(v0)?;
        check_quartic_eta(eta)?;
        let a = (8.0 * v0 / (MASS * OMEGA * OMEGA)).sqrt();
        Ok(Self { v0, eta, a })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Length scale a (minima at ±a when η = 0).
    pub fn a(&self) -> f64 {
        self.a
    }

    fn value(&self, x: f64) -> f64 {
        let u = x / self.a;
        let s = u * u - 1.0;
        self.v0 * (s * s - 1.0 - self.eta * u)
    }

    fn derivative(&self, x: f64) -> f64 {
        let u = x / self.a;
        self.v0 / self.a * (4.0 * u * u * u - 4.0 * u - self.eta)
    }

    fn second_derivative(&self, x: f64) -> f64 {
        let u = x / self.a;
        self.v0 / (self.a * self.a) * (12.0 * u * u - 4.0)
    }
}

/// Piecewise parabolic double well with degenerate localized levels:
/// V₀[(x/a + 1)² − 1] for x < 0 and V_η[(x/a_η − 1)² − 1] for x ≥ 0, with
/// ω_η = ω(1 − η), a_η/a = √(1 − ηħω/2V₀)/(1 − η), V_η = mω_η²a_η²/2.
#[derive(Debug, Clone, PartialEq)]
pub struct Parabolic {
    v0: f64,
    eta: f64,
    a: f64,
    a_eta: f64,
    omega_eta: f64,
    v_eta: f64,
}

impl Parabolic {
    pub fn new(v0: f64, eta: f64) -> Result<Self> {
        check_v0(v0)?;
        if !eta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: "must be finite".into(),
            });
        }
        // ω_η > 0 needs η < 1 on top of the barrier condition η < 2V₀/ħω.
        let bound = (2.0 * v0 / (HBAR * OMEGA)).min(1.0);
        if eta >= bound {
            return Err(Error::AsymmetryTooLarge { eta, bound });
        }
        let a = (2.0 * v0 / (MASS * OMEGA * OMEGA)).sqrt();
        let omega_eta = OMEGA * (1.0 - eta);
        let a_eta = a * (1.0 - eta * HBAR * OMEGA / (2.0 * v0)).sqrt() / (1.0 - eta);
        // ½mω_η²a_η² reduces to V₀ − ηħω/2.
        let v_eta = v0 - 0.5 * eta * HBAR * OMEGA;
        Ok(Self {
            v0,
            eta,
            a,
            a_eta,
            omega_eta,
            v_eta,
        })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a_eta(&self) -> f64 {
        self.a_eta
    }

    pub fn omega_eta(&self) -> f64 {
        self.omega_eta
    }

    pub fn v_eta(&self) -> f64 {
        self.v_eta
    }

    /// (a_η ω_η / aω)² − 1 + (ħω/2V₀)(1 − ω_η/ω); zero when the two
    /// localized levels coincide.
    pub fn degeneracy_residual(&self) -> f64 {
        let r = self.a_eta * self.omega_eta / (self.a * OMEGA);
        r * r - 1.0 + HBAR * OMEGA / (2.0 * self.v0) * (1.0 - self.omega_eta / OMEGA)
    }

    fn value(&self, x: f64) -> f64 {
        if x < 0.0 {
            let u = x / self.a + 1.0;
            self.v0 * (u * u - 1.0)
        } else {
            let u = x / self.a_eta - 1.0;
            self.v_eta * (u * u - 1.0)
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        if x < 0.0 {
            2.0 * self.v0 / self.a * (x / self.a + 1.0)
        } else {
            2.0 * self.v_eta / self.a_eta * (x / self.a_eta - 1.0)
        }
    }

    fn second_derivative(&self, x: f64) -> f64 {
        if x < 0.0 {
            MASS * OMEGA * OMEGA
        } else {
            MASS * self.omega_eta * self.omega_eta
        }
    }
}

/// A parsed expression V(x; params) with bound parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomPotential {
    expr: Expr,
    bindings: HashMap<String, f64>,
    values: Vec<f64>,
    window: (f64, f64),
}

impl CustomPotential {
    pub fn new(text: &str, bindings: HashMap<String, f64>, window: (f64, f64)) -> Result<Self> {
        check_window(window)?;
        let mut declared: Vec<String> = bindings.keys().cloned().collect();
        declared.sort();
        let expr = parse_with_params(text, &declared)?;
        let values = expr.bind(&bindings)?;
        Ok(Self {
            expr,
            bindings,
            values,
            window,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn bindings(&self) -> &HashMap<String, f64> {
        &self.bindings
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.expr.eval_bound(x, &self.values)?)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        let h = 1e-6f64.max(1e-6 * x.abs());
        Ok((self.value(x + h)? - self.value(x - h)?) / (2.0 * h))
    }

    /// Wider step than the first derivative: the three-point second
    /// difference loses ε·|V|/h² to rounding.
    fn second_derivative(&self, x: f64) -> Result<f64> {
        let h = 1e-4f64.max(1e-4 * x.abs());
        Ok((self.value(x + h)? - 2.0 * self.value(x)? + self.value(x - h)?) / (h * h))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Quartic(Quartic),
    Parabolic(Parabolic),
    Custom(CustomPotential),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Quartic,
    Parabolic,
    Custom,
}

impl Potential {
    pub fn quartic(v0: f64, eta: f64) -> Result<Self> {
        Ok(Potential::Quartic(Quartic::new(v0, eta)?))
    }

    pub fn parabolic(v0: f64, eta: f64) -> Result<Self> {
        parabolic_family(v0, eta)
    }

    pub fn custom(text: &str, bindings: HashMap<String, f64>, window: (f64, f64)) -> Result<Self> {
        Ok(Potential::Custom(CustomPotential::new(text, bindings, window)?))
    }

    pub fn kind(&self) -> Kind {
        match self {
            Potential::Quartic(_) => Kind::Quartic,
            Potential::Parabolic(_) => Kind::Parabolic,
            Potential::Custom(_) => Kind::Custom,
        }
    }

    /// Named parameters, sorted by name for built-ins.
    pub fn parameters(&self) -> Vec<(String, f64)> {
        match self {
            Potential::Quartic(q) => vec![("eta".into(), q.eta), ("v0".into(), q.v0)],
            Potential::Parabolic(p) => vec![("eta".into(), p.eta), ("v0".into(), p.v0)],
            Potential::Custom(c) => {
                let mut v: Vec<_> = c.bindings.iter().map(|(k, v)| (k.clone(), *v)).collect();
                v.sort_by(|a, b| a.0.cmp(&b.0));
                v
            }
        }
    }

    /// Search window for stationary points; also bounds exact-solver grids.
    pub fn window(&self) -> (f64, f64) {
        match self {
            Potential::Quartic(q) => {
                let w = 4.0 * q.a + 40.0;
                (-w, w)
            }
            Potential::Parabolic(p) => {
                let sigma = (HBAR / (MASS * p.omega_eta.min(OMEGA))).sqrt();
                let w = 4.0 * p.a.max(p.a_eta) + 40.0 * sigma;
                (-w, w)
            }
            Potential::Custom(c) => c.window,
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        match self {
            Potential::Quartic(q) => Ok(q.value(x)),
            Potential::Parabolic(p) => Ok(p.value(x)),
            Potential::Custom(c) => c.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        match self {
            Potential::Quartic(q) => Ok(q.derivative(x)),
            Potential::Parabolic(p) => Ok(p.derivative(x)),
            Potential::Custom(c) => c.derivative(x),
        }
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        match self {
            Potential::Quartic(q) => Ok(q.second_derivative(x)),
            Potential::Parabolic(p) => Ok(p.second_derivative(x)),
            Potential::Custom(c) => c.second_derivative(x),
        }
    }

    /// V(a_s + h·dir) − V(a_s), where `dir` points from the minimum on
    /// `side` toward the barrier and 0 ≤ h ≤ |a_C − a_s|.
    ///
    /// Built-in families use a factored form with no cancellation near the
    /// minimum; custom potentials subtract and carry [`Self::rise_noise`].
    pub fn rise_from_minimum(&self, g: &WellGeometry, side: Side, h: f64) -> Result<f64> {
        let dir = match side {
            Side::Left => 1.0,
            Side::Right => -1.0,
        };
        match self {
            Potential::Quartic(q) => {
                let us = g.minimum(side) / q.a;
                let d = dir * h / q.a;
                Ok(q.v0 * d * d * ((6.0 * us * us - 2.0) + 4.0 * us * d + d * d))
            }
            Potential::Parabolic(p) => {
                let (v, a) = match side {
                    Side::Left => (p.v0, p.a),
                    Side::Right => (p.v_eta, p.a_eta),
                };
                let u = h / a;
                Ok(v * u * u)
            }
            Potential::Custom(c) => {
                let x = g.minimum(side) + dir * h;
                Ok(c.value(x)? - g.v_min(side))
            }
        }
    }

    /// Absolute rounding level of [`Self::rise_from_minimum`].
    pub fn rise_noise(&self, g: &WellGeometry) -> f64 {
        match self {
            Potential::Custom(_) => {
                let scale = g
                    .v_top
                    .abs()
                    .max(g.v_l_min.abs())
                    .max(g.v_r_min.abs())
                    .max(HBAR * OMEGA);
                64.0 * f64::EPSILON * scale
            }
            _ => 0.0,
        }
    }
}

fn check_v0(v0: f64) -> Result<()> {
    if !(v0.is_finite() && v0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "v0",
            reason: format!("barrier scale must be positive and finite, got {v0}"),
        });
    }
    Ok(())
}

fn check_quartic_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("quartic bias must be finite and non-negative, got {eta}"),
        });
    }
    let bound = quartic_eta_bound();
    if eta >= bound {
        return Err(Error::AsymmetryTooLarge { eta, bound });
    }
    Ok(())
}

fn check_window(w: (f64, f64)) -> Result<()> {
    if !(w.0.is_finite() && w.1.is_finite() && w.0 < w.1) {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("need finite x_min < x_max, got [{}, {}]", w.0, w.1),
        });
    }
    Ok(())
}

/// Stationary points of the biased quartic in units of a, ordered
/// (left minimum, maximum, right minimum).
pub fn quartic_stationary(eta: f64) -> Result<[f64; 3]> {
    check_quartic_eta(eta)?;
    if eta == 0.0 {
        return Ok([-1.0, 0.0, 1.0]);
    }
    let c = quartic_eta_bound();
    // (1/3)·arctan√((c/η)² − 1), written with atan2 so η = 0 is regular.
    let phase = (c * c - eta * eta).sqrt().atan2(eta) / 3.0;
    let root = |n: f64| 2.0 / 3f64.sqrt() * (2.0 * PI * n / 3.0 + phase).cos();
    Ok([root(1.0), root(2.0), root(0.0)])
}

/// (ω_L/ω, ω_R/ω) for the biased quartic: (ω_s/ω)² = (3/2)(a_s/a)² − 1/2.
pub fn quartic_frequencies(eta: f64) -> Result<(f64, f64)> {
    let [l, _, r] = quartic_stationary(eta)?;
    let f = |u: f64| (1.5 * u * u - 0.5).sqrt();
    Ok((f(l), f(r)))
}

/// The degenerate piecewise-parabolic family.
pub fn parabolic_family(v0: f64, eta: f64) -> Result<Potential> {
    Ok(Potential::Parabolic(Parabolic::new(v0, eta)?))
}

/// Skeleton of a double well.
#[derive(Debug, Clone, PartialEq)]
pub struct WellGeometry {
    pub a_l: f64,
    pub a_c: f64,
    pub a_r: f64,
    pub v_top: f64,
    pub v_l_min: f64,
    pub v_r_min: f64,
    pub omega_l: f64,
    pub omega_r: f64,
    pub eps_l: f64,
    pub eps_r: f64,
    /// √(ħ/mω_s), the grid-sizing length.
    pub sigma_l: f64,
    pub sigma_r: f64,
    /// Barrier top is a derivative discontinuity rather than a smooth maximum.
    pub cusp: bool,
    pub warnings: Vec<Warning>,
}

impl WellGeometry {
    pub fn minimum(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.a_l,
            Side::Right => self.a_r,
        }
    }

    pub fn v_min(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.v_l_min,
            Side::Right => self.v_r_min,
        }
    }

    pub fn omega(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.omega_l,
            Side::Right => self.omega_r,
        }
    }

    pub fn eps(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.eps_l,
            Side::Right => self.eps_r,
        }
    }

    pub fn sigma(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.sigma_l,
            Side::Right => self.sigma_r,
        }
    }

    /// Distance from the barrier top to the minimum on `side`.
    pub fn half_width(&self, side: Side) -> f64 {
        (self.a_c - self.minimum(side)).abs()
    }

    /// ε_L − ε_R.
    pub fn delta_eps(&self) -> f64 {
        self.eps_l - self.eps_r
    }

    /// |Δε| over the quantum of the well it approaches; 1 marks resonance.
    pub fn resonance_ratio(&self) -> f64 {
        let d = self.delta_eps();
        if d >= 0.0 {
            d / (HBAR * self.omega_r)
        } else {
            -d / (HBAR * self.omega_l)
        }
    }
}

/// How [`characterize_with`] treats the resonance condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Resonance is an error.
    #[default]
    Strict,
    /// Resonance becomes a [`Warning::Resonance`].
    Lenient,
}

/// Fraction of the resonance condition at which a warning is attached.
pub const NEAR_RESONANCE: f64 = 0.9;

/// Number of scan points for the custom stationary-point search.
pub const SCAN_POINTS: usize = 4096;

pub fn characterize(p: &Potential) -> Result<WellGeometry> {
    characterize_with(p, Strictness::Strict)
}

pub fn characterize_with(p: &Potential, strictness: Strictness) -> Result<WellGeometry> {
    let raw = match p {
        Potential::Quartic(q) => {
            let [l, c, r] = quartic_stationary(q.eta)?;
            let (wl, wr) = quartic_frequencies(q.eta)?;
            let (al, ac, ar) = (l * q.a, c * q.a, r * q.a);
            Skeleton {
                a_l: al,
                a_c: ac,
                a_r: ar,
                v_top: q.value(ac),
                v_l_min: q.value(al),
                v_r_min: q.value(ar),
                omega_l: wl * OMEGA,
                omega_r: wr * OMEGA,
                cusp: false,
            }
        }
        Potential::Parabolic(pp) => Skeleton {
            a_l: -pp.a,
            a_c: 0.0,
            a_r: pp.a_eta,
            v_top: 0.0,
            v_l_min: -pp.v0,
            v_r_min: -pp.v_eta,
            omega_l: OMEGA,
            omega_r: pp.omega_eta,
            cusp: true,
        },
        Potential::Custom(c) => scan_custom(c)?,
    };
    let mut g = raw.finish();
    if let Potential::Parabolic(_) = p {
        // Degenerate by construction: ε_R = −V_η + ħω_η/2 = −V₀ + ħω/2.
        g.eps_r = g.eps_l;
    }
    check_levels(&mut g, strictness)?;
    Ok(g)
}

struct Skeleton {
    a_l: f64,
    a_c: f64,
    a_r: f64,
    v_top: f64,
    v_l_min: f64,
    v_r_min: f64,
    omega_l: f64,
    omega_r: f64,
    cusp: bool,
}

impl Skeleton {
    fn finish(self) -> WellGeometry {
        WellGeometry {
            a_l: self.a_l,
            a_c: self.a_c,
            a_r: self.a_r,
            v_top: self.v_top,
            v_l_min: self.v_l_min,
            v_r_min: self.v_r_min,
            omega_l: self.omega_l,
            omega_r: self.omega_r,
            eps_l: self.v_l_min + 0.5 * HBAR * self.omega_l,
            eps_r: self.v_r_min + 0.5 * HBAR * self.omega_r,
            sigma_l: (HBAR / (MASS * self.omega_l)).sqrt(),
            sigma_r: (HBAR / (MASS * self.omega_r)).sqrt(),
            cusp: self.cusp,
            warnings: Vec::new(),
        }
    }
}

fn check_levels(g: &mut WellGeometry, strictness: Strictness) -> Result<()> {
    for side in [Side::Left, Side::Right] {
        let barrier = g.v_top - g.v_min(side);
        let quantum = HBAR * g.omega(side);
        if barrier <= quantum {
            g.warnings
                .push(Warning::LocalizationViolated { side, barrier, quantum });
        }
    }
    let ratio = g.resonance_ratio();
    if ratio >= 1.0 {
        match strictness {
            Strictness::Strict => {
                let d = g.delta_eps();
                let side = if d >= 0.0 { Side::Right } else { Side::Left };
                return Err(Error::ResonanceRegime {
                    delta_eps: d,
                    side,
                    quantum: HBAR * g.omega(side),
                });
            }
            Strictness::Lenient => g.warnings.push(Warning::Resonance { ratio }),
        }
    } else if ratio >= NEAR_RESONANCE {
        g.warnings.push(Warning::NearResonance { ratio });
    }
    Ok(())
}

fn scan_custom(c: &CustomPotential) -> Result<Skeleton> {
    let (lo, hi) = c.window;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + i as f64 * step).collect();
    let ds = xs.iter().map(|&x| c.derivative(x)).collect::<Result<Vec<_>>>()?;

    let mut stationary = Vec::new();
    for i in 0..SCAN_POINTS - 1 {
        let (d0, d1) = (ds[i], ds[i + 1]);
        if d0 == 0.0 {
            stationary.push(xs[i]);
        } else if d0.signum() != d1.signum() && d1 != 0.0 {
            let tol = 1e-12 * (1.0 + xs[i].abs());
            let r = brent(|x| c.derivative(x), xs[i], xs[i + 1], tol)?;
            stationary.push(r.root);
        }
    }
    if ds[SCAN_POINTS - 1] == 0.0 {
        stationary.push(xs[SCAN_POINTS - 1]);
    }
    if stationary.len() != 3 {
        return Err(Error::NotDoubleWell {
            count: stationary.len(),
        });
    }
    let (al, ac, ar) = (stationary[0], stationary[1], stationary[2]);
    let (kl, kc, kr) = (
        c.second_derivative(al)?,
        c.second_derivative(ac)?,
        c.second_derivative(ar)?,
    );
    if !(kl > 0.0 && kr > 0.0 && kc <= 0.0) {
        return Err(Error::NotDoubleWell { count: 3 });
    }
    let (v_top, v_l_min, v_r_min) = (c.value(ac)?, c.value(al)?, c.value(ar)?);
    if !(v_top > v_l_min && v_top > v_r_min) {
        return Err(Error::NotDoubleWell { count: 3 });
    }
    Ok(Skeleton {
        a_l: al,
        a_c: ac,
        a_r: ar,
        v_top,
        v_l_min,
        v_r_min,
        omega_l: (kl / MASS).sqrt(),
        omega_r: (kr / MASS).sqrt(),
        cusp: false,
    })
}

/// η at which the biased quartic with barrier scale `v0` reaches
/// ε_L = ε_R + ħω_R.
pub fn quartic_resonance_boundary(v0: f64) -> Result<f64> {
    check_v0(v0)?;
    let f = |eta: f64| -> Result<f64> {
        let g = characterize_with(&Potential::quartic(v0, eta)?, Strictness::Lenient)?;
        Ok(g.delta_eps() - HBAR * g.omega_r)
    };
    let hi = quartic_eta_bound() * (1.0 - 1e-9);
    Ok(brent(f, 0.0, hi, 1e-13)?.root)
}
