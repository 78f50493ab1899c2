//! Finite-difference reference solution for the two lowest levels.
//!
//! The Schrödinger equation is discretized with the three-point Laplacian on
//! a uniform grid with ψ = 0 at both ends, and E₀, E₁ come from Sturm
//! bisection of the resulting symmetric tridiagonal matrix.

use crate::error::{Error, Result};
use crate::numerics::{lowest_eigenvalues, SymTridiag};
use crate::potential::{characterize_with, Potential, Strictness, WellGeometry, HBAR, MASS};

pub const DEFAULT_N: usize = 200;
pub const DEFAULT_M: f64 = 8.0;
/// Largest N reached by automatic doubling.
pub const MAX_N: usize = 1600;
/// Relative splitting change between N and 2N accepted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-4;
pub const MIN_POINTS: usize = 16;

/// Uniform grid; the end points carry the Dirichlet condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidGrid(format!("range [{x_min}, {x_max}]")));
        }
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{n_points} points, need at least {MIN_POINTS}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx: (x_max - x_min) / (n_points - 1) as f64,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }
}

/// Positions and widths that size a grid: the outermost minima and the
/// oscillator lengths σ = √(ħ/mω) of their wells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridExtent {
    pub a_l: f64,
    pub a_r: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
}

impl GridExtent {
    /// A single well at `center` with frequency `omega`.
    pub fn single_well(center: f64, omega: f64) -> Self {
        let sigma = (HBAR / (MASS * omega)).sqrt();
        Self {
            a_l: center,
            a_r: center,
            sigma_l: sigma,
            sigma_r: sigma,
        }
    }
}

impl From<&WellGeometry> for GridExtent {
    fn from(g: &WellGeometry) -> Self {
        Self {
            a_l: g.a_l,
            a_r: g.a_r,
            sigma_l: g.sigma_l,
            sigma_r: g.sigma_r,
        }
    }
}

/// x_min = a_L − Mσ_L, dx = min(σ_L, σ_R)/N, and x_max the first grid
/// point at or beyond a_R + Mσ_R.
pub fn build_grid(extent: impl Into<GridExtent>, n: usize, m: f64) -> Result<Grid> {
    let e = extent.into();
    if n < 8 {
        return Err(Error::InvalidGrid(format!("N = {n}, need at least 8")));
    }
    if !(m.is_finite() && m >= 3.0) {
        return Err(Error::InvalidGrid(format!("M = {m}, need at least 3")));
    }
    if !(e.sigma_l > 0.0 && e.sigma_r > 0.0 && e.a_l <= e.a_r) {
        return Err(Error::InvalidGrid("extent has no valid wells".into()));
    }
    let dx = e.sigma_l.min(e.sigma_r) / n as f64;
    let x_min = e.a_l - m * e.sigma_l;
    let target = e.a_r + m * e.sigma_r;
    // The slack keeps an exact multiple of dx from rounding up a step.
    let steps = ((target - x_min) / dx - 1e-9).ceil() as usize;
    let n_points = (steps + 1).max(MIN_POINTS);
    Ok(Grid {
        x_min,
        x_max: x_min + (n_points - 1) as f64 * dx,
        n_points,
        dx,
    })
}

/// Hamiltonian on the interior grid points.
pub fn discretize(p: &Potential, grid: &Grid) -> Result<SymTridiag> {
    let (w_min, w_max) = p.window();
    if grid.x_min < w_min || grid.x_max > w_max {
        return Err(Error::GridOutsideWindow {
            x_min: grid.x_min,
            x_max: grid.x_max,
            w_min,
            w_max,
        });
    }
    let kin = HBAR * HBAR / (MASS * grid.dx * grid.dx);
    let interior = grid.n_points - 2;
    let diag = (1..=interior)
        .map(|i| Ok(kin + p.value(grid.x(i))?))
        .collect::<Result<Vec<_>>>()?;
    let off = vec![-0.5 * kin; interior - 1];
    Ok(SymTridiag::new(diag, off)?)
}

/// (E₀, E₁) on a fixed grid.
pub fn lowest_pair(p: &Potential, grid: &Grid) -> Result<(f64, f64)> {
    let h = discretize(p, grid)?;
    let e = lowest_eigenvalues(&h, 2)?;
    Ok((e[0], e[1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub n: usize,
    pub m: f64,
    pub e0: f64,
    pub e1: f64,
}

impl HistoryRow {
    pub fn splitting(&self) -> f64 {
        self.e1 - self.e0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub e0: f64,
    pub e1: f64,
    pub splitting: f64,
    /// Grid of the finest solve.
    pub grid: Grid,
    pub converged: bool,
    pub history: Vec<HistoryRow>,
}

/// E₀, E₁ of a double well, doubling N from `n` until the splitting settles
/// to [`CONVERGENCE_TOL`] or N passes [`MAX_N`].
pub fn splitting_exact(p: &Potential, n: usize, m: f64) -> Result<SpectrumResult> {
    let g = characterize_with(p, Strictness::Lenient)?;
    splitting_with_extent(p, &g, n, m)
}

pub fn splitting_with_extent(p: &Potential, extent: impl Into<GridExtent>, n: usize, m: f64) -> Result<SpectrumResult> {
    let extent = extent.into();
    let mut history = Vec::new();
    let mut n_cur = n;
    let mut grid = build_grid(extent, n_cur, m)?;
    let (e0, e1) = lowest_pair(p, &grid)?;
    history.push(HistoryRow { n: n_cur, m, e0, e1 });
    let mut converged = false;
    while n_cur < MAX_N.max(2 * n) && !converged {
        n_cur *= 2;
        grid = build_grid(extent, n_cur, m)?;
        let (e0, e1) = lowest_pair(p, &grid)?;
        let prev = history.last().map(HistoryRow::splitting).unwrap_or(f64::NAN);
        let cur = e1 - e0;
        converged = ((cur - prev) / cur).abs() < CONVERGENCE_TOL;
        history.push(HistoryRow { n: n_cur, m, e0, e1 });
    }
    let last = history[history.len() - 1];
    Ok(SpectrumResult {
        e0: last.e0,
        e1: last.e1,
        splitting: last.splitting(),
        grid,
        converged,
        history,
    })
}

/// E₀, E₁ for every (N, M) pair, ordered by `ns` first and `ms` within.
pub fn convergence_scan(
    p: &Potential,
    extent: impl Into<GridExtent>,
    ns: &[usize],
    ms: &[f64],
) -> Result<Vec<HistoryRow>> {
    if ns.is_empty() {
        return Err(Error::EmptyInput("N list"));
    }
    if ms.is_empty() {
        return Err(Error::EmptyInput("M list"));
    }
    let extent = extent.into();
    let mut rows = Vec::with_capacity(ns.len() * ms.len());
    for &n in ns {
        for &m in ms {
            let grid = build_grid(extent, n, m)?;
            let (e0, e1) = lowest_pair(p, &grid)?;
            rows.push(HistoryRow { n, m, e0, e1 });
        }
    }
    Ok(rows)
}
