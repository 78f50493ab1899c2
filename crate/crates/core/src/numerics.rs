//! Numerical kernels: adaptive Simpson quadrature, Brent root bracketing and
//! Sturm-sequence bisection for the lowest eigenvalues of a symmetric
//! tridiagonal matrix.
//!
//! Every routine is a pure function of its inputs. The fallible `try_*`
//! variants accept closures returning `Result`, so callers whose integrand
//! can fail (a parsed potential hitting `sqrt` of a negative number, say)
//! get their own error back instead of a NaN.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },
    #[error("adaptive quadrature hit depth limit on [{a}, {b}] before reaching tolerance")]
    DepthExceeded { a: f64, b: f64 },
    #[error("adaptive quadrature exceeded its budget of {budget} evaluations")]
    EvaluationBudget { budget: usize },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("no sign change on bracket [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("function value is not finite at x = {x}")]
    NonFiniteFunction { x: f64 },
    #[error("root finder did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("tridiagonal matrix dimension {n} is too small (need at least 2)")]
    DimensionTooSmall { n: usize },
    #[error("off-diagonal length {offdiag} does not match diagonal length {diag} - 1")]
    ShapeMismatch { diag: usize, offdiag: usize },
    #[error("requested {k} eigenvalues from a matrix of dimension {n}")]
    InvalidCount { k: usize, n: usize },
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_depth: 60,
        }
    }
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0) {
            return Err(NumericsError::InvalidTolerance("abs_tol must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(NumericsError::InvalidTolerance("rel_tol must be positive"));
        }
        if self.max_depth < 1 {
            return Err(NumericsError::InvalidTolerance("max_depth must be at least 1"));
        }
        Ok(())
    }
}

/// Hard cap on integrand evaluations for a single call.
const EVAL_BUDGET: usize = 20_000_000;

/// Levels subdivided unconditionally before the error test kicks in, so a
/// narrow feature cannot slip between the first five sample points.
const MIN_DEPTH: u32 = 4;

/// Adaptive Simpson quadrature of an infallible integrand.
pub fn integrate<F>(f: F, a: f64, b: f64, q: &Quadrature) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok::<f64, NumericsError>(f(x)), a, b, q)
}

struct Simpson<'a, F> {
    f: &'a mut F,
    evals: usize,
    max_depth: u32,
}

impl<F, E> Simpson<'_, F>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericsError>,
{
    fn eval(&mut self, x: f64) -> Result<f64, E> {
        self.evals += 1;
        if self.evals > EVAL_BUDGET {
            return Err(NumericsError::EvaluationBudget { budget: EVAL_BUDGET }.into());
        }
        let y = (self.f)(x)?;
        if !y.is_finite() {
            return Err(NumericsError::NonFiniteIntegrand { x }.into());
        }
        Ok(y)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, E> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol {
            // Richardson extrapolation of the two Simpson estimates.
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(NumericsError::DepthExceeded { a, b }.into());
        }
        let l = self.recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson quadrature with Richardson error estimate. The
/// integrand may fail; its error type must absorb [`NumericsError`].
pub fn try_integrate<F, E>(mut f: F, a: f64, b: f64, q: &Quadrature) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericsError>,
{
    q.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(NumericsError::InvalidInterval { a, b }.into());
    }
    let mut s = Simpson {
        f: &mut f,
        evals: 0,
        max_depth: q.max_depth,
    };
    let m = 0.5 * (a + b);
    let fa = s.eval(a)?;
    let fm = s.eval(m)?;
    let fb = s.eval(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = q.abs_tol.max(q.rel_tol * whole.abs());
    s.recurse(a, fa, m, fm, b, fb, whole, tol, 0)
}

/// Result of a bracketed root search: the best estimate and the final
/// bracket `[lo, hi]` that still contains the sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

impl RootBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

const ROOT_MAX_ITER: usize = 200;

/// Brent's method; returns the root estimate.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    brent(|x| Ok::<f64, NumericsError>(f(x)), lo, hi, tol).map(|r| r.root)
}

/// Brent's method with the final bracket exposed. Stops once the bracket is
/// no wider than `tol` (or than a few ulps of the root, whichever is larger).
pub fn brent<F, E>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<RootBracket, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<NumericsError>,
{
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance("root tolerance must be positive").into());
    }
    let mut eval = |x: f64| -> Result<f64, E> {
        let y = f(x)?;
        if y.is_nan() {
            return Err(NumericsError::NonFiniteFunction { x }.into());
        }
        Ok(y)
    };

    let (mut a, mut b) = (lo, hi);
    let mut fa = eval(a)?;
    let mut fb = eval(b)?;
    if fa == 0.0 {
        return Ok(RootBracket {
            root: a,
            lo: a,
            hi: a,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(RootBracket {
            root: b,
            lo: b,
            hi: b,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        }
        .into());
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=ROOT_MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        // Half-width allowed for the [b, c] bracket.
        let tol1 = (0.5 * tol).max(2.0 * f64::EPSILON * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let (l, h) = if fb == 0.0 {
                (b, b)
            } else if b < c {
                (b, c)
            } else {
                (c, b)
            };
            return Ok(RootBracket {
                root: b,
                lo: l,
                hi: h,
                iterations: iter,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = eval(b)?;
    }
    Err(NumericsError::NoConvergence {
        iterations: ROOT_MAX_ITER,
    }
    .into())
}

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self, NumericsError> {
        if diag.len() < 2 {
            return Err(NumericsError::DimensionTooSmall { n: diag.len() });
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(NumericsError::ShapeMismatch {
                diag: diag.len(),
                offdiag: offdiag.len(),
            });
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// The same matrix with its index order reversed.
    pub fn reversed(&self) -> Self {
        let mut diag = self.diag.clone();
        let mut offdiag = self.offdiag.clone();
        diag.reverse();
        offdiag.reverse();
        Self { diag, offdiag }
    }

    /// Gershgorin interval enclosing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `shift`: the count of negative
    /// pivots in the LDLᵀ factorisation of `T - shift·I`.
    pub fn sturm_count(&self, shift: f64) -> usize {
        // Pivot floor, scaled to the matrix so it never dominates a real pivot.
        let (glo, ghi) = self.gershgorin();
        let guard = f64::EPSILON * f64::EPSILON * (ghi.abs().max(glo.abs())).max(f64::MIN_POSITIVE);
        let mut count = 0;
        let mut q = self.diag[0] - shift;
        for i in 0..self.dim() {
            if i > 0 {
                let e = self.offdiag[i - 1];
                q = (self.diag[i] - shift) - e * e / q;
            }
            if q == 0.0 {
                q = -guard;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// The `k` algebraically smallest eigenvalues, ascending, by Sturm bisection.
///
/// Each eigenvalue is bisected until its bracket collapses to adjacent
/// floating-point numbers, which is well inside `1e-12 · span`.
pub fn lowest_eigenvalues(m: &SymTridiag, k: usize) -> Result<Vec<f64>, NumericsError> {
    let n = m.dim();
    if n < 2 {
        return Err(NumericsError::DimensionTooSmall { n });
    }
    if k == 0 || k > n {
        return Err(NumericsError::InvalidCount { k, n });
    }
    let (glo, ghi) = m.gershgorin();
    let pad = 1e-12 * (ghi - glo).abs().max(f64::MIN_POSITIVE) + f64::EPSILON * glo.abs().max(ghi.abs());
    let (glo, ghi) = (glo - pad, ghi + pad);

    let mut out = Vec::with_capacity(k);
    let mut floor = glo;
    for idx in 0..k {
        // Smallest λ with sturm_count(λ) > idx lies in (lo, hi].
        let mut lo = floor;
        let mut hi = ghi;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if m.sturm_count(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(hi);
        floor = lo;
    }
    Ok(out)
}
