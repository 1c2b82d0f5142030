//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues are isolated one index at a time by Sturm-sequence bisection
//! inside the Gershgorin interval, so each result depends only on its index
//! and never on evaluation order. Eigenvectors come from inverse iteration at
//! the converged shift, with a partially pivoted LU of `T - σI`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretize::TridiagonalOperator;
use crate::error::{Error, Result};

/// Eigenvalues closer than this multiple of `tol_lambda` are treated as a
/// cluster and their vectors re-orthogonalized.
const CLUSTER_FACTOR: f64 = 1e3;

/// Inverse-iteration steps taken after the residual test first passes, to
/// flush components along neighbouring eigenvectors.
const EXTRA_STEPS: usize = 2;

/// Multiple of `ulp·‖T‖` below which a residual is indistinguishable from zero.
const ROUNDING_FLOOR: f64 = 16.0;

/// Components smaller than this are skipped when fixing the sign.
const SIGN_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverTolerances {
    /// Relative bisection width.
    pub tol_lambda: f64,
    /// Residual bound `‖Tv - λv‖ ≤ tol_residual · max(1, |λ|)` for unit `v`.
    pub tol_residual: f64,
    /// Inverse-iteration budget per start vector.
    pub max_iterations: usize,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        Self {
            tol_lambda: 1e-10,
            tol_residual: 1e-8,
            max_iterations: 40,
        }
    }
}

impl SolverTolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tol_lambda", self.tol_lambda), ("tol_residual", self.tol_residual)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidRequest(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidRequest("max_iterations must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRequest {
    pub count: usize,
    pub tolerances: SolverTolerances,
}

impl EigenRequest {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            tolerances: SolverTolerances::default(),
        }
    }

    pub fn with_tolerances(count: usize, tolerances: SolverTolerances) -> Self {
        Self { count, tolerances }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// Unit Euclidean norm; first significant component positive.
    pub vector: Vec<f64>,
}

/// Number of eigenvalues of `t` strictly below `x`.
///
/// Counts negative pivots of the LDLᵀ factorization of `T - xI`. A pivot that
/// vanishes is replaced by a positive value of order `ulp·‖T‖`, which amounts
/// to an infinitesimal downward shift of `x`.
pub fn count_below(t: &TridiagonalOperator, x: f64) -> usize {
    count_below_with(t, x, pivot_floor(t))
}

fn pivot_floor(t: &TridiagonalOperator) -> f64 {
    f64::EPSILON * t.norm().max(f64::MIN_POSITIVE)
}

fn count_below_with(t: &TridiagonalOperator, x: f64, pivmin: f64) -> usize {
    let d = t.diag();
    let e = t.offdiag();
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Bracket `[lo, hi]` of the `index`-th smallest eigenvalue (0-based).
fn bisect(t: &TridiagonalOperator, index: usize, tol: f64, pivmin: f64) -> (f64, f64) {
    let (glo, ghi) = t.gershgorin_bounds();
    let pad = f64::EPSILON * glo.abs().max(ghi.abs()) + pivmin;
    let mut lo = glo - pad;
    let mut hi = ghi + pad;
    loop {
        let mid = 0.5 * (lo + hi);
        let width = hi - lo;
        if width < tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return (lo, hi);
        }
        if count_below_with(t, mid, pivmin) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// LU factorization of `T - σI` with partial pivoting. `U` has two
/// superdiagonals after row interchanges.
struct ShiftedLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper1: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &TridiagonalOperator, shift: f64, pivmin: f64) -> Self {
        let n = t.dimension();
        let mut diag: Vec<f64> = t.diag().iter().map(|d| d - shift).collect();
        let mut lower = t.offdiag().to_vec();
        let mut upper1 = t.offdiag().to_vec();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] == 0.0 {
                    diag[i] = pivmin;
                }
                let fact = lower[i] / diag[i];
                lower[i] = fact;
                diag[i + 1] -= fact * upper1[i];
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper1[i];
                upper1[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper1[i + 1];
                    upper1[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for d in diag.iter_mut() {
            if d.abs() < pivmin {
                *d = pivmin.copysign(if *d == 0.0 { 1.0 } else { *d });
            }
        }
        Self {
            lower,
            diag,
            upper1,
            upper2,
            swapped,
        }
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.lower[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.upper1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.upper2[i] * b[i + 2];
            }
            b[i] = s / self.diag[i];
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residual_norm(t: &TridiagonalOperator, lambda: f64, v: &[f64]) -> f64 {
    let tv = t.apply(v);
    tv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let norm = norm2(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

fn inverse_iteration(
    t: &TridiagonalOperator,
    index: usize,
    lambda: f64,
    cluster: &[&[f64]],
    tol: &SolverTolerances,
    pivmin: f64,
) -> Result<Vec<f64>> {
    let n = t.dimension();
    let lu = ShiftedLu::new(t, lambda, pivmin);
    // Residuals cannot drop below the rounding floor of the matvec, which
    // dominates for very fine meshes where ‖T‖ ~ 1/dr².
    let bound = (tol.tol_residual * lambda.abs().max(1.0)).max(ROUNDING_FLOOR * f64::EPSILON * t.norm());
    // One restart from a different deterministic seed.
    for attempt in 0..2u64 {
        let mut v = start_vector(n, (index as u64) << 1 | attempt);
        let mut extra = None;
        for _ in 0..tol.max_iterations + EXTRA_STEPS {
            lu.solve_in_place(&mut v);
            for q in cluster {
                let c = dot(&v, q);
                v.iter_mut().zip(q.iter()).for_each(|(x, y)| *x -= c * y);
            }
            let norm = norm2(&v);
            if !(norm.is_finite() && norm > 0.0) {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            match extra {
                Some(0) => break,
                Some(k) => extra = Some(k - 1),
                None if residual_norm(t, lambda, &v) <= bound => extra = Some(EXTRA_STEPS - 1),
                None => {}
            }
        }
        if extra.is_some() && residual_norm(t, lambda, &v) <= bound {
            fix_sign(&mut v);
            return Ok(v);
        }
    }
    Err(Error::ConvergenceFailure { index })
}

/// The `req.count` lowest eigenpairs of `t`, ascending.
pub fn lowest_eigenpairs(t: &TridiagonalOperator, req: &EigenRequest) -> Result<Vec<EigenPair>> {
    req.tolerances.validate()?;
    let n = t.dimension();
    if req.count == 0 || req.count > n {
        return Err(Error::InvalidRequest(format!(
            "requested {} eigenpairs of a {n}×{n} operator",
            req.count
        )));
    }
    let tol = &req.tolerances;
    let pivmin = pivot_floor(t);
    let brackets: Vec<(f64, f64)> = (0..req.count)
        .map(|j| bisect(t, j, tol.tol_lambda, pivmin))
        .collect();

    let mut pairs: Vec<EigenPair> = Vec::with_capacity(req.count);
    for (j, &(lo, hi)) in brackets.iter().enumerate() {
        let shift = 0.5 * (lo + hi);
        let gap = CLUSTER_FACTOR * tol.tol_lambda * shift.abs().max(1.0);
        let cluster: Vec<&[f64]> = pairs
            .iter()
            .filter(|p| (p.lambda - shift).abs() < gap)
            .map(|p| p.vector.as_slice())
            .collect();
        let vector = inverse_iteration(t, j, shift, &cluster, tol, pivmin)?;
        // The Rayleigh quotient is accurate to the squared residual; keep it
        // only inside the bracket so the Sturm count stays consistent.
        let rayleigh = dot(&vector, &t.apply(&vector));
        let lambda = if (lo..=hi).contains(&rayleigh) { rayleigh } else { shift };
        pairs.push(EigenPair { lambda, vector });
    }
    Ok(pairs)
}
