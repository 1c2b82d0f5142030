//! Uniform radial mesh and the three-point finite-difference operator.
//!
//! Dirichlet conditions at both ends are imposed by dropping the boundary
//! nodes, so the operator lives on the `N - 1` interior nodes and is symmetric
//! by construction.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    n_intervals: usize,
    dr: f64,
}

impl RadialGrid {
    pub const DEFAULT_R_MIN: f64 = 1e-3;
    pub const DEFAULT_R_MAX: f64 = 20.0;
    pub const DEFAULT_INTERVALS: usize = 4000;

    pub fn new(r_min: f64, r_max: f64, n_intervals: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "bounds must be finite, got [{r_min}, {r_max}]"
            )));
        }
        if r_min <= 0.0 {
            return Err(Error::InvalidDomain(format!(
                "r_min must be > 0 (inner cutoff), got {r_min}"
            )));
        }
        if r_max <= r_min {
            return Err(Error::InvalidDomain(format!(
                "r_max must exceed r_min, got [{r_min}, {r_max}]"
            )));
        }
        if n_intervals < 3 {
            return Err(Error::InvalidDomain(format!(
                "need at least 3 intervals, got {n_intervals}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            n_intervals,
            dr: (r_max - r_min) / n_intervals as f64,
        })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    /// Number of interior nodes, i.e. the operator dimension.
    pub fn dimension(&self) -> usize {
        self.n_intervals - 1
    }

    /// Node `i` for `i = 0..=N`. Never accumulated; the last node is `r_max`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n_intervals);
        if i == self.n_intervals {
            self.r_max
        } else {
            (i as f64).mul_add(self.dr, self.r_min)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_intervals).map(|i| self.node(i)).collect()
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (1..self.n_intervals).map(move |i| self.node(i))
    }

    pub fn with_intervals(&self, n_intervals: usize) -> Result<Self> {
        Self::new(self.r_min, self.r_max, n_intervals)
    }
}

/// Real symmetric tridiagonal matrix. The off-diagonal is shared so that
/// sweeps on a fixed grid only rebuild the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diag: Vec<f64>,
    offdiag: Arc<[f64]>,
    grid: Option<RadialGrid>,
}

impl TridiagonalOperator {
    /// Wraps raw bands. Used for benchmark matrices with no radial mesh.
    pub fn from_bands(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidRequest(format!(
                "band lengths {} and {} are inconsistent",
                diag.len(),
                offdiag.len()
            )));
        }
        if let Some(x) = diag.iter().chain(offdiag.iter()).find(|x| !x.is_finite()) {
            return Err(Error::InvalidRequest(format!("non-finite matrix entry {x}")));
        }
        Ok(Self {
            diag,
            offdiag: offdiag.into(),
            grid: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn shared_offdiag(&self) -> Arc<[f64]> {
        Arc::clone(&self.offdiag)
    }

    pub fn grid(&self) -> Option<&RadialGrid> {
        self.grid.as_ref()
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        assert_eq!(x.len(), n, "vector length must match operator dimension");
        let e = &self.offdiag;
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += e[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.dimension();
        let e = &self.offdiag;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let radius = if i > 0 { e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { e[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// Max-row-sum norm.
    pub fn norm(&self) -> f64 {
        let (lo, hi) = self.gershgorin_bounds();
        lo.abs().max(hi.abs())
    }
}

/// Constant off-diagonal `-1/dr²` for `grid`.
pub fn laplacian_offdiag(grid: &RadialGrid) -> Arc<[f64]> {
    let off = -1.0 / (grid.dr() * grid.dr());
    vec![off; grid.dimension() - 1].into()
}

pub fn build_grid(r_min: f64, r_max: f64, n_intervals: usize) -> Result<RadialGrid> {
    RadialGrid::new(r_min, r_max, n_intervals)
}

/// Assembles `-d²/dr² + u(r)` on the interior nodes of `grid`.
pub fn assemble<F>(grid: &RadialGrid, u: F) -> Result<TridiagonalOperator>
where
    F: Fn(f64) -> f64,
{
    assemble_with_offdiag(grid, u, laplacian_offdiag(grid))
}

/// Same as [`assemble`] but reuses a previously built off-diagonal.
pub fn assemble_with_offdiag<F>(
    grid: &RadialGrid,
    u: F,
    offdiag: Arc<[f64]>,
) -> Result<TridiagonalOperator>
where
    F: Fn(f64) -> f64,
{
    if offdiag.len() + 2 != grid.n_intervals() {
        return Err(Error::InvalidRequest(format!(
            "off-diagonal of length {} does not fit a grid with {} intervals",
            offdiag.len(),
            grid.n_intervals()
        )));
    }
    let kinetic = 2.0 / (grid.dr() * grid.dr());
    let diag = grid
        .interior_nodes()
        .map(|r| {
            let ur = u(r);
            if ur.is_finite() {
                Ok(kinetic + ur)
            } else {
                Err(Error::NonFinitePotential { r })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TridiagonalOperator {
        diag,
        offdiag,
        grid: Some(*grid),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_grid_nodes() {
        let g = build_grid(0.5, 1.5, 4).unwrap();
        assert_eq!(g.dr(), 0.25);
        assert_eq!(g.nodes(), vec![0.5, 0.75, 1.0, 1.25, 1.5]);
        assert_eq!(g.dimension(), 3);
    }

    #[test]
    fn default_grid_spacing() {
        let g = build_grid(1e-3, 20.0, 4000).unwrap();
        assert!((g.dr() - 0.004_999_75).abs() < 1e-15);
        assert_eq!(g.node(4000), 20.0);
    }

    #[test]
    fn invalid_domains() {
        for (a, b, n) in [(0.0, 10.0, 100), (-1.0, 1.0, 10), (2.0, 1.0, 10), (1.0, 2.0, 2)] {
            assert!(matches!(build_grid(a, b, n), Err(Error::InvalidDomain(_))));
        }
        assert!(build_grid(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn assemble_discrete_laplacian() {
        let g = build_grid(1.0, 5.0, 4).unwrap();
        let t = assemble(&g, |_| 0.0).unwrap();
        assert_eq!(t.diag(), &[2.0, 2.0, 2.0]);
        assert_eq!(t.offdiag(), &[-1.0, -1.0]);
    }

    #[test]
    fn assemble_constant_potential() {
        let g = build_grid(1.0, 2.5, 3).unwrap();
        let t = assemble(&g, |_| 4.0).unwrap();
        assert_eq!(t.diag(), &[12.0, 12.0]);
        assert_eq!(t.offdiag(), &[-4.0]);
    }

    #[test]
    fn singular_potential_is_reported() {
        let g = build_grid(1.0, 5.0, 4).unwrap();
        let err = assemble(&g, |r| if r == 3.0 { f64::INFINITY } else { 0.0 }).unwrap_err();
        assert_eq!(err, Error::NonFinitePotential { r: 3.0 });
        let err = assemble(&g, |_| f64::NAN).unwrap_err();
        assert!(matches!(err, Error::NonFinitePotential { .. }));
    }

    #[test]
    fn band_validation() {
        assert!(TridiagonalOperator::from_bands(vec![1.0, 2.0], vec![]).is_err());
        assert!(TridiagonalOperator::from_bands(vec![1.0, f64::NAN], vec![0.0]).is_err());
        let t = TridiagonalOperator::from_bands(vec![2.0, 2.0], vec![-1.0]).unwrap();
        assert_eq!(t.apply(&[1.0, 1.0]), vec![1.0, 1.0]);
        assert_eq!(t.gershgorin_bounds(), (1.0, 3.0));
    }

    proptest! {
        #[test]
        fn grid_invariants(r_min in 1e-6..10.0f64, width in 1e-3..100.0f64, n in 3usize..5000) {
            let g = build_grid(r_min, r_min + width, n).unwrap();
            let nodes = g.nodes();
            prop_assert_eq!(nodes.len(), n + 1);
            prop_assert_eq!(g.dimension(), n - 1);
            prop_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
            prop_assert_eq!(nodes[n], g.r_max());
            let span = g.r_max() - g.r_min();
            prop_assert!((g.dr() * n as f64 - span).abs() <= 2.0 * f64::EPSILON * g.r_max());
        }

        #[test]
        fn assembly_is_linear_in_potential(
            c1 in -5.0..5.0f64, c2 in -5.0..5.0f64, s in 0.1..3.0f64, n in 3usize..60,
        ) {
            let g = build_grid(0.3, 4.0, n).unwrap();
            let u1 = move |r: f64| c1 * r.sin();
            let u2 = move |r: f64| c2 + s / r;
            let a = assemble(&g, u1).unwrap();
            let b = assemble(&g, u2).unwrap();
            let sum = assemble(&g, |r| u1(r) + u2(r)).unwrap();
            let kinetic = 2.0 / (g.dr() * g.dr());
            for i in 0..g.dimension() {
                let expected = a.diag()[i] + b.diag()[i] - kinetic;
                prop_assert!((sum.diag()[i] - expected).abs() <= 1e-12 * kinetic.max(1.0));
            }
            prop_assert_eq!(sum.offdiag(), a.offdiag());
            prop_assert_eq!(sum.dimension(), n - 1);
        }
    }
}
