//! Finite-dimensional Koopman generator on a collocation grid.
//!
//! The generator `sum_i f_i d/dx_i` is discretized as
//! `K = sum_i diag(f_i(grid)) (I ⊗ ... ⊗ D_i ⊗ ... ⊗ I)`, with `D_i` in Kronecker
//! slot `d - i + 1` (counted from the left, 1-based axes). With first-axis-fastest
//! flattening that factor differentiates along axis `i` only.

use faer::Mat;

use crate::chebdiff::{differentiation_matrix, DiffMatrix};
use crate::error::{Error, Result};
use crate::grid::CollocationGrid;
use crate::par;

/// Largest generator side assembled densely (`N^d`).
pub const MAX_KOOPMAN_SIDE: usize = 8000;

/// Vector field `x -> f(x)` evaluated into a caller-provided buffer.
///
/// Implemented for any `Fn(&[f64], &mut [f64]) + Sync`.
pub trait VectorField: Sync {
    fn eval(&self, x: &[f64], out: &mut [f64]);
}

impl<F> VectorField for F
where
    F: Fn(&[f64], &mut [f64]) + Sync + ?Sized,
{
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        self(x, out)
    }
}

/// Scalar observable `g(x)`.
pub trait Observable: Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> Observable for F
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// The coordinate observable `g(x) = x_i` (zero-based `i`).
#[derive(Debug, Clone, Copy)]
pub struct Coordinate(pub usize);

impl Observable for Coordinate {
    fn eval(&self, x: &[f64]) -> f64 {
        x[self.0]
    }
}

/// Dense Koopman generator matrix together with the grid it lives on.
#[derive(Debug, Clone)]
pub struct LiftedOperator {
    matrix: Mat<f64>,
    grid: CollocationGrid,
    diff: Vec<DiffMatrix>,
}

impl LiftedOperator {
    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn grid(&self) -> &CollocationGrid {
        &self.grid
    }

    pub fn diff_matrices(&self) -> &[DiffMatrix] {
        &self.diff
    }

    /// Side length, `N^d`.
    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn middle_index(&self) -> usize {
        self.grid.middle_index()
    }

    pub fn into_matrix(self) -> Mat<f64> {
        self.matrix
    }
}

/// Samples of `f` at every grid point, row-major (`len x d`).
fn field_samples<F: VectorField + ?Sized>(f: &F, grid: &CollocationGrid) -> Result<Vec<f64>> {
    let d = grid.dim();
    let rows = par::map_range(grid.len(), |p| {
        let x = grid.point(p);
        let mut out = vec![0.0; d];
        f.eval(&x, &mut out);
        (x, out)
    });
    let mut samples = Vec::with_capacity(grid.len() * d);
    for (x, out) in rows {
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "vector field", node: x });
        }
        samples.extend(out);
    }
    Ok(samples)
}

/// Assembles the Koopman generator approximation for `f` on `grid`.
pub fn build_koopman_matrix<F: VectorField + ?Sized>(
    f: &F,
    grid: &CollocationGrid,
) -> Result<LiftedOperator> {
    let d = grid.dim();
    let n = grid.count();
    let len = grid.len();
    if len > MAX_KOOPMAN_SIDE {
        return Err(Error::Resource(format!(
            "Koopman side {len} exceeds the dense limit of {MAX_KOOPMAN_SIDE}; lower the order"
        )));
    }
    let samples = field_samples(f, grid)?;
    let diff: Vec<DiffMatrix> = grid.axes().iter().map(differentiation_matrix).collect();

    // Factor for axis i is I_{N^(d-1-i)} ⊗ D_i ⊗ I_{N^i} (zero-based i): row
    // p = (outer, k, inner) couples to columns (outer, l, inner) for every l.
    let mut rows = vec![0.0; len * len];
    par::for_each_row(&mut rows, len, |p, row| {
        for (axis, dm) in diff.iter().enumerate() {
            let fp = samples[p * d + axis];
            if fp == 0.0 {
                continue;
            }
            let inner = n.pow(axis as u32);
            let k = (p / inner) % n;
            let base = p - k * inner;
            for l in 0..n {
                row[base + l * inner] += fp * dm.get(k, l);
            }
        }
    });

    Ok(LiftedOperator {
        matrix: Mat::from_fn(len, len, |i, j| rows[i * len + j]),
        grid: grid.clone(),
        diff,
    })
}

/// `vec(g(grid))`: the observable sampled at every grid point.
pub fn initial_vector<G: Observable + ?Sized>(g: &G, grid: &CollocationGrid) -> Result<Vec<f64>> {
    let values = par::map_range(grid.len(), |p| g.eval(&grid.point(p)));
    if let Some(p) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "observable", node: grid.point(p) });
    }
    Ok(values)
}

/// Initial vectors for each coordinate observable `x_1, ..., x_d`.
pub fn coordinate_initial_vectors(grid: &CollocationGrid) -> Vec<Vec<f64>> {
    (0..grid.dim())
        .map(|i| {
            let pts = grid.axis_points(i);
            let inner = grid.count().pow(i as u32);
            (0..grid.len()).map(|p| pts[(p / inner) % grid.count()]).collect()
        })
        .collect()
}
