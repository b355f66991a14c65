//! Chebyshev collocation differentiation matrices.

use faer::Mat;

use crate::grid::{reference_nodes, AxisSpec};

/// Differentiation matrix of the degree-(N-1) interpolant on one axis.
///
/// Rows and columns follow the ascending node order of [`AxisSpec::points`].
#[derive(Debug, Clone)]
pub struct DiffMatrix {
    entries: Mat<f64>,
    axis: AxisSpec,
}

impl DiffMatrix {
    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn axis(&self) -> &AxisSpec {
        &self.axis
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    /// `D v` for node samples `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(v.len(), n, "sample vector length must match node count");
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)] * v[j]).sum())
            .collect()
    }
}

/// Classical matrix on `[-1, 1]` for descending nodes `cos(j pi / n)`,
/// returned permuted into ascending order.
fn reference_matrix(count: usize) -> Mat<f64> {
    let n = count - 1;
    // descending nodes: x_j = -asc_j reversed, i.e. x_j = asc[n - j]
    let asc = reference_nodes(count);
    let x: Vec<f64> = (0..count).map(|j| asc[n - j]).collect();
    let weight = |j: usize| {
        let c = if j == 0 || j == n { 2.0 } else { 1.0 };
        if j.is_multiple_of(2) {
            c
        } else {
            -c
        }
    };

    let mut d = Mat::<f64>::zeros(count, count);
    for i in 0..count {
        let mut row_sum = 0.0;
        for j in 0..count {
            if i != j {
                let v = weight(i) / weight(j) / (x[i] - x[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        // negative-sum trick: rows sum to zero up to rounding
        d[(i, i)] = -row_sum;
    }
    Mat::from_fn(count, count, |k, l| d[(n - k, n - l)])
}

/// Chebyshev differentiation matrix for `axis`, scaled by `1 / radius`.
pub fn differentiation_matrix(axis: &AxisSpec) -> DiffMatrix {
    let base = reference_matrix(axis.count());
    let r = axis.radius();
    DiffMatrix {
        entries: Mat::from_fn(axis.count(), axis.count(), |i, j| base[(i, j)] / r),
        axis: *axis,
    }
}
