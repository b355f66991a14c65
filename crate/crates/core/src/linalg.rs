//! Small dense helpers shared across modules.

use faer::{Mat, MatRef};

/// Kronecker product `a ⊗ b`.
pub fn kron(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn identity(n: usize) -> Mat<f64> {
    Mat::identity(n, n)
}

/// `m v` for a dense matrix.
pub fn matvec(m: MatRef<'_, f64>, v: &[f64]) -> Vec<f64> {
    assert_eq!(m.ncols(), v.len(), "dimension mismatch in matvec");
    let mut out = vec![0.0; m.nrows()];
    for (j, &vj) in v.iter().enumerate() {
        if vj == 0.0 {
            continue;
        }
        let col = m.col(j);
        for (o, &c) in out.iter_mut().zip(col.iter()) {
            *o += c * vj;
        }
    }
    out
}

pub fn max_abs(m: MatRef<'_, f64>) -> f64 {
    let mut a = 0.0f64;
    for j in 0..m.ncols() {
        for &x in m.col(j).iter() {
            a = a.max(x.abs());
        }
    }
    a
}

/// Induced 1-norm (max absolute column sum).
pub fn norm_one(m: MatRef<'_, f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.col(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced infinity-norm (max absolute row sum).
pub fn norm_inf(m: MatRef<'_, f64>) -> f64 {
    let mut rows = vec![0.0f64; m.nrows()];
    for j in 0..m.ncols() {
        for (r, &x) in rows.iter_mut().zip(m.col(j).iter()) {
            *r += x.abs();
        }
    }
    rows.into_iter().fold(0.0, f64::max)
}

pub fn is_finite(m: MatRef<'_, f64>) -> bool {
    (0..m.ncols()).all(|j| m.col(j).iter().all(|x| x.is_finite()))
}
