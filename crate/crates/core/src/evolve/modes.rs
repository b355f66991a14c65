//! Eigendecomposition route: `y(t) = sum_j c_j exp(lambda_j t) v_j` with
//! Koopman modes `c = V^{-1} y0`.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef};

use super::{check_times, overflowed, TrajectorySample};
use crate::error::{Error, Result};
use crate::linalg::norm_one;
use crate::par;

/// Eigenvector-matrix condition estimate above which the modal form is refused.
pub const MAX_CONDITION: f64 = 1e12;

const RESIDUAL_TOL: f64 = 1e-8;
const IMAG_TOL: f64 = 1e-8;

/// Eigenpairs of a lifted matrix and the modal coordinates of one initial vector.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    eigenvalues: Vec<c64>,
    vectors: Mat<c64>,
    modes: Vec<c64>,
    condition: f64,
    residual: f64,
}

impl EigenSolution {
    pub fn eigenvalues(&self) -> &[c64] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns.
    pub fn vectors(&self) -> &Mat<c64> {
        &self.vectors
    }

    /// Koopman modes `c = V^{-1} y0`.
    pub fn modes(&self) -> &[c64] {
        &self.modes
    }

    /// Largest real part of the spectrum.
    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `||V||_1 ||V^{-1}||_1`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `max_j ||M v_j - lambda_j v_j|| / (||M|| ||v_j||)`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `sum_j c_j exp(lambda_j t) v_j` and the largest imaginary part seen.
    pub fn evaluate(&self, t: f64) -> (Vec<f64>, f64) {
        let n = self.vectors.nrows();
        let weights: Vec<c64> = self
            .eigenvalues
            .iter()
            .zip(&self.modes)
            .map(|(&l, &c)| c * (l * t).exp())
            .collect();
        let mut acc = vec![c64::new(0.0, 0.0); n];
        for (j, &w) in weights.iter().enumerate() {
            for (a, &v) in acc.iter_mut().zip(self.vectors.col(j).iter()) {
                *a += w * v;
            }
        }
        let imag = acc.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        (acc.into_iter().map(|z| z.re).collect(), imag)
    }

    /// Single entry `sum_j c_j exp(lambda_j t) (v_j)_index`.
    pub fn evaluate_entry(&self, t: f64, index: usize) -> c64 {
        self.eigenvalues
            .iter()
            .zip(&self.modes)
            .enumerate()
            .map(|(j, (&l, &c))| c * (l * t).exp() * self.vectors[(index, j)])
            .sum()
    }
}

fn complex_norm_one(m: MatRef<'_, c64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.col(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigendecomposition of `m` and the modes of `y0`.
pub fn eigen_solution(m: MatRef<'_, f64>, y0: &[f64]) -> Result<EigenSolution> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid("matrix must be square"));
    }
    if y0.len() != n {
        return Err(Error::invalid(format!(
            "initial vector has length {}, expected {n}",
            y0.len()
        )));
    }
    let evd = m
        .eigen()
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let eigenvalues: Vec<c64> = evd.S().column_vector().iter().copied().collect();
    // unit columns keep the conditioning of V close to optimal
    let raw = evd.U();
    let norms: Vec<f64> = (0..n)
        .map(|j| raw.col(j).iter().map(|z| z.norm() * z.norm()).sum::<f64>().sqrt())
        .collect();
    let vectors = Mat::from_fn(n, n, |i, j| {
        if norms[j] > 0.0 {
            raw[(i, j)] * (1.0 / norms[j])
        } else {
            raw[(i, j)]
        }
    });

    let mc = Mat::from_fn(n, n, |i, j| c64::new(m[(i, j)], 0.0));
    let m_norm = norm_one(m).max(f64::MIN_POSITIVE);
    let residual = (0..n)
        .map(|j| {
            let v = vectors.col(j);
            let mv = &mc * v;
            let r = mv
                .iter()
                .zip(v.iter())
                .map(|(&a, &b)| (a - eigenvalues[j] * b).norm())
                .fold(0.0f64, f64::max);
            let vn = v.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
            r / (m_norm * vn)
        })
        .fold(0.0f64, f64::max);
    if !residual.is_finite() || residual > RESIDUAL_TOL {
        return Err(Error::Numerical(format!("eigenpair residual {residual:.3e} too large")));
    }

    let lu = vectors.partial_piv_lu();
    let inverse = lu.solve(Mat::<c64>::identity(n, n));
    let condition = complex_norm_one(vectors.as_ref()) * complex_norm_one(inverse.as_ref());
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Defective { condition });
    }
    let y = Mat::from_fn(n, 1, |i, _| c64::new(y0[i], 0.0));
    let modes_mat = lu.solve(&y);
    let modes = modes_mat.col(0).iter().copied().collect();
    Ok(EigenSolution { eigenvalues, vectors, modes, condition, residual })
}

/// Modal-sum evolution of `dy/dt = M y`, together with the eigen data.
pub fn koopman_mode_solution(
    m: MatRef<'_, f64>,
    y0: &[f64],
    times: &[f64],
) -> Result<(TrajectorySample, EigenSolution)> {
    check_times(times)?;
    let eig = eigen_solution(m, y0)?;
    let evaluated = par::map_slice(times, |&t| eig.evaluate(t));
    let mut values = Vec::with_capacity(times.len());
    let mut diverged = None;
    for (k, (v, imag)) in evaluated.into_iter().enumerate() {
        if diverged.is_none() && overflowed(&v) {
            diverged = Some(k);
        }
        if diverged.is_none() {
            let scale = v.iter().fold(1.0f64, |a, x| a.max(x.abs()));
            if imag > IMAG_TOL * scale {
                return Err(Error::Numerical(format!(
                    "imaginary residue {imag:.3e} at t = {}",
                    times[k]
                )));
            }
        }
        values.push(v);
    }
    let mut traj = TrajectorySample { times: times.to_vec(), values, diverged_from: None };
    if let Some(k) = diverged {
        traj.mark_diverged(k);
    }
    Ok((traj, eig))
}
