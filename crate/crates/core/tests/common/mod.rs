//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ascending Gauss-Lobatto nodes on `[c - r, c + r]`.
pub fn nodes(c: f64, r: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| c - r * (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos())
        .collect()
}

/// `D[k][l] = L_l'(x_k)` for the Lagrange basis on `x`.
pub fn lagrange_diff(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|l| 1.0 / (0..n).filter(|&m| m != l).map(|m| x[l] - x[m]).product::<f64>())
        .collect();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|l| {
                    if k == l {
                        (0..n).filter(|&m| m != k).map(|m| 1.0 / (x[k] - x[m])).sum()
                    } else {
                        w[l] / w[k] / (x[k] - x[l])
                    }
                })
                .collect()
        })
        .collect()
}

/// Digits of `p` in base `n`, least significant (axis 0) first.
pub fn digits(mut p: usize, n: usize, d: usize) -> Vec<usize> {
    (0..d)
        .map(|_| {
            let k = p % n;
            p /= n;
            k
        })
        .collect()
}

/// Generator matrix entry by entry: `K[p][q] = sum_i f_i(x_p) D_i[p_i][q_i]`
/// when `p` and `q` agree on every other axis.
pub fn nested_loop_generator(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    centers: &[f64],
    radii: &[f64],
    n: usize,
) -> Vec<Vec<f64>> {
    let d = centers.len();
    let axes: Vec<Vec<f64>> = (0..d).map(|i| nodes(centers[i], radii[i], n)).collect();
    let diffs: Vec<Vec<Vec<f64>>> = axes.iter().map(|a| lagrange_diff(a)).collect();
    let len = n.pow(d as u32);
    let mut k = vec![vec![0.0; len]; len];
    for p in 0..len {
        let pi = digits(p, n, d);
        let x: Vec<f64> = (0..d).map(|i| axes[i][pi[i]]).collect();
        let fx = f(&x);
        for q in 0..len {
            let qi = digits(q, n, d);
            for i in 0..d {
                if (0..d).all(|j| j == i || pi[j] == qi[j]) {
                    k[p][q] += fx[i] * diffs[i][pi[i]][qi[i]];
                }
            }
        }
    }
    k
}

/// Literal Kronecker product of row-major matrices.
pub fn kron(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (ar, br) = (a.len(), b.len());
    let (ac, bc) = (a[0].len(), b[0].len());
    let mut out = vec![vec![0.0; ac * bc]; ar * br];
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn eye(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Polynomial vector field with random coefficients in `[-1, 1]` on every
/// monomial of total degree at most `degree`.
pub struct RandomPoly {
    pub dim: usize,
    pub terms: Vec<(usize, f64, Vec<u32>)>,
}

impl RandomPoly {
    pub fn new(rng: &mut impl Rng, dim: usize, degree: u32) -> Self {
        let mut terms = Vec::new();
        let mut powers = vec![0u32; dim];
        loop {
            if powers.iter().sum::<u32>() <= degree {
                for c in 0..dim {
                    terms.push((c, rng.random_range(-1.0..1.0), powers.clone()));
                }
            }
            let mut i = 0;
            loop {
                if i == dim {
                    return Self { dim, terms };
                }
                powers[i] += 1;
                if powers[i] <= degree {
                    break;
                }
                powers[i] = 0;
                i += 1;
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (c, a, p) in &self.terms {
            out[*c] += a * p.iter().zip(x).map(|(&e, v)| v.powi(e as i32)).product::<f64>();
        }
        out
    }
}

pub fn to_rows(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// `max |a - b| / max |b|`.
pub fn rel_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let scale = b.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> Mat<f64> {
    Mat::from_fn(n, n, |_, _| scale * rng.random_range(-1.0..1.0))
}
