//! Matrix exponential by scaling and squaring with Padé approximants
//! (Higham 2005, degrees 3/5/7/9/13).

use faer::linalg::matmul::matmul;
use faer::linalg::solvers::Solve;
use faer::{Accum, Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{is_finite, norm_one};
use crate::par;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn mul(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::<f64>::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, 1.0, par::faer_par());
    out
}

/// `sum_k c_k M_k + c_id I`.
fn combine(terms: &[(f64, &Mat<f64>)], c_id: f64, n: usize) -> Mat<f64> {
    let mut out = Mat::<f64>::zeros(n, n);
    for &(c, m) in terms {
        if c == 0.0 {
            continue;
        }
        for j in 0..n {
            for (o, &x) in out.col_mut(j).iter_mut().zip(m.col(j).iter()) {
                *o += c * x;
            }
        }
    }
    for i in 0..n {
        out[(i, i)] += c_id;
    }
    out
}

/// Odd/even parts `(U, V)` of the degree-`m` Padé numerator for `m <= 9`.
fn pade_low(a: &Mat<f64>, b: &[f64]) -> (Mat<f64>, Mat<f64>) {
    let n = a.nrows();
    let m = b.len() - 1;
    let a2 = mul(a.as_ref(), a.as_ref());
    let mut powers = vec![a2];
    while powers.len() < (m - 1) / 2 {
        let next = mul(powers.last().unwrap().as_ref(), powers[0].as_ref());
        powers.push(next);
    }
    // powers[p] = A^(2p+2)
    let odd: Vec<(f64, &Mat<f64>)> = powers
        .iter()
        .enumerate()
        .filter(|(p, _)| 2 * p + 3 <= m)
        .map(|(p, pw)| (b[2 * p + 3], pw))
        .collect();
    let inner = combine(&odd, b[1], n);
    let u = mul(a.as_ref(), inner.as_ref());
    let even: Vec<(f64, &Mat<f64>)> = powers
        .iter()
        .enumerate()
        .filter(|(p, _)| 2 * p + 2 <= m)
        .map(|(p, pw)| (b[2 * p + 2], pw))
        .collect();
    let v = combine(&even, b[0], n);
    (u, v)
}

fn pade13(a: &Mat<f64>) -> (Mat<f64>, Mat<f64>) {
    let n = a.nrows();
    let b = &B13;
    let a2 = mul(a.as_ref(), a.as_ref());
    let a4 = mul(a2.as_ref(), a2.as_ref());
    let a6 = mul(a4.as_ref(), a2.as_ref());
    let t = combine(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0, n);
    let inner = mul(a6.as_ref(), t.as_ref());
    let inner = combine(&[(1.0, &inner), (b[7], &a6), (b[5], &a4), (b[3], &a2)], b[1], n);
    let u = mul(a.as_ref(), inner.as_ref());
    let t = combine(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0, n);
    let v = mul(a6.as_ref(), t.as_ref());
    let v = combine(&[(1.0, &v), (b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0], n);
    (u, v)
}

/// `exp(m)` for a square real matrix.
pub fn matrix_exponential(m: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid("matrix exponential needs a square matrix"));
    }
    if !is_finite(m) {
        return Err(Error::invalid("matrix exponential input has non-finite entries"));
    }
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let norm = norm_one(m);
    if norm == 0.0 {
        return Ok(Mat::identity(n, n));
    }

    let mut squarings = 0;
    let a = m.to_owned();
    let (u, v) = if let Some(&(deg, _)) = THETA.iter().find(|(_, th)| norm <= *th) {
        let b: &[f64] = match deg {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            _ => &B9,
        };
        pade_low(&a, b)
    } else {
        squarings = (norm / THETA_13).log2().ceil().max(0.0) as u32;
        let scale = 0.5f64.powi(squarings as i32);
        let scaled = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
        pade13(&scaled)
    };

    let p = combine(&[(1.0, &v), (1.0, &u)], 0.0, n);
    let q = combine(&[(1.0, &v), (-1.0, &u)], 0.0, n);
    let mut r = q.partial_piv_lu().solve(&p);
    if !is_finite(r.as_ref()) {
        return Err(Error::Numerical("singular Padé denominator".into()));
    }
    for _ in 0..squarings {
        r = mul(r.as_ref(), r.as_ref());
    }
    Ok(r)
}
