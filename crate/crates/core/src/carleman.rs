//! Polynomial ODEs in tensor-power block form and their truncated Carleman
//! embedding.
//!
//! A polynomial field is `dx/dt = b_0 + B_1 x + B_2 x^{⊗2} + ... + B_k x^{⊗k}`
//! with `B_j` of shape `d x d^j`. Tensor powers use the standard Kronecker
//! layout `x^{⊗j} = x ⊗ x^{⊗(j-1)}`. The lifted state stacks
//! `y_i = x^{⊗i}` for `i = 1..=N`; for fields with a constant term an extra
//! trailing coordinate `y_0 = 1` with zero dynamics is appended.

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{identity, kron};
use crate::models::ModelSpec;

/// Side above which the automatic policy switches to structured storage.
pub const DEFAULT_DENSE_CAP: usize = 4000;

/// One term `coeff * prod_v x_v^{powers[v]}` of component `component`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub component: usize,
    pub coeff: f64,
    pub powers: Vec<u32>,
}

impl Monomial {
    pub fn new(component: usize, coeff: f64, powers: &[u32]) -> Self {
        Self { component, coeff, powers: powers.to_vec() }
    }

    pub fn degree(&self) -> usize {
        self.powers.iter().map(|&p| p as usize).sum()
    }
}

/// `x^{⊗p}` with the last factor varying fastest.
pub fn tensor_power(x: &[f64], p: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..p {
        out = out
            .iter()
            .flat_map(|&a| x.iter().map(move |&b| a * b))
            .collect();
    }
    out
}

/// Polynomial vector field in block form.
#[derive(Debug, Clone)]
pub struct PolynomialOde {
    dim: usize,
    constant: Option<Vec<f64>>,
    /// `blocks[j - 1] = B_j`
    blocks: Vec<Mat<f64>>,
}

impl PolynomialOde {
    /// Field from blocks `B_1, ..., B_k`.
    pub fn new(dim: usize, blocks: Vec<Mat<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        for (j, b) in blocks.iter().enumerate() {
            let cols = dim.pow(j as u32 + 1);
            if b.nrows() != dim || b.ncols() != cols {
                return Err(Error::invalid(format!(
                    "B_{} must be {dim} x {cols}, got {} x {}",
                    j + 1,
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { dim, constant: None, blocks })
    }

    /// Adds the constant term `b_0`.
    pub fn with_constant(mut self, b0: Vec<f64>) -> Result<Self> {
        if b0.len() != self.dim {
            return Err(Error::invalid(format!(
                "constant term has {} entries, expected {}",
                b0.len(),
                self.dim
            )));
        }
        self.constant = if b0.iter().all(|&c| c == 0.0) { None } else { Some(b0) };
        Ok(self)
    }

    /// Builds the block form from a list of monomials.
    ///
    /// A degree-`j` monomial goes into the column of `B_j` indexed by its
    /// variables sorted ascending.
    pub fn from_terms(dim: usize, terms: &[Monomial]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let degree = terms
            .iter()
            .filter(|t| t.coeff != 0.0)
            .map(Monomial::degree)
            .max()
            .unwrap_or(0);
        let mut blocks: Vec<Mat<f64>> =
            (1..=degree).map(|j| Mat::zeros(dim, dim.pow(j as u32))).collect();
        let mut constant = vec![0.0; dim];
        for t in terms {
            if t.component >= dim || t.powers.len() != dim {
                return Err(Error::invalid(format!(
                    "monomial {t:?} does not fit a {dim}-dimensional field"
                )));
            }
            if t.coeff == 0.0 {
                continue;
            }
            let j = t.degree();
            if j == 0 {
                constant[t.component] += t.coeff;
                continue;
            }
            let col = t
                .powers
                .iter()
                .enumerate()
                .flat_map(|(v, &p)| std::iter::repeat_n(v, p as usize))
                .fold(0, |acc, v| acc * dim + v);
            blocks[j - 1][(t.component, col)] += t.coeff;
        }
        Self::new(dim, blocks)?.with_constant(constant)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest `j` with a stored block.
    pub fn degree(&self) -> usize {
        self.blocks.len()
    }

    /// `B_j` for `1 <= j <= degree`.
    pub fn block(&self, j: usize) -> Option<&Mat<f64>> {
        j.checked_sub(1).and_then(|i| self.blocks.get(i))
    }

    pub fn constant(&self) -> Option<&[f64]> {
        self.constant.as_deref()
    }

    pub fn is_affine(&self) -> bool {
        self.constant.is_some()
    }

    /// `b_0 + sum_j B_j x^{⊗j}`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.constant.clone().unwrap_or_else(|| vec![0.0; self.dim]);
        let mut power = vec![1.0];
        for b in &self.blocks {
            power = power
                .iter()
                .flat_map(|&a| x.iter().map(move |&c| a * c))
                .collect();
            for (j, &p) in power.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (o, &c) in out.iter_mut().zip(b.col(j).iter()) {
                    *o += c * p;
                }
            }
        }
        out
    }

    /// `B_j` as a `d x d^j` matrix, with `B_0 = b_0` as a column.
    fn coefficient_block(&self, j: usize) -> Option<Mat<f64>> {
        if j == 0 {
            self.constant
                .as_ref()
                .map(|b| Mat::from_fn(self.dim, 1, |i, _| b[i]))
        } else {
            self.block(j).cloned()
        }
    }

    fn lowest_order(&self) -> usize {
        usize::from(!self.is_affine())
    }
}

/// Carleman transfer block `sum_{v=1..i} I^{⊗(v-1)} ⊗ B_j ⊗ I^{⊗(i-v)}`,
/// of shape `d^i x d^(i+j-1)`. `j = 0` is accepted for affine fields.
pub fn transfer_block(i: usize, j: usize, poly: &PolynomialOde) -> Result<Mat<f64>> {
    if i == 0 {
        return Err(Error::invalid("tensor order i must be at least 1"));
    }
    let b = poly
        .coefficient_block(j)
        .ok_or_else(|| Error::invalid(format!("no coefficient block B_{j} in this field")))?;
    let d = poly.dim();
    let rows = d.pow(i as u32);
    let cols = d.pow((i + j - 1) as u32);
    let mut acc = Mat::<f64>::zeros(rows, cols);
    for v in 1..=i {
        let left = identity(d.pow(v as u32 - 1));
        let right = identity(d.pow((i - v) as u32));
        let term = kron(kron(left.as_ref(), b.as_ref()).as_ref(), right.as_ref());
        acc += term;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Storage {
    /// Fully materialized matrix.
    Dense,
    /// Only the coefficient blocks are stored; products are applied through
    /// their Kronecker structure.
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoragePolicy {
    /// Dense when the side is at most `dense_cap`, structured otherwise.
    Auto { dense_cap: usize },
    /// Always dense; sides above `cap` are a resource error.
    Dense { cap: usize },
    Structured,
}

impl Default for StoragePolicy {
    fn default() -> Self {
        StoragePolicy::Auto { dense_cap: DEFAULT_DENSE_CAP }
    }
}

/// Nonzero `(row, col, value)` triples of one coefficient block.
type Sparse = Vec<(usize, usize, f64)>;

/// Truncated Carleman system `dy/dt = A_N y`.
#[derive(Debug, Clone)]
pub struct CarlemanSystem {
    poly: PolynomialOde,
    truncation: usize,
    /// `offsets[i - 1]..offsets[i]` is block `y_i`.
    offsets: Vec<usize>,
    /// Nonzeros of `B_j`, indexed by `j` (index 0 is `b_0`).
    coeffs: Vec<Sparse>,
    dense: Option<Mat<f64>>,
}

/// `sum_{i=1..n} d^i`.
pub fn carleman_side(dim: usize, truncation: usize) -> usize {
    (1..=truncation).map(|i| dim.pow(i as u32)).sum()
}

/// Koopman lift side `n^d`.
pub fn koopman_side(dim: usize, count: usize) -> usize {
    count.pow(dim as u32)
}

/// Assembles `A_N` with the default storage policy.
pub fn build_carleman_matrix(poly: &PolynomialOde, truncation: usize) -> Result<CarlemanSystem> {
    CarlemanSystem::build(poly, truncation, StoragePolicy::default())
}

impl CarlemanSystem {
    pub fn build(poly: &PolynomialOde, truncation: usize, policy: StoragePolicy) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::invalid("truncation order must be at least 1"));
        }
        let d = poly.dim();
        let mut offsets = vec![0usize];
        for i in 1..=truncation {
            let size = d
                .checked_pow(i as u32)
                .and_then(|s| s.checked_add(*offsets.last().unwrap()))
                .ok_or_else(|| Error::Resource(format!("Carleman side overflows at order {i}")))?;
            offsets.push(size);
        }
        let coeffs = (0..=poly.degree())
            .map(|j| {
                poly.coefficient_block(j)
                    .map(|b| {
                        let mut nz = Vec::new();
                        for c in 0..b.ncols() {
                            for r in 0..b.nrows() {
                                if b[(r, c)] != 0.0 {
                                    nz.push((r, c, b[(r, c)]));
                                }
                            }
                        }
                        nz
                    })
                    .unwrap_or_default()
            })
            .collect();
        let mut sys = Self {
            poly: poly.clone(),
            truncation,
            offsets,
            coeffs,
            dense: None,
        };
        let side = sys.side();
        let dense = match policy {
            StoragePolicy::Auto { dense_cap } => side <= dense_cap,
            StoragePolicy::Dense { cap } => {
                if side > cap {
                    return Err(Error::Resource(format!(
                        "dense Carleman matrix of side {side} exceeds the cap of {cap}; use structured storage"
                    )));
                }
                true
            }
            StoragePolicy::Structured => false,
        };
        if dense {
            sys.dense = Some(sys.assemble_dense()?);
        }
        Ok(sys)
    }

    fn assemble_dense(&self) -> Result<Mat<f64>> {
        let n = self.state_len();
        let mut a = Mat::<f64>::zeros(n, n);
        for i in 1..=self.truncation {
            for j in self.poly.lowest_order()..=self.poly.degree() {
                let m = i + j - 1;
                if m > self.truncation {
                    continue;
                }
                let block = transfer_block(i, j, &self.poly)?;
                let r0 = self.offsets[i - 1];
                // m == 0 is the appended constant coordinate
                let c0 = if m == 0 { self.side() } else { self.offsets[m - 1] };
                for c in 0..block.ncols() {
                    for r in 0..block.nrows() {
                        a[(r0 + r, c0 + c)] += block[(r, c)];
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `sum_{i=1..N} d^i`, the number of tensor-power coordinates.
    pub fn side(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Length of the evolved state: `side()` plus one for affine fields.
    pub fn state_len(&self) -> usize {
        self.side() + usize::from(self.poly.is_affine())
    }

    pub fn block_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn polynomial(&self) -> &PolynomialOde {
        &self.poly
    }

    pub fn storage(&self) -> Storage {
        if self.dense.is_some() {
            Storage::Dense
        } else {
            Storage::Structured
        }
    }

    pub fn dense(&self) -> Option<&Mat<f64>> {
        self.dense.as_ref()
    }

    /// Materializes the full matrix; errors when the side exceeds `cap`.
    pub fn to_dense(&self, cap: usize) -> Result<Mat<f64>> {
        if let Some(a) = &self.dense {
            return Ok(a.clone());
        }
        if self.side() > cap {
            return Err(Error::Resource(format!(
                "dense Carleman matrix of side {} exceeds the cap of {cap}",
                self.side()
            )));
        }
        self.assemble_dense()
    }

    /// Initial lifted state, including the constant coordinate when affine.
    pub fn initial_state(&self, x0: &[f64]) -> Result<Vec<f64>> {
        if x0.len() != self.dim() {
            return Err(Error::invalid(format!(
                "initial state has {} components, expected {}",
                x0.len(),
                self.dim()
            )));
        }
        let mut y = carleman_initial(x0, self.truncation)?;
        if self.poly.is_affine() {
            y.push(1.0);
        }
        Ok(y)
    }

    /// `out = A_N y` through the Kronecker structure of the transfer blocks.
    pub fn apply_structured(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.state_len());
        assert_eq!(out.len(), self.state_len());
        out.fill(0.0);
        let d = self.dim();
        let constant = if self.poly.is_affine() { y[self.side()] } else { 0.0 };
        for i in 1..=self.truncation {
            let (r0, r1) = (self.offsets[i - 1], self.offsets[i]);
            let out_block = &mut out[r0..r1];
            for (j, nz) in self.coeffs.iter().enumerate() {
                if nz.is_empty() {
                    continue;
                }
                let m = i + j - 1;
                if m > self.truncation {
                    continue;
                }
                let constant_slice = [constant];
                let input: &[f64] = if m == 0 {
                    &constant_slice
                } else {
                    &y[self.offsets[m - 1]..self.offsets[m]]
                };
                let dj = d.pow(j as u32);
                for v in 1..=i {
                    let outer = d.pow(v as u32 - 1);
                    let inner = d.pow((i - v) as u32);
                    for alpha in 0..outer {
                        for &(a, beta, c) in nz {
                            let o = (alpha * d + a) * inner;
                            let s = (alpha * dj + beta) * inner;
                            for gamma in 0..inner {
                                out_block[o + gamma] += c * input[s + gamma];
                            }
                        }
                    }
                }
            }
        }
    }

    /// Bound on the induced infinity-norm of `A_N`.
    pub fn norm_bound(&self) -> f64 {
        let d = self.dim();
        let row_sums: Vec<f64> = self
            .coeffs
            .iter()
            .map(|nz| {
                let mut rows = vec![0.0; d];
                for &(r, _, c) in nz {
                    rows[r] += c.abs();
                }
                rows.into_iter().fold(0.0, f64::max)
            })
            .collect();
        (1..=self.truncation)
            .map(|i| {
                row_sums
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| i + j >= 1 && i + j - 1 <= self.truncation)
                    .map(|(_, s)| i as f64 * s)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Stacked `x0^{⊗1}, ..., x0^{⊗N}`.
pub fn carleman_initial(x0: &[f64], truncation: usize) -> Result<Vec<f64>> {
    if truncation == 0 {
        return Err(Error::invalid("truncation order must be at least 1"));
    }
    let mut out = Vec::with_capacity(carleman_side(x0.len(), truncation));
    let mut power = vec![1.0];
    for _ in 0..truncation {
        power = power
            .iter()
            .flat_map(|&a| x0.iter().map(move |&b| a * b))
            .collect();
        out.extend_from_slice(&power);
    }
    Ok(out)
}

/// Polynomial form of `model`, Taylor-expanded about the origin up to total
/// degree `order` when the field is not polynomial.
pub fn taylor_polynomialize(model: &ModelSpec, order: usize) -> Result<PolynomialOde> {
    let terms = model.taylor_terms(order).ok_or_else(|| {
        Error::invalid(format!("model '{}' has no polynomial or Taylor representation", model.name()))
    })?;
    PolynomialOde::from_terms(model.dim(), &terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> Mat<f64> {
        Mat::from_fn(1, 1, |_, _| v)
    }

    fn quadratic() -> PolynomialOde {
        PolynomialOde::new(1, vec![scalar(0.0), scalar(1.0)]).unwrap()
    }

    #[test]
    fn quadratic_matches_superdiagonal() {
        for n in 1..=8 {
            let sys = build_carleman_matrix(&quadratic(), n).unwrap();
            let a = sys.dense().unwrap();
            assert_eq!(a.nrows(), n);
            for i in 0..n {
                for j in 0..n {
                    let expected = if j == i + 1 { (i + 1) as f64 } else { 0.0 };
                    assert_eq!(a[(i, j)], expected);
                }
            }
        }
    }

    #[test]
    fn linear_scalar_is_diagonal() {
        let poly = PolynomialOde::new(1, vec![scalar(-0.7)]).unwrap();
        let a = build_carleman_matrix(&poly, 3).unwrap().dense().unwrap().clone();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { -0.7 * (i + 1) as f64 } else { 0.0 };
                assert!((a[(i, j)] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn transfer_block_examples() {
        let b2 = quadratic();
        assert_eq!(transfer_block(3, 2, &b2).unwrap()[(0, 0)], 3.0);
        assert_eq!(transfer_block(1, 2, &b2).unwrap()[(0, 0)], 1.0);

        let a = Mat::from_fn(2, 2, |i, j| [[1.0, 2.0], [-3.0, 0.5]][i][j]);
        let poly = PolynomialOde::new(2, vec![a.clone()]).unwrap();
        let t = transfer_block(2, 1, &poly).unwrap();
        let i2 = identity(2);
        let expected = kron(i2.as_ref(), a.as_ref()) + kron(a.as_ref(), i2.as_ref());
        assert_eq!(t, expected);
        assert_eq!(transfer_block(1, 1, &poly).unwrap(), a);

        // d/dt (x ⊗ x) = (I⊗A + A⊗I)(x ⊗ x) for dx/dt = A x
        let x = [0.3, -1.2];
        let ax = crate::linalg::matvec(a.as_ref(), &x);
        let lhs: Vec<f64> = tensor_power(&x, 2)
            .iter()
            .enumerate()
            .map(|(k, _)| ax[k / 2] * x[k % 2] + x[k / 2] * ax[k % 2])
            .collect();
        let rhs = crate::linalg::matvec(t.as_ref(), &tensor_power(&x, 2));
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() < 1e-14);
        }

        assert!(transfer_block(0, 1, &poly).is_err());
        assert!(transfer_block(1, 2, &poly).is_err());
        assert!(transfer_block(1, 0, &poly).is_err());
    }

    #[test]
    fn initial_vectors() {
        let y = carleman_initial(&[0.08], 3).unwrap();
        assert_eq!(y[0], 0.08);
        assert!((y[1] - 0.0064).abs() < 1e-18);
        assert!((y[2] - 0.000512).abs() < 1e-18);
        assert_eq!(carleman_initial(&[1.0, 0.0], 2).unwrap(), vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(carleman_initial(&[0.1, -0.2, 0.3], 1).unwrap(), vec![0.1, -0.2, 0.3]);
        assert!(carleman_initial(&[1.0], 0).is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(carleman_side(3, 9), 29523);
        assert_eq!(carleman_side(2, 9), 1022);
        assert_eq!(koopman_side(2, 9), 81);
        assert_eq!(koopman_side(3, 9), 729);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let poly = PolynomialOde::from_terms(3, &[Monomial::new(0, 1.0, &[0, 1, 1])]).unwrap();
        let err = CarlemanSystem::build(&poly, 9, StoragePolicy::Dense { cap: 4000 }).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        let sys = build_carleman_matrix(&poly, 9).unwrap();
        assert_eq!(sys.storage(), Storage::Structured);
        assert_eq!(sys.side(), 29523);
        assert!(sys.to_dense(4000).is_err());
    }

    #[test]
    fn terms_round_trip_through_eval() {
        let terms = [
            Monomial::new(0, 1.1, &[1, 0]),
            Monomial::new(0, -0.4, &[1, 1]),
            Monomial::new(1, 0.1, &[1, 1]),
            Monomial::new(1, -0.4, &[0, 1]),
            Monomial::new(1, 2.0, &[0, 0]),
            Monomial::new(0, 0.5, &[2, 1]),
        ];
        let poly = PolynomialOde::from_terms(2, &terms).unwrap();
        assert_eq!(poly.degree(), 3);
        assert_eq!(poly.constant(), Some(&[0.0, 2.0][..]));
        let x = [0.7, -1.3];
        let got = poly.eval(&x);
        let f0 = 1.1 * x[0] - 0.4 * x[0] * x[1] + 0.5 * x[0] * x[0] * x[1];
        let f1 = 0.1 * x[0] * x[1] - 0.4 * x[1] + 2.0;
        assert!((got[0] - f0).abs() < 1e-14 && (got[1] - f1).abs() < 1e-14);
    }

    #[test]
    fn affine_system_layout() {
        // dx/dt = 1 - x^2
        let poly = PolynomialOde::from_terms(
            1,
            &[Monomial::new(0, 1.0, &[0]), Monomial::new(0, -1.0, &[2])],
        )
        .unwrap();
        let sys = build_carleman_matrix(&poly, 3).unwrap();
        assert_eq!(sys.side(), 3);
        assert_eq!(sys.state_len(), 4);
        let a = sys.dense().unwrap();
        // d/dt x^i = i x^{i-1} - i x^{i+1}
        let expected = [
            [0.0, -1.0, 0.0, 1.0],
            [2.0, 0.0, -2.0, 0.0],
            [0.0, 3.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a[(i, j)], expected[i][j], "({i},{j})");
            }
        }
        assert_eq!(sys.initial_state(&[0.5]).unwrap(), vec![0.5, 0.25, 0.125, 1.0]);
    }
}
