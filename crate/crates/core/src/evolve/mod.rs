//! Evolution of lifted linear systems `dy/dt = M y`.

mod expm;
mod modes;
mod stepped;

use faer::{Mat, MatRef};

use crate::carleman::CarlemanSystem;
use crate::error::{Error, Result};
use crate::linalg::{matvec, norm_inf};

pub use expm::matrix_exponential;
pub use modes::{eigen_solution, koopman_mode_solution, EigenSolution, MAX_CONDITION};
pub use stepped::{auto_substeps, evolve_stepped};

/// Magnitude beyond which a trajectory is considered to have diverged.
pub const OVERFLOW_LIMIT: f64 = 1e300;

/// Vectors sampled at increasing times.
///
/// Samples at and after `diverged_from` are NaN and never valid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    diverged_from: Option<usize>,
}

impl TrajectorySample {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} sample times but {} samples",
                times.len(),
                values.len()
            )));
        }
        let mut traj = Self { times, values, diverged_from: None };
        if let Some(k) = traj.values.iter().position(|v| overflowed(v)) {
            traj.mark_diverged(k);
        }
        Ok(traj)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Length of each sample vector.
    pub fn width(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn diverged_from(&self) -> Option<usize> {
        self.diverged_from
    }

    pub fn is_diverged(&self) -> bool {
        self.diverged_from.is_some()
    }

    pub fn is_valid(&self, k: usize) -> bool {
        k < self.len() && self.diverged_from.is_none_or(|d| k < d)
    }

    /// Invalidates sample `k` and everything after it.
    pub fn mark_diverged(&mut self, k: usize) {
        let k = self.diverged_from.map_or(k, |d| d.min(k));
        for v in &mut self.values[k..] {
            v.iter_mut().for_each(|x| *x = f64::NAN);
        }
        self.diverged_from = Some(k);
    }

    /// Component `index` of every sample.
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[index]).collect()
    }

    /// Joins scalar (or narrower) series sampled at the same times into one.
    pub fn stack(parts: &[TrajectorySample]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("nothing to stack"))?;
        if parts.iter().any(|p| p.times != first.times) {
            return Err(Error::invalid("stacked series must share sample times"));
        }
        let values = (0..first.len())
            .map(|k| parts.iter().flat_map(|p| p.values[k].iter().copied()).collect())
            .collect();
        let mut out = Self { times: first.times.clone(), values, diverged_from: None };
        if let Some(k) = parts.iter().filter_map(|p| p.diverged_from).min() {
            out.mark_diverged(k);
        }
        Ok(out)
    }

    fn select(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v[range.clone()].to_vec()).collect(),
            diverged_from: self.diverged_from,
        }
    }
}

fn overflowed(v: &[f64]) -> bool {
    v.iter().any(|x| !x.is_finite() || x.abs() > OVERFLOW_LIMIT)
}

/// `n` uniform sample times on `[0, horizon]`.
pub fn uniform_times(horizon: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| horizon * k as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("at least one sample time is required"));
    }
    if times.iter().any(|t| !t.is_finite()) || times[0] < 0.0 {
        return Err(Error::invalid("sample times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("sample times must be ascending"));
    }
    Ok(())
}

/// Operator `y -> M y` for time stepping.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, y: &[f64], out: &mut [f64]);
    /// Upper bound on the induced infinity-norm.
    fn norm_bound(&self) -> f64;
}

impl LinearOperator for Mat<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&matvec(self.as_ref(), y));
    }

    fn norm_bound(&self) -> f64 {
        norm_inf(self.as_ref())
    }
}

impl LinearOperator for CarlemanSystem {
    fn dim(&self) -> usize {
        self.state_len()
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        match self.dense() {
            Some(a) => out.copy_from_slice(&matvec(a.as_ref(), y)),
            None => self.apply_structured(y, out),
        }
    }

    fn norm_bound(&self) -> f64 {
        match self.dense() {
            Some(a) => norm_inf(a.as_ref()),
            None => CarlemanSystem::norm_bound(self),
        }
    }
}

/// `y(t_k) = exp(M t_k) y0` for every sample time.
pub fn evolve_dense(m: MatRef<'_, f64>, y0: &[f64], times: &[f64]) -> Result<TrajectorySample> {
    Ok(evolve_dense_many(m, &[y0.to_vec()], times)?.remove(0))
}

/// [`evolve_dense`] for several initial vectors sharing one set of propagators.
///
/// Uniformly spaced times reuse a single `exp(M dt)`.
pub fn evolve_dense_many(
    m: MatRef<'_, f64>,
    initial: &[Vec<f64>],
    times: &[f64],
) -> Result<Vec<TrajectorySample>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid("matrix must be square"));
    }
    check_times(times)?;
    if let Some(y) = initial.iter().find(|y| y.len() != n) {
        return Err(Error::invalid(format!(
            "initial vector has length {}, expected {n}",
            y.len()
        )));
    }

    let steps: Vec<f64> = std::iter::once(times[0])
        .chain(times.windows(2).map(|w| w[1] - w[0]))
        .collect();
    let uniform = if times.len() > 2 {
        let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        steps[1..]
            .iter()
            .all(|&s| (s - h).abs() <= 1e-12 * h.abs())
            .then_some(h)
    } else {
        None
    };
    let shared = match uniform {
        Some(h) if h > 0.0 => Some(scaled_exponential(m, h)?),
        _ => None,
    };

    let mut out = Vec::with_capacity(initial.len());
    let mut ys: Vec<Vec<f64>> = initial.to_vec();
    let mut values: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(times.len()); initial.len()];
    let mut diverged: Vec<Option<usize>> = vec![None; initial.len()];
    for (k, &dt) in steps.iter().enumerate() {
        if dt > 0.0 {
            let own;
            let e = match (&shared, k) {
                (Some(e), k) if k > 0 => e,
                _ => {
                    own = scaled_exponential(m, dt)?;
                    &own
                }
            };
            for (y, div) in ys.iter_mut().zip(&diverged) {
                if div.is_none() {
                    *y = matvec(e.as_ref(), y);
                }
            }
        }
        for ((y, vals), div) in ys.iter().zip(values.iter_mut()).zip(diverged.iter_mut()) {
            if div.is_none() && overflowed(y) {
                *div = Some(k);
            }
            vals.push(if div.is_some() { vec![f64::NAN; n] } else { y.clone() });
        }
    }
    for (vals, div) in values.into_iter().zip(diverged) {
        let mut traj = TrajectorySample { times: times.to_vec(), values: vals, diverged_from: None };
        if let Some(k) = div {
            traj.mark_diverged(k);
        }
        out.push(traj);
    }
    Ok(out)
}

fn scaled_exponential(m: MatRef<'_, f64>, t: f64) -> Result<Mat<f64>> {
    let scaled = Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * t);
    matrix_exponential(scaled.as_ref())
}

/// Scalar series `y(t)[index]`, e.g. the middle entry of a Koopman lift.
pub fn extract_observable(traj: &TrajectorySample, index: usize) -> Result<TrajectorySample> {
    if index >= traj.width() {
        return Err(Error::invalid(format!(
            "index {index} out of range for vectors of length {}",
            traj.width()
        )));
    }
    Ok(traj.select(index..index + 1))
}

/// First `d` entries of a Carleman trajectory, the approximate state.
pub fn extract_carleman_state(traj: &TrajectorySample, d: usize) -> Result<TrajectorySample> {
    if d == 0 || d > traj.width() {
        return Err(Error::invalid(format!(
            "cannot take {d} state components from vectors of length {}",
            traj.width()
        )));
    }
    Ok(traj.select(0..d))
}
