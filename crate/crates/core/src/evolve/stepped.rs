//! Classical RK4 on a linear field, for systems too large to exponentiate.

use super::{check_times, overflowed, LinearOperator, TrajectorySample};
use crate::error::{Error, Result};

/// Step-size target `h * ||M|| <= STEP_NORM`.
const STEP_NORM: f64 = 0.05;

/// Substeps per interval of length `dt` that keep `h * ||M||` small.
pub fn auto_substeps<O: LinearOperator + ?Sized>(op: &O, dt: f64) -> usize {
    let n = (dt.abs() * op.norm_bound() / STEP_NORM).ceil();
    if n.is_finite() {
        (n as usize).max(1)
    } else {
        1
    }
}

/// Integrates `dy/dt = M y` with `substeps` uniform RK4 steps between
/// consecutive sample times (and from 0 to the first sample).
pub fn evolve_stepped<O: LinearOperator + ?Sized>(
    op: &O,
    y0: &[f64],
    times: &[f64],
    substeps: usize,
) -> Result<TrajectorySample> {
    if substeps == 0 {
        return Err(Error::invalid("substeps must be at least 1"));
    }
    check_times(times)?;
    let n = op.dim();
    if y0.len() != n {
        return Err(Error::invalid(format!(
            "initial vector has length {}, expected {n}",
            y0.len()
        )));
    }

    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut values = Vec::with_capacity(times.len());
    let mut diverged = None;
    let mut t_prev = 0.0;
    for (k, &t) in times.iter().enumerate() {
        if diverged.is_none() {
            let h = (t - t_prev) / substeps as f64;
            if h > 0.0 {
                for _ in 0..substeps {
                    op.apply(&y, &mut k1);
                    axpy_into(&mut tmp, &y, 0.5 * h, &k1);
                    op.apply(&tmp, &mut k2);
                    axpy_into(&mut tmp, &y, 0.5 * h, &k2);
                    op.apply(&tmp, &mut k3);
                    axpy_into(&mut tmp, &y, h, &k3);
                    op.apply(&tmp, &mut k4);
                    for i in 0..n {
                        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                    }
                }
            }
            if overflowed(&y) {
                diverged = Some(k);
            }
        }
        values.push(y.clone());
        t_prev = t;
    }
    let mut traj = TrajectorySample { times: times.to_vec(), values, diverged_from: None };
    if let Some(k) = diverged {
        traj.mark_diverged(k);
    }
    Ok(traj)
}

fn axpy_into(out: &mut [f64], y: &[f64], a: f64, x: &[f64]) {
    for ((o, &yi), &xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + a * xi;
    }
}
