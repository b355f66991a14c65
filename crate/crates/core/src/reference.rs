//! Fixed-step RK4 reference trajectories for the nonlinear systems.

use crate::error::{Error, Result};
use crate::evolve::{TrajectorySample, OVERFLOW_LIMIT};
use crate::koopman::VectorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorConfig {
    pub steps_per_unit: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { steps_per_unit: 10_000 }
    }
}

/// Integrates `dx/dt = f(x)` from `x0`, stepping exactly onto every sample time.
///
/// Each interval `[t_k, t_{k+1}]` is split into `ceil(dt * steps_per_unit)`
/// equal steps.
pub fn integrate<F: VectorField + ?Sized>(
    f: &F,
    x0: &[f64],
    horizon: f64,
    config: IntegratorConfig,
    times: &[f64],
) -> Result<TrajectorySample> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if config.steps_per_unit == 0 {
        return Err(Error::invalid("steps per unit time must be positive"));
    }
    if times.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
        return Err(Error::invalid("sample times must lie in [0, horizon]"));
    }
    crate::evolve::check_times(times)?;

    let d = x0.len();
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let mut values = Vec::with_capacity(times.len());
    let mut diverged = None;
    let mut t_prev = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let span = t - t_prev;
        if diverged.is_none() && span > 0.0 {
            let steps = (span * config.steps_per_unit as f64).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                f.eval(&x, &mut k1);
                for i in 0..d {
                    tmp[i] = x[i] + 0.5 * h * k1[i];
                }
                f.eval(&tmp, &mut k2);
                for i in 0..d {
                    tmp[i] = x[i] + 0.5 * h * k2[i];
                }
                f.eval(&tmp, &mut k3);
                for i in 0..d {
                    tmp[i] = x[i] + h * k3[i];
                }
                f.eval(&tmp, &mut k4);
                for i in 0..d {
                    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        if diverged.is_none() && x.iter().any(|v| !v.is_finite() || v.abs() > OVERFLOW_LIMIT) {
            diverged = Some(k);
        }
        values.push(x.clone());
        t_prev = t;
    }
    let mut traj = TrajectorySample::new(times.to_vec(), values)?;
    if let Some(k) = diverged {
        traj.mark_diverged(k);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::uniform_times;
    use crate::models;

    #[test]
    fn zero_field_is_constant() {
        let f = |_: &[f64], o: &mut [f64]| o.fill(0.0);
        let traj = integrate(&f, &[1.0, 2.0], 1.0, IntegratorConfig::default(), &[0.0, 0.5, 1.0]).unwrap();
        assert!(traj.values().iter().all(|v| v == &[1.0, 2.0]));
    }

    #[test]
    fn exponential_growth() {
        let f = |x: &[f64], o: &mut [f64]| o[0] = x[0];
        let traj = integrate(&f, &[1.0], 1.0, IntegratorConfig::default(), &[0.0, 1.0]).unwrap();
        assert!((traj.values()[1][0] - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn quadratic_against_closed_form() {
        let q = models::quadratic();
        let times = uniform_times(10.0, 201);
        let traj = integrate(q.field().as_ref(), &[0.08], 10.0, IntegratorConfig::default(), &times).unwrap();
        for (t, v) in times.iter().zip(traj.values()) {
            let exact = q.closed_form(*t, &[0.08]).unwrap()[0];
            assert!((v[0] - exact).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = |x: &[f64], o: &mut [f64]| o[0] = x[0];
        let c = IntegratorConfig::default();
        assert!(integrate(&f, &[1.0], 0.0, c, &[0.0]).is_err());
        assert!(integrate(&f, &[1.0], 1.0, c, &[0.0, 2.0]).is_err());
        assert!(integrate(&f, &[1.0], 1.0, IntegratorConfig { steps_per_unit: 0 }, &[0.0]).is_err());
    }

    #[test]
    fn blow_up_is_flagged() {
        // x' = x^2 from 1 blows up at t = 1
        let f = |x: &[f64], o: &mut [f64]| o[0] = x[0] * x[0];
        let traj = integrate(&f, &[1.0], 2.0, IntegratorConfig { steps_per_unit: 100 }, &uniform_times(2.0, 5)).unwrap();
        assert!(traj.is_diverged());
        assert!(!traj.is_valid(4));
    }
}
