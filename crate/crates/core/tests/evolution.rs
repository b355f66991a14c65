mod common;

use common::*;
use faer::Mat;
use koopman_lin::carleman::{CarlemanSystem, PolynomialOde, StoragePolicy};
use koopman_lin::evolve::{
    evolve_dense, evolve_stepped, extract_carleman_state, extract_observable, koopman_mode_solution,
    matrix_exponential, uniform_times,
};
use koopman_lin::grid::CollocationGrid;
use koopman_lin::koopman::{build_koopman_matrix, coordinate_initial_vectors, initial_vector};
use koopman_lin::models;
use koopman_lin::reference::{integrate, IntegratorConfig};
use rand::Rng;

fn max_rel(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    rel_diff(a, b)
}

#[test]
fn semigroup_property() {
    let mut r = rng(21);
    for _ in 0..5 {
        let mut m = random_matrix(&mut r, 10, 1.0);
        let norm = (0..10).map(|i| (0..10).map(|j| m[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
        m = &m * faer::Scale(5.0 / norm);
        let (s, t) = (r.random_range(0.0..1.0), r.random_range(0.0..1.0));
        let whole = matrix_exponential((&m * faer::Scale(s + t)).as_ref()).unwrap();
        let a = matrix_exponential((&m * faer::Scale(s)).as_ref()).unwrap();
        let b = matrix_exponential((&m * faer::Scale(t)).as_ref()).unwrap();
        let prod = &a * &b;
        assert!(rel_diff(&to_rows(&prod), &to_rows(&whole)) <= 1e-9);
    }
}

/// Rounding is amplified by `cond(V)` and by `exp(T max Re(lambda))`, so
/// agreement is only expected when both are moderate.
fn well_conditioned(cond: f64, abscissa: f64, horizon: f64) -> bool {
    cond < 1e8 && (abscissa * horizon).exp() <= 1e7
}

#[test]
fn modes_agree_with_dense_on_well_conditioned_lifts() {
    let mut checked = 0;
    let mut all = models::catalog();
    all.push(models::linear(-0.7));
    for model in all {
        let d = model.defaults();
        for n in [3, 5, 7, 9] {
            if d.x0.len() == 3 && n > 3 {
                continue;
            }
            let grid = CollocationGrid::around(&d.x0, &d.radius, n).unwrap();
            let k = build_koopman_matrix(model.field().as_ref(), &grid).unwrap();
            let y0 = &coordinate_initial_vectors(&grid)[0];
            let times = uniform_times(d.horizon, 101);
            let Ok((modal, eig)) = koopman_mode_solution(k.matrix().as_ref(), y0, &times) else {
                continue;
            };
            if !well_conditioned(eig.condition(), eig.spectral_abscissa(), d.horizon) {
                continue;
            }
            let dense = evolve_dense(k.matrix().as_ref(), y0, &times).unwrap();
            let e = max_rel(modal.values(), dense.values());
            assert!(e <= 1e-7, "{} n={n}: {e:e}", model.name());
            checked += 1;
        }
    }
    assert!(checked >= 12, "only {checked} lifts checked");
}

#[test]
fn quadratic_lift_modes_track_dense_where_read() {
    let q = models::quadratic();
    let grid = CollocationGrid::around(&[0.08], &[0.03], 11).unwrap();
    let k = build_koopman_matrix(q.field().as_ref(), &grid).unwrap();
    let y0 = initial_vector(&|x: &[f64]| x[0], &grid).unwrap();
    let times = uniform_times(10.0, 201);
    let dense = evolve_dense(k.matrix().as_ref(), &y0, &times).unwrap();
    let (modal, eig) = koopman_mode_solution(k.matrix().as_ref(), &y0, &times).unwrap();
    let (at0, _) = eig.evaluate(0.0);
    for (a, b) in at0.iter().zip(&y0) {
        assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()));
    }
    // early samples agree fully; later ones only at the middle entry, since
    // growth of exp(10 * 2.6) amplifies rounding at the outer nodes
    assert!(max_rel(&modal.values()[..26], &dense.values()[..26]) <= 1e-8);
    let mid = k.middle_index();
    let a = extract_observable(&modal, mid).unwrap();
    let b = extract_observable(&dense, mid).unwrap();
    assert!(max_rel(a.values(), b.values()) <= 1e-4);
    assert!((b.values()[200][0] - 0.4).abs() < 1e-3);
}

#[test]
fn stepped_agrees_with_dense_on_random_systems() {
    let mut r = rng(8);
    for _ in 0..3 {
        let m = random_matrix(&mut r, 50, 1.0 / 50f64.sqrt());
        let y0: Vec<f64> = (0..50).map(|_| r.random_range(-1.0..1.0)).collect();
        let times = uniform_times(2.0, 21);
        let dense = evolve_dense(m.as_ref(), &y0, &times).unwrap();
        let stepped = evolve_stepped(&m, &y0, &times, 50).unwrap();
        assert!(max_rel(stepped.values(), dense.values()) <= 1e-6);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let q = models::quadratic();
    let exact = q.closed_form(5.0, &[0.08]).unwrap()[0];
    let err = |steps| {
        let cfg = IntegratorConfig { steps_per_unit: steps };
        let traj = integrate(q.field().as_ref(), &[0.08], 5.0, cfg, &[0.0, 5.0]).unwrap();
        (traj.values()[1][0] - exact).abs()
    };
    let ratio = err(2) / err(4);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn structured_carleman_evolution_matches_dense() {
    let ko = models::kraichnan_orszag();
    let poly = PolynomialOde::from_terms(3, &ko.taylor_terms(2).unwrap()).unwrap();
    let dense = CarlemanSystem::build(&poly, 4, StoragePolicy::Dense { cap: 4000 }).unwrap();
    let structured = CarlemanSystem::build(&poly, 4, StoragePolicy::Structured).unwrap();
    let x0 = &ko.defaults().x0;
    let times = uniform_times(5.0, 51);
    let a = evolve_dense(dense.dense().unwrap().as_ref(), &dense.initial_state(x0).unwrap(), &times).unwrap();
    let b = evolve_stepped(&structured, &structured.initial_state(x0).unwrap(), &times, 20).unwrap();
    let (a, b) = (extract_carleman_state(&a, 3).unwrap(), extract_carleman_state(&b, 3).unwrap());
    assert!(max_rel(b.values(), a.values()) <= 1e-6);
    assert_eq!(a.values()[0], x0.clone());
}

#[test]
fn divergence_is_flagged_not_fatal() {
    let m = Mat::from_fn(1, 1, |_, _| 100.0);
    let traj = evolve_dense(m.as_ref(), &[1.0], &uniform_times(10.0, 11)).unwrap();
    assert_eq!(traj.diverged_from(), Some(7));
    assert!(traj.values()[10][0].is_nan());
}
