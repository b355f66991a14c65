//! Order sweeps, radius sweeps and Koopman/Carleman comparisons.
//!
//! Every run evolves the lifted system over `[0, T]`, samples it at uniform
//! times, and scores it by the maximum absolute error over all samples and
//! state components against the closed form (when the model has one) or a
//! fine RK4 reference.

mod output;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::carleman::{build_carleman_matrix, koopman_side, taylor_polynomialize};
use crate::error::{Error, Result};
use crate::evolve::{
    auto_substeps, evolve_dense, evolve_dense_many, evolve_stepped, extract_carleman_state,
    extract_observable, uniform_times, TrajectorySample,
};
use crate::grid::CollocationGrid;
use crate::koopman::{build_koopman_matrix, coordinate_initial_vectors};
use crate::models::{self, ModelSpec};
use crate::par;
use crate::reference::{integrate, IntegratorConfig};

pub use output::{plot_svg, to_csv_string, write_csv};

/// Name of the error metric recorded with every result.
pub const ERROR_METRIC: &str = "max_abs_over_samples_and_components";
pub const DEFAULT_SAMPLES: usize = 201;
pub const DEFAULT_TAYLOR_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Koopman,
    Carleman,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Koopman => "koopman",
            Method::Carleman => "carleman",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "koopman" => Ok(Method::Koopman),
            "carleman" => Ok(Method::Carleman),
            other => Err(Error::invalid(format!("unknown method '{other}'"))),
        }
    }
}

/// Settings shared by every run of an experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: String,
    pub method: Method,
    pub orders: Vec<usize>,
    /// Per-axis radius; model default when `None`.
    pub radius: Option<Vec<f64>>,
    pub taylor_order: usize,
    /// Horizon override; model default when `None`.
    pub horizon: Option<f64>,
    pub samples: usize,
}

impl ExperimentConfig {
    pub fn new(model: &str, method: Method, orders: Vec<usize>) -> Self {
        Self {
            model: model.to_string(),
            method,
            orders,
            radius: None,
            taylor_order: DEFAULT_TAYLOR_ORDER,
            horizon: None,
            samples: DEFAULT_SAMPLES,
        }
    }

    fn validate(&self) -> Result<ModelSpec> {
        let model = lookup(&self.model)?;
        if self.orders.is_empty() {
            return Err(Error::invalid("order list is empty"));
        }
        if self.method == Method::Koopman {
            if let Some(n) = self.orders.iter().find(|&&n| n < 3 || n % 2 == 0) {
                return Err(Error::invalid(format!("Koopman orders must be odd and >= 3, got {n}")));
            }
        }
        if self.orders.contains(&0) {
            return Err(Error::invalid("orders must be positive"));
        }
        if self.samples < 2 {
            return Err(Error::invalid("at least two samples are required"));
        }
        if let Some(r) = &self.radius {
            if r.len() != model.dim() {
                return Err(Error::invalid(format!(
                    "model '{}' needs {} radius components, got {}",
                    model.name(),
                    model.dim(),
                    r.len()
                )));
            }
        }
        Ok(model)
    }

    fn horizon_for(&self, model: &ModelSpec) -> f64 {
        self.horizon.unwrap_or(model.defaults().horizon)
    }
}

pub fn lookup(name: &str) -> Result<ModelSpec> {
    models::by_name(name).ok_or_else(|| Error::invalid(format!("unknown model '{name}'")))
}

/// Approximate state trajectory from one lift.
#[derive(Debug, Clone)]
pub struct Solution {
    pub method: Method,
    pub order: usize,
    pub matrix_side: usize,
    pub trajectory: TrajectorySample,
    pub wall_time: Duration,
}

/// Koopman lift of `model` on a grid of `order` nodes per axis; each state
/// coordinate is read from the middle entry of its own evolved vector.
pub fn solve_koopman(model: &ModelSpec, order: usize, radius: &[f64], times: &[f64]) -> Result<Solution> {
    let start = Instant::now();
    let grid = CollocationGrid::around(&model.defaults().x0, radius, order)?;
    let lift = build_koopman_matrix(model.field().as_ref(), &grid)?;
    let initial = coordinate_initial_vectors(&grid);
    let full = evolve_dense_many(lift.matrix().as_ref(), &initial, times)?;
    let parts = full
        .iter()
        .map(|t| extract_observable(t, lift.middle_index()))
        .collect::<Result<Vec<_>>>()?;
    let trajectory = TrajectorySample::stack(&parts)?;
    Ok(Solution {
        method: Method::Koopman,
        order,
        matrix_side: lift.side(),
        trajectory,
        wall_time: start.elapsed(),
    })
}

/// Carleman lift truncated at `order`, on the polynomial (or Taylor) form of
/// the field. Systems above the dense cap are time-stepped.
pub fn solve_carleman(model: &ModelSpec, order: usize, taylor_order: usize, times: &[f64]) -> Result<Solution> {
    let start = Instant::now();
    let poly = taylor_polynomialize(model, taylor_order)?;
    let sys = build_carleman_matrix(&poly, order)?;
    let y0 = sys.initial_state(&model.defaults().x0)?;
    let full = match sys.dense() {
        Some(a) => evolve_dense(a.as_ref(), &y0, times)?,
        None => {
            let dt = times.windows(2).map(|w| w[1] - w[0]).fold(times[0], f64::max);
            let substeps = auto_substeps(&sys, dt);
            evolve_stepped(&sys, &y0, times, substeps)?
        }
    };
    let trajectory = extract_carleman_state(&full, model.dim())?;
    Ok(Solution {
        method: Method::Carleman,
        order,
        matrix_side: sys.side(),
        trajectory,
        wall_time: start.elapsed(),
    })
}

/// Closed-form trajectory when available, RK4 otherwise.
pub fn reference_solution(model: &ModelSpec, horizon: f64, times: &[f64]) -> Result<TrajectorySample> {
    let x0 = &model.defaults().x0;
    if model.has_closed_form() {
        let values = times
            .iter()
            .map(|&t| model.closed_form(t, x0).expect("closed form present"))
            .collect();
        TrajectorySample::new(times.to_vec(), values)
    } else {
        integrate(model.field().as_ref(), x0, horizon, IntegratorConfig::default(), times)
    }
}

/// Largest absolute difference over samples and components; any invalid
/// sample on either side makes the error infinite.
pub fn max_error(approx: &TrajectorySample, reference: &TrajectorySample) -> Result<f64> {
    if approx.times() != reference.times() {
        return Err(Error::invalid("series are sampled at different times"));
    }
    if approx.width() != reference.width() {
        return Err(Error::invalid(format!(
            "series widths differ ({} vs {})",
            approx.width(),
            reference.width()
        )));
    }
    let mut err = 0.0f64;
    for k in 0..approx.len() {
        if !approx.is_valid(k) || !reference.is_valid(k) {
            return Ok(f64::INFINITY);
        }
        for (a, b) in approx.values()[k].iter().zip(&reference.values()[k]) {
            let e = (a - b).abs();
            if !e.is_finite() {
                return Ok(f64::INFINITY);
            }
            err = err.max(e);
        }
    }
    Ok(err)
}

/// One row of a result table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: String,
    pub error: f64,
    pub matrix_side: usize,
    pub wall_time_seconds: f64,
    pub diverged: bool,
    /// Construction or evolution failure, if any.
    pub failure: Option<String>,
}

impl SweepRow {
    fn from_outcome(param: String, side: usize, outcome: Result<(Solution, f64)>) -> Self {
        match outcome {
            Ok((sol, error)) => SweepRow {
                param,
                error,
                matrix_side: sol.matrix_side,
                wall_time_seconds: sol.wall_time.as_secs_f64(),
                diverged: !error.is_finite(),
                failure: None,
            },
            Err(e) => SweepRow {
                param,
                error: f64::INFINITY,
                matrix_side: side,
                wall_time_seconds: 0.0,
                diverged: true,
                failure: Some(e.to_string()),
            },
        }
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// Result table of a sweep or comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub model: String,
    /// What `param` holds: `order`, `radius` or `method`.
    pub parameter: String,
    pub metric: &'static str,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(SweepRow::failed)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

fn scored(solution: Result<Solution>, reference: &TrajectorySample) -> Result<(Solution, f64)> {
    let sol = solution?;
    let err = max_error(&sol.trajectory, reference)?;
    Ok((sol, err))
}

/// Side of the lifted matrix for `method` at truncation `order`.
pub fn matrix_side(method: Method, dim: usize, order: usize) -> usize {
    match method {
        Method::Koopman => koopman_side(dim, order),
        Method::Carleman => crate::carleman::carleman_side(dim, order),
    }
}

/// Runs the configured method once per truncation order.
pub fn run_order_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let model = config.validate()?;
    let horizon = config.horizon_for(&model);
    let times = uniform_times(horizon, config.samples);
    let reference = reference_solution(&model, horizon, &times)?;
    let radius = config.radius.clone().unwrap_or_else(|| model.defaults().radius.clone());

    let rows = par::map_slice(&config.orders, |&n| {
        let solution = match config.method {
            Method::Koopman => solve_koopman(&model, n, &radius, &times),
            Method::Carleman => solve_carleman(&model, n, config.taylor_order, &times),
        };
        SweepRow::from_outcome(
            n.to_string(),
            matrix_side(config.method, model.dim(), n),
            scored(solution, &reference),
        )
    });
    Ok(SweepResult {
        model: model.name().to_string(),
        parameter: "order".into(),
        metric: ERROR_METRIC,
        rows,
    })
}

/// Koopman radius sweep along one axis (zero-based), other axes at defaults.
#[derive(Debug, Clone)]
pub struct RadiusSweepConfig {
    pub model: String,
    pub order: usize,
    pub axis: usize,
    pub radii: Vec<f64>,
    pub horizon: Option<f64>,
    pub samples: usize,
}

impl RadiusSweepConfig {
    pub fn new(model: &str, order: usize, axis: usize, radii: Vec<f64>) -> Self {
        Self {
            model: model.to_string(),
            order,
            axis,
            radii,
            horizon: None,
            samples: DEFAULT_SAMPLES,
        }
    }
}

pub fn run_radius_sweep(config: &RadiusSweepConfig) -> Result<SweepResult> {
    let model = lookup(&config.model)?;
    if config.axis >= model.dim() {
        return Err(Error::invalid(format!(
            "axis {} out of range for a {}-dimensional model",
            config.axis + 1,
            model.dim()
        )));
    }
    if config.radii.is_empty() {
        return Err(Error::invalid("radius list is empty"));
    }
    if config.order < 3 || config.order.is_multiple_of(2) {
        return Err(Error::invalid(format!("order must be odd and >= 3, got {}", config.order)));
    }
    if config.samples < 2 {
        return Err(Error::invalid("at least two samples are required"));
    }
    let horizon = config.horizon.unwrap_or(model.defaults().horizon);
    let times = uniform_times(horizon, config.samples);
    let reference = reference_solution(&model, horizon, &times)?;
    let side = koopman_side(model.dim(), config.order);

    let rows = par::map_slice(&config.radii, |&r| {
        let mut radius = model.defaults().radius.clone();
        radius[config.axis] = r;
        let solution = solve_koopman(&model, config.order, &radius, &times);
        SweepRow::from_outcome(r.to_string(), side, scored(solution, &reference))
    });
    Ok(SweepResult {
        model: model.name().to_string(),
        parameter: format!("radius_axis{}", config.axis + 1),
        metric: ERROR_METRIC,
        rows,
    })
}

/// `count` logarithmically spaced values from `center / spread` to
/// `center * spread`.
pub fn log_spaced(center: f64, spread: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![center];
    }
    let (lo, hi) = ((center / spread).ln(), (center * spread).ln());
    (0..count)
        .map(|k| (lo + (hi - lo) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Both methods at one truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub model: String,
    pub koopman: SweepRow,
    pub carleman: SweepRow,
}

impl Comparison {
    pub fn into_result(self) -> SweepResult {
        SweepResult {
            model: self.model,
            parameter: "method".into(),
            metric: ERROR_METRIC,
            rows: vec![self.koopman, self.carleman],
        }
    }
}

pub fn run_comparison(
    model_name: &str,
    order: usize,
    taylor_order: usize,
    horizon: Option<f64>,
    samples: usize,
) -> Result<Comparison> {
    let model = lookup(model_name)?;
    if order < 3 || order.is_multiple_of(2) {
        return Err(Error::invalid(format!("order must be odd and >= 3, got {order}")));
    }
    if samples < 2 {
        return Err(Error::invalid("at least two samples are required"));
    }
    let horizon = horizon.unwrap_or(model.defaults().horizon);
    let times = uniform_times(horizon, samples);
    let reference = reference_solution(&model, horizon, &times)?;
    let d = model.dim();
    let mut rows = par::map_slice(&[Method::Koopman, Method::Carleman], |&method| {
        let solution = match method {
            Method::Koopman => solve_koopman(&model, order, &model.defaults().radius, &times),
            Method::Carleman => solve_carleman(&model, order, taylor_order, &times),
        };
        SweepRow::from_outcome(method.to_string(), matrix_side(method, d, order), scored(solution, &reference))
    });
    let carleman = rows.pop().expect("two rows");
    let koopman = rows.pop().expect("two rows");
    Ok(Comparison { model: model.name().to_string(), koopman, carleman })
}
