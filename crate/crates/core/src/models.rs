//! Benchmark ODE systems and their default experiment settings.

use std::fmt;
use std::sync::Arc;

use crate::carleman::Monomial;

pub type FieldFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type ClosedFormFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
pub type TermsFn = Arc<dyn Fn(usize) -> Vec<Monomial> + Send + Sync>;

/// Default experiment parameters for a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub x0: Vec<f64>,
    pub horizon: f64,
    pub radius: Vec<f64>,
    pub order: usize,
}

/// An autonomous ODE `dx/dt = f(x)` with metadata used by the experiments.
#[derive(Clone)]
pub struct ModelSpec {
    name: &'static str,
    dim: usize,
    field: FieldFn,
    closed_form: Option<ClosedFormFn>,
    /// Monomials of the field's Taylor series about the origin, truncated at a
    /// given total degree. Exact for polynomial fields.
    terms: Option<TermsFn>,
    polynomial: bool,
    defaults: Defaults,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("closed_form", &self.closed_form.is_some())
            .field("polynomial", &self.polynomial)
            .field("defaults", &self.defaults)
            .finish()
    }
}

impl ModelSpec {
    pub fn new(name: &'static str, dim: usize, field: FieldFn, defaults: Defaults) -> Self {
        Self {
            name,
            dim,
            field,
            closed_form: None,
            terms: None,
            polynomial: false,
            defaults,
        }
    }

    pub fn with_closed_form(mut self, closed_form: ClosedFormFn) -> Self {
        self.closed_form = Some(closed_form);
        self
    }

    /// Attaches a Taylor coefficient table; `polynomial` marks it exact.
    pub fn with_terms(mut self, terms: TermsFn, polynomial: bool) -> Self {
        self.terms = Some(terms);
        self.polynomial = polynomial;
        self
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn defaults(&self) -> &Defaults {
        &self.defaults
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    pub fn field(&self) -> &FieldFn {
        &self.field
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.field)(x, out)
    }

    pub fn eval_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval(x, &mut out);
        out
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    /// Exact state at time `t` from `x0`, when known.
    pub fn closed_form(&self, t: f64, x0: &[f64]) -> Option<Vec<f64>> {
        self.closed_form.as_ref().map(|c| c(t, x0))
    }

    pub fn taylor_terms(&self, order: usize) -> Option<Vec<Monomial>> {
        self.terms.as_ref().map(|t| t(order))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `dx/dt = x^2`, `x(t) = 1 / (1/x0 - t)`.
pub fn quadratic() -> ModelSpec {
    ModelSpec::new(
        "quadratic",
        1,
        Arc::new(|x, o| o[0] = x[0] * x[0]),
        Defaults { x0: vec![0.08], horizon: 10.0, radius: vec![0.03], order: 11 },
    )
    .with_closed_form(Arc::new(|t, x0| vec![1.0 / (1.0 / x0[0] - t)]))
    .with_terms(Arc::new(|_| vec![Monomial::new(0, 1.0, &[2])]), true)
}

/// `dx/dt = cos^2 x`, `x(t) = arctan(t + tan x0)`.
pub fn cosine_square() -> ModelSpec {
    ModelSpec::new(
        "cosine-square",
        1,
        Arc::new(|x, o| {
            let c = x[0].cos();
            o[0] = c * c;
        }),
        Defaults { x0: vec![0.9], horizon: 10.0, radius: vec![0.3], order: 9 },
    )
    .with_closed_form(Arc::new(|t, x0| vec![(t + x0[0].tan()).atan()]))
    .with_terms(
        // cos^2 x = 1 + sum_{m>=1} (-1)^m 2^(2m-1) x^(2m) / (2m)!
        Arc::new(|order| {
            let mut terms = vec![Monomial::new(0, 1.0, &[0])];
            for m in 1..=(order / 2) as u32 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * 2f64.powi(2 * m as i32 - 1) / factorial(2 * m);
                terms.push(Monomial::new(0, c, &[2 * m]));
            }
            terms
        }),
        false,
    )
}

/// Simple pendulum with `g / L = 1`: `x1' = x2`, `x2' = -sin x1`.
pub fn pendulum() -> ModelSpec {
    ModelSpec::new(
        "pendulum",
        2,
        Arc::new(|x, o| {
            o[0] = x[1];
            o[1] = -x[0].sin();
        }),
        Defaults { x0: vec![0.1, 0.1], horizon: 10.0, radius: vec![1.0, 1.0], order: 9 },
    )
    .with_terms(
        // -sin x1 = sum_{m>=0} (-1)^(m+1) x1^(2m+1) / (2m+1)!
        Arc::new(|order| {
            let mut terms = Vec::new();
            if order >= 1 {
                terms.push(Monomial::new(0, 1.0, &[0, 1]));
            }
            let mut m = 0u32;
            while 2 * m < order as u32 {
                let sign = if m.is_multiple_of(2) { -1.0 } else { 1.0 };
                terms.push(Monomial::new(1, sign / factorial(2 * m + 1), &[2 * m + 1, 0]));
                m += 1;
            }
            terms
        }),
        false,
    )
}

/// Predator-prey system `x1' = 1.1 x1 - 0.4 x1 x2`, `x2' = 0.1 x1 x2 - 0.4 x2`.
pub fn lotka_volterra() -> ModelSpec {
    ModelSpec::new(
        "lotka-volterra",
        2,
        Arc::new(|x, o| {
            o[0] = 1.1 * x[0] - 0.4 * x[0] * x[1];
            o[1] = 0.1 * x[0] * x[1] - 0.4 * x[1];
        }),
        Defaults { x0: vec![5.0, 5.0], horizon: 10.0, radius: vec![3.0, 3.0], order: 13 },
    )
    .with_terms(
        Arc::new(|order| {
            let all = vec![
                Monomial::new(0, 1.1, &[1, 0]),
                Monomial::new(0, -0.4, &[1, 1]),
                Monomial::new(1, 0.1, &[1, 1]),
                Monomial::new(1, -0.4, &[0, 1]),
            ];
            all.into_iter().filter(|t| t.degree() <= order).collect()
        }),
        true,
    )
}

/// Kraichnan–Orszag system `x1' = x2 x3`, `x2' = x1 x3`, `x3' = -2 x1 x2`.
pub fn kraichnan_orszag() -> ModelSpec {
    ModelSpec::new(
        "kraichnan-orszag",
        3,
        Arc::new(|x, o| {
            o[0] = x[1] * x[2];
            o[1] = x[0] * x[2];
            o[2] = -2.0 * x[0] * x[1];
        }),
        Defaults {
            x0: vec![0.1, -0.2, 0.3],
            horizon: 5.0,
            radius: vec![0.1, 0.1, 0.1],
            order: 9,
        },
    )
    .with_terms(
        Arc::new(|order| {
            let all = vec![
                Monomial::new(0, 1.0, &[0, 1, 1]),
                Monomial::new(1, 1.0, &[1, 0, 1]),
                Monomial::new(2, -2.0, &[1, 1, 0]),
            ];
            all.into_iter().filter(|t| t.degree() <= order).collect()
        }),
        true,
    )
}

/// Scalar linear model `dx/dt = a x`, used for exactness checks.
pub fn linear(a: f64) -> ModelSpec {
    ModelSpec::new(
        "linear",
        1,
        Arc::new(move |x, o| o[0] = a * x[0]),
        Defaults { x0: vec![1.0], horizon: 5.0, radius: vec![0.5], order: 5 },
    )
    .with_closed_form(Arc::new(move |t, x0| vec![x0[0] * (a * t).exp()]))
    .with_terms(Arc::new(move |_| vec![Monomial::new(0, a, &[1])]), true)
}

/// The five benchmark systems.
pub fn catalog() -> Vec<ModelSpec> {
    vec![quadratic(), cosine_square(), pendulum(), lotka_volterra(), kraichnan_orszag()]
}

/// Looks a catalog model up by name, with `_` accepted for `-`
/// (`linear` is accepted with `a = -0.7`).
pub fn by_name(name: &str) -> Option<ModelSpec> {
    let name = name.replace('_', "-");
    if name == "linear" {
        return Some(linear(-0.7));
    }
    catalog().into_iter().find(|m| m.name() == name)
}
