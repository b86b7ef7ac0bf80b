//! Tensor-product Gauss–Legendre rules with order-doubling error control.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul};
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::PolarPatch;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature orders must be at least 2 (got radial {radial}, angular {angular})")]
    OrderTooLow { radial: usize, angular: usize },
    #[error("relative tolerance must be positive and finite (got {0})")]
    BadTolerance(f64),
    #[error(
        "quadrature did not converge: estimate {achieved:.3e} > tolerance {target:.3e} \
         at orders {radial_order}x{angular_order}"
    )]
    NotConverged {
        achieved: f64,
        target: f64,
        radial_order: usize,
        angular_order: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_order: usize,
    pub angular_order: usize,
    /// Maximum number of extra order doublings after the first (n, 2n) pair.
    pub refinement_limit: usize,
    pub rel_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_order: 48,
            angular_order: 48,
            refinement_limit: 3,
            rel_tolerance: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.radial_order < 2 || self.angular_order < 2 {
            return Err(QuadratureError::OrderTooLow {
                radial: self.radial_order,
                angular: self.angular_order,
            });
        }
        if !(self.rel_tolerance.is_finite() && self.rel_tolerance > 0.0) {
            return Err(QuadratureError::BadTolerance(self.rel_tolerance));
        }
        Ok(())
    }

    /// Same spec with both orders multiplied by `factor`.
    pub fn with_orders_scaled(&self, factor: usize) -> Self {
        Self {
            radial_order: self.radial_order * factor,
            angular_order: self.angular_order * factor,
            ..*self
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots are symmetric; solve for the upper half by Newton iteration on
        // P_n starting from the Chebyshev-like estimate.
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared, lazily built rule of the given order.
pub fn rule(order: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(r) = cache.read().expect("rule cache poisoned").get(&order) {
        return Arc::clone(r);
    }
    let built = Arc::new(GaussLegendre::new(order));
    cache
        .write()
        .expect("rule cache poisoned")
        .entry(order)
        .or_insert(built)
        .clone()
}

pub fn nodes_weights(order: usize) -> Vec<(f64, f64)> {
    let r = rule(order);
    r.nodes.iter().copied().zip(r.weights.iter().copied()).collect()
}

/// Values that can be accumulated by a quadrature rule.
pub trait Integrable: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;

    /// Relative change `|self - coarse| / |self|` (absolute when `self` is zero).
    fn rel_change(&self, coarse: &Self) -> f64 {
        let diff = (*self + *coarse * -1.0).magnitude();
        let scale = self.magnitude();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

impl Integrable for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrable for Vector3<f64> {
    fn zero() -> Self {
        Vector3::zeros()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Integrable for Matrix3<f64> {
    fn zero() -> Self {
        Matrix3::zeros()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Field and gradient accumulated in the same pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAndGradient {
    pub field: Vector3<f64>,
    pub gradient: Matrix3<f64>,
}

impl Add for FieldAndGradient {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            field: self.field + o.field,
            gradient: self.gradient + o.gradient,
        }
    }
}

impl Mul<f64> for FieldAndGradient {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            field: self.field * s,
            gradient: self.gradient * s,
        }
    }
}

impl Integrable for FieldAndGradient {
    fn zero() -> Self {
        Self {
            field: Vector3::zeros(),
            gradient: Matrix3::zeros(),
        }
    }
    fn magnitude(&self) -> f64 {
        self.field.norm()
    }

    /// Worse of the two parts; field and gradient carry different units.
    fn rel_change(&self, coarse: &Self) -> f64 {
        self.field
            .rel_change(&coarse.field)
            .max(self.gradient.rel_change(&coarse.gradient))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// `|I(n) - I(2n)| / |I(2n)|` for the last accepted pair.
    pub rel_error: f64,
    pub radial_order: usize,
    pub angular_order: usize,
}

/// Fixed-order tensor product rule over `[a0, a1] × [b0, b1]`.
pub fn tensor_rule<T, F>(a: (f64, f64), b: (f64, f64), orders: (usize, usize), f: &F) -> T
where
    T: Integrable,
    F: Fn(f64, f64) -> T,
{
    let ra = rule(orders.0);
    let rb = rule(orders.1);
    let mut total = T::zero();
    for (x, wx) in ra.mapped(a.0, a.1) {
        let mut inner = T::zero();
        for (y, wy) in rb.mapped(b.0, b.1) {
            inner = inner + f(x, y) * wy;
        }
        total = total + inner * wx;
    }
    total
}

/// Runs `eval` at the spec's orders and at successive doublings until two
/// results agree to `spec.rel_tolerance` or the refinement limit is spent.
fn refine<T, E>(spec: &QuadratureSpec, eval: E) -> Result<Estimate<T>, QuadratureError>
where
    T: Integrable,
    E: Fn((usize, usize)) -> T,
{
    spec.validate()?;
    let mut orders = (spec.radial_order, spec.angular_order);
    let mut coarse = eval(orders);
    let mut last_err = f64::INFINITY;
    for _ in 0..=spec.refinement_limit {
        orders = (orders.0 * 2, orders.1 * 2);
        let fine = eval(orders);
        last_err = fine.rel_change(&coarse);
        if last_err <= spec.rel_tolerance {
            return Ok(Estimate {
                value: fine,
                rel_error: last_err,
                radial_order: orders.0,
                angular_order: orders.1,
            });
        }
        coarse = fine;
    }
    Err(QuadratureError::NotConverged {
        achieved: last_err,
        target: spec.rel_tolerance,
        radial_order: orders.0,
        angular_order: orders.1,
    })
}

/// Integrates `f(a, b)` over a rectangle with error control.
pub fn integrate_rect<T, F>(
    a: (f64, f64),
    b: (f64, f64),
    f: F,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>, QuadratureError>
where
    T: Integrable,
    F: Fn(f64, f64) -> T,
{
    refine(spec, |orders| tensor_rule(a, b, orders, &f))
}

/// Fixed-order polar rule: `radial_order × angular_order` nodes, `r dr dθ`.
pub fn polar_rule<T, F>(patch: &PolarPatch, orders: (usize, usize), f: &F) -> T
where
    T: Integrable,
    F: Fn(f64, f64) -> T,
{
    let rr = rule(orders.0);
    let rt = rule(orders.1);
    let mut total = T::zero();
    for (theta, wt) in rt.mapped(patch.theta_min, patch.theta_max) {
        let (s, c) = theta.sin_cos();
        let mut inner = T::zero();
        for (r, wr) in rr.mapped(patch.r_min, patch.r_max) {
            inner = inner + f(r * c, r * s) * (r * wr);
        }
        total = total + inner * wt;
    }
    total
}

/// Integrates `f(x, y)` over a polar patch with the `r dr dθ` Jacobian and
/// order-doubling error control.
pub fn integrate_patch<T, F>(
    patch: &PolarPatch,
    f: F,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>, QuadratureError>
where
    T: Integrable,
    F: Fn(f64, f64) -> T,
{
    refine(spec, |orders| polar_rule(patch, orders, &f))
}
