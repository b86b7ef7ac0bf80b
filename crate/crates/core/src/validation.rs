//! Self-consistency checks of the field model: charge vs Amperian currents,
//! Maxwell constraints on the Jacobian, size scaling and Jacobian vs finite
//! differences.

use nalgebra::Vector3;
use serde::Serialize;

use crate::amperian::{biot_savart_field, sheets_for, AmperianError};
use crate::fieldsolver::{field_and_jacobian_at, field_at, BiasField, FieldError};
use crate::geometry::LensGeometry;
use crate::quadrature::QuadratureSpec;
use crate::units::{gauss, nm};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub threshold: f64,
    pub points: usize,
}

impl CheckResult {
    fn new(name: &str, worst: f64, threshold: f64, points: usize) -> Self {
        Self {
            name: name.into(),
            passed: worst <= threshold,
            worst,
            threshold,
            points,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Amperian(#[from] AmperianError),
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points in an axis-aligned box, skipping index 0.
pub fn halton_box(n: usize, lo: Vector3<f64>, hi: Vector3<f64>, bases: [u64; 3]) -> Vec<Vector3<f64>> {
    (1..=n as u64)
        .map(|i| {
            let t = Vector3::new(
                radical_inverse(i, bases[0]),
                radical_inverse(i, bases[1]),
                radical_inverse(i, bases[2]),
            );
            lo + (hi - lo).component_mul(&t)
        })
        .collect()
}

/// Test box above the lens, [−30, 30]² × [10, 50] nm.
pub fn test_box() -> (Vector3<f64>, Vector3<f64>) {
    (Vector3::new(nm(-30.0), nm(-30.0), nm(10.0)), Vector3::new(nm(30.0), nm(30.0), nm(50.0)))
}

/// Largest relative component difference between the charge model and the
/// Amperian currents, over components larger than 1 G.
pub fn oracle_check(
    geom: &LensGeometry,
    points: &[Vector3<f64>],
    spec: &QuadratureSpec,
) -> Result<CheckResult, ValidationError> {
    let sheets = sheets_for(geom);
    let none = BiasField::new(0.0);
    let mut worst = 0.0f64;
    for r in points {
        let a = field_at(geom, &none, r, spec)?.b;
        let b = biot_savart_field(&sheets, r, spec)?.b;
        for k in 0..3 {
            if a[k].abs() > gauss(1.0) {
                worst = worst.max((a[k] - b[k]).abs() / a[k].abs());
            }
        }
    }
    Ok(CheckResult::new("charge_vs_amperian", worst, 1e-4, points.len()))
}

/// Trace and asymmetry of the Jacobian relative to its largest entry.
pub fn maxwell_jacobian_check(
    geom: &LensGeometry,
    bias: &BiasField,
    points: &[Vector3<f64>],
    spec: &QuadratureSpec,
) -> Result<CheckResult, ValidationError> {
    let mut worst = 0.0f64;
    for r in points {
        let (_, j) = field_and_jacobian_at(geom, bias, r, spec)?;
        let m = j.max_abs();
        worst = worst.max(j.trace().abs() / m).max(j.asymmetry() / m);
    }
    Ok(CheckResult::new("divergence_and_curl", worst, 1e-6, points.len()))
}

fn fd_laplacian(
    geom: &LensGeometry,
    bias: &BiasField,
    r: &Vector3<f64>,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<(Vector3<f64>, Vector3<f64>), FieldError> {
    let b0 = field_at(geom, bias, r, spec)?.b;
    let mut lap = Vector3::zeros();
    let mut scale = Vector3::zeros();
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = h;
        let d2 = (field_at(geom, bias, &(r + e), spec)?.b + field_at(geom, bias, &(r - e), spec)?.b - 2.0 * b0) / (h * h);
        lap += d2;
        scale += d2.abs();
    }
    Ok((lap, scale))
}

/// Finite-difference Laplacian of each component at step `h`, compared with
/// its own truncation error estimated from the `2h` result.
///
/// A harmonic field gives `L(h) ≈ c h²`, so `|L(h)| ≈ |L(2h) − L(h)| / 3`; the
/// reported value is `|L(h)| / (|L(2h) − L(h)| + 1e-6 Σ|∂²B|)`, which stays
/// near 1/3 for harmonic fields and grows without bound otherwise.
pub fn laplacian_check(
    geom: &LensGeometry,
    bias: &BiasField,
    points: &[Vector3<f64>],
    h: f64,
    spec: &QuadratureSpec,
) -> Result<CheckResult, ValidationError> {
    let mut worst = 0.0f64;
    for r in points {
        let (l1, s) = fd_laplacian(geom, bias, r, h, spec)?;
        let (l2, _) = fd_laplacian(geom, bias, r, 2.0 * h, spec)?;
        for k in 0..3 {
            let err = (l2[k] - l1[k]).abs() + 1e-6 * s[k];
            worst = worst.max(l1[k].abs() / err);
        }
    }
    Ok(CheckResult::new("laplacian_at_fd_level", worst, 1.0, points.len()))
}

/// `B(s·r)` for the geometry scaled by `s` against `B(r)`, relative.
pub fn scaling_check(
    geom: &LensGeometry,
    bias: &BiasField,
    s: f64,
    points: &[Vector3<f64>],
    spec: &QuadratureSpec,
) -> Result<CheckResult, ValidationError> {
    let scaled = geom.scale(s).map_err(FieldError::from)?;
    let mut worst = 0.0f64;
    for r in points {
        let a = field_at(geom, bias, r, spec)?.b;
        let b = field_at(&scaled, bias, &(r * s), spec)?.b;
        worst = worst.max((a - b).norm() / a.norm());
    }
    Ok(CheckResult::new("scaling", worst, 1e-6, points.len()))
}

/// Entrywise relative difference between the analytic Jacobian and central
/// differences with step `h`, over entries above 1 G/nm.
pub fn jacobian_fd_check(
    geom: &LensGeometry,
    bias: &BiasField,
    points: &[Vector3<f64>],
    h: f64,
    spec: &QuadratureSpec,
) -> Result<CheckResult, ValidationError> {
    let mut worst = 0.0f64;
    for r in points {
        let (_, j) = field_and_jacobian_at(geom, bias, r, spec)?;
        let floor = 1e-6 * j.max_abs();
        for col in 0..3 {
            let mut e = Vector3::zeros();
            e[col] = h;
            let fd = (field_at(geom, bias, &(r + e), spec)?.b - field_at(geom, bias, &(r - e), spec)?.b) / (2.0 * h);
            for row in 0..3 {
                let a = j.entries[(row, col)];
                if a.abs() > floor.max(crate::units::GAUSS_PER_NM) {
                    worst = worst.max((fd[row] - a).abs() / a.abs());
                }
            }
        }
    }
    Ok(CheckResult::new("jacobian_vs_fd", worst, 1e-3, points.len()))
}

/// The full suite with the default point counts.
pub fn run_all(
    geom: &LensGeometry,
    bias: &BiasField,
    spec: &QuadratureSpec,
) -> Result<Vec<CheckResult>, ValidationError> {
    let (lo, hi) = test_box();
    let oracle_pts = halton_box(50, lo, hi, [2, 3, 5]);
    let maxwell_pts = halton_box(20, lo, hi, [7, 11, 13]);
    let few = halton_box(10, lo, hi, [17, 19, 23]);
    Ok(vec![
        oracle_check(geom, &oracle_pts, spec)?,
        maxwell_jacobian_check(geom, bias, &maxwell_pts, spec)?,
        laplacian_check(geom, bias, &maxwell_pts, nm(0.2), spec)?,
        scaling_check(geom, bias, 10.0, &few, spec)?,
        jacobian_fd_check(geom, bias, &few, nm(0.01), spec)?,
    ])
}
