//! Field above the lens from the pseudo-surface-charge model.
//!
//! A uniformly magnetized slab is equivalent to charge density `+M` on its top
//! face and `-M` on its bottom face. With `d = r - r'`,
//!
//! ```text
//! B(r) = (μ0 M / 4π) [ ∫_top d/|d|³ da' − ∫_bottom d/|d|³ da' ] + B_bias ẑ
//! ∂B_i/∂x_j = (μ0 M / 4π) Σ ± ∫ (δ_ij/|d|³ − 3 d_i d_j/|d|⁵) da'
//! ```
//!
//! The kernel gradient is applied analytically inside the integral.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, LensGeometry, PolarPatch, SymmetryPlane};
use crate::quadrature::{integrate_patch, FieldAndGradient, QuadratureError, QuadratureSpec};
use crate::tensor::GradientTensor;
use crate::units::gauss;

/// Evaluation points must stay this far from every charged face.
pub const MIN_FACE_DISTANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error(
        "evaluation point is {distance:.3e} m from a charged face; at least {minimum:.1e} m required"
    )]
    TooClose { distance: f64, minimum: f64 },
    #[error("evaluation point is not finite")]
    NonFinitePoint,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

impl FieldError {
    pub fn is_precondition(&self) -> bool {
        !matches!(self, FieldError::Quadrature(QuadratureError::NotConverged { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasField {
    /// Uniform z field in Tesla; negative means antiparallel to the magnetization.
    pub b_bias_z: f64,
}

impl Default for BiasField {
    fn default() -> Self {
        Self {
            b_bias_z: gauss(-650.0),
        }
    }
}

impl BiasField {
    pub fn new(b_bias_z: f64) -> Self {
        Self { b_bias_z }
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.b_bias_z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub position: Vector3<f64>,
    pub b: Vector3<f64>,
    pub magnitude: f64,
}

impl FieldSample {
    pub fn new(position: Vector3<f64>, b: Vector3<f64>) -> Self {
        Self {
            position,
            b,
            magnitude: b.norm(),
        }
    }
}

/// Distance from a point to a polar patch lying in its own plane.
pub fn distance_to_patch(patch: &PolarPatch, r: &Vector3<f64>) -> f64 {
    let (x, y) = (r.x, r.y);
    let rho = x.hypot(y);
    let theta = y.atan2(x);
    let span = patch.theta_max - patch.theta_min;
    let rel = (theta - patch.theta_min).rem_euclid(std::f64::consts::TAU);
    let planar = if rel <= span || rho == 0.0 {
        if rho < patch.r_min {
            patch.r_min - rho
        } else if rho > patch.r_max {
            rho - patch.r_max
        } else {
            0.0
        }
    } else {
        let edge = |angle: f64| {
            let (s, c) = angle.sin_cos();
            let t = (x * c + y * s).clamp(patch.r_min, patch.r_max);
            (x - t * c).hypot(y - t * s)
        };
        edge(patch.theta_min).min(edge(patch.theta_max))
    };
    planar.hypot(r.z - patch.z_plane)
}

fn check_point(patches: &[PolarPatch], r: &Vector3<f64>) -> Result<(), FieldError> {
    if !(r.x.is_finite() && r.y.is_finite() && r.z.is_finite()) {
        return Err(FieldError::NonFinitePoint);
    }
    let distance = patches
        .iter()
        .map(|p| distance_to_patch(p, r))
        .fold(f64::INFINITY, f64::min);
    if distance < MIN_FACE_DISTANCE {
        return Err(FieldError::TooClose {
            distance,
            minimum: MIN_FACE_DISTANCE,
        });
    }
    Ok(())
}

/// Magnet field (no bias) of an arbitrary set of charged patches with surface
/// charge `±mu0_m / μ0`.
pub fn field_from_patches(
    patches: &[PolarPatch],
    mu0_m: f64,
    r: &Vector3<f64>,
    spec: &QuadratureSpec,
) -> Result<Vector3<f64>, FieldError> {
    check_point(patches, r)?;
    let mut total = Vector3::zeros();
    for patch in patches {
        let dz = r.z - patch.z_plane;
        let est = integrate_patch(
            patch,
            |x, y| {
                let d = Vector3::new(r.x - x, r.y - y, dz);
                let inv = 1.0 / d.norm_squared();
                d * (inv * inv.sqrt())
            },
            spec,
        )?;
        total += est.value * patch.charge_sign.value();
    }
    Ok(total * (mu0_m / (4.0 * PI)))
}

/// Magnet field and its Jacobian (no bias) from charged patches, one pass.
pub fn field_and_jacobian_from_patches(
    patches: &[PolarPatch],
    mu0_m: f64,
    r: &Vector3<f64>,
    spec: &QuadratureSpec,
) -> Result<(Vector3<f64>, Matrix3<f64>), FieldError> {
    check_point(patches, r)?;
    let mut field = Vector3::zeros();
    let mut grad = Matrix3::zeros();
    for patch in patches {
        let dz = r.z - patch.z_plane;
        let est = integrate_patch(
            patch,
            |x, y| {
                let d = Vector3::new(r.x - x, r.y - y, dz);
                let inv2 = 1.0 / d.norm_squared();
                let inv3 = inv2 * inv2.sqrt();
                let inv5 = inv3 * inv2;
                let mut g = d * d.transpose() * (-3.0 * inv5);
                g[(0, 0)] += inv3;
                g[(1, 1)] += inv3;
                g[(2, 2)] += inv3;
                FieldAndGradient {
                    field: d * inv3,
                    gradient: g,
                }
            },
            spec,
        )?;
        let s = patch.charge_sign.value();
        field += est.value.field * s;
        grad += est.value.gradient * s;
    }
    let c = mu0_m / (4.0 * PI);
    Ok((field * c, grad * c))
}

pub fn field_at(
    geom: &LensGeometry,
    bias: &BiasField,
    r: &Vector3<f64>,
    spec: &QuadratureSpec,
) -> Result<FieldSample, FieldError> {
    let patches = geom.decompose()?;
    let b = field_from_patches(&patches, geom.mu0_m, r, spec)? + bias.vector();
    Ok(FieldSample::new(*r, b))
}

pub fn jacobian_at(
    geom: &LensGeometry,
    bias: &BiasField,
    r: &Vector3<f64>,
    spec: &QuadratureSpec,
) -> Result<GradientTensor, FieldError> {
    field_and_jacobian_at(geom, bias, r, spec).map(|(_, j)| j)
}

pub fn field_and_jacobian_at(
    geom: &LensGeometry,
    bias: &BiasField,
    r: &Vector3<f64>,
    spec: &QuadratureSpec,
) -> Result<(FieldSample, GradientTensor), FieldError> {
    let patches = geom.decompose()?;
    let (b, j) = field_and_jacobian_from_patches(&patches, geom.mu0_m, r, spec)?;
    Ok((
        FieldSample::new(*r, b + bias.vector()),
        GradientTensor::lab(j),
    ))
}

/// A rectangular window in a plane: `origin + u·u_axis + v·v_axis` with
/// `u ∈ [-width_u/2, width_u/2]`, `v ∈ [-width_v/2, width_v/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneSpec {
    pub origin: Vector3<f64>,
    pub u_axis: Vector3<f64>,
    pub v_axis: Vector3<f64>,
    pub width_u: f64,
    pub width_v: f64,
}

impl PlaneSpec {
    /// Vertical symmetry plane of `geom` through `center`; `u` is horizontal
    /// along the plane's axis and `v` is `+z`.
    pub fn symmetry(geom: &LensGeometry, plane: SymmetryPlane, center: Vector3<f64>, width: f64) -> Self {
        let (s, c) = geom.symmetry_axis(plane).sin_cos();
        Self {
            origin: center,
            u_axis: Vector3::new(c, s, 0.0),
            v_axis: Vector3::z(),
            width_u: width,
            width_v: width,
        }
    }

    /// Horizontal plane through `center` with `u` along `x` and `v` along `y`.
    pub fn horizontal(center: Vector3<f64>, width: f64) -> Self {
        Self {
            origin: center,
            u_axis: Vector3::x(),
            v_axis: Vector3::y(),
            width_u: width,
            width_v: width,
        }
    }

    pub fn normal(&self) -> Vector3<f64> {
        self.u_axis.cross(&self.v_axis)
    }

    pub fn point(&self, u: f64, v: f64) -> Vector3<f64> {
        self.origin + self.u_axis * u + self.v_axis * v
    }

    /// `n` evenly spaced coordinates across a width, endpoints included.
    pub fn coords(width: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.0];
        }
        let step = width / (n - 1) as f64;
        (0..n).map(|i| -0.5 * width + i as f64 * step).collect()
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        (self.u_axis.norm() - 1.0).abs() < tol
            && (self.v_axis.norm() - 1.0).abs() < tol
            && self.u_axis.dot(&self.v_axis).abs() < tol
    }
}

/// Row-major samples over a plane window; index `j * n_u + i` for `(u_i, v_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub plane: PlaneSpec,
    pub n_u: usize,
    pub n_v: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub samples: Vec<FieldSample>,
}

impl FieldGrid {
    pub fn sample(&self, i: usize, j: usize) -> &FieldSample {
        &self.samples[j * self.n_u + i]
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.magnitude).collect()
    }

    /// Field components along the plane's `u` and `v` axes.
    pub fn in_plane(&self, i: usize, j: usize) -> (f64, f64) {
        let b = self.sample(i, j).b;
        (b.dot(&self.plane.u_axis), b.dot(&self.plane.v_axis))
    }
}

pub fn field_grid(
    geom: &LensGeometry,
    bias: &BiasField,
    plane: &PlaneSpec,
    n_u: usize,
    n_v: usize,
    spec: &QuadratureSpec,
) -> Result<FieldGrid, FieldError> {
    let u = PlaneSpec::coords(plane.width_u, n_u);
    let v = PlaneSpec::coords(plane.width_v, n_v);
    let points: Vec<Vector3<f64>> = v
        .iter()
        .flat_map(|&vj| u.iter().map(move |&ui| (ui, vj)))
        .map(|(ui, vj)| plane.point(ui, vj))
        .collect();
    let patches = geom.decompose()?;
    let eval = |r: &Vector3<f64>| -> Result<FieldSample, FieldError> {
        let b = field_from_patches(&patches, geom.mu0_m, r, spec)? + bias.vector();
        Ok(FieldSample::new(*r, b))
    };
    #[cfg(feature = "parallel")]
    let samples = {
        use rayon::prelude::*;
        points.par_iter().map(eval).collect::<Result<Vec<_>, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let samples = points.iter().map(eval).collect::<Result<Vec<_>, _>>()?;
    Ok(FieldGrid {
        plane: *plane,
        n_u,
        n_v,
        u,
        v,
        samples,
    })
}
