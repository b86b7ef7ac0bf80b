use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::fieldsolver::{field_grid, BiasField, FieldGrid, PlaneSpec};
use crate::geometry::{LensGeometry, SymmetryPlane};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorPlane {
    P45,
    M45,
    Horizontal,
}

impl VectorPlane {
    pub fn spec(&self, geom: &LensGeometry, center: Vector3<f64>, window: f64) -> PlaneSpec {
        match self {
            VectorPlane::P45 => PlaneSpec::symmetry(geom, SymmetryPlane::P45, center, window),
            VectorPlane::M45 => PlaneSpec::symmetry(geom, SymmetryPlane::M45, center, window),
            VectorPlane::Horizontal => PlaneSpec::horizontal(center, window),
        }
    }
}

impl std::str::FromStr for VectorPlane {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p45" => Ok(VectorPlane::P45),
            "m45" => Ok(VectorPlane::M45),
            "horizontal" | "xy" => Ok(VectorPlane::Horizontal),
            other => Err(format!("unknown plane '{other}' (expected p45, m45 or horizontal)")),
        }
    }
}

/// `n × n` field samples over a square `window` centered at `center`.
/// Odd `n` puts a sample exactly on `center`.
pub fn vector_grid(
    geom: &LensGeometry,
    bias: &BiasField,
    center: &Vector3<f64>,
    plane: VectorPlane,
    window: f64,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<FieldGrid, AnalysisError> {
    if n < 2 || !(window.is_finite() && window > 0.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "vector grid needs n ≥ 2 and a positive window (n = {n}, window = {window:e} m)"
        )));
    }
    Ok(field_grid(geom, bias, &plane.spec(geom, *center, window), n, n, spec)?)
}

/// Net turns of the in-plane field direction along the grid boundary,
/// traversed counter-clockwise in (u, v).
pub fn winding_number(grid: &FieldGrid) -> i32 {
    let (nu, nv) = (grid.n_u, grid.n_v);
    let mut ring = Vec::with_capacity(2 * (nu + nv));
    ring.extend((0..nu).map(|i| (i, 0)));
    ring.extend((1..nv).map(|j| (nu - 1, j)));
    ring.extend((0..nu - 1).rev().map(|i| (i, nv - 1)));
    ring.extend((1..nv - 1).rev().map(|j| (0, j)));
    ring.push((0, 0));
    let angle = |&(i, j): &(usize, usize)| {
        let (bu, bv) = grid.in_plane(i, j);
        bv.atan2(bu)
    };
    let total: f64 = ring
        .windows(2)
        .map(|w| {
            let d = angle(&w[1]) - angle(&w[0]);
            (d + PI).rem_euclid(TAU) - PI
        })
        .sum();
    (total / TAU).round() as i32
}
