//! Biot–Savart oracle from the equivalent bound surface currents.
//!
//! For uniform `M ẑ` the bound current `K = M × n̂` lives on the lateral walls.
//! For the lens that is one counter-clockwise outer loop, two clockwise
//! quarter arcs on the cut boundaries, and four radial segments along the cut
//! edges. All carry `|K| = M`.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use thiserror::Error;

use crate::fieldsolver::{FieldSample, MIN_FACE_DISTANCE};
use crate::geometry::LensGeometry;
use crate::quadrature::{integrate_rect, QuadratureError, QuadratureSpec};
use crate::MU0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmperianError {
    #[error("evaluation point is {distance:.3e} m from a current sheet; at least {minimum:.1e} m required")]
    TooClose { distance: f64, minimum: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Planar curve traced by a lateral wall, oriented along the current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SheetCurve {
    /// Circular arc from `theta_start` to `theta_end`; counter-clockwise when
    /// `theta_end > theta_start`.
    Arc {
        radius: f64,
        theta_start: f64,
        theta_end: f64,
    },
    Segment { start: [f64; 2], end: [f64; 2] },
}

impl SheetCurve {
    /// Point at curve parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> [f64; 2] {
        match *self {
            SheetCurve::Arc {
                radius,
                theta_start,
                theta_end,
            } => {
                let th = theta_start + t * (theta_end - theta_start);
                [radius * th.cos(), radius * th.sin()]
            }
            SheetCurve::Segment { start, end } => [
                start[0] + t * (end[0] - start[0]),
                start[1] + t * (end[1] - start[1]),
            ],
        }
    }

    /// `d(point)/dt`.
    pub fn tangent(&self, t: f64) -> [f64; 2] {
        match *self {
            SheetCurve::Arc {
                radius,
                theta_start,
                theta_end,
            } => {
                let span = theta_end - theta_start;
                let th = theta_start + t * span;
                [-radius * span * th.sin(), radius * span * th.cos()]
            }
            SheetCurve::Segment { start, end } => [end[0] - start[0], end[1] - start[1]],
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            SheetCurve::Arc {
                radius,
                theta_start,
                theta_end,
            } => radius * (theta_end - theta_start).abs(),
            SheetCurve::Segment { start, end } => (end[0] - start[0]).hypot(end[1] - start[1]),
        }
    }

    /// Planar distance from `p` to the curve.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            SheetCurve::Arc {
                radius,
                theta_start,
                theta_end,
            } => {
                let (lo, hi) = if theta_end >= theta_start {
                    (theta_start, theta_end)
                } else {
                    (theta_end, theta_start)
                };
                let rho = p[0].hypot(p[1]);
                let rel = (p[1].atan2(p[0]) - lo).rem_euclid(TAU);
                if hi - lo >= TAU || rel <= hi - lo {
                    (rho - radius).abs()
                } else {
                    let a = self.point(0.0);
                    let b = self.point(1.0);
                    (p[0] - a[0])
                        .hypot(p[1] - a[1])
                        .min((p[0] - b[0]).hypot(p[1] - b[1]))
                }
            }
            SheetCurve::Segment { start, end } => {
                let d = [end[0] - start[0], end[1] - start[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let t = if len2 > 0.0 {
                    (((p[0] - start[0]) * d[0] + (p[1] - start[1]) * d[1]) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (p[0] - start[0] - t * d[0]).hypot(p[1] - start[1] - t * d[1])
            }
        }
    }
}

/// Uniform surface current on a vertical wall `curve × [z_bottom, z_top]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSheet {
    pub curve: SheetCurve,
    pub z_bottom: f64,
    pub z_top: f64,
    /// Sheet current density in A/m, flowing along the curve orientation.
    pub sheet_current: f64,
}

impl CurrentSheet {
    pub fn distance(&self, r: &Vector3<f64>) -> f64 {
        let planar = self.curve.distance([r.x, r.y]);
        let dz = if r.z > self.z_top {
            r.z - self.z_top
        } else if r.z < self.z_bottom {
            self.z_bottom - r.z
        } else {
            0.0
        };
        planar.hypot(dz)
    }
}

/// Lateral walls of a disk of radius `outer_radius` with quarter-disk (or any
/// angular width) cuts of radius `inner_radius` over `cuts`.
pub fn sheets_for_footprint(
    outer_radius: f64,
    inner_radius: f64,
    thickness: f64,
    mu0_m: f64,
    cuts: &[(f64, f64)],
) -> Vec<CurrentSheet> {
    let k = mu0_m / MU0;
    let wall = |curve| CurrentSheet {
        curve,
        z_bottom: -thickness,
        z_top: 0.0,
        sheet_current: k,
    };
    let mut sheets = vec![wall(SheetCurve::Arc {
        radius: outer_radius,
        theta_start: 0.0,
        theta_end: TAU,
    })];
    let polar = |r: f64, a: f64| [r * a.cos(), r * a.sin()];
    for &(a, b) in cuts {
        sheets.push(wall(SheetCurve::Arc {
            radius: inner_radius,
            theta_start: b,
            theta_end: a,
        }));
        sheets.push(wall(SheetCurve::Segment {
            start: polar(inner_radius, a),
            end: [0.0, 0.0],
        }));
        sheets.push(wall(SheetCurve::Segment {
            start: [0.0, 0.0],
            end: polar(inner_radius, b),
        }));
    }
    sheets
}

pub fn sheets_for(geom: &LensGeometry) -> Vec<CurrentSheet> {
    let cuts: Vec<(f64, f64)> = geom
        .cut_quadrants
        .iter()
        .map(|c| (c.start, c.end))
        .collect();
    sheets_for_footprint(
        geom.outer_radius,
        geom.inner_radius,
        geom.thickness,
        geom.mu0_m,
        &cuts,
    )
}

/// Field of the sheets alone (no bias).
pub fn biot_savart_field(
    sheets: &[CurrentSheet],
    r: &Vector3<f64>,
    spec: &QuadratureSpec,
) -> Result<FieldSample, AmperianError> {
    let distance = sheets
        .iter()
        .map(|s| s.distance(r))
        .fold(f64::INFINITY, f64::min);
    if distance < MIN_FACE_DISTANCE {
        return Err(AmperianError::TooClose {
            distance,
            minimum: MIN_FACE_DISTANCE,
        });
    }
    // Along-curve resolution uses the angular order, thickness the radial one.
    let mut b = Vector3::zeros();
    for sheet in sheets {
        if sheet.curve.length() == 0.0 {
            continue;
        }
        let est = integrate_rect(
            (0.0, 1.0),
            (sheet.z_bottom, sheet.z_top),
            |t, z| {
                let p = sheet.curve.point(t);
                let tan = sheet.curve.tangent(t);
                let d = Vector3::new(r.x - p[0], r.y - p[1], r.z - z);
                let inv2 = 1.0 / d.norm_squared();
                let dl = Vector3::new(tan[0], tan[1], 0.0);
                dl.cross(&d) * (inv2 * inv2.sqrt())
            },
            &QuadratureSpec {
                radial_order: spec.angular_order,
                angular_order: spec.radial_order,
                ..*spec
            },
        )?;
        b += est.value * (MU0 / (4.0 * PI) * sheet.sheet_current);
    }
    Ok(FieldSample::new(*r, b))
}
