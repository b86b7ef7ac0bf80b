//! Lens shape: a disk with two diagonally opposed quarter-disk cuts.
//!
//! The magnet occupies `z ∈ [-thickness, 0]`, so field points above the top
//! face have `z > 0`. The footprint is the disk `r ≤ outer_radius` minus the
//! quarter disks `r < inner_radius` in the two cut quadrants.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::nm;

const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("inner radius must be positive (got {0} m)")]
    NonPositiveInnerRadius(f64),
    #[error("inner radius {inner} m must be smaller than outer radius {outer} m")]
    InnerNotBelowOuter { inner: f64, outer: f64 },
    #[error("thickness must be positive (got {0} m)")]
    NonPositiveThickness(f64),
    #[error("mu0_M must be positive (got {0} T)")]
    NonPositivePolarization(f64),
    #[error("cut quadrant {index} must span exactly pi/2 (spans {span} rad)")]
    CutNotQuarter { index: usize, span: f64 },
    #[error("cut quadrants must be offset by exactly pi (offset {0} rad)")]
    CutsNotOpposed(f64),
    #[error("scale factor must be positive and finite (got {0})")]
    BadScale(f64),
    #[error("non-finite geometry parameter")]
    NonFinite,
}

/// Angular interval `[start, end]` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutInterval {
    pub start: f64,
    pub end: f64,
}

impl CutInterval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn span(&self) -> f64 {
        self.end - self.start
    }

    /// Half-open membership test `[start, end)` modulo 2π.
    pub fn contains_angle(&self, theta: f64) -> bool {
        let rel = (theta - self.start).rem_euclid(TAU);
        rel < self.span()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensGeometry {
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub thickness: f64,
    /// Magnetic polarization μ0·M in Tesla, directed along +z.
    pub mu0_m: f64,
    pub cut_quadrants: [CutInterval; 2],
}

impl Default for LensGeometry {
    fn default() -> Self {
        Self {
            outer_radius: nm(60.0),
            inner_radius: nm(40.0),
            thickness: nm(10.0),
            mu0_m: 2.0,
            cut_quadrants: [
                CutInterval::new(0.0, FRAC_PI_2),
                CutInterval::new(PI, 3.0 * FRAC_PI_2),
            ],
        }
    }
}

/// Sign of the pseudo-surface charge `n̂·M` on a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChargeSign {
    Positive,
    Negative,
}

impl ChargeSign {
    pub fn value(self) -> f64 {
        match self {
            ChargeSign::Positive => 1.0,
            ChargeSign::Negative => -1.0,
        }
    }
}

/// Annular sector `r ∈ [r_min, r_max]`, `θ ∈ [theta_min, theta_max]` lying in
/// the plane `z = z_plane`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPatch {
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub z_plane: f64,
    pub charge_sign: ChargeSign,
}

impl PolarPatch {
    pub fn area(&self) -> f64 {
        0.5 * (self.theta_max - self.theta_min) * (self.r_max * self.r_max - self.r_min * self.r_min)
    }

    /// Half-open membership `[r_min, r_max) × [theta_min, theta_max)` for a
    /// planar point, angle taken modulo 2π.
    pub fn contains_planar(&self, p: [f64; 2]) -> bool {
        let r = p[0].hypot(p[1]);
        if r < self.r_min || r >= self.r_max {
            return false;
        }
        let rel = (p[1].atan2(p[0]) - self.theta_min).rem_euclid(TAU);
        rel < self.theta_max - self.theta_min
    }
}

/// The two vertical mirror planes of the lens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryPlane {
    /// Plane through the bisector of the first cut (+45° for the default cuts).
    P45,
    /// Plane perpendicular to `P45` (-45° for the default cuts).
    M45,
}

impl LensGeometry {
    pub fn new(
        outer_radius: f64,
        inner_radius: f64,
        thickness: f64,
        mu0_m: f64,
        cut_quadrants: [CutInterval; 2],
    ) -> Result<Self, GeometryError> {
        let g = Self {
            outer_radius,
            inner_radius,
            thickness,
            mu0_m,
            cut_quadrants,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let all = [
            self.outer_radius,
            self.inner_radius,
            self.thickness,
            self.mu0_m,
            self.cut_quadrants[0].start,
            self.cut_quadrants[0].end,
            self.cut_quadrants[1].start,
            self.cut_quadrants[1].end,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if self.inner_radius <= 0.0 {
            return Err(GeometryError::NonPositiveInnerRadius(self.inner_radius));
        }
        if self.inner_radius >= self.outer_radius {
            return Err(GeometryError::InnerNotBelowOuter {
                inner: self.inner_radius,
                outer: self.outer_radius,
            });
        }
        if self.thickness <= 0.0 {
            return Err(GeometryError::NonPositiveThickness(self.thickness));
        }
        if self.mu0_m <= 0.0 {
            return Err(GeometryError::NonPositivePolarization(self.mu0_m));
        }
        for (index, cut) in self.cut_quadrants.iter().enumerate() {
            if (cut.span() - FRAC_PI_2).abs() > ANGLE_EPS {
                return Err(GeometryError::CutNotQuarter {
                    index,
                    span: cut.span(),
                });
            }
        }
        let offset = (self.cut_quadrants[1].start - self.cut_quadrants[0].start).rem_euclid(TAU);
        if (offset - PI).abs() > ANGLE_EPS {
            return Err(GeometryError::CutsNotOpposed(offset));
        }
        Ok(())
    }

    /// Start angle of the first cut, normalized to `[0, 2π)`.
    fn base_angle(&self) -> f64 {
        self.cut_quadrants[0].start.rem_euclid(TAU)
    }

    /// Direction angle (radians) of the horizontal axis lying in `plane`.
    pub fn symmetry_axis(&self, plane: SymmetryPlane) -> f64 {
        let bisector = self.base_angle() + FRAC_PI_4;
        match plane {
            SymmetryPlane::P45 => bisector,
            SymmetryPlane::M45 => bisector - FRAC_PI_2,
        }
    }

    pub fn footprint_area(&self) -> f64 {
        PI * self.outer_radius * self.outer_radius
            - 2.0 * FRAC_PI_4 * self.inner_radius * self.inner_radius
    }

    pub fn volume(&self) -> f64 {
        self.footprint_area() * self.thickness
    }

    /// True iff the planar point lies in the magnet footprint.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let r = p[0].hypot(p[1]);
        if r > self.outer_radius {
            return false;
        }
        if r < self.inner_radius {
            let theta = p[1].atan2(p[0]);
            return !self.cut_quadrants.iter().any(|c| c.contains_angle(theta));
        }
        true
    }

    /// Euclidean distance from a planar point to the footprint (zero inside).
    pub fn distance_to_footprint(&self, p: [f64; 2]) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let r = p[0].hypot(p[1]);
        if r > self.outer_radius {
            return r - self.outer_radius;
        }
        // Inside one of the cut quarter disks: nearest material is across the
        // arc or across one of the two radial edges.
        let theta = p[1].atan2(p[0]);
        let cut = self
            .cut_quadrants
            .iter()
            .find(|c| c.contains_angle(theta))
            .expect("point outside footprint with r < outer radius lies in a cut");
        let to_ray = |angle: f64| (p[0] * angle.sin() - p[1] * angle.cos()).abs();
        (self.inner_radius - r)
            .min(to_ray(cut.start))
            .min(to_ray(cut.end))
    }

    /// Distance from a 3-d point to the nearer of the two charged faces.
    pub fn distance_to_faces(&self, r: [f64; 3]) -> f64 {
        let planar = self.distance_to_footprint([r[0], r[1]]);
        let dz_top = r[2];
        let dz_bottom = r[2] + self.thickness;
        planar.hypot(dz_top).min(planar.hypot(dz_bottom))
    }

    pub fn scale(&self, s: f64) -> Result<Self, GeometryError> {
        if !(s.is_finite() && s > 0.0) {
            return Err(GeometryError::BadScale(s));
        }
        Ok(Self {
            outer_radius: self.outer_radius * s,
            inner_radius: self.inner_radius * s,
            thickness: self.thickness * s,
            ..*self
        })
    }

    /// Top and bottom faces as polar patches. Per face: each cut quadrant is
    /// the annular sector `[inner, outer]`; each kept quadrant is the full
    /// sector `[0, outer]`, split at the inner radius so all six patches share
    /// the same radial breakpoints.
    pub fn decompose(&self) -> Result<Vec<PolarPatch>, GeometryError> {
        self.validate()?;
        let base = self.base_angle();
        let mut patches = Vec::with_capacity(12);
        for (z_plane, charge_sign) in [
            (0.0, ChargeSign::Positive),
            (-self.thickness, ChargeSign::Negative),
        ] {
            for k in 0..4 {
                let theta_min = base + k as f64 * FRAC_PI_2;
                let patch = |r_min, r_max| PolarPatch {
                    r_min,
                    r_max,
                    theta_min,
                    theta_max: theta_min + FRAC_PI_2,
                    z_plane,
                    charge_sign,
                };
                if k % 2 == 1 {
                    patches.push(patch(0.0, self.inner_radius));
                }
                patches.push(patch(self.inner_radius, self.outer_radius));
            }
        }
        Ok(patches)
    }
}

pub fn decompose(geom: &LensGeometry) -> Result<Vec<PolarPatch>, GeometryError> {
    geom.decompose()
}

pub fn scale(geom: &LensGeometry, s: f64) -> Result<LensGeometry, GeometryError> {
    geom.scale(s)
}

pub fn contains(geom: &LensGeometry, p: [f64; 2]) -> bool {
    geom.contains(p)
}

pub fn rotate_180(p: [f64; 2]) -> [f64; 2] {
    [-p[0], -p[1]]
}

/// Reflection of a planar point across the line through the origin at `angle`.
pub fn mirror(p: [f64; 2], angle: f64) -> [f64; 2] {
    let (s, c) = (2.0 * angle).sin_cos();
    [c * p[0] + s * p[1], s * p[0] - c * p[1]]
}
