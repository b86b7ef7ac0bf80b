use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::focus::{find_focus_with, Classification, FocusReport};
use super::{AnalysisError, AnalysisSettings};
use crate::fieldsolver::{field_at, BiasField};
use crate::geometry::{LensGeometry, SymmetryPlane};
use crate::quadrature::QuadratureSpec;

/// Scan resolution along each principal axis.
pub const SHELL_SCAN_STEP: f64 = 0.01e-9;
/// Half-length beyond which a shell is reported as unbounded.
pub const SHELL_SCAN_LIMIT: f64 = 20e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShellAxis {
    /// Principal direction closest to the +45° symmetry axis.
    P45,
    /// Principal direction closest to the −45° symmetry axis.
    M45,
    /// Principal direction closest to ẑ.
    Z,
}

impl ShellAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShellAxis::P45 => "p45",
            ShellAxis::M45 => "m45",
            ShellAxis::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisExtent {
    pub axis: ShellAxis,
    pub direction: Vector3<f64>,
    /// Total length along the line inside the shell.
    pub extent: f64,
    /// Farthest distance reached inside the shell on the negative / positive side.
    pub reach: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellExtents {
    pub focus: Vector3<f64>,
    pub b_min: f64,
    pub center_level: f64,
    pub linewidth: f64,
    pub axes: [AxisExtent; 3],
}

impl ShellExtents {
    pub fn get(&self, axis: ShellAxis) -> &AxisExtent {
        self.axes
            .iter()
            .find(|a| a.axis == axis)
            .expect("all three axes are labeled")
    }
}

/// Measure of `{t ∈ [0, h] : lo < f(t) < hi}` for `f` linear from `f0` to `f1`.
fn band_measure(f0: f64, f1: f64, lo: f64, hi: f64, h: f64) -> f64 {
    let (a, b) = if f0 <= f1 { (f0, f1) } else { (f1, f0) };
    if b - a <= f64::EPSILON * b.abs() {
        return if lo < a && a < hi { h } else { 0.0 };
    }
    let overlap = (b.min(hi) - a.max(lo)).max(0.0);
    h * overlap / (b - a)
}

/// Scans outward from `origin` along `±dir` until |B| exceeds the band's
/// upper edge, returning (extent, (reach_minus, reach_plus)).
fn scan_axis(
    geom: &LensGeometry,
    bias: &BiasField,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    b_origin: f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, (f64, f64)), AnalysisError> {
    let h = SHELL_SCAN_STEP;
    let steps = (SHELL_SCAN_LIMIT / h).round() as usize;
    let mut total = 0.0;
    let mut reach = [0.0f64; 2];
    for (side, sign) in [-1.0f64, 1.0].into_iter().enumerate() {
        let mut prev = b_origin;
        let mut closed = false;
        for k in 1..=steps {
            let r = origin + dir * (sign * k as f64 * h);
            let cur = field_at(geom, bias, &r, spec)?.magnitude;
            let m = band_measure(prev, cur, lo, hi, h);
            if m > 0.0 {
                total += m;
                reach[side] = (k - 1) as f64 * h + m;
            }
            prev = cur;
            if cur >= hi {
                closed = true;
                break;
            }
        }
        if !closed {
            return Err(AnalysisError::ShellUnbounded {
                axis: format!("{:+.3}, {:+.3}, {:+.3}", dir.x * sign, dir.y * sign, dir.z * sign),
                limit: SHELL_SCAN_LIMIT,
            });
        }
    }
    Ok((total, (reach[0], reach[1])))
}

fn label_axes(geom: &LensGeometry, vectors: &[Vector3<f64>; 3]) -> [(ShellAxis, Vector3<f64>); 3] {
    let z_idx = (0..3)
        .max_by(|&a, &b| vectors[a].z.abs().total_cmp(&vectors[b].z.abs()))
        .unwrap_or(2);
    let (s, c) = geom.symmetry_axis(SymmetryPlane::P45).sin_cos();
    let p45 = Vector3::new(c, s, 0.0);
    let rest: Vec<usize> = (0..3).filter(|&i| i != z_idx).collect();
    let (p_idx, m_idx) = if vectors[rest[0]].dot(&p45).abs() >= vectors[rest[1]].dot(&p45).abs() {
        (rest[0], rest[1])
    } else {
        (rest[1], rest[0])
    };
    [
        (ShellAxis::P45, vectors[p_idx]),
        (ShellAxis::M45, vectors[m_idx]),
        (ShellAxis::Z, vectors[z_idx]),
    ]
}

/// Shell extents along the principal axes of a previously located minimum.
pub fn shell_extent_at(
    geom: &LensGeometry,
    bias: &BiasField,
    focus: &FocusReport,
    center_level: f64,
    linewidth: f64,
    spec: &QuadratureSpec,
) -> Result<ShellExtents, AnalysisError> {
    if focus.classification != Classification::Minimum {
        return Err(AnalysisError::NoMinimum(focus.classification));
    }
    if !(linewidth.is_finite() && linewidth > 0.0) {
        return Err(AnalysisError::InvalidInput(format!("linewidth {linewidth:e} T must be positive")));
    }
    if !(center_level >= focus.b_min) {
        return Err(AnalysisError::InvalidInput(format!(
            "center level {center_level:e} T is below the minimum {:e} T",
            focus.b_min
        )));
    }
    let (lo, hi) = (center_level - linewidth / 2.0, center_level + linewidth / 2.0);
    let labeled = label_axes(geom, &focus.hessian_eigenvectors);
    let mut axes = [AxisExtent {
        axis: ShellAxis::Z,
        direction: Vector3::z(),
        extent: 0.0,
        reach: (0.0, 0.0),
    }; 3];
    for (slot, (axis, dir)) in axes.iter_mut().zip(labeled) {
        let (extent, reach) = scan_axis(geom, bias, &focus.position, &dir, focus.b_min, lo, hi, spec)?;
        *slot = AxisExtent {
            axis,
            direction: dir,
            extent,
            reach,
        };
    }
    Ok(ShellExtents {
        focus: focus.position,
        b_min: focus.b_min,
        center_level,
        linewidth,
        axes,
    })
}

/// Locates the focus in the default search window, then measures the shell.
pub fn resonant_shell_extent(
    geom: &LensGeometry,
    bias: &BiasField,
    center_level: f64,
    linewidth: f64,
    spec: &QuadratureSpec,
) -> Result<ShellExtents, AnalysisError> {
    let focus = find_focus_with(geom, bias, &AnalysisSettings::default(), spec)?;
    shell_extent_at(geom, bias, &focus, center_level, linewidth, spec)
}

/// Center level that puts the minimum at the lower edge of the band.
pub fn band_above_minimum(b_min: f64, linewidth: f64) -> f64 {
    b_min + linewidth / 2.0
}
