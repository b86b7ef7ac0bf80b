use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{AnalysisError, AnalysisSettings};
use crate::fieldsolver::{field_and_jacobian_at, field_at, BiasField, FieldError};
use crate::geometry::LensGeometry;
use crate::quadrature::QuadratureSpec;
use crate::tensor::{sorted_eigen, GradientTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Minimum,
    Saddle,
    NoneFound,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Minimum => "minimum",
            Classification::Saddle => "saddle",
            Classification::NoneFound => "none-found",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusReport {
    pub position: Vector3<f64>,
    /// |B| at `position` (the stationary value for saddles).
    pub b_min: f64,
    pub field: Vector3<f64>,
    pub classification: Classification,
    /// Some Hessian eigenvalue fell inside the zero band.
    pub degenerate: bool,
    /// Hessian of |B|, T/m², sorted descending.
    pub hessian_eigenvalues: [f64; 3],
    pub hessian_eigenvectors: [Vector3<f64>; 3],
    pub gradient_norm: f64,
    pub gradient_tensor: GradientTensor,
    pub bias_used: f64,
}

/// `∇|B| = Jᵀ B / |B|`.
pub fn gradient_of_magnitude(b: &Vector3<f64>, jacobian: &Matrix3<f64>) -> Vector3<f64> {
    jacobian.transpose() * b / b.norm()
}

fn magnitude_gradient_at(
    geom: &LensGeometry,
    bias: &BiasField,
    r: &Vector3<f64>,
    spec: &QuadratureSpec,
) -> Result<(Vector3<f64>, f64, Vector3<f64>, GradientTensor), FieldError> {
    let (sample, j) = field_and_jacobian_at(geom, bias, r, spec)?;
    Ok((
        gradient_of_magnitude(&sample.b, &j.entries),
        sample.magnitude,
        sample.b,
        j,
    ))
}

/// Hessian of |B| by central differences of the analytic gradient, symmetrized.
pub fn magnitude_hessian(
    geom: &LensGeometry,
    bias: &BiasField,
    r: &Vector3<f64>,
    step: f64,
    spec: &QuadratureSpec,
) -> Result<Matrix3<f64>, FieldError> {
    let mut h = Matrix3::zeros();
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = step;
        let gp = magnitude_gradient_at(geom, bias, &(r + e), spec)?.0;
        let gm = magnitude_gradient_at(geom, bias, &(r - e), spec)?.0;
        h.set_column(k, &((gp - gm) / (2.0 * step)));
    }
    Ok(0.5 * (h + h.transpose()))
}

fn golden_section<F>(mut a: f64, mut b: f64, tol: f64, f: F) -> Result<f64, FieldError>
where
    F: Fn(f64) -> Result<f64, FieldError>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Stationary points of |B(0, 0, z)| found by scanning and golden-section
/// refinement. Zero crossings of `B_z` (field nulls, where |B| has a kink
/// rather than a smooth extremum) are discarded.
#[derive(Debug, Clone, Copy)]
struct AxisCandidate {
    z: f64,
    magnitude: f64,
    is_min: bool,
}

fn axis_candidates(
    geom: &LensGeometry,
    bias: &BiasField,
    settings: &AnalysisSettings,
    spec: &QuadratureSpec,
) -> Result<(Vec<AxisCandidate>, (f64, f64)), FieldError> {
    let (z0, z1) = settings.z_search;
    let n = ((z1 - z0) / settings.axis_scan_step).round().max(2.0) as usize;
    let step = (z1 - z0) / n as f64;
    let axis = |z: f64| Vector3::new(0.0, 0.0, z);
    let mag = |z: f64| field_at(geom, bias, &axis(z), spec).map(|s| s.magnitude);
    let zs: Vec<f64> = (0..=n).map(|i| z0 + i as f64 * step).collect();
    let ms = zs.iter().map(|&z| mag(z)).collect::<Result<Vec<_>, _>>()?;
    let lowest = zs
        .iter()
        .zip(&ms)
        .fold((z0, f64::INFINITY), |acc, (&z, &m)| if m < acc.1 { (z, m) } else { acc });

    let mut out = Vec::new();
    for i in 1..n {
        let is_min = ms[i] <= ms[i - 1] && ms[i] < ms[i + 1];
        let is_max = ms[i] >= ms[i - 1] && ms[i] > ms[i + 1];
        if !(is_min || is_max) {
            continue;
        }
        let sign = if is_min { 1.0 } else { -1.0 };
        let z = golden_section(zs[i - 1], zs[i + 1], settings.golden_tolerance, |z| {
            mag(z).map(|m| sign * m)
        })?;
        let probe = 10.0 * settings.golden_tolerance;
        let below = field_at(geom, bias, &axis(z - probe), spec)?.b.z;
        let above = field_at(geom, bias, &axis(z + probe), spec)?.b.z;
        if below.signum() != above.signum() {
            continue;
        }
        out.push(AxisCandidate {
            z,
            magnitude: mag(z)?,
            is_min,
        });
    }
    Ok((out, lowest))
}

fn classify(values: &[f64; 3], ratio: f64) -> (Classification, bool) {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero = ratio * scale;
    let degenerate = scale == 0.0 || values.iter().any(|v| v.abs() <= zero);
    if !degenerate && values.iter().all(|&v| v > zero) {
        (Classification::Minimum, false)
    } else {
        (Classification::Saddle, degenerate)
    }
}

pub fn find_focus(
    geom: &LensGeometry,
    bias: &BiasField,
    z_search: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<FocusReport, AnalysisError> {
    let settings = AnalysisSettings {
        z_search,
        ..AnalysisSettings::default()
    };
    find_focus_with(geom, bias, &settings, spec)
}

/// Three stages: axial scan for the stationary point (the 180° symmetry puts
/// it on the axis, which is checked), 3-d Newton refinement on |B|, and
/// classification from the Hessian of |B|.
pub fn find_focus_with(
    geom: &LensGeometry,
    bias: &BiasField,
    settings: &AnalysisSettings,
    spec: &QuadratureSpec,
) -> Result<FocusReport, AnalysisError> {
    let (z0, z1) = settings.z_search;
    if !(z0.is_finite() && z1.is_finite() && z0 < z1) {
        return Err(AnalysisError::InvalidInput(format!(
            "search interval [{z0:e}, {z1:e}] m is empty"
        )));
    }
    let (candidates, lowest) = axis_candidates(geom, bias, settings, spec)?;
    let pick = |want_min: bool| {
        candidates
            .iter()
            .filter(|c| c.is_min == want_min)
            .min_by(|a, b| a.magnitude.total_cmp(&b.magnitude))
            .copied()
    };
    let Some(start) = pick(true).or_else(|| pick(false)) else {
        let r = Vector3::new(0.0, 0.0, lowest.0);
        let (g, mag, b, j) = magnitude_gradient_at(geom, bias, &r, spec)?;
        return Ok(FocusReport {
            position: r,
            b_min: mag,
            field: b,
            classification: Classification::NoneFound,
            degenerate: false,
            hessian_eigenvalues: [0.0; 3],
            hessian_eigenvectors: [Vector3::x(), Vector3::y(), Vector3::z()],
            gradient_norm: g.norm(),
            gradient_tensor: j,
            bias_used: bias.b_bias_z,
        });
    };

    let mut r = Vector3::new(0.0, 0.0, start.z);
    let (g, ..) = magnitude_gradient_at(geom, bias, &r, spec)?;
    let transverse = g.x.hypot(g.y);
    if transverse >= settings.grad_tolerance {
        return Err(AnalysisError::OffAxis {
            transverse,
            tolerance: settings.grad_tolerance,
        });
    }

    let max_step = 4.0 * settings.axis_scan_step;
    for _ in 0..settings.newton_max_iter {
        let (g, ..) = magnitude_gradient_at(geom, bias, &r, spec)?;
        if g.norm() < settings.grad_tolerance {
            break;
        }
        let h = magnitude_hessian(geom, bias, &r, settings.hessian_step, spec)?;
        let Some(delta) = h.lu().solve(&(-g)) else {
            break;
        };
        let len = delta.norm();
        r += if len > max_step { delta * (max_step / len) } else { delta };
    }

    let (g, mag, b, j) = magnitude_gradient_at(geom, bias, &r, spec)?;
    if g.norm() >= settings.grad_tolerance {
        return Err(AnalysisError::NotStationary { gradient: g.norm() });
    }
    let h = magnitude_hessian(geom, bias, &r, settings.hessian_step, spec)?;
    let eig = sorted_eigen(&h);
    let (classification, degenerate) = classify(&eig.values, settings.eigen_zero_ratio);
    Ok(FocusReport {
        position: r,
        b_min: mag,
        field: b,
        classification,
        degenerate,
        hessian_eigenvalues: eig.values,
        hessian_eigenvectors: eig.vectors,
        gradient_norm: g.norm(),
        gradient_tensor: j,
        bias_used: bias.b_bias_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{gauss, nm, to_gauss, to_nm};

    #[test]
    fn classify_rules() {
        assert_eq!(classify(&[3.0, 2.0, 1.0], 1e-4), (Classification::Minimum, false));
        assert_eq!(classify(&[3.0, 2.0, -1.0], 1e-4), (Classification::Saddle, false));
        assert_eq!(classify(&[3.0, 2.0, 1e-6], 1e-4), (Classification::Saddle, true));
        assert_eq!(classify(&[0.0; 3], 1e-4), (Classification::Saddle, true));
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let z = golden_section(0.0, 3.0, 1e-10, |x| Ok((x - 1.234).powi(2))).unwrap();
        assert!((z - 1.234).abs() < 1e-9);
    }

    #[test]
    fn default_lens_focus() {
        let report = find_focus(
            &LensGeometry::default(),
            &BiasField::default(),
            (nm(5.0), nm(60.0)),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(report.classification, Classification::Minimum);
        assert!((to_nm(report.position.z) - 23.8).abs() < 0.5, "{:?}", report.position);
        assert!(to_nm(report.position.x).abs() < 0.01 && to_nm(report.position.y).abs() < 0.01);
        assert!((to_gauss(report.b_min) - 99.5).abs() < 2.0);
        assert!(report.gradient_norm < 100.0);
        // Non-spherical: transverse curvatures differ.
        let [a, b, c] = report.hessian_eigenvalues;
        assert!(a > 0.0 && b > 0.0 && c > 0.0);
        let transverse: Vec<f64> = report
            .hessian_eigenvalues
            .iter()
            .zip(&report.hessian_eigenvectors)
            .filter(|(_, v)| v.z.abs() < 0.5)
            .map(|(l, _)| *l)
            .collect();
        assert_eq!(transverse.len(), 2);
        assert!((transverse[0] - transverse[1]).abs() > 0.1 * transverse[0]);
    }

    #[test]
    fn weak_bias_gives_saddle() {
        let report = find_focus(
            &LensGeometry::default(),
            &BiasField::new(gauss(-400.0)),
            (nm(5.0), nm(60.0)),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(report.classification, Classification::Saddle);
    }

    #[test]
    fn no_bias_never_minimum() {
        let g = LensGeometry::default();
        let spec = QuadratureSpec::default();
        let bias = BiasField::new(0.0);
        // Brute-force axis scan: |B| has no interior local minimum.
        let zs: Vec<f64> = (0..1000).map(|i| nm(5.0 + 55.0 * i as f64 / 999.0)).collect();
        let ms: Vec<f64> = zs
            .iter()
            .map(|&z| field_at(&g, &bias, &Vector3::new(0.0, 0.0, z), &spec).unwrap().magnitude)
            .collect();
        let interior_min = (1..999).any(|i| ms[i] < ms[i - 1] && ms[i] < ms[i + 1]);
        assert!(!interior_min);
        let report = find_focus(&g, &bias, (nm(5.0), nm(60.0)), &spec).unwrap();
        assert_ne!(report.classification, Classification::Minimum);
    }

    #[test]
    fn classification_independent_of_search_window() {
        let g = LensGeometry::default();
        let spec = QuadratureSpec::default();
        let bias = BiasField::default();
        let a = find_focus(&g, &bias, (nm(10.0), nm(40.0)), &spec).unwrap();
        let b = find_focus(&g, &bias, (nm(18.0), nm(55.0)), &spec).unwrap();
        assert_eq!(a.classification, b.classification);
        assert!((a.position - b.position).norm() < nm(0.01));
    }

    #[test]
    fn rejects_empty_window() {
        let err = find_focus(
            &LensGeometry::default(),
            &BiasField::default(),
            (nm(30.0), nm(10.0)),
            &QuadratureSpec::default(),
        )
        .unwrap_err();
        assert!(matches!(err, AnalysisError::InvalidInput(_)));
    }
}
