//! Browser bindings for the lens solver: focus summary, on-axis profile and
//! an iso-|B| map on a symmetry plane.
//!
//! Quadrature orders are lowered from the library defaults so each call stays
//! interactive.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use nanolens::analysis::{
    default_levels, extract_contours, find_focus_with, focus_tensor, AnalysisSettings, Classification, FocusReport,
};
use nanolens::fieldsolver::{field_grid, PlaneSpec};
use nanolens::geometry::SymmetryPlane;
use nanolens::io::report::{focus_json, selectivity_json, tensor_json};
use nanolens::io::to_json_string;
use nanolens::resonance::{selectivity_report_at, SpinSpecies};
use nanolens::units::{gauss, nm, to_gauss, to_nm};
use nanolens::{field_at, BiasField, LensGeometry, QuadratureSpec, Vector3};

pub const DEMO_SPEC: QuadratureSpec = QuadratureSpec {
    radial_order: 24,
    angular_order: 24,
    refinement_limit: 2,
    rel_tolerance: 1e-6,
};

/// Lens parameters in display units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensInput {
    pub bias_gauss: f64,
    pub outer_nm: f64,
    pub inner_nm: f64,
    pub thickness_nm: f64,
}

impl LensInput {
    fn build(&self) -> Result<(LensGeometry, BiasField), String> {
        let d = LensGeometry::default();
        let g = LensGeometry::new(
            nm(self.outer_nm),
            nm(self.inner_nm),
            nm(self.thickness_nm),
            d.mu0_m,
            d.cut_quadrants,
        )
        .map_err(|e| e.to_string())?;
        if !self.bias_gauss.is_finite() {
            return Err("bias must be finite".into());
        }
        Ok((g, BiasField::new(gauss(self.bias_gauss))))
    }

    fn focus(&self) -> Result<(LensGeometry, BiasField, FocusReport), String> {
        let (g, b) = self.build()?;
        let f = find_focus_with(&g, &b, &AnalysisSettings::default(), &DEMO_SPEC).map_err(|e| e.to_string())?;
        Ok((g, b, f))
    }
}

/// Focus, gradient tensor and (for a minimum) 1 G proton selectivity as JSON.
pub fn summary(input: LensInput) -> Result<String, String> {
    let (g, b, f) = input.focus()?;
    let mut out = json!({ "focus": focus_json(&f) });
    let t = focus_tensor(&g, &b, &f.position, AnalysisSettings::default().eigen_zero_ratio, &DEMO_SPEC)
        .map_err(|e| e.to_string())?;
    out["tensor"] = tensor_json(&t);
    out["selectivity"] = if f.classification == Classification::Minimum {
        selectivity_report_at(&g, &b, &f, &SpinSpecies::proton(), gauss(1.0), &DEMO_SPEC)
            .map(|r| selectivity_json(&r))
            .unwrap_or(Value::Null)
    } else {
        Value::Null
    };
    Ok(to_json_string(&out))
}

/// |B| in Gauss at `n` evenly spaced heights on the symmetry axis.
pub fn profile(input: LensInput, z_from_nm: f64, z_to_nm: f64, n: usize) -> Result<Vec<f64>, String> {
    let (g, b) = input.build()?;
    if n < 2 || !(z_from_nm < z_to_nm) {
        return Err("profile needs n ≥ 2 and an increasing height range".into());
    }
    (0..n)
        .map(|i| {
            let z = z_from_nm + (z_to_nm - z_from_nm) * i as f64 / (n - 1) as f64;
            field_at(&g, &b, &Vector3::new(0.0, 0.0, nm(z)), &DEMO_SPEC)
                .map(|s| to_gauss(s.magnitude))
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// `n × n` |B| samples and contour polylines on a symmetry plane through the
/// focus, as JSON in nm and Gauss. Falls back to z = 24 nm without a focus.
pub fn plane_map(input: LensInput, plane: &str, window_nm: f64, n: usize, spacing_gauss: f64) -> Result<String, String> {
    let sym = match plane {
        "p45" => SymmetryPlane::P45,
        "m45" => SymmetryPlane::M45,
        other => return Err(format!("unknown plane '{other}' (expected p45 or m45)")),
    };
    if n < 2 || !(window_nm > 0.0) || !(spacing_gauss > 0.0) {
        return Err("map needs n ≥ 2, a positive window and a positive level spacing".into());
    }
    let (g, b) = input.build()?;
    let center = find_focus_with(&g, &b, &AnalysisSettings::default(), &DEMO_SPEC)
        .map(|f| (f.position, Some(f)))
        .unwrap_or((Vector3::new(0.0, 0.0, nm(24.0)), None));
    let grid = field_grid(&g, &b, &PlaneSpec::symmetry(&g, sym, center.0, nm(window_nm)), n, n, &DEMO_SPEC)
        .map_err(|e| e.to_string())?;
    let mags: Vec<f64> = grid.samples.iter().map(|s| to_gauss(s.magnitude)).collect();
    let (lo, hi) = mags.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &m| (l.min(m), h.max(m)));
    let anchor = center.1.as_ref().map_or(lo, |f| to_gauss(f.b_min)) + 1.0;
    let levels: Vec<f64> = default_levels(anchor, spacing_gauss, lo, hi).into_iter().map(gauss).collect();
    let set = extract_contours(&grid, &levels).map_err(|e| e.to_string())?;
    let contours: Vec<Value> = set
        .levels
        .iter()
        .zip(&set.polylines)
        .map(|(l, ps)| {
            let lines: Vec<Vec<[f64; 2]>> = ps
                .iter()
                .map(|p| p.points.iter().map(|q| [to_nm(q[0]), to_nm(q[1])]).collect())
                .collect();
            json!({ "level_gauss": to_gauss(*l), "polylines": lines })
        })
        .collect();
    Ok(to_json_string(&json!({
        "n": n,
        "window_nm": window_nm,
        "center_nm": [to_nm(center.0.x), to_nm(center.0.y), to_nm(center.0.z)],
        "classification": center.1.map(|f| f.classification.as_str()),
        "bmag_gauss": mags,
        "range_gauss": [lo, hi],
        "contours": contours,
    })))
}

fn js_err(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen(js_name = focusSummary)]
pub fn focus_summary(bias_gauss: f64, outer_nm: f64, inner_nm: f64, thickness_nm: f64) -> Result<String, JsError> {
    summary(LensInput { bias_gauss, outer_nm, inner_nm, thickness_nm }).map_err(js_err)
}

#[wasm_bindgen(js_name = axisProfile)]
pub fn axis_profile(
    bias_gauss: f64,
    outer_nm: f64,
    inner_nm: f64,
    thickness_nm: f64,
    z_from_nm: f64,
    z_to_nm: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    profile(LensInput { bias_gauss, outer_nm, inner_nm, thickness_nm }, z_from_nm, z_to_nm, n).map_err(js_err)
}

#[wasm_bindgen(js_name = planeMap)]
pub fn plane_map_js(
    bias_gauss: f64,
    outer_nm: f64,
    inner_nm: f64,
    thickness_nm: f64,
    plane: &str,
    window_nm: f64,
    n: usize,
    spacing_gauss: f64,
) -> Result<String, JsError> {
    plane_map(LensInput { bias_gauss, outer_nm, inner_nm, thickness_nm }, plane, window_nm, n, spacing_gauss)
        .map_err(js_err)
}
