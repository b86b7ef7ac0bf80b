//! JSON reports in boundary units.
//!
//! All floats pass through [`round_sig`] before serialization, so identical
//! inputs give byte-identical output regardless of last-bit noise.

use nalgebra::{Matrix3, Vector3};
use serde_json::{json, Map, Value};

use crate::analysis::{BiasSweep, FocusReport, FocusTensor, ShellExtents};
use crate::fieldsolver::FieldSample;
use crate::resonance::SelectivityReport;
use crate::tensor::TensorFrame;
use crate::units::{to_gauss, to_nm, GAUSS_PER_ANGSTROM, GAUSS_PER_NM};

pub const SIGNIFICANT_DIGITS: usize = 9;

/// 1 G/nm² in T/m².
const GAUSS_PER_NM2: f64 = 1e14;

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x, SIGNIFICANT_DIGITS));
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with floats rounded and keys sorted.
pub fn to_json_string(value: &Value) -> String {
    let mut v = value.clone();
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn vec_in(v: &Vector3<f64>, scale: impl Fn(f64) -> f64) -> Value {
    json!([scale(v.x), scale(v.y), scale(v.z)])
}

fn mat_in(m: &Matrix3<f64>, unit: f64) -> Value {
    Value::Array(
        (0..3)
            .map(|i| json!([m[(i, 0)] / unit, m[(i, 1)] / unit, m[(i, 2)] / unit]))
            .collect(),
    )
}

fn frame_name(f: &TensorFrame) -> Value {
    match f {
        TensorFrame::Lab => json!("lab"),
        TensorFrame::Rotated { angle } => json!(format!("rotated-{}deg", round_sig(angle.to_degrees(), 6))),
    }
}

pub fn field_json(sample: &FieldSample) -> Value {
    let p = sample.position;
    json!({
        "x_nm": to_nm(p.x),
        "y_nm": to_nm(p.y),
        "z_nm": to_nm(p.z),
        "bx_gauss": to_gauss(sample.b.x),
        "by_gauss": to_gauss(sample.b.y),
        "bz_gauss": to_gauss(sample.b.z),
        "bmag_gauss": to_gauss(sample.magnitude),
    })
}

pub fn focus_json(r: &FocusReport) -> Value {
    json!({
        "x_nm": to_nm(r.position.x),
        "y_nm": to_nm(r.position.y),
        "z_nm": to_nm(r.position.z),
        "bmin_gauss": to_gauss(r.b_min),
        "field_gauss": vec_in(&r.field, to_gauss),
        "classification": r.classification.as_str(),
        "degenerate": r.degenerate,
        "hessian_eigenvalues_gauss_per_nm2": r.hessian_eigenvalues.map(|l| l / GAUSS_PER_NM2),
        "hessian_eigenvectors": r.hessian_eigenvectors.iter().map(|v| vec_in(v, |x| x)).collect::<Vec<_>>(),
        "gradient_norm_gauss_per_nm": r.gradient_norm / GAUSS_PER_NM,
        "gradient_tensor_gauss_per_angstrom": mat_in(&r.gradient_tensor.entries, GAUSS_PER_ANGSTROM),
        "bias_gauss": to_gauss(r.bias_used),
    })
}

pub fn sweep_json(s: &BiasSweep) -> Value {
    let points: Vec<Value> = s
        .reports
        .iter()
        .map(|r| {
            json!({
                "bias_gauss": to_gauss(r.bias_used),
                "classification": r.classification.as_str(),
                "degenerate": r.degenerate,
                "z_nm": to_nm(r.position.z),
                "bmin_gauss": to_gauss(r.b_min),
                "hessian_eigenvalues_gauss_per_nm2": r.hessian_eigenvalues.map(|l| l / GAUSS_PER_NM2),
            })
        })
        .collect();
    let transitions: Vec<Value> = s
        .transitions
        .iter()
        .map(|t| {
            json!({
                "last_bias_gauss": to_gauss(t.last_bias),
                "next_bias_gauss": to_gauss(t.next_bias),
                "from": t.from.as_str(),
                "to": t.to.as_str(),
            })
        })
        .collect();
    json!({
        "step_gauss": to_gauss(s.step),
        "points": points,
        "transitions": transitions,
        "minimum_window_gauss": s.minimum_window().map(|(a, b)| json!([to_gauss(a), to_gauss(b)])),
    })
}

pub fn tensor_json(t: &FocusTensor) -> Value {
    let angle = match t.rotated.frame {
        TensorFrame::Rotated { angle } => angle.to_degrees(),
        TensorFrame::Lab => 0.0,
    };
    json!({
        "lab_gauss_per_angstrom": mat_in(&t.lab.entries, GAUSS_PER_ANGSTROM),
        "rotated_gauss_per_angstrom": mat_in(&t.rotated.entries, GAUSS_PER_ANGSTROM),
        "rotation_angle_deg": angle,
        "eigenvalues_gauss_per_angstrom": t.eigen.values.map(|l| l / GAUSS_PER_ANGSTROM),
        "eigenvectors": t.eigen.vectors.iter().map(|v| vec_in(v, |x| x)).collect::<Vec<_>>(),
        "zero_eigenvalue_index": t.zero_index,
        "zero_axis_tilt_deg": t.zero_axis_tilt_deg,
        "diagonal_frame": t.diagonal_frame.as_ref().map(frame_name),
        "trace_gauss_per_angstrom": t.lab.trace() / GAUSS_PER_ANGSTROM,
        "asymmetry_gauss_per_angstrom": t.lab.asymmetry() / GAUSS_PER_ANGSTROM,
    })
}

pub fn shell_json(s: &ShellExtents) -> Value {
    let mut axes = Map::new();
    for a in &s.axes {
        axes.insert(
            a.axis.as_str().to_string(),
            json!({
                "direction": vec_in(&a.direction, |x| x),
                "extent_nm": to_nm(a.extent),
                "reach_nm": [to_nm(a.reach.0), to_nm(a.reach.1)],
            }),
        );
    }
    json!({
        "bmin_gauss": to_gauss(s.b_min),
        "center_level_gauss": to_gauss(s.center_level),
        "linewidth_gauss": to_gauss(s.linewidth),
        "axes": axes,
    })
}

pub fn selectivity_json(r: &SelectivityReport) -> Value {
    let mut axes = Map::new();
    for a in &r.axes {
        axes.insert(
            a.axis.as_str().to_string(),
            json!({
                "direction": vec_in(&a.direction, |x| x),
                "extent_nm": to_nm(a.extent),
                "frequency_gradient_khz_per_nm": a.frequency_gradient * 1e-9 / 1e3,
                "lattice_sites": a.lattice_sites,
                "detuning_linewidths_at_5nm": a.detuning_linewidths_at_probe,
            }),
        );
    }
    json!({
        "species": r.species.name,
        "linewidth_gauss": to_gauss(r.linewidth),
        "linewidth_khz": r.linewidth_frequency / 1e3,
        "focus_nm": vec_in(&r.focus_position, to_nm),
        "bmin_gauss": to_gauss(r.b_min),
        "center_level_gauss": to_gauss(r.center_level),
        "focus_frequency_khz": r.focus_frequency / 1e3,
        "center_frequency_khz": r.center_frequency / 1e3,
        "axes": axes,
    })
}

pub fn error_json(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}
