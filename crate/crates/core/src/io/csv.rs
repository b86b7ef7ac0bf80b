//! Contour and vector-field CSV files.
//!
//! Contour files carry two `#` comment lines (plane and level list) ahead of
//! the `level_gauss,polyline_id,u_nm,v_nm` table so that a file re-parses into
//! the identical [`ContourSet`], including levels with no polylines.

use std::fmt::Write as _;

use nalgebra::Vector3;

use super::decimal::{format_shifted, parse_shifted};
use super::ConfigError;
use crate::analysis::{ContourSet, Polyline};
use crate::fieldsolver::{FieldGrid, PlaneSpec};

const NM_SHIFT: i32 = 9;
const GAUSS_SHIFT: i32 = 4;

pub const CONTOUR_HEADER: &str = "level_gauss,polyline_id,u_nm,v_nm";
pub const VECTOR_HEADER: &str = "u_nm,v_nm,Bu_gauss,Bv_gauss,Bmag_gauss";

fn nm(x: f64) -> String {
    format_shifted(x, NM_SHIFT)
}

fn gauss(x: f64) -> String {
    format_shifted(x, GAUSS_SHIFT)
}

fn vec3(v: &Vector3<f64>, f: impl Fn(f64) -> String) -> String {
    format!("{} {} {}", f(v.x), f(v.y), f(v.z))
}

pub fn contours_to_csv(set: &ContourSet) -> String {
    let p = &set.plane;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# plane origin_nm={} u_axis={} v_axis={} width_u_nm={} width_v_nm={}",
        vec3(&p.origin, nm),
        vec3(&p.u_axis, |x| x.to_string()),
        vec3(&p.v_axis, |x| x.to_string()),
        nm(p.width_u),
        nm(p.width_v)
    );
    let levels: Vec<String> = set.levels.iter().map(|&l| gauss(l)).collect();
    let _ = writeln!(out, "# levels_gauss={}", levels.join(" "));
    out.push_str(CONTOUR_HEADER);
    out.push('\n');
    let mut id = 0usize;
    for (level, lines) in levels.iter().zip(&set.polylines) {
        for line in lines {
            for pt in &line.points {
                let _ = writeln!(out, "{level},{id},{},{}", nm(pt[0]), nm(pt[1]));
            }
            id += 1;
        }
    }
    out
}

fn csv_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Csv {
        line,
        message: message.into(),
    }
}

fn parse_triple(text: &str, line: usize, f: impl Fn(&str) -> Option<f64>) -> Result<Vector3<f64>, ConfigError> {
    let v: Vec<f64> = text
        .split_whitespace()
        .map(|t| f(t).ok_or_else(|| csv_err(line, format!("bad number '{t}'"))))
        .collect::<Result<_, _>>()?;
    if v.len() != 3 {
        return Err(csv_err(line, "expected three components"));
    }
    Ok(Vector3::new(v[0], v[1], v[2]))
}

fn parse_plane(body: &str, line: usize) -> Result<PlaneSpec, ConfigError> {
    let keys = ["origin_nm=", "u_axis=", "v_axis=", "width_u_nm=", "width_v_nm="];
    let mut fields = Vec::with_capacity(keys.len());
    let mut rest = body;
    for (k, key) in keys.iter().enumerate() {
        let start = rest.find(key).ok_or_else(|| csv_err(line, format!("missing {key}")))? + key.len();
        let end = keys
            .get(k + 1)
            .and_then(|next| rest[start..].find(next).map(|e| start + e))
            .unwrap_or(rest.len());
        fields.push(rest[start..end].trim());
        rest = &rest[end..];
    }
    let nm_val = |t: &str| parse_shifted(t, NM_SHIFT).ok();
    let plain = |t: &str| t.parse::<f64>().ok();
    let width = |t: &str| nm_val(t).ok_or_else(|| csv_err(line, format!("bad width '{t}'")));
    Ok(PlaneSpec {
        origin: parse_triple(fields[0], line, nm_val)?,
        u_axis: parse_triple(fields[1], line, plain)?,
        v_axis: parse_triple(fields[2], line, plain)?,
        width_u: width(fields[3])?,
        width_v: width(fields[4])?,
    })
}

/// Parses output of [`contours_to_csv`].
pub fn parse_contours_csv(text: &str) -> Result<ContourSet, ConfigError> {
    let mut plane = None;
    let mut levels: Option<Vec<f64>> = None;
    let mut polylines: Vec<Vec<Polyline>> = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        if let Some(comment) = row.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(body) = comment.strip_prefix("plane ") {
                plane = Some(parse_plane(body, line)?);
            } else if let Some(body) = comment.strip_prefix("levels_gauss=") {
                let ls = body
                    .split_whitespace()
                    .map(|t| parse_shifted(t, GAUSS_SHIFT).map_err(|_| csv_err(line, format!("bad level '{t}'"))))
                    .collect::<Result<Vec<_>, _>>()?;
                polylines = vec![Vec::new(); ls.len()];
                levels = Some(ls);
            }
            continue;
        }
        if !seen_header {
            if row != CONTOUR_HEADER {
                return Err(csv_err(line, format!("expected header '{CONTOUR_HEADER}'")));
            }
            seen_header = true;
            continue;
        }
        let levels = levels.as_ref().ok_or_else(|| csv_err(line, "missing levels_gauss comment"))?;
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 4 {
            return Err(csv_err(line, format!("expected 4 columns, found {}", cols.len())));
        }
        let level = parse_shifted(cols[0], GAUSS_SHIFT).map_err(|_| csv_err(line, "bad level_gauss"))?;
        let id: usize = cols[1].parse().map_err(|_| csv_err(line, "bad polyline_id"))?;
        let u = parse_shifted(cols[2], NM_SHIFT).map_err(|_| csv_err(line, "bad u_nm"))?;
        let v = parse_shifted(cols[3], NM_SHIFT).map_err(|_| csv_err(line, "bad v_nm"))?;
        let k = levels
            .iter()
            .position(|&l| l == level)
            .ok_or_else(|| csv_err(line, "level not listed in levels_gauss"))?;
        if current != Some((k, id)) {
            polylines[k].push(Polyline { points: Vec::new() });
            current = Some((k, id));
        }
        polylines[k].last_mut().expect("pushed above").points.push([u, v]);
    }
    let plane = plane.ok_or_else(|| csv_err(0, "missing plane comment"))?;
    let levels = levels.ok_or_else(|| csv_err(0, "missing levels_gauss comment"))?;
    if !seen_header {
        return Err(csv_err(0, "missing header row"));
    }
    Ok(ContourSet {
        plane,
        levels,
        polylines,
    })
}

/// One row of a vector-field CSV, in file units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorRow {
    pub u_nm: f64,
    pub v_nm: f64,
    pub bu_gauss: f64,
    pub bv_gauss: f64,
    pub bmag_gauss: f64,
}

pub fn vectors_to_csv(grid: &FieldGrid) -> String {
    let mut out = String::from(VECTOR_HEADER);
    out.push('\n');
    for j in 0..grid.n_v {
        for i in 0..grid.n_u {
            let (bu, bv) = grid.in_plane(i, j);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                nm(grid.u[i]),
                nm(grid.v[j]),
                gauss(bu),
                gauss(bv),
                gauss(grid.sample(i, j).magnitude)
            );
        }
    }
    out
}

pub fn parse_vectors_csv(text: &str) -> Result<Vec<VectorRow>, ConfigError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == VECTOR_HEADER => {}
        _ => return Err(csv_err(1, format!("expected header '{VECTOR_HEADER}'"))),
    }
    lines
        .map(|(idx, row)| {
            let v = row
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| csv_err(idx + 1, format!("bad number '{t}'"))))
                .collect::<Result<Vec<_>, _>>()?;
            if v.len() != 5 {
                return Err(csv_err(idx + 1, format!("expected 5 columns, found {}", v.len())));
            }
            Ok(VectorRow {
                u_nm: v[0],
                v_nm: v[1],
                bu_gauss: v[2],
                bv_gauss: v[3],
                bmag_gauss: v[4],
            })
        })
        .collect()
}
