//! Acceptance criteria for the reference lens, one PASS/FAIL line each.
//!
//! Runs as a plain binary so every line is printed; exits non-zero when any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nanolens::amperian::{biot_savart_field, sheets_for};
use nanolens::analysis::{
    bias_sweep_with, default_levels, extract_contours, find_focus_with, focus_tensor, Classification, ContourSet,
    FocusReport, ShellAxis,
};
use nanolens::fieldsolver::{field_and_jacobian_at, field_grid, PlaneSpec};
use nanolens::geometry::SymmetryPlane;
use nanolens::io::{RunConfig, DEFAULT_CONFIG_TOML};
use nanolens::resonance::{selectivity_report_at, SpinSpecies};
use nanolens::units::{gauss, nm, to_gauss, to_nm, GAUSS_PER_ANGSTROM, GAUSS_PER_NM};
use nanolens::validation::{halton_box, test_box};
use nanolens::{field_at, BiasField, LensGeometry, QuadratureSpec, Vector3};

type Outcome = Result<String, String>;

struct Setup {
    geom: LensGeometry,
    bias: BiasField,
    spec: QuadratureSpec,
    settings: nanolens::analysis::AnalysisSettings,
    focus: FocusReport,
    focus_seconds: f64,
}

fn setup() -> Setup {
    let cfg = RunConfig::from_toml_str(DEFAULT_CONFIG_TOML).expect("bundled config parses");
    let geom = cfg.geometry().unwrap();
    let bias = cfg.bias();
    let spec = cfg.quadrature().unwrap();
    let settings = cfg.analysis_settings().unwrap();
    let t = Instant::now();
    let focus = find_focus_with(&geom, &bias, &settings, &spec).expect("focus search runs");
    Setup {
        geom,
        bias,
        spec,
        settings,
        focus,
        focus_seconds: t.elapsed().as_secs_f64(),
    }
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn focus_reproduction(s: &Setup) -> Outcome {
    let z = to_nm(s.focus.position.z);
    let b = to_gauss(s.focus.b_min);
    let ok = (z - 23.8).abs() <= 0.5
        && (b - 99.5).abs() <= 2.0
        && s.focus.classification == Classification::Minimum
        && s.focus_seconds < 30.0;
    verdict(
        ok,
        format!(
            "z = {z:.4} nm, |B|min = {b:.4} G, {}, {:.2} s",
            s.focus.classification.as_str(),
            s.focus_seconds
        ),
    )
}

fn bias_window(s: &Setup) -> Outcome {
    let step = 25.0;
    let sweep = bias_sweep_with(&s.geom, (gauss(-900.0), gauss(-400.0)), gauss(step), &s.settings, &s.spec)
        .map_err(|e| e.to_string())?;
    let (lo, hi) = (-750.0, -550.0);
    let mut problems = Vec::new();
    for r in &sweep.reports {
        let b = to_gauss(r.bias_used);
        let min = r.classification == Classification::Minimum;
        let inside = b > lo + 1e-6 && b < hi - 1e-6;
        let far_outside = b < lo - step - 1e-6 || b > hi + step + 1e-6;
        if inside && !min {
            problems.push(format!("{b} G is {} inside the window", r.classification.as_str()));
        }
        if far_outside && min {
            problems.push(format!("{b} G is a minimum outside the window"));
        }
    }
    for t in &sweep.transitions {
        let mid = to_gauss(0.5 * (t.last_bias + t.next_bias));
        if (mid - lo).abs() > step && (mid - hi).abs() > step {
            problems.push(format!("transition near {mid} G"));
        }
    }
    let window = sweep.minimum_window().map(|(a, b)| (to_gauss(a), to_gauss(b)));
    let detail = format!("minimum for {window:?} G, {} transitions", sweep.transitions.len());
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

fn gradient_tensor(s: &Setup) -> Outcome {
    let t = focus_tensor(&s.geom, &s.bias, &s.focus.position, s.settings.eigen_zero_ratio, &s.spec)
        .map_err(|e| e.to_string())?;
    let ev = t.eigen.values.map(|l| l / GAUSS_PER_ANGSTROM);
    let max = t.lab.max_abs();
    let trace = t.lab.trace().abs() / max;
    let asym = t.lab.asymmetry() / max;
    let ok = (ev[0] - 2.5).abs() <= 0.2
        && ev[1].abs() <= 0.2
        && (ev[2] + 2.5).abs() <= 0.2
        && t.zero_index == 1
        && t.zero_axis_tilt_deg < 1.0
        && trace < 1e-6
        && asym < 1e-6;
    verdict(
        ok,
        format!(
            "eigenvalues [{:.4}, {:.2e}, {:.4}] G/Å, zero axis tilt {:.3}°, trace {trace:.1e}, asymmetry {asym:.1e}",
            ev[0], ev[1], ev[2], t.zero_axis_tilt_deg
        ),
    )
}

fn resonance(s: &Setup) -> Outcome {
    let f = SpinSpecies::proton().frequency(s.focus.b_min) / 1e3;
    verdict((415.0..=433.0).contains(&f), format!("proton at focus {f:.3} kHz"))
}

fn selectivity(s: &Setup) -> Outcome {
    let r = selectivity_report_at(&s.geom, &s.bias, &s.focus, &SpinSpecies::proton(), gauss(1.0), &s.spec)
        .map_err(|e| e.to_string())?;
    let ext: Vec<(ShellAxis, f64)> = [ShellAxis::P45, ShellAxis::M45, ShellAxis::Z]
        .into_iter()
        .map(|a| (a, to_nm(r.shell.get(a).extent)))
        .collect();
    let ok = ext.iter().all(|(_, e)| (1.0..=4.0).contains(e));
    let detail = ext
        .iter()
        .map(|(a, e)| format!("{} {e:.4} nm", a.as_str()))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(ok, detail)
}

fn oracle(s: &Setup) -> Outcome {
    let (lo, hi) = test_box();
    let sheets = sheets_for(&s.geom);
    let none = BiasField::new(0.0);
    let mut worst = 0.0f64;
    let mut compared = 0;
    for r in halton_box(50, lo, hi, [2, 3, 5]) {
        let a = field_at(&s.geom, &none, &r, &s.spec).map_err(|e| e.to_string())?.b;
        let b = biot_savart_field(&sheets, &r, &s.spec).map_err(|e| e.to_string())?.b;
        for k in 0..3 {
            if a[k].abs() > gauss(1.0) {
                worst = worst.max((a[k] - b[k]).abs() / a[k].abs());
                compared += 1;
            }
        }
    }
    verdict(worst <= 1e-4, format!("worst relative difference {worst:.2e} over {compared} components"))
}

fn random_points(seed: u64, n: usize) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Vector3::new(
                nm(rng.gen_range(-30.0..30.0)),
                nm(rng.gen_range(-30.0..30.0)),
                nm(rng.gen_range(10.0..50.0)),
            )
        })
        .collect()
}

fn laplacian(s: &Setup, r: &Vector3<f64>, h: f64) -> Result<(Vector3<f64>, Vector3<f64>), String> {
    let b = |p: Vector3<f64>| field_at(&s.geom, &s.bias, &p, &s.spec).map(|f| f.b).map_err(|e| e.to_string());
    let b0 = b(*r)?;
    let (mut lap, mut scale) = (Vector3::zeros(), Vector3::zeros());
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = h;
        let d2 = (b(r + e)? + b(r - e)? - 2.0 * b0) / (h * h);
        lap += d2;
        scale += d2.abs();
    }
    Ok((lap, scale))
}

fn maxwell(s: &Setup) -> Outcome {
    let mut worst_div_curl = 0.0f64;
    let mut worst_lap = 0.0f64;
    let h = nm(0.2);
    for r in random_points(7, 20) {
        let (_, j) = field_and_jacobian_at(&s.geom, &s.bias, &r, &s.spec).map_err(|e| e.to_string())?;
        let m = j.max_abs();
        worst_div_curl = worst_div_curl.max(j.trace().abs() / m).max(j.asymmetry() / m);
        // A harmonic component has L(h) ≈ c·h², so |L(h)| sits near a third
        // of |L(2h) − L(h)|; anything else leaves a residual that does not shrink.
        let (l1, scale) = laplacian(s, &r, h)?;
        let (l2, _) = laplacian(s, &r, 2.0 * h)?;
        for k in 0..3 {
            worst_lap = worst_lap.max(l1[k].abs() / ((l2[k] - l1[k]).abs() + 1e-6 * scale[k]));
        }
    }
    verdict(
        worst_div_curl < 1e-6 && worst_lap <= 1.0,
        format!("trace/asymmetry {worst_div_curl:.2e}, Laplacian over its FD error {worst_lap:.3}"),
    )
}

fn scaling(s: &Setup) -> Outcome {
    let scaled = s.geom.scale(10.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in random_points(8, 10) {
        let a = field_at(&s.geom, &s.bias, &r, &s.spec).map_err(|e| e.to_string())?.b;
        let b = field_at(&scaled, &s.bias, &(r * 10.0), &s.spec).map_err(|e| e.to_string())?.b;
        worst = worst.max((a - b).norm() / a.norm());
    }
    verdict(worst <= 1e-6, format!("worst relative difference {worst:.2e}"))
}

fn jacobian_fd(s: &Setup) -> Outcome {
    let h = nm(0.01);
    let mut worst = 0.0f64;
    for r in random_points(9, 10) {
        let (_, j) = field_and_jacobian_at(&s.geom, &s.bias, &r, &s.spec).map_err(|e| e.to_string())?;
        let floor = (1e-6 * j.max_abs()).max(GAUSS_PER_NM);
        for col in 0..3 {
            let mut e = Vector3::zeros();
            e[col] = h;
            let plus = field_at(&s.geom, &s.bias, &(r + e), &s.spec).map_err(|e| e.to_string())?.b;
            let minus = field_at(&s.geom, &s.bias, &(r - e), &s.spec).map_err(|e| e.to_string())?.b;
            let fd = (plus - minus) / (2.0 * h);
            for row in 0..3 {
                let a = j.entries[(row, col)];
                if a.abs() > floor {
                    worst = worst.max((fd[row] - a).abs() / a.abs());
                }
            }
        }
    }
    verdict(worst <= 1e-3, format!("worst entrywise relative difference {worst:.2e}"))
}

fn plane_contours(s: &Setup, plane: SymmetryPlane) -> Result<ContourSet, String> {
    let p = PlaneSpec::symmetry(&s.geom, plane, s.focus.position, nm(20.0));
    let grid = field_grid(&s.geom, &s.bias, &p, 201, 201, &s.spec).map_err(|e| e.to_string())?;
    let (lo, hi) = grid
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x.magnitude), h.max(x.magnitude)));
    let levels: Vec<f64> = default_levels(100.5, 6.0, to_gauss(lo), to_gauss(hi))
        .into_iter()
        .map(gauss)
        .collect();
    extract_contours(&grid, &levels).map_err(|e| e.to_string())
}

fn contours(s: &Setup) -> Outcome {
    let mut innermost = Vec::new();
    for plane in [SymmetryPlane::P45, SymmetryPlane::M45] {
        let set = plane_contours(s, plane)?;
        let enclosing = set.enclosing([0.0, 0.0]);
        let (level, poly) = enclosing.first().ok_or_else(|| format!("{plane:?}: no contour encloses the focus"))?;
        if !poly.is_closed() {
            return Err(format!("{plane:?}: innermost contour is open"));
        }
        let (u_lo, u_hi) = poly
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[0]), h.max(p[0])));
        innermost.push((to_gauss(*level), poly.signed_area().abs() * 1e18, to_nm(u_hi - u_lo)));
    }
    let (p, m) = (innermost[0], innermost[1]);
    let same_level = (p.0 - m.0).abs() < 1e-9;
    let area_ratio = p.1.max(m.1) / p.1.min(m.1);
    let ok = same_level && area_ratio > 1.05;
    verdict(
        ok,
        format!(
            "innermost closed level {:.1} G on both planes; areas p45 {:.3} nm², m45 {:.3} nm² (ratio {area_ratio:.3}); widths {:.3} / {:.3} nm",
            p.0, p.1, m.1, p.2, m.2
        ),
    )
}

fn main() -> ExitCode {
    let s = setup();
    let criteria: [(&str, fn(&Setup) -> Outcome); 10] = [
        ("focus reproduction", focus_reproduction),
        ("bias window", bias_window),
        ("gradient tensor", gradient_tensor),
        ("resonance frequency", resonance),
        ("selectivity", selectivity),
        ("oracle equivalence", oracle),
        ("Maxwell invariants", maxwell),
        ("scaling", scaling),
        ("Jacobian vs finite differences", jacobian_fd),
        ("contour output", contours),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check(&s);
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1} s]", i + 1),
            Err(d) => {
                println!("FAIL {:>2} {name}: {d} [{secs:.1} s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
