use std::sync::OnceLock;

use nanolens::analysis::{
    band_above_minimum, bias_sweep, default_levels, extract_contours, find_focus_with, shell_extent_at, vector_grid,
    winding_number, AnalysisSettings, Classification, FocusReport, ShellAxis, VectorPlane,
};
use nanolens::fieldsolver::{field_grid, PlaneSpec};
use nanolens::geometry::SymmetryPlane;
use nanolens::resonance::{selectivity_report_at, SpinSpecies};
use nanolens::units::{gauss, nm, to_gauss, to_nm};
use nanolens::{field_at, BiasField, LensGeometry, QuadratureSpec, Vector3};

fn focus() -> &'static FocusReport {
    static FOCUS: OnceLock<FocusReport> = OnceLock::new();
    FOCUS.get_or_init(|| {
        find_focus_with(
            &LensGeometry::default(),
            &BiasField::default(),
            &AnalysisSettings::default(),
            &QuadratureSpec::default(),
        )
        .unwrap()
    })
}

fn lens() -> (LensGeometry, BiasField, QuadratureSpec) {
    (LensGeometry::default(), BiasField::default(), QuadratureSpec::default())
}

#[test]
fn focus_sits_on_the_axis() {
    let f = focus();
    assert_eq!(f.classification, Classification::Minimum);
    assert!(to_nm(f.position.x).abs() < 0.01 && to_nm(f.position.y).abs() < 0.01);
    assert!((to_nm(f.position.z) - 23.8016).abs() < 1e-3, "{}", to_nm(f.position.z));
    assert!((to_gauss(f.b_min) - 99.5322).abs() < 1e-3, "{}", to_gauss(f.b_min));
}

#[test]
fn transverse_curvatures_differ() {
    let f = focus();
    let h: Vec<f64> = f.hessian_eigenvalues.iter().map(|l| l / 1e14).collect();
    assert!(h.iter().all(|&l| l > 0.0));
    assert!((h[0] - 8.344).abs() < 0.01 && (h[1] - 3.037).abs() < 0.01 && (h[2] - 0.618).abs() < 0.01, "{h:?}");
    assert!(f.hessian_eigenvectors[2].z.abs() > 0.999);
}

#[test]
fn sweep_minimum_varies_continuously() {
    let (g, _, s) = lens();
    let sweep = bias_sweep(&g, (gauss(-775.0), gauss(-525.0)), gauss(25.0), &s).unwrap();
    let labels: Vec<&str> = sweep.reports.iter().map(|r| r.classification.as_str()).collect();
    assert_eq!(labels.first(), Some(&"saddle"));
    assert_eq!(labels.last(), Some(&"saddle"));
    assert_eq!(sweep.transitions.len(), 2);
    assert_eq!(sweep.minimum_window().map(|(a, b)| (to_gauss(a), to_gauss(b))), Some((-750.0, -575.0)));
    for w in sweep.reports.windows(2) {
        let jump = to_gauss((w[1].b_min - w[0].b_min).abs());
        assert!(jump < 1.5 * 25.0, "|B| jumped {jump} G between neighbouring biases");
    }
}

#[test]
fn minimum_tracks_bias_at_fixed_height() {
    let (g, _, s) = lens();
    let sweep = bias_sweep(&g, (gauss(-700.0), gauss(-600.0)), gauss(50.0), &s).unwrap();
    for r in &sweep.reports {
        assert!((r.position.z - focus().position.z).abs() < nm(1e-3));
    }
    let d = to_gauss(sweep.reports[0].b_min - sweep.reports[2].b_min);
    assert!((d - 100.0).abs() < 1e-6, "{d}");
}

#[test]
fn vector_grid_is_centered_on_the_focus() {
    let (g, b, s) = lens();
    let f = focus();
    let grid = vector_grid(&g, &b, &f.position, VectorPlane::P45, nm(10.0), 21, &s).unwrap();
    let c = grid.sample(10, 10);
    assert!((c.position - f.position).norm() < 1e-18);
    assert!((c.b - f.field).norm() <= 1e-12 * f.field.norm());
}

#[test]
fn p45_plane_field_is_mirror_symmetric() {
    let (g, b, s) = lens();
    let grid = vector_grid(&g, &b, &focus().position, VectorPlane::P45, nm(10.0), 21, &s).unwrap();
    let n = grid.n_u;
    let scale = grid.samples.iter().map(|x| x.magnitude).fold(0.0, f64::max);
    for j in 0..grid.n_v {
        for i in 0..n {
            let (bu, bv) = grid.in_plane(i, j);
            let (mu, mv) = grid.in_plane(n - 1 - i, j);
            assert!((bu + mu).abs() < 1e-9 * scale, "Bu not odd at ({i}, {j})");
            assert!((bv - mv).abs() < 1e-9 * scale, "Bz not even at ({i}, {j})");
            let normal = grid.sample(i, j).b.dot(&grid.plane.normal());
            assert!(normal.abs() < 1e-9 * scale, "field leaves the symmetry plane at ({i}, {j})");
        }
    }
}

#[test]
fn in_plane_field_winds_once_around_the_focus() {
    let (g, b, s) = lens();
    let p = &focus().position;
    let horizontal = vector_grid(&g, &b, p, VectorPlane::Horizontal, nm(10.0), 21, &s).unwrap();
    assert_eq!(winding_number(&horizontal), -1);
    for plane in [VectorPlane::P45, VectorPlane::M45] {
        let grid = vector_grid(&g, &b, p, plane, nm(10.0), 21, &s).unwrap();
        assert_eq!(winding_number(&grid), 0, "{plane:?}");
    }
}

#[test]
fn coarse_contours_enclose_the_focus() {
    let (g, b, s) = lens();
    let f = focus();
    let mut areas = Vec::new();
    for plane in [SymmetryPlane::P45, SymmetryPlane::M45] {
        let grid = field_grid(&g, &b, &PlaneSpec::symmetry(&g, plane, f.position, nm(20.0)), 41, 41, &s).unwrap();
        let (lo, hi) = grid
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x.magnitude), h.max(x.magnitude)));
        let levels: Vec<f64> = default_levels(100.5, 6.0, to_gauss(lo), to_gauss(hi)).into_iter().map(gauss).collect();
        let set = extract_contours(&grid, &levels).unwrap();
        let inner = set.enclosing([0.0, 0.0]);
        let (level, poly) = inner.first().expect("a contour encloses the focus");
        assert!(poly.is_closed());
        assert_eq!(to_gauss(*level), 100.5);
        areas.push(poly.signed_area().abs());
    }
    assert!(areas[1] > 1.3 * areas[0], "{areas:?}");
}

#[test]
fn narrow_linewidth_gives_sub_nm_transverse_shell() {
    let (g, b, s) = lens();
    let f = focus();
    let lw = gauss(0.01);
    let shell = shell_extent_at(&g, &b, f, band_above_minimum(f.b_min, lw), lw, &s).unwrap();
    let p = to_nm(shell.get(ShellAxis::P45).extent);
    let m = to_nm(shell.get(ShellAxis::M45).extent);
    let z = to_nm(shell.get(ShellAxis::Z).extent);
    assert!(p < 1.0 && m < 1.0, "{p} {m}");
    assert!((p - 0.098).abs() < 0.002 && (m - 0.16).abs() < 0.003 && (z - 0.36).abs() < 0.005, "{p} {m} {z}");
}

#[test]
fn shell_at_one_gauss() {
    let (g, b, s) = lens();
    let r = selectivity_report_at(&g, &b, focus(), &SpinSpecies::proton(), gauss(1.0), &s).unwrap();
    let ext = |a| to_nm(r.shell.get(a).extent);
    assert!((ext(ShellAxis::P45) - 0.9818).abs() < 1e-3);
    assert!((ext(ShellAxis::M45) - 1.6272).abs() < 1e-3);
    assert!((ext(ShellAxis::Z) - 3.6018).abs() < 1e-3);
    let sites: Vec<usize> = r.axes.iter().map(|a| a.lattice_sites).collect();
    assert_eq!(sites, vec![9, 17, 36]);
}

#[test]
fn spins_five_nm_away_are_detuned() {
    let (g, b, s) = lens();
    let r = selectivity_report_at(&g, &b, focus(), &SpinSpecies::proton(), gauss(1.0), &s).unwrap();
    for a in &r.axes {
        match a.axis {
            ShellAxis::P45 | ShellAxis::M45 => assert!(a.detuning_linewidths_at_probe > 10.0, "{a:?}"),
            // The axial curvature is five times weaker than the softer
            // transverse one, so 5 nm along z stays within about 7 linewidths.
            ShellAxis::Z => assert!((a.detuning_linewidths_at_probe - 6.86).abs() < 0.01, "{a:?}"),
        }
    }
    let f = focus();
    for k in [-1.0, 1.0] {
        let off = field_at(&g, &b, &(f.position + Vector3::new(0.0, 0.0, k * nm(5.0))), &s).unwrap();
        assert!(off.magnitude > f.b_min + gauss(6.0));
    }
}

#[test]
fn halved_linewidth_scales_like_a_quadratic_well() {
    let (g, b, s) = lens();
    let f = focus();
    let shell = |lw: f64| shell_extent_at(&g, &b, f, band_above_minimum(f.b_min, lw), lw, &s).unwrap();
    let wide = shell(gauss(1.0));
    let narrow = shell(gauss(0.5));
    for axis in [ShellAxis::P45, ShellAxis::M45, ShellAxis::Z] {
        let ratio = wide.get(axis).extent / narrow.get(axis).extent;
        assert!((1.3..=2.1).contains(&ratio), "{axis:?}: {ratio}");
    }
}
