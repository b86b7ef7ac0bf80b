use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nanolens::analysis::{
    bias_sweep_with, default_levels, extract_contours, find_focus_with, focus_tensor, vector_grid, winding_number,
    VectorPlane,
};
use nanolens::fieldsolver::{field_at, field_grid, PlaneSpec};
use nanolens::geometry::SymmetryPlane;
use nanolens::io::report::{error_json, field_json, focus_json, selectivity_json, sweep_json, tensor_json};
use nanolens::io::{contours_to_csv, to_json_string, vectors_to_csv, RunConfig, DEFAULT_CONFIG_TOML};
use nanolens::resonance::selectivity_report_at;
use nanolens::units::{gauss, nm, to_gauss, to_nm};
use nanolens::validation;
use nanolens::{Error, Vector3};

#[derive(Parser)]
#[command(name = "nanolens", version, about = "Field, focus and resonance analysis for a planar magnetic lens")]
struct Cli {
    /// TOML run configuration; the bundled reference config is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report or data here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Plane {
    P45,
    M45,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnyPlane {
    P45,
    M45,
    Horizontal,
}

#[derive(Subcommand)]
enum Command {
    /// Field components and magnitude at one point.
    Field {
        /// Point as x,y,z in nm.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Vector3<f64>,
    },
    /// Locate and classify the |B| extremum above the lens.
    Focus,
    /// Classify the focus across a range of bias fields.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Gradient tensor at the focus in the lab and 45° frames.
    Tensor,
    /// Iso-|B| contours on a vertical symmetry plane through the focus (CSV).
    Contours {
        #[arg(long, value_enum)]
        plane: Plane,
        /// Grid points per side.
        #[arg(long)]
        n: Option<usize>,
        /// Window width, nm.
        #[arg(long)]
        window: Option<f64>,
        /// Write to the config's output directory and file name instead of stdout.
        #[arg(long)]
        save: bool,
    },
    /// Field vectors on a plane through the focus (CSV).
    Vectors {
        #[arg(long, value_enum, default_value = "p45")]
        plane: AnyPlane,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        window: Option<f64>,
        /// Write to the config's output directory and file name instead of stdout.
        #[arg(long)]
        save: bool,
    },
    /// Resonance frequency, shell extents and off-resonance detuning.
    Selectivity {
        /// Linewidth, G.
        #[arg(long)]
        linewidth: Option<f64>,
        #[arg(long)]
        species: Option<String>,
    },
    /// Charge-vs-Amperian oracle, Maxwell, scaling and Jacobian checks.
    Validate,
    /// Print the bundled reference configuration.
    DefaultConfig,
}

fn parse_point(s: &str) -> Result<Vector3<f64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z in nm, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        let x: f64 = p.trim().parse().map_err(|_| format!("'{p}' is not a number"))?;
        if !x.is_finite() {
            return Err(format!("'{p}' is not finite"));
        }
        *slot = nm(x);
    }
    Ok(Vector3::new(v[0], v[1], v[2]))
}

enum Failure {
    Precondition(String),
    Analysis { kind: &'static str, message: String },
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            let kind = match &e {
                Error::Analysis(_) => "analysis",
                Error::Field(_) => "field",
                Error::Quadrature(_) => "quadrature",
                _ => "error",
            };
            Failure::Analysis {
                kind,
                message: e.to_string(),
            }
        }
    }
}

macro_rules! from_via_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
from_via_error!(
    nanolens::analysis::AnalysisError,
    nanolens::fieldsolver::FieldError,
    nanolens::io::ConfigError
);

impl From<validation::ValidationError> for Failure {
    fn from(e: validation::ValidationError) -> Self {
        match e {
            validation::ValidationError::Field(f) => f.into(),
            other => Failure::Analysis {
                kind: "validation",
                message: other.to_string(),
            },
        }
    }
}

enum Output {
    Json(Value),
    Text(String),
    /// Text bound for a path from the config's output block.
    Saved(PathBuf, String),
}

fn saved(cfg: &RunConfig, save: bool, template: &str, plane: &str, text: String) -> Output {
    if save {
        Output::Saved(cfg.output_path(template, plane), text)
    } else {
        Output::Text(text)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Precondition(format!("cannot write {}: {e}", path.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(Failure::Precondition(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::from_toml_str(DEFAULT_CONFIG_TOML)?,
    };
    let geom = cfg.geometry()?;
    let bias = cfg.bias();
    let spec = cfg.quadrature()?;
    let settings = cfg.analysis_settings()?;
    let a = &cfg.analysis;

    let output = match &cli.command {
        Command::DefaultConfig => Output::Text(DEFAULT_CONFIG_TOML.to_string()),
        Command::Field { at } => Output::Json(field_json(&field_at(&geom, &bias, at, &spec)?)),
        Command::Focus => Output::Json(focus_json(&find_focus_with(&geom, &bias, &settings, &spec)?)),
        Command::Sweep { from, to, step } => {
            let from = gauss(from.unwrap_or(a.sweep_from_gauss));
            let to = gauss(to.unwrap_or(a.sweep_to_gauss));
            let step = gauss(step.unwrap_or(a.sweep_step_gauss));
            Output::Json(sweep_json(&bias_sweep_with(&geom, (from, to), step, &settings, &spec)?))
        }
        Command::Tensor => {
            let focus = find_focus_with(&geom, &bias, &settings, &spec)?;
            let t = focus_tensor(&geom, &bias, &focus.position, settings.eigen_zero_ratio, &spec)?;
            let mut v = tensor_json(&t);
            v["focus_z_nm"] = json!(to_nm(focus.position.z));
            Output::Json(v)
        }
        Command::Contours { plane, n, window, save } => {
            let focus = find_focus_with(&geom, &bias, &settings, &spec)?;
            let sym = match plane {
                Plane::P45 => SymmetryPlane::P45,
                Plane::M45 => SymmetryPlane::M45,
            };
            let n = n.unwrap_or(a.contour_grid_n);
            let window = nm(window.unwrap_or(a.contour_window_nm));
            let spec_plane = PlaneSpec::symmetry(&geom, sym, focus.position, window);
            let grid = field_grid(&geom, &bias, &spec_plane, n, n, &spec)?;
            let (lo, hi) = grid
                .samples
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| (l.min(s.magnitude), h.max(s.magnitude)));
            let levels: Vec<f64> =
                default_levels(a.contour_center_gauss, a.contour_spacing_gauss, to_gauss(lo), to_gauss(hi))
                    .into_iter()
                    .map(gauss)
                    .collect();
            let name = if matches!(plane, Plane::P45) { "p45" } else { "m45" };
            let text = contours_to_csv(&extract_contours(&grid, &levels)?);
            saved(&cfg, *save, &cfg.output.contours_file, name, text)
        }
        Command::Vectors { plane, n, window, save } => {
            let focus = find_focus_with(&geom, &bias, &settings, &spec)?;
            let (plane, name) = match plane {
                AnyPlane::P45 => (VectorPlane::P45, "p45"),
                AnyPlane::M45 => (VectorPlane::M45, "m45"),
                AnyPlane::Horizontal => (VectorPlane::Horizontal, "horizontal"),
            };
            let n = n.unwrap_or(a.vector_grid_n);
            let window = nm(window.unwrap_or(a.vector_window_nm));
            let grid = vector_grid(&geom, &bias, &focus.position, plane, window, n, &spec)?;
            eprintln!("winding number around the window boundary: {}", winding_number(&grid));
            saved(&cfg, *save, &cfg.output.vectors_file, name, vectors_to_csv(&grid))
        }
        Command::Selectivity { linewidth, species } => {
            let species = match species {
                Some(name) => cfg.species_named(name)?,
                None => cfg.selected_species()?,
            };
            let lw = gauss(linewidth.unwrap_or(a.linewidth_gauss));
            let focus = find_focus_with(&geom, &bias, &settings, &spec)?;
            Output::Json(selectivity_json(&selectivity_report_at(&geom, &bias, &focus, &species, lw, &spec)?))
        }
        Command::Validate => {
            let checks = validation::run_all(&geom, &bias, &spec)?;
            let all = checks.iter().all(|c| c.passed);
            let v = json!({ "checks": checks, "all_passed": all });
            if !all {
                emit(cli.out.as_deref(), &to_json_string(&v))?;
                return Err(Failure::Checks("one or more validation checks failed".into()));
            }
            Output::Json(v)
        }
    };
    Ok(output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| match out {
        Output::Json(v) => emit(cli.out.as_deref(), &to_json_string(&v)),
        Output::Text(t) => emit(cli.out.as_deref(), &t),
        Output::Saved(path, t) => {
            let path = cli.out.clone().unwrap_or(path);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .map_err(|e| Failure::Precondition(format!("cannot create {}: {e}", dir.display())))?;
            }
            emit(Some(&path), &t)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Analysis { kind, message }) => {
            print!("{}", to_json_string(&error_json(kind, &message)));
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
        Err(Failure::Checks(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
