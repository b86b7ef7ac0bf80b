use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::analysis::AnalysisSettings;
use crate::fieldsolver::BiasField;
use crate::geometry::{CutInterval, LensGeometry};
use crate::quadrature::QuadratureSpec;
use crate::resonance::{SpinSpecies, ELECTRON_GAMMA_OVER_2PI, ELECTRON_MOMENT, PROTON_GAMMA_OVER_2PI, PROTON_MOMENT};
use crate::units::{gauss, nm, GAUSS_PER_NM};

/// Bundled configuration reproducing the reference lens.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("default_config.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub outer_radius_nm: f64,
    pub inner_radius_nm: f64,
    pub thickness_nm: f64,
    pub mu0_m_tesla: f64,
    /// Two `[start, end]` angle pairs.
    pub cut_quadrants_deg: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub radial_order: usize,
    pub angular_order: usize,
    pub refinement_limit: usize,
    pub rel_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub z_search_nm: [f64; 2],
    pub eigen_zero_ratio: f64,
    pub grad_tolerance_gauss_per_nm: f64,
    pub axis_scan_step_nm: f64,
    pub golden_tolerance_nm: f64,
    pub hessian_step_nm: f64,
    pub newton_max_iter: usize,
    pub sweep_from_gauss: f64,
    pub sweep_to_gauss: f64,
    pub sweep_step_gauss: f64,
    pub contour_window_nm: f64,
    pub contour_grid_n: usize,
    pub contour_center_gauss: f64,
    pub contour_spacing_gauss: f64,
    pub vector_window_nm: f64,
    pub vector_grid_n: usize,
    pub linewidth_gauss: f64,
    pub species: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    pub gamma_over_2pi_hz_per_tesla: f64,
    pub magnetic_moment_j_per_tesla: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for files written by the CLI; relative to the working directory.
    pub directory: String,
    pub contours_file: String,
    pub vectors_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bias_gauss: f64,
    pub geometry: GeometryConfig,
    pub quadrature: QuadratureConfig,
    pub analysis: AnalysisConfig,
    pub species: BTreeMap<String, SpeciesConfig>,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let species = [
            ("electron", ELECTRON_GAMMA_OVER_2PI, ELECTRON_MOMENT),
            ("proton", PROTON_GAMMA_OVER_2PI, PROTON_MOMENT),
        ]
        .into_iter()
        .map(|(n, g, m)| {
            (
                n.to_string(),
                SpeciesConfig {
                    gamma_over_2pi_hz_per_tesla: g,
                    magnetic_moment_j_per_tesla: m,
                },
            )
        })
        .collect();
        Self {
            bias_gauss: -650.0,
            geometry: GeometryConfig {
                outer_radius_nm: 60.0,
                inner_radius_nm: 40.0,
                thickness_nm: 10.0,
                mu0_m_tesla: 2.0,
                cut_quadrants_deg: [[0.0, 90.0], [180.0, 270.0]],
            },
            quadrature: QuadratureConfig {
                radial_order: 48,
                angular_order: 48,
                refinement_limit: 3,
                rel_tolerance: 1e-8,
            },
            analysis: AnalysisConfig {
                z_search_nm: [5.0, 60.0],
                eigen_zero_ratio: 1e-4,
                grad_tolerance_gauss_per_nm: 1e-3,
                axis_scan_step_nm: 0.25,
                golden_tolerance_nm: 1e-4,
                hessian_step_nm: 0.05,
                newton_max_iter: 12,
                sweep_from_gauss: -900.0,
                sweep_to_gauss: -400.0,
                sweep_step_gauss: 25.0,
                contour_window_nm: 20.0,
                contour_grid_n: 201,
                contour_center_gauss: 100.5,
                contour_spacing_gauss: 6.0,
                vector_window_nm: 10.0,
                vector_grid_n: 21,
                linewidth_gauss: 1.0,
                species: "proton".into(),
            },
            species,
            output: OutputConfig {
                directory: ".".into(),
                contours_file: "contours_{plane}.csv".into(),
                vectors_file: "vectors_{plane}.csv".into(),
            },
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Serialize(e.to_string()))
    }

    /// Checks every block converts into a valid library value.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.geometry()?;
        self.quadrature()?;
        self.analysis_settings()?;
        self.selected_species()?;
        if !self.bias_gauss.is_finite() {
            return Err(ConfigError::Invalid("bias_gauss must be finite".into()));
        }
        let a = &self.analysis;
        if !(a.sweep_step_gauss > 0.0 && a.sweep_from_gauss <= a.sweep_to_gauss) {
            return Err(ConfigError::Invalid("sweep needs from ≤ to and a positive step".into()));
        }
        if a.contour_grid_n < 2 || a.vector_grid_n < 2 {
            return Err(ConfigError::Invalid("grid sizes must be at least 2".into()));
        }
        if !(a.contour_window_nm > 0.0 && a.vector_window_nm > 0.0 && a.contour_spacing_gauss > 0.0) {
            return Err(ConfigError::Invalid("contour/vector windows and spacing must be positive".into()));
        }
        if !(a.linewidth_gauss > 0.0) {
            return Err(ConfigError::Invalid("linewidth_gauss must be positive".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<LensGeometry, ConfigError> {
        let g = &self.geometry;
        let cut = |[a, b]: [f64; 2]| CutInterval::new(a.to_radians(), b.to_radians());
        Ok(LensGeometry::new(
            nm(g.outer_radius_nm),
            nm(g.inner_radius_nm),
            nm(g.thickness_nm),
            g.mu0_m_tesla,
            [cut(g.cut_quadrants_deg[0]), cut(g.cut_quadrants_deg[1])],
        )?)
    }

    pub fn bias(&self) -> BiasField {
        BiasField::new(gauss(self.bias_gauss))
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, ConfigError> {
        let q = &self.quadrature;
        let spec = QuadratureSpec {
            radial_order: q.radial_order,
            angular_order: q.angular_order,
            refinement_limit: q.refinement_limit,
            rel_tolerance: q.rel_tolerance,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn analysis_settings(&self) -> Result<AnalysisSettings, ConfigError> {
        let a = &self.analysis;
        let s = AnalysisSettings {
            eigen_zero_ratio: a.eigen_zero_ratio,
            grad_tolerance: a.grad_tolerance_gauss_per_nm * GAUSS_PER_NM,
            axis_scan_step: nm(a.axis_scan_step_nm),
            golden_tolerance: nm(a.golden_tolerance_nm),
            hessian_step: nm(a.hessian_step_nm),
            newton_max_iter: a.newton_max_iter,
            z_search: (nm(a.z_search_nm[0]), nm(a.z_search_nm[1])),
        };
        let positive = [s.eigen_zero_ratio, s.grad_tolerance, s.axis_scan_step, s.golden_tolerance, s.hessian_step]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0);
        if !positive {
            return Err(ConfigError::Invalid(
                "analysis tolerances and step sizes must be positive".into(),
            ));
        }
        if !(s.z_search.0 < s.z_search.1) {
            return Err(ConfigError::Invalid("z_search_nm must be an increasing pair".into()));
        }
        Ok(s)
    }

    pub fn species_named(&self, name: &str) -> Result<SpinSpecies, ConfigError> {
        let s = self
            .species
            .get(name)
            .ok_or_else(|| ConfigError::UnknownSpecies(name.to_string()))?;
        let sp = SpinSpecies {
            name: name.to_string(),
            gamma_over_2pi: s.gamma_over_2pi_hz_per_tesla,
            magnetic_moment: s.magnetic_moment_j_per_tesla,
        };
        sp.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(sp)
    }

    pub fn selected_species(&self) -> Result<SpinSpecies, ConfigError> {
        self.species_named(&self.analysis.species)
    }

    /// Output file path with `{plane}` replaced.
    pub fn output_path(&self, template: &str, plane: &str) -> std::path::PathBuf {
        Path::new(&self.output.directory).join(template.replace("{plane}", plane))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_matches_default() {
        assert_eq!(RunConfig::from_toml_str(DEFAULT_CONFIG_TOML).unwrap(), RunConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn converts_to_library_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.geometry().unwrap(), LensGeometry::default());
        assert_eq!(cfg.bias(), BiasField::default());
        assert_eq!(cfg.quadrature().unwrap(), QuadratureSpec::default());
        let s = cfg.analysis_settings().unwrap();
        let d = AnalysisSettings::default();
        assert!((s.grad_tolerance - d.grad_tolerance).abs() < 1e-9);
        assert!((s.z_search.1 - d.z_search.1).abs() < 1e-20);
        assert_eq!(cfg.selected_species().unwrap(), SpinSpecies::proton());
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.geometry.inner_radius_nm = 70.0;
        assert!(matches!(cfg.validate(), Err(ConfigError::Geometry(_))));
        let mut cfg = RunConfig::default();
        cfg.analysis.species = "muon".into();
        assert!(matches!(cfg.validate(), Err(ConfigError::UnknownSpecies(_))));
        assert!(matches!(
            RunConfig::from_toml_str("bias_gauss = \"x\""),
            Err(ConfigError::Parse(_))
        ));
        let extra = format!("{DEFAULT_CONFIG_TOML}\n[extra]\nkey = 1\n");
        assert!(matches!(RunConfig::from_toml_str(&extra), Err(ConfigError::Parse(_))));
    }
}
