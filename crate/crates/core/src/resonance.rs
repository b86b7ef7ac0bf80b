//! Larmor frequencies, forces on magnetic moments and spatial selectivity of
//! the resonance condition around the focus.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    band_above_minimum, find_focus_with, gradient_of_magnitude, shell_extent_at, AnalysisError, AnalysisSettings,
    FocusReport, ShellAxis, ShellExtents,
};
use crate::fieldsolver::{field_and_jacobian_at, field_at, BiasField, FieldSample};
use crate::geometry::LensGeometry;
use crate::quadrature::QuadratureSpec;
use crate::tensor::GradientTensor;

/// Proton gyromagnetic ratio over 2π, Hz/T (CODATA 2018).
pub const PROTON_GAMMA_OVER_2PI: f64 = 42.577_478_518e6;
/// Proton magnetic moment, J/T (CODATA 2018).
pub const PROTON_MOMENT: f64 = 1.410_606_797_36e-26;
/// Electron gyromagnetic ratio over 2π (magnitude), Hz/T (CODATA 2018).
pub const ELECTRON_GAMMA_OVER_2PI: f64 = 28.024_951_424_2e9;
/// Electron magnetic moment (magnitude), J/T (CODATA 2018).
pub const ELECTRON_MOMENT: f64 = 9.284_764_704_3e-24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSpecies {
    pub name: String,
    /// Hz/T.
    pub gamma_over_2pi: f64,
    /// J/T.
    pub magnetic_moment: f64,
}

impl SpinSpecies {
    pub fn proton() -> Self {
        Self {
            name: "proton".into(),
            gamma_over_2pi: PROTON_GAMMA_OVER_2PI,
            magnetic_moment: PROTON_MOMENT,
        }
    }

    pub fn electron() -> Self {
        Self {
            name: "electron".into(),
            gamma_over_2pi: ELECTRON_GAMMA_OVER_2PI,
            magnetic_moment: ELECTRON_MOMENT,
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.gamma_over_2pi.is_finite() && self.gamma_over_2pi > 0.0) {
            return Err(AnalysisError::InvalidInput(format!(
                "species '{}' needs a positive gyromagnetic ratio",
                self.name
            )));
        }
        if !(self.magnetic_moment.is_finite() && self.magnetic_moment >= 0.0) {
            return Err(AnalysisError::InvalidInput(format!(
                "species '{}' needs a finite, non-negative moment",
                self.name
            )));
        }
        Ok(())
    }

    /// Linear frequency in Hz at field magnitude `b` (T).
    pub fn frequency(&self, b: f64) -> f64 {
        self.gamma_over_2pi * b
    }
}

/// Linear Larmor frequency `f = (γ/2π)|B|` in Hz.
pub fn larmor_frequency(species: &SpinSpecies, sample: &FieldSample) -> f64 {
    species.frequency(sample.magnitude)
}

/// Angular Larmor frequency `ω = 2π f` in rad/s.
pub fn angular_frequency(frequency_hz: f64) -> f64 {
    TAU * frequency_hz
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoment {
    /// J/T.
    pub m: Vector3<f64>,
}

impl SpinMoment {
    pub fn new(m: Vector3<f64>) -> Result<Self, AnalysisError> {
        if m.iter().all(|c| c.is_finite()) {
            Ok(Self { m })
        } else {
            Err(AnalysisError::InvalidInput("spin moment must be finite".into()))
        }
    }
}

/// `F_i = Σ_j m_j ∂B_j/∂x_i` for a position-independent moment.
pub fn force_on_spin(moment: &SpinMoment, tensor: &GradientTensor) -> Vector3<f64> {
    tensor.entries.transpose() * moment.m
}

/// Offset at which frequency gradients are sampled.
pub const GRADIENT_PROBE_OFFSET: f64 = 1e-9;
/// Spacing of the test lattice used to count resonant sites.
pub const LATTICE_SPACING: f64 = 0.1e-9;
/// Distance at which off-resonance detuning is reported.
pub const DETUNING_PROBE_OFFSET: f64 = 5e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSelectivity {
    pub axis: ShellAxis,
    pub direction: Vector3<f64>,
    /// Shell length along this axis, meters.
    pub extent: f64,
    /// `(γ/2π)|∇|B||` averaged over the two probes at ±1 nm, Hz/m.
    pub frequency_gradient: f64,
    /// Lattice sites `k · 0.1 nm` with |B| in `[center − Δ/2, center + Δ/2)`.
    pub lattice_sites: usize,
    /// Smaller of the two `||B| − center| / Δ` values at ±5 nm.
    pub detuning_linewidths_at_probe: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectivityReport {
    pub species: SpinSpecies,
    pub linewidth: f64,
    pub center_level: f64,
    pub focus_position: Vector3<f64>,
    pub b_min: f64,
    pub focus_frequency: f64,
    pub center_frequency: f64,
    /// Linewidth expressed in Hz.
    pub linewidth_frequency: f64,
    pub axes: [AxisSelectivity; 3],
    pub shell: ShellExtents,
}

fn count_sites(
    geom: &LensGeometry,
    bias: &BiasField,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    reach: (f64, f64),
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<usize, AnalysisError> {
    let k_minus = (reach.0 / LATTICE_SPACING).ceil() as i64 + 1;
    let k_plus = (reach.1 / LATTICE_SPACING).ceil() as i64 + 1;
    let mut count = 0;
    for k in -k_minus..=k_plus {
        let b = field_at(geom, bias, &(origin + dir * (k as f64 * LATTICE_SPACING)), spec)?.magnitude;
        if b >= lo && b < hi {
            count += 1;
        }
    }
    Ok(count)
}

/// Selectivity around a located minimum with the band's lower edge at `b_min`.
pub fn selectivity_report_at(
    geom: &LensGeometry,
    bias: &BiasField,
    focus: &FocusReport,
    species: &SpinSpecies,
    linewidth: f64,
    spec: &QuadratureSpec,
) -> Result<SelectivityReport, AnalysisError> {
    species.validate()?;
    let center = band_above_minimum(focus.b_min, linewidth);
    let shell = shell_extent_at(geom, bias, focus, center, linewidth, spec)?;
    let (lo, hi) = (center - linewidth / 2.0, center + linewidth / 2.0);
    let origin = focus.position;
    let mut axes = Vec::with_capacity(3);
    for ax in &shell.axes {
        let dir = ax.direction;
        let mut grad = 0.0;
        for s in [-1.0, 1.0] {
            let (sample, j) = field_and_jacobian_at(geom, bias, &(origin + dir * (s * GRADIENT_PROBE_OFFSET)), spec)?;
            grad += species.frequency(gradient_of_magnitude(&sample.b, &j.entries).norm()) / 2.0;
        }
        let detuning = [-1.0, 1.0]
            .into_iter()
            .map(|s| {
                field_at(geom, bias, &(origin + dir * (s * DETUNING_PROBE_OFFSET)), spec)
                    .map(|f| (f.magnitude - center).abs() / linewidth)
            })
            .collect::<Result<Vec<_>, _>>()?;
        axes.push(AxisSelectivity {
            axis: ax.axis,
            direction: dir,
            extent: ax.extent,
            frequency_gradient: grad,
            lattice_sites: count_sites(geom, bias, &origin, &dir, ax.reach, lo, hi, spec)?,
            detuning_linewidths_at_probe: detuning[0].min(detuning[1]),
        });
    }
    Ok(SelectivityReport {
        species: species.clone(),
        linewidth,
        center_level: center,
        focus_position: origin,
        b_min: focus.b_min,
        focus_frequency: species.frequency(focus.b_min),
        center_frequency: species.frequency(center),
        linewidth_frequency: species.frequency(linewidth),
        axes: [axes[0], axes[1], axes[2]],
        shell,
    })
}

pub fn selectivity_report(
    geom: &LensGeometry,
    bias: &BiasField,
    species: &SpinSpecies,
    linewidth: f64,
    spec: &QuadratureSpec,
) -> Result<SelectivityReport, AnalysisError> {
    let focus = find_focus_with(geom, bias, &AnalysisSettings::default(), spec)?;
    selectivity_report_at(geom, bias, &focus, species, linewidth, spec)
}
