//! Focus location and classification, bias sweeps, the focus gradient tensor,
//! iso-|B| contours, resonant-shell extents and vector grids.

mod contour;
mod focus;
mod shell;
mod sweep;
mod tensor;
mod vectors;

pub use contour::{default_levels, extract_contours, marching_squares, ContourSet, Polyline, ScalarGrid};
pub use focus::{find_focus, find_focus_with, gradient_of_magnitude, magnitude_hessian, Classification, FocusReport};
pub use shell::{
    band_above_minimum, resonant_shell_extent, shell_extent_at, AxisExtent, ShellAxis, ShellExtents, SHELL_SCAN_LIMIT,
    SHELL_SCAN_STEP,
};
pub use sweep::{bias_sweep, bias_sweep_with, BiasSweep, Transition};
pub use tensor::{focus_tensor, FocusTensor};
pub use vectors::{vector_grid, winding_number, VectorPlane};

use thiserror::Error;

use crate::fieldsolver::FieldError;
use crate::units::nm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no |B| minimum found (classification {0:?})")]
    NoMinimum(Classification),
    #[error("axial critical point has transverse |grad |B|| = {transverse:.3e} T/m above tolerance {tolerance:.3e}")]
    OffAxis { transverse: f64, tolerance: f64 },
    #[error("Newton refinement stalled with |grad |B|| = {gradient:.3e} T/m")]
    NotStationary { gradient: f64 },
    #[error("resonant shell along {axis} did not close within {limit:.3e} m of the focus")]
    ShellUnbounded { axis: String, limit: f64 },
}

/// Numerical thresholds for locating and classifying the focus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    /// Eigenvalues with `|λ| ≤ eigen_zero_ratio · max|λ|` count as zero.
    pub eigen_zero_ratio: f64,
    /// Stationarity threshold on `|∇|B||`, T/m (1e-3 G/nm).
    pub grad_tolerance: f64,
    pub axis_scan_step: f64,
    pub golden_tolerance: f64,
    /// Central-difference step for the Hessian of |B|.
    pub hessian_step: f64,
    pub newton_max_iter: usize,
    /// Search interval along the axis, meters.
    pub z_search: (f64, f64),
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            eigen_zero_ratio: 1e-4,
            grad_tolerance: 100.0,
            axis_scan_step: nm(0.25),
            golden_tolerance: nm(1e-4),
            hessian_step: nm(0.05),
            newton_max_iter: 12,
            z_search: (nm(5.0), nm(60.0)),
        }
    }
}
