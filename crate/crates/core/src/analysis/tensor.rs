use nalgebra::Vector3;

use super::AnalysisError;
use crate::fieldsolver::{jacobian_at, BiasField};
use crate::geometry::{LensGeometry, SymmetryPlane};
use crate::quadrature::QuadratureSpec;
use crate::tensor::{Eigen3, GradientTensor, TensorFrame};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusTensor {
    pub lab: GradientTensor,
    /// Expressed in the frame whose x axis is the +45° symmetry axis.
    pub rotated: GradientTensor,
    /// Eigenvalues sorted descending with unit eigenvectors (lab frame).
    pub eigen: Eigen3,
    /// Index into `eigen` of the eigenvalue closest to zero.
    pub zero_index: usize,
    /// Angle in degrees between the zero-eigenvalue eigenvector and ±ẑ.
    pub zero_axis_tilt_deg: f64,
    /// First of (lab, rotated) in which the tensor is diagonal within the
    /// zero threshold, if any.
    pub diagonal_frame: Option<TensorFrame>,
}

pub fn focus_tensor(
    geom: &LensGeometry,
    bias: &BiasField,
    focus_position: &Vector3<f64>,
    eigen_zero_ratio: f64,
    spec: &QuadratureSpec,
) -> Result<FocusTensor, AnalysisError> {
    let lab = jacobian_at(geom, bias, focus_position, spec)?;
    Ok(decompose_tensor(lab, geom.symmetry_axis(SymmetryPlane::P45), eigen_zero_ratio))
}

fn decompose_tensor(lab: GradientTensor, angle: f64, eigen_zero_ratio: f64) -> FocusTensor {
    let rotated = lab.rotated_about_z(angle);
    let eigen = lab.eigen();
    let zero_index = (0..3)
        .min_by(|&a, &b| eigen.values[a].abs().total_cmp(&eigen.values[b].abs()))
        .unwrap_or(1);
    let cos = eigen.vectors[zero_index].z.abs().min(1.0);
    let diagonal_frame = [lab, rotated]
        .into_iter()
        .find(|t| t.is_diagonal(eigen_zero_ratio))
        .map(|t| t.frame);
    FocusTensor {
        lab,
        rotated,
        eigen,
        zero_index,
        zero_axis_tilt_deg: cos.acos().to_degrees(),
        diagonal_frame,
    }
}
