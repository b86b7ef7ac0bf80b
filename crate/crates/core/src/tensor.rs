use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

/// Frame in which a tensor's entries are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TensorFrame {
    Lab,
    /// Lab frame rotated about z by `angle` radians (x' along that angle).
    Rotated { angle: f64 },
}

/// Field gradient `entries[(i, j)] = ∂B_i/∂x_j` in T/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientTensor {
    pub entries: Matrix3<f64>,
    pub frame: TensorFrame,
}

/// Eigenpairs of the symmetric part, eigenvalues sorted descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen3 {
    pub values: [f64; 3],
    pub vectors: [Vector3<f64>; 3],
}

impl GradientTensor {
    pub fn lab(entries: Matrix3<f64>) -> Self {
        Self {
            entries,
            frame: TensorFrame::Lab,
        }
    }

    pub fn zero() -> Self {
        Self::lab(Matrix3::zeros())
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.amax()
    }

    /// Largest `|J_ij - J_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (self.entries - self.entries.transpose()).amax()
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    m = m.max(self.entries[(i, j)].abs());
                }
            }
        }
        m
    }

    pub fn is_diagonal(&self, rel_tol: f64) -> bool {
        self.max_off_diagonal() <= rel_tol * self.max_abs()
    }

    /// Same tensor in the frame rotated about z by `angle` (relative to lab).
    pub fn rotated_about_z(&self, angle: f64) -> Self {
        let base = match self.frame {
            TensorFrame::Lab => 0.0,
            TensorFrame::Rotated { angle } => angle,
        };
        let delta = angle - base;
        let (s, c) = delta.sin_cos();
        // Rows are the new basis vectors expressed in the current frame.
        let r = Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0);
        Self {
            entries: r * self.entries * r.transpose(),
            frame: if angle == 0.0 {
                TensorFrame::Lab
            } else {
                TensorFrame::Rotated { angle }
            },
        }
    }

    pub fn eigen(&self) -> Eigen3 {
        sorted_eigen(&(0.5 * (self.entries + self.entries.transpose())))
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted descending.
pub fn sorted_eigen(m: &Matrix3<f64>) -> Eigen3 {
    let se = SymmetricEigen::new(*m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values = idx.map(|k| se.eigenvalues[k]);
    let vectors = idx.map(|k| se.eigenvectors.column(k).into_owned().normalize());
    Eigen3 { values, vectors }
}
