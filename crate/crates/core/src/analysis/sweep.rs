use super::focus::{find_focus_with, Classification, FocusReport};
use super::{AnalysisError, AnalysisSettings};
use crate::fieldsolver::BiasField;
use crate::geometry::LensGeometry;
use crate::quadrature::QuadratureSpec;

/// Change of classification between two adjacent sweep biases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Last bias of the run classified `from`.
    pub last_bias: f64,
    /// First bias of the run classified `to`.
    pub next_bias: f64,
    pub from: Classification,
    pub to: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasSweep {
    pub step: f64,
    pub reports: Vec<FocusReport>,
    pub transitions: Vec<Transition>,
}

impl BiasSweep {
    pub fn biases(&self) -> impl Iterator<Item = f64> + '_ {
        self.reports.iter().map(|r| r.bias_used)
    }

    /// Smallest and largest bias classified as a minimum.
    pub fn minimum_window(&self) -> Option<(f64, f64)> {
        let mut it = self
            .reports
            .iter()
            .filter(|r| r.classification == Classification::Minimum)
            .map(|r| r.bias_used);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), b| (lo.min(b), hi.max(b))))
    }
}

fn sweep_points(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| from + i as f64 * step).collect()
}

pub fn bias_sweep(
    geom: &LensGeometry,
    bias_range: (f64, f64),
    step: f64,
    spec: &QuadratureSpec,
) -> Result<BiasSweep, AnalysisError> {
    bias_sweep_with(geom, bias_range, step, &AnalysisSettings::default(), spec)
}

/// Runs `find_focus` at every bias from `bias_range.0` to `bias_range.1`
/// (inclusive when the range is a whole number of steps).
pub fn bias_sweep_with(
    geom: &LensGeometry,
    bias_range: (f64, f64),
    step: f64,
    settings: &AnalysisSettings,
    spec: &QuadratureSpec,
) -> Result<BiasSweep, AnalysisError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(AnalysisError::InvalidInput(format!("sweep step {step:e} T must be positive")));
    }
    let (from, to) = bias_range;
    if !(from.is_finite() && to.is_finite() && from <= to) {
        return Err(AnalysisError::InvalidInput(format!(
            "sweep range [{from:e}, {to:e}] T is empty"
        )));
    }
    let biases = sweep_points(from, to, step);
    let run = |b: &f64| find_focus_with(geom, &BiasField::new(*b), settings, spec);
    #[cfg(feature = "parallel")]
    let reports = {
        use rayon::prelude::*;
        biases.par_iter().map(run).collect::<Result<Vec<_>, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let reports = biases.iter().map(run).collect::<Result<Vec<_>, _>>()?;

    let transitions = reports
        .windows(2)
        .filter(|w| w[0].classification != w[1].classification)
        .map(|w| Transition {
            last_bias: w[0].bias_used,
            next_bias: w[1].bias_used,
            from: w[0].classification,
            to: w[1].classification,
        })
        .collect();
    Ok(BiasSweep {
        step,
        reports,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::gauss;

    #[test]
    fn points_cover_inclusive_range() {
        let p = sweep_points(-900.0, -400.0, 25.0);
        assert_eq!(p.len(), 21);
        assert_eq!(p[0], -900.0);
        assert_eq!(*p.last().unwrap(), -400.0);
        assert_eq!(sweep_points(1.0, 1.0, 0.5), vec![1.0]);
    }

    #[test]
    fn rejects_bad_step() {
        let g = LensGeometry::default();
        let s = QuadratureSpec::default();
        assert!(matches!(
            bias_sweep(&g, (-1.0, 0.0), 0.0, &s),
            Err(AnalysisError::InvalidInput(_))
        ));
        assert!(matches!(
            bias_sweep(&g, (0.0, -1.0), 1.0, &s),
            Err(AnalysisError::InvalidInput(_))
        ));
    }

    #[test]
    fn single_point_matches_find_focus() {
        let g = LensGeometry::default();
        let s = QuadratureSpec::default();
        let b = gauss(-650.0);
        let sweep = bias_sweep(&g, (b, b), gauss(25.0), &s).unwrap();
        assert_eq!(sweep.reports.len(), 1);
        assert!(sweep.transitions.is_empty());
        let direct = find_focus_with(&g, &BiasField::new(b), &AnalysisSettings::default(), &s).unwrap();
        assert_eq!(sweep.reports[0], direct);
    }
}
