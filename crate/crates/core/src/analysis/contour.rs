use super::AnalysisError;
use crate::fieldsolver::{FieldGrid, PlaneSpec};

/// Scalar samples on a rectilinear grid, `values[j * u.len() + i]` at `(u[i], v[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(u: Vec<f64>, v: Vec<f64>, values: Vec<f64>) -> Result<Self, AnalysisError> {
        if u.len() < 2 || v.len() < 2 || values.len() != u.len() * v.len() {
            return Err(AnalysisError::InvalidInput(format!(
                "grid needs at least 2×2 samples and {}×{} values, got {}",
                u.len(),
                v.len(),
                values.len()
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(AnalysisError::InvalidInput("grid contains non-finite values".into()));
        }
        Ok(Self { u, v, values })
    }

    pub fn from_fn(u: Vec<f64>, v: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self, AnalysisError> {
        let values = v.iter().flat_map(|&y| u.iter().map(move |&x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self::new(u, v, values)
    }

    pub fn from_field_grid(grid: &FieldGrid) -> Result<Self, AnalysisError> {
        Self::new(grid.u.clone(), grid.v.clone(), grid.magnitudes())
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.u.len() + i]
    }

    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }
}

/// Points in plane coordinates (meters). Closed polylines repeat their first point at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
}

impl Polyline {
    pub fn is_closed(&self) -> bool {
        self.points.len() > 3 && self.points.first() == self.points.last()
    }

    /// Signed shoelace area of the ring (meaningful for closed polylines).
    pub fn signed_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0][0] * w[1][1] - w[1][0] * w[0][1])
            .sum::<f64>()
            / 2.0
    }

    /// Even-odd ray-cast test; false for open polylines.
    pub fn encloses(&self, p: [f64; 2]) -> bool {
        if !self.is_closed() {
            return false;
        }
        let mut inside = false;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distances from `p` to each vertex (min, max).
    pub fn radial_range(&self, p: [f64; 2]) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), q| {
            let d = (q[0] - p[0]).hypot(q[1] - p[1]);
            (lo.min(d), hi.max(d))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourSet {
    pub plane: PlaneSpec,
    /// Tesla, ascending.
    pub levels: Vec<f64>,
    /// `polylines[k]` traces `levels[k]`.
    pub polylines: Vec<Vec<Polyline>>,
}

impl ContourSet {
    /// Closed polylines enclosing `p`, ordered by increasing enclosed area.
    pub fn enclosing(&self, p: [f64; 2]) -> Vec<(f64, &Polyline)> {
        let mut out: Vec<(f64, &Polyline)> = self
            .levels
            .iter()
            .zip(&self.polylines)
            .flat_map(|(&l, ps)| ps.iter().map(move |pl| (l, pl)))
            .filter(|(_, pl)| pl.encloses(p))
            .collect();
        out.sort_by(|a, b| a.1.signed_area().abs().total_cmp(&b.1.signed_area().abs()));
        out
    }
}

/// `center + k·spacing` for every integer k landing in `[min, max]`, ascending.
pub fn default_levels(center: f64, spacing: f64, min: f64, max: f64) -> Vec<f64> {
    if !(spacing > 0.0) || !(min <= max) {
        return Vec::new();
    }
    let k0 = ((min - center) / spacing).ceil() as i64;
    let k1 = ((max - center) / spacing).floor() as i64;
    (k0..=k1).map(|k| center + k as f64 * spacing).collect()
}

const NONE: usize = usize::MAX;

/// Cell edges are keyed `2·(j·nu + i)` for the horizontal edge from node
/// `(i, j)` to `(i+1, j)` and `2·(j·nu + i) + 1` for the vertical edge from
/// `(i, j)` to `(i, j+1)`.
fn edge_point(grid: &ScalarGrid, key: usize, level: f64) -> [f64; 2] {
    let nu = grid.u.len();
    let node = key / 2;
    let (i, j) = (node % nu, node / nu);
    let (i2, j2) = if key % 2 == 0 { (i + 1, j) } else { (i, j + 1) };
    let (fa, fb) = (grid.at(i, j), grid.at(i2, j2));
    let t = ((level - fa) / (fb - fa)).clamp(0.0, 1.0);
    let pa = [grid.u[i], grid.v[j]];
    let pb = [grid.u[i2], grid.v[j2]];
    [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
}

/// Iso-lines of `grid` at `level`. Saddle cells are split by comparing the
/// cell-average value with the level.
pub fn marching_squares(grid: &ScalarGrid, level: f64) -> Vec<Polyline> {
    let (nu, nv) = (grid.u.len(), grid.v.len());
    let mut adj = vec![[NONE; 2]; 2 * nu * nv];
    let mut link = |a: usize, b: usize| {
        for (x, y) in [(a, b), (b, a)] {
            let slot = &mut adj[x];
            if slot[0] == NONE {
                slot[0] = y;
            } else {
                slot[1] = y;
            }
        }
    };
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let f = [grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1), grid.at(i, j + 1)];
            let above = f.map(|x| x > level);
            let bottom = 2 * (j * nu + i);
            let right = 2 * (j * nu + i + 1) + 1;
            let top = 2 * ((j + 1) * nu + i);
            let left = 2 * (j * nu + i) + 1;
            let edges = [
                (bottom, above[0] != above[1]),
                (right, above[1] != above[2]),
                (top, above[2] != above[3]),
                (left, above[3] != above[0]),
            ];
            let crossing: Vec<usize> = edges.iter().filter(|e| e.1).map(|e| e.0).collect();
            match crossing.len() {
                2 => link(crossing[0], crossing[1]),
                4 => {
                    let center_above = f.iter().sum::<f64>() / 4.0 > level;
                    // Keep the center joined to the diagonal pair on its own side.
                    if center_above == above[0] {
                        link(bottom, right);
                        link(top, left);
                    } else {
                        link(left, bottom);
                        link(right, top);
                    }
                }
                _ => {}
            }
        }
    }

    let mut visited = vec![false; adj.len()];
    let mut lines = Vec::new();
    let mut walk = |start: usize, visited: &mut Vec<bool>| {
        let mut keys = vec![start];
        visited[start] = true;
        let (mut prev, mut cur) = (NONE, start);
        loop {
            let next = adj[cur].into_iter().find(|&n| n != NONE && n != prev && !visited[n]);
            match next {
                Some(n) => {
                    visited[n] = true;
                    keys.push(n);
                    prev = cur;
                    cur = n;
                }
                None => {
                    if adj[cur].contains(&start) && keys.len() > 2 {
                        keys.push(start);
                    }
                    break;
                }
            }
        }
        lines.push(Polyline {
            points: keys.iter().map(|&k| edge_point(grid, k, level)).collect(),
        });
    };
    let degree = |k: usize| adj[k].iter().filter(|&&n| n != NONE).count();
    for k in 0..adj.len() {
        if !visited[k] && degree(k) == 1 {
            walk(k, &mut visited);
        }
    }
    for k in 0..adj.len() {
        if !visited[k] && degree(k) == 2 {
            walk(k, &mut visited);
        }
    }
    lines
}

pub fn extract_contours(grid: &FieldGrid, levels: &[f64]) -> Result<ContourSet, AnalysisError> {
    let scalar = ScalarGrid::from_field_grid(grid)?;
    let mut levels = levels.to_vec();
    levels.sort_by(f64::total_cmp);
    let polylines = levels.iter().map(|&l| marching_squares(&scalar, l)).collect();
    Ok(ContourSet {
        plane: grid.plane,
        levels,
        polylines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize, half: f64) -> Vec<f64> {
        (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_grid_has_no_contours() {
        let g = ScalarGrid::from_fn(axis(11, 1.0), axis(11, 1.0), |_, _| 3.0).unwrap();
        for level in [2.0, 2.999, 3.0, 3.001, 4.0] {
            assert!(marching_squares(&g, level).is_empty());
        }
    }

    #[test]
    fn paraboloid_circles() {
        let (a, k) = (1.0, 2.0);
        let n = 81;
        let half = 2.0;
        let g = ScalarGrid::from_fn(axis(n, half), axis(n, half), |x, y| a + k * (x * x + y * y)).unwrap();
        let h = 2.0 * half / (n - 1) as f64;
        for level in [1.5, 2.0, 4.0, 7.0] {
            let lines = marching_squares(&g, level);
            assert_eq!(lines.len(), 1, "level {level}");
            let pl = &lines[0];
            assert!(pl.is_closed());
            assert!(pl.encloses([0.0, 0.0]));
            let r = ((level - a) / k).sqrt();
            let (lo, hi) = pl.radial_range([0.0, 0.0]);
            assert!((lo - r).abs() < h / 2f64.sqrt() && (hi - r).abs() < h / 2f64.sqrt());
        }
    }

    #[test]
    fn open_contour_crossing_boundary() {
        let g = ScalarGrid::from_fn(axis(11, 1.0), axis(11, 1.0), |x, _| x).unwrap();
        let lines = marching_squares(&g, 0.05);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].is_closed());
        assert_eq!(lines[0].points.len(), 11);
        assert!(lines[0].points.iter().all(|p| (p[0] - 0.05).abs() < 1e-12));
    }

    #[test]
    fn saddle_cell_uses_average() {
        // Diagonal corners (0,0) and (1,1) are high.
        let g = ScalarGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let above = marching_squares(&g, 0.4);
        let below = marching_squares(&g, 0.6);
        assert_eq!(above.len(), 2);
        assert_eq!(below.len(), 2);
        // Level 0.4: cell mean 0.5 is above, so segments cut off the low corners (1,0) and (0,1).
        assert!(above.iter().all(|l| {
            let m = [(l.points[0][0] + l.points[1][0]) / 2.0, (l.points[0][1] + l.points[1][1]) / 2.0];
            (m[0] - 1.0).hypot(m[1]) < 0.5 || m[0].hypot(m[1] - 1.0) < 0.5
        }));
        assert!(below.iter().all(|l| {
            let m = [(l.points[0][0] + l.points[1][0]) / 2.0, (l.points[0][1] + l.points[1][1]) / 2.0];
            m[0].hypot(m[1]) < 0.5 || (m[0] - 1.0).hypot(m[1] - 1.0) < 0.5
        }));
    }

    #[test]
    fn points_lie_on_bracketing_edges() {
        let u = axis(21, 1.0);
        let g = ScalarGrid::from_fn(u.clone(), u.clone(), |x, y| (3.0 * x).sin() + y * y).unwrap();
        for l in marching_squares(&g, 0.3) {
            for p in l.points {
                let on_u = u.iter().any(|&x| (x - p[0]).abs() < 1e-12);
                let on_v = u.iter().any(|&y| (y - p[1]).abs() < 1e-12);
                assert!(on_u || on_v);
            }
        }
    }

    #[test]
    fn level_spacing() {
        let l = default_levels(100.5, 6.0, 90.0, 120.0);
        assert_eq!(l, vec![94.5, 100.5, 106.5, 112.5, 118.5]);
        assert!(default_levels(1.0, 0.0, 0.0, 2.0).is_empty());
        assert!(default_levels(1.0, 1.0, 3.0, 2.0).is_empty());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ScalarGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, f64::NAN, 1.0, 1.0]).is_err());
        assert!(ScalarGrid::new(vec![0.0], vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    }
}
