//! Zero level sets of sampled fields: free-boundary points and sublevel sets.

use crate::grid::Field;

/// Sign-change locations of a field at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeBoundary {
    pub positions: Vec<f64>,
    pub time: f64,
}

impl FreeBoundary {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Sub-cell zero crossings of `u`, linearly interpolated between adjacent
/// centers of opposite strict sign. Cells that are exactly zero count as
/// boundary points themselves.
pub fn extract_free_boundary(u: &Field) -> FreeBoundary {
    let x = u.grid.centers();
    let v = &u.values;
    let mut positions = Vec::new();
    for i in 0..v.len() {
        if v[i] == 0.0 {
            positions.push(x[i]);
            continue;
        }
        if i + 1 < v.len() && v[i + 1] != 0.0 && (v[i] < 0.0) != (v[i + 1] < 0.0) {
            let theta = v[i] / (v[i] - v[i + 1]);
            positions.push(x[i] + theta * (x[i + 1] - x[i]));
        }
    }
    FreeBoundary {
        positions,
        time: u.time,
    }
}

/// Closed intervals `[lo, hi]`, sorted and disjoint.
pub type IntervalSet = Vec<(f64, f64)>;

/// `{u <= 0}` for the piecewise-linear interpolant of the cell values,
/// extended as a constant over the outer half cells.
pub fn sublevel_set(u: &Field) -> IntervalSet {
    let g = &u.grid;
    let x = g.centers();
    let v = &u.values;
    let n = v.len();
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut push = |lo: f64, hi: f64| {
        if let Some(last) = pieces.last_mut() {
            if lo <= last.1 {
                last.1 = last.1.max(hi);
                return;
            }
        }
        pieces.push((lo, hi));
    };
    if v[0] <= 0.0 {
        push(g.x_min, x[0]);
    }
    for i in 0..n - 1 {
        let (a, b) = (v[i], v[i + 1]);
        let (xa, xb) = (x[i], x[i + 1]);
        match (a <= 0.0, b <= 0.0) {
            (true, true) => push(xa, xb),
            (true, false) => push(xa, xa + (xb - xa) * a / (a - b)),
            (false, true) => push(xa + (xb - xa) * a / (a - b), xb),
            (false, false) => {}
        }
    }
    if v[n - 1] <= 0.0 {
        push(x[n - 1], g.x_max);
    }
    pieces
}

fn distance_to(x: f64, set: &[(f64, f64)]) -> f64 {
    set.iter()
        .map(|&(lo, hi)| {
            if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn directed(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    // d(., b) restricted to an interval of `a` peaks at an endpoint or at the
    // midpoint of a gap of `b`.
    let mut worst = 0.0_f64;
    for &(lo, hi) in a {
        worst = worst.max(distance_to(lo, b)).max(distance_to(hi, b));
        for w in b.windows(2) {
            let mid = 0.5 * (w[0].1 + w[1].0);
            if mid >= lo && mid <= hi {
                worst = worst.max(distance_to(mid, b));
            }
        }
    }
    worst
}

/// Hausdorff distance between two interval sets. Zero when both are empty,
/// infinite when exactly one is.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b).max(directed(b, a)),
    }
}

/// Hausdorff distance between `{u <= 0}` and `{v <= 0}`. For radial grids
/// this equals the distance between the corresponding sets in space.
pub fn sublevel_hausdorff(u: &Field, v: &Field) -> f64 {
    hausdorff(&sublevel_set(u), &sublevel_set(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn linear_data_gives_exact_root() {
        for n in [7, 10, 33] {
            let g = Grid::cartesian(0.0, 1.0, n).unwrap();
            let u = Field::from_fn(g, 0.0, |x| x - 0.5).unwrap();
            let fb = extract_free_boundary(&u);
            assert_eq!(fb.len(), 1);
            assert!((fb.positions[0] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_positive_has_no_boundary() {
        let g = Grid::cartesian(0.0, 1.0, 50).unwrap();
        let u = Field::constant(g, 0.5, 0.0);
        assert!(extract_free_boundary(&u).is_empty());
        assert!(sublevel_set(&u).is_empty());
    }

    #[test]
    fn two_roots_converge_second_order() {
        let roots = [(-1.0f64).acos() / 4.0, 3.0 * (-1.0f64).acos() / 4.0];
        let err = |n: usize| {
            let g = Grid::cartesian(0.0, 3.0, n).unwrap();
            let u = Field::from_fn(g, 0.0, |x| (2.0 * x).cos()).unwrap();
            let fb = extract_free_boundary(&u);
            assert_eq!(fb.len(), 2);
            fb.positions
                .iter()
                .zip(roots)
                .map(|(p, r)| (p - r).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(50) / err(100)).log2();
        assert!(order > 1.8, "order = {order}");
    }

    #[test]
    fn exact_zero_cell_is_a_boundary_point() {
        let g = Grid::cartesian(0.0, 3.0, 3).unwrap();
        let u = Field::new(g, vec![-1.0, 0.0, 1.0], 0.0).unwrap();
        assert_eq!(extract_free_boundary(&u).positions, vec![1.5]);
    }

    #[test]
    fn hausdorff_of_intervals() {
        assert_eq!(hausdorff(&[], &[]), 0.0);
        assert!(hausdorff(&[(0.0, 1.0)], &[]).is_infinite());
        assert!((hausdorff(&[(0.0, 1.0)], &[(0.2, 1.1)]) - 0.2).abs() < 1e-15);
        // the gap midpoint of the second set is the farthest point
        let d = hausdorff(&[(0.0, 1.0)], &[(0.0, 0.2), (0.8, 1.0)]);
        assert!((d - 0.3).abs() < 1e-15);
    }

    #[test]
    fn sublevel_set_covers_outer_half_cells() {
        let g = Grid::cartesian(0.0, 1.0, 4).unwrap();
        let u = Field::new(g, vec![-1.0, -1.0, 1.0, 1.0], 0.0).unwrap();
        assert_eq!(sublevel_set(&u), vec![(0.0, 0.5)]);
    }
}
