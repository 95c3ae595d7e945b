//! One representative direction per cell of the arrangement of lines through
//! the origin orthogonal to every point-pair difference.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{input_err, Error, Result};

use super::rounding::Grid;

/// Angles closer than this are the same boundary ray.
pub const ANGLE_DEDUP_TOL: f64 = 1e-12;
/// Slack for queries that sit just outside a cone edge.
const CONE_EDGE_TOL: f64 = 1e-9;

/// Which directions the cells have to cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coverage {
    /// Every direction in the plane.
    Circle,
    /// Only directions with angle in `[lo, hi]`, a sub-range of `[0, pi/2]`.
    Cone { lo: f64, hi: f64 },
}

impl Coverage {
    pub fn cone(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= FRAC_PI_2) {
            return Err(input_err!("query cone must satisfy 0 <= lo <= hi <= pi/2, got [{lo}, {hi}]"));
        }
        Ok(Coverage::Cone { lo, hi })
    }
}

/// Sorted boundary rays and one unit vector strictly inside each cell.
#[derive(Debug, Clone)]
pub struct HittingSet {
    boundaries: Vec<f64>,
    vectors: Vec<[f64; 2]>,
    coverage: Coverage,
}

fn unit(angle: f64) -> [f64; 2] {
    [angle.cos(), angle.sin()]
}

fn normalize(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU - ANGLE_DEDUP_TOL {
        0.0
    } else {
        a
    }
}

fn sort_dedup(angles: &mut Vec<f64>) {
    angles.sort_unstable_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(angles.len());
    for &a in angles.iter() {
        match out.last() {
            Some(&prev) if a - prev <= ANGLE_DEDUP_TOL => {}
            _ => out.push(a),
        }
    }
    *angles = out;
}

impl HittingSet {
    /// Builds cells from raw boundary angles (any order, duplicates allowed).
    /// Under `Circle` the angles are rays in `[0, 2pi)`; under `Cone` only
    /// angles strictly inside the cone are kept.
    pub fn from_boundaries(mut angles: Vec<f64>, coverage: Coverage) -> Self {
        let vectors = match coverage {
            Coverage::Circle => {
                for a in angles.iter_mut() {
                    *a = normalize(*a);
                }
                sort_dedup(&mut angles);
                let n = angles.len();
                if n == 0 {
                    vec![[1.0, 0.0]]
                } else {
                    (0..n)
                        .map(|i| {
                            let start = angles[i];
                            let end = if i + 1 < n { angles[i + 1] } else { angles[0] + TAU };
                            unit((start + end) / 2.0)
                        })
                        .collect()
                }
            }
            Coverage::Cone { lo, hi } => {
                angles.retain(|&a| a > lo && a < hi);
                sort_dedup(&mut angles);
                let mut edges = Vec::with_capacity(angles.len() + 2);
                edges.push(lo);
                edges.extend_from_slice(&angles);
                edges.push(hi);
                edges.windows(2).map(|w| unit((w[0] + w[1]) / 2.0)).collect()
            }
        };
        Self {
            boundaries: angles,
            vectors,
            coverage,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[[f64; 2]] {
        &self.vectors
    }

    pub fn vector(&self, cell: usize) -> [f64; 2] {
        self.vectors[cell]
    }

    pub fn boundary_angles(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn coverage(&self) -> Coverage {
        self.coverage
    }

    /// Angular extent `(start, end)` of a cell, `end` possibly beyond `2pi`.
    pub fn cell_span(&self, cell: usize) -> (f64, f64) {
        let b = &self.boundaries;
        match self.coverage {
            Coverage::Circle if b.is_empty() => (0.0, TAU),
            Coverage::Circle => {
                let end = if cell + 1 < b.len() { b[cell + 1] } else { b[0] + TAU };
                (b[cell], end)
            }
            Coverage::Cone { lo, hi } => {
                let start = if cell == 0 { lo } else { b[cell - 1] };
                let end = if cell == b.len() { hi } else { b[cell] };
                (start, end)
            }
        }
    }

    /// Cell whose closure contains the direction of `q`. A direction on a
    /// boundary ray may resolve to either neighbour.
    pub fn locate(&self, q: [f64; 2]) -> Result<usize> {
        if !(q[0].is_finite() && q[1].is_finite()) || (q[0] == 0.0 && q[1] == 0.0) {
            return Err(input_err!("cannot locate the direction of ({}, {})", q[0], q[1]));
        }
        let phi = q[1].atan2(q[0]);
        match self.coverage {
            Coverage::Circle => {
                if self.boundaries.is_empty() {
                    return Ok(0);
                }
                let phi = normalize(phi);
                let idx = self.boundaries.partition_point(|&a| a <= phi);
                Ok(if idx == 0 { self.boundaries.len() - 1 } else { idx - 1 })
            }
            Coverage::Cone { lo, hi } => {
                if phi < lo - CONE_EDGE_TOL || phi > hi + CONE_EDGE_TOL {
                    return Err(input_err!(
                        "query angle {phi} lies outside the indexed cone [{lo}, {hi}]"
                    ));
                }
                Ok(self.boundaries.partition_point(|&a| a <= phi))
            }
        }
    }
}

fn check_points(points: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    if points.is_empty() {
        return Err(input_err!("hitting set needs at least one point"));
    }
    if let Some(p) = points.iter().find(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(input_err!("point ({}, {}) is not finite", p[0], p[1]));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() == 1 && points.len() > 1 {
        return Err(Error::Degenerate("all points are identical".into()));
    }
    Ok(pts)
}

fn collinear_with_origin(p: [f64; 2], r: [f64; 2]) -> bool {
    let cross = p[0] * r[1] - p[1] * r[0];
    cross.abs() <= 1e-12 * p[0].hypot(p[1]) * r[0].hypot(r[1])
}

/// Both rays of the line through the origin orthogonal to `p - r`.
fn boundary_rays(p: [f64; 2], r: [f64; 2]) -> (f64, f64) {
    let d = [p[0] - r[0], p[1] - r[1]];
    let theta = d[0].atan2(-d[1]);
    (normalize(theta), normalize(theta + PI))
}

/// All-pairs construction over the full circle of directions.
///
/// Pairs lying on a common line through the origin are skipped: for queries
/// in the closed positive quadrant their order never changes.
pub fn generate_hitting_set(points: &[[f64; 2]]) -> Result<HittingSet> {
    let pts = check_points(points)?;
    let mut angles = Vec::with_capacity(pts.len() * pts.len().saturating_sub(1));
    for (i, &p) in pts.iter().enumerate() {
        for &r in &pts[i + 1..] {
            if collinear_with_origin(p, r) {
                continue;
            }
            let (a, b) = boundary_rays(p, r);
            angles.push(a);
            angles.push(b);
        }
    }
    Ok(HittingSet::from_boundaries(angles, Coverage::Circle))
}

/// All-pairs construction keeping only cells that meet the cone `[lo, hi]`.
pub fn generate_hitting_set_in_cone(points: &[[f64; 2]], lo: f64, hi: f64) -> Result<HittingSet> {
    let coverage = Coverage::cone(lo, hi)?;
    let pts = check_points(points)?;
    let mut angles = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        for &r in &pts[i + 1..] {
            if collinear_with_origin(p, r) {
                continue;
            }
            let (a, b) = boundary_rays(p, r);
            for x in [a, b] {
                if x > lo && x < hi {
                    angles.push(x);
                }
            }
        }
    }
    Ok(HittingSet::from_boundaries(angles, coverage))
}

/// Slot on one grid axis: `None` is the zero coordinate, `Some(i)` is edge `i`.
type Slot = Option<u32>;

/// Membership of `(i, j)` in the arrangement point set: dominating points use
/// indices `1..=W`, their scaled copies `0..=W-1`.
fn grid_has(w: u32, i: Slot, j: Slot) -> bool {
    let upper = |s: Slot| s.is_none_or(|x| x >= 1);
    let lower = |s: Slot| s.is_none_or(|x| x < w);
    (i.is_some() || j.is_some()) && ((upper(i) && upper(j)) || (lower(i) && lower(j)))
}

/// Boundary rays inside the cone for the grid's arrangement points, without
/// enumerating point pairs.
///
/// A boundary inside the positive quadrant comes from a pair
/// `p = (x_i, y_j')`, `p' = (x_i', y_j)` with `x_i > x_i'` and `y_j > y_j'`;
/// its ray has angle `atan((x_i - x_i') / (y_j - y_j'))`. On a geometric grid
/// that ratio depends only on the two step counts and the offset between the
/// base indices, so each class is visited once and kept if some pair in the
/// point set realises it.
pub fn grid_boundaries_in_cone(grid: &Grid, lo: f64, hi: f64) -> Result<HittingSet> {
    let coverage = Coverage::cone(lo, hi)?;
    let w = grid.w();
    let tan_lo = lo.tan();
    let tan_hi = if hi >= FRAC_PI_2 { f64::INFINITY } else { hi.tan() };

    // Axis difference classes: step 0 means "from the zero coordinate up to
    // edge base"; step s > 0 means "from edge base up to edge base + s".
    // Returns (low slot, high slot) for a given base.
    let span = |step: u32, base: u32| -> (Slot, Slot) {
        if step == 0 {
            (None, Some(base))
        } else {
            (Some(base), Some(base + step))
        }
    };
    let base_range = |step: u32| -> (u32, u32) { (0, w - step) };

    let mut angles = Vec::new();
    for da in 0..=w {
        let (ua_lo, ua_hi) = base_range(da);
        for db in 0..=w {
            let (vb_lo, vb_hi) = base_range(db);
            // offset s = alpha base - beta base
            let s_min = ua_lo as i64 - vb_hi as i64;
            let s_max = ua_hi as i64 - vb_lo as i64;
            for s in s_min..=s_max {
                let bv_lo = (vb_lo as i64).max(ua_lo as i64 - s);
                let bv_hi = (vb_hi as i64).min(ua_hi as i64 - s);
                if bv_lo > bv_hi {
                    continue;
                }
                // pick a realising pair; at most four base choices can hit
                // the two missing grid corners
                let witness = (bv_lo..=bv_hi).take(6).find(|&bv| {
                    let bu = (bv + s) as u32;
                    let (i_small, i_big) = span(da, bu);
                    let (j_small, j_big) = span(db, bv as u32);
                    grid_has(w, i_big, j_small) && grid_has(w, i_small, j_big)
                });
                let Some(bv) = witness else { continue };
                let bu = (bv + s) as u32;
                let (i_small, i_big) = span(da, bu);
                let (j_small, j_big) = span(db, bv as u32);
                let x = |i: Slot| i.map_or(0.0, |i| grid.alpha_edge(i));
                let y = |j: Slot| j.map_or(0.0, |j| grid.beta_edge(j));
                let p = [x(i_big), y(j_small)];
                let r = [x(i_small), y(j_big)];
                let ratio = (p[0] - r[0]) / (r[1] - p[1]);
                if !(ratio > tan_lo * (1.0 - 1e-9) && ratio < tan_hi * (1.0 + 1e-9)) {
                    continue;
                }
                if collinear_with_origin(p, r) {
                    continue;
                }
                let (a, b) = boundary_rays(p, r);
                for t in [a, b] {
                    if t > lo && t < hi {
                        angles.push(t);
                    }
                }
            }
        }
    }
    Ok(HittingSet::from_boundaries(angles, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx_index::rounding::Bounds;

    #[test]
    fn two_axis_points() {
        let hs = generate_hitting_set(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(hs.len(), 2);
        let deg = |a: f64| a.to_radians();
        assert!((hs.boundary_angles()[0] - deg(45.0)).abs() < 1e-12);
        assert!((hs.boundary_angles()[1] - deg(225.0)).abs() < 1e-12);
        let v: Vec<[f64; 2]> = hs.vectors().to_vec();
        assert!((v[0][0] - deg(135.0).cos()).abs() < 1e-12 && (v[0][1] - deg(135.0).sin()).abs() < 1e-12);
        assert!((v[1][0] - deg(315.0).cos()).abs() < 1e-12);
        // the two vectors induce opposite strict orders on the points
        let dot = |p: [f64; 2], h: [f64; 2]| p[0] * h[0] + p[1] * h[1];
        assert!(dot([0.0, 1.0], v[0]) > dot([1.0, 0.0], v[0]));
        assert!(dot([1.0, 0.0], v[1]) > dot([0.0, 1.0], v[1]));
    }

    #[test]
    fn single_point_has_one_cell() {
        let hs = generate_hitting_set(&[[2.0, 3.0]]).unwrap();
        assert_eq!(hs.vectors(), &[[1.0, 0.0]]);
        assert_eq!(hs.locate([0.3, 0.7]).unwrap(), 0);
    }

    #[test]
    fn degenerate_and_empty_inputs() {
        assert!(matches!(generate_hitting_set(&[]), Err(Error::Input(_))));
        assert!(matches!(
            generate_hitting_set(&[[1.0, 1.0], [1.0, 1.0]]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn collinear_pair_adds_no_boundary() {
        let hs = generate_hitting_set(&[[1.0, 1.0], [2.0, 2.0]]).unwrap();
        assert_eq!(hs.len(), 1);
    }

    #[test]
    fn vectors_lie_strictly_inside_their_cells() {
        let pts = [[1.0, 0.2], [0.3, 0.9], [0.5, 0.5], [2.0, 0.1]];
        let hs = generate_hitting_set(&pts).unwrap();
        assert_eq!(hs.len(), hs.boundary_angles().len());
        for (i, v) in hs.vectors().iter().enumerate() {
            let (start, end) = hs.cell_span(i);
            let mut a = v[1].atan2(v[0]).rem_euclid(TAU);
            if a < start {
                a += TAU;
            }
            assert!(a > start + 1e-9 && a < end - 1e-9, "cell {i}");
            assert_eq!(hs.locate(*v).unwrap(), i);
        }
    }

    #[test]
    fn cone_restricts_cells() {
        let pts = [[1.0, 0.2], [0.3, 0.9], [0.5, 0.5], [2.0, 0.1]];
        let full = generate_hitting_set(&pts).unwrap();
        let (lo, hi) = (0.2, 1.3);
        let cone = generate_hitting_set_in_cone(&pts, lo, hi).unwrap();
        let inside = full.boundary_angles().iter().filter(|&&a| a > lo && a < hi).count();
        assert_eq!(cone.boundary_angles().len(), inside);
        assert_eq!(cone.len(), inside + 1);
        assert!(cone.locate([1.0, 0.0]).is_err());
        assert!(cone.locate([1.0, 1.0]).is_ok());
    }

    #[test]
    fn grid_enumerator_matches_all_pairs() {
        for (eta, ratio_a, ratio_b) in [(0.3, 2.0, 5.0), (0.5, 9.0, 30.0), (0.1, 1.2, 1.5), (0.25, 1.0, 3.0)] {
            let grid = Grid::new(Bounds::new(0.1, 0.1 * ratio_a, 0.02, 0.02 * ratio_b).unwrap(), eta).unwrap();
            let pts = grid.arrangement_points();
            for (lo, hi) in [(0.05, 1.5), (0.9, 1.2), (0.0, FRAC_PI_2)] {
                let slow = generate_hitting_set_in_cone(&pts, lo, hi).unwrap();
                let fast = grid_boundaries_in_cone(&grid, lo, hi).unwrap();
                let (a, b) = (slow.boundary_angles(), fast.boundary_angles());
                assert_eq!(a.len(), b.len(), "eta={eta} cone=({lo},{hi})");
                for (x, y) in a.iter().zip(b) {
                    assert!((x - y).abs() < 1e-11);
                }
            }
        }
    }
}
