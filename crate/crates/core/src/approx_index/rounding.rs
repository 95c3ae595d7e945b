//! Geometric rounding of 2-D features onto a (1+η)-spaced grid.

use crate::error::{input_err, Result};

/// Known ranges of the two feature coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub alpha_lb: f64,
    pub alpha_ub: f64,
    pub beta_lb: f64,
    pub beta_ub: f64,
}

impl Bounds {
    pub fn new(alpha_lb: f64, alpha_ub: f64, beta_lb: f64, beta_ub: f64) -> Result<Self> {
        for (name, lb, ub) in [("alpha", alpha_lb, alpha_ub), ("beta", beta_lb, beta_ub)] {
            if !(lb.is_finite() && ub.is_finite() && lb > 0.0 && lb <= ub) {
                return Err(input_err!("{name} bounds must satisfy 0 < lb <= ub, got [{lb}, {ub}]"));
            }
        }
        Ok(Self {
            alpha_lb,
            alpha_ub,
            beta_lb,
            beta_ub,
        })
    }
}

/// Arm feature `(alpha, beta)`; each coordinate is 0 or inside its bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub alpha: f64,
    pub beta: f64,
}

impl Feature {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn dot(&self, q: &Query) -> f64 {
        self.alpha * q.q1 + self.beta * q.q2
    }
}

/// Query direction; weights are `<feature, query>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Query {
    pub q1: f64,
    pub q2: f64,
}

impl Query {
    pub fn new(q1: f64, q2: f64) -> Self {
        Self { q1, q2 }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.q1.is_finite() && self.q2.is_finite()) || self.q1 < 0.0 || self.q2 < 0.0 {
            return Err(input_err!("query must be finite and non-negative, got ({}, {})", self.q1, self.q2));
        }
        if self.q1 == 0.0 && self.q2 == 0.0 {
            return Err(input_err!("query must not be zero"));
        }
        Ok(())
    }

    pub fn angle(&self) -> f64 {
        self.q2.atan2(self.q1)
    }
}

/// Grid cell `(q, r)`; `None` stands for the `-inf` index, i.e. a zero coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinIndex {
    pub q: Option<u32>,
    pub r: Option<u32>,
}

const ROUNDING_TOL: f64 = 1e-12;

/// Smallest `w >= 1` with `(1+eta)^w >= ub/lb`. Accepts `eta` in `(0, 1]`.
pub fn compute_w(bounds: &Bounds, eta: f64) -> Result<u32> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(input_err!("eta must lie in (0, 1], got {eta}"));
    }
    let steps = |lb: f64, ub: f64| -> u32 {
        let ratio = ub / lb;
        let estimate = (ratio.ln() / eta.ln_1p()).ceil().max(1.0) as u32;
        // settle float noise in the logarithm against exact powers
        let mut w = estimate.saturating_sub(1).max(1);
        while (1.0 + eta).powi(w as i32) < ratio * (1.0 - ROUNDING_TOL) {
            w += 1;
        }
        w
    };
    Ok(steps(bounds.alpha_lb, bounds.alpha_ub).max(steps(bounds.beta_lb, bounds.beta_ub)))
}

/// The rounding grid: bin edges `lb*(1+eta)^i` for `i = 0..=W` on both axes.
#[derive(Debug, Clone)]
pub struct Grid {
    bounds: Bounds,
    eta: f64,
    w: u32,
    alpha_edges: Vec<f64>,
    beta_edges: Vec<f64>,
}

impl Grid {
    pub fn new(bounds: Bounds, eta: f64) -> Result<Self> {
        let w = compute_w(&bounds, eta)?;
        let edges = |lb: f64| -> Vec<f64> {
            (0..=w as i32).map(|i| lb * (1.0 + eta).powi(i)).collect()
        };
        Ok(Self {
            alpha_edges: edges(bounds.alpha_lb),
            beta_edges: edges(bounds.beta_lb),
            bounds,
            eta,
            w,
        })
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    /// `lb*(1+eta)^i` on the alpha axis, `i` in `0..=W`.
    pub fn alpha_edge(&self, i: u32) -> f64 {
        self.alpha_edges[i as usize]
    }

    pub fn beta_edge(&self, i: u32) -> f64 {
        self.beta_edges[i as usize]
    }

    fn axis_index(&self, value: f64, lb: f64, ub: f64, edges: &[f64], name: &str) -> Result<Option<u32>> {
        if value == 0.0 {
            return Ok(None);
        }
        let tol = ROUNDING_TOL * ub;
        if !value.is_finite() || value < lb - tol || value > ub + tol {
            return Err(input_err!("{name} = {value} is neither 0 nor within [{lb}, {ub}]"));
        }
        // bins are right-closed: first edge at or above the value
        let below = edges[1..].partition_point(|&e| e < value) as u32;
        Ok(Some((below + 1).min(self.w)))
    }

    pub fn bin_of(&self, f: &Feature) -> Result<BinIndex> {
        let b = &self.bounds;
        Ok(BinIndex {
            q: self.axis_index(f.alpha, b.alpha_lb, b.alpha_ub, &self.alpha_edges, "alpha")?,
            r: self.axis_index(f.beta, b.beta_lb, b.beta_ub, &self.beta_edges, "beta")?,
        })
    }

    /// Upper-right corner of the bin; a `-inf` index maps to 0.
    pub fn dominating_point(&self, bin: BinIndex) -> [f64; 2] {
        [
            bin.q.map_or(0.0, |q| self.alpha_edges[q as usize]),
            bin.r.map_or(0.0, |r| self.beta_edges[r as usize]),
        ]
    }

    /// Number of bins, `(W+1)^2` including the `-inf` rows.
    pub fn bin_count(&self) -> usize {
        let side = self.w as usize + 1;
        side * side
    }

    /// Dense id in `0..bin_count()`.
    pub fn bin_id(&self, bin: BinIndex) -> u32 {
        let side = self.w + 1;
        bin.q.map_or(0, |q| q) * side + bin.r.map_or(0, |r| r)
    }

    pub fn bin_from_id(&self, id: u32) -> BinIndex {
        let side = self.w + 1;
        let (q, r) = (id / side, id % side);
        BinIndex {
            q: (q > 0).then_some(q),
            r: (r > 0).then_some(r),
        }
    }

    pub fn bins(&self) -> impl Iterator<Item = BinIndex> + '_ {
        (0..self.bin_count() as u32).map(|id| self.bin_from_id(id))
    }

    /// Every dominating point together with its copy scaled by `1/(1+eta)`,
    /// without the origin and without duplicates. The scaled copy of
    /// `dom_{q,r}` is the grid point one step down on each non-zero axis.
    pub fn arrangement_points(&self) -> Vec<[f64; 2]> {
        let mut pts = Vec::with_capacity(2 * self.bin_count());
        let down = |edges: &[f64], i: Option<u32>| i.map_or(0.0, |i| edges[i as usize - 1]);
        for bin in self.bins() {
            if bin.q.is_none() && bin.r.is_none() {
                continue;
            }
            pts.push(self.dominating_point(bin));
            pts.push([down(&self.alpha_edges, bin.q), down(&self.beta_edges, bin.r)]);
        }
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_examples() {
        let b = Bounds::new(1.0, 16.0, 1.0, 16.0).unwrap();
        assert_eq!(compute_w(&b, 1.0).unwrap(), 4);
        let b = Bounds::new(0.25, 1.0, 1.0 / 16.0, 1.0).unwrap();
        // ceil(log_1.5 4) = ceil(3.419) = 4, ceil(log_1.5 16) = ceil(6.838) = 7
        assert_eq!(compute_w(&b, 0.5).unwrap(), 7);
        let b = Bounds::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(compute_w(&b, 0.3).unwrap(), 1);
        assert!(compute_w(&b, 0.0).is_err());
        assert!(compute_w(&b, 1.5).is_err());
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Bounds::new(2.0, 1.0, 1.0, 1.0).is_err());
        assert!(Bounds::new(1.0, f64::INFINITY, 1.0, 1.0).is_err());
    }

    fn unit_grid() -> Grid {
        Grid::new(Bounds::new(1.0, 16.0, 1.0, 16.0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn bins_are_right_closed() {
        let g = unit_grid();
        assert_eq!(g.bin_of(&Feature::new(5.0, 1.0)).unwrap().q, Some(3));
        assert_eq!(g.bin_of(&Feature::new(0.0, 1.0)).unwrap().q, None);
        assert_eq!(g.bin_of(&Feature::new(2.0, 1.0)).unwrap().q, Some(1));
        assert_eq!(g.bin_of(&Feature::new(2.0 + 1e-9, 1.0)).unwrap().q, Some(2));
        assert_eq!(g.bin_of(&Feature::new(16.0, 16.0)).unwrap(), BinIndex { q: Some(4), r: Some(4) });
    }

    #[test]
    fn out_of_range_features_rejected() {
        let g = unit_grid();
        assert!(g.bin_of(&Feature::new(0.5, 1.0)).is_err());
        assert!(g.bin_of(&Feature::new(17.0, 1.0)).is_err());
        assert!(g.bin_of(&Feature::new(-1.0, 1.0)).is_err());
        assert!(g.bin_of(&Feature::new(1.0, f64::NAN)).is_err());
        // within the relative tolerance of the upper bound
        assert_eq!(g.bin_of(&Feature::new(16.0 * (1.0 + 1e-13), 1.0)).unwrap().q, Some(4));
    }

    #[test]
    fn dominating_point_examples() {
        let g = unit_grid();
        assert_eq!(g.dominating_point(BinIndex { q: Some(3), r: Some(1) }), [8.0, 2.0]);
        assert_eq!(g.dominating_point(BinIndex { q: None, r: Some(1) })[0], 0.0);
        // f = (5, 1.5) rounds to (8, 2); with q = (1, 1): 10/2 = 5 < 6.5 <= 10
        let f = Feature::new(5.0, 1.5);
        let dom = g.dominating_point(g.bin_of(&f).unwrap());
        let q = Query::new(1.0, 1.0);
        let rounded = dom[0] * q.q1 + dom[1] * q.q2;
        assert_eq!(rounded, 10.0);
        assert!(rounded / 2.0 < f.dot(&q) && f.dot(&q) <= rounded);
    }

    #[test]
    fn bin_ids_round_trip() {
        let g = unit_grid();
        for bin in g.bins() {
            assert_eq!(g.bin_from_id(g.bin_id(bin)), bin);
        }
        assert_eq!(g.bins().count(), 25);
    }

    #[test]
    fn arrangement_points_cover_dom_and_scaled() {
        let g = Grid::new(Bounds::new(1.0, 1.0, 1.0, 1.0).unwrap(), 0.5).unwrap();
        // W = 1: dom points (0,1.5),(1.5,0),(1.5,1.5); scaled (0,1),(1,0),(1,1)
        let pts = g.arrangement_points();
        assert_eq!(pts.len(), 6);
        assert!(pts.contains(&[1.0, 1.0]) && pts.contains(&[1.5, 0.0]));
    }
}
