//! Graded non-uniform frequency grids.
//!
//! A coarse uniform grid is overlaid with dense patches around narrow
//! features. Each patch has a uniform core and geometrically growing steps
//! outside it until the step matches the coarse spacing.

use alloc::vec::Vec;

use crate::Error;

/// A dense patch: uniform spacing `step` on `[center − half_width,
/// center + half_width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub center: f64,
    pub half_width: f64,
    pub step: f64,
}

impl Refinement {
    /// Patch of `±width_multiple·width` with `points_per_width` nodes per unit
    /// of `width`.
    pub fn around(center: f64, width: f64, width_multiple: f64, points_per_width: f64) -> Self {
        Self {
            center,
            half_width: width_multiple * width,
            step: width / points_per_width,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    /// Number of nodes of the uniform background grid, endpoints included.
    pub coarse_points: usize,
    /// Step ratio of the graded transition zones.
    pub growth: f64,
    pub refinements: Vec<Refinement>,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, coarse_points: usize) -> Self {
        Self {
            lo,
            hi,
            coarse_points,
            growth: 1.02,
            refinements: Vec::new(),
        }
    }

    pub fn refine(mut self, r: Refinement) -> Self {
        self.refinements.push(r);
        self
    }

    /// Same layout with every step divided by `factor`.
    pub fn densified(&self, factor: usize) -> Self {
        let f = factor.max(1) as f64;
        Self {
            lo: self.lo,
            hi: self.hi,
            coarse_points: (self.coarse_points - 1) * factor.max(1) + 1,
            growth: 1.0 + (self.growth - 1.0) / f,
            refinements: self
                .refinements
                .iter()
                .map(|r| Refinement {
                    step: r.step / f,
                    ..*r
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Vec<f64>, Error> {
        graded_grid(self)
    }
}

/// Sorted node set on `[spec.lo, spec.hi]`, endpoints included.
pub fn graded_grid(spec: &GridSpec) -> Result<Vec<f64>, Error> {
    let (lo, hi) = (spec.lo, spec.hi);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Domain("grid needs finite lo < hi"));
    }
    if spec.coarse_points < 2 {
        return Err(Error::Domain("grid needs at least two coarse points"));
    }
    if !(spec.growth > 1.0) {
        return Err(Error::Domain("grid growth ratio must exceed 1"));
    }
    let coarse_step = (hi - lo) / (spec.coarse_points - 1) as f64;
    let mut pts: Vec<f64> = (0..spec.coarse_points)
        .map(|i| lo + coarse_step * i as f64)
        .collect();
    *pts.last_mut().unwrap() = hi;

    let mut min_step = coarse_step;
    let mut covered: Vec<(f64, f64)> = Vec::new();
    let mut dense: Vec<f64> = Vec::new();
    for r in &spec.refinements {
        if !(r.step > 0.0 && r.half_width >= 0.0 && r.center.is_finite()) {
            return Err(Error::Domain("refinement needs positive step and finite center"));
        }
        if r.step >= coarse_step {
            continue;
        }
        min_step = min_step.min(r.step);
        let n = libm::ceil(r.half_width / r.step) as i64;
        for i in -n..=n {
            dense.push(r.center + r.step * i as f64);
        }
        let edge = r.step * n as f64;
        let mut extent = [r.center - edge, r.center + edge];
        for (k, dir) in [-1.0, 1.0].into_iter().enumerate() {
            let mut x = r.center + dir * edge;
            let mut h = r.step;
            loop {
                h *= spec.growth;
                if h >= coarse_step {
                    break;
                }
                x += dir * h;
                if x <= lo || x >= hi {
                    break;
                }
                dense.push(x);
            }
            extent[k] = x;
        }
        covered.push((extent[0] - 0.5 * coarse_step, extent[1] + 0.5 * coarse_step));
    }
    // Coarse nodes inside a patch would sit at arbitrary distance from the
    // graded nodes; drop them so the step sequence stays smooth.
    pts.retain(|&x| x == lo || x == hi || !covered.iter().any(|&(a, b)| x > a && x < b));
    pts.extend(dense);

    pts.retain(|&x| x >= lo && x <= hi);
    pts.sort_by(f64::total_cmp);
    // Drop near-duplicates from overlapping patches, keeping both endpoints.
    let min_gap = 0.25 * min_step;
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for x in pts {
        match out.last() {
            Some(&last) if x - last < min_gap => {
                if x == hi {
                    *out.last_mut().unwrap() = hi;
                }
            }
            _ => out.push(x),
        }
    }
    if out.len() >= 2 && out[0] != lo {
        out.insert(0, lo);
    }
    Ok(out)
}

/// Index of the node nearest to `x` in a sorted grid.
pub fn nearest_index(grid: &[f64], x: f64) -> usize {
    match grid.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i >= grid.len() => grid.len() - 1,
        Err(i) => {
            if x - grid[i - 1] <= grid[i] - x {
                i - 1
            } else {
                i
            }
        }
    }
}

/// Linear interpolation of `(x, y)` at `at`, clamped to the end values.
pub fn interp_linear(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    if at <= x[0] {
        return y[0];
    }
    if at >= x[n - 1] {
        return y[n - 1];
    }
    let i = x.partition_point(|&v| v <= at) - 1;
    let h = x[i + 1] - x[i];
    if h <= 0.0 {
        return y[i];
    }
    let u = (at - x[i]) / h;
    y[i] + u * (y[i + 1] - y[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_only_is_uniform() {
        let g = GridSpec::new(0.0, 1.0, 11).build().unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
    }

    #[test]
    fn patch_has_requested_spacing_and_grades_out() {
        let spec = GridSpec::new(0.0, 10.0, 401).refine(Refinement::around(0.064, 0.005, 10.0, 20.0));
        let g = spec.build().unwrap();
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let i = nearest_index(&g, 0.064);
        assert!((g[i] - 0.064).abs() < 1e-12);
        assert!((g[i + 1] - g[i] - 0.005 / 20.0).abs() < 1e-12);
        // no step jumps by more than the growth ratio plus the coarse merge
        let max_ratio = g
            .windows(3)
            .map(|w| (w[2] - w[1]) / (w[1] - w[0]))
            .fold(0.0f64, f64::max);
        assert!(max_ratio < 5.0, "{max_ratio}");
    }

    #[test]
    fn densified_halves_steps() {
        let spec = GridSpec::new(0.0, 1.0, 11).refine(Refinement::around(0.5, 0.01, 3.0, 10.0));
        let a = spec.build().unwrap();
        let b = spec.densified(2).build().unwrap();
        assert!(b.len() > a.len() * 3 / 2);
    }

    #[test]
    fn patch_clipped_at_boundary() {
        let g = GridSpec::new(0.0, 1.0, 5)
            .refine(Refinement::around(0.0, 0.01, 5.0, 10.0))
            .build()
            .unwrap();
        assert_eq!(g[0], 0.0);
        assert!(g[1] > 0.0 && g[1] < 0.0011);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(1.0, 0.0, 5).build().is_err());
        assert!(GridSpec::new(0.0, 1.0, 1).build().is_err());
    }

    #[test]
    fn interpolation_and_lookup() {
        let x = [0.0, 1.0, 3.0];
        let y = [0.0, 2.0, 6.0];
        assert_eq!(interp_linear(&x, &y, 2.0), 4.0);
        assert_eq!(interp_linear(&x, &y, -1.0), 0.0);
        assert_eq!(interp_linear(&x, &y, 5.0), 6.0);
        assert_eq!(nearest_index(&x, 1.9), 1);
        assert_eq!(nearest_index(&x, 2.1), 2);
    }
}
