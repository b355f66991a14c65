//! Chebyshev–Gauss–Lobatto collocation grids.
//!
//! Nodes are stored in ascending order. Tensor-product grids are flattened
//! with the first axis varying fastest, so flat index
//! `p = i_1 + N i_2 + N^2 i_3 + ...` for per-axis indices `i_k` in `0..N`.

use crate::error::{Error, Result};

/// One axis of a collocation grid: `count` nodes spanning
/// `[center - radius, center + radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    center: f64,
    radius: f64,
    count: usize,
}

impl AxisSpec {
    pub fn new(center: f64, radius: f64, count: usize) -> Result<Self> {
        if count < 3 || count.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "node count must be odd and at least 3, got {count}"
            )));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::invalid(format!(
                "radius must be positive and finite, got {radius}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::invalid(format!("center must be finite, got {center}")));
        }
        Ok(Self { center, radius, count })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Ascending nodes on this axis.
    pub fn points(&self) -> Vec<f64> {
        let mid = (self.count - 1) / 2;
        reference_nodes(self.count)
            .into_iter()
            .enumerate()
            .map(|(k, s)| if k == mid { self.center } else { self.center + self.radius * s })
            .collect()
    }
}

/// Ascending Gauss–Lobatto nodes on `[-1, 1]`.
///
/// `-cos(k pi / n)` is evaluated as `sin(pi (2k - n) / (2n))`, which is exactly
/// odd-symmetric and hits 0 and the endpoints exactly.
pub(crate) fn reference_nodes(count: usize) -> Vec<f64> {
    let n = (count - 1) as f64;
    (0..count)
        .map(|k| {
            let m = 2.0 * k as f64 - n;
            (std::f64::consts::PI * m / (2.0 * n)).sin()
        })
        .collect()
}

/// Gauss–Lobatto nodes mapped onto `[center - radius, center + radius]`,
/// ascending, with the middle node equal to `center`.
pub fn gauss_lobatto_points(center: f64, radius: f64, count: usize) -> Result<Vec<f64>> {
    Ok(AxisSpec::new(center, radius, count)?.points())
}

/// Tensor-product collocation grid with equal node count on every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    axes: Vec<AxisSpec>,
    points: Vec<Vec<f64>>,
    count: usize,
    len: usize,
}

impl CollocationGrid {
    pub fn new(axes: &[AxisSpec]) -> Result<Self> {
        let first = axes
            .first()
            .ok_or_else(|| Error::invalid("a grid needs at least one axis"))?;
        let count = first.count();
        if let Some(bad) = axes.iter().find(|a| a.count() != count) {
            return Err(Error::invalid(format!(
                "all axes must share one node count ({count}), found {}",
                bad.count()
            )));
        }
        let len = count
            .checked_pow(axes.len() as u32)
            .ok_or_else(|| Error::Resource(format!("grid of {count}^{} nodes", axes.len())))?;
        Ok(Self {
            axes: axes.to_vec(),
            points: axes.iter().map(AxisSpec::points).collect(),
            count,
            len,
        })
    }

    /// Grid centered at `center` with per-axis radii and a shared node count.
    pub fn around(center: &[f64], radius: &[f64], count: usize) -> Result<Self> {
        if center.len() != radius.len() {
            return Err(Error::invalid(format!(
                "center has {} components but radius has {}",
                center.len(),
                radius.len()
            )));
        }
        let axes = center
            .iter()
            .zip(radius)
            .map(|(&c, &r)| AxisSpec::new(c, r, count))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&axes)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Nodes per axis.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Total number of grid points, `count^dim`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn axis_points(&self, axis: usize) -> &[f64] {
        &self.points[axis]
    }

    /// The center tuple (one component per axis).
    pub fn center(&self) -> Vec<f64> {
        self.axes.iter().map(AxisSpec::center).collect()
    }

    /// Per-axis node indices of flat index `p`.
    pub fn multi_index(&self, mut p: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            idx.push(p % self.count);
            p /= self.count;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &i| acc * self.count + i)
    }

    /// Coordinates of grid point `p`, written into `out`.
    pub fn point_into(&self, mut p: usize, out: &mut [f64]) {
        for (axis, x) in out.iter_mut().enumerate().take(self.dim()) {
            *x = self.points[axis][p % self.count];
            p /= self.count;
        }
    }

    pub fn point(&self, p: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.point_into(p, &mut x);
        x
    }

    /// Zero-based flat index of the center point, `(N^d - 1) / 2`.
    ///
    /// In one-based terms this is `(N^d + 1) / 2`.
    pub fn middle_index(&self) -> usize {
        (self.len - 1) / 2
    }
}

/// Tensor-product grid over the given axes.
pub fn tensor_grid(axes: &[AxisSpec]) -> Result<CollocationGrid> {
    CollocationGrid::new(axes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn three_nodes_on_unit_interval() {
        assert_eq!(gauss_lobatto_points(0.0, 1.0, 3).unwrap(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn five_nodes_match_cosines() {
        let p = gauss_lobatto_points(0.0, 1.0, 5).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in p.iter().zip([-1.0, -h, 0.0, h, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        // Direct evaluation of cos(k pi / 4), k = 4..0.
        for (i, k) in (0..5).rev().enumerate() {
            let c = (k as f64 * std::f64::consts::PI / 4.0).cos();
            assert_abs_diff_eq!(p[i], c, epsilon = 1e-15);
        }
    }

    #[test]
    fn shifted_three_nodes() {
        let p = gauss_lobatto_points(0.08, 0.03, 3).unwrap();
        assert_abs_diff_eq!(p[0], 0.05, epsilon = 1e-16);
        assert_eq!(p[1], 0.08);
        assert_abs_diff_eq!(p[2], 0.11, epsilon = 1e-16);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(matches!(gauss_lobatto_points(0.0, 1.0, 4), Err(Error::InvalidArgument(_))));
        assert!(matches!(gauss_lobatto_points(0.0, 1.0, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(gauss_lobatto_points(0.0, 0.0, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(gauss_lobatto_points(0.0, -1.0, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(gauss_lobatto_points(0.0, f64::NAN, 3), Err(Error::InvalidArgument(_))));
        assert!(tensor_grid(&[]).is_err());
        let a = AxisSpec::new(0.0, 1.0, 3).unwrap();
        let b = AxisSpec::new(0.0, 1.0, 5).unwrap();
        assert!(tensor_grid(&[a, b]).is_err());
    }

    #[test]
    fn enumeration_order_is_first_axis_fastest() {
        let a = AxisSpec::new(0.0, 1.0, 3).unwrap();
        let g = tensor_grid(&[a, a]).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.point(0), vec![-1.0, -1.0]);
        assert_eq!(g.point(1), vec![0.0, -1.0]);
        assert_eq!(g.point(3), vec![-1.0, 0.0]);
        assert_eq!(tensor_grid(&[a, a, a]).unwrap().len(), 27);
        assert_eq!(tensor_grid(&[a]).unwrap().len(), 3);
    }

    #[test]
    fn middle_index_examples() {
        let g1 = CollocationGrid::around(&[0.3], &[0.1], 11).unwrap();
        assert_eq!(g1.middle_index() + 1, 6);
        let g2 = CollocationGrid::around(&[0.1, -0.2], &[1.0, 0.5], 9).unwrap();
        assert_eq!(g2.middle_index() + 1, 41);
        let g3 = CollocationGrid::around(&[0.1, -0.2, 0.3], &[0.1, 0.1, 0.1], 9).unwrap();
        assert_eq!(g3.middle_index() + 1, 365);
        for g in [g1, g2, g3] {
            // Enumerate every point and find the center by search.
            let center = g.center();
            let found: Vec<usize> = (0..g.len()).filter(|&p| g.point(p) == center).collect();
            assert_eq!(found, vec![g.middle_index()]);
        }
    }

    #[test]
    fn flat_and_multi_index_agree() {
        let g = CollocationGrid::around(&[0.0; 3], &[1.0; 3], 5).unwrap();
        for p in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(p)), p);
        }
    }

    proptest! {
        #[test]
        fn grid_invariants(c in -10.0f64..10.0, r in 1e-3f64..5.0, half in 1usize..12) {
            let n = 2 * half + 1;
            let p = gauss_lobatto_points(c, r, n).unwrap();
            prop_assert_eq!(p.len(), n);
            prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(p[(n - 1) / 2], c);
            prop_assert!((p[0] - (c - r)).abs() <= 1e-15 * (1.0 + c.abs()));
            prop_assert!((p[n - 1] - (c + r)).abs() <= 1e-15 * (1.0 + c.abs()));
            let unit = gauss_lobatto_points(0.0, 1.0, n).unwrap();
            for k in 0..n {
                prop_assert!((p[k] - (c + r * unit[k])).abs() <= 1e-15 * (1.0 + c.abs()).max(r));
                // reflection about the center maps the node set onto itself
                prop_assert!(((2.0 * c - p[k]) - p[n - 1 - k]).abs() <= 4.0 * f64::EPSILON * (c.abs() + r));
            }
        }
    }
}
