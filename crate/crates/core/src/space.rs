//! Finite quasi-metric measure spaces.
//!
//! A [`QuasiMetricSpace`] is a finite point set with a symmetric quasi-distance
//! and strictly positive cell weights. Each point stands for a cell of an
//! underlying atomless space and its weight is the measure of that cell, so
//! asymptotic statements are checked on refinement families rather than on a
//! single space.
//!
//! Balls are open: `B(x, r) = { y : d(x, y) < r }`. From a fixed center the
//! distinct balls form a nested chain, one per distinct distance value, and
//! [`NestedBalls`] enumerates that chain. Every supremum over radii in this
//! crate runs over that chain, which makes it exact.

use serde::Serialize;

use crate::error::{check_len, Error, Result};

/// Relative offset applied to a distance to realize the closed ball
/// `{ y : d(x, y) <= delta }` as an open ball.
pub const RADIUS_BUMP: f64 = 1e-9;

/// How pairwise distances are derived from point coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Euclidean distance.
    Euclidean,
    /// Snowflaked Euclidean distance `|x - y|^alpha`.
    Snowflake(f64),
}

impl Metric {
    fn apply(self, euclid: f64) -> f64 {
        match self {
            Metric::Euclidean => euclid,
            Metric::Snowflake(alpha) => euclid.powf(alpha),
        }
    }
}

#[derive(Debug, Clone)]
enum Distances {
    Matrix(Vec<f64>),
    Coords(Metric),
}

/// A finite quasi-metric measure space.
#[derive(Debug, Clone)]
pub struct QuasiMetricSpace {
    n: usize,
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
    dim: usize,
    coords: Vec<f64>,
    distances: Distances,
    diameter: f64,
    mu_x: f64,
}

impl QuasiMetricSpace {
    /// Builds a space from an explicit row-major `n x n` distance matrix.
    pub fn from_matrix(dist: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        check_len(n * n, dist.len())?;
        validate_weights(&weights)?;
        for i in 0..n {
            for j in 0..n {
                let d = dist[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidSpace(format!(
                        "distance ({i}, {j}) = {d} is not a finite nonnegative number"
                    )));
                }
                if (i == j) != (d == 0.0) {
                    return Err(Error::InvalidSpace(format!(
                        "distance ({i}, {j}) = {d} violates d(x, y) = 0 iff x = y"
                    )));
                }
                if d != dist[j * n + i] {
                    return Err(Error::InvalidSpace(format!(
                        "distance matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let diameter = dist.iter().copied().fold(0.0, f64::max);
        Ok(Self::assemble(
            n,
            weights,
            0,
            Vec::new(),
            Distances::Matrix(dist),
            diameter,
        ))
    }

    /// Builds a space from point coordinates (row-major, `dim` values per
    /// point) and a metric.
    pub fn from_coords(
        coords: Vec<f64>,
        dim: usize,
        weights: Vec<f64>,
        metric: Metric,
    ) -> Result<Self> {
        let n = weights.len();
        if dim == 0 {
            return Err(Error::InvalidSpace(
                "coordinate dimension must be positive".into(),
            ));
        }
        check_len(n * dim, coords.len())?;
        validate_weights(&weights)?;
        if let Metric::Snowflake(alpha) = metric {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidSpace(format!(
                    "snowflake exponent {alpha} must be positive"
                )));
            }
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpace("non-finite coordinate".into()));
        }
        let space = Self::assemble(n, weights, dim, coords, Distances::Coords(metric), 0.0);
        let mut diameter = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = space.dist(i, j);
                if d == 0.0 {
                    return Err(Error::InvalidSpace(format!("points {i} and {j} coincide")));
                }
                diameter = diameter.max(d);
            }
        }
        Ok(Self { diameter, ..space })
    }

    /// One-dimensional points with the given weights.
    pub fn from_points_1d(points: Vec<f64>, weights: Vec<f64>, metric: Metric) -> Result<Self> {
        Self::from_coords(points, 1, weights, metric)
    }

    fn assemble(
        n: usize,
        weights: Vec<f64>,
        dim: usize,
        coords: Vec<f64>,
        distances: Distances,
        diameter: f64,
    ) -> Self {
        let ln_weights = weights.iter().map(|w| w.ln()).collect();
        let mu_x = weights.iter().sum();
        Self {
            n,
            weights,
            ln_weights,
            dim,
            coords,
            distances,
            diameter,
            mu_x,
        }
    }

    /// Uniform partition of `[0, 1]` into `2^level` cells, points at the cell
    /// midpoints, Lebesgue cell weights.
    pub fn uniform_dyadic(level: u32) -> Result<Self> {
        Self::uniform_interval(1usize << level, 0.0, 1.0, Metric::Euclidean)
    }

    /// Uniform dyadic partition of `[0, 1]` with the snowflaked metric
    /// `|x - y|^alpha`.
    pub fn snowflake_dyadic(level: u32, alpha: f64) -> Result<Self> {
        Self::uniform_interval(1usize << level, 0.0, 1.0, Metric::Snowflake(alpha))
    }

    /// Uniform partition of `[a, b]` into `n` cells.
    pub fn uniform_interval(n: usize, a: f64, b: f64, metric: Metric) -> Result<Self> {
        if n == 0 || !(b > a) {
            return Err(Error::InvalidSpace(format!(
                "cannot partition [{a}, {b}] into {n} cells"
            )));
        }
        let h = (b - a) / n as f64;
        let points = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
        Self::from_points_1d(points, vec![h; n], metric)
    }

    /// Partition of `[0, 1]` into `2^level` cells that are refined
    /// geometrically toward the origin.
    ///
    /// The interval is cut into dyadic shells `[2^-(k+1), 2^-k]` for
    /// `k = 0..L-1`, the innermost shell being extended down to 0, and each
    /// shell is split into four equal cells (`L = 2^level / 4`). Every cell is
    /// a dyadic interval, so weights and midpoints are exact binary numbers.
    /// Functions with a singularity at 0 are resolved down to scale `2^-L`.
    pub fn graded_dyadic(level: u32) -> Result<Self> {
        let n = 1usize << level;
        let per_shell = n.min(4);
        let shells = n / per_shell;
        if shells > 1070 {
            return Err(Error::InvalidSpace(format!(
                "graded level {level} needs cells below the f64 range"
            )));
        }
        let mut points = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        // Innermost shell first so that points ascend.
        for k in (0..shells).rev() {
            let hi = 0.5f64.powi(k as i32);
            let lo = if k + 1 == shells { 0.0 } else { 0.5 * hi };
            let h = (hi - lo) / per_shell as f64;
            for j in 0..per_shell {
                points.push(lo + (j as f64 + 0.5) * h);
                weights.push(h);
            }
        }
        Self::from_points_1d(points, weights, Metric::Euclidean)
    }

    /// Uniform cells of width `2^-cells_level` on `[0, 2^length_level]`; a
    /// large finite stand-in for the half line.
    pub fn half_line(cells_level: u32, length_level: u32) -> Result<Self> {
        let n = 1usize << (cells_level + length_level);
        Self::uniform_interval(n, 0.0, (1u64 << length_level) as f64, Metric::Euclidean)
    }

    /// The subspace on the given point indices (kept in the given order).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::InvalidSpace(format!("index {bad} out of range")));
        }
        let weights: Vec<f64> = indices.iter().map(|&i| self.weights[i]).collect();
        match self.distances {
            Distances::Coords(metric) => {
                let coords = indices
                    .iter()
                    .flat_map(|&i| {
                        self.coords[i * self.dim..(i + 1) * self.dim]
                            .iter()
                            .copied()
                    })
                    .collect();
                Self::from_coords(coords, self.dim, weights, metric)
            }
            Distances::Matrix(_) => {
                let m = indices.len();
                let mut dist = vec![0.0; m * m];
                for (a, &i) in indices.iter().enumerate() {
                    for (b, &j) in indices.iter().enumerate() {
                        dist[a * m + b] = self.dist(i, j);
                    }
                }
                Self::from_matrix(dist, weights)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn ln_weights(&self) -> &[f64] {
        &self.ln_weights
    }

    /// Total measure `mu(X)`.
    pub fn mu_x(&self) -> f64 {
        self.mu_x
    }

    /// `d_X = sup d(x, y)`.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First coordinate of every point, when the space carries coordinates.
    pub fn first_coords(&self) -> Option<Vec<f64>> {
        (self.dim > 0).then(|| (0..self.n).map(|i| self.coords[i * self.dim]).collect())
    }

    /// Raw coordinates (row-major), empty for matrix-defined spaces.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn metric(&self) -> Option<Metric> {
        match self.distances {
            Distances::Coords(m) => Some(m),
            Distances::Matrix(_) => None,
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.distances {
            Distances::Matrix(d) => d[i * self.n + j],
            Distances::Coords(metric) => {
                if i == j {
                    return 0.0;
                }
                let euclid = if self.dim == 1 {
                    (self.coords[i] - self.coords[j]).abs()
                } else {
                    let a = &self.coords[i * self.dim..(i + 1) * self.dim];
                    let b = &self.coords[j * self.dim..(j + 1) * self.dim];
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt()
                };
                metric.apply(euclid)
            }
        }
    }

    /// `{ j : d(center, j) < r }`, in ascending index order.
    pub fn ball(&self, center: usize, r: f64) -> Result<Vec<usize>> {
        self.check_center(center)?;
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {r}"
            )));
        }
        Ok((0..self.n).filter(|&j| self.dist(center, j) < r).collect())
    }

    /// `mu(B(center, r))`.
    pub fn ball_measure(&self, center: usize, r: f64) -> Result<f64> {
        Ok(self
            .ball(center, r)?
            .into_iter()
            .map(|j| self.weights[j])
            .sum())
    }

    /// Radii realizing every distinct ball around `center` exactly once, in
    /// ascending order; the last one realizes the whole space.
    pub fn critical_radii(&self, center: usize) -> Result<Vec<f64>> {
        self.critical_radii_with(center, RADIUS_BUMP)
    }

    pub fn critical_radii_with(&self, center: usize, bump: f64) -> Result<Vec<f64>> {
        self.check_center(center)?;
        if !(bump > 0.0 && bump < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "radius bump {bump} outside (0, 1)"
            )));
        }
        let levels = self.nested_balls(center).levels;
        let scale = if self.diameter > 0.0 {
            self.diameter
        } else {
            1.0
        };
        let radii = levels
            .iter()
            .enumerate()
            .map(|(k, &delta)| {
                let next = levels.get(k + 1).copied();
                let bumped = if delta == 0.0 {
                    bump * scale
                } else {
                    delta * (1.0 + bump)
                };
                match next {
                    Some(next) if bumped >= next => 0.5 * (delta + next),
                    _ => bumped,
                }
            })
            .collect();
        Ok(radii)
    }

    /// The chain of distinct balls around `center`.
    pub fn nested_balls(&self, center: usize) -> NestedBalls {
        let mut keyed: Vec<(f64, usize)> = (0..self.n).map(|j| (self.dist(center, j), j)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut order = Vec::with_capacity(self.n);
        let mut ends = Vec::new();
        let mut levels = Vec::new();
        for (idx, &(d, j)) in keyed.iter().enumerate() {
            order.push(j);
            let last_of_group = keyed.get(idx + 1).is_none_or(|next| next.0 != d);
            if last_of_group {
                ends.push(idx + 1);
                levels.push(d);
            }
        }
        NestedBalls {
            center,
            order,
            ends,
            levels,
        }
    }

    /// Smallest `K >= 1` with `d(x, y) <= K (d(x, z) + d(z, y))` over all
    /// triples of distinct points. Cubic in `n`.
    pub fn quasi_triangle_constant(&self) -> f64 {
        let mut k = 1.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let dij = self.dist(i, j);
                for z in 0..self.n {
                    if z == i || z == j {
                        continue;
                    }
                    k = k.max(dij / (self.dist(i, z) + self.dist(z, j)));
                }
            }
        }
        k
    }

    /// Doubling constant `sup_{x, r > 0} mu(B(x, 2r)) / mu(B(x, r))`.
    ///
    /// For `r` in `(delta_k, delta_{k+1}]` the ball `B(x, r)` is the closed
    /// ball of radius `delta_k` while `B(x, 2r)` grows with `r`, so the
    /// supremum over each step is attained at `r = delta_{k+1}`.
    pub fn doubling_constant(&self) -> f64 {
        let mut best = 1.0f64;
        for center in 0..self.n {
            let balls = self.nested_balls(center);
            let dists: Vec<f64> = balls.order.iter().map(|&j| self.dist(center, j)).collect();
            let mut prefix = Vec::with_capacity(self.n + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for &j in &balls.order {
                acc += self.weights[j];
                prefix.push(acc);
            }
            for k in 0..balls.levels.len().saturating_sub(1) {
                let inner = prefix[balls.ends[k]];
                let reach = 2.0 * balls.levels[k + 1];
                let outer = prefix[dists.partition_point(|&d| d < reach)];
                best = best.max(outer / inner);
            }
        }
        best
    }

    fn check_center(&self, center: usize) -> Result<()> {
        if center < self.n {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "center {center} out of range (n = {})",
                self.n
            )))
        }
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(Error::InvalidSpace(format!(
            "weight {i} = {w} is not a positive finite number"
        )));
    }
    Ok(())
}

/// Points around a center sorted by distance, grouped by equal distance.
///
/// `order[..ends[k]]` is the ball `{ y : d(center, y) <= levels[k] }`; the
/// last group closes the whole space.
#[derive(Debug, Clone)]
pub struct NestedBalls {
    pub center: usize,
    pub order: Vec<usize>,
    pub ends: Vec<usize>,
    pub levels: Vec<f64>,
}

impl NestedBalls {
    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    /// Members of the `k`-th ball.
    pub fn ball(&self, k: usize) -> &[usize] {
        &self.order[..self.ends[k]]
    }

    /// Members added when passing from ball `k - 1` to ball `k`.
    pub fn shell(&self, k: usize) -> &[usize] {
        let start = if k == 0 { 0 } else { self.ends[k - 1] };
        &self.order[start..self.ends[k]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid4() -> QuasiMetricSpace {
        QuasiMetricSpace::from_points_1d(
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            vec![0.25; 4],
            Metric::Euclidean,
        )
        .unwrap()
    }

    #[test]
    fn quasi_triangle_examples() {
        let line =
            QuasiMetricSpace::from_points_1d(vec![0.0, 0.5, 1.0], vec![1.0; 3], Metric::Euclidean)
                .unwrap();
        assert_eq!(line.quasi_triangle_constant(), 1.0);
        let snow = QuasiMetricSpace::from_points_1d(
            vec![0.0, 0.5, 1.0],
            vec![1.0; 3],
            Metric::Snowflake(2.0),
        )
        .unwrap();
        assert_eq!(snow.quasi_triangle_constant(), 2.0);
        let pair =
            QuasiMetricSpace::from_points_1d(vec![0.0, 1.0], vec![1.0; 2], Metric::Euclidean)
                .unwrap();
        assert_eq!(pair.quasi_triangle_constant(), 1.0);
    }

    #[test]
    fn ball_examples() {
        let s = grid4();
        assert_eq!(s.ball(0, 0.4).unwrap(), vec![0, 1]);
        assert_eq!(s.ball(2, 10.0).unwrap(), vec![0, 1, 2, 3]);
        assert!(s.ball(0, 0.0).is_err());
        assert!(s.ball(0, -1.0).is_err());
        let snow = QuasiMetricSpace::from_points_1d(
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            vec![0.25; 4],
            Metric::Snowflake(2.0),
        )
        .unwrap();
        assert_eq!(snow.ball(0, 0.2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn ball_measure_examples() {
        let s = grid4();
        assert_eq!(s.ball_measure(1, 5.0).unwrap(), s.mu_x());
        assert_eq!(s.ball_measure(0, 0.4).unwrap(), 0.5);
        let uneven = QuasiMetricSpace::from_points_1d(
            vec![0.0, 1.0, 2.0],
            vec![0.1, 0.7, 0.2],
            Metric::Euclidean,
        )
        .unwrap();
        assert_eq!(uneven.ball_measure(1, 1e-3).unwrap(), 0.7);
    }

    #[test]
    fn critical_radii_examples() {
        let pair =
            QuasiMetricSpace::from_points_1d(vec![0.0, 1.0], vec![0.5; 2], Metric::Euclidean)
                .unwrap();
        let radii = pair.critical_radii(0).unwrap();
        assert_eq!(radii.len(), 2);
        assert_eq!(pair.ball(0, radii[0]).unwrap(), vec![0]);
        assert_eq!(pair.ball(0, radii[1]).unwrap(), vec![0, 1]);

        // Both neighbours of an interior point sit at the same distance.
        let s = grid4();
        assert_eq!(s.critical_radii(0).unwrap().len(), 4);
        assert_eq!(s.critical_radii(1).unwrap().len(), 3);
        let radii = s.critical_radii(0).unwrap();
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.ball(0, *radii.last().unwrap()).unwrap().len(), 4);
    }

    #[test]
    fn doubling_examples() {
        let single =
            QuasiMetricSpace::from_points_1d(vec![0.5], vec![1.0], Metric::Euclidean).unwrap();
        assert_eq!(single.doubling_constant(), 1.0);
        for level in 1..=6 {
            let d = QuasiMetricSpace::uniform_dyadic(level)
                .unwrap()
                .doubling_constant();
            assert!((1.0..=3.0).contains(&d), "level {level}: {d}");
        }
        let geometric = |n: usize| {
            let pts = (0..n).map(|i| i as f64).collect();
            let w = (0..n).map(|i| 2f64.powi(i as i32)).collect();
            QuasiMetricSpace::from_points_1d(pts, w, Metric::Euclidean)
                .unwrap()
                .doubling_constant()
        };
        let (d4, d8, d16) = (geometric(4), geometric(8), geometric(16));
        assert!(d4 < d8 && d8 < d16, "{d4} {d8} {d16}");
    }

    #[test]
    fn matrix_validation() {
        assert!(QuasiMetricSpace::from_matrix(vec![0.0, 1.0, 2.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(QuasiMetricSpace::from_matrix(vec![0.0, 0.0, 0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(QuasiMetricSpace::from_matrix(vec![0.0, 1.0, 1.0, 0.0], vec![1.0, 0.0]).is_err());
        let ok = QuasiMetricSpace::from_matrix(vec![0.0, 1.0, 1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(ok.mu_x(), 3.0);
        assert_eq!(ok.diameter(), 1.0);
    }

    #[test]
    fn graded_mesh_covers_unit_interval() {
        for level in [2, 4, 8, 10] {
            let s = QuasiMetricSpace::graded_dyadic(level).unwrap();
            assert_eq!(s.n(), 1 << level);
            assert_eq!(s.mu_x(), 1.0);
            let x = s.first_coords().unwrap();
            assert!(x.windows(2).all(|w| w[0] < w[1]));
            assert!(x[0] > 0.0);
        }
    }

    #[test]
    fn restrict_keeps_distances() {
        let s = QuasiMetricSpace::uniform_dyadic(3).unwrap();
        let sub = s.restrict(&[2, 5, 7]).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.dist(0, 2), s.dist(2, 7));
        assert_eq!(sub.mu_x(), 3.0 / 8.0);
    }
}
