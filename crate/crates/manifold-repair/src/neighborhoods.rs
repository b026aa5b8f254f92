//! Fill distance, kernel support-size selection, and the exact spatial
//! index behind every truncated gradient sum.
//!
//! The fill distance `h0` of a cloud is the **median** over points of the
//! distance to the nearest other point (median rather than supremum for
//! outlier robustness). Kernel supports are chosen from it:
//!
//! * `h1 = 2√2 · c1 · h0(P)` where `c1` is the smallest grid value in
//!   `{1.0, 1.1, …, 20.0}` such that every `q_i` has at least
//!   `ν = ⌊J/I⌋` P-points within radius `c1·h0(P)`.
//! * `h2 = 2√2 · c1q · h0(Q)` by the mirrored rule on `Q` with `ν = 1`,
//!   counting *other* points only, so each point sees at least one
//!   neighbor inside its repulsion kernel.
//!
//! The `2√2` factor places the truncation radius four standard deviations
//! out, where the Gaussian weight has lost all but 0.01% of its mass; sums
//! are truncated there.
//!
//! [`SpatialIndex`] is a kd-tree over the (possibly sketched) coordinates.
//! It is exact — results must match a brute-force scan index for index —
//! and immutable after construction, so concurrent queries are safe.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// The `2√2` truncation/support factor.
pub const SUPPORT_FACTOR: f64 = 2.828427124746190097603377448419; // 2*sqrt(2)

/// Grid of candidate radius multipliers: 1.0, 1.1, ..., 20.0.
const C_GRID_MAX_TENTHS: usize = 200;

/// Kernel support sizes derived from a `(P, Q)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodPlan {
    /// Fill distance of `P`.
    pub h0_p: f64,
    /// Fill distance of `Q`.
    pub h0_q: f64,
    /// Radius multiplier for the attraction kernel (`ν = ⌊J/I⌋` rule).
    pub c1: f64,
    /// Radius multiplier for the repulsion kernel (`ν = 1`, other points).
    pub c1q: f64,
    /// Guaranteed P-neighbor count `⌊J/I⌋`.
    pub nu: usize,
    /// Attraction support `2√2·c1·h0_p`.
    pub h1: f64,
    /// Repulsion support `2√2·c1q·h0_q`.
    pub h2: f64,
    /// True if either multiplier hit the 20.0 grid cap without satisfying
    /// its neighbor guarantee.
    pub grid_capped: bool,
}

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    axis: usize,
    left: i64,
    right: i64,
}

/// Exact kd-tree supporting fixed-radius and k-nearest queries.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    coords: Vec<f64>,
    dim: usize,
    count: usize,
    nodes: Vec<Node>,
    root: i64,
}

impl SpatialIndex {
    /// Builds the index over a cloud (single-threaded, O(J log J)).
    pub fn build(cloud: &PointCloud) -> Self {
        let dim = cloud.ambient_dim();
        let count = cloud.count();
        let coords = cloud.as_flat().to_vec();
        let mut order: Vec<usize> = (0..count).collect();
        let mut nodes = Vec::with_capacity(count);
        let root = build_recursive(&coords, dim, &mut order[..], &mut nodes);
        SpatialIndex {
            coords,
            dim,
            count,
            nodes,
            root,
        }
    }

    /// Number of indexed points.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Dimension of the indexed coordinates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// All indices with distance ≤ `radius` from `center`, ascending.
    pub fn range_query(&self, center: &[f64], radius: f64) -> Result<Vec<usize>> {
        if center.len() != self.dim {
            return Err(Error::invalid(format!(
                "query dimension {} does not match index dimension {}",
                center.len(),
                self.dim
            )));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("invalid query radius {radius}")));
        }
        let mut out = Vec::new();
        self.range_recursive(self.root, center, radius, radius * radius, &mut out);
        out.sort_unstable();
        Ok(out)
    }

    fn range_recursive(
        &self,
        node: i64,
        center: &[f64],
        radius: f64,
        radius_sq: f64,
        out: &mut Vec<usize>,
    ) {
        if node < 0 {
            return;
        }
        let n = &self.nodes[node as usize];
        let p = self.point(n.point);
        if crate::cloud::sq_dist(center, p) <= radius_sq {
            out.push(n.point);
        }
        let delta = center[n.axis] - p[n.axis];
        if delta - radius <= 0.0 {
            self.range_recursive(n.left, center, radius, radius_sq, out);
        }
        if delta + radius >= 0.0 {
            self.range_recursive(n.right, center, radius, radius_sq, out);
        }
    }

    /// Distance to the `k`-th nearest indexed point (1-based `k`), with an
    /// optional index excluded from consideration.
    pub fn kth_nearest_dist(
        &self,
        center: &[f64],
        k: usize,
        exclude: Option<usize>,
    ) -> Result<f64> {
        if center.len() != self.dim {
            return Err(Error::invalid(format!(
                "query dimension {} does not match index dimension {}",
                center.len(),
                self.dim
            )));
        }
        let available = self.count - usize::from(exclude.is_some());
        if k == 0 || k > available {
            return Err(Error::insufficient(format!(
                "cannot find the {k}-th nearest among {available} candidates"
            )));
        }
        // `best` holds the k smallest squared distances seen so far,
        // ascending; the last entry is the pruning bound once full.
        let mut best: Vec<f64> = Vec::with_capacity(k);
        self.knn_recursive(self.root, center, k, exclude, &mut best);
        Ok(best[k - 1].sqrt())
    }

    fn knn_recursive(
        &self,
        node: i64,
        center: &[f64],
        k: usize,
        exclude: Option<usize>,
        best: &mut Vec<f64>,
    ) {
        if node < 0 {
            return;
        }
        let n = &self.nodes[node as usize];
        let p = self.point(n.point);
        if Some(n.point) != exclude {
            let d2 = crate::cloud::sq_dist(center, p);
            if best.len() < k {
                let pos = best.partition_point(|&b| b <= d2);
                best.insert(pos, d2);
            } else if d2 < best[k - 1] {
                let pos = best.partition_point(|&b| b <= d2);
                best.insert(pos, d2);
                best.pop();
            }
        }
        let delta = center[n.axis] - p[n.axis];
        let (near, far) = if delta <= 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.knn_recursive(near, center, k, exclude, best);
        if best.len() < k || delta * delta <= best[k - 1] {
            self.knn_recursive(far, center, k, exclude, best);
        }
    }
}

fn build_recursive(
    coords: &[f64],
    dim: usize,
    order: &mut [usize],
    nodes: &mut Vec<Node>,
) -> i64 {
    if order.is_empty() {
        return -1;
    }
    // Split on the axis with the largest spread over this subset; for the
    // low-intrinsic-dimension clouds this crate targets, that keeps the
    // tree shallow even in R^60.
    let mut axis = 0;
    let mut best_spread = -1.0;
    for a in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in order.iter() {
            let v = coords[i * dim + a];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo > best_spread {
            best_spread = hi - lo;
            axis = a;
        }
    }
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        coords[a * dim + axis]
            .partial_cmp(&coords[b * dim + axis])
            .unwrap()
    });
    let point = order[mid];
    let id = nodes.len() as i64;
    nodes.push(Node {
        point,
        axis,
        left: -1,
        right: -1,
    });
    let (left_slice, rest) = order.split_at_mut(mid);
    let right_slice = &mut rest[1..];
    let left = build_recursive(coords, dim, left_slice, nodes);
    let right = build_recursive(coords, dim, right_slice, nodes);
    nodes[id as usize].left = left;
    nodes[id as usize].right = right;
    id
}

/// Median with the even-length convention (mean of the two central
/// values). Input need not be sorted.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::insufficient("median of an empty list"));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Per-point distance to the nearest *other* point, in index order.
pub fn nn_distances(cloud: &PointCloud) -> Result<Vec<f64>> {
    if cloud.count() < 2 {
        return Err(Error::insufficient(
            "nearest-neighbor distances need at least 2 points",
        ));
    }
    let index = SpatialIndex::build(cloud);
    (0..cloud.count())
        .map(|i| index.kth_nearest_dist(cloud.point(i), 1, Some(i)))
        .collect()
}

/// Fill distance: median over points of the nearest-other-point distance.
pub fn fill_distance(cloud: &PointCloud) -> Result<f64> {
    if cloud.count() < 2 {
        return Err(Error::insufficient(
            "fill distance needs at least 2 points",
        ));
    }
    median(&nn_distances(cloud)?)
}

/// Smallest grid multiplier `c ∈ {1.0, 1.1, …, 20.0}` such that every
/// `q_i` has at least `ν = ⌊J/I⌋` P-points inside the closed ball of
/// radius `c·h0_p`. Returns `(c, capped)`; `capped` is true when even 20.0
/// fails the guarantee (the cap is returned in that case).
pub fn radius_multiplier_c1(
    p: &PointCloud,
    q: &PointCloud,
    h0_p: f64,
) -> Result<(f64, bool)> {
    if q.count() > p.count() {
        return Err(Error::invalid(format!(
            "Q ({}) may not outnumber P ({})",
            q.count(),
            p.count()
        )));
    }
    if q.ambient_dim() != p.ambient_dim() {
        return Err(Error::invalid("P and Q dimensions differ"));
    }
    if !(h0_p > 0.0 && h0_p.is_finite()) {
        return Err(Error::invalid(format!("fill distance must be positive, got {h0_p}")));
    }
    let nu = p.count() / q.count();
    grid_multiplier(p, q, h0_p, nu, false)
}

/// Shared grid search. When `exclude_self` is set, a Q point coinciding by
/// index with the query is not counted (used for the `h2` rule, where the
/// repulsion sum skips `i = i'`).
fn grid_multiplier(
    p: &PointCloud,
    q: &PointCloud,
    h0: f64,
    nu: usize,
    exclude_self: bool,
) -> Result<(f64, bool)> {
    let index = SpatialIndex::build(p);
    // The smallest admissible c satisfies c·h0 ≥ max_i d_nu(q_i), where
    // d_nu is the distance to the nu-th nearest candidate.
    let mut d_max: f64 = 0.0;
    for i in 0..q.count() {
        let exclude = if exclude_self { Some(i) } else { None };
        let d = index.kth_nearest_dist(q.point(i), nu, exclude)?;
        d_max = d_max.max(d);
    }
    for tenths in 10..=C_GRID_MAX_TENTHS {
        let c = tenths as f64 / 10.0;
        if c * h0 >= d_max {
            return Ok((c, false));
        }
    }
    Ok((20.0, true))
}

/// Computes the full support-size plan for a `(P, Q)` pair.
pub fn make_plan(p: &PointCloud, q: &PointCloud) -> Result<NeighborhoodPlan> {
    if q.ambient_dim() != p.ambient_dim() {
        return Err(Error::invalid("P and Q dimensions differ"));
    }
    if q.count() > p.count() {
        return Err(Error::invalid(format!(
            "Q ({}) may not outnumber P ({})",
            q.count(),
            p.count()
        )));
    }
    let h0_p = fill_distance(p)?;
    let h0_q = fill_distance(q)?;
    let (c1, capped_p) = radius_multiplier_c1(p, q, h0_p)?;
    let (c1q, capped_q) = grid_multiplier(q, q, h0_q, 1, true)?;
    Ok(NeighborhoodPlan {
        h0_p,
        h0_q,
        c1,
        c1q,
        nu: p.count() / q.count(),
        h1: SUPPORT_FACTOR * c1 * h0_p,
        h2: SUPPORT_FACTOR * c1q * h0_q,
        grid_capped: capped_p || capped_q,
    })
}
