//! Hole localization from density structure.
//!
//! The detector classifies points of a quasi-uniform cloud by comparing
//! ball counts at two scales. Let `h02` be the cloud's fill distance
//! (median nearest-neighbor distance). Raw counts at radius `h02` are
//! statistically degenerate — for a generic quasi-uniform cloud the closed
//! `h02`-ball contains one or two points almost surely, and count noise is
//! Poisson-like with relative MAD `≈ 0.675/√count` — so the classifier
//! first escalates the counting radius `r_count` to the smallest integer
//! multiple of `h02` whose median ball count is large enough for a robust
//! deficit rule to beat that noise (median ≥ 25, where `2·MAD` falls below
//! the ~50% deficit of a straight-edge point).
//!
//! With counts `c_i` at `r_count` and two-scale ratios
//! `a_i = #B(q_i, 2·r_count) / #B(q_i, r_count)` (both counts include the
//! point itself), points with a robustly low ratio are marked as manifold
//! boundary and, among the rest, points with a robustly low count become
//! hole-rim candidates. Candidates are cleaned (a rim point needs fellow
//! candidates nearby), clustered by single linkage at the linking radius
//! `max(2·h02, r_count)`, and each cluster is turned into a hole estimate:
//! center = cluster mean, radius = half the maximum pairwise distance.
//!
//! A low count or high ratio only says "empty space nearby" — the rims of
//! the sampled patch itself produce the same signal — so each cluster must
//! pass geometric checks before it is reported as a hole:
//!
//! * **interior emptiness** — a true hole surrounds its center with empty
//!   space, so the ball `B(center, 0.6·radius)` must be (nearly) free of
//!   cloud points. Rim arcs of a disk or the outer rim of an annulus
//!   produce cluster centers inside the populated bulk and fail here.
//! * **in-plane direction** — for a hole punched in a sheet, the direction
//!   from a rim point toward the hole center lies in the sheet's local
//!   tangent plane, so some close neighbor aligns with it (|cos| near 1).
//!   At the open end of a tube the same direction points across the empty
//!   end cap, perpendicular to the wall, and no neighbor aligns. Clusters
//!   whose median alignment is low are rims of the manifold, not holes.
//! * **rim closure** — after overlapping accepted estimates are merged
//!   (the linking radius is tight enough to split one rim into arcs), the
//!   surviving rim must surround its center: the mean unit direction from
//!   the center to the rim points stays short for a genuine rim and long
//!   for a one-sided arc of a manifold edge.
//! * **surround closure** — the same statistic over all cloud points in
//!   the shell `(r, 2r]` around the center: a hole is a void inside the
//!   manifold, so material must appear on all sides; an empty pocket just
//!   past a manifold rim sees the cloud on one side only and is rejected.
//!
//! Rejected clusters are relabeled as manifold boundary, which is exactly
//! what they are. Estimates below the counting resolution (`r_count/2`)
//! are suppressed as indistinguishable from sampling gaps.

use rayon::prelude::*;

use crate::cloud::{dist, PointCloud};
use crate::error::{Error, Result};
use crate::holes::HoleSpec;
use crate::mlop::{run_mlop, OptimizerConfig, RunLog};
use crate::neighborhoods::{fill_distance, median, SpatialIndex};

/// Multiple of `h02` used for the outlier-cleaning and clustering radius.
const LINK_FACTOR: f64 = 2.0;
/// A hole-boundary point needs at least this many fellow hole-boundary
/// points within the linking radius to survive cleaning.
const MIN_HOLE_NEIGHBORS: usize = 2;
/// Minimum number of fellow candidates within the linking radius for a
/// candidate to act as a cluster core. Only cores propagate single-linkage
/// connectivity; border points attach to their nearest core. This keeps
/// one or two stray candidates from chaining distinct rims together, and
/// reduces to plain single linkage when every candidate is core.
const CLUSTER_CORE_MIN: usize = 3;
/// Count threshold offset: hole candidates sit below `median − 2·MAD`.
const COUNT_MAD_FACTOR: f64 = 2.0;
/// Smallest median ball count considered statistically meaningful when
/// choosing the counting radius. For near-Poisson counts the relative MAD
/// is about `0.675/√median`, so a median of 25 is the point where the
/// `median − 2·MAD` cut drops below the ~50% count seen at a straight
/// edge; smaller counts cannot separate edges from noise.
const COUNT_FLOOR: f64 = 25.0;
/// Upper bound on the counting-radius escalation, in multiples of `h02`.
const COUNT_RADIUS_MAX_MULT: usize = 16;
/// Fraction of the estimated radius used for the interior-emptiness check.
const EMPTY_BALL_FACTOR: f64 = 0.6;
/// Upper bound on the rim-closure statistic (norm of the mean unit
/// direction from the center to the rim points). A rim that surrounds its
/// center scores near 0; an arc that sees its center only from one side
/// scores well above this.
const RIM_CLOSURE_MAX: f64 = 0.5;
/// Upper bound on the same statistic measured over all cloud points in
/// the shell `(radius, 2·radius]` around a candidate center. A hole is a
/// void *inside* the manifold, so the shell must hold material on all
/// sides; an empty pocket just outside a manifold rim sees the cloud on
/// one side only.
const SURROUND_CLOSURE_MAX: f64 = 0.5;
/// Neighborhood radius of the in-plane check, in multiples of `r_count`.
const TANGENT_NEIGHBOR_FACTOR: f64 = 1.5;
/// Number of nearest neighbors consulted by the in-plane check. Keeping it
/// small keeps the probe local, where surface curvature is negligible.
const TANGENT_NEIGHBORS: usize = 8;
/// Minimum median |cos| between the hole direction and the best-aligned
/// local neighbor for a cluster to count as an in-sheet hole.
const TANGENT_COS_MIN: f64 = 0.7;

/// Per-point classification of a quasi-uniform cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLabel {
    /// Surrounded on all sides at both scales.
    Interior,
    /// On the boundary of the sampled structure itself.
    ManifoldBoundary,
    /// On the rim of a hole.
    HoleBoundary,
    /// Flagged as a hole candidate but without enough fellow candidates
    /// nearby; ignored downstream.
    Outlier,
}

/// Output of [`classify_points`]: one label per point plus the statistics
/// that produced it.
#[derive(Debug, Clone)]
pub struct Classification {
    /// Per-point label, parallel to the cloud's point order.
    pub labels: Vec<PointLabel>,
    /// Two-scale count ratios `a_i` (≥ 1) at `(r_count, 2·r_count)`.
    pub scores: Vec<f64>,
    /// Ball counts at radius `r_count`, including the point itself.
    pub counts: Vec<usize>,
    /// Fill distance of the classified cloud.
    pub h02: f64,
    /// Counting radius actually used (an integer multiple of `h02`).
    pub r_count: f64,
}

impl Classification {
    /// Indices labeled [`PointLabel::HoleBoundary`], ascending.
    pub fn hole_boundary_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == PointLabel::HoleBoundary)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Number of cloud points within `radius` of each point (inclusive,
/// counting the point itself).
fn ball_counts(q: &PointCloud, index: &SpatialIndex, radius: f64) -> Result<Vec<usize>> {
    (0..q.count())
        .into_par_iter()
        .map(|i| Ok(index.range_query(q.point(i), radius)?.len()))
        .collect()
}

/// Two-scale count ratios `a_i = #B(q_i, 2·h02) / #B(q_i, h02)`. Both
/// counts include the point itself, so isolated points score exactly 1.
pub fn boundary_scores(q: &PointCloud, h02: f64) -> Result<Vec<f64>> {
    if !(h02 > 0.0 && h02.is_finite()) {
        return Err(Error::invalid(format!(
            "h02 must be positive and finite, got {h02}"
        )));
    }
    let index = SpatialIndex::build(q);
    let near = ball_counts(q, &index, h02)?;
    let far = ball_counts(q, &index, 2.0 * h02)?;
    Ok(near
        .iter()
        .zip(&far)
        .map(|(&n, &f)| f as f64 / n as f64)
        .collect())
}

/// Median absolute deviation around a given median.
fn mad(values: &[f64], med: f64) -> Result<f64> {
    let dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    median(&dev)
}

/// Robust scale of the bulk: median absolute deviation among values at or
/// above the median. Boundary points form a low tail of the count
/// distribution; a two-sided MAD absorbs that tail into the scale and
/// dulls the very threshold meant to detect it, so the count cut measures
/// spread on the upper (interior-dominated) side only.
fn upper_mad(values: &[f64], med: f64) -> Result<f64> {
    let dev: Vec<f64> = values
        .iter()
        .filter(|v| **v >= med)
        .map(|v| (v - med).abs())
        .collect();
    median(&dev)
}

/// Cleaning and single-linkage radius: `2·h02`, but never below the
/// counting radius itself. Capping it at `r_count` (rather than
/// `2·r_count`) matters when the radius has escalated: rim bands of
/// *distinct* nearby structures — e.g. the inner and outer rims of a
/// narrow annulus — would otherwise chain into one cluster.
fn linking_radius(h02: f64, r_count: f64) -> f64 {
    f64::max(LINK_FACTOR * h02, r_count)
}

/// Smallest integer multiple of `h02` whose median ball count reaches
/// [`COUNT_FLOOR`], capped at [`COUNT_RADIUS_MAX_MULT`].
fn counting_radius(q: &PointCloud, index: &SpatialIndex, h02: f64) -> Result<f64> {
    for k in 1..=COUNT_RADIUS_MAX_MULT {
        let radius = k as f64 * h02;
        let counts = ball_counts(q, index, radius)?;
        let counts_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        if median(&counts_f)? >= COUNT_FLOOR {
            return Ok(radius);
        }
    }
    Ok(COUNT_RADIUS_MAX_MULT as f64 * h02)
}

/// Labels every point as interior, manifold boundary, hole boundary, or
/// outlier. The base scale `h02` is the cloud's own fill distance; counts
/// are taken at the escalated radius `r_count` (see the module docs).
///
/// Rules, applied in order per point:
/// 1. manifold boundary: `a_i < median(a)` and `a_i < median(a) − MAD(a)`;
/// 2. hole boundary: not rule 1, and either the count falls below
///    `median − 2·MAD` of the counts (deep void) or the ratio rises above
///    `median + 2·MAD` of the ratios — an anomalously empty near field
///    with structure still visible in the far field, the signature of a
///    rim point whose far ball sees across the hole. The ratio form is
///    density-normalized, so it stays sharp where sampling fluctuations
///    blur raw counts;
/// 3. cleaning: hole-boundary points with fewer than 2 other hole-boundary
///    points within the linking radius (evaluated against the pre-cleaning
///    candidate set) become outliers;
/// 4. everything else is interior.
pub fn classify_points(q: &PointCloud) -> Result<Classification> {
    if q.count() < 3 {
        return Err(Error::insufficient(format!(
            "classification needs at least 3 points, got {}",
            q.count()
        )));
    }
    let h02 = fill_distance(q)?;
    let index = SpatialIndex::build(q);
    let r_count = counting_radius(q, &index, h02)?;
    let counts = ball_counts(q, &index, r_count)?;
    let far = ball_counts(q, &index, 2.0 * r_count)?;
    let scores: Vec<f64> = counts
        .iter()
        .zip(&far)
        .map(|(&n, &f)| f as f64 / n as f64)
        .collect();

    let med_a = median(&scores)?;
    let mad_a = mad(&scores, med_a)?;
    let counts_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let med_c = median(&counts_f)?;
    let mad_c = upper_mad(&counts_f, med_c)?;
    let count_cut = med_c - COUNT_MAD_FACTOR * mad_c;

    let score_cut = med_a + COUNT_MAD_FACTOR * mad_a;
    let mut labels: Vec<PointLabel> = scores
        .iter()
        .zip(&counts_f)
        .map(|(&a, &c)| {
            if a < med_a && a < med_a - mad_a {
                PointLabel::ManifoldBoundary
            } else if c < count_cut || a > score_cut {
                PointLabel::HoleBoundary
            } else {
                PointLabel::Interior
            }
        })
        .collect();

    // One-pass cleaning against the pre-cleaning candidate set.
    let candidates: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == PointLabel::HoleBoundary)
        .map(|(i, _)| i)
        .collect();
    let link = linking_radius(h02, r_count);
    for &i in &candidates {
        let fellows = candidates
            .iter()
            .filter(|&&j| j != i && dist(q.point(i), q.point(j)) <= link)
            .count();
        if fellows < MIN_HOLE_NEIGHBORS {
            labels[i] = PointLabel::Outlier;
        }
    }

    Ok(Classification {
        labels,
        scores,
        counts,
        h02,
        r_count,
    })
}

/// Estimates a hole from an explicit set of rim point indices: center =
/// mean, radius = half the maximum pairwise distance. Returns `None` for
/// fewer than 3 points or a degenerate (zero-radius) set.
pub fn estimate_hole_from_indices(q: &PointCloud, indices: &[usize]) -> Option<HoleSpec> {
    if indices.len() < 3 {
        return None;
    }
    let n = q.ambient_dim();
    let mut center = vec![0.0; n];
    for &i in indices {
        for (c, v) in center.iter_mut().zip(q.point(i)) {
            *c += v;
        }
    }
    for c in center.iter_mut() {
        *c /= indices.len() as f64;
    }
    let mut max_pair = 0.0f64;
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            max_pair = max_pair.max(dist(q.point(i), q.point(j)));
        }
    }
    HoleSpec::new(center, 0.5 * max_pair).ok()
}

/// Estimates a single hole from every point labeled hole boundary.
pub fn estimate_hole(q: &PointCloud, classification: &Classification) -> Option<HoleSpec> {
    estimate_hole_from_indices(q, &classification.hole_boundary_indices())
}

/// Result of the full detection pipeline. The labels inside
/// [`Detection::classification`] reflect the cluster validation: rim
/// clusters rejected by the geometric checks are relabeled as manifold
/// boundary, and sub-resolution clusters as outliers.
#[derive(Debug, Clone)]
pub struct Detection {
    /// Detected holes, ordered by the smallest point index in each
    /// supporting cluster.
    pub holes: Vec<HoleSpec>,
    /// The resampled cloud the classification ran on.
    pub q: PointCloud,
    /// Per-point labels and statistics for `q`.
    pub classification: Classification,
    /// Log of the resampling run.
    pub log: RunLog,
}

/// Minimal union-find over `0..n` with path compression.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Median over a cluster of the best local alignment between the hole
/// direction (rim point → cluster center) and the directions to the
/// nearest neighbors. Near 1 for a hole in a sheet, near 0 across the
/// mouth of a tube.
fn in_plane_alignment(
    q: &PointCloud,
    index: &SpatialIndex,
    members: &[usize],
    center: &[f64],
    r_count: f64,
) -> Result<f64> {
    let mut per_point = Vec::with_capacity(members.len());
    for &i in members {
        let y = q.point(i);
        let u: Vec<f64> = center.iter().zip(y).map(|(c, v)| c - v).collect();
        let u_norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if u_norm == 0.0 {
            continue; // rim point at the centroid carries no direction
        }
        let mut neighbors = index.range_query(y, TANGENT_NEIGHBOR_FACTOR * r_count)?;
        neighbors.retain(|&j| j != i);
        neighbors.sort_by(|&a, &b| {
            dist(q.point(a), y)
                .total_cmp(&dist(q.point(b), y))
                .then(a.cmp(&b))
        });
        neighbors.truncate(TANGENT_NEIGHBORS);
        let mut best = 0.0f64;
        for &j in &neighbors {
            let x = q.point(j);
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let d_norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if d_norm == 0.0 {
                continue;
            }
            let cosine = u
                .iter()
                .zip(&d)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .abs()
                / (u_norm * d_norm);
            best = best.max(cosine);
        }
        per_point.push(best);
    }
    if per_point.is_empty() {
        return Ok(0.0);
    }
    median(&per_point)
}

/// Norm of the mean unit direction from `center` to the given points:
/// near 0 when the points surround the center, near 1 when they all lie
/// to one side. Returns 1 for an empty (or all-coincident) set.
fn direction_closure(q: &PointCloud, indices: &[usize], center: &[f64]) -> f64 {
    let n = q.ambient_dim();
    let mut acc = vec![0.0; n];
    let mut used = 0usize;
    for &i in indices {
        let y = q.point(i);
        let d: Vec<f64> = y.iter().zip(center).map(|(v, c)| v - c).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(&d) {
            *a += v / norm;
        }
        used += 1;
    }
    if used == 0 {
        return 1.0;
    }
    acc.iter().map(|v| v * v).sum::<f64>().sqrt() / used as f64
}

/// Closure of the cloud shell `(radius, 2·radius]` around a candidate
/// center: low when the manifold surrounds the candidate hole.
fn surround_closure(
    q: &PointCloud,
    index: &SpatialIndex,
    center: &[f64],
    radius: f64,
) -> Result<f64> {
    let mut shell = index.range_query(center, 2.0 * radius)?;
    let inner: Vec<usize> = index.range_query(center, radius)?;
    shell.retain(|i| !inner.contains(i));
    Ok(direction_closure(q, &shell, center))
}

/// Full pipeline: resample `p` with the plain optimizer, classify the
/// result, single-linkage-cluster the hole-boundary points at
/// `2·r_count`, estimate one hole per cluster, and validate each cluster
/// geometrically (interior emptiness and in-plane direction; see the
/// module docs). Sub-resolution estimates (radius < `h02`) are
/// suppressed.
pub fn detect_holes(p: &PointCloud, config: &OptimizerConfig) -> Result<Detection> {
    let (q, log) = run_mlop(p, config)?;
    let mut classification = classify_points(&q)?;
    let rim = classification.hole_boundary_indices();
    let link = linking_radius(classification.h02, classification.r_count);

    // Core-gated single linkage: adjacency among candidates, cores union,
    // borders attach to their nearest core.
    let mut fellows: Vec<Vec<usize>> = vec![Vec::new(); rim.len()];
    for a in 0..rim.len() {
        for b in a + 1..rim.len() {
            if dist(q.point(rim[a]), q.point(rim[b])) <= link {
                fellows[a].push(b);
                fellows[b].push(a);
            }
        }
    }
    let core: Vec<bool> = fellows.iter().map(|f| f.len() >= CLUSTER_CORE_MIN).collect();
    let mut uf = UnionFind::new(rim.len());
    for a in 0..rim.len() {
        if !core[a] {
            continue;
        }
        for &b in &fellows[a] {
            if core[b] {
                uf.union(a, b);
            }
        }
    }
    for a in 0..rim.len() {
        if core[a] {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for &b in &fellows[a] {
            if !core[b] {
                continue;
            }
            let d = dist(q.point(rim[a]), q.point(rim[b]));
            let better = match best {
                None => true,
                Some((bd, bi)) => d < bd || (d == bd && rim[b] < rim[bi]),
            };
            if better {
                best = Some((d, b));
            }
        }
        if let Some((_, b)) = best {
            uf.union(a, b);
        }
    }
    // Group members by root; clusters come out ordered by their smallest
    // point index because `rim` is ascending and roots are minimal members.
    let mut clusters: Vec<(usize, Vec<usize>)> = Vec::new();
    for a in 0..rim.len() {
        let root = uf.find(a);
        match clusters.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(rim[a]),
            None => clusters.push((root, vec![rim[a]])),
        }
    }

    let index = SpatialIndex::build(&q);
    let mut accepted: Vec<(Vec<usize>, HoleSpec)> = Vec::new();
    for (_, members) in &clusters {
        let Some(candidate) = estimate_hole_from_indices(&q, members) else {
            // Too few or degenerate rim points: drop them as outliers.
            for &i in members {
                classification.labels[i] = PointLabel::Outlier;
            }
            continue;
        };
        // Sub-resolution suppression: the counting radius is the scale at
        // which counts carry signal, so estimates smaller than half of it
        // are indistinguishable from sampling gaps.
        if candidate.radius < classification.h02.max(0.5 * classification.r_count) {
            for &i in members {
                classification.labels[i] = PointLabel::Outlier;
            }
            continue;
        }
        // Interior emptiness: a genuine hole keeps the heart of its
        // bounding ball free of cloud points (a couple of strays from the
        // resampling pass are tolerated).
        let interior = index
            .range_query(&candidate.center, EMPTY_BALL_FACTOR * candidate.radius)?
            .len();
        let stray_budget = (members.len() / 5).max(3);
        if interior > stray_budget {
            for &i in members {
                classification.labels[i] = PointLabel::ManifoldBoundary;
            }
            continue;
        }
        // In-plane direction: hole rims point along the sheet, manifold
        // mouths point across empty space.
        let alignment = in_plane_alignment(
            &q,
            &index,
            members,
            &candidate.center,
            classification.r_count,
        )?;
        if alignment < TANGENT_COS_MIN {
            for &i in members {
                classification.labels[i] = PointLabel::ManifoldBoundary;
            }
            continue;
        }
        accepted.push((members.clone(), candidate));
    }

    // The tight linking radius can split one rim into a few arcs; arcs of
    // the same hole produce overlapping estimates, so merge those and
    // re-estimate. Genuinely distinct holes keep disjoint balls.
    let mut merged = true;
    while merged {
        merged = false;
        'scan: for a in 0..accepted.len() {
            for b in a + 1..accepted.len() {
                let overlap = dist(&accepted[a].1.center, &accepted[b].1.center)
                    < accepted[a].1.radius + accepted[b].1.radius;
                if overlap {
                    let (members_b, _) = accepted.remove(b);
                    accepted[a].0.extend(members_b);
                    accepted[a].0.sort_unstable();
                    if let Some(h) = estimate_hole_from_indices(&q, &accepted[a].0) {
                        accepted[a].1 = h;
                    }
                    merged = true;
                    break 'scan;
                }
            }
        }
    }

    // Closure gates, after merging so that arcs of one rim are judged as a
    // whole: the rim must surround its center (a stray arc of a manifold
    // edge does not), and the cloud itself must surround the hole at the
    // next larger scale (an empty pocket outside a rim does not).
    let mut holes = Vec::new();
    for (members, hole) in accepted {
        let rim_c = direction_closure(&q, &members, &hole.center);
        let shell_c = surround_closure(&q, &index, &hole.center, hole.radius)?;
        if rim_c > RIM_CLOSURE_MAX || shell_c > SURROUND_CLOSURE_MAX {
            for &i in &members {
                classification.labels[i] = PointLabel::ManifoldBoundary;
            }
            continue;
        }
        holes.push(hole);
    }

    Ok(Detection {
        holes,
        q,
        classification,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;
    use crate::synth::{generate, GeneratorSpec, SurfaceKind};

    #[test]
    fn isolated_point_scores_one() {
        let cloud = PointCloud::from_rows(&[
            vec![0.0],
            vec![0.1],
            vec![0.2],
            vec![0.3],
            vec![10.0],
        ])
        .unwrap();
        let scores = boundary_scores(&cloud, 0.1).unwrap();
        assert_eq!(scores[4], 1.0);
        // Middle of the chain: 3 points within 0.1, 4 within 0.2.
        assert_eq!(scores[1], 4.0 / 3.0);
    }

    #[test]
    fn one_dimensional_grid_scores_match_exact_counts() {
        // Spacing-1 grid: an interior point sees 3 points within h and 5
        // within 2h; an endpoint sees 2 and 3.
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let scores = boundary_scores(&cloud, 1.0).unwrap();
        for (i, &s) in scores.iter().enumerate() {
            if i == 0 || i == 11 {
                assert_eq!(s, 3.0 / 2.0, "endpoint {i}");
            } else if i == 1 || i == 10 {
                // One in from the end: 3 within h, 4 within 2h.
                assert_eq!(s, 4.0 / 3.0, "near-endpoint {i}");
            } else {
                assert_eq!(s, 5.0 / 3.0, "interior {i}");
            }
        }
    }

    #[test]
    fn scores_equal_brute_force_ball_counts() {
        let mut rng = DeterministicRng::new(41, 0);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)])
            .collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let h02 = 0.3;
        let scores = boundary_scores(&cloud, h02).unwrap();
        for (i, a) in rows.iter().enumerate() {
            let count_at = |r: f64| rows.iter().filter(|b| dist(a, b) <= r).count();
            let want = count_at(2.0 * h02) as f64 / count_at(h02) as f64;
            assert_eq!(scores[i], want, "point {i}");
        }
    }

    #[test]
    fn classification_is_permutation_equivariant() {
        let mut rng = DeterministicRng::new(17, 0);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.uniform_in(0.0, 2.0), rng.uniform_in(0.0, 2.0)])
            .collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let forward = classify_points(&cloud).unwrap();
        let mut reversed_rows = rows.clone();
        reversed_rows.reverse();
        let backward = classify_points(&PointCloud::from_rows(&reversed_rows).unwrap()).unwrap();
        assert_eq!(forward.r_count, backward.r_count);
        for i in 0..rows.len() {
            assert_eq!(forward.labels[i], backward.labels[rows.len() - 1 - i]);
            assert_eq!(forward.scores[i], backward.scores[rows.len() - 1 - i]);
        }
    }

    #[test]
    fn classify_needs_three_points() {
        let cloud = PointCloud::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(classify_points(&cloud).is_err());
    }

    #[test]
    fn counting_radius_escalation_is_exact_on_a_lattice() {
        // On a 30×30 unit lattice the closed ball of radius k holds
        // #{(x,y) : x²+y² ≤ k²} points for interior sites: 5 at k=1,
        // 13 at k=2, 29 at k=3. Interior sites are the majority, so the
        // median crosses the floor of 25 exactly at k=3.
        let rows: Vec<Vec<f64>> = (0..900)
            .map(|i| vec![(i % 30) as f64, (i / 30) as f64])
            .collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let c = classify_points(&cloud).unwrap();
        assert_eq!(c.h02, 1.0);
        assert_eq!(c.r_count, 3.0);
        let center = rows
            .iter()
            .position(|r| r == &vec![15.0, 15.0])
            .unwrap();
        assert_eq!(c.counts[center], 29);
    }

    #[test]
    fn hole_estimates_from_handcrafted_rims() {
        // Unit square: center at its middle, radius = half diagonal.
        let square = PointCloud::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let hole = estimate_hole_from_indices(&square, &[0, 1, 2, 3]).unwrap();
        assert_eq!(hole.center, vec![0.5, 0.5]);
        assert!((hole.radius - 2f64.sqrt() / 2.0).abs() < 1e-15);
        // Three collinear points 0, 1, 2.
        let line = PointCloud::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let hole = estimate_hole_from_indices(&line, &[0, 1, 2]).unwrap();
        assert_eq!(hole.center, vec![1.0]);
        assert_eq!(hole.radius, 1.0);
        // Fewer than three rim points → no hole.
        assert!(estimate_hole_from_indices(&line, &[0, 1]).is_none());
        // Coincident points → degenerate → no hole.
        let dup = PointCloud::from_rows(&[vec![0.0], vec![0.0], vec![0.0]]).unwrap();
        assert!(estimate_hole_from_indices(&dup, &[0, 1, 2]).is_none());
    }

    #[test]
    fn filled_disk_yields_no_holes() {
        let p = generate(&GeneratorSpec::clean(
            SurfaceKind::Disk {
                radius: 4.0,
                ambient: 2,
            },
            600,
            23,
        ))
        .unwrap();
        let mut config = OptimizerConfig::new(250);
        config.max_iters = 3;
        config.seed = 23;
        config.log_every = 10;
        let detection = detect_holes(&p, &config).unwrap();
        assert!(
            detection.holes.is_empty(),
            "spurious holes: {:?}",
            detection.holes
        );
    }

    #[test]
    fn annulus_hole_is_found_near_the_true_center() {
        let inner = 1.4;
        let p = generate(&GeneratorSpec::clean(
            SurfaceKind::Annulus {
                inner,
                outer: 4.0,
                ambient: 2,
            },
            700,
            31,
        ))
        .unwrap();
        let mut config = OptimizerConfig::new(280);
        config.max_iters = 3;
        config.seed = 31;
        config.log_every = 10;
        let detection = detect_holes(&p, &config).unwrap();
        assert_eq!(detection.holes.len(), 1, "holes: {:?}", detection.holes);
        let hole = &detection.holes[0];
        let center_err = hole.center.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(
            center_err < 0.5 * inner,
            "center {:?} too far from origin",
            hole.center
        );
        assert!(
            hole.radius >= 0.5 * inner && hole.radius <= 2.0 * inner,
            "radius {} outside [{}, {}]",
            hole.radius,
            0.5 * inner,
            2.0 * inner
        );
        // Rim points hug the true inner circle: the flagged band scales
        // with the counting radius, the resolution of the detector.
        let band = 0.75 * detection.classification.r_count;
        for &i in &detection.classification.hole_boundary_indices() {
            let pt = detection.q.point(i);
            let rho = pt[0].hypot(pt[1]);
            assert!(
                (rho - inner).abs() <= band,
                "rim point at radius {rho}, inner {inner}, band {band}"
            );
        }
        // Determinism of the whole pipeline.
        let again = detect_holes(&p, &config).unwrap();
        assert_eq!(again.holes.len(), 1);
        assert_eq!(again.holes[0].center, hole.center);
        assert_eq!(again.holes[0].radius, hole.radius);
    }

    #[test]
    fn punched_plane_hole_is_recovered() {
        let hole = HoleSpec::new(vec![4.0, 4.0], 1.2).unwrap();
        let mut spec = GeneratorSpec::clean(
            SurfaceKind::PlanePatch {
                width: 8.0,
                height: 8.0,
                ambient: 2,
            },
            700,
            37,
        );
        spec.holes = vec![hole.clone()];
        let p = generate(&spec).unwrap();
        let mut config = OptimizerConfig::new(280);
        config.max_iters = 3;
        config.seed = 37;
        config.log_every = 10;
        let detection = detect_holes(&p, &config).unwrap();
        assert_eq!(detection.holes.len(), 1, "holes: {:?}", detection.holes);
        let found = &detection.holes[0];
        let center_err = found
            .center
            .iter()
            .zip(&hole.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(
            center_err < 0.5 * hole.radius,
            "center {:?} vs true {:?}",
            found.center,
            hole.center
        );
        assert!(
            found.radius >= 0.5 * hole.radius && found.radius <= 2.0 * hole.radius,
            "radius {} vs true {}",
            found.radius,
            hole.radius
        );
    }

    #[test]
    fn open_sheet_rims_are_manifold_not_hole() {
        let p = generate(&GeneratorSpec::clean(SurfaceKind::cylinder2d_default(), 400, 29))
            .unwrap();
        let mut config = OptimizerConfig::new(160);
        config.max_iters = 3;
        config.seed = 29;
        config.log_every = 10;
        let detection = detect_holes(&p, &config).unwrap();
        assert!(
            detection.holes.is_empty(),
            "sheet rims misread as holes: {:?}",
            detection.holes
        );
        // The two rims sit at the extremes of the axis coordinate
        // Σx/√n ∈ [0, 2√n]. Some rim points must carry the manifold
        // boundary label, and boundary labels must concentrate near the
        // rims rather than scatter over the interior.
        let n = 60.0f64;
        let hi = 2.0 * n.sqrt();
        let rim_band = 1.5 * detection.classification.r_count;
        let axis: Vec<f64> = detection
            .q
            .iter_points()
            .map(|pt| pt.iter().sum::<f64>() / n.sqrt())
            .collect();
        let boundary: Vec<usize> = (0..detection.q.count())
            .filter(|&i| detection.classification.labels[i] == PointLabel::ManifoldBoundary)
            .collect();
        assert!(
            boundary.len() >= 5,
            "no meaningful boundary set: {}",
            boundary.len()
        );
        let near_rims = boundary
            .iter()
            .filter(|&&i| axis[i] <= rim_band || axis[i] >= hi - rim_band)
            .count();
        assert!(
            near_rims * 5 >= boundary.len() * 3,
            "only {near_rims}/{} boundary labels near the rims",
            boundary.len()
        );
    }
}
