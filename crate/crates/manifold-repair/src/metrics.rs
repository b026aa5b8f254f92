//! Quantitative evaluation of resampled clouds: quasi-uniformity,
//! density profile, distance to a ground-truth surface, hole coverage,
//! and the approximation-order sweep.
//!
//! Hole coverage estimates the largest empty ball inside a hole. Exact
//! largest-empty-ball computation is infeasible in high ambient dimension,
//! so the estimate probes a seeded sample of points constructed from the
//! cloud itself: convex combinations of points collaring the hole, clipped
//! into the shrunken ball `B(c, 0.9r)`. Probes derived from nearby points
//! stay close to the sampled structure, which keeps the measure meaningful
//! when the cloud lives on a low-dimensional subset of `R^n`. All metrics
//! are invariant under permutations of the input point order.

use serde::{Deserialize, Serialize};

use crate::cloud::{dist, PointCloud};
use crate::error::{Error, Result};
use crate::holes::HoleSpec;
use crate::mlop::{run_mlop, OptimizerConfig, RunLog};
use crate::neighborhoods::{fill_distance, make_plan, median, nn_distances, SpatialIndex};
use crate::rng::{DeterministicRng, STREAM_PROBES};
use crate::synth::{generate, GeneratorSpec, SurfaceKind};

/// Fixed probe seed: coverage figures stay comparable across runs
/// regardless of the run seed.
const PROBE_SEED: u64 = 424_242;
/// Probe count per unit of `grid_density`.
const PROBES_PER_DENSITY: usize = 10;
/// Probes and the coverage value live inside `B(c, BALL_SHRINK·r)`.
const BALL_SHRINK: f64 = 0.9;
/// Collar radius: points within `r + COLLAR_H2_FACTOR·h2` of the center
/// seed the probe construction.
const COLLAR_H2_FACTOR: f64 = 2.0;
/// Maximum number of points per convex combination.
const MAX_COMBO: usize = 4;
/// Distances are clamped to this floor before taking logarithms in the
/// order-sweep fit.
const LOG_FLOOR: f64 = 1e-16;

/// Summary statistics of point-to-surface distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistToTruth {
    /// Median distance over the cloud.
    pub median: f64,
    /// Maximum distance over the cloud.
    pub max: f64,
}

/// The standard evaluation report for a (possibly optimized) cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Median nearest-neighbor distance of the cloud.
    pub fill_distance_q: f64,
    /// Max nearest-neighbor distance divided by the median (≥ 1).
    pub nn_ratio: f64,
    /// Distance-to-truth statistics, when a surface oracle was declared.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dist_to_truth: Option<DistToTruth>,
    /// Largest-empty-ball estimate per declared hole.
    pub hole_coverage: Vec<f64>,
    /// Mean count of cloud points in balls of radius `k·h0`, `k = 1..4`.
    pub density_profile: Vec<f64>,
    /// Median gradient norm per logged iteration, when a run log exists.
    pub grad_norm_history: Vec<f64>,
    /// Number of points frozen for lack of attraction support.
    pub starved_point_count: usize,
    /// Warnings accumulated by the run, if any.
    pub warnings: Vec<String>,
}

impl MetricsReport {
    /// Checks the report invariant: every numeric field finite and
    /// nonnegative.
    pub fn validate(&self) -> Result<()> {
        let mut values = vec![self.fill_distance_q, self.nn_ratio];
        if let Some(d) = &self.dist_to_truth {
            values.push(d.median);
            values.push(d.max);
        }
        values.extend_from_slice(&self.hole_coverage);
        values.extend_from_slice(&self.density_profile);
        values.extend_from_slice(&self.grad_norm_history);
        for v in values {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!(
                    "metrics report contains a non-finite or negative value: {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Fill distance (median nearest-neighbor distance) and quasi-uniformity
/// ratio (max NN distance / median NN distance) of a cloud.
pub fn quasi_uniformity(q: &PointCloud) -> Result<(f64, f64)> {
    let nn = nn_distances(q)?;
    let fill = median(&nn)?;
    if !(fill > 0.0) {
        return Err(Error::insufficient(
            "median nearest-neighbor distance is zero (duplicate-heavy cloud)",
        ));
    }
    let max = nn.iter().copied().fold(0.0f64, f64::max);
    Ok((fill, max / fill))
}

/// Mean number of cloud points (including the center) in balls of radius
/// `k·h0` around each point, for `k = 1..4`.
pub fn density_profile(q: &PointCloud, h0: f64) -> Result<[f64; 4]> {
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::invalid(format!(
            "density profile radius must be positive and finite, got {h0}"
        )));
    }
    let index = SpatialIndex::build(q);
    let mut profile = [0.0; 4];
    for (k, slot) in profile.iter_mut().enumerate() {
        let radius = (k + 1) as f64 * h0;
        let mut total = 0usize;
        for pt in q.iter_points() {
            total += index.range_query(pt, radius)?.len();
        }
        *slot = total as f64 / q.count() as f64;
    }
    Ok(profile)
}

/// Median and maximum distance from cloud points to the given surface.
pub fn dist_to_truth_stats(q: &PointCloud, kind: &SurfaceKind) -> Result<DistToTruth> {
    let dists: Vec<f64> = q
        .iter_points()
        .map(|p| kind.surface_distance(p))
        .collect::<Result<_>>()?;
    Ok(DistToTruth {
        median: median(&dists)?,
        max: dists.iter().copied().fold(0.0f64, f64::max),
    })
}

/// Largest-empty-ball estimate inside a hole: the maximum, over a seeded
/// set of `10·grid_density` probe points in `B(center, 0.9·radius)`, of
/// the distance to the nearest cloud point, capped at `0.9·radius`.
/// Smaller values mean a better-repaired hole.
///
/// Probes are the hole center plus convex combinations of 2–4 collar
/// points (cloud points within `radius + 2·h2` of the center), radially
/// clipped into the shrunken ball. Collar points are ordered by distance
/// to the center (ties broken by coordinates), so the result does not
/// depend on the cloud's point order. An empty collar yields the cap
/// `0.9·radius`.
pub fn hole_coverage(
    q: &PointCloud,
    hole: &HoleSpec,
    grid_density: usize,
    h2: f64,
) -> Result<f64> {
    hole.validate(Some(q.ambient_dim()))?;
    if grid_density == 0 {
        return Err(Error::invalid("grid_density must be at least 1"));
    }
    if !(h2 > 0.0 && h2.is_finite()) {
        return Err(Error::invalid(format!(
            "h2 must be positive and finite, got {h2}"
        )));
    }
    let cap = BALL_SHRINK * hole.radius;
    let index = SpatialIndex::build(q);
    let collar_idx = index.range_query(&hole.center, hole.radius + COLLAR_H2_FACTOR * h2)?;
    if collar_idx.is_empty() {
        return Ok(cap);
    }
    // Canonical geometric order: by distance to the center, then by
    // coordinates. Identical points are interchangeable, so this makes the
    // probe set a function of the point multiset alone.
    let mut collar: Vec<&[f64]> = collar_idx.iter().map(|&i| q.point(i)).collect();
    collar.sort_by(|a, b| {
        dist(a, &hole.center)
            .total_cmp(&dist(b, &hole.center))
            .then_with(|| {
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });

    let mut rng = DeterministicRng::new(PROBE_SEED, STREAM_PROBES);
    let n_probes = PROBES_PER_DENSITY * grid_density;
    let mut worst = 0.0f64;
    let mut probe = hole.center.clone();
    for p in 0..n_probes {
        if p > 0 {
            // Per probe: combination size, then member indices, then
            // weights — in that order from the probe stream.
            let k_max = MAX_COMBO.min(collar.len());
            let k = if k_max == 1 {
                1
            } else {
                2 + (rng.next_u64() as usize % (k_max - 1))
            };
            let members = rng.sample_indices(collar.len(), k);
            let weights: Vec<f64> = (0..k).map(|_| rng.uniform()).collect();
            let total: f64 = weights.iter().sum();
            for v in probe.iter_mut() {
                *v = 0.0;
            }
            for (m, w) in members.iter().zip(&weights) {
                let share = if total > 1e-12 { w / total } else { 1.0 / k as f64 };
                for (v, x) in probe.iter_mut().zip(collar[*m]) {
                    *v += share * x;
                }
            }
            let d = dist(&probe, &hole.center);
            if d > cap {
                let scale = cap / d;
                for (v, c) in probe.iter_mut().zip(&hole.center) {
                    *v = c + scale * (*v - c);
                }
            }
        }
        worst = worst.max(index.kth_nearest_dist(&probe, 1, None)?);
    }
    Ok(worst.min(cap))
}

/// One row of the approximation-order sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Input sample size.
    pub j: usize,
    /// Fill distance of the generated input cloud.
    pub h0: f64,
    /// Maximum distance from the optimized cloud to the true surface.
    pub max_dist: f64,
}

/// Result of [`approximation_order_sweep`]: the per-J rows and the fitted
/// log-log slope of `max_dist` against `h0` (`None` when all `h0` values
/// coincide and no slope is defined).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// One row per requested sample size, in input order.
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln max_dist` vs `ln h0`.
    pub slope: Option<f64>,
}

/// Measures how the optimized cloud's distance to the true surface scales
/// with the input fill distance: for each `J` it generates a noise-free
/// sample, runs the optimizer with `I = J/2` points for `iters`
/// iterations, and records `(h0, max distance to truth)`.
pub fn approximation_order_sweep(
    kind: &SurfaceKind,
    j_list: &[usize],
    iters: usize,
    seed: u64,
) -> Result<SweepResult> {
    if j_list.is_empty() {
        return Err(Error::invalid("the sweep needs at least one sample size"));
    }
    if iters == 0 {
        return Err(Error::invalid("the sweep needs at least one iteration"));
    }
    let mut rows = Vec::with_capacity(j_list.len());
    for &j in j_list {
        if j < 4 {
            return Err(Error::invalid(format!(
                "sweep sample size must be at least 4, got {j}"
            )));
        }
        let p = generate(&GeneratorSpec::clean(kind.clone(), j, seed))?;
        let h0 = fill_distance(&p)?;
        let mut config = OptimizerConfig::new(j / 2);
        config.max_iters = iters;
        config.seed = seed;
        config.log_every = iters;
        let (q, _log) = run_mlop(&p, &config)?;
        let stats = dist_to_truth_stats(&q, kind)?;
        rows.push(SweepRow {
            j,
            h0,
            max_dist: stats.max,
        });
    }
    Ok(SweepResult {
        slope: fit_loglog_slope(&rows),
        rows,
    })
}

/// Least-squares slope of `ln max_dist` against `ln h0`; `None` when the
/// `h0` values have no spread.
fn fit_loglog_slope(rows: &[SweepRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.h0.max(LOG_FLOOR).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.max_dist.max(LOG_FLOOR).ln()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx < 1e-30 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Some(sxy / sxx)
}

/// Assembles the full report for a cloud. `h2` scales the hole-coverage
/// collar; when absent it is derived from the cloud's own neighborhood
/// plan. `log` supplies the gradient history and starvation count when the
/// cloud came out of an optimizer run.
pub fn compute_report(
    q: &PointCloud,
    oracle: Option<&SurfaceKind>,
    holes: &[HoleSpec],
    grid_density: usize,
    h2: Option<f64>,
    log: Option<&RunLog>,
) -> Result<MetricsReport> {
    let (fill, ratio) = quasi_uniformity(q)?;
    let h2_val = match h2 {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => {
            return Err(Error::invalid(format!(
                "h2 must be positive and finite, got {v}"
            )))
        }
        None => make_plan(q, q)?.h2,
    };
    let hole_cov: Vec<f64> = holes
        .iter()
        .map(|h| hole_coverage(q, h, grid_density, h2_val))
        .collect::<Result<_>>()?;
    let dist_stats = oracle.map(|k| dist_to_truth_stats(q, k)).transpose()?;
    let report = MetricsReport {
        fill_distance_q: fill,
        nn_ratio: ratio,
        dist_to_truth: dist_stats,
        hole_coverage: hole_cov,
        density_profile: density_profile(q, fill)?.to_vec(),
        grad_norm_history: log
            .map(|l| l.records.iter().map(|r| r.median_grad_norm).collect())
            .unwrap_or_default(),
        starved_point_count: log.map(|l| l.starved_points).unwrap_or(0),
        warnings: log.map(|l| l.warnings.clone()).unwrap_or_default(),
    };
    report.validate()?;
    Ok(report)
}
