//! The repairing optimizer: resampling plus hole filling.
//!
//! Points near a known hole get a weight `τ̄_i ∈ [0, 1]` (1 at the hole
//! center, 0 far away). The update direction per point becomes
//!
//! ```text
//! g_i = (1 − τ̄_i)·c1·attraction_i − c2·repulsion_i + τ̄_i·c3·e3_i
//! ```
//!
//! where `e3_i = 2·[Σ_{i'≠i} (q_i − q_{i'})·ŵ]·[Σ_{i'≠i} (1 − 2r²/h2²)·ŵ]`
//! is the hole-filling term: the bracketed scalar is the sum of the profile
//! `b(r) = (1 − 2r²/h2²)·exp(−r²/h2²)`, negative once neighbors sit beyond
//! `h2/√2`, which flips the Laplacian-style mean-shift vector so rim points
//! step *into* the hole. The underlying scalar energy is
//!
//! ```text
//! E3 = Σ_{i'} τ̄_{i'} · ‖ q_{i'}·Σ_{i≠i'} ŵ − Σ_{i≠i'} ŵ·q_i ‖²
//! ```
//!
//! (both sums over the other points; see `e3_value` and its graph-Laplacian
//! twin `e3_value_laplacian`, which agree to machine precision). The update
//! direction above is not the exact gradient of `E3` away from degenerate
//! configurations — it drops the curvature of the weights — but it is exact
//! on collinear configurations, which the tests exploit.
//!
//! The constants `c_k` are chosen once, after the first repair iteration,
//! as `c_k = 1 / median_i ‖∂E_k/∂q_i‖`, so no term dominates; points with
//! `τ̄ > 1 − eps_nb` (deep inside the hole's influence) take quarter-length
//! steps for stability.

use std::time::Instant;

use rayon::prelude::*;

use crate::cloud::{self, PointCloud};
use crate::error::{Error, Result};
use crate::holes::{validate_holes, HoleSpec};
use crate::kernels::{b_profile, gaussian_weight, KernelParams};
use crate::metrics::hole_coverage;
use crate::mlop::{
    apply_update, init_q, mlop_iterate, push_record, run_mlop, Engine, IterationStats,
    OptimizerConfig, OptimizerState, RunLog,
};
use crate::neighborhoods::{median, SpatialIndex};
use crate::rng::{DeterministicRng, STREAM_INIT_Q};

/// Default threshold band: points with `τ̄ > 1 − eps_nb` count as inside
/// the hole's ε-neighborhood.
pub const DEFAULT_EPS_NB: f64 = 0.1;
/// Step-length factor applied to ε-neighborhood points.
pub const HOLE_STEP_FACTOR: f64 = 0.25;
/// Default iteration budget of the plain resampling pre-pass.
pub const DEFAULT_PREPASS_ITERS: usize = 30;
/// Default probe density for the per-iteration coverage metric.
pub const DEFAULT_COVERAGE_GRID_DENSITY: usize = 20;

/// Per-point hole weights.
#[derive(Debug, Clone)]
pub struct RepairWeights {
    /// Min–max normalized weights, one per `Q` point, frozen for the run.
    pub tau_bar: Vec<f64>,
    /// ε-neighborhood band parameter.
    pub eps_nb: f64,
    /// True when the raw weights were constant and normalization was
    /// impossible (all τ̄ set to 0).
    pub degenerate: bool,
}

impl RepairWeights {
    /// Whether point `i` lies in the ε-neighborhood of a hole.
    pub fn in_hole_band(&self, i: usize) -> bool {
        self.tau_bar[i] > 1.0 - self.eps_nb
    }
}

/// Term-balancing constants fixed after the first repair iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceConstants {
    /// Attraction constant.
    pub c1: f64,
    /// Repulsion constant.
    pub c2: f64,
    /// Hole-filling constant.
    pub c3: f64,
}

/// Settings for a repair run.
#[derive(Debug, Clone)]
pub struct RepairConfig {
    /// Settings shared with the plain optimizer (`max_iters` counts repair
    /// iterations only).
    pub base: OptimizerConfig,
    /// Run a plain resampling pre-pass before computing hole weights.
    pub prepass: bool,
    /// Pre-pass iteration budget.
    pub prepass_iters: usize,
    /// ε-neighborhood band parameter.
    pub eps_nb: f64,
    /// Use the literal constant rule `c_k = median‖∂E_k‖` instead of its
    /// reciprocal.
    pub literal_ck: bool,
    /// Multi-hole weights: normalize per hole before multiplying instead of
    /// normalizing the product once.
    pub literal_multihole: bool,
    /// Probe density for the per-iteration coverage metric.
    pub coverage_grid_density: usize,
}

impl RepairConfig {
    /// Defaults: pre-pass on (30 iterations), eps_nb 0.1, product weights,
    /// reciprocal constants.
    pub fn new(base: OptimizerConfig) -> Self {
        RepairConfig {
            base,
            prepass: true,
            prepass_iters: DEFAULT_PREPASS_ITERS,
            eps_nb: DEFAULT_EPS_NB,
            literal_ck: false,
            literal_multihole: false,
            coverage_grid_density: DEFAULT_COVERAGE_GRID_DENSITY,
        }
    }

    fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.eps_nb > 0.0 && self.eps_nb < 1.0) {
            return Err(Error::invalid(format!(
                "eps_nb must lie in (0, 1), got {}",
                self.eps_nb
            )));
        }
        if self.coverage_grid_density == 0 {
            return Err(Error::invalid("coverage_grid_density must be at least 1"));
        }
        Ok(())
    }
}

/// The raw gradient rows of each energy term for one iteration
/// (τ̄ factors included, balancing constants not yet applied).
#[derive(Debug, Clone)]
pub struct TermMatrices {
    /// Rows `(1 − τ̄_i)·attraction_i`, flattened `I×n`.
    pub t1: Vec<f64>,
    /// Rows `repulsion_i`.
    pub t2: Vec<f64>,
    /// Rows `τ̄_i·e3_i`.
    pub t3: Vec<f64>,
}

/// Result bundle of a repair run.
#[derive(Debug, Clone)]
pub struct RepairOutcome {
    /// Final positions.
    pub q: PointCloud,
    /// Run log (pre-pass and repair phases; see `repair_phase_start`).
    pub log: RunLog,
    /// The frozen hole weights (absent when no holes were given and the run
    /// delegated to the plain optimizer).
    pub weights: Option<RepairWeights>,
    /// The balancing constants in force after iteration 1.
    pub constants: Option<BalanceConstants>,
}

/// Weights for a single hole: `τ_i = exp(−‖q_i − c‖²/r²)`, min–max
/// normalized over the cloud.
pub fn hole_weights(q: &PointCloud, hole: &HoleSpec, eps_nb: f64) -> Result<RepairWeights> {
    multi_hole_weights(q, std::slice::from_ref(hole), eps_nb, false)
}

/// Weights for several holes. Default: one min–max normalization of the
/// product of raw per-hole factors (equivalently `exp(−Σ_k d_k²/r_k²)`).
/// The `literal` variant min–max normalizes per hole first, multiplies,
/// then normalizes once more.
pub fn multi_hole_weights(
    q: &PointCloud,
    holes: &[HoleSpec],
    eps_nb: f64,
    literal: bool,
) -> Result<RepairWeights> {
    if holes.is_empty() {
        return Err(Error::invalid("multi_hole_weights requires at least one hole"));
    }
    validate_holes(holes, q)?;
    if !(eps_nb > 0.0 && eps_nb < 1.0) {
        return Err(Error::invalid(format!(
            "eps_nb must lie in (0, 1), got {eps_nb}"
        )));
    }
    let count = q.count();
    let raw_for = |hole: &HoleSpec| -> Vec<f64> {
        q.iter_points()
            .map(|p| {
                let d = hole.center_dist(p);
                (-d * d / (hole.radius * hole.radius)).exp()
            })
            .collect()
    };
    let mut tau: Vec<f64> = vec![1.0; count];
    if literal {
        for hole in holes {
            let (normed, degenerate) = min_max_normalize(&raw_for(hole));
            if degenerate {
                return Ok(RepairWeights {
                    tau_bar: vec![0.0; count],
                    eps_nb,
                    degenerate: true,
                });
            }
            for (t, v) in tau.iter_mut().zip(&normed) {
                *t *= v;
            }
        }
    } else {
        for hole in holes {
            for (t, v) in tau.iter_mut().zip(raw_for(hole)) {
                *t *= v;
            }
        }
    }
    let (tau_bar, degenerate) = min_max_normalize(&tau);
    Ok(RepairWeights {
        tau_bar: if degenerate { vec![0.0; count] } else { tau_bar },
        eps_nb,
        degenerate,
    })
}

/// Min–max normalization; returns `(values, degenerate)` where degenerate
/// means max == min (normalization impossible).
fn min_max_normalize(values: &[f64]) -> (Vec<f64>, bool) {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return (vec![0.0; values.len()], true);
    }
    (
        values.iter().map(|v| (v - min) / (max - min)).collect(),
        false,
    )
}

/// Direct form of the hole-filling energy (full sums, full-space norms):
/// `Σ_{i'} τ̄_{i'}·‖q_{i'}·Σ_{i≠i'} ŵ − Σ_{i≠i'} ŵ·q_i‖²`.
pub fn e3_value(q: &PointCloud, weights: &RepairWeights, h2: f64) -> Result<f64> {
    check_weights(q, weights)?;
    let n = q.ambient_dim();
    let mut total = 0.0;
    for i in 0..q.count() {
        let qi = q.point(i);
        let mut w_sum = 0.0;
        let mut s = vec![0.0; n];
        for (other, qo) in q.iter_points().enumerate() {
            if other == i {
                continue;
            }
            let w = gaussian_weight(cloud::sq_dist(qi, qo), h2);
            w_sum += w;
            for d in 0..n {
                s[d] += w * qo[d];
            }
        }
        let mut row = 0.0;
        for d in 0..n {
            let v = qi[d] * w_sum - s[d];
            row += v * v;
        }
        total += weights.tau_bar[i] * row;
    }
    Ok(total)
}

/// Graph-Laplacian form of the same energy:
/// `Σ_{i'} τ̄_{i'}·‖Σ_{i≠i'} ŵ·(q_{i'} − q_i)‖²`. Agrees with `e3_value`
/// up to floating-point roundoff.
pub fn e3_value_laplacian(q: &PointCloud, weights: &RepairWeights, h2: f64) -> Result<f64> {
    check_weights(q, weights)?;
    let n = q.ambient_dim();
    let mut total = 0.0;
    for i in 0..q.count() {
        let qi = q.point(i);
        let mut lap = vec![0.0; n];
        for (other, qo) in q.iter_points().enumerate() {
            if other == i {
                continue;
            }
            let w = gaussian_weight(cloud::sq_dist(qi, qo), h2);
            cloud::accumulate_scaled_diff(&mut lap, qi, qo, w);
        }
        total += weights.tau_bar[i] * cloud::norm_sq(&lap);
    }
    Ok(total)
}

fn check_weights(q: &PointCloud, weights: &RepairWeights) -> Result<()> {
    if weights.tau_bar.len() != q.count() {
        return Err(Error::invalid(format!(
            "weights cover {} points but the cloud has {}",
            weights.tau_bar.len(),
            q.count()
        )));
    }
    Ok(())
}

/// Reference (brute-force, full-space) hole-filling direction for `q[i]`:
/// `2·[Σ (q_i − q_other)·ŵ]·[Σ b(r)]` over the `2√2·h2`-truncated
/// neighborhood, self excluded.
pub fn e3_direction(i: usize, q: &PointCloud, params: &KernelParams) -> Result<Vec<f64>> {
    if i >= q.count() {
        return Err(Error::invalid(format!(
            "point index {i} out of range for a cloud of {} points",
            q.count()
        )));
    }
    let cutoff_sq = params.repulsion_cutoff() * params.repulsion_cutoff();
    let qi = q.point(i);
    let n = q.ambient_dim();
    let mut mean_shift = vec![0.0; n];
    let mut b_sum = 0.0;
    for other in 0..q.count() {
        if other == i {
            continue;
        }
        let qo = q.point(other);
        let sq = cloud::sq_dist(qi, qo);
        if sq <= cutoff_sq {
            let w = gaussian_weight(sq, params.h2);
            cloud::accumulate_scaled_diff(&mut mean_shift, qi, qo, w);
            b_sum += b_profile(sq.sqrt(), params.h2);
        }
    }
    Ok(mean_shift.iter().map(|v| 2.0 * v * b_sum).collect())
}

/// Engine-side hole-filling direction: neighborhood and scalar factors from
/// the metric view, mean-shift vector in the full space, ascending index
/// accumulation.
fn e3_direction_engine(
    engine: &Engine,
    i: usize,
    q_full: &PointCloud,
    q_metric: &PointCloud,
    index_q: &SpatialIndex,
    out: &mut [f64],
) -> Result<()> {
    out.fill(0.0);
    let neighbors = index_q.range_query(q_metric.point(i), engine.params.repulsion_cutoff())?;
    let mut b_sum = 0.0;
    for &other in &neighbors {
        if other == i {
            continue;
        }
        let sq = cloud::sq_dist(q_metric.point(i), q_metric.point(other));
        let w = gaussian_weight(sq, engine.params.h2);
        cloud::accumulate_scaled_diff(out, q_full.point(i), q_full.point(other), w);
        b_sum += b_profile(sq.sqrt(), engine.params.h2);
    }
    for v in out.iter_mut() {
        *v *= 2.0 * b_sum;
    }
    Ok(())
}

/// Balancing constants from the raw term matrices: `c_k` is the reciprocal
/// of the median row norm (or the median itself under `literal`), 0 with a
/// warning when the median vanishes.
pub fn balance_constants(
    terms: &TermMatrices,
    dim: usize,
    literal: bool,
) -> (BalanceConstants, Vec<String>) {
    let mut warnings = Vec::new();
    let mut constant = |name: &str, flat: &[f64]| -> f64 {
        let rows = flat.len() / dim;
        let mut norms: Vec<f64> = (0..rows)
            .map(|i| cloud::norm(&flat[i * dim..(i + 1) * dim]))
            .collect();
        norms.sort_by(|a, b| a.partial_cmp(b).expect("finite norms"));
        let med = median(&norms).unwrap_or(0.0);
        if med == 0.0 {
            warnings.push(format!(
                "term {name} has zero median gradient norm; its constant is set to 0 (term disabled)"
            ));
            0.0
        } else if literal {
            med
        } else {
            1.0 / med
        }
    };
    let c1 = constant("E1", &terms.t1);
    let c2 = constant("E2", &terms.t2);
    let c3 = constant("E3", &terms.t3);
    (BalanceConstants { c1, c2, c3 }, warnings)
}

/// Combines term rows into update directions under the given constants:
/// `g = c1·t1 − c2·t2 + c3·t3`. This is the single assembly point; the
/// balancing pass reuses it to rewrite the stored previous gradient so the
/// next Barzilai–Borwein quotient compares consistent quantities.
pub fn combine_terms(terms: &TermMatrices, consts: &BalanceConstants) -> Vec<f64> {
    terms
        .t1
        .iter()
        .zip(&terms.t2)
        .zip(&terms.t3)
        .map(|((a, b), c)| consts.c1 * a - consts.c2 * b + consts.c3 * c)
        .collect()
}

/// One repair iteration. `consts = None` means the pre-balancing first
/// iteration (all constants 1). Points inside the ε-neighborhood take
/// quarter-length steps and are exempt from starvation freezing (their
/// motion comes from E2/E3 by design). Returns the per-term gradient rows
/// so the caller can fix the balancing constants.
pub fn rmlop_iterate(
    state: &mut OptimizerState,
    engine: &Engine,
    weights: &RepairWeights,
    consts: Option<&BalanceConstants>,
) -> Result<(IterationStats, TermMatrices)> {
    check_weights(&state.q_curr, weights)?;
    let i_count = state.q_curr.count();
    let n = state.q_curr.ambient_dim();
    let q_metric = engine.metric_view(&state.q_curr)?;
    let index_q = SpatialIndex::build(&q_metric);
    let q_curr = &state.q_curr;

    let per_point: Result<Vec<(Vec<f64>, Vec<f64>, Vec<f64>, usize)>> = (0..i_count)
        .into_par_iter()
        .map(|i| {
            let mut attr = vec![0.0; n];
            let mut rep = vec![0.0; n];
            let mut e3 = vec![0.0; n];
            let support = engine.attraction(q_curr.point(i), q_metric.point(i), &mut attr)?;
            engine.repulsion(i, q_curr, &q_metric, &index_q, &mut rep)?;
            e3_direction_engine(engine, i, q_curr, &q_metric, &index_q, &mut e3)?;
            Ok((attr, rep, e3, support))
        })
        .collect();
    let per_point = per_point?;

    let mut t1 = vec![0.0; i_count * n];
    let mut t2 = vec![0.0; i_count * n];
    let mut t3 = vec![0.0; i_count * n];
    let mut starved = vec![false; i_count];
    let mut slow = vec![1.0; i_count];
    for (i, (attr, rep, e3, support)) in per_point.iter().enumerate() {
        let tau = weights.tau_bar[i];
        if weights.in_hole_band(i) {
            slow[i] = HOLE_STEP_FACTOR;
        } else if *support == 0 {
            // Starved outside the hole band: freeze, like the plain
            // optimizer. (Inside the band an empty P-support is expected.)
            starved[i] = true;
            continue;
        }
        for d in 0..n {
            t1[i * n + d] = (1.0 - tau) * attr[d];
            t2[i * n + d] = rep[d];
            t3[i * n + d] = tau * e3[d];
        }
    }
    let terms = TermMatrices { t1, t2, t3 };

    let unit = BalanceConstants {
        c1: 1.0,
        c2: 1.0,
        c3: 1.0,
    };
    let grad = combine_terms(&terms, consts.unwrap_or(&unit));
    let stats = apply_update(
        state,
        grad,
        starved,
        Some(&slow),
        engine.plan.h2,
        engine.step_clip,
        engine.plan.h0_q,
    )?;
    Ok((stats, terms))
}

fn coverage_vec(
    q: &PointCloud,
    holes: &[HoleSpec],
    grid_density: usize,
    h2: f64,
) -> Result<Vec<f64>> {
    holes
        .iter()
        .map(|h| hole_coverage(q, h, grid_density, h2))
        .collect()
}

/// Full repair run from a caller-provided initial cloud. See [`run_rmlop`].
pub fn run_rmlop_from(
    p: &PointCloud,
    q0: PointCloud,
    holes: &[HoleSpec],
    config: &RepairConfig,
) -> Result<RepairOutcome> {
    config.validate()?;
    if holes.is_empty() {
        let (q, log) = crate::mlop::run_mlop_from(p, q0, &config.base)?;
        return Ok(RepairOutcome {
            q,
            log,
            weights: None,
            constants: None,
        });
    }
    validate_holes(holes, p)?;

    let mut log = RunLog::default();

    // Phase 1: plain resampling pre-pass (optional).
    let (engine_pre, warns) = Engine::new(p, &q0, &config.base)?;
    log.warnings.extend(warns);
    let cov0 = coverage_vec(&q0, holes, config.coverage_grid_density, engine_pre.plan().h2)?;
    push_record(&mut log, 0, &q0, None, 0.0, cov0)?;
    let mut state = OptimizerState::new(q0);
    let pre_iters = if config.prepass { config.prepass_iters } else { 0 };
    for k in 1..=pre_iters {
        let t0 = Instant::now();
        let stats = mlop_iterate(&mut state, &engine_pre)?;
        let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
        if k % config.base.log_every == 0 || k == pre_iters {
            let cov = coverage_vec(
                &state.q_curr,
                holes,
                config.coverage_grid_density,
                engine_pre.plan().h2,
            )?;
            push_record(&mut log, k, &state.q_curr, Some(&stats), wall_ms, cov)?;
        }
    }
    let q_start = state.q_curr.clone();

    // Phase 2: repair. Fresh plan (supports changed during the pre-pass),
    // weights computed once on the pre-pass output and frozen.
    let (engine, warns) = Engine::new(p, &q_start, &config.base)?;
    for w in warns {
        if !log.warnings.contains(&w) {
            log.warnings.push(w);
        }
    }
    let weights = multi_hole_weights(&q_start, holes, config.eps_nb, config.literal_multihole)?;
    if weights.degenerate {
        log.warnings.push(
            "hole weights are degenerate (constant over the cloud); τ̄ ≡ 0 and repair reduces to plain resampling"
                .to_string(),
        );
    }
    let mut state = OptimizerState::new(q_start);
    log.repair_phase_start = Some(pre_iters + 1);

    let mut constants: Option<BalanceConstants> = None;
    let mut first_starved: Option<(usize, usize)> = None;
    for k in 1..=config.base.max_iters {
        let t0 = Instant::now();
        let (stats, terms) = rmlop_iterate(&mut state, &engine, &weights, constants.as_ref())?;
        if k == 1 {
            let (consts, warns) = balance_constants(&terms, p.ambient_dim(), config.literal_ck);
            log.warnings.extend(warns);
            state.grad_prev = Some(combine_terms(&terms, &consts));
            constants = Some(consts);
        }
        let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
        let stop = config.base.grad_tol > 0.0 && stats.median_grad_norm < config.base.grad_tol;
        if k % config.base.log_every == 0 || k == config.base.max_iters || stop {
            let cov = coverage_vec(
                &state.q_curr,
                holes,
                config.coverage_grid_density,
                engine.plan().h2,
            )?;
            push_record(
                &mut log,
                pre_iters + k,
                &state.q_curr,
                Some(&stats),
                wall_ms,
                cov,
            )?;
        }
        if stats.starved > 0 && first_starved.is_none() {
            first_starved = Some((pre_iters + k, stats.starved));
        }
        log.starved_points = stats.starved;
        if stop {
            break;
        }
    }
    if let Some((k, count)) = first_starved {
        log.warnings.push(format!(
            "{count} point(s) had empty attraction support (first at iteration {k}) and were frozen while starved"
        ));
    }
    Ok(RepairOutcome {
        q: state.q_curr,
        log,
        weights: Some(weights),
        constants,
    })
}

/// Full repair run: with holes, a resampling pre-pass (default 30
/// iterations) is followed by `max_iters` repair iterations; with an empty
/// hole list the call delegates to [`run_mlop`] and is bit-for-bit
/// identical to it.
pub fn run_rmlop(
    p: &PointCloud,
    holes: &[HoleSpec],
    config: &RepairConfig,
) -> Result<RepairOutcome> {
    config.validate()?;
    if holes.is_empty() {
        let (q, log) = run_mlop(p, &config.base)?;
        return Ok(RepairOutcome {
            q,
            log,
            weights: None,
            constants: None,
        });
    }
    if config.base.q_count > p.count() {
        return Err(Error::invalid(format!(
            "q_count {} exceeds input size {}",
            config.base.q_count,
            p.count()
        )));
    }
    let q0 = init_q(p, config.base.q_count, config.base.seed)?;
    run_rmlop_from(p, q0, holes, config)
}

/// Seeded `Q` initialization with sampling probability proportional to
/// `1 + τ̄`, slightly densifying the hole rims (used by the scan recipes;
/// plain runs use the uniform [`init_q`]). Weighted sampling without
/// replacement uses exponential keys (`ln(u)/w`, keep the `q_count`
/// largest), so the draw is one uniform per point in index order and the
/// result is independent of worker count. With no holes this reduces to a
/// uniform draw, but not the same draw as [`init_q`].
pub fn init_q_biased(
    p: &PointCloud,
    q_count: usize,
    holes: &[HoleSpec],
    eps_nb: f64,
    literal_multihole: bool,
    seed: u64,
) -> Result<PointCloud> {
    if q_count == 0 || q_count > p.count() {
        return Err(Error::invalid(format!(
            "q_count must be in 1..={}, got {q_count}",
            p.count()
        )));
    }
    let tau_bar = if holes.is_empty() {
        vec![0.0; p.count()]
    } else {
        multi_hole_weights(p, holes, eps_nb, literal_multihole)?.tau_bar
    };
    let mut rng = DeterministicRng::new(seed, STREAM_INIT_Q);
    let mut keyed: Vec<(f64, usize)> = tau_bar
        .iter()
        .enumerate()
        .map(|(j, tau)| {
            // uniform() can return exactly 0; nudge into (0, 1) so ln stays
            // finite. The perturbation is far below the key resolution.
            let u = rng.uniform().max(f64::MIN_POSITIVE);
            (u.ln() / (1.0 + tau), j)
        })
        .collect();
    keyed.sort_by(|a, b| b.partial_cmp(a).expect("keys are finite"));
    let mut indices: Vec<usize> = keyed[..q_count].iter().map(|&(_, j)| j).collect();
    indices.sort_unstable();
    p.select(&indices)
}
