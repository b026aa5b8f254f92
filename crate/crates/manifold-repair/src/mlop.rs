//! The resampling/denoising optimizer.
//!
//! Given a noisy input cloud `P = {p_j}` (J points) the optimizer evolves a
//! smaller cloud `Q = {q_i}` (I points, seeded as a random subset of `P`) by
//! per-point gradient steps on the row cost
//!
//! ```text
//! e_i'(q) = Σ_j ‖q − p_j‖_{H_ε} · w(‖q − p_j‖)            (attraction)
//!         + |λ_i'| · Σ_{i≠i'} η(‖q − q_i‖) · ŵ(‖q − q_i‖)  (repulsion)
//! ```
//!
//! with `w = exp(−‖·‖²/h1²)`, `ŵ = exp(−‖·‖²/h2²)`, `η(r) = 1/(3r³)` and
//! the smoothed norm `‖v‖_{H_ε} = √(‖v‖² + ε)`. The per-point multiplier is
//! fixed at the first iteration as `λ_i = −‖attraction_i‖ / ‖repulsion_i‖`
//! so both terms start with equal force. The assembled update direction is
//!
//! ```text
//! g_i = attraction_i + λ_i · repulsion_i = attraction_i − |λ_i| · repulsion_i
//! ```
//!
//! which is exactly the (steepest-ascent) gradient of the row cost above;
//! stepping along `−g_i` moves `q_i` toward the local weighted median of
//! `P` while pushing it away from its `Q` neighbors. Note the sign: the
//! repulsion sum `Σ (q_{i'} − q_i)·β_i` points *away* from the neighbors, so
//! it must enter the update direction with a negative coefficient — the
//! multiplier's own sign supplies it. Composing it with a second explicit
//! minus would silently turn repulsion into attraction; the two-point
//! separation test below pins the intended behavior.
//!
//! Step sizes are per-point Barzilai–Borwein quotients
//! `γ = ⟨Δq, Δg⟩ / ⟨Δg, Δg⟩` clipped to `±step_clip·h2`, with the first
//! step `γ₀ = 0.1·h2 / max_i ‖g_i‖`.
//!
//! In high ambient dimension all norms and kernel arguments are evaluated
//! through the orthonormal sketch of [`crate::sketch`]; point positions and
//! update directions always stay in the full space.

use std::time::Instant;

use rayon::prelude::*;

use crate::cloud::{self, PointCloud};
use crate::error::{Error, Result};
use crate::kernels::{alpha_from_sq_dist, beta_from_dist, KernelParams};
use crate::neighborhoods::{self, make_plan, NeighborhoodPlan, SpatialIndex};
use crate::rng::{DeterministicRng, STREAM_INIT_Q};
use crate::sketch::{auto_sketch_dim, build_sketch, SketchOperator};

/// Default clip on the Barzilai–Borwein step, as a multiple of `h2`.
pub const DEFAULT_STEP_CLIP: f64 = 0.5;
/// `⟨Δg, Δg⟩` below this keeps the previous step size.
pub const BB_DENOM_GUARD: f64 = 1e-30;
/// First-iteration step rule: `γ₀ = 0.1·h2 / max‖g‖`.
pub const GAMMA0_FACTOR: f64 = 0.1;

/// How the norm-reduction sketch is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SketchMode {
    /// Sketch with `m = min(40, n, J)` when `n > 40`, otherwise run in the
    /// full space.
    Auto,
    /// Never sketch.
    Disabled,
    /// Sketch with exactly this dimension (validated against `min(n, J)`).
    Fixed(usize),
}

/// Settings for a resampling run.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Size of the output cloud `I` (must satisfy `2 ≤ I ≤ J`).
    pub q_count: usize,
    /// Iteration budget.
    pub max_iters: usize,
    /// Stop early once the median per-point gradient norm falls below this
    /// (0 disables the check).
    pub grad_tol: f64,
    /// Seed for every random draw in the run.
    pub seed: u64,
    /// Norm-reduction policy.
    pub sketch: SketchMode,
    /// Step clip as a multiple of `h2`.
    pub step_clip: f64,
    /// Log an iteration record every this many iterations.
    pub log_every: usize,
}

impl OptimizerConfig {
    /// Defaults: 100 iterations, no gradient tolerance, seed 0, automatic
    /// sketching, step clip 0.5, log every iteration.
    pub fn new(q_count: usize) -> Self {
        OptimizerConfig {
            q_count,
            max_iters: 100,
            grad_tol: 0.0,
            seed: 0,
            sketch: SketchMode::Auto,
            step_clip: DEFAULT_STEP_CLIP,
            log_every: 1,
        }
    }

    /// Checks the settings that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        if self.q_count < 2 {
            return Err(Error::invalid(format!(
                "q_count must be at least 2, got {}",
                self.q_count
            )));
        }
        if !(self.step_clip > 0.0 && self.step_clip.is_finite()) {
            return Err(Error::invalid(format!(
                "step_clip must be positive and finite, got {}",
                self.step_clip
            )));
        }
        if !(self.grad_tol >= 0.0 && self.grad_tol.is_finite()) {
            return Err(Error::invalid(format!(
                "grad_tol must be nonnegative and finite, got {}",
                self.grad_tol
            )));
        }
        if self.log_every == 0 {
            return Err(Error::invalid("log_every must be at least 1"));
        }
        Ok(())
    }
}

/// One row of the run log.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// Iteration number; 0 is the state before any update.
    pub iteration: usize,
    /// Median of the per-point update-direction norms.
    pub median_grad_norm: f64,
    /// Maximum of the per-point update-direction norms.
    pub max_grad_norm: f64,
    /// Median nearest-neighbor distance within `Q` (full space).
    pub median_nn_dist: f64,
    /// Maximum nearest-neighbor distance within `Q` (full space).
    pub max_nn_dist: f64,
    /// Wall-clock time of the iteration in milliseconds. Excluded from
    /// reproducibility hashes.
    pub wall_ms: f64,
    /// Hole-coverage estimate per hole (repair runs only; empty otherwise).
    pub hole_coverage: Vec<f64>,
}

/// Per-iteration diagnostics plus run-level warnings.
#[derive(Debug, Clone, Default)]
pub struct RunLog {
    /// Logged iterations (controlled by `log_every`; iteration 0 and the
    /// final iteration are always present).
    pub records: Vec<IterationRecord>,
    /// Points with empty attraction support at the final iteration.
    pub starved_points: usize,
    /// Human-readable warnings accumulated across the run.
    pub warnings: Vec<String>,
    /// For repair runs: the iteration number where the repair phase began
    /// (records before it belong to the plain resampling pre-pass).
    pub repair_phase_start: Option<usize>,
}

impl RunLog {
    /// Renders the log as CSV. All numeric fields use shortest round-trip
    /// formatting; coverage columns appear only when some record has them.
    pub fn to_csv(&self) -> String {
        let n_holes = self
            .records
            .iter()
            .map(|r| r.hole_coverage.len())
            .max()
            .unwrap_or(0);
        let mut out = String::from(
            "iteration,median_grad_norm,max_grad_norm,median_nn_dist,max_nn_dist,wall_ms",
        );
        for k in 0..n_holes {
            out.push_str(&format!(",hole_coverage_{k}"));
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                r.iteration,
                r.median_grad_norm,
                r.max_grad_norm,
                r.median_nn_dist,
                r.max_nn_dist,
                r.wall_ms
            ));
            for k in 0..n_holes {
                out.push(',');
                if let Some(v) = r.hole_coverage.get(k) {
                    out.push_str(&format!("{v}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Evolving optimizer state; one instance per run.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    /// Current positions `Q^{(k)}`.
    pub q_curr: PointCloud,
    /// Previous positions `Q^{(k−1)}` (absent before the first update).
    pub q_prev: Option<PointCloud>,
    /// Update directions evaluated at `q_prev`.
    pub grad_prev: Option<Vec<f64>>,
    /// Per-point attraction/repulsion multipliers, frozen at iteration 1.
    pub lambda: Vec<f64>,
    /// Per-point step sizes.
    pub gamma: Vec<f64>,
    /// Completed iterations.
    pub iter: usize,
    /// Which points were frozen (empty attraction support) last iteration.
    pub starved: Vec<bool>,
}

impl OptimizerState {
    /// Fresh state at `q0`.
    pub fn new(q0: PointCloud) -> Self {
        let count = q0.count();
        OptimizerState {
            q_curr: q0,
            q_prev: None,
            grad_prev: None,
            lambda: vec![0.0; count],
            gamma: vec![0.0; count],
            iter: 0,
            starved: vec![false; count],
        }
    }
}

/// Norm summary of one iteration's update directions.
#[derive(Debug, Clone, Copy)]
pub struct IterationStats {
    /// Median per-point direction norm.
    pub median_grad_norm: f64,
    /// Maximum per-point direction norm.
    pub max_grad_norm: f64,
    /// Points frozen this iteration.
    pub starved: usize,
}

/// Precomputed data shared by every iteration of a run: the input cloud,
/// its (possibly sketched) metric twin, the spatial index over `P`, the
/// neighborhood plan, and the kernel parameters.
pub struct Engine {
    pub(crate) p_full: PointCloud,
    pub(crate) p_metric: PointCloud,
    pub(crate) sketch: Option<SketchOperator>,
    pub(crate) index_p: SpatialIndex,
    pub(crate) plan: NeighborhoodPlan,
    pub(crate) params: KernelParams,
    pub(crate) step_clip: f64,
}

impl Engine {
    /// Builds the engine for a `(P, Q₀)` pair under `config`; returns any
    /// setup warnings (sketch rank reduction, support-grid cap).
    pub fn new(
        p: &PointCloud,
        q0: &PointCloud,
        config: &OptimizerConfig,
    ) -> Result<(Engine, Vec<String>)> {
        config.validate()?;
        if p.ambient_dim() != q0.ambient_dim() {
            return Err(Error::invalid(format!(
                "P has dimension {} but Q has dimension {}",
                p.ambient_dim(),
                q0.ambient_dim()
            )));
        }
        let mut warnings = Vec::new();
        let n = p.ambient_dim();
        let j = p.count();
        let sketch = match config.sketch {
            SketchMode::Auto => match auto_sketch_dim(n, j) {
                Some(m) => Some(build_sketch(p, m, config.seed)?),
                None => None,
            },
            SketchMode::Disabled => None,
            SketchMode::Fixed(m) => Some(build_sketch(p, m, config.seed)?),
        };
        if let Some(s) = &sketch {
            if let Some(from) = s.reduced_from {
                warnings.push(format!(
                    "sketch dimension reduced from {from} to {} (input cloud is rank deficient)",
                    s.m()
                ));
            }
        }
        let p_metric = match &sketch {
            Some(s) => s.project_cloud(p)?,
            None => p.clone(),
        };
        let q_metric = match &sketch {
            Some(s) => s.project_cloud(q0)?,
            None => q0.clone(),
        };
        let plan = make_plan(&p_metric, &q_metric)?;
        if plan.grid_capped {
            warnings.push(
                "support radius multiplier hit the 20.0 cap; neighbor guarantees may not hold"
                    .to_string(),
            );
        }
        let params = KernelParams::new(plan.h1, plan.h2)?;
        let index_p = SpatialIndex::build(&p_metric);
        Ok((
            Engine {
                p_full: p.clone(),
                p_metric,
                sketch,
                index_p,
                plan,
                params,
                step_clip: config.step_clip,
            },
            warnings,
        ))
    }

    /// The neighborhood plan in force.
    pub fn plan(&self) -> &NeighborhoodPlan {
        &self.plan
    }

    /// The kernel parameters in force.
    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// Whether a sketch is active, and its dimension.
    pub fn sketch_dim(&self) -> Option<usize> {
        self.sketch.as_ref().map(|s| s.m())
    }

    /// Maps a cloud into the metric space (identity when unsketched).
    pub fn metric_view(&self, q: &PointCloud) -> Result<PointCloud> {
        match &self.sketch {
            Some(s) => s.project_cloud(q),
            None => Ok(q.clone()),
        }
    }

    /// Attraction term for one point: `Σ_j α_j (q − p_j)` over the
    /// truncated P-neighborhood, accumulated in ascending index order.
    /// Returns the support size (0 ⇒ the point is starved).
    pub(crate) fn attraction(
        &self,
        q_full: &[f64],
        q_metric: &[f64],
        out: &mut [f64],
    ) -> Result<usize> {
        out.fill(0.0);
        let neighbors = self
            .index_p
            .range_query(q_metric, self.params.attraction_cutoff())?;
        for &j in &neighbors {
            let sq = cloud::sq_dist(q_metric, self.p_metric.point(j));
            let a = alpha_from_sq_dist(sq, &self.params);
            cloud::accumulate_scaled_diff(out, q_full, self.p_full.point(j), a);
        }
        Ok(neighbors.len())
    }

    /// Repulsion term for point `i`: `Σ_{i'≠i} β (q_i − q_{i'})` over the
    /// truncated Q-neighborhood, ascending index order, self excluded.
    pub(crate) fn repulsion(
        &self,
        i: usize,
        q_full: &PointCloud,
        q_metric: &PointCloud,
        index_q: &SpatialIndex,
        out: &mut [f64],
    ) -> Result<()> {
        out.fill(0.0);
        let neighbors =
            index_q.range_query(q_metric.point(i), self.params.repulsion_cutoff())?;
        for &other in &neighbors {
            if other == i {
                continue;
            }
            let r = cloud::dist(q_metric.point(i), q_metric.point(other));
            let b = beta_from_dist(r, &self.params);
            cloud::accumulate_scaled_diff(out, q_full.point(i), q_full.point(other), b);
        }
        Ok(())
    }
}

/// Reference (brute-force, full-space) attraction term: truncated at
/// `2√2·h1` like the engine, but scanning all of `P`. Returns the vector
/// and the support size.
pub fn attraction_gradient(
    q_point: &[f64],
    p: &PointCloud,
    params: &KernelParams,
) -> Result<(Vec<f64>, usize)> {
    if q_point.len() != p.ambient_dim() {
        return Err(Error::invalid(format!(
            "point dimension {} does not match P dimension {}",
            q_point.len(),
            p.ambient_dim()
        )));
    }
    let cutoff_sq = params.attraction_cutoff() * params.attraction_cutoff();
    let mut out = vec![0.0; q_point.len()];
    let mut support = 0;
    for j in 0..p.count() {
        let pj = p.point(j);
        let sq = cloud::sq_dist(q_point, pj);
        if sq <= cutoff_sq {
            let a = alpha_from_sq_dist(sq, params);
            cloud::accumulate_scaled_diff(&mut out, q_point, pj, a);
            support += 1;
        }
    }
    Ok((out, support))
}

/// Reference (brute-force, full-space) repulsion term for `q[i]`:
/// `Σ_{other≠i} β·(q_i − q_other)` truncated at `2√2·h2`.
pub fn repulsion_gradient(i: usize, q: &PointCloud, params: &KernelParams) -> Result<Vec<f64>> {
    if i >= q.count() {
        return Err(Error::invalid(format!(
            "point index {i} out of range for a cloud of {} points",
            q.count()
        )));
    }
    let cutoff_sq = params.repulsion_cutoff() * params.repulsion_cutoff();
    let qi = q.point(i);
    let mut out = vec![0.0; q.ambient_dim()];
    for other in 0..q.count() {
        if other == i {
            continue;
        }
        let qo = q.point(other);
        let sq = cloud::sq_dist(qi, qo);
        if sq <= cutoff_sq {
            let b = beta_from_dist(sq.sqrt(), params);
            cloud::accumulate_scaled_diff(&mut out, qi, qo, b);
        }
    }
    Ok(out)
}

/// First-iteration multiplier `λ = −‖attraction‖ / ‖repulsion‖`; zero when
/// either norm vanishes (isolated or starved point).
pub fn lambda_init(attraction: &[f64], repulsion: &[f64]) -> f64 {
    let na = cloud::norm(attraction);
    let nr = cloud::norm(repulsion);
    if na == 0.0 || nr == 0.0 {
        0.0
    } else {
        -na / nr
    }
}

/// Barzilai–Borwein step `⟨Δq, Δg⟩ / ⟨Δg, Δg⟩`, clipped to
/// `±step_clip·h2`; keeps `prev_gamma` when the denominator underflows.
pub fn bb_step(dq: &[f64], dg: &[f64], prev_gamma: f64, step_clip: f64, h2: f64) -> f64 {
    let denom = cloud::dot(dg, dg);
    if denom < BB_DENOM_GUARD {
        return prev_gamma;
    }
    let gamma = cloud::dot(dq, dg) / denom;
    let cap = step_clip * h2;
    gamma.clamp(-cap, cap)
}

/// Samples the initial `Q` as a uniform random `q_count`-subset of `P`
/// (selection order preserved).
pub fn init_q(p: &PointCloud, q_count: usize, seed: u64) -> Result<PointCloud> {
    if q_count == 0 || q_count > p.count() {
        return Err(Error::invalid(format!(
            "q_count {} must lie in [1, {}]",
            q_count,
            p.count()
        )));
    }
    let indices = DeterministicRng::new(seed, STREAM_INIT_Q).sample_indices(p.count(), q_count);
    p.select(&indices)
}

/// Applies one computed update: chooses per-point steps (first iteration
/// rule or Barzilai–Borwein), moves the non-frozen points, checks
/// finiteness, and advances the state. `slow` optionally scales each
/// point's step at use time (the stored `gamma` stays unscaled).
///
/// Besides the step-size clip, each point's *displacement* `|γ|·‖g‖` is
/// held below `move_cap` (the representative spacing of `Q`). The
/// Barzilai–Borwein rule happily produces large steps along flat
/// directions, and with the `r⁻³` repulsion any jump past a neighbor
/// lands in a near-singular region and scatters the cloud; bounding the
/// displacement by one inter-point spacing per iteration keeps the
/// relaxation orderly without moving any stationary point.
pub(crate) fn apply_update(
    state: &mut OptimizerState,
    grad: Vec<f64>,
    starved: Vec<bool>,
    slow: Option<&[f64]>,
    h2: f64,
    step_clip: f64,
    move_cap: f64,
) -> Result<IterationStats> {
    let i_count = state.q_curr.count();
    let n = state.q_curr.ambient_dim();
    debug_assert_eq!(grad.len(), i_count * n);

    if state.iter == 0 {
        let mut max_norm: f64 = 0.0;
        for i in 0..i_count {
            if !starved[i] {
                max_norm = max_norm.max(cloud::norm(&grad[i * n..(i + 1) * n]));
            }
        }
        let gamma0 = if max_norm > 0.0 {
            GAMMA0_FACTOR * h2 / max_norm
        } else {
            0.0
        };
        state.gamma = vec![gamma0; i_count];
        for i in 0..i_count {
            if !starved[i] {
                let gnorm = cloud::norm(&grad[i * n..(i + 1) * n]);
                if state.gamma[i] * gnorm > move_cap {
                    state.gamma[i] = move_cap / gnorm;
                }
            }
        }
    } else {
        let q_prev = state
            .q_prev
            .as_ref()
            .expect("state past iteration 0 always has q_prev");
        let g_prev = state
            .grad_prev
            .as_ref()
            .expect("state past iteration 0 always has grad_prev");
        for i in 0..i_count {
            if starved[i] {
                continue; // frozen: keep the previous step size
            }
            let dq: Vec<f64> = state
                .q_curr
                .point(i)
                .iter()
                .zip(q_prev.point(i))
                .map(|(a, b)| a - b)
                .collect();
            let dg: Vec<f64> = grad[i * n..(i + 1) * n]
                .iter()
                .zip(&g_prev[i * n..(i + 1) * n])
                .map(|(a, b)| a - b)
                .collect();
            let mut gamma = bb_step(&dq, &dg, state.gamma[i], step_clip, h2);
            let gnorm = cloud::norm(&grad[i * n..(i + 1) * n]);
            if gamma.abs() * gnorm > move_cap {
                gamma = gamma.signum() * move_cap / gnorm;
            }
            state.gamma[i] = gamma;
        }
    }

    let mut next = state.q_curr.as_flat().to_vec();
    for i in 0..i_count {
        if starved[i] {
            continue;
        }
        let step = state.gamma[i] * slow.map_or(1.0, |s| s[i]);
        for d in 0..n {
            let v = next[i * n + d] - step * grad[i * n + d];
            if !v.is_finite() {
                return Err(Error::Numerical {
                    point_index: i,
                    detail: format!(
                        "non-finite coordinate {d} after update (step={step}, direction={})",
                        grad[i * n + d]
                    ),
                });
            }
            next[i * n + d] = v;
        }
    }

    let mut norms: Vec<f64> = (0..i_count)
        .map(|i| cloud::norm(&grad[i * n..(i + 1) * n]))
        .collect();
    let max_grad_norm = norms.iter().cloned().fold(0.0f64, f64::max);
    norms.sort_by(|a, b| a.partial_cmp(b).expect("gradient norms are finite"));
    let median_grad_norm = neighborhoods::median(&norms)?;
    let starved_count = starved.iter().filter(|&&s| s).count();

    let next_cloud = PointCloud::from_flat(next, n)?;
    state.q_prev = Some(std::mem::replace(&mut state.q_curr, next_cloud));
    state.grad_prev = Some(grad);
    state.starved = starved;
    state.iter += 1;

    Ok(IterationStats {
        median_grad_norm,
        max_grad_norm,
        starved: starved_count,
    })
}

/// One optimizer iteration: evaluates both terms for every point (in
/// parallel, with a fixed per-point accumulation order so results do not
/// depend on the worker count), freezes starved points, and applies the
/// update.
pub fn mlop_iterate(state: &mut OptimizerState, engine: &Engine) -> Result<IterationStats> {
    let i_count = state.q_curr.count();
    let n = state.q_curr.ambient_dim();
    let q_metric = engine.metric_view(&state.q_curr)?;
    let index_q = SpatialIndex::build(&q_metric);
    let q_curr = &state.q_curr;

    let per_point: Result<Vec<(Vec<f64>, Vec<f64>, usize)>> = (0..i_count)
        .into_par_iter()
        .map(|i| {
            let mut attr = vec![0.0; n];
            let mut rep = vec![0.0; n];
            let support = engine.attraction(q_curr.point(i), q_metric.point(i), &mut attr)?;
            engine.repulsion(i, q_curr, &q_metric, &index_q, &mut rep)?;
            Ok((attr, rep, support))
        })
        .collect();
    let per_point = per_point?;

    if state.iter == 0 {
        state.lambda = per_point
            .iter()
            .map(|(attr, rep, _)| lambda_init(attr, rep))
            .collect();
    }

    let mut grad = vec![0.0; i_count * n];
    let mut starved = vec![false; i_count];
    for (i, (attr, rep, support)) in per_point.iter().enumerate() {
        if *support == 0 {
            starved[i] = true;
            continue;
        }
        let row = &mut grad[i * n..(i + 1) * n];
        for d in 0..n {
            row[d] = attr[d] + state.lambda[i] * rep[d];
        }
    }

    apply_update(
        state,
        grad,
        starved,
        None,
        engine.plan.h2,
        engine.step_clip,
        engine.plan.h0_q,
    )
}

/// Appends a log record for the given cloud state.
pub(crate) fn push_record(
    log: &mut RunLog,
    iteration: usize,
    q: &PointCloud,
    stats: Option<&IterationStats>,
    wall_ms: f64,
    hole_coverage: Vec<f64>,
) -> Result<()> {
    let nn = neighborhoods::nn_distances(q)?;
    let max_nn = nn.iter().cloned().fold(0.0f64, f64::max);
    let median_nn = neighborhoods::median(&nn)?;
    log.records.push(IterationRecord {
        iteration,
        median_grad_norm: stats.map_or(0.0, |s| s.median_grad_norm),
        max_grad_norm: stats.map_or(0.0, |s| s.max_grad_norm),
        median_nn_dist: median_nn,
        max_nn_dist: max_nn,
        wall_ms,
        hole_coverage,
    });
    Ok(())
}

/// Full run from a caller-provided initial cloud. `config.q_count` is
/// ignored here; `q0` defines the output size.
pub fn run_mlop_from(
    p: &PointCloud,
    q0: PointCloud,
    config: &OptimizerConfig,
) -> Result<(PointCloud, RunLog)> {
    let (engine, warnings) = Engine::new(p, &q0, config)?;
    let mut log = RunLog {
        warnings,
        ..RunLog::default()
    };
    let mut state = OptimizerState::new(q0);
    push_record(&mut log, 0, &state.q_curr, None, 0.0, Vec::new())?;

    let mut first_starved: Option<(usize, usize)> = None;
    let mut last_logged = 0usize;
    for k in 1..=config.max_iters {
        let t0 = Instant::now();
        let stats = mlop_iterate(&mut state, &engine)?;
        let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
        let stop = config.grad_tol > 0.0 && stats.median_grad_norm < config.grad_tol;
        if k % config.log_every == 0 || k == config.max_iters || stop {
            push_record(&mut log, k, &state.q_curr, Some(&stats), wall_ms, Vec::new())?;
            last_logged = k;
        }
        if stats.starved > 0 && first_starved.is_none() {
            first_starved = Some((k, stats.starved));
        }
        log.starved_points = stats.starved;
        if stop {
            break;
        }
    }
    let _ = last_logged;
    if let Some((k, count)) = first_starved {
        log.warnings.push(format!(
            "{count} point(s) had empty attraction support (first at iteration {k}) and were frozen while starved"
        ));
    }
    Ok((state.q_curr, log))
}

/// Full run: samples `Q⁰` from `P` and iterates up to `max_iters`.
pub fn run_mlop(p: &PointCloud, config: &OptimizerConfig) -> Result<(PointCloud, RunLog)> {
    config.validate()?;
    if config.q_count > p.count() {
        return Err(Error::invalid(format!(
            "q_count {} exceeds input size {}",
            config.q_count,
            p.count()
        )));
    }
    let q0 = init_q(p, config.q_count, config.seed)?;
    run_mlop_from(p, q0, config)
}
