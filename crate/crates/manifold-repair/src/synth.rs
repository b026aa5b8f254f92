//! Deterministic generators for the benchmark surfaces, plus exact (or
//! tolerance-controlled) point-to-surface distance oracles used by the
//! metrics module.
//!
//! All generators sample uniformly in parameter space, draw their
//! parameters in the documented order from the `STREAM_PARAMS` stream, and
//! support exact-count rejection sampling against a hole list (a point
//! falling strictly inside any hole is redrawn). Additive uniform noise is
//! applied afterwards from the separate `STREAM_NOISE` stream so that
//! punching holes never perturbs the noise sequence.

use crate::cloud::{norm, PointCloud};
use crate::error::{Error, Result};
use crate::holes::{validate_holes, HoleSpec};
use crate::rng::{DeterministicRng, STREAM_NOISE, STREAM_PARAMS};

/// Parameter ranges shared by the tube-like surfaces.
const T_RANGE: (f64, f64) = (0.0, 2.0);
/// Angular arc for the 2-d cylinder and the cone: `[0.1π, 1.5π]`.
const U_ARC: (f64, f64) = (0.1 * std::f64::consts::PI, 1.5 * std::f64::consts::PI);
/// Angular range per sphere angle for the 6-d cylinder: `[0.1π, 0.6π]`.
const U6_RANGE: (f64, f64) = (0.1 * std::f64::consts::PI, 0.6 * std::f64::consts::PI);
/// Cone radial parameter range.
const CONE_R_RANGE: (f64, f64) = (0.0, 2.5);
/// Rejection-sampling attempt budget per requested point.
const MAX_ATTEMPTS_PER_POINT: usize = 10_000;

/// The benchmark surfaces.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceKind {
    /// Tube around the all-ones axis of `R^ambient`:
    /// `p = t·v1 + (R/√2)(cos u·v2 + sin u·v3)` with `v1 = (1,…,1)`,
    /// `v2 = (0,1,−1,0,…)`, `v3 = (1,0,0,−1,0,…)`, `t ∈ [0,2]`,
    /// `u ∈ [0.1π, 1.5π]`.
    Cylinder2d {
        /// Tube radius (the residual norm off the axis). Default `√2`.
        radius: f64,
        /// Ambient dimension (≥ 4). Default 60.
        ambient: usize,
    },
    /// Six-dimensional cylinder: a 5-sphere patch of radius `R` scaled by
    /// `R²` and swept along `v0` (ones in the first 7 coordinates):
    /// `p = t·v0 + R²·[x1,…,x6,0,…]`, `t ∈ [0,2]`, angles in `[0.1π, 0.6π]`.
    Cylinder6d {
        /// Sphere radius. Default 1.5.
        radius: f64,
        /// Ambient dimension (≥ 7). Default 60.
        ambient: usize,
    },
    /// Cone-like shell family around `v1 = (1,1,1,1,0,…)`:
    /// `p = t·v1 + (e^{−R²}/√2)(cos u·v2 + sin u·v3)`, `t ∈ [0,2]`,
    /// `R ∈ [0, 2.5]`, `u ∈ [0.1π, 1.5π]`.
    Cone {
        /// Ambient dimension (≥ 4). Default 60.
        ambient: usize,
    },
    /// Full circle of the given radius in the first two coordinates.
    Circle {
        /// Circle radius.
        radius: f64,
        /// Ambient dimension (≥ 2); trailing coordinates are zero.
        ambient: usize,
    },
    /// Uniform-area disk of the given radius in the first two coordinates.
    Disk {
        /// Disk radius.
        radius: f64,
        /// Ambient dimension (≥ 2).
        ambient: usize,
    },
    /// Uniform-area annulus in the first two coordinates.
    Annulus {
        /// Inner radius (strictly less than `outer`).
        inner: f64,
        /// Outer radius.
        outer: f64,
        /// Ambient dimension (≥ 2).
        ambient: usize,
    },
    /// Axis-aligned rectangle `[0,width]×[0,height]` in the first two
    /// coordinates.
    PlanePatch {
        /// Rectangle width.
        width: f64,
        /// Rectangle height.
        height: f64,
        /// Ambient dimension (≥ 2).
        ambient: usize,
    },
}

impl SurfaceKind {
    /// The 2-d cylinder with its standard parameters (`R = √2` in `R^60`).
    pub fn cylinder2d_default() -> Self {
        SurfaceKind::Cylinder2d {
            radius: 2f64.sqrt(),
            ambient: 60,
        }
    }

    /// The 6-d cylinder with its standard parameters (`R = 1.5` in `R^60`).
    pub fn cylinder6d_default() -> Self {
        SurfaceKind::Cylinder6d {
            radius: 1.5,
            ambient: 60,
        }
    }

    /// The cone family in `R^60`.
    pub fn cone_default() -> Self {
        SurfaceKind::Cone { ambient: 60 }
    }

    /// Ambient dimension of generated points.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            SurfaceKind::Cylinder2d { ambient, .. }
            | SurfaceKind::Cylinder6d { ambient, .. }
            | SurfaceKind::Cone { ambient }
            | SurfaceKind::Circle { ambient, .. }
            | SurfaceKind::Disk { ambient, .. }
            | SurfaceKind::Annulus { ambient, .. }
            | SurfaceKind::PlanePatch { ambient, .. } => ambient,
        }
    }

    /// Number of surface parameters per point (also the per-point draw
    /// count from the parameter stream).
    pub fn param_count(&self) -> usize {
        match self {
            SurfaceKind::Circle { .. } => 1,
            SurfaceKind::Cylinder2d { .. }
            | SurfaceKind::Disk { .. }
            | SurfaceKind::Annulus { .. }
            | SurfaceKind::PlanePatch { .. } => 2,
            SurfaceKind::Cone { .. } => 3,
            SurfaceKind::Cylinder6d { .. } => 6,
        }
    }

    /// Validates the shape parameters.
    pub fn validate(&self) -> Result<()> {
        let min_ambient = match self {
            SurfaceKind::Cylinder2d { .. } | SurfaceKind::Cone { .. } => 4,
            SurfaceKind::Cylinder6d { .. } => 7,
            _ => 2,
        };
        if self.ambient_dim() < min_ambient {
            return Err(Error::invalid(format!(
                "ambient dimension {} is below the minimum {min_ambient} for this surface",
                self.ambient_dim()
            )));
        }
        match *self {
            SurfaceKind::Cylinder2d { radius, .. }
            | SurfaceKind::Cylinder6d { radius, .. }
            | SurfaceKind::Circle { radius, .. }
            | SurfaceKind::Disk { radius, .. } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!(
                        "surface radius must be positive and finite, got {radius}"
                    )));
                }
            }
            SurfaceKind::Annulus { inner, outer, .. } => {
                if !(inner >= 0.0 && inner.is_finite() && outer.is_finite() && inner < outer) {
                    return Err(Error::invalid(format!(
                        "annulus radii must satisfy 0 ≤ inner < outer, got {inner}, {outer}"
                    )));
                }
            }
            SurfaceKind::PlanePatch { width, height, .. } => {
                if !(width > 0.0 && width.is_finite() && height > 0.0 && height.is_finite()) {
                    return Err(Error::invalid(format!(
                        "plane patch sides must be positive and finite, got {width}×{height}"
                    )));
                }
            }
            SurfaceKind::Cone { .. } => {}
        }
        Ok(())
    }

    /// Draws one parameter tuple, in the documented order:
    /// cylinder2d `(t, u)`, cylinder6d `(t, u1..u5)`, cone `(t, R, u)`,
    /// circle `(θ)`, disk/annulus `(area fraction, θ)`, plane `(x, y)`.
    pub fn draw_params(&self, rng: &mut DeterministicRng) -> Vec<f64> {
        match self {
            SurfaceKind::Cylinder2d { .. } => vec![
                rng.uniform_in(T_RANGE.0, T_RANGE.1),
                rng.uniform_in(U_ARC.0, U_ARC.1),
            ],
            SurfaceKind::Cylinder6d { .. } => {
                let mut p = vec![rng.uniform_in(T_RANGE.0, T_RANGE.1)];
                for _ in 0..5 {
                    p.push(rng.uniform_in(U6_RANGE.0, U6_RANGE.1));
                }
                p
            }
            SurfaceKind::Cone { .. } => vec![
                rng.uniform_in(T_RANGE.0, T_RANGE.1),
                rng.uniform_in(CONE_R_RANGE.0, CONE_R_RANGE.1),
                rng.uniform_in(U_ARC.0, U_ARC.1),
            ],
            SurfaceKind::Circle { .. } => vec![rng.uniform_in(0.0, 2.0 * std::f64::consts::PI)],
            SurfaceKind::Disk { .. } | SurfaceKind::Annulus { .. } => vec![
                rng.uniform(),
                rng.uniform_in(0.0, 2.0 * std::f64::consts::PI),
            ],
            SurfaceKind::PlanePatch { width, height, .. } => vec![
                rng.uniform_in(0.0, *width),
                rng.uniform_in(0.0, *height),
            ],
        }
    }

    /// Maps a parameter tuple to its surface point.
    pub fn surface_point(&self, params: &[f64]) -> Result<Vec<f64>> {
        if params.len() != self.param_count() {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let n = self.ambient_dim();
        let mut p = vec![0.0; n];
        match *self {
            SurfaceKind::Cylinder2d { radius, .. } => {
                let (t, u) = (params[0], params[1]);
                for v in p.iter_mut() {
                    *v = t;
                }
                let f = radius / 2f64.sqrt();
                add_tube_section(&mut p, f * u.cos(), f * u.sin());
            }
            SurfaceKind::Cone { .. } => {
                let (t, r, u) = (params[0], params[1], params[2]);
                for v in p.iter_mut().take(4) {
                    *v = t;
                }
                let f = (-r * r).exp() / 2f64.sqrt();
                add_tube_section(&mut p, f * u.cos(), f * u.sin());
            }
            SurfaceKind::Cylinder6d { radius, .. } => {
                let t = params[0];
                let angles: [f64; 5] = params[1..6].try_into().expect("five angles");
                let x = hypersphere_coords(radius, &angles);
                for d in 0..6 {
                    p[d] = t + radius * radius * x[d];
                }
                p[6] = t;
            }
            SurfaceKind::Circle { radius, .. } => {
                p[0] = radius * params[0].cos();
                p[1] = radius * params[0].sin();
            }
            SurfaceKind::Disk { radius, .. } => {
                let r = radius * params[0].sqrt(); // uniform in area
                p[0] = r * params[1].cos();
                p[1] = r * params[1].sin();
            }
            SurfaceKind::Annulus { inner, outer, .. } => {
                let r = (inner * inner + params[0] * (outer * outer - inner * inner)).sqrt();
                p[0] = r * params[1].cos();
                p[1] = r * params[1].sin();
            }
            SurfaceKind::PlanePatch { .. } => {
                p[0] = params[0];
                p[1] = params[1];
            }
        }
        Ok(p)
    }

    /// Distance from `x` to the surface. Closed-form for every kind except
    /// the 6-d cylinder, which uses a 1-d parameter search accurate to
    /// ~1e-8 (exact for on-surface points and radial displacements).
    pub fn surface_distance(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.ambient_dim() {
            return Err(Error::invalid(format!(
                "point dimension {} does not match ambient dimension {}",
                x.len(),
                self.ambient_dim()
            )));
        }
        match *self {
            SurfaceKind::Circle { radius, .. } => {
                let rho = x[0].hypot(x[1]);
                let off = norm(&x[2..]);
                Ok((rho - radius).hypot(off))
            }
            SurfaceKind::Disk { radius, .. } => {
                let rho = x[0].hypot(x[1]);
                let off = norm(&x[2..]);
                Ok((rho - radius).max(0.0).hypot(off))
            }
            SurfaceKind::Annulus { inner, outer, .. } => {
                let rho = x[0].hypot(x[1]);
                let excess = if rho < inner {
                    inner - rho
                } else if rho > outer {
                    rho - outer
                } else {
                    0.0
                };
                Ok(excess.hypot(norm(&x[2..])))
            }
            SurfaceKind::PlanePatch { width, height, .. } => {
                let dx = (-x[0]).max(x[0] - width).max(0.0);
                let dy = (-x[1]).max(x[1] - height).max(0.0);
                Ok((dx.hypot(dy)).hypot(norm(&x[2..])))
            }
            SurfaceKind::Cylinder2d { radius, .. } => {
                Ok(tube_distance(x, self.ambient_dim(), radius, T_RANGE))
            }
            SurfaceKind::Cone { .. } => {
                let smin = (-CONE_R_RANGE.1 * CONE_R_RANGE.1).exp();
                Ok(cone_distance(x, smin, 1.0))
            }
            SurfaceKind::Cylinder6d { radius, .. } => Ok(cylinder6d_distance(x, radius)),
        }
    }
}

/// Adds `cb·v2 + cc·v3` to `p`, with `v2 = (0,1,−1,0,…)`,
/// `v3 = (1,0,0,−1,0,…)`.
fn add_tube_section(p: &mut [f64], cb: f64, cc: f64) {
    p[1] += cb;
    p[2] -= cb;
    p[0] += cc;
    p[3] -= cc;
}

/// Standard 5-angle parametrization of the radius-`r` sphere in `R^6`:
/// `x1 = r·cos u1`, `x_k = r·sin u1⋯sin u_{k−1}·cos u_k`,
/// `x6 = r·sin u1⋯sin u5`. Satisfies `‖x‖ = r` identically.
pub fn hypersphere_coords(r: f64, angles: &[f64; 5]) -> [f64; 6] {
    let mut x = [0.0; 6];
    let mut sin_prod = r;
    for k in 0..5 {
        x[k] = sin_prod * angles[k].cos();
        sin_prod *= angles[k].sin();
    }
    x[5] = sin_prod;
    x
}

/// Decomposes `x` against the orthonormal tube frame: returns
/// `(a, b, c, w)` where `a` is the axis coordinate, `(b, c)` the section
/// coordinates and `w` the residual norm. The residual is formed
/// explicitly (not via `‖x‖² − a² − b² − c²`) to avoid cancellation for
/// near-surface points.
fn tube_frame_coords(x: &[f64], axis_ones: usize) -> (f64, f64, f64, f64) {
    let axis_norm = (axis_ones as f64).sqrt();
    let a: f64 = x[..axis_ones].iter().sum::<f64>() / axis_norm;
    let b = (x[1] - x[2]) / 2f64.sqrt();
    let c = (x[0] - x[3]) / 2f64.sqrt();
    let mut res = x.to_vec();
    for v in res.iter_mut().take(axis_ones) {
        *v -= a / axis_norm;
    }
    res[1] -= b / 2f64.sqrt();
    res[2] += b / 2f64.sqrt();
    res[0] -= c / 2f64.sqrt();
    res[3] += c / 2f64.sqrt();
    (a, b, c, norm(&res))
}

/// Angle of `(b, c)` mapped into `[0, 2π)`.
fn section_angle(b: f64, c: f64) -> f64 {
    let phi = c.atan2(b);
    if phi < 0.0 {
        phi + 2.0 * std::f64::consts::PI
    } else {
        phi
    }
}

/// Distance from `(b, c)` to the arc `{s·(cos u, sin u) : u ∈ U_ARC}` of a
/// fixed radius `s`.
fn arc_distance(b: f64, c: f64, s: f64) -> f64 {
    let phi = section_angle(b, c);
    if (U_ARC.0..=U_ARC.1).contains(&phi) {
        (b.hypot(c) - s).abs()
    } else {
        let mut best = f64::INFINITY;
        for u in [U_ARC.0, U_ARC.1] {
            best = best.min((b - s * u.cos()).hypot(c - s * u.sin()));
        }
        best
    }
}

/// Distance from `(b, c)` to the annular sector
/// `{s·(cos u, sin u) : s ∈ [smin, smax], u ∈ U_ARC}`.
fn sector_distance(b: f64, c: f64, smin: f64, smax: f64) -> f64 {
    let phi = section_angle(b, c);
    let rho = b.hypot(c);
    if (U_ARC.0..=U_ARC.1).contains(&phi) {
        if rho < smin {
            smin - rho
        } else if rho > smax {
            rho - smax
        } else {
            0.0
        }
    } else {
        // Nearest point lies on one of the two straight edges.
        let mut best = f64::INFINITY;
        for u in [U_ARC.0, U_ARC.1] {
            let (ex, ey) = (u.cos(), u.sin());
            // Project onto the edge segment s ∈ [smin, smax] along (ex, ey).
            let s = (b * ex + c * ey).clamp(smin, smax);
            best = best.min((b - s * ex).hypot(c - s * ey));
        }
        best
    }
}

/// Distance to a fixed-radius tube (2-d cylinder): axis interval
/// `t ∈ t_range` along the all-ones direction, arc of radius
/// `section_radius` in the section plane.
fn tube_distance(x: &[f64], ambient: usize, section_radius: f64, t_range: (f64, f64)) -> f64 {
    let (a, b, c, w) = tube_frame_coords(x, ambient);
    let axis_norm = (ambient as f64).sqrt();
    let (lo, hi) = (t_range.0 * axis_norm, t_range.1 * axis_norm);
    let da = if a < lo {
        lo - a
    } else if a > hi {
        a - hi
    } else {
        0.0
    };
    let d_section = arc_distance(b, c, section_radius);
    (da.hypot(d_section)).hypot(w)
}

/// Distance to the cone shell family: axis ones in the first 4 coordinates,
/// section radii spanning `[smin, smax]`.
fn cone_distance(x: &[f64], smin: f64, smax: f64) -> f64 {
    let (a, b, c, w) = tube_frame_coords(x, 4);
    let axis_norm = 2.0; // ‖(1,1,1,1)‖
    let (lo, hi) = (T_RANGE.0 * axis_norm, T_RANGE.1 * axis_norm);
    let da = if a < lo {
        lo - a
    } else if a > hi {
        a - hi
    } else {
        0.0
    };
    let d_section = sector_distance(b, c, smin, smax);
    (da.hypot(d_section)).hypot(w)
}

/// Distance to the 6-d cylinder via a parameter search over `t`; for each
/// `t` the sphere-patch block is projected by inverting the angles and
/// clamping them into the patch.
fn cylinder6d_distance(x: &[f64], radius: f64) -> f64 {
    let tail_sq: f64 = x[7..].iter().map(|v| v * v).sum();
    let dist_at = |t: f64| -> f64 {
        let z: Vec<f64> = x[..6].iter().map(|v| v - t).collect();
        let angles = invert_sphere_angles(&z);
        let clamped: [f64; 5] = [
            angles[0].clamp(U6_RANGE.0, U6_RANGE.1),
            angles[1].clamp(U6_RANGE.0, U6_RANGE.1),
            angles[2].clamp(U6_RANGE.0, U6_RANGE.1),
            angles[3].clamp(U6_RANGE.0, U6_RANGE.1),
            angles[4].clamp(U6_RANGE.0, U6_RANGE.1),
        ];
        let proj = hypersphere_coords(radius, &clamped);
        let mut block_sq = 0.0;
        for d in 0..6 {
            let diff = z[d] - radius * radius * proj[d];
            block_sq += diff * diff;
        }
        let dt = x[6] - t;
        (block_sq + dt * dt + tail_sq).sqrt()
    };

    // Coarse grid, then golden-section refinement around the best cell.
    let cells = 64;
    let mut best_k = 0;
    let mut best = f64::INFINITY;
    for k in 0..=cells {
        let t = T_RANGE.0 + (T_RANGE.1 - T_RANGE.0) * k as f64 / cells as f64;
        let d = dist_at(t);
        if d < best {
            best = d;
            best_k = k;
        }
    }
    let cell = (T_RANGE.1 - T_RANGE.0) / cells as f64;
    let mut lo = (T_RANGE.0 + cell * (best_k as f64 - 1.0)).max(T_RANGE.0);
    let mut hi = (T_RANGE.0 + cell * (best_k as f64 + 1.0)).min(T_RANGE.1);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut m1 = hi - golden * (hi - lo);
    let mut m2 = lo + golden * (hi - lo);
    let (mut f1, mut f2) = (dist_at(m1), dist_at(m2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - golden * (hi - lo);
            f1 = dist_at(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + golden * (hi - lo);
            f2 = dist_at(m2);
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    best.min(f1).min(f2)
}

/// Inverts the 5-angle sphere parametrization for a direction `z ∈ R^6`
/// (angles of the radial projection; zero vector maps to all-zero angles).
fn invert_sphere_angles(z: &[f64]) -> [f64; 5] {
    let mut angles = [0.0; 5];
    for k in 0..5 {
        let rem: f64 = z[k + 1..6].iter().map(|v| v * v).sum::<f64>().sqrt();
        angles[k] = rem.atan2(z[k]);
    }
    angles
}

/// A generation request: surface, exact point count, noise amplitude, seed
/// and holes to sample around.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    /// What to sample.
    pub kind: SurfaceKind,
    /// Exact number of points produced (after hole rejection).
    pub count: usize,
    /// Uniform noise amplitude `a` (`U(−a, a)` per coordinate); 0 disables.
    pub noise: f64,
    /// Seed for the parameter and noise streams.
    pub seed: u64,
    /// Holes to avoid: candidate points strictly inside any of them are
    /// rejected and redrawn.
    pub holes: Vec<HoleSpec>,
}

impl GeneratorSpec {
    /// A hole-free, noise-free sample of `count` points.
    pub fn clean(kind: SurfaceKind, count: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            count,
            noise: 0.0,
            seed,
            holes: Vec::new(),
        }
    }
}

/// Samples a cloud per the spec: rejection sampling to the exact count,
/// then noise. Deterministic in `(kind, count, noise, seed, holes)`.
pub fn generate(spec: &GeneratorSpec) -> Result<PointCloud> {
    spec.kind.validate()?;
    if spec.count == 0 {
        return Err(Error::invalid("cannot generate an empty cloud"));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::invalid(format!(
            "noise amplitude must be nonnegative and finite, got {}",
            spec.noise
        )));
    }
    let n = spec.kind.ambient_dim();
    for (k, hole) in spec.holes.iter().enumerate() {
        hole.validate(Some(n))
            .map_err(|e| Error::invalid(format!("holes[{k}]: {e}")))?;
    }
    let mut rng = DeterministicRng::new(spec.seed, STREAM_PARAMS);
    let mut coords = Vec::with_capacity(spec.count * n);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let budget = MAX_ATTEMPTS_PER_POINT.saturating_mul(spec.count);
    while accepted < spec.count {
        attempts += 1;
        if attempts > budget {
            return Err(Error::insufficient(format!(
                "rejection sampling failed: {accepted}/{} points accepted after {attempts} attempts (holes may cover the surface)",
                spec.count
            )));
        }
        let params = spec.kind.draw_params(&mut rng);
        let point = spec.kind.surface_point(&params)?;
        if spec.holes.iter().any(|h| h.contains(&point)) {
            continue;
        }
        coords.extend_from_slice(&point);
        accepted += 1;
    }
    let cloud = PointCloud::from_flat(coords, n)?;
    if spec.noise > 0.0 {
        add_uniform_noise(&cloud, spec.noise, spec.seed)
    } else {
        Ok(cloud)
    }
}

/// Adds `U(−a, a)` noise per coordinate (row-major draw order) from the
/// noise stream. `a = 0` returns the input bitwise unchanged.
pub fn add_uniform_noise(cloud: &PointCloud, amplitude: f64, seed: u64) -> Result<PointCloud> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::invalid(format!(
            "noise amplitude must be nonnegative and finite, got {amplitude}"
        )));
    }
    if amplitude == 0.0 {
        return Ok(cloud.clone());
    }
    let mut rng = DeterministicRng::new(seed, STREAM_NOISE);
    let coords: Vec<f64> = cloud
        .as_flat()
        .iter()
        .map(|v| v + rng.symmetric_uniform(amplitude))
        .collect();
    PointCloud::from_flat(coords, cloud.ambient_dim())
}

/// Removes every point strictly inside the hole, preserving order. Errors
/// if nothing survives.
pub fn punch_hole(cloud: &PointCloud, hole: &HoleSpec) -> Result<PointCloud> {
    validate_holes(std::slice::from_ref(hole), cloud)?;
    let keep: Vec<usize> = (0..cloud.count())
        .filter(|&i| !hole.contains(cloud.point(i)))
        .collect();
    if keep.is_empty() {
        return Err(Error::insufficient(
            "punching the hole removed every point in the cloud",
        ));
    }
    cloud.select(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{dist, dot};

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn cylinder2d_residual_norm_is_the_radius() {
        let kind = SurfaceKind::cylinder2d_default();
        let spec = GeneratorSpec::clean(kind.clone(), 50, 11);
        let p = generate(&spec).unwrap();
        let n = 60.0f64;
        for pt in p.iter_points() {
            let a: f64 = pt.iter().sum::<f64>() / n.sqrt();
            let residual = (dot(pt, pt) - a * a).sqrt();
            assert!((residual - 2f64.sqrt()).abs() < 1e-10);
            // On-surface points are at distance ~0 from the oracle.
            assert!(kind.surface_distance(pt).unwrap() < 1e-8);
        }
    }

    #[test]
    fn cylinder2d_point_at_u_zero_is_v2() {
        let kind = SurfaceKind::cylinder2d_default();
        let p = kind.surface_point(&[0.0, 0.0]).unwrap();
        let mut v2 = vec![0.0; 60];
        v2[1] = 1.0;
        v2[2] = -1.0;
        for (a, b) in p.iter().zip(&v2) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn hypersphere_coords_have_exact_norm() {
        let angles = [0.4, 0.9, 1.2, 0.5, 0.7];
        let x = hypersphere_coords(1.5, &angles);
        assert!((norm(&x) - 1.5).abs() < 1e-12);
        // First and last coordinates per the standard parametrization.
        assert!((x[0] - 1.5 * 0.4f64.cos()).abs() < 1e-15);
        let sin_prod: f64 = angles.iter().map(|a| a.sin()).product();
        assert!((x[5] - 1.5 * sin_prod).abs() < 1e-15);
    }

    #[test]
    fn cylinder6d_structure_and_oracle() {
        let kind = SurfaceKind::cylinder6d_default();
        let r = 1.5f64;
        let t = 0.8;
        let angles = [0.35 * std::f64::consts::PI; 5];
        let params = [t, angles[0], angles[1], angles[2], angles[3], angles[4]];
        let p = kind.surface_point(&params).unwrap();
        assert!((p[0] - (t + r * r * r * angles[0].cos())).abs() < 1e-12);
        assert!((p[6] - t).abs() < 1e-15);
        assert!(p[7..].iter().all(|&v| v == 0.0));
        // On-surface → 0.
        assert!(kind.surface_distance(&p).unwrap() < 1e-8);
        // A displacement in the sphere block can never be farther than its
        // own length (the foot of the original point still exists).
        let x = hypersphere_coords(r, &angles);
        let delta = 0.05;
        let mut displaced = p.clone();
        for d in 0..6 {
            displaced[d] += delta * x[d] / r;
        }
        let got = kind.surface_distance(&displaced).unwrap();
        assert!(got <= delta + 1e-9 && got > 0.0, "got {got}");
        // A displacement orthogonal to all six tangent directions moves the
        // point exactly δ off the surface (to first order; δ is small
        // enough that curvature contributes < 1e-5).
        let normal = orthogonal_displacement(&kind, &params);
        let delta = 1e-3;
        let shifted: Vec<f64> = p.iter().zip(&normal).map(|(v, n)| v + delta * n).collect();
        let got = kind.surface_distance(&shifted).unwrap();
        assert!((got - delta).abs() < 1e-5, "got {got}, want {delta}");
        // Off-structure displacement in a trailing coordinate adds in
        // quadrature.
        let mut off = p.clone();
        off[30] += 0.3;
        assert!((kind.surface_distance(&off).unwrap() - 0.3).abs() < 1e-6);
    }

    /// Builds a unit vector orthogonal (to finite-difference accuracy) to
    /// every tangent direction of the surface at the given parameters.
    fn orthogonal_displacement(kind: &SurfaceKind, params: &[f64]) -> Vec<f64> {
        let n = kind.ambient_dim();
        let eps = 1e-6;
        let mut tangents: Vec<Vec<f64>> = Vec::new();
        for k in 0..params.len() {
            let mut plus = params.to_vec();
            let mut minus = params.to_vec();
            plus[k] += eps;
            minus[k] -= eps;
            let a = kind.surface_point(&plus).unwrap();
            let b = kind.surface_point(&minus).unwrap();
            let mut t: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y) / (2.0 * eps))
                .collect();
            // Gram-Schmidt against the previous tangents.
            for prev in &tangents {
                let c = dot(&t, prev);
                for (v, p) in t.iter_mut().zip(prev) {
                    *v -= c * p;
                }
            }
            let nn = norm(&t);
            assert!(nn > 1e-9, "degenerate tangent {k}");
            for v in t.iter_mut() {
                *v /= nn;
            }
            tangents.push(t);
        }
        // Start from a fixed off-axis direction and remove the tangential
        // components.
        let mut dir = vec![0.0; n];
        dir[0] = 0.3;
        dir[2] = -0.7;
        dir[5] = 0.64;
        for t in &tangents {
            let c = dot(&dir, t);
            for (v, p) in dir.iter_mut().zip(t) {
                *v -= c * p;
            }
        }
        let nn = norm(&dir);
        assert!(nn > 1e-6, "probe direction collapsed onto the tangent space");
        dir.iter().map(|v| v / nn).collect()
    }

    #[test]
    fn cylinder6d_oracle_lower_bounds_sampled_distances() {
        let kind = SurfaceKind::cylinder6d_default();
        let sample = generate(&GeneratorSpec::clean(kind.clone(), 4000, 5)).unwrap();
        let mut rng = DeterministicRng::new(77, 0);
        for _ in 0..5 {
            // A perturbed surface point.
            let base = sample.point((rng.next_u64() % 4000) as usize);
            let y: Vec<f64> = base
                .iter()
                .map(|v| v + rng.uniform_in(-0.3, 0.3))
                .collect();
            let oracle = kind.surface_distance(&y).unwrap();
            let sampled_min = sample
                .iter_points()
                .map(|p| dist(p, &y))
                .fold(f64::INFINITY, f64::min);
            assert!(
                oracle <= sampled_min + 1e-9,
                "oracle {oracle} exceeds sampled bound {sampled_min}"
            );
            assert!(oracle >= 0.0);
        }
    }

    #[test]
    fn cone_oracle_matches_a_brute_force_parameter_grid() {
        let kind = SurfaceKind::cone_default();
        let mut rng = DeterministicRng::new(13, 0);
        for trial in 0..4 {
            let base = kind
                .surface_point(&[
                    rng.uniform_in(0.0, 2.0),
                    rng.uniform_in(0.0, 2.5),
                    rng.uniform_in(U_ARC.0, U_ARC.1),
                ])
                .unwrap();
            let y: Vec<f64> = base
                .iter()
                .map(|v| v + rng.uniform_in(-0.4, 0.4))
                .collect();
            let oracle = kind.surface_distance(&y).unwrap();
            let mut brute = f64::INFINITY;
            let g = 60;
            for it in 0..=g {
                for ir in 0..=g {
                    for iu in 0..=g {
                        let p = kind
                            .surface_point(&[
                                2.0 * it as f64 / g as f64,
                                2.5 * ir as f64 / g as f64,
                                U_ARC.0 + (U_ARC.1 - U_ARC.0) * iu as f64 / g as f64,
                            ])
                            .unwrap();
                        brute = brute.min(dist(&p, &y));
                    }
                }
            }
            // Brute force over a finite grid overestimates the distance by
            // at most the grid resolution.
            assert!(
                oracle <= brute + 1e-9 && oracle >= brute - 0.15,
                "trial {trial}: oracle {oracle} vs brute {brute}"
            );
        }
    }

    #[test]
    fn cylinder2d_oracle_matches_a_brute_force_parameter_grid() {
        let kind = SurfaceKind::cylinder2d_default();
        let mut rng = DeterministicRng::new(14, 0);
        for _ in 0..4 {
            let base = kind
                .surface_point(&[rng.uniform_in(0.0, 2.0), rng.uniform_in(U_ARC.0, U_ARC.1)])
                .unwrap();
            let y: Vec<f64> = base
                .iter()
                .map(|v| v + rng.uniform_in(-0.5, 0.5))
                .collect();
            let oracle = kind.surface_distance(&y).unwrap();
            let mut brute = f64::INFINITY;
            let g = 400;
            for it in 0..=g {
                for iu in 0..=g {
                    let p = kind
                        .surface_point(&[
                            2.0 * it as f64 / g as f64,
                            U_ARC.0 + (U_ARC.1 - U_ARC.0) * iu as f64 / g as f64,
                        ])
                        .unwrap();
                    brute = brute.min(dist(&p, &y));
                }
            }
            assert!(
                oracle <= brute + 1e-9 && oracle >= brute - 0.05,
                "oracle {oracle} vs brute {brute}"
            );
        }
    }

    #[test]
    fn planar_shape_distances_hand_values() {
        let circle = SurfaceKind::Circle {
            radius: 2.0,
            ambient: 3,
        };
        assert!((circle.surface_distance(&[3.0, 0.0, 4.0]).unwrap() - 17f64.sqrt()).abs() < 1e-12);
        let disk = SurfaceKind::Disk {
            radius: 2.0,
            ambient: 2,
        };
        assert_eq!(disk.surface_distance(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((disk.surface_distance(&[3.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let annulus = SurfaceKind::Annulus {
            inner: 1.0,
            outer: 2.0,
            ambient: 2,
        };
        assert!((annulus.surface_distance(&[0.25, 0.0]).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(annulus.surface_distance(&[1.5, 0.0]).unwrap(), 0.0);
        let plane = SurfaceKind::PlanePatch {
            width: 2.0,
            height: 1.0,
            ambient: 3,
        };
        assert!((plane.surface_distance(&[3.0, 2.0, 0.0]).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic_and_exact_count() {
        let kind = SurfaceKind::Disk {
            radius: 1.0,
            ambient: 2,
        };
        let hole = HoleSpec::new(vec![0.0, 0.0], 0.4).unwrap();
        let spec = GeneratorSpec {
            kind,
            count: 300,
            noise: 0.0,
            seed: 21,
            holes: vec![hole.clone()],
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.as_flat(), b.as_flat());
        assert_eq!(a.count(), 300);
        for pt in a.iter_points() {
            assert!(!hole.contains(pt), "no accepted point lies inside the hole");
        }
        let mut other = spec.clone();
        other.seed = 22;
        assert_ne!(generate(&other).unwrap().as_flat(), a.as_flat());
    }

    #[test]
    fn parameter_draw_order_is_pinned() {
        // The generator draws (t, u) per point, in order, from the
        // parameter stream; this is part of the reproducibility contract.
        let kind = SurfaceKind::cylinder2d_default();
        let spec = GeneratorSpec::clean(kind.clone(), 2, 5);
        let p = generate(&spec).unwrap();
        let mut rng = DeterministicRng::new(5, STREAM_PARAMS);
        for i in 0..2 {
            let t = rng.uniform_in(0.0, 2.0);
            let u = rng.uniform_in(U_ARC.0, U_ARC.1);
            let expect = kind.surface_point(&[t, u]).unwrap();
            assert_eq!(p.point(i), expect.as_slice(), "point {i}");
        }
    }

    #[test]
    fn noise_is_bounded_and_stream_separated() {
        let kind = SurfaceKind::PlanePatch {
            width: 1.0,
            height: 1.0,
            ambient: 2,
        };
        let clean = generate(&GeneratorSpec::clean(kind.clone(), 200, 7)).unwrap();
        let noisy = generate(&GeneratorSpec {
            kind,
            count: 200,
            noise: 0.05,
            seed: 7,
            holes: vec![],
        })
        .unwrap();
        for (a, b) in clean.as_flat().iter().zip(noisy.as_flat()) {
            assert!((a - b).abs() <= 0.05);
        }
        // Zero amplitude is the bitwise identity.
        let same = add_uniform_noise(&clean, 0.0, 7).unwrap();
        assert_eq!(same.as_flat(), clean.as_flat());
    }

    #[test]
    fn punch_hole_is_strict_and_order_preserving() {
        let cloud = PointCloud::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0], // exactly on the boundary: kept
            vec![0.5, 0.0],
            vec![2.0, 0.0],
        ])
        .unwrap();
        let hole = HoleSpec::new(vec![0.0, 0.0], 1.0).unwrap();
        let out = punch_hole(&cloud, &hole).unwrap();
        assert_eq!(out.count(), 2);
        assert_eq!(out.point(0), &[1.0, 0.0]);
        assert_eq!(out.point(1), &[2.0, 0.0]);
        // Idempotent.
        let again = punch_hole(&out, &hole).unwrap();
        assert_eq!(again.as_flat(), out.as_flat());
        // Swallowing everything is an error.
        let big = HoleSpec::new(vec![0.0, 0.0], 10.0).unwrap();
        assert!(punch_hole(&cloud, &big).is_err());
    }

    #[test]
    fn rejection_sampling_gives_up_gracefully() {
        let kind = SurfaceKind::Disk {
            radius: 1.0,
            ambient: 2,
        };
        let hole = HoleSpec::new(vec![0.0, 0.0], 50.0).unwrap(); // covers the disk
        let spec = GeneratorSpec {
            kind,
            count: 10,
            noise: 0.0,
            seed: 1,
            holes: vec![hole],
        };
        let err = generate(&spec).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        assert!(SurfaceKind::Cylinder2d {
            radius: 1.0,
            ambient: 3
        }
        .validate()
        .is_err());
        assert!(SurfaceKind::Cylinder6d {
            radius: 1.5,
            ambient: 6
        }
        .validate()
        .is_err());
        assert!(SurfaceKind::Annulus {
            inner: 2.0,
            outer: 1.0,
            ambient: 2
        }
        .validate()
        .is_err());
        assert!(SurfaceKind::Circle {
            radius: 0.0,
            ambient: 2
        }
        .validate()
        .is_err());
        assert!(generate(&GeneratorSpec::clean(
            SurfaceKind::Circle {
                radius: 1.0,
                ambient: 2
            },
            0,
            1
        ))
        .is_err());
    }

    #[test]
    fn circle_points_cover_the_whole_circle() {
        let kind = SurfaceKind::Circle {
            radius: 1.0,
            ambient: 2,
        };
        let p = generate(&GeneratorSpec::clean(kind, 400, 3)).unwrap();
        let mut quadrants = [0usize; 4];
        for pt in p.iter_points() {
            let phi = section_angle(pt[0], pt[1]);
            quadrants[((phi / TAU) * 4.0) as usize % 4] += 1;
        }
        assert!(quadrants.iter().all(|&c| c > 50), "{quadrants:?}");
    }
}
