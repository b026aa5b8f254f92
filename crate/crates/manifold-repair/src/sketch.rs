//! Randomized orthonormal sketching for cheap norm evaluation in high
//! ambient dimension.
//!
//! Construction (all randomness from the seeded [`crate::rng`] stream):
//!
//! 1. sample `G ∈ R^{J×m}` with i.i.d. standard normal entries, row-major;
//! 2. form `B = Pᵀ G ∈ R^{n×m}`;
//! 3. orthonormalize `B`'s columns (modified Gram–Schmidt with one
//!    reorthogonalization pass) and use the resulting `S` as the reduction
//!    matrix.
//!
//! `‖Sᵀx‖ ≤ ‖x‖` always, with equality on `span(B)` — which contains the
//! differences the optimizers care about, because the data itself spans
//! `B`'s range. Sketched coordinates are used **only** as kernel/norm
//! arguments; every point update happens in the full ambient space.
//!
//! Rank-deficient inputs (data lying in a subspace thinner than the
//! requested `m`) are handled by dropping dependent columns; the operator
//! then carries `reduced_from = Some(requested_m)`.

use crate::cloud::{dot, norm, PointCloud};
use crate::error::{Error, Result};
use crate::rng::{DeterministicRng, STREAM_SKETCH};

/// Ambient dimension above which sketching is enabled by default, and the
/// default sketch dimension.
pub const DEFAULT_SKETCH_THRESHOLD: usize = 40;

/// Orthonormal-column reduction operator `S ∈ R^{n×m}`.
#[derive(Debug, Clone)]
pub struct SketchOperator {
    /// Column-major storage: column `k` occupies `cols[k*n..(k+1)*n]`.
    cols: Vec<f64>,
    n: usize,
    m: usize,
    seed: u64,
    /// Set when rank deficiency forced fewer columns than requested.
    pub reduced_from: Option<usize>,
}

/// Default sketch dimension rule: disabled entirely for `n ≤ 40`,
/// otherwise `min(40, n, J)`.
pub fn auto_sketch_dim(n: usize, j: usize) -> Option<usize> {
    if n <= DEFAULT_SKETCH_THRESHOLD {
        None
    } else {
        Some(DEFAULT_SKETCH_THRESHOLD.min(n).min(j))
    }
}

/// Builds the sketch operator from `P` (steps 1–3 above).
pub fn build_sketch(p: &PointCloud, m: usize, seed: u64) -> Result<SketchOperator> {
    let n = p.ambient_dim();
    let j = p.count();
    if m == 0 || m > n || m > j {
        return Err(Error::invalid(format!(
            "sketch dimension {m} must lie in [1, min(n={n}, J={j})]"
        )));
    }
    let mut rng = DeterministicRng::new(seed, STREAM_SKETCH);
    // G row-major, drawn in (j, k) order — part of the bitstream contract.
    let mut g = vec![0.0; j * m];
    for row in 0..j {
        for k in 0..m {
            g[row * m + k] = rng.standard_normal();
        }
    }
    // B = Pᵀ G, built column by column.
    let mut b = vec![0.0; n * m];
    for row in 0..j {
        let point = p.point(row);
        for k in 0..m {
            let gv = g[row * m + k];
            let col = &mut b[k * n..(k + 1) * n];
            for d in 0..n {
                col[d] += point[d] * gv;
            }
        }
    }
    // Modified Gram–Schmidt with one reorthogonalization pass; columns
    // that collapse below tol × (original norm) are dropped.
    let mut cols: Vec<f64> = Vec::with_capacity(n * m);
    let mut kept = 0usize;
    for k in 0..m {
        let mut v = b[k * n..(k + 1) * n].to_vec();
        let norm0 = norm(&v);
        if norm0 == 0.0 {
            continue;
        }
        for _pass in 0..2 {
            for q in 0..kept {
                let qcol = &cols[q * n..(q + 1) * n];
                let proj = dot(qcol, &v);
                for d in 0..n {
                    v[d] -= proj * qcol[d];
                }
            }
        }
        let nv = norm(&v);
        if nv <= 1e-12 * norm0 {
            continue; // linearly dependent on the kept columns
        }
        for d in 0..n {
            v[d] /= nv;
        }
        cols.extend_from_slice(&v);
        kept += 1;
    }
    if kept == 0 {
        return Err(Error::insufficient(
            "sketch construction failed: P has rank 0 (all points at the origin?)",
        ));
    }
    Ok(SketchOperator {
        cols,
        n,
        m: kept,
        seed,
        reduced_from: if kept < m { Some(m) } else { None },
    })
}

impl SketchOperator {
    /// Reduced dimension (after any rank-deficiency reduction).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Ambient dimension `n`.
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Seed the Gaussian draw used.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Borrow column `k` (an orthonormal basis vector of the sketch range).
    pub fn column(&self, k: usize) -> &[f64] {
        &self.cols[k * self.n..(k + 1) * self.n]
    }

    /// `Sᵀx` into a caller-provided buffer of length `m`.
    pub fn project_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.m);
        for k in 0..self.m {
            out[k] = dot(self.column(k), x);
        }
    }

    /// `Sᵀx` as a fresh vector.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::invalid(format!(
                "cannot project a {}-vector with an n={} sketch",
                x.len(),
                self.n
            )));
        }
        let mut out = vec![0.0; self.m];
        self.project_into(x, &mut out);
        Ok(out)
    }

    /// Projects every point of a cloud.
    pub fn project_cloud(&self, cloud: &PointCloud) -> Result<PointCloud> {
        if cloud.ambient_dim() != self.n {
            return Err(Error::invalid(format!(
                "cannot project a cloud of dimension {} with an n={} sketch",
                cloud.ambient_dim(),
                self.n
            )));
        }
        let mut coords = vec![0.0; cloud.count() * self.m];
        for (i, pt) in cloud.iter_points().enumerate() {
            self.project_into(pt, &mut coords[i * self.m..(i + 1) * self.m]);
        }
        PointCloud::from_flat(coords, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;

    fn random_cloud(rng: &mut DeterministicRng, count: usize, dim: usize) -> PointCloud {
        let coords: Vec<f64> = (0..count * dim).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        PointCloud::from_flat(coords, dim).unwrap()
    }

    fn max_gram_deviation(s: &SketchOperator) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..s.m() {
            for b in 0..s.m() {
                let g = dot(s.column(a), s.column(b));
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    #[test]
    fn identity_cloud_full_sketch_is_an_isometry() {
        let n = 8;
        let mut coords = vec![0.0; n * n];
        for d in 0..n {
            coords[d * n + d] = 1.0;
        }
        let p = PointCloud::from_flat(coords, n).unwrap();
        let s = build_sketch(&p, n, 3).unwrap();
        assert_eq!(s.m(), n);
        assert!(max_gram_deviation(&s) < 1e-10);
        let mut rng = DeterministicRng::new(4, 0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
            let y = s.project(&x).unwrap();
            assert!((norm(&y) - norm(&x)).abs() <= 1e-10 * norm(&x));
        }
    }

    #[test]
    fn columns_are_orthonormal_and_projection_is_a_contraction() {
        let mut rng = DeterministicRng::new(12, 0);
        let p = random_cloud(&mut rng, 60, 20);
        let s = build_sketch(&p, 5, 99).unwrap();
        assert_eq!(s.m(), 5);
        assert!(max_gram_deviation(&s) < 1e-10);
        for k in 0..s.m() {
            let e = s.project(s.column(k)).unwrap();
            for (idx, &v) in e.iter().enumerate() {
                let want = if idx == k { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-10);
            }
        }
        for _ in 0..50 {
            let x: Vec<f64> = (0..20).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
            assert!(norm(&s.project(&x).unwrap()) <= norm(&x) * (1.0 + 1e-10));
        }
        assert_eq!(norm(&s.project(&vec![0.0; 20]).unwrap()), 0.0);
    }

    #[test]
    fn isometric_on_the_sketch_range() {
        let mut rng = DeterministicRng::new(7, 0);
        let p = random_cloud(&mut rng, 80, 25);
        let s = build_sketch(&p, 10, 1).unwrap();
        // span(S) = span(B); vectors S·w lie in the range by construction.
        for _ in 0..100 {
            let w: Vec<f64> = (0..s.m()).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let mut x = vec![0.0; 25];
            for k in 0..s.m() {
                let col = s.column(k);
                for d in 0..25 {
                    x[d] += w[k] * col[d];
                }
            }
            let nx = norm(&x);
            assert!((norm(&s.project(&x).unwrap()) - nx).abs() < 1e-8 * nx.max(1e-12));
        }
    }

    #[test]
    fn deterministic_in_all_inputs() {
        let mut rng = DeterministicRng::new(3, 0);
        let p = random_cloud(&mut rng, 50, 45);
        let a = build_sketch(&p, 12, 77).unwrap();
        let b = build_sketch(&p, 12, 77).unwrap();
        assert_eq!(a.cols, b.cols);
        let c = build_sketch(&p, 12, 78).unwrap();
        assert_ne!(a.cols, c.cols);
    }

    #[test]
    fn rank_deficiency_reduces_m_with_a_marker() {
        // Points confined to a 2-dimensional subspace of R^6.
        let mut rng = DeterministicRng::new(21, 0);
        let u = [1.0, 0.0, 2.0, 0.0, -1.0, 0.5];
        let v = [0.0, 1.0, 1.0, -1.0, 0.0, 0.25];
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let (a, b) = (rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
                (0..6).map(|d| a * u[d] + b * v[d]).collect()
            })
            .collect();
        let p = PointCloud::from_rows(&rows).unwrap();
        let s = build_sketch(&p, 5, 9).unwrap();
        assert_eq!(s.m(), 2);
        assert_eq!(s.reduced_from, Some(5));
        assert!(max_gram_deviation(&s) < 1e-10);
    }

    #[test]
    fn subspace_data_distances_are_preserved() {
        // d = 3 subspace of R^50, m = 10 ≥ d: pairwise distances preserved.
        let mut rng = DeterministicRng::new(33, 0);
        let basis: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..50).map(|_| rng.uniform_in(-1.0, 1.0)).collect())
            .collect();
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| {
                let c: Vec<f64> = (0..3).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
                (0..50)
                    .map(|d| (0..3).map(|b| c[b] * basis[b][d]).sum())
                    .collect()
            })
            .collect();
        let p = PointCloud::from_rows(&rows).unwrap();
        let s = build_sketch(&p, 10, 5).unwrap();
        let proj = s.project_cloud(&p).unwrap();
        for i in 0..10 {
            for jj in (i + 1)..10 {
                let full = crate::cloud::dist(p.point(i), p.point(jj));
                let red = crate::cloud::dist(proj.point(i), proj.point(jj));
                assert!(
                    (full - red).abs() < 1e-6 * full.max(1e-12),
                    "pair ({i},{jj}): {full} vs {red}"
                );
            }
        }
    }

    #[test]
    fn input_validation() {
        let mut rng = DeterministicRng::new(1, 0);
        let p = random_cloud(&mut rng, 10, 5);
        assert!(build_sketch(&p, 0, 0).is_err());
        assert!(build_sketch(&p, 6, 0).is_err()); // m > n
        let tall = random_cloud(&mut rng, 3, 5);
        assert!(build_sketch(&tall, 4, 0).is_err()); // m > J
        let s = build_sketch(&p, 3, 0).unwrap();
        assert!(s.project(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn auto_rule() {
        assert_eq!(auto_sketch_dim(3, 1000), None);
        assert_eq!(auto_sketch_dim(40, 1000), None);
        assert_eq!(auto_sketch_dim(60, 1000), Some(40));
        assert_eq!(auto_sketch_dim(60, 30), Some(30));
        assert_eq!(auto_sketch_dim(41, 41), Some(40));
    }
}
