//! Scalar kernels and coefficient formulas shared by the optimizers.
//!
//! * `‖v‖_{H_ε} = √(‖v‖² + ε)` — the smoothed norm that makes the
//!   L1-median-style attraction term differentiable at zero.
//! * `w(s, h) = exp(−s/h²)` — the Gaussian locality weight (argument is the
//!   squared distance).
//! * `η(r) = 1/(3r³)` — the repulsion profile, singular at 0 and clamped at
//!   a distance floor.
//! * `α`, `β` — the per-pair coefficients of the attraction and repulsion
//!   gradients.
//! * `b(r) = (1 − 2r²/h₂²)·exp(−r²/h₂²)` — the diagnostic profile whose
//!   sign structure drives hole-directed motion; used by tests and
//!   diagnostics only.

use crate::cloud::sq_dist;
use crate::error::{Error, Result};

/// Default smoothing parameter ε of the `H_ε` norm.
pub const DEFAULT_EPS_H: f64 = 0.1;

/// Kernel support sizes and numerical guards used by every gradient sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Support size of the attraction weight `w` (P-neighborhood scale).
    pub h1: f64,
    /// Support size of the repulsion weight `ŵ` (Q-neighborhood scale).
    pub h2: f64,
    /// Smoothing parameter of the `H_ε` norm.
    pub eps_h: f64,
    /// Distance floor applied before evaluating singular kernels.
    pub r_floor: f64,
}

impl KernelParams {
    /// Standard parameters: ε = 0.1 and a floor of `1e-9·min(h1, h2)`.
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        KernelParams::with_parts(h1, h2, DEFAULT_EPS_H, 1e-9 * h1.min(h2))
    }

    /// Fully explicit constructor. `eps_h = 0` (plain Euclidean norm) is
    /// accepted for diagnostics; the optimizers always run with ε > 0.
    pub fn with_parts(h1: f64, h2: f64, eps_h: f64, r_floor: f64) -> Result<Self> {
        if !(h1 > 0.0 && h1.is_finite()) || !(h2 > 0.0 && h2.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel supports must be positive and finite, got h1={h1}, h2={h2}"
            )));
        }
        if !(eps_h >= 0.0 && eps_h.is_finite()) {
            return Err(Error::invalid(format!(
                "H_eps parameter must be nonnegative, got {eps_h}"
            )));
        }
        if !(r_floor > 0.0) || r_floor > 1e-6 * h1.min(h2) {
            return Err(Error::invalid(format!(
                "distance floor must lie in (0, 1e-6*min(h1,h2)], got {r_floor}"
            )));
        }
        Ok(KernelParams {
            h1,
            h2,
            eps_h,
            r_floor,
        })
    }

    /// Truncation radius of the attraction kernel (four standard
    /// deviations of `w`, beyond which the remaining mass is negligible).
    pub fn attraction_cutoff(&self) -> f64 {
        2.0 * 2f64.sqrt() * self.h1
    }

    /// Truncation radius of the repulsion kernel.
    pub fn repulsion_cutoff(&self) -> f64 {
        2.0 * 2f64.sqrt() * self.h2
    }
}

/// Smoothed norm `√(‖v‖² + ε)`.
pub fn h_eps_norm(v: &[f64], eps_h: f64) -> Result<f64> {
    if !(eps_h >= 0.0 && eps_h.is_finite()) {
        return Err(Error::invalid(format!(
            "H_eps parameter must be nonnegative, got {eps_h}"
        )));
    }
    let mut s = 0.0;
    for &x in v {
        if !x.is_finite() {
            return Err(Error::invalid("non-finite entry in vector"));
        }
        s += x * x;
    }
    Ok((s + eps_h).sqrt())
}

/// Gaussian weight `exp(−sq_dist/h²)`.
pub fn gaussian_weight(sq_dist: f64, h: f64) -> f64 {
    debug_assert!(sq_dist >= 0.0 && h > 0.0);
    (-sq_dist / (h * h)).exp()
}

/// Repulsion profile `1/(3r³)` with the distance floored at `r_floor`.
pub fn eta(r: f64, r_floor: f64) -> f64 {
    let r = r.max(r_floor);
    1.0 / (3.0 * r * r * r)
}

/// Attraction coefficient for the pair `(q_{i'}, p_j)`:
/// `α = w/d_H · (1 − (2/h1²)·d_H²)` with `d_H = ‖q−p‖_{H_ε}` and
/// `w = exp(−‖q−p‖²/h1²)`. Negative once `d_H > h1/√2`.
pub fn alpha_coeff(qi: &[f64], pj: &[f64], params: &KernelParams) -> Result<f64> {
    if qi.len() != pj.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            qi.len(),
            pj.len()
        )));
    }
    Ok(alpha_from_sq_dist(sq_dist(qi, pj), params))
}

/// `alpha_coeff` on a precomputed squared distance (hot path; the squared
/// distance may come from sketched coordinates).
pub fn alpha_from_sq_dist(sq: f64, params: &KernelParams) -> f64 {
    let d_h = (sq + params.eps_h).sqrt().max(params.r_floor);
    let w = gaussian_weight(sq, params.h1);
    w * (1.0 - 2.0 / (params.h1 * params.h1) * d_h * d_h) / d_h
}

/// Repulsion coefficient for the pair `(q_{i'}, q_i)`:
/// `β = ŵ/r · (|η′(r)| + (2/h2²)·η(r)·r)` with `η′(r) = −1/r⁴`.
/// Strictly positive for every `r > 0`.
pub fn beta_coeff(qi: &[f64], qi2: &[f64], params: &KernelParams) -> Result<f64> {
    if qi.len() != qi2.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            qi.len(),
            qi2.len()
        )));
    }
    Ok(beta_from_dist(sq_dist(qi, qi2).sqrt(), params))
}

/// `beta_coeff` on a precomputed distance (hot path).
pub fn beta_from_dist(r: f64, params: &KernelParams) -> f64 {
    let r = r.max(params.r_floor);
    let w = gaussian_weight(r * r, params.h2);
    let eta_abs_prime = 1.0 / (r * r * r * r);
    let eta_val = 1.0 / (3.0 * r * r * r);
    (w / r) * (eta_abs_prime + 2.0 / (params.h2 * params.h2) * eta_val * r)
}

/// Diagnostic profile `b(r) = (1 − 2r²/h2²)·exp(−r²/h2²)`; nonnegative on
/// `[0, h2/√2]`, negative beyond, with the negative lobe driving
/// hole-directed motion.
pub fn b_profile(r: f64, h2: f64) -> f64 {
    debug_assert!(r >= 0.0 && h2 > 0.0);
    let t = r * r / (h2 * h2);
    (1.0 - 2.0 * t) * (-t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn h_eps_norm_matches_hand_values() {
        // Frozen against independent high-precision evaluation.
        assert!(rel_err(h_eps_norm(&[0.0, 0.0], 0.1).unwrap(), 0.31622776601683794) < 1e-15);
        assert_eq!(h_eps_norm(&[3.0, 4.0], 0.0).unwrap(), 5.0);
        assert!(rel_err(h_eps_norm(&[1.0, 2.0, 2.0], 0.1).unwrap(), 3.0166206257996712) < 1e-15);
        assert!(h_eps_norm(&[f64::NAN], 0.1).is_err());
        assert!(h_eps_norm(&[1.0], -0.1).is_err());
    }

    #[test]
    fn h_eps_norm_is_bounded_below_and_smooth() {
        let mut rng = DeterministicRng::new(101, 0);
        let eps = 0.1;
        for _ in 0..50 {
            let scale = rng.uniform_in(0.1, 10.0);
            let v: Vec<f64> = (0..4).map(|_| rng.uniform_in(-1.0, 1.0) * scale).collect();
            let n = h_eps_norm(&v, eps).unwrap();
            assert!(n >= eps.sqrt());
            // Gradient d‖v‖_H/dv_k = v_k/‖v‖_H versus central differences.
            let step = 1e-5;
            for k in 0..v.len() {
                let mut vp = v.clone();
                let mut vm = v.clone();
                vp[k] += step;
                vm[k] -= step;
                let fd = (h_eps_norm(&vp, eps).unwrap() - h_eps_norm(&vm, eps).unwrap())
                    / (2.0 * step);
                let analytic = v[k] / n;
                assert!(
                    (fd - analytic).abs() / analytic.abs().max(1e-6) < 1e-6,
                    "coordinate {k}: fd={fd}, analytic={analytic}"
                );
            }
        }
    }

    #[test]
    fn gaussian_weight_hand_values_and_exponential_law() {
        assert_eq!(gaussian_weight(0.0, 2.0), 1.0);
        let h = 1.7;
        assert!(rel_err(gaussian_weight(h * h, h), 0.36787944117144233) < 1e-15);
        assert!(rel_err(gaussian_weight(8.0 * h * h, h), 3.3546262790251185e-4) < 1e-14);
        let mut rng = DeterministicRng::new(7, 0);
        for _ in 0..200 {
            let s = rng.uniform_in(0.0, 5.0);
            let t = rng.uniform_in(0.0, 5.0);
            let lhs = gaussian_weight(s, h) * gaussian_weight(t, h);
            let rhs = gaussian_weight(s + t, h);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_hand_values_and_floor() {
        let floor = 1e-9;
        assert!(rel_err(eta(1.0, floor), 1.0 / 3.0) < 1e-15);
        assert!(rel_err(eta(2.0, floor), 1.0 / 24.0) < 1e-15);
        assert_eq!(eta(0.0, floor), 1.0 / (3.0 * floor * floor * floor));
        assert!(eta(0.5, floor) > eta(1.0, floor), "monotone nonincreasing");
    }

    #[test]
    fn alpha_hand_values() {
        let params = KernelParams::with_parts(1.0, 1.0, 0.1, 1e-9).unwrap();
        // Coincident pair: d_H = sqrt(0.1), w = 1 -> 0.8/sqrt(0.1).
        let a = alpha_coeff(&[0.0, 0.0], &[0.0, 0.0], &params).unwrap();
        assert!(rel_err(a, 2.5298221281347035) < 1e-15);
        // Far pair: Gaussian decay dominates.
        let far = alpha_coeff(&[0.0, 0.0], &[4.0, 0.0], &params).unwrap();
        assert!(far.abs() < 1e-6);
        // Zero crossing at d_H = h1/sqrt(2) (take eps = 0, h1 = sqrt(2)).
        let p0 = KernelParams::with_parts(2f64.sqrt(), 1.0, 0.0, 1e-9).unwrap();
        let z = alpha_coeff(&[1.0, 0.0], &[0.0, 0.0], &p0).unwrap();
        assert!(z.abs() < 1e-15);
        assert!(alpha_coeff(&[1.0], &[1.0, 2.0], &params).is_err());
    }

    #[test]
    fn alpha_changes_sign_exactly_once() {
        let params = KernelParams::with_parts(1.0, 1.0, 0.1, 1e-9).unwrap();
        // In terms of the raw distance r, the crossing sits at
        // r* = sqrt(h1^2/2 - eps).
        let r_star = (0.5 - 0.1f64).sqrt();
        let f = |r: f64| alpha_from_sq_dist(r * r, &params);
        let n = 40_000;
        let mut changes = 0;
        let mut prev = f(1e-6);
        for k in 1..=n {
            let r = 4.0 * k as f64 / n as f64;
            let cur = f(r);
            if prev.signum() != cur.signum() {
                changes += 1;
                // Bisect to locate the crossing.
                let (mut lo, mut hi) = (4.0 * (k - 1) as f64 / n as f64, r);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid).signum() == f(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                assert!((0.5 * (lo + hi) - r_star).abs() < 1e-8);
            }
            prev = cur;
        }
        assert_eq!(changes, 1);
    }

    #[test]
    fn beta_hand_values_and_positivity() {
        let params = KernelParams::with_parts(1.0, 1.0, 0.1, 1e-9).unwrap();
        let b = beta_coeff(&[1.0, 0.0], &[0.0, 0.0], &params).unwrap();
        // (e^-1)(1 + 2/3) = (5/3)e^-1.
        assert!(rel_err(b, 0.6131324019524039) < 1e-14);
        let b_far = beta_from_dist(4.0, &params);
        assert!(b_far < 1e-6 * b);
        for k in 1..=1000 {
            let r = 10.0 * k as f64 / 1000.0;
            assert!(beta_from_dist(r, &params) > 0.0);
        }
        assert!(beta_from_dist(0.0, &params).is_finite(), "floor guards r=0");
    }

    #[test]
    fn b_profile_hand_values_and_sign_structure() {
        let h2 = 1.0;
        assert_eq!(b_profile(0.0, h2), 1.0);
        assert!(b_profile(h2 / 2f64.sqrt(), h2).abs() < 1e-15);
        // Frozen values at the interval midpoints used by the diagnostics.
        let a_pt = (1.0 + 3f64.sqrt()) / (2.0 * 2f64.sqrt());
        let c_pt = (4.0 + 3f64.sqrt()) / (2.0 * 2f64.sqrt());
        assert!(rel_err(b_profile(a_pt, h2), -0.34066566468860485) < 1e-14);
        assert!(rel_err(b_profile(c_pt, h2), -0.11871695608206261) < 1e-14);
        for h2 in [0.5, 1.0, 2.0] {
            let cutoff = 2.0 * 2f64.sqrt() * h2;
            let zero = h2 / 2f64.sqrt();
            for k in 0..10_000 {
                let r = cutoff * k as f64 / 9_999.0;
                let b = b_profile(r, h2);
                if r < zero * (1.0 - 1e-12) {
                    assert!(b > 0.0, "r={r}, b={b}");
                } else if r > zero * (1.0 + 1e-12) {
                    assert!(b < 0.0, "r={r}, b={b}");
                }
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(KernelParams::new(1.0, 2.0).is_ok());
        assert!(KernelParams::new(0.0, 1.0).is_err());
        assert!(KernelParams::new(1.0, -1.0).is_err());
        assert!(KernelParams::with_parts(1.0, 1.0, -0.1, 1e-9).is_err());
        assert!(KernelParams::with_parts(1.0, 1.0, 0.1, 0.0).is_err());
        // Floor above 1e-6*min(h1,h2) rejected.
        assert!(KernelParams::with_parts(1.0, 1.0, 0.1, 1e-3).is_err());
        let p = KernelParams::new(2.0, 3.0).unwrap();
        assert_eq!(p.eps_h, DEFAULT_EPS_H);
        assert_eq!(p.r_floor, 1e-9 * 2.0);
        assert!((p.attraction_cutoff() - 2.0 * 2f64.sqrt() * 2.0).abs() < 1e-15);
        assert!((p.repulsion_cutoff() - 2.0 * 2f64.sqrt() * 3.0).abs() < 1e-15);
    }
}
