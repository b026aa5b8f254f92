//! Resampling, denoising and hole repair for point clouds sampled from
//! low-dimensional manifolds embedded in high-dimensional space.
//!
//! The library resamples a noisy input cloud `P = {p_j}` (J points in `R^n`)
//! into a smaller, quasi-uniform, denoised cloud `Q = {q_i}` by gradient
//! descent on a non-convex cost balancing a data-attraction term `E1`
//! (a smoothed weighted L1-median) against a point-repulsion term `E2`.
//! A repairing variant adds a third term `E3` that pulls points near a known
//! hole toward the weighted mean of their neighbors, growing the sample into
//! the hole until it is covered. A density-based detector estimates hole
//! centers and radii when they are not known in advance.
//!
//! Module map:
//!
//! * [`cloud`] — the `PointCloud` container and dense vector helpers.
//! * [`kernels`] — scalar kernels and the α/β/b coefficient formulas.
//! * [`neighborhoods`] — fill distance, support-size selection, kd-tree.
//! * [`sketch`] — randomized orthonormal sketching for cheap norms in
//!   high ambient dimension.
//! * [`mlop`] — the vanilla resampling optimizer.
//! * [`rmlop`] — the repairing optimizer (hole weights, `E3`, balancing).
//! * [`holefinder`] — density-based hole localization.
//! * [`synth`] — deterministic generators for the benchmark surfaces.
//! * [`metrics`] — quasi-uniformity, coverage and order-of-approximation
//!   measurements.
//! * [`io`] — CSV/XYZ/PLY clouds, holes JSON, run configs and reports.
//! * [`cli`] — the command-line front end used by the `manifold-repair`
//!   binary.
//!
//! All randomized stages consume an explicit 64-bit seed and draw from a
//! fixed, documented bitstream ([`rng`]), so identical inputs produce
//! bitwise-identical outputs across platforms and worker counts.

pub mod cli;
pub mod cloud;
pub mod error;
pub mod holefinder;
pub mod holes;
pub mod io;
pub mod kernels;
pub mod metrics;
pub mod mlop;
pub mod neighborhoods;
pub mod rmlop;
pub mod rng;
pub mod sketch;
pub mod synth;

pub use cloud::PointCloud;
pub use error::{Error, Result};
pub use holes::HoleSpec;
