//! The `PointCloud` container and small dense-vector helpers.
//!
//! Clouds are stored row-major (`count × ambient_dim`) with every entry
//! validated finite on construction. Points are exposed as `&[f64]` slices;
//! all heavier linear algebra in this crate works directly on slices, which
//! keeps the hot loops allocation-free.

use crate::error::{Error, Result};

/// A dense set of points in `R^n`, one row per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    count: usize,
    dim: usize,
}

impl PointCloud {
    /// Builds a cloud from a flat row-major buffer.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "coordinate buffer length {} is not a positive multiple of dimension {}",
                coords.len(),
                dim
            )));
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate at point {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        let count = coords.len() / dim;
        Ok(PointCloud { coords, count, dim })
    }

    /// Builds a cloud from per-point rows (all rows must share one length).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = match rows.first() {
            Some(r) => r.len(),
            None => return Err(Error::invalid("cannot build a cloud from zero rows")),
        };
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    dim
                )));
            }
            coords.extend_from_slice(row);
        }
        PointCloud::from_flat(coords, dim)
    }

    /// Number of points.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Ambient dimension `n`.
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Borrow point `i` as a coordinate slice.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterator over all points in index order.
    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The raw row-major buffer.
    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// New cloud containing the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("cannot select zero points"));
        }
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.count {
                return Err(Error::invalid(format!(
                    "point index {} out of range for cloud of {} points",
                    i, self.count
                )));
            }
            coords.extend_from_slice(self.point(i));
        }
        PointCloud::from_flat(coords, self.dim)
    }

    /// Consumes the cloud and returns the flat buffer.
    pub fn into_flat(self) -> Vec<f64> {
        self.coords
    }
}

/// Squared Euclidean distance between two equal-length slices.
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for k in 0..a.len() {
        let d = a[k] - b[k];
        s += d * d;
    }
    s
}

/// Euclidean distance between two equal-length slices.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}

/// Euclidean norm of a slice.
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Squared Euclidean norm of a slice.
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// Dot product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `acc += c * (a - b)`, the building block of every gradient sum.
pub fn accumulate_scaled_diff(acc: &mut [f64], a: &[f64], b: &[f64], c: f64) {
    debug_assert_eq!(acc.len(), a.len());
    debug_assert_eq!(acc.len(), b.len());
    for k in 0..acc.len() {
        acc[k] += c * (a[k] - b[k]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_flat_validates_shape_and_finiteness() {
        assert!(PointCloud::from_flat(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(PointCloud::from_flat(vec![], 3).is_err());
        assert!(PointCloud::from_flat(vec![1.0, f64::NAN], 2).is_err());
        assert!(PointCloud::from_flat(vec![1.0, f64::INFINITY], 2).is_err());
        let c = PointCloud::from_flat(vec![1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(c.count(), 2);
        assert_eq!(c.ambient_dim(), 2);
        assert_eq!(c.point(1), &[3.0, 4.0]);
    }

    #[test]
    fn from_rows_rejects_ragged_input() {
        let err = PointCloud::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }

    #[test]
    fn non_finite_error_names_the_point_and_column() {
        let err =
            PointCloud::from_flat(vec![0.0, 0.0, 0.0, f64::NAN, 0.0, 0.0], 3).unwrap_err();
        assert!(err.to_string().contains("point 1"));
        assert!(err.to_string().contains("column 0"));
    }

    #[test]
    fn select_reorders_and_bounds_checks() {
        let c = PointCloud::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let s = c.select(&[2, 0]).unwrap();
        assert_eq!(s.point(0), &[2.0]);
        assert_eq!(s.point(1), &[0.0]);
        assert!(c.select(&[3]).is_err());
        assert!(c.select(&[]).is_err());
    }

    #[test]
    fn vector_helpers_agree_with_hand_values() {
        let a = [1.0, 2.0, 2.0];
        let b = [0.0, 0.0, 0.0];
        assert_eq!(sq_dist(&a, &b), 9.0);
        assert_eq!(dist(&a, &b), 3.0);
        assert_eq!(norm(&a), 3.0);
        assert_eq!(norm_sq(&a), 9.0);
        assert_eq!(dot(&a, &[1.0, 1.0, 0.5]), 4.0);
        let mut acc = [0.0, 0.0, 0.0];
        accumulate_scaled_diff(&mut acc, &a, &b, 2.0);
        assert_eq!(acc, [2.0, 4.0, 4.0]);
    }
}
