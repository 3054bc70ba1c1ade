//! Point clouds stored as `d × n` column matrices.

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};

use crate::error::{GeoError, Result};
use crate::rng::Seed;

/// `n` points in `R^d`, one per column. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: DMatrix<f64>,
}

impl PointCloud {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(GeoError::Shape(format!(
                "point cloud must have d ≥ 1 and n ≥ 1 (got {}×{})",
                points.nrows(),
                points.ncols()
            )));
        }
        if let Some(bad) = points.iter().find(|v| !v.is_finite()) {
            return Err(GeoError::Invalid(format!("non-finite coordinate {bad}")));
        }
        Ok(PointCloud { points })
    }

    /// Builds a cloud from a list of points, each of length `d`.
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let n = points.len();
        let d = points.first().map_or(0, |p| p.as_ref().len());
        if points.iter().any(|p| p.as_ref().len() != d) {
            return Err(GeoError::Shape("points have differing lengths".into()));
        }
        let flat: Vec<f64> = points
            .iter()
            .flat_map(|p| p.as_ref().iter().copied())
            .collect();
        Self::new(DMatrix::from_column_slice(d, n, &flat))
    }

    pub(crate) fn from_matrix_unchecked(points: DMatrix<f64>) -> Self {
        debug_assert!(points.iter().all(|v| v.is_finite()));
        PointCloud { points }
    }

    /// Standard Gaussian cloud.
    pub fn random_gaussian(d: usize, n: usize, seed: Seed) -> Self {
        let mut rng = seed.rng();
        let normal = Normal::new(0.0, 1.0).unwrap();
        PointCloud {
            points: DMatrix::from_fn(d, n, |_, _| normal.sample(&mut rng)),
        }
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points.as_slice()[i * d..(i + 1) * d]
    }

    pub fn as_slice(&self) -> &[f64] {
        self.points.as_slice()
    }

    pub fn max_abs(&self) -> f64 {
        self.points.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Column mean. Each coordinate is summed in ascending order of value, so
    /// the result does not depend on point order.
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.len();
        let mut row = vec![0.0; n];
        (0..self.dim())
            .map(|r| {
                for (i, slot) in row.iter_mut().enumerate() {
                    *slot = self.points[(r, i)];
                }
                row.sort_unstable_by(f64::total_cmp);
                row.iter().sum::<f64>() / n as f64
            })
            .collect()
    }

    /// Subtracts the centroid from every point.
    pub fn center(&self) -> PointCloud {
        let mean = self.centroid();
        let mut out = self.points.clone();
        for mut col in out.column_iter_mut() {
            for (v, m) in col.iter_mut().zip(&mean) {
                *v -= m;
            }
        }
        PointCloud { points: out }
    }

    /// Reflection through the hyperplane orthogonal to the first axis.
    pub fn mirror(&self) -> PointCloud {
        let mut out = self.points.clone();
        out.row_mut(0).neg_mut();
        PointCloud { points: out }
    }

    pub fn translate(&self, t: &[f64]) -> Result<PointCloud> {
        if t.len() != self.dim() {
            return Err(GeoError::Shape(format!(
                "translation of length {} for d = {}",
                t.len(),
                self.dim()
            )));
        }
        let mut out = self.points.clone();
        for mut col in out.column_iter_mut() {
            for (v, s) in col.iter_mut().zip(t) {
                *v += s;
            }
        }
        Ok(PointCloud { points: out })
    }

    /// Adds i.i.d. Gaussian noise with standard deviation `sigma` to every
    /// coordinate.
    pub fn add_noise(&self, sigma: f64, seed: Seed) -> Result<PointCloud> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(GeoError::Invalid(format!(
                "noise sigma must be ≥ 0 (got {sigma})"
            )));
        }
        if sigma == 0.0 {
            return Ok(self.clone());
        }
        let normal = Normal::new(0.0, sigma).unwrap();
        let mut rng = seed.rng();
        let mut out = self.points.clone();
        for v in out.iter_mut() {
            *v += normal.sample(&mut rng);
        }
        Ok(PointCloud { points: out })
    }

    /// `n × n` matrix of pairwise Euclidean distances.
    pub fn distance_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                dist(self.point(i.min(j)), self.point(i.max(j)))
            }
        })
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(dist(self.point(i), self.point(j)));
            }
        }
        best
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
