//! The 1-Geo test: distance-based message passing with multiset embeddings.
//!
//! Complete on clouds whose geometric degrees are pairwise distinct; fails on
//! regular configurations such as the Cholesky pairs in [`crate::instances`].

use nalgebra::DMatrix;

use crate::cloud::{dist, PointCloud};
use crate::embed::{separating_dim, EmbedParams, PsiKind};
use crate::error::{GeoError, Result};
use crate::feature::FeatureVector;
use crate::par::map_range;
use crate::rng::Seed;

/// Sorted distances from point `i` to every point, itself included.
pub fn geometric_degree(x: &PointCloud, i: usize) -> Result<Vec<f64>> {
    if i >= x.len() {
        return Err(GeoError::Index {
            index: i,
            n: x.len(),
        });
    }
    let mut out: Vec<f64> = (0..x.len())
        .map(|j| {
            if i == j {
                0.0
            } else {
                dist(x.point(i), x.point(j))
            }
        })
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// The geometric degrees of all points, in lexicographic order.
pub fn degree_histogram(x: &PointCloud) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = (0..x.len())
        .map(|i| geometric_degree(x, i).unwrap())
        .collect();
    all.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    all
}

/// Largest entrywise difference between two histograms of the same shape.
pub fn histogram_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

/// True when no two geometric degrees agree within `tol` (ℓ∞).
pub fn is_distinct(x: &PointCloud, tol: f64) -> bool {
    let degrees: Vec<Vec<f64>> = (0..x.len())
        .map(|i| geometric_degree(x, i).unwrap())
        .collect();
    for i in 0..degrees.len() {
        for j in i + 1..degrees.len() {
            let gap = degrees[i]
                .iter()
                .zip(&degrees[j])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if gap < tol {
                return false;
            }
        }
    }
    true
}

/// Embedding parameters for `T` refinement rounds plus the readout.
#[derive(Debug, Clone)]
pub struct Geo1Config {
    n: usize,
    hidden: usize,
    steps: Vec<EmbedParams>,
    readout: EmbedParams,
}

impl Geo1Config {
    /// Two rounds, hidden width `6n + 1`.
    pub fn new(n: usize, psi: PsiKind, seed: Seed) -> Result<Self> {
        Self::with_dims(n, 2, separating_dim(3 * n), psi, seed)
    }

    pub fn with_dims(
        n: usize,
        rounds: usize,
        hidden: usize,
        psi: PsiKind,
        seed: Seed,
    ) -> Result<Self> {
        if n < 2 {
            return Err(GeoError::TooFewPoints { need: 2, got: n });
        }
        if rounds == 0 || hidden == 0 {
            return Err(GeoError::Invalid(
                "1-Geo needs T ≥ 1 and a positive hidden width".into(),
            ));
        }
        let steps = (1..=rounds)
            .map(|t| {
                EmbedParams::sample(
                    hidden,
                    hidden + 1,
                    n - 1,
                    hidden,
                    psi,
                    seed.derive(&format!("geo1/step{t}")),
                )
            })
            .collect();
        let readout = EmbedParams::sample(hidden, hidden, n, 0, psi, seed.derive("geo1/readout"));
        Ok(Geo1Config {
            n,
            hidden,
            steps,
            readout,
        })
    }

    /// Custom parameters; the shapes must chain (`F_t = K`, `D_t = K + 1`, `N_t = n − 1`).
    pub fn from_params(n: usize, steps: Vec<EmbedParams>, readout: EmbedParams) -> Result<Self> {
        let hidden = readout.element_dim();
        let chained = steps.iter().all(|p| {
            p.output_dim() == hidden
                && p.vector_dim() == hidden
                && p.element_dim() == hidden + 1
                && p.multiset_size() + 1 == n
        });
        if steps.is_empty() || !chained || readout.multiset_size() != n {
            return Err(GeoError::Shape("1-Geo parameters do not chain".into()));
        }
        Ok(Geo1Config {
            n,
            hidden,
            steps,
            readout,
        })
    }

    pub fn rounds(&self) -> usize {
        self.steps.len()
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn output_dim(&self) -> usize {
        self.readout.output_dim()
    }
}

/// Node states after the configured number of rounds.
pub fn node_states(x: &PointCloud, cfg: &Geo1Config) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    if n < 2 {
        return Err(GeoError::TooFewPoints { need: 2, got: n });
    }
    if n != cfg.n {
        return Err(GeoError::Shape(format!(
            "1-Geo configured for n = {}, cloud has n = {n}",
            cfg.n
        )));
    }
    let k = cfg.hidden;
    let dists = x.distance_matrix();
    let mut h = vec![vec![0.0; k]; n];
    for params in &cfg.steps {
        let prev = &h;
        let next: Vec<Result<Vec<f64>>> = map_range(n, |i| {
            let mut cols = Vec::with_capacity((k + 1) * (n - 1));
            for (j, hj) in prev.iter().enumerate() {
                if j != i {
                    cols.extend_from_slice(hj);
                    cols.push(dists[(i, j)]);
                }
            }
            params.embed_columns(&cols, Some(&prev[i]))
        });
        h = next.into_iter().collect::<Result<_>>()?;
    }
    Ok(h)
}

pub fn f_1geo(x: &PointCloud, cfg: &Geo1Config) -> Result<FeatureVector> {
    let h = node_states(x, cfg)?;
    let flat: Vec<f64> = h.concat();
    let m = DMatrix::from_column_slice(cfg.hidden, x.len(), &flat);
    Ok(FeatureVector(cfg.readout.embed_multiset(&m)?))
}
