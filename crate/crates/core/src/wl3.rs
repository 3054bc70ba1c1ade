//! Folklore 3-WL refinement over point triplets, starting from the Gram
//! matrix of each (centered) triplet.

use nalgebra::DMatrix;

use crate::cloud::{dot, PointCloud};
use crate::embed::{separating_dim, EmbedParams, PsiKind};
use crate::error::{GeoError, Result};
use crate::feature::FeatureVector;
use crate::par::map_range;
use crate::rng::Seed;

/// Refusing larger clouds keeps the `n³` colors (and `n⁴` embedded
/// elements per round) within reach.
pub const MAX_POINTS: usize = 64;

/// Colors of all `n³` triplets, triplet `(i₁,i₂,i₃)` at index `(i₁n + i₂)n + i₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletColors {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl TripletColors {
    pub fn points(&self) -> usize {
        self.n
    }

    pub fn color_dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> &[f64] {
        let t = (i1 * self.n + i2) * self.n + i3;
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    /// All colors, one after another in triplet order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_POINTS {
        return Err(GeoError::TooLarge {
            what: "3-WL",
            max: MAX_POINTS,
            got: n,
            hint: "n³ triplet colors would not fit; use the frame-based tests",
        });
    }
    Ok(())
}

/// Row-major Gram of the three centered points of each triplet.
pub fn wl3_initial(x: &PointCloud) -> Result<TripletColors> {
    if x.dim() != 3 {
        return Err(GeoError::Shape(format!(
            "3-WL needs d = 3 (got d = {})",
            x.dim()
        )));
    }
    let n = x.len();
    guard(n)?;
    let xc = x.center();
    let g = DMatrix::from_fn(n, n, |a, b| dot(xc.point(a), xc.point(b)));
    let mut data = Vec::with_capacity(9 * n * n * n);
    for i1 in 0..n {
        for i2 in 0..n {
            for i3 in 0..n {
                let idx = [i1, i2, i3];
                for r in idx {
                    for c in idx {
                        data.push(g[(r, c)]);
                    }
                }
            }
        }
    }
    Ok(TripletColors { n, dim: 9, data })
}

/// One round: appends the embedding of `{{(C(j,i₂,i₃), C(i₁,j,i₃), C(i₁,i₂,j)) : j}}`
/// to every triplet color.
pub fn wl3_refine(colors: &TripletColors, params: &EmbedParams) -> Result<TripletColors> {
    let (n, c) = (colors.n, colors.dim);
    if params.element_dim() != 3 * c || params.multiset_size() != n {
        return Err(GeoError::Shape(format!(
            "refinement embedding expects D={}, N={}; colors need D={}, N={n}",
            params.element_dim(),
            params.multiset_size(),
            3 * c
        )));
    }
    let k = params.output_dim();
    let rows: Vec<Result<Vec<f64>>> = map_range(n * n * n, |t| {
        let (i1, i2, i3) = (t / (n * n), (t / n) % n, t % n);
        let mut cols = Vec::with_capacity(3 * c * n);
        for j in 0..n {
            cols.extend_from_slice(colors.get(j, i2, i3));
            cols.extend_from_slice(colors.get(i1, j, i3));
            cols.extend_from_slice(colors.get(i1, i2, j));
        }
        let emb = params.embed_columns(&cols, None)?;
        let mut out = Vec::with_capacity(c + k);
        out.extend_from_slice(colors.get(i1, i2, i3));
        out.extend_from_slice(&emb);
        Ok(out)
    });
    let mut data = Vec::with_capacity(n * n * n * (c + k));
    for r in rows {
        data.extend(r?);
    }
    Ok(TripletColors {
        n,
        dim: c + k,
        data,
    })
}

#[derive(Debug, Clone)]
pub struct Wl3Config {
    n: usize,
    rounds: Vec<EmbedParams>,
    readout: EmbedParams,
}

impl Wl3Config {
    /// One round, `K = 6n + 1` for every embedding.
    pub fn new(n: usize, psi: PsiKind, seed: Seed) -> Result<Self> {
        Self::with_rounds(n, 1, psi, seed)
    }

    pub fn with_rounds(n: usize, rounds: usize, psi: PsiKind, seed: Seed) -> Result<Self> {
        if n == 0 {
            return Err(GeoError::TooFewPoints { need: 1, got: 0 });
        }
        guard(n)?;
        let k = separating_dim(3 * n);
        let mut dim = 9;
        let mut params = Vec::with_capacity(rounds);
        for t in 0..rounds {
            params.push(EmbedParams::sample(
                k,
                3 * dim,
                n,
                0,
                psi,
                seed.derive(&format!("wl3/round{t}")),
            ));
            dim += k;
        }
        let readout = EmbedParams::sample(k, dim, n * n * n, 0, psi, seed.derive("wl3/readout"));
        Ok(Wl3Config {
            n,
            rounds: params,
            readout,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn output_dim(&self) -> usize {
        self.readout.output_dim()
    }
}

/// Final triplet colors after the configured rounds.
pub fn wl3_colors(x: &PointCloud, cfg: &Wl3Config) -> Result<TripletColors> {
    if x.len() != cfg.n {
        return Err(GeoError::Shape(format!(
            "3-WL configured for n = {}, cloud has n = {}",
            cfg.n,
            x.len()
        )));
    }
    let mut colors = wl3_initial(x)?;
    for params in &cfg.rounds {
        colors = wl3_refine(&colors, params)?;
    }
    Ok(colors)
}

/// Embedding of the multiset of all final triplet colors.
pub fn f_3wl(x: &PointCloud, cfg: &Wl3Config) -> Result<FeatureVector> {
    let colors = wl3_colors(x, cfg)?;
    Ok(FeatureVector(
        cfg.readout.embed_columns(&colors.data, None)?,
    ))
}
