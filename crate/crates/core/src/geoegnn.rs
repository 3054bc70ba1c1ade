//! GeoEGNN convolution with fixed random parameters.
//!
//! Edge messages are built from the frame features of every ordered pair,
//! node states aggregate their outgoing messages with a multiset embedding,
//! and the global state embeds the multiset of node states. Nothing here is
//! trained: `phi_e` and `phi_eps` are random affine maps followed by a leaky
//! linear unit, square in their leading block so they are injective almost surely.

use rand_distr::{Distribution, StandardNormal};

use crate::cloud::PointCloud;
use crate::embed::{separating_dim, EmbedParams, PsiKind};
use crate::error::{GeoError, Result};
use crate::feature::FeatureVector;
use crate::geo2::{FrameContext, Orientation};
use crate::group::GroupKind;
use crate::par::map_range;
use crate::rng::Seed;

pub const LEAKY_SLOPE: f64 = 0.01;

/// `y = leaky(W·x + b)` with `W` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    inputs: usize,
    outputs: usize,
    w: Vec<f64>,
    b: Vec<f64>,
}

impl Affine {
    /// Weights `N(0, 1/inputs)`, biases `N(0, 1)`.
    pub fn sample(inputs: usize, outputs: usize, seed: Seed) -> Self {
        let mut rng = seed.rng();
        let scale = 1.0 / (inputs.max(1) as f64).sqrt();
        let w = (0..inputs * outputs)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                scale * z
            })
            .collect();
        let b = (0..outputs)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Affine {
            inputs,
            outputs,
            w,
            b,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// Applies the map to the concatenation of `parts`.
    pub fn apply(&self, parts: &[&[f64]]) -> Vec<f64> {
        debug_assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), self.inputs);
        (0..self.outputs)
            .map(|r| {
                let row = &self.w[r * self.inputs..(r + 1) * self.inputs];
                let mut acc = self.b[r];
                let mut off = 0;
                for p in parts {
                    acc += row[off..off + p.len()]
                        .iter()
                        .zip(*p)
                        .map(|(a, x)| a * x)
                        .sum::<f64>();
                    off += p.len();
                }
                leaky(acc)
            })
            .collect()
    }
}

fn leaky(v: f64) -> f64 {
    if v >= 0.0 {
        v
    } else {
        LEAKY_SLOPE * v
    }
}

#[derive(Debug, Clone)]
struct Layer {
    phi_e: Affine,
    beta: EmbedParams,
    phi_eps: Affine,
}

#[derive(Debug, Clone)]
pub struct GeoEgnnConfig {
    n: usize,
    variant: GroupKind,
    hidden: usize,
    alpha: EmbedParams,
    layers: Vec<Layer>,
    gamma: EmbedParams,
}

impl GeoEgnnConfig {
    /// One convolution, hidden and embedding sizes `6n + 1`.
    pub fn new(n: usize, variant: GroupKind, psi: PsiKind, seed: Seed) -> Result<Self> {
        Self::with_rounds(n, 1, variant, psi, seed)
    }

    pub fn with_rounds(
        n: usize,
        rounds: usize,
        variant: GroupKind,
        psi: PsiKind,
        seed: Seed,
    ) -> Result<Self> {
        if n < 3 {
            return Err(GeoError::TooFewPoints { need: 3, got: n });
        }
        if rounds == 0 {
            return Err(GeoError::Invalid(
                "GeoEGNN needs at least one convolution".into(),
            ));
        }
        let k = separating_dim(3 * n);
        let k1 = separating_dim(3 * (n - 2));
        let hidden = k;
        let m = 9 + k1;
        let edge = 2 * hidden + m;
        let messages = match variant {
            GroupKind::So => n - 1,
            GroupKind::O => 2 * (n - 1),
        };
        let alpha = EmbedParams::sample(k1, 3, n - 2, 0, psi, seed.derive("geoegnn/alpha"));
        let layers = (0..rounds)
            .map(|t| Layer {
                phi_e: Affine::sample(edge, edge, seed.derive(&format!("geoegnn/phi_e{t}"))),
                beta: EmbedParams::sample(
                    k,
                    edge,
                    messages,
                    0,
                    psi,
                    seed.derive(&format!("geoegnn/beta{t}")),
                ),
                phi_eps: Affine::sample(
                    k + hidden,
                    hidden,
                    seed.derive(&format!("geoegnn/phi_eps{t}")),
                ),
            })
            .collect();
        let gamma = EmbedParams::sample(k, hidden, n, 0, psi, seed.derive("geoegnn/gamma"));
        Ok(GeoEgnnConfig {
            n,
            variant,
            hidden,
            alpha,
            layers,
            gamma,
        })
    }

    pub fn variant(&self) -> GroupKind {
        self.variant
    }

    pub fn rounds(&self) -> usize {
        self.layers.len()
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn output_dim(&self) -> usize {
        self.gamma.output_dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoEgnnOutput {
    pub nodes: Vec<Vec<f64>>,
    pub global: FeatureVector,
}

pub fn geoegnn_forward(x: &PointCloud, cfg: &GeoEgnnConfig) -> Result<GeoEgnnOutput> {
    if x.dim() != 3 {
        return Err(GeoError::Shape(format!(
            "GeoEGNN needs d = 3 (got d = {})",
            x.dim()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(GeoError::TooFewPoints { need: 3, got: n });
    }
    if n != cfg.n {
        return Err(GeoError::Shape(format!(
            "GeoEGNN configured for n = {}, cloud has n = {n}",
            cfg.n
        )));
    }
    let xc = x.center();
    let orientations: &[Orientation] = match cfg.variant {
        GroupKind::So => &[Orientation::Pos],
        GroupKind::O => &[Orientation::Pos, Orientation::Neg],
    };
    // m[(i·n + j)·o + orientation], computed once and shared by all rounds
    let no = orientations.len();
    let ctx = FrameContext::new(&xc);
    let m: Vec<Result<Vec<f64>>> = map_range(n * n * no, |idx| {
        let (pair, o) = (idx / no, idx % no);
        let (i, j) = (pair / n, pair % n);
        if i == j {
            return Ok(Vec::new());
        }
        let (mut gram, h) = ctx.tuple_feature(&[i, j], &cfg.alpha, orientations[o])?;
        gram.extend_from_slice(&h);
        Ok(gram)
    });
    let m: Vec<Vec<f64>> = m.into_iter().collect::<Result<_>>()?;

    let mut h = vec![vec![0.0; cfg.hidden]; n];
    for layer in &cfg.layers {
        let prev = &h;
        let next: Vec<Result<Vec<f64>>> = map_range(n, |i| {
            let mut cols =
                Vec::with_capacity(layer.beta.element_dim() * layer.beta.multiset_size());
            for j in (0..n).filter(|&j| j != i) {
                for o in 0..no {
                    cols.extend(
                        layer
                            .phi_e
                            .apply(&[&prev[i], &prev[j], &m[(i * n + j) * no + o]]),
                    );
                }
            }
            let s = layer.beta.embed_columns(&cols, None)?;
            Ok(layer.phi_eps.apply(&[&s, &prev[i]]))
        });
        h = next.into_iter().collect::<Result<_>>()?;
    }
    let global = FeatureVector(cfg.gamma.embed_columns(&h.concat(), None)?);
    Ok(GeoEgnnOutput { nodes: h, global })
}

/// Scalar weight `mix(h_k, h_global)` for the equivariant readout.
#[derive(Debug, Clone)]
pub struct Mix(Affine);

impl Mix {
    pub fn sample(cfg: &GeoEgnnConfig, seed: Seed) -> Self {
        Mix(Affine::sample(
            cfg.hidden + cfg.output_dim(),
            1,
            seed.derive("geoegnn/mix"),
        ))
    }
}

/// `Σ_k mix(h_k, h_global)·x_k^c`, an `O(3)`-equivariant, translation and
/// permutation invariant vector. Needs the `O` variant.
pub fn equivariant_readout(x: &PointCloud, cfg: &GeoEgnnConfig, mix: &Mix) -> Result<[f64; 3]> {
    if cfg.variant != GroupKind::O {
        return Err(GeoError::Invalid(
            "the equivariant readout needs O(3)-invariant node states (variant o)".into(),
        ));
    }
    if mix.0.inputs() != cfg.hidden + cfg.output_dim() {
        return Err(GeoError::Shape(
            "mix map does not match the configuration".into(),
        ));
    }
    let out = geoegnn_forward(x, cfg)?;
    let xc = x.center();
    let mut acc = [0.0; 3];
    for (k, hk) in out.nodes.iter().enumerate() {
        let w = mix.0.apply(&[hk, out.global.as_slice()])[0];
        for (a, v) in acc.iter_mut().zip(xc.point(k)) {
            *a += w * v;
        }
    }
    Ok(acc)
}
