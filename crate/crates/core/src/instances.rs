//! Hard benchmark pairs.
//!
//! Factoring the Laplacians of two 1-WL-indistinguishable 2-regular graphs
//! (one `2N`-cycle versus two `N`-cycles) yields point clouds whose columns
//! have Gram matrix equal to the Laplacian. Every point then sees the same
//! multiset of distances (`√6` to its two neighbours, `2` to the rest), so
//! distance-based message passing cannot tell the clouds apart.

use nalgebra::DMatrix;

use crate::cloud::PointCloud;
use crate::error::{GeoError, Result};
use crate::group::{GroupElement, GroupKind};
use crate::io::{format_pair, header_fields, parse_pair};
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Equivalent,
    Inequivalent,
    Unknown,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Equivalent => "EQUIVALENT",
            Label::Inequivalent => "INEQUIVALENT",
            Label::Unknown => "UNKNOWN",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EQUIVALENT" => Ok(Label::Equivalent),
            "INEQUIVALENT" => Ok(Label::Inequivalent),
            "UNKNOWN" => Ok(Label::Unknown),
            other => Err(GeoError::Invalid(format!("unknown label \"{other}\""))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InstancePair {
    pub name: String,
    pub x: PointCloud,
    pub y: PointCloud,
    pub label: Label,
    pub group: GroupKind,
}

impl InstancePair {
    pub fn new(
        name: impl Into<String>,
        x: PointCloud,
        y: PointCloud,
        label: Label,
        group: GroupKind,
    ) -> Result<Self> {
        if x.dim() != y.dim() || x.len() != y.len() {
            return Err(GeoError::Shape("pair clouds differ in shape".into()));
        }
        Ok(InstancePair {
            name: name.into(),
            x,
            y,
            label,
            group,
        })
    }

    /// Reads a pair file. The optional header fields `name`, `label` and
    /// `group` fill in the metadata; otherwise the label is `UNKNOWN`, the
    /// group `so` and the name `default_name`.
    pub fn from_text(text: &str, default_name: &str) -> Result<Self> {
        let (x, y) = parse_pair(text)?;
        let mut name = default_name.to_string();
        let mut label = Label::Unknown;
        let mut group = GroupKind::So;
        for (k, v) in header_fields(text) {
            match k.as_str() {
                "name" => name = v,
                "label" => label = v.parse()?,
                "group" => group = v.parse()?,
                _ => {}
            }
        }
        InstancePair::new(name, x, y, label, group)
    }

    /// Pair file text with `name`, `label` and `group` header lines after `extra`.
    pub fn to_text(&self, extra: &[String]) -> String {
        let mut comments = extra.to_vec();
        comments.push(format!("name: {}", self.name));
        comments.push(format!("label: {}", self.label));
        comments.push(format!("group: {}", self.group));
        format_pair(&self.x, &self.y, &comments)
    }

    pub fn prototype(&self, which: Which) -> &PointCloud {
        match which {
            Which::First => &self.x,
            Which::Second => &self.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

/// Laplacian of one `m`-cycle, or of two disjoint `m/2`-cycles when `split`.
pub fn cycle_laplacian(m: usize, split: bool) -> Result<DMatrix<f64>> {
    if m < 6 || !m.is_multiple_of(2) {
        return Err(GeoError::Invalid(format!(
            "cycle Laplacian needs an even m ≥ 6 (got {m})"
        )));
    }
    let mut l = DMatrix::from_diagonal_element(m, m, 2.0);
    let mut link = |a: usize, b: usize| {
        l[(a, b)] = -1.0;
        l[(b, a)] = -1.0;
    };
    if split {
        let h = m / 2;
        for base in [0, h] {
            for i in 0..h {
                link(base + i, base + (i + 1) % h);
            }
        }
    } else {
        for i in 0..m {
            link(i, (i + 1) % m);
        }
    }
    Ok(l)
}

/// A factor `E` with `EᵀE = L` for symmetric PSD `L`, from the symmetric
/// eigendecomposition with eigenvalues clamped at zero. Only the Gram
/// identity is meaningful; the factor is unique up to `O(m)`.
pub fn psd_factor(l: &DMatrix<f64>, eps: f64) -> Result<DMatrix<f64>> {
    let m = l.nrows();
    if l.ncols() != m {
        return Err(GeoError::Shape(format!(
            "expected a square matrix, got {}×{}",
            l.nrows(),
            l.ncols()
        )));
    }
    let asym = (l - l.transpose()).amax();
    if asym > 1e-12 * l.amax().max(1.0) {
        return Err(GeoError::Invalid(format!(
            "matrix is not symmetric (deviation {asym:e})"
        )));
    }
    let eig = l.clone().symmetric_eigen();
    let smallest = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if smallest < -eps {
        return Err(GeoError::NotPsd(smallest));
    }
    let mut e = eig.eigenvectors.transpose();
    for (r, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        e.row_mut(r).scale_mut(s);
    }
    Ok(e)
}

/// Two `2·half`-point clouds in `R^{2·half}`: the factored Laplacians of two
/// `half`-cycles (first) and one `2·half`-cycle (second).
pub fn gen_cholesky_pair(half: usize) -> Result<InstancePair> {
    if half < 3 {
        return Err(GeoError::Invalid(format!(
            "Cholesky pair needs half ≥ 3 (got {half})"
        )));
    }
    let m = 2 * half;
    let x = PointCloud::new(psd_factor(&cycle_laplacian(m, true)?, 1e-9)?)?;
    let y = PointCloud::new(psd_factor(&cycle_laplacian(m, false)?, 1e-9)?)?;
    InstancePair::new(
        format!("cholesky-dim{m}"),
        x,
        y,
        Label::Inequivalent,
        GroupKind::So,
    )
}

/// Options for drawing a benchmark sample from a prototype.
#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    pub sigma: f64,
    pub group: GroupKind,
    pub translate: bool,
}

/// Random rotation (reflection too for `O`) and relabeling of the chosen
/// prototype, followed by Gaussian noise of standard deviation `sigma`.
pub fn make_sample(
    pair: &InstancePair,
    which: Which,
    spec: SampleSpec,
    seed: Seed,
) -> Result<PointCloud> {
    let proto = pair.prototype(which);
    let g = GroupElement::random(
        proto.dim(),
        proto.len(),
        spec.group.is_proper(),
        spec.translate,
        seed.derive("group"),
    );
    g.apply(proto)?.add_noise(spec.sigma, seed.derive("noise"))
}
