//! Rigid motions combined with point relabelings, acting on point clouds.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::cloud::PointCloud;
use crate::error::{GeoError, Result};
use crate::rng::Seed;

const ORTHO_TOL: f64 = 1e-12;
const DET_TOL: f64 = 1e-9;

/// `(R, t, σ)` acting by `column σ(k) ← R·x_k + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    rotation: DMatrix<f64>,
    translation: Vec<f64>,
    perm: Vec<usize>,
    proper: bool,
}

impl GroupElement {
    /// Validates orthogonality, the determinant sign and that `perm` is a
    /// bijection of `0..n`.
    pub fn new(
        rotation: DMatrix<f64>,
        translation: Vec<f64>,
        perm: Vec<usize>,
        proper: bool,
    ) -> Result<Self> {
        let d = rotation.nrows();
        if rotation.ncols() != d || translation.len() != d {
            return Err(GeoError::Shape(format!(
                "rotation {}×{} with translation of length {}",
                rotation.nrows(),
                rotation.ncols(),
                translation.len()
            )));
        }
        let gram = rotation.transpose() * &rotation;
        let ortho_err = (gram - DMatrix::<f64>::identity(d, d)).amax();
        if ortho_err > ORTHO_TOL {
            return Err(GeoError::Invalid(format!(
                "RᵀR deviates from I by {ortho_err:e}"
            )));
        }
        let det = rotation.determinant();
        if proper && (det - 1.0).abs() > DET_TOL {
            return Err(GeoError::Invalid(format!(
                "proper element with det(R) = {det}"
            )));
        }
        if !is_permutation(&perm) {
            return Err(GeoError::Invalid("sigma is not a permutation".into()));
        }
        Ok(GroupElement {
            rotation,
            translation,
            perm,
            proper,
        })
    }

    pub fn identity(d: usize, n: usize) -> Self {
        GroupElement {
            rotation: DMatrix::identity(d, d),
            translation: vec![0.0; d],
            perm: (0..n).collect(),
            proper: true,
        }
    }

    /// Pure permutation `column perm[k] ← x_k`.
    pub fn permutation(d: usize, perm: Vec<usize>) -> Result<Self> {
        Self::new(DMatrix::identity(d, d), vec![0.0; d], perm, true)
    }

    /// Draws `R` from the Haar measure on `SO(d)` (`proper`) or `O(d)`, `σ`
    /// uniformly, and `t` standard Gaussian or zero.
    pub fn random(d: usize, n: usize, proper: bool, with_translation: bool, seed: Seed) -> Self {
        let rotation = haar_orthogonal(d, proper, seed.derive("rotation"));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut seed.stream("permutation"));
        let translation = if with_translation {
            let mut rng = seed.stream("translation");
            (0..d).map(|_| StandardNormal.sample(&mut rng)).collect()
        } else {
            vec![0.0; d]
        };
        GroupElement {
            rotation,
            translation,
            perm,
            proper,
        }
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    /// `perm[k]` is the output column of input point `k`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn dim(&self) -> usize {
        self.rotation.nrows()
    }

    pub fn without_translation(&self) -> Self {
        GroupElement {
            translation: vec![0.0; self.dim()],
            ..self.clone()
        }
    }

    pub fn with_translation(&self, t: Vec<f64>) -> Self {
        GroupElement {
            translation: t,
            ..self.clone()
        }
    }

    /// `self ∘ first`: acting with `first`, then with `self`.
    pub fn compose(&self, first: &GroupElement) -> Result<Self> {
        if self.dim() != first.dim() || self.perm.len() != first.perm.len() {
            return Err(GeoError::Shape(
                "composing elements of different shapes".into(),
            ));
        }
        let rotation = &self.rotation * &first.rotation;
        let rt = &self.rotation * nalgebra::DVector::from_column_slice(&first.translation);
        let translation = rt
            .iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect();
        let perm = first.perm.iter().map(|&k| self.perm[k]).collect();
        Ok(GroupElement {
            rotation,
            translation,
            perm,
            proper: self.proper && first.proper,
        })
    }

    pub fn apply(&self, x: &PointCloud) -> Result<PointCloud> {
        if x.dim() != self.dim() || x.len() != self.perm.len() {
            return Err(GeoError::Shape(format!(
                "element over R^{}, n = {} applied to cloud {}×{}",
                self.dim(),
                self.perm.len(),
                x.dim(),
                x.len()
            )));
        }
        let moved = &self.rotation * x.matrix();
        let mut out = DMatrix::zeros(x.dim(), x.len());
        for (k, &target) in self.perm.iter().enumerate() {
            for r in 0..x.dim() {
                out[(r, target)] = moved[(r, k)] + self.translation[r];
            }
        }
        Ok(PointCloud::from_matrix_unchecked(out))
    }
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag(R)` folded into `Q`. For `proper`, a negative determinant
/// is fixed by flipping the first column, which maps Haar on `O(d)` to Haar
/// on `SO(d)`.
pub fn haar_orthogonal(d: usize, proper: bool, seed: Seed) -> DMatrix<f64> {
    let mut rng = seed.rng();
    let g = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..d {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    if proper && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Which symmetry group a test or oracle works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GroupKind {
    /// Rotations, translations and permutations.
    #[default]
    So,
    /// Rotations, reflections, translations and permutations.
    O,
}

impl GroupKind {
    pub fn is_proper(self) -> bool {
        self == GroupKind::So
    }
}

impl std::str::FromStr for GroupKind {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so" => Ok(GroupKind::So),
            "o" => Ok(GroupKind::O),
            other => Err(GeoError::Invalid(format!(
                "unknown group \"{other}\" (expected so|o)"
            ))),
        }
    }
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GroupKind::So => "so",
            GroupKind::O => "o",
        })
    }
}
