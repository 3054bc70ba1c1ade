//! Complete frame-based tests. 2-Geo covers `SO[3,n]` and, with both
//! orientations, `O[3,n]`; the `(d−1)`-Geo generalizes it to any dimension.
//!
//! For every ordered tuple of `d − 1` distinct centered points we complete
//! them to a `d × d` frame with the generalized cross product, record the
//! frame's Gram matrix, and embed the multiset of remaining points expressed
//! in frame coordinates. The multiset of these per-tuple features is then
//! embedded once more. Sorting-based embeddings give `O(n^{d+1} log n)` cost.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::cloud::{dot, PointCloud};
use crate::embed::{separating_dim, EmbedParams, PsiKind};
use crate::error::{GeoError, Result};
use crate::feature::FeatureVector;
use crate::group::GroupKind;
use crate::par::map_range;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Pos,
    Neg,
}

/// Classical cross product.
pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Vector orthogonal to the `d − 1` columns of `v` (a `d × (d−1)` matrix),
/// with component `k` equal to `(−1)^{k+d} det(v without row k)` (1-based).
/// `[v | w]` then has determinant `‖w‖² ≥ 0`; rank-deficient `v` gives zero.
pub fn generalized_cross(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let d = v.nrows();
    if d < 2 || v.ncols() + 1 != d {
        return Err(GeoError::Shape(format!(
            "generalized cross needs a d×(d−1) matrix, got {}×{}",
            v.nrows(),
            v.ncols()
        )));
    }
    Ok(cofactor_cross(d, |r, c| v[(r, c)]))
}

/// `entry(r, c)` reads row `r` of column `c` (`c < d − 1`).
fn cofactor_cross(d: usize, entry: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let m = d - 1;
    let mut out = vec![0.0; d];
    let mut minor = DMatrix::zeros(m, m);
    for (k, o) in out.iter_mut().enumerate() {
        let rows: Vec<usize> = (0..d).filter(|&r| r != k).collect();
        let det = match m {
            1 => entry(rows[0], 0),
            2 => entry(rows[0], 0) * entry(rows[1], 1) - entry(rows[0], 1) * entry(rows[1], 0),
            _ => {
                for (ri, &r) in rows.iter().enumerate() {
                    for c in 0..m {
                        minor[(ri, c)] = entry(r, c);
                    }
                }
                minor.clone().lu().determinant()
            }
        };
        // (−1)^{(k+1)+d} with 1-based k
        *o = if (k + 1 + d).is_multiple_of(2) {
            det
        } else {
            -det
        };
    }
    out
}

/// Frame `[x_{i_1}, …, x_{i_{d−1}}, ±x*]` as a column-major `d × d` block.
fn frame_columns(xc: &PointCloud, tuple: &[usize], orientation: Orientation) -> Vec<f64> {
    let d = xc.dim();
    let mut frame = Vec::with_capacity(d * d);
    for &i in tuple {
        frame.extend_from_slice(xc.point(i));
    }
    let mut w = cofactor_cross(d, |r, c| frame[c * d + r]);
    if orientation == Orientation::Neg {
        w.iter_mut().for_each(|v| *v = -*v);
    }
    frame.extend_from_slice(&w);
    frame
}

/// `[x_i, x_j, ±x_i × x_j]` for a centered cloud in `R^3`.
pub fn frame(
    xc: &PointCloud,
    i: usize,
    j: usize,
    orientation: Orientation,
) -> Result<DMatrix<f64>> {
    if xc.dim() != 3 {
        return Err(GeoError::Shape(format!(
            "frames are defined for d = 3 (got d = {})",
            xc.dim()
        )));
    }
    if i == j {
        return Err(GeoError::Invalid("frame needs two distinct points".into()));
    }
    if i >= xc.len() || j >= xc.len() {
        return Err(GeoError::Index {
            index: i.max(j),
            n: xc.len(),
        });
    }
    Ok(DMatrix::from_column_slice(
        3,
        3,
        &frame_columns(xc, &[i, j], orientation),
    ))
}

/// Gram matrix and embedded relative coordinates for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeature {
    pub tuple: Vec<usize>,
    pub gram: DMatrix<f64>,
    pub h: Vec<f64>,
    pub orientation: Orientation,
}

impl FrameFeature {
    /// Gram row-major, then `h`.
    pub fn flatten(&self) -> Vec<f64> {
        let d = self.gram.nrows();
        let mut out = Vec::with_capacity(d * d + self.h.len());
        for r in 0..d {
            for c in 0..d {
                out.push(self.gram[(r, c)]);
            }
        }
        out.extend_from_slice(&self.h);
        out
    }
}

/// Per-cloud data shared by all tuples: the Gram matrix of the centered
/// points and one generalized cross product per `(d−1)`-subset.
///
/// The cross product is alternating in its arguments, so each subset's
/// vector is computed once, for the points in a content-defined order, and
/// every ordering of the subset reuses it with the sign of its permutation.
/// The content order keeps features bit-identical under relabeling.
pub(crate) struct FrameContext<'a> {
    xc: &'a PointCloud,
    gram: Vec<f64>,
    rank: Vec<usize>,
    crosses: HashMap<Vec<usize>, Cross>,
}

struct Cross {
    /// `⟨w, x_k⟩` for every point `k`.
    wx: Vec<f64>,
    ww: f64,
}

impl<'a> FrameContext<'a> {
    pub(crate) fn new(xc: &'a PointCloud) -> Self {
        let (d, n) = (xc.dim(), xc.len());
        let mut gram = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                gram[a * n + b] = dot(xc.point(a), xc.point(b));
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (xc.point(a), xc.point(b));
            pa.iter()
                .zip(pb)
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut rank = vec![0; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let subsets = combinations(n, d - 1);
        let crosses: Vec<Cross> = map_range(subsets.len(), |s| {
            let mut canon = subsets[s].clone();
            canon.sort_by_key(|&i| rank[i]);
            let w = cofactor_cross(d, |r, c| xc.point(canon[c])[r]);
            Cross {
                wx: (0..n).map(|k| dot(&w, xc.point(k))).collect(),
                ww: dot(&w, &w),
            }
        });
        FrameContext {
            xc,
            gram,
            rank,
            crosses: subsets.into_iter().zip(crosses).collect(),
        }
    }

    /// `(Gram of the frame, embedded frame coordinates of the other points)`.
    pub(crate) fn tuple_feature(
        &self,
        tuple: &[usize],
        alpha: &EmbedParams,
        orientation: Orientation,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let xc = self.xc;
        let (d, n) = (xc.dim(), xc.len());
        let mut key = tuple.to_vec();
        key.sort_unstable();
        let cross = &self.crosses[&key];
        let mut inversions = 0;
        for a in 0..tuple.len() {
            for b in a + 1..tuple.len() {
                inversions += usize::from(self.rank[tuple[a]] > self.rank[tuple[b]]);
            }
        }
        let flip = (inversions % 2 == 1) != (orientation == Orientation::Neg);
        let signed = |v: f64| if flip { -v } else { v };

        let mut gram = vec![0.0; d * d];
        for (r, &a) in tuple.iter().enumerate() {
            for (c, &b) in tuple.iter().enumerate() {
                gram[r * d + c] = self.gram[a * n + b];
            }
            let v = signed(cross.wx[a]);
            gram[r * d + d - 1] = v;
            gram[(d - 1) * d + r] = v;
        }
        gram[d * d - 1] = cross.ww;
        let mut rel = Vec::with_capacity(d * (n - tuple.len()));
        for k in (0..n).filter(|k| !tuple.contains(k)) {
            rel.extend(tuple.iter().map(|&a| self.gram[a * n + k]));
            rel.push(signed(cross.wx[k]));
        }
        let h = alpha.embed_columns(&rel, None)?;
        Ok((gram, h))
    }
}

/// Increasing `len`-subsets of `0..n`, lexicographic.
fn combinations(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, len, &mut Vec::with_capacity(len), &mut out);
    out
}

pub fn frame_feature(
    xc: &PointCloud,
    i: usize,
    j: usize,
    alpha: &EmbedParams,
    orientation: Orientation,
) -> Result<FrameFeature> {
    if xc.len() < 3 {
        return Err(GeoError::TooFewPoints {
            need: 3,
            got: xc.len(),
        });
    }
    frame(xc, i, j, orientation)?;
    check_alpha(alpha, 3, xc.len())?;
    let (gram, h) = FrameContext::new(xc).tuple_feature(&[i, j], alpha, orientation)?;
    Ok(FrameFeature {
        tuple: vec![i, j],
        gram: DMatrix::from_row_slice(3, 3, &gram),
        h,
        orientation,
    })
}

fn check_alpha(alpha: &EmbedParams, d: usize, n: usize) -> Result<()> {
    if alpha.element_dim() != d || alpha.multiset_size() != n - d + 1 {
        return Err(GeoError::Shape(format!(
            "inner embedding expects D={}, N={}; cloud needs D={d}, N={}",
            alpha.element_dim(),
            alpha.multiset_size(),
            n - d + 1
        )));
    }
    Ok(())
}

/// Ordered `len`-tuples of distinct indices in `0..n`, lexicographic.
pub fn distinct_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, len, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Inner (`alpha`) and outer (`beta`) embeddings for a frame-based test.
#[derive(Debug, Clone)]
pub struct Geo2Config {
    d: usize,
    n: usize,
    group: GroupKind,
    alpha: EmbedParams,
    beta: EmbedParams,
}

impl Geo2Config {
    /// 2-Geo for `SO[3,n]` with `K₁ = 6n − 11`, `K₂ = 6n + 1`.
    pub fn so(n: usize, psi: PsiKind, seed: Seed) -> Result<Self> {
        Self::general(3, n, GroupKind::So, psi, seed)
    }

    /// Two-orientation variant for `O[3,n]`.
    pub fn o(n: usize, psi: PsiKind, seed: Seed) -> Result<Self> {
        Self::general(3, n, GroupKind::O, psi, seed)
    }

    /// `(d−1)`-Geo with `K₁ = 2d(n−d+1) + 1` and `K₂ = 2dn + 1`.
    pub fn general(d: usize, n: usize, group: GroupKind, psi: PsiKind, seed: Seed) -> Result<Self> {
        if d < 2 {
            return Err(GeoError::Invalid("frame tests need d ≥ 2".into()));
        }
        if n < d {
            return Err(GeoError::TooFewPoints { need: d, got: n });
        }
        let k1 = separating_dim(d * (n - d + 1));
        let k2 = separating_dim(d * n);
        Self::with_dims(d, n, k1, k2, group, psi, seed)
    }

    pub fn with_dims(
        d: usize,
        n: usize,
        k1: usize,
        k2: usize,
        group: GroupKind,
        psi: PsiKind,
        seed: Seed,
    ) -> Result<Self> {
        if d < 2 {
            return Err(GeoError::Invalid("frame tests need d ≥ 2".into()));
        }
        if n < d {
            return Err(GeoError::TooFewPoints { need: d, got: n });
        }
        let tuples = tuple_count(n, d - 1);
        let outer_n = match group {
            GroupKind::So => tuples,
            GroupKind::O => 2 * tuples,
        };
        let alpha = EmbedParams::sample(k1, d, n - d + 1, 0, psi, seed.derive("geo2/alpha"));
        let beta_name = match group {
            GroupKind::So => "geo2/beta",
            GroupKind::O => "geo2/beta-o",
        };
        let beta = EmbedParams::sample(k2, d * d + k1, outer_n, 0, psi, seed.derive(beta_name));
        Ok(Geo2Config {
            d,
            n,
            group,
            alpha,
            beta,
        })
    }

    pub fn from_params(
        d: usize,
        n: usize,
        group: GroupKind,
        alpha: EmbedParams,
        beta: EmbedParams,
    ) -> Result<Self> {
        if d < 2 || n < d {
            return Err(GeoError::TooFewPoints {
                need: d.max(2),
                got: n,
            });
        }
        check_alpha(&alpha, d, n)?;
        let tuples = tuple_count(n, d - 1) * if group == GroupKind::O { 2 } else { 1 };
        if beta.element_dim() != d * d + alpha.output_dim() || beta.multiset_size() != tuples {
            return Err(GeoError::Shape(
                "outer embedding does not match the inner one".into(),
            ));
        }
        Ok(Geo2Config {
            d,
            n,
            group,
            alpha,
            beta,
        })
    }

    pub fn alpha(&self) -> &EmbedParams {
        &self.alpha
    }

    pub fn beta(&self) -> &EmbedParams {
        &self.beta
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.beta.output_dim()
    }
}

fn tuple_count(n: usize, len: usize) -> usize {
    (0..len).map(|i| n - i).product()
}

/// Flattened per-tuple features `m` as columns (POS tuples, then NEG tuples
/// for the `O` group), for an already centered cloud.
pub(crate) fn tuple_multiset(
    xc: &PointCloud,
    alpha: &EmbedParams,
    group: GroupKind,
) -> Result<Vec<Vec<f64>>> {
    let d = xc.dim();
    let tuples = distinct_tuples(xc.len(), d - 1);
    let orientations: &[Orientation] = match group {
        GroupKind::So => &[Orientation::Pos],
        GroupKind::O => &[Orientation::Pos, Orientation::Neg],
    };
    let ctx = FrameContext::new(xc);
    let jobs: Vec<(&Vec<usize>, Orientation)> = orientations
        .iter()
        .flat_map(|&o| tuples.iter().map(move |t| (t, o)))
        .collect();
    let cols: Vec<Result<Vec<f64>>> = map_range(jobs.len(), |idx| {
        let (t, o) = jobs[idx];
        let (mut gram, h) = ctx.tuple_feature(t, alpha, o)?;
        gram.extend_from_slice(&h);
        Ok(gram)
    });
    cols.into_iter().collect()
}

fn frame_test(x: &PointCloud, cfg: &Geo2Config) -> Result<FeatureVector> {
    let (d, n) = (x.dim(), x.len());
    if d != cfg.d {
        return Err(GeoError::Shape(format!(
            "test configured for d = {}, cloud has d = {d}",
            cfg.d
        )));
    }
    if n < d.max(3) && d == 3 {
        return Err(GeoError::TooFewPoints { need: 3, got: n });
    }
    if n < d {
        return Err(GeoError::TooFewPoints { need: d, got: n });
    }
    if n != cfg.n {
        return Err(GeoError::Shape(format!(
            "test configured for n = {}, cloud has n = {n}",
            cfg.n
        )));
    }
    let xc = x.center();
    let cols = tuple_multiset(&xc, &cfg.alpha, cfg.group)?;
    let flat = cols.concat();
    Ok(FeatureVector(cfg.beta.embed_columns(&flat, None)?))
}

/// 2-Geo: complete `SO[3,n]` invariant.
pub fn f_2geo_so(x: &PointCloud, cfg: &Geo2Config) -> Result<FeatureVector> {
    if x.len() < 3 {
        return Err(GeoError::TooFewPoints {
            need: 3,
            got: x.len(),
        });
    }
    if cfg.d != 3 || cfg.group != GroupKind::So {
        return Err(GeoError::Invalid(
            "f_2geo_so needs a d = 3 SO configuration".into(),
        ));
    }
    frame_test(x, cfg)
}

/// Complete `O[3,n]` invariant using both frame orientations.
pub fn f_2geo_o(x: &PointCloud, cfg: &Geo2Config) -> Result<FeatureVector> {
    if x.len() < 3 {
        return Err(GeoError::TooFewPoints {
            need: 3,
            got: x.len(),
        });
    }
    if cfg.d != 3 || cfg.group != GroupKind::O {
        return Err(GeoError::Invalid(
            "f_2geo_o needs a d = 3 O configuration".into(),
        ));
    }
    frame_test(x, cfg)
}

/// `(d−1)`-Geo for clouds in any dimension `d ≥ 2` with `n ≥ d`.
pub fn f_dgeo(x: &PointCloud, cfg: &Geo2Config) -> Result<FeatureVector> {
    frame_test(x, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;

    fn cloud(pts: &[&[f64]]) -> PointCloud {
        PointCloud::from_points(pts).unwrap()
    }

    fn basis_cloud() -> PointCloud {
        cloud(&[&[1., 0., 0.], &[0., 1., 0.], &[1., 2., 3.]])
    }

    #[test]
    fn frame_examples() {
        let x = basis_cloud();
        assert_eq!(
            frame(&x, 0, 1, Orientation::Pos).unwrap(),
            DMatrix::identity(3, 3)
        );
        assert_eq!(
            frame(&x, 0, 1, Orientation::Neg).unwrap(),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1., 1., -1.]))
        );
        let col = cloud(&[&[1., 0., 0.], &[2., 0., 0.]]);
        let f = frame(&col, 0, 1, Orientation::Pos).unwrap();
        assert!(f.column(2).iter().all(|&v| v == 0.0));
        assert!(frame(&x, 1, 1, Orientation::Pos).is_err());
    }

    #[test]
    fn frame_feature_examples() {
        // Points used as-is: x_i, x_j orthonormal, x_k = (1,2,3).
        let x = basis_cloud();
        let alpha = EmbedParams::new(
            3,
            3,
            1,
            0,
            vec![1., 0., 0., 0., 1., 0., 0., 0., 1.],
            vec![1., 1., 1.],
            vec![],
            PsiKind::Sort,
        )
        .unwrap();
        let ff = frame_feature(&x, 0, 1, &alpha, Orientation::Pos).unwrap();
        assert_eq!(ff.gram, DMatrix::identity(3, 3));
        assert_eq!(ff.h, vec![1., 2., 3.]);
        assert_eq!(ff.flatten().len(), 12);
    }

    #[test]
    fn frame_feature_is_rotation_invariant() {
        let x = PointCloud::random_gaussian(3, 6, Seed(1)).center();
        let alpha = EmbedParams::sample(25, 3, 4, 0, PsiKind::Sort, Seed(2));
        let g = GroupElement::random(3, 6, true, false, Seed(3));
        let rotated = GroupElement::new(g.rotation().clone(), vec![0.; 3], (0..6).collect(), true)
            .unwrap()
            .apply(&x)
            .unwrap();
        let a = frame_feature(&x, 2, 4, &alpha, Orientation::Pos).unwrap();
        let b = frame_feature(&rotated, 2, 4, &alpha, Orientation::Pos).unwrap();
        assert!(crate::feature::relative_gap(&a.flatten(), &b.flatten()) <= 1e-9);
        let eig = a.gram.clone().symmetric_eigenvalues();
        assert!(eig.iter().all(|&l| l >= -1e-9));
        assert!((a.gram.clone() - a.gram.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn generalized_cross_examples() {
        let e = |d: usize, k: usize| {
            let mut v = vec![0.0; d];
            v[k] = 1.0;
            v
        };
        let v3 = DMatrix::from_columns(&[e(3, 0).into(), nalgebra::DVector::from_vec(e(3, 1))]);
        assert_eq!(generalized_cross(&v3).unwrap(), e(3, 2));
        let v4 = DMatrix::from_fn(4, 3, |r, c| if r == c { 1.0 } else { 0.0 });
        assert_eq!(generalized_cross(&v4).unwrap(), e(4, 3));
        let v2 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let w = generalized_cross(&v2).unwrap();
        assert_eq!(w, vec![0.0, 1.0]);
        let rank_def = DMatrix::from_column_slice(3, 2, &[1., 2., 3., 2., 4., 6.]);
        assert!(generalized_cross(&rank_def)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        assert!(generalized_cross(&DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn tuples_are_lexicographic() {
        let t = distinct_tuples(3, 2);
        assert_eq!(
            t,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 2],
                vec![2, 0],
                vec![2, 1]
            ]
        );
        assert_eq!(distinct_tuples(6, 5).len(), 720);
    }

    #[test]
    fn default_dimensions() {
        let cfg = Geo2Config::so(6, PsiKind::Sort, Seed(0)).unwrap();
        assert_eq!(cfg.alpha().output_dim(), 6 * 6 - 11);
        assert_eq!(cfg.output_dim(), 6 * 6 + 1);
        assert_eq!(cfg.beta().multiset_size(), 30);
        let cfg = Geo2Config::o(6, PsiKind::Sort, Seed(0)).unwrap();
        assert_eq!(cfg.beta().multiset_size(), 60);
        let cfg = Geo2Config::general(6, 6, GroupKind::So, PsiKind::Sort, Seed(0)).unwrap();
        assert_eq!(cfg.output_dim(), 73);
        assert_eq!(cfg.alpha().output_dim(), 13);
    }

    #[test]
    fn too_few_points() {
        let x = PointCloud::random_gaussian(3, 2, Seed(0));
        let cfg = Geo2Config::so(3, PsiKind::Sort, Seed(0)).unwrap();
        let msg = f_2geo_so(&x, &cfg).unwrap_err().to_string();
        assert!(msg.contains("n ≥ 3 required"), "{msg}");
        assert!(Geo2Config::general(4, 3, GroupKind::So, PsiKind::Sort, Seed(0)).is_err());
    }

    #[test]
    fn n3_edge_case_runs() {
        let cfg = Geo2Config::so(3, PsiKind::Sort, Seed(5)).unwrap();
        assert_eq!(cfg.alpha().multiset_size(), 1);
        let x = PointCloud::random_gaussian(3, 3, Seed(6));
        let f = f_2geo_so(&x, &cfg).unwrap();
        assert_eq!(f.len(), 19);
    }

    #[test]
    fn degenerate_clouds_give_finite_features() {
        let cfg = Geo2Config::so(4, PsiKind::Sort, Seed(5)).unwrap();
        let p: &[f64] = &[1., 1., 1.];
        let same = cloud(&[p, p, p, p]);
        assert!(f_2geo_so(&same, &cfg)
            .unwrap()
            .as_slice()
            .iter()
            .all(|v| v.is_finite()));

        // Two rank-1 clouds with equal coordinates along their lines.
        let a = cloud(&[&[0., 0., 0.], &[1., 0., 0.], &[3., 0., 0.], &[7., 0., 0.]]);
        let dir = [2f64.sqrt() / 2.0, 0.0, 2f64.sqrt() / 2.0];
        let b_pts: Vec<Vec<f64>> = [7.0, 0.0, 3.0, 1.0]
            .iter()
            .map(|s| dir.iter().map(|u| u * s + 5.0).collect())
            .collect();
        let b = PointCloud::from_points(&b_pts).unwrap();
        let fa = f_2geo_so(&a, &cfg).unwrap();
        let fb = f_2geo_so(&b, &cfg).unwrap();
        assert!(fa.as_slice().iter().all(|v| v.is_finite()));
        assert!(fa.relative_gap(&fb) <= 1e-6, "gap {}", fa.relative_gap(&fb));
    }

    #[test]
    fn dgeo_reduces_to_2geo_at_d3() {
        let x = PointCloud::random_gaussian(3, 6, Seed(10));
        let so = Geo2Config::so(6, PsiKind::Sort, Seed(11)).unwrap();
        let gen =
            Geo2Config::from_params(3, 6, GroupKind::So, so.alpha().clone(), so.beta().clone())
                .unwrap();
        assert_eq!(f_2geo_so(&x, &so).unwrap(), f_dgeo(&x, &gen).unwrap());
    }

    #[test]
    fn permutation_is_bit_exact() {
        let x = PointCloud::random_gaussian(3, 6, Seed(12));
        let cfg = Geo2Config::so(6, PsiKind::Sort, Seed(13)).unwrap();
        let g = GroupElement::permutation(3, vec![3, 1, 5, 0, 2, 4]).unwrap();
        assert_eq!(
            f_2geo_so(&x, &cfg).unwrap(),
            f_2geo_so(&g.apply(&x).unwrap(), &cfg).unwrap()
        );
    }

    #[test]
    fn chirality() {
        let x = PointCloud::random_gaussian(3, 5, Seed(14));
        let so = Geo2Config::so(5, PsiKind::Sort, Seed(15)).unwrap();
        let o = Geo2Config::o(5, PsiKind::Sort, Seed(15)).unwrap();
        let m = x.mirror();
        assert!(
            f_2geo_so(&x, &so)
                .unwrap()
                .relative_gap(&f_2geo_so(&m, &so).unwrap())
                > 1e-6
        );
        assert!(
            f_2geo_o(&x, &o)
                .unwrap()
                .relative_gap(&f_2geo_o(&m, &o).unwrap())
                <= 1e-6
        );
    }
}
