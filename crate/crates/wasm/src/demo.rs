//! Plain Rust computations behind the browser bindings.

use geosep::geo1::{degree_histogram, histogram_distance};
use geosep::instances::{gen_cholesky_pair, make_sample, SampleSpec, Which};
use geosep::test_kind::{FeatureMap, TestKind};
use geosep::{GroupElement, GroupKind, PointCloud, PsiKind, Result, Seed};

/// Row-major `m×m` distance matrix of one Cholesky prototype (`m = 2·half`).
pub fn cholesky_distances(half: usize, second: bool) -> Result<Vec<f64>> {
    let pair = gen_cholesky_pair(half)?;
    let x = if second { &pair.y } else { &pair.x };
    Ok(x.distance_matrix().transpose().as_slice().to_vec())
}

/// `[degree histogram distance, 1geo gap, dgeo gap]` for the Cholesky pair.
pub fn cholesky_gaps(half: usize, seed: u64) -> Result<Vec<f64>> {
    let pair = gen_cholesky_pair(half)?;
    let (d, n) = (pair.x.dim(), pair.x.len());
    let hist = histogram_distance(&degree_histogram(&pair.x), &degree_histogram(&pair.y));
    let mut out = vec![hist];
    for kind in [TestKind::Geo1, TestKind::DGeo] {
        let map = FeatureMap::new(kind, d, n, GroupKind::So, PsiKind::Sort, Seed(seed))?;
        out.push(map.compute(&pair.x)?.relative_gap(&map.compute(&pair.y)?));
    }
    Ok(out)
}

/// A random six-point cloud in R³, column-major.
pub fn chiral_cloud(seed: u64) -> Vec<f64> {
    PointCloud::random_gaussian(3, 6, Seed(seed))
        .as_slice()
        .to_vec()
}

/// Gaps `[2geo-so rotated, 2geo-so mirrored, 2geo-o rotated, 2geo-o mirrored]`
/// between the cloud of [`chiral_cloud`] and a copy rotated by `angle` about
/// the z axis (then mirrored in the second and fourth entries).
pub fn chirality_gaps(seed: u64, angle: f64) -> Result<Vec<f64>> {
    let x = PointCloud::random_gaussian(3, 6, Seed(seed));
    let (c, s) = (angle.cos(), angle.sin());
    let r =
        geosep::nalgebra::DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
    let rotated = GroupElement::new(r, vec![0.0; 3], (0..6).collect(), true)?.apply(&x)?;
    let mirrored = rotated.mirror();
    let mut out = Vec::with_capacity(4);
    for kind in [TestKind::Geo2So, TestKind::Geo2O] {
        let map = FeatureMap::new(kind, 3, 6, GroupKind::So, PsiKind::Sort, Seed(seed))?;
        let fx = map.compute(&x)?;
        out.push(fx.relative_gap(&map.compute(&rotated)?));
        out.push(fx.relative_gap(&map.compute(&mirrored)?));
    }
    Ok(out)
}

/// For each `sigma`: the dgeo gap between the first Cholesky prototype and a
/// noisy rotated copy of it, then the gap to a noisy copy of the second
/// prototype. Output is `[own₀, other₀, own₁, other₁, …]`.
pub fn noise_curve(half: usize, seed: u64, sigmas: &[f64]) -> Result<Vec<f64>> {
    let pair = gen_cholesky_pair(half)?;
    let map = FeatureMap::new(
        TestKind::DGeo,
        pair.x.dim(),
        pair.x.len(),
        GroupKind::So,
        PsiKind::Sort,
        Seed(seed),
    )?;
    let proto = map.compute(&pair.x)?;
    let mut out = Vec::with_capacity(2 * sigmas.len());
    for (i, &sigma) in sigmas.iter().enumerate() {
        let spec = SampleSpec {
            sigma,
            group: GroupKind::So,
            translate: false,
        };
        let s = Seed(seed).derive("noise-curve").index(i as u64);
        for which in [Which::First, Which::Second] {
            let sample = make_sample(&pair, which, spec, s)?;
            out.push(proto.relative_gap(&map.compute(&sample)?));
        }
    }
    Ok(out)
}
