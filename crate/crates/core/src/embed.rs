//! Continuous, permutation-invariant multiset embeddings.
//!
//! A multiset of `N` elements of `R^D` is a `D × N` column matrix whose
//! column order carries no meaning. Component `j` of the embedding is
//! `⟨b_j, Ψ(a_jᵀ M)⟩`: project every element onto `a_j`, apply a
//! permutation-invariant map `Ψ` to the `N` projections (sorting, or the
//! power sums `Σ s^k`), and contract with `b_j`. With `K = 2·D_X + 1`
//! random Gaussian directions the map is injective on any multiset family
//! of intrinsic dimension `D_X`, for almost every draw of the parameters.
//!
//! The vector–multiset variant adds `⟨c_j, h⟩` for a companion vector `h`,
//! which lets iterated refinement keep a constant hidden width.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GeoError, Result};
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PsiKind {
    #[default]
    Sort,
    Pow,
}

impl std::str::FromStr for PsiKind {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sort" => Ok(PsiKind::Sort),
            "pow" => Ok(PsiKind::Pow),
            other => Err(GeoError::Invalid(format!(
                "unknown psi \"{other}\" (expected sort|pow)"
            ))),
        }
    }
}

impl std::fmt::Display for PsiKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PsiKind::Sort => "sort",
            PsiKind::Pow => "pow",
        })
    }
}

/// Embedding dimension that separates a family of intrinsic dimension `dim`.
pub fn separating_dim(intrinsic: usize) -> usize {
    2 * intrinsic + 1
}

/// Ascending sort.
pub fn psi_sort(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(f64::total_cmp);
    out
}

/// Power sums `(Σ s, Σ s², …, Σ s^N)`.
pub fn psi_pow(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; v.len()];
    power_sums(v, &mut out)?;
    Ok(out)
}

fn power_sums(v: &[f64], out: &mut [f64]) -> Result<()> {
    out.iter_mut().for_each(|o| *o = 0.0);
    for &s in v {
        let mut p = 1.0;
        for o in out.iter_mut() {
            p *= s;
            *o += p;
        }
    }
    if let Some(k) = out.iter().position(|o| !o.is_finite()) {
        return Err(GeoError::PowOverflow {
            max_abs: v.iter().fold(0.0_f64, |m, s| m.max(s.abs())),
            power: k + 1,
        });
    }
    Ok(())
}

/// Parameters `(a_j, b_j, c_j)`, `j = 1..K`, of one embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedParams {
    k: usize,
    d: usize,
    n: usize,
    f: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    psi: PsiKind,
}

impl EmbedParams {
    /// `a`, `b`, `c` are row-major `K×D`, `K×N`, `K×F`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k: usize,
        d: usize,
        n: usize,
        f: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        psi: PsiKind,
    ) -> Result<Self> {
        if k == 0 || d == 0 || n == 0 {
            return Err(GeoError::Shape(format!(
                "embedding needs K, D, N ≥ 1 (got {k}, {d}, {n})"
            )));
        }
        if a.len() != k * d || b.len() != k * n || c.len() != k * f {
            return Err(GeoError::Shape(format!(
                "parameter lengths a={}, b={}, c={} do not match K={k}, D={d}, N={n}, F={f}",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        if a.iter().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(GeoError::Invalid("non-finite embedding parameter".into()));
        }
        Ok(EmbedParams {
            k,
            d,
            n,
            f,
            a,
            b,
            c,
            psi,
        })
    }

    /// I.i.d. standard normal parameters.
    pub fn sample(k: usize, d: usize, n: usize, f: usize, psi: PsiKind, seed: Seed) -> Self {
        assert!(
            k > 0 && d > 0 && n > 0,
            "embedding dimensions must be positive"
        );
        let mut rng = seed.rng();
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let a = draw(k * d);
        let b = draw(k * n);
        let c = draw(k * f);
        EmbedParams {
            k,
            d,
            n,
            f,
            a,
            b,
            c,
            psi,
        }
    }

    pub fn output_dim(&self) -> usize {
        self.k
    }

    pub fn element_dim(&self) -> usize {
        self.d
    }

    pub fn multiset_size(&self) -> usize {
        self.n
    }

    pub fn vector_dim(&self) -> usize {
        self.f
    }

    pub fn psi(&self) -> PsiKind {
        self.psi
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Sets every `c_j` to zero.
    pub fn without_vector_part(mut self) -> Self {
        self.c.iter_mut().for_each(|v| *v = 0.0);
        self
    }

    /// `max_j ‖a_j‖₂‖b_j‖₂`: Lipschitz constant of the sort embedding from
    /// the Frobenius norm to `ℓ∞`.
    pub fn lipschitz_bound(&self) -> f64 {
        (0..self.k)
            .map(|j| {
                let na = self.a[j * self.d..(j + 1) * self.d]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt();
                let nb = self.b[j * self.n..(j + 1) * self.n]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt();
                na * nb
            })
            .fold(0.0, f64::max)
    }

    pub fn embed_multiset(&self, m: &DMatrix<f64>) -> Result<Vec<f64>> {
        if m.nrows() != self.d || m.ncols() != self.n {
            return Err(GeoError::Shape(format!(
                "multiset {}×{} for embedding with D={}, N={}",
                m.nrows(),
                m.ncols(),
                self.d,
                self.n
            )));
        }
        self.embed_columns(m.as_slice(), None)
    }

    pub fn embed_vector_multiset(&self, h: &[f64], m: &DMatrix<f64>) -> Result<Vec<f64>> {
        if h.len() != self.f {
            return Err(GeoError::Shape(format!(
                "vector of length {} for F={}",
                h.len(),
                self.f
            )));
        }
        if m.nrows() != self.d || m.ncols() != self.n {
            return Err(GeoError::Shape(format!(
                "multiset {}×{} for embedding with D={}, N={}",
                m.nrows(),
                m.ncols(),
                self.d,
                self.n
            )));
        }
        self.embed_columns(m.as_slice(), Some(h))
    }

    /// Embeds `N` columns of length `D` stored contiguously in `data`.
    pub(crate) fn embed_columns(&self, data: &[f64], h: Option<&[f64]>) -> Result<Vec<f64>> {
        let (k, d, n) = (self.k, self.d, self.n);
        if data.len() != d * n {
            return Err(GeoError::Shape(format!(
                "{} values for a {d}×{n} multiset",
                data.len()
            )));
        }
        let mut proj = vec![0.0; k * n];
        project(&self.a, k, d, data, n, &mut proj);

        let mut out = vec![0.0; k];
        let mut sums = vec![0.0; n];
        let mut keys = Vec::new();
        for (j, row) in proj.chunks_exact_mut(n).enumerate() {
            let b = &self.b[j * n..(j + 1) * n];
            let psi_out: &[f64] = match self.psi {
                PsiKind::Sort => {
                    sort_ascending(row, &mut keys);
                    row
                }
                PsiKind::Pow => {
                    power_sums(row, &mut sums)?;
                    &sums
                }
            };
            out[j] = b.iter().zip(psi_out).map(|(x, y)| x * y).sum();
        }
        if let Some(h) = h {
            debug_assert_eq!(h.len(), self.f);
            for (j, o) in out.iter_mut().enumerate() {
                let c = &self.c[j * self.f..(j + 1) * self.f];
                *o += c.iter().zip(h).map(|(x, y)| x * y).sum::<f64>();
            }
        }
        Ok(out)
    }
}

/// In-place ascending sort in IEEE total order, via order-preserving `u64`
/// keys (integer comparisons are about twice as fast as `total_cmp`).
fn sort_ascending(row: &mut [f64], keys: &mut Vec<u64>) {
    const SIGN: u64 = 1 << 63;
    keys.clear();
    keys.extend(row.iter().map(|v| {
        let b = v.to_bits();
        if b & SIGN != 0 {
            !b
        } else {
            b | SIGN
        }
    }));
    keys.sort_unstable();
    for (o, &k) in row.iter_mut().zip(keys.iter()) {
        *o = f64::from_bits(if k & SIGN != 0 { k & !SIGN } else { !k });
    }
}

/// `out[j·n + m] = ⟨a_j, column m⟩`, accumulated in a fixed order so a
/// column's projections do not depend on its position.
fn project(a: &[f64], k: usize, d: usize, data: &[f64], n: usize, out: &mut [f64]) {
    for (m, col) in data.chunks_exact(d).enumerate() {
        let mut j = 0;
        while j + 4 <= k {
            let (r0, r1, r2, r3) = (
                &a[j * d..(j + 1) * d],
                &a[(j + 1) * d..(j + 2) * d],
                &a[(j + 2) * d..(j + 3) * d],
                &a[(j + 3) * d..(j + 4) * d],
            );
            let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
            for t in 0..d {
                let x = col[t];
                s0 += r0[t] * x;
                s1 += r1[t] * x;
                s2 += r2[t] * x;
                s3 += r3[t] * x;
            }
            out[j * n + m] = s0;
            out[(j + 1) * n + m] = s1;
            out[(j + 2) * n + m] = s2;
            out[(j + 3) * n + m] = s3;
            j += 4;
        }
        while j < k {
            let r = &a[j * d..(j + 1) * d];
            let mut s = 0.0;
            for t in 0..d {
                s += r[t] * col[t];
            }
            out[j * n + m] = s;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, v.len(), v)
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_sort(&[3., 1., 2.]), vec![1., 2., 3.]);
        assert_eq!(psi_sort(&[5., 5., 5.]), vec![5., 5., 5.]);
        assert_eq!(psi_sort(&[-1., 0., -2.]), vec![-2., -1., 0.]);
        assert_eq!(psi_pow(&[1., 2.]).unwrap(), vec![3., 5.]);
        assert_eq!(psi_pow(&[0., 0., 0.]).unwrap(), vec![0., 0., 0.]);
        assert_eq!(psi_pow(&[1., -1.]).unwrap(), vec![0., 2.]);
    }

    #[test]
    fn key_sort_matches_total_order() {
        let mut v = vec![
            3.5,
            -0.0,
            0.0,
            -1e-300,
            f64::MAX,
            -f64::MAX,
            2.0,
            -7.25,
            1e-310,
        ];
        let mut expected = v.clone();
        expected.sort_by(f64::total_cmp);
        sort_ascending(&mut v, &mut Vec::new());
        assert_eq!(
            v.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            expected.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn psi_pow_reports_overflow() {
        let v = vec![1e10; 40];
        match psi_pow(&v) {
            Err(GeoError::PowOverflow { power, .. }) => assert!(power > 1),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn embed_scalar_examples() {
        let p = EmbedParams::new(
            1,
            1,
            3,
            0,
            vec![1.],
            vec![1., 1., 1.],
            vec![],
            PsiKind::Sort,
        )
        .unwrap();
        assert_eq!(p.embed_multiset(&row(&[3., 1., 2.])).unwrap(), vec![6.0]);
        assert_eq!(p.embed_multiset(&row(&[2., 3., 1.])).unwrap(), vec![6.0]);

        let p =
            EmbedParams::new(1, 1, 3, 0, vec![1.], vec![1., 0., 0.], vec![], PsiKind::Pow).unwrap();
        assert_eq!(p.embed_multiset(&row(&[3., 1., 2.])).unwrap(), vec![6.0]);
    }

    #[test]
    fn shape_errors() {
        let p = EmbedParams::sample(5, 3, 4, 2, PsiKind::Sort, Seed(0));
        assert!(p.embed_multiset(&DMatrix::zeros(3, 5)).is_err());
        assert!(p
            .embed_vector_multiset(&[1.0], &DMatrix::zeros(3, 4))
            .is_err());
        assert!(
            EmbedParams::new(2, 1, 1, 0, vec![1.], vec![1., 1.], vec![], PsiKind::Sort).is_err()
        );
    }

    #[test]
    fn separates_single_column_change() {
        let p = EmbedParams::sample(31, 3, 5, 0, PsiKind::Sort, Seed(0));
        let m1 = crate::cloud::PointCloud::random_gaussian(3, 5, Seed(100)).into_matrix();
        let mut m2 = m1.clone();
        m2.set_column(
            2,
            &crate::cloud::PointCloud::random_gaussian(3, 1, Seed(101))
                .into_matrix()
                .column(0),
        );
        let e1 = p.embed_multiset(&m1).unwrap();
        let e2 = p.embed_multiset(&m2).unwrap();
        let gap = e1
            .iter()
            .zip(&e2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap >= 1e-8, "gap {gap:e}");
    }

    #[test]
    fn vector_part_examples() {
        let p = EmbedParams::sample(13, 3, 4, 5, PsiKind::Sort, Seed(9));
        let m = crate::cloud::PointCloud::random_gaussian(3, 4, Seed(1)).into_matrix();
        let plain = EmbedParams::new(
            13,
            3,
            4,
            0,
            p.a().to_vec(),
            p.b().to_vec(),
            vec![],
            PsiKind::Sort,
        )
        .unwrap();
        assert_eq!(
            p.embed_vector_multiset(&[0.0; 5], &m).unwrap(),
            plain.embed_multiset(&m).unwrap()
        );

        let h = [0.3, -1.0, 2.0, 0.0, 5.0];
        let mut rev = m.clone();
        for i in 0..4 {
            rev.set_column(i, &m.column(3 - i));
        }
        assert_eq!(
            p.embed_vector_multiset(&h, &m).unwrap(),
            p.embed_vector_multiset(&h, &rev).unwrap()
        );

        let zero_c = p.clone().without_vector_part();
        assert_eq!(
            zero_c.embed_vector_multiset(&h, &m).unwrap(),
            zero_c.embed_vector_multiset(&[9.0; 5], &m).unwrap()
        );
    }

    #[test]
    fn sampling_is_seeded_and_roughly_normal() {
        let p = EmbedParams::sample(100, 10, 100, 0, PsiKind::Sort, Seed(3));
        assert_eq!(
            p,
            EmbedParams::sample(100, 10, 100, 0, PsiKind::Sort, Seed(3))
        );
        let all: Vec<f64> = p.a().iter().chain(p.b()).copied().collect();
        assert!(all.len() >= 10_000);
        let big = EmbedParams::sample(100, 500, 500, 0, PsiKind::Sort, Seed(4));
        let v: Vec<f64> = big.a().to_vec();
        assert_eq!(v.len(), 50_000);
        let n = (v.len() + big.b().len()) as f64;
        let mean = v.iter().chain(big.b()).sum::<f64>() / n;
        let var = v
            .iter()
            .chain(big.b())
            .map(|x| (x - mean).powi(2))
            .sum::<f64>()
            / n;
        assert!(mean.abs() <= 0.05, "mean {mean}");
        assert!((0.9..=1.1).contains(&var), "variance {var}");
    }

    #[test]
    fn dimension_rule_for_six_points() {
        assert_eq!(separating_dim(3 * 6), 37);
    }

    #[test]
    fn pow_embedding_is_a_sum_over_elements() {
        // With Ψ = power sums, component j is Σ_i q_j(x_i), q_j(x) = Σ_k b_jk (a_jᵀx)^k.
        let p = EmbedParams::sample(9, 3, 4, 0, PsiKind::Pow, Seed(21));
        let m = crate::cloud::PointCloud::random_gaussian(3, 4, Seed(22)).into_matrix() * 0.5;
        let e = p.embed_multiset(&m).unwrap();
        for (j, &ej) in e.iter().enumerate() {
            let a = &p.a()[j * 3..(j + 1) * 3];
            let b = &p.b()[j * 4..(j + 1) * 4];
            let q: f64 = (0..4)
                .map(|i| {
                    let s: f64 = (0..3).map(|t| a[t] * m[(t, i)]).sum();
                    (0..4).map(|k| b[k] * s.powi(k as i32 + 1)).sum::<f64>()
                })
                .sum();
            assert!((q - ej).abs() <= 1e-10 * q.abs().max(1.0));
        }
    }

    #[test]
    fn separation_statistics() {
        // Distinct random multisets never collide with K = 2·D·N + 1.
        let (d, n) = (3, 6);
        for s in 0..1000u64 {
            let p = EmbedParams::sample(separating_dim(d * n), d, n, 0, PsiKind::Sort, Seed(s));
            let m1 =
                crate::cloud::PointCloud::random_gaussian(d, n, Seed(10_000 + s)).into_matrix();
            let m2 =
                crate::cloud::PointCloud::random_gaussian(d, n, Seed(20_000 + s)).into_matrix();
            let e1 = p.embed_multiset(&m1).unwrap();
            let e2 = p.embed_multiset(&m2).unwrap();
            assert!(
                crate::feature::relative_gap(&e1, &e2) > 1e-9,
                "collision at seed {s}"
            );
        }
    }

    fn permuted(m: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
        let mut out = m.clone();
        for (i, &p) in perm.iter().enumerate() {
            out.set_column(p, &m.column(i));
        }
        out
    }

    proptest! {
        #[test]
        fn sort_embedding_is_permutation_invariant(seed in 0u64..1000, perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle()) {
            let p = EmbedParams::sample(15, 3, 7, 0, PsiKind::Sort, Seed(seed));
            let m = crate::cloud::PointCloud::random_gaussian(3, 7, Seed(seed + 1)).into_matrix();
            prop_assert_eq!(p.embed_multiset(&m).unwrap(), p.embed_multiset(&permuted(&m, &perm)).unwrap());
        }

        #[test]
        fn pow_embedding_is_permutation_invariant(seed in 0u64..1000, perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle()) {
            let p = EmbedParams::sample(15, 3, 7, 0, PsiKind::Pow, Seed(seed));
            let m = crate::cloud::PointCloud::random_gaussian(3, 7, Seed(seed + 1)).into_matrix();
            let e1 = p.embed_multiset(&m).unwrap();
            let e2 = p.embed_multiset(&permuted(&m, &perm)).unwrap();
            let scale = e1.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
            for (a, b) in e1.iter().zip(&e2) {
                prop_assert!((a - b).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn sort_embedding_is_lipschitz(seed in 0u64..1000, eps in 1e-8f64..1.0) {
            let p = EmbedParams::sample(15, 3, 7, 0, PsiKind::Sort, Seed(seed));
            let m = crate::cloud::PointCloud::random_gaussian(3, 7, Seed(seed + 1)).into_matrix();
            let dm = crate::cloud::PointCloud::random_gaussian(3, 7, Seed(seed + 2)).into_matrix() * eps;
            let e1 = p.embed_multiset(&m).unwrap();
            let e2 = p.embed_multiset(&(&m + &dm)).unwrap();
            let gap = e1.iter().zip(&e2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(gap <= p.lipschitz_bound() * dm.norm() * (1.0 + 1e-9) + 1e-12);
        }
    }
}
