//! Reduced versions of the invariant suites, runnable from the command line.

use std::fmt;

use nalgebra::DMatrix;

use crate::bench::{run_bench, BenchConfig};
use crate::cloud::PointCloud;
use crate::embed::PsiKind;
use crate::error::Result;
use crate::geo1::{degree_histogram, histogram_distance};
use crate::geo2::{cross3, generalized_cross};
use crate::group::{GroupElement, GroupKind};
use crate::instances::gen_cholesky_pair;
use crate::oracle::{align_exhaustive, align_frames};
use crate::rng::Seed;
use crate::test_kind::{FeatureMap, TestKind};

#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    pub seed: Seed,
    /// Relative gap allowed between features of equivalent clouds.
    pub invariance_tol: f64,
    /// Relative gap above which features count as different.
    pub separation_tol: f64,
    pub trials: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: Seed(0),
            invariance_tol: 1e-6,
            separation_tol: 1e-6,
            trials: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn invariance_cases() -> Vec<(TestKind, usize, GroupKind)> {
    vec![
        (TestKind::Geo1, 3, GroupKind::O),
        (TestKind::Geo2So, 3, GroupKind::So),
        (TestKind::Geo2O, 3, GroupKind::O),
        (TestKind::DGeo, 3, GroupKind::So),
        (TestKind::DGeo, 4, GroupKind::So),
        (TestKind::Wl3, 3, GroupKind::O),
        (TestKind::GeoEgnn, 3, GroupKind::So),
        (TestKind::GeoEgnn, 3, GroupKind::O),
    ]
}

pub fn run_selftest(opts: &SelftestOptions) -> Result<SelftestReport> {
    let mut report = SelftestReport::default();
    let seed = opts.seed;
    let n = 5;

    for (kind, d, group) in invariance_cases() {
        let label = if matches!(kind, TestKind::DGeo | TestKind::GeoEgnn) {
            format!("{kind}[d={d},{group}]")
        } else {
            kind.to_string()
        };
        let map = FeatureMap::new(kind, d, n, group, PsiKind::Sort, seed.derive(&label))?;
        let mut worst = 0.0_f64;
        let mut exact = true;
        for t in 0..opts.trials {
            let s = seed.derive(&label).index(t as u64);
            let x = PointCloud::random_gaussian(d, n, s.derive("cloud"));
            let fx = map.compute(&x)?;
            let g = GroupElement::random(d, n, group.is_proper(), true, s.derive("element"));
            worst = worst.max(fx.relative_gap(&map.compute(&g.apply(&x)?)?));
            let p = GroupElement::random(d, n, true, false, s.derive("perm"));
            let perm_only = GroupElement::permutation(d, p.perm().to_vec())?;
            exact &= map.compute(&perm_only.apply(&x)?)? == fx;
        }
        report.push(
            format!("invariance/{label}"),
            worst <= opts.invariance_tol,
            format!(
                "worst relative gap {worst:.2e} over {} group elements",
                opts.trials
            ),
        );
        report.push(
            format!("permutation/{label}"),
            exact,
            "permutation-only actions give bit-identical features",
        );
    }

    // separation against the oracle, SO and O
    for (kind, group) in [
        (TestKind::Geo2So, GroupKind::So),
        (TestKind::Geo2O, GroupKind::O),
        (TestKind::Wl3, GroupKind::O),
    ] {
        let map = FeatureMap::new(kind, 3, n, group, PsiKind::Sort, seed.derive("separation"))?;
        let mut violations = 0;
        for t in 0..opts.trials {
            let s = seed.derive("separation").index(t as u64);
            let x = PointCloud::random_gaussian(3, n, s.derive("x"));
            let y = match t % 3 {
                0 => {
                    GroupElement::random(3, n, group.is_proper(), true, s.derive("g")).apply(&x)?
                }
                1 => x.mirror(),
                _ => PointCloud::random_gaussian(3, n, s.derive("y")),
            };
            let same = map.compute(&x)?.relative_gap(&map.compute(&y)?) <= opts.separation_tol;
            let oracle = align_exhaustive(&x, &y, group, 1e-6)?.equivalent;
            violations += usize::from(same != oracle);
        }
        report.push(
            format!("separation/{kind}"),
            violations == 0,
            format!("{violations} disagreements with the oracle"),
        );
    }

    let chiral = PointCloud::random_gaussian(3, n, seed.derive("chirality"));
    let so = FeatureMap::new(TestKind::Geo2So, 3, n, GroupKind::So, PsiKind::Sort, seed)?;
    let o = FeatureMap::new(TestKind::Geo2O, 3, n, GroupKind::O, PsiKind::Sort, seed)?;
    let gap_so = so
        .compute(&chiral)?
        .relative_gap(&so.compute(&chiral.mirror())?);
    let gap_o = o
        .compute(&chiral)?
        .relative_gap(&o.compute(&chiral.mirror())?);
    report.push(
        "chirality",
        gap_so > opts.separation_tol && gap_o <= opts.invariance_tol,
        format!("mirror gap {gap_so:.2e} (2geo-so), {gap_o:.2e} (2geo-o)"),
    );

    let mut worst_orth = 0.0_f64;
    let mut orientation_ok = true;
    let mut classical = true;
    for t in 0..opts.trials * 10 {
        let d = 3 + t % 6;
        let s = seed.derive("cross").index(t as u64);
        let v = PointCloud::random_gaussian(d, d - 1, s).into_matrix();
        let w = generalized_cross(&v)?;
        let scale = v
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
            .max(1.0)
            .powi(d as i32 - 1);
        for c in 0..d - 1 {
            let r: f64 = v.column(c).iter().zip(&w).map(|(a, b)| a * b).sum();
            worst_orth = worst_orth.max(r.abs() / scale);
        }
        let mut full = DMatrix::zeros(d, d);
        full.view_mut((0, 0), (d, d - 1)).copy_from(&v);
        full.column_mut(d - 1).copy_from_slice(&w);
        orientation_ok &= full.determinant() >= -1e-10;
        if d == 3 {
            classical &=
                w.as_slice() == cross3(v.column(0).as_slice(), v.column(1).as_slice()).as_slice();
        }
    }
    report.push(
        "generalized-cross",
        worst_orth <= 1e-10 && orientation_ok && classical,
        format!("orthogonality residual {worst_orth:.2e}, orientation {orientation_ok}, d=3 classical {classical}"),
    );

    let mut disagreements = 0;
    for t in 0..opts.trials {
        let s = seed.derive("oracles").index(t as u64);
        let m = 3 + t % 4;
        let x = PointCloud::random_gaussian(3, m, s.derive("x"));
        let y = if t % 2 == 0 {
            GroupElement::random(3, m, false, true, s.derive("g")).apply(&x)?
        } else {
            x.mirror()
        };
        let group = if t % 4 < 2 {
            GroupKind::So
        } else {
            GroupKind::O
        };
        let a = align_exhaustive(&x, &y, group, 1e-6)?;
        let b = align_frames(&x, &y, group, 1e-6)?;
        disagreements += usize::from(a.equivalent != b.equivalent);
    }
    report.push(
        "oracle-agreement",
        disagreements == 0,
        format!("{disagreements} label disagreements"),
    );

    let pair = gen_cholesky_pair(3)?;
    let hist = histogram_distance(&degree_histogram(&pair.x), &degree_histogram(&pair.y));
    let oracle = align_exhaustive(&pair.x, &pair.y, GroupKind::O, 1e-6)?;
    report.push(
        "cholesky-hardness",
        hist <= 1e-9 && !oracle.equivalent,
        format!(
            "degree histogram distance {hist:.2e}, oracle residual {:.3}",
            oracle.residual
        ),
    );

    let cfg = BenchConfig {
        samples: 20,
        sigma: 0.0,
        calibration: 3,
        seed,
        ..BenchConfig::new(TestKind::DGeo)
    };
    let bench = run_bench(&pair, &cfg)?;
    report.push(
        "bench-noise-free",
        bench.accuracy == 1.0,
        format!("dgeo accuracy {} at sigma = 0", bench.accuracy),
    );

    Ok(report)
}
