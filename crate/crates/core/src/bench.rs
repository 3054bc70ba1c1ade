//! Classification benchmark on a pair of clouds.
//!
//! Each sample picks a prototype uniformly, applies a random group element
//! and Gaussian noise, and is classified from its feature alone.
//! [`Classifier::Nearest`] assigns the prototype whose feature is closer.
//! The default [`Classifier::Lda`] is a linear discriminant with Ledoit-Wolf
//! shrinkage, fitted on a separate calibration draw of noisy samples from
//! each class. When the two prototype features coincide (relative gap ≤
//! `tol`), the test cannot tell the classes apart and every sample is labeled
//! by a fair coin.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng as _;

use nalgebra::{DMatrix, DVector};

use crate::embed::PsiKind;
use crate::error::{GeoError, Result};
use crate::feature::FeatureVector;
use crate::group::GroupKind;
use crate::instances::{make_sample, InstancePair, SampleSpec, Which};
use crate::par::map_range;
use crate::rng::Seed;
use crate::test_kind::{FeatureMap, TestKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Classifier {
    /// Plain L2 distance to the prototype features.
    Nearest,
    /// Shrinkage linear discriminant fitted on calibration samples.
    #[default]
    Lda,
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classifier::Nearest => "nearest",
            Classifier::Lda => "lda",
        })
    }
}

impl FromStr for Classifier {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Classifier::Nearest),
            "lda" => Ok(Classifier::Lda),
            _ => Err(GeoError::Invalid(format!(
                "unknown classifier {s:?} (expected lda or nearest)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub test: TestKind,
    pub samples: usize,
    pub sigma: f64,
    pub seed: Seed,
    pub tol: f64,
    pub psi: PsiKind,
    pub group: GroupKind,
    pub translate: bool,
    pub classifier: Classifier,
    /// Calibration samples per class for [`Classifier::Lda`].
    pub calibration: usize,
}

impl BenchConfig {
    pub fn new(test: TestKind) -> Self {
        BenchConfig {
            test,
            samples: 1000,
            sigma: 0.1,
            seed: Seed(0),
            tol: 1e-6,
            psi: PsiKind::Sort,
            group: GroupKind::So,
            translate: false,
            classifier: Classifier::Lda,
            calibration: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub drawn: usize,
    pub correct: usize,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub pair: String,
    pub feature_dim: usize,
    /// Accuracy of the configured classifier.
    pub accuracy: f64,
    pub correct: usize,
    pub first: ClassCounts,
    pub second: ClassCounts,
    /// Accuracy of the plain L2 rule on the same samples.
    pub nearest_accuracy: f64,
    /// `None` unless the discriminant was fitted.
    pub lda_accuracy: Option<f64>,
    pub prototype_gap: f64,
    pub separated: bool,
    pub runtime_secs: f64,
}

impl fmt::Display for BenchReport {
    /// `key: value` lines; only the final `runtime` line varies between runs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "pair: {}", self.pair)?;
        writeln!(f, "test: {}", c.test)?;
        writeln!(f, "group: {}", c.group)?;
        writeln!(f, "psi: {}", c.psi)?;
        writeln!(f, "seed: {}", c.seed.0)?;
        writeln!(f, "samples: {}", c.samples)?;
        writeln!(f, "sigma: {:?}", c.sigma)?;
        writeln!(f, "tol: {:?}", c.tol)?;
        writeln!(f, "translate: {}", c.translate)?;
        writeln!(f, "classifier: {}", c.classifier)?;
        writeln!(f, "calibration: {}", c.calibration)?;
        writeln!(f, "feature_dim: {}", self.feature_dim)?;
        writeln!(f, "prototype_gap: {:e}", self.prototype_gap)?;
        writeln!(f, "prototypes_separated: {}", self.separated)?;
        writeln!(
            f,
            "first: drawn {} correct {}",
            self.first.drawn, self.first.correct
        )?;
        writeln!(
            f,
            "second: drawn {} correct {}",
            self.second.drawn, self.second.correct
        )?;
        writeln!(f, "correct: {}", self.correct)?;
        writeln!(f, "accuracy: {}", self.accuracy)?;
        writeln!(f, "accuracy_nearest: {}", self.nearest_accuracy)?;
        match self.lda_accuracy {
            Some(a) => writeln!(f, "accuracy_lda: {a}")?,
            None => writeln!(f, "accuracy_lda: n/a")?,
        }
        write!(f, "runtime_secs: {:.3}", self.runtime_secs)
    }
}

/// Two-class linear discriminant: `⟨w, f⟩ > threshold` picks the first class.
struct Lda {
    w: DVector<f64>,
    threshold: f64,
}

impl Lda {
    /// Equal priors; pooled covariance with Ledoit-Wolf shrinkage computed on
    /// per-feature standardized samples.
    fn fit(first: &[FeatureVector], second: &[FeatureVector]) -> Result<Self> {
        let p = first.first().map_or(0, |f| f.len());
        if first.len() < 2 || second.len() < 2 {
            return Err(GeoError::Invalid(
                "the discriminant needs at least 2 calibration samples per class".into(),
            ));
        }
        let mut cov = DMatrix::<f64>::zeros(p, p);
        let mut means = Vec::new();
        for class in [first, second] {
            let m = class.len();
            let data = DMatrix::from_fn(m, p, |r, c| class[r].0[c]);
            let mean = data.row_mean();
            let centered = DMatrix::from_fn(m, p, |r, c| data[(r, c)] - mean[c]);
            let scale: Vec<f64> = (0..p)
                .map(|c| {
                    let sd = (centered.column(c).norm_squared() / m as f64).sqrt();
                    if sd > 0.0 {
                        sd
                    } else {
                        1.0
                    }
                })
                .collect();
            let z = DMatrix::from_fn(m, p, |r, c| centered[(r, c)] / scale[c]);
            let shrunk = ledoit_wolf(&z);
            cov += 0.5 * DMatrix::from_fn(p, p, |r, c| scale[r] * shrunk[(r, c)] * scale[c]);
            means.push(mean.transpose());
        }
        let diff = &means[0] - &means[1];
        // A small ridge keeps noise-free calibration (zero covariance) solvable.
        let ridge = 1e-9 * cov.trace() / p as f64
            + 1e-15 * diff.norm_squared() / p as f64
            + f64::MIN_POSITIVE;
        for i in 0..p {
            cov[(i, i)] += ridge;
        }
        let w = match cov.clone().cholesky() {
            Some(ch) => ch.solve(&diff),
            None => cov
                .svd(true, true)
                .solve(&diff, 1e-12)
                .map_err(|e| GeoError::Invalid(format!("discriminant solve failed: {e}")))?,
        };
        let threshold = 0.5 * (w.dot(&means[0]) + w.dot(&means[1]));
        Ok(Lda { w, threshold })
    }

    /// Signed score; positive picks the first class.
    fn score(&self, f: &FeatureVector) -> f64 {
        self.w.iter().zip(&f.0).map(|(a, b)| a * b).sum::<f64>() - self.threshold
    }
}

/// Ledoit-Wolf shrunk covariance of the rows of `z` (already centered).
fn ledoit_wolf(z: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p) = (z.nrows() as f64, z.ncols());
    let emp = z.transpose() * z / n;
    let mu = emp.trace() / p as f64;
    let z2 = z.map(|v| v * v);
    let beta_sum = (z2.transpose() * &z2).sum();
    let delta_sum = emp.map(|v| v * v).sum();
    let beta = (beta_sum / n - delta_sum) / (p as f64 * n);
    let delta = (delta_sum - 2.0 * mu * emp.trace() + p as f64 * mu * mu) / p as f64;
    let shrinkage = if delta > 0.0 {
        (beta.min(delta) / delta).max(0.0)
    } else {
        1.0
    };
    let mut out = emp * (1.0 - shrinkage);
    for i in 0..p {
        out[(i, i)] += shrinkage * mu;
    }
    out
}

/// `true` picks the first prototype. Exact ties go to the coin.
fn decide(d1: f64, d2: f64, coin: bool) -> bool {
    if d1 < d2 {
        true
    } else if d2 < d1 {
        false
    } else {
        coin
    }
}

pub fn run_bench(pair: &InstancePair, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.samples == 0 {
        return Err(GeoError::Invalid("samples must be ≥ 1".into()));
    }
    if !(cfg.sigma >= 0.0 && cfg.sigma.is_finite()) {
        return Err(GeoError::Invalid(format!(
            "sigma must be finite and ≥ 0 (got {})",
            cfg.sigma
        )));
    }
    let start = Instant::now();
    let (d, n) = (pair.x.dim(), pair.x.len());
    let map = FeatureMap::new(cfg.test, d, n, cfg.group, cfg.psi, cfg.seed)?;
    let p1 = map.compute(&pair.x)?;
    let p2 = map.compute(&pair.y)?;
    let prototype_gap = p1.relative_gap(&p2);
    let separated = prototype_gap > cfg.tol;
    let spec = SampleSpec {
        sigma: cfg.sigma,
        group: cfg.group,
        translate: cfg.translate,
    };
    let which = |first: bool| if first { Which::First } else { Which::Second };

    let cal_root = cfg.seed.derive("bench/calibration");
    let lda = if separated && cfg.classifier == Classifier::Lda {
        let cal: Vec<Result<FeatureVector>> = map_range(2 * cfg.calibration, |i| {
            let s = make_sample(
                pair,
                which(i < cfg.calibration),
                spec,
                cal_root.index(i as u64),
            )?;
            map.compute(&s)
        });
        let cal: Vec<FeatureVector> = cal.into_iter().collect::<Result<_>>()?;
        let (a, b) = cal.split_at(cfg.calibration);
        Some(Lda::fit(a, b)?)
    } else {
        None
    };

    let lda_fitted = lda.is_some();
    let root = cfg.seed.derive("bench/sample");
    let outcomes: Vec<Result<(bool, bool, Option<bool>)>> = map_range(cfg.samples, |i| {
        let seed = root.index(i as u64);
        let first = seed.stream("class").gen_bool(0.5);
        let s = make_sample(pair, which(first), spec, seed)?;
        let f: FeatureVector = map.compute(&s)?;
        let coin = seed.stream("tie").gen_bool(0.5);
        if !separated {
            return Ok((first, coin == first, Some(coin == first)));
        }
        let nearest = decide(f.l2_distance(&p1), f.l2_distance(&p2), coin) == first;
        let lda = lda
            .as_ref()
            .map(|l| decide(-l.score(&f), 0.0, coin) == first);
        Ok((first, nearest, lda))
    });

    let mut first = ClassCounts::default();
    let mut second = ClassCounts::default();
    let (mut n_nearest, mut n_lda) = (0usize, 0usize);
    for o in outcomes {
        let (is_first, nearest, lda) = o?;
        let hit = match cfg.classifier {
            Classifier::Nearest => nearest,
            Classifier::Lda => lda.unwrap_or(false),
        };
        let counts = if is_first { &mut first } else { &mut second };
        counts.drawn += 1;
        counts.correct += usize::from(hit);
        n_nearest += usize::from(nearest);
        n_lda += usize::from(lda.unwrap_or(false));
    }
    let correct = first.correct + second.correct;
    let total = cfg.samples as f64;
    Ok(BenchReport {
        config: cfg.clone(),
        pair: pair.name.clone(),
        feature_dim: map.output_dim(),
        accuracy: correct as f64 / total,
        correct,
        first,
        second,
        nearest_accuracy: n_nearest as f64 / total,
        lda_accuracy: (lda_fitted || !separated).then_some(n_lda as f64 / total),
        prototype_gap,
        separated,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_cholesky_pair;

    fn small(test: TestKind, sigma: f64) -> BenchConfig {
        BenchConfig {
            samples: 40,
            sigma,
            calibration: 5,
            ..BenchConfig::new(test)
        }
    }

    #[test]
    fn noise_free_complete_test_is_perfect() {
        let pair = gen_cholesky_pair(3).unwrap();
        let r = run_bench(&pair, &small(TestKind::DGeo, 0.0)).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.nearest_accuracy, 1.0);
        assert_eq!(r.first.drawn + r.second.drawn, 40);
        assert!(r.separated);
    }

    #[test]
    fn blind_test_flips_coins() {
        let pair = gen_cholesky_pair(3).unwrap();
        let r = run_bench(&pair, &small(TestKind::Geo1, 0.0)).unwrap();
        assert!(!r.separated);
        assert!(r.accuracy > 0.2 && r.accuracy < 0.8);
    }

    #[test]
    fn reports_are_reproducible() {
        let pair = gen_cholesky_pair(3).unwrap();
        let cfg = small(TestKind::DGeo, 0.1);
        let strip = |r: BenchReport| r.to_string().rsplit_once('\n').unwrap().0.to_string();
        let a = strip(run_bench(&pair, &cfg).unwrap());
        let b = strip(run_bench(&pair, &cfg).unwrap());
        assert_eq!(a, b);
        let t = BenchConfig {
            translate: true,
            ..cfg
        };
        let c = run_bench(&pair, &t).unwrap();
        assert_eq!(
            c.correct,
            run_bench(&pair, &small(TestKind::DGeo, 0.1))
                .unwrap()
                .correct
        );
    }

    #[test]
    fn rejects_bad_config() {
        let pair = gen_cholesky_pair(3).unwrap();
        assert!(run_bench(
            &pair,
            &BenchConfig {
                samples: 0,
                ..small(TestKind::DGeo, 0.1)
            }
        )
        .is_err());
        assert!(run_bench(&pair, &small(TestKind::DGeo, -1.0)).is_err());
        assert!(run_bench(&pair, &small(TestKind::Geo2So, 0.1)).is_err());
    }
}
