//! A uniform front end over the invariant feature maps.

use std::fmt;
use std::str::FromStr;

use crate::cloud::PointCloud;
use crate::embed::PsiKind;
use crate::error::{GeoError, Result};
use crate::feature::FeatureVector;
use crate::geo1::{f_1geo, Geo1Config};
use crate::geo2::{f_2geo_o, f_2geo_so, f_dgeo, Geo2Config};
use crate::geoegnn::{geoegnn_forward, GeoEgnnConfig};
use crate::group::GroupKind;
use crate::rng::Seed;
use crate::wl3::{f_3wl, Wl3Config};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Geo1,
    Geo2So,
    Geo2O,
    DGeo,
    Wl3,
    GeoEgnn,
}

impl TestKind {
    pub const ALL: [TestKind; 6] = [
        TestKind::Geo1,
        TestKind::Geo2So,
        TestKind::Geo2O,
        TestKind::DGeo,
        TestKind::Wl3,
        TestKind::GeoEgnn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Geo1 => "1geo",
            TestKind::Geo2So => "2geo-so",
            TestKind::Geo2O => "2geo-o",
            TestKind::DGeo => "dgeo",
            TestKind::Wl3 => "3wl",
            TestKind::GeoEgnn => "geoegnn",
        }
    }

    /// The group whose equivalences the test is blind to. `dgeo` and
    /// `geoegnn` take it from `group`.
    pub fn invariance(self, group: GroupKind) -> GroupKind {
        match self {
            TestKind::Geo1 | TestKind::Geo2O | TestKind::Wl3 => GroupKind::O,
            TestKind::Geo2So => GroupKind::So,
            TestKind::DGeo | TestKind::GeoEgnn => group,
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                GeoError::Invalid(format!(
                    "unknown test {s:?} (expected 1geo, 2geo-so, 2geo-o, dgeo, 3wl or geoegnn)"
                ))
            })
    }
}

/// A test with its embedding parameters fixed for clouds of one shape.
#[derive(Debug, Clone)]
pub enum FeatureMap {
    Geo1(Geo1Config),
    Geo2So(Geo2Config),
    Geo2O(Geo2Config),
    DGeo(Geo2Config),
    Wl3(Wl3Config),
    GeoEgnn(GeoEgnnConfig),
}

impl FeatureMap {
    /// Parameters for `d×n` clouds, derived from `seed` with the default
    /// dimensions of each test. `group` selects the `dgeo` and `geoegnn`
    /// variant and is ignored otherwise.
    pub fn new(
        kind: TestKind,
        d: usize,
        n: usize,
        group: GroupKind,
        psi: PsiKind,
        seed: Seed,
    ) -> Result<Self> {
        let need3 = |what: &str| -> Result<()> {
            if d != 3 {
                return Err(GeoError::Shape(format!("{what} needs d = 3 (got d = {d})")));
            }
            if n < 3 {
                return Err(GeoError::TooFewPoints { need: 3, got: n });
            }
            Ok(())
        };
        Ok(match kind {
            TestKind::Geo1 => FeatureMap::Geo1(Geo1Config::new(n, psi, seed)?),
            TestKind::Geo2So => {
                need3("2geo-so")?;
                FeatureMap::Geo2So(Geo2Config::so(n, psi, seed)?)
            }
            TestKind::Geo2O => {
                need3("2geo-o")?;
                FeatureMap::Geo2O(Geo2Config::o(n, psi, seed)?)
            }
            TestKind::DGeo => FeatureMap::DGeo(Geo2Config::general(d, n, group, psi, seed)?),
            TestKind::Wl3 => {
                if d != 3 {
                    return Err(GeoError::Shape(format!("3wl needs d = 3 (got d = {d})")));
                }
                FeatureMap::Wl3(Wl3Config::new(n, psi, seed)?)
            }
            TestKind::GeoEgnn => {
                need3("geoegnn")?;
                FeatureMap::GeoEgnn(GeoEgnnConfig::new(n, group, psi, seed)?)
            }
        })
    }

    pub fn kind(&self) -> TestKind {
        match self {
            FeatureMap::Geo1(_) => TestKind::Geo1,
            FeatureMap::Geo2So(_) => TestKind::Geo2So,
            FeatureMap::Geo2O(_) => TestKind::Geo2O,
            FeatureMap::DGeo(_) => TestKind::DGeo,
            FeatureMap::Wl3(_) => TestKind::Wl3,
            FeatureMap::GeoEgnn(_) => TestKind::GeoEgnn,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            FeatureMap::Geo1(c) => c.output_dim(),
            FeatureMap::Geo2So(c) | FeatureMap::Geo2O(c) | FeatureMap::DGeo(c) => c.output_dim(),
            FeatureMap::Wl3(c) => c.output_dim(),
            FeatureMap::GeoEgnn(c) => c.output_dim(),
        }
    }

    pub fn compute(&self, x: &PointCloud) -> Result<FeatureVector> {
        match self {
            FeatureMap::Geo1(c) => f_1geo(x, c),
            FeatureMap::Geo2So(c) => f_2geo_so(x, c),
            FeatureMap::Geo2O(c) => f_2geo_o(x, c),
            FeatureMap::DGeo(c) => f_dgeo(x, c),
            FeatureMap::Wl3(c) => f_3wl(x, c),
            FeatureMap::GeoEgnn(c) => Ok(geoegnn_forward(x, c)?.global),
        }
    }
}
