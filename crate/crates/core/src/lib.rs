pub mod bench;
pub mod cloud;
pub mod embed;
pub mod error;
pub mod feature;
pub mod geo1;
pub mod geo2;
pub mod geoegnn;
pub mod group;
pub mod instances;
pub mod io;
pub mod oracle;
mod par;
pub mod rng;
pub mod selftest;
pub mod test_kind;
pub mod wl3;

pub use nalgebra;

pub use cloud::PointCloud;
pub use embed::{EmbedParams, PsiKind};
pub use error::{GeoError, Result};
pub use feature::FeatureVector;
pub use group::{GroupElement, GroupKind};
pub use rng::Seed;
