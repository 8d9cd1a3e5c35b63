//! Feature engineering and classification toolkit for social-bot detection:
//! canonical dataset ingestion, account- and content-based feature
//! extraction, feature ranking with iterative top-k selection,
//! cross-validated classification and ablation reporting.

pub mod catalog;
pub mod error;
pub mod features;
pub mod ingest;
pub mod learn;
pub mod matrix;
pub mod pipeline;
pub mod rng;
pub mod select;
pub mod textstats;
pub mod types;

pub use catalog::{build_catalog, FeatureCatalog, FeatureDef, FeatureFamily, FeatureSource};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use types::{
    normalize_hex_color, validate_account, AccountRecord, DatasetFormat, DatasetManifest, Label,
    TweetRecord,
};
