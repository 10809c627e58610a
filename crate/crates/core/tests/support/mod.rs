//! Generators and brute-force oracles shared by the integration tests.
//! Every file here depends only on the public API so other crates can pull
//! single files in with `#[path]`.
#![allow(dead_code)]

pub mod gradcheck;
pub mod graphs;
pub mod stats_oracle;
pub mod toy_kg;
pub mod trees;

use std::path::PathBuf;

/// `<workspace>/fixtures`.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}
