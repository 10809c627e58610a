pub mod embed;
pub mod ingest;
pub mod linker;
pub mod ontology;
pub mod pipeline;
pub mod rdf;
pub mod stats;
pub mod textnorm;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
