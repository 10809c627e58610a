//! End-to-end steps shared by the command-line tool and the tests.

mod build;
mod publish;
mod validate;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::ingest::IngestError;
use crate::ontology::OntologyError;
use crate::rdf::RdfError;

pub use build::{build_graph, discover_dumps, BuildOutput, BuildReport};
pub use publish::{default_prefixes, latest_paper_date, link_graph, ontology_graph, void_graph, LinkOutcome};
pub use validate::{validate_graph, Violation};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no dump files found in {0}")]
    NoDumps(PathBuf),
    #[error("both {first} and {second} are the same dump")]
    DuplicateDump { first: PathBuf, second: PathBuf },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error(transparent)]
    Io(#[from] io::Error),
}
