//! Knowledge-graph embeddings (TransE, DistMult, ComplEx, RotatE) over the
//! entity-to-entity links of a built graph.

mod eval;
mod export;
mod model;
mod train;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::vocab::RDF_TYPE;
use crate::rdf::{GraphBuffer, Term};

pub use eval::{evaluate, rank_pessimistic, EvalMetrics, RankMetrics};
pub use export::{export_embeddings, export_table, ExportTarget};
pub use model::{add_score_gradient, pair_loss, score_rows, EmbeddingModel};
pub use train::{
    build_split, negative_sample, train, train_with_evaluator, Checkpoint, CheckpointEvaluator, EpochLog, EvalReport,
    Split, TrainOutcome, ValidationMeanRank,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    TransE,
    DistMult,
    ComplEx,
    RotatE,
}

impl Technique {
    pub const ALL: [Technique; 4] = [Technique::TransE, Technique::DistMult, Technique::ComplEx, Technique::RotatE];

    /// Complex-valued techniques store two planes per row.
    pub fn is_complex(self) -> bool {
        matches!(self, Technique::ComplEx | Technique::RotatE)
    }

    pub fn margin_based(self) -> bool {
        matches!(self, Technique::TransE | Technique::RotatE)
    }

    pub fn width(self, dim: usize) -> usize {
        if self.is_complex() {
            2 * dim
        } else {
            dim
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Technique::TransE => "TransE",
            Technique::DistMult => "DistMult",
            Technique::ComplEx => "ComplEx",
            Technique::RotatE => "RotatE",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Technique::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| EmbedError::BadConfig(format!("unknown technique {s:?}")))
    }
}

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("need at least 10 triples to split, got {0}")]
    TooSmall(usize),
    #[error("parameters became non-finite in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("invalid training configuration: {0}")]
    BadConfig(String),
    #[error("write failed: {0}")]
    SinkWrite(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub technique: Technique,
    pub max_epochs: usize,
    pub eval_interval: usize,
    pub dim: usize,
    /// Margin for TransE and RotatE.
    pub margin: f64,
    pub learning_rate: f64,
    pub negatives: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// train / valid / test.
    pub split: (f64, f64, f64),
    /// Consecutive worse checkpoints tolerated before stopping.
    pub patience: usize,
    /// Unsynchronised concurrent batch updates; not bitwise reproducible.
    pub parallel: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            technique: Technique::TransE,
            max_epochs: 900,
            eval_interval: 300,
            dim: 100,
            margin: 1.0,
            learning_rate: 0.01,
            negatives: 8,
            batch_size: 1024,
            seed: 42,
            split: (0.9, 0.05, 0.05),
            patience: 1,
            parallel: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: &str| Err(EmbedError::BadConfig(m.to_owned()));
        if self.eval_interval == 0 || self.max_epochs % self.eval_interval != 0 {
            return bad("eval interval must divide max epochs");
        }
        let (a, b, c) = self.split;
        if [a, b, c].iter().any(|r| !(0.0..=1.0).contains(r)) || (a + b + c - 1.0).abs() > 1e-9 {
            return bad("split ratios must be in [0, 1] and sum to 1");
        }
        if self.dim == 0 || self.negatives == 0 || self.batch_size == 0 || self.patience == 0 {
            return bad("dimension, negatives, batch size and patience must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive and finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KgTripleId {
    pub head: u32,
    pub relation: u32,
    pub tail: u32,
}

impl KgTripleId {
    pub fn new(head: usize, relation: usize, tail: usize) -> Self {
        KgTripleId { head: head as u32, relation: relation as u32, tail: tail as u32 }
    }

    pub fn h(self) -> usize {
        self.head as usize
    }
    pub fn r(self) -> usize {
        self.relation as usize
    }
    pub fn t(self) -> usize {
        self.tail as usize
    }
}

/// Sorted entity and relation IRIs with their indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionaries {
    pub entities: Vec<String>,
    pub relations: Vec<String>,
}

/// Index the IRI-to-IRI triples of `graph` (literals and `rdf:type` are
/// left out). Indices follow sorted IRI order, so the result depends only
/// on the triple set.
pub fn index_graph(graph: &GraphBuffer) -> (Dictionaries, Vec<KgTripleId>) {
    let links: Vec<(&str, &str, &str)> = graph
        .iter()
        .filter(|t| t.predicate.as_str() != RDF_TYPE)
        .filter_map(|t| match &t.object {
            Term::Iri(o) => Some((t.subject.as_str(), t.predicate.as_str(), o.as_str())),
            Term::Literal(_) => None,
        })
        .collect();
    let entities: BTreeSet<&str> = links.iter().flat_map(|(s, _, o)| [*s, *o]).collect();
    let relations: BTreeSet<&str> = links.iter().map(|(_, p, _)| *p).collect();
    let e_index: HashMap<&str, usize> = entities.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let r_index: HashMap<&str, usize> = relations.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut triples: Vec<KgTripleId> =
        links.iter().map(|(s, p, o)| KgTripleId::new(e_index[s], r_index[p], e_index[o])).collect();
    triples.sort();
    let dicts = Dictionaries {
        entities: entities.into_iter().map(str::to_owned).collect(),
        relations: relations.into_iter().map(str::to_owned).collect(),
    };
    (dicts, triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Iri, Literal, Triple};

    #[test]
    fn config_checks() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig { eval_interval: 400, ..TrainConfig::default() };
        assert!(bad.validate().is_err());
        let bad = TrainConfig { split: (0.9, 0.1, 0.1), ..TrainConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn technique_names() {
        assert_eq!("rotate".parse::<Technique>().unwrap(), Technique::RotatE);
        assert!("convE".parse::<Technique>().is_err());
    }

    #[test]
    fn only_entity_links_are_indexed() {
        let iri = |s: &str| Iri::new(format!("https://x/{s}")).unwrap();
        let mut g = GraphBuffer::new();
        g.insert(Triple::new(iri("b"), iri("p"), iri("a")));
        g.insert(Triple::new(iri("a"), iri("q"), iri("c")));
        g.insert(Triple::new(iri("a"), iri("name"), Literal::string("A")));
        g.insert(Triple::new(iri("a"), Iri::new(RDF_TYPE).unwrap(), iri("Class")));
        let (dicts, triples) = index_graph(&g);
        assert_eq!(dicts.entities, ["https://x/a", "https://x/b", "https://x/c"]);
        assert_eq!(dicts.relations, ["https://x/p", "https://x/q"]);
        assert_eq!(triples, vec![KgTripleId::new(0, 1, 2), KgTripleId::new(1, 0, 0)]);
    }
}
