//! The 20-entity toy graph used for memorization checks.

use kgforge::embed::{CheckpointEvaluator, EmbeddingModel, KgTripleId, Split, Technique, TrainConfig};

pub const ENTITIES: usize = 20;
pub const RELATIONS: usize = 2;

/// Relation 0 steps one entity around a ring, relation 1 steps two.
pub fn triples() -> Vec<KgTripleId> {
    let mut out = Vec::new();
    for i in 0..ENTITIES {
        out.push(KgTripleId::new(i, 0, (i + 1) % ENTITIES));
        out.push(KgTripleId::new(i, 1, (i + 2) % ENTITIES));
    }
    out
}

/// Memorization setting: every triple is trained on, and the validation and
/// test sets are drawn from the training triples.
pub fn memorization_split() -> Split {
    let all = triples();
    Split { train: all.clone(), valid: all[..10].to_vec(), test: all[..20].to_vec() }
}

pub fn memorization_config(technique: Technique) -> TrainConfig {
    TrainConfig { technique, dim: 32, learning_rate: 0.01, seed: 42, ..TrainConfig::default() }
}

/// Returns scripted validation mean ranks and keeps a copy of the model at
/// every checkpoint.
pub struct Scripted {
    pub ranks: Vec<f64>,
    pub calls: usize,
    pub snapshots: Vec<(usize, EmbeddingModel)>,
}

impl Scripted {
    pub fn new(ranks: &[f64]) -> Self {
        Scripted { ranks: ranks.to_vec(), calls: 0, snapshots: Vec::new() }
    }

    pub fn snapshot(&self, epoch: usize) -> &EmbeddingModel {
        &self.snapshots.iter().find(|(e, _)| *e == epoch).expect("no checkpoint at that epoch").1
    }
}

impl CheckpointEvaluator for Scripted {
    fn validation_mean_rank(&mut self, epoch: usize, model: &EmbeddingModel) -> f64 {
        self.snapshots.push((epoch, model.clone()));
        self.calls += 1;
        self.ranks[self.calls - 1]
    }
}

/// Tracks the worst RotatE modulus error seen after any epoch.
#[derive(Default)]
pub struct ModulusWatch {
    pub epochs: usize,
    pub worst: f64,
}

impl CheckpointEvaluator for ModulusWatch {
    fn validation_mean_rank(&mut self, _epoch: usize, _model: &EmbeddingModel) -> f64 {
        1.0
    }

    fn after_epoch(&mut self, _epoch: usize, model: &EmbeddingModel) {
        self.epochs += 1;
        self.worst = self.worst.max(model.max_modulus_error());
    }
}
