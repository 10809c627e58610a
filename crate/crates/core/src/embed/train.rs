use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::eval::{evaluate, EvalMetrics};
use super::model::{add_score_gradient, pair_loss, project_unit_modulus, score_rows, EmbeddingModel};
use super::{EmbedError, KgTripleId, Technique, TrainConfig};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<KgTripleId>,
    pub valid: Vec<KgTripleId>,
    pub test: Vec<KgTripleId>,
}

impl Split {
    pub fn all(&self) -> impl Iterator<Item = &KgTripleId> {
        self.train.iter().chain(&self.valid).chain(&self.test)
    }
}

/// Seeded shuffle, then cut by the configured ratios (floor for train and
/// valid, the rest is test). A valid or test triple mentioning an entity or
/// relation missing from train is moved to train.
pub fn build_split(triples: &[KgTripleId], cfg: &TrainConfig) -> Result<Split, EmbedError> {
    let mut all: Vec<KgTripleId> = triples.to_vec();
    all.sort();
    all.dedup();
    if all.len() < 10 {
        return Err(EmbedError::TooSmall(all.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    all.shuffle(&mut rng);

    let n = all.len();
    let n_train = (n as f64 * cfg.split.0).floor() as usize;
    let n_valid = ((n as f64 * cfg.split.1).floor() as usize).min(n - n_train);
    let mut test = all.split_off(n_train + n_valid);
    let mut valid = all.split_off(n_train);
    let mut train = all;

    let mut entities: HashSet<u32> = train.iter().flat_map(|t| [t.head, t.tail]).collect();
    let mut relations: HashSet<u32> = train.iter().map(|t| t.relation).collect();
    // coverage only grows, so one pass in order is enough
    let mut keep = |part: &mut Vec<KgTripleId>, train: &mut Vec<KgTripleId>| {
        part.retain(|t| {
            let covered =
                entities.contains(&t.head) && entities.contains(&t.tail) && relations.contains(&t.relation);
            if !covered {
                entities.extend([t.head, t.tail]);
                relations.insert(t.relation);
                train.push(*t);
            }
            covered
        });
    };
    keep(&mut valid, &mut train);
    keep(&mut test, &mut train);
    Ok(Split { train, valid, test })
}

/// `n` corruptions of `triple`. Each replaces the head or the tail (fair
/// coin) by a different uniformly drawn entity; a draw that hits `known` is
/// redrawn up to 100 times and then kept as is.
pub fn negative_sample(
    triple: KgTripleId,
    n: usize,
    num_entities: usize,
    known: &HashSet<KgTripleId>,
    rng: &mut impl Rng,
) -> Vec<KgTripleId> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let corrupt_head = rng.gen_bool(0.5);
        let mut neg = triple;
        for _attempt in 0..=100 {
            let original = if corrupt_head { triple.h() } else { triple.t() };
            let e = if num_entities < 2 {
                original
            } else {
                let pick = rng.gen_range(0..num_entities - 1);
                if pick >= original { pick + 1 } else { pick }
            };
            neg = if corrupt_head {
                KgTripleId::new(e, triple.r(), triple.t())
            } else {
                KgTripleId::new(triple.h(), triple.r(), e)
            };
            if !known.contains(&neg) {
                break;
            }
        }
        out.push(neg);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean loss per (positive, negative) pair.
    pub loss: f64,
    pub valid_mean_rank: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub epoch: usize,
    pub valid_mean_rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub config: TrainConfig,
    pub deterministic: bool,
    pub entities: usize,
    pub relations: usize,
    pub train_triples: usize,
    pub valid_triples: usize,
    pub test_triples: usize,
    pub checkpoints: Vec<Checkpoint>,
    pub stopped_early: bool,
    /// Epoch whose parameters were returned.
    pub selected_epoch: usize,
    pub test: EvalMetrics,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: EmbeddingModel,
    pub report: EvalReport,
    pub log: Vec<EpochLog>,
}

/// Scores a model at each checkpoint; lower is better.
pub trait CheckpointEvaluator {
    fn validation_mean_rank(&mut self, epoch: usize, model: &EmbeddingModel) -> f64;

    /// Sees the parameters at the end of every epoch, after projection.
    fn after_epoch(&mut self, _epoch: usize, _model: &EmbeddingModel) {}
}

/// Filtered mean rank on a validation set.
pub struct ValidationMeanRank<'a> {
    pub valid: &'a [KgTripleId],
    pub known: &'a HashSet<KgTripleId>,
}

impl CheckpointEvaluator for ValidationMeanRank<'_> {
    fn validation_mean_rank(&mut self, _epoch: usize, model: &EmbeddingModel) -> f64 {
        evaluate(model, self.valid, self.known).filtered.mean_rank
    }
}

/// Train with filtered validation mean rank as the stopping signal, then
/// evaluate on the test split.
pub fn train(
    split: &Split,
    num_entities: usize,
    num_relations: usize,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, EmbedError> {
    let known: HashSet<KgTripleId> = split.all().copied().collect();
    let mut evaluator = ValidationMeanRank { valid: &split.valid, known: &known };
    train_with_evaluator(split, num_entities, num_relations, cfg, &mut evaluator)
}

pub fn train_with_evaluator(
    split: &Split,
    num_entities: usize,
    num_relations: usize,
    cfg: &TrainConfig,
    evaluator: &mut dyn CheckpointEvaluator,
) -> Result<TrainOutcome, EmbedError> {
    cfg.validate()?;
    if let Some(t) = split.all().find(|t| t.h() >= num_entities || t.t() >= num_entities || t.r() >= num_relations) {
        return Err(EmbedError::BadConfig(format!("triple {t:?} is outside the dictionaries")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = EmbeddingModel::random(cfg.technique, cfg.dim, num_entities, num_relations, &mut rng);
    let train_known: HashSet<KgTripleId> = split.train.iter().copied().collect();
    let mut order: Vec<KgTripleId> = split.train.clone();

    let mut log = Vec::with_capacity(cfg.max_epochs);
    let mut checkpoints: Vec<Checkpoint> = Vec::new();
    // parameters at the last checkpoint that was not worse than its predecessor
    let mut fallback: Option<(usize, EmbeddingModel)> = None;
    let mut worse_streak = 0;
    let mut selected: Option<(usize, EmbeddingModel)> = None;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let epoch_seed: u64 = rng.gen();
        let (loss_sum, pairs) = if cfg.parallel {
            run_epoch_parallel(&mut model, &order, &train_known, cfg, epoch_seed)
        } else {
            run_epoch(&mut model, &order, &train_known, cfg, epoch_seed)
        };
        if cfg.technique == Technique::TransE {
            model.normalize_entities();
        }
        if cfg.technique == Technique::RotatE {
            model.project_relations();
        }
        let loss = if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 };
        if !model.is_finite() || !loss.is_finite() {
            return Err(EmbedError::Diverged { epoch });
        }
        evaluator.after_epoch(epoch, &model);

        let mut entry = EpochLog { epoch, loss, valid_mean_rank: None };
        if epoch % cfg.eval_interval == 0 {
            let mr = evaluator.validation_mean_rank(epoch, &model);
            entry.valid_mean_rank = Some(mr);
            let worse = checkpoints.last().is_some_and(|prev| mr > prev.valid_mean_rank);
            checkpoints.push(Checkpoint { epoch, valid_mean_rank: mr });
            if worse {
                worse_streak += 1;
                if worse_streak >= cfg.patience {
                    log.push(entry);
                    selected = fallback.take();
                    break;
                }
            } else {
                worse_streak = 0;
                fallback = Some((epoch, model.clone()));
            }
        }
        log.push(entry);
    }

    let stopped_early = selected.is_some();
    let (selected_epoch, model) = selected.unwrap_or((cfg.max_epochs, model));
    let known: HashSet<KgTripleId> = split.all().copied().collect();
    let test = evaluate(&model, &split.test, &known);
    let report = EvalReport {
        config: cfg.clone(),
        deterministic: !cfg.parallel,
        entities: num_entities,
        relations: num_relations,
        train_triples: split.train.len(),
        valid_triples: split.valid.len(),
        test_triples: split.test.len(),
        checkpoints,
        stopped_early,
        selected_epoch,
        test,
    };
    Ok(TrainOutcome { model, report, log })
}

/// Read access to the parameter tables during a batch.
trait Rows: Sync {
    fn entity_into(&self, i: usize, buf: &mut [f64]);
    fn relation_into(&self, i: usize, buf: &mut [f64]);
}

impl Rows for EmbeddingModel {
    fn entity_into(&self, i: usize, buf: &mut [f64]) {
        buf.copy_from_slice(self.entity(i));
    }
    fn relation_into(&self, i: usize, buf: &mut [f64]) {
        buf.copy_from_slice(self.relation(i));
    }
}

#[derive(Default)]
struct BatchGrad {
    entities: HashMap<usize, Vec<f64>>,
    relations: HashMap<usize, Vec<f64>>,
    loss: f64,
    pairs: usize,
}

fn batch_gradient(
    rows: &dyn Rows,
    technique: Technique,
    width: usize,
    num_entities: usize,
    batch: &[KgTripleId],
    known: &HashSet<KgTripleId>,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> BatchGrad {
    let mut g = BatchGrad::default();
    let (mut h, mut r, mut t) = (vec![0.0; width], vec![0.0; width], vec![0.0; width]);
    let (mut gh, mut gr, mut gt) = (vec![0.0; width], vec![0.0; width], vec![0.0; width]);

    let mut accumulate = |g: &mut BatchGrad, x: KgTripleId, weight: f64, h: &[f64], r: &[f64], t: &[f64]| {
        gh.iter_mut().chain(gr.iter_mut()).chain(gt.iter_mut()).for_each(|v| *v = 0.0);
        add_score_gradient(technique, (h, r, t), weight, (&mut gh, &mut gr, &mut gt));
        for (table, idx, grad) in [(0, x.h(), &gh), (1, x.r(), &gr), (0, x.t(), &gt)] {
            let map = if table == 0 { &mut g.entities } else { &mut g.relations };
            let acc = map.entry(idx).or_insert_with(|| vec![0.0; width]);
            acc.iter_mut().zip(grad.iter()).for_each(|(a, b)| *a += b);
        }
    };

    for &pos in batch {
        rows.entity_into(pos.h(), &mut h);
        rows.relation_into(pos.r(), &mut r);
        rows.entity_into(pos.t(), &mut t);
        let pos_score = score_rows(technique, &h, &r, &t);
        let (ph, pr, pt) = (h.clone(), r.clone(), t.clone());
        for neg in negative_sample(pos, cfg.negatives, num_entities, known, rng) {
            rows.entity_into(neg.h(), &mut h);
            rows.entity_into(neg.t(), &mut t);
            let neg_score = score_rows(technique, &h, &pr, &t);
            let (loss, dpos, dneg) = pair_loss(technique, cfg.margin, pos_score, neg_score);
            g.loss += loss;
            g.pairs += 1;
            if dpos != 0.0 {
                accumulate(&mut g, pos, dpos, &ph, &pr, &pt);
            }
            if dneg != 0.0 {
                accumulate(&mut g, neg, dneg, &h, &pr, &t);
            }
        }
        r.copy_from_slice(&pr);
    }
    g
}

fn batch_seed(epoch_seed: u64, batch: usize) -> u64 {
    epoch_seed ^ (batch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_epoch(
    model: &mut EmbeddingModel,
    order: &[KgTripleId],
    known: &HashSet<KgTripleId>,
    cfg: &TrainConfig,
    epoch_seed: u64,
) -> (f64, usize) {
    let (technique, width, n) = (model.technique, model.width(), model.num_entities());
    let (mut loss, mut pairs) = (0.0, 0);
    for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(batch_seed(epoch_seed, b));
        let g = batch_gradient(model, technique, width, n, batch, known, cfg, &mut rng);
        loss += g.loss;
        pairs += g.pairs;
        // gradients are of the loss; descend. Row order does not matter.
        for (i, grad) in &g.entities {
            let row = &mut model.entities[i * width..(i + 1) * width];
            row.iter_mut().zip(grad).for_each(|(x, d)| *x -= cfg.learning_rate * d);
        }
        for (i, grad) in &g.relations {
            let row = &mut model.relations[i * width..(i + 1) * width];
            row.iter_mut().zip(grad).for_each(|(x, d)| *x -= cfg.learning_rate * d);
            if technique == Technique::RotatE {
                project_unit_modulus(row, model.dim);
            }
        }
    }
    (loss, pairs)
}

/// Tables shared between threads without locks. Concurrent read-modify-write
/// of a row can lose updates; that is the accepted price of this mode.
struct SharedTables {
    width: usize,
    entities: Vec<AtomicU64>,
    relations: Vec<AtomicU64>,
}

impl SharedTables {
    fn of(model: &EmbeddingModel) -> Self {
        let wrap = |v: &[f64]| v.iter().map(|x| AtomicU64::new(x.to_bits())).collect();
        SharedTables { width: model.width(), entities: wrap(&model.entities), relations: wrap(&model.relations) }
    }

    fn read(table: &[AtomicU64], i: usize, width: usize, buf: &mut [f64]) {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = f64::from_bits(table[i * width + k].load(Ordering::Relaxed));
        }
    }

    fn write(table: &[AtomicU64], i: usize, width: usize, buf: &[f64]) {
        for (k, b) in buf.iter().enumerate() {
            table[i * width + k].store(b.to_bits(), Ordering::Relaxed);
        }
    }

    fn unwrap(table: &[AtomicU64]) -> Vec<f64> {
        table.iter().map(|x| f64::from_bits(x.load(Ordering::Relaxed))).collect()
    }
}

impl Rows for SharedTables {
    fn entity_into(&self, i: usize, buf: &mut [f64]) {
        Self::read(&self.entities, i, self.width, buf);
    }
    fn relation_into(&self, i: usize, buf: &mut [f64]) {
        Self::read(&self.relations, i, self.width, buf);
    }
}

fn run_epoch_parallel(
    model: &mut EmbeddingModel,
    order: &[KgTripleId],
    known: &HashSet<KgTripleId>,
    cfg: &TrainConfig,
    epoch_seed: u64,
) -> (f64, usize) {
    let (technique, width, n, dim) = (model.technique, model.width(), model.num_entities(), model.dim);
    let shared = SharedTables::of(model);
    let per_batch: Vec<(f64, usize)> = order
        .par_chunks(cfg.batch_size)
        .enumerate()
        .map(|(b, batch)| {
            let mut rng = ChaCha8Rng::seed_from_u64(batch_seed(epoch_seed, b));
            let g = batch_gradient(&shared, technique, width, n, batch, known, cfg, &mut rng);
            let mut row = vec![0.0; width];
            for (i, grad) in &g.entities {
                SharedTables::read(&shared.entities, *i, width, &mut row);
                row.iter_mut().zip(grad).for_each(|(x, d)| *x -= cfg.learning_rate * d);
                SharedTables::write(&shared.entities, *i, width, &row);
            }
            for (i, grad) in &g.relations {
                SharedTables::read(&shared.relations, *i, width, &mut row);
                row.iter_mut().zip(grad).for_each(|(x, d)| *x -= cfg.learning_rate * d);
                if technique == Technique::RotatE {
                    project_unit_modulus(&mut row, dim);
                }
                SharedTables::write(&shared.relations, *i, width, &row);
            }
            (g.loss, g.pairs)
        })
        .collect();
    model.entities = SharedTables::unwrap(&shared.entities);
    model.relations = SharedTables::unwrap(&shared.relations);
    per_batch.into_iter().fold((0.0, 0), |(l, p), (bl, bp)| (l + bl, p + bp))
}
