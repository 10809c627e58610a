use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::model::EmbeddingModel;
use super::KgTripleId;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RankMetrics {
    pub mean_rank: f64,
    pub mrr: f64,
    pub hits_at_1: f64,
    pub hits_at_3: f64,
    pub hits_at_10: f64,
}

/// Link-prediction metrics averaged over head and tail prediction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EvalMetrics {
    /// Number of ranks averaged (two per triple).
    pub ranks: usize,
    pub raw: RankMetrics,
    pub filtered: RankMetrics,
}

/// 1 + number of candidates scoring at least as high as `truth`, skipping
/// the true index itself and every index for which `excluded` holds.
pub fn rank_pessimistic(scores: &[f64], truth: usize, excluded: impl Fn(usize) -> bool) -> usize {
    let target = scores[truth];
    1 + scores.iter().enumerate().filter(|&(i, &s)| i != truth && s >= target && !excluded(i)).count()
}

#[derive(Default)]
struct Sums {
    n: usize,
    rank: f64,
    rr: f64,
    hits: [usize; 3],
}

impl Sums {
    fn add(&mut self, rank: usize) {
        self.n += 1;
        self.rank += rank as f64;
        self.rr += 1.0 / rank as f64;
        for (slot, k) in self.hits.iter_mut().zip([1, 3, 10]) {
            if rank <= k {
                *slot += 1;
            }
        }
    }

    fn finish(&self) -> RankMetrics {
        if self.n == 0 {
            return RankMetrics::default();
        }
        let n = self.n as f64;
        RankMetrics {
            mean_rank: self.rank / n,
            mrr: self.rr / n,
            hits_at_1: self.hits[0] as f64 / n,
            hits_at_3: self.hits[1] as f64 / n,
            hits_at_10: self.hits[2] as f64 / n,
        }
    }
}

/// Rank every eval triple's true tail against all entities as tails, and
/// its true head against all entities as heads. Filtered ranks ignore
/// candidates that form another triple in `known`. An empty eval set gives
/// all-zero metrics.
pub fn evaluate(model: &EmbeddingModel, eval: &[KgTripleId], known: &HashSet<KgTripleId>) -> EvalMetrics {
    let n = model.num_entities();
    let per_triple: Vec<[usize; 4]> = eval
        .par_iter()
        .map(|&x| {
            let tails: Vec<f64> = (0..n).map(|e| model.score(x.h(), x.r(), e)).collect();
            let heads: Vec<f64> = (0..n).map(|e| model.score(e, x.r(), x.t())).collect();
            let raw_tail = rank_pessimistic(&tails, x.t(), |_| false);
            let filt_tail = rank_pessimistic(&tails, x.t(), |e| known.contains(&KgTripleId::new(x.h(), x.r(), e)));
            let raw_head = rank_pessimistic(&heads, x.h(), |_| false);
            let filt_head = rank_pessimistic(&heads, x.h(), |e| known.contains(&KgTripleId::new(e, x.r(), x.t())));
            [raw_tail, raw_head, filt_tail, filt_head]
        })
        .collect();
    // merged in input order so sums are reproducible
    let (mut raw, mut filtered) = (Sums::default(), Sums::default());
    for [rt, rh, ft, fh] in per_triple {
        raw.add(rt);
        raw.add(rh);
        filtered.add(ft);
        filtered.add(fh);
    }
    EvalMetrics { ranks: raw.n, raw: raw.finish(), filtered: filtered.finish() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Technique;

    #[test]
    fn constructed_optimum_ranks_first() {
        // DistMult d=1: entity values 1, 2, 3 and relation 1, so (2, 0, t) is
        // maximised by t = 2 and (h, 0, 2) by h = 2.
        let mut m = EmbeddingModel::zeros(Technique::DistMult, 1, 3, 1);
        m.entities = vec![1.0, 2.0, 3.0];
        m.relations = vec![1.0];
        let t = KgTripleId::new(2, 0, 2);
        let r = evaluate(&m, &[t], &HashSet::from([t]));
        assert_eq!(r.filtered.mean_rank, 1.0);
        assert_eq!(r.filtered.mrr, 1.0);
        assert_eq!(r.filtered.hits_at_1, 1.0);
    }

    #[test]
    fn all_ties_rank_last() {
        let m = EmbeddingModel::zeros(Technique::TransE, 2, 5, 1);
        let t = KgTripleId::new(0, 0, 1);
        let known = HashSet::from([t, KgTripleId::new(0, 0, 3)]);
        let r = evaluate(&m, &[t], &known);
        // raw: 5 both ways; filtered: tail side drops entity 3
        assert_eq!(r.raw.mean_rank, 5.0);
        assert_eq!(r.filtered.mean_rank, (4.0 + 5.0) / 2.0);
    }

    #[test]
    fn empty_eval_set() {
        let m = EmbeddingModel::zeros(Technique::DistMult, 2, 3, 1);
        assert_eq!(evaluate(&m, &[], &HashSet::new()).ranks, 0);
    }
}
