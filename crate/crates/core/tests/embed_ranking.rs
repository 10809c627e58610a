use std::collections::HashSet;

use kgforge::embed::{evaluate, EmbeddingModel, KgTripleId, RankMetrics, Technique};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ranks by direct counting, one candidate at a time.
fn brute_force(model: &EmbeddingModel, eval: &[KgTripleId], known: &HashSet<KgTripleId>) -> (RankMetrics, RankMetrics) {
    let n = model.num_entities();
    let mut raw = Vec::new();
    let mut filtered = Vec::new();
    for x in eval {
        let truth_tail = model.score(x.h(), x.r(), x.t());
        let truth_head = model.score(x.h(), x.r(), x.t());
        let (mut rt, mut ft, mut rh, mut fh) = (1, 1, 1, 1);
        for e in 0..n {
            if e != x.t() && model.score(x.h(), x.r(), e) >= truth_tail {
                rt += 1;
                if !known.contains(&KgTripleId::new(x.h(), x.r(), e)) {
                    ft += 1;
                }
            }
            if e != x.h() && model.score(e, x.r(), x.t()) >= truth_head {
                rh += 1;
                if !known.contains(&KgTripleId::new(e, x.r(), x.t())) {
                    fh += 1;
                }
            }
        }
        raw.extend([rt, rh]);
        filtered.extend([ft, fh]);
    }
    (summarize(&raw), summarize(&filtered))
}

fn summarize(ranks: &[usize]) -> RankMetrics {
    let n = ranks.len() as f64;
    let hits = |k: usize| ranks.iter().filter(|&&r| r <= k).count() as f64 / n;
    RankMetrics {
        mean_rank: ranks.iter().sum::<usize>() as f64 / n,
        mrr: ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / n,
        hits_at_1: hits(1),
        hits_at_3: hits(3),
        hits_at_10: hits(10),
    }
}

fn close(a: &RankMetrics, b: &RankMetrics) -> bool {
    let pairs = [
        (a.mean_rank, b.mean_rank),
        (a.mrr, b.mrr),
        (a.hits_at_1, b.hits_at_1),
        (a.hits_at_3, b.hits_at_3),
        (a.hits_at_10, b.hits_at_10),
    ];
    pairs.iter().all(|(x, y)| (x - y).abs() <= 1e-12)
}

fn random_triples(rng: &mut ChaCha8Rng, n: usize, entities: usize, relations: usize) -> Vec<KgTripleId> {
    let set: HashSet<KgTripleId> = (0..n)
        .map(|_| KgTripleId::new(rng.gen_range(0..entities), rng.gen_range(0..relations), rng.gen_range(0..entities)))
        .collect();
    let mut v: Vec<KgTripleId> = set.into_iter().collect();
    v.sort();
    v
}

#[test]
fn all_zero_model_ranks_every_truth_last_among_unfiltered_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (entities, relations) = (15, 3);
    let known_list = random_triples(&mut rng, 60, entities, relations);
    let known: HashSet<KgTripleId> = known_list.iter().copied().collect();
    for technique in Technique::ALL {
        let model = EmbeddingModel::zeros(technique, 4, entities, relations);
        let got = evaluate(&model, &known_list[..20], &known);
        let (raw, filtered) = brute_force(&model, &known_list[..20], &known);
        assert_eq!(got.raw.mean_rank, entities as f64, "{technique}");
        assert!(close(&got.raw, &raw) && close(&got.filtered, &filtered), "{technique}");
    }
}

#[test]
fn evaluation_matches_brute_force_on_random_models() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let technique = Technique::ALL[seed as usize % 4];
        let (entities, relations) = (rng.gen_range(5..25), rng.gen_range(1..4));
        let model = EmbeddingModel::random(technique, 6, entities, relations, &mut rng);
        let known_list = random_triples(&mut rng, 50, entities, relations);
        let known: HashSet<KgTripleId> = known_list.iter().copied().collect();
        let eval = &known_list[..known_list.len().min(15)];

        let got = evaluate(&model, eval, &known);
        let (raw, filtered) = brute_force(&model, eval, &known);
        assert_eq!(got.ranks, 2 * eval.len());
        assert!(close(&got.raw, &raw), "seed {seed}: {:?} vs {raw:?}", got.raw);
        assert!(close(&got.filtered, &filtered), "seed {seed}: {:?} vs {filtered:?}", got.filtered);
        assert!(got.filtered.mean_rank <= got.raw.mean_rank);
        assert!(got.filtered.mrr >= got.raw.mrr);
        assert!(got.filtered.hits_at_10 >= got.raw.hits_at_10);
    }
}
