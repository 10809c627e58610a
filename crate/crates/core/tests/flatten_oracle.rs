mod support;

use kgforge::ingest::flatten_evaluation_tree;
use kgforge::ontology::EntityKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::trees::{depth, expected_counts, random_tree, MAX_DEPTH};

#[test]
fn flattening_matches_recursive_count_on_500_trees() {
    let mut mismatches = Vec::new();
    let mut deepest = 0;
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = random_tree(&mut rng);
        assert!(depth(&tree) <= MAX_DEPTH);
        deepest = deepest.max(depth(&tree));

        let expected = expected_counts(&tree);
        let (records, stats) = flatten_evaluation_tree(&tree).unwrap();
        let tables = records.iter().filter(|r| r.kind == EntityKind::EvaluationTable).count();
        let results = records.iter().filter(|r| r.kind == EntityKind::EvaluationResult).count();
        let got = (records.len(), stats.tables, stats.results, stats.max_depth, tables, results);
        let want = (expected.records, expected.tables, expected.results, expected.max_depth, expected.tables, expected.results);
        if got != want {
            mismatches.push((seed, got, want));
        }
    }
    assert!(mismatches.is_empty(), "{} mismatches, first: {:?}", mismatches.len(), mismatches.first());
    assert_eq!(deepest, MAX_DEPTH, "generator never reached the maximum depth");
}

#[test]
fn every_result_points_at_an_emitted_table() {
    for seed in 0..50u64 {
        let tree = random_tree(&mut ChaCha8Rng::seed_from_u64(seed));
        let (records, _) = flatten_evaluation_tree(&tree).unwrap();
        let tables: Vec<&str> = records
            .iter()
            .filter(|r| r.kind == EntityKind::EvaluationTable)
            .map(|r| r.slug.as_str())
            .collect();
        for r in records.iter().filter(|r| r.kind == EntityKind::EvaluationResult) {
            assert!(tables.contains(&r.links_for("inTable")[0].slug.as_str()));
        }
        for t in records.iter().filter(|r| r.kind == EntityKind::EvaluationTable) {
            for parent in t.links_for("subTableOf") {
                assert!(tables.contains(&parent.slug.as_str()));
            }
        }
    }
}
