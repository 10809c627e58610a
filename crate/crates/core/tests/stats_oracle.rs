mod support;

use std::path::Path;

use kgforge::ontology::{default_link_targets, EntityKind, Registry, UriPolicy};
use kgforge::pipeline::build_graph;
use kgforge::stats::{count_entities, metric_distribution};
use support::fixtures_dir;
use support::stats_oracle::{metric_counts, scan_dump_dir};

fn check_fixture(dir: &Path, conferences: &[&str]) {
    let registry = Registry::default();
    let out = build_graph(dir, &registry, &UriPolicy::default()).unwrap();
    let stats = count_entities(&out.graph, &registry, &default_link_targets());
    let scan = scan_dump_dir(dir);

    for kind in EntityKind::ALL {
        let name = kind.local_name();
        assert_eq!(stats.class_count(kind), scan.count(name), "{}: class {name}", dir.display());
    }
    assert_eq!(stats.papers_with_evaluations, scan.evaluated_papers.len() as u64);

    let requested: Vec<String> = conferences.iter().map(|s| s.to_string()).collect();
    for hist in metric_distribution(&out.graph, &registry, &requested) {
        let (known, expected) = metric_counts(&scan, &hist.conference);
        assert_eq!(hist.known, known, "{}", hist.conference);
        let got: std::collections::BTreeMap<String, u64> = hist.bins.iter().cloned().collect();
        assert_eq!(got, expected, "{}", hist.conference);
        // count desc, then name asc
        for w in hist.bins.windows(2) {
            assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        }
    }
}

#[test]
fn mini_dump_counts_match_a_scan_of_the_json() {
    check_fixture(&fixtures_dir().join("pwc-mini"), &["acl", "EMNLP", "ACL 2020", "naacl", "emnlp 2019"]);
}

#[test]
fn sameas_dump_counts_match_a_scan_of_the_json() {
    check_fixture(&fixtures_dir().join("sameas"), &["acl"]);
}

#[test]
fn mini_dump_has_the_expected_shape() {
    let scan = scan_dump_dir(&fixtures_dir().join("pwc-mini"));
    assert_eq!(scan.count("Paper"), 12);
    assert_eq!(scan.count("Conference"), 2);
    assert!(scan.count("EvaluationTable") >= 19);
}
