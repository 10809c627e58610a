//! Per-class instance counts, linkset sizes and per-conference metric
//! histograms, computed by scanning a finished graph.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ontology::{EntityKind, LinkTarget, Registry};
use crate::rdf::{GraphBuffer, Iri, Term};
use crate::textnorm::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinksetCount {
    pub target: String,
    pub predicate: String,
    pub links: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub triples: u64,
    /// Class local name → number of distinct typed subjects.
    pub classes: BTreeMap<String, u64>,
    pub papers_with_evaluations: u64,
    /// Sorted by (target, predicate).
    pub linksets: Vec<LinksetCount>,
}

impl GraphStats {
    pub fn empty(registry: &Registry) -> Self {
        GraphStats {
            triples: 0,
            classes: registry
                .classes()
                .iter()
                .map(|c| (c.local_name.clone(), 0))
                .collect(),
            papers_with_evaluations: 0,
            linksets: Vec::new(),
        }
    }

    pub fn class_count(&self, kind: EntityKind) -> u64 {
        self.classes.get(kind.local_name()).copied().unwrap_or(0)
    }

    pub fn linkset(&self, target: &str, predicate: &str) -> u64 {
        self.linksets
            .iter()
            .find(|l| l.target == target && l.predicate == predicate)
            .map_or(0, |l| l.links)
    }
}

pub fn count_entities(graph: &GraphBuffer, registry: &Registry, targets: &[LinkTarget]) -> GraphStats {
    let mut stats = GraphStats::empty(registry);
    stats.triples = graph.len() as u64;
    for class in registry.classes() {
        stats
            .classes
            .insert(class.local_name.clone(), graph.class_count(&class.uri) as u64);
    }

    let results: HashSet<&Iri> = graph
        .subjects_of_class(registry.class_iri(EntityKind::EvaluationResult))
        .collect();
    let papers: HashSet<&Iri> = graph
        .subjects_of_class(registry.class_iri(EntityKind::Paper))
        .collect();
    let reported_in = registry.property_iri("reportedIn");

    let mut evaluated = HashSet::new();
    let mut linksets: BTreeMap<(String, String), u64> = BTreeMap::new();
    for t in graph.iter() {
        let Term::Iri(object) = &t.object else { continue };
        if t.predicate == *reported_in && results.contains(&t.subject) && papers.contains(object) {
            evaluated.insert(object);
        }
        if let Some(target) = targets.iter().find(|x| object.as_str().starts_with(&x.namespace)) {
            *linksets
                .entry((target.name.clone(), t.predicate.as_str().to_owned()))
                .or_default() += 1;
        }
    }
    stats.papers_with_evaluations = evaluated.len() as u64;
    stats.linksets = linksets
        .into_iter()
        .map(|((target, predicate), links)| LinksetCount { target, predicate, links })
        .collect();
    stats
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricHistogram {
    pub conference: String,
    /// `false` when no Conference entity matched the requested name.
    pub known: bool,
    /// (metric name, number of papers reporting it), count desc then name asc.
    pub bins: Vec<(String, u64)>,
}

impl MetricHistogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().map(|(_, n)| n).sum()
    }
}

/// For each requested conference (matched by acronym or name, case-insensitive),
/// count the distinct (paper, metric) pairs among evaluation results of its
/// papers.
pub fn metric_distribution(
    graph: &GraphBuffer,
    registry: &Registry,
    conferences: &[String],
) -> Vec<MetricHistogram> {
    let p = |name: &str| registry.property_iri(name).clone();
    let (acronym, conf_name, has_conf, reported_in, measures, metric_name) = (
        p("acronym"),
        p("conferenceName"),
        p("hasConference"),
        p("reportedIn"),
        p("measuresMetric"),
        p("metricName"),
    );

    let mut conf_keys: HashMap<&Iri, Vec<String>> = HashMap::new();
    let mut papers_of_conf: HashMap<&Iri, BTreeSet<&Iri>> = HashMap::new();
    let mut results_of_paper: HashMap<&Iri, Vec<&Iri>> = HashMap::new();
    let mut metrics_of_result: HashMap<&Iri, Vec<&Iri>> = HashMap::new();
    let mut metric_names: HashMap<&Iri, &str> = HashMap::new();

    for t in graph.iter() {
        match &t.object {
            Term::Literal(lit) if t.predicate == acronym || t.predicate == conf_name => {
                conf_keys
                    .entry(&t.subject)
                    .or_default()
                    .push(normalize(lit.lexical()).into_string());
            }
            Term::Literal(lit) if t.predicate == metric_name => {
                metric_names.insert(&t.subject, lit.lexical());
            }
            Term::Iri(o) if t.predicate == has_conf => {
                papers_of_conf.entry(o).or_default().insert(&t.subject);
            }
            Term::Iri(o) if t.predicate == reported_in => {
                results_of_paper.entry(o).or_default().push(&t.subject);
            }
            Term::Iri(o) if t.predicate == measures => {
                metrics_of_result.entry(&t.subject).or_default().push(o);
            }
            _ => {}
        }
    }

    let conference_class = registry.class_iri(EntityKind::Conference);
    conferences
        .iter()
        .map(|requested| {
            let key = normalize(requested).into_string();
            let matched: Vec<&Iri> = graph
                .subjects_of_class(conference_class)
                .filter(|c| conf_keys.get(c).is_some_and(|keys| keys.contains(&key)))
                .collect();

            let mut incidences: BTreeSet<(&Iri, &str)> = BTreeSet::new();
            for conf in &matched {
                for paper in papers_of_conf.get(conf).into_iter().flatten() {
                    for result in results_of_paper.get(paper).into_iter().flatten() {
                        for metric in metrics_of_result.get(result).into_iter().flatten() {
                            let name = metric_names
                                .get(metric)
                                .copied()
                                .unwrap_or_else(|| metric.as_str().rsplit('/').next().unwrap_or(""));
                            incidences.insert((paper, name));
                        }
                    }
                }
            }

            let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
            for (_, name) in incidences {
                *counts.entry(name).or_default() += 1;
            }
            let mut bins: Vec<(String, u64)> =
                counts.into_iter().map(|(k, v)| (k.to_owned(), v)).collect();
            bins.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

            MetricHistogram {
                conference: requested.clone(),
                known: !matched.is_empty(),
                bins,
            }
        })
        .collect()
}

/// `entity_type,instances`, one row per class, then papers with evaluations.
pub fn write_entities_csv<W: Write>(stats: &GraphStats, registry: &Registry, sink: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["entity_type", "instances"])?;
    for class in registry.classes() {
        let n = stats.classes.get(&class.local_name).copied().unwrap_or(0);
        w.write_record([class.local_name.as_str(), &n.to_string()])?;
    }
    w.write_record(["PaperWithEvaluations", &stats.papers_with_evaluations.to_string()])?;
    w.flush()?;
    Ok(())
}

/// `conference,metric,papers`. Unknown conferences produce no rows.
pub fn write_metrics_csv<W: Write>(histograms: &[MetricHistogram], sink: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["conference", "metric", "papers"])?;
    for h in histograms {
        for (metric, n) in &h.bins {
            w.write_record([h.conference.as_str(), metric.as_str(), &n.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::UriPolicy;
    use crate::rdf::{Literal, Triple};
    use crate::rdf::vocab::RDF_TYPE;

    struct Builder {
        reg: Registry,
        policy: UriPolicy,
        graph: GraphBuffer,
    }

    impl Builder {
        fn new() -> Self {
            Builder {
                reg: Registry::default(),
                policy: UriPolicy::default(),
                graph: GraphBuffer::new(),
            }
        }

        fn entity(&mut self, kind: EntityKind, slug: &str) -> Iri {
            let iri = self.policy.mint_uri(kind, slug).unwrap();
            let class = self.reg.class_iri(kind).clone();
            self.graph.insert(Triple::new(iri.clone(), Iri::new(RDF_TYPE).unwrap(), class));
            iri
        }

        fn link(&mut self, s: &Iri, p: &str, o: &Iri) {
            let p = self.reg.property_iri(p).clone();
            self.graph.insert(Triple::new(s.clone(), p, o.clone()));
        }

        fn lit(&mut self, s: &Iri, p: &str, v: &str) {
            let p = self.reg.property_iri(p).clone();
            self.graph.insert(Triple::new(s.clone(), p, Literal::string(v)));
        }
    }

    #[test]
    fn empty_graph_is_all_zero() {
        let reg = Registry::default();
        let stats = count_entities(&GraphBuffer::new(), &reg, &crate::ontology::default_link_targets());
        assert_eq!(stats, GraphStats::empty(&reg));
        assert_eq!(stats.classes.len(), 13);
    }

    #[test]
    fn histograms_by_conference() {
        let mut b = Builder::new();
        let acl = b.entity(EntityKind::Conference, "acl-2020");
        b.lit(&acl, "acronym", "ACL");
        let naacl = b.entity(EntityKind::Conference, "naacl-2019");
        b.lit(&naacl, "acronym", "NAACL");
        let bleu = b.entity(EntityKind::Metric, "bleu");
        b.lit(&bleu, "metricName", "BLEU");
        let acc = b.entity(EntityKind::Metric, "accuracy");
        b.lit(&acc, "metricName", "Accuracy");

        let p1 = b.entity(EntityKind::Paper, "p1");
        let p2 = b.entity(EntityKind::Paper, "p2");
        b.link(&p1, "hasConference", &acl);
        b.link(&p2, "hasConference", &acl);
        for (i, (paper, metric)) in [(&p1, &bleu), (&p1, &bleu), (&p2, &bleu), (&p2, &acc)].into_iter().enumerate() {
            let r = b.entity(EntityKind::EvaluationResult, &format!("r{i}"));
            b.link(&r, "reportedIn", paper);
            b.link(&r, "measuresMetric", metric);
        }

        let reqs = vec!["acl".to_owned(), "naacl".to_owned(), "icml".to_owned()];
        let hist = metric_distribution(&b.graph, &b.reg, &reqs);
        assert_eq!(hist[0].bins, vec![("BLEU".to_owned(), 2), ("Accuracy".to_owned(), 1)]);
        assert!(hist[0].known);
        assert!(hist[1].known && hist[1].bins.is_empty());
        assert!(!hist[2].known && hist[2].bins.is_empty());

        let stats = count_entities(&b.graph, &b.reg, &[]);
        assert_eq!(stats.papers_with_evaluations, 2);
        assert_eq!(stats.class_count(EntityKind::EvaluationResult), 4);
    }

    #[test]
    fn linksets_follow_target_namespaces() {
        let mut b = Builder::new();
        let paper = b.entity(EntityKind::Paper, "p");
        let ext = Iri::new("https://semopenalex.org/work/W1").unwrap();
        let same_as = Iri::new(crate::rdf::vocab::OWL_SAME_AS).unwrap();
        b.graph.insert(Triple::new(paper.clone(), same_as.clone(), ext));
        let stats = count_entities(&b.graph, &b.reg, &crate::ontology::default_link_targets());
        assert_eq!(stats.linkset("semopenalex", same_as.as_str()), 1);
        assert_eq!(stats.linksets.len(), 1);
    }

    #[test]
    fn csv_shapes() {
        let reg = Registry::default();
        let mut out = Vec::new();
        write_entities_csv(&GraphStats::empty(&reg), &reg, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1 + 13 + 1);
        assert!(text.starts_with("entity_type,instances\nPaper,0\n"));

        let hist = vec![MetricHistogram {
            conference: "acl".into(),
            known: true,
            bins: vec![("F1, macro".into(), 3)],
        }];
        let mut out = Vec::new();
        write_metrics_csv(&hist, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "conference,metric,papers\nacl,\"F1, macro\",3\n");
    }
}
