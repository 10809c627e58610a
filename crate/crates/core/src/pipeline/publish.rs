use chrono::NaiveDate;
use serde::Serialize;

use crate::linker::{
    apply_link_decisions, collect_mentions, disambiguate_all, link_sameas, ApplySummary, AuthorTally, CatalogClient,
    LinkError, LinkReport, LinkerConfig,
};
use crate::ontology::{emit_ontology_triples, emit_void, EntityKind, LinkTarget, Registry, UriPolicy, VoidProfile};
use crate::rdf::vocab::{DCTERMS, OWL, RDF, RDFS, VOID, XSD};
use crate::rdf::{GraphBuffer, PrefixMap, Term};
use crate::stats::count_entities;

/// Turtle prefixes for the ontology namespace and the standard vocabularies.
pub fn default_prefixes(registry: &Registry) -> PrefixMap {
    [
        ("lpwc", registry.namespace()),
        ("rdf", RDF),
        ("rdfs", RDFS),
        ("owl", OWL),
        ("xsd", XSD),
        ("void", VOID),
        ("dcterms", DCTERMS),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v.to_owned()))
    .collect()
}

pub fn ontology_graph(registry: &Registry) -> GraphBuffer {
    let mut g = GraphBuffer::new();
    g.extend(emit_ontology_triples(registry));
    g
}

/// Most recent `publicationDate` in the graph.
pub fn latest_paper_date(graph: &GraphBuffer, registry: &Registry) -> Option<NaiveDate> {
    let date = registry.property_iri("publicationDate");
    graph
        .iter()
        .filter(|t| &t.predicate == date)
        .filter_map(|t| match &t.object {
            Term::Literal(l) => NaiveDate::parse_from_str(l.lexical(), "%Y-%m-%d").ok(),
            Term::Iri(_) => None,
        })
        .max()
}

/// VoID description of `graph`, dated by its latest paper.
pub fn void_graph(graph: &GraphBuffer, registry: &Registry, policy: &UriPolicy, targets: &[LinkTarget]) -> GraphBuffer {
    let stats = count_entities(graph, registry, targets);
    let profile = VoidProfile::new(policy, registry, targets.to_vec());
    let mut g = GraphBuffer::new();
    g.extend(emit_void(&stats, latest_paper_date(graph, registry), registry, &profile));
    g
}

#[derive(Debug, Clone, Serialize)]
pub struct LinkOutcome {
    pub report: LinkReport,
    pub applied: ApplySummary,
    pub sameas_triples: usize,
}

/// Disambiguate every author name, link papers, conferences and datasets by
/// `owl:sameAs`, and rewrite `graph` in place.
pub fn link_graph<C: CatalogClient + ?Sized>(
    graph: &mut GraphBuffer,
    catalog: &C,
    registry: &Registry,
    policy: &UriPolicy,
    cfg: &LinkerConfig,
) -> Result<LinkOutcome, LinkError> {
    let mentions = collect_mentions(graph, registry);
    log::info!("disambiguating {} author names", mentions.len());
    let decisions = disambiguate_all(&mentions, catalog, cfg);

    let mut sameas = Vec::new();
    let mut new_triples = Vec::new();
    for kind in [EntityKind::Paper, EntityKind::Conference, EntityKind::Dataset] {
        let (triples, report) = link_sameas(kind, graph, registry, catalog);
        log::info!("sameAs {kind}: {}/{} linked", report.linked, report.total);
        new_triples.extend(triples);
        sameas.push(report);
    }

    let applied = apply_link_decisions(&mentions, &decisions, graph, registry, policy, cfg)?;
    let sameas_triples = graph.extend(new_triples);
    let report = LinkReport { config: cfg.clone(), authors: AuthorTally::of(&decisions), sameas, decisions };
    Ok(LinkOutcome { report, applied, sameas_triples })
}
