use std::collections::HashMap;

use serde::Serialize;

use super::{is_typed, AuthorMention, LinkDecision, LinkError, LinkerConfig, Outcome};
use crate::ontology::{EntityKind, Registry, UriPolicy};
use crate::rdf::vocab::{OWL_SAME_AS, RDF_TYPE};
use crate::rdf::{GraphBuffer, Iri, Literal, Triple};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ApplySummary {
    pub linked_mentions: usize,
    pub unlinked_mentions: usize,
    /// `hasAuthor` triples now in the graph because of linked mentions.
    pub author_links: usize,
    /// `authorName` literals kept for unlinked mentions.
    pub author_names: usize,
    /// `authorName` literals replaced by links.
    pub names_removed: usize,
    pub local_authors: usize,
}

/// Rewrite the graph from decisions. For every paper of a linked mention the
/// `authorName` literal is replaced by `hasAuthor` to the external IRI
/// (plus a local Author entity with `owl:sameAs` when `cfg.local_authors`);
/// unlinked mentions keep their literal. Every referenced paper must be in
/// the graph; nothing is changed if one is missing.
pub fn apply_link_decisions(
    mentions: &[AuthorMention],
    decisions: &[LinkDecision],
    graph: &mut GraphBuffer,
    registry: &Registry,
    policy: &UriPolicy,
    cfg: &LinkerConfig,
) -> Result<ApplySummary, LinkError> {
    let by_id: HashMap<&str, &AuthorMention> = mentions.iter().map(|m| (m.id.as_str(), m)).collect();
    let paper_class = registry.class_iri(EntityKind::Paper);

    let mut resolved = Vec::with_capacity(decisions.len());
    for d in decisions {
        let mention = by_id.get(d.id.as_str()).ok_or_else(|| LinkError::UnknownMention(d.id.clone()))?;
        let mut papers = Vec::with_capacity(mention.papers.len());
        for p in &mention.papers {
            let iri = Iri::new(p.clone()).map_err(|_| LinkError::UnknownPaper(p.clone()))?;
            if !is_typed(graph, &iri, paper_class) {
                return Err(LinkError::UnknownPaper(p.clone()));
            }
            papers.push(iri);
        }
        resolved.push((d, *mention, papers));
    }

    let author_name = registry.property_iri("authorName").clone();
    let has_author = registry.property_iri("hasAuthor").clone();
    let full_name = registry.property_iri("fullName").clone();
    let rdf_type = Iri::new(RDF_TYPE).expect("static IRI");
    let same_as = Iri::new(OWL_SAME_AS).expect("static IRI");

    let mut summary = ApplySummary::default();
    for (decision, mention, papers) in resolved {
        let name_literal = Literal::string(mention.name.clone());
        match &decision.outcome {
            Outcome::Linked { iri, .. } => {
                let Ok(external) = Iri::new(iri.clone()) else {
                    return Err(LinkError::UnknownMention(decision.id.clone()));
                };
                summary.linked_mentions += 1;
                for paper in &papers {
                    if graph.remove(&Triple::new(paper.clone(), author_name.clone(), name_literal.clone())) {
                        summary.names_removed += 1;
                    }
                    graph.insert(Triple::new(paper.clone(), has_author.clone(), external.clone()));
                    summary.author_links += 1;
                }
                if cfg.local_authors {
                    // slug from the mention id: names alone may collide after slugging
                    if let Ok(local) = policy.mint_uri(EntityKind::Author, &mention.id) {
                        graph.insert(Triple::new(local.clone(), rdf_type.clone(), registry.class_iri(EntityKind::Author).clone()));
                        graph.insert(Triple::new(local.clone(), full_name.clone(), name_literal.clone()));
                        graph.insert(Triple::new(local, same_as.clone(), external.clone()));
                        summary.local_authors += 1;
                    }
                }
            }
            Outcome::Unlinked { .. } => {
                summary.unlinked_mentions += 1;
                for paper in &papers {
                    graph.insert(Triple::new(paper.clone(), author_name.clone(), name_literal.clone()));
                    summary.author_names += 1;
                }
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linker::{collect_mentions, UnlinkedReason};

    fn paper_graph(reg: &Registry, names: &[&str]) -> (GraphBuffer, Iri) {
        let policy = UriPolicy::default();
        let p = policy.mint_uri(EntityKind::Paper, "p").unwrap();
        let mut g = GraphBuffer::new();
        g.insert(Triple::new(p.clone(), Iri::new(RDF_TYPE).unwrap(), reg.class_iri(EntityKind::Paper).clone()));
        g.insert(Triple::new(p.clone(), reg.property_iri("title").clone(), Literal::string("T")));
        for n in names {
            g.insert(Triple::new(p.clone(), reg.property_iri("authorName").clone(), Literal::string(*n)));
        }
        (g, p)
    }

    #[test]
    fn three_linked_two_unlinked() {
        let reg = Registry::default();
        let (mut g, _) = paper_graph(&reg, &["a", "b", "c", "d", "e"]);
        let mentions = collect_mentions(&g, &reg);
        let decisions: Vec<LinkDecision> = mentions
            .iter()
            .map(|m| LinkDecision {
                id: m.id.clone(),
                outcome: if ["a", "b", "c"].contains(&m.name.as_str()) {
                    Outcome::Linked { iri: format!("https://semopenalex.org/author/{}", m.name), step: 1, score: 1.0 }
                } else {
                    Outcome::Unlinked { reason: UnlinkedReason::NoMatch }
                },
            })
            .collect();
        let s = apply_link_decisions(&mentions, &decisions, &mut g, &reg, &UriPolicy::default(), &LinkerConfig::default())
            .unwrap();
        assert_eq!((s.linked_mentions, s.unlinked_mentions, s.author_links, s.author_names), (3, 2, 3, 2));
        let count = |p: &str| g.iter().filter(|t| &t.predicate == reg.property_iri(p)).count();
        assert_eq!(count("hasAuthor"), 3);
        assert_eq!(count("authorName"), 2);
    }

    #[test]
    fn empty_decisions_leave_graph_unchanged() {
        let reg = Registry::default();
        let (mut g, _) = paper_graph(&reg, &["a"]);
        let before = g.clone();
        apply_link_decisions(&[], &[], &mut g, &reg, &UriPolicy::default(), &LinkerConfig::default()).unwrap();
        assert_eq!(g, before);
    }

    #[test]
    fn unknown_paper_is_an_error_and_changes_nothing() {
        let reg = Registry::default();
        let (mut g, _) = paper_graph(&reg, &["a"]);
        let before = g.clone();
        let mut m = collect_mentions(&g, &reg);
        m[0].papers.push("https://linkedpaperswithcode.com/paper/ghost".into());
        let d = vec![LinkDecision {
            id: m[0].id.clone(),
            outcome: Outcome::Linked { iri: "https://semopenalex.org/author/A1".into(), step: 1, score: 1.0 },
        }];
        let err = apply_link_decisions(&m, &d, &mut g, &reg, &UriPolicy::default(), &LinkerConfig::default()).unwrap_err();
        assert!(matches!(err, LinkError::UnknownPaper(p) if p.ends_with("ghost")));
        assert_eq!(g, before);
    }

    #[test]
    fn local_authors_get_same_as() {
        let reg = Registry::default();
        let (mut g, _) = paper_graph(&reg, &["a"]);
        let m = collect_mentions(&g, &reg);
        let d = vec![LinkDecision {
            id: m[0].id.clone(),
            outcome: Outcome::Linked { iri: "https://semopenalex.org/author/A1".into(), step: 2, score: 0.95 },
        }];
        let cfg = LinkerConfig { local_authors: true, ..LinkerConfig::default() };
        let s = apply_link_decisions(&m, &d, &mut g, &reg, &UriPolicy::default(), &cfg).unwrap();
        assert_eq!(s.local_authors, 1);
        assert_eq!(g.iter().filter(|t| t.predicate.as_str() == OWL_SAME_AS).count(), 1);
    }
}
