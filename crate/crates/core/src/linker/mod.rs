//! Author disambiguation against an external scholarly catalog and
//! `owl:sameAs` links for papers, conferences and datasets.

mod apply;
mod fixture;
mod remote;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::ontology::{EntityKind, Registry};
use crate::rdf::vocab::{OWL_SAME_AS, RDF_TYPE};
use crate::rdf::{GraphBuffer, Iri, Term, Triple};
use crate::textnorm::{fuzzy_similarity, normalize, normalize_folded, title_variants};

pub use apply::{apply_link_decisions, ApplySummary};
pub use fixture::{FixtureCatalog, FixtureData};
pub use remote::{RemoteCatalog, RemoteConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("catalog unavailable: {0}")]
    Unavailable(String),
    #[error("unexpected catalog response: {0}")]
    BadResponse(String),
}

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("decision references paper {0} which is not in the graph")]
    UnknownPaper(String),
    #[error("decision for unknown mention {0}")]
    UnknownMention(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogCandidate {
    pub id: String,
    pub name: String,
    pub work_titles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogAuthor {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkHit {
    pub id: String,
    pub title: String,
    pub authors: Vec<CatalogAuthor>,
}

/// The queries the linker needs from an external catalog.
pub trait CatalogClient: Send + Sync {
    /// Authors whose name matches `name` (the linker applies its own
    /// exactness rule on top).
    fn candidates_by_name(&self, name: &str) -> Result<Vec<CatalogCandidate>, CatalogError>;
    /// Works whose normalized title equals the normalized `variant`.
    fn works_by_title_variant(&self, variant: &str) -> Result<Vec<WorkHit>, CatalogError>;
    /// Conference IRIs matching the acronym or the full name.
    fn conference_lookup(&self, name: &str, acronym: Option<&str>) -> Result<Vec<String>, CatalogError>;
    /// Dataset IRIs whose label equals `label` after normalization.
    fn dataset_lookup(&self, label: &str) -> Result<Vec<String>, CatalogError>;
}

impl<C: CatalogClient + ?Sized> CatalogClient for &C {
    fn candidates_by_name(&self, name: &str) -> Result<Vec<CatalogCandidate>, CatalogError> {
        (**self).candidates_by_name(name)
    }
    fn works_by_title_variant(&self, variant: &str) -> Result<Vec<WorkHit>, CatalogError> {
        (**self).works_by_title_variant(variant)
    }
    fn conference_lookup(&self, name: &str, acronym: Option<&str>) -> Result<Vec<String>, CatalogError> {
        (**self).conference_lookup(name, acronym)
    }
    fn dataset_lookup(&self, label: &str) -> Result<Vec<String>, CatalogError> {
        (**self).dataset_lookup(label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkerConfig {
    /// Minimum fuzzy similarity for a second-step author match.
    pub min_sim: f64,
    /// Exact name matching in the first step respects case.
    pub case_sensitive: bool,
    /// Strip diacritics before fuzzy comparison.
    pub fold_diacritics: bool,
    /// Also mint local Author entities linked to the external IRI.
    pub local_authors: bool,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        LinkerConfig { min_sim: 0.90, case_sensitive: false, fold_diacritics: false, local_authors: false }
    }
}

/// An author name as it appears on one or more papers of the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorMention {
    pub id: String,
    pub name: String,
    pub paper_titles: Vec<String>,
    /// Papers carrying this name, as IRIs.
    pub papers: Vec<String>,
}

impl AuthorMention {
    pub fn new(name: &str, paper_titles: Vec<String>, papers: Vec<String>) -> Self {
        AuthorMention { id: mention_id(name), name: name.to_owned(), paper_titles, papers }
    }
}

/// First 16 hex digits of the SHA-256 of the name.
pub fn mention_id(name: &str) -> String {
    hex::encode(&Sha256::digest(name.as_bytes())[..8])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnlinkedReason {
    NoMatch,
    Ambiguous,
    CatalogError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    Linked { iri: String, step: u8, score: f64 },
    Unlinked { reason: UnlinkedReason },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkDecision {
    pub id: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl LinkDecision {
    pub fn linked_iri(&self) -> Option<&str> {
        match &self.outcome {
            Outcome::Linked { iri, .. } => Some(iri),
            Outcome::Unlinked { .. } => None,
        }
    }
}

fn nfc(s: &str) -> String {
    s.trim().nfc().collect()
}

fn names_equal(a: &str, b: &str, case_sensitive: bool) -> bool {
    let (a, b) = (nfc(a), nfc(b));
    if case_sensitive {
        a == b
    } else {
        a.to_lowercase() == b.to_lowercase()
    }
}

fn titles_overlap(a: &str, b: &str) -> bool {
    !a.is_empty() && !b.is_empty() && (a.contains(b) || b.contains(a))
}

/// Two-step disambiguation of one mention.
///
/// Step 1 keeps catalog authors with exactly the mention's name that have a
/// work whose normalized title contains, or is contained in, a normalized
/// title of the mention's papers. The candidate with most matching works
/// wins, then the smallest IRI.
///
/// Step 2 runs only when step 1 finds nothing: every title variant of every
/// paper is looked up as a work, and the work authors are scored by fuzzy
/// similarity to the mention name. The best score at or above `min_sim`
/// wins; ties go to the author on more matched works, then the smallest IRI.
pub fn disambiguate_author<C: CatalogClient + ?Sized>(
    mention: &AuthorMention,
    catalog: &C,
    cfg: &LinkerConfig,
) -> LinkDecision {
    let decide = |outcome| LinkDecision { id: mention.id.clone(), outcome };
    let unlinked = |reason| decide(Outcome::Unlinked { reason });

    let lpwc_titles: Vec<String> = mention.paper_titles.iter().map(|t| normalize(t).into_string()).collect();

    let candidates = match catalog.candidates_by_name(&mention.name) {
        Ok(c) => c,
        Err(_) => return unlinked(UnlinkedReason::CatalogError),
    };
    let mut best: Option<(usize, &str)> = None;
    for cand in candidates.iter().filter(|c| names_equal(&c.name, &mention.name, cfg.case_sensitive)) {
        let matching = cand
            .work_titles
            .iter()
            .map(|w| normalize(w).into_string())
            .filter(|w| lpwc_titles.iter().any(|t| titles_overlap(t, w)))
            .count();
        if matching == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((n, iri)) => matching > n || (matching == n && cand.id.as_str() < iri),
        };
        if better {
            best = Some((matching, &cand.id));
        }
    }
    if let Some((_, iri)) = best {
        return decide(Outcome::Linked { iri: iri.to_owned(), step: 1, score: 1.0 });
    }

    let norm = |s: &str| {
        if cfg.fold_diacritics {
            normalize_folded(s).into_string()
        } else {
            normalize(s).into_string()
        }
    };
    let target = norm(&mention.name);
    // author IRI → (best score, works where the score clears the threshold)
    let mut scored: BTreeMap<String, (f64, BTreeSet<String>)> = BTreeMap::new();
    let mut seen_works = BTreeSet::new();
    for title in &mention.paper_titles {
        let Ok(variants) = title_variants(title) else { continue };
        for variant in variants {
            let works = match catalog.works_by_title_variant(&variant) {
                Ok(w) => w,
                Err(_) => return unlinked(UnlinkedReason::CatalogError),
            };
            for work in works {
                if !seen_works.insert(work.id.clone()) {
                    continue;
                }
                for author in &work.authors {
                    let score = fuzzy_similarity(&target, &norm(&author.name));
                    let entry = scored.entry(author.id.clone()).or_insert((0.0, BTreeSet::new()));
                    entry.0 = entry.0.max(score);
                    if score >= cfg.min_sim {
                        entry.1.insert(work.id.clone());
                    }
                }
            }
        }
    }
    // BTreeMap iteration is by IRI, so strict comparisons keep the smallest.
    let winner = scored
        .iter()
        .filter(|(_, (score, _))| *score >= cfg.min_sim)
        .fold(None::<(&String, f64, usize)>, |acc, (iri, (score, works))| match acc {
            Some((_, s, w)) if s > *score || (s == *score && w >= works.len()) => acc,
            _ => Some((iri, *score, works.len())),
        });
    match winner {
        Some((iri, score, _)) => decide(Outcome::Linked { iri: iri.clone(), step: 2, score }),
        None => unlinked(UnlinkedReason::NoMatch),
    }
}

/// Disambiguate all mentions on the rayon pool. Output is sorted by mention
/// id whatever the scheduling.
pub fn disambiguate_all<C: CatalogClient + ?Sized>(
    mentions: &[AuthorMention],
    catalog: &C,
    cfg: &LinkerConfig,
) -> Vec<LinkDecision> {
    let mut out: Vec<LinkDecision> = mentions.par_iter().map(|m| disambiguate_author(m, catalog, cfg)).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// One mention per distinct `authorName` literal, with the titles and IRIs
/// of the papers carrying it. Sorted by mention id.
pub fn collect_mentions(graph: &GraphBuffer, registry: &Registry) -> Vec<AuthorMention> {
    let author_name = registry.property_iri("authorName");
    let title = registry.property_iri("title");
    let mut titles: BTreeMap<&Iri, Vec<&str>> = BTreeMap::new();
    let mut by_name: BTreeMap<&str, BTreeSet<&Iri>> = BTreeMap::new();
    for t in graph.iter() {
        let Term::Literal(lit) = &t.object else { continue };
        if &t.predicate == author_name {
            by_name.entry(lit.lexical()).or_default().insert(&t.subject);
        } else if &t.predicate == title {
            titles.entry(&t.subject).or_default().push(lit.lexical());
        }
    }
    let mut mentions: Vec<AuthorMention> = by_name
        .into_iter()
        .map(|(name, papers)| {
            let mut paper_titles: Vec<String> = papers
                .iter()
                .flat_map(|p| titles.get(p).into_iter().flatten())
                .map(|s| s.to_string())
                .collect();
            paper_titles.sort();
            paper_titles.dedup();
            AuthorMention::new(name, paper_titles, papers.iter().map(|p| p.as_str().to_owned()).collect())
        })
        .collect();
    mentions.sort_by(|a, b| a.id.cmp(&b.id));
    mentions
}

// sameAs ----------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SameAsReport {
    pub kind: EntityKind,
    pub total: usize,
    pub linked: usize,
    pub no_match: usize,
    pub ambiguous: usize,
    pub catalog_errors: usize,
    /// linked / total, 0 when there are no entities.
    pub ratio: f64,
}

fn literal_of<'g>(graph: &'g GraphBuffer, subject: &Iri, predicate: &Iri) -> Option<&'g str> {
    // Several values are possible in principle; take the smallest for determinism.
    graph
        .iter()
        .filter(|t| &t.subject == subject && &t.predicate == predicate)
        .filter_map(|t| t.object.as_literal().map(|l| l.lexical()))
        .min()
}

/// Link entities of `kind` (Paper, Conference or Dataset) to the catalog.
/// A paper links on the first title variant that returns exactly one work;
/// conferences and datasets link when the lookup returns exactly one IRI.
pub fn link_sameas<C: CatalogClient + ?Sized>(
    kind: EntityKind,
    graph: &GraphBuffer,
    registry: &Registry,
    catalog: &C,
) -> (Vec<Triple>, SameAsReport) {
    let class = registry.class_iri(kind);
    let subjects: Vec<&Iri> = graph.subjects_of_class(class).collect();
    let p = |name: &str| registry.property_iri(name).clone();

    let results: Vec<Result<String, UnlinkedReason>> = subjects
        .par_iter()
        .map(|&s| -> Result<String, UnlinkedReason> {
            let single = |hits: Result<Vec<String>, CatalogError>| {
                let mut hits = hits.map_err(|_| UnlinkedReason::CatalogError)?;
                hits.sort();
                hits.dedup();
                match hits.len() {
                    0 => Err(UnlinkedReason::NoMatch),
                    1 => Ok(hits.pop().expect("one hit")),
                    _ => Err(UnlinkedReason::Ambiguous),
                }
            };
            match kind {
                EntityKind::Paper => {
                    let title = literal_of(graph, s, &p("title")).ok_or(UnlinkedReason::NoMatch)?;
                    let variants = title_variants(title).map_err(|_| UnlinkedReason::NoMatch)?;
                    let mut reason = UnlinkedReason::NoMatch;
                    for v in variants {
                        match single(catalog.works_by_title_variant(&v).map(|w| w.into_iter().map(|w| w.id).collect())) {
                            Ok(iri) => return Ok(iri),
                            Err(UnlinkedReason::CatalogError) => return Err(UnlinkedReason::CatalogError),
                            Err(UnlinkedReason::Ambiguous) => reason = UnlinkedReason::Ambiguous,
                            Err(UnlinkedReason::NoMatch) => {}
                        }
                    }
                    Err(reason)
                }
                EntityKind::Conference => {
                    let name = literal_of(graph, s, &p("conferenceName")).unwrap_or_default();
                    let acronym = literal_of(graph, s, &p("acronym"));
                    if name.is_empty() && acronym.is_none() {
                        return Err(UnlinkedReason::NoMatch);
                    }
                    single(catalog.conference_lookup(name, acronym))
                }
                EntityKind::Dataset => {
                    let label = literal_of(graph, s, &p("datasetName")).ok_or(UnlinkedReason::NoMatch)?;
                    single(catalog.dataset_lookup(label))
                }
                other => panic!("sameAs linking is not defined for {other}"),
            }
        })
        .collect();

    let same_as = Iri::new(OWL_SAME_AS).expect("static IRI");
    let mut report = SameAsReport {
        kind,
        total: subjects.len(),
        linked: 0,
        no_match: 0,
        ambiguous: 0,
        catalog_errors: 0,
        ratio: 0.0,
    };
    let mut triples = Vec::new();
    for (s, result) in subjects.iter().zip(results) {
        match result.map(Iri::new) {
            Ok(Ok(target)) => {
                report.linked += 1;
                triples.push(Triple::new((*s).clone(), same_as.clone(), target));
            }
            Ok(Err(_)) => report.catalog_errors += 1,
            Err(UnlinkedReason::NoMatch) => report.no_match += 1,
            Err(UnlinkedReason::Ambiguous) => report.ambiguous += 1,
            Err(UnlinkedReason::CatalogError) => report.catalog_errors += 1,
        }
    }
    if report.total > 0 {
        report.ratio = report.linked as f64 / report.total as f64;
    }
    triples.sort_by_cached_key(|t| t.to_string());
    (triples, report)
}

// report ----------------------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorTally {
    pub total: usize,
    pub linked_step1: usize,
    pub linked_step2: usize,
    pub no_match: usize,
    pub ambiguous: usize,
    pub catalog_errors: usize,
}

impl AuthorTally {
    pub fn of(decisions: &[LinkDecision]) -> Self {
        let mut t = AuthorTally { total: decisions.len(), ..Default::default() };
        for d in decisions {
            match &d.outcome {
                Outcome::Linked { step: 1, .. } => t.linked_step1 += 1,
                Outcome::Linked { .. } => t.linked_step2 += 1,
                Outcome::Unlinked { reason: UnlinkedReason::NoMatch } => t.no_match += 1,
                Outcome::Unlinked { reason: UnlinkedReason::Ambiguous } => t.ambiguous += 1,
                Outcome::Unlinked { reason: UnlinkedReason::CatalogError } => t.catalog_errors += 1,
            }
        }
        t
    }

    pub fn linked(&self) -> usize {
        self.linked_step1 + self.linked_step2
    }
}

/// Contents of `link-report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub config: LinkerConfig,
    pub authors: AuthorTally,
    pub sameas: Vec<SameAsReport>,
    pub decisions: Vec<LinkDecision>,
}

/// Subjects typed with `kind` in the graph, for callers that need to check
/// presence before applying decisions.
pub(crate) fn is_typed(graph: &GraphBuffer, subject: &Iri, class: &Iri) -> bool {
    let rdf_type = Iri::new(RDF_TYPE).expect("static IRI");
    graph.contains(&Triple::new(subject.clone(), rdf_type, class.clone()))
}
