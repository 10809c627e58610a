use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::term::{Iri, Term, Triple};
use super::vocab::RDF_TYPE;

/// Deduplicating triple set with a per-class subject index.
///
/// Inserts take `&mut self`; share a buffer between workers by wrapping it in
/// a `Mutex`. Serialization reads a finished buffer.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct GraphBuffer {
    triples: HashSet<Triple>,
    by_class: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl GraphBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        if triple.predicate.as_str() == RDF_TYPE {
            if let Term::Iri(class) = &triple.object {
                self.by_class
                    .entry(class.clone())
                    .or_default()
                    .insert(triple.subject.clone());
            }
        }
        self.triples.insert(triple)
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) -> usize {
        triples.into_iter().filter(|t| self.insert(t.clone())).count()
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        if !self.triples.remove(triple) {
            return false;
        }
        if triple.predicate.as_str() == RDF_TYPE {
            if let Term::Iri(class) = &triple.object {
                if let Some(subjects) = self.by_class.get_mut(class) {
                    subjects.remove(&triple.subject);
                    if subjects.is_empty() {
                        self.by_class.remove(class);
                    }
                }
            }
        }
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Unordered iteration. Use [`GraphBuffer::sorted`] for canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Subjects typed with `class`, in IRI order.
    pub fn subjects_of_class(&self, class: &Iri) -> impl Iterator<Item = &Iri> {
        self.by_class.get(class).into_iter().flatten()
    }

    pub fn class_count(&self, class: &Iri) -> usize {
        self.by_class.get(class).map_or(0, BTreeSet::len)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Iri, usize)> {
        self.by_class.iter().map(|(c, s)| (c, s.len()))
    }

    /// Triples paired with their N-Triples line, sorted by that line.
    ///
    /// IRI renderings never contain `>` before their closing bracket, so
    /// sorting whole lines equals sorting by (subject, predicate, object).
    pub fn sorted(&self) -> Vec<(String, &Triple)> {
        let mut lines: Vec<(String, &Triple)> =
            self.triples.iter().map(|t| (t.to_string(), t)).collect();
        lines.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        lines
    }
}

impl FromIterator<Triple> for GraphBuffer {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut graph = GraphBuffer::new();
        for t in iter {
            graph.insert(t);
        }
        graph
    }
}
