use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::ontology::{PropertyKind, Range, Registry, UriPolicy};
use crate::rdf::vocab::{OWL_SAME_AS, RDF_TYPE};
use crate::rdf::{GraphBuffer, Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

/// Check a data graph against the registry and URI policy:
/// - every predicate is `rdf:type`, `owl:sameAs` or a registered property;
/// - every local subject has exactly one registered class, matching the
///   class its IRI was minted for;
/// - property domains and ranges hold (external IRIs are accepted as
///   objects of object properties);
/// - datatype properties carry literals of the registered datatype.
///
/// Violations come back sorted.
pub fn validate_graph(graph: &GraphBuffer, registry: &Registry, policy: &UriPolicy) -> Vec<Violation> {
    let rdf_type = Iri::new(RDF_TYPE).expect("static IRI");
    let same_as = Iri::new(OWL_SAME_AS).expect("static IRI");
    let mut out = Vec::new();
    let mut flag = |s: &Iri, message: String| out.push(Violation { subject: s.as_str().to_owned(), message });

    let mut types: HashMap<&Iri, Vec<&Iri>> = HashMap::new();
    for t in graph.iter().filter(|t| t.predicate == rdf_type) {
        match &t.object {
            Term::Iri(class) => types.entry(&t.subject).or_default().push(class),
            Term::Literal(_) => flag(&t.subject, "rdf:type with a literal object".into()),
        }
    }

    let mut class_of: HashMap<&Iri, &str> = HashMap::new();
    let mut typed: BTreeMap<&str, (&Iri, Vec<&Iri>)> = BTreeMap::new();
    for (s, classes) in &types {
        typed.insert(s.as_str(), (s, classes.clone()));
    }
    for (s, classes) in typed.values() {
        if classes.len() != 1 {
            flag(s, format!("{} rdf:type statements, expected 1", classes.len()));
            continue;
        }
        let Some(desc) = registry.class_by_iri(classes[0]) else {
            flag(s, format!("unregistered class {}", classes[0]));
            continue;
        };
        match policy.kind_of(s) {
            Some(kind) if kind.local_name() == desc.local_name => {}
            Some(kind) => flag(s, format!("IRI minted for {kind} but typed {}", desc.local_name)),
            None => flag(s, "typed subject outside the URI space".into()),
        }
        class_of.insert(s, desc.local_name.as_str());
    }

    for t in graph.iter() {
        if t.predicate == rdf_type {
            continue;
        }
        let local = policy.kind_of(&t.subject).is_some();
        if local && !class_of.contains_key(&t.subject) {
            flag(&t.subject, format!("untyped subject of {}", t.predicate));
        }
        if t.predicate == same_as {
            if t.object.as_iri().is_none() {
                flag(&t.subject, "owl:sameAs with a literal object".into());
            }
            continue;
        }
        let Some(prop) = registry.property_by_iri(&t.predicate) else {
            flag(&t.subject, format!("unregistered predicate {}", t.predicate));
            continue;
        };
        if let Some(class) = class_of.get(&t.subject) {
            if *class != prop.domain {
                flag(&t.subject, format!("{} used on a {class}", prop.local_name));
            }
        }
        match (&prop.range, &t.object, prop.kind) {
            (Range::Class(range), Term::Iri(o), PropertyKind::Object) => {
                if policy.kind_of(o).is_some() {
                    match class_of.get(o) {
                        Some(c) if c == range => {}
                        Some(c) => flag(&t.subject, format!("{} points to a {c}, expected {range}", prop.local_name)),
                        None => flag(&t.subject, format!("{} points to untyped {o}", prop.local_name)),
                    }
                }
            }
            (Range::Datatype(dt), Term::Literal(lit), PropertyKind::Datatype) => {
                if lit.datatype() != dt {
                    flag(&t.subject, format!("{} literal typed {}", prop.local_name, lit.datatype()));
                }
            }
            _ => flag(&t.subject, format!("{} has the wrong kind of object", prop.local_name)),
        }
    }

    out.sort();
    out.dedup();
    out
}
