use super::term::{Iri, Literal, Triple};
use super::vocab::RDF_TYPE;
use crate::ingest::EntityRecord;
use crate::ontology::{OntologyError, Range, Registry, UriPolicy};
use crate::textnorm::strip_markdown;

/// Triples for one record: its type, one literal per scalar value (markdown
/// properties stripped to plain text), one IRI per link, and one
/// `authorName` literal per unresolved author. The record must already be
/// valid against `registry`.
pub fn emit_entity(record: &EntityRecord, registry: &Registry, policy: &UriPolicy) -> Result<Vec<Triple>, OntologyError> {
    let subject = policy.mint_uri(record.kind, &record.slug)?;
    let mut out = vec![Triple::new(
        subject.clone(),
        Iri::new(RDF_TYPE).expect("static IRI"),
        registry.class_iri(record.kind).clone(),
    )];

    for (name, values) in &record.scalars {
        let prop = registry.property(name).ok_or_else(|| OntologyError::UnknownProperty(name.clone()))?;
        let Range::Datatype(datatype) = &prop.range else {
            return Err(OntologyError::RangeKindMismatch(name.clone()));
        };
        for value in values {
            let lexical = if prop.markdown { strip_markdown(value) } else { value.clone() };
            if lexical.trim().is_empty() {
                continue;
            }
            let literal = Literal::typed(lexical, datatype.clone()).expect("registry datatypes are never langString");
            out.push(Triple::new(subject.clone(), prop.uri.clone(), literal));
        }
    }

    for (name, targets) in &record.links {
        let predicate = registry.property_iri(name);
        for target in targets {
            out.push(Triple::new(subject.clone(), predicate.clone(), policy.mint_uri(target.kind, &target.slug)?));
        }
    }

    if !record.author_names.is_empty() {
        let predicate = registry.property_iri("authorName");
        for name in &record.author_names {
            out.push(Triple::new(subject.clone(), predicate.clone(), Literal::string(name.clone())));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::EntityRef;
    use crate::ontology::EntityKind;

    #[test]
    fn paper_with_title_and_two_tasks() {
        let mut rec = EntityRecord::new(EntityKind::Paper, "p");
        rec.push_scalar("title", "T");
        rec.push_link("hasTask", EntityRef::named(EntityKind::Task, "A").unwrap());
        rec.push_link("hasTask", EntityRef::named(EntityKind::Task, "B").unwrap());
        let triples = emit_entity(&rec, &Registry::default(), &UriPolicy::default()).unwrap();
        assert_eq!(triples.len(), 4);
        assert_eq!(
            triples[3].to_string(),
            "<https://linkedpaperswithcode.com/paper/p> <https://linkedpaperswithcode.com/ontology/hasTask> \
             <https://linkedpaperswithcode.com/task/b> ."
        );
    }

    #[test]
    fn markdown_is_stripped_and_types_kept() {
        let mut rec = EntityRecord::new(EntityKind::Paper, "p");
        rec.push_scalar("abstract", "**x**");
        rec.push_scalar("publicationDate", "2020-01-02");
        rec.author_names.push("Ada \"Lovelace\"".into());
        let lines: Vec<String> = emit_entity(&rec, &Registry::default(), &UriPolicy::default())
            .unwrap()
            .iter()
            .map(|t| t.object.to_string())
            .collect();
        assert_eq!(
            lines[1..],
            [
                "\"x\"".to_owned(),
                "\"2020-01-02\"^^<http://www.w3.org/2001/XMLSchema#date>".to_owned(),
                "\"Ada \\\"Lovelace\\\"\"".to_owned(),
            ]
        );
    }

    #[test]
    fn empty_target_slug_propagates() {
        let mut rec = EntityRecord::new(EntityKind::Paper, "p");
        rec.links.insert(
            "hasTask".into(),
            vec![EntityRef { kind: EntityKind::Task, slug: String::new(), label: None }],
        );
        assert!(matches!(
            emit_entity(&rec, &Registry::default(), &UriPolicy::default()),
            Err(OntologyError::EmptySlug(_))
        ));
    }
}
