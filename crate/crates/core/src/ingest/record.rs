use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ontology::{slug_key, EntityKind, PropertyKind, Range, Registry};

/// A reference to another entity by class and slug, with the display label
/// seen at the reference site (used when the target has no record of its own).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EntityRef {
    pub kind: EntityKind,
    pub slug: String,
    pub label: Option<String>,
}

impl EntityRef {
    /// `None` when the raw slug normalizes to nothing.
    pub fn new(kind: EntityKind, raw_slug: &str, label: Option<&str>) -> Option<Self> {
        let slug = slug_key(raw_slug);
        if slug.is_empty() {
            return None;
        }
        Some(EntityRef {
            kind,
            slug,
            label: label.map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned),
        })
    }

    /// Reference whose slug and label both come from a display name.
    pub fn named(kind: EntityKind, name: &str) -> Option<Self> {
        EntityRef::new(kind, name, Some(name))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("empty slug")]
    EmptySlug,
    #[error("property {0:?} is not registered")]
    UnknownProperty(String),
    #[error("property {property:?} does not apply to {kind}")]
    WrongDomain { property: String, kind: EntityKind },
    #[error("property {property:?} cannot point to {target}")]
    WrongRange { property: String, target: EntityKind },
    #[error("property {0:?} is used with the wrong value kind")]
    WrongPropertyKind(String),
    #[error("only papers carry raw author names")]
    AuthorsOnNonPaper,
}

/// One typed entity parsed from a dump file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityRecord {
    pub kind: EntityKind,
    pub slug: String,
    /// Datatype property → lexical values, already in the property's datatype.
    pub scalars: BTreeMap<String, Vec<String>>,
    /// Object property → targets, in file order.
    pub links: BTreeMap<String, Vec<EntityRef>>,
    /// Object properties pointing *at* this record from another entity;
    /// resolved by joins, never emitted directly.
    pub reverse_links: BTreeMap<String, Vec<EntityRef>>,
    pub author_names: Vec<String>,
}

impl EntityRecord {
    pub fn new(kind: EntityKind, raw_slug: &str) -> Self {
        EntityRecord {
            kind,
            slug: slug_key(raw_slug),
            scalars: BTreeMap::new(),
            links: BTreeMap::new(),
            reverse_links: BTreeMap::new(),
            author_names: Vec::new(),
        }
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    pub fn as_ref(&self) -> EntityRef {
        EntityRef {
            kind: self.kind(),
            slug: self.slug.clone(),
            label: None,
        }
    }

    pub fn push_scalar(&mut self, property: &str, value: impl Into<String>) {
        self.scalars.entry(property.to_owned()).or_default().push(value.into());
    }

    pub fn push_link(&mut self, property: &str, target: EntityRef) {
        self.links.entry(property.to_owned()).or_default().push(target);
    }

    pub fn push_reverse_link(&mut self, property: &str, source: EntityRef) {
        self.reverse_links.entry(property.to_owned()).or_default().push(source);
    }

    pub fn scalar(&self, property: &str) -> Option<&str> {
        self.scalars.get(property).and_then(|v| v.first()).map(String::as_str)
    }

    pub fn links_for(&self, property: &str) -> &[EntityRef] {
        self.links.get(property).map_or(&[], Vec::as_slice)
    }

    /// Display name from the class's label property, if present.
    pub fn label(&self) -> Option<&str> {
        self.kind().label_property().and_then(|p| self.scalar(p))
    }

    /// Check the record against the registry: non-empty slug, known
    /// properties, matching domains and ranges.
    pub fn validate(&self, registry: &Registry) -> Result<(), RecordError> {
        let kind = self.kind();
        if self.slug.is_empty() {
            return Err(RecordError::EmptySlug);
        }
        let lookup = |name: &str, expected: PropertyKind| {
            let prop = registry
                .property(name)
                .ok_or_else(|| RecordError::UnknownProperty(name.to_owned()))?;
            if prop.kind != expected {
                return Err(RecordError::WrongPropertyKind(name.to_owned()));
            }
            Ok(prop)
        };

        for name in self.scalars.keys() {
            let prop = lookup(name, PropertyKind::Datatype)?;
            if prop.domain != kind.local_name() {
                return Err(RecordError::WrongDomain { property: name.clone(), kind });
            }
        }
        for (name, targets) in &self.links {
            let prop = lookup(name, PropertyKind::Object)?;
            if prop.domain != kind.local_name() {
                return Err(RecordError::WrongDomain { property: name.clone(), kind });
            }
            for target in targets {
                if prop.range != Range::Class(target.kind.local_name().to_owned()) {
                    return Err(RecordError::WrongRange { property: name.clone(), target: target.kind });
                }
            }
        }
        for (name, sources) in &self.reverse_links {
            let prop = lookup(name, PropertyKind::Object)?;
            if prop.range != Range::Class(kind.local_name().to_owned()) {
                return Err(RecordError::WrongRange { property: name.clone(), target: kind });
            }
            for source in sources {
                if prop.domain != source.kind.local_name() {
                    return Err(RecordError::WrongDomain { property: name.clone(), kind: source.kind });
                }
            }
        }
        if !self.author_names.is_empty() && kind != EntityKind::Paper {
            return Err(RecordError::AuthorsOnNonPaper);
        }
        Ok(())
    }
}
