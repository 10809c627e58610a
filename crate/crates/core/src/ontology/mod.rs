//! Schema registry (classes and properties), URI minting and the ontology /
//! VoID description triples.

mod registry_data;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::rdf::vocab::*;
use crate::rdf::{Iri, Literal, Triple};
use crate::stats::GraphStats;

pub const DEFAULT_BASE: &str = "https://linkedpaperswithcode.com/";
pub const DEFAULT_ONTOLOGY_NS: &str = "https://linkedpaperswithcode.com/ontology/";
pub const CC_BY_SA_4: &str = "https://creativecommons.org/licenses/by-sa/4.0/";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("slug {0:?} is empty after normalization")]
    EmptySlug(String),
    #[error("namespace {0:?} must be an absolute IRI ending in '/' or '#'")]
    BadNamespace(String),
    #[error("duplicate class {0:?}")]
    DuplicateClass(String),
    #[error("duplicate property {0:?}")]
    DuplicateProperty(String),
    #[error("property {property:?} refers to unknown class {class:?}")]
    UnknownClass { property: String, class: String },
    #[error("property {0:?} has no range")]
    MissingRange(String),
    #[error("property {0:?}: object properties need a class range, datatype properties a datatype range")]
    RangeKindMismatch(String),
    #[error("path segment {0:?} must be non-empty lowercase ASCII without '/'")]
    BadSegment(String),
    #[error("path segment {0:?} is used by more than one class")]
    SegmentCollision(String),
    #[error("unknown entity kind {0:?}")]
    UnknownKind(String),
    #[error("property {0:?} is not registered")]
    UnknownProperty(String),
}

/// The thirteen entity classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Paper,
    Author,
    Conference,
    Repository,
    Task,
    Dataset,
    Method,
    Model,
    EvaluationTable,
    EvaluationResult,
    Metric,
    Area,
    DatasetVariant,
}

impl EntityKind {
    pub const ALL: [EntityKind; 13] = [
        EntityKind::Paper,
        EntityKind::Author,
        EntityKind::Conference,
        EntityKind::Repository,
        EntityKind::Task,
        EntityKind::Dataset,
        EntityKind::Method,
        EntityKind::Model,
        EntityKind::EvaluationTable,
        EntityKind::EvaluationResult,
        EntityKind::Metric,
        EntityKind::Area,
        EntityKind::DatasetVariant,
    ];

    pub fn local_name(self) -> &'static str {
        match self {
            EntityKind::Paper => "Paper",
            EntityKind::Author => "Author",
            EntityKind::Conference => "Conference",
            EntityKind::Repository => "Repository",
            EntityKind::Task => "Task",
            EntityKind::Dataset => "Dataset",
            EntityKind::Method => "Method",
            EntityKind::Model => "Model",
            EntityKind::EvaluationTable => "EvaluationTable",
            EntityKind::EvaluationResult => "EvaluationResult",
            EntityKind::Metric => "Metric",
            EntityKind::Area => "Area",
            EntityKind::DatasetVariant => "DatasetVariant",
        }
    }

    pub fn default_segment(self) -> &'static str {
        match self {
            EntityKind::Paper => "paper",
            EntityKind::Author => "author",
            EntityKind::Conference => "conference",
            EntityKind::Repository => "repository",
            EntityKind::Task => "task",
            EntityKind::Dataset => "dataset",
            EntityKind::Method => "method",
            EntityKind::Model => "model",
            EntityKind::EvaluationTable => "evaluation-table",
            EntityKind::EvaluationResult => "evaluation-result",
            EntityKind::Metric => "metric",
            EntityKind::Area => "area",
            EntityKind::DatasetVariant => "dataset-variant",
        }
    }

    /// Datatype property holding the human-readable name, when the class has one.
    pub fn label_property(self) -> Option<&'static str> {
        Some(match self {
            EntityKind::Paper => "title",
            EntityKind::Author => "fullName",
            EntityKind::Conference => "conferenceName",
            EntityKind::Task => "taskName",
            EntityKind::Dataset => "datasetName",
            EntityKind::Method => "methodName",
            EntityKind::Model => "modelName",
            EntityKind::Metric => "metricName",
            EntityKind::Area => "areaName",
            EntityKind::DatasetVariant => "variantName",
            EntityKind::Repository | EntityKind::EvaluationTable | EntityKind::EvaluationResult => {
                return None
            }
        })
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.local_name())
    }
}

impl FromStr for EntityKind {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityKind::ALL
            .into_iter()
            .find(|k| k.local_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| OntologyError::UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyKind {
    Object,
    Datatype,
}

/// Raw property row, validated into a [`PropertyDescriptor`] by [`Registry::new`].
#[derive(Debug, Clone, Copy)]
pub struct PropertySpec {
    pub local_name: &'static str,
    pub kind: PropertyKind,
    pub domain: &'static str,
    pub range: Option<RangeSpec>,
    /// Values are markdown and get stripped to plain text on emission.
    pub markdown: bool,
}

#[derive(Debug, Clone, Copy)]
pub enum RangeSpec {
    Class(&'static str),
    Datatype(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDescriptor {
    pub local_name: String,
    pub uri: Iri,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Range {
    Class(String),
    Datatype(Iri),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDescriptor {
    pub local_name: String,
    pub uri: Iri,
    pub kind: PropertyKind,
    pub domain: String,
    pub range: Range,
    pub markdown: bool,
}

/// Immutable class/property registry.
#[derive(Debug, Clone)]
pub struct Registry {
    namespace: String,
    classes: Vec<ClassDescriptor>,
    properties: Vec<PropertyDescriptor>,
    class_index: HashMap<String, usize>,
    property_index: HashMap<String, usize>,
    property_by_iri: HashMap<Iri, usize>,
}

fn check_namespace(ns: &str) -> Result<(), OntologyError> {
    if !(ns.ends_with('/') || ns.ends_with('#')) || Iri::new(ns).is_err() {
        return Err(OntologyError::BadNamespace(ns.to_owned()));
    }
    Ok(())
}

impl Registry {
    pub fn new(
        namespace: &str,
        classes: &[(&str, &str)],
        properties: &[PropertySpec],
    ) -> Result<Self, OntologyError> {
        check_namespace(namespace)?;
        let term = |local: &str| {
            Iri::new(format!("{namespace}{local}"))
                .map_err(|_| OntologyError::BadNamespace(namespace.to_owned()))
        };

        let mut class_index = HashMap::new();
        let mut class_descs = Vec::with_capacity(classes.len());
        for (name, description) in classes {
            if class_index.insert(name.to_string(), class_descs.len()).is_some() {
                return Err(OntologyError::DuplicateClass(name.to_string()));
            }
            class_descs.push(ClassDescriptor {
                local_name: name.to_string(),
                uri: term(name)?,
                description: description.to_string(),
            });
        }

        let mut property_index = HashMap::new();
        let mut property_by_iri = HashMap::new();
        let mut property_descs = Vec::with_capacity(properties.len());
        for spec in properties {
            let name = spec.local_name.to_owned();
            if !class_index.contains_key(spec.domain) {
                return Err(OntologyError::UnknownClass {
                    property: name,
                    class: spec.domain.to_owned(),
                });
            }
            let range = match (spec.kind, spec.range) {
                (_, None) => return Err(OntologyError::MissingRange(name)),
                (PropertyKind::Object, Some(RangeSpec::Class(class))) => {
                    if !class_index.contains_key(class) {
                        return Err(OntologyError::UnknownClass {
                            property: name,
                            class: class.to_owned(),
                        });
                    }
                    Range::Class(class.to_owned())
                }
                (PropertyKind::Datatype, Some(RangeSpec::Datatype(dt))) => Range::Datatype(
                    Iri::new(dt).map_err(|_| OntologyError::RangeKindMismatch(name.clone()))?,
                ),
                _ => return Err(OntologyError::RangeKindMismatch(name)),
            };
            if property_index.contains_key(&name) {
                return Err(OntologyError::DuplicateProperty(name));
            }
            let uri = term(&name)?;
            property_index.insert(name.clone(), property_descs.len());
            property_by_iri.insert(uri.clone(), property_descs.len());
            property_descs.push(PropertyDescriptor {
                local_name: name,
                uri,
                kind: spec.kind,
                domain: spec.domain.to_owned(),
                range,
                markdown: spec.markdown,
            });
        }

        Ok(Registry {
            namespace: namespace.to_owned(),
            classes: class_descs,
            properties: property_descs,
            class_index,
            property_index,
            property_by_iri,
        })
    }

    /// The built-in schema under `namespace`.
    pub fn lpwc(namespace: &str) -> Result<Self, OntologyError> {
        Registry::new(namespace, registry_data::CLASSES, registry_data::PROPERTIES)
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn classes(&self) -> &[ClassDescriptor] {
        &self.classes
    }

    pub fn properties(&self) -> &[PropertyDescriptor] {
        &self.properties
    }

    pub fn class(&self, local_name: &str) -> Option<&ClassDescriptor> {
        self.class_index.get(local_name).map(|&i| &self.classes[i])
    }

    pub fn class_of(&self, kind: EntityKind) -> Option<&ClassDescriptor> {
        self.class(kind.local_name())
    }

    pub fn class_by_iri(&self, iri: &Iri) -> Option<&ClassDescriptor> {
        let local = iri.as_str().strip_prefix(self.namespace.as_str())?;
        self.class(local).filter(|c| c.uri == *iri)
    }

    pub fn property(&self, local_name: &str) -> Option<&PropertyDescriptor> {
        self.property_index.get(local_name).map(|&i| &self.properties[i])
    }

    pub fn property_by_iri(&self, iri: &Iri) -> Option<&PropertyDescriptor> {
        self.property_by_iri.get(iri).map(|&i| &self.properties[i])
    }

    /// Property IRI by local name. Panics on an unknown name, which is a
    /// programming error against the built-in table.
    pub fn property_iri(&self, local_name: &str) -> &Iri {
        match self.property(local_name) {
            Some(p) => &p.uri,
            None => panic!("property {local_name:?} is not registered"),
        }
    }

    pub fn class_iri(&self, kind: EntityKind) -> &Iri {
        match self.class_of(kind) {
            Some(c) => &c.uri,
            None => panic!("class {kind} is not registered"),
        }
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::lpwc(DEFAULT_ONTOLOGY_NS).expect("built-in registry is valid")
    }
}

/// Class declarations plus declaration, domain and range for every property.
/// Sorted canonically.
pub fn emit_ontology_triples(registry: &Registry) -> Vec<Triple> {
    let iri = |s: &str| Iri::new(s).expect("vocabulary IRI");
    let rdf_type = iri(RDF_TYPE);
    let mut triples = Vec::with_capacity(registry.classes.len() + 3 * registry.properties.len());
    for class in &registry.classes {
        triples.push(Triple::new(class.uri.clone(), rdf_type.clone(), iri(OWL_CLASS)));
    }
    for prop in &registry.properties {
        let decl = match prop.kind {
            PropertyKind::Object => OWL_OBJECT_PROPERTY,
            PropertyKind::Datatype => OWL_DATATYPE_PROPERTY,
        };
        let domain = registry.class(&prop.domain).expect("validated domain").uri.clone();
        let range = match &prop.range {
            Range::Class(c) => registry.class(c).expect("validated range").uri.clone(),
            Range::Datatype(dt) => dt.clone(),
        };
        triples.push(Triple::new(prop.uri.clone(), rdf_type.clone(), iri(decl)));
        triples.push(Triple::new(prop.uri.clone(), iri(RDFS_DOMAIN), domain));
        triples.push(Triple::new(prop.uri.clone(), iri(RDFS_RANGE), range));
    }
    triples.sort_by_cached_key(|t| t.to_string());
    triples
}

// URI minting -------------------------------------------------------------

const SLUG_SAFE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-');

/// NFC, lowercase, non-alphanumeric runs → `-`, trimmed, non-ASCII
/// percent-encoded.
pub fn slugify(raw: &str) -> String {
    utf8_percent_encode(&slug_key(raw), SLUG_SAFE).to_string()
}

/// The slug before percent-encoding. Idempotent, so records can store it and
/// still mint the same IRI.
pub fn slug_key(raw: &str) -> String {
    let lowered: String = raw.nfc().collect::<String>().to_lowercase();
    let mut slug = String::with_capacity(lowered.len());
    let mut gap = false;
    for c in lowered.chars() {
        if c.is_alphanumeric() {
            if gap && !slug.is_empty() {
                slug.push('-');
            }
            gap = false;
            slug.push(c);
        } else {
            gap = true;
        }
    }
    slug
}

/// Base namespace plus one path segment per class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UriPolicy {
    base: String,
    segments: BTreeMap<EntityKind, String>,
}

impl UriPolicy {
    pub fn new(base: &str, overrides: &BTreeMap<EntityKind, String>) -> Result<Self, OntologyError> {
        if !base.ends_with('/') || Iri::new(base).is_err() {
            return Err(OntologyError::BadNamespace(base.to_owned()));
        }
        let mut segments = BTreeMap::new();
        let mut seen = HashSet::new();
        for kind in EntityKind::ALL {
            let seg = overrides
                .get(&kind)
                .cloned()
                .unwrap_or_else(|| kind.default_segment().to_owned());
            let valid = !seg.is_empty()
                && seg
                    .bytes()
                    .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-');
            if !valid {
                return Err(OntologyError::BadSegment(seg));
            }
            if !seen.insert(seg.clone()) {
                return Err(OntologyError::SegmentCollision(seg));
            }
            segments.insert(kind, seg);
        }
        Ok(UriPolicy {
            base: base.to_owned(),
            segments,
        })
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn segment(&self, kind: EntityKind) -> &str {
        &self.segments[&kind]
    }

    /// `base + segment + "/" + slugify(slug)`.
    pub fn mint_uri(&self, kind: EntityKind, slug: &str) -> Result<Iri, OntologyError> {
        let slug_part = slugify(slug);
        if slug_part.is_empty() {
            return Err(OntologyError::EmptySlug(slug.to_owned()));
        }
        let iri = format!("{}{}/{}", self.base, self.segment(kind), slug_part);
        Ok(Iri::new(iri).expect("minted IRIs use only safe characters"))
    }

    /// Inverse of [`UriPolicy::mint_uri`] on the class part.
    pub fn kind_of(&self, iri: &Iri) -> Option<EntityKind> {
        let rest = iri.as_str().strip_prefix(self.base.as_str())?;
        let (segment, slug) = rest.split_once('/')?;
        if slug.is_empty() || slug.contains('/') {
            return None;
        }
        self.segments
            .iter()
            .find(|(_, s)| s.as_str() == segment)
            .map(|(k, _)| *k)
    }
}

impl Default for UriPolicy {
    fn default() -> Self {
        UriPolicy::new(DEFAULT_BASE, &BTreeMap::new()).expect("default policy is valid")
    }
}

// VoID ----------------------------------------------------------------------

/// An external dataset our entities link into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkTarget {
    pub name: String,
    /// IRIs starting with this prefix belong to the target.
    pub namespace: String,
    /// IRI naming the target dataset in VoID linksets.
    pub dataset: String,
}

pub fn default_link_targets() -> Vec<LinkTarget> {
    vec![
        LinkTarget {
            name: "semopenalex".into(),
            namespace: "https://semopenalex.org/".into(),
            dataset: "https://semopenalex.org/".into(),
        },
        LinkTarget {
            name: "wikidata".into(),
            namespace: "http://www.wikidata.org/entity/".into(),
            dataset: "http://www.wikidata.org/".into(),
        },
        LinkTarget {
            name: "dblp".into(),
            namespace: "https://dblp.org/".into(),
            dataset: "https://dblp.org/".into(),
        },
    ]
}

#[derive(Debug, Clone)]
pub struct VoidProfile {
    pub dataset: Iri,
    pub license: Iri,
    pub uri_space: String,
    pub vocabulary: Iri,
    pub targets: Vec<LinkTarget>,
}

impl VoidProfile {
    pub fn new(policy: &UriPolicy, registry: &Registry, targets: Vec<LinkTarget>) -> Self {
        VoidProfile {
            dataset: Iri::new(format!("{}void/lpwc", policy.base())).expect("base is an IRI"),
            license: Iri::new(CC_BY_SA_4).expect("license IRI"),
            uri_space: policy.base().to_owned(),
            vocabulary: Iri::new(registry.namespace()).expect("namespace is an IRI"),
            targets,
        }
    }
}

/// Dataset description: size, license, class partitions and linksets.
pub fn emit_void(
    stats: &GraphStats,
    dump_date: Option<NaiveDate>,
    registry: &Registry,
    profile: &VoidProfile,
) -> Vec<Triple> {
    let iri = |s: &str| Iri::new(s).expect("vocabulary IRI");
    let void = |local: &str| iri(&format!("{VOID}{local}"));
    let integer = |n: u64| Literal::typed(n.to_string(), iri(XSD_INTEGER)).expect("integer literal");
    let ds = &profile.dataset;
    let mut out = vec![
        Triple::new(ds.clone(), iri(RDF_TYPE), void("Dataset")),
        Triple::new(ds.clone(), void("triples"), integer(stats.triples)),
        Triple::new(ds.clone(), iri(&format!("{DCTERMS}license")), profile.license.clone()),
        Triple::new(ds.clone(), void("uriSpace"), Literal::string(profile.uri_space.clone())),
        Triple::new(ds.clone(), void("vocabulary"), profile.vocabulary.clone()),
    ];
    if let Some(date) = dump_date {
        let modified = Literal::typed(date.format("%Y-%m-%d").to_string(), iri(XSD_DATE)).expect("date");
        out.push(Triple::new(ds.clone(), iri(&format!("{DCTERMS}modified")), modified));
    }

    for (class, &count) in &stats.classes {
        let Some(desc) = registry.class(class) else { continue };
        if count == 0 {
            continue;
        }
        let part = iri(&format!("{}/class/{}", ds.as_str(), desc.local_name));
        out.push(Triple::new(ds.clone(), void("classPartition"), part.clone()));
        out.push(Triple::new(part.clone(), void("class"), desc.uri.clone()));
        out.push(Triple::new(part, void("entities"), integer(count)));
    }

    for linkset in &stats.linksets {
        if linkset.links == 0 {
            continue;
        }
        let Some(target) = profile.targets.iter().find(|t| t.name == linkset.target) else {
            continue;
        };
        let Ok(target_iri) = Iri::new(target.dataset.clone()) else { continue };
        let predicate_local = linkset
            .predicate
            .rsplit(['#', '/'])
            .next()
            .unwrap_or("link")
            .to_ascii_lowercase();
        let ls = iri(&format!("{}/linkset/{}-{}", ds.as_str(), target.name, predicate_local));
        out.push(Triple::new(ds.clone(), void("subset"), ls.clone()));
        out.push(Triple::new(ls.clone(), iri(RDF_TYPE), void("Linkset")));
        out.push(Triple::new(ls.clone(), void("subjectsTarget"), ds.clone()));
        out.push(Triple::new(ls.clone(), void("objectsTarget"), target_iri));
        out.push(Triple::new(ls.clone(), void("linkPredicate"), iri(&linkset.predicate)));
        out.push(Triple::new(ls, void("triples"), integer(linkset.links)));
    }

    out.sort_by_cached_key(|t| t.to_string());
    out
}
