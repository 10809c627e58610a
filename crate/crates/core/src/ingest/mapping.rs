//! Declarative field mappings from upstream dump keys to registry properties.
//!
//! Each flat dump kind has one table below. Keys that appear in a dump but
//! not in its table are reported as warnings; keys mapped to `Ignore` are
//! known upstream fields this schema deliberately drops.

use serde_json::{Map, Value};

use super::record::{EntityRecord, EntityRef};
use crate::ontology::EntityKind;

/// How the primary key of a record is derived.
#[derive(Debug, Clone, Copy)]
pub enum KeyRule {
    /// Last path segment of a URL (`.../paper/some-slug` → `some-slug`).
    UrlSegment(&'static str),
    /// URL without its scheme (`https://github.com/a/b` → `github.com/a/b`).
    UrlBody(&'static str),
    /// A display name.
    Name(&'static str),
}

#[derive(Debug, Clone, Copy)]
pub enum Rule {
    /// Known field with no counterpart in the schema.
    Ignore,
    /// String (or number) → datatype property.
    Scalar(&'static str),
    /// `YYYY-MM-DD` date; anything else is dropped with a warning.
    Date(&'static str),
    Integer(&'static str),
    Bool(&'static str),
    /// String, object, or list of either → object property. For objects the
    /// name is read from `field`.
    Link {
        property: &'static str,
        kind: EntityKind,
        field: Option<&'static str>,
    },
    /// Paper URL (string, or object with `url` and `title`) → object property.
    PaperLink(&'static str),
    /// Paper URL whose paper points at this record through `property`.
    ReversePaperLink(&'static str),
    /// List of raw author name strings.
    Authors,
}

#[derive(Debug)]
pub struct MappingTable {
    pub kind: EntityKind,
    pub key: KeyRule,
    pub fields: &'static [(&'static str, &'static [Rule])],
}

impl MappingTable {
    pub fn rules(&self, key: &str) -> Option<&'static [Rule]> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, r)| *r)
    }
}

use Rule::*;

pub const PAPERS: MappingTable = MappingTable {
    kind: EntityKind::Paper,
    key: KeyRule::UrlSegment("paper_url"),
    fields: &[
        ("paper_url", &[]),
        ("arxiv_id", &[Scalar("arxivId")]),
        ("title", &[Scalar("title")]),
        ("abstract", &[Scalar("abstract")]),
        ("url_abs", &[Scalar("paperUrl")]),
        ("url_pdf", &[Scalar("pdfUrl")]),
        ("proceeding", &[Ignore]),
        ("authors", &[Authors]),
        ("tasks", &[Link { property: "hasTask", kind: EntityKind::Task, field: None }]),
        ("date", &[Date("publicationDate")]),
        ("methods", &[Link { property: "hasMethod", kind: EntityKind::Method, field: Some("name") }]),
        ("conference", &[Link { property: "hasConference", kind: EntityKind::Conference, field: None }]),
        ("conference_url_abs", &[Ignore]),
        ("conference_url_pdf", &[Ignore]),
    ],
};

pub const CODE_LINKS: MappingTable = MappingTable {
    kind: EntityKind::Repository,
    key: KeyRule::UrlBody("repo_url"),
    fields: &[
        ("paper_url", &[ReversePaperLink("hasRepository")]),
        ("paper_title", &[Ignore]),
        ("paper_arxiv_id", &[Ignore]),
        ("paper_url_abs", &[Ignore]),
        ("paper_url_pdf", &[Ignore]),
        ("repo_url", &[Scalar("repositoryUrl")]),
        ("is_official", &[Bool("isOfficial")]),
        ("mentioned_in_paper", &[Ignore]),
        ("mentioned_in_github", &[Ignore]),
        ("framework", &[Scalar("framework")]),
    ],
};

pub const METHODS: MappingTable = MappingTable {
    kind: EntityKind::Method,
    key: KeyRule::Name("name"),
    fields: &[
        ("url", &[Ignore]),
        ("name", &[Scalar("methodName")]),
        ("full_name", &[Ignore]),
        ("description", &[Scalar("methodDescription")]),
        ("paper", &[PaperLink("methodIntroducedIn")]),
        ("introduced_year", &[Integer("introducedYear")]),
        ("source_url", &[Ignore]),
        ("source_title", &[Ignore]),
        ("code_snippet_url", &[Ignore]),
        ("num_papers", &[Ignore]),
        ("collections", &[Link { property: "methodArea", kind: EntityKind::Area, field: Some("area") }]),
    ],
};

pub const DATASETS: MappingTable = MappingTable {
    kind: EntityKind::Dataset,
    key: KeyRule::Name("name"),
    fields: &[
        ("url", &[Ignore]),
        ("name", &[Scalar("datasetName")]),
        ("full_name", &[Scalar("datasetFullName")]),
        ("homepage", &[Scalar("datasetHomepage")]),
        ("description", &[Scalar("datasetDescription")]),
        ("paper", &[PaperLink("datasetIntroducedIn")]),
        ("introduced_date", &[Ignore]),
        ("warning", &[Ignore]),
        ("modalities", &[Ignore]),
        ("tasks", &[Link { property: "datasetTask", kind: EntityKind::Task, field: Some("task") }]),
        ("languages", &[Ignore]),
        ("variants", &[Link { property: "hasVariant", kind: EntityKind::DatasetVariant, field: None }]),
        ("num_papers", &[Ignore]),
        ("data_loaders", &[Ignore]),
    ],
};

/// Known keys of the nested evaluation-table objects (handled in code, not
/// by rule tables, because they form trees).
pub const EVAL_TASK_KEYS: &[&str] = &["task", "description", "categories", "datasets", "subtasks", "source_link", "synonyms"];
pub const EVAL_DATASET_KEYS: &[&str] =
    &["dataset", "description", "subdatasets", "sota", "dataset_citations", "dataset_links"];
pub const EVAL_SOTA_KEYS: &[&str] = &["metrics", "rows"];
pub const EVAL_ROW_KEYS: &[&str] = &[
    "model_name",
    "metrics",
    "paper_title",
    "paper_url",
    "paper_date",
    "code_links",
    "model_links",
    "uses_additional_data",
    "external_source_url",
    "tags",
];

/// Outcome of applying a table to one JSON object.
#[derive(Debug)]
pub struct Mapped {
    pub record: Option<EntityRecord>,
    pub unknown_keys: Vec<String>,
    /// Human-readable notes about dropped values.
    pub notes: Vec<String>,
}

/// Slug of a PWC paper URL: its last non-empty path segment.
pub fn paper_slug_from_url(url: &str) -> Option<&str> {
    url.trim().trim_end_matches('/').rsplit('/').next().filter(|s| !s.is_empty())
}

fn url_body(url: &str) -> &str {
    let url = url.trim();
    let url = url.split_once("://").map_or(url, |(_, rest)| rest);
    url.trim_end_matches('/')
}

fn as_text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.trim().to_owned()).filter(|s| !s.is_empty()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn paper_ref(value: &Value) -> Option<EntityRef> {
    match value {
        Value::String(url) => EntityRef::new(EntityKind::Paper, paper_slug_from_url(url)?, None),
        Value::Object(obj) => {
            let url = obj.get("url").and_then(Value::as_str)?;
            let title = obj.get("title").and_then(Value::as_str);
            EntityRef::new(EntityKind::Paper, paper_slug_from_url(url)?, title)
        }
        _ => None,
    }
}

fn link_names<'a>(value: &'a Value, field: Option<&str>) -> Vec<&'a str> {
    let one = |v: &'a Value| -> Option<&'a str> {
        match (v, field) {
            (Value::String(s), _) => Some(s.as_str()),
            (Value::Object(obj), Some(f)) => obj.get(f).and_then(Value::as_str),
            _ => None,
        }
    };
    match value {
        Value::Array(items) => items.iter().filter_map(one).collect(),
        other => one(other).into_iter().collect(),
    }
}

fn is_iso_date(s: &str) -> bool {
    chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
}

/// Apply `table` to one dump object. The record is `None` when the key field
/// is missing or yields an empty slug.
pub fn apply(table: &MappingTable, obj: &Map<String, Value>) -> Mapped {
    let mut unknown_keys = Vec::new();
    let mut notes = Vec::new();

    let key = match table.key {
        KeyRule::UrlSegment(f) => obj.get(f).and_then(Value::as_str).and_then(paper_slug_from_url),
        KeyRule::UrlBody(f) => obj.get(f).and_then(Value::as_str).map(url_body),
        KeyRule::Name(f) => obj.get(f).and_then(Value::as_str),
    };
    let mut record = key.map(|k| EntityRecord::new(table.kind, k)).filter(|r| !r.slug.is_empty());

    for (key, value) in obj {
        let Some(rules) = table.rules(key) else {
            unknown_keys.push(key.clone());
            continue;
        };
        let Some(rec) = record.as_mut() else { continue };
        for rule in rules {
            match *rule {
                Ignore => {}
                Scalar(p) => {
                    if let Some(text) = as_text(value) {
                        rec.push_scalar(p, text);
                    }
                }
                Date(p) => match value.as_str().map(str::trim) {
                    Some(d) if is_iso_date(d) => rec.push_scalar(p, d),
                    Some(d) if !d.is_empty() => notes.push(format!("{key}: not a date: {d:?}")),
                    _ => {}
                },
                Integer(p) => match value {
                    Value::Number(n) if n.is_i64() || n.is_u64() => rec.push_scalar(p, n.to_string()),
                    Value::Null => {}
                    other => notes.push(format!("{key}: not an integer: {other}")),
                },
                Bool(p) => match value {
                    Value::Bool(b) => rec.push_scalar(p, b.to_string()),
                    Value::Null => {}
                    other => notes.push(format!("{key}: not a boolean: {other}")),
                },
                Link { property, kind, field } => {
                    for name in link_names(value, field) {
                        if let Some(target) = EntityRef::named(kind, name) {
                            rec.push_link(property, target);
                        }
                    }
                }
                PaperLink(p) => {
                    if let Some(target) = paper_ref(value) {
                        rec.push_link(p, target);
                    }
                }
                ReversePaperLink(p) => {
                    if let Some(source) = paper_ref(value) {
                        rec.push_reverse_link(p, source);
                    }
                }
                Authors => {
                    for name in link_names(value, None) {
                        let name = name.trim();
                        if !name.is_empty() {
                            rec.author_names.push(name.to_owned());
                        }
                    }
                }
            }
        }
    }
    Mapped { record, unknown_keys, notes }
}

/// A minimal record for an entity that is referenced but has no dump entry
/// of its own: type plus label, and for conferences a derived acronym.
pub fn stub_record(target: &EntityRef) -> EntityRecord {
    let mut rec = EntityRecord::new(target.kind, &target.slug);
    if let (Some(prop), Some(label)) = (target.kind.label_property(), &target.label) {
        rec.push_scalar(prop, label.clone());
    }
    if target.kind == EntityKind::Conference {
        if let Some(acronym) = conference_acronym(target.label.as_deref().unwrap_or(&target.slug)) {
            rec.push_scalar("acronym", acronym);
        }
    }
    rec
}

/// Leading alphabetic token of a venue label, uppercased
/// (`"ACL 2020"` → `ACL`, `"emnlp-2019-1"` → `EMNLP`).
pub fn conference_acronym(label: &str) -> Option<String> {
    let token: String = label.trim().chars().take_while(|c| c.is_alphabetic()).collect();
    (!token.is_empty()).then(|| token.to_uppercase())
}
