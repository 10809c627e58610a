//! Brute-force scans of the raw dump JSON: which entities of each class a
//! dump directory should produce, and per-conference metric counts.
//! Identity is the slug key, the same rule the graph uses for IRIs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use kgforge::ontology::slug_key;
use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct Scan {
    /// Class local name → distinct keys.
    pub classes: BTreeMap<&'static str, BTreeSet<String>>,
    /// Papers that an evaluation row reports a result for.
    pub evaluated_papers: BTreeSet<String>,
    /// Paper key → conference label.
    pub conference_of: BTreeMap<String, String>,
    /// (paper key, metric name) per result row.
    pub paper_metrics: BTreeSet<(String, String)>,
}

fn load(dir: &Path, name: &str) -> Vec<Value> {
    match std::fs::read_to_string(dir.join(name)) {
        Ok(text) => match serde_json::from_str::<Value>(&text).unwrap() {
            Value::Array(items) => items,
            other => panic!("{name}: expected an array, got {other}"),
        },
        Err(_) => Vec::new(),
    }
}

fn text(v: Option<&Value>) -> Option<&str> {
    v.and_then(Value::as_str).map(str::trim).filter(|s| !s.is_empty())
}

fn last_segment(url: &str) -> &str {
    url.trim().trim_end_matches('/').rsplit('/').next().unwrap_or("")
}

fn without_scheme(url: &str) -> &str {
    let url = url.trim();
    url.split_once("://").map_or(url, |(_, rest)| rest).trim_end_matches('/')
}

/// Strings found in a field that holds a name, an object with a name field,
/// or a list of either.
fn names<'a>(v: Option<&'a Value>, field: Option<&str>) -> Vec<&'a str> {
    let one = |v: &'a Value| match v {
        Value::String(s) => Some(s.as_str()),
        Value::Object(o) => field.and_then(|f| o.get(f)).and_then(Value::as_str),
        _ => None,
    };
    match v {
        Some(Value::Array(items)) => items.iter().filter_map(one).collect(),
        Some(other) => one(other).into_iter().collect(),
        None => Vec::new(),
    }
}

fn paper_ref(v: Option<&Value>) -> Option<String> {
    let url = match v? {
        Value::String(s) => s.as_str(),
        Value::Object(o) => o.get("url")?.as_str()?,
        _ => return None,
    };
    Some(slug_key(last_segment(url)))
}

impl Scan {
    fn add(&mut self, class: &'static str, raw: &str) -> Option<String> {
        let key = slug_key(raw);
        if key.is_empty() {
            return None;
        }
        self.classes.entry(class).or_default().insert(key.clone());
        Some(key)
    }

    pub fn count(&self, class: &str) -> u64 {
        self.classes.get(class).map_or(0, |s| s.len() as u64)
    }
}

pub fn scan_dump_dir(dir: &Path) -> Scan {
    let mut scan = Scan::default();

    let mut listed_papers = HashSet::new();
    for p in load(dir, "papers-with-abstracts.json") {
        let Some(url) = text(p.get("paper_url")) else { continue };
        let Some(key) = scan.add("Paper", last_segment(url)) else { continue };
        listed_papers.insert(key.clone());
        for t in names(p.get("tasks"), None) {
            scan.add("Task", t);
        }
        for m in names(p.get("methods"), Some("name")) {
            scan.add("Method", m);
        }
        if let Some(conf) = names(p.get("conference"), None).first() {
            if scan.add("Conference", conf).is_some() {
                scan.conference_of.insert(key, conf.trim().to_owned());
            }
        }
    }

    // a repository only survives when one of its papers is in the papers dump
    for link in load(dir, "links-between-papers-and-code.json") {
        let Some(repo) = text(link.get("repo_url")) else { continue };
        let joined = paper_ref(link.get("paper_url")).is_some_and(|k| listed_papers.contains(&k));
        if joined {
            scan.add("Repository", without_scheme(repo));
        }
    }

    for m in load(dir, "methods.json") {
        let Some(name) = text(m.get("name")) else { continue };
        scan.add("Method", name);
        if let Some(paper) = paper_ref(m.get("paper")) {
            scan.add("Paper", &paper);
        }
        for area in names(m.get("collections"), Some("area")) {
            scan.add("Area", area);
        }
    }

    for d in load(dir, "datasets.json") {
        let Some(name) = text(d.get("name")) else { continue };
        scan.add("Dataset", name);
        if let Some(paper) = paper_ref(d.get("paper")) {
            scan.add("Paper", &paper);
        }
        for t in names(d.get("tasks"), Some("task")) {
            scan.add("Task", t);
        }
        for v in names(d.get("variants"), None) {
            scan.add("DatasetVariant", v);
        }
    }

    let mut seen_tables = HashSet::new();
    for task in load(dir, "evaluation-tables.json") {
        if let Some(obj) = task.as_object() {
            scan_task(obj, &mut scan, &mut seen_tables);
        }
    }
    scan
}

fn scan_task(task: &Map<String, Value>, scan: &mut Scan, seen_tables: &mut HashSet<String>) {
    let Some(name) = text(task.get("task")) else { return };
    let Some(task_key) = scan.add("Task", name) else { return };
    for area in names(task.get("categories"), None) {
        scan.add("Area", area);
    }
    for entry in task.get("datasets").and_then(Value::as_array).into_iter().flatten() {
        if let Some(entry) = entry.as_object() {
            scan_table(&task_key, entry, scan, seen_tables);
        }
    }
    for sub in task.get("subtasks").and_then(Value::as_array).into_iter().flatten() {
        if let Some(sub) = sub.as_object() {
            scan_task(sub, scan, seen_tables);
        }
    }
}

fn scan_table(task_key: &str, entry: &Map<String, Value>, scan: &mut Scan, seen_tables: &mut HashSet<String>) {
    let Some(dataset) = text(entry.get("dataset")) else { return };
    let Some(dataset_key) = scan.add("Dataset", dataset) else { return };
    let table = format!("{task_key}--{dataset_key}");
    if !seen_tables.insert(table.clone()) {
        return;
    }
    scan.add("EvaluationTable", &table);
    let rows = entry
        .get("sota")
        .and_then(|s| s.get("rows"))
        .and_then(Value::as_array)
        .map_or(&[][..], Vec::as_slice);
    for (i, row) in rows.iter().filter(|r| r.is_object()).enumerate() {
        scan.add("EvaluationResult", &format!("{table}--{}", i + 1));
        if let Some(model) = text(row.get("model_name")) {
            scan.add("Model", model);
        }
        let paper = text(row.get("paper_url")).map(|u| slug_key(last_segment(u))).filter(|k| !k.is_empty());
        if let Some(p) = &paper {
            scan.add("Paper", p);
            scan.evaluated_papers.insert(p.clone());
        }
        for (metric, value) in row.get("metrics").and_then(Value::as_object).into_iter().flatten() {
            let has_value = match value {
                Value::String(s) => !s.trim().is_empty(),
                Value::Number(_) => true,
                _ => false,
            };
            if !has_value || metric.trim().is_empty() {
                continue;
            }
            scan.add("Metric", metric.trim());
            if let Some(p) = &paper {
                scan.paper_metrics.insert((p.clone(), metric.trim().to_owned()));
            }
        }
    }
    for sub in entry.get("subdatasets").and_then(Value::as_array).into_iter().flatten() {
        if let Some(sub) = sub.as_object() {
            scan_table(task_key, sub, scan, seen_tables);
        }
    }
}

fn words(s: &str) -> String {
    s.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Metric name → number of papers of the conference reporting it. The
/// conference matches by its full label or by the leading alphabetic run of
/// the label.
pub fn metric_counts(scan: &Scan, conference: &str) -> (bool, BTreeMap<String, u64>) {
    let wanted = words(conference);
    let matches = |label: &str| {
        let acronym: String = label.chars().take_while(|c| c.is_alphabetic()).collect();
        words(label) == wanted || (!acronym.is_empty() && words(&acronym) == wanted)
    };
    let papers: HashSet<&String> =
        scan.conference_of.iter().filter(|(_, label)| matches(label)).map(|(p, _)| p).collect();
    let mut counts = BTreeMap::new();
    for (paper, metric) in &scan.paper_metrics {
        if papers.contains(paper) {
            *counts.entry(metric.clone()).or_default() += 1;
        }
    }
    (!papers.is_empty(), counts)
}
