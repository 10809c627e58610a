//! Evaluation-table trees and their flattening into table/result records.

use std::collections::HashSet;

use serde::Serialize;
use serde_json::{Map, Value};

use super::mapping::{paper_slug_from_url, EVAL_DATASET_KEYS, EVAL_ROW_KEYS, EVAL_SOTA_KEYS, EVAL_TASK_KEYS};
use super::record::{EntityRecord, EntityRef};
use super::IngestError;
use crate::ontology::{slug_key, EntityKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationRow {
    pub model: String,
    /// (metric name, reported value) in source order.
    pub metrics: Vec<(String, String)>,
    pub paper: Option<EntityRef>,
}

/// One leaderboard (task × dataset) with nested sub-leaderboards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationTableNode {
    pub table_id: String,
    pub task: EntityRef,
    pub dataset: EntityRef,
    pub rows: Vec<EvaluationRow>,
    pub children: Vec<EvaluationTableNode>,
}

impl EvaluationTableNode {
    /// Table ids are `task--dataset`, so the same leaderboard reached twice
    /// collapses to one entity.
    pub fn table_id_for(task: &EntityRef, dataset: &EntityRef) -> String {
        format!("{}--{}", task.slug, dataset.slug)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FlattenStats {
    pub tables: usize,
    pub results: usize,
    pub max_depth: usize,
}

/// Flattens trees depth-first while remembering table ids across calls, so
/// shared subtrees are emitted once per file.
#[derive(Debug, Default)]
pub struct Flattener {
    seen: HashSet<String>,
}

enum Step<'a> {
    Enter {
        node: &'a EvaluationTableNode,
        depth: usize,
        parent: Option<&'a str>,
    },
    Leave(&'a str),
}

impl Flattener {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append the records for `root` to `out`. On a cycle nothing is
    /// appended and the flattener state is unchanged.
    pub fn flatten(
        &mut self,
        root: &EvaluationTableNode,
        out: &mut Vec<EntityRecord>,
    ) -> Result<FlattenStats, IngestError> {
        let mut stats = FlattenStats::default();
        let mut records = Vec::new();
        let mut fresh: HashSet<&str> = HashSet::new();
        let mut path: HashSet<&str> = HashSet::new();
        let mut stack = vec![Step::Enter { node: root, depth: 1, parent: None }];

        while let Some(step) = stack.pop() {
            let (node, depth, parent) = match step {
                Step::Leave(id) => {
                    path.remove(id);
                    continue;
                }
                Step::Enter { node, depth, parent } => (node, depth, parent),
            };
            let id = node.table_id.as_str();
            if !path.insert(id) {
                return Err(IngestError::CycleDetected(node.table_id.clone()));
            }
            stack.push(Step::Leave(id));
            if self.seen.contains(id) || !fresh.insert(id) {
                continue;
            }

            stats.max_depth = stats.max_depth.max(depth);
            stats.tables += 1;
            records.push(table_record(node, parent));
            for (i, row) in node.rows.iter().enumerate() {
                records.push(result_record(node, i, row));
                stats.results += 1;
            }
            for child in node.children.iter().rev() {
                stack.push(Step::Enter { node: child, depth: depth + 1, parent: Some(id) });
            }
        }

        self.seen.extend(fresh.into_iter().map(str::to_owned));
        out.extend(records);
        Ok(stats)
    }
}

/// Flatten a single tree with a fresh deduplication state.
pub fn flatten_evaluation_tree(root: &EvaluationTableNode) -> Result<(Vec<EntityRecord>, FlattenStats), IngestError> {
    let mut out = Vec::new();
    let stats = Flattener::new().flatten(root, &mut out)?;
    Ok((out, stats))
}

fn table_record(node: &EvaluationTableNode, parent: Option<&str>) -> EntityRecord {
    let mut rec = EntityRecord::new(EntityKind::EvaluationTable, &node.table_id);
    rec.push_link("evaluatesTask", node.task.clone());
    rec.push_link("evaluatedOnDataset", node.dataset.clone());
    if let Some(parent) = parent {
        rec.push_link(
            "subTableOf",
            EntityRef {
                kind: EntityKind::EvaluationTable,
                slug: slug_key(parent),
                label: None,
            },
        );
    }
    rec
}

fn result_record(node: &EvaluationTableNode, index: usize, row: &EvaluationRow) -> EntityRecord {
    let mut rec = EntityRecord::new(
        EntityKind::EvaluationResult,
        &format!("{}--{}", node.table_id, index + 1),
    );
    rec.push_link(
        "inTable",
        EntityRef {
            kind: EntityKind::EvaluationTable,
            slug: slug_key(&node.table_id),
            label: None,
        },
    );
    if let Some(model) = EntityRef::named(EntityKind::Model, &row.model) {
        rec.push_link("usesModel", model);
    }
    for (metric, value) in &row.metrics {
        let Some(metric_ref) = EntityRef::named(EntityKind::Metric, metric) else { continue };
        rec.push_link("measuresMetric", metric_ref);
        rec.push_scalar("metricValue", format!("{}: {}", metric.trim(), value.trim()));
    }
    if let Some(paper) = &row.paper {
        rec.push_link("reportedIn", paper.clone());
    }
    rec
}

/// Records and trees produced from one top-level object of the
/// evaluation-tables dump.
#[derive(Debug, Default)]
pub struct TaskTreeParse {
    /// Task records for the object and all nested subtasks.
    pub tasks: Vec<EntityRecord>,
    /// One tree per (task, dataset) entry; subdatasets become children.
    pub roots: Vec<EvaluationTableNode>,
    pub unknown_keys: Vec<String>,
    pub notes: Vec<String>,
}

/// Parse a task object with its subtasks (walked with an explicit stack) and
/// dataset entries. `None` when the top-level object has no task name.
pub fn parse_task_object(obj: &Map<String, Value>) -> Option<TaskTreeParse> {
    let root_ref = obj.get("task").and_then(Value::as_str).and_then(|n| EntityRef::named(EntityKind::Task, n))?;
    let mut out = TaskTreeParse::default();
    let mut stack = vec![(obj, root_ref)];

    while let Some((obj, task_ref)) = stack.pop() {
        note_unknown(obj, EVAL_TASK_KEYS, "task", &mut out.unknown_keys);
        let mut task = EntityRecord::new(EntityKind::Task, &task_ref.slug);
        if let Some(name) = &task_ref.label {
            task.push_scalar("taskName", name.clone());
        }
        if let Some(desc) = obj.get("description").and_then(Value::as_str).map(str::trim).filter(|d| !d.is_empty()) {
            task.push_scalar("taskDescription", desc);
        }
        for area in array(obj, "categories").iter().filter_map(Value::as_str) {
            if let Some(area) = EntityRef::named(EntityKind::Area, area) {
                task.push_link("hasArea", area);
            }
        }
        let mut subtasks = Vec::new();
        for sub in array(obj, "subtasks") {
            let named = sub
                .as_object()
                .and_then(|o| Some((o, o.get("task")?.as_str()?)))
                .and_then(|(o, name)| Some((o, EntityRef::named(EntityKind::Task, name)?)));
            match named {
                Some((sub_obj, sub_ref)) => {
                    task.push_link("hasSubtask", sub_ref.clone());
                    subtasks.push((sub_obj, sub_ref));
                }
                None => out.notes.push(format!("subtask of {:?} without a name", task_ref.slug)),
            }
        }
        for entry in array(obj, "datasets") {
            match entry.as_object().and_then(|e| table_node(&task_ref, e, &mut out)) {
                Some(node) => out.roots.push(node),
                None => out.notes.push(format!("dataset entry of {:?} without a name", task_ref.slug)),
            }
        }
        out.tasks.push(task);
        stack.extend(subtasks.into_iter().rev());
    }
    Some(out)
}

fn array<'a>(obj: &'a Map<String, Value>, key: &str) -> &'a [Value] {
    obj.get(key).and_then(Value::as_array).map_or(&[], Vec::as_slice)
}

fn note_unknown(obj: &Map<String, Value>, known: &[&str], scope: &str, out: &mut Vec<String>) {
    out.extend(obj.keys().filter(|k| !known.contains(&k.as_str())).map(|k| format!("{scope}.{k}")));
}

fn table_node(task: &EntityRef, entry: &Map<String, Value>, out: &mut TaskTreeParse) -> Option<EvaluationTableNode> {
    note_unknown(entry, EVAL_DATASET_KEYS, "dataset", &mut out.unknown_keys);
    let dataset = entry.get("dataset").and_then(Value::as_str).and_then(|n| EntityRef::named(EntityKind::Dataset, n))?;
    let mut rows = Vec::new();
    if let Some(sota) = entry.get("sota").and_then(Value::as_object) {
        note_unknown(sota, EVAL_SOTA_KEYS, "sota", &mut out.unknown_keys);
        for row in array(sota, "rows").iter().filter_map(Value::as_object) {
            note_unknown(row, EVAL_ROW_KEYS, "row", &mut out.unknown_keys);
            rows.push(parse_row(row));
        }
    }
    let mut children = Vec::new();
    for sub in array(entry, "subdatasets") {
        match sub.as_object().and_then(|s| table_node(task, s, out)) {
            Some(child) => children.push(child),
            None => out.notes.push(format!("subdataset of {:?} without a name", dataset.slug)),
        }
    }
    Some(EvaluationTableNode {
        table_id: EvaluationTableNode::table_id_for(task, &dataset),
        task: task.clone(),
        dataset,
        rows,
        children,
    })
}

fn parse_row(row: &Map<String, Value>) -> EvaluationRow {
    let text = |key: &str| row.get(key).and_then(Value::as_str).map(str::trim).filter(|s| !s.is_empty());
    let mut metrics = Vec::new();
    if let Some(values) = row.get("metrics").and_then(Value::as_object) {
        for (name, value) in values {
            let value = match value {
                Value::String(s) if !s.trim().is_empty() => s.trim().to_owned(),
                Value::Number(n) => n.to_string(),
                _ => continue,
            };
            if !name.trim().is_empty() {
                metrics.push((name.trim().to_owned(), value));
            }
        }
    }
    let paper = text("paper_url")
        .and_then(paper_slug_from_url)
        .and_then(|slug| EntityRef::new(EntityKind::Paper, slug, text("paper_title")));
    EvaluationRow {
        model: text("model_name").unwrap_or_default().to_owned(),
        metrics,
        paper,
    }
}
