//! Random evaluation-table trees and a recursive record-count oracle.

use std::collections::HashSet;

use kgforge::ingest::{EntityRef, EvaluationRow, EvaluationTableNode};
use kgforge::ontology::EntityKind;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const MAX_DEPTH: usize = 25;

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    next_id: usize,
    budget: usize,
}

impl Gen<'_> {
    fn node(&mut self, depth: usize, spine: usize) -> EvaluationTableNode {
        self.next_id += 1;
        self.budget = self.budget.saturating_sub(1);
        let id = self.next_id;
        let task = EntityRef::named(EntityKind::Task, &format!("Task {}", id % 3)).unwrap();
        let dataset = EntityRef::named(EntityKind::Dataset, &format!("Data {id}")).unwrap();
        let n_rows = self.rng.gen_range(0..4);
        let rows = (0..n_rows)
            .map(|i| EvaluationRow {
                model: format!("model-{id}-{i}"),
                metrics: (0..self.rng.gen_range(0..3)).map(|m| (format!("M{m}"), format!("{}", m + i))).collect(),
                paper: None,
            })
            .collect();

        let mut children: Vec<EvaluationTableNode> = Vec::new();
        if depth < MAX_DEPTH {
            // one child continues the spine so the target depth is reached
            if depth < spine {
                children.push(self.node(depth + 1, spine));
            }
            let extra = if self.budget > 0 { self.rng.gen_range(0..3) } else { 0 };
            for _ in 0..extra {
                if self.budget == 0 {
                    break;
                }
                if !children.is_empty() && self.rng.gen_bool(0.1) {
                    // a finished sibling reused: same ids, so it is emitted once
                    let i = self.rng.gen_range(0..children.len());
                    children.push(children[i].clone());
                } else {
                    let sub_spine = self.rng.gen_range(depth + 1..=MAX_DEPTH).min(depth + 3);
                    children.push(self.node(depth + 1, sub_spine));
                }
            }
        }
        let table_id = format!("t{id}");
        EvaluationTableNode { table_id, task, dataset, rows, children }
    }
}

/// A tree of depth between 1 and [`MAX_DEPTH`] with up to ~120 distinct
/// tables and occasional repeated subtrees.
pub fn random_tree(rng: &mut ChaCha8Rng) -> EvaluationTableNode {
    let spine = rng.gen_range(1..=MAX_DEPTH);
    let mut gen = Gen { rng, next_id: 0, budget: 120 };
    gen.node(1, spine)
}

/// Expected counts, by plain recursion: a table contributes one record plus
/// one per row, unless its id was already visited earlier in pre-order.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Expected {
    pub records: usize,
    pub tables: usize,
    pub results: usize,
    pub max_depth: usize,
}

pub fn expected_counts(root: &EvaluationTableNode) -> Expected {
    fn visit(node: &EvaluationTableNode, depth: usize, seen: &mut HashSet<String>, acc: &mut Expected) {
        if !seen.insert(node.table_id.clone()) {
            return;
        }
        acc.tables += 1;
        acc.results += node.rows.len();
        acc.records += 1 + node.rows.len();
        acc.max_depth = acc.max_depth.max(depth);
        for child in &node.children {
            visit(child, depth + 1, seen, acc);
        }
    }
    let mut acc = Expected::default();
    visit(root, 1, &mut HashSet::new(), &mut acc);
    acc
}

pub fn depth(node: &EvaluationTableNode) -> usize {
    1 + node.children.iter().map(depth).max().unwrap_or(0)
}
