use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use super::PipelineError;
use crate::ingest::mapping::stub_record;
use crate::ingest::{
    join_code_links, read_dump, DumpFileKind, EntityRecord, IngestWarning, JoinReport, ReadSummary, WarningDetail,
};
use crate::ontology::{EntityKind, Registry, UriPolicy};
use crate::rdf::{emit_entity, open_input, GraphBuffer};

/// Dump files found in an input directory, keyed by kind.
pub fn discover_dumps(dir: &Path) -> Result<BTreeMap<DumpFileKind, PathBuf>, PipelineError> {
    let mut found = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        let Ok(kind) = DumpFileKind::from_file_name(name) else {
            log::debug!("ignoring {}", path.display());
            continue;
        };
        if let Some(previous) = found.insert(kind, path.clone()) {
            return Err(PipelineError::DuplicateDump { first: previous, second: path });
        }
    }
    Ok(found)
}

#[derive(Debug, Serialize)]
pub struct BuildReport {
    pub files: Vec<ReadSummary>,
    pub join: JoinReport,
    /// Referenced entities with no dump entry, emitted as type + label only.
    pub stubs: BTreeMap<String, usize>,
    pub records: usize,
    pub triples: usize,
}

impl BuildReport {
    /// All warnings in file order, join warnings last.
    pub fn warnings(&self) -> Vec<IngestWarning> {
        let mut out: Vec<IngestWarning> = self.files.iter().flat_map(|f| f.warnings.iter().cloned()).collect();
        out.extend(self.join.dangling.iter().map(|d| IngestWarning {
            file: DumpFileKind::CodeLinks,
            detail: WarningDetail::DanglingLink {
                index: d.index,
                repository: d.repository.clone(),
                paper: d.paper.clone(),
            },
        }));
        out
    }
}

pub struct BuildOutput {
    pub graph: GraphBuffer,
    pub report: BuildReport,
    /// Latest paper publication date, used as the dump date in VoID.
    pub latest_paper_date: Option<NaiveDate>,
}

/// Ingest every dump in `dir` (files read in parallel), join code links,
/// add stubs for referenced entities and emit the data graph.
pub fn build_graph(dir: &Path, registry: &Registry, policy: &UriPolicy) -> Result<BuildOutput, PipelineError> {
    let dumps = discover_dumps(dir)?;
    if dumps.is_empty() {
        return Err(PipelineError::NoDumps(dir.to_owned()));
    }

    let read: Vec<(DumpFileKind, Vec<EntityRecord>, ReadSummary)> = dumps
        .par_iter()
        .map(|(&kind, path)| {
            let mut records = Vec::new();
            let input = open_input(path)?;
            let summary = read_dump(kind, input, registry, |r| records.push(r))
                .map_err(|source| PipelineError::Ingest { path: path.clone(), source })?;
            log::info!("read {}: {} records, {} skipped", path.display(), summary.records, summary.skipped);
            Ok((kind, records, summary))
        })
        .collect::<Result<_, PipelineError>>()?;

    let mut by_kind: BTreeMap<DumpFileKind, Vec<EntityRecord>> = BTreeMap::new();
    let mut files = Vec::new();
    for (kind, records, summary) in read {
        by_kind.insert(kind, records);
        files.push(summary);
    }

    let mut papers = by_kind.remove(&DumpFileKind::Papers).unwrap_or_default();
    let links = by_kind.remove(&DumpFileKind::CodeLinks).unwrap_or_default();
    let (repositories, join) = join_code_links(&mut papers, links);

    let latest_paper_date = papers
        .iter()
        .filter_map(|p| p.scalar("publicationDate"))
        .filter_map(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").ok())
        .max();

    let mut records = papers;
    records.extend(repositories);
    for kind in [DumpFileKind::Methods, DumpFileKind::Datasets, DumpFileKind::EvaluationTables] {
        records.extend(by_kind.remove(&kind).unwrap_or_default());
    }
    let stubs = add_stubs(&mut records);

    let emitted: Vec<_> = records
        .par_iter()
        .map(|r| emit_entity(r, registry, policy))
        .collect::<Result<_, _>>()?;
    let mut graph = GraphBuffer::new();
    for triples in emitted {
        graph.extend(triples);
    }

    let report = BuildReport {
        files,
        join,
        stubs,
        records: records.len(),
        triples: graph.len(),
    };
    Ok(BuildOutput { graph, report, latest_paper_date })
}

/// Append a stub for every link target without a record of its own. The
/// first label seen for a target wins. Returns stub counts per class.
fn add_stubs(records: &mut Vec<EntityRecord>) -> BTreeMap<String, usize> {
    let mut known: HashSet<(EntityKind, String)> = records.iter().map(|r| (r.kind, r.slug.clone())).collect();
    let mut stubs = Vec::new();
    for rec in records.iter() {
        for target in rec.links.values().flatten() {
            if known.insert((target.kind, target.slug.clone())) {
                stubs.push(stub_record(target));
            }
        }
    }
    let mut counts = BTreeMap::new();
    for stub in &stubs {
        *counts.entry(stub.kind.local_name().to_owned()).or_default() += 1;
    }
    records.extend(stubs);
    counts
}
