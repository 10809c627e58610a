use std::io::Write;

use super::model::EmbeddingModel;
use super::{Dictionaries, EmbedError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportTarget {
    Entities,
    Relations,
}

fn header(model: &EmbeddingModel, seed: u64, sink: &mut dyn Write) -> std::io::Result<()> {
    writeln!(sink, "technique={}\tdimension={}\tseed={}", model.technique, model.dim, seed)
}

fn rows(model: &EmbeddingModel, dicts: &Dictionaries, target: ExportTarget, sink: &mut dyn Write) -> std::io::Result<usize> {
    let (names, count) = match target {
        ExportTarget::Entities => (&dicts.entities, model.num_entities()),
        ExportTarget::Relations => (&dicts.relations, model.num_relations()),
    };
    for (i, name) in names.iter().enumerate().take(count) {
        let row = match target {
            ExportTarget::Entities => model.entity(i),
            ExportTarget::Relations => model.relation(i),
        };
        sink.write_all(name.as_bytes())?;
        for x in row {
            write!(sink, "\t{x}")?;
        }
        sink.write_all(b"\n")?;
    }
    Ok(names.len().min(count))
}

/// One table as TSV: a header line, then the IRI and its components per
/// row (complex rows: real plane, then imaginary plane).
pub fn export_table(
    model: &EmbeddingModel,
    dicts: &Dictionaries,
    target: ExportTarget,
    seed: u64,
    sink: &mut dyn Write,
) -> Result<usize, EmbedError> {
    header(model, seed, sink)?;
    let n = rows(model, dicts, target, sink)?;
    sink.flush()?;
    Ok(n)
}

/// Entities then relations under one header; returns the data row count.
pub fn export_embeddings(
    model: &EmbeddingModel,
    dicts: &Dictionaries,
    seed: u64,
    sink: &mut dyn Write,
) -> Result<usize, EmbedError> {
    header(model, seed, sink)?;
    let n = rows(model, dicts, ExportTarget::Entities, sink)? + rows(model, dicts, ExportTarget::Relations, sink)?;
    sink.flush()?;
    Ok(n)
}
