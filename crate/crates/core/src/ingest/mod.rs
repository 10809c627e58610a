//! Streaming readers for the upstream JSON dump files.

mod evaluation;
mod join;
pub mod mapping;
mod record;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::{DeserializeSeed, SeqAccess, Visitor};
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::ontology::Registry;

pub use evaluation::{
    flatten_evaluation_tree, parse_task_object, EvaluationRow, EvaluationTableNode, FlattenStats, Flattener,
    TaskTreeParse,
};
pub use join::{join_code_links, DanglingLink, JoinReport};
pub use record::{EntityRecord, EntityRef, RecordError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DumpFileKind {
    Papers,
    CodeLinks,
    EvaluationTables,
    Methods,
    Datasets,
}

impl DumpFileKind {
    pub const ALL: [DumpFileKind; 5] = [
        DumpFileKind::Papers,
        DumpFileKind::CodeLinks,
        DumpFileKind::EvaluationTables,
        DumpFileKind::Methods,
        DumpFileKind::Datasets,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            DumpFileKind::Papers => "papers-with-abstracts.json",
            DumpFileKind::CodeLinks => "links-between-papers-and-code.json",
            DumpFileKind::EvaluationTables => "evaluation-tables.json",
            DumpFileKind::Methods => "methods.json",
            DumpFileKind::Datasets => "datasets.json",
        }
    }

    /// Case-insensitive match on the upstream name, with optional `.gz`.
    pub fn from_file_name(name: &str) -> Result<Self, IngestError> {
        let lower = name.to_ascii_lowercase();
        let bare = lower.strip_suffix(".gz").unwrap_or(&lower);
        DumpFileKind::ALL
            .into_iter()
            .find(|k| k.file_name() == bare)
            .ok_or_else(|| IngestError::UnknownFile(name.to_owned()))
    }

    fn table(self) -> Option<&'static mapping::MappingTable> {
        match self {
            DumpFileKind::Papers => Some(&mapping::PAPERS),
            DumpFileKind::CodeLinks => Some(&mapping::CODE_LINKS),
            DumpFileKind::Methods => Some(&mapping::METHODS),
            DumpFileKind::Datasets => Some(&mapping::DATASETS),
            DumpFileKind::EvaluationTables => None,
        }
    }
}

impl fmt::Display for DumpFileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_name())
    }
}

impl Serialize for DumpFileKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.file_name())
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed JSON at byte {offset}: {message}")]
    MalformedJson { offset: u64, message: String },
    #[error("top level must be an array, found {0}")]
    WrongShape(&'static str),
    #[error("evaluation table {0:?} repeats along one path")]
    CycleDetected(String),
    #[error("not a recognised dump file: {0}")]
    UnknownFile(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "warning", rename_all = "kebab-case")]
pub enum WarningDetail {
    UnknownKey { key: String, occurrences: u64, first_index: usize },
    SkippedRecord { index: usize, reason: String },
    DroppedValue { index: usize, message: String },
    DanglingLink { index: usize, repository: String, paper: Option<String> },
}

/// One line of `ingest-report.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestWarning {
    pub file: DumpFileKind,
    #[serde(flatten)]
    pub detail: WarningDetail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadSummary {
    pub file: DumpFileKind,
    /// Array elements seen.
    pub objects: usize,
    /// Records handed to the sink.
    pub records: usize,
    pub skipped: usize,
    pub warnings: Vec<IngestWarning>,
}

impl ReadSummary {
    fn new(file: DumpFileKind) -> Self {
        ReadSummary { file, objects: 0, records: 0, skipped: 0, warnings: Vec::new() }
    }

    fn warn(&mut self, detail: WarningDetail) {
        self.warnings.push(IngestWarning { file: self.file, detail });
    }

    fn skip(&mut self, index: usize, reason: impl Into<String>) {
        self.skipped += 1;
        self.warn(WarningDetail::SkippedRecord { index, reason: reason.into() });
    }
}

/// Counts bytes handed to the JSON parser so errors can report an offset.
struct Counting<R> {
    inner: R,
    count: u64,
}

impl<R: Read> Read for Counting<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.count += n as u64;
        Ok(n)
    }
}

/// Wrap `reader` in a buffer, gunzipping when it starts with the gzip magic.
fn sniff<'a, R: Read + 'a>(reader: R) -> io::Result<Box<dyn BufRead + 'a>> {
    let mut buffered = BufReader::new(reader);
    if buffered.fill_buf()?.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::new(flate2::bufread::MultiGzDecoder::new(buffered))))
    } else {
        Ok(Box::new(buffered))
    }
}

/// Skip leading whitespace and check the first value is an array.
fn expect_array(reader: &mut dyn BufRead, consumed: &mut u64) -> Result<(), IngestError> {
    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            return Err(IngestError::MalformedJson { offset: *consumed, message: "empty input".into() });
        }
        let ws = buf.iter().take_while(|b| b.is_ascii_whitespace()).count();
        if ws < buf.len() {
            let found = match buf[ws] {
                b'[' => None,
                b'{' => Some("an object"),
                b'"' => Some("a string"),
                b't' | b'f' => Some("a boolean"),
                b'n' => Some("null"),
                b'-' | b'0'..=b'9' => Some("a number"),
                _ => {
                    return Err(IngestError::MalformedJson {
                        offset: *consumed + ws as u64,
                        message: "expected a JSON value".into(),
                    })
                }
            };
            reader.consume(ws);
            *consumed += ws as u64;
            return found.map_or(Ok(()), |f| Err(IngestError::WrongShape(f)));
        }
        reader.consume(ws);
        *consumed += ws as u64;
    }
}

struct Elements<'f>(&'f mut dyn FnMut(usize, Value));

impl<'de> DeserializeSeed<'de> for Elements<'_> {
    type Value = ();

    fn deserialize<D: serde::Deserializer<'de>>(self, de: D) -> Result<(), D::Error> {
        de.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for Elements<'_> {
    type Value = ();

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an array of objects")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<(), A::Error> {
        let mut index = 0;
        while let Some(value) = seq.next_element::<Value>()? {
            (self.0)(index, value);
            index += 1;
        }
        Ok(())
    }
}

/// Stream the top-level array of `reader` one element at a time, calling
/// `each(index, value)`. Memory use is bounded by the largest element.
pub fn for_each_element<R: Read>(reader: R, mut each: impl FnMut(usize, Value)) -> Result<(), IngestError> {
    let mut buffered = sniff(reader)?;
    let mut skipped_ws = 0;
    expect_array(&mut *buffered, &mut skipped_ws)?;
    let mut counting = Counting { inner: buffered, count: skipped_ws };
    let result = {
        let mut de = serde_json::Deserializer::from_reader(&mut counting);
        Elements(&mut each).deserialize(&mut de).and_then(|()| de.end())
    };
    result.map_err(|e| {
        if e.is_io() {
            IngestError::Io(e.into())
        } else {
            IngestError::MalformedJson { offset: counting.count.saturating_sub(1), message: e.to_string() }
        }
    })
}

/// Read one dump file, handing each valid record to `sink` in file order.
/// Invalid elements are skipped and counted; unknown keys are aggregated
/// into warnings.
pub fn read_dump<R: Read>(
    kind: DumpFileKind,
    reader: R,
    registry: &Registry,
    mut sink: impl FnMut(EntityRecord),
) -> Result<ReadSummary, IngestError> {
    let mut summary = ReadSummary::new(kind);
    let mut unknown: BTreeMap<String, (u64, usize)> = BTreeMap::new();
    let mut flattener = Flattener::new();

    for_each_element(reader, |index, value| {
        summary.objects += 1;
        let Value::Object(obj) = value else {
            summary.skip(index, "element is not an object");
            return;
        };
        let mut note_keys = |keys: Vec<String>| {
            for key in keys {
                unknown.entry(key).or_insert((0, index)).0 += 1;
            }
        };

        let records = match kind.table() {
            Some(table) => {
                let mapped = mapping::apply(table, &obj);
                note_keys(mapped.unknown_keys);
                for message in mapped.notes {
                    summary.warn(WarningDetail::DroppedValue { index, message });
                }
                match mapped.record {
                    Some(rec) => vec![rec],
                    None => {
                        let key = match table.key {
                            mapping::KeyRule::UrlSegment(f) | mapping::KeyRule::UrlBody(f) | mapping::KeyRule::Name(f) => f,
                        };
                        summary.skip(index, format!("missing or empty primary key {key:?}"));
                        return;
                    }
                }
            }
            None => {
                let Some(parsed) = parse_task_object(&obj) else {
                    summary.skip(index, "missing or empty primary key \"task\"");
                    return;
                };
                note_keys(parsed.unknown_keys);
                for message in parsed.notes {
                    summary.warn(WarningDetail::DroppedValue { index, message });
                }
                let mut records = parsed.tasks;
                for root in &parsed.roots {
                    if let Err(e) = flattener.flatten(root, &mut records) {
                        summary.skip(index, e.to_string());
                    }
                }
                records
            }
        };

        for rec in records {
            match rec.validate(registry) {
                Ok(()) => {
                    summary.records += 1;
                    sink(rec);
                }
                Err(e) => summary.skip(index, format!("{} {:?}: {e}", rec.kind, rec.slug)),
            }
        }
    })?;

    for (key, (occurrences, first_index)) in unknown {
        summary.warn(WarningDetail::UnknownKey { key, occurrences, first_index });
    }
    Ok(summary)
}

/// Read a dump file from disk into memory; the kind comes from the file name.
pub fn read_dump_file(path: &Path, registry: &Registry) -> Result<(Vec<EntityRecord>, ReadSummary), IngestError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let kind = DumpFileKind::from_file_name(name)?;
    let mut records = Vec::new();
    let summary = read_dump(kind, std::fs::File::open(path)?, registry, |r| records.push(r))?;
    Ok((records, summary))
}

/// Write warnings as JSON lines.
pub fn write_report<'a, W: Write>(
    warnings: impl IntoIterator<Item = &'a IngestWarning>,
    mut sink: W,
) -> io::Result<usize> {
    let mut n = 0;
    for w in warnings {
        serde_json::to_writer(&mut sink, w)?;
        sink.write_all(b"\n")?;
        n += 1;
    }
    sink.flush()?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::EntityKind;

    fn read(kind: DumpFileKind, text: &str) -> Result<(Vec<EntityRecord>, ReadSummary), IngestError> {
        let mut out = Vec::new();
        let summary = read_dump(kind, text.as_bytes(), &Registry::default(), |r| out.push(r))?;
        Ok((out, summary))
    }

    #[test]
    fn file_names() {
        assert_eq!(DumpFileKind::from_file_name("Papers-With-Abstracts.JSON.gz").unwrap(), DumpFileKind::Papers);
        assert_eq!(DumpFileKind::from_file_name("methods.json").unwrap(), DumpFileKind::Methods);
        assert!(matches!(DumpFileKind::from_file_name("papers.csv"), Err(IngestError::UnknownFile(_))));
    }

    #[test]
    fn empty_array() {
        let (records, summary) = read(DumpFileKind::Papers, " [ ] ").unwrap();
        assert!(records.is_empty());
        assert!(summary.warnings.is_empty());
    }

    #[test]
    fn missing_key_is_skipped_with_index() {
        let (records, summary) = read(DumpFileKind::Papers, r#"[{"title": "no url"}]"#).unwrap();
        assert!(records.is_empty());
        assert_eq!(summary.skipped, 1);
        assert!(matches!(&summary.warnings[0].detail, WarningDetail::SkippedRecord { index: 0, .. }));
    }

    #[test]
    fn wrong_shape_and_malformed() {
        assert!(matches!(read(DumpFileKind::Papers, r#" {"a": 1}"#), Err(IngestError::WrongShape("an object"))));
        match read(DumpFileKind::Papers, r#"[{"paper_url": "x/a"}, {"#) {
            Err(IngestError::MalformedJson { offset, .. }) => assert!(offset >= 22, "{offset}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read(DumpFileKind::Papers, ""), Err(IngestError::MalformedJson { offset: 0, .. })));
        assert!(matches!(read(DumpFileKind::Papers, "[] x"), Err(IngestError::MalformedJson { .. })));
    }

    #[test]
    fn unknown_keys_are_aggregated() {
        let (records, summary) = read(
            DumpFileKind::Methods,
            r#"[{"name": "A", "zzz": 1}, {"name": "B", "zzz": 2, "aaa": 0}]"#,
        )
        .unwrap();
        assert_eq!(records.len(), 2);
        let keys: Vec<_> = summary
            .warnings
            .iter()
            .map(|w| match &w.detail {
                WarningDetail::UnknownKey { key, occurrences, first_index } => (key.as_str(), *occurrences, *first_index),
                other => panic!("{other:?}"),
            })
            .collect();
        assert_eq!(keys, [("aaa", 1, 1), ("zzz", 2, 0)]);
    }

    #[test]
    fn gzip_is_sniffed() {
        let mut gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        gz.write_all(br#"[{"name": "Adam"}]"#).unwrap();
        let bytes = gz.finish().unwrap();
        let mut out = Vec::new();
        read_dump(DumpFileKind::Methods, bytes.as_slice(), &Registry::default(), |r| out.push(r)).unwrap();
        assert_eq!(out[0].slug, "adam");
    }

    #[test]
    fn evaluation_tables_flatten_per_file() {
        let text = r#"[
          {"task": "T", "datasets": [{"dataset": "D", "sota": {"rows": [
              {"model_name": "M", "metrics": {"Acc": "1"}}]}}]},
          {"task": "T", "datasets": [{"dataset": "D", "sota": {"rows": []}}]}
        ]"#;
        let (records, summary) = read(DumpFileKind::EvaluationTables, text).unwrap();
        let count = |k| records.iter().filter(|r| r.kind == k).count();
        assert_eq!(count(EntityKind::Task), 2);
        assert_eq!(count(EntityKind::EvaluationTable), 1);
        assert_eq!(count(EntityKind::EvaluationResult), 1);
        assert_eq!(summary.skipped, 0);
    }

    #[test]
    fn report_lines() {
        let w = IngestWarning {
            file: DumpFileKind::Papers,
            detail: WarningDetail::SkippedRecord { index: 3, reason: "r".into() },
        };
        let mut buf = Vec::new();
        write_report([&w], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"file\":\"papers-with-abstracts.json\",\"warning\":\"skipped-record\",\"index\":3,\"reason\":\"r\"}\n"
        );
    }
}
