//! Triple model, deduplicating graph buffer and canonical N-Triples/Turtle
//! serialization.

mod emit;
mod graph;
mod parse;
mod term;
pub mod vocab;
mod write;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

pub use emit::emit_entity;
pub use graph::GraphBuffer;
pub use parse::{parse_ntriples, parse_turtle, read_ntriples};
pub use term::{escape_ntriples_literal, Iri, Literal, Term, Triple};
pub use write::{serialize, PrefixMap, RdfFormat};

#[derive(Debug, Error)]
pub enum RdfError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid literal: {0}")]
    InvalidLiteral(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("write failed: {0}")]
    SinkWrite(#[from] io::Error),
}

/// Open a file for reading, transparently gunzipping when it starts with the
/// gzip magic bytes.
pub fn open_input(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    let mut reader = BufReader::new(File::open(path)?);
    let gzipped = reader.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    if gzipped {
        Ok(Box::new(BufReader::new(flate2::bufread::MultiGzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Writer for `path`; gzip-compressed when the name ends in `.gz`.
pub struct OutputFile {
    inner: OutputInner,
}

enum OutputInner {
    Plain(BufWriter<File>),
    Gzip(flate2::write::GzEncoder<BufWriter<File>>),
}

impl OutputFile {
    pub fn create(path: &Path) -> io::Result<Self> {
        let file = BufWriter::new(File::create(path)?);
        let gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
        let inner = if gz {
            // fixed header (no mtime, no name) keeps compressed output reproducible
            let encoder = flate2::GzBuilder::new().write(file, flate2::Compression::default());
            OutputInner::Gzip(encoder)
        } else {
            OutputInner::Plain(file)
        };
        Ok(OutputFile { inner })
    }

    /// Flush and close; gzip trailers are written here.
    pub fn finish(self) -> io::Result<()> {
        match self.inner {
            OutputInner::Plain(mut w) => w.flush(),
            OutputInner::Gzip(enc) => enc.finish()?.flush(),
        }
    }
}

impl Write for OutputFile {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match &mut self.inner {
            OutputInner::Plain(w) => w.write(buf),
            OutputInner::Gzip(w) => w.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match &mut self.inner {
            OutputInner::Plain(w) => w.flush(),
            OutputInner::Gzip(w) => w.flush(),
        }
    }
}

/// Serialize `graph` to `path`, choosing the format from the extension.
pub fn write_graph_file(graph: &GraphBuffer, path: &Path, prefixes: &PrefixMap) -> Result<usize, RdfError> {
    let mut out = OutputFile::create(path)?;
    let n = serialize(graph, RdfFormat::from_path(path), prefixes, &mut out)?;
    out.finish()?;
    Ok(n)
}

/// Load an `.nt`/`.ttl` file (optionally gzipped) into a buffer.
pub fn read_graph_file(path: &Path) -> Result<GraphBuffer, RdfError> {
    let mut input = open_input(path)?;
    match RdfFormat::from_path(path) {
        RdfFormat::NTriples => {
            let mut graph = GraphBuffer::new();
            read_ntriples(input, |t| {
                graph.insert(t);
            })?;
            Ok(graph)
        }
        RdfFormat::Turtle => {
            let mut text = String::new();
            input.read_to_string(&mut text)?;
            parse_turtle(&text)
        }
    }
}
