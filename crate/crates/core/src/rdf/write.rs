use std::collections::BTreeMap;
use std::io::Write;

use super::graph::GraphBuffer;
use super::term::{escape_ntriples_literal, Iri, Literal, Term};
use super::vocab::XSD_STRING;
use super::RdfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdfFormat {
    NTriples,
    Turtle,
}

impl RdfFormat {
    /// Guess the format from a file name (`.ttl`, `.ttl.gz` → Turtle).
    pub fn from_path(path: &std::path::Path) -> Self {
        let name = path.to_string_lossy().to_ascii_lowercase();
        let name = name.strip_suffix(".gz").unwrap_or(&name);
        if name.ends_with(".ttl") {
            RdfFormat::Turtle
        } else {
            RdfFormat::NTriples
        }
    }
}

/// Prefix name → namespace IRI, used when writing Turtle.
pub type PrefixMap = BTreeMap<String, String>;

/// Write `graph` in canonical sorted order. Returns the number of triples.
pub fn serialize<W: Write>(
    graph: &GraphBuffer,
    format: RdfFormat,
    prefixes: &PrefixMap,
    mut sink: W,
) -> Result<usize, RdfError> {
    let sorted = graph.sorted();
    match format {
        RdfFormat::NTriples => {
            for (line, _) in &sorted {
                sink.write_all(line.as_bytes())?;
                sink.write_all(b"\n")?;
            }
        }
        RdfFormat::Turtle => {
            let writer = TurtleWriter { prefixes };
            for (name, ns) in prefixes {
                writeln!(sink, "@prefix {name}: <{ns}> .")?;
            }
            let mut previous: Option<&Iri> = None;
            for (_, triple) in &sorted {
                let predicate = writer.iri(&triple.predicate);
                let object = writer.term(&triple.object);
                match previous {
                    Some(subject) if *subject == triple.subject => {
                        write!(sink, " ;\n    {predicate} {object}")?;
                    }
                    Some(_) => {
                        let subject = writer.iri(&triple.subject);
                        write!(sink, " .\n\n{subject} {predicate} {object}")?;
                    }
                    None => {
                        let subject = writer.iri(&triple.subject);
                        if !prefixes.is_empty() {
                            sink.write_all(b"\n")?;
                        }
                        write!(sink, "{subject} {predicate} {object}")?;
                    }
                }
                previous = Some(&triple.subject);
            }
            if previous.is_some() {
                sink.write_all(b" .\n")?;
            }
        }
    }
    sink.flush()?;
    Ok(sorted.len())
}

struct TurtleWriter<'a> {
    prefixes: &'a PrefixMap,
}

impl TurtleWriter<'_> {
    fn iri(&self, iri: &Iri) -> String {
        let value = iri.as_str();
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| value.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len());
        if let Some((name, ns)) = best {
            let local = &value[ns.len()..];
            if is_simple_local(local) {
                return format!("{name}:{local}");
            }
        }
        iri.to_string()
    }

    fn literal(&self, lit: &Literal) -> String {
        let body = escape_ntriples_literal(lit.lexical());
        match lit.language() {
            Some(tag) => format!("\"{body}\"@{tag}"),
            None if lit.datatype().as_str() == XSD_STRING => format!("\"{body}\""),
            None => format!("\"{body}\"^^{}", self.iri(lit.datatype())),
        }
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::Literal(lit) => self.literal(lit),
        }
    }
}

/// Local names we are willing to abbreviate: no escapes, no dots.
pub(crate) fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub(crate) fn is_prefix_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}
