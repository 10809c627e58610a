use std::fmt;

use super::vocab::{RDF_LANG_STRING, XSD_STRING};
use super::RdfError;

/// An absolute IRI safe to write inside `<...>` without escaping.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if !has_scheme(&value) {
            return Err(RdfError::InvalidIri(value));
        }
        if value.chars().any(is_forbidden_iri_char) {
            return Err(RdfError::InvalidIri(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn has_scheme(value: &str) -> bool {
    let Some((scheme, _)) = value.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn is_forbidden_iri_char(c: char) -> bool {
    c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri(XSD_STRING.to_owned()),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, RdfError> {
        if datatype.as_str() == RDF_LANG_STRING {
            return Err(RdfError::InvalidLiteral(
                "rdf:langString requires a language tag".into(),
            ));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        })
    }

    pub fn lang(lexical: impl Into<String>, tag: &str) -> Result<Self, RdfError> {
        if !is_language_tag(tag) {
            return Err(RdfError::InvalidLiteral(format!("bad language tag {tag:?}")));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri(RDF_LANG_STRING.to_owned()),
            language: Some(tag.to_owned()),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

pub(crate) fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    !primary.is_empty()
        && primary.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_ntriples_literal(&self.lexical))?;
        match &self.language {
            Some(tag) => write!(f, "@{tag}"),
            None if self.datatype.as_str() == XSD_STRING => Ok(()),
            None => write!(f, "^^{}", self.datatype),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            Term::Iri(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

/// A statement. Subjects and predicates are always IRIs; no blank nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    /// The canonical N-Triples line, without the trailing newline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Escape a literal's lexical form for N-Triples: `\\`, `\"`, `\n`, `\r`, `\t`.
/// Everything else is written as raw UTF-8.
pub fn escape_ntriples_literal(s: &str) -> std::borrow::Cow<'_, str> {
    if !s.contains(['\\', '"', '\n', '\r', '\t']) {
        return std::borrow::Cow::Borrowed(s);
    }
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    std::borrow::Cow::Owned(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes() {
        assert_eq!(escape_ntriples_literal("say \"hi\""), "say \\\"hi\\\"");
        assert_eq!(escape_ntriples_literal("line1\nline2"), "line1\\nline2");
        assert_eq!(escape_ntriples_literal("plain"), "plain");
        assert_eq!(escape_ntriples_literal("a\\b\tc\r"), "a\\\\b\\tc\\r");
    }

    #[test]
    fn iri_validation() {
        assert!(Iri::new("https://example.org/a").is_ok());
        assert!(Iri::new("urn:x:1").is_ok());
        assert!(Iri::new("no-scheme").is_err());
        assert!(Iri::new("https://example.org/a b").is_err());
        assert!(Iri::new("https://example.org/<a>").is_err());
        assert!(Iri::new("https://example.org/\u{7}").is_err());
    }

    #[test]
    fn literal_forms() {
        let dt = Iri::new("http://www.w3.org/2001/XMLSchema#integer").unwrap();
        assert_eq!(Literal::string("x").to_string(), "\"x\"");
        assert_eq!(Literal::typed("5", dt).unwrap().to_string(), "\"5\"^^<http://www.w3.org/2001/XMLSchema#integer>");
        assert_eq!(Literal::lang("chat", "fr").unwrap().to_string(), "\"chat\"@fr");
        assert!(Literal::lang("x", "").is_err());
        assert!(Literal::typed("x", Iri::new(RDF_LANG_STRING).unwrap()).is_err());
    }
}
