//! Minimal N-Triples and Turtle readers.
//!
//! They accept what this crate writes (plus comments and `\u` escapes) and
//! nothing fancier: no blank nodes, collections, numeric shorthands or long
//! strings.

use std::collections::HashMap;
use std::io::BufRead;

use super::graph::GraphBuffer;
use super::term::{is_language_tag, Iri, Literal, Term, Triple};
use super::vocab::RDF_TYPE;
use super::RdfError;

/// Stream N-Triples from `reader`, handing each triple to `sink`.
pub fn read_ntriples<R: BufRead>(
    reader: R,
    mut sink: impl FnMut(Triple),
) -> Result<usize, RdfError> {
    let mut count = 0;
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let mut cursor = Cursor::new(&line, index + 1, None);
        cursor.skip_ws();
        if cursor.at_end() {
            continue;
        }
        let triple = cursor.triple_head()?;
        let object = cursor.object()?;
        cursor.skip_ws();
        cursor.expect('.')?;
        cursor.skip_ws();
        if !cursor.at_end() {
            return Err(cursor.error("trailing content after '.'"));
        }
        sink(Triple::new(triple.0, triple.1, object));
        count += 1;
    }
    Ok(count)
}

pub fn parse_ntriples(text: &str) -> Result<GraphBuffer, RdfError> {
    let mut graph = GraphBuffer::new();
    read_ntriples(text.as_bytes(), |t| {
        graph.insert(t);
    })?;
    Ok(graph)
}

pub fn parse_turtle(text: &str) -> Result<GraphBuffer, RdfError> {
    let mut graph = GraphBuffer::new();
    let mut prefixes = HashMap::new();
    let mut cursor = Cursor::new(text, 1, Some(&mut prefixes));
    loop {
        cursor.skip_ws();
        if cursor.at_end() {
            break;
        }
        if cursor.eat_keyword("@prefix") {
            cursor.prefix_directive()?;
            continue;
        }
        let subject = cursor.iri()?;
        loop {
            cursor.skip_ws();
            let predicate = if cursor.eat_keyword("a") {
                Iri::new(RDF_TYPE)?
            } else {
                cursor.iri()?
            };
            loop {
                cursor.skip_ws();
                let object = cursor.object()?;
                graph.insert(Triple::new(subject.clone(), predicate.clone(), object));
                cursor.skip_ws();
                if !cursor.eat(',') {
                    break;
                }
            }
            cursor.skip_ws();
            if cursor.eat(';') {
                cursor.skip_ws();
                if cursor.peek() == Some('.') {
                    break;
                }
                continue;
            }
            break;
        }
        cursor.skip_ws();
        cursor.expect('.')?;
    }
    Ok(graph)
}

struct Cursor<'a, 'p> {
    src: &'a str,
    pos: usize,
    line: usize,
    prefixes: Option<&'p mut HashMap<String, String>>,
}

impl<'a, 'p> Cursor<'a, 'p> {
    fn new(src: &'a str, line: usize, prefixes: Option<&'p mut HashMap<String, String>>) -> Self {
        Cursor {
            src,
            pos: 0,
            line,
            prefixes,
        }
    }

    fn error(&self, message: impl Into<String>) -> RdfError {
        RdfError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RdfError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    /// Consume `word` if it is followed by whitespace or a term opener.
    fn eat_keyword(&mut self, word: &str) -> bool {
        let rest = &self.src[self.pos..];
        if !rest.starts_with(word) {
            return false;
        }
        match rest[word.len()..].chars().next() {
            Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                self.pos += word.len();
                true
            }
            _ => false,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn triple_head(&mut self) -> Result<(Iri, Iri), RdfError> {
        let subject = self.iri()?;
        self.skip_ws();
        let predicate = self.iri()?;
        self.skip_ws();
        Ok((subject, predicate))
    }

    fn prefix_directive(&mut self) -> Result<(), RdfError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            self.bump();
        }
        let name = self.src[start..self.pos].to_owned();
        if !super::write::is_prefix_name(&name) {
            return Err(self.error(format!("bad prefix name {name:?}")));
        }
        self.expect(':')?;
        self.skip_ws();
        let ns = self.iri_ref()?;
        self.skip_ws();
        self.expect('.')?;
        if let Some(prefixes) = self.prefixes.as_deref_mut() {
            prefixes.insert(name, ns);
        }
        Ok(())
    }

    fn iri(&mut self) -> Result<Iri, RdfError> {
        if self.peek() == Some('<') {
            let value = self.iri_ref()?;
            return Iri::new(value).map_err(|e| self.error(e.to_string()));
        }
        if self.prefixes.is_some() {
            return self.prefixed_name();
        }
        Err(self.error("expected IRI"))
    }

    fn iri_ref(&mut self) -> Result<String, RdfError> {
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(value),
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) => value.push(c),
                None => return Err(self.error("unterminated IRI")),
            }
        }
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !(c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(self.error("expected IRI or prefixed name"));
            }
            self.bump();
        }
        let prefix = self.src[start..self.pos].to_owned();
        self.expect(':')?;
        let local_start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                self.bump();
            } else {
                break;
            }
        }
        let local = &self.src[local_start..self.pos];
        let ns = self
            .prefixes
            .as_deref()
            .and_then(|p| p.get(&prefix))
            .ok_or_else(|| self.error(format!("undeclared prefix {prefix:?}")))?;
        Iri::new(format!("{ns}{local}")).map_err(|e| self.error(e.to_string()))
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.peek() {
            Some('"') => self.literal().map(Term::Literal),
            Some('_') if self.src[self.pos..].starts_with("_:") => {
                Err(self.error("blank nodes are not supported"))
            }
            _ => self.iri().map(Term::Iri),
        }
    }

    fn literal(&mut self) -> Result<Literal, RdfError> {
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            self.pos -= 1;
                            self.unicode_escape()?
                        }
                        _ => return Err(self.error("bad string escape")),
                    };
                    lexical.push(c);
                }
                Some('\n') | Some('\r') => return Err(self.error("raw line break in literal")),
                Some(c) => lexical.push(c),
                None => return Err(self.error("unterminated literal")),
            }
        }
        if self.eat('@') {
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    self.bump();
                } else {
                    break;
                }
            }
            let tag = &self.src[start..self.pos];
            if !is_language_tag(tag) {
                return Err(self.error(format!("bad language tag {tag:?}")));
            }
            return Literal::lang(lexical, tag);
        }
        if self.src[self.pos..].starts_with("^^") {
            self.pos += 2;
            let datatype = self.iri()?;
            return Literal::typed(lexical, datatype).map_err(|e| self.error(e.to_string()));
        }
        Ok(Literal::string(lexical))
    }

    /// Reads `uXXXX` or `UXXXXXXXX` (the backslash is already consumed).
    fn unicode_escape(&mut self) -> Result<char, RdfError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("bad escape")),
        };
        let end = self.pos + width;
        let hex = self
            .src
            .get(self.pos..end)
            .ok_or_else(|| self.error("truncated \\u escape"))?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.error("bad hex in escape"))?;
        self.pos = end;
        char::from_u32(code).ok_or_else(|| self.error("escape is not a scalar value"))
    }
}
