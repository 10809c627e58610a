//! Text cleanup shared by graph emission and the linker: markdown removal,
//! normalization for matching, title variants and fuzzy name similarity.

use std::borrow::Cow;
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("title is empty after normalization")]
    EmptyTitle,
}

/// A string reduced to its matching form: NFC, lowercase, punctuation
/// removed, whitespace collapsed and trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalizedString {
    value: String,
    source: String,
}

impl NormalizedString {
    pub fn as_str(&self) -> &str {
        &self.value
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn into_string(self) -> String {
        self.value
    }
}

impl fmt::Display for NormalizedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

impl AsRef<str> for NormalizedString {
    fn as_ref(&self) -> &str {
        &self.value
    }
}

fn lowercase_nfc(text: &str) -> String {
    // upper-then-lower gives a stable case fold for characters such as ß
    let composed: String = text.nfc().collect();
    let folded = composed.to_uppercase().to_lowercase();
    folded.nfc().collect()
}

/// Normalize a string for comparison. Diacritics are preserved.
pub fn normalize(text: &str) -> NormalizedString {
    let folded = lowercase_nfc(text);
    let chars: Vec<char> = folded.chars().collect();
    let mut out = String::with_capacity(folded.len());
    let mut pending_space = false;

    let is_word = |c: char| c.is_alphanumeric() || is_combining_mark(c);

    for (i, &c) in chars.iter().enumerate() {
        let keep = if is_word(c) {
            true
        } else if c == '-' {
            let prev = i.checked_sub(1).map(|j| chars[j]);
            let next = chars.get(i + 1).copied();
            matches!((prev, next), (Some(p), Some(n)) if is_word(p) && is_word(n))
        } else {
            false
        };

        if keep {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else if c == '\'' || c == '\u{2019}' {
            // apostrophes join: "o'brien" matches "obrien"
        } else {
            pending_space = true;
        }
    }

    NormalizedString {
        value: out,
        source: text.to_owned(),
    }
}

/// Like [`normalize`], but additionally strips diacritics ("müller" → "muller").
pub fn normalize_folded(text: &str) -> NormalizedString {
    let stripped: String = normalize(text).value.nfd().filter(|c| !is_combining_mark(*c)).collect();
    // removing marks can leave stray separators behind, so tidy up again
    NormalizedString {
        value: normalize(&stripped).value,
        source: text.to_owned(),
    }
}

/// Ordered, deduplicated search variants of a paper title:
/// full title, title without subtitle, title without bracketed spans, both.
pub fn title_variants(title: &str) -> Result<Vec<String>, TextError> {
    let full = normalize(title);
    if full.is_empty() {
        return Err(TextError::EmptyTitle);
    }

    let without_subtitle = match title.split_once(':') {
        Some((head, _)) => head,
        None => title,
    };
    let candidates = [
        full.into_string(),
        normalize(without_subtitle).into_string(),
        normalize(&remove_bracketed(title)).into_string(),
        normalize(&remove_bracketed(without_subtitle)).into_string(),
    ];

    let mut variants: Vec<String> = Vec::with_capacity(4);
    for candidate in candidates {
        if !candidate.is_empty() && !variants.contains(&candidate) {
            variants.push(candidate);
        }
    }
    Ok(variants)
}

fn remove_bracketed(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut stack: Vec<char> = Vec::new();
    for c in text.chars() {
        match c {
            '(' | '[' | '{' => stack.push(c),
            ')' | ']' | '}' if !stack.is_empty() => {
                stack.pop();
                out.push(' ');
            }
            _ if stack.is_empty() => out.push(c),
            _ => {}
        }
    }
    // an unclosed bracket drops the remainder, like a dangling span
    out
}

/// Normalized Levenshtein similarity: `1 - distance / max(len)`, in `[0, 1]`.
pub fn fuzzy_similarity(a: &str, b: &str) -> f64 {
    strsim::normalized_levenshtein(a, b)
}

// Markdown ------------------------------------------------------------------

static IMAGE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"!\[([^\[\]]*)\]\([^()]*\)").unwrap());
static LINK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[([^\[\]]*)\]\([^()]*\)").unwrap());
static DOUBLE_CODE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"``(.+?)``").unwrap());
static CODE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"`([^`]*)`").unwrap());
static STRONG_STAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\*\*(\S(?:.*?\S)?)\*\*").unwrap());
static STRONG_UNDERSCORE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(^|[^\p{L}\p{N}_])__(\S(?:.*?\S)?)__($|[^\p{L}\p{N}_])").unwrap());
static EM_STAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\*([^\s*](?:[^*]*?[^\s*])?)\*").unwrap());
static EM_UNDERSCORE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(^|[^\p{L}\p{N}_])_([^\s_](?:[^_]*?[^\s_])?)_($|[^\p{L}\p{N}_])").unwrap()
});
static STRIKE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"~~(.+?)~~").unwrap());
static HEADING: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^ {0,3}#{1,6}(?:[ \t]+|$)").unwrap());
static QUOTE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^ {0,3}>[ \t]?").unwrap());
static BULLET: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^([ \t]*)[-*+][ \t]+").unwrap());
static FENCE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^ {0,3}(```|~~~)").unwrap());

/// Convert the markdown subset used in dump descriptions to plain text.
///
/// Every rule only deletes markup, so the rewrite is repeated until nothing
/// changes; the result is therefore a fixed point and the function is
/// idempotent.
pub fn strip_markdown(text: &str) -> String {
    let mut current = text.to_owned();
    loop {
        let next = strip_pass(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn strip_pass(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut first = true;
    for line in text.split('\n') {
        if FENCE.is_match(line) {
            // fence lines vanish; their content lines fall through unchanged
            continue;
        }
        if !first {
            out.push('\n');
        }
        first = false;
        out.push_str(&strip_line(line));
    }
    out
}

fn strip_line(line: &str) -> String {
    let mut line: Cow<'_, str> = Cow::Borrowed(line);
    for rule in [&*QUOTE, &*HEADING] {
        if let Cow::Owned(s) = rule.replace(&line, "") {
            line = Cow::Owned(s);
        }
    }
    if let Cow::Owned(s) = BULLET.replace(&line, "$1") {
        line = Cow::Owned(s);
    }

    let inline: [(&Regex, &str); 9] = [
        (&IMAGE, "$1"),
        (&LINK, "$1"),
        (&DOUBLE_CODE, "$1"),
        (&CODE, "$1"),
        (&STRONG_STAR, "$1"),
        (&STRONG_UNDERSCORE, "$1$2$3"),
        (&EM_STAR, "$1"),
        (&EM_UNDERSCORE, "$1$2$3"),
        (&STRIKE, "$1"),
    ];
    for (rule, replacement) in inline {
        if let Cow::Owned(s) = rule.replace_all(&line, replacement) {
            line = Cow::Owned(s);
        }
    }
    line.into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_emphasis_and_links() {
        assert_eq!(strip_markdown("**Deep** _learning_ rocks"), "Deep learning rocks");
        assert_eq!(
            strip_markdown("See [BERT](https://x.y) for details"),
            "See BERT for details"
        );
        assert_eq!(strip_markdown("![a diagram](img.png)"), "a diagram");
        assert_eq!(strip_markdown("use `pip install` now"), "use pip install now");
        assert_eq!(strip_markdown("~~old~~ new"), "old new");
    }

    #[test]
    fn strips_block_markers() {
        let md = "# Title\n\n> quoted *text*\n- item one\n* item two\n+ item three";
        assert_eq!(
            strip_markdown(md),
            "Title\n\nquoted text\nitem one\nitem two\nitem three"
        );
    }

    #[test]
    fn fenced_code_keeps_content() {
        let md = "before\n```python\nx = f(a, b)\n```\nafter";
        assert_eq!(strip_markdown(md), "before\nx = f(a, b)\nafter");
    }

    #[test]
    fn plain_text_is_untouched() {
        let abstract_text = "We propose a new model. It uses 3 layers (and dropout) at 0.5 rate.";
        assert_eq!(strip_markdown(abstract_text), abstract_text);
    }

    #[test]
    fn snake_case_and_arithmetic_survive() {
        assert_eq!(strip_markdown("the snake_case_name"), "the snake_case_name");
        assert_eq!(strip_markdown("2 * 3 * 4"), "2 * 3 * 4");
    }

    #[test]
    fn nested_link_label() {
        assert_eq!(strip_markdown("[[x](y)](z)"), "x");
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Attention Is All You Need!").as_str(), "attention is all you need");
        assert_eq!(normalize("  ACL   2020 ").as_str(), "acl 2020");
        assert_eq!(normalize("Müller").as_str(), "müller");
        assert_eq!(normalize("Mu\u{0308}ller").as_str(), "müller");
        assert_eq!(normalize("Pre-training -- now").as_str(), "pre-training now");
        assert_eq!(normalize("O'Brien").as_str(), "obrien");
    }

    #[test]
    fn folding_removes_diacritics() {
        assert_eq!(normalize_folded("Müller").as_str(), "muller");
    }

    #[test]
    fn title_variant_examples() {
        assert_eq!(
            title_variants("BERT: Pre-training of Deep Bidirectional Transformers").unwrap(),
            vec!["bert pre-training of deep bidirectional transformers", "bert"]
        );
        assert_eq!(title_variants("Plain Title").unwrap(), vec!["plain title"]);
        assert_eq!(title_variants(""), Err(TextError::EmptyTitle));
        assert_eq!(
            title_variants("XLNet (v2): Generalized Autoregressive Pretraining [extended]").unwrap(),
            vec![
                "xlnet v2 generalized autoregressive pretraining extended",
                "xlnet v2",
                "xlnet generalized autoregressive pretraining",
                "xlnet",
            ]
        );
    }

    #[test]
    fn similarity_examples() {
        assert!((fuzzy_similarity("jon smith", "john smith") - 0.9).abs() < 1e-12);
        assert_eq!(fuzzy_similarity("acl", "acl"), 1.0);
        assert_eq!(fuzzy_similarity("abc", "xyz"), 0.0);
        assert_eq!(fuzzy_similarity("", ""), 1.0);
    }
}
