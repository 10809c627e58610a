//! Random graphs whose literals are built to stress the serializers.

use kgforge::rdf::{GraphBuffer, Iri, Literal, Term, Triple};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const PIECES: &[&str] = &[
    "\"", "\\", "\n", "\r", "\t", "\"\"\"", "\\n", "'", "''", "<", ">", "@en", "^^", " . ", "#", "_:b0",
    "\u{1F600}", "\u{1D538}", "\u{10FFFF}", "\u{20000}", "é", "e\u{301}", "ß", "中文", "\u{0}", "\u{7}",
    "\u{7f}", "\u{85}", "\u{2028}", "\u{FEFF}", "plain", " ", "a", "1", "-", "\\u0041", "\\U0001F600",
];

const LANGS: &[&str] = &["en", "en-US", "de-CH-1996", "zh-Hant", "x-private", "EN", "sr-Latn-RS"];

const DATATYPES: &[&str] = &[
    "http://www.w3.org/2001/XMLSchema#integer",
    "http://www.w3.org/2001/XMLSchema#date",
    "http://www.w3.org/2001/XMLSchema#boolean",
    "https://example.org/dt/custom",
];

pub fn adversarial_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(0..8);
    (0..n).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

fn iri(rng: &mut ChaCha8Rng, kind: &str) -> Iri {
    let pool = ["https://example.org/", "http://ex.com/ns#", "urn:x:", "https://linkedpaperswithcode.com/paper/"];
    let tail: String = ["a", "%20", "é", "\u{1F600}", "-", "_", "~", "(", ")", "1"]
        .choose_multiple(rng, 3)
        .copied()
        .collect();
    Iri::new(format!("{}{kind}{}{tail}", pool.choose(rng).unwrap(), rng.gen_range(0..20))).unwrap()
}

pub fn random_object(rng: &mut ChaCha8Rng) -> Term {
    match rng.gen_range(0..4) {
        0 => Term::Iri(iri(rng, "o")),
        1 => Term::Literal(Literal::string(adversarial_text(rng))),
        2 => Term::Literal(Literal::lang(adversarial_text(rng), LANGS.choose(rng).unwrap()).unwrap()),
        _ => Term::Literal(
            Literal::typed(adversarial_text(rng), Iri::new(*DATATYPES.choose(rng).unwrap()).unwrap()).unwrap(),
        ),
    }
}

/// Up to 40 triples over a small pool of subjects and predicates, so
/// subjects repeat (exercising Turtle's `;` grouping).
pub fn random_graph(rng: &mut ChaCha8Rng) -> GraphBuffer {
    let mut graph = GraphBuffer::new();
    for _ in 0..rng.gen_range(0..40) {
        let s = iri(rng, "s");
        let p = iri(rng, "p");
        let o = random_object(rng);
        graph.insert(Triple::new(s, p, o));
    }
    graph
}
