//! Bundled example diagrams.

use crate::cli::file::{parse, DiagramFile};

/// `(name, file contents)` for every bundled example.
pub const CORPUS: [(&str, &str); 5] = [
    ("s4", include_str!("../corpus/s4.json")),
    ("cp2", include_str!("../corpus/cp2.json")),
    ("s1xs3", include_str!("../corpus/s1xs3.json")),
    ("s2xs2", include_str!("../corpus/s2xs2.json")),
    ("cp2_cp2bar", include_str!("../corpus/cp2_cp2bar.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    CORPUS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// A bundled example, parsed.
pub fn load(name: &str) -> Option<DiagramFile> {
    source(name).map(|s| parse(s).expect("bundled examples are well-formed"))
}
