//! JSON diagram files.
//!
//! ```json
//! { "version": 1, "name": "...", "notes": "...",
//!   "curves":   { "genus": g, "alpha": [[..2g..], ...], "beta": [...], "gamma": [...] } }
//! { "version": 1,
//!   "matrices": { "genus": g, "k": [k1, k2, k3], "alpha_beta": [[..]], "gamma_beta": [[..]], "alpha_gamma": [[..]] } }
//! ```
//!
//! Exactly one payload is allowed. Class vectors use the basis order
//! `e₁…e_g, f₁…f_g`; matrices are arrays of rows. Integers may be JSON
//! numbers or decimal strings (for values outside `i64`).

use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{CurveSystem, DiagramError, KVector, Label, MatrixDiagram, SymplecticSurface, TrisectionDiagram};
use crate::linalg::{IntVector, IntegerMatrix};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed diagram file: {0}")]
    Syntax(String),
    #[error("unsupported format version {0} (expected 1)")]
    Version(u32),
    #[error("{0}")]
    Payload(&'static str),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("curve system {label}: {reason}")]
    System { label: Label, reason: String },
}

impl From<DiagramError> for FileError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::Shape(s) => FileError::Shape(s),
            other => FileError::Shape(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Curves(TrisectionDiagram),
    Matrices(MatrixDiagram),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramFile {
    pub name: Option<String>,
    pub notes: Option<String>,
    pub payload: Payload,
}

/// Integer that reads from a JSON number or a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Num(BigInt);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(BigInt::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(BigInt::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                v.trim().parse().map(Num).map_err(|_| E::custom(format!("'{v}' is not an integer")))
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::bigint_json(&self.0).serialize(s)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curves: Option<RawCurves>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrices: Option<RawMatrices>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurves {
    genus: usize,
    alpha: Vec<Vec<Num>>,
    beta: Vec<Vec<Num>>,
    gamma: Vec<Vec<Num>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrices {
    genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<[usize; 3]>,
    alpha_beta: Vec<Vec<Num>>,
    gamma_beta: Vec<Vec<Num>>,
    alpha_gamma: Vec<Vec<Num>>,
}

fn vectors(raw: Vec<Vec<Num>>) -> Vec<IntVector> {
    raw.into_iter().map(|v| v.into_iter().map(|n| n.0).collect()).collect()
}

fn square(name: &str, raw: Vec<Vec<Num>>, g: usize) -> Result<IntegerMatrix, FileError> {
    if raw.len() != g || raw.iter().any(|r| r.len() != g) {
        return Err(FileError::Shape(format!("{name} must be a {g}x{g} array of rows")));
    }
    Ok(IntegerMatrix::from_rows(vectors(raw), g))
}

fn raw_rows(m: &IntegerMatrix) -> Vec<Vec<Num>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(Num).collect()).collect()
}

fn raw_columns(m: &IntegerMatrix) -> Vec<Vec<Num>> {
    m.columns().into_iter().map(|c| c.into_iter().map(Num).collect()).collect()
}

/// Parses and shape-checks a diagram file. Curve payloads must also have
/// each system of full rank and isotropic.
pub fn parse(text: &str) -> Result<DiagramFile, FileError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| FileError::Syntax(e.to_string()))?;
    if raw.version != FORMAT_VERSION {
        return Err(FileError::Version(raw.version));
    }
    let payload = match (raw.curves, raw.matrices) {
        (Some(c), None) => {
            let g = c.genus;
            let mut systems = Vec::new();
            for (label, list) in [(Label::Alpha, c.alpha), (Label::Beta, c.beta), (Label::Gamma, c.gamma)] {
                if list.len() != g || list.iter().any(|v| v.len() != 2 * g) {
                    return Err(FileError::Shape(format!(
                        "{}: expected {g} class vectors of length {}",
                        label.ascii(),
                        2 * g
                    )));
                }
                let sys = CurveSystem::from_classes(label, &vectors(list), g)?;
                check_system(&sys)?;
                systems.push(sys.classes().clone());
            }
            let [a, b, c]: [IntegerMatrix; 3] = systems.try_into().unwrap();
            Payload::Curves(TrisectionDiagram::new(g, a, b, c)?)
        }
        (None, Some(m)) => {
            let g = m.genus;
            let ab = square("alpha_beta", m.alpha_beta, g)?;
            let gb = square("gamma_beta", m.gamma_beta, g)?;
            let ag = square("alpha_gamma", m.alpha_gamma, g)?;
            Payload::Matrices(MatrixDiagram::new(g, m.k.map(KVector), ab, gb, ag)?)
        }
        (None, None) => return Err(FileError::Payload("file has neither a 'curves' nor a 'matrices' payload")),
        (Some(_), Some(_)) => return Err(FileError::Payload("file has both 'curves' and 'matrices' payloads")),
    };
    Ok(DiagramFile { name: raw.name, notes: raw.notes, payload })
}

fn check_system(sys: &CurveSystem) -> Result<(), FileError> {
    let check = sys.check(&SymplecticSurface::new(sys.genus()));
    if !check.rank_ok {
        return Err(FileError::System {
            label: sys.label(),
            reason: format!("classes have rank {} < {}; some class is dependent on the others", check.rank, sys.genus()),
        });
    }
    if let Some(&(i, j)) = check.non_isotropic_pairs.first() {
        let s = SymplecticSurface::new(sys.genus());
        let p = s.pair(&sys.class(i - 1), &sys.class(j - 1));
        return Err(FileError::System {
            label: sys.label(),
            reason: format!("not isotropic: <{l}{i}, {l}{j}> = {p}", l = sys.label()),
        });
    }
    Ok(())
}

pub fn serialize(file: &DiagramFile) -> String {
    let (curves, matrices) = match &file.payload {
        Payload::Curves(d) => (
            Some(RawCurves {
                genus: d.genus(),
                alpha: raw_columns(d.alpha().classes()),
                beta: raw_columns(d.beta().classes()),
                gamma: raw_columns(d.gamma().classes()),
            }),
            None,
        ),
        Payload::Matrices(m) => (
            None,
            Some(RawMatrices {
                genus: m.genus,
                k: m.k.map(|k| k.0),
                alpha_beta: raw_rows(&m.alpha_beta),
                gamma_beta: raw_rows(&m.gamma_beta),
                alpha_gamma: raw_rows(&m.alpha_gamma),
            }),
        ),
    };
    let raw = RawFile { version: FORMAT_VERSION, name: file.name.clone(), notes: file.notes.clone(), curves, matrices };
    let mut s = serde_json::to_string_pretty(&raw).expect("diagram files always serialize");
    s.push('\n');
    s
}
