//! Homology groups and intersection forms of closed oriented 4-manifolds,
//! computed from the algebraic intersection data of a trisection diagram.
//!
//! The pipeline is entirely exact: curve classes live in `H₁(Σ;ℤ) ≅ ℤ^{2g}`
//! with a fixed symplectic basis `e₁…e_g, f₁…f_g`, every subgroup is handled
//! through integer normal forms, and signatures are computed over `ℚ`.

pub mod cli;
pub mod corpus;
pub mod diagram;
pub mod form;
pub mod generate;
pub mod homology;
pub mod linalg;
pub mod moves;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// JSON number when the value fits in `i64`, decimal string otherwise.
pub(crate) fn bigint_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.to_string()),
    }
}
