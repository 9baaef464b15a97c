//! Exact linear algebra over the integers.
//!
//! Convention used throughout the crate: subgroups of `ℤⁿ` are generated by
//! matrix *columns*, and homology classes are column vectors.

mod matrix;
mod normal_form;
mod subgroup;

use num_bigint::BigInt;
use thiserror::Error;

pub use matrix::{dot, ints, IntVector, IntegerMatrix};
pub use normal_form::{
    complete_to_unimodular, hermite_normal_form, kernel_matrix, smith_normal_form, solve_integer,
    HermiteForm, SmithForm,
};
pub use subgroup::{is_zero_vector, AbelianGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("subgroup is not contained in the ambient group of the quotient")]
    NotContained,
    #[error("invalid torsion coefficients {0:?}: need d_i >= 2 with d_1 | d_2 | ...")]
    InvalidTorsion(Vec<BigInt>),
}

/// `ℤ`-basis of `ker M` as a canonical subgroup.
pub fn kernel_basis(m: &IntegerMatrix) -> Subgroup {
    Subgroup::kernel(m)
}

pub fn subgroup_intersection(a: &Subgroup, b: &Subgroup) -> Subgroup {
    a.intersection(b)
}

pub fn subgroup_sum(a: &Subgroup, b: &Subgroup) -> Subgroup {
    a.sum(b)
}

pub fn quotient_invariants(a: &Subgroup, b: &Subgroup) -> Result<AbelianGroup, LinalgError> {
    a.quotient(b)
}

pub fn membership(x: &[BigInt], a: &Subgroup) -> bool {
    a.contains(x)
}
