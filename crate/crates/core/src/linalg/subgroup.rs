use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::matrix::{IntVector, IntegerMatrix};
use super::normal_form::{hermite_normal_form, kernel_matrix, smith_normal_form, solve_integer};
use super::LinalgError;

/// Finitely generated abelian group `ℤ^free ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with
/// `d₁ | d₂ | … | d_k` and every `dᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, LinalgError> {
        let two = BigInt::from(2);
        if torsion.iter().any(|d| *d < two) {
            return Err(LinalgError::InvalidTorsion(torsion));
        }
        if torsion.windows(2).any(|w| !num_integer::Integer::is_multiple_of(&w[1], &w[0])) {
            return Err(LinalgError::InvalidTorsion(torsion));
        }
        Ok(AbelianGroup { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// Group presented by the cokernel of `relations` (`n x m`, acting on `ℤⁿ`).
    pub fn cokernel(relations: &IntegerMatrix) -> Self {
        let d = smith_normal_form(relations).invariant_factors();
        let free_rank = relations.rows() - d.len();
        let torsion = d.into_iter().filter(|x| !x.is_one()).collect();
        AbelianGroup { free_rank, torsion }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

/// Human form: `Z^2 + Z/6`, `Z`, `0`.
impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Machine form: `{"free": 2, "torsion": [6]}`.
impl Serialize for AbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AbelianGroup", 2)?;
        st.serialize_field("free", &self.free_rank)?;
        let torsion: Vec<serde_json::Value> = self.torsion.iter().map(crate::bigint_json).collect();
        st.serialize_field("torsion", &torsion)?;
        st.end()
    }
}

/// Subgroup of `ℤⁿ` generated by matrix columns, stored canonically as the
/// nonzero columns of its column Hermite form. Two subgroups are equal iff
/// their stored bases are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    ambient: usize,
    basis: IntegerMatrix,
}

impl Subgroup {
    pub fn from_generators(generators: &IntegerMatrix) -> Self {
        let hf = hermite_normal_form(generators);
        Subgroup { ambient: generators.rows(), basis: hf.h.select_columns(0..hf.rank) }
    }

    pub fn from_vectors(vectors: &[IntVector], ambient: usize) -> Self {
        Self::from_generators(&IntegerMatrix::from_columns(vectors, ambient))
    }

    pub fn full(n: usize) -> Self {
        Subgroup { ambient: n, basis: IntegerMatrix::identity(n) }
    }

    pub fn trivial(n: usize) -> Self {
        Subgroup { ambient: n, basis: IntegerMatrix::zeros(n, 0) }
    }

    /// `{x : M·x = 0}`, always saturated.
    pub fn kernel(m: &IntegerMatrix) -> Self {
        Self::from_generators(&kernel_matrix(m))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    /// Canonical basis, one column per generator; columns are independent.
    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank() == 0
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        assert_eq!(x.len(), self.ambient, "membership: vector length mismatch");
        self.coordinates(x).is_some()
    }

    /// Coordinates of `x` in the canonical basis, if `x` lies in the subgroup.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<IntVector> {
        solve_integer(&self.basis, x)
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.basis.columns().iter().all(|c| self.contains(c))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        self.check_ambient(other);
        let a = self.rank();
        let stacked = self.basis.hstack(&-&other.basis);
        let kernel = kernel_matrix(&stacked);
        let coeffs = kernel.select_rows(0..a);
        Subgroup::from_generators(&(&self.basis * &coeffs))
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        self.check_ambient(other);
        Subgroup::from_generators(&self.basis.hstack(&other.basis))
    }

    /// Invariants of `self / sub`; `sub` must be contained in `self`.
    pub fn quotient(&self, sub: &Subgroup) -> Result<AbelianGroup, LinalgError> {
        self.check_ambient(sub);
        let mut coords = Vec::with_capacity(sub.rank());
        for c in sub.basis.columns() {
            coords.push(self.coordinates(&c).ok_or(LinalgError::NotContained)?);
        }
        let rel = IntegerMatrix::from_columns(&coords, self.rank());
        Ok(AbelianGroup::cokernel(&rel))
    }

    /// Smallest direct summand of `ℤⁿ` containing this subgroup.
    pub fn saturation(&self) -> Subgroup {
        let annihilator = kernel_matrix(&self.basis.transpose());
        Subgroup::kernel(&annihilator.transpose())
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation() == *self
    }

    /// Image of this subgroup under `m` (`k x n`), as a subgroup of `ℤᵏ`.
    pub fn image(&self, m: &IntegerMatrix) -> Subgroup {
        Subgroup::from_generators(&(m * &self.basis))
    }

    fn check_ambient(&self, other: &Subgroup) {
        assert_eq!(self.ambient, other.ambient, "subgroups live in different ambient lattices");
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(Z^{}, basis columns {})", self.ambient, self.basis.transpose())
    }
}

/// `true` iff `x` is the zero vector.
pub fn is_zero_vector(x: &[BigInt]) -> bool {
    x.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ints;

    fn span(vs: &[&[i64]]) -> Subgroup {
        let n = vs[0].len();
        Subgroup::from_vectors(&vs.iter().map(|v| ints(v)).collect::<Vec<_>>(), n)
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(span(&[&[2, 0]]).intersection(&span(&[&[3, 0]])), span(&[&[6, 0]]));
        let a = span(&[&[1, 2], &[0, 3]]);
        assert_eq!(a.intersection(&a), a);
        assert!(span(&[&[1, 0]]).intersection(&span(&[&[0, 1]])).is_trivial());
    }

    #[test]
    fn sum_examples() {
        assert_eq!(span(&[&[2, 0]]).sum(&span(&[&[3, 0]])), span(&[&[1, 0]]));
        let a = span(&[&[1, 2], &[0, 3]]);
        assert_eq!(a.sum(&Subgroup::trivial(2)), a);
        assert_eq!(span(&[&[1, 0]]).sum(&span(&[&[0, 1]])), Subgroup::full(2));
    }

    #[test]
    fn quotient_examples() {
        let q = Subgroup::full(2).quotient(&span(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(q, AbelianGroup::new(0, ints(&[6])).unwrap());
        let a = span(&[&[1, 1], &[0, 2]]);
        assert!(a.quotient(&a).unwrap().is_trivial());
        assert_eq!(Subgroup::full(2).quotient(&span(&[&[1, 0]])).unwrap(), AbelianGroup::free(1));
        assert_eq!(span(&[&[2, 0]]).quotient(&span(&[&[1, 0]])), Err(LinalgError::NotContained));
    }

    #[test]
    fn membership_examples() {
        assert!(span(&[&[1, 0]]).contains(&ints(&[2, 0])));
        assert!(!span(&[&[2, 0]]).contains(&ints(&[1, 0])));
        let k = Subgroup::kernel(&IntegerMatrix::from_rows_i64(&[vec![1, 1]]));
        assert!(k.contains(&ints(&[5, -5])));
    }

    #[test]
    fn saturation() {
        let a = span(&[&[2, 4]]);
        assert_eq!(a.saturation(), span(&[&[1, 2]]));
        assert!(!a.is_saturated());
        assert!(Subgroup::full(3).is_saturated());
        assert!(Subgroup::trivial(3).is_saturated());
    }

    #[test]
    fn group_display() {
        let g = AbelianGroup::new(2, ints(&[6])).unwrap();
        assert_eq!(g.to_string(), "Z^2 + Z/6");
        assert_eq!(AbelianGroup::free(1).to_string(), "Z");
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"free":2,"torsion":[6]}"#);
        assert!(AbelianGroup::new(0, ints(&[2, 3])).is_err());
        assert!(AbelianGroup::new(0, ints(&[1])).is_err());
    }
}
