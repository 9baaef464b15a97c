//! The intersection form of a trisected 4-manifold.
//!
//! `H₂(X)/torsion` is represented by vectors in the `γ`-basis lying in
//! `L_γ∩(L_α+L_β)`. For such `x, y` the form is `Φ(x, y) = ⟨x′, y⟩_Σ`, where
//! `x′ ∈ L_α` satisfies `x − x′ ∈ L_β`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{Label, Trisection};
use crate::homology::h2_kernel_pieces;
use crate::linalg::{smith_normal_form, solve_integer, IntVector, IntegerMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("vector is not in L_gamma ∩ (L_alpha + L_beta)")]
    NotInDomain,
    #[error("no lift x' in L_alpha exists for the given vector")]
    NoLift,
    #[error("diagram not normalized: alpha-Q-beta must equal the partial identity I_g^(g-k1)")]
    NotNormalized,
    #[error("the fast formula needs k1 = 0 and a unimodular alpha-Q-beta (k1 = {k1}, det = {det})")]
    NotInvertible { k1: usize, det: BigInt },
    #[error("vector length {got} does not match genus {genus}")]
    Length { got: usize, genus: usize },
    #[error("form matrix is not symmetric: {0}")]
    NotSymmetric(IntegerMatrix),
}

/// Representatives of a basis of `H₂(X)/torsion`, as columns in the `γ`-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2Basis {
    pub representatives: IntegerMatrix,
}

impl H2Basis {
    pub fn rank(&self) -> usize {
        self.representatives.cols()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormMethod {
    Definition,
    General,
    Fast,
}

impl fmt::Display for FormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormMethod::Definition => "definition",
            FormMethod::General => "general",
            FormMethod::Fast => "fast",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    pub matrix: IntegerMatrix,
    pub basis: H2Basis,
    pub method: FormMethod,
}

impl BilinearForm {
    fn new(matrix: IntegerMatrix, basis: H2Basis, method: FormMethod) -> Result<Self, FormError> {
        if !matrix.is_symmetric() {
            return Err(FormError::NotSymmetric(matrix));
        }
        Ok(BilinearForm { matrix, basis, method })
    }

    pub fn invariants(&self) -> FormInvariants {
        form_invariants(&self.matrix)
    }
}

/// Columns of `A` are preimages of the free generators of
/// `L_γ∩(L_α+L_β) / ((L_γ∩L_α)+(L_γ∩L_β))`, read off the Smith form of the
/// denominator written in the numerator's canonical basis.
pub fn h2_basis(t: &Trisection) -> H2Basis {
    let (numerator, denominator) = h2_kernel_pieces(t);
    let n = numerator.rank();
    let coords: Vec<IntVector> = denominator
        .basis()
        .columns()
        .iter()
        .map(|c| numerator.coordinates(c).expect("denominator lies in numerator"))
        .collect();
    let rel = IntegerMatrix::from_columns(&coords, n);
    let snf = smith_normal_form(&rel);
    let r = snf.rank();
    H2Basis { representatives: numerator.basis() * &snf.u_inv.select_columns(r..n) }
}

fn check_len(t: &Trisection, x: &[BigInt]) -> Result<(), FormError> {
    if x.len() != t.genus() {
        return Err(FormError::Length { got: x.len(), genus: t.genus() });
    }
    Ok(())
}

/// `α`-coordinates of some `x′ ∈ L_α` with `x − x′ ∈ L_β`, by solving
/// `_βQ_α·x′ = _βQ_γ·x`.
pub fn lift(t: &Trisection, x: &[BigInt]) -> Result<IntVector, FormError> {
    check_len(t, x)?;
    let (numerator, _) = h2_kernel_pieces(t);
    if !numerator.contains(x) {
        return Err(FormError::NotInDomain);
    }
    let rhs = t.q(Label::Beta, Label::Gamma).mul_vec(x);
    solve_integer(&t.q(Label::Beta, Label::Alpha), &rhs).ok_or(FormError::NoLift)
}

/// `⟨x′, y⟩_Σ = x′ᵀ·_αQ_γ·y` for a given lift `x′`.
pub fn phi_with_lift(t: &Trisection, x_lift: &[BigInt], y: &[BigInt]) -> Result<BigInt, FormError> {
    check_len(t, x_lift)?;
    check_len(t, y)?;
    let (numerator, _) = h2_kernel_pieces(t);
    if !numerator.contains(y) {
        return Err(FormError::NotInDomain);
    }
    let ay = t.q(Label::Alpha, Label::Gamma).mul_vec(y);
    Ok(x_lift.iter().zip(&ay).map(|(a, b)| a * b).sum())
}

/// `Φ(x, y)` for `x, y ∈ L_γ∩(L_α+L_β)` in the `γ`-basis.
pub fn phi(t: &Trisection, x: &[BigInt], y: &[BigInt]) -> Result<BigInt, FormError> {
    let x_lift = lift(t, x)?;
    phi_with_lift(t, &x_lift, y)
}

/// `(Φ(aᵢ, aⱼ))` over the columns of [`h2_basis`].
pub fn form_by_definition(t: &Trisection) -> Result<BilinearForm, FormError> {
    let basis = h2_basis(t);
    let reps = basis.representatives.columns();
    let lifts = reps.iter().map(|x| lift(t, x)).collect::<Result<Vec<_>, _>>()?;
    let q_ag = t.q(Label::Alpha, Label::Gamma);
    let images: Vec<IntVector> = reps.iter().map(|y| q_ag.mul_vec(y)).collect();
    let b = reps.len();
    let matrix = IntegerMatrix::from_fn(b, b, |i, j| lifts[i].iter().zip(&images[j]).map(|(p, q)| p * q).sum());
    BilinearForm::new(matrix, basis, FormMethod::Definition)
}

/// `Aᵀ·_γQ_β·I_g^{g−k₁}·_αQ_γ·A`; requires `_αQ_β = I_g^{g−k₁}`.
pub fn form_general(t: &Trisection, basis: &H2Basis) -> Result<BilinearForm, FormError> {
    let g = t.genus();
    let ident = IntegerMatrix::partial_identity(g, g - t.k().k1());
    if t.q(Label::Alpha, Label::Beta) != ident {
        return Err(FormError::NotNormalized);
    }
    let a = &basis.representatives;
    let inner = &(&t.q(Label::Gamma, Label::Beta) * &ident) * &t.q(Label::Alpha, Label::Gamma);
    let matrix = &(&a.transpose() * &inner) * a;
    BilinearForm::new(matrix, basis.clone(), FormMethod::General)
}

/// `_γQ_β·(_αQ_β)⁻¹·_αQ_γ` on all of `ℤ^g`; requires `k₁ = 0`.
pub fn form_fast_full(t: &Trisection) -> Result<IntegerMatrix, FormError> {
    let q_ab = t.q(Label::Alpha, Label::Beta);
    let det = q_ab.determinant();
    let k1 = t.k().k1();
    if k1 != 0 || det.abs() != BigInt::one() {
        return Err(FormError::NotInvertible { k1, det });
    }
    // For det = ±1 the inverse is adj/det = adj·det.
    let inverse = q_ab.adjugate().scale(&det);
    Ok(&(&t.q(Label::Gamma, Label::Beta) * &inverse) * &t.q(Label::Alpha, Label::Gamma))
}

/// The fast formula restricted to [`h2_basis`], so it is comparable entry
/// for entry with the other methods.
pub fn form_fast(t: &Trisection) -> Result<BilinearForm, FormError> {
    let full = form_fast_full(t)?;
    let basis = h2_basis(t);
    let a = &basis.representatives;
    let matrix = &(&a.transpose() * &full) * a;
    BilinearForm::new(matrix, basis, FormMethod::Fast)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormInvariants {
    pub rank: usize,
    pub signature: i64,
    pub parity: Parity,
    #[serde(serialize_with = "ser_bigint")]
    pub determinant: BigInt,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    crate::bigint_json(x).serialize(s)
}

impl fmt::Display for FormInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank {}, signature {}, {}, det {}",
            self.rank, self.signature, self.parity, self.determinant
        )
    }
}

/// Rank, signature, parity and determinant of a symmetric integer matrix.
///
/// Signature comes from exact symmetric elimination over `ℚ`.
pub fn form_invariants(q: &IntegerMatrix) -> FormInvariants {
    assert!(q.is_symmetric(), "form_invariants needs a symmetric matrix");
    let parity = if (0..q.rows()).all(|i| num_integer::Integer::is_even(&q[(i, i)])) {
        Parity::Even
    } else {
        Parity::Odd
    };
    let (rank, signature) = rank_and_signature(q);
    FormInvariants { rank, signature, parity, determinant: q.determinant() }
}

fn rank_and_signature(q: &IntegerMatrix) -> (usize, i64) {
    let n = q.rows();
    let mut a: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(q[(i, j)].clone())).collect()).collect();
    let mut live: Vec<usize> = (0..n).collect();
    let (mut rank, mut signature) = (0usize, 0i64);
    loop {
        let pivot = live.iter().position(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(pos) => live.remove(pos),
            None => {
                // All remaining diagonal entries vanish; e_i += e_j creates 2·a_ij there.
                let Some((i, j)) = live
                    .iter()
                    .flat_map(|&i| live.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero())
                else {
                    break;
                };
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] += v;
                }
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] += v;
                }
                continue;
            }
        };
        let d = a[p][p].clone();
        rank += 1;
        signature += match d.cmp(&BigRational::zero()) {
            Ordering::Greater => 1,
            _ => -1,
        };
        for &i in &live {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for &j in &live {
                let v = &f * &a[p][j];
                a[i][j] -= v;
            }
            a[i][p] = BigRational::zero();
        }
        for &j in &live {
            a[p][j] = BigRational::zero();
        }
    }
    (rank, signature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{MatrixDiagram, TrisectionDiagram};
    use crate::linalg::ints;

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_rows_i64(rows)
    }

    fn tri(g: usize, a: &[&[i64]], b: &[&[i64]], c: &[&[i64]]) -> Trisection {
        let v = |xs: &[&[i64]]| xs.iter().map(|x| ints(x)).collect::<Vec<_>>();
        Trisection::from_curves(TrisectionDiagram::from_classes(g, &v(a), &v(b), &v(c)).unwrap()).unwrap()
    }

    fn s2xs2_matrices() -> Trisection {
        let md = MatrixDiagram::new(
            2,
            None,
            m(&[vec![0, -1], vec![1, 0]]),
            m(&[vec![0, -1], vec![-1, 0]]),
            m(&[vec![0, 1], vec![-1, 0]]),
        )
        .unwrap();
        Trisection::from_matrices(md).unwrap()
    }

    fn cp2() -> Trisection {
        tri(1, &[&[1, 0]], &[&[0, 1]], &[&[1, 1]])
    }

    fn cp2_cp2bar() -> Trisection {
        tri(
            2,
            &[&[1, 0, 0, 0], &[0, 1, 0, 0]],
            &[&[0, 0, 1, 0], &[0, 0, 0, 1]],
            &[&[1, 0, 1, 0], &[0, 1, 0, -1]],
        )
    }

    #[test]
    fn s2xs2_form() {
        let t = s2xs2_matrices();
        assert!(h2_basis(&t).representatives.is_identity());
        assert_eq!(phi(&t, &ints(&[1, 0]), &ints(&[0, 1])).unwrap(), BigInt::one());
        assert_eq!(phi(&t, &ints(&[1, 0]), &ints(&[1, 0])).unwrap(), BigInt::zero());
        let h = m(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(form_fast_full(&t).unwrap(), h);
        assert_eq!(form_fast(&t).unwrap().matrix, h);
        assert_eq!(form_by_definition(&t).unwrap().matrix, h);
        assert!(matches!(form_general(&t, &h2_basis(&t)), Err(FormError::NotNormalized)));
    }

    #[test]
    fn cp2_form() {
        let t = cp2();
        assert_eq!(h2_basis(&t).representatives, m(&[vec![1]]));
        assert_eq!(phi(&t, &ints(&[1]), &ints(&[1])).unwrap(), BigInt::one());
        for f in [form_by_definition(&t), form_general(&t, &h2_basis(&t)), form_fast(&t)] {
            assert_eq!(f.unwrap().matrix, m(&[vec![1]]));
        }
    }

    #[test]
    fn cp2_cp2bar_form() {
        let t = cp2_cp2bar();
        let d = m(&[vec![1, 0], vec![0, -1]]);
        assert_eq!(form_fast(&t).unwrap().matrix, d);
        assert_eq!(form_by_definition(&t).unwrap().matrix, d);
        assert_eq!(form_general(&t, &h2_basis(&t)).unwrap().matrix, d);
    }

    #[test]
    fn s1xs3_has_empty_form() {
        let t = tri(1, &[&[1, 0]], &[&[1, 0]], &[&[1, 0]]);
        assert_eq!(h2_basis(&t).rank(), 0);
        let f = form_by_definition(&t).unwrap();
        assert_eq!(f.matrix.rows(), 0);
        assert!(matches!(form_fast(&t), Err(FormError::NotInvertible { k1: 1, .. })));
        assert_eq!(
            f.invariants(),
            FormInvariants { rank: 0, signature: 0, parity: Parity::Even, determinant: BigInt::one() }
        );
    }

    #[test]
    fn phi_rejects_outside_domain() {
        let t = tri(1, &[&[1, 0]], &[&[1, 0]], &[&[0, 1]]);
        assert_eq!(phi(&t, &ints(&[1]), &ints(&[1])), Err(FormError::NotInDomain));
    }

    #[test]
    fn invariants_examples() {
        let inv = form_invariants(&m(&[vec![0, 1], vec![1, 0]]));
        assert_eq!((inv.rank, inv.signature, inv.parity), (2, 0, Parity::Even));
        assert_eq!(inv.determinant, BigInt::from(-1));
        let inv = form_invariants(&m(&[vec![1, 0], vec![0, -1]]));
        assert_eq!((inv.rank, inv.signature, inv.parity), (2, 0, Parity::Odd));
        assert_eq!(inv.determinant, BigInt::from(-1));
        let inv = form_invariants(&m(&[vec![1]]));
        assert_eq!((inv.rank, inv.signature, inv.parity), (1, 1, Parity::Odd));
        let e8_like = m(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(form_invariants(&e8_like).signature, 3);
        let degenerate = m(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(form_invariants(&degenerate).rank, 0);
    }
}
