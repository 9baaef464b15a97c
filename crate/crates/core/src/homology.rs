//! Handle chain complex of a trisected 4-manifold and its homology, plus
//! closed-form computations of `H₂` and `H₃` used as cross-checks.
//!
//! Every group here is written in curve coordinates: a vector `x ∈ ℤ^g`
//! in the `γ`-basis stands for the class `Σ xᵢ·γᵢ ∈ L_γ`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{Label, Trisection};
use crate::linalg::{complete_to_unimodular, AbelianGroup, IntegerMatrix, LinalgError, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("the intersection matrices have no Lagrangian realization; curve-level computation unavailable")]
    NoRealization,
    #[error("{what}: {left} from one computation, {right} from the other")]
    Disagreement { what: &'static str, left: AbelianGroup, right: AbelianGroup },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `ℤ → C₃ → C₂ → C₁ → ℤ` with `D₄ = D₁ = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    /// `c₀ … c₄`, indexed by degree.
    pub ranks: [usize; 5],
    /// `boundaries[i]` is `Dᵢ: Cᵢ → Cᵢ₋₁` (`c_{i-1} x c_i`) for `i = 1..=4`;
    /// slot 0 is the empty map out of `C₀`.
    pub boundaries: [IntegerMatrix; 5],
    /// What the basis of each `Cᵢ` is.
    pub provenance: [String; 5],
}

impl ChainComplex {
    fn new(c3: usize, c2: usize, c1: usize, d3: IntegerMatrix, d2: IntegerMatrix, provenance: [String; 5]) -> Self {
        let ranks = [1, c1, c2, c3, 1];
        let boundaries = [
            IntegerMatrix::zeros(0, 1),
            IntegerMatrix::zeros(1, c1),
            d2,
            d3,
            IntegerMatrix::zeros(c3, 1),
        ];
        ChainComplex { ranks, boundaries, provenance }
    }

    pub fn boundary(&self, i: usize) -> &IntegerMatrix {
        &self.boundaries[i]
    }

    /// `D₂·D₃ = 0` (the only composite that is not trivially zero).
    pub fn is_complex(&self) -> bool {
        (&self.boundaries[2] * &self.boundaries[3]).is_zero()
    }

    /// `Hᵢ = ker Dᵢ / im Dᵢ₊₁`.
    pub fn homology(&self, i: usize) -> AbelianGroup {
        let cycles = Subgroup::kernel(&self.boundaries[i]);
        let boundaries = if i == 4 {
            Subgroup::trivial(self.ranks[4])
        } else {
            Subgroup::from_generators(&self.boundaries[i + 1])
        };
        cycles.quotient(&boundaries).expect("D² = 0 puts boundaries inside cycles")
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    pub fn profile(&self) -> HomologyProfile {
        let groups: [AbelianGroup; 5] = std::array::from_fn(|i| self.homology(i));
        let bettis = std::array::from_fn(|i| groups[i].free_rank());
        HomologyProfile { groups, bettis, euler_characteristic: self.euler_characteristic() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    /// `H₀ … H₄`.
    pub groups: [AbelianGroup; 5],
    pub bettis: [usize; 5],
    pub euler_characteristic: i64,
}

impl HomologyProfile {
    pub fn h(&self, i: usize) -> &AbelianGroup {
        &self.groups[i]
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            writeln!(f, "H{i} = {g}")?;
        }
        write!(f, "chi = {}", self.euler_characteristic)
    }
}

/// Canonical basis of `L_α∩L_β` in `α`-coordinates, one row per element.
pub(crate) fn alpha_beta_rows(t: &Trisection) -> IntegerMatrix {
    Subgroup::kernel(&t.q(Label::Beta, Label::Alpha)).basis().transpose()
}

/// `ℤ → (L_α∩L_γ)⊕(L_β∩L_γ) → L_γ → Hom(L_α∩L_β, ℤ) → ℤ`.
///
/// `D₃(x, y) = x + y` and `D₂ = B·_αQ_γ`, where the rows of `B` are the
/// canonical kernel basis of `_βQ_α`, i.e. the `α`-coordinates of the chosen
/// basis `mᵢ` of `L_α∩L_β`; entry `(i, j)` of `D₂` is `⟨mᵢ, γⱼ⟩_Σ`.
pub fn build_complex(t: &Trisection) -> ChainComplex {
    let g = t.genus();
    let k_ag = Subgroup::kernel(&t.q(Label::Alpha, Label::Gamma));
    let k_bg = Subgroup::kernel(&t.q(Label::Beta, Label::Gamma));
    let b = alpha_beta_rows(t);
    let d3 = k_ag.basis().hstack(k_bg.basis());
    let d2 = &b * &t.q(Label::Alpha, Label::Gamma);
    ChainComplex::new(
        d3.cols(),
        g,
        b.rows(),
        d3,
        d2,
        [
            "Z".into(),
            "dual of the L_alpha ∩ L_beta basis (kernel rows of beta-Q-alpha)".into(),
            "gamma curves".into(),
            "Hermite bases of L_alpha ∩ L_gamma then L_beta ∩ L_gamma, in gamma coordinates".into(),
            "Z".into(),
        ],
    )
}

/// `ℤ → L_α∩L_γ → L_γ/(L_β∩L_γ) → Hom(L_α∩L_β, ℤ) → ℤ`, with the middle
/// quotient identified with a complement of `L_β∩L_γ` in `L_γ`.
pub fn reduced_complex(t: &Trisection) -> ChainComplex {
    let full = build_complex(t);
    let g = t.genus();
    let k_ag = Subgroup::kernel(&t.q(Label::Alpha, Label::Gamma));
    let k_bg = Subgroup::kernel(&t.q(Label::Beta, Label::Gamma));
    let k3 = k_bg.rank();
    let m = complete_to_unimodular(k_bg.basis()).expect("kernels are saturated");
    let u = m.unimodular_inverse().expect("completion is unimodular");
    let d3 = (&u * k_ag.basis()).select_rows(k3..g);
    let d2 = &full.boundaries[2] * &m.select_columns(k3..g);
    ChainComplex::new(
        k_ag.rank(),
        g - k3,
        full.ranks[1],
        d3,
        d2,
        [
            full.provenance[0].clone(),
            full.provenance[1].clone(),
            "complement of L_beta ∩ L_gamma in L_gamma (unimodular completion of its Hermite basis)".into(),
            "Hermite basis of L_alpha ∩ L_gamma".into(),
            full.provenance[4].clone(),
        ],
    )
}

pub fn homology_profile(t: &Trisection) -> HomologyProfile {
    build_complex(t).profile()
}

/// `H₃ ≅ L_α∩L_β∩L_γ`, computed as `ker _αQ_γ ∩ ker _βQ_γ` and, when curve
/// classes are available, also as a nested intersection in `H₁(Σ)`.
pub fn h3_direct(t: &Trisection) -> Result<AbelianGroup, HomologyError> {
    let stacked = t.q(Label::Alpha, Label::Gamma).vstack(&t.q(Label::Beta, Label::Gamma));
    let by_kernel = AbelianGroup::free(Subgroup::kernel(&stacked).rank());
    if let Some(d) = t.curves() {
        let triple = d
            .alpha()
            .lagrangian()
            .intersection(&d.beta().lagrangian())
            .intersection(&d.gamma().lagrangian());
        let nested = AbelianGroup::free(triple.rank());
        if nested != by_kernel {
            return Err(HomologyError::Disagreement { what: "H3", left: by_kernel, right: nested });
        }
    }
    Ok(by_kernel)
}

/// `{a+b+c = 0} / ({c=0} + {b=0} + {a=0})` inside `L_α×L_β×L_γ`, with
/// each factor in its own curve coordinates. Needs curve classes.
pub fn h2_symmetric(t: &Trisection) -> Result<AbelianGroup, HomologyError> {
    let d = t.curves().ok_or(HomologyError::NoRealization)?;
    let g = t.genus();
    let total = d.alpha().classes().hstack(d.beta().classes()).hstack(d.gamma().classes());
    let numerator = Subgroup::kernel(&total);
    // Elements of the numerator whose block `block` vanishes.
    let with_zero_block = |block: usize| {
        let selector = IntegerMatrix::from_fn(g, 3 * g, |i, j| {
            if j == block * g + i {
                num_bigint::BigInt::from(1)
            } else {
                num_bigint::BigInt::from(0)
            }
        });
        Subgroup::kernel(&total.vstack(&selector))
    };
    let denominator = with_zero_block(2).sum(&with_zero_block(1)).sum(&with_zero_block(0));
    Ok(numerator.quotient(&denominator)?)
}

/// `ker(B·_αQ_γ) / (ker _αQ_γ + ker _βQ_γ)` in the `γ`-basis.
pub fn h2_kernel_formula(t: &Trisection) -> Result<AbelianGroup, HomologyError> {
    let (numerator, denominator) = h2_kernel_pieces(t);
    Ok(numerator.quotient(&denominator)?)
}

/// Numerator `L_γ∩(L_α+L_β)` and denominator `(L_γ∩L_α)+(L_γ∩L_β)` in the `γ`-basis.
pub(crate) fn h2_kernel_pieces(t: &Trisection) -> (Subgroup, Subgroup) {
    let b = alpha_beta_rows(t);
    let numerator = Subgroup::kernel(&(&b * &t.q(Label::Alpha, Label::Gamma)));
    let denominator = Subgroup::kernel(&t.q(Label::Alpha, Label::Gamma))
        .sum(&Subgroup::kernel(&t.q(Label::Beta, Label::Gamma)));
    (numerator, denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::TrisectionDiagram;
    use crate::linalg::ints;

    fn tri(g: usize, a: &[&[i64]], b: &[&[i64]], c: &[&[i64]]) -> Trisection {
        let v = |xs: &[&[i64]]| xs.iter().map(|x| ints(x)).collect::<Vec<_>>();
        Trisection::from_curves(TrisectionDiagram::from_classes(g, &v(a), &v(b), &v(c)).unwrap()).unwrap()
    }

    fn s1xs3() -> Trisection {
        tri(1, &[&[1, 0]], &[&[1, 0]], &[&[1, 0]])
    }

    fn s2xs2() -> Trisection {
        tri(
            2,
            &[&[1, 0, 0, 0], &[0, 1, 0, 0]],
            &[&[0, 0, 0, 1], &[0, 0, -1, 0]],
            &[&[1, 0, 0, -1], &[0, -1, 1, 0]],
        )
    }

    fn profile(free: [usize; 5]) -> [AbelianGroup; 5] {
        free.map(AbelianGroup::free)
    }

    #[test]
    fn s1xs3_complex() {
        let c = build_complex(&s1xs3());
        assert_eq!(c.ranks, [1, 1, 1, 2, 1]);
        assert_eq!(c.boundaries[3], IntegerMatrix::from_rows_i64(&[vec![1, 1]]));
        assert_eq!(c.boundaries[2], IntegerMatrix::from_rows_i64(&[vec![0]]));
        assert!(c.is_complex());
        let p = c.profile();
        assert_eq!(p.groups, profile([1, 1, 0, 1, 1]));
        assert_eq!(p.euler_characteristic, 0);

        let r = reduced_complex(&s1xs3());
        assert_eq!(r.ranks[2], 0);
        assert_eq!(r.profile().groups, p.groups);
    }

    #[test]
    fn s2xs2_complex() {
        let t = s2xs2();
        let c = build_complex(&t);
        assert_eq!(c.ranks, [1, 0, 2, 0, 1]);
        assert_eq!(c.profile().groups, profile([1, 0, 2, 0, 1]));
        let r = reduced_complex(&t);
        assert_eq!((r.ranks, &r.boundaries), (c.ranks, &c.boundaries));
        assert!(h3_direct(&t).unwrap().is_trivial());
        assert_eq!(h2_symmetric(&t).unwrap(), AbelianGroup::free(2));
        assert_eq!(h2_kernel_formula(&t).unwrap(), AbelianGroup::free(2));
    }

    #[test]
    fn cp2_profile() {
        let t = tri(1, &[&[1, 0]], &[&[0, 1]], &[&[1, 1]]);
        let c = build_complex(&t);
        assert_eq!(c.ranks, [1, 0, 1, 0, 1]);
        assert_eq!(c.profile().groups, profile([1, 0, 1, 0, 1]));
    }

    #[test]
    fn s1xs3_closed_forms() {
        let t = s1xs3();
        assert_eq!(h3_direct(&t).unwrap(), AbelianGroup::free(1));
        assert!(h2_symmetric(&t).unwrap().is_trivial());
        assert!(h2_kernel_formula(&t).unwrap().is_trivial());
    }

    #[test]
    fn genus_zero_is_s4() {
        let z = IntegerMatrix::zeros(0, 0);
        let t = Trisection::from_curves(TrisectionDiagram::new(0, z.clone(), z.clone(), z).unwrap()).unwrap();
        assert_eq!(homology_profile(&t).groups, profile([1, 0, 0, 0, 1]));
        assert_eq!(homology_profile(&t).euler_characteristic, 2);
        assert!(h2_symmetric(&t).unwrap().is_trivial());
    }
}
