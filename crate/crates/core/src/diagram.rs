//! Trisection diagrams as algebraic data over a fixed symplectic basis.
//!
//! A curve is recorded only by its homology class in `H₁(Σ;ℤ) ≅ ℤ^{2g}`,
//! written in the basis `e₁…e_g, f₁…f_g` with `⟨eᵢ, fᵢ⟩ = 1` and all other
//! basis pairings zero. The pairing is `⟨x, y⟩ = xᵀ·J·y` with
//! `J = [[0, I], [-I, 0]]`.
//!
//! The pairwise genera follow the handlebody pairs: `k₁` belongs to
//! `(α, β)`, `k₂` to `(α, γ)` and `k₃` to `(β, γ)`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    complete_to_unimodular, kernel_matrix, smith_normal_form, solve_integer, AbelianGroup, IntVector,
    IntegerMatrix, Subgroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid diagram:\n{0}")]
    Invalid(Box<ValidationReport>),
    #[error("curve system {label} is not a valid Lagrangian basis: {reason}")]
    InvalidSystem { label: Label, reason: String },
    #[error("class {which} is not null-homologous in the Heegaard splitting")]
    NotNullHomologous { which: &'static str },
    #[error("H_1 of the Heegaard splitting has torsion ({0}); linking numbers are not integral")]
    TorsionH1(AbelianGroup),
    #[error("no Lagrangian realization of the intersection matrices was found")]
    NoRealization,
}

/// Which of the three curve systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Alpha,
    Beta,
    Gamma,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Alpha, Label::Beta, Label::Gamma];

    pub fn ascii(self) -> &'static str {
        match self {
            Label::Alpha => "alpha",
            Label::Beta => "beta",
            Label::Gamma => "gamma",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Alpha => "α",
            Label::Beta => "β",
            Label::Gamma => "γ",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "α" | "alpha" | "a" => Ok(Label::Alpha),
            "β" | "beta" | "b" => Ok(Label::Beta),
            "γ" | "gamma" | "g" | "c" => Ok(Label::Gamma),
            _ => Err(format!("unknown curve system '{s}'")),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.ascii())
    }
}

/// `(k₁, k₂, k₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct KVector(pub [usize; 3]);

impl KVector {
    pub fn k1(&self) -> usize {
        self.0[0]
    }
    pub fn k2(&self) -> usize {
        self.0[1]
    }
    pub fn k3(&self) -> usize {
        self.0[2]
    }
    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Slot of the k-vector a pair of systems determines.
fn k_slot(a: Label, b: Label) -> usize {
    match (a.min(b), a.max(b)) {
        (Label::Alpha, Label::Beta) => 0,
        (Label::Alpha, Label::Gamma) => 1,
        _ => 2,
    }
}

/// Closed oriented surface of genus `g` with the standard symplectic pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticSurface {
    genus: usize,
    pairing: IntegerMatrix,
}

impl SymplecticSurface {
    pub fn new(genus: usize) -> Self {
        let n = 2 * genus;
        let pairing = IntegerMatrix::from_fn(n, n, |i, j| {
            if i < genus && j == i + genus {
                BigInt::one()
            } else if i >= genus && j + genus == i {
                -BigInt::one()
            } else {
                BigInt::zero()
            }
        });
        SymplecticSurface { genus, pairing }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// The matrix `J`.
    pub fn pairing_matrix(&self) -> &IntegerMatrix {
        &self.pairing
    }

    /// `⟨x, y⟩_Σ = xᵀ·J·y`.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let g = self.genus;
        assert_eq!(x.len(), 2 * g);
        assert_eq!(y.len(), 2 * g);
        (0..g).map(|i| &x[i] * &y[g + i] - &x[g + i] * &y[i]).sum()
    }

    /// Gram block `Aᵀ·J·B` for class matrices with `2g` rows.
    pub fn gram(&self, a: &IntegerMatrix, b: &IntegerMatrix) -> IntegerMatrix {
        &(&a.transpose() * &self.pairing) * b
    }
}

/// `g` oriented curve classes, one per column of a `2g x g` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSystem {
    label: Label,
    classes: IntegerMatrix,
}

impl CurveSystem {
    pub fn new(label: Label, classes: IntegerMatrix) -> Result<Self, DiagramError> {
        if classes.rows() != 2 * classes.cols() {
            return Err(DiagramError::Shape(format!(
                "system {label}: expected a 2g x g class matrix, got {}x{}",
                classes.rows(),
                classes.cols()
            )));
        }
        Ok(CurveSystem { label, classes })
    }

    /// Builds a system from class vectors of length `2g`.
    pub fn from_classes(label: Label, classes: &[IntVector], genus: usize) -> Result<Self, DiagramError> {
        if classes.len() != genus || classes.iter().any(|c| c.len() != 2 * genus) {
            return Err(DiagramError::Shape(format!(
                "system {label}: expected {genus} classes of length {}",
                2 * genus
            )));
        }
        Self::new(label, IntegerMatrix::from_columns(classes, 2 * genus))
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn genus(&self) -> usize {
        self.classes.cols()
    }

    pub fn classes(&self) -> &IntegerMatrix {
        &self.classes
    }

    pub fn class(&self, i: usize) -> IntVector {
        self.classes.column(i)
    }

    /// The Lagrangian `L_ε` spanned by the classes.
    pub fn lagrangian(&self) -> Subgroup {
        Subgroup::from_generators(&self.classes)
    }

    pub fn check(&self, surface: &SymplecticSurface) -> SystemCheck {
        let g = self.genus();
        let rank = self.classes.rank();
        let gram = surface.gram(&self.classes, &self.classes);
        let mut offending = Vec::new();
        for i in 0..g {
            for j in i + 1..g {
                if !gram[(i, j)].is_zero() {
                    offending.push((i + 1, j + 1));
                }
            }
        }
        let quotient = Subgroup::full(2 * g)
            .quotient(&self.lagrangian())
            .expect("every subgroup lies in the full lattice");
        SystemCheck {
            label: self.label,
            rank,
            rank_ok: rank == g,
            isotropic: offending.is_empty(),
            non_isotropic_pairs: offending,
            primitive: quotient.is_free(),
            quotient,
        }
    }

    fn relabel(mut self, label: Label) -> Self {
        self.label = label;
        self
    }
}

/// Matrix of intersection numbers `⟨Aᵢ, Bⱼ⟩_Σ`.
pub fn intersection_matrix(
    a: &CurveSystem,
    b: &CurveSystem,
    surface: &SymplecticSurface,
) -> Result<IntegerMatrix, DiagramError> {
    let g = surface.genus();
    if a.genus() != g || b.genus() != g {
        return Err(DiagramError::Shape(format!(
            "systems of genus {} and {} on a surface of genus {g}",
            a.genus(),
            b.genus()
        )));
    }
    Ok(surface.gram(&a.classes, &b.classes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemCheck {
    pub label: Label,
    pub rank: usize,
    pub rank_ok: bool,
    pub isotropic: bool,
    /// 1-based index pairs with nonzero pairing.
    pub non_isotropic_pairs: Vec<(usize, usize)>,
    /// `ℤ^{2g} / L_ε` is free, i.e. the classes span a direct summand.
    pub primitive: bool,
    pub quotient: AbelianGroup,
}

impl SystemCheck {
    pub fn ok(&self) -> bool {
        self.rank_ok && self.isotropic && self.primitive
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub pair: (Label, Label),
    /// `ℤ^{2g} / (L_ε + L_δ)`, i.e. `H₁` of the 3-manifold bounded by the pair.
    pub quotient: AbelianGroup,
    pub free: bool,
    pub k: usize,
}

/// Outcome of diagram validation. Every check is a *necessary* condition for
/// a genuine trisection diagram; passing all of them certifies nothing more.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub genus: usize,
    pub systems: Vec<SystemCheck>,
    pub pairs: Vec<PairCheck>,
    pub k_vector: Option<KVector>,
    pub supplied_k: Option<KVector>,
    pub valid: bool,
    pub notes: Vec<String>,
}

const NECESSARY_ONLY: &str =
    "checks are necessary conditions only; passing them does not certify a genuine trisection diagram";

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "genus {}", self.genus)?;
        for s in &self.systems {
            write!(
                f,
                "  system {}: rank {} ({}), isotropic {}, primitive {}",
                s.label,
                s.rank,
                if s.rank_ok { "ok" } else { "FAIL" },
                if s.isotropic { "yes" } else { "NO" },
                if s.primitive { "yes" } else { "NO" },
            )?;
            if !s.non_isotropic_pairs.is_empty() {
                write!(f, " (nonzero pairings at {:?})", s.non_isotropic_pairs)?;
            }
            if !s.primitive {
                write!(f, " (Z^2g/L = {})", s.quotient)?;
            }
            writeln!(f)?;
        }
        for p in &self.pairs {
            writeln!(
                f,
                "  pair ({},{}): H1 = {}{}",
                p.pair.0,
                p.pair.1,
                p.quotient,
                if p.free { format!(", k = {}", p.k) } else { " (has torsion: FAIL)".into() }
            )?;
        }
        match self.k_vector {
            Some(k) => writeln!(f, "  k-vector {k}")?,
            None => writeln!(f, "  k-vector undetermined")?,
        }
        if let Some(k) = self.supplied_k {
            writeln!(f, "  supplied k-vector {k}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        write!(f, "{}", if self.valid { "VALID" } else { "INVALID" })
    }
}

fn pair_checks(
    groups: [(Label, Label, AbelianGroup); 3],
) -> (Vec<PairCheck>, Option<KVector>) {
    let mut k = [0usize; 3];
    let mut all_free = true;
    let pairs = groups
        .into_iter()
        .map(|(a, b, q)| {
            let free = q.is_free();
            all_free &= free;
            k[k_slot(a, b)] = q.free_rank();
            PairCheck { pair: (a, b), k: q.free_rank(), free, quotient: q }
        })
        .collect();
    (pairs, all_free.then_some(KVector(k)))
}

/// Genus plus three curve systems on the standard symplectic surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrisectionDiagram {
    surface: SymplecticSurface,
    alpha: CurveSystem,
    beta: CurveSystem,
    gamma: CurveSystem,
}

impl TrisectionDiagram {
    pub fn new(
        genus: usize,
        alpha: IntegerMatrix,
        beta: IntegerMatrix,
        gamma: IntegerMatrix,
    ) -> Result<Self, DiagramError> {
        let systems = [(Label::Alpha, alpha), (Label::Beta, beta), (Label::Gamma, gamma)]
            .into_iter()
            .map(|(l, m)| {
                if m.rows() != 2 * genus || m.cols() != genus {
                    Err(DiagramError::Shape(format!(
                        "system {l}: expected {}x{genus} classes, got {}x{}",
                        2 * genus,
                        m.rows(),
                        m.cols()
                    )))
                } else {
                    CurveSystem::new(l, m)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let [alpha, beta, gamma]: [CurveSystem; 3] = systems.try_into().unwrap();
        Ok(TrisectionDiagram { surface: SymplecticSurface::new(genus), alpha, beta, gamma })
    }

    /// Builds a diagram from lists of class vectors (each of length `2g`).
    pub fn from_classes(
        genus: usize,
        alpha: &[IntVector],
        beta: &[IntVector],
        gamma: &[IntVector],
    ) -> Result<Self, DiagramError> {
        let a = CurveSystem::from_classes(Label::Alpha, alpha, genus)?;
        let b = CurveSystem::from_classes(Label::Beta, beta, genus)?;
        let c = CurveSystem::from_classes(Label::Gamma, gamma, genus)?;
        Self::new(genus, a.classes, b.classes, c.classes)
    }

    pub fn genus(&self) -> usize {
        self.surface.genus()
    }

    pub fn surface(&self) -> &SymplecticSurface {
        &self.surface
    }

    pub fn system(&self, label: Label) -> &CurveSystem {
        match label {
            Label::Alpha => &self.alpha,
            Label::Beta => &self.beta,
            Label::Gamma => &self.gamma,
        }
    }

    pub fn alpha(&self) -> &CurveSystem {
        &self.alpha
    }

    pub fn beta(&self) -> &CurveSystem {
        &self.beta
    }

    pub fn gamma(&self) -> &CurveSystem {
        &self.gamma
    }

    /// `_εQ_δ`
    pub fn q(&self, a: Label, b: Label) -> IntegerMatrix {
        self.surface.gram(self.system(a).classes(), self.system(b).classes())
    }

    /// The three intersection matrices `_αQ_β`, `_γQ_β`, `_αQ_γ` (k-vector unset).
    pub fn matrices(&self) -> MatrixDiagram {
        MatrixDiagram {
            genus: self.genus(),
            k: None,
            alpha_beta: self.q(Label::Alpha, Label::Beta),
            gamma_beta: self.q(Label::Gamma, Label::Beta),
            alpha_gamma: self.q(Label::Alpha, Label::Gamma),
        }
    }

    /// Returns the diagram with its systems permuted: the new `(α, β, γ)` are
    /// the old systems named by `order`.
    pub fn permuted(&self, order: [Label; 3]) -> Self {
        TrisectionDiagram {
            surface: self.surface.clone(),
            alpha: self.system(order[0]).clone().relabel(Label::Alpha),
            beta: self.system(order[1]).clone().relabel(Label::Beta),
            gamma: self.system(order[2]).clone().relabel(Label::Gamma),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let g = self.genus();
        let systems: Vec<SystemCheck> = Label::ALL.iter().map(|&l| self.system(l).check(&self.surface)).collect();
        let pair_group = |a: Label, b: Label| {
            let sum = self.system(a).lagrangian().sum(&self.system(b).lagrangian());
            (a, b, Subgroup::full(2 * g).quotient(&sum).expect("sum lies in the full lattice"))
        };
        let (pairs, k_vector) = pair_checks([
            pair_group(Label::Alpha, Label::Beta),
            pair_group(Label::Alpha, Label::Gamma),
            pair_group(Label::Beta, Label::Gamma),
        ]);
        let valid = systems.iter().all(SystemCheck::ok) && k_vector.is_some();
        ValidationReport {
            genus: g,
            systems,
            pairs,
            k_vector,
            supplied_k: None,
            valid,
            notes: vec![NECESSARY_ONLY.to_string()],
        }
    }
}

/// The three intersection matrices of a diagram.
///
/// Partners follow from antisymmetry of the pairing: `_βQ_α = -(_αQ_β)ᵀ`,
/// `_βQ_γ = -(_γQ_β)ᵀ`, `_γQ_α = -(_αQ_γ)ᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixDiagram {
    pub genus: usize,
    pub k: Option<KVector>,
    pub alpha_beta: IntegerMatrix,
    pub gamma_beta: IntegerMatrix,
    pub alpha_gamma: IntegerMatrix,
}

impl MatrixDiagram {
    pub fn new(
        genus: usize,
        k: Option<KVector>,
        alpha_beta: IntegerMatrix,
        gamma_beta: IntegerMatrix,
        alpha_gamma: IntegerMatrix,
    ) -> Result<Self, DiagramError> {
        for (name, m) in [("alpha_beta", &alpha_beta), ("gamma_beta", &gamma_beta), ("alpha_gamma", &alpha_gamma)] {
            if m.rows() != genus || m.cols() != genus {
                return Err(DiagramError::Shape(format!(
                    "{name}: expected {genus}x{genus}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(MatrixDiagram { genus, k, alpha_beta, gamma_beta, alpha_gamma })
    }

    /// `_εQ_δ` for any ordered pair; the diagonal pairs are zero (isotropy).
    pub fn q(&self, a: Label, b: Label) -> IntegerMatrix {
        use Label::*;
        match (a, b) {
            (Alpha, Beta) => self.alpha_beta.clone(),
            (Beta, Alpha) => -self.alpha_beta.transpose(),
            (Gamma, Beta) => self.gamma_beta.clone(),
            (Beta, Gamma) => -self.gamma_beta.transpose(),
            (Alpha, Gamma) => self.alpha_gamma.clone(),
            (Gamma, Alpha) => -self.alpha_gamma.transpose(),
            _ => IntegerMatrix::zeros(self.genus, self.genus),
        }
    }

    /// Necessary conditions readable from the matrices alone: each pairwise
    /// matrix must present a free group, whose rank is that pair's `k`.
    pub fn validate(&self) -> ValidationReport {
        let group = |a: Label, b: Label| (a, b, AbelianGroup::cokernel(&self.q(a, b)));
        let (pairs, k_vector) = pair_checks([
            group(Label::Alpha, Label::Beta),
            group(Label::Alpha, Label::Gamma),
            group(Label::Beta, Label::Gamma),
        ]);
        let mut notes = vec![NECESSARY_ONLY.to_string()];
        let mut valid = k_vector.is_some();
        if let (Some(given), Some(derived)) = (self.k, k_vector) {
            if given != derived {
                valid = false;
                notes.push(format!("supplied k-vector {given} disagrees with derived {derived}"));
            }
        }
        ValidationReport { genus: self.genus, systems: Vec::new(), pairs, k_vector, supplied_k: self.k, valid, notes }
    }

    /// Searches for curve classes on the standard surface whose intersection
    /// matrices are exactly these. Deterministic; for `k₁ = 0` the
    /// realization is forced, otherwise a bounded search over the free
    /// parameters is made.
    pub fn realize(&self) -> Option<TrisectionDiagram> {
        realize(self)
    }
}

/// Number of free isotropy parameters explored per direction.
const REALIZE_SEARCH_DIMS: usize = 6;

fn realize(md: &MatrixDiagram) -> Option<TrisectionDiagram> {
    let g = md.genus;
    if g == 0 {
        return TrisectionDiagram::new(0, IntegerMatrix::zeros(0, 0), IntegerMatrix::zeros(0, 0), IntegerMatrix::zeros(0, 0)).ok();
    }
    // Normalize α, β so that the α-β block is the partial identity I_g^r.
    let snf = smith_normal_form(&md.alpha_beta);
    let d = snf.invariant_factors();
    if d.iter().any(|x| !x.is_one()) {
        return None;
    }
    let r = d.len();
    let k1 = g - r;
    let ag = &snf.u * &md.alpha_gamma;
    let bg = &snf.v.transpose() * &md.q(Label::Beta, Label::Gamma);

    // β'_j for j ≥ r lies in L_α ∩ L_β = span(e_r..e_g); pick its e-coordinates C.
    let q2 = ag.select_rows(r..g);
    let r2 = bg.select_rows(r..g);
    let c = unimodular_coefficients(&q2, &r2)?;

    let mut beta_p = IntegerMatrix::zeros(2 * g, g);
    for j in 0..r {
        beta_p[(g + j, j)] = BigInt::one();
    }
    for j in 0..k1 {
        for i in 0..k1 {
            beta_p[(r + i, r + j)] = c[(i, j)].clone();
        }
    }
    let alpha = IntegerMatrix::identity(g).vstack(&IntegerMatrix::zeros(g, g));
    let alpha = &alpha * &snf.u_inv.transpose();
    let beta = &beta_p * &snf.v_inv;

    // γ = [P; Q]: Q = α'-pairings, P rows < r from β'-pairings, P rows ≥ r solve isotropy.
    let mut p = IntegerMatrix::zeros(g, g);
    for i in 0..r {
        for j in 0..g {
            p[(i, j)] = -bg[(i, j)].clone();
        }
    }
    let nvars = k1 * g;
    let var = |k: usize, col: usize| (k - r) * g + col;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..g {
        for j in i + 1..g {
            let mut row = vec![BigInt::zero(); nvars];
            let mut known = BigInt::zero();
            for k in 0..g {
                if k < r {
                    known += &p[(k, i)] * &ag[(k, j)] - &ag[(k, i)] * &p[(k, j)];
                } else {
                    row[var(k, i)] += &ag[(k, j)];
                    row[var(k, j)] -= &ag[(k, i)];
                }
            }
            rows.push(row);
            rhs.push(-known);
        }
    }
    let system = IntegerMatrix::from_rows(rows, nvars);
    let z0 = solve_integer(&system, &rhs)?;
    let homogeneous = kernel_matrix(&system);
    let dims = homogeneous.cols().min(REALIZE_SEARCH_DIMS);

    let build = |z: &IntVector| -> Option<TrisectionDiagram> {
        let mut full_p = p.clone();
        for k in r..g {
            for col in 0..g {
                full_p[(k, col)] = z[var(k, col)].clone();
            }
        }
        let gamma = full_p.vstack(&ag);
        let d = TrisectionDiagram::new(g, alpha.clone(), beta.clone(), gamma).ok()?;
        let ok = d.validate().valid
            && d.q(Label::Alpha, Label::Beta) == md.alpha_beta
            && d.q(Label::Gamma, Label::Beta) == md.gamma_beta
            && d.q(Label::Alpha, Label::Gamma) == md.alpha_gamma;
        ok.then_some(d)
    };

    // t ranges over {0, 1, -1}^dims in lexicographic order, zero first.
    let total = 3usize.pow(dims as u32);
    for idx in 0..total {
        let mut z = z0.clone();
        let mut rest = idx;
        for col in 0..dims {
            let t = match rest % 3 {
                0 => 0i64,
                1 => 1,
                _ => -1,
            };
            rest /= 3;
            if t != 0 {
                for (zi, hi) in z.iter_mut().zip(homogeneous.column(col)) {
                    *zi += hi * t;
                }
            }
        }
        if let Some(d) = build(&z) {
            return Some(d);
        }
    }
    None
}

/// A unimodular `C` (`k x k`) with `Cᵀ·Q₂ = R₂`, if one exists.
fn unimodular_coefficients(q2: &IntegerMatrix, r2: &IntegerMatrix) -> Option<IntegerMatrix> {
    let k = q2.rows();
    if k == 0 {
        return Some(IntegerMatrix::zeros(0, 0));
    }
    // Q₂ᵀ·C = R₂ᵀ; with U·Q₂ᵀ·V = D write C = V·W, so D·W = U·R₂ᵀ.
    let snf = smith_normal_form(&q2.transpose());
    let d = snf.invariant_factors();
    let rhs = &snf.u * &r2.transpose();
    let rho = d.len();
    for i in rho..rhs.rows() {
        if (0..k).any(|j| !rhs[(i, j)].is_zero()) {
            return None;
        }
    }
    let mut top = IntegerMatrix::zeros(rho, k);
    for i in 0..rho {
        for j in 0..k {
            let (quot, rem) = num_integer::Integer::div_rem(&rhs[(i, j)], &d[i]);
            if !rem.is_zero() {
                return None;
            }
            top[(i, j)] = quot;
        }
    }
    // Complete the fixed rows of W to a unimodular matrix.
    let completion = complete_to_unimodular(&top.transpose())?;
    let rest = completion.select_columns(rho..k).transpose();
    let w = top.vstack(&rest);
    Some(&snf.v * &w)
}

/// A diagram that has passed validation, with its k-vector fixed.
///
/// All homology and form computations consume only the intersection
/// matrices; the curve classes (given, or realized on demand for
/// matrix-only input) feed the symmetric cross-checks.
#[derive(Clone, Debug)]
pub struct Trisection {
    matrices: MatrixDiagram,
    curves: OnceLock<Option<TrisectionDiagram>>,
}

impl Trisection {
    pub fn from_curves(diagram: TrisectionDiagram) -> Result<Self, DiagramError> {
        let report = diagram.validate();
        if !report.valid {
            return Err(DiagramError::Invalid(Box::new(report)));
        }
        let mut matrices = diagram.matrices();
        matrices.k = report.k_vector;
        let curves = OnceLock::new();
        let _ = curves.set(Some(diagram));
        Ok(Trisection { matrices, curves })
    }

    pub fn from_matrices(mut matrices: MatrixDiagram) -> Result<Self, DiagramError> {
        let report = matrices.validate();
        if !report.valid {
            return Err(DiagramError::Invalid(Box::new(report)));
        }
        matrices.k = report.k_vector;
        Ok(Trisection { matrices, curves: OnceLock::new() })
    }

    pub fn genus(&self) -> usize {
        self.matrices.genus
    }

    pub fn k(&self) -> KVector {
        self.matrices.k.expect("validated diagrams carry a k-vector")
    }

    pub fn matrices(&self) -> &MatrixDiagram {
        &self.matrices
    }

    pub fn q(&self, a: Label, b: Label) -> IntegerMatrix {
        self.matrices.q(a, b)
    }

    /// Curve classes realizing the matrices (given or reconstructed).
    pub fn curves(&self) -> Option<&TrisectionDiagram> {
        self.curves.get_or_init(|| self.matrices.realize()).as_ref()
    }
}

/// Homology of the 3-manifold `H_A ∪ H_B` described by a pair of systems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeegaardHomology {
    pub h1: AbelianGroup,
    pub h2_rank: usize,
}

fn check_pair(a: &CurveSystem, b: &CurveSystem) -> Result<SymplecticSurface, DiagramError> {
    if a.genus() != b.genus() {
        return Err(DiagramError::Shape("systems on surfaces of different genus".into()));
    }
    let surface = SymplecticSurface::new(a.genus());
    for s in [a, b] {
        let c = s.check(&surface);
        if !c.ok() {
            let reason = if !c.rank_ok {
                format!("rank {} < {}", c.rank, s.genus())
            } else if !c.isotropic {
                format!("nonzero pairings at {:?}", c.non_isotropic_pairs)
            } else {
                format!("classes do not span a direct summand (Z^2g/L = {})", c.quotient)
            };
            return Err(DiagramError::InvalidSystem { label: s.label(), reason });
        }
    }
    Ok(surface)
}

/// `H₁ = ℤ^{2g}/(L_A + L_B)` and `rank H₂ = rank(L_A ∩ L_B)`.
pub fn heegaard_homology(a: &CurveSystem, b: &CurveSystem) -> Result<HeegaardHomology, DiagramError> {
    check_pair(a, b)?;
    let (la, lb) = (a.lagrangian(), b.lagrangian());
    let h1 = Subgroup::full(2 * a.genus()).quotient(&la.sum(&lb)).expect("sum lies in the full lattice");
    Ok(HeegaardHomology { h1, h2_rank: la.intersection(&lb).rank() })
}

/// Linking number of two null-homologous classes in `H_A ∪ H_B`.
///
/// Finds `j ∈ L_A` with `⟨j, x⟩ = ⟨J, x⟩` for every `x ∈ L_B` and returns
/// `⟨j, K⟩`. The result does not depend on which `j` is found.
pub fn linking_number(
    j: &[BigInt],
    k: &[BigInt],
    a: &CurveSystem,
    b: &CurveSystem,
) -> Result<BigInt, DiagramError> {
    let lift = linking_lift(j, k, a, b)?;
    let surface = SymplecticSurface::new(a.genus());
    Ok(surface.pair(&lift, k))
}

/// The class `j ∈ L_A` used by [`linking_number`].
pub fn linking_lift(
    j: &[BigInt],
    k: &[BigInt],
    a: &CurveSystem,
    b: &CurveSystem,
) -> Result<IntVector, DiagramError> {
    let surface = check_pair(a, b)?;
    let g = a.genus();
    if j.len() != 2 * g || k.len() != 2 * g {
        return Err(DiagramError::Shape(format!("classes must have length {}", 2 * g)));
    }
    let hh = heegaard_homology(a, b)?;
    if !hh.h1.is_free() {
        return Err(DiagramError::TorsionH1(hh.h1));
    }
    let null = a.lagrangian().sum(&b.lagrangian());
    if !null.contains(j) {
        return Err(DiagramError::NotNullHomologous { which: "J" });
    }
    if !null.contains(k) {
        return Err(DiagramError::NotNullHomologous { which: "K" });
    }
    let w: IntVector = (0..g).map(|i| surface.pair(j, &b.class(i))).collect();
    let q_ab = surface.gram(a.classes(), b.classes());
    let c = solve_integer(&q_ab.transpose(), &w).ok_or(DiagramError::NotNullHomologous { which: "J" })?;
    Ok(a.classes().mul_vec(&c))
}
