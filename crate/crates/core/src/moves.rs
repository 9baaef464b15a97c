//! Algebraic moves on the intersection matrices of a trisection diagram.
//!
//! Moves act on the triple `(_αQ_β, _γQ_β, _αQ_γ)` only. Indices are
//! 0-based in code and 1-based in the textual move log. A slide
//! `Slide(ε, i, j, s)` replaces `ε_j` by `ε_j + s·ε_i`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{KVector, Label, MatrixDiagram, Trisection};
use crate::form::{form_by_definition, form_invariants};
use crate::homology::homology_profile;
use crate::linalg::{complete_to_unimodular, IntegerMatrix, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("index {index} out of range for genus {genus}")]
    Index { index: usize, genus: usize },
    #[error("move needs two distinct indices, got {0} twice")]
    SameIndex(usize),
    #[error("cannot parse move '{0}'")]
    Parse(String),
    #[error("line {line}: {source}")]
    Log { line: usize, source: Box<MoveError> },
    #[error("alpha-Q-beta presents a group with torsion; the diagram is invalid")]
    Torsion,
    #[error("gamma-Q-beta is not unimodular (det {0}) although k3 = 0")]
    NotUnimodular(BigInt),
    #[error("congruence reduction needs alpha-Q-beta = gamma-Q-beta = Id")]
    NotNormalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: &BigInt) -> Sign {
        if x.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn big(self) -> BigInt {
        BigInt::from(self.value())
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    OrientFlip { system: Label, i: usize },
    Swap { system: Label, i: usize, j: usize },
    /// `ε_j ← ε_j + sign·ε_i`
    Slide { system: Label, i: usize, j: usize, sign: Sign },
    /// `α_j ← α_j + sign·α_i`, `γ_j ← γ_j + sign·γ_i`, `β_i ← β_i − sign·β_j`.
    DualDoubleSlide { i: usize, j: usize, sign: Sign },
}

impl Move {
    fn indices(&self) -> (usize, Option<usize>) {
        match *self {
            Move::OrientFlip { i, .. } => (i, None),
            Move::Swap { i, j, .. } | Move::Slide { i, j, .. } | Move::DualDoubleSlide { i, j, .. } => (i, Some(j)),
        }
    }

    pub fn check(&self, genus: usize) -> Result<(), MoveError> {
        let (i, j) = self.indices();
        for index in std::iter::once(i).chain(j) {
            if index >= genus {
                return Err(MoveError::Index { index: index + 1, genus });
            }
        }
        if j == Some(i) {
            return Err(MoveError::SameIndex(i + 1));
        }
        Ok(())
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::OrientFlip { system, i } => write!(f, "flip {system} {}", i + 1),
            Move::Swap { system, i, j } => write!(f, "swap {system} {} {}", i + 1, j + 1),
            Move::Slide { system, i, j, sign } => write!(f, "slide {system} {} {} {sign}", i + 1, j + 1),
            Move::DualDoubleSlide { i, j, sign } => write!(f, "dslide {} {} {sign}", i + 1, j + 1),
        }
    }
}

impl FromStr for Move {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, MoveError> {
        let bad = || MoveError::Parse(s.trim().to_string());
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let index = |t: &str| -> Result<usize, MoveError> {
            match t.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n - 1),
                _ => Err(bad()),
            }
        };
        let sign = |t: &str| match t {
            "+" | "+1" => Ok(Sign::Plus),
            "-" | "-1" => Ok(Sign::Minus),
            _ => Err(bad()),
        };
        let label = |t: &str| t.parse::<Label>().map_err(|_| bad());
        match tokens.as_slice() {
            ["flip", l, i] => Ok(Move::OrientFlip { system: label(l)?, i: index(i)? }),
            ["swap", l, i, j] => Ok(Move::Swap { system: label(l)?, i: index(i)?, j: index(j)? }),
            ["slide", l, i, j, s] => {
                Ok(Move::Slide { system: label(l)?, i: index(i)?, j: index(j)?, sign: sign(s)? })
            }
            ["dslide", i, j, s] => Ok(Move::DualDoubleSlide { i: index(i)?, j: index(j)?, sign: sign(s)? }),
            _ => Err(bad()),
        }
    }
}

/// Parses a move log: one move per line, blank lines and `#` comments ignored.
pub fn parse_log(text: &str) -> Result<Vec<Move>, MoveError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(n, l)| l.parse().map_err(|e| MoveError::Log { line: n + 1, source: Box::new(e) }))
        .collect()
}

pub fn format_log(moves: &[Move]) -> String {
    moves.iter().map(|m| format!("{m}\n")).collect()
}

/// The evolving triple of intersection matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveState {
    pub genus: usize,
    pub k: KVector,
    pub alpha_beta: IntegerMatrix,
    pub gamma_beta: IntegerMatrix,
    pub alpha_gamma: IntegerMatrix,
    /// Every move applied since the state was created.
    pub log: Vec<Move>,
}

impl MoveState {
    pub fn new(t: &Trisection) -> Self {
        let m = t.matrices();
        MoveState {
            genus: m.genus,
            k: t.k(),
            alpha_beta: m.alpha_beta.clone(),
            gamma_beta: m.gamma_beta.clone(),
            alpha_gamma: m.alpha_gamma.clone(),
            log: Vec::new(),
        }
    }

    pub fn matrices(&self) -> MatrixDiagram {
        MatrixDiagram {
            genus: self.genus,
            k: Some(self.k),
            alpha_beta: self.alpha_beta.clone(),
            gamma_beta: self.gamma_beta.clone(),
            alpha_gamma: self.alpha_gamma.clone(),
        }
    }

    /// Same matrices, empty log.
    pub fn same_matrices(&self, other: &MoveState) -> bool {
        self.alpha_beta == other.alpha_beta
            && self.gamma_beta == other.gamma_beta
            && self.alpha_gamma == other.alpha_gamma
    }

    pub fn apply(&self, m: Move) -> Result<MoveState, MoveError> {
        let mut next = self.clone();
        next.apply_in_place(m)?;
        Ok(next)
    }

    pub fn apply_all(&self, moves: &[Move]) -> Result<MoveState, MoveError> {
        let mut next = self.clone();
        for &m in moves {
            next.apply_in_place(m)?;
        }
        Ok(next)
    }

    pub fn apply_in_place(&mut self, m: Move) -> Result<(), MoveError> {
        m.check(self.genus)?;
        self.act(m);
        self.log.push(m);
        Ok(())
    }

    fn act(&mut self, m: Move) {
        use Label::*;
        match m {
            Move::OrientFlip { system, i } => match system {
                Alpha => {
                    self.alpha_beta.negate_row(i);
                    self.alpha_gamma.negate_row(i);
                }
                Beta => {
                    self.alpha_beta.negate_col(i);
                    self.gamma_beta.negate_col(i);
                }
                Gamma => {
                    self.gamma_beta.negate_row(i);
                    self.alpha_gamma.negate_col(i);
                }
            },
            Move::Swap { system, i, j } => match system {
                Alpha => {
                    self.alpha_beta.swap_rows(i, j);
                    self.alpha_gamma.swap_rows(i, j);
                }
                Beta => {
                    self.alpha_beta.swap_cols(i, j);
                    self.gamma_beta.swap_cols(i, j);
                }
                Gamma => {
                    self.gamma_beta.swap_rows(i, j);
                    self.alpha_gamma.swap_cols(i, j);
                }
            },
            Move::Slide { system, i, j, sign } => {
                let s = sign.big();
                match system {
                    Alpha => {
                        self.alpha_beta.add_row_multiple(j, i, &s);
                        self.alpha_gamma.add_row_multiple(j, i, &s);
                    }
                    Beta => {
                        self.alpha_beta.add_col_multiple(j, i, &s);
                        self.gamma_beta.add_col_multiple(j, i, &s);
                    }
                    Gamma => {
                        self.gamma_beta.add_row_multiple(j, i, &s);
                        self.alpha_gamma.add_col_multiple(j, i, &s);
                    }
                }
            }
            Move::DualDoubleSlide { i, j, sign } => {
                self.act(Move::Slide { system: Alpha, i, j, sign });
                self.act(Move::Slide { system: Gamma, i, j, sign });
                self.act(Move::Slide { system: Beta, i: j, j: i, sign: -sign });
            }
        }
    }

    /// Conditions `_αQ_β = Id` and `_γQ_β = Id`.
    pub fn is_normalized(&self) -> bool {
        self.alpha_beta.is_identity() && self.gamma_beta.is_identity()
    }
}

/// Applies moves to a state while recording them.
struct Recorder {
    state: MoveState,
    moves: Vec<Move>,
}

impl Recorder {
    fn new(state: MoveState) -> Self {
        Recorder { state, moves: Vec::new() }
    }

    fn go(&mut self, m: Move) {
        self.state.apply_in_place(m).expect("reducers only emit in-range moves");
        self.moves.push(m);
    }

    /// `|k|` slides of `ε_i` into `ε_j` with the sign of `k`.
    fn slide_times(&mut self, system: Label, i: usize, j: usize, k: &BigInt) {
        let sign = Sign::of(k);
        let mut n = k.abs();
        while !n.is_zero() {
            self.go(Move::Slide { system, i, j, sign });
            n -= 1;
        }
    }

    fn finish(self) -> (MoveState, Vec<Move>) {
        (self.state, self.moves)
    }
}

fn min_abs_position<I: Iterator<Item = (usize, usize)>>(m: &IntegerMatrix, cells: I) -> Option<(usize, usize)> {
    cells.filter(|&(i, j)| !m[(i, j)].is_zero()).min_by_key(|&(i, j)| m[(i, j)].abs())
}

/// Drives `_αQ_β` to `I_g^{g−k₁}` with `α`-row and `β`-column moves.
pub fn normalize_pair(state: &MoveState) -> Result<(MoveState, Vec<Move>), MoveError> {
    let g = state.genus;
    let mut rec = Recorder::new(state.clone());
    let q = |r: &Recorder| r.state.alpha_beta.clone();
    for t in 0..g {
        let m = q(&rec);
        let Some((pi, pj)) = min_abs_position(&m, (t..g).flat_map(|i| (t..g).map(move |j| (i, j)))) else {
            break;
        };
        if pi != t {
            rec.go(Move::Swap { system: Label::Alpha, i: t, j: pi });
        }
        if pj != t {
            rec.go(Move::Swap { system: Label::Beta, i: t, j: pj });
        }
        loop {
            let m = q(&rec);
            let pivot = m[(t, t)].clone();
            for i in t + 1..g {
                let quo = &m[(i, t)] / &pivot;
                rec.slide_times(Label::Alpha, t, i, &-quo);
            }
            let m = q(&rec);
            for j in t + 1..g {
                let quo = &m[(t, j)] / &pivot;
                rec.slide_times(Label::Beta, t, j, &-quo);
            }
            let m = q(&rec);
            let rest = (t + 1..g).map(|i| (i, t)).chain((t + 1..g).map(|j| (t, j)));
            if let Some((i, j)) = min_abs_position(&m, rest) {
                if i != t {
                    rec.go(Move::Swap { system: Label::Alpha, i: t, j: i });
                } else {
                    rec.go(Move::Swap { system: Label::Beta, i: t, j });
                }
                continue;
            }
            if !m[(t, t)].abs().is_one() {
                let blocker = (t + 1..g)
                    .flat_map(|i| (t + 1..g).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[(i, j)].is_multiple_of(&m[(t, t)]));
                match blocker {
                    Some((i, _)) => {
                        rec.go(Move::Slide { system: Label::Alpha, i, j: t, sign: Sign::Plus });
                        continue;
                    }
                    None => return Err(MoveError::Torsion),
                }
            }
            if m[(t, t)].is_negative() {
                rec.go(Move::OrientFlip { system: Label::Alpha, i: t });
            }
            break;
        }
    }
    Ok(rec.finish())
}

/// `γ`-row moves bringing `_γQ_β` to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaReduction {
    pub state: MoveState,
    pub moves: Vec<Move>,
    /// `false` when `_γQ_β` is singular (`k₃ > 0`); the result is then only a
    /// row-echelon form.
    pub complete: bool,
}

pub fn reduce_gamma_beta(state: &MoveState) -> Result<GammaReduction, MoveError> {
    let g = state.genus;
    let det = state.gamma_beta.determinant();
    let unimodular = det.abs().is_one() || g == 0;
    if state.k.k3() == 0 && !unimodular {
        return Err(MoveError::NotUnimodular(det));
    }
    let mut rec = Recorder::new(state.clone());
    let mut row = 0;
    for col in 0..g {
        if row == g {
            break;
        }
        loop {
            let m = rec.state.gamma_beta.clone();
            let Some((pi, _)) = min_abs_position(&m, (row..g).map(|i| (i, col))) else {
                break;
            };
            if pi != row {
                rec.go(Move::Swap { system: Label::Gamma, i: row, j: pi });
            }
            let m = rec.state.gamma_beta.clone();
            let mut clean = true;
            for i in row + 1..g {
                let quo = &m[(i, col)] / &m[(row, col)];
                rec.slide_times(Label::Gamma, row, i, &-quo);
                clean &= rec.state.gamma_beta[(i, col)].is_zero();
            }
            if clean {
                if rec.state.gamma_beta[(row, col)].is_negative() {
                    rec.go(Move::OrientFlip { system: Label::Gamma, i: row });
                }
                row += 1;
                break;
            }
        }
    }
    let complete = unimodular && row == g;
    if complete {
        for c in (0..g).rev() {
            for i in 0..c {
                let k = -rec.state.gamma_beta[(i, c)].clone();
                rec.slide_times(Label::Gamma, c, i, &k);
            }
        }
    }
    let (state, moves) = rec.finish();
    Ok(GammaReduction { state, moves, complete })
}

/// Block of the reduced `_αQ_γ`, with 0-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Block {
    /// `(±1)` at one index.
    Unit {
        index: usize,
        #[serde(serialize_with = "ser_bigint")]
        value: BigInt,
    },
    /// `[[0,1],[1,0]]` on two indices.
    Hyperbolic { indices: [usize; 2] },
    /// A nondegenerate block this reducer could not split further.
    Residual { indices: Vec<usize>, matrix: IntegerMatrix },
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    crate::bigint_json(x).serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub blocks: Vec<Block>,
    /// Indices spanning the radical (zero rows and columns at the end).
    pub radical: Vec<usize>,
    /// Accumulated unimodular `P` with `Pᵀ·Q₀·P = Q′`.
    pub transform: IntegerMatrix,
    pub congruence_verified: bool,
    /// `_αQ_β = _γQ_β = Id` held after every move.
    pub conditions_held: bool,
}

impl CongruenceReport {
    /// Even blocks (hyperbolic or residual) that remain unsplit.
    pub fn residual_even_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| !matches!(b, Block::Unit { .. })).count()
    }
}

impl fmt::Display for CongruenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            match b {
                Block::Unit { index, value } => writeln!(f, "  ({value}) at {}", index + 1)?,
                Block::Hyperbolic { indices } => writeln!(
                    f,
                    "  hyperbolic block [[0,1],[1,0]] at {},{} (even; not split by this reducer)",
                    indices[0] + 1,
                    indices[1] + 1
                )?,
                Block::Residual { indices, matrix } => {
                    let shown: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
                    writeln!(f, "  residual block {matrix} at {} (not split by this reducer)", shown.join(","))?
                }
            }
        }
        if !self.radical.is_empty() {
            writeln!(f, "  radical of rank {}", self.radical.len())?;
        }
        write!(
            f,
            "  P^T Q P = Q': {}; alpha-Q-beta = gamma-Q-beta = Id held throughout: {}",
            if self.congruence_verified { "verified" } else { "FAILED" },
            if self.conditions_held { "yes" } else { "NO" }
        )
    }
}

/// Symmetric elementary operation on `_αQ_γ` realized by paired moves.
#[derive(Clone, Copy, Debug)]
enum Cong {
    /// `col_j += s·col_i` and `row_j += s·row_i`.
    Add { i: usize, j: usize, s: Sign },
    Swap(usize, usize),
    Negate(usize),
}

impl Cong {
    fn inverse(self) -> Cong {
        match self {
            Cong::Add { i, j, s } => Cong::Add { i, j, s: -s },
            other => other,
        }
    }
}

struct Congruence {
    rec: Recorder,
    p: IntegerMatrix,
    conditions_held: bool,
}

impl Congruence {
    fn q(&self) -> &IntegerMatrix {
        &self.rec.state.alpha_gamma
    }

    fn op(&mut self, c: Cong) {
        match c {
            Cong::Add { i, j, s } => {
                self.rec.go(Move::DualDoubleSlide { i, j, sign: s });
                self.p.add_col_multiple(j, i, &s.big());
            }
            Cong::Swap(i, j) => {
                if i == j {
                    return;
                }
                for system in Label::ALL {
                    self.rec.go(Move::Swap { system, i, j });
                }
                self.p.swap_cols(i, j);
            }
            Cong::Negate(i) => {
                for system in Label::ALL {
                    self.rec.go(Move::OrientFlip { system, i });
                }
                self.p.negate_col(i);
            }
        }
        self.conditions_held &= self.rec.state.is_normalized();
    }

    /// `col_j += k·col_i` as `|k|` single steps.
    fn add_times(&mut self, i: usize, j: usize, k: &BigInt) {
        let s = Sign::of(k);
        let mut n = k.abs();
        while !n.is_zero() {
            self.op(Cong::Add { i, j, s });
            n -= 1;
        }
    }

    /// Replaces the basis vectors at `idx` by `b'_c = Σ_r p[r][c]·b_{idx[r]}`.
    fn basis_change(&mut self, idx: &[usize], p: &IntegerMatrix) {
        let n = idx.len();
        let mut m = p.clone();
        let mut ops: Vec<(Cong, BigInt)> = Vec::new();
        let mut record = |m: &mut IntegerMatrix, c: Cong, k: BigInt| {
            match c {
                Cong::Add { i, j, .. } => m.add_col_multiple(j, i, &k),
                Cong::Swap(i, j) => m.swap_cols(i, j),
                Cong::Negate(i) => m.negate_col(i),
            }
            ops.push((c, k));
        };
        for t in 0..n {
            loop {
                let (pj, _) = (t..n)
                    .filter(|&j| !m[(t, j)].is_zero())
                    .map(|j| (j, m[(t, j)].abs()))
                    .min_by(|a, b| a.1.cmp(&b.1))
                    .expect("basis change must be unimodular");
                if pj != t {
                    record(&mut m, Cong::Swap(t, pj), BigInt::one());
                }
                let mut clean = true;
                for j in t + 1..n {
                    let quo = &m[(t, j)] / &m[(t, t)];
                    if !quo.is_zero() {
                        record(&mut m, Cong::Add { i: t, j, s: Sign::Plus }, -quo);
                    }
                    clean &= m[(t, j)].is_zero();
                }
                if clean {
                    break;
                }
            }
            assert!(m[(t, t)].abs().is_one(), "basis change must be unimodular");
            if m[(t, t)].is_negative() {
                record(&mut m, Cong::Negate(t), BigInt::one());
            }
        }
        for i in (1..n).rev() {
            for j in 0..i {
                let k = -m[(i, j)].clone();
                if !k.is_zero() {
                    record(&mut m, Cong::Add { i, j, s: Sign::Plus }, k);
                }
            }
        }
        debug_assert!(m.is_identity());
        for (c, k) in ops.into_iter().rev() {
            match c.inverse() {
                Cong::Add { i, j, .. } => self.add_times(idx[i], idx[j], &-k),
                Cong::Swap(i, j) => self.op(Cong::Swap(idx[i], idx[j])),
                Cong::Negate(i) => self.op(Cong::Negate(idx[i])),
            }
        }
    }

    fn weight(&self, active: &[usize]) -> BigInt {
        let q = self.q();
        active.iter().flat_map(|&i| active.iter().map(move |&j| q[(i, j)].abs())).sum()
    }

    /// Change in `Σ|entries|` from `Add { i, j, s }`.
    fn delta(&self, active: &[usize], i: usize, j: usize, s: &BigInt) -> BigInt {
        let q = self.q();
        let mut d = BigInt::zero();
        for &k in active {
            if k == j {
                continue;
            }
            let new = &q[(j, k)] + s * &q[(i, k)];
            d += (new.abs() - q[(j, k)].abs()) * 2;
        }
        let new_diag: BigInt = &q[(j, j)] + s * &q[(i, j)] * 2 + &q[(i, i)];
        d + new_diag.abs() - q[(j, j)].abs()
    }

    /// Applies weight-decreasing `dslide`s until none helps.
    fn local_search(&mut self, active: &[usize]) {
        loop {
            let mut best: Option<(BigInt, Cong)> = None;
            for &i in active {
                for &j in active {
                    if i == j {
                        continue;
                    }
                    for s in [Sign::Plus, Sign::Minus] {
                        let d = self.delta(active, i, j, &s.big());
                        if d.is_negative() && best.as_ref().is_none_or(|(b, _)| d < *b) {
                            best = Some((d, Cong::Add { i, j, s }));
                        }
                    }
                }
            }
            match best {
                Some((_, c)) => self.op(c),
                None => break,
            }
        }
        debug_assert!(self.weight(active) >= BigInt::zero());
    }

    /// Clears row and column `x` outside `x` using the unit pivot `Q_xx`.
    fn clear_unit(&mut self, x: usize, others: &[usize]) {
        let e = self.q()[(x, x)].clone();
        for &k in others {
            let a = self.q()[(x, k)].clone();
            self.add_times(x, k, &(-a * &e));
        }
    }

    /// Clears rows `x, y` outside the unimodular block on `x, y`.
    fn clear_block(&mut self, x: usize, y: usize, others: &[usize]) {
        let q = self.q();
        let b = IntegerMatrix::from_rows(
            vec![vec![q[(x, x)].clone(), q[(x, y)].clone()], vec![q[(y, x)].clone(), q[(y, y)].clone()]],
            2,
        );
        let inv = b.unimodular_inverse().expect("block is unimodular");
        for &k in others {
            let q = self.q();
            let v = [q[(x, k)].clone(), q[(y, k)].clone()];
            let a = -(&inv[(0, 0)] * &v[0] + &inv[(0, 1)] * &v[1]);
            let c = -(&inv[(1, 0)] * &v[0] + &inv[(1, 1)] * &v[1]);
            self.add_times(x, k, &a);
            self.add_times(y, k, &c);
        }
    }

    /// Congruence on the unimodular 2x2 block `(x, y)` to a form with a unit
    /// diagonal entry or the hyperbolic form.
    fn reduce_pair(&mut self, x: usize, y: usize) {
        let entry = |s: &Self, i: usize, j: usize| s.q()[(i, j)].clone();
        let det = entry(self, x, x) * entry(self, y, y) - entry(self, x, y) * entry(self, x, y);
        if det.is_one() {
            // Definite: Lagrange reduction until a diagonal entry is ±1.
            loop {
                let (a, b, c) = (entry(self, x, x), entry(self, x, y), entry(self, y, y));
                if a.abs().is_one() || c.abs().is_one() {
                    return;
                }
                if a.abs() > c.abs() {
                    self.op(Cong::Swap(x, y));
                    continue;
                }
                // Nearest integer to b/a.
                let sa = if a.is_negative() { -BigInt::one() } else { BigInt::one() };
                let num: BigInt = &b * &sa * 2 + a.abs();
                let quo: BigInt = num.div_floor(&(a.abs() * 2)) * &sa;
                if quo.is_zero() {
                    return;
                }
                self.add_times(x, y, &-quo);
            }
        }
        let (a, b, c) = (entry(self, x, x), entry(self, x, y), entry(self, y, y));
        if a.abs().is_one() || c.abs().is_one() {
            return;
        }
        // Indefinite with b² − ac = 1: v = (1 − b, a) is isotropic.
        let (p, r) = if a.is_zero() {
            (BigInt::one(), BigInt::zero())
        } else {
            let (p, r) = (BigInt::one() - &b, a.clone());
            let g = p.gcd(&r);
            (p / &g, r / &g)
        };
        let eg = p.extended_gcd(&r);
        // p·x' + r·y' = ±1  ⇒  w = (−y', x') completes v to a basis.
        let sgn = if eg.gcd.is_one() { BigInt::one() } else { -BigInt::one() };
        let change = IntegerMatrix::from_rows(vec![vec![p, -&eg.y * &sgn], vec![r, &eg.x * &sgn]], 2);
        self.basis_change(&[x, y], &change);
        // Now Q = [[0, e], [e, d]] with e = ±1; push d into {0, 1} by w += t·v.
        let e = entry(self, x, y);
        let d = entry(self, y, y);
        let t = -num_integer::Integer::div_floor(&d, &BigInt::from(2)) * &e;
        self.add_times(x, y, &t);
        if entry(self, y, y).is_zero() && entry(self, x, y).is_negative() {
            self.op(Cong::Negate(x));
        }
    }
}

/// Greedy symmetric-congruence reduction of `_αQ_γ` using `dslide`, paired
/// swaps and paired flips only; needs `_αQ_β = _γQ_β = Id`.
pub fn congruence_reduce(state: &MoveState) -> Result<(MoveState, Vec<Move>, CongruenceReport), MoveError> {
    if !state.is_normalized() {
        return Err(MoveError::NotNormalized);
    }
    let g = state.genus;
    let q0 = state.alpha_gamma.clone();
    let mut c = Congruence { rec: Recorder::new(state.clone()), p: IntegerMatrix::identity(g), conditions_held: true };

    // Radical to the end.
    let radical = Subgroup::kernel(&q0);
    let d = radical.rank();
    let m = g - d;
    let tail_is_radical = (m..g).all(|i| (0..g).all(|j| q0[(i, j)].is_zero()));
    if d > 0 && !tail_is_radical {
        let full = complete_to_unimodular(radical.basis()).expect("kernels are saturated");
        let reordered = full.select_columns((d..g).chain(0..d));
        c.basis_change(&(0..g).collect::<Vec<_>>(), &reordered);
    }

    let mut blocks = Vec::new();
    let mut done = 0;
    while done < m {
        let active: Vec<usize> = (done..m).collect();
        c.local_search(&active);
        let q = c.q().clone();
        let unit = active
            .iter()
            .copied()
            .filter(|&i| q[(i, i)].abs().is_one())
            .min_by_key(|&i| (q[(i, i)].is_negative(), i));
        if let Some(i) = unit {
            c.op(Cong::Swap(done, i));
            c.clear_unit(done, &active[1..]);
            blocks.push(Block::Unit { index: done, value: c.q()[(done, done)].clone() });
            done += 1;
            continue;
        }
        let pair = active
            .iter()
            .flat_map(|&i| active.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .find(|&(i, j)| (&q[(i, i)] * &q[(j, j)] - &q[(i, j)] * &q[(i, j)]).abs().is_one());
        match pair {
            Some((i, j)) => {
                c.op(Cong::Swap(done, i));
                c.op(Cong::Swap(done + 1, j));
                c.reduce_pair(done, done + 1);
                let q = c.q();
                if q[(done, done)].abs().is_one() || q[(done + 1, done + 1)].abs().is_one() {
                    continue;
                }
                c.clear_block(done, done + 1, &active[2..]);
                blocks.push(Block::Hyperbolic { indices: [done, done + 1] });
                done += 2;
            }
            None => {
                let matrix = c.q().select_rows(done..m).select_columns(done..m);
                blocks.push(Block::Residual { indices: active, matrix });
                break;
            }
        }
    }

    // An odd unit pivot turns each hyperbolic block into two more units.
    loop {
        let odd = blocks.iter().position(|b| matches!(b, Block::Unit { .. }));
        let hyp = blocks.iter().position(|b| matches!(b, Block::Hyperbolic { .. }));
        let (Some(oi), Some(hi)) = (odd, hyp) else { break };
        let Block::Unit { index: z, value: e } = blocks[oi].clone() else { unreachable!() };
        let Block::Hyperbolic { indices: [x, y] } = blocks[hi] else { unreachable!() };
        let s = Sign::of(&e);
        c.op(Cong::Add { i: z, j: y, s: Sign::Plus });
        c.op(Cong::Add { i: y, j: x, s: -s });
        c.op(Cong::Add { i: y, j: z, s: Sign::Minus });
        c.op(Cong::Add { i: x, j: z, s: -s });
        let q = c.q().clone();
        blocks.remove(hi);
        for i in [x, y] {
            blocks.push(Block::Unit { index: i, value: q[(i, i)].clone() });
        }
        if let Some(Block::Unit { value, .. }) = blocks.iter_mut().find(|b| matches!(b, Block::Unit { index, .. } if *index == z)) {
            *value = q[(z, z)].clone();
        }
    }
    blocks.sort_by_key(|b| match b {
        Block::Unit { index, .. } => *index,
        Block::Hyperbolic { indices } => indices[0],
        Block::Residual { indices, .. } => indices[0],
    });

    let p = c.p.clone();
    let congruence_verified = &(&p.transpose() * &q0) * &p == *c.q() && p.determinant().abs().is_one();
    let conditions_held = c.conditions_held;
    let (state, moves) = c.rec.finish();
    let report = CongruenceReport {
        blocks,
        radical: (m..g).collect(),
        transform: p,
        congruence_verified,
        conditions_held,
    };
    Ok((state, moves, report))
}

/// Full pipeline: [`normalize_pair`], [`reduce_gamma_beta`], then
/// [`congruence_reduce`] when both normalizations succeed.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub state: MoveState,
    pub moves: Vec<Move>,
    pub gamma_complete: bool,
    pub congruence: Option<CongruenceReport>,
    pub notes: Vec<String>,
}

pub fn reduce(state: &MoveState) -> Result<Reduction, MoveError> {
    let (s1, mut moves) = normalize_pair(state)?;
    let gr = reduce_gamma_beta(&s1)?;
    moves.extend(gr.moves.iter().copied());
    let mut notes = Vec::new();
    let k = state.k;
    if k.k1() != 0 || k.k3() != 0 {
        notes.push(format!(
            "k-vector {k} is outside the (g;0,k2,0) case; reduction is best-effort and stops after normalizing"
        ));
    }
    if !gr.state.is_normalized() {
        return Ok(Reduction { state: gr.state, moves, gamma_complete: gr.complete, congruence: None, notes });
    }
    let (s3, m3, report) = congruence_reduce(&gr.state)?;
    moves.extend(m3);
    if report.residual_even_blocks() > 0 {
        notes.push("even blocks remain; parity is a congruence invariant, so they cannot be diagonalized".into());
    }
    Ok(Reduction { state: s3, moves, gamma_complete: gr.complete, congruence: Some(report), notes })
}

/// Homology profile and form invariants (rank, signature, parity, |det|).
fn invariant_signature(state: &MoveState) -> Option<(crate::homology::HomologyProfile, (usize, i64, crate::form::Parity, BigInt))> {
    let t = Trisection::from_matrices(state.matrices()).ok()?;
    let profile = homology_profile(&t);
    let form = form_by_definition(&t).ok()?;
    let inv = form_invariants(&form.matrix);
    Some((profile, (inv.rank, inv.signature, inv.parity, inv.determinant.abs())))
}

/// `true` iff the moves apply in sequence and preserve the homology profile
/// and the form invariants.
pub fn verify_move_invariance(state: &MoveState, moves: &[Move]) -> bool {
    let Ok(end) = state.apply_all(moves) else { return false };
    match (invariant_signature(state), invariant_signature(&end)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}
