//! Smith and Hermite normal forms over the integers.
//!
//! Both reductions work by elementary unimodular row/column operations and
//! record the transforms, so every result carries its own certificate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntVector, IntegerMatrix};

/// Smith normal form `U · M · V = S` with the inverses of both transforms.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub s: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries `d₁ | d₂ | …`, all positive.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Transform-tracking workspace shared by the reductions.
struct Reducer {
    a: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

impl Reducer {
    fn new(m: &IntegerMatrix) -> Self {
        Reducer {
            a: m.clone(),
            u: IntegerMatrix::identity(m.rows()),
            u_inv: IntegerMatrix::identity(m.rows()),
            v: IntegerMatrix::identity(m.cols()),
            v_inv: IntegerMatrix::identity(m.cols()),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn negate_col(&mut self, j: usize) {
        self.a.negate_col(j);
        self.v.negate_col(j);
        self.v_inv.negate_row(j);
    }

    /// `row[dst] += k · row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
        self.u_inv.add_col_multiple(src, dst, &-k);
    }

    /// `col[dst] += k · col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
        self.v_inv.add_row_multiple(src, dst, &-k);
    }
}

/// Smith normal form by gcd reduction, pivoting on the smallest nonzero
/// entry of the remaining block (ties: lowest row, then lowest column).
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let mut r = Reducer::new(m);
    let (rows, cols) = (m.rows(), m.cols());
    for t in 0..rows.min(cols) {
        while let Some((pi, pj)) = min_abs_entry(&r.a, t, t) {
            r.swap_rows(t, pi);
            r.swap_cols(t, pj);
            let mut dirty = false;
            for i in t + 1..rows {
                if r.a[(i, t)].is_zero() {
                    continue;
                }
                let q = &r.a[(i, t)] / &r.a[(t, t)];
                r.add_row(i, t, &-q);
                dirty |= !r.a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if r.a[(t, j)].is_zero() {
                    continue;
                }
                let q = &r.a[(t, j)] / &r.a[(t, t)];
                r.add_col(j, t, &-q);
                dirty |= !r.a[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and redo
            let pivot = r.a[(t, t)].clone();
            let offending = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !r.a[(i, j)].is_multiple_of(&pivot)));
            match offending {
                Some(i) => r.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if t < rows && t < cols && r.a[(t, t)].is_negative() {
            r.negate_row(t);
        }
    }
    SmithForm { u: r.u, s: r.a, v: r.v, u_inv: r.u_inv, v_inv: r.v_inv }
}

fn min_abs_entry(a: &IntegerMatrix, r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in r0..a.rows() {
        for j in c0..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Column-style Hermite normal form `H = M · U`.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntegerMatrix,
    pub u: IntegerMatrix,
    /// Number of nonzero columns of `h`; they come first.
    pub rank: usize,
    /// Row index of the pivot of each nonzero column (strictly increasing).
    pub pivot_rows: Vec<usize>,
}

/// Column-style Hermite normal form.
///
/// Convention: the nonzero columns of `H` come first and are in column
/// echelon form (pivot rows strictly increasing, entries above a pivot are
/// zero); each pivot is positive; in a pivot row, the entries of the
/// earlier columns lie in `[0, pivot)`. Trailing columns are zero. Under
/// this convention `H` depends only on the lattice spanned by the columns.
pub fn hermite_normal_form(m: &IntegerMatrix) -> HermiteForm {
    let mut r = Reducer::new(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut pc = 0;
    let mut pivot_rows = Vec::new();
    for i in 0..rows {
        if pc == cols {
            break;
        }
        loop {
            let mut best: Option<(usize, BigInt)> = None;
            for j in pc..cols {
                let x = &r.a[(i, j)];
                if !x.is_zero() && best.as_ref().is_none_or(|(_, b)| x.abs() < *b) {
                    best = Some((j, x.abs()));
                }
            }
            let Some((j, _)) = best else { break };
            r.swap_cols(pc, j);
            let mut dirty = false;
            for j in pc + 1..cols {
                if r.a[(i, j)].is_zero() {
                    continue;
                }
                let q = &r.a[(i, j)] / &r.a[(i, pc)];
                r.add_col(j, pc, &-q);
                dirty |= !r.a[(i, j)].is_zero();
            }
            if !dirty {
                break;
            }
        }
        if r.a[(i, pc)].is_zero() {
            continue;
        }
        if r.a[(i, pc)].is_negative() {
            r.negate_col(pc);
        }
        let pivot = r.a[(i, pc)].clone();
        for j in 0..pc {
            let q = r.a[(i, j)].div_floor(&pivot);
            if !q.is_zero() {
                r.add_col(j, pc, &-q);
            }
        }
        pivot_rows.push(i);
        pc += 1;
    }
    HermiteForm { h: r.a, u: r.v, rank: pc, pivot_rows }
}

/// A `ℤ`-basis (as columns) of `{x : M·x = 0}`. The kernel is saturated.
pub fn kernel_matrix(m: &IntegerMatrix) -> IntegerMatrix {
    let hf = hermite_normal_form(m);
    hf.u.select_columns(hf.rank..m.cols())
}

/// Some integer `x` with `M·x = b`, or `None` if no integer solution exists.
pub fn solve_integer(m: &IntegerMatrix, b: &[BigInt]) -> Option<IntVector> {
    assert_eq!(m.rows(), b.len(), "solve_integer: right-hand side length mismatch");
    let snf = smith_normal_form(m);
    let c = snf.u.mul_vec(b);
    let d = snf.invariant_factors();
    let mut y = vec![BigInt::zero(); m.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < d.len() {
            let (q, rem) = ci.div_rem(&d[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Extends the columns of a saturated, full-column-rank `basis` (`n x k`) to
/// a unimodular `n x n` matrix whose first `k` columns span the same lattice
/// as `basis` and whose last `n - k` columns span a complement.
///
/// Returns `None` if `basis` is not saturated or has dependent columns.
pub fn complete_to_unimodular(basis: &IntegerMatrix) -> Option<IntegerMatrix> {
    let n = basis.rows();
    let k = basis.cols();
    let snf = smith_normal_form(basis);
    let d = snf.invariant_factors();
    if d.len() != k || d.iter().any(|x| !x.is_one()) {
        return None;
    }
    // U·B·V = [I;0]  ⇒  U⁻¹ = [B·V | C]
    let first = basis * &snf.v;
    let rest = snf.u_inv.select_columns(k..n);
    Some(first.hstack(&rest))
}
