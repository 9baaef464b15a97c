//! Independent oracles shared by the integration and acceptance suites.
//!
//! Nothing here calls the library's normal forms: ranks, memberships and
//! quotient invariants come from gcds of minors computed with plain `i128`
//! cofactor expansion, which is adequate for the small matrices tested.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use trisect::diagram::{Trisection, TrisectionDiagram};
use trisect::linalg::{IntVector, IntegerMatrix};

pub type Mat = Vec<Vec<i128>>;

pub fn to_mat(m: &IntegerMatrix) -> Mat {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].to_i128().unwrap()).collect()).collect()
}

pub fn det(m: &Mat) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Mat = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// gcd of all `k x k` minors (0 when all vanish).
pub fn minor_gcd(m: &Mat, k: usize) -> i128 {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    if k == 0 {
        return 1;
    }
    if k > rows || k > cols {
        return 0;
    }
    let mut g: i128 = 0;
    for rs in combinations(rows, k) {
        for cs in combinations(cols, k) {
            let sub: Mat = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
            g = g.gcd(&det(&sub));
            if g == 1 {
                return 1;
            }
        }
    }
    g
}

pub fn rank(m: &Mat) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    (1..=rows.min(cols)).rev().find(|&k| minor_gcd(m, k) != 0).unwrap_or(0)
}

/// Invariant factors of `coker m` from determinantal divisors: (free rank, torsion ≥ 2).
pub fn cokernel(m: &Mat, ambient: usize) -> (usize, Vec<i128>) {
    let r = rank(m);
    let mut torsion = Vec::new();
    let mut prev = 1;
    for k in 1..=r {
        let d = minor_gcd(m, k);
        let s = d / prev;
        if s != 1 {
            torsion.push(s.abs());
        }
        prev = d;
    }
    (ambient - r, torsion)
}

/// Columns as generators: `gens` is `n x m`.
pub fn hstack(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().chain(y).copied().collect()).collect()
}

pub fn with_column(a: &Mat, x: &[i128]) -> Mat {
    a.iter().zip(x).map(|(r, &v)| r.iter().copied().chain(std::iter::once(v)).collect()).collect()
}

/// `x` lies in the lattice spanned by the columns of `gens` iff adding it
/// changes neither the rank nor the gcd of the top-size minors.
pub fn member(gens: &Mat, x: &[i128]) -> bool {
    let r = rank(gens);
    let ext = with_column(gens, x);
    rank(&ext) == r && minor_gcd(&ext, r).abs() == minor_gcd(gens, r).abs()
}

/// All points of `[-radius, radius]^n`.
pub fn box_points(n: usize, radius: i128) -> Vec<Vec<i128>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-radius..=radius).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn big(v: &[i128]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn ints(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn mat(rows: &[Vec<i64>]) -> IntegerMatrix {
    IntegerMatrix::from_rows_i64(rows)
}

pub fn curves(g: usize, a: &[&[i64]], b: &[&[i64]], c: &[&[i64]]) -> TrisectionDiagram {
    let v = |xs: &[&[i64]]| xs.iter().map(|x| ints(x)).collect::<Vec<_>>();
    TrisectionDiagram::from_classes(g, &v(a), &v(b), &v(c)).unwrap()
}

pub fn corpus_trisection(name: &str) -> Trisection {
    use trisect::cli::file::Payload;
    match trisect::corpus::load(name).unwrap().payload {
        Payload::Curves(d) => Trisection::from_curves(d).unwrap(),
        Payload::Matrices(m) => Trisection::from_matrices(m).unwrap(),
    }
}

/// Some rational solution of `A·c = b` (free variables set to zero).
pub fn solve_rational(a: &IntegerMatrix, b: &[BigInt]) -> Option<Vec<num_rational::BigRational>> {
    use num_rational::BigRational;
    use num_traits::Zero;
    let (rows, cols) = (a.rows(), a.cols());
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| (0..=cols).map(|j| BigRational::from_integer(if j < cols { a[(i, j)].clone() } else { b[i].clone() })).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// `⟨x, y⟩` for `x, y ∈ ℚ^{2g}` in the basis `e₁…e_g, f₁…f_g`.
pub fn pair_rational(x: &[num_rational::BigRational], y: &[num_rational::BigRational]) -> num_rational::BigRational {
    let g = x.len() / 2;
    let mut s = num_rational::BigRational::from_integer(BigInt::from(0));
    for i in 0..g {
        s += &x[i] * &y[g + i] - &x[g + i] * &y[i];
    }
    s
}

/// `Φ(x, y) = ⟨a, γ·y⟩` where `γ·x = a + b` with `a ∈ L_α⊗ℚ`, `b ∈ L_β⊗ℚ`.
/// Rational lifts suffice: the ambiguity lies in `(L_α∩L_β)⊗ℚ`, which pairs
/// trivially with `L_α + L_β ∋ γ·y`.
pub fn phi_oracle(d: &TrisectionDiagram, x: &[BigInt], y: &[BigInt]) -> BigInt {
    use num_rational::BigRational;
    let g = d.genus();
    let (a, b, c) = (d.alpha().classes(), d.beta().classes(), d.gamma().classes());
    let sol = solve_rational(&a.hstack(b), &c.mul_vec(x)).expect("γx lies in L_α + L_β");
    let lifted: Vec<BigRational> = (0..2 * g)
        .map(|i| (0..g).map(|j| BigRational::from_integer(a[(i, j)].clone()) * &sol[j]).sum())
        .collect();
    let gy: Vec<BigRational> = c.mul_vec(y).into_iter().map(BigRational::from_integer).collect();
    let v = pair_rational(&lifted, &gy);
    assert!(v.is_integer(), "pairing of integral classes");
    v.to_integer()
}
