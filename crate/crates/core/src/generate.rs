//! Seeded random valid diagrams and move sequences for property testing.
//!
//! A diagram is a direct sum of small standard pieces, then scrambled by
//! symplectic transvections of the surface, unimodular changes of each curve
//! basis and a permutation of the three roles. Every step preserves the
//! validity checks.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Label, SymplecticSurface, TrisectionDiagram};
use crate::linalg::{IntVector, IntegerMatrix};
use crate::moves::{Move, Sign};

/// Seeded generator used throughout the test suites and the CLI.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Class vectors of a local piece, in its own symplectic basis.
struct Piece {
    genus: usize,
    alpha: Vec<IntVector>,
    beta: Vec<IntVector>,
    gamma: Vec<IntVector>,
}

fn unit(g: usize, i: usize) -> IntVector {
    let mut v = vec![BigInt::zero(); 2 * g];
    v[i] = BigInt::from(1);
    v
}

fn genus_one(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> Piece {
    let v = |x: [i64; 2]| vec![x.iter().map(|&n| BigInt::from(n)).collect::<IntVector>()];
    Piece { genus: 1, alpha: v(a), beta: v(b), gamma: v(c) }
}

fn s2xs2() -> Piece {
    let v = |rows: [[i64; 4]; 2]| rows.iter().map(|r| r.iter().map(|&n| BigInt::from(n)).collect()).collect();
    Piece {
        genus: 2,
        alpha: v([[1, 0, 0, 0], [0, 1, 0, 0]]),
        beta: v([[0, 0, 0, 1], [0, 0, -1, 0]]),
        gamma: v([[1, 0, 0, -1], [0, -1, 1, 0]]),
    }
}

/// `α = e`, `β = f`, `γⱼ = eⱼ + Σᵢ Qᵢⱼ·fᵢ` for a symmetric `Q = U ⊕ 0` with
/// `U` unimodular.
fn normal_piece<R: Rng>(rng: &mut R, genus: usize) -> Piece {
    let radical = rng.gen_range(0..genus);
    let n = genus - radical;
    // Blocks of (±1) and hyperbolic pairs, then a random unimodular congruence.
    let mut d = IntegerMatrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && rng.gen_bool(0.3) {
            d[(i, i + 1)] = BigInt::from(1);
            d[(i + 1, i)] = BigInt::from(1);
            i += 2;
        } else {
            d[(i, i)] = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
            i += 1;
        }
    }
    let mut p = IntegerMatrix::identity(n);
    if n >= 2 {
        for _ in 0..rng.gen_range(0..4) {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            p.add_col_multiple(b, a, &BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 }));
        }
    }
    let q = &(&p.transpose() * &d) * &p;
    let q = q.direct_sum(&IntegerMatrix::zeros(radical, radical));
    let alpha = (0..genus).map(|j| unit(genus, j)).collect();
    let beta = (0..genus).map(|j| unit(genus, genus + j)).collect();
    let gamma = (0..genus)
        .map(|j| {
            let mut v = unit(genus, j);
            for i in 0..genus {
                v[genus + i] = q[(i, j)].clone();
            }
            v
        })
        .collect();
    Piece { genus, alpha, beta, gamma }
}

fn random_piece<R: Rng>(rng: &mut R, room: usize) -> Piece {
    loop {
        let p = match rng.gen_range(0..9) {
            0 => genus_one([1, 0], [0, 1], [1, 1]),
            1 => genus_one([1, 0], [0, 1], [1, -1]),
            2 => genus_one([1, 0], [1, 0], [1, 0]),
            3 => genus_one([1, 0], [1, 0], [0, 1]),
            4 => genus_one([1, 0], [0, 1], [1, 0]),
            5 => genus_one([0, 1], [1, 0], [1, 0]),
            6 => s2xs2(),
            _ => {
                let n = rng.gen_range(1..=room.min(3));
                normal_piece(rng, n)
            }
        };
        if p.genus <= room {
            return p;
        }
    }
}

fn embed(v: &[BigInt], local: usize, offset: usize, genus: usize) -> IntVector {
    let mut out = vec![BigInt::zero(); 2 * genus];
    for i in 0..local {
        out[offset + i] = v[i].clone();
        out[genus + offset + i] = v[local + i].clone();
    }
    out
}

/// A random valid diagram of genus at most `max_genus`.
pub fn random_diagram<R: Rng>(rng: &mut R, max_genus: usize) -> TrisectionDiagram {
    let target = rng.gen_range(0..=max_genus);
    let mut pieces = Vec::new();
    let mut genus = 0;
    while genus < target {
        let p = random_piece(rng, target - genus);
        genus += p.genus;
        pieces.push(p);
    }
    let mut systems: [Vec<IntVector>; 3] = Default::default();
    let mut offset = 0;
    for p in &pieces {
        for (sys, local) in systems.iter_mut().zip([&p.alpha, &p.beta, &p.gamma]) {
            sys.extend(local.iter().map(|v| embed(v, p.genus, offset, genus)));
        }
        offset += p.genus;
    }

    let surface = SymplecticSurface::new(genus);
    if genus > 0 {
        for _ in 0..rng.gen_range(0..=2 * genus) {
            let v: IntVector = (0..2 * genus).map(|_| BigInt::from(rng.gen_range(-1..=1))).collect();
            for sys in systems.iter_mut() {
                for x in sys.iter_mut() {
                    let t = surface.pair(&v, x);
                    for (xi, vi) in x.iter_mut().zip(&v) {
                        *xi += &t * vi;
                    }
                }
            }
        }
    }

    let mut matrices = systems.map(|s| IntegerMatrix::from_columns(&s, 2 * genus));
    if genus >= 2 {
        for m in matrices.iter_mut() {
            for _ in 0..rng.gen_range(0..=genus) {
                let i = rng.gen_range(0..genus);
                let j = (i + rng.gen_range(1..genus)) % genus;
                match rng.gen_range(0..4) {
                    0 => m.swap_cols(i, j),
                    1 => m.negate_col(i),
                    _ => m.add_col_multiple(j, i, &BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 })),
                }
            }
        }
    }
    let [a, b, c] = matrices;
    let d = TrisectionDiagram::new(genus, a, b, c).expect("pieces have consistent shapes");
    let mut order = Label::ALL;
    order.shuffle(rng);
    d.permuted(order)
}

/// A uniformly chosen primitive or dual-double-slide move (genus ≥ 1).
pub fn random_move<R: Rng>(rng: &mut R, genus: usize) -> Move {
    assert!(genus >= 1, "no moves on a genus-0 surface");
    let system = *Label::ALL.choose(rng).unwrap();
    let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    let i = rng.gen_range(0..genus);
    if genus == 1 {
        return Move::OrientFlip { system, i };
    }
    let j = (i + rng.gen_range(1..genus)) % genus;
    match rng.gen_range(0..4) {
        0 => Move::OrientFlip { system, i },
        1 => Move::Swap { system, i, j },
        2 => Move::Slide { system, i, j, sign },
        _ => Move::DualDoubleSlide { i, j, sign },
    }
}

pub fn random_moves<R: Rng>(rng: &mut R, genus: usize, count: usize) -> Vec<Move> {
    if genus == 0 {
        return Vec::new();
    }
    (0..count).map(|_| random_move(rng, genus)).collect()
}
