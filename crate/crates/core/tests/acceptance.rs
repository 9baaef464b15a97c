//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::Rng;
use trisect::diagram::{linking_number, Label, Trisection, TrisectionDiagram};
use trisect::form::{form_by_definition, form_fast, h2_basis, lift, phi, phi_with_lift};
use trisect::generate::{random_diagram, random_moves, rng};
use trisect::homology::{build_complex, h2_kernel_formula, h2_symmetric, h3_direct, homology_profile};
use trisect::linalg::{kernel_matrix, IntVector, IntegerMatrix, Subgroup};
use trisect::moves::{normalize_pair, reduce, reduce_gamma_beta, verify_move_invariance, Block, MoveState};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn hyperbolic() -> IntegerMatrix {
    mat(&[vec![0, 1], vec![1, 0]])
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let t = corpus_trisection("s2xs2");
    let def = form_by_definition(&t).map_err(|e| e.to_string())?;
    let fast = form_fast(&t).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(def.matrix == hyperbolic(), format!("Φ gave {}", def.matrix))?;
    check(fast.matrix == hyperbolic(), format!("fast formula gave {}", fast.matrix))?;
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("[[0,1],[1,0]] by Φ and fast formula in {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

fn ac2() -> Outcome {
    let expect = [
        ("s4", ["Z", "0", "0", "0", "Z"]),
        ("cp2", ["Z", "0", "Z", "0", "Z"]),
        ("s2xs2", ["Z", "0", "Z^2", "0", "Z"]),
        ("s1xs3", ["Z", "Z", "0", "Z", "Z"]),
        ("cp2_cp2bar", ["Z", "0", "Z^2", "0", "Z"]),
    ];
    for (name, groups) in expect {
        let p = homology_profile(&corpus_trisection(name));
        let got: Vec<String> = p.groups.iter().map(|g| g.to_string()).collect();
        check(got == groups, format!("{name}: got ({})", got.join(",")))?;
    }
    let f = form_by_definition(&corpus_trisection("cp2_cp2bar")).map_err(|e| e.to_string())?;
    check(f.matrix == mat(&[vec![1, 0], vec![0, -1]]), format!("CP²#(−CP²) form {}", f.matrix))?;
    Ok("5 corpus profiles exact; CP²#(−CP²) form diag(1,-1)".into())
}

fn random_diagrams(count: usize) -> Vec<TrisectionDiagram> {
    let mut r = rng(2024);
    (0..count).map(|_| random_diagram(&mut r, 6)).collect()
}

fn ac3(diagrams: &[TrisectionDiagram]) -> Outcome {
    let start = Instant::now();
    let mut genera = HashSet::new();
    for (n, d) in diagrams.iter().enumerate() {
        genera.insert(d.genus());
        let t = Trisection::from_curves(d.clone()).map_err(|e| e.to_string())?;
        let p = homology_profile(&t);
        let sym = h2_symmetric(&t).map_err(|e| e.to_string())?;
        let ker = h2_kernel_formula(&t).map_err(|e| e.to_string())?;
        let h3 = h3_direct(&t).map_err(|e| e.to_string())?;
        check(&sym == p.h(2) && &ker == p.h(2), format!("diagram {n}: H2 {} / {} / {}", p.h(2), sym, ker))?;
        check(&h3 == p.h(3), format!("diagram {n}: H3 {} / {}", p.h(3), h3))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    check(genera.len() == 7, format!("only genera {genera:?} generated"))?;
    Ok(format!("{} diagrams (genus 0..=6), 0 mismatches, {:.2} s", diagrams.len(), elapsed.as_secs_f64()))
}

fn combo<R: Rng>(r: &mut R, m: &IntegerMatrix) -> IntVector {
    let c: IntVector = (0..m.cols()).map(|_| BigInt::from(r.gen_range(-2..=2))).collect();
    m.mul_vec(&c)
}

fn add(x: &[BigInt], y: &[BigInt]) -> IntVector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn ac4(diagrams: &[TrisectionDiagram]) -> Outcome {
    let mut r = rng(4);
    let mut tuples = 0;
    for (n, d) in diagrams.iter().enumerate() {
        let t = Trisection::from_curves(d.clone()).map_err(|e| e.to_string())?;
        let basis = h2_basis(&t);
        if basis.rank() == 0 {
            continue;
        }
        let alt = kernel_matrix(&t.q(Label::Beta, Label::Alpha));
        let denom = kernel_matrix(&t.q(Label::Alpha, Label::Gamma)).hstack(&kernel_matrix(&t.q(Label::Beta, Label::Gamma)));
        for _ in 0..3 {
            let x = combo(&mut r, &basis.representatives);
            let y = combo(&mut r, &basis.representatives);
            let base = phi(&t, &x, &y).map_err(|e| e.to_string())?;
            check(base == phi_oracle(d, &x, &y), format!("diagram {n}: Φ disagrees with the rational oracle"))?;
            let x_lift = lift(&t, &x).map_err(|e| e.to_string())?;
            let other = add(&x_lift, &combo(&mut r, &alt));
            let v = phi_with_lift(&t, &other, &y).map_err(|e| e.to_string())?;
            check(v == base, format!("diagram {n}: alternative lift changed Φ from {base} to {v}"))?;
            let (xs, ys) = (add(&x, &combo(&mut r, &denom)), add(&y, &combo(&mut r, &denom)));
            let v = phi(&t, &xs, &ys).map_err(|e| e.to_string())?;
            check(v == base, format!("diagram {n}: representative shift changed Φ from {base} to {v}"))?;
            tuples += 1;
        }
    }
    check(tuples >= 200, format!("only {tuples} tuples"))?;
    Ok(format!("{tuples} tuples, 0 violations"))
}

fn random_gens<R: Rng>(r: &mut R, n: usize) -> Vec<Vec<i64>> {
    let m = r.gen_range(0..=3);
    (0..m).map(|_| (0..n).map(|_| r.gen_range(-3..=3)).collect()).collect()
}

fn as_oracle(n: usize, gens: &[Vec<i64>]) -> Mat {
    (0..n).map(|i| gens.iter().map(|g| g[i] as i128).collect()).collect()
}

fn subgroup(n: usize, gens: &[Vec<i64>]) -> Subgroup {
    Subgroup::from_vectors(&gens.iter().map(|g| ints(g)).collect::<Vec<_>>(), n)
}

/// Lattice points `Σ cᵢ gᵢ` with `cᵢ ∈ [-1, 1]` that land in the box.
fn enumerate(n: usize, gens: &[Vec<i64>], radius: i64) -> HashSet<Vec<i64>> {
    let mut out = HashSet::new();
    let total = 3usize.pow(gens.len() as u32);
    for mut code in 0..total {
        let mut p = vec![0i64; n];
        for g in gens {
            let c = (code % 3) as i64 - 1;
            code /= 3;
            for (pi, gi) in p.iter_mut().zip(g) {
                *pi += c * gi;
            }
        }
        if p.iter().all(|v| v.abs() <= radius) {
            out.insert(p);
        }
    }
    out
}

fn ac5() -> Outcome {
    let mut r = rng(5);
    let mut cases = 0;
    while cases < 1200 {
        let n = r.gen_range(1..=4);
        let (ga, gb) = (random_gens(&mut r, n), random_gens(&mut r, n));
        let (sa, sb) = (subgroup(n, &ga), subgroup(n, &gb));
        let (oa, ob) = (as_oracle(n, &ga), as_oracle(n, &gb));
        let both = hstack(&oa, &ob);
        let sum = sa.sum(&sb);
        let int = sa.intersection(&sb);
        let all: Vec<Vec<i64>> = ga.iter().chain(&gb).cloned().collect();
        let (ea, eb, es) = (enumerate(n, &ga, 2), enumerate(n, &gb, 2), enumerate(n, &all, 2));
        for p in box_points(n, 2) {
            let x = big(&p);
            let key: Vec<i64> = p.iter().map(|&v| v as i64).collect();
            let (in_a, in_b) = (member(&oa, &p), member(&ob, &p));
            check(!ea.contains(&key) || in_a, format!("oracle disagreement at {p:?}"))?;
            check(sum.contains(&x) == member(&both, &p), format!("sum {ga:?} + {gb:?} at {p:?}"))?;
            check(!es.contains(&key) || sum.contains(&x), format!("sum misses enumerated {p:?}"))?;
            check(int.contains(&x) == (in_a && in_b), format!("intersection {ga:?} ∩ {gb:?} at {p:?}"))?;
            check(!(ea.contains(&key) && eb.contains(&key)) || int.contains(&x), format!("intersection misses {p:?}"))?;
        }
        cases += 2;
        // Quotient A/B with B = A·C and A independent: invariants of coker C.
        if rank(&oa) == ga.len() && !ga.is_empty() {
            let k = ga.len();
            let cols = r.gen_range(0..=3);
            let c: Vec<Vec<i64>> = (0..cols).map(|_| (0..k).map(|_| r.gen_range(-3..=3)).collect()).collect();
            let cm = IntegerMatrix::from_fn(k, cols, |i, j| BigInt::from(c[j][i]));
            let a_mat = sa.basis().clone();
            let gens_a = IntegerMatrix::from_columns(&ga.iter().map(|g| ints(g)).collect::<Vec<_>>(), n);
            let sub = Subgroup::from_generators(&(&gens_a * &cm));
            let q = Subgroup::from_generators(&a_mat).quotient(&sub).map_err(|e| e.to_string())?;
            let (free, torsion) = if cols == 0 { (k, vec![]) } else { cokernel(&as_oracle(k, &c), k) };
            let got: Vec<i128> = q.torsion().iter().map(|t| i128::try_from(t).unwrap()).collect();
            check(q.free_rank() == free && got == torsion, format!("quotient by {c:?}: got {q}, oracle free {free} torsion {torsion:?}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} intersection/sum/quotient cases, 0 mismatches"))
}

fn ac6(diagrams: &[TrisectionDiagram]) -> Outcome {
    let mut unimodular = 0;
    for (n, d) in diagrams.iter().enumerate() {
        let t = Trisection::from_curves(d.clone()).map_err(|e| e.to_string())?;
        let c = build_complex(&t);
        check((c.boundary(2) * c.boundary(3)).is_zero(), format!("diagram {n}: D2·D3 ≠ 0"))?;
        let p = c.profile();
        let k = t.k();
        let chi = 2 + t.genus() as i64 - (k.k1() + k.k2() + k.k3()) as i64;
        check(p.euler_characteristic == chi, format!("diagram {n}: χ {} ≠ {chi}", p.euler_characteristic))?;
        check(p.h(1).free_rank() == p.h(3).free_rank(), format!("diagram {n}: rank H1 ≠ rank H3"))?;
        let f = form_by_definition(&t).map_err(|e| e.to_string())?;
        check(f.matrix.is_symmetric(), format!("diagram {n}: form not symmetric"))?;
        if p.h(1).is_trivial() && p.h(2).is_free() {
            check(f.matrix.determinant().abs().is_one(), format!("diagram {n}: det {}", f.matrix.determinant()))?;
            unimodular += 1;
        }
    }
    Ok(format!("{} diagrams, {unimodular} simply-connected-homology cases unimodular", diagrams.len()))
}

fn ac7() -> Outcome {
    let mut r = rng(7);
    let mut sequences = 0;
    for name in trisect::corpus::names() {
        let s = MoveState::new(&corpus_trisection(name));
        for i in 0..100 {
            let moves = random_moves(&mut r, s.genus, 50);
            check(verify_move_invariance(&s, &moves), format!("{name}: sequence {i} changed invariants"))?;
            sequences += 1;
        }
    }
    let s = MoveState::new(&corpus_trisection("s2xs2"));
    let red = reduce(&s).map_err(|e| e.to_string())?;
    let st = &red.state;
    check(st.alpha_beta.is_identity() && st.gamma_beta.is_identity(), "S²×S²: not normalized")?;
    check(st.alpha_gamma == hyperbolic(), format!("S²×S²: αQγ = {}", st.alpha_gamma))?;
    let c = red.congruence.ok_or("S²×S²: no congruence step")?;
    // P relates the normalized αQγ (input of the congruence step) to the result.
    let normalized = reduce_gamma_beta(&normalize_pair(&s).map_err(|e| e.to_string())?.0).map_err(|e| e.to_string())?.state;
    check(normalized.is_normalized(), "S²×S²: normalization failed")?;
    let q0 = &normalized.alpha_gamma;
    check(c.congruence_verified && &(&c.transform.transpose() * q0) * &c.transform == st.alpha_gamma, "S²×S²: PᵀQP ≠ Q′")?;
    check(c.conditions_held && matches!(c.blocks.as_slice(), [Block::Hyperbolic { .. }]), "S²×S²: blocks")?;
    check(s.apply_all(&red.moves).map(|e| e.same_matrices(st)).unwrap_or(false), "S²×S²: log does not replay")?;
    let m = MoveState::new(&corpus_trisection("cp2_cp2bar"));
    let red = reduce(&m).map_err(|e| e.to_string())?;
    check(red.state.alpha_gamma == mat(&[vec![1, 0], vec![0, -1]]), format!("CP²#(−CP²): αQγ = {}", red.state.alpha_gamma))?;
    check(red.congruence.is_some_and(|c| c.congruence_verified), "CP²#(−CP²): congruence not verified")?;
    Ok(format!("{sequences} sequences of 50 moves invariant; S²×S² → hyperbolic, CP²#(−CP²) → diag(1,-1)"))
}

fn ac8() -> Outcome {
    let d = curves(1, &[&[1, 0]], &[&[0, 1]], &[&[1, 1]]);
    let mut count = 0;
    for p in -3i64..=3 {
        for q in -3i64..=3 {
            if p.gcd(&q) != 1 {
                continue;
            }
            let v = ints(&[p, q]);
            let lk = linking_number(&v, &v, d.alpha(), d.beta()).map_err(|e| e.to_string())?;
            check(lk == BigInt::from(p * q), format!("({p},{q}): lk {lk} ≠ {}", p * q))?;
            count += 1;
        }
    }
    Ok(format!("{count} coprime (p,q) pairs, lk = pq exactly"))
}

fn main() {
    let diagrams = random_diagrams(520);
    let results: Vec<(&str, Outcome)> = vec![
        ("AC1 worked example form", ac1()),
        ("AC2 corpus homology profiles", ac2()),
        ("AC3 H2/H3 agreement", ac3(&diagrams)),
        ("AC4 pairing well-definedness", ac4(&diagrams)),
        ("AC5 subgroup oracles", ac5()),
        ("AC6 structural invariants", ac6(&diagrams)),
        ("AC7 move soundness", ac7()),
        ("AC8 linking numbers", ac8()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
