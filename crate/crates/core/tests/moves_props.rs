mod common;

use common::*;
use proptest::prelude::*;
use trisect::diagram::{Label, MatrixDiagram, Trisection};
use trisect::form::{form_by_definition, form_invariants};
use trisect::generate::{random_diagram, random_moves, rng};
use trisect::homology::homology_profile;
use trisect::linalg::IntegerMatrix;
use trisect::moves::{
    congruence_reduce, format_log, normalize_pair, parse_log, reduce, reduce_gamma_beta, verify_move_invariance, Block,
    Move, MoveState, Sign,
};

fn state_for(seed: u64, max_genus: usize) -> MoveState {
    let d = random_diagram(&mut rng(seed), max_genus);
    MoveState::new(&Trisection::from_curves(d).unwrap())
}

/// `α = β = Id` pairing and `αQγ = Q` symmetric unimodular.
fn normalized(q: IntegerMatrix) -> MoveState {
    let g = q.rows();
    let t = Trisection::from_matrices(
        MatrixDiagram::new(g, None, IntegerMatrix::identity(g), IntegerMatrix::identity(g), q).unwrap(),
    )
    .unwrap();
    MoveState::new(&t)
}

fn inverse(m: Move) -> Move {
    match m {
        Move::Slide { system, i, j, sign } => Move::Slide { system, i, j, sign: flip(sign) },
        Move::DualDoubleSlide { i, j, sign } => Move::DualDoubleSlide { i, j, sign: flip(sign) },
        other => other,
    }
}

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Plus => Sign::Minus,
        Sign::Minus => Sign::Plus,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replay_is_deterministic(seed in any::<u64>(), move_seed in any::<u64>()) {
        let s = state_for(seed, 5);
        let moves = random_moves(&mut rng(move_seed), s.genus, 30);
        let a = s.apply_all(&moves).unwrap();
        let b = s.apply_all(&parse_log(&format_log(&moves)).unwrap()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a.log, &moves);
        prop_assert_eq!(random_moves(&mut rng(move_seed), s.genus, 30), moves);
    }

    #[test]
    fn moves_preserve_invariants(seed in any::<u64>(), move_seed in any::<u64>()) {
        let s = state_for(seed, 5);
        let moves = random_moves(&mut rng(move_seed), s.genus, 20);
        prop_assert!(verify_move_invariance(&s, &moves));
        let end = s.apply_all(&moves).unwrap();
        prop_assert_eq!(end.k, s.k);
        prop_assert!(end.matrices().validate().valid);
    }

    #[test]
    fn inverse_sequence_returns_to_start(seed in any::<u64>(), move_seed in any::<u64>()) {
        let s = state_for(seed, 5);
        let moves = random_moves(&mut rng(move_seed), s.genus, 25);
        let undo: Vec<Move> = moves.iter().rev().map(|&m| inverse(m)).collect();
        let back = s.apply_all(&moves).unwrap().apply_all(&undo).unwrap();
        prop_assert!(back.same_matrices(&s));
    }

    #[test]
    fn reduction_replays(seed in any::<u64>()) {
        let s = state_for(seed, 5);
        let r = reduce(&s).unwrap();
        let replayed = s.apply_all(&r.moves).unwrap();
        prop_assert!(replayed.same_matrices(&r.state));
        prop_assert!(verify_move_invariance(&s, &r.moves));
        if s.k.k1() == 0 {
            prop_assert!(r.state.alpha_beta.is_identity());
        }
        if let Some(c) = &r.congruence {
            prop_assert!(c.congruence_verified && c.conditions_held);
        }
    }

    #[test]
    fn congruence_on_normalized_forms(entries in prop::collection::vec(-2i64..=2, 6), diag in prop::collection::vec(prop::bool::ANY, 3)) {
        // Q = Pᵀ D P with D diagonal ±1 and P unit upper triangular.
        let p = IntegerMatrix::from_rows_i64(&[vec![1, entries[0], entries[1]], vec![0, 1, entries[2]], vec![0, 0, 1]]);
        let d = IntegerMatrix::from_rows_i64(&[
            vec![if diag[0] { 1 } else { -1 }, 0, 0],
            vec![0, if diag[1] { 1 } else { -1 }, 0],
            vec![0, 0, if diag[2] { 1 } else { -1 }],
        ]);
        let q = &(&p.transpose() * &d) * &p;
        let s = normalized(q.clone());
        let (end, moves, report) = congruence_reduce(&s).unwrap();
        prop_assert!(report.congruence_verified && report.conditions_held);
        prop_assert!(end.is_normalized());
        prop_assert_eq!(&(&report.transform.transpose() * &q) * &report.transform, end.alpha_gamma.clone());
        prop_assert!(s.apply_all(&moves).unwrap().same_matrices(&end));
        // Odd forms of this size split completely into (±1) summands.
        let all_units = report.blocks.iter().all(|b| matches!(b, Block::Unit { .. }));
        prop_assert!(all_units);
        let before = form_invariants(&q);
        let after = form_invariants(&end.alpha_gamma);
        prop_assert_eq!(before, after);
    }
}

#[test]
fn normalize_pair_handles_units_and_rejects_torsion() {
    let t = Trisection::from_matrices(
        MatrixDiagram::new(1, None, mat(&[vec![-1]]), mat(&[vec![1]]), mat(&[vec![1]])).unwrap(),
    )
    .unwrap();
    let s = MoveState::new(&t);
    assert!(normalize_pair(&s).unwrap().0.alpha_beta.is_identity());
    let mut torsion = s.clone();
    torsion.alpha_beta = mat(&[vec![2]]);
    assert!(matches!(normalize_pair(&torsion), Err(trisect::moves::MoveError::Torsion)));
}

#[test]
fn gamma_reduction_flags_singular_case() {
    // S¹×S³: γQβ = 0, k3 = 1.
    let s = MoveState::new(&corpus_trisection("s1xs3"));
    let gr = reduce_gamma_beta(&s).unwrap();
    assert!(!gr.complete);
}

#[test]
fn worked_reduction_of_s2xs2() {
    let s = MoveState::new(&corpus_trisection("s2xs2"));
    let r = reduce(&s).unwrap();
    assert!(r.state.is_normalized());
    assert_eq!(r.state.alpha_gamma, mat(&[vec![0, 1], vec![1, 0]]));
    let c = r.congruence.unwrap();
    assert_eq!(c.residual_even_blocks(), 1);
    assert!(matches!(c.blocks[0], Block::Hyperbolic { .. }));
}

#[test]
fn worked_reduction_of_mixed_sum() {
    let s = MoveState::new(&corpus_trisection("cp2_cp2bar"));
    let r = reduce(&s).unwrap();
    let c = r.congruence.unwrap();
    assert_eq!(c.residual_even_blocks(), 0);
    let mut diag: Vec<String> = (0..2).map(|i| r.state.alpha_gamma[(i, i)].to_string()).collect();
    diag.sort();
    assert_eq!(diag, ["-1", "1"]);
}

#[test]
fn hyperbolic_plus_unit_is_diagonalized() {
    // H ⊕ (1) is odd and indefinite, so it is congruent to (1) ⊕ (1) ⊕ (-1).
    let q = mat(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
    let (end, _, report) = congruence_reduce(&normalized(q)).unwrap();
    assert_eq!(report.residual_even_blocks(), 0, "{report}");
    let inv = form_invariants(&end.alpha_gamma);
    assert_eq!((inv.signature, inv.determinant.to_string()), (1, "-1".to_string()));
}

#[test]
fn moves_reject_bad_indices() {
    let s = MoveState::new(&corpus_trisection("s2xs2"));
    assert!(s.apply(Move::OrientFlip { system: Label::Alpha, i: 2 }).is_err());
    assert!(s.apply(Move::Swap { system: Label::Beta, i: 1, j: 1 }).is_err());
    assert!(s.apply(Move::DualDoubleSlide { i: 0, j: 5, sign: Sign::Plus }).is_err());
}

#[test]
fn invariance_over_random_diagrams() {
    let mut r = rng(11);
    for _ in 0..20 {
        let d = random_diagram(&mut r, 4);
        let t = Trisection::from_curves(d).unwrap();
        let s = MoveState::new(&t);
        let moves = random_moves(&mut r, s.genus, 15);
        let end = Trisection::from_matrices(s.apply_all(&moves).unwrap().matrices()).unwrap();
        assert_eq!(homology_profile(&end), homology_profile(&t));
        let a = form_invariants(&form_by_definition(&end).unwrap().matrix);
        let b = form_invariants(&form_by_definition(&t).unwrap().matrix);
        assert_eq!((a.rank, a.signature, a.parity), (b.rank, b.signature, b.parity));
    }
}
