use proptest::prelude::*;

use super::lemmas::delete_pairs;
use super::*;
use crate::counterexample::{build_cx_code, build_cx_code_rate_k, build_cx_instances};
use crate::reduction::{backward_embed, build_gadget, disjoint_paths, relay_code};

fn embedded(n: u32) -> (GadgetInstance, NetworkCode) {
    let inst = disjoint_paths(2);
    let g = build_gadget(&inst).unwrap();
    let code = backward_embed(&g, &relay_code(&inst, n), n, 1 << 20).unwrap();
    (g, code)
}

fn images_of(g: &GadgetInstance, code: &NetworkCode) -> CutImages {
    let r = verify_nec(&g.nec, code, &VerifyOptions::default()).unwrap();
    cut_images(g, code, &r).unwrap()
}

fn zero() -> Rational {
    Rational::from_integer(0)
}

#[test]
fn embedded_paths_give_identity_estimators() {
    let (g, code) = embedded(1);
    let im = images_of(&g, &code);
    for i in 0..2 {
        assert_eq!(build_psi(&im, i), (vec![0, 1], vec![]));
        assert_eq!(build_pi(&im, i), (vec![0, 1], vec![]));
    }
}

#[test]
fn unseen_signals_map_to_zero() {
    // payload-only z' signals never carry the top bit
    let (_, g) = build_cx_instances(2).unwrap();
    let cx = build_cx_code_rate_k(&g, 2, 2, 1 << 20).unwrap();
    let im = images_of(&g, &cx.code);
    let (psi, _) = build_psi(&im, 0);
    assert_eq!(psi[2], 0);
    assert_eq!(psi[3], 0);
}

#[test]
fn tables_are_deterministic() {
    let (_, g) = build_cx_instances(2).unwrap();
    let cx = build_cx_code_rate_k(&g, 2, 2, 1 << 20).unwrap();
    let im = images_of(&g, &cx.code);
    assert_eq!(build_tables(&im), build_tables(&im));
}

#[test]
fn round_trip_is_zero_error() {
    let (g, code) = embedded(1);
    let run = run_transfer(&g, &code, &VerifyOptions::default()).unwrap();
    assert_eq!(run.verification.epsilon, zero());
    assert_eq!(run.mu.epsilon, zero());
    for b in &run.report.branches {
        assert_eq!((b.e1, b.e2, b.e3), (zero(), zero(), zero()));
    }
    assert!(run.report.all_within());
}

#[test]
fn round_trip_at_n2() {
    let (g, code) = embedded(2);
    let run = run_transfer(&g, &code, &VerifyOptions::default()).unwrap();
    assert_eq!(run.mu.epsilon, zero());
    assert_eq!(run.mu.tuple_count, 16);
}

#[test]
fn first_event_is_the_bad_fraction() {
    let (_, g) = build_cx_instances(2).unwrap();
    let cx = build_cx_code_rate_k(&g, 2, 2, 1 << 20).unwrap();
    let run = run_transfer(&g, &cx.code, &VerifyOptions::default()).unwrap();
    let good = run.verification.good.len() as u64;
    assert_eq!(run.report.branches[0].e1, Rational::from_integer(1) - Rational::new(good, 16));
    assert!(run.report.all_within());
}

#[test]
fn native_cx_rate_is_rejected() {
    let (_, g) = build_cx_instances(2).unwrap();
    let cx = build_cx_code(&g, 2, 2, 1 << 20).unwrap();
    assert!(matches!(
        run_transfer(&g, &cx.code, &VerifyOptions::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn transfer_refuses_unnormalized_code() {
    let (g, mut code) = embedded(1);
    code.encoders.insert("z.1".into(), LocalFunction::Table(vec![1, 0]));
    let im = images_of(&g, &code);
    let tables = build_tables(&im);
    assert!(matches!(
        transfer_code(&g, &code, &tables, 1 << 20),
        Err(Error::NotRelayNormalized { .. })
    ));
}

#[test]
fn transfer_refuses_foreign_tables() {
    let (g, code) = embedded(1);
    let im = images_of(&g, &code);
    let tables = build_tables(&im);
    let mut other = code.clone();
    other.decoders.insert("t".into(), LocalFunction::Const(0));
    assert!(matches!(
        transfer_code(&g, &other, &tables, 1 << 20),
        Err(Error::FingerprintMismatch { .. })
    ));
}

#[test]
fn deletion_examples() {
    assert_eq!(delete_pairs(vec![(0, 5), (1, 5), (2, 5)]).count(), 0);
    let d = delete_pairs(vec![(0, 7), (1, 7), (2, 9)]);
    assert_eq!(d.pairs, vec![(0, 2)]);
    assert_eq!(d.remaining, vec![1]);
    // lexicographic choice
    let d = delete_pairs(vec![(0, 1), (1, 2), (2, 1), (3, 2)]);
    assert_eq!(d.pairs, vec![(0, 1), (2, 3)]);
}

#[test]
fn zero_error_has_no_lemma2_pairs() {
    let (g, code) = embedded(1);
    let im = images_of(&g, &code);
    for z in 0..2 {
        assert_eq!(pair_deletion(&im, 0, z).count(), 0);
    }
    assert!(matches!(lemma2_witness(&im, 0, 0, 1), Err(Error::Precondition(_))));
}

#[test]
fn lemma4_single_value_is_empty() {
    let (g, code) = embedded(1);
    let im = images_of(&g, &code);
    let w = lemma4_witnesses(&im, 0, 1).unwrap();
    assert_eq!(w.l, 1);
    assert!(w.elements.is_empty());
}

#[test]
fn full_classes_stay_out_of_the_partition() {
    // every a_1 class has exactly 2^{(k-1)n} = 2 members
    let (g, code) = embedded(1);
    let run = run_transfer(&g, &code, &VerifyOptions::default()).unwrap();
    let p = pi_partition(&run.images, 0, &run.tables).unwrap();
    assert!(p.a1.is_empty() && p.a2.is_empty());
    assert!(p.all_hold());
    assert_eq!(p.largest_b_class, 2);
}

#[test]
fn cx_trial_bounds_hold() {
    let (_, g) = build_cx_instances(2).unwrap();
    let cx = build_cx_code_rate_k(&g, 2, 2, 1 << 20).unwrap();
    for seed in 0..5 {
        let t = run_trial(&g, &cx.code, seed, &VerifyOptions::default()).unwrap();
        assert!(t.epsilon <= t.epsilon_raw);
        assert!(t.run.report.all_within(), "seed {seed}: {:?}", t.run.report);
        for b in &t.branches {
            assert!(b.partition.all_hold());
            assert!(b.deletion_guarantees && b.lemma2_distinct);
        }
    }
}

#[test]
fn lemma_witnesses_appear_under_corruption() {
    // random corruption of this code reaches pair deletion but never leaves a
    // good a_i class with two b_i values, see lemma4_on_a_split_class
    let (_, g) = build_cx_instances(2).unwrap();
    let code = build_cx_code_rate_k(&g, 2, 2, 1 << 20).unwrap().code;
    let mut seen2 = 0;
    for seed in 0..40 {
        let t = run_trial(&g, &code, seed, &VerifyOptions::default()).unwrap();
        for b in &t.branches {
            seen2 += b.lemma2.len();
            assert!(b.lemma4.iter().all(|(_, w)| w.elements.len() == (w.l - 1) * w.class_size));
            for (m1, m2, w) in &b.lemma2 {
                assert!(t.run.images.is_b_err(w.b));
                assert!(w.decodes_to == *m1 || w.decodes_to == *m2);
            }
        }
    }
    assert!(seen2 > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn corrupted_embedded_codes_respect_every_bound(seed in any::<u64>(), n in 1u32..3) {
        let (g, code) = embedded(n);
        let t = run_trial(&g, &code, seed, &VerifyOptions::default()).unwrap();
        let eps = t.epsilon;
        prop_assert!(crate::rational::count_within(t.a_err, 1, eps, t.space));
        prop_assert!(crate::rational::count_within(t.b_err, 1, eps, t.space));
        prop_assert!(t.run.report.all_within());
        for b in &t.branches {
            prop_assert!(b.deletions <= t.b_err);
            prop_assert!(b.partition.all_hold());
            prop_assert!(b.deletion_guarantees && b.lemma2_distinct);
        }
    }
}

/// Rate-2 code on the two-relay gadget at n = 1 where `b_1` is the parity from
/// `z'_1`, `b_2` is the usual compare-and-fallback, and the terminal trusts
/// only `b_2`. Messages with `M_1 = 0` are good and share `a_1 = 0` while
/// their `b_1` values differ.
pub(crate) fn split_class_code(g: &GadgetInstance) -> NetworkCode {
    let mut code = NetworkCode::new(1, 2);
    for (i, name) in ["a.1", "a.2"].iter().enumerate() {
        code.encoders.insert(name.to_string(), LocalFunction::slice(i as u32, i as u32 + 1));
    }
    for e in ["x.1", "y.1", "z.1", "x.2", "y.2", "z.2", "zp.1", "zp.2", "sC1", "sC2", "Dt1", "Dt2"] {
        code.encoders.insert(e.into(), LocalFunction::Relay(0));
    }
    code.encoders.insert("CD".into(), LocalFunction::xor_args([0, 1]));
    code.encoders.insert("b.1".into(), LocalFunction::Relay(2));
    // (x, y, zp) -> x if x == y else zp
    let fallback = (0..8u64)
        .map(|idx| {
            let (x, y, z) = (idx & 1, idx >> 1 & 1, idx >> 2 & 1);
            if x == y {
                x
            } else {
                z
            }
        })
        .collect();
    code.encoders.insert("b.2".into(), LocalFunction::Table(fallback));
    code.decoders.insert("t".into(), LocalFunction::Table(vec![0, 0, 2, 2]));
    assert_eq!(g.network().edge_name(g.branches[0].b), "b.1");
    code
}

#[test]
fn lemma4_on_a_split_class() {
    let (_, g) = build_cx_instances(2).unwrap();
    let code = split_class_code(&g);
    let im = images_of(&g, &code);
    assert_eq!(im.epsilon(), Rational::new(1, 2));
    assert_eq!(im.rows().iter().map(|r| r.message).collect::<Vec<_>>(), vec![0, 2]);
    let w = lemma4_witnesses(&im, 0, 0).unwrap();
    assert_eq!((w.l, w.class_size), (2, 2));
    // b = (b_1, b_2) packed with b_1 low
    assert_eq!(w.elements, vec![(0b01, 0), (0b10, 2)]);
    let run = run_transfer(&g, &code, &VerifyOptions::default()).unwrap();
    assert!(run.report.all_within());
    assert!(pi_partition(&run.images, 0, &run.tables).unwrap().all_hold());
}
