mod common;

use std::collections::BTreeMap;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use tracial::cyclic::{classes_of_degree, classes_up_to};
use tracial::moment::MomentError;
use tracial::{
    atom_for_class, check_constraints, extract_moments, min_rotation, realize, trace_eval, validate_sequence,
    FreePoly, MatrixTuple, RationalMatrix, Scalar, TracialMomentSequence, Word,
};

fn sequence_strategy(g: usize, d: usize) -> impl Strategy<Value = TracialMomentSequence> {
    let classes = classes_up_to(g as u32, d);
    prop::collection::vec((-6i64..=6, 1i64..=5), classes.len()).prop_map(move |vals| {
        TracialMomentSequence::from_values(g, d, classes.iter().cloned().zip(vals.into_iter().map(|(p, q)| frac(p, q))))
    })
}

fn brute_trace(w: &Word, a: &MatrixTuple) -> Scalar {
    w.letters().iter().fold(RationalMatrix::identity(a.n()), |acc, &l| &acc * a.var(l)).trace()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn round_trip(g in 1usize..=2, d in 1usize..=4, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let l = TracialMomentSequence::from_values(
            g,
            d,
            classes_up_to(g as u32, d).into_iter().map(|c| (c, rational(&mut rng, 7, 5))),
        );
        let r = realize(&l);
        prop_assert_eq!(extract_moments(&r), l.clone());
        for atom in &r.atoms {
            prop_assert_eq!(atom.tuple.g(), g);
        }
    }

    #[test]
    fn scaling_weights_scales_moments(l in sequence_strategy(2, 3), p in -5i64..=5, q in 1i64..=4) {
        let c = frac(p, q);
        let r = realize(&l);
        prop_assert_eq!(extract_moments(&r.scale_weights(&c)), extract_moments(&r).scale(&c));
        prop_assert_eq!(extract_moments(&r.scale_weights(&c)), l.scale(&c));
    }

    #[test]
    fn realization_agrees_on_polynomials(l in sequence_strategy(3, 2), f in poly_strategy(3, 2, 6)) {
        let r = realize(&l);
        prop_assert_eq!(r.apply(&f).unwrap(), l.apply(&f).unwrap());
    }
}

#[test]
fn atoms_are_orthogonal() {
    for g in 1..=2u32 {
        for k in 1..=4 {
            for w in classes_of_degree(g, k) {
                let (tuple, achieved) = atom_for_class(&w, &frac(3, 7), g as usize).unwrap();
                assert_eq!(achieved, frac(3, 7));
                assert_eq!(tuple.n(), k);
                for j in 1..=k {
                    for v in Word::all_of_degree(g, j) {
                        let t = brute_trace(&v, &tuple);
                        if min_rotation(&v) == w {
                            assert_eq!(t, frac(3, 7), "w={w} v={v}");
                        } else {
                            assert!(t.is_zero(), "w={w} v={v}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn periodic_words_hit_their_target() {
    let mut rng = rng(5);
    for (text, g) in [("x1^2", 1), ("x1^3", 1), ("x1*x2*x1*x2", 2), ("x2^4", 2), ("x1*x2*x2*x1*x2*x2", 2)] {
        let w = min_rotation(&Word::parse(text, g).unwrap());
        for _ in 0..20 {
            let c = rational(&mut rng, 9, 7);
            let (tuple, achieved) = atom_for_class(&w, &c, g).unwrap();
            assert_eq!(brute_trace(w.word(), &tuple), c);
            assert_eq!(achieved, c);
        }
    }
}

#[test]
fn empty_word_is_fixed_by_zero_tuple() {
    let l = TracialMomentSequence::from_values(1, 1, [(min_rotation(&Word::empty()), int(5)), (min_rotation(&Word::letter(1)), int(2))]);
    let r = realize(&l);
    assert_eq!(r.atoms.len(), 2);
    assert_eq!(r.atoms[1].weight, int(4));
    assert!(r.atoms[1].tuple.matrices()[0].is_zero());
    assert_eq!(r.total_size(), 2);

    let l = TracialMomentSequence::from_values(1, 1, [(min_rotation(&Word::empty()), int(1)), (min_rotation(&Word::letter(1)), int(2))]);
    let r = realize(&l);
    assert_eq!(r.atoms.len(), 1);
    assert_eq!(extract_moments(&r), l);
}

#[test]
fn constraints_annihilated_by_realization() {
    let mut rng = rng(41);
    let mut checked = 0;
    while checked < 30 {
        let g = 2;
        let fs = vec![random_poly(&mut rng, g, 2, 3), random_poly(&mut rng, g, 2, 3)];
        // a sequence from a random realization-free point: solve L(f_i) = 0, L(1) = 1 on two free classes
        let classes = classes_up_to(g as u32, 2);
        let mut values: BTreeMap<_, _> = classes.iter().map(|c| (c.clone(), rational(&mut rng, 4, 3))).collect();
        values.insert(min_rotation(&Word::empty()), Scalar::one());
        let pick: Vec<_> = classes[1..].iter().cloned().filter(|_| rng.random_bool(0.9)).take(2).collect();
        if pick.len() < 2 {
            continue;
        }
        let residual = |vals: &BTreeMap<_, Scalar>, f: &FreePoly| {
            TracialMomentSequence::from_values(g, 2, vals.clone()).apply(f).unwrap()
        };
        // L is affine in the two picked values
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for f in &fs {
            let mut zeroed = values.clone();
            for p in &pick {
                zeroed.insert(p.clone(), Scalar::zero());
            }
            let base = residual(&zeroed, f);
            let row: Vec<Scalar> = pick
                .iter()
                .map(|p| {
                    let mut unit = zeroed.clone();
                    unit.insert(p.clone(), Scalar::one());
                    residual(&unit, f) - &base
                })
                .collect();
            rows.push(row);
            rhs.push(-base);
        }
        let Some(sol) = tracial::linalg::solve(&rows, &rhs, 2) else { continue };
        for (p, v) in pick.iter().zip(sol) {
            values.insert(p.clone(), v);
        }
        let l = TracialMomentSequence::from_values(g, 2, values);
        if !check_constraints(&l, &fs).unwrap() {
            continue;
        }
        let r = realize(&l);
        for f in &fs {
            let total: Scalar = r
                .atoms
                .iter()
                .map(|a| trace_eval(f, &a.tuple).unwrap() * &a.weight)
                .sum();
            assert!(total.is_zero());
        }
        checked += 1;
    }
}

#[test]
fn inconsistent_input_is_rejected() {
    let mut raw = BTreeMap::new();
    raw.insert("x1*x2*x2".to_string(), int(1));
    raw.insert("x2*x1*x2".to_string(), int(2));
    assert!(matches!(validate_sequence(&raw, 2, 3), Err(MomentError::Conflict { .. })));
    raw.insert("x2*x1*x2".to_string(), int(1));
    let l = validate_sequence(&raw, 2, 3).unwrap();
    assert_eq!(l.get(&min_rotation(&Word::parse("x2*x2*x1", 2).unwrap())), int(1));
    raw.insert("x1^4".to_string(), int(1));
    assert!(matches!(validate_sequence(&raw, 2, 3), Err(MomentError::DegreeOverflow { .. })));
    let mut raw = BTreeMap::new();
    raw.insert("x3".to_string(), int(1));
    assert!(validate_sequence(&raw, 2, 3).is_err());
}

#[test]
fn constraint_check_requires_unit_mass() {
    let l = TracialMomentSequence::from_values(1, 2, [(min_rotation(&Word::empty()), int(2))]);
    assert!(!check_constraints(&l, &[poly("x1", 1)]).unwrap());
    let l = l.scale(&frac(1, 2));
    assert!(check_constraints(&l, &[poly("x1", 1), poly("x1^2", 1)]).unwrap());
    assert!(!check_constraints(&l, &[FreePoly::one(1)]).unwrap());
    assert!(check_constraints(&l, &[poly("x1^3", 1)]).is_err());
}
