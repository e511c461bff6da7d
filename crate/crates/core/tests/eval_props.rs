mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tracial::eval::trace_word;
use tracial::{
    complexify_double, cyclic_canonicalize, eval_poly, trace_eval, FreePoly, MatrixTuple, RationalMatrix, Scalar,
    Word,
};

/// Dense complex matrix over the rationals, `(re, im)` per entry.
#[derive(Clone, Debug, PartialEq)]
struct ComplexMatrix(Vec<Vec<(Scalar, Scalar)>>);

impl ComplexMatrix {
    fn from_parts(re: &RationalMatrix, im: &RationalMatrix) -> Self {
        let n = re.n();
        ComplexMatrix(
            (0..n)
                .map(|i| (0..n).map(|j| (re.get(i, j).clone(), im.get(i, j).clone())).collect())
                .collect(),
        )
    }

    fn identity(n: usize) -> Self {
        ComplexMatrix(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (if i == j { Scalar::one() } else { Scalar::zero() }, Scalar::zero()))
                        .collect()
                })
                .collect(),
        )
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.0.len();
        let mut out = vec![vec![(Scalar::zero(), Scalar::zero()); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..n {
                    let (a, b) = &self.0[i][k];
                    let (c, d) = &other.0[k][j];
                    cell.0 += a * c - b * d;
                    cell.1 += a * d + b * c;
                }
            }
        }
        ComplexMatrix(out)
    }

    fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        for (row, orow) in self.0.iter_mut().zip(&other.0) {
            for (cell, o) in row.iter_mut().zip(orow) {
                cell.0 += &o.0 * c;
                cell.1 += &o.1 * c;
            }
        }
    }
}

fn complex_eval(f: &FreePoly, vars: &[ComplexMatrix], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix(vec![vec![(Scalar::zero(), Scalar::zero()); n]; n]);
    for (w, c) in f.terms() {
        let m = w
            .letters()
            .iter()
            .fold(ComplexMatrix::identity(n), |acc, &l| acc.mul(&vars[l as usize - 1]));
        out.add_scaled(&m, c);
    }
    out
}

fn naive_product(w: &Word, a: &MatrixTuple) -> RationalMatrix {
    w.letters()
        .iter()
        .fold(RationalMatrix::identity(a.n()), |acc, &l| &acc * a.var(l))
}

fn pair_strategy(g: usize) -> impl Strategy<Value = (MatrixTuple, MatrixTuple)> {
    tuple_strategy(3, g).prop_flat_map(move |b| {
        let n = b.n();
        let c = prop::collection::vec((-4i64..=4, 1i64..=3), g * n * n).prop_map(move |entries| {
            let mut it = entries.into_iter().map(|(p, q)| frac(p, q));
            MatrixTuple::new(
                n,
                (0..g)
                    .map(|_| RationalMatrix::from_rows((0..n).map(|_| it.by_ref().take(n).collect()).collect()).unwrap())
                    .collect(),
            )
            .unwrap()
        });
        (Just(b), c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evaluation_is_unital_homomorphism(f in poly_strategy(3, 3, 5), h in poly_strategy(3, 2, 5), a in tuple_strategy(4, 3)) {
        let fa = eval_poly(&f, &a).unwrap();
        let ha = eval_poly(&h, &a).unwrap();
        prop_assert_eq!(eval_poly(&(&f * &h), &a).unwrap(), &fa * &ha);
        prop_assert_eq!(eval_poly(&(&f + &h), &a).unwrap(), &fa + &ha);
        prop_assert_eq!(eval_poly(&FreePoly::one(3), &a).unwrap(), RationalMatrix::identity(a.n()));
    }

    #[test]
    fn words_multiply_left_to_right(w in word_strategy(3, 0, 5), a in tuple_strategy(3, 3)) {
        let f = FreePoly::monomial(3, w.clone(), int(1));
        let expected = naive_product(&w, &a);
        prop_assert_eq!(eval_poly(&f, &a).unwrap(), expected.clone());
        prop_assert_eq!(trace_word(&w, &a), expected.trace());
    }

    #[test]
    fn trace_factors_through_classes(f in poly_strategy(2, 4, 6), a in tuple_strategy(4, 2)) {
        let canon = cyclic_canonicalize(&f).to_poly();
        prop_assert_eq!(trace_eval(&f, &a).unwrap(), trace_eval(&canon, &a).unwrap());
        prop_assert_eq!(trace_eval(&f, &a).unwrap(), eval_poly(&f, &a).unwrap().trace());
    }

    #[test]
    fn diagonal_tuples(w in word_strategy(3, 0, 6), diag in prop::collection::vec(prop::collection::vec((-5i64..=5, 1i64..=3), 3), 1..=4)) {
        let n = diag.len();
        let a = MatrixTuple::new(
            n,
            (0..3).map(|j| RationalMatrix::diagonal(diag.iter().map(|d| frac(d[j].0, d[j].1)).collect())).collect(),
        )
        .unwrap();
        let expected: Scalar = diag
            .iter()
            .map(|d| w.letters().iter().map(|&l| frac(d[l as usize - 1].0, d[l as usize - 1].1)).product::<Scalar>())
            .sum();
        prop_assert_eq!(trace_word(&w, &a), expected);
    }

    #[test]
    fn doubling_matches_complex_evaluation(f in poly_strategy(2, 3, 5), (b, c) in pair_strategy(2)) {
        let n = b.n();
        let vars: Vec<ComplexMatrix> = b.matrices().iter().zip(c.matrices()).map(|(x, y)| ComplexMatrix::from_parts(x, y)).collect();
        let z = complex_eval(&f, &vars, n);
        let doubled = complexify_double(&b, &c).unwrap();
        prop_assert_eq!(doubled.n(), 2 * n);
        let m = eval_poly(&f, &doubled).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), &z.0[i][j].0);
                prop_assert_eq!(m.get(i, j + n), &z.0[i][j].1);
                prop_assert_eq!(m.get(i + n, j), &-z.0[i][j].1.clone());
                prop_assert_eq!(m.get(i + n, j + n), &z.0[i][j].0);
            }
        }
        let re_trace: Scalar = (0..n).map(|i| z.0[i][i].0.clone()).sum();
        prop_assert_eq!(trace_eval(&f, &doubled).unwrap(), re_trace * int(2));
    }
}

#[test]
fn mismatched_inputs_are_rejected() {
    let a = MatrixTuple::zeros(2, 2);
    assert!(trace_eval(&poly("x1", 3), &a).is_err());
    assert!(eval_poly(&poly("x1", 1), &a).is_err());
    assert!(MatrixTuple::new(2, vec![RationalMatrix::identity(2), RationalMatrix::identity(3)]).is_err());
    assert!(RationalMatrix::from_rows(vec![vec![int(1)], vec![int(1), int(2)]]).is_err());
    assert!(complexify_double(&a, &MatrixTuple::zeros(3, 2)).is_err());
}

#[test]
fn constant_term_contributes_size() {
    let a = MatrixTuple::zeros(3, 1);
    assert_eq!(trace_eval(&poly("2/3", 1), &a).unwrap(), int(2));
    assert_eq!(trace_eval(&poly("x1 + 1", 1), &a).unwrap(), int(3));
}
