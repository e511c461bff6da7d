#![allow(dead_code)]

use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tracial::{FreePoly, MatrixTuple, RationalMatrix, Scalar, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(k: i64) -> Scalar {
    Scalar::from_integer(k.into())
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(p.into(), q.into())
}

pub fn poly(text: &str, g: usize) -> FreePoly {
    FreePoly::parse(text, g).unwrap()
}

/// Rational `p/q` with `|p| <= bound` and `1 <= q <= max_den`.
pub fn rational(rng: &mut ChaCha8Rng, bound: i64, max_den: i64) -> Scalar {
    frac(rng.random_range(-bound..=bound), rng.random_range(1..=max_den))
}

/// Nonzero rational with numerator in `[-bound, bound]`.
pub fn nonzero_rational(rng: &mut ChaCha8Rng, bound: i64, max_den: i64) -> Scalar {
    loop {
        let c = rational(rng, bound, max_den);
        if !c.is_zero() {
            return c;
        }
    }
}

pub fn word(rng: &mut ChaCha8Rng, g: usize, min_deg: usize, max_deg: usize) -> Word {
    let k = rng.random_range(min_deg..=max_deg);
    Word::new((0..k).map(|_| rng.random_range(1..=g as u32)).collect())
}

pub fn random_poly(rng: &mut ChaCha8Rng, g: usize, max_deg: usize, max_terms: usize) -> FreePoly {
    let terms = rng.random_range(1..=max_terms);
    FreePoly::from_terms(
        g,
        (0..terms)
            .map(|_| (word(rng, g, 0, max_deg), rational(rng, 5, 4)))
            .collect::<Vec<_>>(),
    )
}

/// `sum_k c_k [u_k, v_k]` for random words with `|u| + |v| <= max_deg`.
pub fn commutator_sum(rng: &mut ChaCha8Rng, g: usize, count: usize, max_deg: usize) -> FreePoly {
    let mut out = FreePoly::zero(g);
    for _ in 0..count {
        let du = rng.random_range(0..=max_deg);
        let u = word(rng, g, du, du);
        let v = word(rng, g, 0, max_deg - du);
        let p = FreePoly::monomial(g, u, nonzero_rational(rng, 5, 3));
        let q = FreePoly::monomial(g, v, Scalar::from_integer(1.into()));
        out = out + p.commutator(&q);
    }
    out
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, bound: i64, max_den: i64) -> RationalMatrix {
    RationalMatrix::from_rows(
        (0..n)
            .map(|_| (0..n).map(|_| rational(rng, bound, max_den)).collect())
            .collect(),
    )
    .unwrap()
}

pub fn random_tuple(rng: &mut ChaCha8Rng, n: usize, g: usize) -> MatrixTuple {
    MatrixTuple::new(n, (0..g).map(|_| random_matrix(rng, n, 3, 3)).collect()).unwrap()
}

pub fn poly_strategy(g: usize, max_deg: usize, max_terms: usize) -> impl Strategy<Value = FreePoly> {
    let term = (
        prop::collection::vec(1..=g as u32, 0..=max_deg),
        -9i64..=9,
        1i64..=6,
    );
    prop::collection::vec(term, 0..=max_terms).prop_map(move |terms| {
        FreePoly::from_terms(
            g,
            terms
                .into_iter()
                .map(|(w, p, q)| (Word::new(w), frac(p, q)))
                .collect::<Vec<_>>(),
        )
    })
}

pub fn word_strategy(g: usize, min_deg: usize, max_deg: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=g as u32, min_deg..=max_deg).prop_map(Word::new)
}

pub fn tuple_strategy(max_n: usize, g: usize) -> impl Strategy<Value = MatrixTuple> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((-4i64..=4, 1i64..=3), g * n * n).prop_map(move |entries| {
            let mut it = entries.into_iter().map(|(p, q)| frac(p, q));
            let matrices = (0..g)
                .map(|_| {
                    RationalMatrix::from_rows(
                        (0..n).map(|_| it.by_ref().take(n).collect()).collect(),
                    )
                    .unwrap()
                })
                .collect();
            MatrixTuple::new(n, matrices).unwrap()
        })
    })
}
