//! Exact evaluation of free polynomials on tuples of square rational
//! matrices, and the trace functional `p -> tr p(A)`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul};

use num_traits::{One, Zero};

use crate::par;
use crate::poly::{FreePoly, Scalar, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("polynomial has {poly} variables but the tuple has {tuple} matrices")]
    LengthMismatch { poly: usize, tuple: usize },
    #[error("matrix {index} is {found}x{found}, expected {expected}x{expected}")]
    SizeMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("tuples have shapes {left_g}x({left_n}x{left_n}) and {right_g}x({right_n}x{right_n})")]
    ShapeMismatch {
        left_g: usize,
        left_n: usize,
        right_g: usize,
        right_n: usize,
    },
}

/// Square matrix with exact rational entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl RationalMatrix {
    pub fn zero(n: usize) -> Self {
        RationalMatrix {
            n,
            entries: vec![Scalar::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &Scalar) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = c.clone();
        }
        m
    }

    /// `c * e_{ij}` with 0-based indices.
    pub fn unit(n: usize, i: usize, j: usize, c: Scalar) -> Self {
        let mut m = Self::zero(n);
        m.entries[i * n + j] = c;
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, EvalError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(EvalError::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            entries.extend(r);
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn diagonal(diag: Vec<Scalar>) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> + '_ {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> Scalar {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// `tr(self * rhs)` without forming the product.
    pub fn trace_of_product(&self, rhs: &RationalMatrix) -> Scalar {
        assert_eq!(self.n, rhs.n, "size mismatch");
        let mut acc = Scalar::zero();
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let b = rhs.get(k, i);
                if !b.is_zero() {
                    acc += a * b;
                }
            }
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        RationalMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// The block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.n;
        assert!([b.n, c.n, d.n].iter().all(|&m| m == n), "block size mismatch");
        let mut m = Self::zero(2 * n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, a.get(i, j).clone());
                m.set(i, j + n, b.get(i, j).clone());
                m.set(i + n, j, c.get(i, j).clone());
                m.set(i + n, j + n, d.get(i, j).clone());
            }
        }
        m
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;

    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, rhs.n, "size mismatch");
        let n = self.n;
        let mut out = RationalMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;

    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, rhs.n, "size mismatch");
        RationalMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// A point `A = (A_1, ..., A_g)` of `M_n(Q)^g`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatrixTuple {
    n: usize,
    matrices: Vec<RationalMatrix>,
}

impl MatrixTuple {
    pub fn new(n: usize, matrices: Vec<RationalMatrix>) -> Result<Self, EvalError> {
        if let Some((index, m)) = matrices.iter().enumerate().find(|(_, m)| m.n != n) {
            return Err(EvalError::SizeMismatch {
                index,
                expected: n,
                found: m.n,
            });
        }
        Ok(MatrixTuple { n, matrices })
    }

    pub fn zeros(n: usize, g: usize) -> Self {
        MatrixTuple {
            n,
            matrices: vec![RationalMatrix::zero(n); g],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[RationalMatrix] {
        &self.matrices
    }

    /// The matrix substituted for `x_index` (1-based).
    pub fn var(&self, index: u32) -> &RationalMatrix {
        &self.matrices[index as usize - 1]
    }

    pub(crate) fn matrices_mut(&mut self) -> &mut [RationalMatrix] {
        &mut self.matrices
    }

    fn check(&self, f: &FreePoly) -> Result<(), EvalError> {
        if f.nvars() != self.g() {
            return Err(EvalError::LengthMismatch {
                poly: f.nvars(),
                tuple: self.g(),
            });
        }
        Ok(())
    }
}

/// Word products with every computed prefix cached.
struct PrefixCache<'a> {
    tuple: &'a MatrixTuple,
    cache: HashMap<Vec<u32>, RationalMatrix>,
}

impl<'a> PrefixCache<'a> {
    fn new(tuple: &'a MatrixTuple) -> Self {
        PrefixCache {
            tuple,
            cache: HashMap::new(),
        }
    }

    fn product(&mut self, letters: &[u32]) -> RationalMatrix {
        match letters {
            [] => RationalMatrix::identity(self.tuple.n),
            [l] => self.tuple.var(*l).clone(),
            [prefix @ .., last] => {
                if let Some(m) = self.cache.get(letters) {
                    return m.clone();
                }
                let m = &self.product(prefix) * self.tuple.var(*last);
                self.cache.insert(letters.to_vec(), m.clone());
                m
            }
        }
    }

    fn trace(&mut self, letters: &[u32]) -> Scalar {
        match letters {
            [] => Scalar::from_integer(self.tuple.n.into()),
            [l] => self.tuple.var(*l).trace(),
            [prefix @ .., last] => self.product(prefix).trace_of_product(self.tuple.var(*last)),
        }
    }
}

/// Splits the terms of `f` into groups by first letter; each group shares
/// its prefix cache.
fn groups_by_first_letter(f: &FreePoly) -> Vec<Vec<(&Word, &Scalar)>> {
    let mut groups: BTreeMap<u32, Vec<(&Word, &Scalar)>> = BTreeMap::new();
    for (w, c) in f.terms() {
        groups.entry(w.letters().first().copied().unwrap_or(0)).or_default().push((w, c));
    }
    groups.into_values().collect()
}

pub fn eval_poly(f: &FreePoly, a: &MatrixTuple) -> Result<RationalMatrix, EvalError> {
    a.check(f)?;
    let groups = groups_by_first_letter(f);
    let partial = par::map(&groups, |group| {
        let mut cache = PrefixCache::new(a);
        group.iter().fold(RationalMatrix::zero(a.n), |acc, (w, c)| {
            &acc + &cache.product(w.letters()).scale(c)
        })
    });
    Ok(partial
        .iter()
        .fold(RationalMatrix::zero(a.n), |acc, m| &acc + m))
}

pub fn trace_eval(f: &FreePoly, a: &MatrixTuple) -> Result<Scalar, EvalError> {
    a.check(f)?;
    let groups = groups_by_first_letter(f);
    let partial = par::map(&groups, |group| {
        let mut cache = PrefixCache::new(a);
        group
            .iter()
            .map(|(w, c)| cache.trace(w.letters()) * *c)
            .sum::<Scalar>()
    });
    Ok(partial.into_iter().sum())
}

/// `tr w(A)` for a single word.
pub fn trace_word(w: &Word, a: &MatrixTuple) -> Scalar {
    assert!(w.max_letter() as usize <= a.g(), "word uses a letter beyond the tuple");
    PrefixCache::new(a).trace(w.letters())
}

/// Real doubling of the complex tuple `B + iC`: each `b_j + i c_j` becomes
/// `[[b_j, c_j], [-c_j, b_j]]`, so that traces of the result equal twice the
/// real part of traces at `B + iC`.
pub fn complexify_double(b: &MatrixTuple, c: &MatrixTuple) -> Result<MatrixTuple, EvalError> {
    if b.n != c.n || b.g() != c.g() {
        return Err(EvalError::ShapeMismatch {
            left_g: b.g(),
            left_n: b.n,
            right_g: c.g(),
            right_n: c.n,
        });
    }
    let minus_one = -Scalar::one();
    let matrices = b
        .matrices
        .iter()
        .zip(&c.matrices)
        .map(|(bj, cj)| RationalMatrix::block(bj, cj, &cj.scale(&minus_one), bj))
        .collect();
    Ok(MatrixTuple {
        n: 2 * b.n,
        matrices,
    })
}
