//! Canonical forms modulo sums of commutators.
//!
//! Two words are cyclically equivalent when one is a rotation of the other.
//! A polynomial is a sum of commutators exactly when, for every rotation
//! class, the coefficients of the words in that class sum to zero. The
//! [`CyclicVector`] of a polynomial records these class sums, keyed by the
//! lexicographically least rotation of each class.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

use num_traits::Zero;

use crate::poly::{FreePoly, Scalar, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CyclicError {
    #[error("the empty word has no primitive period")]
    EmptyWord,
}

/// Index of the lexicographically least rotation (Booth's algorithm).
fn least_rotation(s: &[u32]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut fail = vec![-1isize; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j % n];
        let mut i = fail[j - k - 1];
        while i != -1 && sj != s[(k + i as usize + 1) % n] {
            if sj < s[(k + i as usize + 1) % n] {
                k = j - i as usize - 1;
            }
            i = fail[i as usize];
        }
        if i == -1 && sj != s[k % n] {
            if sj < s[k % n] {
                k = j;
            }
            fail[j - k] = -1;
        } else {
            fail[j - k] = i + 1;
        }
    }
    k % n
}

/// The canonical representative of a rotation class: its least rotation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CyclicRep(Word);

impl CyclicRep {
    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn key(&self) -> String {
        self.0.key()
    }
}

impl fmt::Display for CyclicRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for CyclicRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicRep({})", self.0)
    }
}

pub fn min_rotation(w: &Word) -> CyclicRep {
    CyclicRep(w.rotate(least_rotation(w.letters())))
}

/// Number of times the shortest repeating block occurs in `w`.
pub fn primitive_period(w: &Word) -> Result<usize, CyclicError> {
    let s = w.letters();
    let n = s.len();
    if n == 0 {
        return Err(CyclicError::EmptyWord);
    }
    // prefix function
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let block = n - pi[n - 1];
    Ok(if n % block == 0 { n / block } else { 1 })
}

/// All rotation classes of words with exactly `degree` letters over `g`
/// variables, in ascending representative order.
pub fn classes_of_degree(g: u32, degree: usize) -> Vec<CyclicRep> {
    Word::all_of_degree(g, degree)
        .into_iter()
        .filter(|w| min_rotation(w).word() == w)
        .map(CyclicRep)
        .collect()
}

/// All rotation classes of degree `<= max_degree`, including the empty word.
pub fn classes_up_to(g: u32, max_degree: usize) -> Vec<CyclicRep> {
    (0..=max_degree)
        .flat_map(|k| classes_of_degree(g, k))
        .collect()
}

/// Coordinates of a polynomial on rotation classes.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CyclicVector {
    nvars: usize,
    coords: BTreeMap<CyclicRep, Scalar>,
}

impl CyclicVector {
    pub fn zero(nvars: usize) -> Self {
        CyclicVector {
            nvars,
            coords: BTreeMap::new(),
        }
    }

    /// Builds a vector from coordinates, canonicalizing keys and summing
    /// coordinates that land in the same class.
    pub fn from_coords<I>(nvars: usize, coords: I) -> Self
    where
        I: IntoIterator<Item = (Word, Scalar)>,
    {
        let mut out = CyclicVector::zero(nvars);
        for (w, c) in coords {
            out.add_at(min_rotation(&w), c);
        }
        out
    }

    fn add_at(&mut self, rep: CyclicRep, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coords.entry(rep) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, rep: &CyclicRep) -> Scalar {
        self.coords.get(rep).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&CyclicRep, &Scalar)> + '_ {
        self.coords.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &CyclicRep> + '_ {
        self.coords.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return CyclicVector::zero(self.nvars);
        }
        CyclicVector {
            nvars: self.nvars,
            coords: self
                .coords
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// The polynomial whose terms are the representatives weighted by their
    /// coordinates; cyclically equivalent to every preimage.
    pub fn to_poly(&self) -> FreePoly {
        FreePoly::from_terms(
            self.nvars,
            self.coords
                .iter()
                .map(|(k, v)| (k.word().clone(), v.clone())),
        )
    }
}

impl fmt::Debug for CyclicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.coords.iter().map(|(k, v)| (k.key(), v.to_string())))
            .finish()
    }
}

impl Add for &CyclicVector {
    type Output = CyclicVector;

    fn add(self, rhs: &CyclicVector) -> CyclicVector {
        let mut out = self.clone();
        out.nvars = self.nvars.max(rhs.nvars);
        for (k, v) in &rhs.coords {
            out.add_at(k.clone(), v.clone());
        }
        out
    }
}

impl Sub for &CyclicVector {
    type Output = CyclicVector;

    fn sub(self, rhs: &CyclicVector) -> CyclicVector {
        let mut out = self.clone();
        out.nvars = self.nvars.max(rhs.nvars);
        for (k, v) in &rhs.coords {
            out.add_at(k.clone(), -v);
        }
        out
    }
}

pub fn cyclic_canonicalize(f: &FreePoly) -> CyclicVector {
    CyclicVector::from_coords(f.nvars(), f.terms().map(|(w, c)| (w.clone(), c.clone())))
}

pub fn is_cyc_equivalent(f: &FreePoly, h: &FreePoly) -> bool {
    cyclic_canonicalize(&(f - h)).is_zero()
}
