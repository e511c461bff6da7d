//! Free noncommutative polynomials with exact rational coefficients.

mod parse;

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

pub use parse::ParseError;

/// Exact rational scalar; the working field.
pub type Scalar = num_rational::BigRational;

/// A monomial in the free monoid: a sequence of 1-based variable indices.
///
/// Words are ordered graded-lexicographically: shorter words first, then by
/// letter index.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u32>);

impl Word {
    /// The empty word, i.e. the monomial `1`.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 1-based letter indices.
    ///
    /// Panics if a letter is zero.
    pub fn new(letters: Vec<u32>) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "letters are 1-based");
        Word(letters)
    }

    pub fn letter(index: u32) -> Self {
        Word::new(vec![index])
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest letter index occurring in the word, 0 for the empty word.
    pub fn max_letter(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Rotates left by `k` positions: `x_{i_1} ... x_{i_m}` becomes
    /// `x_{i_{k+1}} ... x_{i_m} x_{i_1} ... x_{i_k}`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut letters = self.0.clone();
        letters.rotate_left(k % self.0.len());
        Word(letters)
    }

    /// Formatter syntax with the empty word rendered as `""`, as used for
    /// JSON object keys.
    pub fn key(&self) -> String {
        if self.is_empty() {
            String::new()
        } else {
            self.to_string()
        }
    }

    /// Parses a single word in formatter syntax. `""` and `"1"` denote the
    /// empty word.
    pub fn parse(text: &str, nvars: usize) -> Result<Word, ParseError> {
        if text.trim().is_empty() {
            return Ok(Word::empty());
        }
        let poly = FreePoly::parse(text, nvars)?;
        let mut terms = poly.terms();
        match (terms.next(), terms.next()) {
            (Some((w, c)), None) if c.is_one() => Ok(w.clone()),
            _ => Err(ParseError::Syntax {
                offset: 0,
                message: format!("{text:?} is not a single word"),
            }),
        }
    }

    /// Enumerates all words of exactly `degree` letters over `g` variables in
    /// lexicographic order.
    pub fn all_of_degree(g: u32, degree: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..degree {
            let mut next = Vec::with_capacity(out.len() * g as usize);
            for w in &out {
                for l in 1..=g {
                    let mut letters = w.0.clone();
                    letters.push(l);
                    next.push(Word(letters));
                }
            }
            out = next;
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Degree of a polynomial. The zero polynomial has degree `MinusInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl Add for Degree {
    type Output = Degree;

    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::MinusInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in `nvars` noncommuting variables.
///
/// Invariant: no stored coefficient is zero and every letter is `<= nvars`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreePoly {
    nvars: usize,
    terms: BTreeMap<Word, Scalar>,
}

impl FreePoly {
    pub fn zero(nvars: usize) -> Self {
        FreePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::monomial(nvars, Word::empty(), c)
    }

    /// The variable `x_index` (1-based).
    pub fn var(nvars: usize, index: u32) -> Self {
        Self::monomial(nvars, Word::letter(index), Scalar::one())
    }

    pub fn monomial(nvars: usize, word: Word, coeff: Scalar) -> Self {
        Self::from_terms(nvars, [(word, coeff)])
    }

    /// Sums the given terms, merging repeated words and dropping zeros.
    ///
    /// Panics if a word uses a letter beyond `nvars`.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, Scalar)>,
    {
        let mut out = FreePoly::zero(nvars);
        for (w, c) in terms {
            assert!(
                w.max_letter() as usize <= nvars,
                "word {w} uses a letter beyond x{nvars}"
            );
            out.add_term(w, c);
        }
        out
    }

    fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
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

    pub fn parse(text: &str, nvars: usize) -> Result<Self, ParseError> {
        parse::parse(text, nvars)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Returns the same polynomial viewed in `nvars` variables.
    ///
    /// Panics if that would drop a used variable.
    pub fn with_nvars(mut self, nvars: usize) -> Self {
        assert!(
            self.terms.keys().all(|w| w.max_letter() as usize <= nvars),
            "cannot shrink variable count below a used letter"
        );
        self.nvars = nvars;
        self
    }

    /// Terms in graded lexicographic word order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Word, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|w| Degree::Finite(w.degree()))
            .max()
            .unwrap_or(Degree::MinusInfinity)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return FreePoly::zero(self.nvars);
        }
        FreePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(w, a)| (w.clone(), a * c))
                .collect(),
        }
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &FreePoly) -> FreePoly {
        &(self * other) - &(other * self)
    }
}

impl Default for FreePoly {
    fn default() -> Self {
        FreePoly::zero(0)
    }
}

impl fmt::Debug for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreePoly[g={}]({})", self.nvars, self)
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if w.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{abs}*{w}")?;
            }
        }
        Ok(())
    }
}

impl Add for &FreePoly {
    type Output = FreePoly;

    fn add(self, rhs: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        out.nvars = self.nvars.max(rhs.nvars);
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &FreePoly {
    type Output = FreePoly;

    fn sub(self, rhs: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        out.nvars = self.nvars.max(rhs.nvars);
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Neg for &FreePoly {
    type Output = FreePoly;

    fn neg(self) -> FreePoly {
        FreePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Mul for &FreePoly {
    type Output = FreePoly;

    fn mul(self, rhs: &FreePoly) -> FreePoly {
        let mut out = FreePoly::zero(self.nvars.max(rhs.nvars));
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FreePoly {
            type Output = FreePoly;
            fn $m(self, rhs: FreePoly) -> FreePoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FreePoly> for FreePoly {
            type Output = FreePoly;
            fn $m(self, rhs: &FreePoly) -> FreePoly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FreePoly {
    type Output = FreePoly;

    fn neg(self) -> FreePoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n.into(), d.into())
    }

    fn p(s: &str) -> FreePoly {
        FreePoly::parse(s, 2).unwrap()
    }

    #[test]
    fn add_cancels() {
        assert_eq!(p("x1 + x2") + p("-x1"), p("x2"));
        assert_eq!(p("x1 + x2") + FreePoly::zero(2), p("x1 + x2"));
        let a = FreePoly::monomial(2, Word::new(vec![1, 2]), q(2, 1));
        let b = FreePoly::monomial(2, Word::new(vec![1, 2]), q(1, 2));
        assert_eq!((a + b).coeff(&Word::new(vec![1, 2])), q(5, 2));
    }

    #[test]
    fn mul_is_noncommutative() {
        let x1 = FreePoly::var(2, 1);
        let x2 = FreePoly::var(2, 2);
        assert_eq!(&x1 * &x2, p("x1*x2"));
        assert_eq!(&x2 * &x1, p("x2*x1"));
        assert_ne!(&x1 * &x2, &x2 * &x1);
        assert_eq!(p("x1 + 1") * p("x1 - 1"), p("x1^2 - 1"));
        assert!((p("x1 + x2") * FreePoly::zero(2)).is_zero());
    }

    #[test]
    fn commutator_basics() {
        let x1 = FreePoly::var(2, 1);
        let x2 = FreePoly::var(2, 2);
        assert_eq!(x1.commutator(&x2), p("x1*x2 - x2*x1"));
        let f = p("x1*x2 + 3 x2");
        assert!(f.commutator(&f).is_zero());
        assert!(FreePoly::one(2).commutator(&f).is_zero());
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(FreePoly::zero(1).degree(), Degree::MinusInfinity);
        assert_eq!(FreePoly::one(1).degree(), Degree::Finite(0));
        assert_eq!(p("x1*x2*x1 + x2").degree(), Degree::Finite(3));
        assert_eq!(
            (p("x1") * FreePoly::zero(2)).degree(),
            Degree::MinusInfinity
        );
        assert!(Degree::MinusInfinity < Degree::Finite(0));
    }

    #[test]
    fn graded_word_order() {
        let mut ws = vec![
            Word::new(vec![2]),
            Word::new(vec![1, 1]),
            Word::empty(),
            Word::new(vec![1]),
        ];
        ws.sort();
        assert_eq!(
            ws,
            vec![
                Word::empty(),
                Word::new(vec![1]),
                Word::new(vec![2]),
                Word::new(vec![1, 1])
            ]
        );
    }

    #[test]
    fn format_output() {
        assert_eq!(p("x2*x1 - 3/2 x1^2 + 1 - x1").to_string(), "1 - x1 - 3/2*x1*x1 + x2*x1");
        assert_eq!(p("-x1").to_string(), "-x1");
        assert_eq!(FreePoly::zero(1).to_string(), "0");
    }

    #[test]
    fn word_parse_and_key() {
        assert_eq!(Word::parse("", 2).unwrap(), Word::empty());
        assert_eq!(Word::parse("x1x2", 2).unwrap(), Word::new(vec![1, 2]));
        assert_eq!(Word::new(vec![1, 2]).key(), "x1*x2");
        assert_eq!(Word::empty().key(), "");
        assert!(Word::parse("2 x1", 2).is_err());
        assert!(Word::parse("x1 + x2", 2).is_err());
    }
}
