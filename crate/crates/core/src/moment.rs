//! Truncated tracial moment sequences and their realization as weighted sums
//! of matrix trace functionals `p -> tr p(A)`.
//!
//! [`realize`] works degree by degree. After the atoms for degrees `< k` are
//! fixed, the residual `L - sum phi_A` is read off on every class of degree
//! `k` and one atom per class with nonzero residual is added. The atom for a
//! class `w` of degree `k` is a tuple of `k x k` matrices made of the cyclic
//! shift units `e_{u,u+1}` and a closing unit `e_{k,1}`, with letter `u` of
//! `w` receiving unit `u`. A word of length `<= k` has nonzero trace on such a
//! tuple only if it walks the full cycle, i.e. only if it is a rotation of
//! `w`. Finally a `1 x 1` zero tuple, which sees only the empty word, fixes
//! `L(1)`.
//!
//! When `w = u^p` the cycle can be entered at `p` distinct positions that all
//! spell `w`, so `tr w(A)` picks up the closing coefficient `p` times. The
//! closing coefficient is therefore `target / p`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cyclic::{classes_of_degree, classes_up_to, cyclic_canonicalize, min_rotation, primitive_period, CyclicRep};
use crate::eval::{trace_eval, trace_word, EvalError, MatrixTuple, RationalMatrix};
use crate::par;
use crate::poly::{Degree, FreePoly, ParseError, Scalar, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MomentError {
    #[error("invalid moment key: {0}")]
    Key(#[from] ParseError),
    #[error("moments {first:?} = {first_value} and {second:?} = {second_value} belong to the same cyclic class but differ")]
    Conflict {
        first: String,
        first_value: Scalar,
        second: String,
        second_value: Scalar,
    },
    #[error("word {word:?} has degree {degree}, beyond the truncation degree {d}")]
    DegreeOverflow { word: String, degree: usize, d: usize },
    #[error("constraint {index} has degree {degree}, beyond the truncation degree {d}")]
    ConstraintDegree { index: usize, degree: usize, d: usize },
    #[error("polynomial has {poly} variables, the sequence has {g}")]
    VariableMismatch { poly: usize, g: usize },
    #[error("cannot build an atom for the empty word")]
    EmptyWord,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Values `L(w)` on cyclic classes of degree `<= d`. Classes without an
/// entry have value zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TracialMomentSequence {
    g: usize,
    d: usize,
    values: BTreeMap<CyclicRep, Scalar>,
}

impl TracialMomentSequence {
    pub fn zero(g: usize, d: usize) -> Self {
        TracialMomentSequence {
            g,
            d,
            values: BTreeMap::new(),
        }
    }

    /// Builds a sequence from values on canonical representatives.
    ///
    /// Panics if a representative exceeds degree `d` or uses a letter beyond `g`.
    pub fn from_values<I>(g: usize, d: usize, values: I) -> Self
    where
        I: IntoIterator<Item = (CyclicRep, Scalar)>,
    {
        let mut out = Self::zero(g, d);
        for (rep, v) in values {
            assert!(rep.degree() <= d && rep.word().max_letter() as usize <= g);
            if !v.is_zero() {
                out.values.insert(rep, v);
            }
        }
        out
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, rep: &CyclicRep) -> Scalar {
        self.values.get(rep).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `L(1)`.
    pub fn empty_value(&self) -> Scalar {
        self.get(&CyclicRep::default())
    }

    /// Every class of degree `<= d` with its value, zeros included.
    pub fn all_values(&self) -> Vec<(CyclicRep, Scalar)> {
        classes_up_to(self.g as u32, self.d)
            .into_iter()
            .map(|rep| {
                let v = self.get(&rep);
                (rep, v)
            })
            .collect()
    }

    /// Nonzero entries only.
    pub fn nonzero(&self) -> impl Iterator<Item = (&CyclicRep, &Scalar)> + '_ {
        self.values.iter()
    }

    /// `L(p)`, computed through the cyclic coordinates of `p`.
    pub fn apply(&self, p: &FreePoly) -> Result<Scalar, MomentError> {
        if p.nvars() > self.g {
            return Err(MomentError::VariableMismatch {
                poly: p.nvars(),
                g: self.g,
            });
        }
        if let Degree::Finite(k) = p.degree() {
            if k > self.d {
                return Err(MomentError::ConstraintDegree {
                    index: 0,
                    degree: k,
                    d: self.d,
                });
            }
        }
        Ok(cyclic_canonicalize(p)
            .iter()
            .map(|(rep, c)| self.get(rep) * c)
            .sum())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_values(
            self.g,
            self.d,
            self.values.iter().map(|(k, v)| (k.clone(), v * c)),
        )
    }
}

/// Checks a raw word-keyed assignment for cyclic consistency and turns it
/// into a sequence on canonical representatives.
pub fn validate_sequence(
    raw: &BTreeMap<String, Scalar>,
    g: usize,
    d: usize,
) -> Result<TracialMomentSequence, MomentError> {
    let mut seen: BTreeMap<CyclicRep, (&str, &Scalar)> = BTreeMap::new();
    for (key, value) in raw {
        let word = Word::parse(key, g)?;
        if word.degree() > d {
            return Err(MomentError::DegreeOverflow {
                word: key.clone(),
                degree: word.degree(),
                d,
            });
        }
        match seen.entry(min_rotation(&word)) {
            Entry::Vacant(e) => {
                e.insert((key, value));
            }
            Entry::Occupied(e) => {
                let (first, first_value) = *e.get();
                if first_value != value {
                    return Err(MomentError::Conflict {
                        first: first.to_string(),
                        first_value: first_value.clone(),
                        second: key.clone(),
                        second_value: value.clone(),
                    });
                }
            }
        }
    }
    Ok(TracialMomentSequence::from_values(
        g,
        d,
        seen.into_iter().map(|(rep, (_, v))| (rep, v.clone())),
    ))
}

/// One weighted tuple of a realization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Atom {
    pub weight: Scalar,
    pub tuple: MatrixTuple,
}

/// A functional `p -> sum weight_l * tr p(A_l)`, tracial by construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Realization {
    pub g: usize,
    pub d: usize,
    pub atoms: Vec<Atom>,
}

impl Realization {
    pub fn apply(&self, p: &FreePoly) -> Result<Scalar, MomentError> {
        let p = if p.nvars() < self.g {
            p.clone().with_nvars(self.g)
        } else {
            p.clone()
        };
        let mut acc = Scalar::zero();
        for atom in &self.atoms {
            acc += trace_eval(&p, &atom.tuple)? * &atom.weight;
        }
        Ok(acc)
    }

    pub fn scale_weights(&self, c: &Scalar) -> Self {
        Realization {
            g: self.g,
            d: self.d,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    weight: &a.weight * c,
                    tuple: a.tuple.clone(),
                })
                .collect(),
        }
    }

    /// Total matrix size `sum n_l` over all atoms.
    pub fn total_size(&self) -> usize {
        self.atoms.iter().map(|a| a.tuple.n()).sum()
    }
}

fn realization_value(atoms: &[Atom], w: &Word) -> Scalar {
    atoms
        .iter()
        .map(|a| trace_word(w, &a.tuple) * &a.weight)
        .sum()
}

/// Builds the shift-unit tuple for class `w` with `tr w(A) = target`.
///
/// Returns the tuple and the trace of `w` it actually achieves.
pub fn atom_for_class(
    w: &CyclicRep,
    target: &Scalar,
    g: usize,
) -> Result<(MatrixTuple, Scalar), MomentError> {
    let letters = w.word().letters();
    let size = letters.len();
    if size == 0 {
        return Err(MomentError::EmptyWord);
    }
    assert!(w.word().max_letter() as usize <= g, "class uses a letter beyond x{g}");
    let period = primitive_period(w.word()).expect("nonempty");
    let closing = target / Scalar::from_integer(period.into());
    let mut tuple = MatrixTuple::zeros(size, g);
    for (u, &letter) in letters.iter().enumerate() {
        let m = &mut tuple.matrices_mut()[letter as usize - 1];
        if u + 1 < size {
            *m = &*m + &RationalMatrix::unit(size, u, u + 1, Scalar::one());
        } else {
            *m = &*m + &RationalMatrix::unit(size, u, 0, closing.clone());
        }
    }
    let achieved = trace_word(w.word(), &tuple);
    Ok((tuple, achieved))
}

pub fn realize(l: &TracialMomentSequence) -> Realization {
    let g = l.g;
    let mut atoms: Vec<Atom> = Vec::new();
    for k in 1..=l.d {
        let classes = classes_of_degree(g as u32, k);
        let residuals = par::map(&classes, |rep| {
            l.get(rep) - realization_value(&atoms, rep.word())
        });
        let pending: Vec<(CyclicRep, Scalar)> = classes
            .into_iter()
            .zip(residuals)
            .filter(|(_, r)| !r.is_zero())
            .collect();
        let built = par::map(&pending, |(rep, r)| {
            let (tuple, achieved) = atom_for_class(rep, r, g).expect("nonempty class");
            debug_assert_eq!(&achieved, r);
            Atom {
                weight: Scalar::one(),
                tuple,
            }
        });
        atoms.extend(built);
    }
    let used: Scalar = atoms
        .iter()
        .map(|a| &a.weight * Scalar::from_integer(a.tuple.n().into()))
        .sum();
    let empty_weight = l.empty_value() - used;
    if !empty_weight.is_zero() {
        atoms.push(Atom {
            weight: empty_weight,
            tuple: MatrixTuple::zeros(1, g),
        });
    }
    Realization { g, d: l.d, atoms }
}

pub fn extract_moments(r: &Realization) -> TracialMomentSequence {
    let classes = classes_up_to(r.g as u32, r.d);
    let values = par::map(&classes, |rep| realization_value(&r.atoms, rep.word()));
    TracialMomentSequence::from_values(r.g, r.d, classes.into_iter().zip(values))
}

/// Whether `L(1) = 1` and `L(f_i) = 0` for every constraint.
pub fn check_constraints(
    l: &TracialMomentSequence,
    fs: &[FreePoly],
) -> Result<bool, MomentError> {
    let mut ok = l.empty_value().is_one();
    for (index, f) in fs.iter().enumerate() {
        if let Degree::Finite(k) = f.degree() {
            if k > l.d {
                return Err(MomentError::ConstraintDegree {
                    index,
                    degree: k,
                    d: l.d,
                });
            }
        }
        ok &= l.apply(f)?.is_zero();
    }
    Ok(ok)
}
