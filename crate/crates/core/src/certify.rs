//! Deciding the dimension-free trace implication
//!
//! ```text
//! tr f_1(A) = ... = tr f_r(A) = 0   ==>   tr f(A) = 0     (all n, all A in M_n^g)
//! ```
//!
//! The implication holds exactly when `f` is cyclically equivalent to a linear
//! combination of the `f_i`, or some linear combination of the `f_i` is
//! cyclically equivalent to a nonzero scalar. Both conditions are linear
//! conditions on cyclic coordinates and are decided here by exact
//! elimination. A scalar combination equivalent to `c != 0` rescales to one
//! equivalent to `1`, so only the target `1` is solved.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::cyclic::{cyclic_canonicalize, CyclicRep, CyclicVector};
use crate::linalg;
use crate::par;
use crate::poly::{FreePoly, Scalar};

/// Column vectors and a target, all expressed on a shared ordered basis of
/// cyclic classes.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    columns: Vec<CyclicVector>,
    target: CyclicVector,
    basis: Vec<CyclicRep>,
}

impl LinearSystem {
    pub fn new(columns: Vec<CyclicVector>, target: CyclicVector) -> Self {
        let basis: BTreeSet<CyclicRep> = columns
            .iter()
            .flat_map(|c| c.support())
            .chain(target.support())
            .cloned()
            .collect();
        LinearSystem {
            columns,
            target,
            basis: basis.into_iter().collect(),
        }
    }

    pub fn columns(&self) -> &[CyclicVector] {
        &self.columns
    }

    pub fn target(&self) -> &CyclicVector {
        &self.target
    }

    pub fn basis(&self) -> &[CyclicRep] {
        &self.basis
    }

    /// Row-major coefficient matrix: one row per basis class.
    pub fn matrix(&self) -> Vec<Vec<Scalar>> {
        self.basis
            .iter()
            .map(|rep| self.columns.iter().map(|c| c.get(rep)).collect())
            .collect()
    }

    pub fn rhs(&self) -> Vec<Scalar> {
        self.basis.iter().map(|rep| self.target.get(rep)).collect()
    }
}

/// Finds `c` with `sum c_i * column_i = target`, or `None` when the target is
/// outside the column span. Free variables are set to zero.
pub fn solve_exact(system: &LinearSystem) -> Option<Vec<Scalar>> {
    linalg::solve(&system.matrix(), &system.rhs(), system.columns.len())
}

/// Outcome of the decision procedure. Both certificate kinds are searched
/// independently; either one suffices for the implication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// `lambda` with `sum lambda_i f_i ~cyc 1`.
    pub scalar_combination: Option<Vec<Scalar>>,
    /// `mu` with `f ~cyc sum mu_i f_i`.
    pub cyc_combination: Option<Vec<Scalar>>,
    pub implication_holds: bool,
}

fn columns(fs: &[FreePoly]) -> Vec<CyclicVector> {
    fs.iter().map(cyclic_canonicalize).collect()
}

pub fn certify_scalar(fs: &[FreePoly]) -> Option<Vec<Scalar>> {
    let nvars = fs.iter().map(FreePoly::nvars).max().unwrap_or(0);
    let one = cyclic_canonicalize(&FreePoly::one(nvars));
    solve_exact(&LinearSystem::new(columns(fs), one))
}

pub fn certify_membership(fs: &[FreePoly], f: &FreePoly) -> Option<Vec<Scalar>> {
    solve_exact(&LinearSystem::new(columns(fs), cyclic_canonicalize(f)))
}

pub fn certify(fs: &[FreePoly], f: &FreePoly) -> Certificate {
    let (scalar_combination, cyc_combination) =
        par::join(|| certify_scalar(fs), || certify_membership(fs, f));
    let implication_holds = scalar_combination.is_some() || cyc_combination.is_some();
    Certificate {
        scalar_combination,
        cyc_combination,
        implication_holds,
    }
}

/// `canon(f) - sum mu_i canon(f_i)`; zero exactly when `mu` certifies
/// membership.
pub fn membership_defect(fs: &[FreePoly], f: &FreePoly, mu: &[Scalar]) -> CyclicVector {
    assert_eq!(fs.len(), mu.len(), "one coefficient per constraint");
    fs.iter()
        .zip(mu)
        .filter(|(_, m)| !m.is_zero())
        .fold(cyclic_canonicalize(f), |acc, (fi, m)| {
            &acc - &cyclic_canonicalize(fi).scale(m)
        })
}
