//! Dense Gauss-Jordan elimination over the rationals.

use num_traits::{One, Zero};

use crate::poly::Scalar;

/// Reduced row echelon form of a dense matrix, with the pivot column of each
/// nonzero row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Brings `rows` (each of length `ncols`) to reduced row echelon form.
///
/// Pivots are taken column by column; within a column the first row in
/// input order carrying a nonzero entry is chosen.
pub fn rref(mut rows: Vec<Vec<Scalar>>, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows[next..=found].rotate_right(1);
        let inv = rows[next][col].recip();
        if !inv.is_one() {
            for v in rows[next].iter_mut().skip(col) {
                *v *= &inv;
            }
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    Rref { rows, pivots }
}

/// Solves `A x = b` exactly, where `A` is given by its rows.
///
/// Returns `None` when `b` is outside the column span of `A`; otherwise the
/// solution whose free variables are zero.
pub fn solve(a_rows: &[Vec<Scalar>], b: &[Scalar], ncols: usize) -> Option<Vec<Scalar>> {
    assert_eq!(a_rows.len(), b.len(), "row count mismatch");
    let augmented: Vec<Vec<Scalar>> = a_rows
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), ncols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let reduced = rref(augmented, ncols + 1);
    if reduced.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (row, &col) in reduced.rows.iter().zip(&reduced.pivots) {
        x[col] = row[ncols].clone();
    }
    Some(x)
}
