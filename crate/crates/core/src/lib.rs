//! Exact computation with free noncommutative polynomials modulo sums of
//! commutators.
//!
//! * [`certify`] decides whether vanishing traces of `f_1, ..., f_r` force the
//!   trace of `f` to vanish on matrices of every size, returning explicit
//!   rational certificates.
//! * [`moment`] writes any truncated tracial moment sequence as a weighted sum
//!   of matrix trace functionals.
//! * [`witness`] searches numerically for refuting tuples.
//! * [`bounds`] evaluates the effective degree and matrix-size bounds.

pub mod bounds;
pub mod certify;
pub mod cyclic;
pub mod eval;
pub mod io;
pub mod linalg;
pub mod moment;
mod par;
pub mod poly;
pub mod witness;

pub use certify::{certify, certify_membership, certify_scalar, solve_exact, Certificate, LinearSystem};
pub use cyclic::{cyclic_canonicalize, is_cyc_equivalent, min_rotation, primitive_period, CyclicRep, CyclicVector};
pub use eval::{complexify_double, eval_poly, trace_eval, MatrixTuple, RationalMatrix};
pub use moment::{atom_for_class, check_constraints, extract_moments, realize, validate_sequence, Realization, TracialMomentSequence};
pub use par::threads;
pub use poly::{Degree, FreePoly, ParseError, Scalar, Word};
