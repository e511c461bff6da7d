//! Numerical search for matrix tuples refuting a trace implication, and an
//! exact generator of tuples satisfying trace constraints.
//!
//! The search minimizes `sum_i |tr f_i(A)|^2` over complex matrix entries with
//! a Levenberg-Marquardt damped Gauss-Newton iteration. Once the constraint
//! residual falls below `10 * tol`, a penalty `max(0, tau - |tr f(A)|)^2` is
//! added to keep the target trace away from zero. A returned report is a
//! genuine numerical witness; `None` is inconclusive and never a proof that
//! the implication holds. Use [`crate::certify`] to decide.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eval::{trace_eval, MatrixTuple, RationalMatrix};
use crate::linalg;
use crate::par;
use crate::poly::{FreePoly, Scalar};

pub type CMatrix = DMatrix<Complex64>;

/// Target threshold a witness must exceed.
pub const TARGET_THRESHOLD: f64 = 0.5;
/// The penalty pushes `|tr f|` toward this level so the final value clears
/// [`TARGET_THRESHOLD`] strictly.
const PENALTY_LEVEL: f64 = 0.6;
/// Restarts are run in fixed-size batches; the lowest successful index wins.
const RESTART_BATCH: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WitnessError {
    #[error("cannot isolate an affine entry for the constraints at size {n} after {attempts} attempts")]
    CannotIsolate { n: usize, attempts: usize },
    #[error("matrix size must be at least 1")]
    ZeroSize,
    #[error("tuple matrices must be {n}x{n} and finite")]
    BadTuple { n: usize },
}

/// A tuple of complex matrices in double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatTuple {
    n: usize,
    matrices: Vec<CMatrix>,
}

impl FloatTuple {
    pub fn new(n: usize, matrices: Vec<CMatrix>) -> Result<Self, WitnessError> {
        let ok = matrices.iter().all(|m| {
            m.nrows() == n && m.ncols() == n && m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
        });
        if !ok {
            return Err(WitnessError::BadTuple { n });
        }
        Ok(FloatTuple { n, matrices })
    }

    pub fn from_exact(a: &MatrixTuple) -> Self {
        let n = a.n();
        let matrices = a
            .matrices()
            .iter()
            .map(|m| CMatrix::from_fn(n, n, |i, j| Complex64::new(to_f64(m.get(i, j)), 0.0)))
            .collect();
        FloatTuple { n, matrices }
    }

    fn random(n: usize, g: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = 1.0 / (n as f64).sqrt();
        let matrices = (0..g)
            .map(|_| {
                CMatrix::from_fn(n, n, |_, _| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
            })
            .collect();
        FloatTuple { n, matrices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    fn num_entries(&self) -> usize {
        self.g() * self.n * self.n
    }

    fn add_step(&self, step: &DVector<f64>) -> Self {
        let nn = self.n * self.n;
        let mut out = self.clone();
        for (i, m) in out.matrices.iter_mut().enumerate() {
            for p in 0..self.n {
                for q in 0..self.n {
                    let k = i * nn + p * self.n + q;
                    m[(p, q)] += Complex64::new(step[2 * k], step[2 * k + 1]);
                }
            }
        }
        out
    }
}

fn to_f64(q: &Scalar) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial with letters shifted to 0-based indices and `f64` coefficients.
#[derive(Clone, Debug)]
struct FloatPoly {
    terms: Vec<(Vec<usize>, f64)>,
}

impl FloatPoly {
    fn new(f: &FreePoly) -> Self {
        FloatPoly {
            terms: f
                .terms()
                .map(|(w, c)| (w.letters().iter().map(|&l| l as usize - 1).collect(), to_f64(c)))
                .collect(),
        }
    }

    fn trace(&self, a: &FloatTuple) -> Complex64 {
        self.terms
            .iter()
            .map(|(w, c)| word_trace(w, a) * *c)
            .sum()
    }

    fn gradient(&self, a: &FloatTuple) -> Vec<CMatrix> {
        let mut grad = vec![CMatrix::zeros(a.n, a.n); a.g()];
        for (w, c) in &self.terms {
            accumulate_word_gradient(w, a, Complex64::new(*c, 0.0), &mut grad);
        }
        grad
    }
}

fn word_trace(w: &[usize], a: &FloatTuple) -> Complex64 {
    match w {
        [] => Complex64::new(a.n as f64, 0.0),
        [l] => a.matrices[*l].trace(),
        [prefix @ .., last] => {
            let p = prefix
                .iter()
                .skip(1)
                .fold(a.matrices[prefix[0]].clone(), |acc, &l| acc * &a.matrices[l]);
            let m = &a.matrices[*last];
            let mut t = Complex64::zero();
            for i in 0..a.n {
                for k in 0..a.n {
                    t += p[(i, k)] * m[(k, i)];
                }
            }
            t
        }
    }
}

/// Adds `c * d tr w(A) / d (A_i)_{pq}` into `grad[i][(p, q)]`.
///
/// For each occurrence of `x_i` at position `j`, write `w = u x_i v`; then
/// `tr(U E_pq V) = (V U)_{qp}`.
fn accumulate_word_gradient(w: &[usize], a: &FloatTuple, c: Complex64, grad: &mut [CMatrix]) {
    let n = a.n;
    let m = w.len();
    if m == 0 {
        return;
    }
    let mut prefixes = Vec::with_capacity(m);
    let mut acc = CMatrix::identity(n, n);
    for &l in w {
        prefixes.push(acc.clone());
        acc = acc * &a.matrices[l];
    }
    let mut suffix = CMatrix::identity(n, n);
    for j in (0..m).rev() {
        let vu = &suffix * &prefixes[j];
        let g = &mut grad[w[j]];
        for p in 0..n {
            for q in 0..n {
                g[(p, q)] += c * vu[(q, p)];
            }
        }
        suffix = &a.matrices[w[j]] * suffix;
    }
}

/// `tr f(A)` in floating point.
pub fn trace_float(f: &FreePoly, a: &FloatTuple) -> Complex64 {
    FloatPoly::new(f).trace(a)
}

/// Holomorphic derivatives `d tr f(A) / d (A_i)_{pq}`, one matrix per variable.
pub fn trace_gradient(f: &FreePoly, a: &FloatTuple) -> Vec<CMatrix> {
    FloatPoly::new(f).gradient(a)
}

/// Parameters of [`search_witness`].
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessConfig {
    pub size: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl WitnessConfig {
    pub fn new(size: usize, tol: f64, restarts: usize, seed: u64) -> Self {
        WitnessConfig {
            size,
            tol,
            restarts,
            seed,
            max_iterations: 300,
        }
    }
}

/// A tuple at which all constraint traces vanish numerically while the
/// target trace does not.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub tuple: FloatTuple,
    /// `max_i |tr f_i(A)|`.
    pub constraint_residual: f64,
    /// `|tr f(A)|`.
    pub target_value: f64,
    pub iterations: usize,
    /// Number of restarts consumed, counting the successful one.
    pub restarts: usize,
}

struct Problem {
    constraints: Vec<FloatPoly>,
    target: FloatPoly,
    g: usize,
}

struct Residuals {
    constraints: Vec<Complex64>,
    target: Complex64,
}

impl Residuals {
    fn max_constraint(&self) -> f64 {
        self.constraints.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn penalty(&self) -> f64 {
        (PENALTY_LEVEL - self.target.norm()).max(0.0)
    }

    fn objective(&self, with_penalty: bool) -> f64 {
        let c: f64 = self.constraints.iter().map(|z| z.norm_sqr()).sum();
        if with_penalty {
            c + self.penalty().powi(2)
        } else {
            c
        }
    }
}

impl Problem {
    fn residuals(&self, a: &FloatTuple) -> Residuals {
        Residuals {
            constraints: self.constraints.iter().map(|f| f.trace(a)).collect(),
            target: self.target.trace(a),
        }
    }

    /// Real residual vector and Jacobian over the real and imaginary parts of
    /// all entries. A complex residual with holomorphic derivative `D`
    /// contributes rows `(Re D, -Im D)` and `(Im D, Re D)`.
    fn linearize(&self, a: &FloatTuple, res: &Residuals, with_penalty: bool) -> (DVector<f64>, DMatrix<f64>) {
        let nvars = 2 * a.num_entries();
        let penalty_row = with_penalty && res.penalty() > 0.0;
        let rows = 2 * self.constraints.len() + usize::from(penalty_row);
        let mut r = DVector::zeros(rows);
        let mut jac = DMatrix::zeros(rows, nvars);
        let nn = a.n * a.n;
        let mut fill = |row_re: usize, row_im: Option<usize>, grad: &[CMatrix], rotate: Complex64, sign: f64| {
            for (i, g) in grad.iter().enumerate() {
                for p in 0..a.n {
                    for q in 0..a.n {
                        let d = rotate * g[(p, q)];
                        let k = 2 * (i * nn + p * a.n + q);
                        jac[(row_re, k)] = sign * d.re;
                        jac[(row_re, k + 1)] = -sign * d.im;
                        if let Some(row_im) = row_im {
                            jac[(row_im, k)] = d.im;
                            jac[(row_im, k + 1)] = d.re;
                        }
                    }
                }
            }
        };
        for (idx, (f, z)) in self.constraints.iter().zip(&res.constraints).enumerate() {
            r[2 * idx] = z.re;
            r[2 * idx + 1] = z.im;
            fill(2 * idx, Some(2 * idx + 1), &f.gradient(a), Complex64::new(1.0, 0.0), 1.0);
        }
        if penalty_row {
            // d|t| = Re(conj(t)/|t| * dt); the residual is PENALTY_LEVEL - |t|
            let t = res.target;
            let unit = if t.norm() > 0.0 { t.conj() / t.norm() } else { Complex64::new(1.0, 0.0) };
            r[rows - 1] = res.penalty();
            fill(rows - 1, None, &self.target.gradient(a), unit, -1.0);
        }
        (r, jac)
    }
}

/// Minimum-norm damped Gauss-Newton step `-J^T (J J^T + mu I)^{-1} r`.
fn damped_step(r: &DVector<f64>, jac: &DMatrix<f64>, mu: f64) -> Option<DVector<f64>> {
    let mut normal = jac * jac.transpose();
    for i in 0..normal.nrows() {
        normal[(i, i)] += mu;
    }
    let y = normal.cholesky()?.solve(r);
    Some(-(jac.transpose() * y))
}

struct Attempt {
    tuple: FloatTuple,
    iterations: usize,
}

fn run_restart(problem: &Problem, config: &WitnessConfig, index: usize) -> Option<Attempt> {
    let seed = config
        .seed
        .wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = FloatTuple::random(config.size, problem.g, &mut rng);
    let mut mu = 1e-3;
    let mut penalized = false;
    let mut res = problem.residuals(&a);
    let mut polish = 0;
    for it in 0..config.max_iterations {
        let cons = res.max_constraint();
        if !penalized && cons < 10.0 * config.tol {
            penalized = true;
        }
        if cons < config.tol && res.target.norm() > TARGET_THRESHOLD {
            // a few extra iterations push the residual well below tol
            polish += 1;
            if polish > 3 || cons < 1e-3 * config.tol {
                return Some(Attempt { tuple: a, iterations: it });
            }
        }
        let (r, jac) = problem.linearize(&a, &res, penalized);
        let current = res.objective(penalized);
        let mut accepted = false;
        for _ in 0..12 {
            let Some(step) = damped_step(&r, &jac, mu) else {
                mu *= 10.0;
                continue;
            };
            let candidate = a.add_step(&step);
            let cand_res = problem.residuals(&candidate);
            if cand_res.objective(penalized) < current {
                a = candidate;
                res = cand_res;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    let cons = res.max_constraint();
    (cons < config.tol && res.target.norm() > TARGET_THRESHOLD).then_some(Attempt {
        tuple: a,
        iterations: config.max_iterations,
    })
}

/// Searches for a tuple of `config.size x config.size` complex matrices with
/// `max_i |tr f_i(A)| < tol` and `|tr f(A)| > 0.5`.
///
/// Restarts run concurrently in fixed batches; the report comes from the
/// lowest-indexed successful restart, so the result depends only on the seed.
pub fn search_witness(fs: &[FreePoly], f: &FreePoly, config: &WitnessConfig) -> Option<WitnessReport> {
    if config.size == 0 || config.tol <= 0.0 {
        return None;
    }
    let g = fs
        .iter()
        .map(FreePoly::nvars)
        .chain(std::iter::once(f.nvars()))
        .max()
        .unwrap_or(0);
    let problem = Problem {
        constraints: fs.iter().map(FloatPoly::new).collect(),
        target: FloatPoly::new(f),
        g,
    };
    let mut start = 0;
    while start < config.restarts {
        let end = (start + RESTART_BATCH).min(config.restarts);
        let results = par::map_range(start..end, |i| run_restart(&problem, config, i));
        for (offset, attempt) in results.into_iter().enumerate() {
            let Some(attempt) = attempt else { continue };
            let res = problem.residuals(&attempt.tuple);
            let report = WitnessReport {
                constraint_residual: res.max_constraint(),
                target_value: res.target.norm(),
                tuple: attempt.tuple,
                iterations: attempt.iterations,
                restarts: start + offset + 1,
            };
            if report.constraint_residual < config.tol && report.target_value > TARGET_THRESHOLD {
                return Some(report);
            }
        }
        start = end;
    }
    None
}

/// Commutative polynomial over the rationals in the designated entries.
#[derive(Clone, Debug, PartialEq, Eq)]
struct EntryPoly(std::collections::BTreeMap<Vec<u32>, Scalar>);

impl EntryPoly {
    fn constant(c: Scalar, nvars: usize) -> Self {
        let mut m = std::collections::BTreeMap::new();
        if !c.is_zero() {
            m.insert(vec![0; nvars], c);
        }
        EntryPoly(m)
    }

    fn variable(k: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        EntryPoly([(e, Scalar::from_integer(1.into()))].into_iter().collect())
    }

    fn add_assign(&mut self, other: &EntryPoly) {
        for (e, c) in &other.0 {
            let slot = self.0.entry(e.clone()).or_insert_with(Scalar::zero);
            *slot += c;
            if slot.is_zero() {
                self.0.remove(e);
            }
        }
    }

    fn mul(&self, other: &EntryPoly) -> EntryPoly {
        let mut out = EntryPoly(Default::default());
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_assign(&EntryPoly([(e, c1 * c2)].into_iter().collect()));
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

type EntryMatrix = Vec<Vec<EntryPoly>>;

fn entry_mat_mul(a: &EntryMatrix, b: &EntryMatrix) -> EntryMatrix {
    let n = a.len();
    let nvars = a
        .iter()
        .flatten()
        .chain(b.iter().flatten())
        .find_map(|p| p.0.keys().next().map(Vec::len))
        .unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = EntryPoly::constant(Scalar::zero(), nvars);
                    for k in 0..n {
                        if a[i][k].is_zero() || b[k][j].is_zero() {
                            continue;
                        }
                        acc.add_assign(&a[i][k].mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let num: i64 = rng.random_range(-3..=3);
    let den: i64 = rng.random_range(1..=2);
    Scalar::new(num.into(), den.into())
}

/// Affine decomposition `c + sum_k a_k t_k` of a polynomial in the
/// designated entries, or `None` if it has a term of degree >= 2.
fn affine_parts(p: &EntryPoly, nvars: usize) -> Option<(Scalar, Vec<Scalar>)> {
    let mut constant = Scalar::zero();
    let mut linear = vec![Scalar::zero(); nvars];
    for (e, c) in &p.0 {
        match e.iter().sum::<u32>() {
            0 => constant = c.clone(),
            1 => linear[e.iter().position(|&x| x == 1).expect("degree one")] = c.clone(),
            _ => return None,
        }
    }
    Some((constant, linear))
}

fn try_constraint_tuple(
    fs: &[FreePoly],
    g: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Option<MatrixTuple> {
    let r = fs.len();
    let mut values: Vec<Vec<Vec<Scalar>>> = (0..g)
        .map(|_| (0..n).map(|_| (0..n).map(|_| random_scalar(rng)).collect()).collect())
        .collect();
    let total = g * n * n;
    if r > total {
        return None;
    }
    let mut slots: Vec<usize> = (0..total).collect();
    for i in 0..r {
        let j = rng.random_range(i..total);
        slots.swap(i, j);
    }
    let designated = &slots[..r];
    let entry_at = |slot: usize| (slot / (n * n), (slot % (n * n)) / n, slot % n);

    let symbolic: Vec<EntryMatrix> = (0..g)
        .map(|m| {
            (0..n)
                .map(|p| {
                    (0..n)
                        .map(|q| match designated.iter().position(|&s| entry_at(s) == (m, p, q)) {
                            Some(k) => EntryPoly::variable(k, r),
                            None => EntryPoly::constant(values[m][p][q].clone(), r),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(r);
    let mut rhs = Vec::with_capacity(r);
    for f in fs {
        let mut tr = EntryPoly::constant(Scalar::zero(), r);
        for (w, c) in f.terms() {
            let coeff = EntryPoly::constant(c.clone(), r);
            let term = match w.letters() {
                [] => EntryPoly::constant(c * Scalar::from_integer(n.into()), r),
                [first, rest @ ..] => {
                    let prod = rest.iter().fold(symbolic[*first as usize - 1].clone(), |acc, &l| {
                        entry_mat_mul(&acc, &symbolic[l as usize - 1])
                    });
                    let mut t = EntryPoly::constant(Scalar::zero(), r);
                    for (i, row) in prod.iter().enumerate() {
                        t.add_assign(&row[i]);
                    }
                    t.mul(&coeff)
                }
            };
            tr.add_assign(&term);
        }
        let (constant, linear) = affine_parts(&tr, r)?;
        rows.push(linear);
        rhs.push(-constant);
    }
    let solution = linalg::solve(&rows, &rhs, r)?;
    for (k, value) in solution.into_iter().enumerate() {
        let (m, p, q) = entry_at(designated[k]);
        values[m][p][q] = value;
    }
    let matrices = values
        .into_iter()
        .map(|rows| RationalMatrix::from_rows(rows).expect("square"))
        .collect();
    let tuple = MatrixTuple::new(n, matrices).expect("uniform size");
    fs.iter()
        .all(|f| trace_eval(f, &tuple).map(|t| t.is_zero()).unwrap_or(false))
        .then_some(tuple)
}

/// Generates `count` exact tuples of `n x n` rational matrices on which every
/// constraint has trace zero.
///
/// One entry per constraint is designated and the rest are drawn at random.
/// When every constraint trace is affine in the designated entries, the
/// designated values are solved for exactly; otherwise another designation
/// is tried.
pub fn exact_constraint_tuples(
    fs: &[FreePoly],
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<MatrixTuple>, WitnessError> {
    const ATTEMPTS: usize = 200;
    if n == 0 {
        return Err(WitnessError::ZeroSize);
    }
    let g = fs.iter().map(FreePoly::nvars).max().unwrap_or(0);
    let fs: Vec<FreePoly> = fs.iter().map(|f| f.clone().with_nvars(g)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let tuple = (0..ATTEMPTS)
            .find_map(|_| try_constraint_tuple(&fs, g, n, &mut rng))
            .ok_or(WitnessError::CannotIsolate { n, attempts: ATTEMPTS })?;
        out.push(tuple);
    }
    Ok(out)
}
