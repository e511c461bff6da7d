//! Effective degree bounds for the commutative Nullstellensatz (the
//! Kollár-Jelonek functions `N` and `N'`) and the matrix size at which testing
//! the trace implication suffices.

use num_bigint::BigUint;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("the degree list is empty")]
    NoDegrees,
    #[error("degree {0} is zero; degrees must be at least 1")]
    ZeroDegree(usize),
    #[error("degrees must be nonincreasing: d{i} = {a} < d{j} = {b}", j = .0 + 1, i = .0, a = .1, b = .2)]
    NotNonincreasing(usize, u64, u64),
    #[error("the variable count n must be at least 1")]
    ZeroVariables,
    #[error("the free variable count g must be at least 1")]
    ZeroFreeVariables,
    #[error("the size bound needs both g and the target degree")]
    MissingSizeParameters,
}

/// Inputs of the bound formulas.
///
/// `degrees` are `d_1 >= ... >= d_r`; `n` is the number of commutative
/// variables; `g` and `target_degree` are only needed by [`size_bound`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundInputs {
    n: u64,
    degrees: Vec<u64>,
    g: Option<u64>,
    target_degree: Option<u64>,
}

impl BoundInputs {
    pub fn new(n: u64, degrees: Vec<u64>) -> Result<Self, BoundsError> {
        if n == 0 {
            return Err(BoundsError::ZeroVariables);
        }
        if degrees.is_empty() {
            return Err(BoundsError::NoDegrees);
        }
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(BoundsError::ZeroDegree(i + 1));
        }
        if let Some(i) = degrees.windows(2).position(|w| w[0] < w[1]) {
            return Err(BoundsError::NotNonincreasing(i + 1, degrees[i], degrees[i + 1]));
        }
        Ok(BoundInputs {
            n,
            degrees,
            g: None,
            target_degree: None,
        })
    }

    /// Inputs for [`size_bound`], which does not depend on `n`.
    pub fn for_size(degrees: Vec<u64>, g: u64, target_degree: u64) -> Result<Self, BoundsError> {
        Self::new(1, degrees)?.with_size_parameters(g, target_degree)
    }

    pub fn with_size_parameters(mut self, g: u64, target_degree: u64) -> Result<Self, BoundsError> {
        if g == 0 {
            return Err(BoundsError::ZeroFreeVariables);
        }
        self.g = Some(g);
        self.target_degree = Some(target_degree);
        Ok(self)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    fn r(&self) -> u64 {
        self.degrees.len() as u64
    }

    fn last(&self) -> u64 {
        *self.degrees.last().expect("nonempty")
    }
}

fn product(ds: &[u64]) -> BigUint {
    ds.iter().fold(BigUint::one(), |acc, &d| acc * d)
}

pub fn bound_n(inputs: &BoundInputs) -> BigUint {
    let (n, r) = (inputs.n, inputs.r());
    let ds = &inputs.degrees;
    if r <= n {
        product(ds)
    } else if n > 1 {
        product(&ds[..(n - 1) as usize]) * inputs.last()
    } else {
        BigUint::from(ds[0]) + inputs.last() - 1u32
    }
}

pub fn bound_n_prime(inputs: &BoundInputs) -> BigUint {
    let (n, r) = (inputs.n, inputs.r());
    if r <= n || inputs.last() > 2 {
        bound_n(inputs)
    } else if n > 1 {
        bound_n(inputs) * 2u32 - 1u32
    } else {
        BigUint::from(inputs.degrees[0]) * 2u32 - 1u32
    }
}

/// Smallest `k` with `k^2 * den >= num`, i.e. `ceil(sqrt(num / den))`.
fn ceil_sqrt_ratio(num: u64, den: u64) -> BigUint {
    let (num, den) = (BigUint::from(num), BigUint::from(den));
    let mut k = (&num / &den).sqrt();
    while &k * &k * &den < num {
        k += 1u32;
    }
    k
}

/// `ceil(max{d_1 ... d_r * d, sqrt(g/r), sqrt(r/g)})`.
pub fn size_bound(inputs: &BoundInputs) -> Result<BigUint, BoundsError> {
    let (Some(g), Some(d)) = (inputs.g, inputs.target_degree) else {
        return Err(BoundsError::MissingSizeParameters);
    };
    let r = inputs.r();
    let degree_term = product(&inputs.degrees) * d;
    Ok(degree_term
        .max(ceil_sqrt_ratio(g, r))
        .max(ceil_sqrt_ratio(r, g)))
}
