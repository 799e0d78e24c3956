//! Exact q-analog counting.
//!
//! Gaussian binomials, superspace counts, the intersection numbers of a
//! design, admissibility, and the parameter sets of the 2-designs carried
//! by an STS(n;q). All arithmetic is exact.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};

/// `[N, M]_q`, the number of M-dimensional subspaces of F_q^N. Zero when M > N.
pub fn gaussian_binomial(big_n: u64, m: u64, q: u64) -> BigUint {
    if m > big_n {
        return BigUint::zero();
    }
    let qb = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..m {
        let qi = Pow::pow(&qb, i);
        num *= Pow::pow(&qb, big_n) - &qi;
        den *= Pow::pow(&qb, m) - &qi;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quot
}

/// Number of s-dimensional subspaces of F_q^n containing a fixed t-space.
pub fn count_superspaces(n: u64, t: u64, s: u64, q: u64) -> Result<BigUint> {
    if !(t <= s && s <= n) {
        return Err(Error::InvalidParameters(format!("need 0 <= t <= s <= n, got t={t} s={s} n={n}")));
    }
    Ok(gaussian_binomial(n - t, s - t, q))
}

/// Parameters t-(n, k, λ; q) of a subspace design.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DesignParams {
    pub t: u64,
    pub n: u64,
    pub k: u64,
    pub lambda: BigUint,
    pub q: u64,
}

impl fmt::Display for DesignParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-({},{},{};{})", self.t, self.n, self.k, self.lambda, self.q)
    }
}

impl DesignParams {
    pub fn new(t: u64, n: u64, k: u64, lambda: impl Into<BigUint>, q: u64) -> Result<Self> {
        let p = DesignParams { t, n, k, lambda: lambda.into(), q };
        p.validate()?;
        Ok(p)
    }

    /// Parameters S(t, k, n; q) of a q-Steiner system.
    pub fn steiner(t: u64, k: u64, n: u64, q: u64) -> Result<Self> {
        DesignParams::new(t, n, k, 1u32, q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.t && self.t <= self.k && self.k <= self.n) {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= t <= k <= n, got t={} k={} n={}",
                self.t, self.k, self.n
            )));
        }
        if crate::field::prime_power(self.q).is_none() {
            return Err(Error::NotPrimePower(self.q));
        }
        Ok(())
    }

    /// Number of blocks, λ_{0,0}, when it is an integer.
    pub fn block_count(&self) -> Option<BigUint> {
        to_biguint(&intersection_number_raw(self, 0, 0))
    }
}

fn to_biguint(r: &BigRational) -> Option<BigUint> {
    (r.is_integer() && !r.numer().is_negative_value()).then(|| r.numer().to_biguint().expect("nonnegative"))
}

trait NegativeCheck {
    fn is_negative_value(&self) -> bool;
}

impl NegativeCheck for BigInt {
    fn is_negative_value(&self) -> bool {
        self.sign() == num_bigint::Sign::Minus
    }
}

fn intersection_number_raw(params: &DesignParams, i: u64, j: u64) -> BigRational {
    let (n, k, t, q) = (params.n, params.k, params.t, params.q);
    let numer = Pow::pow(&BigUint::from(q), j * k.saturating_sub(i))
        * &params.lambda
        * gaussian_binomial(n - i - j, k.saturating_sub(i), q);
    let denom = gaussian_binomial(n - t, k - t, q);
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// λ_{i,j}: blocks through a fixed i-space meeting a fixed disjoint j-space
/// trivially, as an exact rational (integrality is not assumed).
pub fn intersection_number(params: &DesignParams, i: u64, j: u64) -> Result<BigRational> {
    params.validate()?;
    if i + j > params.t {
        return Err(Error::InvalidParameters(format!("i + j = {} exceeds t = {}", i + j, params.t)));
    }
    Ok(intersection_number_raw(params, i, j))
}

/// The full table λ_{i,j} for i + j <= t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTable {
    pub params: DesignParams,
    pub values: std::collections::BTreeMap<(u64, u64), BigRational>,
}

pub fn intersection_table(params: &DesignParams) -> Result<IntersectionTable> {
    params.validate()?;
    let mut values = std::collections::BTreeMap::new();
    for i in 0..=params.t {
        for j in 0..=params.t - i {
            values.insert((i, j), intersection_number_raw(params, i, j));
        }
    }
    Ok(IntersectionTable { params: params.clone(), values })
}

/// Outcome of the integrality test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// Smallest i for which λ_i = λ_{i,0} is not a nonnegative integer.
    pub first_failure: Option<u64>,
    /// λ_0, ..., λ_t.
    pub lambdas: Vec<BigRational>,
}

/// Checks that λ_i is a nonnegative integer for every 0 <= i <= t.
pub fn is_admissible(params: &DesignParams) -> Result<Admissibility> {
    params.validate()?;
    let lambdas: Vec<BigRational> = (0..=params.t).map(|i| intersection_number_raw(params, i, 0)).collect();
    let first_failure = lambdas.iter().position(|l| to_biguint(l).is_none()).map(|i| i as u64);
    Ok(Admissibility { admissible: first_failure.is_none(), first_failure, lambdas })
}

/// The congruence test for STS(n;q) parameters: n ≡ 1, 3 (mod 6).
pub fn sts_admissible(n: u64) -> bool {
    matches!(n % 6, 1 | 3)
}

/// The three 2-designs implied by an STS(n;q), plus the congruence verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorollaryParams {
    /// (t+2)-circuit design, its supplementary design, and the dual of the latter.
    pub sets: [DesignParams; 3],
    /// n ≡ 0, 1, 3, 4 (mod 6).
    pub admissible: bool,
}

fn exact_div(num: BigUint, den: BigUint, what: &str) -> Result<BigUint> {
    let (quot, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::InvalidParameters(format!("{what}: division is not exact")));
    }
    Ok(quot)
}

pub fn corollary_sts_params(n: u64, q: u64) -> Result<CorollaryParams> {
    if n < 7 {
        return Err(Error::InvalidParameters(format!("n = {n} must be at least 7")));
    }
    if crate::field::prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    let qb = BigUint::from(q);
    let one = BigUint::one();
    let qm1 = &qb - &one;
    let q2m1 = (&qb).pow(2u32) - &one;
    let l1 = exact_div(
        (&qb).pow(4u32) * ((&qb).pow((n - 3) as u32) - &one) * ((&qb).pow((n - 6) as u32) - &one),
        &q2m1 * &qm1,
        "set (1)",
    )?;
    let l2 = exact_div(((&qb).pow((n - 3) as u32) - &one) * ((&qb).pow(4u32) - &one), &q2m1 * &qm1, "set (2)")?;
    let l3 = gaussian_binomial(n - 3, 3, q);
    Ok(CorollaryParams {
        sets: [
            DesignParams { t: 2, n, k: 4, lambda: l1, q },
            DesignParams { t: 2, n, k: 4, lambda: l2, q },
            DesignParams { t: 2, n, k: n - 4, lambda: l3, q },
        ],
        admissible: matches!(n % 6, 0 | 1 | 3 | 4),
    })
}

/// Parameters of the supplementary design: λ' = [n-t, k-t]_q - λ.
pub fn supplementary_params(params: &DesignParams) -> Result<DesignParams> {
    params.validate()?;
    let total = gaussian_binomial(params.n - params.t, params.k - params.t, params.q);
    if params.lambda > total {
        return Err(Error::InvalidParameters(format!("λ = {} exceeds [n-t, k-t]_q = {}", params.lambda, total)));
    }
    Ok(DesignParams { lambda: total - &params.lambda, ..params.clone() })
}

/// Parameters of the dual design: k' = n - k, λ' = λ [n-t, k]_q / [n-t, k-t]_q.
pub fn dual_params(params: &DesignParams) -> Result<DesignParams> {
    params.validate()?;
    let (n, k, t, q) = (params.n, params.k, params.t, params.q);
    if n - k < t {
        return Err(Error::InvalidParameters(format!("dual block dimension {} is below t = {t}", n - k)));
    }
    let num = &params.lambda * gaussian_binomial(n - t, k, q);
    let lambda = exact_div(num, gaussian_binomial(n - t, k - t, q), "dual λ")?;
    Ok(DesignParams { t, n, k: n - k, lambda, q })
}
