//! Exact integer and rational helpers: binomials, factorials, and the
//! low-tail binomial sum bound used throughout the chain estimates.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Binomial coefficient small enough to live in a machine word.
/// Panics on overflow; callers use it only inside guarded ranges.
pub fn binomial_u64(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

pub fn factorial_u128(n: u32) -> u128 {
    let mut acc: u128 = 1;
    for i in 2..=n as u128 {
        acc = acc.checked_mul(i).expect("factorial overflows u128");
    }
    acc
}

/// Middle binomial binom(n, floor(n/2)).
pub fn middle_binomial(n: u64) -> BigUint {
    binomial(n, n / 2)
}

pub fn big_rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Checks sum_{i<l} binom(n,i) <= 2*sqrt(n)*binom(n,l) in exact arithmetic.
/// Both sides are nonnegative, so the comparison is done on squares:
/// S^2 <= 4*n*B^2.
pub fn low_tail_binomial_bound_holds(n: u64, l: u64) -> bool {
    debug_assert!(l >= 1 && 2 * l <= n);
    let mut sum = BigUint::zero();
    for i in 0..l {
        sum += binomial(n, i);
    }
    let b = binomial(n, l);
    &sum * &sum <= BigUint::from(4u32) * BigUint::from(n) * &b * &b
}
