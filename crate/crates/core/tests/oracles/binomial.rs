//! Exact rational binomial probabilities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Probabilities as exact fractions over 10_000.
pub const GRID: [(i64, f64); 7] = [
    (10, 0.001),
    (100, 0.01),
    (375, 0.0375),
    (500, 0.05),
    (1000, 0.1),
    (5000, 0.5),
    (9000, 0.9),
];

pub fn choose(n: u64, m: u64) -> BigInt {
    (0..m).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

pub fn exact_pmf(m: u64, n: u64, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    BigRational::from_integer(choose(n, m)) * num_traits::pow(p.clone(), m as usize)
        * num_traits::pow(q, (n - m) as usize)
}
