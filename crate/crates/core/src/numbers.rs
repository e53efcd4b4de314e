//! Exact Bernoulli numbers and zeta values by accelerated partial sums.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn binomial(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += BigRational::from_integer(binomial(m + 1, k)) * bk;
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

pub fn bernoulli(n: usize) -> BigRational {
    bernoulli_numbers(n).pop().expect("nonempty")
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `B_n / (2 n n!)`, the coefficient of `x^n` in `(1/2) log(sinh(x/2) / (x/2))`.
pub fn modified_bernoulli(n: usize) -> BigRational {
    bernoulli(n) / BigRational::from_integer(BigInt::from(2 * n) * factorial(n))
}

/// `zeta(s)` for integer `s >= 2`: a partial sum with an Euler-Maclaurin tail, accurate
/// far beyond `1e-14`.
pub fn zeta(s: u32) -> Result<f64> {
    if s < 2 {
        return Err(Error::Precondition(format!("zeta({}) diverges", s)));
    }
    const N: u32 = 20;
    let sf = s as f64;
    let mut sum: f64 = (1..N).rev().map(|p| (p as f64).powf(-sf)).sum();
    let nf = N as f64;
    sum += nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powf(-sf);
    let b = bernoulli_numbers(16);
    // rising factorial s (s+1) ... (s + 2k - 2) / (2k)!
    let mut rising = 1.0;
    let mut fact = 1.0;
    for k in 1..=8usize {
        let j = 2 * k;
        if k == 1 {
            rising = sf;
        } else {
            rising *= (sf + j as f64 - 3.0) * (sf + j as f64 - 2.0);
        }
        fact *= ((j - 1) * j) as f64;
        let bk = b[j].to_f64().expect("finite");
        sum += bk / fact * rising * nf.powf(-sf - j as f64 + 1.0);
    }
    Ok(sum)
}

/// Plain partial sum `sum_{p=1}^{terms} p^{-s}`.
pub fn zeta_partial_sum(s: u32, terms: u64) -> f64 {
    (1..=terms).rev().map(|p| (p as f64).powi(-(s as i32))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[3], r(0, 1));
        assert_eq!(b[4], r(-1, 30));
        assert_eq!(b[6], r(1, 42));
        assert_eq!(b[12], r(-691, 2730));
        assert_eq!(modified_bernoulli(2), r(1, 48));
    }

    #[test]
    fn zeta_even_values() {
        assert!((zeta(2).unwrap() - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta(4).unwrap() - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta(3).unwrap() - 1.202_056_903_159_594_2).abs() < 1e-15);
        assert!(zeta(1).is_err());
        assert!((zeta_partial_sum(2, 1_000_000) - zeta(2).unwrap()).abs() < 1.1e-6);
    }
}
