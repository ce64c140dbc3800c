//! Small shared helpers: exponent bookkeeping, binomials, seeded sampling.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Validate an extended exponent `p ∈ [1, ∞]` (`f64::INFINITY` encodes `∞`).
pub fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [1, inf], got {p}"
        )));
    }
    Ok(())
}

/// `1/p`, with `1/∞ = 0`.
pub fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// Conjugate exponent `p'` with `1/p + 1/p' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `r ≤ p'`, evaluated through inverses so `∞` needs no special casing.
pub fn r_le_conj(r: f64, p: f64) -> bool {
    inv(r) + inv(p) >= 1.0
}

pub fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Binomial as `u128`, checked against `cap`.
pub fn binomial_capped(n: u64, k: u64, cap: u64, what: &'static str) -> Result<u64> {
    let b = big_binomial(n, k);
    match b.to_u64() {
        Some(v) if v <= cap => Ok(v),
        _ => Err(Error::Capacity {
            what,
            value: b.to_u128().unwrap_or(u128::MAX),
            cap,
        }),
    }
}

pub fn big_to_f64(b: &BigUint) -> f64 {
    b.to_f64().unwrap_or(f64::INFINITY)
}

/// Seeded generator on stream `stream`; distinct streams are independent.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point on the `n`-torus (unimodular entries).
pub fn random_torus_point(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
        .collect()
}

/// Standard complex Gaussian (unit variance) via Box-Muller.
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    let radius = (-u.ln()).sqrt();
    Complex64::from_polar(radius, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(big_binomial(6, 3), BigUint::from(20u32));
        assert_eq!(big_binomial(4, 0), BigUint::one());
        assert_eq!(big_binomial(3, 5), BigUint::ZERO);
        assert!(binomial_capped(100, 50, 10, "test").is_err());
    }

    #[test]
    fn conjugate_exponents() {
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert!((conjugate(1.5) - 3.0).abs() < 1e-15);
        assert!(r_le_conj(2.0, 2.0));
        assert!(!r_le_conj(2.1, 2.0));
        assert!(r_le_conj(f64::INFINITY, 1.0));
    }

    #[test]
    fn streams_are_independent_and_deterministic() {
        let mut a = seeded_rng(7, 0);
        let mut b = seeded_rng(7, 0);
        let mut c = seeded_rng(7, 1);
        let xa: f64 = a.random();
        let xb: f64 = b.random();
        let xc: f64 = c.random();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }
}
