//! Shared helpers for unit tests.

use num_complex::Complex64;

use crate::polycore::{enumerate_lambda, HomPoly};
use crate::util::{complex_gaussian, seeded_rng};

/// Dense polynomial with seeded standard complex Gaussian coefficients.
pub fn random_poly(m: u32, n: usize, seed: u64) -> HomPoly {
    let mut rng = seeded_rng(seed, 0);
    let mut p = HomPoly::zero(m, n);
    for alpha in enumerate_lambda(m, n).unwrap() {
        p.set_coeff(alpha, complex_gaussian(&mut rng)).unwrap();
    }
    p
}

/// `ℓ_p` norm of a complex vector.
pub fn lp_norm(z: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        z.iter().map(|zi| zi.norm()).fold(0.0, f64::max)
    } else {
        z.iter()
            .map(|zi| zi.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}
