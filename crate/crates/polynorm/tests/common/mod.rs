//! Shared helpers for the integration test targets.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polynorm::polycore::{enumerate_lambda, HomPoly};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar((-u.ln()).sqrt(), theta)
}

/// Dense polynomial with standard complex Gaussian coefficients.
pub fn random_poly(m: u32, n: usize, seed: u64) -> HomPoly {
    let mut rng = rng(seed, 0);
    let mut poly = HomPoly::zero(m, n);
    for alpha in enumerate_lambda(m, n).unwrap() {
        poly.set_coeff(alpha, gaussian(&mut rng)).unwrap();
    }
    poly
}

/// Print the per-criterion verdict line and fail the test on a miss.
pub fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id:02} {name}: {verdict} ({detail})");
    assert!(ok, "acceptance criterion {id} ({name}) failed: {detail}");
}
