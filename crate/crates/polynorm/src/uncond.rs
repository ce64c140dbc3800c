//! Mixed `(p,q)`-unconditionality of the monomial basis.
//!
//! `χ_{p,q}` is the best constant with `‖Σ θ_j c_j z_j‖_{ℓ_q} ≤ χ·‖Σ c_j z_j‖_{ℓ_p}`
//! over all modulus-one sign choices `θ`. We estimate it from below by flipping
//! signs on witness polynomials, predict its growth exponent by region, bound
//! it from above through the product of the `B` and `A` certificates, and
//! verify the `L¹(T^n)` coefficient inequality by Monte Carlo on the torus.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::constants::{a_upper_cert_crude, b_upper_cert, EstimateOptions};
use crate::construct::{ones_poly_capped, random_unimodular_capped};
use crate::error::{Error, Result};
use crate::polycore::{coeff_norm, HomPoly};
use crate::supnorm::{supnorm_lower, supnorm_upper_cert};
use crate::util::{check_exponent, conjugate, random_torus_point, seeded_rng};
use rand::Rng;

/// Prediction quality for a `(1/p, 1/q)` point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiPredStatus {
    Exact,
    /// Exponent matched up to `n^ε` (a log-power factor is possible).
    Epsilon,
    Unknown,
}

impl ChiPredStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChiPredStatus::Exact => "exact",
            ChiPredStatus::Epsilon => "epsilon",
            ChiPredStatus::Unknown => "unknown",
        }
    }
}

/// Predicted growth exponent of `χ_{p,q}` for the monomial basis, by region:
/// (I) 0; (II) `m(1/p − 1/q + 1/2) − 1/2`; (III) `(m−1)(1−1/q) + 1/p − 1/q`;
/// (III′) the same exponent with an ε caveat.
pub fn predicted_chi_exponent(m: u32, inv_p: f64, inv_q: f64) -> (Option<f64>, ChiPredStatus) {
    let (x, y, m) = (inv_p, inv_q, m as f64);
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return (None, ChiPredStatus::Unknown);
    }
    let in_i =
        (x + (m - 1.0) / (2.0 * m) <= y && x <= 0.5) || ((m - 1.0) / m + x / m < y && 0.5 <= x);
    let in_ii = y <= x + (m - 1.0) / (2.0 * m) && x <= 0.5;
    let in_iii = y <= x && 0.5 <= x;
    let in_iii_eps = x <= y && y <= (m - 1.0) / m + x / m && 0.5 < x && x < 1.0;

    if in_i {
        (Some(0.0), ChiPredStatus::Exact)
    } else if in_ii {
        (Some(m * (x - y + 0.5) - 0.5), ChiPredStatus::Exact)
    } else if in_iii {
        (Some((m - 1.0) * (1.0 - y) + x - y), ChiPredStatus::Exact)
    } else if in_iii_eps {
        (Some((m - 1.0) * (1.0 - y) + x - y), ChiPredStatus::Epsilon)
    } else {
        (None, ChiPredStatus::Unknown)
    }
}

/// Certified (crude) upper bound for `χ_{p,q}` of the monomial basis:
/// `min_r B_cert(r,q)·A_cert(p,r)` over a fixed grid that always contains
/// the conjugate exponents `p'` and `q'`.
pub fn chi_upper_bridge(m: u32, n: usize, p: f64, q: f64) -> f64 {
    let mut grid = vec![
        1.0,
        1.25,
        1.5,
        2.0,
        2.5,
        3.0,
        4.0,
        6.0,
        8.0,
        16.0,
        f64::INFINITY,
    ];
    grid.push(conjugate(p));
    grid.push(conjugate(q));
    grid.iter()
        .map(|&r| b_upper_cert(m, n, q, r) * a_upper_cert_crude(m, n, p, r))
        .fold(f64::INFINITY, f64::min)
}

/// Mixed unconditionality estimate for one `(m, n, p, q)`.
#[derive(Debug, Clone)]
pub struct ChiEstimate {
    pub m: u32,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub certified_lower: f64,
    pub empirical: f64,
    pub bridge_upper: f64,
    pub predicted_exponent: Option<f64>,
    pub prediction_status: ChiPredStatus,
}

impl ChiEstimate {
    pub fn to_jsonl(&self) -> String {
        let fmt = |v: f64| {
            if v.is_finite() {
                json!(v)
            } else {
                json!("inf")
            }
        };
        json!({
            "m": self.m,
            "n": self.n,
            "p": fmt(self.p),
            "q": fmt(self.q),
            "chi_lower": self.certified_lower,
            "chi_empirical": self.empirical,
            "bridge_upper": self.bridge_upper,
            "predicted_exp": self.predicted_exponent,
            "status": self.prediction_status.as_str(),
        })
        .to_string()
    }
}

/// Sign-flip ratios for a single witness polynomial.
///
/// The candidate flips always include the identity and the flip that aligns
/// all coefficients to their moduli. When the support has at most 20 terms
/// the full ±1 flip group is enumerated (half of it, signs come in ± pairs);
/// otherwise `trials` seeded random ±1 flips are added. Every numerator uses
/// the same ascent options, so the certified maximum depends only on the
/// candidate polynomial set.
pub fn chi_lower_for_witness(
    poly: &HomPoly,
    p: f64,
    q: f64,
    trials: u32,
    opts: &EstimateOptions,
) -> Result<(f64, f64)> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial("chi witness"));
    }
    let support = poly.term_count();
    let (den_upper, _) = supnorm_upper_cert(poly, p)?;
    let den_lower = supnorm_lower(poly, p, &opts.ascent)?.value;

    let enumerate_all = support <= 20;
    let flips: Vec<HomPoly> = if enumerate_all {
        // All ±1 sign patterns with the first sign fixed (±θ give equal norms).
        let count = 1usize << (support - 1);
        (0..count)
            .map(|mask| {
                let mut idx = 0usize;
                poly.map_coeffs(|_, c| {
                    let sign = if idx == 0 || mask >> (idx - 1) & 1 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    idx += 1;
                    c * sign
                })
            })
            .collect()
    } else {
        let mut flips = Vec::with_capacity(trials as usize + 2);
        flips.push(poly.clone());
        // Align every coefficient with its modulus (for ±1 witnesses this is
        // the flip that turns them into the all-ones polynomial).
        flips.push(poly.map_coeffs(|_, c| Complex64::new(c.norm(), 0.0)));
        for t in 0..trials {
            let mut rng = seeded_rng(opts.seed, 0x0f11b5 + t as u64);
            flips.push(poly.map_coeffs(|_, c| {
                if rng.random::<bool>() {
                    c
                } else {
                    -c
                }
            }));
        }
        flips
    };

    let ascent = if enumerate_all {
        opts.ascent.scoring()
    } else {
        opts.ascent
    };
    let numerators: Vec<f64> = flips
        .par_iter()
        .map(|flipped| supnorm_lower(flipped, q, &ascent).map(|lb| lb.value))
        .collect::<Result<_>>()?;
    let best = numerators.iter().cloned().fold(0.0, f64::max);

    if den_upper == 0.0 || den_lower == 0.0 {
        return Err(Error::ZeroPolynomial("chi witness has zero sup-norm"));
    }
    Ok((best / den_upper, best / den_lower))
}

/// Estimate `χ_{p,q}` from below with the standard witness pair: the all-ones
/// polynomial and a seeded random unimodular polynomial (whose modulus flip
/// is exactly the all-ones polynomial, the pairing behind region (III)).
pub fn chi_lower(
    m: u32,
    n: usize,
    p: f64,
    q: f64,
    trials: u32,
    opts: &EstimateOptions,
) -> Result<ChiEstimate> {
    let witnesses = [
        ones_poly_capped(m, n, opts.cap)?,
        random_unimodular_capped(m, n, opts.seed, opts.cap)?,
    ];
    let mut certified: f64 = 0.0;
    let mut empirical: f64 = 0.0;
    for witness in &witnesses {
        let (cert, emp) = chi_lower_for_witness(witness, p, q, trials, opts)?;
        // The identity flip is always in the candidate set, so the certified
        // value dominates lower(P,q)/upper(P,p) per witness.
        let identity_floor =
            supnorm_lower(witness, q, &opts.ascent.scoring())?.value
                / supnorm_upper_cert(witness, p)?.0;
        debug_assert!(cert >= identity_floor * (1.0 - 1e-9));
        let _ = identity_floor;
        certified = certified.max(cert);
        empirical = empirical.max(emp);
    }
    let (predicted_exponent, prediction_status) =
        predicted_chi_exponent(m, crate::util::inv(p), crate::util::inv(q));
    Ok(ChiEstimate {
        m,
        n,
        p,
        q,
        certified_lower: certified,
        empirical,
        bridge_upper: chi_upper_bridge(m, n, p, q),
        predicted_exponent,
        prediction_status,
    })
}

/// Monte Carlo summary of `|P|` over the torus.
#[derive(Debug, Clone)]
pub struct TorusSample {
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
}

const MC_CHUNK: u64 = 8192;

/// Check `(Σ_j |c_j|²)^{1/2} ≤ 2^{m/2}·∫_{T^n} |P| dw` by Monte Carlo: the
/// integral is estimated from `samples` i.i.d. uniform torus points, and the
/// inequality passes at three standard errors of headroom.
///
/// The left side is the tuple-coefficient 2-norm, which for monomial-indexed
/// coefficients is exactly `|P|_2`.
pub fn bayart_check(poly: &HomPoly, samples: u64, seed: u64) -> Result<(TorusSample, bool)> {
    if samples < 1000 {
        return Err(Error::InvalidParameter(
            "bayart_check needs at least 10^3 samples".into(),
        ));
    }
    let n = poly.nvars();
    let chunks: u64 = samples.div_ceil(MC_CHUNK);
    // One Welford summary per fixed-size chunk, combined in chunk order, so
    // the result does not depend on the thread count.
    let partials: Vec<(u64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = seeded_rng(seed, chunk);
            let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for i in 0..count {
                let w = random_torus_point(&mut rng, n);
                let v = poly.eval(&w).unwrap().norm();
                let delta = v - mean;
                mean += delta / (i + 1) as f64;
                m2 += delta * (v - mean);
            }
            (count, mean, m2)
        })
        .collect();
    let (mut count, mut mean, mut m2) = (0u64, 0.0f64, 0.0f64);
    for (c2, mean2, m22) in partials {
        if c2 == 0 {
            continue;
        }
        let delta: f64 = mean2 - mean;
        let total = count + c2;
        mean += delta * c2 as f64 / total as f64;
        m2 += m22 + delta * delta * (count as f64 * c2 as f64) / total as f64;
        count = total;
    }
    let variance = if count > 1 {
        m2 / (count - 1) as f64
    } else {
        0.0
    };
    let std_error = (variance / count as f64).sqrt();
    let lhs = coeff_norm(poly, 2.0)?;
    let pass = lhs <= 2.0f64.powf(poly.degree() as f64 / 2.0) * (mean + 3.0 * std_error);
    Ok((
        TorusSample {
            samples: count,
            mean,
            std_error,
        },
        pass,
    ))
}
