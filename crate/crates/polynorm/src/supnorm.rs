//! Certified two-sided estimation of `‖P‖ = sup { |P(z)| : ‖z‖_p ≤ 1 }`.
//!
//! Lower bounds are attained values: multi-start projected gradient ascent on
//! the unit `p`-sphere (by homogeneity the sup lives there), parametrized as
//! `z_j = s_j e^{iθ_j}` with the moduli re-projected onto the sphere after
//! every step, so each iterate is feasible and its value is a valid bound.
//! For `p = ∞` the search runs over the torus `|z_j| = 1` (maximum modulus
//! puts the sup on the distinguished boundary).
//!
//! Upper bounds come from two certificates: the coefficient dual norm
//! `|P|_{p'}` and the per-monomial bound `Σ_α |a_α|·sup|z^α|`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::polycore::{coeff_norm, HomPoly, MultiIndex};
use crate::util::{check_exponent, conjugate, inv, seeded_rng};
use rand::Rng;

/// Options for the multi-start ascent.
#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub starts: u32,
    pub max_iters: u32,
    pub step_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            starts: 64,
            max_iters: 500,
            step_tol: 1e-12,
            value_tol: 1e-10,
            seed: 0,
        }
    }
}

impl AscentOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Cheaper settings for inner scoring loops (sign selection and flips).
    pub fn scoring(&self) -> Self {
        AscentOptions {
            starts: self.starts.clamp(1, 12),
            max_iters: self.max_iters.min(250),
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "ascent needs starts ≥ 1 and max_iters ≥ 1".into(),
            ));
        }
        if self.step_tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            || self.value_tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        {
            return Err(Error::InvalidParameter(
                "ascent tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// How a bound was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    ExactMonomial,
    ExactSpread,
    Ascent,
    AscentNotConverged,
    UpperCoeffDual,
    UpperMonomialSum,
    ZeroPoly,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::ExactMonomial => "exact-monomial",
            MethodTag::ExactSpread => "exact-spread",
            MethodTag::Ascent => "ascent",
            MethodTag::AscentNotConverged => "ascent-not-converged",
            MethodTag::UpperCoeffDual => "upper-coeff-dual",
            MethodTag::UpperMonomialSum => "upper-monomial-sum",
            MethodTag::ZeroPoly => "zero",
        }
    }
}

/// Certified interval for a sup-norm. `witness` is empty exactly when the
/// polynomial is zero; otherwise it lies on the unit `p`-sphere and attains
/// `lower`.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub p: f64,
    pub witness: Vec<Complex64>,
    pub methods: Vec<MethodTag>,
}

impl NormEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// One JSON line: `{"lower":…,"method":[…],"p":…,"upper":…,"witness":[re,im,…]}`.
    pub fn to_jsonl(&self) -> String {
        let p = if self.p.is_finite() {
            json!(self.p)
        } else {
            json!("inf")
        };
        let witness: Vec<f64> = self
            .witness
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect();
        json!({
            "lower": self.lower,
            "upper": self.upper,
            "p": p,
            "method": self.methods.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
            "witness": witness,
        })
        .to_string()
    }
}

/// Result of the ascent alone: an attained value and its witness.
#[derive(Debug, Clone)]
pub struct LowerBound {
    pub value: f64,
    pub witness: Option<Vec<Complex64>>,
    pub converged: bool,
}

/// `sup { |z^α| : ‖z‖_p ≤ 1 }` for a single monomial: `∏ (α_j/m)^{α_j/p}`
/// for finite `p` (Lagrange multipliers give `|z_j|^p = α_j/m`), 1 for `p = ∞`.
pub fn monomial_sup(alpha: &MultiIndex, p: f64) -> f64 {
    if p.is_infinite() {
        return 1.0;
    }
    let m = alpha.degree() as f64;
    if m == 0.0 {
        return 1.0;
    }
    let mut acc = 1.0;
    for &e in alpha.entries() {
        if e > 0 {
            acc *= (e as f64 / m).powf(e as f64 / p);
        }
    }
    acc
}

/// Exact sup-norm of the spread polynomial with `k = ⌊n/m⌋` blocks on the
/// `ℓ_p` ball, valid for `p ≥ m`: `k·(1/(mk))^{m/p}`.
pub fn supnorm_exact_spread(m: u32, n: usize, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    if m == 0 {
        return Err(Error::InvalidParameter("spread needs m ≥ 1".into()));
    }
    if p < m as f64 {
        return Err(Error::InvalidParameter(format!(
            "spread formula requires p ≥ m, got p = {p} < m = {m}"
        )));
    }
    let k = n / m as usize;
    if k == 0 {
        return Err(Error::InvalidParameter("spread needs n ≥ m".into()));
    }
    let k = k as f64;
    Ok(k * (1.0 / (m as f64 * k)).powf(m as f64 * inv(p)))
}

/// Certified upper bound for `‖P‖_p`: the smaller of the coefficient dual
/// norm `|P|_{p'}` and the weighted monomial bound `Σ_α |a_α|·monomial_sup(α,p)`.
pub fn supnorm_upper_cert(poly: &HomPoly, p: f64) -> Result<(f64, MethodTag)> {
    check_exponent("p", p)?;
    let dual = coeff_norm(poly, conjugate(p))?;
    let monomial: f64 = poly
        .terms()
        .map(|(alpha, c)| c.norm() * monomial_sup(alpha, p))
        .sum();
    if monomial <= dual {
        Ok((monomial, MethodTag::UpperMonomialSum))
    } else {
        Ok((dual, MethodTag::UpperCoeffDual))
    }
}

/// Multi-start ascent lower bound (attained value plus witness).
///
/// Deterministic for a fixed seed: per-start seeds are `seed ⊕ start`, and
/// the max over starts is reduced in a fixed order, so parallel execution
/// returns exactly the sequential result.
pub fn supnorm_lower(poly: &HomPoly, p: f64, opts: &AscentOptions) -> Result<LowerBound> {
    ascent_lower(poly, p, opts, false)
}

/// Ascent restricted to nonnegative real `z` (phases frozen at 0); for
/// polynomials with nonnegative coefficients `|P(z)| ≤ P(|z|)`, so this
/// should match the unrestricted run.
pub fn supnorm_lower_nonneg(poly: &HomPoly, p: f64, opts: &AscentOptions) -> Result<LowerBound> {
    ascent_lower(poly, p, opts, true)
}

fn ascent_lower(
    poly: &HomPoly,
    p: f64,
    opts: &AscentOptions,
    nonneg: bool,
) -> Result<LowerBound> {
    check_exponent("p", p)?;
    opts.validate()?;
    if poly.is_zero() {
        return Ok(LowerBound {
            value: 0.0,
            witness: None,
            converged: true,
        });
    }
    let n = poly.nvars();
    if poly.degree() == 0 {
        // Constant polynomial: value everywhere, any sphere point works.
        let alpha = MultiIndex::new(vec![0; n]);
        let witness = point_on_sphere(&vec![1.0; n], &vec![0.0; n], p);
        return Ok(LowerBound {
            value: poly.coeff(&alpha).norm(),
            witness: Some(witness),
            converged: true,
        });
    }
    let partials = poly.partials();
    let mut outcomes: Vec<(f64, Vec<Complex64>, bool)> = (0..opts.starts)
        .into_par_iter()
        .map(|start| run_start(poly, &partials, p, opts, start, nonneg, None))
        .collect();
    // Coordinate vertices are feasible for finite p and catch maxima at the
    // corners of the ℓ_1 sphere, where plain ascent converges poorly. They
    // enter as candidate values plus one extra ascent seeded at the best one.
    if !p.is_infinite() {
        let mut best_vertex: Option<(f64, usize)> = None;
        for j in 0..n {
            let mut z = vec![Complex64::new(0.0, 0.0); n];
            z[j] = Complex64::new(1.0, 0.0);
            let value = poly.eval(&z).unwrap().norm();
            if best_vertex.is_none_or(|(v, _)| value > v) {
                best_vertex = Some((value, j));
            }
            outcomes.push((value, z, true));
        }
        if let Some((value, j)) = best_vertex {
            if value > 0.0 {
                let mut moduli = vec![0.0; n];
                moduli[j] = 1.0;
                outcomes.push(run_start(
                    poly,
                    &partials,
                    p,
                    opts,
                    opts.starts,
                    nonneg,
                    Some(moduli),
                ));
            }
        }
    }
    // Fixed-order reduction; ties go to the earliest candidate.
    let mut best = 0usize;
    for i in 1..outcomes.len() {
        if outcomes[i].0 > outcomes[best].0 {
            best = i;
        }
    }
    let (value, witness, converged) = outcomes.into_iter().nth(best).unwrap();
    Ok(LowerBound {
        value,
        witness: Some(witness),
        converged,
    })
}

fn point_on_sphere(moduli: &[f64], phases: &[f64], p: f64) -> Vec<Complex64> {
    let scale = if p.is_infinite() {
        let max = moduli.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            1.0 / max
        } else {
            1.0
        }
    } else {
        let norm = moduli.iter().map(|s| s.powf(p)).sum::<f64>().powf(inv(p));
        if norm > 0.0 {
            1.0 / norm
        } else {
            1.0
        }
    };
    moduli
        .iter()
        .zip(phases)
        .map(|(&s, &th)| Complex64::from_polar(s * scale, th))
        .collect()
}

struct AscentState {
    moduli: Vec<f64>,
    phases: Vec<f64>,
    p: f64,
    nonneg: bool,
}

impl AscentState {
    fn z(&self) -> Vec<Complex64> {
        self.moduli
            .iter()
            .zip(&self.phases)
            .map(|(&s, &th)| Complex64::from_polar(s, th))
            .collect()
    }

    fn project(&mut self) {
        if self.p.is_infinite() {
            for s in &mut self.moduli {
                *s = 1.0;
            }
            return;
        }
        for s in &mut self.moduli {
            if (*s).partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                *s = 0.0;
            }
        }
        let norm = self
            .moduli
            .iter()
            .map(|s| s.powf(self.p))
            .sum::<f64>()
            .powf(1.0 / self.p);
        if norm > 0.0 {
            for s in &mut self.moduli {
                *s /= norm;
            }
        }
    }

    fn randomize(&mut self, rng: &mut impl Rng) {
        let n = self.moduli.len();
        for j in 0..n {
            self.phases[j] = if self.nonneg {
                0.0
            } else {
                rng.random::<f64>() * std::f64::consts::TAU
            };
        }
        if self.p.is_infinite() {
            for s in &mut self.moduli {
                *s = 1.0;
            }
        } else {
            // Dirichlet(1) masses, then s_j = t_j^{1/p} lands on the sphere.
            let mut total = 0.0;
            let mut mass = vec![0.0; n];
            for t in &mut mass {
                *t = -(rng.random::<f64>().max(f64::MIN_POSITIVE)).ln();
                total += *t;
            }
            for (s, t) in self.moduli.iter_mut().zip(&mass) {
                *s = (t / total).powf(1.0 / self.p);
            }
        }
    }
}

fn run_start(
    poly: &HomPoly,
    partials: &[HomPoly],
    p: f64,
    opts: &AscentOptions,
    start: u32,
    nonneg: bool,
    init_moduli: Option<Vec<f64>>,
) -> (f64, Vec<Complex64>, bool) {
    let n = poly.nvars();
    let mut rng = seeded_rng(opts.seed ^ start as u64, 0x00ab5ce417);
    let mut state = AscentState {
        moduli: vec![1.0; n],
        phases: vec![0.0; n],
        p,
        nonneg,
    };
    if let Some(moduli) = init_moduli {
        state.moduli = moduli;
        state.project();
    } else if start == 0 {
        // Deterministic symmetric start; helps permutation-symmetric inputs.
        if !p.is_infinite() {
            let s = (1.0 / n as f64).powf(1.0 / p);
            state.moduli = vec![s; n];
        }
    } else {
        state.randomize(&mut rng);
    }
    // The all-ones point is the only feasible nonneg point on the torus.
    if nonneg && p.is_infinite() {
        let z = state.z();
        let value = poly.eval(&z).unwrap().norm();
        return (value, z, true);
    }

    let mut z = state.z();
    let mut val2 = poly.eval(&z).unwrap().norm_sqr();
    let mut resamples = 0;
    while val2 == 0.0 && resamples < 5 {
        state.randomize(&mut rng);
        z = state.z();
        val2 = poly.eval(&z).unwrap().norm_sqr();
        resamples += 1;
    }

    let phases_active = !nonneg;
    let mut eta = 0.25;
    let mut stall = 0u32;
    let mut converged = false;

    for _ in 0..opts.max_iters {
        // Gradient of |P(z)|² in (moduli, phases).
        let pv = poly.eval(&z).unwrap();
        let mut gs = vec![0.0; n];
        let mut gth = vec![0.0; n];
        let mut gnorm2 = 0.0;
        for j in 0..n {
            let q = partials[j].eval(&z).unwrap();
            let w = pv.conj() * q;
            if !p.is_infinite() {
                let dir = Complex64::from_polar(1.0, state.phases[j]);
                gs[j] = 2.0 * (w * dir).re;
                gnorm2 += gs[j] * gs[j];
            }
            if phases_active {
                gth[j] = -2.0 * (w * z[j]).im;
                gnorm2 += gth[j] * gth[j];
            }
        }
        let gnorm = gnorm2.sqrt();
        if gnorm == 0.0 {
            converged = true;
            break;
        }

        let mut improved = false;
        while eta >= opts.step_tol {
            let mut cand = AscentState {
                moduli: state.moduli.clone(),
                phases: state.phases.clone(),
                p,
                nonneg,
            };
            if !p.is_infinite() {
                for (s, g) in cand.moduli.iter_mut().zip(&gs) {
                    *s += eta * g / gnorm;
                }
            }
            if phases_active {
                for (th, g) in cand.phases.iter_mut().zip(&gth) {
                    *th += eta * g / gnorm;
                }
            }
            cand.project();
            let cz = cand.z();
            let cv = poly.eval(&cz).unwrap().norm_sqr();
            if cv > val2 {
                let rel = (cv - val2) / cv.max(f64::MIN_POSITIVE);
                state = cand;
                z = cz;
                val2 = cv;
                eta = (eta * 1.5).min(1.0);
                stall = if rel < opts.value_tol { stall + 1 } else { 0 };
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if !improved || stall >= 8 {
            converged = true;
            break;
        }
    }

    let value = poly.eval(&z).unwrap().norm();
    (value, z, converged)
}

/// Combined estimate. Known exact families (a single monomial; disjoint
/// square-free blocks of equal coefficient modulus with `p ≥ m`) collapse the
/// interval to the closed-form value.
pub fn estimate(poly: &HomPoly, p: f64, opts: &AscentOptions) -> Result<NormEstimate> {
    check_exponent("p", p)?;
    if poly.is_zero() {
        return Ok(NormEstimate {
            lower: 0.0,
            upper: 0.0,
            p,
            witness: Vec::new(),
            methods: vec![MethodTag::ZeroPoly],
        });
    }
    if poly.term_count() == 1 {
        let (alpha, &c) = poly.terms().next().unwrap();
        let value = c.norm() * monomial_sup(alpha, p);
        let witness = monomial_witness(alpha, poly.nvars(), p);
        return Ok(NormEstimate {
            lower: value,
            upper: value,
            p,
            witness,
            methods: vec![MethodTag::ExactMonomial],
        });
    }
    if let Some(est) = spread_exact_estimate(poly, p) {
        return Ok(est);
    }

    let lower = supnorm_lower(poly, p, opts)?;
    let (upper, upper_tag) = supnorm_upper_cert(poly, p)?;
    let mut lo = lower.value;
    let mut up = upper;
    // Attained values cannot exceed a certificate beyond roundoff.
    if lo > up {
        debug_assert!(lo <= up * (1.0 + 1e-9));
        up = lo;
    }
    if up < lo {
        lo = up;
    }
    Ok(NormEstimate {
        lower: lo,
        upper: up,
        p,
        witness: lower.witness.unwrap_or_default(),
        methods: vec![
            if lower.converged {
                MethodTag::Ascent
            } else {
                MethodTag::AscentNotConverged
            },
            upper_tag,
        ],
    })
}

fn monomial_witness(alpha: &MultiIndex, n: usize, p: f64) -> Vec<Complex64> {
    let m = alpha.degree() as f64;
    (0..n)
        .map(|j| {
            let e = alpha.entries()[j] as f64;
            let s = if p.is_infinite() {
                1.0
            } else if e > 0.0 && m > 0.0 {
                (e / m).powf(1.0 / p)
            } else {
                0.0
            };
            Complex64::new(s, 0.0)
        })
        .collect()
}

/// Detect `P = Σ_B c_B ∏_{i∈B} z_i` over pairwise-disjoint blocks of size `m`
/// with all `|c_B|` equal; for `p ≥ m` the sup-norm is `|c|·k·(1/(mk))^{m/p}`.
fn spread_exact_estimate(poly: &HomPoly, p: f64) -> Option<NormEstimate> {
    let m = poly.degree();
    if m == 0 || (p.is_finite() && p < m as f64) {
        return None;
    }
    let mut used = vec![false; poly.nvars()];
    let mut modulus = None;
    for (alpha, c) in poly.terms() {
        if !alpha.is_square_free() {
            return None;
        }
        for j in alpha.support() {
            if used[j] {
                return None;
            }
            used[j] = true;
        }
        let mag = c.norm();
        match modulus {
            None => modulus = Some(mag),
            Some(m0) if (mag - m0).abs() <= 1e-12 * m0.max(mag) => {}
            _ => return None,
        }
    }
    let modulus = modulus?;
    let k = poly.term_count() as f64;
    let value = modulus * k * (1.0 / (m as f64 * k)).powf(m as f64 * inv(p));

    // Witness: per-block equal moduli, one variable per block absorbs the
    // coefficient phase so all terms add up in phase.
    let n = poly.nvars();
    let s = if p.is_infinite() {
        1.0
    } else {
        (1.0 / (m as f64 * k)).powf(1.0 / p)
    };
    let mut moduli = vec![if p.is_infinite() { 1.0 } else { 0.0 }; n];
    let mut phases = vec![0.0; n];
    for (alpha, c) in poly.terms() {
        let mut first = true;
        for j in alpha.support() {
            moduli[j] = s;
            if first {
                phases[j] = -c.arg();
                first = false;
            }
        }
    }
    let witness = moduli
        .iter()
        .zip(&phases)
        .map(|(&s, &th)| Complex64::from_polar(s, th))
        .collect();
    Some(NormEstimate {
        lower: value,
        upper: value,
        p,
        witness,
        methods: vec![MethodTag::ExactSpread],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{ones_poly, random_unimodular, spread_poly};
    use crate::polycore::enumerate_lambda;
    use crate::testutil::random_poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lp_norm(z: &[Complex64], p: f64) -> f64 {
        if p.is_infinite() {
            z.iter().map(|zi| zi.norm()).fold(0.0, f64::max)
        } else {
            z.iter().map(|zi| zi.norm().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }

    /// Grid-search oracle for a single monomial sup on the p-sphere: moduli
    /// only, simplex grid over t with |z_j| = t_j^{1/p}.
    fn monomial_sup_grid(alpha: &[u32], p: f64) -> f64 {
        let m: u32 = alpha.iter().sum();
        let support: Vec<usize> = (0..alpha.len()).filter(|&j| alpha[j] > 0).collect();
        let steps = 400;
        let mut best: f64 = 0.0;
        match support.len() {
            1 => {
                best = 1.0; // whole mass on the single variable
            }
            2 => {
                for i in 0..=steps {
                    let t = i as f64 / steps as f64;
                    let v = (t.powf(1.0 / p)).powi(alpha[support[0]] as i32)
                        * ((1.0 - t).powf(1.0 / p)).powi(alpha[support[1]] as i32);
                    best = best.max(v);
                }
            }
            3 => {
                for i in 0..=steps {
                    for j in 0..=(steps - i) {
                        let t0 = i as f64 / steps as f64;
                        let t1 = j as f64 / steps as f64;
                        let t2 = 1.0 - t0 - t1;
                        let v = (t0.powf(1.0 / p)).powi(alpha[support[0]] as i32)
                            * (t1.powf(1.0 / p)).powi(alpha[support[1]] as i32)
                            * (t2.powf(1.0 / p)).powi(alpha[support[2]] as i32);
                        best = best.max(v);
                    }
                }
            }
            _ => unreachable!("oracle supports ≤ 3 active variables"),
        }
        let _ = m;
        best
    }

    #[test]
    fn monomial_sup_matches_grid_oracle() {
        assert_eq!(monomial_sup(&MultiIndex::new(vec![3, 0, 0]), 2.0), 1.0);
        assert_eq!(monomial_sup(&MultiIndex::new(vec![2, 1]), f64::INFINITY), 1.0);

        let a = MultiIndex::new(vec![1, 1]);
        assert!((monomial_sup(&a, 2.0) - 0.5).abs() < 1e-12);
        assert!((monomial_sup(&a, 2.0) - monomial_sup_grid(&[1, 1], 2.0)).abs() < 1e-3);

        let b = MultiIndex::new(vec![1, 1, 1]);
        assert!((monomial_sup(&b, 3.0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((monomial_sup(&b, 3.0) - monomial_sup_grid(&[1, 1, 1], 3.0)).abs() < 2e-3);

        let d = MultiIndex::new(vec![2, 1, 0]);
        for p in [1.0, 2.0, 4.0] {
            assert!((monomial_sup(&d, p) - monomial_sup_grid(&[2, 1, 0], p)).abs() < 2e-3);
        }
    }

    #[test]
    fn spread_formula_examples() {
        assert!((supnorm_exact_spread(2, 4, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((supnorm_exact_spread(2, 4, f64::INFINITY).unwrap() - 2.0).abs() < 1e-15);
        assert!((supnorm_exact_spread(3, 9, 6.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(supnorm_exact_spread(3, 9, 2.0).is_err()); // p < m
        assert!(supnorm_exact_spread(2, 1, 4.0).is_err()); // k = 0
    }

    #[test]
    fn lower_bound_examples() {
        let opts = AscentOptions::default();

        for m in 1..=3u32 {
            let mut p = HomPoly::zero(m, 3);
            let mut alpha = vec![0u32; 3];
            alpha[0] = m;
            p.set_coeff(MultiIndex::new(alpha), c(1.0, 0.0)).unwrap();
            for q in [1.0, 2.0, f64::INFINITY] {
                let lb = supnorm_lower(&p, q, &opts).unwrap();
                assert!((lb.value - 1.0).abs() < 1e-6, "m={m} q={q} got {}", lb.value);
            }
        }

        let spread = spread_poly(2, 4).unwrap();
        let lb = supnorm_lower(&spread, 2.0, &opts).unwrap();
        assert!((lb.value - 0.5).abs() < 1e-6);

        // z1 z2 on the 2-sphere: maximum 1/2 at (1/√2, 1/√2).
        let mut p = HomPoly::zero(2, 2);
        p.set_coeff(MultiIndex::new(vec![1, 1]), c(1.0, 0.0)).unwrap();
        let lb = supnorm_lower(&p, 2.0, &opts).unwrap();
        assert!((lb.value - 0.5).abs() < 1e-8);
        let w = lb.witness.unwrap();
        assert!((w[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);

        // Dense-grid oracle over moduli for the same polynomial.
        let mut best: f64 = 0.0;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            best = best.max(t.sqrt() * (1.0 - t).sqrt());
        }
        assert!((lb.value - best).abs() < 1e-6);
    }

    #[test]
    fn spread_exactness_grid() {
        // Covers n not divisible by m, where some variables stay unused.
        let opts = AscentOptions {
            starts: 32,
            max_iters: 800,
            value_tol: 1e-12,
            ..Default::default()
        };
        for m in [2u32, 3] {
            for n in m as usize..=12 {
                let poly = spread_poly(m, n).unwrap();
                for p in [m as f64, (m + 1) as f64, 2.0 * m as f64, f64::INFINITY] {
                    let exact = supnorm_exact_spread(m, n, p).unwrap();
                    let lb = supnorm_lower(&poly, p, &opts).unwrap().value;
                    assert!(
                        (lb - exact).abs() <= 1e-4 * exact,
                        "m={m} n={n} p={p}: {lb} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_spread_cross_check_with_optimizer() {
        let exact = supnorm_exact_spread(3, 9, 6.0).unwrap();
        let poly = spread_poly(3, 9).unwrap();
        let lb = supnorm_lower(&poly, 6.0, &AscentOptions::default()).unwrap().value;
        assert!((exact - 1.0).abs() < 1e-15);
        assert!((lb - exact).abs() <= 1e-4 * exact);
    }

    #[test]
    fn not_converged_tag_on_tiny_budget() {
        let poly = random_unimodular(2, 6, 1).unwrap();
        let opts = AscentOptions {
            starts: 1,
            max_iters: 2,
            ..Default::default()
        };
        let lb = supnorm_lower(&poly, 2.0, &opts).unwrap();
        assert!(!lb.converged);
        let est = estimate(&poly, 2.0, &opts).unwrap();
        assert!(est.methods.contains(&MethodTag::AscentNotConverged));
    }

    #[test]
    fn lower_bound_zero_poly() {
        let p = HomPoly::zero(2, 3);
        let lb = supnorm_lower(&p, 2.0, &AscentOptions::default()).unwrap();
        assert_eq!(lb.value, 0.0);
        assert!(lb.witness.is_none());
    }

    #[test]
    fn witness_invariants() {
        let opts = AscentOptions::default();
        for seed in 0..6u64 {
            let m = 1 + (seed % 3) as u32;
            let poly = random_poly(m, 4, 40 + seed);
            for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                let lb = supnorm_lower(&poly, p, &opts).unwrap();
                let w = lb.witness.unwrap();
                assert!((lp_norm(&w, p) - 1.0).abs() <= 1e-12);
                let attained = poly.eval(&w).unwrap().norm();
                assert!((attained - lb.value).abs() <= 1e-9 * lb.value.max(1e-12));
            }
        }
    }

    #[test]
    fn upper_cert_examples() {
        let mut p = HomPoly::zero(3, 2);
        p.set_coeff(MultiIndex::new(vec![3, 0]), c(1.0, 0.0)).unwrap();
        let (v, _) = supnorm_upper_cert(&p, f64::INFINITY).unwrap();
        assert!((v - 1.0).abs() < 1e-15);

        let mut q = HomPoly::zero(2, 2);
        q.set_coeff(MultiIndex::new(vec![1, 1]), c(1.0, 0.0)).unwrap();
        let (v, tag) = supnorm_upper_cert(&q, 2.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(tag, MethodTag::UpperMonomialSum);

        let spread = spread_poly(2, 4).unwrap();
        let (v, _) = supnorm_upper_cert(&spread, 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn estimate_exact_branches() {
        let opts = AscentOptions::default();

        let mut p = HomPoly::zero(2, 2);
        p.set_coeff(MultiIndex::new(vec![1, 1]), c(1.0, 0.0)).unwrap();
        let est = estimate(&p, 2.0, &opts).unwrap();
        assert_eq!(est.methods, vec![MethodTag::ExactMonomial]);
        assert!((est.lower - 0.5).abs() < 1e-15);
        assert_eq!(est.lower, est.upper);
        assert!((p.eval(&est.witness).unwrap().norm() - est.lower).abs() < 1e-12);

        // Degree-1 all-ones: a spread with k = n blocks, so the exact branch
        // returns the Hölder value n^{1/p'}.
        let ones = ones_poly(1, 4).unwrap();
        let est = estimate(&ones, 2.0, &opts).unwrap();
        assert_eq!(est.methods, vec![MethodTag::ExactSpread]);
        assert!((est.lower - 2.0).abs() < 1e-12);
        assert!((est.upper - 2.0).abs() < 1e-12);

        let est = estimate(&spread_poly(2, 4).unwrap(), 2.0, &opts).unwrap();
        assert!((est.lower - 0.5).abs() < 1e-15);
        assert!((est.upper - 0.5).abs() < 1e-15);
        let w = &est.witness;
        assert!((lp_norm(w, 2.0) - 1.0).abs() < 1e-12);

        // Spread detection must not fire for p < m.
        let est = estimate(&spread_poly(2, 4).unwrap(), 1.0, &opts).unwrap();
        assert!(est.methods.contains(&MethodTag::Ascent));
    }

    #[test]
    fn estimate_unimodular_upper() {
        let p = random_unimodular(2, 3, 0).unwrap();
        let est = estimate(&p, f64::INFINITY, &AscentOptions::default()).unwrap();
        assert!((est.upper - 6.0).abs() < 1e-12); // |P|_1 = C(4,2) = 6
        assert!(est.lower <= est.upper);
    }

    #[test]
    fn estimate_scaling() {
        let opts = AscentOptions::default();
        let poly = random_poly(2, 3, 77);
        let lam = c(-2.5, 1.25);
        let scaled = poly.scaled(lam);
        for p in [1.5, 2.0, f64::INFINITY] {
            let a = estimate(&poly, p, &opts).unwrap();
            let b = estimate(&scaled, p, &opts).unwrap();
            assert!((b.lower - lam.norm() * a.lower).abs() <= 1e-12 * b.lower.max(1.0));
            assert!((b.upper - lam.norm() * a.upper).abs() <= 1e-12 * b.upper.max(1.0));
        }
    }

    #[test]
    fn nonneg_restriction_matches_unrestricted() {
        let opts = AscentOptions::default();
        for (poly, p) in [
            (ones_poly(2, 4).unwrap(), 2.0),
            (ones_poly(2, 4).unwrap(), f64::INFINITY),
            (spread_poly(3, 6).unwrap(), 3.0),
            (spread_poly(2, 6).unwrap(), 4.0),
        ] {
            let full = supnorm_lower(&poly, p, &opts).unwrap().value;
            let restricted = supnorm_lower_nonneg(&poly, p, &opts).unwrap().value;
            assert!(
                (full - restricted).abs() <= 1e-6 * full.max(1.0),
                "p={p}: full {full} vs nonneg {restricted}"
            );
        }
    }

    #[test]
    fn monotonicity_in_p() {
        // For q ≤ p: lower(P,p) ≤ n^{m(1/q−1/p)}·upper(P,q).
        let opts = AscentOptions::default();
        for seed in 0..4u64 {
            let poly = random_poly(2, 3, 300 + seed);
            let m = poly.degree() as f64;
            let n = poly.nvars() as f64;
            let grid = [1.0, 2.0, 4.0, f64::INFINITY];
            for (i, &q) in grid.iter().enumerate() {
                for &p in &grid[i..] {
                    let lo = supnorm_lower(&poly, p, &opts).unwrap().value;
                    let (up, _) = supnorm_upper_cert(&poly, q).unwrap();
                    let factor = n.powf(m * (inv(q) - inv(p)));
                    assert!(
                        lo <= factor * up * (1.0 + 1e-9),
                        "q={q} p={p}: {lo} vs {}",
                        factor * up
                    );
                }
            }
        }
    }

    #[test]
    fn lower_leq_upper_on_random_instances() {
        let opts = AscentOptions {
            starts: 12,
            max_iters: 200,
            ..Default::default()
        };
        for seed in 0..25u64 {
            let m = 1 + (seed % 3) as u32;
            let n = 2 + (seed % 3) as usize;
            let poly = random_poly(m, n, 7000 + seed);
            for p in [1.0, 2.0, 3.0, f64::INFINITY] {
                let est = estimate(&poly, p, &opts).unwrap();
                assert!(est.lower <= est.upper * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn jsonl_schema() {
        let mut p = HomPoly::zero(2, 2);
        p.set_coeff(MultiIndex::new(vec![1, 1]), c(1.0, 0.0)).unwrap();
        let est = estimate(&p, f64::INFINITY, &AscentOptions::default()).unwrap();
        let line = est.to_jsonl();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["p"], "inf");
        assert!(v["lower"].is_number());
        assert!(v["witness"].as_array().unwrap().len() == 4);
        let est2 = estimate(&p, 2.0, &AscentOptions::default()).unwrap();
        let v2: serde_json::Value = serde_json::from_str(&est2.to_jsonl()).unwrap();
        assert_eq!(v2["p"], 2.0);
    }

    #[test]
    fn rejects_bad_p() {
        let p = ones_poly(2, 2).unwrap();
        assert!(supnorm_lower(&p, 0.5, &AscentOptions::default()).is_err());
        assert!(estimate(&p, f64::NAN, &AscentOptions::default()).is_err());
        let bad = AscentOptions {
            value_tol: 0.0,
            ..Default::default()
        };
        assert!(supnorm_lower(&p, 2.0, &bad).is_err());
        let _ = enumerate_lambda(2, 2).unwrap();
    }
}
