//! Extremal witness families: spread, all-ones, random unimodular, and
//! Steiner polynomials over greedily constructed partial Steiner systems.
//!
//! All constructors are pure functions of their seed; identical seeds give
//! bit-identical results, including serialization.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polycore::{enumerate_lambda_capped, HomPoly, MultiIndex};
use crate::supnorm::{estimate, AscentOptions};
use crate::util::{binomial_capped, seeded_rng};
use crate::DEFAULT_CAP;

/// Family of `m`-subsets of `{1..n}` in which every `(m−1)`-subset lies in at
/// most one member. Blocks are kept sorted (and the block list sorted), so a
/// system has exactly one serialized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSteinerSystem {
    m: u32,
    n: usize,
    blocks: Vec<Vec<u32>>,
}

impl PartialSteinerSystem {
    pub fn from_blocks(m: u32, n: usize, mut blocks: Vec<Vec<u32>>) -> Result<Self> {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        let sys = PartialSteinerSystem { m, n, blocks };
        sys.validate()?;
        Ok(sys)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// Exhaustive validity check: block shapes, the `(m−1)`-subset uniqueness
    /// property, and the counting bound `m·|blocks| ≤ C(n, m−1)`.
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || (self.n as u64) < self.m as u64 {
            return Err(Error::InvalidParameter(
                "partial Steiner system needs n ≥ m ≥ 2".into(),
            ));
        }
        let mut seen = HashSet::new();
        for block in &self.blocks {
            if block.len() != self.m as usize
                || block.windows(2).any(|w| w[0] >= w[1])
                || block.iter().any(|&j| j == 0 || j as usize > self.n)
            {
                return Err(Error::InvalidParameter(format!(
                    "bad block {block:?} for m = {}, n = {}",
                    self.m, self.n
                )));
            }
            for sub in subsets_dropping_one(block) {
                if !seen.insert(sub.clone()) {
                    return Err(Error::InvalidParameter(format!(
                        "({}−1)-subset {sub:?} covered twice",
                        self.m
                    )));
                }
            }
        }
        // m·|blocks| distinct (m−1)-subsets must fit into C(n, m−1).
        let total = crate::util::big_binomial(self.n as u64, self.m as u64 - 1);
        let used = num_bigint::BigUint::from(self.blocks.len() as u64 * self.m as u64);
        if used > total {
            return Err(Error::InvalidParameter(
                "block count exceeds the packing bound".into(),
            ));
        }
        Ok(())
    }

    /// The packing bound `(1/m)·C(n, m−1)` on the number of blocks.
    pub fn cardinality_bound(&self) -> f64 {
        crate::util::big_to_f64(&crate::util::big_binomial(
            self.n as u64,
            self.m as u64 - 1,
        )) / self.m as f64
    }

    /// Text form: header `m n`, one sorted block per line.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.m, self.n);
        for block in &self.blocks {
            let line: Vec<String> = block.iter().map(|j| j.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(u32, usize)> = None;
        let mut blocks = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match header {
                None => {
                    if tokens.len() != 2 {
                        return Err(Error::Parse {
                            line,
                            msg: "expected header \"m n\"".into(),
                        });
                    }
                    let m = tokens[0].parse().map_err(|_| Error::Parse {
                        line,
                        msg: "bad m".into(),
                    })?;
                    let n = tokens[1].parse().map_err(|_| Error::Parse {
                        line,
                        msg: "bad n".into(),
                    })?;
                    header = Some((m, n));
                }
                Some((m, _)) => {
                    if tokens.len() != m as usize {
                        return Err(Error::Parse {
                            line,
                            msg: format!("block needs {} indices", m),
                        });
                    }
                    let mut block = Vec::with_capacity(m as usize);
                    for t in tokens {
                        block.push(t.parse().map_err(|_| Error::Parse {
                            line,
                            msg: format!("bad index {t:?}"),
                        })?);
                    }
                    blocks.push(block);
                }
            }
        }
        let (m, n) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        PartialSteinerSystem::from_blocks(m, n, blocks)
    }
}

fn subsets_dropping_one(block: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    (0..block.len()).map(move |skip| {
        block
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, &j)| j)
            .collect()
    })
}

/// Sign choice for the blocks of a system, with the seed that produced it.
#[derive(Debug, Clone)]
pub struct SignAssignment {
    pub seed: u64,
    /// One `(block, ±1)` pair per block, in block order.
    pub signs: Vec<(Vec<u32>, i8)>,
}

impl SignAssignment {
    /// Text form: one `i_1 … i_m : ±1` line per block.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (block, sign) in &self.signs {
            let idx: Vec<String> = block.iter().map(|j| j.to_string()).collect();
            let _ = writeln!(out, "{} : {:+}", idx.join(" "), sign);
        }
        out
    }
}

/// `P = Σ_{j=0}^{k−1} z_{mj+1}⋯z_{mj+m}` with `k = ⌊n/m⌋`: disjoint
/// square-free blocks, all coefficients 1.
pub fn spread_poly(m: u32, n: usize) -> Result<HomPoly> {
    if m == 0 || n < m as usize {
        return Err(Error::InvalidParameter(format!(
            "spread_poly needs n ≥ m ≥ 1, got m = {m}, n = {n}"
        )));
    }
    let k = n / m as usize;
    let mut poly = HomPoly::zero(m, n);
    for j in 0..k {
        let mut entries = vec![0u32; n];
        for i in 0..m as usize {
            entries[m as usize * j + i] = 1;
        }
        poly.set_coeff(MultiIndex::new(entries), Complex64::new(1.0, 0.0))?;
    }
    Ok(poly)
}

/// Coefficient 1 on every monomial of `Λ(m,n)` (one per index tuple).
pub fn ones_poly(m: u32, n: usize) -> Result<HomPoly> {
    ones_poly_capped(m, n, DEFAULT_CAP)
}

pub fn ones_poly_capped(m: u32, n: usize, cap: u64) -> Result<HomPoly> {
    let mut poly = HomPoly::zero(m, n);
    for alpha in enumerate_lambda_capped(m, n, cap)? {
        poly.set_coeff(alpha, Complex64::new(1.0, 0.0))?;
    }
    Ok(poly)
}

/// Independent ±1 coefficients on all of `Λ(m,n)`, drawn in canonical order.
pub fn random_unimodular(m: u32, n: usize, seed: u64) -> Result<HomPoly> {
    random_unimodular_capped(m, n, seed, DEFAULT_CAP)
}

pub fn random_unimodular_capped(m: u32, n: usize, seed: u64, cap: u64) -> Result<HomPoly> {
    unimodular_stream(m, n, seed, 0, cap)
}

fn unimodular_stream(m: u32, n: usize, seed: u64, stream: u64, cap: u64) -> Result<HomPoly> {
    let mut rng = seeded_rng(seed, stream);
    let mut poly = HomPoly::zero(m, n);
    for alpha in enumerate_lambda_capped(m, n, cap)? {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        poly.set_coeff(alpha, Complex64::new(sign, 0.0))?;
    }
    Ok(poly)
}

/// Draw `rounds` unimodular polynomials and keep the one whose sup-norm
/// estimate midpoint on the `ℓ_p` ball is smallest (ties: lowest round).
/// Round `r` uses stream `r` of `seed`, so `rounds = 1` reproduces
/// [`random_unimodular`] exactly.
pub fn best_of_unimodular(
    m: u32,
    n: usize,
    p: f64,
    seed: u64,
    rounds: u32,
    opts: &AscentOptions,
) -> Result<HomPoly> {
    best_of_unimodular_capped(m, n, p, seed, rounds, opts, DEFAULT_CAP)
}

pub fn best_of_unimodular_capped(
    m: u32,
    n: usize,
    p: f64,
    seed: u64,
    rounds: u32,
    opts: &AscentOptions,
    cap: u64,
) -> Result<HomPoly> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be ≥ 1".into()));
    }
    let score_opts = opts.scoring();
    let scored: Vec<(f64, HomPoly)> = (0..rounds)
        .into_par_iter()
        .map(|round| -> Result<(f64, HomPoly)> {
            let poly = unimodular_stream(m, n, seed, round as u64, cap)?;
            let est = estimate(&poly, p, &score_opts)?;
            Ok((est.midpoint(), poly))
        })
        .collect::<Result<_>>()?;
    let mut best = 0usize;
    for i in 1..scored.len() {
        if scored[i].0 < scored[best].0 {
            best = i;
        }
    }
    Ok(scored.into_iter().nth(best).unwrap().1)
}

/// Greedy partial Steiner system: visit all `m`-subsets of `{1..n}` in
/// seeded random order, accepting a block iff none of its `(m−1)`-subsets is
/// covered yet. The result is maximal for its visit order and always valid.
pub fn greedy_partial_steiner(m: u32, n: usize, seed: u64) -> Result<PartialSteinerSystem> {
    greedy_partial_steiner_capped(m, n, seed, DEFAULT_CAP)
}

pub fn greedy_partial_steiner_capped(
    m: u32,
    n: usize,
    seed: u64,
    cap: u64,
) -> Result<PartialSteinerSystem> {
    if m < 2 || n < m as usize {
        return Err(Error::InvalidParameter(
            "greedy_partial_steiner needs n ≥ m ≥ 2".into(),
        ));
    }
    binomial_capped(n as u64, m as u64, cap, "C(n,m)")?;
    let mut subsets = k_subsets(n, m as usize);
    let mut rng = seeded_rng(seed, 0);
    subsets.shuffle(&mut rng);

    let mut covered: HashSet<Vec<u32>> = HashSet::new();
    let mut blocks = Vec::new();
    'outer: for block in subsets {
        for sub in subsets_dropping_one(&block) {
            if covered.contains(&sub) {
                continue 'outer;
            }
        }
        for sub in subsets_dropping_one(&block) {
            covered.insert(sub);
        }
        blocks.push(block);
    }
    blocks.sort();
    Ok(PartialSteinerSystem { m, n, blocks })
}

/// All `k`-subsets of `{1..n}`, lexicographic, as sorted index vectors.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..=(n as u32) {
            cur.push(j);
            rec(n, k, j + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 1, &mut cur, &mut out);
    out
}

/// Square-free ±1 polynomial supported on the blocks of `sys`. Signs are the
/// best of `rounds` seeded random assignments, scored by the sup-norm
/// estimate midpoint on the `ℓ_p` ball (the small-norm sign choice is an
/// existence statement, so sampling stands in for it).
pub fn steiner_poly(
    sys: &PartialSteinerSystem,
    p: f64,
    seed: u64,
    rounds: u32,
    opts: &AscentOptions,
) -> Result<(HomPoly, SignAssignment)> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be ≥ 1".into()));
    }
    sys.validate()?;
    let score_opts = opts.scoring();
    let scored: Vec<(f64, Vec<i8>)> = (0..rounds)
        .into_par_iter()
        .map(|round| -> Result<(f64, Vec<i8>)> {
            let mut rng = seeded_rng(seed, round as u64);
            let signs: Vec<i8> = sys
                .blocks
                .iter()
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect();
            let poly = poly_from_signs(sys, &signs)?;
            let est = estimate(&poly, p, &score_opts)?;
            Ok((est.midpoint(), signs))
        })
        .collect::<Result<_>>()?;
    let mut best = 0usize;
    for i in 1..scored.len() {
        if scored[i].0 < scored[best].0 {
            best = i;
        }
    }
    let signs = scored.into_iter().nth(best).unwrap().1;
    let poly = poly_from_signs(sys, &signs)?;
    let assignment = SignAssignment {
        seed,
        signs: sys
            .blocks
            .iter()
            .cloned()
            .zip(signs.iter().copied())
            .collect(),
    };
    Ok((poly, assignment))
}

fn poly_from_signs(sys: &PartialSteinerSystem, signs: &[i8]) -> Result<HomPoly> {
    let mut poly = HomPoly::zero(sys.m, sys.n);
    for (block, &sign) in sys.blocks.iter().zip(signs) {
        let mut entries = vec![0u32; sys.n];
        for &j in block {
            entries[j as usize - 1] = 1;
        }
        poly.set_coeff(MultiIndex::new(entries), Complex64::new(sign as f64, 0.0))?;
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{coeff_norm, serialize_poly};

    #[test]
    fn spread_examples() {
        let p = spread_poly(2, 5).unwrap();
        assert_eq!(p.term_count(), 2);
        let support: Vec<Vec<u32>> = p.terms().map(|(a, _)| a.entries().to_vec()).collect();
        assert!(support.contains(&vec![1, 1, 0, 0, 0]));
        assert!(support.contains(&vec![0, 0, 1, 1, 0]));

        let p = spread_poly(1, 3).unwrap();
        assert_eq!(p.term_count(), 3);

        let p = spread_poly(3, 6).unwrap();
        assert_eq!(p.term_count(), 2);
        for r in [1.0, 2.0, 3.0] {
            assert!((coeff_norm(&p, r).unwrap() - 2.0f64.powf(1.0 / r)).abs() < 1e-14);
        }

        assert!(spread_poly(3, 2).is_err());
    }

    #[test]
    fn ones_examples() {
        let p = ones_poly(1, 5).unwrap();
        assert!((coeff_norm(&p, 1.0).unwrap() - 5.0).abs() < 1e-14);

        let p = ones_poly(2, 2).unwrap();
        assert_eq!(p.term_count(), 3);

        // Constant witness: P(n^{-1/p}, …) = C(n+m-1, m)·n^{-m/p}.
        let (m, n, q) = (2u32, 4usize, 3.0f64);
        let p = ones_poly(m, n).unwrap();
        let w = vec![Complex64::new((n as f64).powf(-1.0 / q), 0.0); n];
        let got = p.eval(&w).unwrap().re;
        let expected = 10.0 * (n as f64).powf(-(m as f64) / q);
        assert!((got - expected).abs() < 1e-12);

        assert!(ones_poly_capped(3, 100, 1000).is_err());
    }

    #[test]
    fn unimodular_examples() {
        let p = random_unimodular(2, 4, 0).unwrap();
        assert_eq!(p.term_count(), 10); // C(5,2)
        for (_, c) in p.terms() {
            assert!((c.norm() - 1.0).abs() < 1e-15);
            assert_eq!(c.im, 0.0);
        }
        for r in [1.0, 2.0, 4.0] {
            assert!((coeff_norm(&p, r).unwrap() - 10.0f64.powf(1.0 / r)).abs() < 1e-12);
        }

        // Triangle inequality on the polydisc.
        let (upper, _) = crate::supnorm::supnorm_upper_cert(&p, f64::INFINITY).unwrap();
        assert!(upper <= 10.0 + 1e-12);

        // Same seed, same polynomial; different seeds should differ somewhere.
        let q = random_unimodular(2, 4, 0).unwrap();
        assert_eq!(serialize_poly(&p), serialize_poly(&q));
        let r = random_unimodular(2, 4, 1).unwrap();
        assert_ne!(serialize_poly(&p), serialize_poly(&r));
    }

    #[test]
    fn best_of_single_round_matches_plain_draw() {
        let opts = AscentOptions::default();
        let a = best_of_unimodular(2, 3, 2.0, 9, 1, &opts).unwrap();
        let b = random_unimodular(2, 3, 9).unwrap();
        assert_eq!(serialize_poly(&a), serialize_poly(&b));
    }

    #[test]
    fn best_of_never_worse_than_first_draw() {
        let opts = AscentOptions::default();
        let single = random_unimodular(2, 4, 3).unwrap();
        let best = best_of_unimodular(2, 4, 2.0, 3, 8, &opts).unwrap();
        let score = |poly: &HomPoly| {
            estimate(poly, 2.0, &opts.scoring()).unwrap().midpoint()
        };
        assert!(score(&best) <= score(&single) + 1e-12);
    }

    #[test]
    fn greedy_matching_is_maximum() {
        // For m = 2 a partial Steiner system is a matching; greedy maximal
        // matchings on a complete graph are perfect, so ⌊n/2⌋ blocks.
        for n in 2..=8usize {
            for seed in 0..5u64 {
                let sys = greedy_partial_steiner(2, n, seed).unwrap();
                assert_eq!(sys.blocks().len(), n / 2, "n = {n}, seed = {seed}");
                sys.validate().unwrap();
            }
        }
        let sys = greedy_partial_steiner(2, 4, 0).unwrap();
        assert_eq!(sys.blocks().len() as f64, sys.cardinality_bound());
    }

    #[test]
    fn greedy_triples_are_valid_and_bounded() {
        let sys = greedy_partial_steiner(3, 7, 1).unwrap();
        sys.validate().unwrap();
        assert!(sys.blocks().len() <= 7); // (1/3)·C(7,2) = 7
    }

    #[test]
    fn greedy_density_floor() {
        for n in [20usize, 40, 60] {
            let sys = greedy_partial_steiner(3, n, 0).unwrap();
            sys.validate().unwrap();
            let floor = 0.25 * sys.cardinality_bound();
            assert!(
                sys.blocks().len() as f64 >= floor,
                "n = {n}: {} < {floor}",
                sys.blocks().len()
            );
        }
    }

    #[test]
    fn greedy_determinism() {
        let a = greedy_partial_steiner(3, 12, 5).unwrap();
        let b = greedy_partial_steiner(3, 12, 5).unwrap();
        assert_eq!(a.serialize(), b.serialize());
        let parsed = PartialSteinerSystem::parse(&a.serialize()).unwrap();
        assert_eq!(parsed, a);
    }

    #[test]
    fn steiner_poly_examples() {
        let opts = AscentOptions::default();

        let single = PartialSteinerSystem::from_blocks(2, 4, vec![vec![1, 3]]).unwrap();
        let (poly, _) = steiner_poly(&single, 2.0, 0, 4, &opts).unwrap();
        assert_eq!(poly.term_count(), 1);
        let est = estimate(&poly, 2.0, &opts).unwrap();
        assert!((est.lower - 0.5).abs() < 1e-12); // monomial sup of z1 z3

        let sys = greedy_partial_steiner(3, 9, 2).unwrap();
        let (poly, signs) = steiner_poly(&sys, 2.0, 7, 8, &opts).unwrap();
        assert_eq!(poly.term_count(), sys.blocks().len());
        assert_eq!(signs.signs.len(), sys.blocks().len());
        for (alpha, c) in poly.terms() {
            assert!(alpha.is_square_free());
            assert!((c.norm() - 1.0).abs() < 1e-15);
        }
        let k = sys.blocks().len() as f64;
        for r in [1.0, 2.0] {
            assert!((coeff_norm(&poly, r).unwrap() - k.powf(1.0 / r)).abs() < 1e-12);
        }

        // Same seed twice: identical polynomial and sign file.
        let (poly2, signs2) = steiner_poly(&sys, 2.0, 7, 8, &opts).unwrap();
        assert_eq!(serialize_poly(&poly), serialize_poly(&poly2));
        assert_eq!(signs.serialize(), signs2.serialize());
    }

    #[test]
    fn best_of_norm_trends() {
        // Coarse growth checks on the selected draws: ±1 quadratics have
        // ℓ_1-ball norm exactly 1 (attained at a coordinate vector), the
        // ℓ_2-ball norm grows like √n, and the polydisc norm grows fast.
        let opts = AscentOptions {
            starts: 16,
            max_iters: 300,
            ..Default::default()
        };
        let mut l1 = Vec::new();
        let mut l2 = Vec::new();
        let mut linf = Vec::new();
        for n in [4usize, 8, 16] {
            let p1 = best_of_unimodular(2, n, 1.0, 5, 4, &opts).unwrap();
            l1.push(crate::supnorm::supnorm_lower(&p1, 1.0, &opts).unwrap().value);
            let p2 = best_of_unimodular(2, n, 2.0, 5, 4, &opts).unwrap();
            l2.push(crate::supnorm::supnorm_lower(&p2, 2.0, &opts).unwrap().value);
            let pi = best_of_unimodular(2, n, f64::INFINITY, 5, 4, &opts).unwrap();
            linf.push(
                crate::supnorm::supnorm_lower(&pi, f64::INFINITY, &opts)
                    .unwrap()
                    .value,
            );
        }
        for v in &l1 {
            assert!((v - 1.0).abs() < 1e-9, "ℓ1 norm {v}");
        }
        let slope2 = (l2[2] / l2[0]).ln() / 4.0f64.ln();
        assert!(slope2 > 0.2 && slope2 < 0.8, "ℓ2 growth slope {slope2}");
        let growth = linf[2] / linf[0];
        assert!(growth > 3.0 && growth < 11.0, "polydisc growth {growth}");
    }

    #[test]
    fn spread_support_is_a_matching_system() {
        let spread = spread_poly(2, 8).unwrap();
        let blocks: Vec<Vec<u32>> = spread
            .terms()
            .map(|(a, _)| a.support().map(|j| j as u32 + 1).collect())
            .collect();
        let sys = PartialSteinerSystem::from_blocks(2, 8, blocks.clone()).unwrap();
        sys.validate().unwrap();
        let sys_support: Vec<Vec<u32>> = sys.blocks().to_vec();
        let mut expected = blocks;
        expected.sort();
        assert_eq!(sys_support, expected);
    }

    #[test]
    fn invalid_systems_rejected() {
        // Two blocks sharing a 1-subset: {1,2} and {1,3} share {1}? For m=2
        // the (m−1)-subsets are singletons, so any shared variable collides.
        assert!(PartialSteinerSystem::from_blocks(2, 4, vec![vec![1, 2], vec![1, 3]]).is_err());
        assert!(PartialSteinerSystem::from_blocks(2, 4, vec![vec![1, 1]]).is_err());
        assert!(PartialSteinerSystem::from_blocks(2, 4, vec![vec![0, 2]]).is_err());
        assert!(greedy_partial_steiner(1, 5, 0).is_err());
        assert!(greedy_partial_steiner_capped(3, 60, 0, 100).is_err());
    }
}
