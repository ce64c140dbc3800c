//! Sparse homogeneous polynomials over `C^n` and their coefficient norms.
//!
//! An `m`-homogeneous polynomial is stored as a finite map from multi-indices
//! `α` (non-negative integer vectors of length `n` with `|α| = m`) to complex
//! coefficients. Multi-indices are ordered graded-colexicographically, so all
//! iteration is deterministic and serialization is canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;

use crate::error::{Error, Result};
use crate::util::{big_to_f64, binomial_capped, check_exponent};
use crate::DEFAULT_CAP;

/// Exponent vector `α = (α_1, …, α_n)`; the degree is `|α| = Σ α_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Number of variables `n`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `true` if all entries are 0 or 1 (square-free monomial).
    pub fn is_square_free(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }

    /// Variables with a positive exponent (0-based).
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }

    /// Unit index `e_i` (0-based `i`) in `n` variables.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }
}

/// Graded colexicographic order: degree first, then the last differing entry
/// decides. This makes `(2,0) < (1,1) < (0,2)` in degree 2.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.len().cmp(&other.0.len()))
            .then_with(|| {
                for (a, b) in self.0.iter().zip(other.0.iter()).rev() {
                    match a.cmp(b) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Non-decreasing tuple `j = (j_1 ≤ … ≤ j_m)` of variable indices in `{1..n}`.
/// Bijects with a [`MultiIndex`] through occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexTuple(Vec<u32>);

impl IndexTuple {
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "index tuple must be non-decreasing".into(),
            ));
        }
        if indices.contains(&0) {
            return Err(Error::InvalidParameter(
                "index tuple entries are 1-based".into(),
            ));
        }
        Ok(IndexTuple(indices))
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn to_multi_index(&self, n: usize) -> Result<MultiIndex> {
        let mut entries = vec![0u32; n];
        for &j in &self.0 {
            if j as usize > n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: j as usize,
                });
            }
            entries[j as usize - 1] += 1;
        }
        Ok(MultiIndex(entries))
    }

    pub fn from_multi_index(alpha: &MultiIndex) -> Self {
        let mut v = Vec::with_capacity(alpha.degree() as usize);
        for (i, &e) in alpha.entries().iter().enumerate() {
            for _ in 0..e {
                v.push(i as u32 + 1);
            }
        }
        IndexTuple(v)
    }
}

/// Which coefficient-side norm to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFlavor {
    /// `|P|_r`, the plain `ℓ_r` norm of the coefficients.
    Plain,
    /// `[P]_r`, the Bombieri norm (finite `r` only).
    Bombieri,
    /// `|T|_r`, the coefficient norm of the symmetric multilinear form.
    SymmetricForm,
}

/// A coefficient norm selector: exponent plus flavor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffNormKind {
    pub r: f64,
    pub flavor: NormFlavor,
}

impl CoeffNormKind {
    pub fn new(r: f64, flavor: NormFlavor) -> Result<Self> {
        check_exponent("r", r)?;
        Ok(CoeffNormKind { r, flavor })
    }

    pub fn compute(&self, poly: &HomPoly) -> Result<f64> {
        match self.flavor {
            NormFlavor::Plain => coeff_norm(poly, self.r),
            NormFlavor::Bombieri => bombieri_norm(poly, self.r),
            NormFlavor::SymmetricForm => symform_coeff_norm(poly, self.r),
        }
    }
}

/// Sparse `m`-homogeneous polynomial in `n` complex variables.
///
/// Zero coefficients are never stored, so two polynomials are equal iff their
/// maps are equal; the zero polynomial has an empty map.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoly {
    m: u32,
    n: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl HomPoly {
    /// The zero polynomial of degree `m` in `n` variables.
    pub fn zero(m: u32, n: usize) -> Self {
        HomPoly {
            m,
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs<I>(m: u32, n: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut poly = HomPoly::zero(m, n);
        for (alpha, c) in coeffs {
            if poly.coeffs.contains_key(&alpha) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate multi-index {:?}",
                    alpha.entries()
                )));
            }
            poly.set_coeff(alpha, c)?;
        }
        Ok(poly)
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Set `a_α = c`, dropping the entry when `c = 0` to keep the sparse form
    /// canonical. Rejects indices of the wrong length or degree.
    pub fn set_coeff(&mut self, alpha: MultiIndex, c: Complex64) -> Result<()> {
        if alpha.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: alpha.len(),
            });
        }
        if alpha.degree() != self.m {
            return Err(Error::InvalidParameter(format!(
                "multi-index {:?} has degree {}, polynomial has degree {}",
                alpha.entries(),
                alpha.degree(),
                self.m
            )));
        }
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
        Ok(())
    }

    /// Terms in canonical (graded colexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// New polynomial with every coefficient passed through `f` (used for
    /// sign flips and scaling). Zero results are dropped.
    pub fn map_coeffs(&self, mut f: impl FnMut(&MultiIndex, Complex64) -> Complex64) -> HomPoly {
        let mut out = HomPoly::zero(self.m, self.n);
        for (alpha, &c) in &self.coeffs {
            let v = f(alpha, c);
            if v != Complex64::new(0.0, 0.0) {
                out.coeffs.insert(alpha.clone(), v);
            }
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> HomPoly {
        self.map_coeffs(|_, a| a * c)
    }

    /// Evaluate `P(z) = Σ_α a_α z^α`.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, &c) in &self.coeffs {
            let mut term = c;
            for (zi, &e) in z.iter().zip(alpha.entries()) {
                for _ in 0..e {
                    term *= zi;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// All first partial derivatives `∂P/∂z_j`, each `(m−1)`-homogeneous.
    pub fn partials(&self) -> Vec<HomPoly> {
        let mut out: Vec<HomPoly> = (0..self.n)
            .map(|_| HomPoly::zero(self.m.saturating_sub(1), self.n))
            .collect();
        for (alpha, &c) in &self.coeffs {
            for j in alpha.support() {
                let e = alpha.entries()[j];
                let mut entries = alpha.entries().to_vec();
                entries[j] -= 1;
                out[j]
                    .coeffs
                    .insert(MultiIndex(entries), c * Complex64::new(e as f64, 0.0));
            }
        }
        out
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// All multi-indices of degree `m` in `n` variables, in graded colexicographic
/// order, using the default capacity cap.
pub fn enumerate_lambda(m: u32, n: usize) -> Result<Vec<MultiIndex>> {
    enumerate_lambda_capped(m, n, DEFAULT_CAP)
}

/// As [`enumerate_lambda`], with an explicit cap on `C(n+m−1, m)`.
pub fn enumerate_lambda_capped(m: u32, n: usize, cap: u64) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n ≥ 1 variables".into()));
    }
    let count = lambda_count_capped(m, n, cap)?;
    let mut out = Vec::with_capacity(count as usize);
    let mut entries = vec![0u32; n];
    fill_colex(&mut out, &mut entries, n, m);
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

/// `|Λ(m,n)| = C(n+m−1, m)`, checked against `cap`.
pub fn lambda_count_capped(m: u32, n: usize, cap: u64) -> Result<u64> {
    binomial_capped(n as u64 + m as u64 - 1, m as u64, cap, "|Λ(m,n)|")
}

/// `|Λ(m,n)|` as a float (no cap; used for certificates, not materialization).
pub fn lambda_count_f64(m: u32, n: usize) -> f64 {
    big_to_f64(&crate::util::big_binomial(
        n as u64 + m as u64 - 1,
        m as u64,
    ))
}

// Colex order comes out of recursing on the last coordinate, slowest first.
fn fill_colex(out: &mut Vec<MultiIndex>, entries: &mut Vec<u32>, vars: usize, rem: u32) {
    if vars == 1 {
        entries[0] = rem;
        out.push(MultiIndex(entries.clone()));
        entries[0] = 0;
        return;
    }
    for last in 0..=rem {
        entries[vars - 1] = last;
        fill_colex(out, entries, vars - 1, rem - last);
    }
    entries[vars - 1] = 0;
}

/// Number of index tuples of type `α`, i.e. `m!/α!`, exactly.
pub fn multiplicity(alpha: &MultiIndex) -> BigUint {
    let mut num = BigUint::one();
    for k in 2..=alpha.degree() as u64 {
        num *= BigUint::from(k);
    }
    let mut den = BigUint::one();
    for &e in alpha.entries() {
        for k in 2..=e as u64 {
            den *= BigUint::from(k);
        }
    }
    num / den
}

/// `|P|_r = (Σ_α |a_α|^r)^{1/r}`; for `r = ∞` the max coefficient modulus.
pub fn coeff_norm(poly: &HomPoly, r: f64) -> Result<f64> {
    check_exponent("r", r)?;
    if r.is_infinite() {
        return Ok(poly.max_coeff_modulus());
    }
    let sum: f64 = poly.coeffs.values().map(|c| c.norm().powf(r)).sum();
    Ok(sum.powf(1.0 / r))
}

/// Bombieri norm `[P]_r = (Σ_α (α!/m!)^{r−1} |a_α|^r)^{1/r}`, finite `r` only.
pub fn bombieri_norm(poly: &HomPoly, r: f64) -> Result<f64> {
    check_exponent("r", r)?;
    if r.is_infinite() {
        return Err(Error::InvalidParameter(
            "Bombieri norm is undefined at r = inf".into(),
        ));
    }
    let mut sum = 0.0;
    for (alpha, c) in &poly.coeffs {
        // α!/m! = 1/multiplicity(α), computed exactly before rounding once.
        let weight = 1.0 / big_to_f64(&multiplicity(alpha));
        sum += weight.powf(r - 1.0) * c.norm().powf(r);
    }
    Ok(sum.powf(1.0 / r))
}

/// Coefficient norm `|T|_r` of the unique symmetric `m`-linear form with
/// `P(x) = T(x,…,x)`, computed without materializing `T`: the tuple of type
/// `α` carries the coefficient `a_α·α!/m!` with multiplicity `m!/α!`. For
/// finite `r` this equals [`bombieri_norm`] identically.
pub fn symform_coeff_norm(poly: &HomPoly, r: f64) -> Result<f64> {
    check_exponent("r", r)?;
    if r.is_infinite() {
        let max = poly
            .coeffs
            .iter()
            .map(|(alpha, c)| c.norm() / big_to_f64(&multiplicity(alpha)))
            .fold(0.0, f64::max);
        return Ok(max);
    }
    let mut sum = 0.0;
    for (alpha, c) in &poly.coeffs {
        let mult = big_to_f64(&multiplicity(alpha));
        sum += mult * (c.norm() / mult).powf(r);
    }
    Ok(sum.powf(1.0 / r))
}

/// Canonical text form: header `m n`, then one `α_1 … α_n re im` line per
/// term in graded colexicographic order.
pub fn serialize_poly(poly: &HomPoly) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", poly.m, poly.n);
    for (alpha, c) in &poly.coeffs {
        for &e in alpha.entries() {
            let _ = write!(out, "{} ", e);
        }
        let _ = writeln!(out, "{} {}", c.re, c.im);
    }
    out
}

/// Parse the text format produced by [`serialize_poly`]. Blank lines and
/// `#` comments are skipped; duplicate multi-indices are an error.
pub fn parse_poly(text: &str) -> Result<HomPoly> {
    let mut header: Option<(u32, usize)> = None;
    let mut poly = HomPoly::zero(0, 0);
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
                        msg: format!("expected header \"m n\", got {} tokens", tokens.len()),
                    });
                }
                let m = parse_token::<u32>(tokens[0], line, "degree m")?;
                let n = parse_token::<usize>(tokens[1], line, "variable count n")?;
                if n == 0 {
                    return Err(Error::Parse {
                        line,
                        msg: "need n ≥ 1 variables".into(),
                    });
                }
                header = Some((m, n));
                poly = HomPoly::zero(m, n);
            }
            Some((m, n)) => {
                if tokens.len() != n + 2 {
                    return Err(Error::Parse {
                        line,
                        msg: format!(
                            "expected {} exponents plus re im, got {} tokens",
                            n,
                            tokens.len()
                        ),
                    });
                }
                let mut entries = Vec::with_capacity(n);
                for t in &tokens[..n] {
                    entries.push(parse_token::<u32>(t, line, "exponent")?);
                }
                let alpha = MultiIndex(entries);
                if alpha.degree() != m {
                    return Err(Error::Parse {
                        line,
                        msg: format!("multi-index degree {} ≠ m = {}", alpha.degree(), m),
                    });
                }
                if poly.coeffs.contains_key(&alpha) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("duplicate multi-index {:?}", alpha.entries()),
                    });
                }
                let re = parse_token::<f64>(tokens[n], line, "re")?;
                let im = parse_token::<f64>(tokens[n + 1], line, "im")?;
                let c = Complex64::new(re, im);
                if c != Complex64::new(0.0, 0.0) {
                    poly.coeffs.insert(alpha, c);
                }
            }
        }
    }
    if header.is_none() {
        return Err(Error::Parse {
            line: 0,
            msg: "missing header line \"m n\"".into(),
        });
    }
    Ok(poly)
}

fn parse_token<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from {token:?}"),
    })
}
