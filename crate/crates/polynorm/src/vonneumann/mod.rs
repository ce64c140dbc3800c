//! Polynomial von Neumann inequality probes on commuting operator tuples.
//!
//! The experiments evaluate `P(T_1,…,T_n)` for tuples normalized by either
//! `(Ip)`: `Σ ‖T_i‖^p ≤ 1`, or `(IIp)`: `‖Σ β_i T_i‖ ≤ ‖β‖_{p'}` for all `β`,
//! and compare the operator norm against sup-norm certificates of `P`, giving
//! certified lower bounds on the best constants `c(n)` and `d(n)`.

mod matrix;

pub use matrix::{opnorm, opnorm_with_vector, CMatrix, OpNorm};

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polycore::HomPoly;
use crate::supnorm::{supnorm_lower, supnorm_upper_cert, AscentOptions};
use crate::util::{check_exponent, complex_gaussian, conjugate, inv, seeded_rng};

const COMMUTE_TOL: f64 = 1e-10;
const OPNORM_TOL: f64 = 1e-10;

/// `n` commuting operators on a `d`-dimensional space, with provenance.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    pub n: usize,
    pub d: usize,
    pub ops: Vec<CMatrix>,
    pub family: String,
    pub seed: u64,
}

impl OperatorTuple {
    fn new(ops: Vec<CMatrix>, family: &str, seed: u64) -> Self {
        let n = ops.len();
        let d = ops.first().map_or(0, |m| m.dim());
        OperatorTuple {
            n,
            d,
            ops,
            family: family.to_string(),
            seed,
        }
    }

    /// Largest scaled commutator residual
    /// `‖T_iT_j − T_jT_i‖ / max(1, ‖T_i‖‖T_j‖)` over all pairs.
    pub fn commutator_residual(&self) -> f64 {
        let norms: Vec<f64> = self.ops.iter().map(|t| opnorm(t, OPNORM_TOL).value).collect();
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let comm = self.ops[i].mul(&self.ops[j]).sub(&self.ops[j].mul(&self.ops[i]));
                let res = opnorm(&comm, 1e-8).value / (norms[i] * norms[j]).max(1.0);
                worst = worst.max(res);
            }
        }
        worst
    }

    pub fn check_commuting(&self) -> Result<()> {
        let norms: Vec<f64> = self.ops.iter().map(|t| opnorm(t, OPNORM_TOL).value).collect();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let comm = self.ops[i].mul(&self.ops[j]).sub(&self.ops[j].mul(&self.ops[i]));
                let res = opnorm(&comm, 1e-8).value;
                if res > COMMUTE_TOL * (norms[i] * norms[j]).max(1.0) {
                    return Err(Error::NonCommuting {
                        i,
                        j,
                        residual: res,
                    });
                }
            }
        }
        Ok(())
    }

    /// Archive form: header `n d family seed`, then one block per operator
    /// (d rows of d `re im` pairs), blocks separated by blank lines.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {} {}", self.n, self.d, self.family, self.seed);
        for op in &self.ops {
            for i in 0..self.d {
                let row: Vec<String> = (0..self.d)
                    .map(|j| format!("{} {}", op[(i, j)].re, op[(i, j)].im))
                    .collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter_map(|(idx, raw)| {
            let content = raw.trim();
            if content.is_empty() {
                None
            } else {
                Some((idx + 1, content))
            }
        });
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing tuple header".into(),
        })?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: "expected header \"n d family seed\"".into(),
            });
        }
        let n: usize = tokens[0].parse().map_err(|_| Error::Parse {
            line,
            msg: "bad n".into(),
        })?;
        let d: usize = tokens[1].parse().map_err(|_| Error::Parse {
            line,
            msg: "bad d".into(),
        })?;
        let family = tokens[2].to_string();
        let seed: u64 = tokens[3].parse().map_err(|_| Error::Parse {
            line,
            msg: "bad seed".into(),
        })?;
        let mut ops = Vec::with_capacity(n);
        for _ in 0..n {
            let mut rows = Vec::with_capacity(d);
            for _ in 0..d {
                let (line, content) = lines.next().ok_or(Error::Parse {
                    line: 0,
                    msg: "truncated operator block".into(),
                })?;
                let nums: Vec<&str> = content.split_whitespace().collect();
                if nums.len() != 2 * d {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected {} numbers in operator row", 2 * d),
                    });
                }
                let mut row = Vec::with_capacity(d);
                for pair in nums.chunks(2) {
                    let re: f64 = pair[0].parse().map_err(|_| Error::Parse {
                        line,
                        msg: "bad entry".into(),
                    })?;
                    let im: f64 = pair[1].parse().map_err(|_| Error::Parse {
                        line,
                        msg: "bad entry".into(),
                    })?;
                    row.push(Complex64::new(re, im));
                }
                rows.push(row);
            }
            ops.push(CMatrix::from_rows(rows));
        }
        Ok(OperatorTuple {
            n,
            d,
            ops,
            family,
            seed,
        })
    }
}

/// The two tuple normalizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Ip,
    IIp,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Ip => "Ip",
            Condition::IIp => "IIp",
        }
    }
}

/// Outcome of a normalization check. For `(IIp)` the value is a lower
/// estimate of the sup, so `satisfied` means "no violation found".
#[derive(Debug, Clone, Copy)]
pub struct ConditionReport {
    pub condition: Condition,
    pub p: f64,
    pub value: f64,
    pub satisfied: bool,
}

const CONDITION_SLACK: f64 = 1e-8;

/// `T_i = c_i·N` with `N` the `d×d` forward shift: the canonical commuting
/// family. `P(T) = P(c)·N^m`, so evaluation has a closed form; requires
/// `d ≥ m+1` so that `N^m ≠ 0`.
pub fn gen_nilpotent_tuple(m: u32, n: usize, c: &[Complex64], d: usize) -> Result<OperatorTuple> {
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    if d <= m as usize {
        return Err(Error::InvalidParameter(format!(
            "nilpotent tuple needs d ≥ m+1 (N^m ≠ 0), got d = {d}, m = {m}"
        )));
    }
    let shift = CMatrix::forward_shift(d);
    let ops = c.iter().map(|&ci| shift.scale(ci)).collect();
    Ok(OperatorTuple::new(ops, "nilpotent", 0))
}

/// Simultaneously diagonal tuple: `T_i = diag_k (z^{(k)}_i)` over the given
/// points, so `‖P(T)‖ = max_k |P(z^{(k)})|` exactly.
pub fn gen_diagonal_tuple(points: &[Vec<Complex64>]) -> Result<OperatorTuple> {
    let k = points.len();
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let n = points[0].len();
    if points.iter().any(|z| z.len() != n) {
        return Err(Error::InvalidParameter(
            "all points must have the same length".into(),
        ));
    }
    let mut ops = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = CMatrix::zeros(k);
        for (row, z) in points.iter().enumerate() {
            t[(row, row)] = z[i];
        }
        ops.push(t);
    }
    Ok(OperatorTuple::new(ops, "diagonal", 0))
}

/// Richer commuting family: `T_i = q_i(N)` for random polynomials `q_i`
/// without constant term in one `d×d` forward shift, rescaled so the `(Ip)`
/// value lands at `1 − 1e−9`.
pub fn gen_shiftpoly_tuple(m: u32, n: usize, d: usize, p: f64, seed: u64) -> Result<OperatorTuple> {
    check_exponent("p", p)?;
    if d <= m as usize {
        return Err(Error::InvalidParameter(format!(
            "shiftpoly tuple needs d ≥ m+1, got d = {d}, m = {m}"
        )));
    }
    let shift = CMatrix::forward_shift(d);
    let powers: Vec<CMatrix> = (1..d as u32).map(|k| shift.pow(k)).collect();
    let mut ops = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = seeded_rng(seed, i as u64);
        let mut t = CMatrix::zeros(d);
        for power in &powers {
            t = t.add(&power.scale(complex_gaussian(&mut rng)));
        }
        ops.push(t);
    }
    // Normalize Σ‖T_i‖^p to 1 − 1e−9 (max for p = ∞).
    let norms: Vec<f64> = ops.iter().map(|t| opnorm(t, OPNORM_TOL).value).collect();
    let raw = if p.is_infinite() {
        norms.iter().cloned().fold(0.0, f64::max)
    } else {
        norms.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    };
    if raw == 0.0 {
        return Err(Error::ZeroPolynomial("shiftpoly tuple degenerated"));
    }
    let target = if p.is_infinite() {
        1.0 - 1e-9
    } else {
        (1.0f64 - 1e-9).powf(1.0 / p)
    };
    let factor = Complex64::new(target / raw, 0.0);
    let ops = ops.into_iter().map(|t| t.scale(factor)).collect();
    Ok(OperatorTuple::new(ops, "shiftpoly", seed))
}

/// Verify `(Ip)` exactly through per-operator norms, or probe `(IIp)` by
/// multi-start alternating maximization of `‖Σ β_i T_i‖` over `‖β‖_{p'} = 1`.
pub fn check_condition(tuple: &OperatorTuple, which: Condition, p: f64) -> Result<ConditionReport> {
    check_exponent("p", p)?;
    let value = match which {
        Condition::Ip => {
            let norms = tuple.ops.iter().map(|t| opnorm(t, OPNORM_TOL).value);
            if p.is_infinite() {
                norms.fold(0.0, f64::max)
            } else {
                norms.map(|v| v.powf(p)).sum::<f64>()
            }
        }
        Condition::IIp => iip_estimate(tuple, p),
    };
    Ok(ConditionReport {
        condition: which,
        p,
        value,
        satisfied: value <= 1.0 + CONDITION_SLACK,
    })
}

/// Lower estimate of `sup { ‖Σ β_i T_i‖ : ‖β‖_{p'} ≤ 1 }` by alternating
/// between the top singular pair of the current combination and the Hölder
/// maximizer over `β`; monotone, so it converges, and any iterate certifies.
fn iip_estimate(tuple: &OperatorTuple, p: f64) -> f64 {
    let n = tuple.n;
    if n == 0 || tuple.d == 0 {
        return 0.0;
    }
    let pprime = conjugate(p);
    let mut best = 0.0f64;
    for start in 0..8u64 {
        let mut rng = seeded_rng(0xb7a11ce ^ start, 0);
        let mut beta: Vec<Complex64> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
        normalize_lp(&mut beta, pprime);
        let mut value = 0.0f64;
        for _ in 0..100 {
            let mut combo = CMatrix::zeros(tuple.d);
            for (b, t) in beta.iter().zip(&tuple.ops) {
                combo = combo.add(&t.scale(*b));
            }
            let (norm, v) = opnorm_with_vector(&combo, OPNORM_TOL);
            if norm.value <= value * (1.0 + 1e-10) {
                value = value.max(norm.value);
                break;
            }
            value = norm.value;
            // u = Mv/σ; w_i = u^H T_i v, then β ← Hölder maximizer of |⟨β,w⟩|.
            let mv = combo.apply(&v);
            let sigma = mv.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if sigma == 0.0 {
                break;
            }
            let u: Vec<Complex64> = mv.iter().map(|x| x / sigma).collect();
            let w: Vec<Complex64> = tuple
                .ops
                .iter()
                .map(|t| {
                    let tv = t.apply(&v);
                    u.iter()
                        .zip(&tv)
                        .map(|(ui, tvi)| ui.conj() * tvi)
                        .sum::<Complex64>()
                })
                .collect();
            match holder_maximizer(&w, p) {
                Some(next) => beta = next,
                None => break,
            }
        }
        best = best.max(value);
    }
    best
}

/// `argmax { |Σ β_i w_i| : ‖β‖_{p'} ≤ 1 }`, attaining `‖w‖_p`.
fn holder_maximizer(w: &[Complex64], p: f64) -> Option<Vec<Complex64>> {
    let norm_p = if p.is_infinite() {
        w.iter().map(|x| x.norm()).fold(0.0, f64::max)
    } else {
        w.iter().map(|x| x.norm().powf(p)).sum::<f64>().powf(inv(p))
    };
    if norm_p == 0.0 {
        return None;
    }
    if p.is_infinite() {
        // p' = 1: all mass on the largest |w_k|.
        let k = (0..w.len())
            .max_by(|&a, &b| w[a].norm().partial_cmp(&w[b].norm()).unwrap())
            .unwrap();
        let mut beta = vec![Complex64::new(0.0, 0.0); w.len()];
        beta[k] = w[k].conj() / w[k].norm();
        return Some(beta);
    }
    if p == 1.0 {
        // p' = ∞: phase alignment everywhere.
        return Some(
            w.iter()
                .map(|x| {
                    if x.norm() == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        x.conj() / x.norm()
                    }
                })
                .collect(),
        );
    }
    Some(
        w.iter()
            .map(|x| {
                if x.norm() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    x.conj() * x.norm().powf(p - 2.0) / norm_p.powf(p - 1.0)
                }
            })
            .collect(),
    )
}

fn normalize_lp(v: &mut [Complex64], p: f64) {
    let norm = if p.is_infinite() {
        v.iter().map(|x| x.norm()).fold(0.0, f64::max)
    } else {
        v.iter().map(|x| x.norm().powf(p)).sum::<f64>().powf(inv(p))
    };
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// `P(T) = Σ_α a_α ∏_i T_i^{α_i}` (well-defined by commutativity, which is
/// checked first; powers use repeated squaring).
pub fn eval_poly_on_tuple(poly: &HomPoly, tuple: &OperatorTuple) -> Result<CMatrix> {
    if poly.nvars() != tuple.n {
        return Err(Error::DimensionMismatch {
            expected: tuple.n,
            got: poly.nvars(),
        });
    }
    tuple.check_commuting()?;
    let mut acc = CMatrix::zeros(tuple.d);
    for (alpha, &c) in poly.terms() {
        let mut term = CMatrix::identity(tuple.d);
        for (i, &e) in alpha.entries().iter().enumerate() {
            if e > 0 {
                term = term.mul(&tuple.ops[i].pow(e));
            }
        }
        acc = acc.add(&term.scale(c));
    }
    Ok(acc)
}

/// Which constant an experiment probes: `c(n)` under `(Ip)`, `d(n)` under `(IIp)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VnMode {
    C,
    D,
}

impl VnMode {
    pub fn condition(&self) -> Condition {
        match self {
            VnMode::C => Condition::Ip,
            VnMode::D => Condition::IIp,
        }
    }
}

/// One ratio record: `‖P(T)‖` against sup-norm certificates of `P` on `ℓ_q`.
#[derive(Debug, Clone)]
pub struct VnRatioRecord {
    pub family: String,
    pub m: u32,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub q: f64,
    /// `‖P(T)‖ / upper_cert(P, q)`, a certified lower bound on c(n) or d(n).
    pub ratio_certified: f64,
    /// `‖P(T)‖ / supnorm_lower(P, q)`, close to the true ratio.
    pub ratio_empirical: f64,
    /// Value of the checked normalization condition.
    pub condition_value: f64,
}

pub const VN_CSV_HEADER: &str =
    "family,m,n,d,p,q,ratio_certified,ratio_empirical,Ip_value";

impl VnRatioRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.family,
            self.m,
            self.n,
            self.d,
            self.p,
            self.q,
            self.ratio_certified,
            self.ratio_empirical,
            self.condition_value
        )
    }
}

/// Evaluate the von Neumann ratio of `P` on a tuple normalized for `p`.
/// Refuses tuples that fail the mode's condition or do not commute.
pub fn vn_ratio(
    poly: &HomPoly,
    tuple: &OperatorTuple,
    q: f64,
    p: f64,
    mode: VnMode,
    opts: &AscentOptions,
) -> Result<VnRatioRecord> {
    check_exponent("q", q)?;
    let report = check_condition(tuple, mode.condition(), p)?;
    if !report.satisfied {
        return Err(Error::ConditionViolated {
            condition: report.condition.as_str().to_string(),
            value: report.value,
        });
    }
    let value = opnorm(&eval_poly_on_tuple(poly, tuple)?, OPNORM_TOL).value;
    let (upper, _) = supnorm_upper_cert(poly, q)?;
    let lower = supnorm_lower(poly, q, opts)?.value;
    let ratio_certified = if upper > 0.0 { value / upper } else { 0.0 };
    let ratio_empirical = if lower > 0.0 { value / lower } else { 0.0 };
    Ok(VnRatioRecord {
        family: tuple.family.clone(),
        m: poly.degree(),
        n: tuple.n,
        d: tuple.d,
        p,
        q,
        ratio_certified,
        ratio_empirical,
        condition_value: report.value,
    })
}
