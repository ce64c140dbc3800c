//! Equivalence constants between coefficient norms and sup-norms.
//!
//! `A_{p,r}^m(n)` is the smallest constant with `|P|_r ≤ A·‖P‖_{ℓ_p}` over all
//! `m`-homogeneous `P` in `n` variables, and `B_{r,p}^m(n)` the smallest with
//! `‖P‖_{ℓ_p} ≤ B·|P|_r`. This module classifies `(1/p, 1/r)` into the regions
//! with known growth exponents, produces certified lower bounds and empirical
//! estimates from the witness families in [`crate::construct`], runs sweeps
//! over `n`, and fits log-log slopes against the predictions.

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{
    best_of_unimodular_capped, greedy_partial_steiner_capped, ones_poly_capped, spread_poly,
    steiner_poly,
};
use crate::error::{Error, Result};
use crate::polycore::{coeff_norm, lambda_count_f64, HomPoly};
use crate::supnorm::{supnorm_lower, supnorm_upper_cert, AscentOptions};
use crate::util::{check_exponent, inv, r_le_conj};
use crate::DEFAULT_CAP;

/// A parameter point `(1/p, 1/r)` for degree `m`.
#[derive(Debug, Clone, Copy)]
pub struct RegionPoint {
    pub inv_p: f64,
    pub inv_r: f64,
    pub m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    Fbar,
    Gbar,
    Unknown,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::A => "A",
            RegionLabel::B => "B",
            RegionLabel::C => "C",
            RegionLabel::D => "D",
            RegionLabel::E => "E",
            RegionLabel::F => "F",
            RegionLabel::Fbar => "Fbar",
            RegionLabel::Gbar => "Gbar",
            RegionLabel::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionStatus {
    /// Matching upper and lower bounds are known.
    Exact,
    /// Only the upper bound is unconditional; the lower matches up to ε.
    UpperOnly,
    /// Valid only under the open interpolation hypothesis.
    Conditional,
    Unknown,
}

impl RegionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionStatus::Exact => "exact",
            RegionStatus::UpperOnly => "upper-only",
            RegionStatus::Conditional => "conditional",
            RegionStatus::Unknown => "unknown",
        }
    }
}

/// Classification outcome: every matching region label (closed regions may
/// share boundaries), the predicted exponent, and its status.
#[derive(Debug, Clone)]
pub struct RegionVerdict {
    pub labels: Vec<RegionLabel>,
    pub exponent: Option<f64>,
    pub status: RegionStatus,
}

/// Exponent of `n` predicted for `A_{p,r}^m(n)` in a given region.
pub fn region_exponent(label: RegionLabel, pt: &RegionPoint) -> Option<f64> {
    let (x, y, m) = (pt.inv_p, pt.inv_r, pt.m as f64);
    match label {
        RegionLabel::A => Some(0.0),
        RegionLabel::B => Some(m * x + y - 1.0),
        RegionLabel::C => Some(m * (x + y - 0.5) - 0.5),
        RegionLabel::D => Some(m * y + x - 1.0),
        RegionLabel::E => Some((m - 1.0) * y),
        RegionLabel::F | RegionLabel::Fbar => Some(y),
        RegionLabel::Gbar => Some(m * (x + y - 0.5) - y),
        RegionLabel::Unknown => None,
    }
}

/// The dividing line between the conditional regions, through `(1/m, 1/2)`
/// and `(1/2, 0)`; only defined for `m ≥ 3`.
fn conditional_line(m: f64, x: f64) -> f64 {
    m / (2.0 - m) * x + m / (2.0 * m - 4.0)
}

/// Classify a point against the closed A-constant regions.
///
/// Exact regions (growth known both ways): (A)–(D) and (F). (E) carries an
/// unconditional upper bound whose exponent is matched from below up to ε.
/// (F̄)/(Ḡ) are the conditional completions for `m ≥ 3`; for `m = 2` the
/// exact regions already tile the whole square.
pub fn classify_region_a(pt: &RegionPoint) -> RegionVerdict {
    let (x, y, m) = (pt.inv_p, pt.inv_r, pt.m as f64);
    let mut labels = Vec::new();

    let in_a = (0.5 <= y && y <= (m + 1.0) / (2.0 * m) - x) || (y <= 0.5 && m * x <= 1.0 - y);
    // The (B) upper bound comes from the Hardy-Littlewood range m ≤ q ≤ 2m,
    // which forces r ≥ 2; the region stops at 1/r = 1/2 where (C) takes over.
    let in_b = 1.0 / (2.0 * m) <= x && x <= 1.0 / m && 1.0 - m * x <= y && y <= 0.5;
    let in_c = x <= 0.5
        && (((m + 1.0) / (2.0 * m) <= y)
            || (0.5 <= y && y <= (m + 1.0) / (2.0 * m) && (m + 1.0) / (2.0 * m) <= x + y));
    let in_d = 0.5 <= x && 1.0 - x <= y;
    let in_e = 0.5 <= x && x <= 1.0 - y;
    let in_f = (m - 1.0) * x <= 1.0 - y && 1.0 / m <= x && x <= 1.0 / (m - 1.0);

    if in_a {
        labels.push(RegionLabel::A);
    }
    if in_b {
        labels.push(RegionLabel::B);
    }
    if in_c {
        labels.push(RegionLabel::C);
    }
    if in_d {
        labels.push(RegionLabel::D);
    }
    if in_e {
        labels.push(RegionLabel::E);
    }
    if in_f {
        labels.push(RegionLabel::F);
    }
    if pt.m >= 3 && (1.0 / m..=0.5).contains(&x) {
        let line = conditional_line(m, x);
        if y <= line {
            labels.push(RegionLabel::Fbar);
        }
        if line <= y && y <= 0.5 {
            labels.push(RegionLabel::Gbar);
        }
    }

    let exact = labels.iter().any(|l| {
        matches!(
            l,
            RegionLabel::A | RegionLabel::B | RegionLabel::C | RegionLabel::D | RegionLabel::F
        )
    });
    let status = if exact {
        RegionStatus::Exact
    } else if labels.contains(&RegionLabel::E) {
        RegionStatus::UpperOnly
    } else if !labels.is_empty() {
        RegionStatus::Conditional
    } else {
        labels.push(RegionLabel::Unknown);
        RegionStatus::Unknown
    };
    // Overlapping labels agree on the exponent (checked in tests); report the
    // strongest claim first: exact regions, then E, then conditionals.
    let order = [
        RegionLabel::A,
        RegionLabel::B,
        RegionLabel::C,
        RegionLabel::D,
        RegionLabel::F,
        RegionLabel::E,
        RegionLabel::Fbar,
        RegionLabel::Gbar,
    ];
    let exponent = order
        .iter()
        .find(|l| labels.contains(l))
        .and_then(|&l| region_exponent(l, pt));
    RegionVerdict {
        labels,
        exponent,
        status,
    }
}

/// Predicted growth exponent of `B_{r,p}^m(n)`: 0 for `r ≤ p'`, otherwise
/// `m(1 − 1/p − 1/r)`. Exact for all `p, r`.
pub fn predicted_b_exponent(m: u32, p: f64, r: f64) -> f64 {
    if r_le_conj(r, p) {
        0.0
    } else {
        m as f64 * (1.0 - inv(p) - inv(r))
    }
}

/// Certified upper bound on `B_{r,p}^m(n)` valid for every polynomial:
/// 1 for `r ≤ p'` (Hölder chain through `|P|_{p'}`), otherwise the
/// dimension-exact factor `|Λ(m,n)|^{1/p' − 1/r}`.
pub fn b_upper_cert(m: u32, n: usize, p: f64, r: f64) -> f64 {
    if r_le_conj(r, p) {
        1.0
    } else {
        lambda_count_f64(m, n).powf((1.0 - inv(p)) - inv(r))
    }
}

/// Crude certified upper bound on `A_{p,r}^m(n)`: every coefficient is
/// bounded by the sup on the torus, so `A ≤ |Λ(m,n)|^{1/r}·n^{m/p}`.
pub fn a_upper_cert_crude(m: u32, n: usize, p: f64, r: f64) -> f64 {
    lambda_count_f64(m, n).powf(inv(r)) * (n as f64).powf(m as f64 * inv(p))
}

/// Witness family used for estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Spread,
    Ones,
    Unimodular,
    Steiner,
    All,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Spread => "spread",
            Family::Ones => "ones",
            Family::Unimodular => "unimodular",
            Family::Steiner => "steiner",
            Family::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spread" => Ok(Family::Spread),
            "ones" => Ok(Family::Ones),
            "unimodular" => Ok(Family::Unimodular),
            "steiner" => Ok(Family::Steiner),
            "all" => Ok(Family::All),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// Family matching the witness used in each region's growth argument:
/// spread for (B), (F), (F̄); unimodular for (C), (D); Steiner for (E), (Ḡ).
pub fn default_family_for_a(m: u32, p: f64, r: f64) -> Family {
    if m < 2 {
        return Family::Ones;
    }
    let verdict = classify_region_a(&RegionPoint {
        inv_p: inv(p),
        inv_r: inv(r),
        m,
    });
    let has = |l: RegionLabel| verdict.labels.contains(&l);
    if has(RegionLabel::B) || has(RegionLabel::F) || has(RegionLabel::Fbar) {
        Family::Spread
    } else if has(RegionLabel::C) || has(RegionLabel::D) {
        Family::Unimodular
    } else if has(RegionLabel::A) {
        Family::Ones
    } else if has(RegionLabel::E) || has(RegionLabel::Gbar) {
        Family::Steiner
    } else {
        Family::All
    }
}

/// Shared knobs for the estimators.
#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    pub seed: u64,
    /// Best-of rounds for unimodular draws and Steiner sign sampling.
    pub rounds: u32,
    pub ascent: AscentOptions,
    pub cap: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            seed: 0,
            rounds: 8,
            ascent: AscentOptions::default(),
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    A,
    B,
}

impl ConstantKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantKind::A => "A",
            ConstantKind::B => "B",
        }
    }
}

/// One estimate of `A_{p,r}^m(n)` or `B_{r,p}^m(n)`.
#[derive(Debug, Clone)]
pub struct ConstantEstimate {
    pub kind: ConstantKind,
    pub m: u32,
    pub n: usize,
    pub p: f64,
    pub r: f64,
    pub family: Family,
    /// Family of the witness that achieved the certified maximum.
    pub witness_family: Family,
    /// Valid lower bound on the true constant.
    pub certified_lower: f64,
    /// Best ratio using attained (not certified) sup-norm values.
    pub empirical: f64,
    /// Certified upper bound on the constant itself.
    pub upper_cert: f64,
    pub seed: u64,
}

fn build_witnesses(
    family: Family,
    m: u32,
    n: usize,
    p: f64,
    opts: &EstimateOptions,
) -> Result<Vec<(Family, HomPoly)>> {
    let mut out = Vec::new();
    let push_spread = |out: &mut Vec<(Family, HomPoly)>| -> Result<()> {
        out.push((Family::Spread, spread_poly(m, n)?));
        Ok(())
    };
    match family {
        Family::Spread => push_spread(&mut out)?,
        Family::Ones => out.push((Family::Ones, ones_poly_capped(m, n, opts.cap)?)),
        Family::Unimodular => out.push((
            Family::Unimodular,
            best_of_unimodular_capped(m, n, p, opts.seed, opts.rounds, &opts.ascent, opts.cap)?,
        )),
        Family::Steiner => {
            let sys = greedy_partial_steiner_capped(m, n, opts.seed, opts.cap)?;
            let (poly, _) = steiner_poly(&sys, p, opts.seed, opts.rounds.max(1), &opts.ascent)?;
            out.push((Family::Steiner, poly));
        }
        Family::All => {
            if n >= m as usize && m >= 1 {
                push_spread(&mut out)?;
            }
            out.push((Family::Ones, ones_poly_capped(m, n, opts.cap)?));
            out.push((
                Family::Unimodular,
                best_of_unimodular_capped(m, n, p, opts.seed, opts.rounds, &opts.ascent, opts.cap)?,
            ));
            if m >= 2 {
                let sys = greedy_partial_steiner_capped(m, n, opts.seed, opts.cap)?;
                let (poly, _) =
                    steiner_poly(&sys, p, opts.seed, opts.rounds.max(1), &opts.ascent)?;
                out.push((Family::Steiner, poly));
            }
        }
    }
    Ok(out)
}

/// Estimate `A_{p,r}^m(n)` from below. The certified bound divides the exact
/// coefficient norm by a certified sup-norm upper bound; the empirical value
/// divides by the attained lower bound instead.
pub fn estimate_a(
    m: u32,
    n: usize,
    p: f64,
    r: f64,
    family: Family,
    opts: &EstimateOptions,
) -> Result<ConstantEstimate> {
    check_exponent("p", p)?;
    check_exponent("r", r)?;
    let witnesses = build_witnesses(family, m, n, p, opts)?;
    let mut certified: Option<(f64, Family)> = None;
    let mut empirical: Option<f64> = None;
    for (fam, poly) in &witnesses {
        let num = coeff_norm(poly, r)?;
        if num == 0.0 {
            continue;
        }
        let (upper, _) = supnorm_upper_cert(poly, p)?;
        if upper > 0.0 {
            let ratio = num / upper;
            if certified.is_none_or(|(best, _)| ratio > best) {
                certified = Some((ratio, *fam));
            }
        }
        let lower = supnorm_lower(poly, p, &opts.ascent)?;
        if lower.value > 0.0 {
            let ratio = num / lower.value;
            if empirical.is_none_or(|best| ratio > best) {
                empirical = Some(ratio);
            }
        }
    }
    let (certified_lower, witness_family) =
        certified.ok_or(Error::ZeroPolynomial("no witness with nonzero norm"))?;
    Ok(ConstantEstimate {
        kind: ConstantKind::A,
        m,
        n,
        p,
        r,
        family,
        witness_family,
        certified_lower,
        empirical: empirical.unwrap_or(certified_lower),
        upper_cert: a_upper_cert_crude(m, n, p, r),
        seed: opts.seed,
    })
}

/// Estimate `B_{r,p}^m(n)` from below: attained sup-norm value over the exact
/// coefficient norm is already certified, so the empirical value coincides.
pub fn estimate_b(
    m: u32,
    n: usize,
    p: f64,
    r: f64,
    family: Family,
    opts: &EstimateOptions,
) -> Result<ConstantEstimate> {
    check_exponent("p", p)?;
    check_exponent("r", r)?;
    let witnesses = build_witnesses(family, m, n, p, opts)?;
    let mut certified: Option<(f64, Family)> = None;
    for (fam, poly) in &witnesses {
        let den = coeff_norm(poly, r)?;
        if den == 0.0 {
            continue;
        }
        let lower = supnorm_lower(poly, p, &opts.ascent)?;
        let ratio = lower.value / den;
        if certified.is_none_or(|(best, _)| ratio > best) {
            certified = Some((ratio, *fam));
        }
    }
    let (certified_lower, witness_family) =
        certified.ok_or(Error::ZeroPolynomial("no witness with nonzero norm"))?;
    Ok(ConstantEstimate {
        kind: ConstantKind::B,
        m,
        n,
        p,
        r,
        family,
        witness_family,
        certified_lower,
        empirical: certified_lower,
        upper_cert: b_upper_cert(m, n, p, r),
        seed: opts.seed,
    })
}

/// One sweep row; failures (typically capacity) are recorded, not fatal.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub n: usize,
    pub estimate: Option<ConstantEstimate>,
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.estimate.is_some()
    }
}

/// Estimate the requested constant for every `n` in `n_list` (strictly
/// increasing). Rows run in parallel; output order follows `n_list`.
pub fn sweep(
    kind: ConstantKind,
    m: u32,
    p: f64,
    r: f64,
    n_list: &[usize],
    family: Family,
    opts: &EstimateOptions,
) -> Result<Vec<SweepRecord>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list.is_empty() {
        return Err(Error::InvalidParameter(
            "n_list must be non-empty and strictly increasing".into(),
        ));
    }
    Ok(n_list
        .par_iter()
        .map(|&n| {
            let res = match kind {
                ConstantKind::A => estimate_a(m, n, p, r, family, opts),
                ConstantKind::B => estimate_b(m, n, p, r, family, opts),
            };
            match res {
                Ok(est) => SweepRecord {
                    n,
                    estimate: Some(est),
                    error: None,
                },
                Err(err) => SweepRecord {
                    n,
                    estimate: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect())
}

pub const SWEEP_CSV_HEADER: &str =
    "kind,m,n,p,r,family,certified_lower,empirical,upper_cert,seed,status";

impl ConstantEstimate {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},ok",
            self.kind.as_str(),
            self.m,
            self.n,
            self.p,
            self.r,
            self.family.as_str(),
            self.certified_lower,
            self.empirical,
            self.upper_cert,
            self.seed
        )
    }
}

/// Render sweep records as CSV (header plus one line per row, `n` order).
pub fn sweep_to_csv(
    kind: ConstantKind,
    m: u32,
    p: f64,
    r: f64,
    family: Family,
    seed: u64,
    records: &[SweepRecord],
) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for rec in records {
        match &rec.estimate {
            Some(est) => {
                out.push_str(&est.to_csv_row());
                out.push('\n');
            }
            None => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},,,,{},failed\n",
                    kind.as_str(),
                    m,
                    rec.n,
                    p,
                    r,
                    family.as_str(),
                    seed
                ));
            }
        }
    }
    out
}

/// Least-squares fit of `log(value)` against `log(n)`.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    #[serde(skip)]
    pub sample: Vec<(f64, f64)>,
}

/// Fit the growth exponent of `(n, value)` observations; needs at least 3
/// samples with positive values.
pub fn fit_exponent(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(samples.len()));
    }
    if samples
        .iter()
        .any(|&(n, v)| !(n.is_finite() && n > 0.0 && v.is_finite() && v > 0.0))
    {
        return Err(Error::InvalidParameter(
            "fit_exponent needs positive n and values".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let len = logs.len() as f64;
    let mean_x = logs.iter().map(|&(x, _)| x).sum::<f64>() / len;
    let mean_y = logs.iter().map(|&(_, y)| y).sum::<f64>() / len;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in &logs {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "fit_exponent needs at least two distinct n values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        sample: samples.to_vec(),
    })
}
