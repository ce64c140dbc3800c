//! Command implementations.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polynorm::constants::{
    classify_region_a, default_family_for_a, estimate_a, estimate_b, fit_exponent,
    sweep as run_sweep, sweep_to_csv, ConstantKind, EstimateOptions, Family, RegionPoint,
};
use polynorm::construct::{
    best_of_unimodular_capped, greedy_partial_steiner_capped, ones_poly_capped,
    random_unimodular_capped, spread_poly, steiner_poly,
};
use polynorm::polycore::{
    bombieri_norm, coeff_norm, enumerate_lambda_capped, parse_poly, serialize_poly,
    symform_coeff_norm, HomPoly,
};
use polynorm::supnorm::{estimate as supnorm_estimate, supnorm_upper_cert, AscentOptions};
use polynorm::uncond::{bayart_check, chi_lower, predicted_chi_exponent};
use polynorm::vonneumann::{
    gen_diagonal_tuple, gen_nilpotent_tuple, gen_shiftpoly_tuple, vn_ratio, VnMode, VN_CSV_HEADER,
};

use crate::config::{
    parse_bool, parse_ext_real, parse_f64, parse_n_list, parse_u32, parse_u64, parse_usize,
    Config,
};
use crate::{
    AscentArgs, BayartArgs, CliError, CommonArgs, ConstructArgs, EstimateArgs, FitArgs, NormsArgs,
    RegionsArgs, SweepArgs, VnArgs,
};

struct Common {
    out: Option<PathBuf>,
    seed: u64,
    cap: u64,
}

fn resolve_common(args: &CommonArgs, cfg: &Config, section: &str) -> Result<Common, CliError> {
    let out = cfg.resolve_optional(section, "out", args.out.clone(), |s| {
        Ok(PathBuf::from(s))
    })?;
    let seed = cfg.resolve(section, "seed", args.seed, parse_u64, 0)?;
    let env_cap = std::env::var("POLYNORM_CAP")
        .ok()
        .and_then(|v| v.parse::<u64>().ok());
    let cap = cfg.resolve(
        section,
        "cap",
        args.cap,
        parse_u64,
        env_cap.unwrap_or(polynorm::DEFAULT_CAP),
    )?;
    Ok(Common { out, seed, cap })
}

fn resolve_ascent(
    args: &AscentArgs,
    cfg: &Config,
    section: &str,
    seed: u64,
) -> Result<AscentOptions, CliError> {
    let defaults = AscentOptions::default();
    let starts = cfg.resolve(section, "starts", args.starts, parse_u32, defaults.starts)?;
    let max_iters = cfg.resolve(
        section,
        "max-iters",
        args.max_iters,
        parse_u32,
        defaults.max_iters,
    )?;
    Ok(AscentOptions {
        starts,
        max_iters,
        seed,
        ..defaults
    })
}

/// Write `content` to `--out` (with a timestamped `.meta` sidecar) or stdout.
/// Data files carry no timestamps, so reruns are byte-identical.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let args: Vec<String> = std::env::args().collect();
            let meta = format!("created_unix {now}\ncommand {}\n", args.join(" "));
            std::fs::write(sidecar_path(path), meta)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn sidecar_path(path: &std::path::Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".meta");
    PathBuf::from(s)
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Seeded dense polynomial with standard complex Gaussian coefficients.
fn gaussian_poly(m: u32, n: usize, seed: u64, cap: u64) -> Result<HomPoly, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut poly = HomPoly::zero(m, n);
    for alpha in enumerate_lambda_capped(m, n, cap)? {
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let c = Complex64::from_polar((-u.ln()).sqrt(), theta);
        poly.set_coeff(alpha, c)?;
    }
    Ok(poly)
}

pub fn norms(args: &NormsArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "norms";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let poly_path = cfg.resolve_required(SECTION, "poly", args.poly.clone(), |s| {
        Ok(PathBuf::from(s))
    })?;
    let p = cfg.resolve_required(SECTION, "p", args.p, parse_ext_real)?;
    let r = cfg.resolve_required(SECTION, "r", args.r, parse_ext_real)?;
    let json = cfg.resolve(SECTION, "json", args.json.then_some(true), parse_bool, false)?;
    let ascent = resolve_ascent(&args.ascent, cfg, SECTION, common.seed)?;
    cfg.finish(SECTION)?;

    let text = std::fs::read_to_string(&poly_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", poly_path.display())))?;
    let poly = parse_poly(&text)?;

    if json {
        let est = supnorm_estimate(&poly, p, &ascent)?;
        return emit(&common.out, &format!("{}\n", est.to_jsonl()));
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "poly m {} n {} terms {}",
        poly.degree(),
        poly.nvars(),
        poly.term_count()
    );
    let _ = writeln!(report, "coeff_norm {}", fmt_f64(coeff_norm(&poly, r)?));
    match bombieri_norm(&poly, r) {
        Ok(v) => {
            let _ = writeln!(report, "bombieri_norm {}", fmt_f64(v));
        }
        Err(_) => {
            let _ = writeln!(report, "bombieri_norm undefined (r = inf)");
        }
    }
    let _ = writeln!(
        report,
        "symform_norm {}",
        fmt_f64(symform_coeff_norm(&poly, r)?)
    );
    let est = supnorm_estimate(&poly, p, &ascent)?;
    let _ = writeln!(report, "supnorm_lower {}", fmt_f64(est.lower));
    let _ = writeln!(report, "supnorm_upper {}", fmt_f64(est.upper));
    let methods: Vec<&str> = est.methods.iter().map(|m| m.as_str()).collect();
    let _ = writeln!(report, "methods {}", methods.join(","));
    let conj = if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    };
    let _ = writeln!(report, "cert_dual {}", fmt_f64(coeff_norm(&poly, conj)?));
    let (upper, tag) = supnorm_upper_cert(&poly, p)?;
    let _ = writeln!(report, "cert_best {} ({})", fmt_f64(upper), tag.as_str());
    emit(&common.out, &report)
}

pub fn construct(args: &ConstructArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "construct";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let kind = cfg.resolve_required(SECTION, "kind", args.kind.clone(), |s| Ok(s.to_string()))?;
    let m = cfg.resolve_required(SECTION, "m", args.m, parse_u32)?;
    let n = cfg.resolve_required(SECTION, "n", args.n, parse_usize)?;
    let p = cfg.resolve(SECTION, "p", args.p, parse_ext_real, 2.0)?;
    let rounds = cfg.resolve(SECTION, "rounds", args.rounds, parse_u32, 32)?;
    let ascent = resolve_ascent(&args.ascent, cfg, SECTION, common.seed)?;
    cfg.finish(SECTION)?;
    let out = common
        .out
        .clone()
        .ok_or_else(|| CliError::Config("construct requires --out".into()))?;

    match kind.as_str() {
        "spread" => {
            let poly = spread_poly(m, n)?;
            emit(&Some(out), &serialize_poly(&poly))?;
            println!("spread m {m} n {n} terms {}", poly.term_count());
        }
        "ones" => {
            let poly = ones_poly_capped(m, n, common.cap)?;
            emit(&Some(out), &serialize_poly(&poly))?;
            println!("ones m {m} n {n} terms {}", poly.term_count());
        }
        "unimodular" => {
            let poly = if rounds > 1 {
                best_of_unimodular_capped(m, n, p, common.seed, rounds, &ascent, common.cap)?
            } else {
                random_unimodular_capped(m, n, common.seed, common.cap)?
            };
            emit(&Some(out), &serialize_poly(&poly))?;
            println!(
                "unimodular m {m} n {n} terms {} rounds {rounds}",
                poly.term_count()
            );
        }
        "steiner" => {
            let sys = greedy_partial_steiner_capped(m, n, common.seed, common.cap)?;
            let (poly, signs) = steiner_poly(&sys, p, common.seed, rounds, &ascent)?;
            emit(&Some(out.clone()), &serialize_poly(&poly))?;
            let mut signs_path = out.as_os_str().to_os_string();
            signs_path.push(".signs");
            std::fs::write(PathBuf::from(signs_path), signs.serialize())?;
            println!(
                "steiner m {m} n {n} blocks {} valid {}",
                sys.blocks().len(),
                sys.validate().is_ok()
            );
        }
        "steiner-system" => {
            let sys = greedy_partial_steiner_capped(m, n, common.seed, common.cap)?;
            emit(&Some(out), &sys.serialize())?;
            println!(
                "steiner-system m {m} n {n} blocks {} valid {}",
                sys.blocks().len(),
                sys.validate().is_ok()
            );
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown construct kind {other:?} (spread|ones|unimodular|steiner|steiner-system)"
            )));
        }
    }
    Ok(())
}

fn resolve_family(
    cfg: &Config,
    section: &str,
    flag: Option<String>,
    kind: ConstantKind,
    m: u32,
    p: f64,
    r: f64,
) -> Result<Family, CliError> {
    let named = cfg.resolve_optional(section, "family", flag, |s| Ok(s.to_string()))?;
    match named {
        Some(name) => Ok(Family::parse(&name)?),
        None => Ok(match kind {
            ConstantKind::A => default_family_for_a(m, p, r),
            ConstantKind::B => Family::Ones,
        }),
    }
}

pub fn estimate(args: &EstimateArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "estimate";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let kind = cfg.resolve_required(SECTION, "kind", args.kind.clone(), |s| Ok(s.to_string()))?;
    let m = cfg.resolve_required(SECTION, "m", args.m, parse_u32)?;
    let n = cfg.resolve_required(SECTION, "n", args.n, parse_usize)?;
    let p = cfg.resolve_required(SECTION, "p", args.p, parse_ext_real)?;
    let rounds = cfg.resolve(SECTION, "rounds", args.rounds, parse_u32, 8)?;
    let ascent = resolve_ascent(&args.ascent, cfg, SECTION, common.seed)?;
    let opts = EstimateOptions {
        seed: common.seed,
        rounds,
        ascent,
        cap: common.cap,
    };

    match kind.as_str() {
        "A" | "B" => {
            let r = cfg.resolve_required(SECTION, "r", args.r, parse_ext_real)?;
            let ckind = if kind == "A" {
                ConstantKind::A
            } else {
                ConstantKind::B
            };
            let family = resolve_family(cfg, SECTION, args.family.clone(), ckind, m, p, r)?;
            cfg.finish(SECTION)?;
            let est = match ckind {
                ConstantKind::A => estimate_a(m, n, p, r, family, &opts)?,
                ConstantKind::B => estimate_b(m, n, p, r, family, &opts)?,
            };
            let mut out = String::from(polynorm::constants::SWEEP_CSV_HEADER);
            out.push('\n');
            out.push_str(&est.to_csv_row());
            out.push('\n');
            emit(&common.out, &out)
        }
        "chi" => {
            let q = cfg.resolve_required(SECTION, "q", args.q, parse_ext_real)?;
            let trials = cfg.resolve(SECTION, "trials", args.trials, parse_u32, 8)?;
            cfg.finish(SECTION)?;
            let est = chi_lower(m, n, p, q, trials, &opts)?;
            emit(&common.out, &format!("{}\n", est.to_jsonl()))
        }
        other => Err(CliError::Config(format!(
            "unknown estimate kind {other:?} (A|B|chi)"
        ))),
    }
}

pub fn sweep(args: &SweepArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "sweep";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let kind = cfg.resolve_required(SECTION, "kind", args.kind.clone(), |s| Ok(s.to_string()))?;
    let m = cfg.resolve_required(SECTION, "m", args.m, parse_u32)?;
    let p = cfg.resolve_required(SECTION, "p", args.p, parse_ext_real)?;
    let n_list = cfg.resolve_required(SECTION, "n-list", args.n_list.clone(), |s| {
        Ok(s.to_string())
    })?;
    let n_list = parse_n_list(&n_list)?;
    let rounds = cfg.resolve(SECTION, "rounds", args.rounds, parse_u32, 8)?;
    let ascent = resolve_ascent(&args.ascent, cfg, SECTION, common.seed)?;
    let opts = EstimateOptions {
        seed: common.seed,
        rounds,
        ascent,
        cap: common.cap,
    };

    match kind.as_str() {
        "A" | "B" => {
            let r = cfg.resolve_required(SECTION, "r", args.r, parse_ext_real)?;
            let ckind = if kind == "A" {
                ConstantKind::A
            } else {
                ConstantKind::B
            };
            let family = resolve_family(cfg, SECTION, args.family.clone(), ckind, m, p, r)?;
            cfg.finish(SECTION)?;
            let records = run_sweep(ckind, m, p, r, &n_list, family, &opts)?;
            emit(
                &common.out,
                &sweep_to_csv(ckind, m, p, r, family, common.seed, &records),
            )
        }
        "chi" => {
            let q = cfg.resolve_required(SECTION, "q", args.q, parse_ext_real)?;
            let trials = cfg.resolve(SECTION, "trials", args.trials, parse_u32, 8)?;
            cfg.finish(SECTION)?;
            if n_list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Config(
                    "n-list must be strictly increasing".into(),
                ));
            }
            let mut out = String::new();
            for &n in &n_list {
                let est = chi_lower(m, n, p, q, trials, &opts)?;
                out.push_str(&est.to_jsonl());
                out.push('\n');
            }
            emit(&common.out, &out)
        }
        other => Err(CliError::Config(format!(
            "unknown sweep kind {other:?} (A|B|chi)"
        ))),
    }
}

pub fn fit(args: &FitArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "fit";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let input = cfg.resolve_required(SECTION, "input", args.input.clone(), |s| {
        Ok(PathBuf::from(s))
    })?;
    let value_col = cfg.resolve_optional(SECTION, "value", args.value.clone(), |s| {
        Ok(s.to_string())
    })?;
    let predicted = cfg.resolve_optional(SECTION, "predicted", args.predicted, parse_f64)?;
    let tol = cfg.resolve(SECTION, "tol", args.tol, parse_f64, 0.1)?;
    let gate = cfg.resolve(SECTION, "gate", args.gate.then_some(true), parse_bool, false)?;
    cfg.finish(SECTION)?;

    let text = std::fs::read_to_string(&input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", input.display())))?;
    let samples = extract_samples(&text, value_col.as_deref())?;
    let fitresult = fit_exponent(&samples)?;

    let status = match predicted {
        Some(target) => {
            if (fitresult.slope - target).abs() <= tol {
                "pass"
            } else {
                "fail"
            }
        }
        None => "n/a",
    };
    let json = serde_json::json!({
        "slope": fitresult.slope,
        "intercept": fitresult.intercept,
        "r2": fitresult.r_squared,
        "predicted": predicted,
        "status": status,
    });
    emit(&common.out, &format!("{json}\n"))?;
    if gate && status == "fail" {
        return Err(CliError::Gate(format!(
            "fitted slope {} misses predicted {} beyond tol {tol}",
            fitresult.slope,
            predicted.unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// Pull `(n, value)` pairs out of sweep output (CSV or JSON lines).
fn extract_samples(text: &str, value_col: Option<&str>) -> Result<Vec<(f64, f64)>, CliError> {
    let trimmed = text.trim_start();
    let mut samples = Vec::new();
    if trimmed.starts_with('{') {
        let field = value_col.unwrap_or("chi_empirical");
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let v: serde_json::Value = serde_json::from_str(line)
                .map_err(|e| CliError::Config(format!("bad JSON line: {e}")))?;
            let n = v["n"]
                .as_f64()
                .ok_or_else(|| CliError::Config("JSON line lacks \"n\"".into()))?;
            let value = v[field]
                .as_f64()
                .ok_or_else(|| CliError::Config(format!("JSON line lacks {field:?}")))?;
            samples.push((n, value));
        }
    } else {
        let field = value_col.unwrap_or("empirical");
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| CliError::Config("empty input".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        let n_idx = cols
            .iter()
            .position(|c| *c == "n")
            .ok_or_else(|| CliError::Config("CSV header lacks \"n\"".into()))?;
        let v_idx = cols
            .iter()
            .position(|c| *c == field)
            .ok_or_else(|| CliError::Config(format!("CSV header lacks {field:?}")))?;
        let s_idx = cols.iter().position(|c| *c == "status");
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if let Some(si) = s_idx {
                if fields.get(si).copied() != Some("ok") {
                    continue;
                }
            }
            let n: f64 = fields
                .get(n_idx)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Config(format!("bad n in row {line:?}")))?;
            let value: f64 = fields
                .get(v_idx)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Config(format!("bad value in row {line:?}")))?;
            samples.push((n, value));
        }
    }
    Ok(samples)
}

pub fn regions(args: &RegionsArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "regions";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let kind = cfg.resolve(SECTION, "kind", args.kind.clone(), |s| Ok(s.to_string()), "A".into())?;
    let m = cfg.resolve_required(SECTION, "m", args.m, parse_u32)?;
    let grid = cfg.resolve(SECTION, "grid", args.grid, parse_usize, 101)?;
    cfg.finish(SECTION)?;
    if grid < 2 {
        return Err(CliError::Config("grid must be at least 2".into()));
    }

    let step = |i: usize| i as f64 / (grid - 1) as f64;
    let mut out = String::new();
    match kind.as_str() {
        "A" => {
            out.push_str("m,inv_p,inv_r,labels,exponent,status\n");
            for i in 0..grid {
                for j in 0..grid {
                    let pt = RegionPoint {
                        inv_p: step(i),
                        inv_r: step(j),
                        m,
                    };
                    let verdict = classify_region_a(&pt);
                    let labels: Vec<&str> =
                        verdict.labels.iter().map(|l| l.as_str()).collect();
                    let exp = verdict.exponent.map(fmt_f64).unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        m,
                        fmt_f64(pt.inv_p),
                        fmt_f64(pt.inv_r),
                        labels.join("|"),
                        exp,
                        verdict.status.as_str()
                    );
                }
            }
        }
        "chi" => {
            out.push_str("m,inv_p,inv_q,exponent,status\n");
            for i in 0..grid {
                for j in 0..grid {
                    let (exp, status) = predicted_chi_exponent(m, step(i), step(j));
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        m,
                        fmt_f64(step(i)),
                        fmt_f64(step(j)),
                        exp.map(fmt_f64).unwrap_or_default(),
                        status.as_str()
                    );
                }
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown regions kind {other:?} (A|chi)"
            )));
        }
    }
    emit(&common.out, &out)
}

pub fn vn(args: &VnArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "vn";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let family = cfg.resolve(
        SECTION,
        "family",
        args.family.clone(),
        |s| Ok(s.to_string()),
        "nilpotent".into(),
    )?;
    let m = cfg.resolve_required(SECTION, "m", args.m, parse_u32)?;
    let n_single = cfg.resolve_optional(SECTION, "n", args.n, parse_usize)?;
    let n_list_raw =
        cfg.resolve_optional(SECTION, "n-list", args.n_list.clone(), |s| Ok(s.to_string()))?;
    let n_list = match n_list_raw {
        Some(raw) => parse_n_list(&raw)?,
        None => vec![n_single.ok_or_else(|| CliError::Config("need --n or --n-list".into()))?],
    };
    let d_flag = cfg.resolve_optional(SECTION, "d", args.d, parse_usize)?;
    let p = cfg.resolve(SECTION, "p", args.p, parse_ext_real, 2.0)?;
    let q = cfg.resolve(SECTION, "q", args.q, parse_ext_real, 2.0)?;
    let mode_name = cfg.resolve(
        SECTION,
        "mode",
        args.mode.clone(),
        |s| Ok(s.to_string()),
        "c".into(),
    )?;
    let points = cfg.resolve(SECTION, "points", args.points, parse_usize, 4)?;
    let poly_family = cfg.resolve(
        SECTION,
        "poly-family",
        args.poly_family.clone(),
        |s| Ok(s.to_string()),
        "gaussian".into(),
    )?;
    let ascent = resolve_ascent(&args.ascent, cfg, SECTION, common.seed)?;
    cfg.finish(SECTION)?;

    let mode = match mode_name.as_str() {
        "c" => VnMode::C,
        "d" => VnMode::D,
        other => {
            return Err(CliError::Config(format!("unknown vn mode {other:?} (c|d)")));
        }
    };
    let d = d_flag.unwrap_or(m as usize + 1);

    let mut out = String::from(VN_CSV_HEADER);
    out.push('\n');
    for &n in &n_list {
        let poly = match poly_family.as_str() {
            "gaussian" => gaussian_poly(m, n, common.seed.wrapping_add(n as u64), common.cap)?,
            "unimodular" => random_unimodular_capped(m, n, common.seed, common.cap)?,
            "ones" => ones_poly_capped(m, n, common.cap)?,
            "spread" => spread_poly(m, n)?,
            other => {
                return Err(CliError::Config(format!(
                    "unknown poly-family {other:?} (gaussian|unimodular|ones|spread)"
                )));
            }
        };
        let tuple = match family.as_str() {
            "nilpotent" => {
                // Uniform coefficients just inside the ℓ_p sphere, ‖c‖_p < 1.
                let scale = if p.is_infinite() {
                    1.0 - 1e-12
                } else {
                    (1.0 - 1e-12) * (1.0 / n as f64).powf(1.0 / p)
                };
                let c = vec![Complex64::new(scale, 0.0); n];
                gen_nilpotent_tuple(m, n, &c, d)?
            }
            "diagonal" => {
                // Seeded points scaled so the requested condition holds.
                let mut rng = ChaCha8Rng::seed_from_u64(common.seed ^ n as u64);
                let mut pts: Vec<Vec<Complex64>> = (0..points.max(1))
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                                let th = rng.random::<f64>() * std::f64::consts::TAU;
                                Complex64::from_polar((-u.ln()).sqrt(), th)
                            })
                            .collect()
                    })
                    .collect();
                let lp = |z: &[Complex64], e: f64| -> f64 {
                    if e.is_infinite() {
                        z.iter().map(|x| x.norm()).fold(0.0, f64::max)
                    } else {
                        z.iter().map(|x| x.norm().powf(e)).sum::<f64>().powf(1.0 / e)
                    }
                };
                let scale = match mode {
                    // (Ip): Σ_i (max_k |z_i|)^p ≤ 1.
                    VnMode::C => {
                        let col_max: Vec<f64> = (0..n)
                            .map(|i| pts.iter().map(|z| z[i].norm()).fold(0.0, f64::max))
                            .collect();
                        if p.is_infinite() {
                            col_max.iter().cloned().fold(0.0, f64::max)
                        } else {
                            col_max.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
                        }
                    }
                    // (IIp): max_k ‖z^{(k)}‖_p ≤ 1.
                    VnMode::D => pts.iter().map(|z| lp(z, p)).fold(0.0, f64::max),
                };
                let factor = (1.0 - 1e-12) / scale.max(f64::MIN_POSITIVE);
                for z in &mut pts {
                    for x in z.iter_mut() {
                        *x *= factor;
                    }
                }
                gen_diagonal_tuple(&pts)?
            }
            "shiftpoly" => gen_shiftpoly_tuple(m, n, d, p, common.seed)?,
            other => {
                return Err(CliError::Config(format!(
                    "unknown vn family {other:?} (nilpotent|diagonal|shiftpoly)"
                )));
            }
        };
        let record = vn_ratio(&poly, &tuple, q, p, mode, &ascent)?;
        out.push_str(&record.to_csv_row());
        out.push('\n');
    }
    emit(&common.out, &out)
}

pub fn bayart(args: &BayartArgs, cfg: &Config) -> Result<(), CliError> {
    const SECTION: &str = "bayart";
    let common = resolve_common(&args.common, cfg, SECTION)?;
    let poly_path = cfg.resolve_optional(SECTION, "poly", args.poly.clone(), |s| {
        Ok(PathBuf::from(s))
    })?;
    let samples = cfg.resolve(SECTION, "samples", args.samples, parse_u64, 100_000)?;
    let count = cfg.resolve(SECTION, "count", args.count, parse_u32, 1)?;
    let coeffs = cfg.resolve(
        SECTION,
        "coeffs",
        args.coeffs.clone(),
        |s| Ok(s.to_string()),
        "gaussian".into(),
    )?;
    let gate = cfg.resolve(SECTION, "gate", args.gate.then_some(true), parse_bool, false)?;

    let polys: Vec<(u32, usize, HomPoly)> = if let Some(path) = poly_path {
        cfg.finish(SECTION)?;
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let poly = parse_poly(&text)?;
        vec![(poly.degree(), poly.nvars(), poly)]
    } else {
        let m = cfg.resolve_required(SECTION, "m", args.m, parse_u32)?;
        let n = cfg.resolve_required(SECTION, "n", args.n, parse_usize)?;
        cfg.finish(SECTION)?;
        (0..count)
            .map(|i| -> Result<_, CliError> {
                let seed = common.seed.wrapping_add(i as u64);
                let poly = match coeffs.as_str() {
                    "gaussian" => gaussian_poly(m, n, seed, common.cap)?,
                    "unimodular" => random_unimodular_capped(m, n, seed, common.cap)?,
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown coeffs {other:?} (gaussian|unimodular)"
                        )));
                    }
                };
                Ok((m, n, poly))
            })
            .collect::<Result<_, _>>()?
    };

    let mut out = String::new();
    let mut passed = 0u32;
    for (idx, (m, n, poly)) in polys.iter().enumerate() {
        let (sample, pass) = bayart_check(poly, samples, common.seed.wrapping_add(idx as u64))?;
        if pass {
            passed += 1;
        }
        let lhs = coeff_norm(poly, 2.0)?;
        let line = serde_json::json!({
            "index": idx,
            "m": m,
            "n": n,
            "samples": sample.samples,
            "mean": sample.mean,
            "stderr": sample.std_error,
            "coeff_l2": lhs,
            "bound": 2.0f64.powf(*m as f64 / 2.0) * (sample.mean + 3.0 * sample.std_error),
            "pass": pass,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    emit(&common.out, &out)?;
    if common.out.is_some() {
        println!("bayart passed {passed}/{}", polys.len());
    }
    if gate && passed as usize != polys.len() {
        return Err(CliError::Gate(format!(
            "{}/{} polynomials failed the 3σ check",
            polys.len() - passed as usize,
            polys.len()
        )));
    }
    Ok(())
}
