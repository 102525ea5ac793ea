//! The five pipelines behind the subcommands.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use conic_heat::coefficients::{b0_tip_with, bhalf_tip};
use conic_heat::model::{mellin_diag_closed, mellin_diag_quadrature, mellin_strip, resolvent_diag, ModelKernel};
use conic_heat::regularization::{b_rho_1, heat_from_resolvent, resolvent_from_heat, CoefficientSet};
use conic_heat::special::gamma;
use conic_heat::trace::{decompose_t0, T0Decomposition};
use conic_heat::{
    default_basis, fit_expansion, full_spectrum, heat_trace, predict, AngleConvention, BasisTerm, FitOptions,
    HeatTraceSamples, PredictedCoefficients, Profile, ProfileFamily, Spectrum, Topology,
};
use serde::Serialize;

use crate::cache::{atomic_write, sha256_hex, spectrum_key, Cache, Lookup};
use crate::config::RunConfig;
use crate::error::{io_error, CliError};

/// Resolved settings for one invocation.
pub struct Context {
    pub config: Option<RunConfig>,
    pub out: PathBuf,
    pub cache: Option<PathBuf>,
    pub convention: AngleConvention,
}

impl Context {
    fn config(&self) -> Result<&RunConfig, CliError> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::Validation("this command needs --config".into()))
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| io_error("cannot create", &self.out, e))?;
        let path = self.out.join(name);
        atomic_write(&path, bytes)?;
        Ok(path)
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

pub fn spectrum_csv(spectrum: &Spectrum) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "n", "lambda", "mult", "err"]).expect("in-memory write");
    for e in &spectrum.entries {
        w.write_record([e.k.to_string(), e.n.to_string(), num(e.lambda), e.mult.to_string(), num(e.err)])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn obtain_spectrum(ctx: &Context, config: &RunConfig, profile: &Profile) -> Result<Spectrum, CliError> {
    let key = spectrum_key(&config.profile, config.lambda_max, config.tol);
    let cache = ctx.cache.as_ref().map(Cache::new);
    if let Some(cache) = &cache {
        match cache.load(&key) {
            Lookup::Hit(s) => return Ok(s),
            Lookup::Miss => {}
            Lookup::Corrupt(why) => warn(&format!("discarding corrupt cache entry {why}")),
        }
    }
    let spectrum = full_spectrum(profile, config.lambda_max, config.tol)?;
    if let Some(cache) = &cache {
        cache.store(&key, &spectrum)?;
    }
    Ok(spectrum)
}

pub fn cmd_spectrum(ctx: &Context) -> Result<(), CliError> {
    let config = ctx.config()?;
    let profile = config.build_profile()?;
    let spectrum = obtain_spectrum(ctx, config, &profile)?;
    if spectrum.entries.is_empty() {
        warn(&format!("no eigenvalues below lambda_max = {}", config.lambda_max));
    }
    let path = ctx.write("spectrum.csv", &spectrum_csv(&spectrum))?;
    println!(
        "{} eigenvalues ({} with multiplicity) below {} written to {}",
        spectrum.entries.len(),
        spectrum.total_multiplicity(),
        config.lambda_max,
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct HeatTraceReport<'a> {
    profile: &'a ProfileFamily,
    spectrum_sha256: String,
    lambda_max: f64,
    eps: f64,
    min_usable_t: Option<f64>,
    envelope: conic_heat::trace::WeylEnvelope,
    samples: usize,
    usable: usize,
}

fn obtain_heat_trace(ctx: &Context) -> Result<(HeatTraceSamples, String), CliError> {
    let config = ctx.config()?;
    let profile = config.build_profile()?;
    let spectrum = obtain_spectrum(ctx, config, &profile)?;
    let csv = spectrum_csv(&spectrum);
    let hash = sha256_hex(&csv);
    if spectrum.entries.is_empty() {
        return Err(CliError::Numerical(conic_heat::Error::Precondition(format!(
            "no eigenvalues below lambda_max = {}",
            config.lambda_max
        ))));
    }
    let times = config.grid.points()?;
    let samples = heat_trace(&spectrum, profile.volume()?, &times, config.eps)?;
    Ok((samples, hash))
}

pub fn cmd_heat_trace(ctx: &Context) -> Result<(), CliError> {
    let config = ctx.config()?;
    let (samples, hash) = obtain_heat_trace(ctx)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "z", "tail_bound", "eig_bound", "usable"]).expect("in-memory write");
    for s in &samples.samples {
        w.write_record([num(s.t), num(s.z), num(s.tail_bound), num(s.eig_bound), s.usable.to_string()])
            .expect("in-memory write");
    }
    let path = ctx.write("heat_trace.csv", &w.into_inner().expect("in-memory flush"))?;
    let usable = samples.samples.iter().filter(|s| s.usable).count();
    let report = HeatTraceReport {
        profile: &config.profile,
        spectrum_sha256: hash,
        lambda_max: samples.lambda_max,
        eps: samples.eps,
        min_usable_t: samples.min_usable_t(),
        envelope: samples.envelope,
        samples: samples.samples.len(),
        usable,
    };
    ctx.write("heat_trace.json", json(&report).as_bytes())?;
    if usable < samples.samples.len() {
        warn(&format!(
            "{} of {} samples exceed the tail bound eps = {:e}",
            samples.samples.len() - usable,
            samples.samples.len(),
            samples.eps
        ));
    }
    println!("{usable} usable samples written to {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct TermRow {
    term: String,
    power: f64,
    log: bool,
    fitted: f64,
    std_error: f64,
    truncation: f64,
    predicted: Option<f64>,
    discrepancy_se: Option<f64>,
}

#[derive(Serialize)]
struct ConstantTerm {
    #[serde(flatten)]
    decomposition: T0Decomposition,
    b0_predicted_sin: f64,
    b0_predicted_tan: f64,
    discrepancy_se_sin: f64,
    discrepancy_se_tan: f64,
}

#[derive(Serialize)]
struct FitReport<'a> {
    profile: &'a ProfileFamily,
    spectrum_sha256: String,
    lambda_max: f64,
    window: (f64, f64),
    samples_used: usize,
    condition: f64,
    residual_rms: f64,
    peeled: bool,
    terms: Vec<TermRow>,
    constant_term: Option<ConstantTerm>,
    predicted: PredictedCoefficients,
}

/// Closed-form value for a basis term, where there is one.
fn predicted_for(term: BasisTerm, pred: &PredictedCoefficients, topology: Topology) -> Option<f64> {
    if term.log {
        // no logarithmic term at t^0
        return (term.power == 0.0).then_some(0.0);
    }
    match term.power {
        -1.0 => Some(pred.a0 / (4.0 * PI)),
        -0.5 => Some(pred.boundary_t_minus_half),
        0.0 => Some(pred.t0_total),
        // a Dirichlet circle adds an unpredicted t^1/2 term
        p if p == 0.5 && topology == Topology::ClosedSpindle => Some(pred.bhalf_total),
        _ => None,
    }
}

pub fn cmd_fit(ctx: &Context) -> Result<(), CliError> {
    let config = ctx.config()?;
    let profile = config.build_profile()?;
    let (samples, hash) = obtain_heat_trace(ctx)?;
    let basis = config.fit.basis.clone().unwrap_or_else(|| default_basis(profile.topology()));
    let opts = FitOptions {
        window: config.fit.window,
        peel: config.fit.peel,
        ..FitOptions::new(basis)
    };
    let fit = fit_expansion(&samples, &opts)?;
    let pred = predict(&profile, ctx.convention)?;
    let terms: Vec<TermRow> = fit
        .basis
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let predicted = predicted_for(b, &pred, profile.topology());
            TermRow {
                term: b.to_string(),
                power: b.power,
                log: b.log,
                fitted: fit.coefficients[j],
                std_error: fit.std_errors[j],
                truncation: fit.truncation[j],
                predicted,
                discrepancy_se: predicted.map(|p| (fit.coefficients[j] - p) / fit.std_errors[j]),
            }
        })
        .collect();
    let constant_term = decompose_t0(&fit, &pred).ok().map(|d| {
        let sin: f64 = profile.tips().iter().map(|t| b0_tip_with(t.c, AngleConvention::Sin)).sum();
        let tan: f64 = profile.tips().iter().map(|t| b0_tip_with(t.c, AngleConvention::Tan)).sum();
        ConstantTerm {
            b0_predicted_sin: sin,
            b0_predicted_tan: tan,
            discrepancy_se_sin: (d.singular - sin) / d.std_error,
            discrepancy_se_tan: (d.singular - tan) / d.std_error,
            decomposition: d,
        }
    });

    println!("window [{}, {}], {} samples, condition {:.2e}", num(fit.window.0), num(fit.window.1), fit.samples_used, fit.condition);
    println!("{:<14} {:>24} {:>10} {:>24} {:>10}", "term", "fitted", "std err", "predicted", "diff/se");
    for row in &terms {
        println!(
            "{:<14} {:>24} {:>10.2e} {:>24} {:>10}",
            row.term,
            num(row.fitted),
            row.std_error,
            row.predicted.map(num).unwrap_or_else(|| "-".into()),
            row.discrepancy_se.map(|d| format!("{d:.2}")).unwrap_or_else(|| "-".into())
        );
    }
    if let Some(c) = &constant_term {
        println!(
            "singular constant part {} +- {:.2e}; b0 sin reading {} ({:.1} se), tan reading {} ({:.1} se)",
            num(c.decomposition.singular),
            c.decomposition.std_error,
            num(c.b0_predicted_sin),
            c.discrepancy_se_sin,
            num(c.b0_predicted_tan),
            c.discrepancy_se_tan
        );
    }

    let report = FitReport {
        profile: &config.profile,
        spectrum_sha256: hash,
        lambda_max: config.lambda_max,
        window: fit.window,
        samples_used: fit.samples_used,
        condition: fit.condition,
        residual_rms: fit.residual_rms,
        peeled: fit.peeled,
        terms,
        constant_term,
        predicted: pred,
    };
    ctx.write("fit.json", json(&report).as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct PredictReport<'a> {
    profile: &'a ProfileFamily,
    #[serde(flatten)]
    predicted: PredictedCoefficients,
}

pub fn cmd_predict(ctx: &Context) -> Result<(), CliError> {
    let config = ctx.config()?;
    let profile = config.build_profile()?;
    let report = PredictReport {
        profile: &config.profile,
        predicted: predict(&profile, ctx.convention)?,
    };
    let text = json(&report);
    ctx.write("predict.json", text.as_bytes())?;
    print!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

/// Deterministic point of the `i`-th Weyl sequence in `[lo, hi)`.
fn weyl(i: usize, dim: usize, lo: f64, hi: f64) -> f64 {
    const STEPS: [f64; 4] = [0.618_033_988_749_894_9, 0.414_213_562_373_095_1, 0.732_050_807_568_877_2, 0.236_067_977_499_789_7];
    lo + (hi - lo) * ((i + 1) as f64 * STEPS[dim]).fract()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn run_checks() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for nu in [0.0, 0.5, 1.0, 2.0, 5.0] {
        for d in 1..=3 {
            let (lo, hi) = mellin_strip(nu, d);
            for s in [-1.2, -1.5, -1.9] {
                if s > lo && s < hi {
                    worst = worst.max(rel(mellin_diag_quadrature(nu, d, s)?, mellin_diag_closed(nu, d, s)?));
                }
            }
        }
    }
    checks.push(Check {
        name: "Mellin identity".into(),
        passed: worst <= 1e-6,
        detail: format!("worst relative difference {worst:.2e}"),
    });

    let mut worst = 0.0f64;
    for i in 0..50 {
        let nu = weyl(i, 0, 0.0, 6.0);
        let d = 1 + (weyl(i, 1, 0.0, 4.0) as u32).min(3);
        let r = weyl(i, 2, 0.05, 3.0);
        let z = weyl(i, 3, 0.1, 5.0);
        let kernel = ModelKernel::new(nu, d)?;
        let lhs = resolvent_diag(kernel, r, z)?;
        let rhs = z.powi(-(2 * d as i32 - 1)) * resolvent_diag(kernel, z * r, 1.0)?;
        worst = worst.max(rel(lhs, rhs));
    }
    checks.push(Check {
        name: "resolvent scaling".into(),
        passed: worst <= 1e-12,
        detail: format!("worst relative difference {worst:.2e} over 50 samples"),
    });

    let (c, kappa) = (0.6, 0.4);
    let mut worst = 0.0f64;
    for d in [2u32, 3, 4] {
        let chain = b_rho_1(c, kappa, d)?;
        let df = d as f64;
        let want = kappa / c * 5.0 * gamma(df + 0.5) / (96.0 * PI.sqrt() * gamma(df));
        let heat = heat_from_resolvent(&CoefficientSet {
            d,
            b_rho: vec![0.0, chain],
            ..Default::default()
        })?
        .b[1];
        worst = worst.max((chain - want).abs()).max((heat - bhalf_tip(c, kappa)).abs());
    }
    checks.push(Check {
        name: "regularized Gamma-ratio chain".into(),
        passed: worst <= 1e-10,
        detail: format!("worst deviation from 5 kappa/(96 sqrt(pi) c) form {worst:.3e}"),
    });

    let mut exact = true;
    let mut worst = 0.0f64;
    for d in 2u32..=6 {
        for i in 0..5 {
            let x = weyl(i + 10 * d as usize, 0, -5.0, 5.0);
            exact &= heat_from_resolvent(&CoefficientSet {
                d,
                b_rho: vec![x],
                ..Default::default()
            })?
            .b[0]
                == x;
            let set = CoefficientSet {
                d,
                a_rho: vec![x, 1.0 - x],
                b_rho: vec![x, 2.0 * x, -x],
                c_rho: vec![0.5 * x, x],
                ..Default::default()
            };
            let back = resolvent_from_heat(&heat_from_resolvent(&set)?)?;
            for (u, v) in [(&set.a_rho, &back.a_rho), (&set.b_rho, &back.b_rho), (&set.c_rho, &back.c_rho)] {
                for (p, q) in u.iter().zip(v) {
                    worst = worst.max(rel(*q, *p));
                }
            }
        }
    }
    checks.push(Check {
        name: "conversion identities".into(),
        passed: exact && worst <= 1e-14,
        detail: format!("b0 factor exactly one: {exact}; round trip {worst:.1e}"),
    });
    Ok(checks)
}

pub fn cmd_verify(ctx: &Context) -> Result<(), CliError> {
    let checks = run_checks()?;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "ok    " } else { "FAILED" }, c.name, c.detail);
    }
    ctx.write("verify.json", json(&checks).as_bytes())?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed))
    }
}

pub fn resolve_out(cli_out: Option<&Path>, config: Option<&RunConfig>) -> PathBuf {
    cli_out
        .map(Path::to_path_buf)
        .or_else(|| config.and_then(|c| c.out.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}
