//! Heat trace `Z(t) = sum m exp(-t lambda)` from a truncated spectrum, and
//! weighted least-squares fits of its short-time expansion.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::coefficients::PredictedCoefficients;
use crate::error::{Error, Result};
use crate::profile::Topology;
use crate::spectral::Spectrum;
use crate::summation::NeumaierSum;

/// Geometric grid of times, `per_decade` points per factor of ten.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: u32,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_min: 1e-3,
            t_max: 1.0,
            per_decade: 40,
        }
    }
}

impl TimeGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.per_decade > 0) {
            return Err(Error::Precondition(format!(
                "bad time grid [{}, {}] with {} per decade",
                self.t_min, self.t_max, self.per_decade
            )));
        }
        let decades = (self.t_max / self.t_min).log10();
        let n = (decades * self.per_decade as f64).round() as usize;
        Ok((0..=n)
            .map(|i| self.t_min * 10f64.powf(decades * i as f64 / n.max(1) as f64))
            .collect())
    }
}

/// Upper envelope `N(lambda) <= a lambda + c sqrt(lambda) + c0` used past the
/// spectral cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylEnvelope {
    pub a: f64,
    pub c: f64,
    pub c0: f64,
}

impl WeylEnvelope {
    /// Fits the `sqrt(lambda)` coefficient on the upper three quarters of the
    /// computed spectrum and doubles it.
    pub fn fit(spectrum: &Spectrum, area: f64) -> Self {
        let a = area / (4.0 * PI);
        let lo = spectrum.lambda_max / 4.0;
        let mut count = 0u64;
        let mut worst = 0.0f64;
        for (i, e) in spectrum.entries.iter().enumerate() {
            count += e.mult as u64;
            let last_of_value = spectrum
                .entries
                .get(i + 1)
                .is_none_or(|next| next.lambda > e.lambda);
            if e.lambda >= lo && e.lambda > 0.0 && last_of_value {
                worst = worst.max((count as f64 - a * e.lambda) / e.lambda.sqrt());
            }
        }
        WeylEnvelope {
            a,
            c: 2.0 * worst + 1.0,
            c0: 2.0,
        }
    }

    /// Bound on `sum_{lambda > lambda_max} m exp(-t lambda)` given the count
    /// `n_max` at the cutoff.
    pub fn tail(&self, t: f64, lambda_max: f64, n_max: f64) -> f64 {
        let x = t * lambda_max;
        let e = (-x).exp();
        let upper_gamma = x.sqrt() * e + 0.5 * PI.sqrt() * erfc(x.sqrt());
        let bound = self.a * (lambda_max + 1.0 / t) * e
            + self.c / t.sqrt() * upper_gamma
            + self.c0 * e
            - n_max * e;
        bound.max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatSample {
    pub t: f64,
    pub z: f64,
    pub tail_bound: f64,
    pub eig_bound: f64,
    pub usable: bool,
}

impl HeatSample {
    /// One-sigma scale used as the fit weight.
    pub fn sigma(&self) -> f64 {
        self.tail_bound + self.eig_bound + 4.0 * f64::EPSILON * self.z.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceSamples {
    pub samples: Vec<HeatSample>,
    pub lambda_max: f64,
    pub eps: f64,
    pub envelope: WeylEnvelope,
}

impl HeatTraceSamples {
    pub fn usable(&self) -> Vec<HeatSample> {
        self.samples.iter().copied().filter(|s| s.usable).collect()
    }

    pub fn min_usable_t(&self) -> Option<f64> {
        self.samples.iter().filter(|s| s.usable).map(|s| s.t).reduce(f64::min)
    }

    /// Fails unless every sample is usable.
    pub fn require_usable(&self) -> Result<()> {
        if self.samples.iter().all(|s| s.usable) {
            Ok(())
        } else {
            Err(Error::TailBoundExceeded {
                min_usable_t: self.min_usable_t(),
            })
        }
    }
}

/// Sums the spectrum on `times`; a sample is usable when the tail and
/// eigenvalue-error bounds together stay below `eps`.
pub fn heat_trace(spectrum: &Spectrum, area: f64, times: &[f64], eps: f64) -> Result<HeatTraceSamples> {
    if spectrum.entries.is_empty() {
        return Err(Error::Precondition("empty spectrum".into()));
    }
    let envelope = WeylEnvelope::fit(spectrum, area);
    let n_max = spectrum.total_multiplicity() as f64;
    let samples = times
        .par_iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::Precondition(format!("time {t} is not positive")));
            }
            let mut z = NeumaierSum::new();
            let mut eig = 0.0;
            for e in &spectrum.entries {
                let w = e.mult as f64 * (-t * e.lambda).exp();
                z.add(w);
                eig += w * t * e.err;
            }
            let tail_bound = envelope.tail(t, spectrum.lambda_max, n_max);
            Ok(HeatSample {
                t,
                z: z.value(),
                tail_bound,
                eig_bound: eig,
                usable: tail_bound + eig <= eps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HeatTraceSamples {
        samples,
        lambda_max: spectrum.lambda_max,
        eps,
        envelope,
    })
}

/// `t^power`, or `t^power log t` when `log` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisTerm {
    pub power: f64,
    #[serde(default)]
    pub log: bool,
}

impl BasisTerm {
    pub const fn pow(power: f64) -> Self {
        BasisTerm { power, log: false }
    }

    pub const fn log(power: f64) -> Self {
        BasisTerm { power, log: true }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let v = t.powf(self.power);
        if self.log {
            v * t.ln()
        } else {
            v
        }
    }
}

impl std::fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t^{}", self.power)?;
        if self.log {
            write!(f, " log t")?;
        }
        Ok(())
    }
}

/// `{t^-1, 1, t^1/2, t, t^3/2}`, with `t^-1/2` added when there is a boundary.
pub fn default_basis(topology: Topology) -> Vec<BasisTerm> {
    let mut basis = vec![BasisTerm::pow(-1.0)];
    if topology == Topology::DirichletCap {
        basis.push(BasisTerm::pow(-0.5));
    }
    basis.extend([0.0, 0.5, 1.0, 1.5].map(BasisTerm::pow));
    basis
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub basis: Vec<BasisTerm>,
    /// Fixed `[t_lo, t_hi]`; chosen automatically when absent.
    pub window: Option<(f64, f64)>,
    /// Estimate the `t^-1` term first on the smallest times and subtract it.
    pub peel: bool,
    pub condition_limit: f64,
    /// Limit on the rms of `(Z - model)/Z`.
    pub residual_limit: f64,
}

impl FitOptions {
    pub fn new(basis: Vec<BasisTerm>) -> Self {
        FitOptions {
            basis,
            window: None,
            peel: true,
            condition_limit: 1e12,
            residual_limit: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub basis: Vec<BasisTerm>,
    pub coefficients: Vec<f64>,
    /// Standard errors, including the truncation estimate.
    pub std_errors: Vec<f64>,
    /// Change of each coefficient when the next power is appended.
    pub truncation: Vec<f64>,
    pub window: (f64, f64),
    pub samples_used: usize,
    pub condition: f64,
    pub residual_rms: f64,
    pub peeled: bool,
}

impl ExpansionFit {
    /// `(value, std_error)` of the given term, if it is in the basis.
    pub fn coefficient(&self, term: BasisTerm) -> Option<(f64, f64)> {
        self.basis
            .iter()
            .position(|b| *b == term)
            .map(|i| (self.coefficients[i], self.std_errors[i]))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.basis.iter().zip(&self.coefficients).map(|(b, c)| c * b.eval(t)).sum()
    }
}

struct Lsq {
    beta: Vec<f64>,
    se: Vec<f64>,
    condition: f64,
    rel_rms: f64,
    /// Maps a weighted right-hand side to coefficients.
    pinv: DMatrix<f64>,
}

fn weighted_lsq(samples: &[HeatSample], z: &[f64], basis: &[BasisTerm]) -> Result<Lsq> {
    let n = samples.len();
    let p = basis.len();
    if n < p + 2 {
        return Err(Error::TooFewSamples { needed: p + 2, found: n });
    }
    let mut x = DMatrix::from_fn(n, p, |i, j| basis[j].eval(samples[i].t) / samples[i].sigma());
    let y = DVector::from_fn(n, |i, _| z[i] / samples[i].sigma());
    let scale: Vec<f64> = (0..p).map(|j| x.column(j).norm()).collect();
    for j in 0..p {
        if !(scale[j] > 0.0) {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
                limit: f64::INFINITY,
            });
        }
        x.column_mut(j).unscale_mut(scale[j]);
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v requested");
    let inv_s = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / s));
    let mut pinv = vt.transpose() * &inv_s * u.transpose();
    let gamma = &pinv * &y;
    let resid = &y - &x * &gamma;
    let dof = (n - p) as f64;
    let s2 = resid.norm_squared() / dof;
    let cov = vt.transpose() * (&inv_s * &inv_s) * vt;
    let mut beta = vec![0.0; p];
    let mut se = vec![0.0; p];
    for j in 0..p {
        beta[j] = gamma[j] / scale[j];
        se[j] = (s2 * cov[(j, j)]).sqrt() / scale[j];
        pinv.row_mut(j).unscale_mut(scale[j]);
    }
    let mut rel = 0.0;
    for i in 0..n {
        let model: f64 = basis.iter().zip(&beta).map(|(b, c)| c * b.eval(samples[i].t)).sum();
        rel += ((z[i] - model) / z[i]).powi(2);
    }
    Ok(Lsq {
        beta,
        se,
        condition,
        rel_rms: (rel / n as f64).sqrt(),
        pinv,
    })
}

fn fit_window(samples: &[HeatSample], opts: &FitOptions) -> Result<ExpansionFit> {
    let (t_lo, t_hi) = opts.window.expect("window set");
    let used: Vec<HeatSample> = samples
        .iter()
        .copied()
        .filter(|s| s.usable && s.t >= t_lo * (1.0 - 1e-12) && s.t <= t_hi * (1.0 + 1e-12))
        .collect();
    let basis = &opts.basis;
    let z: Vec<f64> = used.iter().map(|s| s.z).collect();
    let lead = basis.iter().position(|b| *b == BasisTerm::pow(-1.0));

    let (coefficients, std_errors, condition, residual_rms, peeled) = match lead {
        Some(li) if opts.peel => {
            let third = (used.len() / 3).max(basis.len() + 2);
            let head = weighted_lsq(&used[..third.min(used.len())], &z[..third.min(used.len())], basis)?;
            let (a, a_se) = (head.beta[li], head.se[li]);
            let rest: Vec<BasisTerm> = basis.iter().copied().filter(|b| *b != basis[li]).collect();
            let zr: Vec<f64> = used.iter().map(|s| s.z - a / s.t).collect();
            let body = weighted_lsq(&used, &zr, &rest)?;
            // carry the uncertainty of the subtracted term into the rest
            let col = DVector::from_fn(used.len(), |i, _| 1.0 / used[i].t / used[i].sigma());
            let g = &body.pinv * col;
            let mut coefficients = Vec::with_capacity(basis.len());
            let mut std_errors = Vec::with_capacity(basis.len());
            let mut k = 0;
            for (j, _) in basis.iter().enumerate() {
                if j == li {
                    coefficients.push(a);
                    std_errors.push(a_se);
                } else {
                    coefficients.push(body.beta[k]);
                    std_errors.push(body.se[k].hypot(a_se * g[k]));
                    k += 1;
                }
            }
            let mut rel = 0.0;
            for s in &used {
                let model: f64 = basis.iter().zip(&coefficients).map(|(b, c)| c * b.eval(s.t)).sum();
                rel += ((s.z - model) / s.z).powi(2);
            }
            let rms = (rel / used.len() as f64).sqrt();
            (coefficients, std_errors, head.condition.max(body.condition), rms, true)
        }
        _ => {
            let fit = weighted_lsq(&used, &z, basis)?;
            (fit.beta, fit.se, fit.condition, fit.rel_rms, false)
        }
    };
    if condition > opts.condition_limit {
        return Err(Error::IllConditioned {
            condition,
            limit: opts.condition_limit,
        });
    }
    if residual_rms > opts.residual_limit {
        return Err(Error::ResidualTooLarge {
            rms: residual_rms,
            limit: opts.residual_limit,
        });
    }
    Ok(ExpansionFit {
        basis: basis.clone(),
        coefficients,
        std_errors,
        truncation: vec![0.0; basis.len()],
        window: (t_lo, t_hi),
        samples_used: used.len(),
        condition,
        residual_rms,
        peeled,
    })
}

fn with_truncation(samples: &[HeatSample], opts: &FitOptions, extended: &[BasisTerm]) -> Result<ExpansionFit> {
    let mut fit = fit_window(samples, opts)?;
    let wide = FitOptions {
        basis: extended.to_vec(),
        ..opts.clone()
    };
    // too few samples for the wider basis leaves the truncation unestimated
    if let Ok(b) = fit_window(samples, &wide) {
        for j in 0..fit.coefficients.len() {
            let d = (fit.coefficients[j] - b.coefficients[j]).abs();
            fit.truncation[j] = d;
            fit.std_errors[j] = fit.std_errors[j].hypot(d);
        }
    }
    Ok(fit)
}

/// Fits the expansion on the usable samples. Standard errors include the
/// change in each coefficient when the next half-integer power is appended.
/// Without an explicit window the upper end minimizes the summed errors.
pub fn fit_expansion(samples: &HeatTraceSamples, opts: &FitOptions) -> Result<ExpansionFit> {
    if opts.basis.is_empty() {
        return Err(Error::Precondition("empty fit basis".into()));
    }
    let next_power = opts.basis.iter().map(|b| b.power).fold(f64::MIN, f64::max) + 0.5;
    let mut extended = opts.basis.clone();
    extended.push(BasisTerm::pow(next_power));
    if opts.window.is_some() {
        return with_truncation(&samples.samples, opts, &extended);
    }
    let usable = samples.usable();
    let t_lo = samples.min_usable_t().ok_or(Error::TailBoundExceeded { min_usable_t: None })?;

    let mut best: Option<(f64, ExpansionFit)> = None;
    let mut last_err = None;
    for hi in usable.iter().map(|s| s.t).filter(|&t| t >= 5.0 * t_lo) {
        let base = FitOptions {
            window: Some((t_lo, hi)),
            ..opts.clone()
        };
        match with_truncation(&samples.samples, &base, &extended) {
            Ok(fit) => {
                let score: f64 = fit.std_errors.iter().sum();
                if best.as_ref().is_none_or(|(s, _)| score < *s) {
                    best = Some((score, fit));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some((_, fit)), _) => Ok(fit),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::TooFewSamples {
            needed: opts.basis.len() + 3,
            found: usable.len(),
        }),
    }
}

/// Split of the fitted constant term into smooth and singular parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T0Decomposition {
    pub fitted: f64,
    pub std_error: f64,
    pub interior: f64,
    pub boundary: f64,
    /// `fitted - interior - boundary`.
    pub singular: f64,
}

pub fn decompose_t0(fit: &ExpansionFit, predicted: &PredictedCoefficients) -> Result<T0Decomposition> {
    let (fitted, std_error) = fit
        .coefficient(BasisTerm::pow(0.0))
        .ok_or_else(|| Error::Precondition("fit basis has no constant term".into()))?;
    Ok(T0Decomposition {
        fitted,
        std_error,
        interior: predicted.interior_t0,
        boundary: predicted.boundary_t0,
        singular: fitted - predicted.interior_t0 - predicted.boundary_t0,
    })
}
