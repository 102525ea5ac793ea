//! Zeta-regularized sums, Hadamard finite parts and the conversion between
//! resolvent-trace and heat-trace coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::special::gamma;

/// Laurent data at an evaluation point: `residue / (s - s0) + regular_part`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedValue {
    pub regular_part: f64,
    pub pole_residue: f64,
}

impl RegularizedValue {
    pub fn regular(value: f64) -> Self {
        Self {
            regular_part: value,
            pole_residue: 0.0,
        }
    }
}

const BERNOULLI: [f64; 2] = [1.0, -0.5];

/// `B_{2j}` for `j = 1..=14`.
const BERNOULLI_EVEN: [f64; 14] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
];

/// Riemann zeta function on the real line.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if s == 1.0 {
        return Err(Error::Pole("riemann zeta at s = 1"));
    }
    if !s.is_finite() {
        return Err(Error::Domain(format!("zeta argument {s} is not finite")));
    }
    if s < 0.0 {
        if s == s.round() && (s as i64) % 2 == 0 {
            return Ok(0.0);
        }
        let reflected = riemann_zeta(1.0 - s)?;
        return Ok(2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma(1.0 - s) * reflected);
    }
    Ok(euler_maclaurin_zeta(s))
}

fn euler_maclaurin_zeta(s: f64) -> f64 {
    const N: usize = 20;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // B_{2j}/(2j)! s(s+1)...(s+2j-2) N^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = n.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * npow;
        sum += term;
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        npow /= n * n;
    }
    sum
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn bernoulli_polynomial(m: usize, x: f64) -> f64 {
    (0..=m)
        .map(|j| binomial(m, j) * bernoulli_number(j) * x.powi((m - j) as i32))
        .sum()
}

fn bernoulli_number(j: usize) -> f64 {
    match j {
        0 | 1 => BERNOULLI[j],
        _ if j % 2 == 1 => 0.0,
        _ => BERNOULLI_EVEN[j / 2 - 1],
    }
}

const RATIO_ORDER: usize = 10;
/// Order used for the difference between the ratio and its truncated
/// expansion once `k` exceeds [`EXACT_HEAD`].
const REMAINDER_ORDER: usize = 26;
/// Largest `k` whose Gamma ratio is formed explicitly.
const EXACT_HEAD: usize = 30;

/// Coefficients `e_j` with `Gamma(k + a)/Gamma(k + b) ~ k^(a - b) sum_j e_j k^(-j)`,
/// `j = 0..=10`.
pub fn gamma_ratio_expansion(a: f64, b: f64) -> Vec<f64> {
    gamma_ratio_expansion_to(a, b, RATIO_ORDER)
}

fn gamma_ratio_expansion_to(a: f64, b: f64, order: usize) -> Vec<f64> {
    // log of the ratio: (a - b) ln k + sum_n l_n k^(-n)
    let mut log_series = vec![0.0; order + 1];
    for (n, l) in log_series.iter_mut().enumerate().skip(1) {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        *l = sign * (bernoulli_polynomial(n + 1, a) - bernoulli_polynomial(n + 1, b))
            / (n * (n + 1)) as f64;
    }
    // exp of a power series with zero constant term: e' = l' e
    let mut e = vec![0.0; order + 1];
    e[0] = 1.0;
    for n in 1..=order {
        e[n] = (1..=n).map(|j| j as f64 * log_series[j] * e[n - j]).sum::<f64>() / n as f64;
    }
    e
}

/// Power sum `sum_k coef k^(-sigma)` continued through `zeta(sigma)`.
struct ZetaTerm {
    coef: f64,
    sigma: f64,
}

/// Regularized value of
/// `S(s) = 2 sum_{k>=1} (-k^2/c^2 - 1/4) Gamma(k+1+s/2)/Gamma(k-s/2) - (1/4) Gamma(1+s/2)/Gamma(-s/2)`.
///
/// The summand is split into an explicit head `k <= K` and the large-`k`
/// expansion of the Gamma ratio, whose power sums are continued by the
/// Riemann zeta function. The resolvent power `d` enters only through the
/// precondition.
pub fn gamma_ratio_sum(c: f64, d: u32, s: f64) -> Result<RegularizedValue> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("cone slope {c} must lie in (0, 1]")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("resolvent power d = {d} must be at least 2")));
    }
    let first = gamma_ratio_sum_truncated(c, s, 40)?;
    let second = gamma_ratio_sum_truncated(c, s, 80)?;
    let scale = first.regular_part.abs().max(1.0);
    if (first.regular_part - second.regular_part).abs() > 1e-9 * scale
        || (first.pole_residue - second.pole_residue).abs() > 1e-9 * scale
    {
        return Err(Error::TruncationDependence {
            first: first.regular_part,
            second: second.regular_part,
        });
    }
    Ok(second)
}

/// Evaluation with an explicit head length, exposed for the truncation check.
pub fn gamma_ratio_sum_truncated(c: f64, s: f64, head: usize) -> Result<RegularizedValue> {
    let a = 1.0 + 0.5 * s;
    let b = -0.5 * s;
    let e = gamma_ratio_expansion(a, b);
    let lead = a - b; // = 1 + s
    let inv_c2 = 1.0 / (c * c);

    // (-k^2/c^2 - 1/4) k^lead sum_j e_j k^-j = sum of k^(-sigma) terms
    let mut zeta_terms = Vec::new();
    for (j, &ej) in e.iter().enumerate() {
        if ej == 0.0 {
            continue;
        }
        let jf = j as f64;
        zeta_terms.push(ZetaTerm {
            coef: -inv_c2 * ej,
            sigma: jf - lead - 2.0,
        });
        zeta_terms.push(ZetaTerm {
            coef: -0.25 * ej,
            sigma: jf - lead,
        });
    }

    let mut regular = 0.0;
    let mut residue = 0.0;
    for t in &zeta_terms {
        if t.coef.abs() < 1e-300 {
            continue;
        }
        if (t.sigma - 1.0).abs() < 1e-10 {
            // zeta(sigma) ~ 1/(sigma - 1) + gamma_E, sigma - 1 = -(s - s0)
            residue -= 2.0 * t.coef;
            regular += 2.0 * t.coef * 0.577_215_664_901_532_9;
        } else {
            regular += 2.0 * t.coef * riemann_zeta(t.sigma)?;
        }
    }

    // Head: exact terms minus the expansion already counted through zeta.
    // The ratio R_k = Gamma(k+a)/Gamma(k+b) follows R_{k+1} = R_k (k+a)/(k+b);
    // past EXACT_HEAD the difference is the expansion's own next orders.
    let e_long = gamma_ratio_expansion_to(a, b, REMAINDER_ORDER);
    let mut ratio = gamma(1.0 + a) / gamma(1.0 + b);
    let mut head_sum = 0.0;
    for k in 1..=head {
        let kf = k as f64;
        let weight = -kf * kf * inv_c2 - 0.25;
        let diff = if k <= EXACT_HEAD {
            let asym: f64 = e
                .iter()
                .enumerate()
                .map(|(j, ej)| ej * kf.powf(lead - j as f64))
                .sum();
            let d = ratio - asym;
            ratio *= (kf + a) / (kf + b);
            d
        } else {
            e_long
                .iter()
                .enumerate()
                .skip(RATIO_ORDER + 1)
                .map(|(j, ej)| ej * kf.powf(lead - j as f64))
                .sum()
        };
        head_sum += weight * diff;
    }
    regular += 2.0 * head_sum;
    regular -= 0.25 * gamma(1.0 + 0.5 * s) / gamma(-0.5 * s);
    Ok(RegularizedValue {
        regular_part: regular,
        pole_residue: residue,
    })
}

/// Resolvent coefficient `b^rho_1 = -d (kappa/c) S(-1) Gamma(d+1/2) / (4 sqrt(pi) d!)`,
/// with `S` the regularized Gamma-ratio sum.
pub fn b_rho_1(c: f64, kappa: f64, d: u32) -> Result<f64> {
    let sum = gamma_ratio_sum(c, d, -1.0)?;
    let df = d as f64;
    let d_fact = gamma(df + 1.0);
    Ok(-df * (kappa / c) * sum.regular_part * gamma(df + 0.5) / (4.0 * PI.sqrt() * d_fact))
}

/// Resolvent-side and heat-side expansion coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub d: u32,
    pub a_rho: Vec<f64>,
    pub b_rho: Vec<f64>,
    pub c_rho: Vec<f64>,
    /// `a_l`, coefficient of `t^(l-1)` (up to the `1/4pi` normalisation).
    pub a: Vec<f64>,
    /// `b_{l/2}` at index `l`.
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

/// `(d-1)!/Gamma(d - 1 + shift)`, exactly 1 when `shift = 1`.
fn conversion(d: u32, shift: f64) -> f64 {
    let df = d as f64;
    exact_gamma(df) / exact_gamma(df - 1.0 + shift)
}

/// Gamma function that is exact at positive integers.
fn exact_gamma(x: f64) -> f64 {
    if x == x.round() && (1.0..=170.0).contains(&x) {
        (1..x as u32).map(f64::from).product()
    } else {
        gamma(x)
    }
}

fn a_factor(d: u32, l: usize) -> f64 {
    conversion(d, l as f64)
}

fn b_factor(d: u32, l: usize) -> f64 {
    conversion(d, 1.0 + 0.5 * l as f64)
}

fn c_factor(d: u32, l: usize) -> f64 {
    conversion(d, 1.0 + l as f64)
}

/// Fills the heat side from the resolvent side.
pub fn heat_from_resolvent(coeffs: &CoefficientSet) -> Result<CoefficientSet> {
    let d = coeffs.d;
    if d == 0 {
        return Err(Error::Domain("resolvent power d must be at least 1".into()));
    }
    if d == 1 && !coeffs.a_rho.is_empty() {
        return Err(Error::Domain(
            "a_0 conversion needs Gamma(d - 1), so d must be at least 2".into(),
        ));
    }
    let mut out = coeffs.clone();
    out.a = coeffs.a_rho.iter().enumerate().map(|(l, v)| a_factor(d, l) * v).collect();
    out.b = coeffs.b_rho.iter().enumerate().map(|(l, v)| b_factor(d, l) * v).collect();
    out.c = coeffs.c_rho.iter().enumerate().map(|(l, v)| c_factor(d, l) * v).collect();
    Ok(out)
}

/// Fills the resolvent side from the heat side for the recorded `d`.
pub fn resolvent_from_heat(coeffs: &CoefficientSet) -> Result<CoefficientSet> {
    let d = coeffs.d;
    if d < 2 {
        return Err(Error::Domain("resolvent power d must be at least 2".into()));
    }
    let mut out = coeffs.clone();
    out.a_rho = coeffs.a.iter().enumerate().map(|(l, v)| v / a_factor(d, l)).collect();
    out.b_rho = coeffs.b.iter().enumerate().map(|(l, v)| v / b_factor(d, l)).collect();
    out.c_rho = coeffs.c.iter().enumerate().map(|(l, v)| v / c_factor(d, l)).collect();
    Ok(out)
}

/// `coef * r^power`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coef: f64,
    pub power: f64,
}

/// How the integrand behaves once its listed large-`r` terms are removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Decay {
    /// Faster than any power.
    Exponential,
    /// Like `r^power`.
    Power(f64),
}

/// Integrand `g` for `fint_0^inf r^s g(r) dr`, with its expansions at both ends.
pub struct FinitePartIntegrand<'a> {
    pub g: &'a (dyn Fn(f64) -> f64 + Sync),
    /// Leading terms of `g` as `r -> 0`.
    pub head: Vec<PowerTerm>,
    /// Power of the first term omitted from `head`.
    pub head_remainder: f64,
    /// Leading terms of `g` as `r -> inf`.
    pub tail: Vec<PowerTerm>,
    pub tail_remainder: Decay,
}

/// Hadamard finite part of `int_0^inf r^s g(r) dr`. Power terms are integrated
/// analytically on `[0, 1]` and `[1, inf)`; a term with `s + power = -1`
/// contributes a pole.
pub fn finite_part_integral(integrand: &FinitePartIntegrand<'_>, s: f64) -> Result<RegularizedValue> {
    if !(s + integrand.head_remainder > -1.0) {
        return Err(Error::InsufficientExpansion {
            available: integrand.head_remainder,
            s,
        });
    }
    if let Decay::Power(p) = integrand.tail_remainder {
        if !(s + p < -1.0) {
            return Err(Error::InsufficientExpansion { available: p, s });
        }
    }
    let mut result = RegularizedValue::regular(0.0);
    let mut analytic = |t: &PowerTerm, sign: f64| {
        let q = s + t.power + 1.0;
        if q.abs() < 1e-12 {
            // int r^-1: contributes a pole in s with residue +-coef.
            result.pole_residue += sign * t.coef;
        } else {
            // int_0^1 r^(q-1) = 1/q ; int_1^inf r^(q-1) = -1/q (continued)
            result.regular_part += sign * t.coef / q;
        }
    };
    for t in &integrand.head {
        analytic(t, 1.0);
    }
    for t in &integrand.tail {
        analytic(t, 1.0);
    }
    // Head remainder on [0, 1]: substitute r = u^m to smooth r^(s + p).
    let near_exp = s + integrand.head_remainder;
    let m_near = smoothing_power(near_exp);
    let near = integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let r = u.powf(m_near);
            let head: f64 = integrand.head.iter().map(|t| t.coef * r.powf(t.power)).sum();
            m_near * u.powf(m_near - 1.0) * r.powf(s) * ((integrand.g)(r) - head)
        },
        0.0,
        1.0,
        1e-13,
        1e-10,
    )?;
    // Tail remainder on [1, inf): r = u^(-m).
    let far_exp = match integrand.tail_remainder {
        Decay::Exponential => -3.0,
        Decay::Power(p) => s + p,
    };
    // r^(far_exp) dr with r = u^-m: m u^(-m far_exp - m - 1) du
    let m_far = smoothing_power(-far_exp - 2.0);
    let far = integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let r = u.powf(-m_far);
            let tail: f64 = integrand.tail.iter().map(|t| t.coef * r.powf(t.power)).sum();
            let v = m_far * u.powf(-m_far - 1.0) * r.powf(s) * ((integrand.g)(r) - tail);
            if v.is_finite() { v } else { 0.0 }
        },
        0.0,
        1.0,
        1e-13,
        1e-10,
    )?;
    result.regular_part += near.value + far.value;
    Ok(result)
}

/// Exponent `m` making `u^(m (e + 1) - 1)` at least linear.
fn smoothing_power(e: f64) -> f64 {
    let q = e + 1.0;
    if q >= 2.0 {
        1.0
    } else {
        (2.0 / q).ceil().min(40.0)
    }
}
