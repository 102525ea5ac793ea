//! The exact flat-cone model operator `T_nu = -d^2/dr^2 + (nu^2 - 1/4)/r^2`
//! on the half-line: its resolvent diagonal, Mellin transform and spectrum on
//! the unit disc cone.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::special::{bessel_i_signed, bessel_j_zeros, bessel_k, gamma, ln_gamma};

/// Diagonal of `(T_nu + z^2)^(-d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelKernel {
    pub nu: f64,
    pub d: u32,
}

impl ModelKernel {
    pub fn new(nu: f64, d: u32) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::Domain(format!("order nu = {nu} must be nonnegative")));
        }
        if d == 0 {
            return Err(Error::Domain("resolvent power must be at least 1".into()));
        }
        Ok(Self { nu, d })
    }
}

/// `coef * x^q * I_{nu+a}(x) K_{nu+b}(x)`
type TermKey = (i32, i32, i32);

/// `(-(1/2x) d/dx)^m [I_nu K_nu](x)` as a sum of Bessel products.
#[derive(Debug, Clone)]
struct BesselProductExpansion {
    nu: f64,
    order: u32,
    terms: Vec<(TermKey, f64)>,
}

impl BesselProductExpansion {
    fn new(nu: f64, m: u32) -> Self {
        let mut terms: BTreeMap<TermKey, f64> = BTreeMap::new();
        terms.insert((0, 0, 0), 1.0);
        for _ in 0..m {
            let mut next: BTreeMap<TermKey, f64> = BTreeMap::new();
            let mut add = |key: TermKey, v: f64| *next.entry(key).or_insert(0.0) += v;
            for (&(q, a, b), &c) in &terms {
                // -(1/2x) d/dx [x^q I_{nu+a} K_{nu+b}]
                let h = -0.5 * c;
                if q != 0 {
                    add((q - 2, a, b), h * q as f64);
                }
                add((q - 1, a - 1, b), 0.5 * h);
                add((q - 1, a + 1, b), 0.5 * h);
                add((q - 1, a, b - 1), -0.5 * h);
                add((q - 1, a, b + 1), -0.5 * h);
            }
            terms = next.into_iter().filter(|(_, v)| *v != 0.0).collect();
        }
        Self {
            nu,
            order: m,
            terms: terms.into_iter().collect(),
        }
    }

    fn eval(&self, x: f64) -> Result<f64> {
        if self.order > 0 && x < series_end(self.nu) {
            // the Bessel-product form cancels catastrophically here
            let mut series = product_series(self.nu);
            for _ in 0..self.order {
                series = apply_d(&series);
            }
            let y = 0.5 * x;
            let ln_y = y.ln();
            return Ok(series.iter().map(|t| (t.c + t.l * ln_y) * y.powf(t.e)).sum());
        }
        if x >= asymptotic_threshold(self.nu) {
            return Ok(asymptotic_terms(self.nu, self.order, x)
                .iter()
                .map(|&(c, e)| c * x.powf(e))
                .sum());
        }
        let span = self
            .terms
            .iter()
            .map(|((_, a, b), _)| a.abs().max(b.abs()))
            .max()
            .unwrap_or(0);
        let mut i_vals = Vec::with_capacity(2 * span as usize + 1);
        let mut k_vals = Vec::with_capacity(2 * span as usize + 1);
        for a in -span..=span {
            let order = self.nu + a as f64;
            i_vals.push(bessel_i_signed(order, x)?);
            k_vals.push(bessel_k(order.abs(), x)?);
        }
        let idx = |a: i32| (a + span) as usize;
        Ok(self
            .terms
            .iter()
            .map(|&((q, a, b), c)| c * x.powi(q) * i_vals[idx(a)] * k_vals[idx(b)])
            .sum())
    }
}

/// Diagonal of `(T_nu + z^2)^(-d)` at `r`:
/// `(1/(d-1)!) (-(1/2 zeta) d/dzeta)^(d-1) [r I_nu(r zeta) K_nu(r zeta)]` at `zeta = z`.
pub fn resolvent_diag(kernel: ModelKernel, r: f64, z: f64) -> Result<f64> {
    if !(r > 0.0 && z > 0.0) {
        return Err(Error::Domain(format!("need r, z > 0, got r = {r}, z = {z}")));
    }
    let m = kernel.d - 1;
    let g = BesselProductExpansion::new(kernel.nu, m).eval(r * z)?;
    Ok(r.powi(2 * m as i32 + 1) * g / factorial(m))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Convergence strip `(lower, upper)` of the Mellin transform.
pub fn mellin_strip(nu: f64, d: u32) -> (f64, f64) {
    ((-2.0 - 2.0 * d as f64).max(-2.0 - 2.0 * nu), -1.0)
}

fn check_strip(nu: f64, d: u32, s: f64) -> Result<()> {
    ModelKernel::new(nu, d)?;
    let (lower, upper) = mellin_strip(nu, d);
    if !(s > lower && s < upper) {
        return Err(Error::OutsideStrip { s, lower, upper });
    }
    Ok(())
}

/// `Gamma(d+1+s/2) Gamma(-1/2-s/2) Gamma(nu+1+s/2) / (4 sqrt(pi) d! Gamma(nu-s/2))`
pub fn mellin_diag_closed(nu: f64, d: u32, s: f64) -> Result<f64> {
    check_strip(nu, d, s)?;
    let df = d as f64;
    Ok(gamma(df + 1.0 + 0.5 * s) * gamma(-0.5 - 0.5 * s) * gamma(nu + 1.0 + 0.5 * s)
        / (4.0 * PI.sqrt() * factorial(d) * gamma(nu - 0.5 * s)))
}

/// Power-series term `(c + l ln y) y^e` with `y = x / 2`.
#[derive(Debug, Clone, Copy)]
struct LogPower {
    e: f64,
    c: f64,
    l: f64,
}

const SERIES_TERMS: usize = 48;

/// Below this argument derivatives are taken from the convergent series; the
/// Bessel-product form loses about `(nu / x)^(2m)` to cancellation.
fn series_end(nu: f64) -> f64 {
    (0.6 * nu).clamp(1.0, 4.0)
}

/// Convergent series of `I_nu(x) K_nu(x)` in `y = x/2`.
fn product_series(nu: f64) -> Vec<LogPower> {
    let n = nu.round();
    if (nu - n).abs() < 1e-12 {
        integer_product_series(n as usize)
    } else {
        // I_nu K_nu = pi / (2 sin(nu pi)) (I_nu I_{-nu} - I_nu^2)
        let pre = PI / (2.0 * (nu * PI).sin());
        let mut out = Vec::with_capacity(2 * SERIES_TERMS);
        for k in 0..SERIES_TERMS {
            let kf = k as f64;
            // I_nu I_{-nu}: y^{2k} (2k)! / (k!^2 Gamma(nu+k+1) Gamma(-nu+k+1))
            let g = gamma(kf - nu + 1.0);
            let mixed = (ln_gamma(2.0 * kf + 1.0) - 2.0 * ln_gamma(kf + 1.0) - ln_gamma(nu + kf + 1.0))
                .exp()
                / g;
            out.push(LogPower {
                e: 2.0 * kf,
                c: pre * mixed,
                l: 0.0,
            });
            // I_nu^2: y^{2nu+2k} Gamma(2nu+2k+1) / (k! Gamma(nu+k+1)^2 Gamma(2nu+k+1))
            let square = (ln_gamma(2.0 * nu + 2.0 * kf + 1.0)
                - ln_gamma(kf + 1.0)
                - 2.0 * ln_gamma(nu + kf + 1.0)
                - ln_gamma(2.0 * nu + kf + 1.0))
                .exp();
            out.push(LogPower {
                e: 2.0 * nu + 2.0 * kf,
                c: -pre * square,
                l: 0.0,
            });
        }
        out
    }
}

fn integer_product_series(n: usize) -> Vec<LogPower> {
    let nf = n as f64;
    let fact = |k: usize| factorial(k as u32);
    let digamma_int = |k: usize| -> f64 {
        // psi(k) for integer k >= 1
        -0.577_215_664_901_532_9 + (1..k).map(|j| 1.0 / j as f64).sum::<f64>()
    };
    // I_n = sum_j y^{n+2j} / (j! (n+j)!)
    let i_coef: Vec<f64> = (0..SERIES_TERMS).map(|j| 1.0 / (fact(j) * fact(n + j))).collect();
    // K_n = (1/2) sum_{k<n} (-1)^k (n-k-1)!/k! y^{2k-n}
    //     + (-1)^{n+1} ln(y) I_n
    //     + (-1)^n (1/2) sum_k (psi(k+1) + psi(n+k+1)) y^{n+2k} / (k! (n+k)!)
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut k_terms: Vec<LogPower> = Vec::new();
    for k in 0..n {
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        k_terms.push(LogPower {
            e: 2.0 * k as f64 - nf,
            c: 0.5 * s * fact(n - k - 1) / fact(k),
            l: 0.0,
        });
    }
    for k in 0..SERIES_TERMS {
        k_terms.push(LogPower {
            e: nf + 2.0 * k as f64,
            c: sign_n * 0.5 * (digamma_int(k + 1) + digamma_int(n + k + 1)) * i_coef[k],
            l: -sign_n * i_coef[k],
        });
    }
    let mut acc: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for (j, &a) in i_coef.iter().enumerate() {
        let e_i = nf + 2.0 * j as f64;
        for t in &k_terms {
            let e = e_i + t.e;
            let entry = acc.entry(e.round() as i64).or_insert((0.0, 0.0));
            entry.0 += a * t.c;
            entry.1 += a * t.l;
        }
    }
    acc.into_iter()
        .filter(|(e, _)| (*e as usize) < 2 * SERIES_TERMS)
        .map(|(e, (c, l))| LogPower { e: e as f64, c, l })
        .collect()
}

/// Applies `-(1/2x) d/dx = -(1/8y) d/dy` to each series term.
fn apply_d(series: &[LogPower]) -> Vec<LogPower> {
    series
        .iter()
        .map(|t| LogPower {
            e: t.e - 2.0,
            c: -(t.e * t.c + t.l) / 8.0,
            l: -t.e * t.l / 8.0,
        })
        .filter(|t| t.c != 0.0 || t.l != 0.0)
        .collect()
}

/// `int_0^Y (c + l ln y) y^p dy`, `p > -1`.
fn integrate_log_power(c: f64, l: f64, p: f64, y_max: f64) -> f64 {
    let q = p + 1.0;
    let base = y_max.powf(q) / q;
    c * base + l * base * (y_max.ln() - 1.0 / q)
}

const HEAD_END: f64 = 2.0;

/// `int_0^inf r^s (T_nu + 1)^(-d-1)(r, r) dr` by quadrature: convergent series
/// on `[0, 2]`, adaptive Gauss–Kronrod on `[2, X]`, and the large-argument
/// expansion of `I_nu K_nu` beyond `X`.
pub fn mellin_diag_quadrature(nu: f64, d: u32, s: f64) -> Result<f64> {
    check_strip(nu, d, s)?;
    let dfact = factorial(d);
    let power = s + 2.0 * d as f64 + 1.0;

    // Head: x = 2y, x^(power) G_d(x) dx = 2^(power + 1) y^power G_d dy
    let mut series = product_series(nu);
    for _ in 0..d {
        series = apply_d(&series);
    }
    let y_max = 0.5 * HEAD_END;
    let head: f64 = series
        .iter()
        .map(|t| integrate_log_power(t.c, t.l, t.e + power, y_max))
        .sum::<f64>()
        * 2f64.powf(power + 1.0)
        / dfact;

    // Middle
    let x_tail = asymptotic_threshold(nu);
    let expansion = BesselProductExpansion::new(nu, d);
    let failure = std::cell::RefCell::new(None);
    let middle = integrate(
        |x| match expansion.eval(x) {
            Ok(g) => x.powf(power) * g,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        HEAD_END,
        x_tail,
        0.0,
        1e-12,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }

    let coefs = asymptotic_terms(nu, d, x_tail);
    let tail: f64 = coefs
        .iter()
        .map(|&(c, e)| {
            let p = power + e + 1.0;
            -c * x_tail.powf(p) / p
        })
        .sum::<f64>()
        / dfact;

    Ok(head + middle.value / dfact + tail)
}

/// Where the large-argument expansion of `I_nu K_nu` takes over.
fn asymptotic_threshold(nu: f64) -> f64 {
    (4.0 * nu + 10.0).max(40.0)
}

/// `(coefficient, exponent)` pairs of `(-(1/2x) d/dx)^m [I_nu K_nu]` for
/// large `x`, from `I_nu K_nu ~ (1/2x) sum_k t_k x^(-2k)`, truncated where
/// the terms fall below double precision at `x_min`.
fn asymptotic_terms(nu: f64, m: u32, x_min: f64) -> Vec<(f64, f64)> {
    let mu = 4.0 * nu * nu;
    let mut coefs: Vec<(f64, f64)> = Vec::new();
    let mut t = 0.5;
    for k in 0..30 {
        if k > 0 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            t *= -(odd / (2.0 * kf)) * (mu - odd * odd) / 4.0;
        }
        let e = -1.0 - 2.0 * k as f64;
        if k > 2 && t.abs() * x_min.powf(e) < 1e-18 * 0.5 / x_min {
            break;
        }
        coefs.push((t, e));
        if t == 0.0 {
            break;
        }
    }
    for _ in 0..m {
        coefs = coefs.into_iter().map(|(c, e)| (-0.5 * e * c, e - 2.0)).collect();
    }
    coefs
}

/// `j_{k/c, n}^2`, the `n`-th Dirichlet eigenvalue (n >= 1) of mode `k` on the
/// unit flat cone of slope `c`.
pub fn flat_cone_eigenvalue(c: f64, k: u32, n: usize) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("cone slope {c} must lie in (0, 1]")));
    }
    if n == 0 {
        return Err(Error::Domain("eigenvalue index starts at 1".into()));
    }
    let zeros = bessel_j_zeros(k as f64 / c, n)?;
    Ok(zeros[n - 1].powi(2))
}
