//! Modified Bessel functions `I_nu`, `K_nu` of real order.
//!
//! `K` is obtained from Temme's series (x < 2) or Steed's continued fraction
//! (x >= 2) at the reduced order `mu = nu - round(nu)` and carried up by the
//! stable forward recurrence. `I` comes from its positive-term power series
//! for small arguments, and otherwise from the continued fraction for
//! `I'/I` combined with the Wronskian `I K' - I' K = -1/x`.

use std::f64::consts::PI;

use super::{gamma, ln_gamma, temme_gammas};
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAXIT: usize = 100_000;
const FPMIN: f64 = 1e-300;
const XMIN: f64 = 2.0;

/// Values and argument derivatives of `I_nu(x)` and `K_nu(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkValues {
    pub i: f64,
    pub ip: f64,
    pub k: f64,
    pub kp: f64,
}

/// `K_mu(x)`, `K_{mu+1}(x)` for `|mu| <= 1/2`.
fn k_reduced(mu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mu2 = mu * mu;
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        (sum, sum1 * xi2)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        let k1 = kmu * (mu + x + 0.5 - h) * xi;
        (kmu, k1)
    }
}

/// `K_nu(x)` and `K_{nu+1}(x)` for `nu >= 0`.
fn k_pair(nu: f64, x: f64) -> (f64, f64) {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut kmu, mut k1) = k_reduced(mu, x);
    let xi2 = 2.0 / x;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    (kmu, k1)
}

/// Power series for `I_nu(x)`; all terms are positive.
fn i_series(nu: f64, x: f64) -> f64 {
    let y = 0.25 * x * x;
    let lead = {
        let direct = (0.5 * x).powf(nu) / gamma(nu + 1.0);
        if direct.is_finite() && direct > 1e-290 {
            direct
        } else {
            (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp()
        }
    };
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAXIT {
        let fk = k as f64;
        term *= y / (fk * (nu + fk));
        sum += term;
        if term < sum * EPS {
            break;
        }
    }
    lead * sum
}

/// Continued fraction for `I'_nu(x) / I_nu(x)`.
fn i_log_derivative(nu: f64, x: f64) -> f64 {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `I_nu(x)`, `I'_nu(x)`, `K_nu(x)`, `K'_nu(x)` for `nu >= 0`, `x > 0`.
pub fn bessel_ik(nu: f64, x: f64) -> Result<IkValues> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_ik needs x > 0, got {x}")));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("bessel_ik needs nu >= 0, got {nu}")));
    }
    let (k, k1) = k_pair(nu, x);
    let kp = nu / x * k - k1;
    let (i, ip) = if x < XMIN || x * x < 4.0 * (nu + 1.0) {
        let i = i_series(nu, x);
        let i1 = i_series(nu + 1.0, x);
        (i, i1 + nu / x * i)
    } else {
        let f = i_log_derivative(nu, x);
        let i = 1.0 / (x * (f * k - kp));
        (i, f * i)
    };
    let out = IkValues { i, ip, k, kp };
    if [i, ip, k, kp].iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::Overflow {
            function: "bessel_ik",
            order: nu,
            x,
        })
    }
}

/// Modified Bessel function of the first kind, `nu >= 0`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_ik(nu, x)?.i)
}

/// Modified Bessel function of the second kind, `nu >= 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_ik(nu, x)?.k)
}

/// `I_order(x)` for any real order, via `I_{-m} = I_m + (2/pi) sin(m pi) K_m`.
pub fn bessel_i_signed(order: f64, x: f64) -> Result<f64> {
    if order >= 0.0 {
        return bessel_i(order, x);
    }
    let m = -order;
    let v = bessel_ik(m, x)?;
    let frac = m - m.round();
    if frac == 0.0 {
        Ok(v.i)
    } else {
        Ok(v.i + 2.0 / PI * (PI * m).sin() * v.k)
    }
}
