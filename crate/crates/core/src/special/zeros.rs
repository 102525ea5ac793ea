//! Positive zeros of `J_nu` for real `nu >= 0`.
//!
//! Zeros are bracketed by a sign scan starting just below `nu` (there are no
//! zeros in `(0, nu]`), with a step smaller than the minimal zero spacing, so
//! the index of every zero is exact. Each bracket is polished by safeguarded
//! Newton iteration seeded with McMahon's expansion when it falls inside the
//! bracket.

use super::bessel_jy;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Scan step; consecutive zeros of `J_nu` are more than 2.4 apart.
const SCAN_STEP: f64 = 0.75;

/// McMahon's large-index expansion for the `n`-th positive zero of `J_nu`.
pub fn mcmahon_zero(nu: f64, n: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let beta = (n as f64 + 0.5 * nu - 0.25) * PI;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

fn polish(nu: f64, mut lo: f64, mut hi: f64, f_lo: f64, seed: f64) -> Result<f64> {
    let mut x = if seed > lo && seed < hi { seed } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let v = bessel_jy(nu, x)?;
        if v.j == 0.0 {
            return Ok(x);
        }
        if (v.j > 0.0) == (f_lo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - v.j / v.jp;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(x);
        }
    }
    Err(Error::RootNotFound(format!(
        "zero of J_{nu} in [{lo}, {hi}]"
    )))
}

/// Scan for zeros of `J_nu`, stopping when `stop(count, x)` returns true.
fn scan<F: Fn(usize, f64) -> bool>(nu: f64, stop: F) -> Result<Vec<f64>> {
    let mut zeros = Vec::new();
    let mut a = (nu - 0.5).max(0.5);
    let mut fa = bessel_jy(nu, a)?.j;
    loop {
        if stop(zeros.len(), a) {
            return Ok(zeros);
        }
        let b = a + SCAN_STEP;
        let fb = bessel_jy(nu, b)?.j;
        if fb == 0.0 {
            zeros.push(b);
            a = b + 1e-9 * b;
            fa = bessel_jy(nu, a)?.j;
            continue;
        }
        if fa != 0.0 && (fa > 0.0) != (fb > 0.0) {
            let seed = mcmahon_zero(nu, zeros.len() + 1);
            zeros.push(polish(nu, a, b, fa, seed)?);
        }
        a = b;
        fa = fb;
    }
}

/// The first `count` positive zeros of `J_nu`.
pub fn bessel_j_zeros(nu: f64, count: usize) -> Result<Vec<f64>> {
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("order must be >= 0, got {nu}")));
    }
    scan(nu, |found, _| found >= count)
}

/// All positive zeros of `J_nu` below `xmax`.
pub fn bessel_j_zeros_below(nu: f64, xmax: f64) -> Result<Vec<f64>> {
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("order must be >= 0, got {nu}")));
    }
    let mut zeros = scan(nu, |_, x| x >= xmax)?;
    zeros.retain(|&z| z < xmax);
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_zeros() {
        let z0 = bessel_j_zeros(0.0, 3).unwrap();
        let expected = [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_013];
        for (a, b) in z0.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
        let z2 = bessel_j_zeros(2.0, 1).unwrap();
        assert!((z2[0] - 5.135_622_301_840_683).abs() < 1e-13);
    }

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        // J_{1/2}(x) is proportional to sin(x)/sqrt(x).
        let z = bessel_j_zeros(0.5, 40).unwrap();
        for (n, x) in z.iter().enumerate() {
            let exact = (n + 1) as f64 * PI;
            assert!((x - exact).abs() < 1e-12 * exact, "n={n}: {x}");
        }
    }

    #[test]
    fn mcmahon_agrees_for_large_index() {
        for &nu in &[0.0, 1.7, 6.0] {
            let z = bessel_j_zeros(nu, 60).unwrap();
            let m = mcmahon_zero(nu, 60);
            assert!((z[59] - m).abs() < 1e-9, "nu={nu}");
        }
    }

    #[test]
    fn below_threshold_is_consistent_with_count() {
        let z = bessel_j_zeros_below(26.0, 120.0).unwrap();
        let again = bessel_j_zeros(26.0, z.len() + 1).unwrap();
        assert_eq!(&again[..z.len()], &z[..]);
        assert!(again[z.len()] >= 120.0);
    }
}
