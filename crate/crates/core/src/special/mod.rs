//! Special functions: Gamma, modified and ordinary Bessel functions of real
//! order, and zeros of `J_nu`.

mod bessel_ik;
mod bessel_j;
mod zeros;

pub use bessel_ik::{bessel_i, bessel_i_signed, bessel_ik, bessel_k, IkValues};
pub use bessel_j::{bessel_jy, JyValues};
pub use zeros::{bessel_j_zeros, bessel_j_zeros_below, mcmahon_zero};

/// Gamma function for real arguments (poles at non-positive integers give
/// non-finite values).
#[inline]
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `ln |Gamma(x)|` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Taylor coefficients of `1/Gamma(z) = sum_k C[k] z^(k+1)`.
const RGAMMA_TAYLOR: [f64; 28] = [
    1.0,
    0.5772156649015329,
    -0.6558780715202539,
    -0.04200263503409524,
    0.16653861138229148,
    -0.04219773455554433,
    -0.009621971527876973,
    0.0072189432466631,
    -0.0011651675918590652,
    -0.00021524167411495098,
    0.0001280502823881162,
    -2.013485478078824e-05,
    -1.2504934821426706e-06,
    1.133027231981696e-06,
    -2.056338416977607e-07,
    6.116095104481416e-09,
    5.002007644469223e-09,
    -1.18127457048702e-09,
    1.0434267116911005e-10,
    7.782263439905071e-12,
    -3.696805618642206e-12,
    5.100370287454476e-13,
    -2.0583260535665066e-14,
    -5.348122539423018e-15,
    1.2267786282382608e-15,
    -1.1812593016974588e-16,
    1.1866922547516004e-18,
    1.4123806553180319e-18,
];

/// Temme's auxiliary functions for `|mu| <= 1/2`:
/// `gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu)`, `gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2`,
/// and the reciprocals `1/G(1+mu)`, `1/G(1-mu)`.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    // 1/G(1+mu) = sum_k C[k] mu^k; odd k feed gam1, even k feed gam2.
    let mut p = 1.0;
    for pair in RGAMMA_TAYLOR.chunks(2) {
        gam2 += pair[0] * p;
        if pair.len() > 1 {
            gam1 -= pair[1] * p;
        }
        p *= mu2;
    }
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}
