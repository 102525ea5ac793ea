//! Fourier-mode eigenvalue problems of the Laplace–Beltrami operator.
//!
//! Each angular mode `k` reduces to `-u'' + V_k u = lambda u` on `(0, R)` with
//! `V_k = k^2/f^2 + f''/(2f) - f'^2/(4f^2)` and the Friedrichs condition
//! `u ~ r^(nu + 1/2)` at each tip. Eigenvalues are computed by a weighted
//! spectral Galerkin method in the original variable `w = f^(-1/2) u`, whose
//! trial functions carry the tip behaviour `w ~ r^nu` explicitly, and the
//! eigenvalue count is checked independently by a Prüfer phase integration.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{End, Profile, Topology};
use crate::quad::gauss_jacobi;

/// Version tag of the eigenvalue solver, part of cache keys.
pub const SOLVER_VERSION: &str = "galerkin-jacobi-2";

const MAX_BASIS: usize = 900;
/// Smallest accepted relative tolerance.
pub const MIN_TOL: f64 = 1e-12;

/// Boundary behaviour at one end of a mode operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Conic tip, Friedrichs branch `u ~ rho^(nu + 1/2)`.
    Friedrichs { nu: f64 },
    Dirichlet,
}

/// The radial operator of one angular mode.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    profile: Profile,
    pub k: u32,
    pub nu0: f64,
    /// Exponent at the far tip, absent for a Dirichlet cap.
    pub nu_r: Option<f64>,
    pub bc: [BoundaryCondition; 2],
    /// Upper bound on the number of eigenvalues returned per solve.
    pub max_count: usize,
}

pub fn build_mode_operator(profile: &Profile, k: u32) -> ModeOperator {
    let c0 = profile.tips()[0].c;
    let nu0 = k as f64 / c0;
    let nu_r = match profile.topology() {
        Topology::ClosedSpindle => Some(k as f64 / profile.tips()[1].c),
        Topology::DirichletCap => None,
    };
    let far = match nu_r {
        Some(nu) => BoundaryCondition::Friedrichs { nu },
        None => BoundaryCondition::Dirichlet,
    };
    ModeOperator {
        profile: profile.clone(),
        k,
        nu0,
        nu_r,
        bc: [BoundaryCondition::Friedrichs { nu: nu0 }, far],
        max_count: 4000,
    }
}

impl ModeOperator {
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn extent(&self) -> f64 {
        self.profile.extent()
    }

    /// `V_k(r)` for `0 < r < R`.
    pub fn potential(&self, r: f64) -> f64 {
        let j = self.profile.jet(r);
        let k2 = (self.k as f64).powi(2);
        k2 / (j.f * j.f) + j.d2 / (2.0 * j.f) - j.d1 * j.d1 / (4.0 * j.f * j.f)
    }

    pub fn potential_derivative(&self, r: f64) -> f64 {
        let j = self.profile.jet(r);
        let k2 = (self.k as f64).powi(2);
        let f2 = j.f * j.f;
        let f3 = f2 * j.f;
        -2.0 * k2 * j.d1 / f3 + j.d3 / (2.0 * j.f) - j.d2 * j.d1 / f2 + j.d1.powi(3) / (2.0 * f3)
    }

    /// Minimum of `V_k` over the open interval; `-inf` when the potential is
    /// unbounded below at a tip (`k = 0`).
    pub fn potential_minimum(&self) -> f64 {
        if self.k == 0 {
            return f64::NEG_INFINITY;
        }
        let r_end = self.extent();
        let samples = 2000;
        let mut best = (f64::INFINITY, 0usize);
        for i in 1..samples {
            let v = self.potential(r_end * i as f64 / samples as f64);
            if v < best.0 {
                best = (v, i);
            }
        }
        let h = r_end / samples as f64;
        let mut lo = (best.1 as f64 - 1.0) * h;
        let mut hi = ((best.1 as f64 + 1.0) * h).min(r_end);
        if self.profile.topology() == Topology::DirichletCap && best.1 == samples - 1 {
            // The minimum may sit on the Dirichlet circle itself.
            best.0 = best.0.min(self.potential(r_end));
        }
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if self.potential(a.max(1e-300)) < self.potential(b.min(r_end)) {
                hi = b;
            } else {
                lo = a;
            }
        }
        best.0.min(self.potential((0.5 * (lo + hi)).clamp(1e-300, r_end)))
    }

    /// WKB estimate of the number of eigenvalues below `lambda`.
    pub fn wkb_count(&self, lambda: f64) -> f64 {
        let r_end = self.extent();
        let samples = 4000;
        let h = r_end / samples as f64;
        let s: f64 = (0..samples)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                (lambda - self.potential(r)).max(0.0).sqrt()
            })
            .sum();
        s * h / PI
    }

    fn discretization(&self, n: usize) -> Result<Discretization> {
        Discretization::new(self, n)
    }

    /// Number of eigenvalues strictly below `lambda`, from the oscillation
    /// count of the Prüfer phase.
    pub fn pruefer_count(&self, lambda: f64) -> usize {
        let r_end = self.extent();
        let mid = 0.5 * r_end;
        let delta = 1e-6 * r_end;
        let theta_left = {
            let y = (self.nu0 + 0.5) / delta;
            let s = self.phase_scale(lambda, delta);
            let theta0 = s.atan2(y);
            self.integrate_phase(lambda, delta, mid, theta0)
        };
        let theta_right = match self.nu_r {
            Some(nu) => {
                let r0 = r_end - delta;
                let y = -(nu + 0.5) / delta;
                let s = self.phase_scale(lambda, r0);
                self.integrate_phase(lambda, r0, mid, s.atan2(y))
            }
            None => self.integrate_phase(lambda, r_end, mid, PI),
        };
        let delta_theta = theta_left - theta_right;
        ((delta_theta / PI).floor() + 1.0).max(0.0) as usize
    }

    fn phase_scale(&self, lambda: f64, r: f64) -> f64 {
        let q = lambda - self.potential(r);
        (q * q + 1.0).powf(0.25)
    }

    /// Scaled Prüfer phase `tan(theta) = S u / u'`. The scale `S` is frozen on
    /// each step and the phase is remapped exactly between steps, which keeps
    /// the zero count while tracking `S ~ |lambda - V|^(1/2)`.
    fn integrate_phase(&self, lambda: f64, from: f64, to: f64, theta0: f64) -> f64 {
        let dir = (to - from).signum();
        let mut r = from;
        let mut theta = theta0;
        let mut scale = self.phase_scale(lambda, r);
        while (to - r) * dir > 0.0 {
            let q0 = lambda - self.potential(r);
            let new_scale = self.phase_scale(lambda, r);
            theta = rescale_phase(theta, scale, new_scale);
            scale = new_scale;
            let dist_tip = match self.nu_r {
                Some(_) => r.min(self.extent() - r),
                None => r,
            }
            .max(1e-300);
            let rate = scale + q0.abs() / scale;
            let h = (0.05 / rate).min(0.1 * dist_tip).min((to - r).abs()) * dir;
            let rhs = |x: f64, th: f64| {
                let q = lambda - self.potential(x);
                let (sn, cs) = th.sin_cos();
                scale * cs * cs + q / scale * sn * sn
            };
            let k1 = rhs(r, theta);
            let k2 = rhs(r + 0.5 * h, theta + 0.5 * h * k1);
            let k3 = rhs(r + 0.5 * h, theta + 0.5 * h * k2);
            let k4 = rhs(r + h, theta + h * k3);
            theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            r += h;
        }
        theta
    }
}

/// Phase of the same `(u, u')` under a change of Prüfer scale.
fn rescale_phase(theta: f64, from: f64, to: f64) -> f64 {
    let turns = (theta / PI).floor();
    let phi = theta - turns * PI;
    let (sn, cs) = phi.sin_cos();
    turns * PI + (to * sn).atan2(from * cs).rem_euclid(PI).max(0.0)
}

/// Gauss–Jacobi discretization of the quadratic form of one mode.
struct Discretization {
    /// Stacked factor `G` with `G^T G` the stiffness matrix in an orthonormal
    /// basis; its squared singular values are the Ritz values.
    factor: DMatrix<f64>,
}

impl Discretization {
    fn new(op: &ModeOperator, n: usize) -> Result<Self> {
        let profile = &op.profile;
        let r_end = profile.extent();
        let nu0 = op.nu0;
        let cap = op.nu_r.is_none();
        let nu1 = op.nu_r.unwrap_or(0.0);
        let nu_bar = if cap { nu0 } else { 0.5 * (nu0 + nu1) };
        let a = if nu0 > 0.0 { 2.0 * nu0 - 1.0 } else { 0.0 };
        let b = if !cap && nu1 > 0.0 { 2.0 * nu1 - 1.0 } else { 0.0 };
        let q = n + 40 + nu0.max(nu1).ceil() as usize;
        let rule = gauss_jacobi(q, b, a)?;
        let dr_dxi = 0.5 * r_end;
        let dxi_dr = 1.0 / dr_dxi;

        let mut log_mu = Vec::with_capacity(q);
        let mut grad = Vec::with_capacity(q);
        let mut k_over_f = Vec::with_capacity(q);
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let r = dr_dxi * (1.0 + xi);
            let jet = profile.jet(r);
            let left = r;
            let right = r_end - r;
            // phi = f^nu_bar r^(nu0 - nu_bar) (R - r)^(nu1 - nu_bar), or
            // f^nu0 (R - r) on a cap.
            let (log_phi, g) = if cap {
                (
                    nu0 * jet.f.ln() + right.ln(),
                    nu0 * jet.d1 / jet.f - 1.0 / right,
                )
            } else {
                (
                    nu_bar * jet.f.ln() + (nu0 - nu_bar) * left.ln() + (nu1 - nu_bar) * right.ln(),
                    nu_bar * jet.d1 / jet.f + (nu0 - nu_bar) / left - (nu1 - nu_bar) / right,
                )
            };
            let log_a = 2.0 * log_phi + jet.f.ln() + dr_dxi.ln()
                - a * (1.0 + xi).ln()
                - b * (1.0 - xi).ln();
            log_mu.push(if w > 0.0 { w.ln() + log_a } else { f64::NEG_INFINITY });
            grad.push(g);
            k_over_f.push(op.k as f64 / jet.f);
        }
        let shift = log_mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::Domain(format!("degenerate quadrature for mode {}", op.k)));
        }
        let mu: Vec<f64> = log_mu.iter().map(|l| (l - shift).exp()).collect();

        let lanczos = stieltjes(&rule.nodes, &mu, n)?;
        let (alpha, beta) = (&lanczos.alpha, &lanczos.beta);

        // Columns hold sqrt(mu) p_j and sqrt(mu) p_j' at the nodes. The
        // Lanczos vectors are the former; the latter follow the derivative
        // recurrence with the same scaling, so nothing overflows where mu is
        // tiny.
        let mut factor = DMatrix::<f64>::zeros(2 * q, n);
        for iq in 0..q {
            let xi = rule.nodes[iq];
            let (mut d_prev, mut d) = (0.0, 0.0);
            for j in 0..n {
                let u = lanczos.vectors[j][iq];
                factor[(iq, j)] = dxi_dr * d + grad[iq] * u;
                factor[(q + iq, j)] = k_over_f[iq] * u;
                if j + 1 < n {
                    let d_next = ((xi - alpha[j]) * d + u - beta[j] * d_prev) / beta[j + 1];
                    d_prev = d;
                    d = d_next;
                }
            }
        }
        Ok(Self { factor })
    }

    fn ritz_values(self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .factor
            .singular_values()
            .iter()
            .map(|s| s * s)
            .collect();
        v.sort_by(|x, y| x.total_cmp(y));
        v
    }
}

struct Lanczos {
    alpha: Vec<f64>,
    /// `beta[0]` is unused; `beta[j]` couples `p_{j-1}` and `p_j`.
    beta: Vec<f64>,
    /// `sqrt(mu) p_j` at the nodes.
    vectors: Vec<Vec<f64>>,
}

/// Polynomials orthonormal with respect to the discrete measure
/// `sum_q mu_q delta(x - x_q)`, by Lanczos with full reorthogonalization.
fn stieltjes(nodes: &[f64], mu: &[f64], n: usize) -> Result<Lanczos> {
    let q = nodes.len();
    if n >= q {
        return Err(Error::Precondition(format!(
            "basis size {n} needs more than {q} quadrature nodes"
        )));
    }
    let norm0 = mu.iter().sum::<f64>().sqrt();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    vectors.push(mu.iter().map(|m| m.sqrt() / norm0).collect());
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for j in 0..n {
        let u = &vectors[j];
        let mut w: Vec<f64> = u.iter().zip(nodes).map(|(ui, x)| ui * x).collect();
        alpha[j] = dot(&w, u);
        if j + 1 == n {
            break;
        }
        for _ in 0..2 {
            for v in &vectors {
                let c = dot(&w, v);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let norm = dot(&w, &w).sqrt();
        if !(norm > 1e-300) {
            return Err(Error::Domain("Lanczos breakdown".into()));
        }
        beta[j + 1] = norm;
        vectors.push(w.into_iter().map(|x| x / norm).collect());
    }
    Ok(Lanczos { alpha, beta, vectors })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A certified eigenvalue with absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub err: f64,
}

/// Certified low spectrum of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub k: u32,
    pub values: Vec<Eigenvalue>,
    /// The first eigenvalue not included, when solving up to a threshold.
    pub first_excluded: Option<Eigenvalue>,
}

enum Target {
    Below(f64),
    Count(usize),
}

fn solve(op: &ModeOperator, target: Target, tol: f64) -> Result<ModeSpectrum> {
    if !(tol >= MIN_TOL) {
        return Err(Error::Precondition(format!("tol must be at least {MIN_TOL:e}, got {tol:e}")));
    }
    let expected = match target {
        Target::Below(lmax) => op.wkb_count(lmax).ceil() as usize,
        Target::Count(c) => c,
    };
    if expected > op.max_count {
        return Err(Error::TooManyEigenvalues {
            k: op.k,
            max: op.max_count,
        });
    }
    let mut n = 9 * expected / 5 + 24;
    let mut worst = f64::INFINITY;
    while n <= MAX_BASIS {
        let n2 = n + (n / 4).max(8);
        let coarse = op.discretization(n)?.ritz_values();
        let fine = op.discretization(n2)?.ritz_values();
        let needed = match target {
            // Values below the threshold plus the first excluded one.
            Target::Below(lmax) => fine.iter().take_while(|&&l| l < lmax).count() + 1,
            Target::Count(c) => c,
        };
        if needed > op.max_count {
            return Err(Error::TooManyEigenvalues {
                k: op.k,
                max: op.max_count,
            });
        }
        // Demand a margin of unconverged Ritz values above those kept.
        if needed + 8 <= n {
            // singular values carry roundoff of order eps * sigma_max
            let top = fine.last().copied().unwrap_or(0.0).abs();
            let errs: Vec<f64> = (0..needed)
                .map(|i| {
                    let l = fine[i].abs();
                    (fine[i] - coarse[i]).abs().max(4.0 * f64::EPSILON * (l + (l * top).sqrt()))
                })
                .collect();
            worst = (0..needed)
                .map(|i| errs[i] / fine[i].abs().max(1.0))
                .fold(0.0, f64::max);
            if worst <= tol {
                let mut values: Vec<Eigenvalue> = (0..needed)
                    .map(|i| Eigenvalue {
                        lambda: fine[i],
                        err: errs[i],
                    })
                    .collect();
                let first_excluded = match target {
                    Target::Below(_) => values.pop(),
                    Target::Count(_) => None,
                };
                verify_count(op, &values, first_excluded.as_ref(), &fine)?;
                return Ok(ModeSpectrum {
                    k: op.k,
                    values,
                    first_excluded,
                });
            }
        }
        n = (n2 as f64 * 1.3).ceil() as usize;
    }
    Err(Error::NotCertified {
        k: op.k,
        tol,
        worst,
    })
}

/// Checks with the Prüfer count that no eigenvalue was skipped below the
/// last one kept.
fn verify_count(
    op: &ModeOperator,
    values: &[Eigenvalue],
    first_excluded: Option<&Eigenvalue>,
    ritz: &[f64],
) -> Result<()> {
    let m = values.len();
    let above = first_excluded.map(|e| e.lambda).unwrap_or(ritz[m]);
    let probe = if m == 0 {
        above - 0.25 * (ritz[1] - ritz[0]).max(1.0)
    } else {
        0.5 * (values[m - 1].lambda + above)
    };
    let counted = op.pruefer_count(probe);
    if counted != m {
        return Err(Error::CountMismatch {
            k: op.k,
            lambda: probe,
            ritz: m,
            pruefer: counted,
        });
    }
    Ok(())
}

/// All eigenvalues of the mode below `lambda_max`, each certified to relative
/// tolerance `tol` (absolute below 1).
pub fn eigenvalues(op: &ModeOperator, lambda_max: f64, tol: f64) -> Result<Vec<Eigenvalue>> {
    Ok(solve(op, Target::Below(lambda_max), tol)?.values)
}

/// Like [`eigenvalues`] but also reports the first eigenvalue above the
/// threshold.
pub fn mode_spectrum(op: &ModeOperator, lambda_max: f64, tol: f64) -> Result<ModeSpectrum> {
    solve(op, Target::Below(lambda_max), tol)
}

/// The `count` smallest eigenvalues of the mode.
pub fn lowest_eigenvalues(op: &ModeOperator, count: usize, tol: f64) -> Result<Vec<Eigenvalue>> {
    Ok(solve(op, Target::Count(count), tol)?.values)
}

/// One eigenvalue of the surface, tagged with its mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub k: u32,
    pub n: u32,
    pub lambda: f64,
    pub mult: u32,
    pub err: f64,
}

/// The spectrum of the surface below a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub lambda_max: f64,
    pub k_max: u32,
}

impl Spectrum {
    /// Eigenvalue count including multiplicities.
    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.mult as u64).sum()
    }

    /// Number of eigenvalues (with multiplicity) strictly below `lambda`.
    pub fn counting_function(&self, lambda: f64) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.lambda < lambda)
            .map(|e| e.mult as u64)
            .sum()
    }

    /// Largest certified error bound.
    pub fn max_err(&self) -> f64 {
        self.entries.iter().map(|e| e.err).fold(0.0, f64::max)
    }
}

/// Smallest `k` whose potential stays above `lambda_max`.
pub fn mode_cutoff(profile: &Profile, lambda_max: f64) -> u32 {
    let mut k = 0;
    loop {
        if build_mode_operator(profile, k).potential_minimum() > lambda_max {
            return k;
        }
        k += 1;
    }
}

/// Merged spectrum of all modes below `lambda_max`.
pub fn full_spectrum(profile: &Profile, lambda_max: f64, tol: f64) -> Result<Spectrum> {
    let k_max = mode_cutoff(profile, lambda_max);
    let modes: Vec<ModeSpectrum> = (0..=k_max)
        .into_par_iter()
        .map(|k| mode_spectrum(&build_mode_operator(profile, k), lambda_max, tol))
        .collect::<Result<_>>()?;
    let mut entries: Vec<SpectrumEntry> = modes
        .iter()
        .flat_map(|m| {
            m.values.iter().enumerate().map(move |(n, e)| SpectrumEntry {
                k: m.k,
                n: n as u32,
                lambda: e.lambda,
                mult: if m.k == 0 { 1 } else { 2 },
                err: e.err,
            })
        })
        .collect();
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.k.cmp(&b.k)).then(a.n.cmp(&b.n)));
    Ok(Spectrum {
        entries,
        lambda_max,
        k_max,
    })
}

/// Tip at which a mode operator has the given exponent, for diagnostics.
pub fn tip_exponent(op: &ModeOperator, end: End) -> Option<f64> {
    match end {
        End::Start => Some(op.nu0),
        End::Finish => op.nu_r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j_zeros;

    fn spindle_exact(beta: f64, k: u32, n: usize) -> f64 {
        let nu = k as f64 / beta;
        let m = nu + n as f64;
        m * (m + 1.0)
    }

    #[test]
    fn potential_examples() {
        let cone = Profile::flat_cone(0.5).unwrap();
        let op = build_mode_operator(&cone, 1);
        assert_eq!(op.nu0, 2.0);
        assert!(op.nu_r.is_none());
        for &r in &[0.1, 0.5, 0.9] {
            assert!((op.potential(r) - 3.75 / (r * r)).abs() < 1e-12 / (r * r));
        }
        let sphere = Profile::sphere();
        let op = build_mode_operator(&sphere, 0);
        assert!((op.potential(PI / 2.0) + 0.5).abs() < 1e-15);
        assert_eq!(build_mode_operator(&cone, 3).nu0, 6.0);
    }

    #[test]
    fn potential_has_indicial_limit() {
        let p = Profile::curved_spindle(0.6, 0.4).unwrap();
        for k in 0..4 {
            let op = build_mode_operator(&p, k);
            let target = op.nu0 * op.nu0 - 0.25;
            let a = 1e-3f64.powi(2) * op.potential(1e-3);
            let b = 1e-4f64.powi(2) * op.potential(1e-4);
            // r^2 V = target + O(r): Richardson over r = 1e-3, 1e-4.
            let extrapolated = (10.0 * b - a) / 9.0;
            assert!((extrapolated - target).abs() < 1e-6 * target.abs().max(1.0), "k={k}: {extrapolated} vs {target}");
        }
    }

    #[test]
    fn potential_derivative_matches_differences() {
        let p = Profile::curved_spindle(0.6, 0.4).unwrap();
        let op = build_mode_operator(&p, 2);
        let h = 1e-5;
        for &r in &[0.3, 1.5, 2.7] {
            let fd = (op.potential(r + h) - op.potential(r - h)) / (2.0 * h);
            assert!((fd - op.potential_derivative(r)).abs() < 1e-5 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn flat_cone_examples() {
        let cone = Profile::flat_cone(0.5).unwrap();
        let v = lowest_eigenvalues(&build_mode_operator(&cone, 1), 1, 1e-10).unwrap();
        assert!((v[0].lambda - 26.374_616_427_163_39).abs() < 1e-8);
        let v = lowest_eigenvalues(&build_mode_operator(&cone, 0), 1, 1e-10).unwrap();
        assert!((v[0].lambda - 5.783_185_962_946_784).abs() < 1e-8);
    }

    #[test]
    fn flat_cone_matches_bessel_zeros() {
        for &c in &[0.3, 0.5, 0.8] {
            let cone = Profile::flat_cone(c).unwrap();
            for k in 0..=8u32 {
                let nu = k as f64 / c;
                let zeros = bessel_j_zeros(nu, 15).unwrap();
                let v = lowest_eigenvalues(&build_mode_operator(&cone, k), 15, 1e-9).unwrap();
                for (z, e) in zeros.iter().zip(&v) {
                    let exact = z * z;
                    assert!(
                        ((e.lambda - exact) / exact).abs() < 1e-9,
                        "c={c} k={k}: {} vs {exact}",
                        e.lambda
                    );
                }
            }
        }
    }

    #[test]
    fn sphere_mode_zero() {
        let v = eigenvalues(&build_mode_operator(&Profile::sphere(), 0), 13.0, 1e-10).unwrap();
        let l: Vec<f64> = v.iter().map(|e| e.lambda).collect();
        assert_eq!(l.len(), 4);
        for (x, y) in l.iter().zip([0.0, 2.0, 6.0, 12.0]) {
            assert!((x - y).abs() < 1e-9, "{l:?}");
        }
    }

    #[test]
    fn spindle_modes_match_exact() {
        for &beta in &[0.3, 0.5, 0.9] {
            let p = Profile::spindle(beta).unwrap();
            for k in 0..6 {
                let op = build_mode_operator(&p, k);
                let v = lowest_eigenvalues(&op, 20, 1e-10).unwrap();
                for (n, e) in v.iter().enumerate() {
                    let exact = spindle_exact(beta, k, n);
                    assert!(
                        (e.lambda - exact).abs() < 1e-9 * exact.max(1.0),
                        "beta={beta} k={k} n={n}: {} vs {exact}",
                        e.lambda
                    );
                }
            }
        }
    }

    #[test]
    fn pruefer_counts_spindle() {
        let p = Profile::spindle(0.5).unwrap();
        for k in 0..4 {
            let op = build_mode_operator(&p, k);
            for n in 0..30 {
                let between = 0.5 * (spindle_exact(0.5, k, n) + spindle_exact(0.5, k, n + 1));
                assert_eq!(op.pruefer_count(between), n + 1, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn pruefer_counts_cap() {
        let cone = Profile::flat_cone(0.5).unwrap();
        for k in 0..4 {
            let op = build_mode_operator(&cone, k);
            let z = bessel_j_zeros(op.nu0, 21).unwrap();
            for n in 0..20 {
                let between = 0.5 * (z[n] * z[n] + z[n + 1] * z[n + 1]);
                assert_eq!(op.pruefer_count(between), n + 1, "k={k} n={n}");
            }
            assert_eq!(op.pruefer_count(0.5 * z[0] * z[0]), 0);
        }
    }

    #[test]
    fn sphere_full_spectrum() {
        let s = full_spectrum(&Profile::sphere(), 13.0, 1e-10).unwrap();
        let mut grouped: Vec<(f64, u32)> = Vec::new();
        for e in &s.entries {
            match grouped.last_mut() {
                Some((l, m)) if (e.lambda - *l).abs() < 1e-8 => *m += e.mult,
                _ => grouped.push((e.lambda, e.mult)),
            }
        }
        assert_eq!(grouped.len(), 4);
        for ((l, m), (el, em)) in grouped.iter().zip([(0.0, 1), (2.0, 3), (6.0, 5), (12.0, 7)]) {
            assert!((l - el).abs() < 1e-8);
            assert_eq!(*m, em);
        }
    }

    #[test]
    fn sphere_completeness() {
        for big_l in [3u64, 7, 12] {
            let lmax = (big_l * (big_l + 1) + 1) as f64;
            let s = full_spectrum(&Profile::sphere(), lmax, 1e-10).unwrap();
            assert_eq!(s.total_multiplicity(), (big_l + 1).pow(2));
        }
    }

    #[test]
    fn spectrum_below_first_positive_is_constants() {
        let s = full_spectrum(&Profile::curved_spindle(0.6, 0.4).unwrap(), 0.5, 1e-10).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert!(s.entries[0].lambda.abs() < 1e-10);
    }

    #[test]
    fn flat_cone_full_spectrum_matches_oracle() {
        let cone = Profile::flat_cone(0.5).unwrap();
        let s = full_spectrum(&cone, 300.0, 1e-10).unwrap();
        let mut oracle = Vec::new();
        for k in 0..20u32 {
            for z in crate::special::bessel_j_zeros_below(2.0 * k as f64, 300f64.sqrt()).unwrap() {
                oracle.push((z * z, k));
            }
        }
        oracle.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(oracle.len(), s.entries.len());
        for ((l, k), e) in oracle.iter().zip(&s.entries) {
            assert_eq!(*k, e.k);
            assert!((l - e.lambda).abs() < 1e-8 * l);
            assert!(e.lambda > 0.0);
        }
    }

    #[test]
    fn rejects_tiny_tolerance() {
        let op = build_mode_operator(&Profile::sphere(), 0);
        assert!(matches!(eigenvalues(&op, 10.0, 1e-14), Err(Error::Precondition(_))));
    }

    #[test]
    fn reports_too_many_eigenvalues() {
        let mut op = build_mode_operator(&Profile::sphere(), 0);
        op.max_count = 5;
        assert!(matches!(
            eigenvalues(&op, 1e4, 1e-8),
            Err(Error::TooManyEigenvalues { .. })
        ));
    }
}
