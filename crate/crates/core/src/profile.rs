//! Warped-product surfaces `dr^2 + f(r)^2 dtheta^2` described by their
//! generating profile `f`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::integrate;

/// How the far end of the radial interval is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Conic tips at both `r = 0` and `r = R`.
    ClosedSpindle,
    /// Conic tip at `r = 0`, Dirichlet condition on the circle `r = R`.
    DirichletCap,
}

/// End of the radial interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Start,
    Finish,
}

/// Built-in profile families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProfileFamily {
    /// `f = c r` on `[0, 1]`, Dirichlet at `r = 1`.
    FlatCone { c: f64 },
    /// `f = beta sin r` on `[0, pi]`.
    Spindle { beta: f64 },
    /// `f = c sin r + (kappa / 2) sin^2 r` on `[0, pi]`.
    CurvedSpindle { c: f64, kappa: f64 },
    /// `f = c1 sin r + sum_j q[j] sin^(j + 2) r` on `[0, pi]`.
    SineSeries { c1: f64, q: Vec<f64> },
}

/// Cone data at one tip, in the outward coordinate of that tip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipInvariants {
    pub end: End,
    /// `|f'|` at the tip.
    pub c: f64,
    /// Second derivative of `f` in the outward coordinate.
    pub kappa: f64,
    /// `alpha` with `sin(alpha) = c`.
    pub angle_sin_convention: f64,
    /// `alpha` with `tan(alpha) = c`.
    pub angle_tan_convention: f64,
}

impl TipInvariants {
    fn new(end: End, c: f64, kappa: f64) -> Self {
        Self {
            end,
            c,
            kappa,
            angle_sin_convention: c.min(1.0).asin(),
            angle_tan_convention: c.atan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Linear { c: f64 },
    /// `f = sum_j a[j] sin^(j + 1) r`
    Sine { a: Vec<f64> },
}

/// A validated profile. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    family: ProfileFamily,
    extent: f64,
    topology: Topology,
    shape: Shape,
    tips: Vec<TipInvariants>,
}

/// Values of `f` and its first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

const POSITIVITY_SAMPLES: usize = 4096;

impl Profile {
    pub fn new(family: ProfileFamily) -> Result<Self> {
        let (extent, topology, shape) = match &family {
            ProfileFamily::FlatCone { c } => (1.0, Topology::DirichletCap, Shape::Linear { c: *c }),
            ProfileFamily::Spindle { beta } => {
                (PI, Topology::ClosedSpindle, Shape::Sine { a: vec![*beta] })
            }
            ProfileFamily::CurvedSpindle { c, kappa } => (
                PI,
                Topology::ClosedSpindle,
                Shape::Sine {
                    a: vec![*c, 0.5 * kappa],
                },
            ),
            ProfileFamily::SineSeries { c1, q } => {
                let mut a = vec![*c1];
                a.extend_from_slice(q);
                (PI, Topology::ClosedSpindle, Shape::Sine { a })
            }
        };
        let mut profile = Profile {
            family,
            extent,
            topology,
            shape,
            tips: Vec::new(),
        };
        profile.validate()?;
        profile.tips = profile.tip_ends().iter().map(|&e| profile.raw_tip(e)).collect();
        Ok(profile)
    }

    pub fn flat_cone(c: f64) -> Result<Self> {
        Self::new(ProfileFamily::FlatCone { c })
    }

    pub fn spindle(beta: f64) -> Result<Self> {
        Self::new(ProfileFamily::Spindle { beta })
    }

    pub fn curved_spindle(c: f64, kappa: f64) -> Result<Self> {
        Self::new(ProfileFamily::CurvedSpindle { c, kappa })
    }

    /// The round unit sphere, a spindle with unit slope.
    pub fn sphere() -> Self {
        Self::spindle(1.0).expect("unit sphere is a valid profile")
    }

    pub fn family(&self) -> &ProfileFamily {
        &self.family
    }

    /// Radial extent `R`.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn tips(&self) -> &[TipInvariants] {
        &self.tips
    }

    fn tip_ends(&self) -> Vec<End> {
        match self.topology {
            Topology::ClosedSpindle => vec![End::Start, End::Finish],
            Topology::DirichletCap => vec![End::Start],
        }
    }

    /// Radial coordinate of an end.
    pub fn end_position(&self, end: End) -> f64 {
        match end {
            End::Start => 0.0,
            End::Finish => self.extent,
        }
    }

    /// `f` and its derivatives at `r`; analytic in `r` on a neighbourhood of
    /// `[0, R]`.
    pub fn jet(&self, r: f64) -> Jet {
        match &self.shape {
            Shape::Linear { c } => Jet {
                f: c * r,
                d1: *c,
                d2: 0.0,
                d3: 0.0,
            },
            Shape::Sine { a } => {
                let (s, co) = r.sin_cos();
                let mut jet = Jet {
                    f: 0.0,
                    d1: 0.0,
                    d2: 0.0,
                    d3: 0.0,
                };
                // d/dr s^j = j s^(j-1) cos; with cos^2 = 1 - s^2:
                // (s^j)'' = j(j-1) s^(j-2) - j^2 s^j
                // (s^j)''' = [j(j-1)(j-2) s^(j-3) - j^3 s^(j-1)] cos
                for (idx, &coef) in a.iter().enumerate() {
                    let j = (idx + 1) as i32;
                    let fj = j as f64;
                    let pw = |e: i32| if e < 0 { 0.0 } else { s.powi(e) };
                    jet.f += coef * pw(j);
                    jet.d1 += coef * fj * pw(j - 1) * co;
                    jet.d2 += coef * (fj * (fj - 1.0) * pw(j - 2) - fj * fj * pw(j));
                    jet.d3 += coef
                        * (fj * (fj - 1.0) * (fj - 2.0) * pw(j - 3) - fj.powi(3) * pw(j - 1))
                        * co;
                }
                jet
            }
        }
    }

    pub fn f(&self, r: f64) -> f64 {
        self.jet(r).f
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        let r_end = self.extent;
        if !(r_end > 0.0) {
            return bad(format!("extent must be positive, got {r_end}"));
        }
        match &self.shape {
            Shape::Linear { c } => {
                if !c.is_finite() {
                    return bad("non-finite slope".into());
                }
            }
            Shape::Sine { a } => {
                if a.iter().any(|v| !v.is_finite()) {
                    return bad("non-finite sine coefficient".into());
                }
            }
        }
        let start = self.jet(0.0);
        if start.f.abs() > 1e-14 {
            return bad(format!("f(0) = {} must vanish", start.f));
        }
        if !(start.d1 > 0.0 && start.d1 <= 1.0) {
            return bad(format!("tip slope f'(0) = {} must lie in (0, 1]", start.d1));
        }
        if self.topology == Topology::ClosedSpindle {
            let end = self.jet(r_end);
            if end.f.abs() > 1e-12 {
                return bad(format!("f(R) = {} must vanish for a closed spindle", end.f));
            }
            if !(end.d1 < 0.0 && end.d1 >= -1.0) {
                return bad(format!("tip slope f'(R) = {} must lie in [-1, 0)", end.d1));
            }
        }
        for i in 1..POSITIVITY_SAMPLES {
            let r = r_end * i as f64 / POSITIVITY_SAMPLES as f64;
            if r >= r_end && self.topology == Topology::ClosedSpindle {
                continue;
            }
            if !(self.f(r) > 0.0) {
                return bad(format!("f must be positive in the interior; f({r}) = {}", self.f(r)));
            }
        }
        if self.topology == Topology::DirichletCap && !(self.f(r_end) > 0.0) {
            return bad("f(R) must be positive at a Dirichlet boundary".into());
        }
        Ok(())
    }

    fn raw_tip(&self, end: End) -> TipInvariants {
        let jet = self.jet(self.end_position(end));
        match end {
            End::Start => TipInvariants::new(end, jet.d1, jet.d2),
            // Outward coordinate rho = R - r: d/drho = -d/dr.
            End::Finish => TipInvariants::new(end, -jet.d1, jet.d2),
        }
    }

    /// Cone slope and tip curvature at `end`, cross-checked against centred
    /// finite differences of `f`.
    pub fn tip_invariants(&self, end: End) -> Result<TipInvariants> {
        let r0 = self.end_position(end);
        if !self.tip_ends().contains(&end) {
            return Err(Error::NotATip { r: r0 });
        }
        let tip = self.raw_tip(end);
        let sign = if end == End::Start { 1.0 } else { -1.0 };
        let h1 = 1e-5;
        let fd1 = sign * (self.f(r0 + h1) - self.f(r0 - h1)) / (2.0 * h1);
        let h2 = 1e-4;
        let fd2 = (self.f(r0 + h2) - 2.0 * self.f(r0) + self.f(r0 - h2)) / (h2 * h2);
        for (analytic, fd) in [(tip.c, fd1), (tip.kappa, fd2)] {
            if (analytic - fd).abs() > 1e-6 * analytic.abs().max(1.0) {
                return Err(Error::DerivativeMismatch {
                    r: r0,
                    analytic,
                    finite_difference: fd,
                });
            }
        }
        Ok(tip)
    }

    /// Area `2 pi int_0^R f dr`.
    pub fn volume(&self) -> Result<f64> {
        let res = integrate(|r| self.f(r), 0.0, self.extent, 0.0, 1e-13)?;
        Ok(2.0 * PI * res.value)
    }

    /// Gauss curvature `-f''/f` at an interior point.
    pub fn gauss_curvature(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < self.extent) {
            return Err(Error::Domain(format!(
                "r = {r} must lie strictly inside (0, {})",
                self.extent
            )));
        }
        let jet = self.jet(r);
        Ok(-jet.d2 / jet.f)
    }

    /// `int K dA` over the annulus `r0 < r < r1`, equal to `2 pi (f'(r0) - f'(r1))`.
    pub fn total_curvature(&self, r0: f64, r1: f64) -> Result<f64> {
        if !(0.0 <= r0 && r0 < r1 && r1 <= self.extent) {
            return Err(Error::Domain(format!(
                "need 0 <= r0 < r1 <= R, got ({r0}, {r1})"
            )));
        }
        Ok(2.0 * PI * (self.jet(r0).d1 - self.jet(r1).d1))
    }

    /// Geodesic curvature integral `int kappa_g ds` of the Dirichlet circle
    /// (zero for closed spindles).
    pub fn boundary_curvature(&self) -> f64 {
        match self.topology {
            Topology::ClosedSpindle => 0.0,
            Topology::DirichletCap => 2.0 * PI * self.jet(self.extent).d1,
        }
    }

    /// Length of the Dirichlet circle (zero for closed spindles).
    pub fn boundary_length(&self) -> f64 {
        match self.topology {
            Topology::ClosedSpindle => 0.0,
            Topology::DirichletCap => 2.0 * PI * self.f(self.extent),
        }
    }

    /// Euler characteristic of the underlying closed surface or disc.
    pub fn euler_characteristic(&self) -> i32 {
        match self.topology {
            Topology::ClosedSpindle => 2,
            Topology::DirichletCap => 1,
        }
    }

    /// `int K dA + int kappa_g ds + sum_i 2 pi (1 - c_i) - 2 pi chi`, which
    /// vanishes for a valid profile.
    pub fn gauss_bonnet_residual(&self) -> Result<f64> {
        let k_total = self.total_curvature(0.0, self.extent)?;
        let defects: f64 = self.tips.iter().map(|t| 2.0 * PI * (1.0 - t.c)).sum();
        Ok(k_total + self.boundary_curvature() + defects
            - 2.0 * PI * self.euler_characteristic() as f64)
    }
}
