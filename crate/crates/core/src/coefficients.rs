//! Closed-form predictions for the short-time heat-trace coefficients of a
//! profile, per tip in the primitive slope/curvature pair `(c, kappa)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::profile::{Profile, Topology};

/// How the tip slope `c = f'(0)` is read as an opening angle `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleConvention {
    /// `sin(alpha) = c`
    #[default]
    Sin,
    /// `tan(alpha) = c`
    Tan,
}

impl AngleConvention {
    /// `sin(alpha)` for a tip of slope `c`.
    pub fn sin_alpha(self, c: f64) -> f64 {
        match self {
            AngleConvention::Sin => c,
            AngleConvention::Tan => c / (1.0 + c * c).sqrt(),
        }
    }

    pub fn alpha(self, c: f64) -> f64 {
        match self {
            AngleConvention::Sin => c.min(1.0).asin(),
            AngleConvention::Tan => c.atan(),
        }
    }
}

impl std::str::FromStr for AngleConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sin" => Ok(AngleConvention::Sin),
            "tan" => Ok(AngleConvention::Tan),
            other => Err(format!("unknown angle convention '{other}', expected sin or tan")),
        }
    }
}

/// `(1/12)(1/c - c)`, the constant-term contribution of a tip of slope `c`.
pub fn b0_tip(c: f64) -> f64 {
    (1.0 / c - c) / 12.0
}

/// `(1/12)(1/sin(alpha) - sin(alpha))` with `alpha` read from `c` by `convention`.
pub fn b0_tip_with(c: f64, convention: AngleConvention) -> f64 {
    b0_tip(convention.sin_alpha(c))
}

/// `5 kappa / (96 sqrt(pi) c)`, the `t^(1/2)` contribution of a tip.
pub fn bhalf_tip(c: f64, kappa: f64) -> f64 {
    5.0 * kappa / (96.0 * PI.sqrt() * c)
}

/// Predicted coefficients of `Z(t) ~ a0/(4 pi t) + ... + t0 + bhalf t^(1/2) + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedCoefficients {
    pub convention: AngleConvention,
    /// Area.
    pub a0: f64,
    /// `(1/12 pi) int K dA`.
    pub interior_t0: f64,
    /// Smooth Dirichlet boundary: `-L/(8 sqrt(pi))` at `t^(-1/2)`.
    pub boundary_t_minus_half: f64,
    /// Smooth Dirichlet boundary: `(1/12 pi) int kappa_g ds` at `t^0`.
    pub boundary_t0: f64,
    pub alpha_per_tip: Vec<f64>,
    pub b0_per_tip: Vec<f64>,
    pub bhalf_per_tip: Vec<f64>,
    pub b0_total: f64,
    pub bhalf_total: f64,
    /// `interior_t0 + boundary_t0 + b0_total`.
    pub t0_total: f64,
}

pub fn predict(profile: &Profile, convention: AngleConvention) -> Result<PredictedCoefficients> {
    let a0 = profile.volume()?;
    let interior_t0 = profile.total_curvature(0.0, profile.extent())? / (12.0 * PI);
    let (boundary_t_minus_half, boundary_t0) = match profile.topology() {
        Topology::ClosedSpindle => (0.0, 0.0),
        Topology::DirichletCap => (
            -profile.boundary_length() / (8.0 * PI.sqrt()),
            profile.boundary_curvature() / (12.0 * PI),
        ),
    };
    let tips = profile.tips();
    let alpha_per_tip: Vec<f64> = tips.iter().map(|t| convention.alpha(t.c)).collect();
    let b0_per_tip: Vec<f64> = tips.iter().map(|t| b0_tip_with(t.c, convention)).collect();
    let bhalf_per_tip: Vec<f64> = tips.iter().map(|t| bhalf_tip(t.c, t.kappa)).collect();
    let b0_total: f64 = b0_per_tip.iter().sum();
    let bhalf_total: f64 = bhalf_per_tip.iter().sum();
    Ok(PredictedCoefficients {
        convention,
        a0,
        interior_t0,
        boundary_t_minus_half,
        boundary_t0,
        alpha_per_tip,
        b0_per_tip,
        bhalf_per_tip,
        b0_total,
        bhalf_total,
        t0_total: interior_t0 + boundary_t0 + b0_total,
    })
}
