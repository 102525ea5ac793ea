//! Run configuration, read from a JSON document.

use std::path::{Path, PathBuf};

use conic_heat::trace::{BasisTerm, TimeGrid};
use conic_heat::{AngleConvention, Profile, ProfileFamily};
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliError};

fn default_tol() -> f64 {
    1e-10
}

fn default_eps() -> f64 {
    1e-9
}

fn default_true() -> bool {
    true
}

/// Basis and window used by `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitPolicy {
    /// Defaults to the topology's standard basis.
    #[serde(default)]
    pub basis: Option<Vec<BasisTerm>>,
    /// Fixed `[t_lo, t_hi]`; automatic when absent.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default = "default_true")]
    pub peel: bool,
}

impl Default for FitPolicy {
    fn default() -> Self {
        FitPolicy {
            basis: None,
            window: None,
            peel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileFamily,
    pub lambda_max: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Absolute bound on the truncation error of a usable heat-trace sample.
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub grid: TimeGrid,
    #[serde(default)]
    pub fit: FitPolicy,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub convention: AngleConvention,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error("cannot read config", path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_profile(&self) -> Result<Profile, CliError> {
        Profile::new(self.profile.clone()).map_err(CliError::from)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        let slope = match &self.profile {
            ProfileFamily::FlatCone { c } => *c,
            ProfileFamily::Spindle { beta } => *beta,
            ProfileFamily::CurvedSpindle { c, .. } => *c,
            ProfileFamily::SineSeries { c1, .. } => *c1,
        };
        if !(slope > 0.0 && slope <= 1.0) {
            return bad(format!("cone slope {slope} must lie in (0, 1]"));
        }
        self.build_profile()?;
        if !(self.lambda_max >= 0.0 && self.lambda_max.is_finite()) {
            return bad(format!("lambda_max {} must be finite and nonnegative", self.lambda_max));
        }
        if !(self.tol >= conic_heat::spectral::MIN_TOL && self.tol < 1.0) {
            return bad(format!(
                "tol {} must lie in [{:e}, 1)",
                self.tol,
                conic_heat::spectral::MIN_TOL
            ));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps {} must be positive", self.eps));
        }
        let g = &self.grid;
        if !(g.t_min > 0.0 && g.t_max > g.t_min && g.t_max.is_finite() && g.per_decade > 0) {
            return bad(format!(
                "time grid [{}, {}] with {} per decade is invalid",
                g.t_min, g.t_max, g.per_decade
            ));
        }
        if let Some((lo, hi)) = self.fit.window {
            if !(lo >= g.t_min && hi <= g.t_max && lo < hi) {
                return bad(format!(
                    "fit window [{lo}, {hi}] must lie inside the time grid [{}, {}]",
                    g.t_min, g.t_max
                ));
            }
        }
        if let Some(basis) = &self.fit.basis {
            if basis.is_empty() || basis.iter().any(|b| !b.power.is_finite()) {
                return bad("fit basis must be a nonempty list of finite powers".into());
            }
        }
        Ok(())
    }
}
