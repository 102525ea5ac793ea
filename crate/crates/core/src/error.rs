use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("r = {r} is not a conic tip of this profile")]
    NotATip { r: f64 },

    #[error("derivative evaluator disagrees with finite differences at r = {r}: analytic {analytic}, finite difference {finite_difference}")]
    DerivativeMismatch {
        r: f64,
        analytic: f64,
        finite_difference: f64,
    },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("{function} overflowed at order {order}, argument {x}")]
    Overflow {
        function: &'static str,
        order: f64,
        x: f64,
    },

    #[error("root finder did not converge: {0}")]
    RootNotFound(String),

    #[error("s = {s} lies outside the convergence strip ({lower}, {upper})")]
    OutsideStrip { s: f64, lower: f64, upper: f64 },

    #[error("pole of {0}")]
    Pole(&'static str),

    #[error("eigenvalues of mode {k} not certified to tolerance {tol} (worst relative change {worst})")]
    NotCertified { k: u32, tol: f64, worst: f64 },

    #[error("mode {k} has more than {max} eigenvalues below the threshold")]
    TooManyEigenvalues { k: u32, max: usize },

    #[error("oscillation count mismatch in mode {k} at lambda = {lambda}: Ritz count {ritz}, Pruefer count {pruefer}")]
    CountMismatch {
        k: u32,
        lambda: f64,
        ritz: usize,
        pruefer: usize,
    },

    #[error("regularized sum depends on the truncation index: {first} vs {second}")]
    TruncationDependence { first: f64, second: f64 },

    #[error("expansion order {available} insufficient for s = {s}")]
    InsufficientExpansion { available: f64, s: f64 },

    #[error("tail bound exceeds tolerance; smallest usable t is {min_usable_t:?}")]
    TailBoundExceeded { min_usable_t: Option<f64> },

    #[error("fit needs at least {needed} usable samples in the window, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("design matrix condition number {condition:e} exceeds {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("fit residual RMS {rms:e} exceeds {limit:e}")]
    ResidualTooLarge { rms: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
