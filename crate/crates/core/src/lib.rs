//! Spectra and short-time heat-trace asymptotics of the Laplacian on surfaces
//! of revolution with conic tips.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
#![allow(clippy::manual_is_multiple_of)]

pub mod coefficients;
pub mod error;
pub mod model;
pub mod profile;
pub mod quad;
pub mod regularization;
pub mod special;
pub mod spectral;
pub mod summation;
pub mod trace;

pub use coefficients::{predict, AngleConvention, PredictedCoefficients};
pub use error::{Error, Result};
pub use profile::{Profile, ProfileFamily, Topology};
pub use spectral::{full_spectrum, Spectrum, SpectrumEntry, SOLVER_VERSION};
pub use trace::{
    default_basis, fit_expansion, heat_trace, BasisTerm, ExpansionFit, FitOptions, HeatTraceSamples,
    TimeGrid,
};
