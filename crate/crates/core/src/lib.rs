//! Third-order spectral analysis of finite moving-average processes.
//!
//! The crate works with linear processes `X(t) = sum_k c(k) Z(t - k)` driven by
//! i.i.d. mean-zero innovations and a finitely supported real filter. It provides
//!
//! - exact transfer functions, spectra and triple cumulants of such models,
//! - the analytic bispectrum on a uniform `[0, 2pi)^2` grid together with a
//!   quadrature cross-check against the cumulants,
//! - an averaged-biperiodogram estimator for sampled paths,
//! - phase analysis modulo `pi` (half-integer slope fits, cocycle residuals),
//! - three-valued reversibility and causality diagnostics.
//!
//! Everything here is `no_std` + `alloc`; file formats, plotting and the
//! command-line front end live in the companion `bispec` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod bispec;
pub mod cumulant;
pub mod diagnose;
pub mod dft;
pub mod linmodel;
pub mod phase;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use bispec::{BifrequencyField, EstimationPlan, FieldKind, FieldSource, Taper};
pub use cumulant::CumulantTable;
pub use diagnose::{DiagnosticReport, Verdict};
pub use linmodel::{
    FilterCoefficients, InnovationSpec, Innovations, LinearModel, Symmetry, TimeSeriesSample,
};
pub use phase::{PhaseDecomposition, PhaseFunction};
