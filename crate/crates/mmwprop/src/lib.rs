//! Millimeter-wave foliage and ground-reflection propagation toolkit.
//!
//! This crate models the analysis chain of a 73 GHz directional measurement
//! campaign end to end: link geometry, free-space and foliage link budgets,
//! Fresnel reflection coefficients, omnidirectional path-loss synthesis from
//! directional sweeps, and a deterministic sliding-correlator channel-sounder
//! simulator for generating synthetic sweeps with known ground truth. The
//! campaign's published tables ship as bundled reference data.
//!
//! The guide in `book/` walks through each subsystem; its code snippets run
//! as doc-tests so they stay correct.
//!
//! # Quick start
//!
//! ```rust
//! use mmwprop::dataset::load_reference;
//! use mmwprop::pdp::Polarization;
//! use mmwprop::propagation::fit_attenuation_from_excess;
//!
//! let tables = load_reference().unwrap();
//! let samples = tables.foliage_excess_samples(Polarization::Vv);
//! let fit = fit_attenuation_from_excess(&samples).unwrap();
//! assert!((fit.alpha_db_per_m - 0.421).abs() < 1e-12);
//! ```

pub mod dataset;
pub mod error;
pub mod geometry;
pub mod pdp;
pub mod propagation;
pub mod reflection;
pub mod scene;
pub mod sounder;
pub mod sweepfile;
pub mod units;

pub use error::{Error, Result};
pub use pdp::Polarization;

// Run the guide's code blocks as doc-tests so the book cannot drift from
// the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/link-budget.md")]
    mod link_budget {}
    #[doc = include_str!("../../../book/src/reflection.md")]
    mod reflection {}
    #[doc = include_str!("../../../book/src/omnidirectional.md")]
    mod omnidirectional {}
    #[doc = include_str!("../../../book/src/sounder.md")]
    mod sounder {}
    #[doc = include_str!("../../../book/src/data-formats.md")]
    mod data_formats {}
}
