//! Desk-scale numerical laboratory for wave-particle duality in asymmetric
//! two-path interference.
//!
//! The crate models a two-loop Sagnac optical pipeline in Jones calculus:
//! the first loop splits a photon over two paths with ratio
//! p₂/p₁ = tan²2θ_a and writes which-way information into its polarization
//! (overlap sin2θ_n); the second loop measures that information by either
//! unambiguous state discrimination (UQSD) or minimum-error discrimination
//! (MED). Closed forms, composed-pipeline cross-checks, and seeded Monte
//! Carlo photon counting verify the duality relations
//!
//! * linear: D_u + V = 1 (while p₂/p₁ > sin²2θ_n), and
//! * quadratic: D_m² + V² = 1,
//!
//! plus the mutual-information comparison between the two strategies.
//!
//! Entry points: [`interferometer::ExperimentConfig`] describes a setting;
//! [`discrimination`] holds bounds, wave-plate programs, and POVMs;
//! [`montecarlo`] samples counts and estimates; [`scenario`] reproduces the
//! study's figures as data files; the `duality-lab` binary wraps it all.

pub mod discrimination;
pub mod error;
pub mod interferometer;
pub mod linalg;
pub mod montecarlo;
pub mod optics;
pub mod scenario;
pub mod selfcheck;

pub use error::{Error, Result};
