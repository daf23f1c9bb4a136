//! Bound-state energies of the one-dimensional Dirac equation with a confining
//! scalar potential.
//!
//! The exact transfer-matrix quantization condition is evaluated on spinors
//! from an independent shooting solver, and cross-checked against the
//! closed-form linear-potential spectrum.

pub mod config;
pub mod error;
pub mod linear;
pub mod nonrel;
pub mod ode;
pub mod potential;
pub mod quadrature;
pub mod quantization;
pub mod roots;
pub mod shooting;
pub mod special;
pub mod transfer;
pub mod turning;
pub mod units;

pub use config::{PotentialSpec, RunConfig};
pub use error::{Error, Result};
pub use potential::{MonotoneCubic, Potential, PotentialKind};
pub use quantization::{evaluate_quantization, QuantizationReport};
pub use shooting::{find_eigenvalues, EigenSolution};
pub use turning::{find_turning_points, validate_constraints, TurningPoints, ValidationReport};
pub use units::{to_dimensionless, Units};
