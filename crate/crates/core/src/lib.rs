//! Exact finite-scale witnesses for box spaces of residually finite groups:
//! word metrics, subgroup chains, periodic covers, decay functions, Rokhlin
//! towers and amenability-dimension witnesses.

pub mod chains;
pub mod covers;
pub mod decay;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod json;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rationals, the scalar used for every certified value.
pub type Rational = num_rational::BigRational;

/// Decay functions with exact rational values.
pub type Decay = decay::DecayFamily<Rational>;

/// Rokhlin towers with exact rational values.
pub type Towers = dynamics::TowerSystem<Rational>;

/// Amenability-dimension witnesses with exact rational values.
pub type Witness = dynamics::AmdimWitness<Rational>;
