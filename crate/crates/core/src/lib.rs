//! Exact observation spaces over Q(√2): frames of ensembles, observed
//! distributions, signed and traditional extensions with certificates,
//! automorphism averaging, and a Kochen–Specker basis-system checker.

pub mod cli;
pub mod error;
pub mod extension;
pub mod files;
pub mod frame;
pub mod kscheck;
pub mod linalg;
pub mod scalar;
pub mod scenarios;
pub mod simplex;
pub mod space;

pub use error::{Error, Result};
pub use extension::{
    build_system, minimize_negativity, product_extension, solve_signed, solve_traditional, symmetrize, Certificate,
    ExtensionResult, LinearSystem, Row, Status,
};
pub use files::{ExtensionFile, SpaceFile};
pub use frame::{Automorphism, AutomorphismGroup, Frame, ObservedDistribution, Partition};
pub use kscheck::{BasisSystem, Ray};
pub use scalar::{Rational, Scalar};
pub use space::{Event, SampleSpace, SignedDistribution};
