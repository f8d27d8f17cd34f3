//! Schmidt games, saddle-connection spectra of flat surfaces, shrinkable
//! complexes, Alice's blocking strategy for bounded directions and the
//! badly-approximable statistic for interval exchanges.
//!
//! Geometry that must be exact (game radii, lattice holonomies, complex
//! predicates, certificates) is generic over [`scalar::Scalar`]; the aliases
//! below fix the common choices.

// `!(a < b)` is deliberate in generic code: it also rejects NaN for floats.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod blocking;
pub mod complexes;
pub mod game;
pub mod iet;
pub mod scalar;
pub mod surface;

pub use scalar::{Rational, Real, Scalar};

/// Game configuration over exact rationals.
pub type ExactConfig = game::GameConfig<Rational>;
/// Game configuration over doubles.
pub type FloatConfig = game::GameConfig<f64>;
pub type ExactTranscript = game::Transcript<Rational>;
pub type FloatTranscript = game::Transcript<f64>;
pub type ExactBall = game::Ball<Rational>;
/// Strategy constants over exact rationals.
pub type ExactConstants = blocking::StrategyConstants<Rational>;
pub type ExactCertificate = blocking::Certificate<Rational>;
pub type ExactBlockingAlice = blocking::BlockingAlice<Rational>;
