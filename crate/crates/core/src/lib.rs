//! Two-photon scattering off a single emitter coupled to two waveguide
//! channels: exact amplitudes and probabilities, strong-coupling closed
//! forms, and an independent brute-force oracle.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod single_photon;
pub mod two_photon;

pub use error::{Error, Result};
pub use model::{Channel, Geometry, ModelParams, PairAmplitude, SpectralProfile};
pub use quadrature::QuadratureRule;
pub use two_photon::{probability_table, ProbabilityTable};
