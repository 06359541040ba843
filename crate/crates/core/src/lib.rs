//! Simulation of a comb-referenced optical superchannel transmitter with
//! coherent 64-QAM reception.
//!
//! The pipeline runs from laser phase noise through comb generation,
//! injection-locked line selection, QAM modulation and fibre propagation to
//! an offline coherent receiver, with FM-noise metrology alongside. Every
//! stochastic stage is driven by an explicit seed.

pub mod comb;
pub mod error;
mod fft;
pub mod field;
pub mod harness;
pub mod metrology;
pub mod oscillators;
pub mod rxdsp;
pub mod seed;
pub mod transceiver;

pub use error::{Error, Result};
pub use field::SampledField;
