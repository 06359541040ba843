//! Offline receiver DSP: dispersion compensation, coarse frequency-offset
//! removal, matched filtering, decision-directed phase recovery, rotation
//! resolution and BER accounting.

mod freq;
mod pll;
mod rotation;
mod timing;

pub use freq::{
    derotate, estimate_freq_offset, FreqOffsetEstimate, MIN_FREQ_EST_SYMBOLS, PEAK_THRESHOLD_DB,
};
pub use pll::{dd_pll, DecisionMode, PllConfig, PllOutput, MIN_ACQUISITION_SYMBOLS};
pub use rotation::{resolve_rotation, Rotation, ROTATION_MARGIN_DB};
pub use timing::{cascade_delay_samples, evm_db, matched_filter_downsample};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::field::SampledField;
use crate::transceiver::{undo_dispersion, FiberConfig, QamConstellation};

/// Undo the fibre's chromatic dispersion by applying the conjugate transfer
/// function. Loss is left in place.
pub fn cd_compensate(waveform: &SampledField, cfg: &FiberConfig) -> Result<SampledField> {
    undo_dispersion(waveform, cfg)
}

/// FEC classification thresholds on pre-FEC BER.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FecPolicy {
    /// Limit for a 7 % overhead hard-decision code.
    pub ber_7pct: f64,
    /// Limit for a 20 % overhead soft-decision code.
    pub ber_20pct: f64,
}

impl Default for FecPolicy {
    fn default() -> Self {
        FecPolicy {
            ber_7pct: 3.8e-3,
            ber_20pct: 2.4e-2,
        }
    }
}

impl FecPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.ber_7pct > 0.0 && self.ber_7pct < self.ber_20pct && self.ber_20pct <= 1.0) {
            return Err(invalid("FEC thresholds must satisfy 0 < ber_7pct < ber_20pct <= 1"));
        }
        Ok(())
    }
}

/// Ordered so that a better class compares greater.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FecClass {
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "PASS_20PCT")]
    Pass20Pct,
    #[serde(rename = "PASS_7PCT")]
    Pass7Pct,
}

impl fmt::Display for FecClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FecClass::Fail => "FAIL",
            FecClass::Pass20Pct => "PASS_20PCT",
            FecClass::Pass7Pct => "PASS_7PCT",
        })
    }
}

pub fn classify_fec(ber: f64, policy: &FecPolicy) -> FecClass {
    if ber < policy.ber_7pct {
        FecClass::Pass7Pct
    } else if ber < policy.ber_20pct {
        FecClass::Pass20Pct
    } else {
        FecClass::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitErrorCount {
    pub bits: u64,
    pub errors: u64,
}

impl BitErrorCount {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }
}

/// Exact Hamming count between two bit streams (one bit per byte).
pub fn count_ber(tx_bits: &[u8], rx_bits: &[u8]) -> Result<BitErrorCount> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::LengthMismatch {
            left: tx_bits.len(),
            right: rx_bits.len(),
        });
    }
    if tx_bits.is_empty() {
        return Err(invalid("no bits to compare"));
    }
    let errors = tx_bits
        .iter()
        .zip(rx_bits)
        .filter(|(a, b)| (*a & 1) != (*b & 1))
        .count();
    Ok(BitErrorCount {
        bits: tx_bits.len() as u64,
        errors: errors as u64,
    })
}

/// One BER measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerRecord {
    pub channel_index: usize,
    pub bits_compared: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub fec_class: FecClass,
    /// Mean squared phase-detector output over the data symbols, rad².
    pub mean_pll_phase_variance: f64,
}

impl BerRecord {
    pub fn new(channel_index: usize, count: BitErrorCount, policy: &FecPolicy, phase_var: f64) -> Self {
        let ber = count.ber();
        BerRecord {
            channel_index,
            bits_compared: count.bits,
            bit_errors: count.errors,
            ber,
            fec_class: classify_fec(ber, policy),
            mean_pll_phase_variance: phase_var,
        }
    }
}

/// Number of constellation points whose transmitted symbols land in their
/// own decision cell at least `fraction` of the time. A clean 64-QAM
/// constellation scores 64; a phase-smeared cloud scores fewer.
pub fn resolved_clusters(
    received: &[Complex64],
    transmitted: &[Complex64],
    constellation: &QamConstellation,
    fraction: f64,
) -> usize {
    let m = constellation.order();
    let mut hits = vec![0usize; m];
    let mut totals = vec![0usize; m];
    for (r, t) in received.iter().zip(transmitted) {
        let label = constellation.decide_label(*t) as usize;
        totals[label] += 1;
        if constellation.decide_label(*r) as usize == label {
            hits[label] += 1;
        }
    }
    (0..m)
        .filter(|&l| totals[l] > 0 && hits[l] as f64 >= fraction * totals[l] as f64)
        .count()
}
