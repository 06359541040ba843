//! Decision-directed carrier phase recovery.
//!
//! Second-order symbol-recursive loop:
//!
//! ```text
//! y_k     = r_k · exp(-i·φ̂_k)
//! d_k     = nearest point to y_k   (or the known symbol)
//! e_k     = arg(y_k · conj(d_k))
//! φ̂_{k+1} = φ̂_k + μ1·e_k + μ2·Σ_{j≤k} e_j
//! ```
//!
//! The integral branch absorbs a residual frequency offset: in steady state
//! the accumulator settles at `slope/μ2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::transceiver::QamConstellation;

/// Minimum preamble length for acquisition in decided mode.
pub const MIN_ACQUISITION_SYMBOLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionMode {
    /// Data-aided: every reference symbol is known.
    KnownSymbols,
    /// Known preamble for acquisition, hard decisions afterwards.
    DecidedSymbols,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PllConfig {
    /// Proportional (phase) gain.
    pub mu1: f64,
    /// Integral (frequency) gain.
    pub mu2: f64,
    pub decision_mode: DecisionMode,
}

impl Default for PllConfig {
    fn default() -> Self {
        PllConfig {
            mu1: 0.05,
            mu2: 2.5e-4,
            decision_mode: DecisionMode::DecidedSymbols,
        }
    }
}

impl PllConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu1 > 0.0 && self.mu1 < 1.0) {
            return Err(invalid(format!("mu1 must lie in (0, 1), got {}", self.mu1)));
        }
        if !(self.mu2 >= 0.0 && self.mu2 < self.mu1) {
            return Err(invalid(format!(
                "mu2 must lie in [0, mu1), got {}",
                self.mu2
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PllOutput {
    /// De-rotated symbols `y_k`.
    pub corrected: Vec<Complex64>,
    /// Phase estimate `φ̂_k` applied to symbol `k`.
    pub phase_track: Vec<f64>,
    /// Phase detector output `e_k`.
    pub phase_error: Vec<f64>,
}

/// Run the loop over `symbols`.
///
/// In [`DecisionMode::KnownSymbols`] `known` must cover every symbol. In
/// [`DecisionMode::DecidedSymbols`] `known` is the acquisition preamble (at
/// least [`MIN_ACQUISITION_SYMBOLS`] long) occupying the first symbols.
pub fn dd_pll(
    symbols: &[Complex64],
    cfg: &PllConfig,
    constellation: &QamConstellation,
    known: Option<&[Complex64]>,
) -> Result<PllOutput> {
    cfg.validate()?;
    let known = known.unwrap_or(&[]);
    match cfg.decision_mode {
        DecisionMode::KnownSymbols if known.len() < symbols.len() => {
            return Err(invalid(format!(
                "data-aided mode needs {} known symbols, got {}",
                symbols.len(),
                known.len()
            )));
        }
        DecisionMode::DecidedSymbols if known.len() < MIN_ACQUISITION_SYMBOLS => {
            return Err(invalid(format!(
                "decided mode needs a preamble of at least {MIN_ACQUISITION_SYMBOLS} symbols, got {}",
                known.len()
            )));
        }
        _ => {}
    }

    let n = symbols.len();
    let mut out = PllOutput {
        corrected: Vec::with_capacity(n),
        phase_track: Vec::with_capacity(n),
        phase_error: Vec::with_capacity(n),
    };
    let mut phi = 0.0f64;
    let mut acc = 0.0f64;
    for (k, &r) in symbols.iter().enumerate() {
        let y = r * Complex64::from_polar(1.0, -phi);
        let d = match known.get(k) {
            Some(&s) => s,
            None => constellation.decide(y),
        };
        let e = (y * d.conj()).arg();
        out.corrected.push(y);
        out.phase_track.push(phi);
        out.phase_error.push(e);
        acc += e;
        phi += cfg.mu1 * e + cfg.mu2 * acc;
    }
    Ok(out)
}
