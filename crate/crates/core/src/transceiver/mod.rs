//! Transmitter, fibre and front end: QAM mapping, RRC pulse shaping,
//! modulation onto a demultiplexed carrier, linear dispersive fibre, noise
//! loading and ideal coherent detection.

mod dump;
mod pulse;
mod qam;

pub use dump::{read_waveform, write_waveform, WAVEFORM_MAGIC};
pub use pulse::{rrc_shape, rrc_taps, ShapedSignal};
pub use qam::{demap_qam, map_qam, qam_ber_awgn, QamConstellation};
pub(crate) use qam::{demap_with, map_with};

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::comb::DemuxedCarrier;
use crate::error::{invalid, Result};
use crate::fft;
use crate::field::SampledField;
use crate::seed;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModemConfig {
    /// Constellation order.
    pub m: usize,
    pub baud_hz: f64,
    pub sps: usize,
    pub rolloff: f64,
    pub rrc_span_symbols: usize,
    pub preamble_symbols: usize,
}

impl Default for ModemConfig {
    fn default() -> Self {
        ModemConfig {
            m: 64,
            baud_hz: 5e9,
            sps: 4,
            rolloff: 0.1,
            rrc_span_symbols: 32,
            preamble_symbols: 256,
        }
    }
}

impl ModemConfig {
    pub fn validate(&self) -> Result<()> {
        QamConstellation::new(self.m)?;
        if !(self.baud_hz > 0.0 && self.baud_hz.is_finite()) {
            return Err(invalid("baud_hz must be > 0"));
        }
        if self.sps < 2 {
            return Err(invalid("sps must be >= 2"));
        }
        if !(self.rolloff > 0.0 && self.rolloff <= 1.0) {
            return Err(invalid("rolloff must lie in (0, 1]"));
        }
        if self.rrc_span_symbols < 1 || (self.rrc_span_symbols * self.sps) % 2 != 0 {
            return Err(invalid("rrc_span_symbols * sps must be a positive even number"));
        }
        Ok(())
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sps as f64 * self.baud_hz
    }

    pub fn constellation(&self) -> Result<QamConstellation> {
        QamConstellation::new(self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberConfig {
    pub length_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub attenuation_db_km: f64,
    pub wavelength_nm: f64,
}

impl Default for FiberConfig {
    fn default() -> Self {
        FiberConfig {
            length_km: 25.0,
            dispersion_ps_nm_km: 17.0,
            attenuation_db_km: 0.2,
            wavelength_nm: 1550.0,
        }
    }
}

impl FiberConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_km >= 0.0 && self.length_km.is_finite()) {
            return Err(invalid("length_km must be >= 0"));
        }
        if !self.dispersion_ps_nm_km.is_finite() || !self.attenuation_db_km.is_finite() {
            return Err(invalid("fibre coefficients must be finite"));
        }
        if !(self.wavelength_nm > 0.0) {
            return Err(invalid("wavelength_nm must be > 0"));
        }
        Ok(())
    }

    /// Coefficient `k` of the dispersion phase `-k·f²`, in s²:
    /// `k = π·λ²·D·L / c`.
    pub fn dispersion_coefficient_s2(&self) -> f64 {
        let lambda = self.wavelength_nm * 1e-9;
        let d = self.dispersion_ps_nm_km * 1e-6; // s/m²
        let l = self.length_km * 1e3;
        PI * lambda * lambda * d * l / SPEED_OF_LIGHT
    }

    /// Group-velocity dispersion `β₂ = -D·λ²/(2πc)`, s²/m.
    pub fn beta2_s2_per_m(&self) -> f64 {
        let lambda = self.wavelength_nm * 1e-9;
        -self.dispersion_ps_nm_km * 1e-6 * lambda * lambda / (2.0 * PI * SPEED_OF_LIGHT)
    }

    /// Field amplitude transmission `10^(-αL/20)`.
    pub fn amplitude_gain(&self) -> f64 {
        10f64.powf(-self.attenuation_db_km * self.length_km / 20.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Symbol SNR after the matched filter, dB. `inf` disables noise.
    pub target_snr_db: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            target_snr_db: 28.0,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        NoiseConfig {
            target_snr_db: f64::INFINITY,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_snr_db.is_nan() || self.target_snr_db == f64::NEG_INFINITY {
            return Err(invalid("target_snr_db must be a number or +inf"));
        }
        Ok(())
    }
}

/// Imprint a baseband envelope on the carrier (ideal IQ modulator).
pub fn modulate(carrier: &DemuxedCarrier, baseband: &SampledField) -> Result<SampledField> {
    carrier.field.check_compatible(baseband)?;
    let iq = carrier
        .field
        .iq
        .iter()
        .zip(&baseband.iq)
        .map(|(c, b)| c * b)
        .collect();
    SampledField::new(
        iq,
        carrier.field.fs_hz,
        carrier.field.center_offset_hz + baseband.center_offset_hz,
    )
}

fn apply_dispersion(field: &SampledField, coeff_s2: f64, gain: f64) -> SampledField {
    let n = field.len();
    let mut buf = field.iq.clone();
    if coeff_s2 != 0.0 {
        fft::forward(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            let f = fft::bin_freq(k, n, field.fs_hz);
            *z *= Complex64::from_polar(gain, -coeff_s2 * f * f);
        }
        fft::inverse(&mut buf);
    } else if gain != 1.0 {
        for z in buf.iter_mut() {
            *z *= gain;
        }
    }
    SampledField {
        iq: buf,
        fs_hz: field.fs_hz,
        center_offset_hz: field.center_offset_hz,
    }
}

/// Linear fibre: `H(f) = 10^(-αL/20)·exp(-i·(πλ²DL/c)·f²)`, applied to the
/// field spectrum with `f` measured from the field's reference frequency.
///
/// The record is treated as periodic, so callers should leave guard symbols
/// at both ends.
pub fn propagate_fiber(field: &SampledField, cfg: &FiberConfig) -> Result<SampledField> {
    cfg.validate()?;
    Ok(apply_dispersion(
        field,
        cfg.dispersion_coefficient_s2(),
        cfg.amplitude_gain(),
    ))
}

/// Inverse of the dispersive part of [`propagate_fiber`] (no loss
/// compensation).
pub(crate) fn undo_dispersion(field: &SampledField, cfg: &FiberConfig) -> Result<SampledField> {
    cfg.validate()?;
    Ok(apply_dispersion(field, -cfg.dispersion_coefficient_s2(), 1.0))
}

/// Add complex white Gaussian noise for a given post-matched-filter SNR.
///
/// With unit-energy RRC taps a symbol of energy `Es` spreads over `sps`
/// samples, so the measured mean power is `P = Es/sps`. The matched filter
/// has unit energy and passes noise of per-sample variance `σ²` unchanged, so
/// the symbol SNR is `Es/σ² = P·sps/σ²` and `σ² = P·sps/SNR`.
pub fn load_awgn(field: &SampledField, cfg: &NoiseConfig, modem: &ModemConfig) -> Result<SampledField> {
    cfg.validate()?;
    if cfg.target_snr_db == f64::INFINITY {
        return Ok(field.clone());
    }
    let power = field.mean_power();
    if !(power > 0.0) {
        return Err(invalid("cannot load noise relative to a zero-power field"));
    }
    let snr = 10f64.powf(cfg.target_snr_db / 10.0);
    let sigma = (power * modem.sps as f64 / snr / 2.0).sqrt();
    let mut rng = seed::rng(cfg.seed, 0);
    let mut out = field.clone();
    for z in out.iq.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z += Complex64::new(sigma * re, sigma * im);
    }
    Ok(out)
}

/// Ideal 90° hybrid with balanced detection: `field · conj(lo)/√P_lo`.
///
/// The LO is normalised to unit mean power, so LO phase noise subtracts into
/// the signal phase and the output is referenced to the difference of the two
/// reference frequencies.
pub fn coherent_rx(field: &SampledField, lo: &SampledField) -> Result<SampledField> {
    field.check_compatible(lo)?;
    let p = lo.mean_power();
    if !(p > 0.0) {
        return Err(invalid("local oscillator has zero power"));
    }
    let norm = 1.0 / p.sqrt();
    let iq = field
        .iq
        .iter()
        .zip(&lo.iq)
        .map(|(s, l)| s * l.conj() * norm)
        .collect();
    SampledField::new(iq, field.fs_hz, field.center_offset_hz - lo.center_offset_hz)
}
