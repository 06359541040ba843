use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};

/// Uniformly sampled complex baseband optical field.
///
/// `iq` is expressed relative to the frequency `center_offset_hz` above the
/// simulation centre frequency, so a comb line at +50 GHz can be carried as a
/// constant envelope with `center_offset_hz = 50e9`. `|iq|²` is in mW.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub iq: Vec<Complex64>,
    pub fs_hz: f64,
    pub center_offset_hz: f64,
}

impl SampledField {
    pub fn new(iq: Vec<Complex64>, fs_hz: f64, center_offset_hz: f64) -> Result<Self> {
        if !(fs_hz > 0.0 && fs_hz.is_finite()) {
            return Err(invalid(format!("fs_hz must be > 0, got {fs_hz}")));
        }
        if iq.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("field contains non-finite samples"));
        }
        Ok(SampledField {
            iq,
            fs_hz,
            center_offset_hz,
        })
    }

    pub fn len(&self) -> usize {
        self.iq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iq.is_empty()
    }

    /// Mean `|iq|²`, i.e. optical power in mW.
    pub fn mean_power(&self) -> f64 {
        if self.iq.is_empty() {
            return 0.0;
        }
        self.iq.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.iq.len() as f64
    }

    /// Re-express the field relative to a new reference frequency.
    ///
    /// The physical signal is unchanged; its envelope is mixed by the
    /// difference between the old and new references.
    pub fn rereferenced(&self, new_center_offset_hz: f64) -> SampledField {
        let shift = self.center_offset_hz - new_center_offset_hz;
        let mut out = self.clone();
        mix_in_place(&mut out.iq, shift, self.fs_hz);
        out.center_offset_hz = new_center_offset_hz;
        out
    }

    pub(crate) fn check_compatible(&self, other: &SampledField) -> Result<()> {
        if self.fs_hz != other.fs_hz {
            return Err(Error::RateMismatch {
                left_hz: self.fs_hz,
                right_hz: other.fs_hz,
            });
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

/// Phase of a tone at `freq_hz` after `k` samples, reduced to one turn.
///
/// The cycle count is reduced before scaling so long records keep full
/// precision.
pub(crate) fn tone_phase(freq_hz: f64, fs_hz: f64, k: usize) -> f64 {
    let cycles = (freq_hz / fs_hz) * k as f64;
    TAU * cycles.rem_euclid(1.0)
}

/// Multiply `iq` by `exp(i·2π·freq·k/fs)`.
pub(crate) fn mix_in_place(iq: &mut [Complex64], freq_hz: f64, fs_hz: f64) {
    if freq_hz == 0.0 {
        return;
    }
    let step = freq_hz / fs_hz;
    for (k, z) in iq.iter_mut().enumerate() {
        let cycles = (step * k as f64).rem_euclid(1.0);
        *z *= Complex64::from_polar(1.0, TAU * cycles);
    }
}
