use serde::Serialize;
use std::io::Write;

use super::welch::welch_two_sided;
use super::WelchParams;
use crate::error::{invalid, Result};
use crate::fft;
use crate::field::SampledField;

const FLOOR_MW: f64 = 1e-30;

/// Power per resolution bandwidth against absolute offset from the
/// simulation centre.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticalSpectrum {
    pub freqs_hz: Vec<f64>,
    pub power_dbm: Vec<f64>,
    /// Effective resolution bandwidth (a whole number of fine bins).
    pub rbw_hz: f64,
}

impl OpticalSpectrum {
    /// Highest reading within `±tol_hz` of `freq_hz`.
    pub fn peak_near(&self, freq_hz: f64, tol_hz: f64) -> Option<f64> {
        self.freqs_hz
            .iter()
            .zip(&self.power_dbm)
            .filter(|(f, _)| (**f - freq_hz).abs() <= tol_hz)
            .map(|(_, p)| *p)
            .reduce(f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        super::write_series_csv(w, "dBm", &self.freqs_hz, &self.power_dbm)
    }
}

/// Optical spectrum of `field` at resolution `rbw_hz`.
///
/// A Hann-windowed Welch density is computed on a grid about eight times
/// finer than the RBW and then integrated over a sliding RBW-wide window.
/// The density is scaled so that it integrates to the field's mean power,
/// which removes the window's dependence on where the power sits in time.
pub fn optical_spectrum(field: &SampledField, rbw_hz: f64) -> Result<OpticalSpectrum> {
    let n = field.len();
    let fs = field.fs_hz;
    if n < 2 {
        return Err(invalid("field too short for a spectrum"));
    }
    if !(rbw_hz >= fs / n as f64) || !rbw_hz.is_finite() {
        return Err(invalid(format!(
            "rbw {rbw_hz} Hz is finer than the record allows ({} Hz)",
            fs / n as f64
        )));
    }
    let wanted = ((8.0 * fs / rbw_hz).ceil() as usize).next_power_of_two();
    let len = wanted.min(n);
    let params = WelchParams::with_segment(len);
    let (psd, _) = welch_two_sided(&field.iq, fs, &params, false, 1)?;
    let df = fs / len as f64;
    let total: f64 = psd.iter().sum::<f64>() * df;
    let scale = if total > 0.0 { field.mean_power() / total } else { 1.0 };

    let half = ((rbw_hz / df - 1.0) / 2.0).round().max(0.0) as usize;
    let width = 2 * half + 1;
    let order: Vec<usize> = (0..len).map(|i| (i + len / 2 + 1) % len).collect();
    let shifted: Vec<f64> = order.iter().map(|&k| psd[k] * df * scale).collect();

    let mut power_dbm = Vec::with_capacity(len);
    let mut sum: f64 = (0..width)
        .map(|j| shifted[(j + len - half) % len])
        .sum();
    for i in 0..len {
        power_dbm.push(10.0 * sum.max(FLOOR_MW).log10());
        sum += shifted[(i + half + 1) % len] - shifted[(i + len - half) % len];
    }
    let freqs_hz = order
        .iter()
        .map(|&k| field.center_offset_hz + fft::bin_freq(k, len, fs))
        .collect();
    Ok(OpticalSpectrum {
        freqs_hz,
        power_dbm,
        rbw_hz: width as f64 * df,
    })
}
