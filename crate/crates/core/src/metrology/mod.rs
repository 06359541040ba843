//! Measurements: FM-noise spectra by direct phase differentiation and by an
//! emulated delayed self-heterodyne interferometer, optical spectra, and
//! linewidth estimates.

mod dsh;
mod spectrum;
mod welch;

pub use dsh::{dsh_emulate, DshConfig, NULL_MASK_FRACTION};
pub use spectrum::{optical_spectrum, OpticalSpectrum};
pub use welch::WelchParams;

use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::io::Write;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::oscillators::PhaseTrajectory;

/// One-sided FM-noise PSD, Hz²/Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdEstimate {
    pub freqs_hz: Vec<f64>,
    pub psd: Vec<f64>,
    pub segment_count: usize,
    pub window_name: String,
}

impl PsdEstimate {
    fn band(&self, lo_hz: f64, hi_hz: f64) -> Result<Vec<f64>> {
        let vals: Vec<f64> = self
            .freqs_hz
            .iter()
            .zip(&self.psd)
            .filter(|(f, _)| **f >= lo_hz && **f <= hi_hz)
            .map(|(_, p)| *p)
            .collect();
        if vals.is_empty() {
            return Err(Error::EmptyBand { lo_hz, hi_hz });
        }
        Ok(vals)
    }

    /// Mean PSD over `[lo, hi]`.
    pub fn band_mean(&self, lo_hz: f64, hi_hz: f64) -> Result<f64> {
        let v = self.band(lo_hz, hi_hz)?;
        Ok(v.iter().sum::<f64>() / v.len() as f64)
    }

    /// Median PSD over `[lo, hi]`.
    pub fn band_median(&self, lo_hz: f64, hi_hz: f64) -> Result<f64> {
        let mut v = self.band(lo_hz, hi_hz)?;
        let mid = v.len() / 2;
        let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
        Ok(*m)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_series_csv(w, "Hz^2/Hz", &self.freqs_hz, &self.psd)
    }
}

/// Anything a phase record can be read from.
#[derive(Debug, Clone, Copy)]
pub enum PhaseSource<'a> {
    Field(&'a SampledField),
    Phase(&'a PhaseTrajectory),
}

impl<'a> From<&'a SampledField> for PhaseSource<'a> {
    fn from(f: &'a SampledField) -> Self {
        PhaseSource::Field(f)
    }
}

impl<'a> From<&'a PhaseTrajectory> for PhaseSource<'a> {
    fn from(p: &'a PhaseTrajectory) -> Self {
        PhaseSource::Phase(p)
    }
}

impl PhaseSource<'_> {
    fn fs_hz(&self) -> f64 {
        match self {
            PhaseSource::Field(f) => f.fs_hz,
            PhaseSource::Phase(p) => p.fs_hz,
        }
    }

    /// Instantaneous frequency `(φ[k+1] - φ[k])·fs/2π`, using the unwrapped
    /// phase step.
    fn instantaneous_frequency(&self) -> Vec<f64> {
        let fs = self.fs_hz();
        match self {
            PhaseSource::Field(f) => f
                .iq
                .windows(2)
                .map(|w| (w[1] * w[0].conj()).arg() * fs / TAU)
                .collect(),
            PhaseSource::Phase(p) => p
                .samples
                .windows(2)
                .map(|w| (w[1] - w[0]) * fs / TAU)
                .collect(),
        }
    }
}

/// FM-noise PSD by direct differentiation of the phase, Welch averaged with
/// a Hann window. Requires at least eight segments.
pub fn fm_noise_psd<'a>(src: impl Into<PhaseSource<'a>>, params: &WelchParams) -> Result<PsdEstimate> {
    let src = src.into();
    let nu = src.instantaneous_frequency();
    let (freqs_hz, psd, segment_count) =
        welch::welch_one_sided_real(&nu, src.fs_hz(), params, WelchParams::MIN_SEGMENTS)?;
    Ok(PsdEstimate {
        freqs_hz,
        psd,
        segment_count,
        window_name: WelchParams::WINDOW_NAME.into(),
    })
}

/// Lorentzian linewidth from the median FM-noise floor over `band`: `π·h0`.
pub fn estimate_linewidth(psd: &PsdEstimate, band: (f64, f64)) -> Result<f64> {
    Ok(PI * psd.band_median(band.0, band.1)?)
}

/// Shared CSV writer: a `# unit:` line, a `freq_hz,value` header, then rows.
pub fn write_series_csv<W: Write>(mut w: W, unit: &str, freqs: &[f64], values: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(32 * freqs.len() + 64);
    out.push_str("# unit: ");
    out.push_str(unit);
    out.push_str("\nfreq_hz,value\n");
    for (f, v) in freqs.iter().zip(values) {
        out.push_str(&format!("{f},{v}\n"));
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillators::{cw_field, OscillatorSpec};
    use num_complex::Complex64;

    #[test]
    fn pure_tone_has_no_fm_noise() {
        let spec = OscillatorSpec {
            freq_offset_hz: 123e6,
            ..OscillatorSpec::noiseless(1.0)
        };
        let f = cw_field(&spec, &PhaseTrajectory::zeros(1 << 14, 1e9)).unwrap();
        let est = fm_noise_psd(&f, &WelchParams::for_length(f.len())).unwrap();
        assert!(est.psd.iter().all(|&p| p < 1e-12));
        assert_eq!(est.window_name, "hann");
        assert!(est.segment_count >= 16);
    }

    #[test]
    fn sinusoidal_fm_line_power() {
        // ν(t) = Δf·cos(2π·fm·t) has mean-square Δf²/2.
        let (fs, n, dev, fm) = (1e6, 1 << 16, 2e3, 31_250.0);
        let mut phi = 0.0;
        let iq: Vec<Complex64> = (0..n)
            .map(|k| {
                let z = Complex64::from_polar(1.0, phi);
                phi += TAU * dev * (TAU * fm * k as f64 / fs).cos() / fs;
                z
            })
            .collect();
        let f = SampledField::new(iq, fs, 0.0).unwrap();
        let est = fm_noise_psd(&f, &WelchParams::with_segment(4096)).unwrap();
        let df = est.freqs_hz[1] - est.freqs_hz[0];
        let line: f64 = est
            .freqs_hz
            .iter()
            .zip(&est.psd)
            .filter(|(f, _)| (**f - fm).abs() < 4.0 * df)
            .map(|(_, p)| p * df)
            .sum();
        assert!((line / (dev * dev / 2.0) - 1.0).abs() < 0.01, "{line}");
    }

    #[test]
    fn linewidth_from_flat_psd() {
        let est = PsdEstimate {
            freqs_hz: (1..=100).map(|k| k as f64).collect(),
            psd: vec![10.0; 100],
            segment_count: 16,
            window_name: "hann".into(),
        };
        assert!((estimate_linewidth(&est, (1.0, 100.0)).unwrap() - 31.4159).abs() < 1e-3);
        let est = PsdEstimate {
            psd: vec![1.0 / PI; 100],
            ..est
        };
        assert!((estimate_linewidth(&est, (10.0, 20.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            estimate_linewidth(&est, (500.0, 600.0)),
            Err(Error::EmptyBand { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_series_csv(&mut buf, "dBm", &[1.0, 2.5], &[-3.0, 0.125]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# unit: dBm\nfreq_hz,value\n1,-3\n2.5,0.125\n"
        );
    }
}
