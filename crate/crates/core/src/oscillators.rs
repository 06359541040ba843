//! Laser and RF phase-noise synthesis.
//!
//! Frequency noise is parameterised by its one-sided PSD
//! `S_ν(f) = h0 + h_flicker / f` in Hz²/Hz. Under this convention a white
//! floor `h0` produces a Lorentzian line of full width `π·h0`, so a floor of
//! 10 Hz²/Hz is a 31.4 Hz laser and `h0 = 1/π` is exactly 1 Hz.
//!
//! Synthesis is deterministic: the white and flicker parts are drawn from
//! separate ChaCha streams of the same seed.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Result};
use crate::fft;
use crate::field::tone_phase;
pub use crate::field::SampledField;
use crate::seed;

const WHITE_STREAM: u64 = 0;
const FLICKER_STREAM: u64 = 1;

/// Phase-noise parameterisation of one laser or RF source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillatorSpec {
    /// One-sided white FM-noise level, Hz²/Hz.
    pub h0: f64,
    /// Flicker FM coefficient, Hz² (`S_ν = h_flicker / f`).
    pub h_flicker: f64,
    pub power_mw: f64,
    /// Offset from the simulation centre frequency, Hz.
    pub freq_offset_hz: f64,
}

impl Default for OscillatorSpec {
    fn default() -> Self {
        OscillatorSpec::master_laser()
    }
}

impl OscillatorSpec {
    /// Ultra-stable master laser: sub-Hz white floor with a flicker rise that
    /// reaches ~10³ Hz²/Hz at 100 Hz.
    pub fn master_laser() -> Self {
        OscillatorSpec {
            h0: 0.3,
            h_flicker: 1e5,
            power_mw: 1.0,
            freq_offset_hz: 0.0,
        }
    }

    /// Free-running DFB laser (1 MHz linewidth class).
    pub fn free_running_dfb() -> Self {
        OscillatorSpec {
            h0: 1e6 / PI,
            h_flicker: 0.0,
            power_mw: 10.0,
            freq_offset_hz: 0.0,
        }
    }

    /// 10 GHz gain-switching RF drive. Its white floor is scaled by `(k-c)²`
    /// on comb line `k`, so 1e-4 Hz²/Hz adds 0.0064 Hz²/Hz at line ±8.
    pub fn rf_drive() -> Self {
        OscillatorSpec {
            h0: 1e-4,
            h_flicker: 0.0,
            power_mw: 1.0,
            freq_offset_hz: 0.0,
        }
    }

    pub fn noiseless(power_mw: f64) -> Self {
        OscillatorSpec {
            h0: 0.0,
            h_flicker: 0.0,
            power_mw,
            freq_offset_hz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h0 >= 0.0 && self.h0.is_finite()) {
            return Err(invalid(format!("h0 must be >= 0, got {}", self.h0)));
        }
        if !(self.h_flicker >= 0.0 && self.h_flicker.is_finite()) {
            return Err(invalid(format!(
                "h_flicker must be >= 0, got {}",
                self.h_flicker
            )));
        }
        if !(self.power_mw > 0.0 && self.power_mw.is_finite()) {
            return Err(invalid(format!(
                "power_mw must be > 0, got {}",
                self.power_mw
            )));
        }
        if !self.freq_offset_hz.is_finite() {
            return Err(invalid("freq_offset_hz must be finite"));
        }
        Ok(())
    }

    /// Full-width half-maximum of the white-FM Lorentzian, Hz.
    pub fn linewidth_hz(&self) -> f64 {
        PI * self.h0
    }
}

/// Discrete phase realisation, radians per sample tick.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrajectory {
    pub samples: Vec<f64>,
    pub fs_hz: f64,
    /// Seed of the generating noise, when it came from [`synth_freq_noise`].
    pub seed: Option<u64>,
}

impl PhaseTrajectory {
    /// Synthesize frequency noise for `spec` and integrate it.
    pub fn synthesize(spec: &OscillatorSpec, n: usize, fs_hz: f64, seed: u64) -> Result<Self> {
        let nu = synth_freq_noise(spec, n, fs_hz, seed)?;
        let mut phase = integrate_phase(&nu, fs_hz)?;
        phase.seed = Some(seed);
        Ok(phase)
    }

    pub fn zeros(n: usize, fs_hz: f64) -> Self {
        PhaseTrajectory {
            samples: vec![0.0; n],
            fs_hz,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Draw `n` samples of instantaneous frequency noise (Hz) whose one-sided PSD
/// is `h0 + h_flicker/f`.
///
/// The white part has per-sample variance `h0·fs/2`. The flicker part is white
/// Gaussian noise shaped in the frequency domain by `√(h_flicker·fs / 2f)`,
/// which is exact at the DFT grid frequencies down to `fs/n`; the DC bin is
/// zeroed.
pub fn synth_freq_noise(spec: &OscillatorSpec, n: usize, fs_hz: f64, seed: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(invalid(format!("need n >= 2 samples, got {n}")));
    }
    if !(fs_hz > 0.0 && fs_hz.is_finite()) {
        return Err(invalid(format!("fs_hz must be > 0, got {fs_hz}")));
    }
    spec.validate()?;

    let mut out = vec![0.0; n];
    if spec.h0 > 0.0 {
        let sigma = (spec.h0 * fs_hz / 2.0).sqrt();
        let mut rng = seed::rng(seed, WHITE_STREAM);
        for x in out.iter_mut() {
            let g: f64 = StandardNormal.sample(&mut rng);
            *x = sigma * g;
        }
    }
    if spec.h_flicker > 0.0 {
        let mut rng = seed::rng(seed, FLICKER_STREAM);
        let mut buf: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
            .collect();
        fft::forward(&mut buf);
        buf[0] = Complex64::new(0.0, 0.0);
        for (k, z) in buf.iter_mut().enumerate().skip(1) {
            let f = fft::bin_freq(k, n, fs_hz).abs();
            *z *= (spec.h_flicker * fs_hz / (2.0 * f)).sqrt();
        }
        fft::inverse(&mut buf);
        for (x, z) in out.iter_mut().zip(&buf) {
            *x += z.re;
        }
    }
    Ok(out)
}

/// Integrate frequency noise into phase: `φ[0] = 0`, `φ[k+1] = φ[k] + 2π·ν[k]/fs`.
pub fn integrate_phase(freq_noise: &[f64], fs_hz: f64) -> Result<PhaseTrajectory> {
    if freq_noise.is_empty() {
        return Err(invalid("frequency noise sequence is empty"));
    }
    if !(fs_hz > 0.0 && fs_hz.is_finite()) {
        return Err(invalid(format!("fs_hz must be > 0, got {fs_hz}")));
    }
    let scale = TAU / fs_hz;
    let mut samples = Vec::with_capacity(freq_noise.len());
    let mut phi = 0.0;
    samples.push(phi);
    for nu in &freq_noise[..freq_noise.len() - 1] {
        phi += scale * nu;
        samples.push(phi);
    }
    Ok(PhaseTrajectory {
        samples,
        fs_hz,
        seed: None,
    })
}

/// Continuous-wave field `√P·exp(i(2π·f_off·k/fs + φ[k]))`.
pub fn cw_field(spec: &OscillatorSpec, phase: &PhaseTrajectory) -> Result<SampledField> {
    if phase.is_empty() {
        return Err(invalid("phase trajectory is empty"));
    }
    spec.validate()?;
    let amp = spec.power_mw.sqrt();
    let iq = phase
        .samples
        .iter()
        .enumerate()
        .map(|(k, phi)| {
            let carrier = tone_phase(spec.freq_offset_hz, phase.fs_hz, k);
            Complex64::from_polar(amp, carrier + phi)
        })
        .collect();
    SampledField::new(iq, phase.fs_hz, 0.0)
}

/// Lorentzian FWHM for a white FM floor: `π·h0`.
pub fn lorentzian_linewidth(h0: f64) -> Result<f64> {
    if !(h0 >= 0.0) || !h0.is_finite() {
        return Err(invalid(format!("h0 must be >= 0, got {h0}")));
    }
    Ok(PI * h0)
}
