//! Delayed self-heterodyne emulation.
//!
//! The field beats against a delayed, frequency-shifted copy of itself. The
//! beat phase carries `φ(t) - φ(t-τ)`, whose FM spectrum is the laser's
//! multiplied by `|2·sin(πfτ)|²`. Dividing that transfer function back out
//! recovers the FM-noise PSD except near its nulls at `f = m/τ`, which are
//! masked. Detection noise on the beat enters as white phase noise, i.e. an
//! FM floor rising as `f²`.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::welch::welch_one_sided_real;
use super::{PsdEstimate, WelchParams};
use crate::error::{invalid, Error, Result};
use crate::field::{tone_phase, SampledField};
use crate::seed;

/// Bins closer than this fraction of `1/τ` to a transfer null are dropped.
pub const NULL_MASK_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DshConfig {
    pub delay_s: f64,
    pub shift_hz: f64,
    /// Detection noise density relative to the beat power, 1/Hz. This equals
    /// the white phase-noise floor (rad²/Hz) it imposes on the beat.
    pub rx_noise_psd: f64,
    pub seed: u64,
}

impl Default for DshConfig {
    fn default() -> Self {
        DshConfig {
            delay_s: 10e-6,
            shift_hz: 80e6,
            rx_noise_psd: 0.0,
            seed: 0,
        }
    }
}

impl DshConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delay_s > 0.0) || !(self.shift_hz > 0.0) {
            return Err(invalid("DSH delay and shift must be > 0"));
        }
        if !(self.rx_noise_psd >= 0.0 && self.rx_noise_psd.is_finite()) {
            return Err(invalid("rx_noise_psd must be >= 0"));
        }
        Ok(())
    }
}

/// FM-noise PSD as a delayed self-heterodyne measurement would report it.
///
/// The returned estimate holds only unmasked bins.
pub fn dsh_emulate(field: &SampledField, cfg: &DshConfig, params: &WelchParams) -> Result<PsdEstimate> {
    cfg.validate()?;
    let fs = field.fs_hz;
    let delay = (cfg.delay_s * fs).round() as usize;
    if delay == 0 {
        return Err(invalid("delay shorter than one sample"));
    }
    if delay >= field.len() {
        return Err(Error::RecordTooShort {
            have: field.len(),
            need: delay + 1,
        });
    }
    let tau = delay as f64 / fs;

    let mut beat: Vec<Complex64> = (delay..field.len())
        .map(|k| {
            let shift = Complex64::from_polar(1.0, tone_phase(cfg.shift_hz, fs, k));
            field.iq[k] * field.iq[k - delay].conj() * shift
        })
        .collect();

    if cfg.rx_noise_psd > 0.0 {
        let p = beat.iter().map(|z| z.norm_sqr()).sum::<f64>() / beat.len() as f64;
        let sigma = (cfg.rx_noise_psd * fs * p / 2.0).sqrt();
        let mut rng = seed::rng(cfg.seed, 0);
        for z in beat.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *z += Complex64::new(sigma * re, sigma * im);
        }
    }

    // Demodulate at the known shift and read the beat's frequency.
    let step = TAU * cfg.shift_hz / fs;
    let nu: Vec<f64> = beat
        .windows(2)
        .map(|w| wrap((w[1] * w[0].conj()).arg() - step) * fs / TAU)
        .collect();

    let (freqs, psd, segs) = welch_one_sided_real(&nu, fs, params, WelchParams::MIN_SEGMENTS)?;
    let mut out_f = Vec::with_capacity(freqs.len());
    let mut out_p = Vec::with_capacity(freqs.len());
    for (f, p) in freqs.into_iter().zip(psd) {
        let x = f * tau;
        if (x - x.round()).abs() < NULL_MASK_FRACTION {
            continue;
        }
        let h = 4.0 * (PI * x).sin().powi(2);
        out_f.push(f);
        out_p.push(p / h);
    }
    Ok(PsdEstimate {
        freqs_hz: out_f,
        psd: out_p,
        segment_count: segs,
        window_name: WelchParams::WINDOW_NAME.into(),
    })
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillators::{cw_field, OscillatorSpec, PhaseTrajectory};

    #[test]
    fn noiseless_field_reads_zero() {
        let spec = OscillatorSpec::noiseless(1.0);
        let f = cw_field(&spec, &PhaseTrajectory::zeros(1 << 16, 100e6)).unwrap();
        let cfg = DshConfig {
            delay_s: 1e-6,
            ..DshConfig::default()
        };
        let est = dsh_emulate(&f, &cfg, &WelchParams::with_segment(2048)).unwrap();
        assert!(est.psd.iter().all(|&p| p < 1e-6));
    }

    #[test]
    fn masks_transfer_nulls() {
        let spec = OscillatorSpec {
            h0: 100.0,
            ..OscillatorSpec::noiseless(1.0)
        };
        let fs = 100e6;
        let phase = PhaseTrajectory::synthesize(&spec, 1 << 16, fs, 1).unwrap();
        let f = cw_field(&spec, &phase).unwrap();
        let cfg = DshConfig {
            delay_s: 10e-6,
            ..DshConfig::default()
        };
        let est = dsh_emulate(&f, &cfg, &WelchParams::with_segment(4096)).unwrap();
        for &fr in &est.freqs_hz {
            let x = fr * 10e-6;
            assert!((x - x.round()).abs() >= NULL_MASK_FRACTION);
        }
        // roughly 20 % of bins removed
        let kept = est.freqs_hz.len() as f64 / 2048.0;
        assert!((0.75..0.85).contains(&kept), "{kept}");
    }

    #[test]
    fn delay_longer_than_record() {
        let f = cw_field(
            &OscillatorSpec::noiseless(1.0),
            &PhaseTrajectory::zeros(100, 100e6),
        )
        .unwrap();
        assert!(matches!(
            dsh_emulate(&f, &DshConfig::default(), &WelchParams::with_segment(8)),
            Err(Error::RecordTooShort { .. })
        ));
    }
}
