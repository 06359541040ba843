use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::ModemConfig;
use crate::error::Result;
use crate::field::SampledField;

/// Unit-energy root-raised-cosine taps, `span·sps + 1` long, centred.
pub fn rrc_taps(rolloff: f64, span_symbols: usize, sps: usize) -> Vec<f64> {
    let half = (span_symbols * sps) as f64 / 2.0;
    let b = rolloff;
    let mut taps: Vec<f64> = (0..=span_symbols * sps)
        .map(|i| {
            let t = (i as f64 - half) / sps as f64;
            if t.abs() < 1e-12 {
                1.0 - b + 4.0 * b / PI
            } else if ((4.0 * b * t).abs() - 1.0).abs() < 1e-9 {
                let a = PI / (4.0 * b);
                b * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos())
            } else {
                let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
                let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
                num / den
            }
        })
        .collect();
    let energy: f64 = taps.iter().map(|h| h * h).sum();
    let norm = energy.sqrt();
    for h in taps.iter_mut() {
        *h /= norm;
    }
    taps
}

/// Pulse-shaped waveform plus its filter delay.
#[derive(Debug, Clone)]
pub struct ShapedSignal {
    pub field: SampledField,
    /// Sample index of the first symbol's pulse peak (`span·sps/2`).
    pub delay_samples: usize,
}

/// Upsample by `sps` and filter with the RRC pulse.
///
/// The output is the full convolution, `n·sps + span·sps` samples long, at
/// `fs = sps·baud`. With unit-energy taps each sample carries `Es/sps` on
/// average.
pub fn rrc_shape(symbols: &[Complex64], cfg: &ModemConfig) -> Result<ShapedSignal> {
    cfg.validate()?;
    let taps = rrc_taps(cfg.rolloff, cfg.rrc_span_symbols, cfg.sps);
    let len = symbols.len() * cfg.sps + taps.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (m, &s) in symbols.iter().enumerate() {
        let base = m * cfg.sps;
        for (j, &h) in taps.iter().enumerate() {
            out[base + j] += s * h;
        }
    }
    Ok(ShapedSignal {
        field: SampledField::new(out, cfg.sample_rate_hz(), 0.0)?,
        delay_samples: cfg.rrc_span_symbols * cfg.sps / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taps_are_unit_energy_and_symmetric() {
        for (b, span, sps) in [(0.1, 32, 4), (0.25, 16, 8), (1.0, 8, 2), (0.5, 10, 4)] {
            let h = rrc_taps(b, span, sps);
            assert_eq!(h.len(), span * sps + 1);
            let e: f64 = h.iter().map(|x| x * x).sum();
            assert!((e - 1.0).abs() < 1e-12);
            for i in 0..h.len() {
                assert!((h[i] - h[h.len() - 1 - i]).abs() < 1e-12);
                assert!(h[i].is_finite());
            }
        }
    }

    #[test]
    fn singular_points_are_continuous() {
        // rolloff 0.25, sps 4 puts t = ±1/(4β) = ±1 exactly on a tap.
        let h = rrc_taps(0.25, 8, 4);
        let c = h.len() / 2;
        let left = rrc_taps(0.2500001, 8, 4);
        assert!((h[c + 4] - left[c + 4]).abs() < 1e-5);
    }

    #[test]
    fn single_symbol_gives_impulse_response() {
        let cfg = ModemConfig::default();
        let out = rrc_shape(&[Complex64::new(1.0, 0.0)], &cfg).unwrap();
        let h = rrc_taps(cfg.rolloff, cfg.rrc_span_symbols, cfg.sps);
        assert_eq!(out.field.len(), h.len() + cfg.sps - 1);
        for (z, t) in out.field.iq.iter().zip(&h) {
            assert!((z.re - t).abs() < 1e-15 && z.im == 0.0);
        }
        assert!(out.field.iq[h.len()..].iter().all(|z| z.norm() == 0.0));
        assert_eq!(out.delay_samples, 64);
        assert_eq!(out.field.fs_hz, 20e9);
    }
}
