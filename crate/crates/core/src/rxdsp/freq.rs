use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;

/// Shortest record accepted by [`estimate_freq_offset`].
pub const MIN_FREQ_EST_SYMBOLS: usize = 1 << 14;
/// Peak-to-median threshold below which no offset is reported.
pub const PEAK_THRESHOLD_DB: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqOffsetEstimate {
    pub offset_hz: f64,
    pub peak_to_median_db: f64,
    /// Grid spacing of the search, Hz.
    pub resolution_hz: f64,
}

/// Coarse carrier offset from the spectral line of `r⁴`.
///
/// Square QAM has a non-zero fourth moment, so `r⁴` carries a tone at four
/// times the offset. The search covers `±baud/8`; offsets beyond that alias
/// back into range (shifted by a multiple of `baud/4`).
pub fn estimate_freq_offset(symbols: &[Complex64], baud_hz: f64) -> Result<FreqOffsetEstimate> {
    if symbols.len() < MIN_FREQ_EST_SYMBOLS {
        return Err(Error::RecordTooShort {
            have: symbols.len(),
            need: MIN_FREQ_EST_SYMBOLS,
        });
    }
    // zero-pad by two for a finer grid
    let n = 2 * symbols.len().next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (b, s) in buf.iter_mut().zip(symbols) {
        *b = s.powi(4);
    }
    fft::forward(&mut buf);
    let mag: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();

    let peak = (0..n).max_by(|&a, &b| mag[a].total_cmp(&mag[b])).unwrap();
    let mut sorted = mag.clone();
    let mid = n / 2;
    let (_, median, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
    let ratio_db = 10.0 * (mag[peak] / *median).log10();
    if !(ratio_db >= PEAK_THRESHOLD_DB) {
        return Err(Error::NoSpectralPeak {
            ratio_db,
            threshold_db: PEAK_THRESHOLD_DB,
        });
    }

    // parabolic refinement on the magnitude
    let y0 = mag[(peak + n - 1) % n].sqrt();
    let y1 = mag[peak].sqrt();
    let y2 = mag[(peak + 1) % n].sqrt();
    let denom = y0 - 2.0 * y1 + y2;
    let delta = if denom.abs() > 0.0 {
        (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let f4 = fft::bin_freq(peak, n, baud_hz) + delta * baud_hz / n as f64;
    Ok(FreqOffsetEstimate {
        offset_hz: f4 / 4.0,
        peak_to_median_db: ratio_db,
        resolution_hz: baud_hz / (4 * n) as f64,
    })
}

/// Remove a known offset from symbol-rate samples.
pub fn derotate(symbols: &[Complex64], offset_hz: f64, baud_hz: f64) -> Vec<Complex64> {
    let mut out = symbols.to_vec();
    crate::field::mix_in_place(&mut out, -offset_hz, baud_hz);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transceiver::map_qam;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qam(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<u8> = (0..n * 6).map(|_| rng.random_range(0..2)).collect();
        map_qam(&bits, 64).unwrap()
    }

    #[test]
    fn null_case() {
        let s = qam(1 << 15, 1);
        let est = estimate_freq_offset(&s, 5e9).unwrap();
        assert!(est.resolution_hz <= 5e9 / (1 << 14) as f64);
        assert!(est.offset_hz.abs() < 2.0 * est.resolution_hz);
    }

    #[test]
    fn injected_offset_round_trip() {
        let s = derotate(&qam(100_000, 2), -100e6, 5e9);
        let est = estimate_freq_offset(&s, 5e9).unwrap();
        assert!((est.offset_hz - 100e6).abs() < 1e6, "{}", est.offset_hz);
        let back = derotate(&s, est.offset_hz, 5e9);
        // residual rotation over the record stays small
        let drift = (back[99_999] * qam(100_000, 2)[99_999].conj()).arg();
        assert!(drift.abs() < 0.5);
    }

    #[test]
    fn offset_beyond_range_aliases() {
        let baud = 5e9;
        let true_hz = baud / 8.0 + 200e6;
        let s = derotate(&qam(1 << 15, 3), -true_hz, baud);
        match estimate_freq_offset(&s, baud) {
            Err(Error::NoSpectralPeak { .. }) => {}
            Ok(est) => {
                // wraps by baud/4
                assert!((est.offset_hz - (true_hz - baud / 4.0)).abs() < 1e6);
                assert!((est.offset_hz - true_hz).abs() > 100e6);
            }
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn flat_spectrum_has_no_peak() {
        let mut s = vec![Complex64::new(0.0, 0.0); 1 << 14];
        s[5] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            estimate_freq_offset(&s, 5e9),
            Err(Error::NoSpectralPeak { .. })
        ));
        assert!(matches!(
            estimate_freq_offset(&s[..100], 5e9),
            Err(Error::RecordTooShort { .. })
        ));
    }
}
