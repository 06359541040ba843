use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::transceiver::{rrc_taps, ModemConfig};

/// Delay of the transmit and receive RRC filters in cascade, in samples.
pub fn cascade_delay_samples(modem: &ModemConfig) -> usize {
    modem.rrc_span_symbols * modem.sps
}

/// Matched RRC filter evaluated at symbol centres only.
///
/// `timing_offset_samples` is the index, in the filter output, of the first
/// symbol centre. For a waveform produced by `rrc_shape` and otherwise
/// undelayed this is [`cascade_delay_samples`]. Symbols are produced while
/// `offset + m·sps` lies inside the input record.
pub fn matched_filter_downsample(
    waveform: &SampledField,
    modem: &ModemConfig,
    timing_offset_samples: usize,
) -> Result<Vec<Complex64>> {
    modem.validate()?;
    let x = &waveform.iq;
    if timing_offset_samples >= x.len() {
        return Err(Error::IndexOutOfRange {
            index: timing_offset_samples,
            len: x.len(),
        });
    }
    let taps = rrc_taps(modem.rolloff, modem.rrc_span_symbols, modem.sps);
    let count = (x.len() - 1 - timing_offset_samples) / modem.sps + 1;
    let out = (0..count)
        .map(|m| {
            let n = timing_offset_samples + m * modem.sps;
            // z[n] = Σ_j h[j]·x[n-j]
            let j_min = n.saturating_sub(x.len() - 1);
            let j_max = n.min(taps.len() - 1);
            (j_min..=j_max).map(|j| x[n - j] * taps[j]).sum()
        })
        .collect();
    Ok(out)
}

/// Error-vector magnitude relative to the reference, dB.
pub fn evm_db(received: &[Complex64], reference: &[Complex64]) -> f64 {
    let n = received.len().min(reference.len());
    let err: f64 = received[..n]
        .iter()
        .zip(reference)
        .map(|(r, t)| (r - t).norm_sqr())
        .sum();
    let sig: f64 = reference[..n].iter().map(|t| t.norm_sqr()).sum();
    10.0 * (err / sig).log10()
}
