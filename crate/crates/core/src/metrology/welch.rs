use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::fft;

/// Segmenting for a Welch estimate. The window is always Hann.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchParams {
    pub segment_len: usize,
    /// Fractional overlap in `[0, 1)`.
    pub overlap: f64,
}

impl WelchParams {
    pub const MIN_SEGMENTS: usize = 8;
    pub const WINDOW_NAME: &'static str = "hann";

    /// Largest power-of-two segment that still yields at least 16 segments
    /// at 50 % overlap.
    pub fn for_length(n: usize) -> Self {
        let target = (2 * n / 17).max(2);
        let segment_len = 1usize << (usize::BITS - 1 - target.leading_zeros());
        WelchParams {
            segment_len,
            overlap: 0.5,
        }
    }

    pub fn with_segment(segment_len: usize) -> Self {
        WelchParams {
            segment_len,
            overlap: 0.5,
        }
    }

    fn step(&self) -> usize {
        let hop = self.segment_len - (self.segment_len as f64 * self.overlap).floor() as usize;
        hop.max(1)
    }

    pub fn segment_count(&self, n: usize) -> usize {
        if n < self.segment_len || self.segment_len == 0 {
            0
        } else {
            (n - self.segment_len) / self.step() + 1
        }
    }

    pub(crate) fn check(&self, n: usize, min_segments: usize) -> Result<usize> {
        if self.segment_len < 2 {
            return Err(invalid("segment_len must be >= 2"));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(invalid("overlap must lie in [0, 1)"));
        }
        let segs = self.segment_count(n);
        if segs < min_segments {
            let need = self.segment_len + (min_segments - 1) * self.step();
            return Err(Error::RecordTooShort { have: n, need });
        }
        Ok(segs)
    }
}

pub(crate) fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 - 0.5 * (TAU * i as f64 / len as f64).cos())
        .collect()
}

/// Averaged two-sided periodogram in natural FFT order, units of `|x|²/Hz`.
///
/// With `detrend` each segment's mean is removed first.
pub(crate) fn welch_two_sided(
    x: &[Complex64],
    fs: f64,
    params: &WelchParams,
    detrend: bool,
    min_segments: usize,
) -> Result<(Vec<f64>, usize)> {
    let segs = params.check(x.len(), min_segments)?;
    let len = params.segment_len;
    let w = hann(len);
    let w_energy: f64 = w.iter().map(|v| v * v).sum();
    let step = params.step();

    let mut planner = rustfft::FftPlanner::new();
    let plan = planner.plan_fft_forward(len);
    let mut acc = vec![0.0; len];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for s in 0..segs {
        let seg = &x[s * step..s * step + len];
        let mean = if detrend {
            seg.iter().sum::<Complex64>() / len as f64
        } else {
            Complex64::new(0.0, 0.0)
        };
        for ((b, v), wi) in buf.iter_mut().zip(seg).zip(&w) {
            *b = (v - mean) * wi;
        }
        plan.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let scale = 1.0 / (segs as f64 * fs * w_energy);
    for a in acc.iter_mut() {
        *a *= scale;
    }
    Ok((acc, segs))
}

/// One-sided density of a real sequence on bins `1..=len/2`.
pub(crate) fn welch_one_sided_real(
    x: &[f64],
    fs: f64,
    params: &WelchParams,
    min_segments: usize,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let cx: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let (two, segs) = welch_two_sided(&cx, fs, params, true, min_segments)?;
    let len = params.segment_len;
    let mut freqs = Vec::with_capacity(len / 2);
    let mut psd = Vec::with_capacity(len / 2);
    for k in 1..=len / 2 {
        let doubled = if 2 * k == len { 1.0 } else { 2.0 };
        freqs.push(fft::bin_freq(k, len, fs).abs());
        psd.push(two[k] * doubled);
    }
    Ok((freqs, psd, segs))
}
