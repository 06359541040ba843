//! Thin wrappers over `rustfft` with the normalisation used throughout.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Unnormalised forward DFT, in place.
pub(crate) fn forward(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// Inverse DFT scaled by `1/n`, in place.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let n = buf.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(buf);
    let scale = 1.0 / n as f64;
    for x in buf.iter_mut() {
        *x *= scale;
    }
}

/// Signed frequency of DFT bin `k` for an `n`-point transform at `fs`.
pub(crate) fn bin_freq(k: usize, n: usize, fs: f64) -> f64 {
    let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    k * fs / n as f64
}
