//! Square Gray-coded QAM.
//!
//! Each symbol carries `log2(M)` bits; the first half select the in-phase
//! level and the second half the quadrature level, each through an
//! independent per-axis Gray code. For 64-QAM the per-axis code, listed from
//! the most negative level upwards, is
//! `[000, 001, 011, 010, 110, 111, 101, 100]` over levels `-7..=7` scaled by
//! `1/√42`. QPSK follows the usual sign convention `b → 1 - 2b`, so `00`
//! maps to `(1+i)/√2`.

use num_complex::Complex64;
use statrs::function::erf::erfc;

use crate::error::{invalid, Result};

/// A square QAM constellation with unit average energy.
#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    bits_per_axis: usize,
    /// Gray code of each level, indexed from the most negative level.
    gray_of_level: Vec<u32>,
    /// Level index of each Gray code.
    level_of_gray: Vec<usize>,
    /// Level amplitudes, ascending, already normalised.
    levels: Vec<f64>,
    scale: f64,
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        let bits = match order {
            4 => 1,
            16 => 2,
            64 => 3,
            256 => 4,
            _ => {
                return Err(invalid(format!(
                    "QAM order must be one of 4, 16, 64, 256; got {order}"
                )))
            }
        };
        let side = 1usize << bits;
        let gray_of_level: Vec<u32> = if bits == 1 {
            vec![1, 0]
        } else {
            (0..side as u32).map(|i| i ^ (i >> 1)).collect()
        };
        let mut level_of_gray = vec![0; side];
        for (lvl, &g) in gray_of_level.iter().enumerate() {
            level_of_gray[g as usize] = lvl;
        }
        // Average energy of a square QAM with odd-integer levels is 2(M-1)/3.
        let scale = 1.0 / (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
        let levels = (0..side)
            .map(|i| (2.0 * i as f64 - (side as f64 - 1.0)) * scale)
            .collect();
        Ok(QamConstellation {
            order,
            bits_per_axis: bits,
            gray_of_level,
            level_of_gray,
            levels,
            scale,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    /// Distance between adjacent levels, e.g. `2/√42` for 64-QAM.
    pub fn min_distance(&self) -> f64 {
        2.0 * self.scale
    }

    /// Ascending per-axis amplitudes.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// All points, indexed by their `log2(M)`-bit label.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.order as u32).map(|label| self.point(label)).collect()
    }

    /// Point carrying `label` (I bits in the high half).
    pub fn point(&self, label: u32) -> Complex64 {
        let b = self.bits_per_axis;
        let mask = (1u32 << b) - 1;
        let i = self.level_of_gray[((label >> b) & mask) as usize];
        let q = self.level_of_gray[(label & mask) as usize];
        Complex64::new(self.levels[i], self.levels[q])
    }

    fn decide_axis(&self, x: f64) -> usize {
        let side = self.levels.len();
        let u = x / self.scale + (side as f64 - 1.0);
        // u/2 is the fractional level index
        let pos = (u / 2.0).clamp(0.0, (side - 1) as f64);
        let lo = pos.floor() as usize;
        if lo + 1 >= side {
            return side - 1;
        }
        let frac = pos - lo as f64;
        if frac < 0.5 {
            lo
        } else if frac > 0.5 {
            lo + 1
        } else if self.gray_of_level[lo] <= self.gray_of_level[lo + 1] {
            lo
        } else {
            lo + 1
        }
    }

    /// Hard decision: the label of the nearest point.
    pub fn decide_label(&self, z: Complex64) -> u32 {
        let i = self.decide_axis(z.re);
        let q = self.decide_axis(z.im);
        (self.gray_of_level[i] << self.bits_per_axis) | self.gray_of_level[q]
    }

    /// Nearest constellation point.
    pub fn decide(&self, z: Complex64) -> Complex64 {
        Complex64::new(
            self.levels[self.decide_axis(z.re)],
            self.levels[self.decide_axis(z.im)],
        )
    }
}

/// Map bits (one bit per byte, 0 or 1) to unit-energy QAM symbols.
pub fn map_qam(bits: &[u8], m: usize) -> Result<Vec<Complex64>> {
    let c = QamConstellation::new(m)?;
    map_with(&c, bits)
}

pub(crate) fn map_with(c: &QamConstellation, bits: &[u8]) -> Result<Vec<Complex64>> {
    let k = c.bits_per_symbol();
    if bits.len() % k != 0 {
        return Err(invalid(format!(
            "{} bits is not a multiple of {k} bits per symbol",
            bits.len()
        )));
    }
    Ok(bits
        .chunks_exact(k)
        .map(|chunk| {
            let label = chunk.iter().fold(0u32, |acc, &b| (acc << 1) | (b & 1) as u32);
            c.point(label)
        })
        .collect())
}

/// Hard-decision demapping to bits.
pub fn demap_qam(symbols: &[Complex64], m: usize) -> Result<Vec<u8>> {
    let c = QamConstellation::new(m)?;
    Ok(demap_with(&c, symbols))
}

pub(crate) fn demap_with(c: &QamConstellation, symbols: &[Complex64]) -> Vec<u8> {
    let k = c.bits_per_symbol();
    let mut out = Vec::with_capacity(symbols.len() * k);
    for &z in symbols {
        let label = c.decide_label(z);
        for b in (0..k).rev() {
            out.push(((label >> b) & 1) as u8);
        }
    }
    out
}

fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Exact bit error rate of Gray-coded square M-QAM in AWGN.
///
/// `snr_db` is the symbol SNR `Es/N0`. The rate is obtained by summing, for
/// every transmitted level and every bit of the per-axis code, the Gaussian
/// probability of landing in each decision interval whose label differs in
/// that bit.
pub fn qam_ber_awgn(m: usize, snr_db: f64) -> Result<f64> {
    let c = QamConstellation::new(m)?;
    if snr_db == f64::INFINITY {
        return Ok(0.0);
    }
    let snr = 10f64.powf(snr_db / 10.0);
    // Es = 1, complex noise variance N0 = 1/snr split over two axes.
    let sigma = (1.0 / (2.0 * snr)).sqrt();
    let side = c.levels.len();
    let bpa = c.bits_per_axis;
    let edges: Vec<f64> = (0..=side)
        .map(|i| match i {
            0 => f64::NEG_INFINITY,
            i if i == side => f64::INFINITY,
            i => 0.5 * (c.levels[i - 1] + c.levels[i]),
        })
        .collect();
    let mut errors = 0.0;
    for (tx, &level) in c.levels.iter().enumerate() {
        for rx in 0..side {
            if rx == tx {
                continue;
            }
            let lo = edges[rx];
            let hi = edges[rx + 1];
            let p = q_func((lo - level) / sigma) - q_func((hi - level) / sigma);
            let differing = (c.gray_of_level[tx] ^ c.gray_of_level[rx]).count_ones();
            errors += p * differing as f64;
        }
    }
    Ok(errors / (side * bpa) as f64)
}
