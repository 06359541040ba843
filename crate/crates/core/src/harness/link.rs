//! One carrier through the full transmit, fibre and receive chain.

use num_complex::Complex64;
use rand::RngCore;
use std::f64::consts::TAU;

use super::config::{record_samples, ExperimentConfig};
use crate::comb::{generate_comb, CombRealization, CombSpec, DemuxedCarrier};
use crate::error::{Error, Result};
use crate::field::{mix_in_place, SampledField};
use crate::oscillators::{cw_field, OscillatorSpec, PhaseTrajectory};
use crate::rxdsp::{
    cascade_delay_samples, cd_compensate, count_ber, dd_pll, estimate_freq_offset,
    matched_filter_downsample, resolve_rotation, BerRecord, DecisionMode, FecPolicy, PllConfig,
    Rotation, MIN_FREQ_EST_SYMBOLS,
};
use crate::seed::{self, derive_seed};
use crate::transceiver::{
    coherent_rx, demap_with, load_awgn, map_with, modulate, propagate_fiber, rrc_shape,
    FiberConfig, ModemConfig, NoiseConfig,
};

/// Everything the link needs besides the optical sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub modem: ModemConfig,
    pub fiber: FiberConfig,
    pub pll: PllConfig,
    pub fec: FecPolicy,
    pub target_snr_db: f64,
    /// Payload symbols after the preamble.
    pub n_symbols: usize,
}

impl LinkConfig {
    pub fn from_experiment(cfg: &ExperimentConfig) -> Self {
        LinkConfig {
            modem: cfg.modem,
            fiber: cfg.fiber,
            pll: cfg.pll,
            fec: cfg.fec,
            target_snr_db: cfg.noise.target_snr_db,
            n_symbols: cfg.n_symbols,
        }
    }

    pub fn record_samples(&self) -> usize {
        record_samples(&self.modem, self.n_symbols)
    }
}

/// Child seeds of one channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkSeeds {
    pub comb: u64,
    pub bits: u64,
    pub noise: u64,
    pub lo: u64,
    pub carrier: u64,
}

impl LinkSeeds {
    pub fn for_channel(master_seed: u64, channel: usize) -> Self {
        let k = channel as u64;
        LinkSeeds {
            comb: derive_seed(master_seed, k, "comb"),
            bits: derive_seed(master_seed, k, "bits"),
            noise: derive_seed(master_seed, k, "noise"),
            lo: derive_seed(master_seed, k, "lo"),
            carrier: derive_seed(master_seed, k, "carrier"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinkResult {
    pub record: BerRecord,
    /// Payload symbols after all receiver DSP.
    pub received: Vec<Complex64>,
    /// Transmitted payload symbols.
    pub transmitted: Vec<Complex64>,
    /// Coarse offset removed ahead of the loop, Hz.
    pub freq_offset_hz: f64,
    pub rotation: Rotation,
}

/// Unit-power LO from one line of an independent comb realisation, offset
/// by `offset_hz` above that line.
pub fn comb_lo(comb: &CombRealization, line: usize, offset_hz: f64) -> Result<SampledField> {
    let iq = comb
        .line_phase(line)?
        .into_iter()
        .map(|phi| Complex64::from_polar(1.0, phi))
        .collect();
    SampledField::new(iq, comb.fs_hz(), comb.spec.line_frequency(line)? + offset_hz)
}

/// Free-running laser at `freq_hz`, with a fresh phase realisation.
pub fn free_running_field(spec: &OscillatorSpec, n: usize, fs_hz: f64, freq_hz: f64, seed: u64) -> Result<SampledField> {
    let phase = PhaseTrajectory::synthesize(spec, n, fs_hz, seed)?;
    let mut field = cw_field(spec, &phase)?;
    field.center_offset_hz = freq_hz;
    Ok(field)
}

/// A bare laser standing in for a demultiplexed carrier.
pub fn free_running_carrier(field: SampledField, line: usize) -> DemuxedCarrier {
    DemuxedCarrier {
        field,
        locked_line_index: line,
        detuning_hz: 0.0,
        achieved_suppression_db: f64::INFINITY,
        residual_lines: 0,
    }
}

/// LO for the comb-referenced mode: the same line of an independently
/// seeded comb.
pub fn referenced_lo(spec: &CombSpec, line: usize, n: usize, fs_hz: f64, offset_hz: f64, seed: u64) -> Result<SampledField> {
    let comb = generate_comb(spec, n, fs_hz, seed)?;
    comb_lo(&comb, line, offset_hz)
}

fn random_bits(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = seed::rng(seed, 0);
    let mut bits = Vec::with_capacity(n);
    while bits.len() < n {
        let word = rng.next_u64();
        let take = (n - bits.len()).min(64);
        bits.extend((0..take).map(|i| ((word >> i) & 1) as u8));
    }
    bits
}

/// Data-aided offset over the preamble: lag-one correlation for range, then
/// a half-length lag for precision.
fn preamble_offset(rx: &[Complex64], known: &[Complex64], baud_hz: f64) -> f64 {
    let mut z: Vec<Complex64> = rx.iter().zip(known).map(|(r, s)| r * s.conj()).collect();
    let lagged = |z: &[Complex64], lag: usize| -> f64 {
        let acc: Complex64 = z[lag..].iter().zip(z).map(|(b, a)| b * a.conj()).sum();
        acc.arg() / lag as f64
    };
    let coarse = lagged(&z, 1);
    for (k, v) in z.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, -coarse * k as f64);
    }
    let fine = lagged(&z, (z.len() / 2).max(1));
    (coarse + fine) * baud_hz / TAU
}

/// Transmit `carrier` through the link and receive it against `lo`.
///
/// Chain: Gray-QAM → RRC → modulate → fibre → AWGN → coherent receiver →
/// dispersion compensation → coarse offset removal → matched filter →
/// gain from the preamble → DD-PLL → rotation → demap → BER.
///
/// The coarse offset comes from the fourth-power spectrum when the payload
/// is long enough and shows a clear line; otherwise from the preamble.
pub fn run_link(
    cfg: &LinkConfig,
    carrier: &DemuxedCarrier,
    lo: &SampledField,
    bits_seed: u64,
    noise_seed: u64,
    channel: usize,
) -> Result<LinkResult> {
    let modem = &cfg.modem;
    let constellation = modem.constellation()?;
    let bps = constellation.bits_per_symbol();
    let n_pre = modem.preamble_symbols;
    let total = n_pre + cfg.n_symbols;

    let bits = random_bits(total * bps, bits_seed);
    let tx = map_with(&constellation, &bits)?;
    let shaped = rrc_shape(&tx, modem)?;
    let optical = modulate(carrier, &shaped.field)?;
    let line = propagate_fiber(&optical, &cfg.fiber)?;
    let noise = NoiseConfig {
        target_snr_db: cfg.target_snr_db,
        seed: noise_seed,
    };
    let detected = load_awgn(&line, &noise, modem)?;

    let electrical = coherent_rx(&detected, lo)?;
    let mut wave = cd_compensate(&electrical, &cfg.fiber)?.rereferenced(0.0);
    let delay = cascade_delay_samples(modem);

    let mut coarse = matched_filter_downsample(&wave, modem, delay)?;
    coarse.truncate(total);
    let preamble = &tx[..n_pre];
    let fallback = || preamble_offset(&coarse[..n_pre], preamble, modem.baud_hz);
    let offset_hz = if cfg.n_symbols >= MIN_FREQ_EST_SYMBOLS {
        match estimate_freq_offset(&coarse[n_pre..], modem.baud_hz) {
            Ok(est) => est.offset_hz,
            Err(Error::NoSpectralPeak { .. }) => fallback(),
            Err(e) => return Err(e),
        }
    } else {
        fallback()
    };
    mix_in_place(&mut wave.iq, -offset_hz, wave.fs_hz);
    let mut rx = matched_filter_downsample(&wave, modem, delay)?;
    rx.truncate(total);

    let corr: Complex64 = rx[..n_pre].iter().zip(preamble).map(|(r, s)| r * s.conj()).sum();
    let energy: f64 = preamble.iter().map(|s| s.norm_sqr()).sum();
    let gain = corr.norm() / energy;
    if !(gain > 0.0) {
        return Err(Error::InvalidParameter("received signal has no power".into()));
    }
    for r in rx.iter_mut() {
        *r /= gain;
    }

    let known = match cfg.pll.decision_mode {
        DecisionMode::KnownSymbols => &tx[..],
        DecisionMode::DecidedSymbols => preamble,
    };
    let mut pll = dd_pll(&rx, &cfg.pll, &constellation, Some(known))?;
    let rotation = resolve_rotation(&pll.corrected, preamble)?;
    rotation.undo(&mut pll.corrected);

    let received = pll.corrected.split_off(n_pre);
    let rx_bits = demap_with(&constellation, &received);
    let count = count_ber(&bits[n_pre * bps..], &rx_bits)?;
    let errs = &pll.phase_error[n_pre..];
    let phase_var = errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64;

    Ok(LinkResult {
        record: BerRecord::new(channel, count, &cfg.fec, phase_var),
        received,
        transmitted: tx[n_pre..].to_vec(),
        freq_offset_hz: offset_hz,
        rotation,
    })
}
