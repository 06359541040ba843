use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use super::config::ExperimentConfig;
use super::link::{
    free_running_carrier, free_running_field, referenced_lo, run_link, LinkConfig, LinkResult,
    LinkSeeds,
};
use crate::comb::{demux_line, generate_comb};
use crate::error::{invalid, Result};
use crate::field::SampledField;
use crate::metrology::{dsh_emulate, fm_noise_psd, PsdEstimate, WelchParams};
use crate::oscillators::{cw_field, OscillatorSpec, PhaseTrajectory};
use crate::rxdsp::{resolved_clusters, BerRecord};
use crate::seed::derive_seed;
use crate::transceiver::{qam_ber_awgn, QamConstellation};

/// Spectral span covered by `n_channels` lines spaced `fsr_hz` apart.
pub fn usable_span(fsr_hz: f64, n_channels: usize) -> Result<f64> {
    if n_channels < 1 {
        return Err(invalid("need at least one channel"));
    }
    if !(fsr_hz > 0.0 && fsr_hz.is_finite()) {
        return Err(invalid(format!("fsr_hz must be > 0, got {fsr_hz}")));
    }
    Ok(fsr_hz * (n_channels - 1) as f64)
}

/// Where the carrier and LO phase come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Referencing {
    /// Carrier injection-locked to the comb; LO from an independent comb.
    Comb,
    /// Carrier and LO are unlocked lasers of the `free_running` model.
    FreeRunning,
}

/// One channel through the full chain.
pub fn run_channel(cfg: &ExperimentConfig, channel: usize, mode: Referencing) -> Result<LinkResult> {
    let link = LinkConfig::from_experiment(cfg);
    let seeds = LinkSeeds::for_channel(cfg.master_seed, channel);
    let n = link.record_samples();
    let fs = cfg.modem.sample_rate_hz();
    let f_k = cfg.comb.line_frequency(channel)?;
    let (carrier, lo) = match mode {
        Referencing::Comb => {
            let comb = generate_comb(&cfg.comb, n, fs, seeds.comb)?;
            let carrier = demux_line(&comb, &cfg.demux.aimed_at(f_k))?;
            let lo = referenced_lo(
                &cfg.comb,
                carrier.locked_line_index,
                n,
                fs,
                cfg.lo.offset_hz,
                seeds.lo,
            )?;
            (carrier, lo)
        }
        Referencing::FreeRunning => {
            let tx_laser = OscillatorSpec {
                power_mw: cfg.demux.output_power_mw,
                ..cfg.free_running
            };
            let field = free_running_field(&tx_laser, n, fs, f_k, seeds.carrier)?;
            let lo = free_running_field(&cfg.free_running, n, fs, f_k + cfg.lo.offset_hz, seeds.lo)?;
            (free_running_carrier(field, channel), lo)
        }
    };
    run_link(&link, &carrier, &lo, seeds.bits, seeds.noise, channel)
}

/// Outcome of one swept channel.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelOutcome {
    pub channel: usize,
    pub record: Option<BerRecord>,
    pub error: Option<String>,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    /// One entry per requested channel, in channel order.
    pub outcomes: Vec<ChannelOutcome>,
    pub config: ExperimentConfig,
    pub version: String,
}

impl SweepReport {
    pub fn has_errors(&self) -> bool {
        self.outcomes.iter().any(|o| o.error.is_some())
    }

    pub fn records(&self) -> impl Iterator<Item = &BerRecord> {
        self.outcomes.iter().filter_map(|o| o.record.as_ref())
    }

    /// Channels whose BER lies strictly below `threshold`.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.records().filter(|r| r.ber < threshold).count()
    }
}

/// BER of every configured channel with comb referencing.
///
/// Channels run concurrently. A failing channel is recorded and the sweep
/// continues.
pub fn run_channel_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut channels = cfg.channels.clone();
    channels.sort_unstable();
    let outcomes = channels
        .par_iter()
        .map(|&k| {
            let t0 = Instant::now();
            let res = run_channel(cfg, k, Referencing::Comb);
            let wall_clock_s = t0.elapsed().as_secs_f64();
            match res {
                Ok(r) => ChannelOutcome {
                    channel: k,
                    record: Some(r.record),
                    error: None,
                    wall_clock_s,
                },
                Err(e) => ChannelOutcome {
                    channel: k,
                    record: None,
                    error: Some(e.to_string()),
                    wall_clock_s,
                },
            }
        })
        .collect();
    Ok(SweepReport {
        outcomes,
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

#[derive(Debug, Clone)]
pub struct ConstellationCase {
    pub mode: Referencing,
    pub link: LinkResult,
    /// Constellation points decided correctly at least 90 % of the time.
    pub resolved_clusters: usize,
}

#[derive(Debug, Clone)]
pub struct ConstellationComparison {
    pub channel: usize,
    pub referenced: ConstellationCase,
    pub free_running: ConstellationCase,
}

/// Fraction of a point's symbols that must be decided correctly for the
/// point to count as resolved.
pub const CLUSTER_FRACTION: f64 = 0.9;

/// The centre channel with and without comb referencing. Bits and noise are
/// shared; only the carrier and LO lasers differ.
pub fn run_constellation_compare(cfg: &ExperimentConfig) -> Result<ConstellationComparison> {
    cfg.validate()?;
    let channel = cfg.comb.center_line_index;
    let constellation = cfg.modem.constellation()?;
    let case = |mode| -> Result<ConstellationCase> {
        let link = run_channel(cfg, channel, mode)?;
        let resolved = resolved_clusters(&link.received, &link.transmitted, &constellation, CLUSTER_FRACTION);
        Ok(ConstellationCase {
            mode,
            link,
            resolved_clusters: resolved,
        })
    };
    let (referenced, free_running) = rayon::join(|| case(Referencing::Comb), || case(Referencing::FreeRunning));
    Ok(ConstellationComparison {
        channel,
        referenced: referenced?,
        free_running: free_running?,
    })
}

/// Estimated FM-noise spectrum of one source.
#[derive(Debug, Clone, Serialize)]
pub struct FmNoiseSource {
    /// `master`, `line_<k>` or `free_running`.
    pub name: String,
    pub estimate: PsdEstimate,
    /// Median PSD over the fit band, Hz²/Hz.
    pub floor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FmNoiseReport {
    pub sources: Vec<FmNoiseSource>,
    /// Master laser measured by the emulated self-heterodyne setup.
    pub dsh_master: FmNoiseSource,
    pub fit_band_hz: (f64, f64),
}

impl FmNoiseReport {
    pub fn source(&self, name: &str) -> Option<&FmNoiseSource> {
        self.sources.iter().find(|s| s.name == name)
    }
}

/// FM-noise spectra of the master, selected demultiplexed lines and the
/// free-running reference.
pub fn run_fm_noise_report(cfg: &ExperimentConfig) -> Result<FmNoiseReport> {
    cfg.validate()?;
    let m = &cfg.metrology;
    let band = (m.fit_lo_hz, m.fit_hi_hz);
    let seed = cfg.master_seed;
    let comb = generate_comb(&cfg.comb, m.n_samples, m.fs_hz, derive_seed(seed, 0, "fm.comb"))?;
    let params = WelchParams::for_length(m.n_samples);
    let source = |name: String, estimate: PsdEstimate| -> Result<FmNoiseSource> {
        let floor = estimate.band_median(band.0, band.1)?;
        Ok(FmNoiseSource {
            name,
            estimate,
            floor,
        })
    };

    let mut sources = vec![source("master".into(), fm_noise_psd(&comb.master_phase, &params)?)?];
    let mut lines = m.lines.clone();
    lines.sort_unstable();
    lines.dedup();
    let line_sources: Vec<Result<FmNoiseSource>> = lines
        .par_iter()
        .map(|&k| {
            let carrier = demux_line(&comb, &cfg.demux.aimed_at(cfg.comb.line_frequency(k)?))?;
            source(format!("line_{k}"), fm_noise_psd(&carrier.field, &params)?)
        })
        .collect();
    for s in line_sources {
        sources.push(s?);
    }
    let dfb = PhaseTrajectory::synthesize(&cfg.free_running, m.n_samples, m.fs_hz, derive_seed(seed, 0, "fm.dfb"))?;
    sources.push(source("free_running".into(), fm_noise_psd(&dfb, &params)?)?);

    let master_field: SampledField = cw_field(&cfg.comb.master, &comb.master_phase)?;
    let dsh = m.dsh.with_seed(derive_seed(seed, 0, "fm.dsh"));
    let delay = (dsh.delay_s * m.fs_hz).round() as usize;
    let dsh_params = WelchParams::for_length(m.n_samples.saturating_sub(delay + 1));
    let dsh_master = source("dsh_master".into(), dsh_emulate(&master_field, &dsh, &dsh_params)?)?;

    Ok(FmNoiseReport {
        sources,
        dsh_master,
        fit_band_hz: band,
    })
}

/// One point of the BER-versus-SNR calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub snr_db: f64,
    pub ber_sim: f64,
    pub ber_analytic: f64,
    pub bits: u64,
    pub errors: u64,
    /// Extra SNR the analytic curve needs to reach `ber_sim`, dB. `None`
    /// when no errors were counted.
    pub snr_gap_db: Option<f64>,
}

/// SNR at which the analytic Gray-QAM curve reaches `ber`, by bisection.
pub fn analytic_snr_for_ber(m: usize, ber: f64) -> Result<f64> {
    QamConstellation::new(m)?;
    if !(ber > 0.0 && ber < 0.5) {
        return Err(invalid(format!("BER {ber} outside (0, 0.5)")));
    }
    let (mut lo, mut hi) = (-20.0f64, 80.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if qam_ber_awgn(m, mid)? > ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Simulated BER against the analytic AWGN curve, over the configured SNR
/// list. Phase noise is switched off; the fibre, coarse offset removal and
/// loop are kept, so the gap measures the whole receiver.
pub fn calibrate_awgn(cfg: &ExperimentConfig) -> Result<Vec<CalibrationPoint>> {
    cfg.validate()?;
    let cal = &cfg.calibration;
    let base = LinkConfig {
        n_symbols: cal.n_symbols,
        ..LinkConfig::from_experiment(cfg)
    };
    let n = base.record_samples();
    let fs = cfg.modem.sample_rate_hz();
    let quiet = OscillatorSpec::noiseless(cfg.demux.output_power_mw);
    let carrier_field = cw_field(&quiet, &PhaseTrajectory::zeros(n, fs))?;
    let carrier = free_running_carrier(carrier_field, cfg.comb.center_line_index);
    let lo_iq: Vec<Complex64> = (0..n).map(|_| Complex64::new(1.0, 0.0)).collect();
    let lo = SampledField::new(lo_iq, fs, cfg.lo.offset_hz)?;

    cal.snr_db
        .par_iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let link = LinkConfig {
                target_snr_db: snr_db,
                ..base
            };
            let seed = cfg.master_seed;
            let r = run_link(
                &link,
                &carrier,
                &lo,
                derive_seed(seed, i as u64, "cal.bits"),
                derive_seed(seed, i as u64, "cal.noise"),
                carrier.locked_line_index,
            )?
            .record;
            let snr_gap_db = if r.bit_errors > 0 {
                Some(analytic_snr_for_ber(cfg.modem.m, r.ber)? - snr_db)
            } else {
                None
            };
            Ok(CalibrationPoint {
                snr_db,
                ber_sim: r.ber,
                ber_analytic: qam_ber_awgn(cfg.modem.m, snr_db)?,
                bits: r.bits_compared,
                errors: r.bit_errors,
                snr_gap_db,
            })
        })
        .collect()
}
