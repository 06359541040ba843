//! Experiment configuration in TOML.
//!
//! Every key is optional and falls back to the defaults below; unknown keys
//! are rejected. Sections may be written as tables or as dotted keys
//! (`comb.fsr_hz = 25e9`). `inf` is accepted where a float may be infinite.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::comb::{CombSpec, DemuxConfig};
use crate::error::{Error, Result};
use crate::metrology::DshConfig;
use crate::oscillators::OscillatorSpec;
use crate::rxdsp::{DecisionMode, FecPolicy, PllConfig, MIN_ACQUISITION_SYMBOLS};
use crate::transceiver::{FiberConfig, ModemConfig, NoiseConfig, QamConstellation};

/// Smallest per-channel symbol count accepted for BER runs.
pub const MIN_BER_SYMBOLS: usize = 10_000;

/// Tuning of the demultiplexing laser, applied to every swept channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemuxSection {
    /// DFB offset from the target line, Hz.
    pub detuning_hz: f64,
    pub locking_half_range_hz: f64,
    pub suppression_db: f64,
    pub output_power_mw: f64,
}

impl Default for DemuxSection {
    fn default() -> Self {
        let d = DemuxConfig::default();
        DemuxSection {
            detuning_hz: 0.0,
            locking_half_range_hz: d.locking_half_range_hz,
            suppression_db: d.suppression_db,
            output_power_mw: d.output_power_mw,
        }
    }
}

impl DemuxSection {
    /// Demux settings aimed at `line_freq_hz`.
    pub fn aimed_at(&self, line_freq_hz: f64) -> DemuxConfig {
        DemuxConfig {
            dfb_freq_hz: line_freq_hz + self.detuning_hz,
            locking_half_range_hz: self.locking_half_range_hz,
            suppression_db: self.suppression_db,
            output_power_mw: self.output_power_mw,
        }
    }
}

/// Electrical noise loading. The noise seed is derived per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    /// Symbol SNR after the matched filter, dB; `inf` disables noise.
    pub target_snr_db: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            target_snr_db: NoiseConfig::default().target_snr_db,
        }
    }
}

impl NoiseSection {
    pub fn with_seed(&self, seed: u64) -> NoiseConfig {
        NoiseConfig {
            target_snr_db: self.target_snr_db,
            seed,
        }
    }
}

/// Local oscillator of the coherent receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoSection {
    /// Intradyne offset of the LO above the received carrier, Hz.
    pub offset_hz: f64,
}

impl Default for LoSection {
    fn default() -> Self {
        LoSection { offset_hz: 50e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DshSection {
    pub delay_s: f64,
    pub shift_hz: f64,
    pub rx_noise_psd: f64,
}

impl Default for DshSection {
    fn default() -> Self {
        let d = DshConfig::default();
        DshSection {
            delay_s: d.delay_s,
            shift_hz: d.shift_hz,
            rx_noise_psd: d.rx_noise_psd,
        }
    }
}

impl DshSection {
    pub fn with_seed(&self, seed: u64) -> DshConfig {
        DshConfig {
            delay_s: self.delay_s,
            shift_hz: self.shift_hz,
            rx_noise_psd: self.rx_noise_psd,
            seed,
        }
    }
}

/// FM-noise report settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetrologySection {
    pub fs_hz: f64,
    pub n_samples: usize,
    /// Band over which white floors are read, Hz.
    pub fit_lo_hz: f64,
    pub fit_hi_hz: f64,
    /// Comb lines included in the report.
    pub lines: Vec<usize>,
    pub dsh: DshSection,
}

impl Default for MetrologySection {
    fn default() -> Self {
        MetrologySection {
            fs_hz: 2e9,
            n_samples: 1 << 20,
            fit_lo_hz: 5e6,
            fit_hi_hz: 500e6,
            lines: vec![0, 8, 16],
            dsh: DshSection::default(),
        }
    }
}

/// AWGN calibration sweep. Below about 18 dB the decision-directed loop
/// starts to slip quadrants, so the default grid starts there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub snr_db: Vec<f64>,
    pub n_symbols: usize,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        CalibrationSection {
            snr_db: (18..=25).map(f64::from).collect(),
            n_symbols: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Line indices to sweep.
    pub channels: Vec<usize>,
    /// Payload symbols per channel, excluding the preamble.
    pub n_symbols: usize,
    pub master_seed: u64,
    pub comb: CombSpec,
    pub demux: DemuxSection,
    pub modem: ModemConfig,
    pub fiber: FiberConfig,
    pub noise: NoiseSection,
    pub pll: PllConfig,
    pub fec: FecPolicy,
    pub lo: LoSection,
    /// Carrier and LO model of the unreferenced comparison run.
    pub free_running: OscillatorSpec,
    pub metrology: MetrologySection,
    pub calibration: CalibrationSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let comb = CombSpec::default();
        ExperimentConfig {
            channels: (0..comb.n_lines).collect(),
            n_symbols: 100_000,
            master_seed: 1,
            comb,
            demux: DemuxSection::default(),
            modem: ModemConfig::default(),
            fiber: FiberConfig::default(),
            noise: NoiseSection::default(),
            pll: PllConfig::default(),
            fec: FecPolicy::default(),
            lo: LoSection::default(),
            free_running: OscillatorSpec::free_running_dfb(),
            metrology: MetrologySection::default(),
            calibration: CalibrationSection::default(),
        }
    }
}

fn violated(key: &str, invariant: &str) -> Error {
    Error::Constraint {
        key: key.into(),
        invariant: invariant.into(),
    }
}

fn require(ok: bool, key: &str, invariant: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(violated(key, invariant))
    }
}

fn check_oscillator(prefix: &str, o: &OscillatorSpec) -> Result<()> {
    require(o.h0 >= 0.0 && o.h0.is_finite(), &format!("{prefix}.h0"), "h0 >= 0")?;
    require(
        o.h_flicker >= 0.0 && o.h_flicker.is_finite(),
        &format!("{prefix}.h_flicker"),
        "h_flicker >= 0",
    )?;
    require(
        o.power_mw > 0.0 && o.power_mw.is_finite(),
        &format!("{prefix}.power_mw"),
        "power_mw > 0",
    )?;
    require(
        o.freq_offset_hz.is_finite(),
        &format!("{prefix}.freq_offset_hz"),
        "freq_offset_hz finite",
    )
}

fn finite_positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl ExperimentConfig {
    /// Check every invariant, naming the first offending key.
    pub fn validate(&self) -> Result<()> {
        let c = &self.comb;
        require(finite_positive(c.fsr_hz), "comb.fsr_hz", "fsr_hz > 0")?;
        require(c.n_lines >= 1, "comb.n_lines", "n_lines >= 1")?;
        require(
            c.center_line_index < c.n_lines,
            "comb.center_line_index",
            "center_line_index < n_lines",
        )?;
        require(
            c.line_powers_mw.is_empty() || c.line_powers_mw.len() == c.n_lines,
            "comb.line_powers_mw",
            "line_powers_mw empty or one entry per line",
        )?;
        require(
            c.line_powers_mw.iter().all(|&p| finite_positive(p)),
            "comb.line_powers_mw",
            "every line power > 0",
        )?;
        check_oscillator("comb.master", &c.master)?;
        check_oscillator("comb.rf_drive", &c.rf_drive)?;
        check_oscillator("free_running", &self.free_running)?;

        let d = &self.demux;
        require(d.detuning_hz.is_finite(), "demux.detuning_hz", "detuning_hz finite")?;
        require(
            finite_positive(d.locking_half_range_hz),
            "demux.locking_half_range_hz",
            "locking_half_range_hz > 0",
        )?;
        require(d.suppression_db >= 0.0, "demux.suppression_db", "suppression_db >= 0")?;
        require(
            finite_positive(d.output_power_mw),
            "demux.output_power_mw",
            "output_power_mw > 0",
        )?;

        let m = &self.modem;
        require(
            QamConstellation::new(m.m).is_ok(),
            "modem.m",
            "m in {4, 16, 64, 256}",
        )?;
        require(finite_positive(m.baud_hz), "modem.baud_hz", "baud_hz > 0")?;
        require(m.sps >= 2, "modem.sps", "sps >= 2")?;
        require(
            m.rolloff > 0.0 && m.rolloff <= 1.0,
            "modem.rolloff",
            "0 < rolloff <= 1",
        )?;
        require(
            m.rrc_span_symbols >= 1 && (m.rrc_span_symbols * m.sps) % 2 == 0,
            "modem.rrc_span_symbols",
            "rrc_span_symbols * sps even and > 0",
        )?;
        if self.pll.decision_mode == DecisionMode::DecidedSymbols {
            require(
                m.preamble_symbols >= MIN_ACQUISITION_SYMBOLS,
                "modem.preamble_symbols",
                "preamble_symbols >= 64",
            )?;
        }

        let f = &self.fiber;
        require(
            f.length_km >= 0.0 && f.length_km.is_finite(),
            "fiber.length_km",
            "length_km >= 0",
        )?;
        require(
            f.dispersion_ps_nm_km.is_finite(),
            "fiber.dispersion_ps_nm_km",
            "dispersion_ps_nm_km finite",
        )?;
        require(
            f.attenuation_db_km >= 0.0 && f.attenuation_db_km.is_finite(),
            "fiber.attenuation_db_km",
            "attenuation_db_km >= 0",
        )?;
        require(
            finite_positive(f.wavelength_nm),
            "fiber.wavelength_nm",
            "wavelength_nm > 0",
        )?;

        require(
            !self.noise.target_snr_db.is_nan() && self.noise.target_snr_db != f64::NEG_INFINITY,
            "noise.target_snr_db",
            "target_snr_db a number or inf",
        )?;
        require(
            self.pll.mu1 > 0.0 && self.pll.mu1 < 1.0,
            "pll.mu1",
            "0 < mu1 < 1",
        )?;
        require(
            self.pll.mu2 >= 0.0 && self.pll.mu2 < self.pll.mu1,
            "pll.mu2",
            "0 <= mu2 < mu1",
        )?;
        require(self.fec.ber_7pct > 0.0, "fec.ber_7pct", "ber_7pct > 0")?;
        require(
            self.fec.ber_7pct < self.fec.ber_20pct && self.fec.ber_20pct <= 1.0,
            "fec.ber_20pct",
            "ber_7pct < ber_20pct <= 1",
        )?;
        require(
            self.lo.offset_hz.is_finite() && self.lo.offset_hz.abs() < m.baud_hz / 8.0,
            "lo.offset_hz",
            "|offset_hz| < baud_hz / 8",
        )?;

        require(!self.channels.is_empty(), "channels", "at least one channel")?;
        require(
            self.channels.iter().all(|&k| k < c.n_lines),
            "channels",
            "every channel < comb.n_lines",
        )?;
        let mut seen = self.channels.clone();
        seen.sort_unstable();
        seen.dedup();
        require(seen.len() == self.channels.len(), "channels", "no repeated channel")?;
        require(
            self.n_symbols >= MIN_BER_SYMBOLS,
            "n_symbols",
            "n_symbols >= 10000",
        )?;

        let mt = &self.metrology;
        require(finite_positive(mt.fs_hz), "metrology.fs_hz", "fs_hz > 0")?;
        require(
            mt.n_samples >= 1 << 12,
            "metrology.n_samples",
            "n_samples >= 4096",
        )?;
        require(
            mt.fit_lo_hz > 0.0 && mt.fit_lo_hz < mt.fit_hi_hz && mt.fit_hi_hz <= mt.fs_hz / 2.0,
            "metrology.fit_hi_hz",
            "0 < fit_lo_hz < fit_hi_hz <= fs_hz / 2",
        )?;
        require(
            mt.lines.iter().all(|&k| k < c.n_lines),
            "metrology.lines",
            "every line < comb.n_lines",
        )?;
        require(
            finite_positive(mt.dsh.delay_s),
            "metrology.dsh.delay_s",
            "delay_s > 0",
        )?;
        require(
            finite_positive(mt.dsh.shift_hz),
            "metrology.dsh.shift_hz",
            "shift_hz > 0",
        )?;
        require(
            mt.dsh.rx_noise_psd >= 0.0 && mt.dsh.rx_noise_psd.is_finite(),
            "metrology.dsh.rx_noise_psd",
            "rx_noise_psd >= 0",
        )?;

        let cal = &self.calibration;
        require(
            !cal.snr_db.is_empty() && cal.snr_db.iter().all(|s| s.is_finite()),
            "calibration.snr_db",
            "non-empty list of finite values",
        )?;
        require(
            cal.n_symbols >= MIN_BER_SYMBOLS,
            "calibration.n_symbols",
            "n_symbols >= 10000",
        )
    }

    /// Samples in one transmitted record: preamble plus payload, shaped.
    pub fn record_samples(&self) -> usize {
        record_samples(&self.modem, self.n_symbols)
    }

    /// The configuration as TOML, every key spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }
}

pub(crate) fn record_samples(modem: &ModemConfig, n_symbols: usize) -> usize {
    (modem.preamble_symbols + n_symbols) * modem.sps + modem.rrc_span_symbols * modem.sps
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Parse and validate configuration text.
pub fn parse_config_str(src: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(src).map_err(|e| Error::ConfigParse {
        line: e.span().map(|s| line_of(src, s.start)),
        message: e.message().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Read, parse and validate a configuration file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

/// Annotated reference of every key and its default.
pub fn config_reference() -> String {
    let mut out = String::from(
        "# superchannel experiment configuration: every key with its default.\n\
         # Omitted keys take these values; unknown keys are errors.\n\n",
    );
    out.push_str(&ExperimentConfig::default().to_toml());
    out
}
