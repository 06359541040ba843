//! Gain-switched comb generation and injection-locked demultiplexing.
//!
//! Lines are kept as descriptors that share two phase references: the master
//! laser phase (common to every line) and the RF drive phase, which appears on
//! line `k` multiplied by `k - center`. A line's field is only materialised on
//! request, relative to its own frequency, so a 160 GHz wide comb never needs
//! to be sampled at hundreds of GS/s.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{mix_in_place, SampledField};
use crate::oscillators::{OscillatorSpec, PhaseTrajectory};
use crate::seed::derive_seed;

/// Power of every line when `line_powers_mw` is left empty.
pub const DEFAULT_LINE_POWER_MW: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombSpec {
    pub fsr_hz: f64,
    pub n_lines: usize,
    pub center_line_index: usize,
    /// Per-line power in mW. Empty means flat at [`DEFAULT_LINE_POWER_MW`].
    pub line_powers_mw: Vec<f64>,
    pub master: OscillatorSpec,
    pub rf_drive: OscillatorSpec,
}

impl Default for CombSpec {
    fn default() -> Self {
        CombSpec {
            fsr_hz: 10e9,
            n_lines: 17,
            center_line_index: 8,
            line_powers_mw: Vec::new(),
            master: OscillatorSpec::master_laser(),
            rf_drive: OscillatorSpec::rf_drive(),
        }
    }
}

impl CombSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.fsr_hz > 0.0 && self.fsr_hz.is_finite()) {
            return Err(invalid(format!("fsr_hz must be > 0, got {}", self.fsr_hz)));
        }
        if self.n_lines < 1 {
            return Err(invalid("n_lines must be >= 1"));
        }
        if self.center_line_index >= self.n_lines {
            return Err(invalid(format!(
                "center_line_index {} outside 0..{}",
                self.center_line_index, self.n_lines
            )));
        }
        if !self.line_powers_mw.is_empty() && self.line_powers_mw.len() != self.n_lines {
            return Err(invalid(format!(
                "line_powers_mw has {} entries for {} lines",
                self.line_powers_mw.len(),
                self.n_lines
            )));
        }
        if self
            .line_powers_mw
            .iter()
            .any(|p| !(*p > 0.0 && p.is_finite()))
        {
            return Err(invalid("all line powers must be > 0"));
        }
        self.master.validate()?;
        self.rf_drive.validate()
    }

    pub fn line_power_mw(&self, k: usize) -> f64 {
        self.line_powers_mw
            .get(k)
            .copied()
            .unwrap_or(DEFAULT_LINE_POWER_MW)
    }

    /// Frequency of line `k` relative to the simulation centre:
    /// `(k - center)·fsr`.
    pub fn line_frequency(&self, k: usize) -> Result<f64> {
        if k >= self.n_lines {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.n_lines,
            });
        }
        Ok(self.order(k) as f64 * self.fsr_hz)
    }

    /// Signed harmonic order of line `k` relative to the centre line.
    pub fn order(&self, k: usize) -> i64 {
        k as i64 - self.center_line_index as i64
    }
}

/// Free-function form of [`CombSpec::line_frequency`].
pub fn line_frequency(spec: &CombSpec, k: usize) -> Result<f64> {
    spec.line_frequency(k)
}

/// Descriptor of one comb line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineDescriptor {
    pub index: usize,
    pub freq_hz: f64,
    pub power_mw: f64,
}

/// One realisation of the comb: its `CombSpec` plus the shared phase references.
#[derive(Debug, Clone)]
pub struct CombRealization {
    pub spec: CombSpec,
    pub master_phase: PhaseTrajectory,
    pub rf_phase: PhaseTrajectory,
}

impl CombRealization {
    pub fn fs_hz(&self) -> f64 {
        self.master_phase.fs_hz
    }

    pub fn n_samples(&self) -> usize {
        self.master_phase.len()
    }

    pub fn lines(&self) -> Vec<LineDescriptor> {
        (0..self.spec.n_lines)
            .map(|k| LineDescriptor {
                index: k,
                freq_hz: self.spec.order(k) as f64 * self.spec.fsr_hz,
                power_mw: self.spec.line_power_mw(k),
            })
            .collect()
    }

    /// Phase of line `k` with its carrier removed: `φ_master + (k-c)·φ_rf`.
    pub fn line_phase(&self, k: usize) -> Result<Vec<f64>> {
        self.spec.line_frequency(k)?;
        let order = self.spec.order(k) as f64;
        Ok(self
            .master_phase
            .samples
            .iter()
            .zip(&self.rf_phase.samples)
            .map(|(m, r)| m + order * r)
            .collect())
    }

    /// Field of line `k`, expressed relative to the line's own frequency
    /// (`center_offset_hz = f_k`).
    pub fn line_field(&self, k: usize) -> Result<SampledField> {
        let amp = self.spec.line_power_mw(k).sqrt();
        let iq = self
            .line_phase(k)?
            .into_iter()
            .map(|phi| Complex64::from_polar(amp, phi))
            .collect();
        SampledField::new(iq, self.fs_hz(), self.spec.line_frequency(k)?)
    }
}

/// Draw one comb realisation of `n` samples at `fs_hz`.
///
/// The master and RF phase trajectories are drawn once from child seeds of
/// `seed`, so every line shares the identical master phase.
pub fn generate_comb(spec: &CombSpec, n: usize, fs_hz: f64, seed: u64) -> Result<CombRealization> {
    spec.validate()?;
    let master_phase =
        PhaseTrajectory::synthesize(&spec.master, n, fs_hz, derive_seed(seed, 0, "comb.master"))?;
    let rf_phase =
        PhaseTrajectory::synthesize(&spec.rf_drive, n, fs_hz, derive_seed(seed, 0, "comb.rf"))?;
    Ok(CombRealization {
        spec: spec.clone(),
        master_phase,
        rf_phase,
    })
}

/// Tuning and quality of the injection-locked demultiplexing laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemuxConfig {
    /// Free-running DFB frequency relative to the simulation centre, Hz.
    pub dfb_freq_hz: f64,
    pub locking_half_range_hz: f64,
    pub suppression_db: f64,
    /// Total output power of the locked laser, mW.
    pub output_power_mw: f64,
}

impl Default for DemuxConfig {
    fn default() -> Self {
        DemuxConfig {
            dfb_freq_hz: 0.0,
            locking_half_range_hz: 2.5e9,
            suppression_db: 40.0,
            output_power_mw: 10.0,
        }
    }
}

impl DemuxConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.dfb_freq_hz.is_finite() {
            return Err(invalid("dfb_freq_hz must be finite"));
        }
        if !(self.locking_half_range_hz > 0.0) {
            return Err(invalid("locking_half_range_hz must be > 0"));
        }
        if !(self.suppression_db >= 0.0) {
            return Err(invalid("suppression_db must be >= 0"));
        }
        if !(self.output_power_mw > 0.0 && self.output_power_mw.is_finite()) {
            return Err(invalid("output_power_mw must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DemuxedCarrier {
    /// Locked carrier at baseband plus suppressed residual lines.
    pub field: SampledField,
    pub locked_line_index: usize,
    /// `dfb_freq - f_locked`, Hz.
    pub detuning_hz: f64,
    /// Carrier-to-strongest-residual ratio in the output, dB; infinite when
    /// no residual line falls inside the simulated band.
    pub achieved_suppression_db: f64,
    /// Number of residual lines represented in `field`.
    pub residual_lines: usize,
}

/// Index of the line nearest to `freq_hz`; equidistant ties go to the lower
/// index.
pub fn nearest_line(spec: &CombSpec, freq_hz: f64) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for k in 0..spec.n_lines {
        let d = freq_hz - spec.order(k) as f64 * spec.fsr_hz;
        if d.abs() < best.1.abs() {
            best = (k, d);
        }
    }
    best
}

/// Demultiplex one line by injection locking.
///
/// The DFB locks to the spectrally closest line and copies its phase exactly.
/// The output is referenced to the locked line's frequency. Every other line
/// whose offset from the locked line lies strictly inside `±fs/2` leaks
/// through at its relative comb power minus `suppression_db`; lines outside
/// the simulated band are dropped. The total output power is
/// `output_power_mw`.
pub fn demux_line(comb: &CombRealization, cfg: &DemuxConfig) -> Result<DemuxedCarrier> {
    cfg.validate()?;
    let spec = &comb.spec;
    let (locked, detuning) = nearest_line(spec, cfg.dfb_freq_hz);
    if detuning.abs() > cfg.locking_half_range_hz {
        return Err(Error::NoLineInLockingRange {
            nearest_line: locked,
            detuning_hz: detuning,
            half_range_hz: cfg.locking_half_range_hz,
        });
    }

    let fs = comb.fs_hz();
    let f_locked = spec.line_frequency(locked)?;
    let p_locked = spec.line_power_mw(locked);
    let leak = 10f64.powf(-cfg.suppression_db / 10.0);

    // Relative powers (carrier = 1) of the lines that fit in the band.
    let residuals: Vec<(usize, f64, f64)> = (0..spec.n_lines)
        .filter(|&j| j != locked)
        .map(|j| {
            let df = spec.order(j) as f64 * spec.fsr_hz - f_locked;
            (j, df, spec.line_power_mw(j) / p_locked * leak)
        })
        .filter(|&(_, df, _)| df.abs() < fs / 2.0)
        .collect();
    let total_rel: f64 = 1.0 + residuals.iter().map(|r| r.2).sum::<f64>();
    let carrier_power = cfg.output_power_mw / total_rel;

    let carrier_amp = carrier_power.sqrt();
    let mut iq: Vec<Complex64> = comb
        .line_phase(locked)?
        .into_iter()
        .map(|phi| Complex64::from_polar(carrier_amp, phi))
        .collect();

    let mut achieved = f64::INFINITY;
    for &(j, df, rel) in &residuals {
        let amp = (carrier_power * rel).sqrt();
        let mut line: Vec<Complex64> = comb
            .line_phase(j)?
            .into_iter()
            .map(|phi| Complex64::from_polar(amp, phi))
            .collect();
        mix_in_place(&mut line, df, fs);
        for (acc, z) in iq.iter_mut().zip(line) {
            *acc += z;
        }
        achieved = achieved.min(-10.0 * rel.log10());
    }

    Ok(DemuxedCarrier {
        field: SampledField::new(iq, fs, f_locked)?,
        locked_line_index: locked,
        detuning_hz: detuning,
        achieved_suppression_db: achieved,
        residual_lines: residuals.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_spec() -> CombSpec {
        CombSpec {
            master: OscillatorSpec::noiseless(1.0),
            rf_drive: OscillatorSpec::noiseless(1.0),
            ..CombSpec::default()
        }
    }

    #[test]
    fn line_frequency_arithmetic() {
        let spec = CombSpec::default();
        assert_eq!(spec.line_frequency(8).unwrap(), 0.0);
        assert_eq!(spec.line_frequency(16).unwrap(), 80e9);
        assert_eq!(
            spec.line_frequency(16).unwrap() - spec.line_frequency(0).unwrap(),
            160e9
        );
        assert!(matches!(
            spec.line_frequency(17),
            Err(Error::IndexOutOfRange { index: 17, len: 17 })
        ));
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = CombSpec::default();
        s.fsr_hz = -1.0;
        assert!(s.validate().is_err());
        let mut s = CombSpec::default();
        s.n_lines = 0;
        assert!(s.validate().is_err());
        let mut s = CombSpec::default();
        s.line_powers_mw = vec![1.0; 3];
        assert!(s.validate().is_err());
        let mut s = CombSpec::default();
        s.line_powers_mw = vec![1.0; 17];
        s.line_powers_mw[4] = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn noiseless_lines_are_pure_tones() {
        let mut spec = quiet_spec();
        spec.line_powers_mw = (0..17).map(|k| 0.05 + 0.01 * k as f64).collect();
        let comb = generate_comb(&spec, 256, 40e9, 5).unwrap();
        for line in comb.lines() {
            let f = comb.line_field(line.index).unwrap();
            assert_eq!(f.center_offset_hz, line.freq_hz);
            for z in &f.iq {
                assert!((z.norm_sqr() - line.power_mw).abs() < 1e-12);
                assert!(z.arg().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lines_share_master_phase() {
        let comb = generate_comb(&CombSpec::default(), 4096, 20e9, 11).unwrap();
        let rf = &comb.rf_phase.samples;
        for (k, j) in [(0usize, 16usize), (3, 9), (8, 8), (12, 2)] {
            let pk = comb.line_phase(k).unwrap();
            let pj = comb.line_phase(j).unwrap();
            let order = k as f64 - j as f64;
            for t in 0..pk.len() {
                let want = order * rf[t];
                assert!((pk[t] - pj[t] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn demux_locks_nearest_line() {
        let comb = generate_comb(&quiet_spec(), 64, 20e9, 1).unwrap();
        let cfg = DemuxConfig {
            dfb_freq_hz: 52e9,
            ..DemuxConfig::default()
        };
        let d = demux_line(&comb, &cfg).unwrap();
        assert_eq!(d.locked_line_index, 13);
        assert_eq!(comb.spec.line_frequency(13).unwrap(), 50e9);
        assert!((d.detuning_hz - 2e9).abs() < 1e-3);
    }

    #[test]
    fn demux_tie_goes_to_lower_index() {
        let comb = generate_comb(&quiet_spec(), 64, 20e9, 1).unwrap();
        let cfg = DemuxConfig {
            dfb_freq_hz: 55e9,
            locking_half_range_hz: 5e9,
            ..DemuxConfig::default()
        };
        let d = demux_line(&comb, &cfg).unwrap();
        assert_eq!(d.locked_line_index, 13);
    }

    #[test]
    fn demux_out_of_range_is_an_error() {
        let comb = generate_comb(&quiet_spec(), 64, 20e9, 1).unwrap();
        let cfg = DemuxConfig {
            dfb_freq_hz: 54e9,
            ..DemuxConfig::default()
        };
        assert!(matches!(
            demux_line(&comb, &cfg),
            Err(Error::NoLineInLockingRange { nearest_line: 13, .. })
        ));
        // beyond the outermost line
        let cfg = DemuxConfig {
            dfb_freq_hz: 95e9,
            ..DemuxConfig::default()
        };
        assert!(demux_line(&comb, &cfg).is_err());
    }

    #[test]
    fn demux_output_power_and_phase_copy() {
        let comb = generate_comb(&CombSpec::default(), 1 << 14, 400e9, 2).unwrap();
        let cfg = DemuxConfig {
            dfb_freq_hz: -30e9,
            ..DemuxConfig::default()
        };
        let d = demux_line(&comb, &cfg).unwrap();
        assert_eq!(d.locked_line_index, 5);
        assert_eq!(d.residual_lines, 16);
        assert!((d.achieved_suppression_db - 40.0).abs() < 1e-9);
        let p = d.field.mean_power();
        assert!((p / 10.0 - 1.0).abs() < 1e-3, "power {p}");

        // Without residual lines in band the output is exactly the line.
        let narrow = generate_comb(&CombSpec::default(), 4096, 5e9, 2).unwrap();
        let d = demux_line(&narrow, &cfg).unwrap();
        assert_eq!(d.residual_lines, 0);
        assert!(d.achieved_suppression_db.is_infinite());
        let phase = narrow.line_phase(5).unwrap();
        for (z, phi) in d.field.iq.iter().zip(phase) {
            assert!((z.norm_sqr() - 10.0).abs() < 1e-9);
            let diff = (z.arg() - phi).rem_euclid(std::f64::consts::TAU);
            assert!(diff.min(std::f64::consts::TAU - diff) < 1e-9);
        }
    }
}
