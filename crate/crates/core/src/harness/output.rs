//! CSV payloads and the JSON run manifest.
//!
//! CSV text is a pure function of the results, so equal runs give
//! byte-identical files. Timing lives only in the manifest.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::experiments::{
    CalibrationPoint, ConstellationCase, ConstellationComparison, FmNoiseReport, SweepReport,
};
use crate::error::Result;

pub const SWEEP_HEADER: &str = "channel,ber,bits,errors,fec_class,pll_phase_var";

/// Per-channel BER table. Failed channels read `ERROR` with empty numbers.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for o in &report.outcomes {
        match &o.record {
            Some(r) => writeln!(
                out,
                "{},{},{},{},{},{}",
                o.channel, r.ber, r.bits_compared, r.bit_errors, r.fec_class, r.mean_pll_phase_variance
            ),
            None => writeln!(out, "{},,,,ERROR,", o.channel),
        }
        .expect("writing to a String");
    }
    out
}

pub fn symbols_csv(symbols: &[Complex64]) -> String {
    let mut out = String::with_capacity(40 * symbols.len() + 4);
    out.push_str("i,q\n");
    for s in symbols {
        writeln!(out, "{},{}", s.re, s.im).expect("writing to a String");
    }
    out
}

pub fn constellation_summary_csv(cmp: &ConstellationComparison) -> String {
    let mut out = String::from("case,channel,ber,bits,errors,fec_class,pll_phase_var,resolved_clusters\n");
    let row = |out: &mut String, name: &str, c: &ConstellationCase| {
        let r = &c.link.record;
        writeln!(
            out,
            "{name},{},{},{},{},{},{},{}",
            r.channel_index,
            r.ber,
            r.bits_compared,
            r.bit_errors,
            r.fec_class,
            r.mean_pll_phase_variance,
            c.resolved_clusters
        )
        .expect("writing to a String");
    };
    row(&mut out, "referenced", &cmp.referenced);
    row(&mut out, "free_running", &cmp.free_running);
    out
}

pub fn calibration_csv(points: &[CalibrationPoint]) -> String {
    let mut out = String::from("snr_db,ber_sim,ber_analytic,bits,errors,snr_gap_db\n");
    for p in points {
        let gap = p.snr_gap_db.map(|g| g.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.snr_db, p.ber_sim, p.ber_analytic, p.bits, p.errors, gap
        )
        .expect("writing to a String");
    }
    out
}

pub fn fm_summary_csv(report: &FmNoiseReport) -> String {
    let mut out = String::from("source,floor_hz2_per_hz,linewidth_hz\n");
    for s in report.sources.iter().chain(std::iter::once(&report.dsh_master)) {
        writeln!(out, "{},{},{}", s.name, s.floor, std::f64::consts::PI * s.floor)
            .expect("writing to a String");
    }
    out
}

pub fn plan_csv(fsr_hz: f64, n_channels: usize, span_hz: f64) -> String {
    format!("fsr_hz,n_channels,usable_span_hz\n{fsr_hz},{n_channels},{span_hz}\n")
}

/// Timing and status of one channel, for the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelTiming {
    pub channel: usize,
    pub wall_clock_s: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub software: String,
    pub version: String,
    pub master_seed: u64,
    pub threads: usize,
    pub elapsed_s: f64,
    pub outputs: Vec<String>,
    pub channels: Vec<ChannelTiming>,
    pub config: ExperimentConfig,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: &ExperimentConfig, threads: usize) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            software: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            master_seed: config.master_seed,
            threads,
            elapsed_s: 0.0,
            outputs: Vec::new(),
            channels: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest always serializes")
    }
}

/// Writes files into one output directory and remembers their names.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        fs::write(self.root.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}
