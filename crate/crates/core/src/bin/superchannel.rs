use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use superchannel::harness::{
    calibrate_awgn, calibration_csv, config_reference, constellation_summary_csv, fm_summary_csv,
    parse_config, plan_csv, run_channel_sweep, run_constellation_compare, run_fm_noise_report,
    sweep_csv, symbols_csv, usable_span, ChannelTiming, ExperimentConfig, OutputDir, RunManifest,
};
use superchannel::{Error, Result};

#[derive(Parser)]
#[command(
    name = "superchannel",
    version,
    about = "Comb-referenced superchannel simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER of every configured channel.
    Sweep(Common),
    /// Centre channel with and without comb referencing.
    Constellation(Common),
    /// FM-noise spectra of the master, comb lines and free-running laser.
    Fmnoise(Common),
    /// Simulated BER against the analytic AWGN curve.
    CalibrateAwgn(Common),
    /// Usable spectral span of the configured channel set.
    Plan(Common),
    /// Print every configuration key with its default.
    ConfigReference,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Channel list such as `0,3,8-12`, overriding the configuration.
    #[arg(long)]
    channels: Option<String>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_channels(list: &str) -> Result<Vec<usize>> {
    let bad = |s: &str| Error::ConfigParse {
        line: None,
        message: format!("bad channel list entry `{s}`"),
    };
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad(part))?;
                let b: usize = b.trim().parse().map_err(|_| bad(part))?;
                if b < a {
                    return Err(bad(part));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    Ok(out)
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => parse_config(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(list) = &self.channels {
            cfg.channels = parse_channels(list)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Returns whether any channel recorded an error.
fn execute(
    name: &str,
    args: &Common,
    run: fn(&ExperimentConfig, &mut OutputDir, &mut RunManifest) -> Result<bool>,
) -> Result<bool> {
    let cfg = args.load()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let mut out = OutputDir::create(&args.out)?;
    let mut manifest = RunManifest::new(name, &cfg, pool.current_num_threads());
    let t0 = Instant::now();
    let failed = pool.install(|| run(&cfg, &mut out, &mut manifest))?;
    manifest.elapsed_s = t0.elapsed().as_secs_f64();
    manifest.outputs = out.written().to_vec();
    std::fs::write(out.path("run_manifest.json"), manifest.to_json())?;
    Ok(failed)
}

fn sweep(cfg: &ExperimentConfig, out: &mut OutputDir, manifest: &mut RunManifest) -> Result<bool> {
    let report = run_channel_sweep(cfg)?;
    out.write("sweep.csv", sweep_csv(&report).as_bytes())?;
    manifest.channels = report
        .outcomes
        .iter()
        .map(|o| ChannelTiming {
            channel: o.channel,
            wall_clock_s: o.wall_clock_s,
            error: o.error.clone(),
        })
        .collect();
    for o in &report.outcomes {
        match (&o.record, &o.error) {
            (Some(r), _) => println!(
                "channel {:>2}  BER {:.3e}  {}",
                o.channel, r.ber, r.fec_class
            ),
            (None, Some(e)) => println!("channel {:>2}  ERROR {e}", o.channel),
            _ => {}
        }
    }
    Ok(report.has_errors())
}

fn constellation(cfg: &ExperimentConfig, out: &mut OutputDir, _: &mut RunManifest) -> Result<bool> {
    let cmp = run_constellation_compare(cfg)?;
    out.write(
        "constellation_referenced.csv",
        symbols_csv(&cmp.referenced.link.received).as_bytes(),
    )?;
    out.write(
        "constellation_free_running.csv",
        symbols_csv(&cmp.free_running.link.received).as_bytes(),
    )?;
    out.write(
        "constellation_ber.csv",
        constellation_summary_csv(&cmp).as_bytes(),
    )?;
    for (name, c) in [
        ("referenced", &cmp.referenced),
        ("free-running", &cmp.free_running),
    ] {
        println!(
            "{name:>12}: BER {:.3e}  {}  clusters {}",
            c.link.record.ber, c.link.record.fec_class, c.resolved_clusters
        );
    }
    Ok(false)
}

fn fmnoise(cfg: &ExperimentConfig, out: &mut OutputDir, _: &mut RunManifest) -> Result<bool> {
    let report = run_fm_noise_report(cfg)?;
    for s in report
        .sources
        .iter()
        .chain(std::iter::once(&report.dsh_master))
    {
        let mut buf = Vec::new();
        s.estimate.write_csv(&mut buf)?;
        out.write(&format!("fm_noise_{}.csv", s.name), &buf)?;
        println!("{:>14}: floor {:.4e} Hz^2/Hz", s.name, s.floor);
    }
    out.write("fm_noise_summary.csv", fm_summary_csv(&report).as_bytes())?;
    Ok(false)
}

fn calibrate(cfg: &ExperimentConfig, out: &mut OutputDir, _: &mut RunManifest) -> Result<bool> {
    let points = calibrate_awgn(cfg)?;
    out.write("awgn_calibration.csv", calibration_csv(&points).as_bytes())?;
    for p in &points {
        let gap = p
            .snr_gap_db
            .map(|g| format!("{g:+.2} dB"))
            .unwrap_or_else(|| "-".into());
        println!(
            "SNR {:>5.1} dB  sim {:.3e}  analytic {:.3e}  gap {gap}",
            p.snr_db, p.ber_sim, p.ber_analytic
        );
    }
    Ok(false)
}

fn plan(cfg: &ExperimentConfig, out: &mut OutputDir, _: &mut RunManifest) -> Result<bool> {
    let n = cfg.channels.len();
    let span = usable_span(cfg.comb.fsr_hz, n)?;
    out.write("plan.csv", plan_csv(cfg.comb.fsr_hz, n, span).as_bytes())?;
    println!(
        "{n} channels at {} GHz spacing span {} GHz",
        cfg.comb.fsr_hz / 1e9,
        span / 1e9
    );
    Ok(false)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(a) => execute("sweep", a, sweep),
        Command::Constellation(a) => execute("constellation", a, constellation),
        Command::Fmnoise(a) => execute("fmnoise", a, fmnoise),
        Command::CalibrateAwgn(a) => execute("calibrate-awgn", a, calibrate),
        Command::Plan(a) => execute("plan", a, plan),
        Command::ConfigReference => {
            print!("{}", config_reference());
            Ok(false)
        }
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
