//! Acceptance criteria, run in sequence so timings are not shared with
//! other tests. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use superchannel::comb::{demux_line, generate_comb, CombSpec, DemuxConfig};
use superchannel::harness::{
    calibrate_awgn, run_channel_sweep, run_constellation_compare, usable_span, DemuxSection,
    ExperimentConfig,
};
use superchannel::metrology::{
    dsh_emulate, fm_noise_psd, optical_spectrum, DshConfig, WelchParams,
};
use superchannel::oscillators::{cw_field, OscillatorSpec, PhaseTrajectory};
use superchannel::rxdsp::cd_compensate;
use superchannel::transceiver::{map_qam, propagate_fiber, rrc_shape, FiberConfig, ModemConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn awgn_calibration() -> Outcome {
    let cfg = ExperimentConfig::default();
    let t0 = Instant::now();
    let points = calibrate_awgn(&cfg).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();
    let mut in_range = 0;
    let mut worst: f64 = 0.0;
    for p in &points {
        if (1e-4..=1e-2).contains(&p.ber_sim) {
            let gap = p.snr_gap_db.ok_or(format!("no gap at {} dB", p.snr_db))?;
            in_range += 1;
            worst = worst.max(gap.abs());
        }
    }
    check(
        in_range >= 3 && worst <= 0.5 && elapsed < 60.0,
        format!(
            "{in_range} points in [1e-4, 1e-2], worst |gap| {worst:.3} dB, {elapsed:.1} s for {} x {} symbols",
            points.len(),
            cfg.calibration.n_symbols
        ),
    )
}

fn channel_sweep() -> Outcome {
    let cfg = ExperimentConfig::default();
    let t0 = Instant::now();
    let report = run_channel_sweep(&cfg).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();
    let n = report.outcomes.len();
    let below20 = report.count_below(2.4e-2);
    let below7 = report.count_below(3.8e-3);
    let worst = report.records().map(|r| r.ber).fold(0.0, f64::max);
    check(
        n == 17 && !report.has_errors() && below20 == 17 && below7 >= 15 && elapsed < 300.0,
        format!("{below20}/{n} below 2.4e-2, {below7}/{n} below 3.8e-3, worst BER {worst:.2e}, {elapsed:.1} s"),
    )
}

fn constellation_contrast() -> Outcome {
    let cfg = ExperimentConfig::default();
    let cmp = run_constellation_compare(&cfg).map_err(|e| e.to_string())?;
    let (r, f) = (&cmp.referenced, &cmp.free_running);
    let same_bits = r.link.transmitted == f.link.transmitted;
    check(
        same_bits
            && r.link.record.ber < 3.8e-3
            && f.link.record.ber > 0.1
            && f.resolved_clusters < 64,
        format!(
            "referenced BER {:.2e} ({} clusters), free-running BER {:.3} ({} clusters), same bits {same_bits}",
            r.link.record.ber, r.resolved_clusters, f.link.record.ber, f.resolved_clusters
        ),
    )
}

fn linewidth_transfer() -> Outcome {
    let cfg = ExperimentConfig::default();
    let spec = &cfg.comb;
    let h0 = spec.master.h0;
    let (fs, n) = (cfg.metrology.fs_hz, cfg.metrology.n_samples);
    let comb = generate_comb(spec, n, fs, 2024).map_err(|e| e.to_string())?;
    let params = WelchParams::for_length(n);
    // Four log-spaced bands covering 5 MHz to 500 MHz.
    let edges: Vec<f64> = (0..=4).map(|i| 5e6 * 10f64.powf(i as f64 / 2.0)).collect();
    let mut worst: f64 = 0.0;
    for k in 0..spec.n_lines {
        let carrier = demux_line(&comb, &cfg.demux.aimed_at(spec.line_frequency(k).unwrap()))
            .map_err(|e| e.to_string())?;
        let psd = fm_noise_psd(&carrier.field, &params).map_err(|e| e.to_string())?;
        for w in edges.windows(2) {
            let level = psd.band_mean(w[0], w[1]).map_err(|e| e.to_string())?;
            worst = worst.max(db(level / h0).abs());
        }
    }
    check(
        worst <= 1.0,
        format!("{} lines x 4 bands over 5-500 MHz, worst deviation from master h0 {worst:.3} dB", spec.n_lines),
    )
}

fn suppression() -> Outcome {
    let spec = CombSpec::default();
    let fs = 100e9;
    let comb = generate_comb(&spec, 1 << 14, fs, 5).map_err(|e| e.to_string())?;
    let section = DemuxSection::default();
    let mut worst: f64 = 0.0;
    let mut seen = 0;
    for k in 0..spec.n_lines {
        for detune in [0.0, 1.5e9] {
            let cfg = DemuxConfig {
                dfb_freq_hz: spec.line_frequency(k).unwrap() + detune,
                ..section.aimed_at(0.0)
            };
            let carrier = demux_line(&comb, &cfg).map_err(|e| e.to_string())?;
            let osa = optical_spectrum(&carrier.field, 50e6).map_err(|e| e.to_string())?;
            let fk = spec.line_frequency(k).unwrap();
            let main = osa.peak_near(fk, 1e9).ok_or("carrier not found")?;
            let mut found = 0;
            for j in 0..spec.n_lines {
                let fj = spec.line_frequency(j).unwrap();
                if j == k || (fj - fk).abs() >= fs / 2.0 {
                    continue;
                }
                let p = osa.peak_near(fj, 1e9).ok_or(format!("residual {j} missing"))?;
                let rel = main - p;
                if rel < 40.0 - 0.5 {
                    return Err(format!("line {k}: residual {j} only {rel:.2} dB down"));
                }
                worst = worst.max((rel - cfg.suppression_db).abs());
                found += 1;
            }
            if found != carrier.residual_lines {
                return Err(format!("line {k}: {found} residuals seen, {} modelled", carrier.residual_lines));
            }
            seen += found;
        }
    }
    check(
        worst <= 0.5,
        format!("{seen} residual lines, worst error vs configured 40 dB suppression {worst:.3} dB"),
    )
}

fn cd_inverse() -> Outcome {
    let modem = ModemConfig::default();
    let fiber = FiberConfig::default();
    let bits: Vec<u8> = (0..6 * 8192u32).map(|i| (i.wrapping_mul(2654435761) >> 31) as u8).collect();
    let symbols = map_qam(&bits, modem.m).map_err(|e| e.to_string())?;
    let b2b = rrc_shape(&symbols, &modem).map_err(|e| e.to_string())?.field;
    let rx = propagate_fiber(&b2b, &fiber)
        .and_then(|f| cd_compensate(&f, &fiber))
        .map_err(|e| e.to_string())?;
    let g = fiber.amplitude_gain();
    let edge = b2b.len() / 10;
    let range = edge..b2b.len() - edge;
    let err: f64 = range.clone().map(|i| (rx.iq[i] - b2b.iq[i] * g).norm_sqr()).sum();
    let refp: f64 = range.map(|i| (b2b.iq[i] * g).norm_sqr()).sum();
    let rms = (err / refp).sqrt();
    check(
        rms <= 1e-6,
        format!("25 km at 17 ps/(nm km): relative RMS residual {rms:.2e}"),
    )
}

fn span_plan() -> Outcome {
    let span = usable_span(10e9, 17).map_err(|e| e.to_string())?;
    check(span == 160e9, format!("usable_span(10 GHz, 17) = {span} Hz"))
}

const SMALL_CONFIG: &str = r#"
n_symbols = 10000
channels = [0, 5, 8, 11, 16]

[metrology]
n_samples = 65536

[calibration]
snr_db = [20.0, 22.0]
n_symbols = 20000
"#;

fn run_cli(bin: &str, sub: &str, config: &Path, out: &Path, threads: usize) -> Result<(), String> {
    let status = Command::new(bin)
        .args([sub, "--seed", "17", "--threads", &threads.to_string()])
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("{sub} exited with {status}"))
    }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_superchannel");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("small.toml");
    std::fs::write(&config, SMALL_CONFIG).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for sub in ["sweep", "constellation", "fmnoise", "calibrate-awgn", "plan"] {
        let runs: Vec<_> = [(1, "a"), (1, "b"), (3, "c")]
            .iter()
            .map(|&(threads, tag)| {
                let out = tmp.path().join(format!("{sub}_{tag}"));
                run_cli(bin, sub, &config, &out, threads).map(|_| csv_files(&out))
            })
            .collect::<Result<_, _>>()?;
        if runs[0].is_empty() {
            return Err(format!("{sub} wrote no CSV"));
        }
        for other in &runs[1..] {
            if *other != runs[0] {
                return Err(format!("{sub}: CSV output differs between runs"));
            }
        }
        compared += runs[0].len();
    }
    check(
        true,
        format!("{compared} CSV files identical across repeated runs and 1 vs 3 threads"),
    )
}

fn dsh_cross_validation() -> Outcome {
    let h0 = 1e3;
    let spec = OscillatorSpec {
        h0,
        ..OscillatorSpec::noiseless(1.0)
    };
    let (fs, n, tau) = (100e6, 1 << 22, 10e-6);
    let phase = PhaseTrajectory::synthesize(&spec, n, fs, 99).map_err(|e| e.to_string())?;
    let field = cw_field(&spec, &phase).map_err(|e| e.to_string())?;
    let params = WelchParams::with_segment(1 << 14);
    let direct = fm_noise_psd(&field, &params).map_err(|e| e.to_string())?;
    let df = direct.freqs_hz[1] - direct.freqs_hz[0];
    let at = |f: f64| direct.psd[(f / df).round() as usize - 1];

    let mut cfg = DshConfig {
        delay_s: tau,
        shift_hz: 20e6,
        rx_noise_psd: 0.0,
        seed: 3,
    };
    let clean = dsh_emulate(&field, &cfg, &params).map_err(|e| e.to_string())?;
    let worst_bin = clean
        .freqs_hz
        .iter()
        .zip(&clean.psd)
        .map(|(&f, &p)| db(p / at(f)).abs())
        .fold(0.0, f64::max);

    // White detection noise on the beat phase reads as (fs/π)²sin²(πf/fs)·S
    // in FM units, divided by the 4sin²(πfτ) transfer.
    let s = 1e-9;
    cfg.rx_noise_psd = s;
    let noisy = dsh_emulate(&field, &cfg, &params).map_err(|e| e.to_string())?;
    let floor = |f: f64| s * (fs / PI * (PI * f / fs).sin()).powi(2) / (4.0 * (PI * f * tau).sin().powi(2));
    let mut worst_floor: f64 = 0.0;
    let mut logs = Vec::new();
    for (lo, hi) in [(2e6, 4e6), (4e6, 8e6), (8e6, 16e6), (16e6, 32e6)] {
        let (mut meas, mut model, mut excess, mut count) = (0.0, 0.0, 0.0, 0.0);
        for (&f, &p) in noisy.freqs_hz.iter().zip(&noisy.psd) {
            if f >= lo && f < hi {
                meas += p - at(f);
                model += floor(f);
                excess += (p - at(f)) * 4.0 * (PI * f * tau).sin().powi(2);
                count += 1.0;
            }
        }
        worst_floor = worst_floor.max(db(meas / model).abs());
        logs.push((((lo * hi) as f64).sqrt().ln(), (excess / count).ln()));
    }
    let slope = {
        let m = logs.len() as f64;
        let (sx, sy): (f64, f64) = logs.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let num: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        num / den
    };
    check(
        worst_bin <= 2.0 && worst_floor <= 1.0 && (slope - 2.0).abs() <= 0.25,
        format!(
            "white FM: worst unmasked bin {worst_bin:.2} dB over {} bins; detection floor within {worst_floor:.2} dB of model, log-log slope {slope:.2}",
            clean.freqs_hz.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("AWGN calibration within 0.5 dB", awgn_calibration),
        ("17-channel sweep FEC classification", channel_sweep),
        ("referenced vs free-running contrast", constellation_contrast),
        ("comb-line FM noise equals master", linewidth_transfer),
        ("demux residual suppression", suppression),
        ("dispersion compensation inverse", cd_inverse),
        ("usable span", span_plan),
        ("byte-identical CSV output", determinism),
        ("DSH vs direct FM-noise estimate", dsh_cross_validation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {}: {tag} {name}: {detail} [{:.1} s]",
            i + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
