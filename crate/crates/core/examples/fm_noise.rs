//! FM-noise report of the master laser, selected comb lines and a
//! free-running DFB, written as CSV.

use superchannel::harness::{fm_summary_csv, run_fm_noise_report, ExperimentConfig};

fn main() -> superchannel::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.metrology.n_samples = 1 << 18;
    let report = run_fm_noise_report(&cfg)?;
    print!("{}", fm_summary_csv(&report));

    let dir = std::env::temp_dir().join("superchannel_fm_noise");
    std::fs::create_dir_all(&dir)?;
    for s in &report.sources {
        let path = dir.join(format!("{}.csv", s.name));
        s.estimate.write_csv(std::fs::File::create(&path)?)?;
    }
    println!("spectra written to {}", dir.display());
    Ok(())
}
