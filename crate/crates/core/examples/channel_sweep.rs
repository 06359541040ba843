//! BER sweep over every comb channel with comb-referenced LOs.

use superchannel::harness::{run_channel_sweep, sweep_csv, ExperimentConfig};

fn main() -> superchannel::Result<()> {
    let cfg = ExperimentConfig {
        n_symbols: 20_000,
        ..ExperimentConfig::default()
    };
    let report = run_channel_sweep(&cfg)?;
    print!("{}", sweep_csv(&report));
    println!(
        "{} of {} channels below 3.8e-3",
        report.count_below(3.8e-3),
        report.outcomes.len()
    );
    Ok(())
}
