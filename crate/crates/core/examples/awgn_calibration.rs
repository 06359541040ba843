//! Back-to-back BER against the analytic 64-QAM AWGN curve.

use superchannel::harness::{calibrate_awgn, calibration_csv, ExperimentConfig};

fn main() -> superchannel::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.calibration.n_symbols = 200_000;
    cfg.calibration.snr_db = vec![18.0, 20.0, 22.0];
    print!("{}", calibration_csv(&calibrate_awgn(&cfg)?));
    Ok(())
}
