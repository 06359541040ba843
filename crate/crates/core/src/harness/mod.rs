//! Configuration, seeded experiment orchestration and result output.

mod config;
mod experiments;
mod link;
mod output;

pub use config::{
    config_reference, parse_config, parse_config_str, CalibrationSection, DemuxSection,
    DshSection, ExperimentConfig, LoSection, MetrologySection, NoiseSection, MIN_BER_SYMBOLS,
};
pub use experiments::{
    analytic_snr_for_ber, calibrate_awgn, run_channel, run_channel_sweep,
    run_constellation_compare, run_fm_noise_report, usable_span, CalibrationPoint,
    ChannelOutcome, ConstellationCase, ConstellationComparison, FmNoiseReport, FmNoiseSource,
    Referencing, SweepReport, CLUSTER_FRACTION,
};
pub use link::{
    comb_lo, free_running_carrier, free_running_field, referenced_lo, run_link, LinkConfig,
    LinkResult, LinkSeeds,
};
pub use output::{
    calibration_csv, constellation_summary_csv, fm_summary_csv, plan_csv, sweep_csv, symbols_csv,
    ChannelTiming, OutputDir, RunManifest, SWEEP_HEADER,
};
