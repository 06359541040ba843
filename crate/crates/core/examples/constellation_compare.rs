//! Centre channel received with a comb-referenced LO and with free-running
//! lasers.

use superchannel::harness::{run_constellation_compare, ExperimentConfig};
use superchannel::rxdsp::evm_db;

fn main() -> superchannel::Result<()> {
    let cfg = ExperimentConfig {
        n_symbols: 50_000,
        ..ExperimentConfig::default()
    };
    let cmp = run_constellation_compare(&cfg)?;
    for c in [&cmp.referenced, &cmp.free_running] {
        println!(
            "{:?}: BER {:.3e}, EVM {:.1} dB, {} of 64 clusters resolved",
            c.mode,
            c.link.record.ber,
            evm_db(&c.link.received, &c.link.transmitted),
            c.resolved_clusters
        );
    }
    Ok(())
}
