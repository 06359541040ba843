//! Injection-lock one comb line and print its optical spectrum around the
//! locked carrier and the suppressed neighbours.

use superchannel::comb::{demux_line, generate_comb, CombSpec, DemuxConfig};
use superchannel::metrology::optical_spectrum;

fn main() -> superchannel::Result<()> {
    let spec = CombSpec::default();
    let fs = 100e9;
    let comb = generate_comb(&spec, 1 << 16, fs, 3)?;
    let cfg = DemuxConfig {
        dfb_freq_hz: spec.line_frequency(8)? + 1.2e9,
        ..DemuxConfig::default()
    };
    let carrier = demux_line(&comb, &cfg)?;
    println!(
        "locked line {} detuning {:.2} GHz, {} residual lines, suppression {:.2} dB",
        carrier.locked_line_index,
        carrier.detuning_hz / 1e9,
        carrier.residual_lines,
        carrier.achieved_suppression_db
    );

    let osa = optical_spectrum(&carrier.field, 50e6)?;
    let main = osa.peak_near(0.0, 1e9).unwrap_or(f64::NAN);
    for k in -4i32..=4 {
        let f = f64::from(k) * spec.fsr_hz;
        if let Some(p) = osa.peak_near(f, 1e9) {
            println!("{:>+4} x FSR  {:>8.2} dBm  ({:+.2} dB)", k, p, p - main);
        }
    }
    Ok(())
}
