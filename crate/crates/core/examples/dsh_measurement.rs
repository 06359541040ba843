//! Delayed self-heterodyne measurement of a white-FM laser compared with
//! direct phase differentiation.

use superchannel::metrology::{dsh_emulate, fm_noise_psd, DshConfig, WelchParams};
use superchannel::oscillators::{cw_field, OscillatorSpec, PhaseTrajectory};

fn main() -> superchannel::Result<()> {
    let spec = OscillatorSpec {
        h0: 1e3,
        h_flicker: 0.0,
        ..OscillatorSpec::master_laser()
    };
    let (fs, n) = (100e6, 1 << 20);
    let phase = PhaseTrajectory::synthesize(&spec, n, fs, 11)?;
    let field = cw_field(&spec, &phase)?;
    let params = WelchParams::with_segment(1 << 14);

    let direct = fm_noise_psd(&phase, &params)?;
    for rx_noise_psd in [0.0, 1e-9] {
        let cfg = DshConfig {
            delay_s: 10e-6,
            shift_hz: 20e6,
            rx_noise_psd,
            seed: 5,
        };
        let dsh = dsh_emulate(&field, &cfg, &params)?;
        println!("detection noise {rx_noise_psd:e} rad^2/Hz");
        for (lo, hi) in [(0.2e6, 0.8e6), (2e6, 4e6), (10e6, 20e6)] {
            println!(
                "  {:>5.1}-{:<5.1} MHz  direct {:>8.1}  dsh {:>8.1} Hz^2/Hz",
                lo / 1e6,
                hi / 1e6,
                direct.band_mean(lo, hi)?,
                dsh.band_mean(lo, hi)?
            );
        }
    }
    Ok(())
}
