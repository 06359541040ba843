use proptest::prelude::*;
use superchannel::metrology::{estimate_linewidth, fm_noise_psd, WelchParams};
use superchannel::oscillators::{cw_field, synth_freq_noise, OscillatorSpec, PhaseTrajectory};

fn white(h0: f64) -> OscillatorSpec {
    OscillatorSpec {
        h0,
        h_flicker: 0.0,
        power_mw: 1.0,
        freq_offset_hz: 0.0,
    }
}

const FS: f64 = 1e9;
const N: usize = 1 << 20;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn psd_round_trip(log_h0 in -1.0f64..6.0, seed in any::<u64>()) {
        let h0 = 10f64.powf(log_h0);
        let phase = PhaseTrajectory::synthesize(&white(h0), N, FS, seed).unwrap();
        let psd = fm_noise_psd(&phase, &WelchParams::for_length(N)).unwrap();
        // Middle two decades of the resolvable band.
        let lo = psd.freqs_hz[0] * 10.0;
        for (a, b) in [(lo, lo * 10.0), (lo * 10.0, lo * 100.0)] {
            let level = psd.band_mean(a, b).unwrap();
            prop_assert!((10.0 * (level / h0).log10()).abs() <= 1.0, "{a}-{b}: {level} vs {h0}");
        }
    }

    #[test]
    fn cw_amplitude_is_constant(h0 in 0.0f64..1e7, power in 1e-3f64..100.0, seed in any::<u64>()) {
        let spec = OscillatorSpec { power_mw: power, ..white(h0) };
        let phase = PhaseTrajectory::synthesize(&spec, 4096, FS, seed).unwrap();
        let field = cw_field(&spec, &phase).unwrap();
        for z in &field.iq {
            prop_assert!((z.norm_sqr() - power).abs() <= 1e-12 * power);
        }
    }

    #[test]
    fn synthesis_is_deterministic(h0 in 0.0f64..1e6, flicker in 0.0f64..1e6, seed in any::<u64>()) {
        let spec = OscillatorSpec { h_flicker: flicker, ..white(h0) };
        let a = synth_freq_noise(&spec, 2048, FS, seed).unwrap();
        let b = synth_freq_noise(&spec, 2048, FS, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn synthesis_ignores_thread_pool() {
    let spec = OscillatorSpec::master_laser();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| PhaseTrajectory::synthesize(&spec, 1 << 14, FS, 77).unwrap().samples)
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn doubling_h0_doubles_linewidth() {
    let params = WelchParams::for_length(N);
    let band = (1e6, 100e6);
    let mut ratios = Vec::new();
    for seed in 0..8 {
        let fit = |h0: f64| {
            let phase = PhaseTrajectory::synthesize(&white(h0), N, FS, seed).unwrap();
            estimate_linewidth(&fm_noise_psd(&phase, &params).unwrap(), band).unwrap()
        };
        ratios.push(fit(2e4) / fit(1e4));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((mean - 2.0).abs() <= 0.2, "{ratios:?}");
}
