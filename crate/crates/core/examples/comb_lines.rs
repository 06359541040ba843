//! Generate a comb and report line frequencies, powers and measured phase
//! noise floors.

use superchannel::comb::{generate_comb, CombSpec};
use superchannel::metrology::{fm_noise_psd, WelchParams};

fn main() -> superchannel::Result<()> {
    let spec = CombSpec::default();
    let (fs, n) = (2e9, 1 << 18);
    let comb = generate_comb(&spec, n, fs, 42)?;
    let params = WelchParams::for_length(n);

    println!("line  freq_GHz  power_mW  floor_Hz2/Hz");
    for line in comb.lines() {
        let field = comb.line_field(line.index)?;
        let psd = fm_noise_psd(&field, &params)?;
        println!(
            "{:>4}  {:>8.1}  {:>8.3}  {:.3}",
            line.index,
            line.freq_hz / 1e9,
            line.power_mw,
            psd.band_median(5e6, 500e6)?
        );
    }
    Ok(())
}
