//! Usable spectral span for a range of channel counts.

use superchannel::harness::usable_span;

fn main() -> superchannel::Result<()> {
    let fsr = 10e9;
    for n in [1, 2, 5, 9, 17, 25] {
        println!("{n:>3} channels: {:>6.1} GHz", usable_span(fsr, n)? / 1e9);
    }
    Ok(())
}
