//! Write a shaped 64-QAM baseband waveform in the binary dump format and
//! read it back. Samples are stored as f32 pairs.

use superchannel::transceiver::{map_qam, read_waveform, rrc_shape, write_waveform, ModemConfig};

fn main() -> superchannel::Result<()> {
    let modem = ModemConfig::default();
    let bits: Vec<u8> = (0..6 * 4096).map(|i| ((i * 7 + i / 5) % 2) as u8).collect();
    let symbols = map_qam(&bits, modem.m)?;
    let shaped = rrc_shape(&symbols, &modem)?;

    let path = std::env::temp_dir().join("superchannel_waveform.bin");
    write_waveform(std::fs::File::create(&path)?, &shaped.field)?;
    let back = read_waveform(std::fs::File::open(&path)?)?;
    let worst = back
        .iq
        .iter()
        .zip(&shaped.field.iq)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!(
        "{} samples at {} GS/s, {} bytes in {}, worst f32 rounding {:.1e}",
        back.len(),
        back.fs_hz / 1e9,
        std::fs::metadata(&path)?.len(),
        path.display(),
        worst
    );
    Ok(())
}
