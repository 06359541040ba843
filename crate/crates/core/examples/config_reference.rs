//! Print the full default configuration, then parse a partial override.

use superchannel::harness::{config_reference, parse_config_str};

fn main() -> superchannel::Result<()> {
    print!("{}", config_reference());
    let cfg = parse_config_str("n_symbols = 50000\n[fiber]\nlength_km = 50.0\n")?;
    println!("# override: n_symbols = {}, length_km = {}", cfg.n_symbols, cfg.fiber.length_km);
    Ok(())
}
