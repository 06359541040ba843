//! Binary waveform dump for external inspection tools.
//!
//! Layout (all little endian):
//!
//! | offset | size | content                       |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `CCS1`                  |
//! | 4      | 4    | `u32` sample rate in kHz      |
//! | 8      | 4    | `u32` sample count            |
//! | 12     | 4    | `u32` reserved, written as 0  |
//! | 16     | 8·n  | interleaved `f32` I, Q pairs  |

use num_complex::Complex64;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::SampledField;

pub const WAVEFORM_MAGIC: &[u8; 4] = b"CCS1";

pub fn write_waveform<W: Write>(mut w: W, field: &SampledField) -> Result<()> {
    let khz = (field.fs_hz / 1e3).round();
    if !(1.0..=u32::MAX as f64).contains(&khz) {
        return Err(Error::Waveform(format!(
            "sample rate {} Hz does not fit the kHz header field",
            field.fs_hz
        )));
    }
    let count = u32::try_from(field.len())
        .map_err(|_| Error::Waveform("too many samples for the header".into()))?;
    let mut buf = Vec::with_capacity(16 + 8 * field.len());
    buf.extend_from_slice(WAVEFORM_MAGIC);
    buf.extend_from_slice(&(khz as u32).to_le_bytes());
    buf.extend_from_slice(&count.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for z in &field.iq {
        buf.extend_from_slice(&(z.re as f32).to_le_bytes());
        buf.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Read a dump back. Precision is that of `f32`; the reference offset is not
/// stored and comes back as zero.
pub fn read_waveform<R: Read>(mut r: R) -> Result<SampledField> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..4] != WAVEFORM_MAGIC {
        return Err(Error::Waveform("bad magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let khz = word(4);
    let count = word(8) as usize;
    let mut body = vec![0u8; 8 * count];
    r.read_exact(&mut body)?;
    let iq = body
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[..4].try_into().unwrap());
            let im = f32::from_le_bytes(c[4..].try_into().unwrap());
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    SampledField::new(iq, khz as f64 * 1e3, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let f = SampledField::new(vec![Complex64::new(1.5, -2.0); 3], 20e9, 0.0).unwrap();
        let mut buf = Vec::new();
        write_waveform(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), 16 + 24);
        assert_eq!(&buf[..4], b"CCS1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 20_000_000);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 3);
        assert_eq!(&buf[12..16], &[0, 0, 0, 0]);
        assert_eq!(f32::from_le_bytes(buf[16..20].try_into().unwrap()), 1.5);
        assert_eq!(f32::from_le_bytes(buf[20..24].try_into().unwrap()), -2.0);
        let back = read_waveform(&buf[..]).unwrap();
        assert_eq!(back.iq, f.iq);
        assert_eq!(back.fs_hz, 20e9);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let mut buf = b"XXXX".to_vec();
        buf.extend_from_slice(&[0; 12]);
        assert!(read_waveform(&buf[..]).is_err());
        let f = SampledField::new(vec![Complex64::new(0.0, 0.0); 4], 1e6, 0.0).unwrap();
        let mut buf = Vec::new();
        write_waveform(&mut buf, &f).unwrap();
        buf.truncate(20);
        assert!(read_waveform(&buf[..]).is_err());
    }
}
