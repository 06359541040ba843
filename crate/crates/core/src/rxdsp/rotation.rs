use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Minimum separation between the best and runner-up rotation, dB.
pub const ROTATION_MARGIN_DB: f64 = 3.0;

/// Residual quarter-turn ambiguity of a decision-directed loop. The variant
/// names how far the received symbols are rotated relative to the truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    pub fn degrees(self) -> u32 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    /// `i^q` for this rotation.
    pub fn phasor(self) -> Complex64 {
        match self {
            Rotation::R0 => Complex64::new(1.0, 0.0),
            Rotation::R90 => Complex64::new(0.0, 1.0),
            Rotation::R180 => Complex64::new(-1.0, 0.0),
            Rotation::R270 => Complex64::new(0.0, -1.0),
        }
    }

    /// Rotate symbols back by this amount.
    pub fn undo(self, symbols: &mut [Complex64]) {
        let p = self.phasor().conj();
        for s in symbols.iter_mut() {
            *s *= p;
        }
    }
}

/// Pick the quarter-turn that best aligns the leading symbols with the known
/// preamble, by the real part of their correlation.
pub fn resolve_rotation(corrected: &[Complex64], preamble: &[Complex64]) -> Result<Rotation> {
    if preamble.is_empty() || corrected.len() < preamble.len() {
        return Err(invalid("preamble must be non-empty and no longer than the input"));
    }
    let corr: Complex64 = corrected
        .iter()
        .zip(preamble)
        .map(|(y, p)| y * p.conj())
        .sum();
    let mut scored: Vec<(Rotation, f64)> = Rotation::ALL
        .iter()
        .map(|&r| (r, (corr * r.phasor().conj()).re))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (best, top) = scored[0];
    let runner = scored[1].1;
    let margin_db = if top <= 0.0 {
        0.0
    } else if runner <= 0.0 {
        f64::INFINITY
    } else {
        10.0 * (top / runner).log10()
    };
    if margin_db < ROTATION_MARGIN_DB {
        return Err(Error::AmbiguousRotation { margin_db });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transceiver::map_qam;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn qam(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let bits: Vec<u8> = (0..n * 6).map(|_| rng.random_range(0..2)).collect();
        map_qam(&bits, 64).unwrap()
    }

    #[test]
    fn constructed_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = qam(256, &mut rng);
        assert_eq!(resolve_rotation(&p, &p).unwrap(), Rotation::R0);
        for r in Rotation::ALL {
            let rotated: Vec<_> = p.iter().map(|z| z * r.phasor()).collect();
            assert_eq!(resolve_rotation(&rotated, &p).unwrap(), r);
            let mut back = rotated.clone();
            r.undo(&mut back);
            for (a, b) in back.iter().zip(&p) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let times_i: Vec<_> = p.iter().map(|z| z * Complex64::i()).collect();
        assert_eq!(resolve_rotation(&times_i, &p).unwrap().degrees(), 90);
    }

    #[test]
    fn diagonal_input_is_ambiguous() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = qam(256, &mut rng);
        let half: Vec<_> = p
            .iter()
            .map(|z| z * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4))
            .collect();
        assert!(matches!(
            resolve_rotation(&half, &p),
            Err(Error::AmbiguousRotation { .. })
        ));
    }

    #[test]
    fn noisy_preamble_monte_carlo() {
        // SNR 15 dB, 256-symbol preamble: every one of 2000 trials must pass.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sigma = (10f64.powf(-1.5) / 2.0).sqrt();
        let mut wrong = 0;
        for trial in 0..2000 {
            let p = qam(256, &mut rng);
            let r = Rotation::ALL[trial % 4];
            let y: Vec<_> = p
                .iter()
                .map(|z| {
                    let n = Complex64::new(
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    );
                    z * r.phasor() + n * sigma
                })
                .collect();
            if resolve_rotation(&y, &p).ok() != Some(r) {
                wrong += 1;
            }
        }
        assert!(wrong <= 2, "{wrong} failures in 2000");
    }
}
