use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A deterministic stream of random bits.
#[derive(Clone, Debug)]
pub struct RandomSource {
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Seeded { rng: Box<ChaCha8Rng>, buf: u64, left: u32 },
    /// Cycles through a fixed bit sequence.
    Scripted { bits: Vec<bool>, pos: usize },
}

impl RandomSource {
    pub fn seeded(seed: u64) -> Self {
        Self::from_rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// An independent stream for the `index`-th of several runs sharing `seed`.
    pub fn split(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self::from_rng(rng)
    }

    /// Replays `bits` cyclically; an empty script yields zeros.
    pub fn scripted(bits: &[bool]) -> Self {
        RandomSource {
            kind: Kind::Scripted {
                bits: bits.to_vec(),
                pos: 0,
            },
        }
    }

    fn from_rng(rng: ChaCha8Rng) -> Self {
        RandomSource {
            kind: Kind::Seeded { rng: Box::new(rng), buf: 0, left: 0 },
        }
    }

    pub fn next_bit(&mut self) -> bool {
        match &mut self.kind {
            Kind::Seeded { rng, buf, left } => {
                if *left == 0 {
                    *buf = rng.next_u64();
                    *left = 64;
                }
                let bit = *buf & 1 == 1;
                *buf >>= 1;
                *left -= 1;
                bit
            }
            Kind::Scripted { bits, pos } => {
                if bits.is_empty() {
                    return false;
                }
                let bit = bits[*pos % bits.len()];
                *pos += 1;
                bit
            }
        }
    }

    /// Seven bits, first drawn most significant: a value in `0..=127`.
    pub fn next_7bits(&mut self) -> u32 {
        (0..7).fold(0, |acc, _| (acc << 1) | self.next_bit() as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::seeded(7);
        let mut b = RandomSource::seeded(7);
        let xs: Vec<bool> = (0..200).map(|_| a.next_bit()).collect();
        let ys: Vec<bool> = (0..200).map(|_| b.next_bit()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn split_streams_differ() {
        let mut a = RandomSource::split(7, 0);
        let mut b = RandomSource::split(7, 1);
        let xs: Vec<u32> = (0..20).map(|_| a.next_7bits()).collect();
        let ys: Vec<u32> = (0..20).map(|_| b.next_7bits()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn scripted_cycles() {
        let mut r = RandomSource::scripted(&[false, true]);
        let xs: Vec<bool> = (0..5).map(|_| r.next_bit()).collect();
        assert_eq!(xs, [false, true, false, true, false]);
        let mut r = RandomSource::scripted(&[true]);
        assert_eq!(r.next_7bits(), 127);
    }

    #[test]
    fn seven_bits_are_roughly_uniform() {
        let mut r = RandomSource::seeded(1);
        let n = 12_800;
        let low = (0..n).filter(|_| r.next_7bits() < 32).count() as f64;
        // Binomial(n, 1/4): mean 3200, sigma ~49.
        assert!((low - 3200.0).abs() < 3.0 * 49.0, "{low}");
    }
}
