use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A reproducible random stream: the same `(seed, stream)` pair yields the
/// same draws on every run and platform (ChaCha8 is fully specified).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Child stream for a named task at the given coordinates
    /// (fold, repeat, grid point, ...).
    pub fn derive(&self, task: &str, coords: &[u64]) -> RngStream {
        let mut parts = Vec::with_capacity(coords.len() + 1);
        parts.push(self.stream);
        parts.extend_from_slice(coords);
        RngStream {
            seed: self.seed,
            stream: stream_id(task, &parts),
        }
    }
}

/// Stable 64-bit FNV-1a hash of a task name and its coordinates.
pub fn stream_id(task: &str, coords: &[u64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    };
    for b in task.bytes() {
        eat(b);
    }
    eat(0xff);
    for c in coords {
        for b in c.to_le_bytes() {
            eat(b);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_streams_give_identical_draws() {
        let a: Vec<u64> = RngStream::new(7, 3).rng().random_iter().take(16).collect();
        let b: Vec<u64> = RngStream::new(7, 3).rng().random_iter().take(16).collect();
        let c: Vec<u64> = RngStream::new(7, 4).rng().random_iter().take(16).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn stream_ids_are_stable() {
        // frozen values: changing the hash silently changes every experiment
        assert_eq!(stream_id("", &[]), 0xaf64_724c_8602_eb6e);
        assert_eq!(stream_id("fold", &[1, 2]), 0x8dc4_2fa3_c1fc_b10c);
        assert_ne!(stream_id("fold", &[1, 2]), stream_id("fold", &[2, 1]));
        assert_ne!(stream_id("a", &[]), stream_id("b", &[]));
    }

    #[test]
    fn first_draw_is_platform_independent() {
        let x: u64 = RngStream::new(42, 0).rng().random();
        let again: u64 = RngStream::new(42, 0).rng().random();
        assert_eq!(x, again);
    }
}
