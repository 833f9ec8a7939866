use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8, which is counter based: every `(seed, stream_id)` pair
/// selects an independent keystream, and the output is identical on every
/// platform for the same sequence of calls. Worker `k` of a parallel job should
/// use `base.substream(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

/// Serializable position of an [`RngStream`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngPosition {
    pub seed: u64,
    pub stream_id: u64,
    /// Number of 32-bit words consumed.
    pub word_pos: u128,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    /// A fresh stream with the same seed and a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn position(&self) -> RngPosition {
        RngPosition {
            seed: self.seed,
            stream_id: self.stream_id,
            word_pos: self.inner.get_word_pos(),
        }
    }

    /// Rebuilds a stream at a recorded position.
    pub fn at(position: RngPosition) -> Self {
        let mut s = Self::new(position.seed, position.stream_id);
        s.inner.set_word_pos(position.word_pos);
        s
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RngStream::new(42, 3);
        let mut b = RngStream::new(42, 3);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn frozen_first_words() {
        // Guards the cross-platform contract: these words must never change.
        let mut a = RngStream::new(7, 0);
        let first: Vec<u64> = (0..3).map(|_| a.next_u64()).collect();
        assert_eq!(
            first,
            vec![
                2910824217569608635,
                3098856782162503994,
                12991601491111613745
            ]
        );
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = a.substream(1);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn distinct_streams_uncorrelated() {
        let mut a = RngStream::new(9, 0);
        let mut b = RngStream::new(9, 1);
        let n = 100_000;
        let mut sxy = 0.0;
        for _ in 0..n {
            let x: f64 = a.random::<f64>() - 0.5;
            let y: f64 = b.random::<f64>() - 0.5;
            sxy += x * y;
        }
        // correlation estimate has sd ≈ 1/sqrt(n)
        let corr = sxy / n as f64 / (1.0 / 12.0);
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "{corr}");
    }

    #[test]
    fn position_round_trip() {
        let mut a = RngStream::new(5, 2);
        for _ in 0..37 {
            a.next_u32();
        }
        let mut b = RngStream::at(a.position());
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
