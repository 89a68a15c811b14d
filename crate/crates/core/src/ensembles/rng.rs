use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// A reproducible random stream keyed by `(seed, stream_id)`.
///
/// Each pair selects an independent ChaCha20 keystream, so parallel trials can use one
/// master seed and their trial index as the stream id.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A child stream determined only by this stream's key and `index`.
    ///
    /// Children do not consume draws from the parent, so they can be created in any order.
    pub fn child(&self, index: u64) -> RngStream {
        let key = splitmix64(splitmix64(self.seed ^ 0x5851_f42d_4c95_7f2d) ^ self.stream_id.rotate_left(29));
        RngStream::new(key, index)
    }

    /// A fresh child keyed by the next draw of this stream (advances the parent).
    pub fn split(&mut self) -> RngStream {
        let key = self.inner.next_u64();
        RngStream::new(key, 0)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
