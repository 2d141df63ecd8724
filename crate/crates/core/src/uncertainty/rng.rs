//! Keyed random streams. A stream is identified by a path of integers
//! (master seed, purpose, indices); its sequence depends only on that path,
//! never on how many other streams were drawn before it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose tags for the first path element after the seed.
pub mod tag {
    /// Parameter draws for outer sample `i`: path `[OMEGA, i]`.
    pub const OMEGA: u64 = 0x0e;
    /// Inner Monte Carlo for policy estimation.
    pub const POLICY: u64 = 0x90;
    /// Stage substreams of a staged process.
    pub const STAGE: u64 = 0x57;
    /// Free-standing kernel sampling.
    pub const KERNEL: u64 = 0x4e;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn extend(key: u64, part: u64) -> u64 {
    splitmix(key ^ splitmix(part.wrapping_add(0x632b_e59b_d9b4_e019)))
}

#[derive(Clone, Debug)]
pub struct Stream {
    key: u64,
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, path: &[u64]) -> Self {
        let key = path.iter().fold(splitmix(seed), |k, &p| extend(k, p));
        Self::from_key(key)
    }

    fn from_key(key: u64) -> Self {
        let mut bytes = [0u8; 32];
        let mut z = key;
        for chunk in bytes.chunks_mut(8) {
            z = splitmix(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        Self { key, rng: ChaCha8Rng::from_seed(bytes) }
    }

    /// Child stream keyed by this stream's identity and `part`; unaffected
    /// by how much of this stream has been consumed.
    pub fn substream(&self, part: u64) -> Stream {
        Self::from_key(extend(self.key, part))
    }

    pub fn key(&self) -> u64 {
        self.key
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
