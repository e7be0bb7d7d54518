//! Seeded, splittable random streams.
//!
//! Every generator in the crate takes an [`RngSeed`]; the pair `(seed, stream)`
//! selects an independent ChaCha8 stream, so trial `i` of an experiment can be
//! reproduced in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        RngSeed { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A child seed for a sub-task; distinct `tag`s give unrelated streams.
    pub fn derive(&self, tag: u64) -> RngSeed {
        RngSeed {
            seed: self.seed ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d)),
            stream: self.stream,
        }
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed::new(seed)
    }
}

/// SplitMix64 finalizer, used to scatter trial indices into seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
