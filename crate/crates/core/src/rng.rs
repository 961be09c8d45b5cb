use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identity of the generator behind [`RngStream`], recorded in experiment outputs.
pub const GENERATOR: &str =
    "ChaCha8 (rand_chacha 0.3): key=seed_from_u64(master_seed), stream=trial_index";

/// Deterministic pseudorandom stream.
///
/// Each trial of an experiment owns the ChaCha8 stream selected by its index
/// under the experiment's master seed. ChaCha output is defined byte for byte,
/// so the same `(master_seed, trial_index)` yields the same draws on every
/// platform and under any thread schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Stream 0 of `master_seed`.
    pub fn new(master_seed: u64) -> Self {
        Self::for_trial(master_seed, 0)
    }

    pub fn for_trial(master_seed: u64, trial_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(trial_index);
        Self { inner }
    }

    /// Uniform integer in `0..bound`. `bound` must be non-zero.
    #[inline]
    pub fn below(&mut self, bound: u32) -> u32 {
        debug_assert!(bound > 0);
        rand::Rng::gen_range(&mut self.inner, 0..bound)
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

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child master seed from `master_seed` and a list of coordinates
/// (for example a sweep cell's `n, m, r_c, r_e`). Order of coordinates matters.
pub fn derive_seed(master_seed: u64, coordinates: &[u64]) -> u64 {
    coordinates.iter().fold(splitmix64(master_seed), |acc, &c| {
        splitmix64(acc ^ splitmix64(c))
    })
}
