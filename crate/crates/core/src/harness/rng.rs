//! Deterministic pseudo-randomness for experiments. A single master seed
//! drives everything; per-trial seeds derive from it by counter, so trials
//! are reproducible bit-for-bit regardless of execution order.
//!
//! The generator is SplitMix64 (Steele, Lea, Flood 2014; public domain in
//! its reference form), chosen for stable cross-platform output with no
//! external dependency.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform draw from `0..bound` by rejection sampling (no modulo bias).
    pub fn gen_range(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        let m = bound as u64;
        // 2^64 mod m; draws at or above 2^64 - r are rejected.
        let r = (u64::MAX % m).wrapping_add(1) % m;
        loop {
            let x = self.next_u64();
            if r == 0 || x < u64::MAX - r + 1 {
                return (x % m) as usize;
            }
        }
    }
}

/// Counter-based seed derivation: trial `index` under `master` always gets
/// the same seed, independent of how many draws other trials made.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
