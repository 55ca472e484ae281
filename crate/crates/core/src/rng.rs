//! Deterministic random streams for the simulator.
//!
//! Substreams are derived from a root seed and a list of integer ids
//! (scheme, trial, vehicle) with a splitmix64-style hash, so any task's
//! stream can be reconstructed independently of execution order. This is
//! what keeps sweep output byte-identical under parallel execution.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const KEY_MUL: u64 = 0xD6E8_FEB8_6659_FD93;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splitmix64 generator seeded from a (root, ids...) key.
///
/// Not cryptographic; stable output across platforms and releases is the
/// only contract.
#[derive(Debug, Clone)]
pub struct SimRng {
    state: u64,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng { state: mix64(seed) }
    }

    /// Derive the substream for a tuple of ids. Distinct tuples map to
    /// distinct streams (up to hash collisions, which do not matter here).
    pub fn substream(root: u64, ids: &[u64]) -> Self {
        let mut key = mix64(root ^ GOLDEN);
        for &id in ids {
            key = mix64(key.wrapping_add(GOLDEN) ^ id.wrapping_mul(KEY_MUL).wrapping_add(1));
        }
        SimRng { state: key }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in (0, 1]. The open lower end keeps `ln` finite.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential draw with the given mean (inverse-CDF method).
    #[inline]
    pub fn next_exp(&mut self, mean: f64) -> f64 {
        debug_assert!(mean > 0.0);
        -mean * self.next_unit().ln()
    }
}
