//! Counter-based uniform source.
//!
//! Every draw is a pure function of `(seed, repetition, stratum, role, index)`,
//! so Monte Carlo studies produce the same numbers no matter how repetitions
//! are scheduled across threads. Not suitable for cryptographic use.

use rand::RngCore;
use serde::{Deserialize, Serialize};

/// Seed used when neither a flag nor the `RANDP_SEED` environment variable is set.
pub const DEFAULT_SEED: u64 = 20_210_101;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Which random quantity a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StreamRole {
    /// First-stage randomization draw `U`.
    U,
    /// Second-stage randomization draw `U~`.
    UTilde,
    /// Simulated data.
    Data,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::U => 0x55,
            StreamRole::UTilde => 0xA7,
            StreamRole::Data => 0xD1,
        }
    }
}

/// Address of an independent uniform stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedKey {
    pub seed: u64,
    pub repetition: u64,
    pub stratum: u64,
    pub role: StreamRole,
}

impl SeedKey {
    pub fn new(seed: u64, repetition: u64, stratum: u64, role: StreamRole) -> Self {
        Self {
            seed,
            repetition,
            stratum,
            role,
        }
    }

    /// Stream base state; distinct keys land on unrelated states.
    fn base(&self) -> u64 {
        let mut h = mix64(self.seed ^ 0x243f_6a88_85a3_08d3);
        h = mix64(h ^ self.repetition.wrapping_mul(GOLDEN_GAMMA));
        h = mix64(h ^ self.stratum.wrapping_mul(0xbf58_476d_1ce4_e5b9));
        mix64(h ^ self.role.tag().wrapping_mul(0x94d0_49bb_1331_11eb))
    }

    /// A sequential view of this stream, starting at index 0.
    pub fn stream(&self) -> KeyedStream {
        KeyedStream {
            base: self.base(),
            counter: 0,
        }
    }
}

/// SplitMix64 output function.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn output(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Maps 52 random bits onto the midpoints of a grid in (0, 1); never 0 or 1.
fn to_open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// The `index`-th uniform draw of stream `key`, strictly inside (0, 1).
pub fn uniform(key: &SeedKey, index: u64) -> f64 {
    to_open_unit(output(key.base(), index))
}

/// Sequential cursor over one keyed stream. Implements [`RngCore`] so it can
/// drive `rand_distr` samplers.
#[derive(Debug, Clone)]
pub struct KeyedStream {
    base: u64,
    counter: u64,
}

impl KeyedStream {
    pub fn next_uniform(&mut self) -> f64 {
        to_open_unit(self.next_u64())
    }
}

impl RngCore for KeyedStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let v = output(self.base, self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
