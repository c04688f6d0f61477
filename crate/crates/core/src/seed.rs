//! Deterministic seed derivation.
//!
//! A [`Seed`] is a root value plus a path of labels. Each label is folded
//! into the state with FNV-1a and a SplitMix64 finalizer, so child streams
//! for different purposes are independent and the mapping is identical on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub value: u64,
    pub path: Vec<String>,
}

pub type Rng = ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Seed {
    pub fn new(value: u64) -> Self {
        Seed { value, path: Vec::new() }
    }

    pub fn child(&self, label: impl Into<String>) -> Seed {
        let mut path = self.path.clone();
        path.push(label.into());
        Seed { value: self.value, path }
    }

    /// Child stream keyed by an index, e.g. a cell number.
    pub fn indexed(&self, label: &str, index: u64) -> Seed {
        self.child(format!("{label}#{index}"))
    }

    pub fn state(&self) -> u64 {
        self.path
            .iter()
            .fold(splitmix64(self.value), |s, label| splitmix64(s ^ fnv1a(label.as_bytes())))
    }

    pub fn rng(&self) -> Rng {
        ChaCha8Rng::seed_from_u64(self.state())
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed::new(value)
    }
}
