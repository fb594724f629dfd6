//! Seeded random streams.
//!
//! Every stochastic component draws from Xoshiro256++; independent
//! substreams are carved from one master seed with the generator's jump
//! function, so stream `i` never overlaps stream `j`.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Source of uniform draws in `[0, 1]`.
pub trait UnitSource {
    fn next_unit(&mut self) -> f64;
}

#[derive(Debug, Clone)]
pub struct SeededStream(Xoshiro256PlusPlus);

impl SeededStream {
    /// Substream `index` of the master seed.
    pub fn substream(master_seed: u64, index: usize) -> Self {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(master_seed);
        for _ in 0..index {
            rng.jump();
        }
        Self(rng)
    }
}

impl UnitSource for SeededStream {
    fn next_unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }
}

/// Replays a fixed list of draws. Panics when exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedSource {
    values: Vec<f64>,
    pos: usize,
}

impl ScriptedSource {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, pos: 0 }
    }
}

impl UnitSource for ScriptedSource {
    fn next_unit(&mut self) -> f64 {
        let v = *self
            .values
            .get(self.pos)
            .expect("scripted random source exhausted");
        self.pos += 1;
        v
    }
}

/// Mixes a master seed with an index (SplitMix64 finalizer). Used to derive
/// per-row and per-run seeds.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
