#![allow(dead_code)]

use blowup_cohomology::{H11Class, Rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rationals with denominators up to 6, zero included.
pub fn rat(r: &mut impl Rng) -> Rat {
    Rat::new(r.gen_range(-9i64..=9), r.gen_range(1i64..=6))
}

pub fn class(r: &mut impl Rng, dim: usize) -> H11Class {
    H11Class::new((0..dim).map(|_| rat(r)).collect())
}

pub fn fixture(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
    std::fs::read_to_string(format!("{path}{name}")).unwrap_or_else(|e| panic!("{name}: {e}"))
}
