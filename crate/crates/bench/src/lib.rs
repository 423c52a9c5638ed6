//! Shared inputs for the criterion benches.

use chainlab::{random_family, SetFamily};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniform random family of `s` sets over `[n]`, reproducible from `seed`.
pub fn seeded_family(n: u32, s: usize, seed: u64) -> SetFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_family(n, s, &mut rng).expect("bench parameters are valid")
}

/// Roughly a quarter of the cube, which keeps both backends busy.
pub fn quarter_cube(n: u32, seed: u64) -> SetFamily {
    seeded_family(n, 1usize << (n - 2), seed)
}
