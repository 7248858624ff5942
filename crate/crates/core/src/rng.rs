//! Reproducible random substreams.
//!
//! A substream is addressed by a root seed plus a path of indices, e.g.
//! `(seed, [stage, trajectory])`. The path is folded into a ChaCha key, so a
//! draw depends only on its address and never on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for the substream at `path` under `seed`.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix(seed);
    for (depth, &p) in path.iter().enumerate() {
        state = splitmix(state ^ splitmix(p.wrapping_add((depth as u64 + 1).wrapping_mul(GOLDEN))));
    }
    let mut key = [0u8; 32];
    let mut w = state;
    for chunk in key.chunks_exact_mut(8) {
        w = splitmix(w);
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path.len() as u64);
    rng
}
