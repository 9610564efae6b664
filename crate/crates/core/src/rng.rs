//! Seed derivation for reproducible sub-streams.
//!
//! Every random draw in the crate flows from a root seed through
//! [`sub_rng`]. Independent pieces of work (dataset generation, PU splits,
//! Monte-Carlo trials) get their own counter-based stream, so results do
//! not depend on execution order and parallel runs reproduce serial ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a over the purpose label.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// splitmix64 finalizer; spreads low-entropy seeds over the full word.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the generator for one (purpose, index) sub-stream of `root_seed`.
///
/// The purpose label separates unrelated uses of the same root seed; the
/// index selects one of 2^64 streams within a purpose (e.g. one per
/// Monte-Carlo trial).
pub fn sub_rng(root_seed: u64, purpose: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(root_seed ^ fnv1a(purpose.as_bytes())));
    rng.set_stream(index);
    rng
}
