//! Keyed random substreams.
//!
//! Every random quantity is drawn from a generator seeded by hashing the run
//! seed together with a purpose tag and the indices of the object it belongs
//! to. Results therefore do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type SimRng = Xoshiro256PlusPlus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    UeDrop = 1,
    LargeScale = 2,
    Fading = 3,
    Beams = 4,
    Probe = 5,
    ProbeFading = 6,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed, a stream tag and up to three indices into one 64-bit key.
pub fn stream_key(seed: u64, stream: Stream, drop: u64, a: u64, b: u64) -> u64 {
    let mut h = splitmix64(seed);
    for word in [stream as u64, drop, a, b] {
        h = splitmix64(h ^ word);
    }
    h
}

pub fn substream(seed: u64, stream: Stream, drop: u64, a: u64, b: u64) -> SimRng {
    SimRng::seed_from_u64(stream_key(seed, stream, drop, a, b))
}
