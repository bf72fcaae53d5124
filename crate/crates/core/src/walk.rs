//! The scrambling chain: iid uniform moves applied from a start state, and
//! direct sampling from its uniform stationary law.
//!
//! Randomness comes from [`RngStream`], ChaCha12 keyed by a 64-bit root seed
//! and positioned on a 64-bit stream. ChaCha is counter based, so a stream's
//! output depends only on `(root_seed, stream_id)`: not on the machine, the
//! thread that draws it, or what other streams have been used.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::coord::perm_parity;
use crate::cube::{CubeState, Move, MoveSequence};

/// A reproducible random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    root_seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(root_seed: u64, stream_id: u64) -> RngStream {
        let mut rng = ChaCha12Rng::seed_from_u64(root_seed);
        rng.set_stream(stream_id);
        RngStream {
            root_seed,
            stream_id,
            rng,
        }
    }

    /// Stream for one dataset row. `n = -1` denotes a stationary sample.
    /// Rows stay distinct for `-1 <= n < 65535` and `sample_index < 2^48`.
    pub fn for_sample(root_seed: u64, n: i64, sample_index: u64) -> RngStream {
        debug_assert!(sample_index < 1 << 48);
        RngStream::new(root_seed, ((n as u64 & 0xFFFF) << 48) | sample_index)
    }

    /// An independent child stream, keyed by this stream's identity and `child`.
    pub fn derive(&self, child: u64) -> RngStream {
        RngStream::new(mix64(self.root_seed ^ mix64(self.stream_id)), child)
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// One of the 18 moves, each with probability exactly 1/18.
#[inline]
pub fn random_move<R: Rng + ?Sized>(rng: &mut R) -> Move {
    // gen_range on integers uses rejection, so there is no modulo bias.
    Move::from_index(rng.random_range(0..Move::COUNT))
}

/// The first `n` moves drawn from `rng`.
pub fn random_moves<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MoveSequence {
    (0..n).map(|_| random_move(rng)).collect()
}

/// `X_n` of the chain started at `start`. Immediate undos such as `R1 R3`
/// are kept: the chain applies raw iid moves.
pub fn walk<R: Rng + ?Sized>(start: &CubeState, n: usize, rng: &mut R) -> CubeState {
    let mut x = *start;
    for _ in 0..n {
        x = x.apply_move(random_move(rng));
    }
    x
}

/// `X_0, ..., X_n`.
pub fn walk_trajectory<R: Rng + ?Sized>(start: &CubeState, n: usize, rng: &mut R) -> Vec<CubeState> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(*start);
    for _ in 0..n {
        let next = out.last().unwrap().apply_move(random_move(rng));
        out.push(next);
    }
    out
}

/// An exactly uniform element of the cube group, by direct construction.
pub fn uniform_state<R: Rng + ?Sized>(rng: &mut R) -> CubeState {
    let mut ep: [u8; 12] = std::array::from_fn(|i| i as u8);
    ep.shuffle(rng);
    let mut cp: [u8; 8] = std::array::from_fn(|i| i as u8);
    cp.shuffle(rng);
    if perm_parity(&cp) != perm_parity(&ep) {
        cp.swap(0, 1);
    }
    let mut co = [0u8; 8];
    for o in &mut co[..7] {
        *o = rng.random_range(0..3);
    }
    co[7] = (3 - co[..7].iter().sum::<u8>() % 3) % 3;
    let mut eo = [0u8; 12];
    for o in &mut eo[..11] {
        *o = rng.random_range(0..2);
    }
    eo[11] = eo[..11].iter().sum::<u8>() % 2;
    CubeState::from_parts(cp, co, ep, eo)
}

/// Number of elements of the cube group: 8! 3^7 12! 2^11 / 2.
pub fn group_order() -> u128 {
    let f = |n: u128| (1..=n).product::<u128>();
    f(8) * 3u128.pow(7) * f(12) * 2u128.pow(11) / 2
}
