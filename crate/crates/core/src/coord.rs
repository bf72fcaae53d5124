//! Permutation ranks and the coordinate spaces used by the pattern databases
//! and the exact chains.
//!
//! Every move table here is generated by applying moves at cubie level and
//! re-encoding, so the tables can only be as wrong as the cubie model.

use std::sync::OnceLock;

use thiserror::Error;

use crate::cube::{generator_state, Corners, CubeState, Face, Move};

pub const FACTORIAL: [u64; 13] = [
    1,
    1,
    2,
    6,
    24,
    120,
    720,
    5040,
    40320,
    362_880,
    3_628_800,
    39_916_800,
    479_001_600,
];

/// Lehmer rank of a permutation of `0..p.len()`; the identity has rank 0.
pub fn perm_rank(p: &[u8]) -> u64 {
    let n = p.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count() as u64;
        rank += smaller * FACTORIAL[n - 1 - i];
    }
    rank
}

/// Inverse of [`perm_rank`].
pub fn perm_unrank<const N: usize>(mut rank: u64) -> [u8; N] {
    let mut pool: Vec<u8> = (0..N as u8).collect();
    let mut out = [0u8; N];
    for (i, slot) in out.iter_mut().enumerate() {
        let f = FACTORIAL[N - 1 - i];
        let d = (rank / f) as usize;
        rank %= f;
        *slot = pool.remove(d);
    }
    out
}

/// 0 for even permutations, 1 for odd.
pub fn perm_parity(p: &[u8]) -> u8 {
    let mut inv = 0u32;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    (inv % 2) as u8
}

#[derive(Debug, Error)]
pub enum CoordError {
    #[error("move table for {table} disagrees with cubie-level application at coordinate {coord}, move {mv}")]
    Factorization { table: &'static str, coord: u64, mv: Move },
}

// ---------------------------------------------------------------------------
// corners

pub const CORNER_PERMS: usize = 40_320;
pub const CORNER_ORIS: usize = 2_187;
pub const CORNER_STATES: usize = CORNER_PERMS * CORNER_ORIS;

/// `(perm_rank, ori_rank)`; the flat index is `perm_rank * 2187 + ori_rank`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CornerCoordinate {
    pub perm_rank: u16,
    pub ori_rank: u16,
}

impl CornerCoordinate {
    pub const SOLVED: CornerCoordinate = CornerCoordinate { perm_rank: 0, ori_rank: 0 };

    pub fn encode(c: &Corners) -> CornerCoordinate {
        CornerCoordinate {
            perm_rank: perm_rank(&c.perm) as u16,
            ori_rank: corner_ori_rank(&c.ori),
        }
    }

    pub fn of_state(s: &CubeState) -> CornerCoordinate {
        Self::encode(&s.corners())
    }

    pub fn decode(&self) -> Corners {
        Corners {
            perm: perm_unrank::<8>(self.perm_rank as u64),
            ori: corner_ori_unrank(self.ori_rank),
        }
    }

    #[inline]
    pub fn flat(&self) -> usize {
        self.perm_rank as usize * CORNER_ORIS + self.ori_rank as usize
    }

    #[inline]
    pub fn from_flat(i: usize) -> CornerCoordinate {
        CornerCoordinate {
            perm_rank: (i / CORNER_ORIS) as u16,
            ori_rank: (i % CORNER_ORIS) as u16,
        }
    }
}

pub fn corner_coordinate(s: &CubeState) -> CornerCoordinate {
    CornerCoordinate::of_state(s)
}

fn corner_ori_rank(ori: &[u8; 8]) -> u16 {
    ori[..7].iter().fold(0u16, |acc, &o| acc * 3 + o as u16)
}

fn corner_ori_unrank(mut r: u16) -> [u8; 8] {
    let mut ori = [0u8; 8];
    let mut sum = 0u8;
    for i in (0..7).rev() {
        ori[i] = (r % 3) as u8;
        sum += ori[i];
        r /= 3;
    }
    ori[7] = (3 - sum % 3) % 3;
    ori
}

/// Per-move transition tables for the two corner coordinates.
pub struct CoordinateMoveTables {
    pub perm_table: Vec<[u16; 18]>,
    pub ori_table: Vec<[u16; 18]>,
}

impl CoordinateMoveTables {
    #[inline]
    pub fn apply(&self, c: CornerCoordinate, m: Move) -> CornerCoordinate {
        CornerCoordinate {
            perm_rank: self.perm_table[c.perm_rank as usize][m.index()],
            ori_rank: self.ori_table[c.ori_rank as usize][m.index()],
        }
    }

    #[inline]
    pub fn apply_flat(&self, i: usize, m: usize) -> usize {
        let (p, o) = (i / CORNER_ORIS, i % CORNER_ORIS);
        self.perm_table[p][m] as usize * CORNER_ORIS + self.ori_table[o][m] as usize
    }
}

/// Derives the corner move tables and checks the factorization against
/// cubie-level application on a spread of coordinates.
pub fn build_move_tables() -> Result<CoordinateMoveTables, CoordError> {
    let perm_table: Vec<[u16; 18]> = (0..CORNER_PERMS)
        .map(|p| {
            let c = Corners {
                perm: perm_unrank::<8>(p as u64),
                ori: [0; 8],
            };
            std::array::from_fn(|m| perm_rank(&c.apply_move(Move::from_index(m)).perm) as u16)
        })
        .collect();
    let ori_table: Vec<[u16; 18]> = (0..CORNER_ORIS)
        .map(|o| {
            let c = Corners {
                perm: Corners::SOLVED.perm,
                ori: corner_ori_unrank(o as u16),
            };
            std::array::from_fn(|m| corner_ori_rank(&c.apply_move(Move::from_index(m)).ori))
        })
        .collect();
    let tables = CoordinateMoveTables { perm_table, ori_table };
    // Stride coprime to both radices so the check touches many (perm, ori) pairs.
    for i in (0..CORNER_STATES).step_by(88_211) {
        let coord = CornerCoordinate::from_flat(i);
        let c = coord.decode();
        for m in Move::all() {
            let want = CornerCoordinate::encode(&c.apply_move(m));
            if tables.apply(coord, m) != want {
                return Err(CoordError::Factorization {
                    table: "corner",
                    coord: i as u64,
                    mv: m,
                });
            }
        }
    }
    Ok(tables)
}

/// Process-wide corner tables.
pub fn corner_tables() -> &'static CoordinateMoveTables {
    static T: OnceLock<CoordinateMoveTables> = OnceLock::new();
    T.get_or_init(|| build_move_tables().expect("corner move tables factorize"))
}

// ---------------------------------------------------------------------------
// six-edge patterns

pub const EDGE6_POSITIONS: usize = 665_280;
pub const EDGE6_STATES: usize = EDGE6_POSITIONS * 64;

/// Which six edge cubies a pattern tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeSet {
    /// UR UF UL UB DR DF
    A,
    /// DL DB FR FL BL BR
    B,
}

impl EdgeSet {
    pub fn first_cubie(self) -> u8 {
        match self {
            EdgeSet::A => 0,
            EdgeSet::B => 6,
        }
    }

    /// Coordinate of the tracked edges: the slots they occupy (ranked as an
    /// ordered 6-subset of 12) times 64, plus their six flips.
    pub fn coordinate(self, s: &CubeState) -> u32 {
        let base = self.first_cubie();
        let mut slots = [0u8; 6];
        let mut flips = 0u32;
        for (slot, (&c, &o)) in s.edge_perm().iter().zip(s.edge_ori()).enumerate() {
            if (base..base + 6).contains(&c) {
                let k = (c - base) as usize;
                slots[k] = slot as u8;
                flips |= (o as u32) << k;
            }
        }
        edge6_position_rank(&slots) * 64 + flips
    }

    pub fn solved_coordinate(self) -> u32 {
        self.coordinate(&CubeState::SOLVED)
    }
}

pub fn edge6_position_rank(slots: &[u8; 6]) -> u32 {
    let mut used = 0u16;
    let mut rank = 0u32;
    for (k, &s) in slots.iter().enumerate() {
        let d = (used & ((1u16 << s) - 1)).count_ones();
        let below = s as u32 - d;
        rank = rank * (12 - k as u32) + below;
        used |= 1 << s;
    }
    rank
}

pub fn edge6_position_unrank(mut rank: u32) -> [u8; 6] {
    let mut digits = [0u32; 6];
    for k in (0..6).rev() {
        let base = 12 - k as u32;
        digits[k] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<u8> = (0..12).collect();
    digits.map(|d| pool.remove(d as usize))
}

/// Move tables shared by both six-edge patterns: the tracked cubies' slots
/// move identically whichever six cubies they are.
pub struct Edge6Tables {
    pub position: Vec<[u32; 18]>,
    pub flip_delta: Vec<[u8; 18]>,
}

impl Edge6Tables {
    #[inline]
    pub fn apply(&self, coord: u32, m: usize) -> u32 {
        let (p, f) = ((coord >> 6) as usize, coord & 63);
        self.position[p][m] * 64 + (f ^ self.flip_delta[p][m] as u32)
    }
}

pub fn build_edge6_tables() -> Result<Edge6Tables, CoordError> {
    // dest[m][j]: slot that the edge in slot j moves to; flip[m][j]: its flip change.
    let mut dest = [[0u8; 12]; 18];
    let mut flip = [[0u8; 12]; 18];
    for m in Move::all() {
        let g = generator_state(m);
        for i in 0..12 {
            let j = g.edge_perm()[i] as usize;
            dest[m.index()][j] = i as u8;
            flip[m.index()][j] = g.edge_ori()[i];
        }
    }
    let mut position = vec![[0u32; 18]; EDGE6_POSITIONS];
    let mut flip_delta = vec![[0u8; 18]; EDGE6_POSITIONS];
    for p in 0..EDGE6_POSITIONS {
        let slots = edge6_position_unrank(p as u32);
        for m in 0..18 {
            let moved = slots.map(|s| dest[m][s as usize]);
            position[p][m] = edge6_position_rank(&moved);
            flip_delta[p][m] = slots
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &s)| acc | (flip[m][s as usize] << k));
        }
    }
    let tables = Edge6Tables { position, flip_delta };
    // spot-check against cubie-level application
    let mut state = CubeState::SOLVED;
    for step in 0..2000usize {
        let m = Move::from_index((step * 7 + step / 3) % 18);
        for set in [EdgeSet::A, EdgeSet::B] {
            let c = set.coordinate(&state);
            if tables.apply(c, m.index()) != set.coordinate(&state.apply_move(m)) {
                return Err(CoordError::Factorization {
                    table: "edge6",
                    coord: c as u64,
                    mv: m,
                });
            }
        }
        state = state.apply_move(m);
    }
    Ok(tables)
}

pub fn edge6_tables() -> &'static Edge6Tables {
    static T: OnceLock<Edge6Tables> = OnceLock::new();
    T.get_or_init(|| build_edge6_tables().expect("edge move tables factorize"))
}

// ---------------------------------------------------------------------------
// 2x2x2 quotient

pub const QUOTIENT_PERMS: usize = 5_040;
pub const QUOTIENT_ORIS: usize = 729;
pub const QUOTIENT_STATES: usize = QUOTIENT_PERMS * QUOTIENT_ORIS;

/// Slot kept fixed by the quotient representatives (DBL); U, F and R turns
/// never touch it.
pub const QUOTIENT_FIXED_SLOT: usize = 6;

const QUOTIENT_SLOTS: [usize; 7] = [0, 1, 2, 3, 4, 5, 7];

/// The corner action of the 24 whole-cube rotations, generated from the
/// corner parts of `R1 L3` and `U1 D3` (slice turns leave corners alone).
pub fn corner_rotations() -> &'static [Corners] {
    static T: OnceLock<Vec<Corners>> = OnceLock::new();
    T.get_or_init(|| {
        let gen = |a: Face, b: Face| {
            Corners::SOLVED
                .apply_move(Move::new(a, 1).unwrap())
                .apply_move(Move::new(b, 3).unwrap())
        };
        let gens = [gen(Face::R, Face::L), gen(Face::U, Face::D)];
        let mut group = vec![Corners::SOLVED];
        let mut i = 0;
        while i < group.len() {
            for g in &gens {
                let next = group[i].compose(g);
                if !group.contains(&next) {
                    group.push(next);
                }
            }
            i += 1;
        }
        group
    })
}

/// Representative of the rotation class of `c`: the unique `c * rot` with
/// the DBL cubie home and untwisted.
pub fn quotient_normalize(c: &Corners) -> Corners {
    let fixed = QUOTIENT_FIXED_SLOT;
    corner_rotations()
        .iter()
        .map(|r| c.compose(r))
        .find(|x| x.perm[fixed] as usize == fixed && x.ori[fixed] == 0)
        .expect("rotations act transitively on corner positions and twists")
}

/// Index of a normalized representative in `0..3_674_160`.
pub fn quotient_index_of_representative(c: &Corners) -> usize {
    let seq: [u8; 7] = QUOTIENT_SLOTS.map(|s| {
        let v = c.perm[s];
        if v as usize > QUOTIENT_FIXED_SLOT {
            v - 1
        } else {
            v
        }
    });
    let ori = QUOTIENT_SLOTS[..6].iter().fold(0usize, |acc, &s| acc * 3 + c.ori[s] as usize);
    perm_rank(&seq) as usize * QUOTIENT_ORIS + ori
}

pub fn quotient_index(c: &Corners) -> usize {
    quotient_index_of_representative(&quotient_normalize(c))
}

pub fn quotient_decode(i: usize) -> Corners {
    let seq = perm_unrank::<7>((i / QUOTIENT_ORIS) as u64);
    let mut o = i % QUOTIENT_ORIS;
    let mut c = Corners::SOLVED;
    let mut sum = 0u8;
    for k in (0..6).rev() {
        let s = QUOTIENT_SLOTS[k];
        c.ori[s] = (o % 3) as u8;
        sum += c.ori[s];
        o /= 3;
    }
    c.ori[7] = (3 - sum % 3) % 3;
    c.ori[QUOTIENT_FIXED_SLOT] = 0;
    for (k, &s) in QUOTIENT_SLOTS.iter().enumerate() {
        let v = seq[k];
        c.perm[s] = if v as usize >= QUOTIENT_FIXED_SLOT { v + 1 } else { v };
    }
    c.perm[QUOTIENT_FIXED_SLOT] = QUOTIENT_FIXED_SLOT as u8;
    c
}

/// The quotient move that has the same effect on rotation classes: a turn of
/// D, B or L equals the same turn of U, F or R followed by a whole-cube
/// rotation.
pub fn quotient_move(m: Move) -> Move {
    match m.face() {
        Face::D | Face::B | Face::L => Move::new(m.face().opposite(), m.amount()).unwrap(),
        _ => m,
    }
}

/// Move tables on the quotient, indexed by all 18 moves.
pub struct QuotientTables {
    pub perm_table: Vec<[u16; 18]>,
    pub ori_table: Vec<[u16; 18]>,
}

impl QuotientTables {
    #[inline]
    pub fn apply(&self, i: usize, m: usize) -> usize {
        let (p, o) = (i / QUOTIENT_ORIS, i % QUOTIENT_ORIS);
        self.perm_table[p][m] as usize * QUOTIENT_ORIS + self.ori_table[o][m] as usize
    }
}

pub fn build_quotient_tables() -> Result<QuotientTables, CoordError> {
    let perm_table: Vec<[u16; 18]> = (0..QUOTIENT_PERMS)
        .map(|p| {
            let c = quotient_decode(p * QUOTIENT_ORIS);
            std::array::from_fn(|m| {
                let next = c.apply_move(quotient_move(Move::from_index(m)));
                (quotient_index_of_representative(&next) / QUOTIENT_ORIS) as u16
            })
        })
        .collect();
    let ori_table: Vec<[u16; 18]> = (0..QUOTIENT_ORIS)
        .map(|o| {
            let c = quotient_decode(o);
            std::array::from_fn(|m| {
                let next = c.apply_move(quotient_move(Move::from_index(m)));
                (quotient_index_of_representative(&next) % QUOTIENT_ORIS) as u16
            })
        })
        .collect();
    let tables = QuotientTables { perm_table, ori_table };
    for i in (0..QUOTIENT_STATES).step_by(7_919) {
        let c = quotient_decode(i);
        for m in Move::all() {
            if tables.apply(i, m.index()) != quotient_index(&c.apply_move(m)) {
                return Err(CoordError::Factorization {
                    table: "quotient",
                    coord: i as u64,
                    mv: m,
                });
            }
        }
    }
    Ok(tables)
}

pub fn quotient_tables() -> &'static QuotientTables {
    static T: OnceLock<QuotientTables> = OnceLock::new();
    T.get_or_init(|| build_quotient_tables().expect("quotient move tables factorize"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{uniform_state, RngStream};
    use std::collections::HashSet;

    #[test]
    fn lehmer_round_trip_all_of_s5() {
        let mut seen = HashSet::new();
        for r in 0..120u64 {
            let p = perm_unrank::<5>(r);
            assert_eq!(perm_rank(&p), r);
            assert!(seen.insert(p));
        }
        assert_eq!(perm_unrank::<8>(0), [0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(perm_unrank::<4>(23), [3, 2, 1, 0]);
    }

    #[test]
    fn parity_matches_transposition_count() {
        assert_eq!(perm_parity(&[0, 1, 2]), 0);
        assert_eq!(perm_parity(&[1, 0, 2]), 1);
        assert_eq!(perm_parity(&[1, 2, 0]), 0);
    }

    #[test]
    fn corner_coordinate_round_trip() {
        assert_eq!(CornerCoordinate::of_state(&CubeState::SOLVED), CornerCoordinate::SOLVED);
        let mut rng = RngStream::new(11, 0);
        for _ in 0..10_000 {
            let c = uniform_state(&mut rng).corners();
            let k = CornerCoordinate::encode(&c);
            assert_eq!(k.decode(), c);
            assert_eq!(CornerCoordinate::from_flat(k.flat()), k);
        }
    }

    #[test]
    fn edge6_rank_round_trip_and_solved() {
        for r in (0..EDGE6_POSITIONS as u32).step_by(997) {
            assert_eq!(edge6_position_rank(&edge6_position_unrank(r)), r);
        }
        assert_eq!(EdgeSet::A.solved_coordinate(), 0);
        assert_eq!(edge6_position_unrank(EdgeSet::B.solved_coordinate() / 64), [6, 7, 8, 9, 10, 11]);
    }

    #[test]
    fn corner_tables_bijective_per_move() {
        let t = corner_tables();
        for m in 0..18 {
            let mut seen = vec![false; CORNER_PERMS];
            for row in &t.perm_table {
                assert!(!std::mem::replace(&mut seen[row[m] as usize], true));
            }
            let mut seen = vec![false; CORNER_ORIS];
            for row in &t.ori_table {
                assert!(!std::mem::replace(&mut seen[row[m] as usize], true));
            }
        }
    }

    #[test]
    fn rotations_form_group_of_24() {
        let rots = corner_rotations();
        assert_eq!(rots.len(), 24);
        let mut flags: Vec<(u8, u8)> = rots
            .iter()
            .map(|r| (r.perm[QUOTIENT_FIXED_SLOT], r.ori[QUOTIENT_FIXED_SLOT]))
            .collect();
        flags.sort_unstable();
        flags.dedup();
        assert_eq!(flags.len(), 24);
    }

    #[test]
    fn quotient_round_trip_and_shortcut_moves() {
        let mut rng = RngStream::new(5, 1);
        for _ in 0..2_000 {
            let c = uniform_state(&mut rng).corners();
            let rep = quotient_normalize(&c);
            let i = quotient_index(&c);
            assert!(i < QUOTIENT_STATES);
            assert_eq!(quotient_decode(i), rep);
            for m in Move::all() {
                assert_eq!(quotient_index(&c.apply_move(m)), quotient_index(&c.apply_move(quotient_move(m))));
            }
        }
    }

    #[test]
    fn quotient_tables_build() {
        let t = quotient_tables();
        assert_eq!(t.apply(0, 0), quotient_index(&Corners::SOLVED.apply_move(Move::from_index(0))));
    }
}
