//! Cubie-level cube states and the group operation.
//!
//! `corner_perm[i]` is the cubie sitting in corner slot `i` and
//! `corner_ori[i]` its twist; edges likewise. A move acts on the right:
//! `apply_move(g, m) == compose(g, generator_state(m))`, so words read left to
//! right like scramble notation. The 18 generator states are not written down
//! anywhere: they are read off the facelet model.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use super::facelet::{
    center_index, corner_colors, corner_facelets, edge_colors, edge_facelets, FaceletState, FACE_ORDER,
};
use super::moves::{parse_moves, Face, Move, MoveSequence};
use crate::coord::{perm_parity, perm_rank, perm_unrank};

/// The corner half of a state; the chain state of the corner projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Corners {
    pub perm: [u8; 8],
    pub ori: [u8; 8],
}

impl Corners {
    pub const SOLVED: Corners = Corners {
        perm: [0, 1, 2, 3, 4, 5, 6, 7],
        ori: [0; 8],
    };

    pub fn compose(&self, b: &Corners) -> Corners {
        let mut out = Corners::SOLVED;
        for i in 0..8 {
            let j = b.perm[i] as usize;
            out.perm[i] = self.perm[j];
            out.ori[i] = (self.ori[j] + b.ori[i]) % 3;
        }
        out
    }

    pub fn inverse(&self) -> Corners {
        let mut out = Corners::SOLVED;
        for i in 0..8 {
            let j = self.perm[i] as usize;
            out.perm[j] = i as u8;
            out.ori[j] = (3 - self.ori[i]) % 3;
        }
        out
    }

    pub fn apply_move(&self, m: Move) -> Corners {
        self.compose(&generator_state(m).corners())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubeState {
    corner_perm: [u8; 8],
    corner_ori: [u8; 8],
    edge_perm: [u8; 12],
    edge_ori: [u8; 12],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("corner permutation is not a permutation of 0..8")]
    CornerPermutation,
    #[error("edge permutation is not a permutation of 0..12")]
    EdgePermutation,
    #[error("corner orientation {value} in slot {slot} is outside 0..3")]
    CornerOrientationRange { slot: usize, value: u8 },
    #[error("edge orientation {value} in slot {slot} is outside 0..2")]
    EdgeOrientationRange { slot: usize, value: u8 },
    #[error("corner twists sum to {0} mod 3")]
    CornerTwistSum(u8),
    #[error("edge flips sum to 1 mod 2")]
    EdgeFlipSum,
    #[error("corner and edge permutation parities differ")]
    PermutationParity,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateParseError {
    #[error("facelet string has {0} characters, expected 54")]
    WrongLength(usize),
    #[error("invalid facelet character {found:?} at offset {offset}")]
    InvalidCharacter { offset: usize, found: char },
    #[error("face label {face} appears {count} times, expected 9")]
    Multiplicity { face: Face, count: usize },
    #[error("stickers do not form a legal set of cubies: {0}")]
    IllegalCubies(String),
    #[error("cubies are legal but the state is unreachable: {0:?}")]
    Unreachable(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedState {
    Origin,
    Superflip,
    Checkerboard,
}

impl NamedState {
    pub const ALL: [NamedState; 3] = [NamedState::Origin, NamedState::Superflip, NamedState::Checkerboard];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::Origin => "origin",
            NamedState::Superflip => "superflip",
            NamedState::Checkerboard => "checkerboard",
        }
    }

    pub fn state(self) -> CubeState {
        match self {
            NamedState::Origin => CubeState::SOLVED,
            NamedState::Superflip => CubeState {
                edge_ori: [1; 12],
                ..CubeState::SOLVED
            },
            NamedState::Checkerboard => {
                CubeState::SOLVED.apply_sequence(&parse_moves("U2 D2 F2 B2 L2 R2").expect("valid literal"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown named state {0:?} (expected origin, superflip or checkerboard)")]
pub struct UnknownName(pub String);

impl FromStr for NamedState {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "origin" => Ok(NamedState::Origin),
            "superflip" => Ok(NamedState::Superflip),
            "checkerboard" => Ok(NamedState::Checkerboard),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}

pub fn named_state(name: &str) -> Result<CubeState, UnknownName> {
    name.parse::<NamedState>().map(NamedState::state)
}

/// The state reached from the origin by the single move `m`.
pub fn generator_state(m: Move) -> &'static CubeState {
    static GENERATORS: OnceLock<[CubeState; 18]> = OnceLock::new();
    let table = GENERATORS.get_or_init(|| {
        std::array::from_fn(|i| {
            let f = FaceletState::solved().apply_move(Move::from_index(i));
            CubeState::from_facelets(&f).expect("face turns of the solved cube are legal")
        })
    });
    &table[m.index()]
}

impl CubeState {
    pub const SOLVED: CubeState = CubeState {
        corner_perm: [0, 1, 2, 3, 4, 5, 6, 7],
        corner_ori: [0; 8],
        edge_perm: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
        edge_ori: [0; 12],
    };

    /// Builds a state without checking reachability; see [`CubeState::validate`].
    pub const fn from_parts(corner_perm: [u8; 8], corner_ori: [u8; 8], edge_perm: [u8; 12], edge_ori: [u8; 12]) -> Self {
        CubeState {
            corner_perm,
            corner_ori,
            edge_perm,
            edge_ori,
        }
    }

    pub fn corner_perm(&self) -> &[u8; 8] {
        &self.corner_perm
    }
    pub fn corner_ori(&self) -> &[u8; 8] {
        &self.corner_ori
    }
    pub fn edge_perm(&self) -> &[u8; 12] {
        &self.edge_perm
    }
    pub fn edge_ori(&self) -> &[u8; 12] {
        &self.edge_ori
    }

    pub fn corners(&self) -> Corners {
        Corners {
            perm: self.corner_perm,
            ori: self.corner_ori,
        }
    }

    pub fn is_solved(&self) -> bool {
        *self == CubeState::SOLVED
    }

    pub fn compose(&self, b: &CubeState) -> CubeState {
        let mut out = CubeState::SOLVED;
        for i in 0..8 {
            let j = b.corner_perm[i] as usize;
            out.corner_perm[i] = self.corner_perm[j];
            out.corner_ori[i] = (self.corner_ori[j] + b.corner_ori[i]) % 3;
        }
        for i in 0..12 {
            let j = b.edge_perm[i] as usize;
            out.edge_perm[i] = self.edge_perm[j];
            out.edge_ori[i] = self.edge_ori[j] ^ b.edge_ori[i];
        }
        out
    }

    pub fn inverse(&self) -> CubeState {
        let mut out = CubeState::SOLVED;
        for i in 0..8 {
            let j = self.corner_perm[i] as usize;
            out.corner_perm[j] = i as u8;
            out.corner_ori[j] = (3 - self.corner_ori[i]) % 3;
        }
        for i in 0..12 {
            let j = self.edge_perm[i] as usize;
            out.edge_perm[j] = i as u8;
            out.edge_ori[j] = self.edge_ori[i];
        }
        out
    }

    #[inline]
    pub fn apply_move(&self, m: Move) -> CubeState {
        self.compose(generator_state(m))
    }

    pub fn apply_sequence(&self, s: &MoveSequence) -> CubeState {
        s.iter().fold(*self, |st, &m| st.apply_move(m))
    }

    /// `inverse(target) * self`: the state that some word solves exactly
    /// when the same word takes `self` to `target`.
    pub fn relative_to(&self, target: &CubeState) -> CubeState {
        target.inverse().compose(self)
    }

    /// Every violated reachability invariant, or `Ok` for states in the cube group.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        let corner_ok = is_permutation(&self.corner_perm);
        let edge_ok = is_permutation(&self.edge_perm);
        if !corner_ok {
            v.push(Violation::CornerPermutation);
        }
        if !edge_ok {
            v.push(Violation::EdgePermutation);
        }
        for (slot, &o) in self.corner_ori.iter().enumerate() {
            if o > 2 {
                v.push(Violation::CornerOrientationRange { slot, value: o });
            }
        }
        for (slot, &o) in self.edge_ori.iter().enumerate() {
            if o > 1 {
                v.push(Violation::EdgeOrientationRange { slot, value: o });
            }
        }
        let twist = (self.corner_ori.iter().map(|&o| o as u32).sum::<u32>() % 3) as u8;
        if twist != 0 {
            v.push(Violation::CornerTwistSum(twist));
        }
        if self.edge_ori.iter().map(|&o| o as u32).sum::<u32>() % 2 != 0 {
            v.push(Violation::EdgeFlipSum);
        }
        if corner_ok && edge_ok && perm_parity(&self.corner_perm) != perm_parity(&self.edge_perm) {
            v.push(Violation::PermutationParity);
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Injective encoding of a valid state into 68 bits.
    pub fn key(&self) -> u128 {
        let mut co = 0u128;
        for &o in &self.corner_ori[..7] {
            co = co * 3 + o as u128;
        }
        let mut eo = 0u128;
        for &o in &self.edge_ori[..11] {
            eo = eo * 2 + o as u128;
        }
        let cp = perm_rank(&self.corner_perm) as u128;
        let ep = perm_rank(&self.edge_perm) as u128;
        ((cp * 2187 + co) * 479_001_600 + ep) * 2048 + eo
    }

    /// Inverse of [`CubeState::key`] on valid states.
    pub fn from_key(mut key: u128) -> CubeState {
        let mut out = CubeState::SOLVED;
        let mut eo_sum = 0;
        for i in (0..11).rev() {
            out.edge_ori[i] = (key % 2) as u8;
            eo_sum += out.edge_ori[i];
            key /= 2;
        }
        out.edge_ori[11] = eo_sum % 2;
        out.edge_perm = perm_unrank::<12>((key % 479_001_600) as u64);
        key /= 479_001_600;
        let mut co_sum = 0;
        for i in (0..7).rev() {
            out.corner_ori[i] = (key % 3) as u8;
            co_sum += out.corner_ori[i];
            key /= 3;
        }
        out.corner_ori[7] = (3 - co_sum % 3) % 3;
        out.corner_perm = perm_unrank::<8>(key as u64);
        out
    }

    pub fn to_facelets(&self) -> FaceletState {
        let mut st = FaceletState::solved().stickers().to_owned();
        let (cf, cc) = (corner_facelets(), corner_colors());
        for i in 0..8 {
            let (j, o) = (self.corner_perm[i] as usize, self.corner_ori[i] as usize);
            for n in 0..3 {
                st[cf[i][(n + o) % 3]] = cc[j][n];
            }
        }
        let (ef, ec) = (edge_facelets(), edge_colors());
        for i in 0..12 {
            let (j, o) = (self.edge_perm[i] as usize, self.edge_ori[i] as usize);
            for n in 0..2 {
                st[ef[i][(n + o) % 2]] = ec[j][n];
            }
        }
        FaceletState::from_stickers(st)
    }

    /// Reads cubies off a sticker pattern. Does not check reachability.
    pub fn from_facelets(f: &FaceletState) -> Result<CubeState, StateParseError> {
        let st = f.stickers();
        for face in FACE_ORDER {
            if st[center_index(face)] != face {
                return Err(StateParseError::IllegalCubies(format!("centre of face {face} is not {face}")));
            }
        }
        let mut out = CubeState::SOLVED;
        let (cf, cc) = (corner_facelets(), corner_colors());
        let mut seen = [false; 12];
        for (i, slot) in cf.iter().enumerate() {
            let cols = slot.map(|x| st[x]);
            let o = cols
                .iter()
                .position(|&c| c == Face::U || c == Face::D)
                .ok_or_else(|| StateParseError::IllegalCubies(format!("corner slot {i} has no U/D sticker")))?;
            let rotated = [cols[o], cols[(o + 1) % 3], cols[(o + 2) % 3]];
            let j = cc
                .iter()
                .position(|c| *c == rotated)
                .ok_or_else(|| StateParseError::IllegalCubies(format!("corner slot {i} has stickers {cols:?}")))?;
            if std::mem::replace(&mut seen[j], true) {
                return Err(StateParseError::IllegalCubies(format!("corner cubie {j} appears twice")));
            }
            out.corner_perm[i] = j as u8;
            out.corner_ori[i] = o as u8;
        }
        let (ef, ec) = (edge_facelets(), edge_colors());
        let mut seen = [false; 12];
        for (i, slot) in ef.iter().enumerate() {
            let cols = slot.map(|x| st[x]);
            let (j, o) = ec
                .iter()
                .enumerate()
                .find_map(|(j, c)| {
                    if *c == cols {
                        Some((j, 0))
                    } else if [c[1], c[0]] == cols {
                        Some((j, 1))
                    } else {
                        None
                    }
                })
                .ok_or_else(|| StateParseError::IllegalCubies(format!("edge slot {i} has stickers {cols:?}")))?;
            if std::mem::replace(&mut seen[j], true) {
                return Err(StateParseError::IllegalCubies(format!("edge cubie {j} appears twice")));
            }
            out.edge_perm[i] = j as u8;
            out.edge_ori[i] = o;
        }
        Ok(out)
    }
}

fn is_permutation(p: &[u8]) -> bool {
    let mut seen = 0u32;
    for &x in p {
        if x as usize >= p.len() || seen & (1 << x) != 0 {
            return false;
        }
        seen |= 1 << x;
    }
    true
}

/// Parses a 54-character facelet string into a reachable state.
pub fn parse_state(text: &str) -> Result<CubeState, StateParseError> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() != 54 {
        return Err(StateParseError::WrongLength(chars.len()));
    }
    let mut st = [Face::U; 54];
    let mut counts = [0usize; 6];
    for (i, &c) in chars.iter().enumerate() {
        let f = Face::from_letter(c).ok_or(StateParseError::InvalidCharacter { offset: i, found: c })?;
        st[i] = f;
        counts[f.index()] += 1;
    }
    for face in Face::ALL {
        if counts[face.index()] != 9 {
            return Err(StateParseError::Multiplicity {
                face,
                count: counts[face.index()],
            });
        }
    }
    let state = CubeState::from_facelets(&FaceletState::from_stickers(st))?;
    state.validate().map_err(StateParseError::Unreachable)?;
    Ok(state)
}

pub fn format_state(state: &CubeState) -> String {
    state.to_facelets().to_string()
}

impl FromStr for CubeState {
    type Err = StateParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_state(s)
    }
}

impl fmt::Display for CubeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_facelets())
    }
}

impl fmt::Debug for CubeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CubeState")
            .field("corner_perm", &self.corner_perm)
            .field("corner_ori", &self.corner_ori)
            .field("edge_perm", &self.edge_perm)
            .field("edge_ori", &self.edge_ori)
            .finish()
    }
}
