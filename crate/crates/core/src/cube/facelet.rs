//! Sticker-level cube model.
//!
//! The 54 stickers are serialized face by face in the order `U R F D L B`,
//! each face row-major as seen from outside with `U` at the top (for `U`
//! itself `B` is at the top, for `D` it is `F`). Face turns are generated from
//! the geometry: every sticker gets an integer position and outward normal,
//! and a turn rotates the stickers of one layer by 90 degrees clockwise about
//! the face's outward normal. Nothing here depends on the cubie model, which
//! makes it usable as an independent oracle for it.

use std::fmt;
use std::sync::OnceLock;

use super::moves::{Face, Move, MoveSequence};

pub type Vec3 = [i8; 3];

/// Serialization order of the six faces.
pub const FACE_ORDER: [Face; 6] = [Face::U, Face::R, Face::F, Face::D, Face::L, Face::B];

/// Index of the centre sticker of `face` in the facelet array.
pub fn center_index(face: Face) -> usize {
    block_of(face) * 9 + 4
}

fn block_of(face: Face) -> usize {
    FACE_ORDER.iter().position(|&f| f == face).unwrap()
}

/// x points right, y up, z to the front.
pub fn normal(face: Face) -> Vec3 {
    match face {
        Face::U => [0, 1, 0],
        Face::D => [0, -1, 0],
        Face::F => [0, 0, 1],
        Face::B => [0, 0, -1],
        Face::L => [-1, 0, 0],
        Face::R => [1, 0, 0],
    }
}

// (right, down) in-face axes as seen from outside.
fn face_axes(face: Face) -> (Vec3, Vec3) {
    match face {
        Face::U => ([1, 0, 0], [0, 0, 1]),
        Face::R => ([0, 0, -1], [0, -1, 0]),
        Face::F => ([1, 0, 0], [0, -1, 0]),
        Face::D => ([1, 0, 0], [0, 0, -1]),
        Face::L => ([0, 0, 1], [0, -1, 0]),
        Face::B => ([-1, 0, 0], [0, -1, 0]),
    }
}

fn dot(a: Vec3, b: Vec3) -> i8 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn face_of_normal(n: Vec3) -> Face {
    *Face::ALL.iter().find(|&&f| normal(f) == n).expect("axis normal")
}

/// Clockwise quarter turn about the outward axis `n`.
fn rotate_cw(v: Vec3, n: Vec3) -> Vec3 {
    let along = dot(v, n);
    let c = cross(n, v);
    [along * n[0] - c[0], along * n[1] - c[1], along * n[2] - c[2]]
}

/// Position of the cubie carrying sticker `index`, and the sticker's normal.
pub fn sticker_geometry(index: usize) -> (Vec3, Vec3) {
    let face = FACE_ORDER[index / 9];
    let (r, c) = ((index % 9 / 3) as i8, (index % 3) as i8);
    let n = normal(face);
    let (right, down) = face_axes(face);
    let pos = [
        n[0] + (c - 1) * right[0] + (r - 1) * down[0],
        n[1] + (c - 1) * right[1] + (r - 1) * down[1],
        n[2] + (c - 1) * right[2] + (r - 1) * down[2],
    ];
    (pos, n)
}

fn sticker_index(pos: Vec3, n: Vec3) -> usize {
    (0..54)
        .find(|&i| sticker_geometry(i) == (pos, n))
        .expect("sticker exists")
}

/// Destination index of every sticker under a single clockwise quarter turn.
fn quarter_turn(face: Face) -> [usize; 54] {
    let axis = normal(face);
    let mut dest = [0usize; 54];
    for (i, d) in dest.iter_mut().enumerate() {
        let (pos, n) = sticker_geometry(i);
        *d = if dot(pos, axis) == 1 {
            sticker_index(rotate_cw(pos, axis), rotate_cw(n, axis))
        } else {
            i
        };
    }
    dest
}

/// `table[m][i]` is where the sticker at `i` goes under move `m`.
pub fn move_destinations() -> &'static [[usize; 54]; 18] {
    static TABLE: OnceLock<[[usize; 54]; 18]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [[0usize; 54]; 18];
        for face in Face::ALL {
            let q = quarter_turn(face);
            let mut acc: [usize; 54] = std::array::from_fn(|i| i);
            for amount in 1..=3u8 {
                acc = std::array::from_fn(|i| q[acc[i]]);
                out[Move::new(face, amount).unwrap().index()] = acc;
            }
        }
        out
    })
}

/// Corner slot positions, in slot order URF UFL ULB UBR DFR DLF DBL DRB.
pub const CORNER_POSITIONS: [Vec3; 8] = [
    [1, 1, 1],
    [-1, 1, 1],
    [-1, 1, -1],
    [1, 1, -1],
    [1, -1, 1],
    [-1, -1, 1],
    [-1, -1, -1],
    [1, -1, -1],
];

/// Edge slot positions, in slot order UR UF UL UB DR DF DL DB FR FL BL BR.
pub const EDGE_POSITIONS: [Vec3; 12] = [
    [1, 1, 0],
    [0, 1, 1],
    [-1, 1, 0],
    [0, 1, -1],
    [1, -1, 0],
    [0, -1, 1],
    [-1, -1, 0],
    [0, -1, -1],
    [1, 0, 1],
    [-1, 0, 1],
    [-1, 0, -1],
    [1, 0, -1],
];

fn axis_normal(pos: Vec3, axis: usize) -> Vec3 {
    let mut n = [0; 3];
    n[axis] = pos[axis];
    n
}

/// Sticker indices of each corner slot: the U/D sticker first, then clockwise
/// as seen from outside the corner.
pub fn corner_facelets() -> &'static [[usize; 3]; 8] {
    static T: OnceLock<[[usize; 3]; 8]> = OnceLock::new();
    T.get_or_init(|| {
        std::array::from_fn(|slot| {
            let pos = CORNER_POSITIONS[slot];
            let n0 = axis_normal(pos, 1);
            let (mut n1, mut n2) = (axis_normal(pos, 0), axis_normal(pos, 2));
            if dot(cross(n0, n1), pos) > 0 {
                std::mem::swap(&mut n1, &mut n2);
            }
            [n0, n1, n2].map(|n| sticker_index(pos, n))
        })
    })
}

/// Sticker indices of each edge slot: the U/D sticker first, or for the
/// middle layer the F/B sticker first.
pub fn edge_facelets() -> &'static [[usize; 2]; 12] {
    static T: OnceLock<[[usize; 2]; 12]> = OnceLock::new();
    T.get_or_init(|| {
        std::array::from_fn(|slot| {
            let pos = EDGE_POSITIONS[slot];
            let (first, second) = if pos[1] != 0 {
                (1, if pos[0] != 0 { 0 } else { 2 })
            } else {
                (2, 0)
            };
            [
                sticker_index(pos, axis_normal(pos, first)),
                sticker_index(pos, axis_normal(pos, second)),
            ]
        })
    })
}

/// Face labels of each corner cubie in its home slot, in facelet order.
pub fn corner_colors() -> [[Face; 3]; 8] {
    corner_facelets().map(|fs| fs.map(|i| face_of_normal(sticker_geometry(i).1)))
}

pub fn edge_colors() -> [[Face; 2]; 12] {
    edge_facelets().map(|fs| fs.map(|i| face_of_normal(sticker_geometry(i).1)))
}

/// A cube as 54 face labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceletState {
    stickers: [Face; 54],
}

impl FaceletState {
    pub fn solved() -> FaceletState {
        FaceletState {
            stickers: std::array::from_fn(|i| FACE_ORDER[i / 9]),
        }
    }

    pub fn from_stickers(stickers: [Face; 54]) -> FaceletState {
        FaceletState { stickers }
    }

    pub fn stickers(&self) -> &[Face; 54] {
        &self.stickers
    }

    pub fn apply_move(&self, m: Move) -> FaceletState {
        let dest = &move_destinations()[m.index()];
        let mut out = self.stickers;
        for i in 0..54 {
            out[dest[i]] = self.stickers[i];
        }
        FaceletState { stickers: out }
    }

    pub fn apply_sequence(&self, s: &MoveSequence) -> FaceletState {
        s.iter().fold(*self, |st, &m| st.apply_move(m))
    }

    /// Packs the 48 non-centre stickers base 6 into a `u128` (6^48 < 2^125).
    pub fn pack(&self) -> u128 {
        let mut key = 0u128;
        for (i, f) in self.stickers.iter().enumerate() {
            if i % 9 != 4 {
                key = key * 6 + f.index() as u128;
            }
        }
        key
    }
}

impl fmt::Display for FaceletState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stickers {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for FaceletState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FaceletState({self})")
    }
}
