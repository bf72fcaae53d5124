//! Face turns and move words.
//!
//! Faces are indexed in the order `U, D, F, B, L, R`, so opposite faces sit
//! in adjacent pairs (`face ^ 1` is the opposite face) and the 18 moves enumerate
//! as `U1 U2 U3 D1 D2 D3 ... R1 R2 R3`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    U,
    D,
    F,
    B,
    L,
    R,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::U, Face::D, Face::F, Face::B, Face::L, Face::R];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub const fn from_index(i: usize) -> Face {
        Face::ALL[i]
    }

    #[inline]
    pub const fn opposite(self) -> Face {
        Face::ALL[self as usize ^ 1]
    }

    pub const fn letter(self) -> char {
        match self {
            Face::U => 'U',
            Face::D => 'D',
            Face::F => 'F',
            Face::B => 'B',
            Face::L => 'L',
            Face::R => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Face> {
        Some(match c {
            'U' => Face::U,
            'D' => Face::D,
            'F' => Face::F,
            'B' => Face::B,
            'L' => Face::L,
            'R' => Face::R,
            _ => return None,
        })
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A clockwise turn of one face by `amount` quarter turns (1, 2 or 3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    face: Face,
    amount: u8,
}

impl Move {
    pub const COUNT: usize = 18;

    pub fn new(face: Face, amount: u8) -> Option<Move> {
        (1..=3).contains(&amount).then_some(Move { face, amount })
    }

    /// All 18 moves in index order.
    pub fn all() -> impl Iterator<Item = Move> + Clone {
        (0..Self::COUNT).map(Move::from_index)
    }

    #[inline]
    pub const fn from_index(i: usize) -> Move {
        assert!(i < Self::COUNT);
        Move {
            face: Face::ALL[i / 3],
            amount: (i % 3) as u8 + 1,
        }
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.face as usize * 3 + self.amount as usize - 1
    }

    #[inline]
    pub const fn face(self) -> Face {
        self.face
    }

    #[inline]
    pub const fn amount(self) -> u8 {
        self.amount
    }

    #[inline]
    pub const fn inverse(self) -> Move {
        Move {
            face: self.face,
            amount: 4 - self.amount,
        }
    }

    /// Order of the move as a group element: 2 for half turns, 4 otherwise.
    pub const fn order(self) -> usize {
        if self.amount == 2 {
            2
        } else {
            4
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.face.letter(), self.amount)
    }
}

/// Whether `next` may follow `prev` in a canonical search word: no repeated
/// face, and for commuting opposite faces only the order U<D, F<B, L<R.
#[inline]
pub fn canonical_successor(prev: Option<Face>, next: Face) -> bool {
    match prev {
        None => true,
        Some(p) => {
            let (p, n) = (p.index(), next.index());
            n != p && !(p & 1 == 1 && n == p - 1)
        }
    }
}

/// A word in the 18 generators. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MoveSequence(Vec<Move>);

impl MoveSequence {
    pub fn new() -> Self {
        MoveSequence(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, m: Move) {
        self.0.push(m);
    }

    pub fn moves(&self) -> &[Move] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Move> {
        self.0.iter()
    }

    /// The inverse word: reversed, each move inverted.
    pub fn inverse(&self) -> MoveSequence {
        MoveSequence(self.0.iter().rev().map(|m| m.inverse()).collect())
    }

    /// Renders with Singmaster suffixes (`U`, `U2`, `U'`) instead of digits.
    pub fn to_singmaster(&self) -> String {
        self.0
            .iter()
            .map(|m| match m.amount {
                1 => format!("{}", m.face),
                2 => format!("{}2", m.face),
                _ => format!("{}'", m.face),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl From<Vec<Move>> for MoveSequence {
    fn from(v: Vec<Move>) -> Self {
        MoveSequence(v)
    }
}

impl FromIterator<Move> for MoveSequence {
    fn from_iter<I: IntoIterator<Item = Move>>(iter: I) -> Self {
        MoveSequence(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a MoveSequence {
    type Item = &'a Move;
    type IntoIter = std::slice::Iter<'a, Move>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveParseError {
    #[error("unknown face letter {found:?} at offset {offset}")]
    UnknownFace { offset: usize, found: char },
    #[error("invalid turn amount {found:?} at offset {offset} (expected 1, 2 or 3)")]
    InvalidAmount { offset: usize, found: char },
}

impl MoveParseError {
    pub fn offset(&self) -> usize {
        match self {
            MoveParseError::UnknownFace { offset, .. } | MoveParseError::InvalidAmount { offset, .. } => *offset,
        }
    }
}

/// Parses digit notation (`R3`) and Singmaster notation (`R`, `R2`, `R'`).
/// Whitespace between tokens is optional.
pub fn parse_moves(text: &str) -> Result<MoveSequence, MoveParseError> {
    let mut out = MoveSequence::new();
    let mut chars = text.char_indices().peekable();
    while let Some((offset, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        let face = Face::from_letter(c).ok_or(MoveParseError::UnknownFace { offset, found: c })?;
        let amount = match chars.peek().copied() {
            Some((_, '\'')) => {
                chars.next();
                3
            }
            Some((off, d)) if d.is_ascii_digit() => {
                chars.next();
                match d {
                    '1'..='3' => d as u8 - b'0',
                    _ => return Err(MoveParseError::InvalidAmount { offset: off, found: d }),
                }
            }
            _ => 1,
        };
        out.push(Move { face, amount });
    }
    Ok(out)
}

/// Formats in digit notation, space separated.
pub fn format_moves(s: &MoveSequence) -> String {
    s.to_string()
}

impl FromStr for MoveSequence {
    type Err = MoveParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_moves(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighteen_distinct_moves() {
        let all: Vec<Move> = Move::all().collect();
        assert_eq!(all.len(), 18);
        let names: Vec<String> = all.iter().map(|m| m.to_string()).collect();
        assert_eq!(
            names.join(","),
            "U1,U2,U3,D1,D2,D3,F1,F2,F3,B1,B2,B3,L1,L2,L3,R1,R2,R3"
        );
        for (i, m) in all.iter().enumerate() {
            assert_eq!(m.index(), i);
        }
    }

    #[test]
    fn inverse_amounts() {
        for m in Move::all() {
            assert_eq!(m.inverse().inverse(), m);
            assert_eq!(m.inverse().face(), m.face());
            assert_eq!((m.amount() + m.inverse().amount()) % 4, 0);
        }
        let r2 = Move::new(Face::R, 2).unwrap();
        assert_eq!(r2.inverse(), r2);
    }

    #[test]
    fn parse_digit_notation() {
        let s = parse_moves("R3").unwrap();
        assert_eq!(s.moves(), &[Move::new(Face::R, 3).unwrap()]);
        assert!(parse_moves("").unwrap().is_empty());
        let s = parse_moves("U2D2F2B2L2R2").unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(format_moves(&s), "U2 D2 F2 B2 L2 R2");
    }

    #[test]
    fn parse_singmaster_aliases() {
        let s = parse_moves("U U' R2 F").unwrap();
        assert_eq!(format_moves(&s), "U1 U3 R2 F1");
        assert_eq!(s.to_singmaster(), "U U' R2 F");
    }

    #[test]
    fn parse_errors_report_offsets() {
        assert_eq!(
            parse_moves("R9"),
            Err(MoveParseError::InvalidAmount { offset: 1, found: '9' })
        );
        assert_eq!(
            parse_moves("R1 X2"),
            Err(MoveParseError::UnknownFace { offset: 3, found: 'X' })
        );
        assert_eq!(parse_moves("R0").unwrap_err().offset(), 1);
        assert_eq!(parse_moves("U1 2").unwrap_err().offset(), 3);
    }

    #[test]
    fn canonical_successors() {
        use Face::*;
        assert!(canonical_successor(None, R));
        assert!(!canonical_successor(Some(R), R));
        assert!(canonical_successor(Some(U), D));
        assert!(!canonical_successor(Some(D), U));
        assert!(!canonical_successor(Some(B), F));
        assert!(!canonical_successor(Some(R), L));
        assert!(canonical_successor(Some(L), R));
        assert!(canonical_successor(Some(D), F));
    }

    proptest::proptest! {
        #[test]
        fn format_parse_round_trip(idx in proptest::collection::vec(0usize..18, 0..40)) {
            let s: MoveSequence = idx.into_iter().map(Move::from_index).collect();
            proptest::prop_assert_eq!(parse_moves(&format_moves(&s)).unwrap(), s.clone());
            proptest::prop_assert_eq!(parse_moves(&s.to_singmaster()).unwrap(), s);
        }
    }
}
