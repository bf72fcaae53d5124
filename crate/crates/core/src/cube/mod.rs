//! The cube group: moves, cubie states, and the sticker-level oracle model.

mod cubie;
pub mod facelet;
mod moves;

pub use cubie::{
    format_state, generator_state, named_state, parse_state, Corners, CubeState, NamedState, StateParseError,
    UnknownName, Violation,
};
pub use facelet::FaceletState;
pub use moves::{canonical_successor, format_moves, parse_moves, Face, Move, MoveParseError, MoveSequence};

/// `compose(inverse(target), x)`. A word takes `x` to `target` exactly when
/// it takes the returned state to the origin.
pub fn relative_state(x: &CubeState, target: &CubeState) -> CubeState {
    x.relative_to(target)
}
