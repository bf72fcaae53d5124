//! Random walks on the Rubik's Cube group.
//!
//! The crate simulates the 18-generator scrambling chain, projects states
//! through exact distance functionals (distance to the origin, the
//! superflip, the checkerboard), estimates total-variation distance to the
//! stationary law with bootstrap error bars, and evolves the corner
//! projection of the chain exactly so the whole estimation pipeline can be
//! checked against ground truth.

pub mod coord;
pub mod cube;
mod error;
pub mod exact;
pub mod oracle;
pub mod pipeline;
pub mod stats;
pub mod tablefile;
pub mod walk;

pub use cube::{
    format_moves, format_state, generator_state, named_state, parse_moves, parse_state, relative_state, Corners,
    CubeState, FaceletState, Face, Move, MoveSequence, NamedState,
};
pub use error::{Error, Result};
pub use exact::{ChainMode, CornerDistanceTable, DistributionVector};
pub use oracle::{distance, solve_optimal, Budget, OptimalResult, PdbSet};
pub use stats::{DecayCurve, EmpiricalDistribution, TvEstimate};
pub use walk::{random_move, uniform_state, walk, RngStream};
