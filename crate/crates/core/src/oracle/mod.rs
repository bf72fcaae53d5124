//! Exact distances to a target state (God's algorithm at desk scale).

mod bfs;
mod ida;
mod pdb;

pub use bfs::{bfs_enumerate, BfsTable, BFS_DEPTH_GUARD};
pub use ida::{distance, solve_optimal, Budget, OptimalResult};
pub use pdb::{
    bfs_fill, build_pdb, default_cache_dir, heuristic, layer_counts, PatternDatabase, PatternKind, PdbSet,
    CACHE_DIR_ENV, UNSEEN,
};
