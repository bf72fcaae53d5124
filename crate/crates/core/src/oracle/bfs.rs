//! Exhaustive enumeration of the ball of radius `max_depth` around the origin.

use std::collections::HashMap;

use crate::cube::{CubeState, Move};
use crate::error::{Error, Result};

/// Largest depth enumerated without an explicit override (~8.2M states).
pub const BFS_DEPTH_GUARD: u8 = 6;

pub struct BfsTable {
    pub max_depth: u8,
    /// [`CubeState::key`] to exact distance.
    pub entries: HashMap<u128, u8>,
    pub layer_counts: Vec<u64>,
}

impl BfsTable {
    pub fn distance(&self, s: &CubeState) -> Option<u8> {
        self.entries.get(&s.key()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All states at exactly `depth`, in no particular order.
    pub fn layer(&self, depth: u8) -> impl Iterator<Item = CubeState> + '_ {
        self.entries
            .iter()
            .filter(move |(_, &d)| d == depth)
            .map(|(&k, _)| CubeState::from_key(k))
    }
}

pub fn bfs_enumerate(max_depth: u8, allow_deep: bool) -> Result<BfsTable> {
    if max_depth > BFS_DEPTH_GUARD && !allow_deep {
        return Err(Error::DepthGuard(format!(
            "BFS depth {max_depth} exceeds {BFS_DEPTH_GUARD}; pass the override to enumerate it anyway"
        )));
    }
    let mut entries = HashMap::new();
    entries.insert(CubeState::SOLVED.key(), 0u8);
    let mut layer_counts = vec![1u64];
    let mut frontier = vec![CubeState::SOLVED];
    for depth in 1..=max_depth {
        let keep = depth < max_depth;
        let mut next = Vec::new();
        let mut count = 0u64;
        for s in &frontier {
            for m in Move::all() {
                let t = s.apply_move(m);
                if let std::collections::hash_map::Entry::Vacant(e) = entries.entry(t.key()) {
                    e.insert(depth);
                    count += 1;
                    if keep {
                        next.push(t);
                    }
                }
            }
        }
        layer_counts.push(count);
        frontier = next;
    }
    Ok(BfsTable {
        max_depth,
        entries,
        layer_counts,
    })
}
