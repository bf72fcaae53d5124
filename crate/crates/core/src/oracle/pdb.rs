//! Pattern databases: exact distances in a projected coordinate space,
//! used as admissible heuristics for the full cube.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU8, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::coord::{corner_tables, edge6_tables, CornerCoordinate, EdgeSet, CORNER_STATES, EDGE6_STATES};
use crate::cube::CubeState;
use crate::error::Result;
use crate::tablefile::{self, TableKind};

pub const UNSEEN: u8 = u8::MAX;

/// Breadth-first fill of a coordinate space from `root` under the 18 moves.
/// `succ(i, m)` must be a bijection in `i` for each move and the move set
/// must be closed under inverses; both hold for every space here.
pub fn bfs_fill<F>(size: usize, root: usize, succ: F) -> Vec<u8>
where
    F: Fn(usize, usize) -> usize + Sync,
{
    let table: Vec<AtomicU8> = (0..size).map(|_| AtomicU8::new(UNSEEN)).collect();
    table[root].store(0, Ordering::Relaxed);
    let mut seen = 1usize;
    let mut frontier = 1usize;
    let mut depth = 0u8;
    const CHUNK: usize = 1 << 16;
    while frontier > 0 {
        let next = depth + 1;
        let found = AtomicU64::new(0);
        if frontier > size - seen {
            // Pull: each unseen entry looks for a neighbour on the frontier.
            (0..size).into_par_iter().with_min_len(CHUNK).for_each(|i| {
                if table[i].load(Ordering::Relaxed) != UNSEEN {
                    return;
                }
                if (0..18).any(|m| table[succ(i, m)].load(Ordering::Relaxed) == depth) {
                    table[i].store(next, Ordering::Relaxed);
                    found.fetch_add(1, Ordering::Relaxed);
                }
            });
        } else {
            // Push: expand the frontier.
            (0..size).into_par_iter().with_min_len(CHUNK).for_each(|i| {
                if table[i].load(Ordering::Relaxed) != depth {
                    return;
                }
                for m in 0..18 {
                    let j = succ(i, m);
                    if table[j].load(Ordering::Relaxed) == UNSEEN
                        && table[j]
                            .compare_exchange(UNSEEN, next, Ordering::Relaxed, Ordering::Relaxed)
                            .is_ok()
                    {
                        found.fetch_add(1, Ordering::Relaxed);
                    }
                }
            });
        }
        frontier = found.into_inner() as usize;
        seen += frontier;
        depth = next;
        log::debug!("bfs layer {depth}: {frontier} states ({seen}/{size})");
    }
    table.into_iter().map(AtomicU8::into_inner).collect()
}

/// Histogram of a distance table; index is the distance.
pub fn layer_counts(table: &[u8]) -> Vec<u64> {
    let mut counts = vec![0u64; 256];
    for &d in table {
        counts[d as usize] += 1;
    }
    let top = counts[..255].iter().rposition(|&c| c > 0).unwrap_or(0);
    counts.truncate(top + 1);
    counts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Corners,
    EdgesA,
    EdgesB,
}

impl PatternKind {
    pub const ALL: [PatternKind; 3] = [PatternKind::Corners, PatternKind::EdgesA, PatternKind::EdgesB];

    pub fn size(self) -> usize {
        match self {
            PatternKind::Corners => CORNER_STATES,
            PatternKind::EdgesA | PatternKind::EdgesB => EDGE6_STATES,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            PatternKind::Corners => "corners.pdb",
            PatternKind::EdgesA => "edges_a.pdb",
            PatternKind::EdgesB => "edges_b.pdb",
        }
    }

    fn table_kind(self) -> TableKind {
        match self {
            PatternKind::Corners => TableKind::CornerPdb,
            PatternKind::EdgesA => TableKind::EdgesAPdb,
            PatternKind::EdgesB => TableKind::EdgesBPdb,
        }
    }

    pub fn coordinate(self, s: &CubeState) -> usize {
        match self {
            PatternKind::Corners => CornerCoordinate::of_state(s).flat(),
            PatternKind::EdgesA => EdgeSet::A.coordinate(s) as usize,
            PatternKind::EdgesB => EdgeSet::B.coordinate(s) as usize,
        }
    }
}

pub struct PatternDatabase {
    pub kind: PatternKind,
    pub table: Vec<u8>,
}

impl PatternDatabase {
    pub fn size(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn lookup(&self, s: &CubeState) -> u8 {
        self.table[self.kind.coordinate(s)]
    }

    pub fn max_value(&self) -> u8 {
        self.table.iter().copied().max().unwrap_or(0)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        tablefile::write_table(path, self.kind.table_kind(), &self.table)
    }

    pub fn load(path: &Path, kind: PatternKind) -> Result<PatternDatabase> {
        let table = tablefile::read_table(path, kind.table_kind(), kind.size())?;
        Ok(PatternDatabase { kind, table })
    }
}

pub fn build_pdb(kind: PatternKind) -> PatternDatabase {
    let table = match kind {
        PatternKind::Corners => {
            let t = corner_tables();
            bfs_fill(CORNER_STATES, 0, |i, m| t.apply_flat(i, m))
        }
        PatternKind::EdgesA | PatternKind::EdgesB => {
            let set = if kind == PatternKind::EdgesA { EdgeSet::A } else { EdgeSet::B };
            let t = edge6_tables();
            bfs_fill(EDGE6_STATES, set.solved_coordinate() as usize, |i, m| t.apply(i as u32, m) as usize)
        }
    };
    PatternDatabase { kind, table }
}

/// `$CUBEMIX_CACHE_DIR`, else `$XDG_CACHE_HOME/cubemix`, else `~/.cache/cubemix`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("cubemix");
    }
    if let Some(h) = std::env::var_os("HOME") {
        return PathBuf::from(h).join(".cache").join("cubemix");
    }
    std::env::temp_dir().join("cubemix")
}

pub const CACHE_DIR_ENV: &str = "CUBEMIX_CACHE_DIR";

/// The three databases used by the solver.
pub struct PdbSet {
    pub corners: PatternDatabase,
    pub edges_a: PatternDatabase,
    pub edges_b: PatternDatabase,
}

impl PdbSet {
    pub fn build() -> PdbSet {
        PdbSet {
            corners: build_pdb(PatternKind::Corners),
            edges_a: build_pdb(PatternKind::EdgesA),
            edges_b: build_pdb(PatternKind::EdgesB),
        }
    }

    /// Loads from `dir`; returns `Ok(None)` if any file is missing.
    pub fn load(dir: &Path) -> Result<Option<PdbSet>> {
        if PatternKind::ALL.iter().any(|k| !dir.join(k.file_name()).exists()) {
            return Ok(None);
        }
        Ok(Some(PdbSet {
            corners: PatternDatabase::load(&dir.join(PatternKind::Corners.file_name()), PatternKind::Corners)?,
            edges_a: PatternDatabase::load(&dir.join(PatternKind::EdgesA.file_name()), PatternKind::EdgesA)?,
            edges_b: PatternDatabase::load(&dir.join(PatternKind::EdgesB.file_name()), PatternKind::EdgesB)?,
        }))
    }

    /// Builds whichever databases are missing from `dir` and saves them.
    pub fn load_or_build(dir: &Path) -> Result<PdbSet> {
        let get = |kind: PatternKind| -> Result<PatternDatabase> {
            let path = dir.join(kind.file_name());
            if path.exists() {
                PatternDatabase::load(&path, kind)
            } else {
                log::info!("building {kind:?} pattern database");
                let pdb = build_pdb(kind);
                pdb.save(&path)?;
                Ok(pdb)
            }
        };
        Ok(PdbSet {
            corners: get(PatternKind::Corners)?,
            edges_a: get(PatternKind::EdgesA)?,
            edges_b: get(PatternKind::EdgesB)?,
        })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        for pdb in [&self.corners, &self.edges_a, &self.edges_b] {
            pdb.save(&dir.join(pdb.kind.file_name()))?;
        }
        Ok(())
    }

    /// Admissible lower bound on the distance of `s` to the origin.
    pub fn heuristic(&self, s: &CubeState) -> u8 {
        self.corners
            .lookup(s)
            .max(self.edges_a.lookup(s))
            .max(self.edges_b.lookup(s))
    }
}

/// Free-standing form of [`PdbSet::heuristic`].
pub fn heuristic(s: &CubeState, pdbs: &PdbSet) -> u8 {
    pdbs.heuristic(s)
}
