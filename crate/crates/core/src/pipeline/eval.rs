use std::path::Path;
use std::sync::Arc;

use crate::cube::{named_state, CubeState};
use crate::error::{Error, Result};
use crate::exact::{ChainMode, CornerDistanceTable};
use crate::oracle::{distance, PatternDatabase, PatternKind, PdbSet};
use crate::walk::{random_move, uniform_state, walk, RngStream};

use super::manifest::{Functional, Mode, SolveBudget, INF_STEP, SENTINEL};

/// One sampled state and its distances; `values` is indexed by
/// [`Functional::index`] and holds `None` for functionals not requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DatasetRow {
    pub n: i64,
    pub sample_index: u64,
    pub values: [Option<i8>; 3],
}

impl DatasetRow {
    pub fn get(&self, f: Functional) -> Option<i8> {
        self.values[f.index()]
    }

    pub fn is_sentinel(&self, f: Functional) -> bool {
        self.get(f) == Some(SENTINEL)
    }

    pub fn csv_line(&self, functionals: &[Functional]) -> String {
        let mut s = format!("{},{}", self.n, self.sample_index);
        for f in functionals {
            s.push(',');
            s.push_str(&self.get(*f).expect("requested functional is present").to_string());
        }
        s
    }
}

fn target(f: Functional) -> CubeState {
    named_state(f.target_name()).expect("built-in target")
}

enum Engine {
    Full { pdbs: Arc<PdbSet>, budget: SolveBudget },
    Chain { mode: ChainMode, labels: Vec<Option<Vec<u8>>> },
}

/// Resources for turning `(root_seed, n, sample_index)` into a row.
pub struct Evaluator {
    functionals: Vec<Functional>,
    engine: Engine,
}

impl Evaluator {
    pub fn full(pdbs: Arc<PdbSet>, budget: SolveBudget, functionals: &[Functional]) -> Self {
        Evaluator {
            functionals: functionals.to_vec(),
            engine: Engine::Full { pdbs, budget },
        }
    }

    /// Labels each chain state with its distance to each requested target.
    pub fn chain(table: &CornerDistanceTable, functionals: &[Functional]) -> Self {
        let labels = Functional::ALL
            .iter()
            .map(|f| functionals.contains(f).then(|| table.rebased(&target(*f).corners())))
            .collect();
        Evaluator {
            functionals: functionals.to_vec(),
            engine: Engine::Chain {
                mode: table.mode,
                labels,
            },
        }
    }

    /// Loads or builds whatever `mode` needs, caching it under `cache_dir`.
    pub fn load(mode: Mode, functionals: &[Functional], budget: SolveBudget, cache_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(cache_dir).map_err(Error::io(cache_dir))?;
        match mode.chain() {
            None => Ok(Evaluator::full(Arc::new(PdbSet::load_or_build(cache_dir)?), budget, functionals)),
            Some(chain) => Ok(Evaluator::chain(&load_distance_table(chain, cache_dir)?, functionals)),
        }
    }

    pub fn mode(&self) -> Mode {
        match &self.engine {
            Engine::Full { .. } => Mode::Full,
            Engine::Chain {
                mode: ChainMode::Corner, ..
            } => Mode::Corner,
            Engine::Chain {
                mode: ChainMode::Quotient,
                ..
            } => Mode::Quotient,
        }
    }

    pub fn functionals(&self) -> &[Functional] {
        &self.functionals
    }

    pub fn row(&self, root_seed: u64, n: i64, sample_index: u64) -> DatasetRow {
        let mut rng = RngStream::for_sample(root_seed, n, sample_index);
        let mut values = [None; 3];
        match &self.engine {
            Engine::Full { pdbs, budget } => {
                let state = if n == INF_STEP {
                    uniform_state(&mut rng)
                } else {
                    walk(&CubeState::SOLVED, n as usize, &mut rng)
                };
                for &f in &self.functionals {
                    let d = match distance(&state, &target(f), pdbs, (*budget).into()) {
                        Ok(d) => d as i8,
                        Err(Error::BudgetExhausted { .. }) => SENTINEL,
                        Err(e) => unreachable!("solver failed: {e}"),
                    };
                    values[f.index()] = Some(d);
                }
            }
            Engine::Chain { mode, labels } => {
                // Same draws as the full walk, so this is its exact corner image.
                let i = if n == INF_STEP {
                    mode.index_of(&uniform_state(&mut rng).corners())
                } else {
                    (0..n).fold(mode.origin(), |i, _| mode.apply(i, random_move(&mut rng).index()))
                };
                for &f in &self.functionals {
                    let l = labels[f.index()].as_ref().expect("labels for requested functional");
                    values[f.index()] = Some(l[i] as i8);
                }
            }
        }
        DatasetRow {
            n,
            sample_index,
            values,
        }
    }
}

const QUOTIENT_TABLE_FILE: &str = "quotient.dist";

/// The corner table is the corner pattern database, so it shares its file.
pub fn load_distance_table(mode: ChainMode, cache_dir: &Path) -> Result<CornerDistanceTable> {
    match mode {
        ChainMode::Corner => {
            let path = cache_dir.join(PatternKind::Corners.file_name());
            if path.exists() {
                CornerDistanceTable::from_pdb(PatternDatabase::load(&path, PatternKind::Corners)?)
            } else {
                log::info!("building corner distance table");
                let t = crate::exact::corner_bfs();
                let pdb = PatternDatabase {
                    kind: PatternKind::Corners,
                    table: t.distances,
                };
                pdb.save(&path)?;
                CornerDistanceTable::from_pdb(pdb)
            }
        }
        ChainMode::Quotient => {
            let path = cache_dir.join(QUOTIENT_TABLE_FILE);
            if path.exists() {
                CornerDistanceTable::load(&path, mode)
            } else {
                let t = crate::exact::quotient_bfs();
                t.save(&path)?;
                Ok(t)
            }
        }
    }
}
