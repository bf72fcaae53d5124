//! Optimal solving by iterative-deepening A* in the 18-move metric.
//!
//! The search runs entirely on coordinates: corner permutation and twist,
//! and the two six-edge patterns. Together they determine the state, and
//! the heuristic is zero exactly at the origin.

use std::time::Instant;

use crate::coord::{corner_tables, edge6_tables, CoordinateMoveTables, CornerCoordinate, Edge6Tables, EdgeSet, CORNER_ORIS};
use crate::cube::{canonical_successor, CubeState, Face, Move, MoveSequence};
use crate::error::{Error, Result};

use super::pdb::PdbSet;

/// Limits on a single solve. `max_depth` caps the IDA* threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    pub max_depth: Option<u8>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget {
        max_nodes: None,
        max_seconds: None,
        max_depth: None,
    };

    pub fn nodes(n: u64) -> Budget {
        Budget {
            max_nodes: Some(n),
            ..Budget::UNLIMITED
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalResult {
    pub distance: u8,
    pub solution: MoveSequence,
    pub nodes_expanded: u64,
    pub elapsed: f64,
    /// IDA* thresholds tried, in order; the last one equals `distance`.
    pub thresholds: Vec<u8>,
}

#[derive(Clone, Copy)]
struct Node {
    corner_perm: u16,
    corner_ori: u16,
    edges_a: u32,
    edges_b: u32,
}

struct Search<'a> {
    pdbs: &'a PdbSet,
    corners: &'a CoordinateMoveTables,
    edges: &'a Edge6Tables,
    budget: Budget,
    start: Instant,
    nodes: u64,
    exhausted: bool,
    next_bound: u8,
    path: Vec<u8>,
}

impl Search<'_> {
    #[inline]
    fn h(&self, n: &Node) -> u8 {
        let c = self.pdbs.corners.table[n.corner_perm as usize * CORNER_ORIS + n.corner_ori as usize];
        let a = self.pdbs.edges_a.table[n.edges_a as usize];
        let b = self.pdbs.edges_b.table[n.edges_b as usize];
        c.max(a).max(b)
    }

    #[inline]
    fn child(&self, n: &Node, m: usize) -> Node {
        Node {
            corner_perm: self.corners.perm_table[n.corner_perm as usize][m],
            corner_ori: self.corners.ori_table[n.corner_ori as usize][m],
            edges_a: self.edges.apply(n.edges_a, m),
            edges_b: self.edges.apply(n.edges_b, m),
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.nodes >= max {
                self.exhausted = true;
            }
        }
        if self.nodes & 0x3FFF == 0 {
            if let Some(max) = self.budget.max_seconds {
                if self.start.elapsed().as_secs_f64() >= max {
                    self.exhausted = true;
                }
            }
        }
        self.exhausted
    }

    fn dfs(&mut self, n: Node, h: u8, g: u8, bound: u8, prev: Option<Face>) -> bool {
        self.nodes += 1;
        if h == 0 {
            return true;
        }
        if self.out_of_budget() {
            return false;
        }
        for m in 0..18 {
            let face = Face::from_index(m / 3);
            if !canonical_successor(prev, face) {
                continue;
            }
            let c = self.child(&n, m);
            let hc = self.h(&c);
            let f = g + 1 + hc;
            if f > bound {
                self.next_bound = self.next_bound.min(f);
                continue;
            }
            self.path.push(m as u8);
            if self.dfs(c, hc, g + 1, bound, Some(face)) {
                return true;
            }
            self.path.pop();
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

/// A provably shortest word taking `state` to the origin.
pub fn solve_optimal(state: &CubeState, pdbs: &PdbSet, budget: Budget) -> Result<OptimalResult> {
    let corner = CornerCoordinate::of_state(state);
    let root = Node {
        corner_perm: corner.perm_rank,
        corner_ori: corner.ori_rank,
        edges_a: EdgeSet::A.coordinate(state),
        edges_b: EdgeSet::B.coordinate(state),
    };
    let mut search = Search {
        pdbs,
        corners: corner_tables(),
        edges: edge6_tables(),
        budget,
        start: Instant::now(),
        nodes: 0,
        exhausted: false,
        next_bound: u8::MAX,
        path: Vec::with_capacity(24),
    };
    let h0 = search.h(&root);
    let mut bound = h0;
    let mut thresholds = Vec::new();
    loop {
        if budget.max_depth.is_some_and(|d| bound > d) {
            return Err(Error::BudgetExhausted {
                lower_bound: bound,
                nodes: search.nodes,
                elapsed: search.start.elapsed().as_secs_f64(),
            });
        }
        thresholds.push(bound);
        search.next_bound = u8::MAX;
        if search.dfs(root, h0, 0, bound, None) {
            let solution: MoveSequence = search.path.iter().map(|&m| Move::from_index(m as usize)).collect();
            return Ok(OptimalResult {
                distance: solution.len() as u8,
                solution,
                nodes_expanded: search.nodes,
                elapsed: search.start.elapsed().as_secs_f64(),
                thresholds,
            });
        }
        if search.exhausted {
            return Err(Error::BudgetExhausted {
                lower_bound: bound,
                nodes: search.nodes,
                elapsed: search.start.elapsed().as_secs_f64(),
            });
        }
        debug_assert!(search.next_bound > bound);
        bound = search.next_bound;
    }
}

/// Distance from `x` to `target`: the optimal solve of the relative state.
pub fn distance(x: &CubeState, target: &CubeState, pdbs: &PdbSet, budget: Budget) -> Result<u8> {
    solve_optimal(&x.relative_to(target), pdbs, budget).map(|r| r.distance)
}
