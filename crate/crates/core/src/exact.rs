//! The corner projection of the walk as an exactly evolved Markov chain.
//!
//! Two state spaces are supported. [`ChainMode::Corner`] keeps the centres
//! fixed and uses all 8!·3^7 corner configurations. [`ChainMode::Quotient`]
//! identifies configurations that differ by a whole-cube rotation, which is
//! the 2x2x2 puzzle with 3,674,160 states.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::coord::{
    corner_tables, quotient_decode, quotient_index, quotient_tables, CornerCoordinate, CORNER_ORIS, CORNER_STATES,
    QUOTIENT_ORIS, QUOTIENT_STATES,
};
use crate::cube::{Corners, Move};
use crate::error::{Error, Result};
use crate::oracle::{bfs_fill, layer_counts, PatternDatabase, PatternKind};
use crate::stats::{self, CurveSource, DecayCurve};
use crate::tablefile::{self, TableKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainMode {
    Corner,
    Quotient,
}

impl ChainMode {
    pub fn name(self) -> &'static str {
        match self {
            ChainMode::Corner => "corner",
            ChainMode::Quotient => "quotient",
        }
    }

    pub fn size(self) -> usize {
        match self {
            ChainMode::Corner => CORNER_STATES,
            ChainMode::Quotient => QUOTIENT_STATES,
        }
    }

    fn ori_count(self) -> usize {
        match self {
            ChainMode::Corner => CORNER_ORIS,
            ChainMode::Quotient => QUOTIENT_ORIS,
        }
    }

    fn tables(self) -> (&'static [[u16; 18]], &'static [[u16; 18]]) {
        match self {
            ChainMode::Corner => {
                let t = corner_tables();
                (&t.perm_table, &t.ori_table)
            }
            ChainMode::Quotient => {
                let t = quotient_tables();
                (&t.perm_table, &t.ori_table)
            }
        }
    }

    pub fn index_of(self, c: &Corners) -> usize {
        match self {
            ChainMode::Corner => CornerCoordinate::encode(c).flat(),
            ChainMode::Quotient => quotient_index(c),
        }
    }

    /// A corner configuration in class `i` (the representative in quotient mode).
    pub fn decode(self, i: usize) -> Corners {
        match self {
            ChainMode::Corner => CornerCoordinate::from_flat(i).decode(),
            ChainMode::Quotient => quotient_decode(i),
        }
    }

    #[inline]
    pub fn apply(self, i: usize, m: usize) -> usize {
        let (perm, ori) = self.tables();
        let k = self.ori_count();
        perm[i / k][m] as usize * k + ori[i % k][m] as usize
    }

    pub fn origin(self) -> usize {
        self.index_of(&Corners::SOLVED)
    }

    fn table_kind(self) -> TableKind {
        match self {
            ChainMode::Corner => TableKind::CornerDistance,
            ChainMode::Quotient => TableKind::QuotientDistance,
        }
    }
}

impl fmt::Display for ChainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corner" => Ok(ChainMode::Corner),
            "quotient" => Ok(ChainMode::Quotient),
            _ => Err(Error::Invalid(format!("unknown chain mode {s:?} (expected corner or quotient)"))),
        }
    }
}

// ---------------------------------------------------------------------------
// memory guard

static DENSE_ACTIVE: AtomicBool = AtomicBool::new(false);

/// Caps the memory the guard considers available, in MiB.
pub const MEMORY_LIMIT_ENV: &str = "CUBEMIX_MEMORY_LIMIT_MB";

/// Held for the lifetime of a dense corner-mode evolution.
#[derive(Debug)]
pub struct DenseGuard {
    exclusive: bool,
}

impl Drop for DenseGuard {
    fn drop(&mut self) {
        if self.exclusive {
            DENSE_ACTIVE.store(false, Ordering::Release);
        }
    }
}

fn mem_available_bytes() -> Option<u64> {
    let limit = std::env::var(MEMORY_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(|mb| mb << 20);
    let meminfo = std::fs::read_to_string("/proc/meminfo").ok().and_then(|text| {
        text.lines()
            .find(|l| l.starts_with("MemAvailable:"))
            .and_then(|l| l.split_whitespace().nth(1))
            .and_then(|kb| kb.parse::<u64>().ok())
            .map(|kb| kb << 10)
    });
    match (limit, meminfo) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn check_memory(mode: ChainMode, vectors: usize, available: Option<u64>) -> Result<()> {
    let need = (vectors * mode.size() * 8) as u64;
    match available {
        Some(avail) if need > avail => Err(Error::MemoryGuard(format!(
            "{mode} chain needs {} MiB for {vectors} dense vectors but only {} MiB are available",
            need >> 20,
            avail >> 20
        ))),
        _ => Ok(()),
    }
}

/// Checks that `vectors` dense vectors fit in memory. Corner mode is also
/// limited to one evolution per process.
pub fn acquire_dense(mode: ChainMode, vectors: usize) -> Result<DenseGuard> {
    check_memory(mode, vectors, mem_available_bytes())?;
    let exclusive = mode == ChainMode::Corner;
    if exclusive && DENSE_ACTIVE.swap(true, Ordering::AcqRel) {
        return Err(Error::MemoryGuard(
            "a dense corner evolution is already running in this process".into(),
        ));
    }
    Ok(DenseGuard { exclusive })
}

// ---------------------------------------------------------------------------
// distributions

#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

const REDUCE_CHUNK: usize = 1 << 16;

/// Deterministic compensated sum of `f` over `v`, independent of thread count.
fn reduce(v: &[f64], f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let parts: Vec<Neumaier> = v
        .par_chunks(REDUCE_CHUNK)
        .map(|c| {
            let mut acc = Neumaier::default();
            for &x in c {
                acc.add(f(x));
            }
            acc
        })
        .collect();
    let mut acc = Neumaier::default();
    for p in parts {
        acc.add(p.sum);
        acc.add(p.comp);
    }
    acc.value()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionVector {
    pub mode: ChainMode,
    pub probabilities: Vec<f64>,
    pub step_index: usize,
}

impl DistributionVector {
    pub fn point_mass(mode: ChainMode, index: usize) -> Self {
        let mut probabilities = vec![0.0; mode.size()];
        probabilities[index] = 1.0;
        DistributionVector {
            mode,
            probabilities,
            step_index: 0,
        }
    }

    pub fn origin(mode: ChainMode) -> Self {
        Self::point_mass(mode, mode.origin())
    }

    pub fn uniform(mode: ChainMode) -> Self {
        DistributionVector {
            mode,
            probabilities: vec![1.0 / mode.size() as f64; mode.size()],
            step_index: 0,
        }
    }

    pub fn sum(&self) -> f64 {
        reduce(&self.probabilities, |x| x)
    }

    pub fn tv_uniform(&self) -> f64 {
        exact_tv_uniform(self)
    }
}

/// One step of the walk: `out[j] = (1/18) Σ_m in[j · m⁻¹]`.
pub fn evolve_step(dist: &DistributionVector) -> DistributionVector {
    let mut out = vec![0.0; dist.probabilities.len()];
    evolve_into(dist.mode, &dist.probabilities, &mut out);
    DistributionVector {
        mode: dist.mode,
        probabilities: out,
        step_index: dist.step_index + 1,
    }
}

fn evolve_into(mode: ChainMode, input: &[f64], out: &mut [f64]) {
    let k = mode.ori_count();
    let (perm, ori) = mode.tables();
    let inverse: [usize; 18] = std::array::from_fn(|m| Move::from_index(m).inverse().index());
    let ori_cols: Vec<Vec<u16>> = (0..18).map(|m| (0..k).map(|o| ori[o][inverse[m]]).collect()).collect();
    // Blocks of zeros contribute nothing; skipping them leaves every sum unchanged.
    let live: Vec<bool> = input.par_chunks(k).map(|b| b.iter().any(|&x| x != 0.0)).collect();
    let scale = 1.0 / 18.0;
    out.par_chunks_mut(k).enumerate().for_each(|(p, block)| {
        block.fill(0.0);
        for (m, col) in ori_cols.iter().enumerate() {
            let q = perm[p][inverse[m]] as usize;
            if !live[q] {
                continue;
            }
            let src = &input[q * k..(q + 1) * k];
            for (dst, &c) in block.iter_mut().zip(col) {
                *dst += src[c as usize];
            }
        }
        for x in block.iter_mut() {
            *x *= scale;
        }
    });
}

/// TV distance to the uniform law, as `Σ (p_i − u)⁺`. For a probability
/// vector this equals half the L1 distance, and a point mass gives exactly
/// `1 − u` in floating point.
pub fn exact_tv_uniform(dist: &DistributionVector) -> f64 {
    let u = 1.0 / dist.probabilities.len() as f64;
    reduce(&dist.probabilities, |p| if p > u { p - u } else { 0.0 })
}

/// Largest deviation from uniform after one step started at uniform.
pub fn fixed_point_residual(mode: ChainMode) -> Result<f64> {
    let _guard = acquire_dense(mode, 2)?;
    let u = DistributionVector::uniform(mode);
    let next = evolve_step(&u);
    let target = u.probabilities[0];
    Ok(next
        .probabilities
        .par_iter()
        .map(|&p| (p - target).abs())
        .reduce(|| 0.0, f64::max))
}

/// A dense evolution from the origin.
pub struct ExactChain {
    current: DistributionVector,
    scratch: Vec<f64>,
    _guard: DenseGuard,
}

impl ExactChain {
    pub fn new(mode: ChainMode) -> Result<Self> {
        let guard = acquire_dense(mode, 2)?;
        Ok(ExactChain {
            current: DistributionVector::origin(mode),
            scratch: vec![0.0; mode.size()],
            _guard: guard,
        })
    }

    pub fn step(&mut self) {
        evolve_into(self.current.mode, &self.current.probabilities, &mut self.scratch);
        std::mem::swap(&mut self.current.probabilities, &mut self.scratch);
        self.current.step_index += 1;
    }

    pub fn distribution(&self) -> &DistributionVector {
        &self.current
    }
}

// ---------------------------------------------------------------------------
// distance tables and projection

/// Exact distance from the origin for every state of a chain mode.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerDistanceTable {
    pub mode: ChainMode,
    pub distances: Vec<u8>,
    pub diameter: u8,
}

impl CornerDistanceTable {
    fn from_distances(mode: ChainMode, distances: Vec<u8>) -> Self {
        let diameter = distances.par_iter().copied().max().unwrap_or(0);
        CornerDistanceTable {
            mode,
            distances,
            diameter,
        }
    }

    /// The corner pattern database is the same table.
    pub fn from_pdb(pdb: PatternDatabase) -> Result<Self> {
        if pdb.kind != PatternKind::Corners {
            return Err(Error::Invalid(format!("{:?} is not a corner table", pdb.kind)));
        }
        Ok(Self::from_distances(ChainMode::Corner, pdb.table))
    }

    pub fn distance(&self, c: &Corners) -> u8 {
        self.distances[self.mode.index_of(c)]
    }

    pub fn layer_counts(&self) -> Vec<u64> {
        layer_counts(&self.distances)
    }

    /// Distances to `target` instead of the origin: `d(target⁻¹ · x)`.
    /// Whole-cube rotations commute with the move set up to relabelling, so
    /// this is well defined on rotation classes too.
    pub fn rebased(&self, target: &Corners) -> Vec<u8> {
        if self.mode.index_of(target) == self.mode.origin() && self.mode == ChainMode::Corner {
            return self.distances.clone();
        }
        let inv = target.inverse();
        let mode = self.mode;
        (0..mode.size())
            .into_par_iter()
            .with_min_len(1 << 12)
            .map(|i| self.distances[mode.index_of(&inv.compose(&mode.decode(i)))])
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        tablefile::write_table(path, self.mode.table_kind(), &self.distances)
    }

    pub fn load(path: &Path, mode: ChainMode) -> Result<Self> {
        let t = tablefile::read_table(path, mode.table_kind(), mode.size())?;
        Ok(Self::from_distances(mode, t))
    }
}

pub fn distance_table(mode: ChainMode) -> CornerDistanceTable {
    let t = bfs_fill(mode.size(), mode.origin(), |i, m| mode.apply(i, m));
    CornerDistanceTable::from_distances(mode, t)
}

pub fn corner_bfs() -> CornerDistanceTable {
    distance_table(ChainMode::Corner)
}

pub fn quotient_bfs() -> CornerDistanceTable {
    distance_table(ChainMode::Quotient)
}

/// Law of `labels[X]` when `X` has law `dist`; index is the label value.
pub fn project_distribution(dist: &DistributionVector, labels: &[u8]) -> Vec<f64> {
    assert_eq!(dist.probabilities.len(), labels.len(), "labelling covers the state space");
    let width = labels.par_iter().copied().max().unwrap_or(0) as usize + 1;
    let parts: Vec<Vec<f64>> = dist
        .probabilities
        .par_chunks(REDUCE_CHUNK)
        .zip(labels.par_chunks(REDUCE_CHUNK))
        .map(|(p, l)| {
            let mut h = vec![0.0; width];
            for (&x, &d) in p.iter().zip(l) {
                h[d as usize] += x;
            }
            h
        })
        .collect();
    let mut acc = vec![Neumaier::default(); width];
    for h in parts {
        for (a, x) in acc.iter_mut().zip(h) {
            a.add(x);
        }
    }
    acc.into_iter().map(Neumaier::value).collect()
}

/// Law of a labelling under the uniform distribution.
pub fn stationary_projection(labels: &[u8]) -> Vec<f64> {
    let counts = layer_counts(labels);
    let n = labels.len() as f64;
    counts.iter().map(|&c| c as f64 / n).collect()
}

// ---------------------------------------------------------------------------
// decay

/// The exact law of one labelling along the chain.
#[derive(Clone, Debug)]
pub struct ProjectedDecay {
    pub name: String,
    pub stationary: Vec<f64>,
    /// `laws[n]` is the law of the label after `n` steps.
    pub laws: Vec<Vec<f64>>,
    pub curve: DecayCurve,
}

#[derive(Clone, Debug)]
pub struct ExactDecay {
    pub mode: ChainMode,
    /// TV of the full chain state to uniform, n = 0..=max_n.
    pub full: DecayCurve,
    pub projections: Vec<ProjectedDecay>,
}

impl ExactDecay {
    pub fn thresholds(&self) -> Vec<(f64, Option<i64>)> {
        stats::threshold_report(&self.full)
    }

    pub fn projection(&self, name: &str) -> Option<&ProjectedDecay> {
        self.projections.iter().find(|p| p.name == name)
    }
}

/// Evolves from the origin for `max_n` steps, recording the TV to uniform
/// and the law of each labelling at every step.
pub fn exact_decay(mode: ChainMode, max_n: usize, labelings: &[(&str, &[u8])]) -> Result<ExactDecay> {
    exact_decay_with(mode, max_n, labelings, |_, _| {})
}

/// As [`exact_decay`], calling `progress(n, tv)` after each step.
pub fn exact_decay_with(
    mode: ChainMode,
    max_n: usize,
    labelings: &[(&str, &[u8])],
    mut progress: impl FnMut(usize, f64),
) -> Result<ExactDecay> {
    for (name, l) in labelings {
        if l.len() != mode.size() {
            return Err(Error::Invalid(format!(
                "labelling {name} has {} entries, {mode} chain has {}",
                l.len(),
                mode.size()
            )));
        }
    }
    let mut chain = ExactChain::new(mode)?;
    let mut full = DecayCurve::new(CurveSource::Exact);
    let mut projections: Vec<ProjectedDecay> = labelings
        .iter()
        .map(|(name, l)| ProjectedDecay {
            name: name.to_string(),
            stationary: stationary_projection(l),
            laws: Vec::with_capacity(max_n + 1),
            curve: DecayCurve::new(CurveSource::Exact),
        })
        .collect();
    for n in 0..=max_n {
        if n > 0 {
            chain.step();
        }
        let d = chain.distribution();
        let t = exact_tv_uniform(d);
        full.push(n as i64, t.clamp(0.0, 1.0), None)?;
        for (proj, (_, labels)) in projections.iter_mut().zip(labelings) {
            let law = project_distribution(d, labels);
            let tv = stats::tv(&law, &proj.stationary);
            proj.curve
                .push(n as i64, tv.clamp(0.0, 1.0), None)
                ?;
            proj.laws.push(law);
        }
        progress(n, t);
    }
    Ok(ExactDecay {
        mode,
        full,
        projections,
    })
}
