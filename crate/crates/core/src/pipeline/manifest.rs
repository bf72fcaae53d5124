use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ChainMode;
use crate::oracle::Budget;

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Stationary samples are stored under this step value.
pub const INF_STEP: i64 = -1;

/// Distance recorded when the solver budget runs out.
pub const SENTINEL: i8 = -1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Full 3x3x3 states, distances from the optimal solver.
    Full,
    /// Corner projection with centres fixed, distances from the corner table.
    Corner,
    /// Corner projection modulo whole-cube rotations.
    Quotient,
}

impl Mode {
    pub fn chain(self) -> Option<ChainMode> {
        match self {
            Mode::Full => None,
            Mode::Corner => Some(ChainMode::Corner),
            Mode::Quotient => Some(ChainMode::Quotient),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Corner => "corner",
            Mode::Quotient => "quotient",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "corner" => Ok(Mode::Corner),
            "quotient" => Ok(Mode::Quotient),
            _ => Err(Error::Invalid(format!("unknown mode {s:?} (expected full, corner or quotient)"))),
        }
    }
}

/// Distance to the origin, the superflip or the checkerboard.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Functional {
    #[serde(rename = "d_o")]
    Origin,
    #[serde(rename = "d_s")]
    Superflip,
    #[serde(rename = "d_c")]
    Checkerboard,
}

impl Functional {
    pub const ALL: [Functional; 3] = [Functional::Origin, Functional::Superflip, Functional::Checkerboard];

    pub fn column(self) -> &'static str {
        match self {
            Functional::Origin => "d_o",
            Functional::Superflip => "d_s",
            Functional::Checkerboard => "d_c",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn target_name(self) -> &'static str {
        match self {
            Functional::Origin => "origin",
            Functional::Superflip => "superflip",
            Functional::Checkerboard => "checkerboard",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|f| f.column() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown functional {s:?} (expected d_o, d_s or d_c)")))
    }
}

/// Parses `1..52`, `inf`, `0` and comma-separated combinations. Ranges are
/// inclusive; `inf` becomes [`INF_STEP`].
pub fn parse_steps(text: &str) -> Result<Vec<i64>> {
    let bad = || Error::Invalid(format!("bad step list {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part.eq_ignore_ascii_case("inf") {
            out.push(INF_STEP);
        } else if let Some((a, b)) = part.split_once("..") {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if a < 0 || b < a {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            let n: i64 = part.parse().map_err(|_| bad())?;
            if n < 0 {
                return Err(bad());
            }
            out.push(n);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    let mut seen = std::collections::HashSet::new();
    if !out.iter().all(|n| seen.insert(*n)) {
        return Err(Error::Invalid(format!("step list {text:?} repeats a value")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveBudget {
    pub max_nodes: Option<u64>,
    /// Wall-clock caps make sentinel placement machine dependent.
    pub max_seconds: Option<f64>,
    pub max_depth: Option<u8>,
}

impl From<SolveBudget> for Budget {
    fn from(b: SolveBudget) -> Budget {
        Budget {
            max_nodes: b.max_nodes,
            max_seconds: b.max_seconds,
            max_depth: b.max_depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ShardStatus {
    Pending,
    Done { row_count: u64, sentinels: u64, sha256: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub index: usize,
    pub file: String,
    /// Global row range `[first_row, first_row + rows)`.
    pub first_row: u64,
    pub rows: u64,
    #[serde(flatten)]
    pub status: ShardStatus,
}

/// Everything needed to regenerate a dataset bit for bit. Row `r` is sample
/// `r % samples_per_step` of step `steps[r / samples_per_step]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub mode: Mode,
    pub root_seed: u64,
    pub steps: Vec<i64>,
    pub samples_per_step: u64,
    pub functionals: Vec<Functional>,
    pub shard_size: u64,
    pub budget: SolveBudget,
    pub sentinel_rows: u64,
    pub shards: Vec<Shard>,
}

impl DatasetManifest {
    pub fn new(
        mode: Mode,
        root_seed: u64,
        steps: Vec<i64>,
        samples_per_step: u64,
        mut functionals: Vec<Functional>,
        shard_size: u64,
        budget: SolveBudget,
    ) -> Result<Self> {
        if steps.is_empty() || samples_per_step == 0 || shard_size == 0 {
            return Err(Error::Invalid("steps, samples per step and shard size must be non-empty".into()));
        }
        if steps.iter().any(|n| !(INF_STEP..0xFFFF).contains(n)) {
            return Err(Error::Invalid("steps must lie in 0..=65534 or be inf".into()));
        }
        functionals.sort();
        functionals.dedup();
        if functionals.is_empty() {
            return Err(Error::Invalid("at least one functional is required".into()));
        }
        let total = steps.len() as u64 * samples_per_step;
        let shards = (0..total.div_ceil(shard_size))
            .map(|k| {
                let first_row = k * shard_size;
                Shard {
                    index: k as usize,
                    file: format!("shard-{k:05}.csv"),
                    first_row,
                    rows: shard_size.min(total - first_row),
                    status: ShardStatus::Pending,
                }
            })
            .collect();
        Ok(DatasetManifest {
            format_version: FORMAT_VERSION,
            mode,
            root_seed,
            steps,
            samples_per_step,
            functionals,
            shard_size,
            budget,
            sentinel_rows: 0,
            shards,
        })
    }

    pub fn total_rows(&self) -> u64 {
        self.steps.len() as u64 * self.samples_per_step
    }

    /// `(n, sample_index)` of global row `r`.
    pub fn row_key(&self, r: u64) -> (i64, u64) {
        (
            self.steps[(r / self.samples_per_step) as usize],
            r % self.samples_per_step,
        )
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("n,sample_index");
        for f in &self.functionals {
            h.push(',');
            h.push_str(f.column());
        }
        h
    }

    pub fn is_complete(&self) -> bool {
        self.shards.iter().all(|s| matches!(s.status, ShardStatus::Done { .. }))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: DatasetManifest =
            serde_json::from_str(text).map_err(|e| Error::CorruptManifest(format!("unreadable manifest: {e}")))?;
        if m.format_version != FORMAT_VERSION {
            return Err(Error::CorruptManifest(format!(
                "format version {} is not supported (expected {FORMAT_VERSION})",
                m.format_version
            )));
        }
        let fresh = DatasetManifest::new(
            m.mode,
            m.root_seed,
            m.steps.clone(),
            m.samples_per_step,
            m.functionals.clone(),
            m.shard_size,
            m.budget,
        )
        .map_err(|e| Error::CorruptManifest(e.to_string()))?;
        let layout_matches = fresh.functionals == m.functionals
            && fresh.shards.len() == m.shards.len()
            && fresh
                .shards
                .iter()
                .zip(&m.shards)
                .all(|(a, b)| (a.index, &a.file, a.first_row, a.rows) == (b.index, &b.file, b.first_row, b.rows));
        if !layout_matches {
            return Err(Error::CorruptManifest("shard layout does not match the dataset parameters".into()));
        }
        let sentinels: u64 = m
            .shards
            .iter()
            .map(|s| match s.status {
                ShardStatus::Done { sentinels, .. } => sentinels,
                ShardStatus::Pending => 0,
            })
            .sum();
        if sentinels != m.sentinel_rows {
            return Err(Error::CorruptManifest(format!(
                "sentinel count {} disagrees with the shard total {sentinels}",
                m.sentinel_rows
            )));
        }
        Ok(m)
    }
}
