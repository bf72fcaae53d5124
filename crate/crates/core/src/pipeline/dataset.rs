use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tablefile::write_atomic;

use super::eval::{DatasetRow, Evaluator};
use super::manifest::{DatasetManifest, Functional, Shard, ShardStatus, MANIFEST_FILE, SENTINEL};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A dataset directory: `manifest.json` plus one CSV file per shard.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub dir: PathBuf,
    pub manifest: DatasetManifest,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Stop after this many shards have been written in this call.
    pub max_shards: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DatasetStatus {
    pub shards_done: usize,
    pub shards_pending: usize,
    pub rows_done: u64,
    pub rows_total: u64,
    pub sentinel_rows: u64,
}

impl Dataset {
    /// Creates `dir` and writes a fresh manifest. Refuses to overwrite one.
    pub fn init(dir: &Path, manifest: DatasetManifest) -> Result<Dataset> {
        let path = dir.join(MANIFEST_FILE);
        if path.exists() {
            return Err(Error::Invalid(format!(
                "{} already exists; resume it or choose another directory",
                path.display()
            )));
        }
        let ds = Dataset {
            dir: dir.to_path_buf(),
            manifest,
        };
        ds.save_manifest()?;
        Ok(ds)
    }

    pub fn open(dir: &Path) -> Result<Dataset> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(Error::io(&path))?;
        Ok(Dataset {
            dir: dir.to_path_buf(),
            manifest: DatasetManifest::from_json(&text)?,
        })
    }

    fn save_manifest(&self) -> Result<()> {
        write_atomic(&self.dir.join(MANIFEST_FILE), &[self.manifest.to_json().as_bytes()])
    }

    pub fn status(&self) -> DatasetStatus {
        let mut st = DatasetStatus {
            shards_done: 0,
            shards_pending: 0,
            rows_done: 0,
            rows_total: self.manifest.total_rows(),
            sentinel_rows: self.manifest.sentinel_rows,
        };
        for s in &self.manifest.shards {
            match s.status {
                ShardStatus::Done { row_count, .. } => {
                    st.shards_done += 1;
                    st.rows_done += row_count;
                }
                ShardStatus::Pending => st.shards_pending += 1,
            }
        }
        st
    }

    fn read_shard(&self, shard: &Shard) -> Result<Vec<u8>> {
        let path = self.dir.join(&shard.file);
        let bytes = fs::read(&path).map_err(|e| Error::CorruptManifest(format!("shard {}: {e}", path.display())))?;
        if let ShardStatus::Done { sha256, .. } = &shard.status {
            let got = sha256_hex(&bytes);
            if &got != sha256 {
                return Err(Error::CorruptManifest(format!(
                    "shard {} has digest {got}, manifest records {sha256}",
                    shard.file
                )));
            }
        }
        Ok(bytes)
    }

    /// Checks every completed shard against its recorded digest.
    pub fn verify(&self) -> Result<()> {
        self.manifest
            .shards
            .par_iter()
            .filter(|s| matches!(s.status, ShardStatus::Done { .. }))
            .try_for_each(|s| self.read_shard(s).map(drop))
    }

    fn shard_bytes(&self, shard: &Shard, eval: &Evaluator) -> (Vec<u8>, u64) {
        let m = &self.manifest;
        let mut text = m.csv_header();
        text.push('\n');
        let mut sentinels = 0;
        for r in shard.first_row..shard.first_row + shard.rows {
            let (n, idx) = m.row_key(r);
            let row = eval.row(m.root_seed, n, idx);
            if m.functionals.iter().any(|&f| row.get(f) == Some(SENTINEL)) {
                sentinels += 1;
            }
            let _ = writeln!(text, "{}", row.csv_line(&m.functionals));
        }
        (text.into_bytes(), sentinels)
    }

    /// Generates pending shards. Each shard is written atomically and the
    /// manifest is updated after it, so the run can be interrupted at any
    /// point and resumed. Completed shards are verified first.
    pub fn run(&mut self, eval: &Evaluator, opts: RunOptions) -> Result<DatasetStatus> {
        if eval.mode() != self.manifest.mode || eval.functionals() != self.manifest.functionals.as_slice() {
            return Err(Error::Invalid(
                "evaluator does not match the dataset's mode and functionals".into(),
            ));
        }
        self.verify()?;
        let mut pending: Vec<usize> = self
            .manifest
            .shards
            .iter()
            .filter(|s| s.status == ShardStatus::Pending)
            .map(|s| s.index)
            .collect();
        if let Some(k) = opts.max_shards {
            pending.truncate(k);
        }
        let shared = Mutex::new(&mut *self);
        let snapshot = shared.lock().unwrap().clone();
        pending.par_iter().try_for_each(|&k| -> Result<()> {
            let shard = &snapshot.manifest.shards[k];
            let (bytes, sentinels) = snapshot.shard_bytes(shard, eval);
            write_atomic(&snapshot.dir.join(&shard.file), &[&bytes])?;
            let mut ds = shared.lock().unwrap();
            ds.manifest.shards[k].status = ShardStatus::Done {
                row_count: shard.rows,
                sentinels,
                sha256: sha256_hex(&bytes),
            };
            ds.manifest.sentinel_rows += sentinels;
            ds.save_manifest()?;
            log::info!("shard {k} done ({} rows)", shard.rows);
            Ok(())
        })?;
        Ok(self.status())
    }

    /// All rows of completed shards, in row order, after digest checks.
    pub fn rows(&self) -> Result<Vec<DatasetRow>> {
        let m = &self.manifest;
        let mut out = Vec::with_capacity(m.total_rows() as usize);
        for shard in &m.shards {
            if shard.status == ShardStatus::Pending {
                continue;
            }
            let bytes = self.read_shard(shard)?;
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::CorruptManifest(format!("shard {} is not UTF-8", shard.file)))?;
            out.extend(parse_rows(&text, &m.functionals).map_err(|e| {
                Error::CorruptManifest(format!("shard {}: {e}", shard.file))
            })?);
        }
        Ok(out)
    }
}

/// Parses shard CSV text with the given functional columns.
pub fn parse_rows(text: &str, functionals: &[Functional]) -> std::result::Result<Vec<DatasetRow>, String> {
    let mut lines = text.lines();
    let mut header = String::from("n,sample_index");
    for f in functionals {
        header.push(',');
        header.push_str(f.column());
    }
    if lines.next() != Some(header.as_str()) {
        return Err(format!("expected header {header}"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + functionals.len() {
            return Err(format!("line {}: expected {} fields", i + 2, 2 + functionals.len()));
        }
        let bad = |what: &str| format!("line {}: bad {what}", i + 2);
        let mut values = [None; 3];
        for (f, v) in functionals.iter().zip(&fields[2..]) {
            let d: i8 = v.parse().map_err(|_| bad(f.column()))?;
            if !(SENTINEL..=20).contains(&d) {
                return Err(bad(f.column()));
            }
            values[f.index()] = Some(d);
        }
        rows.push(DatasetRow {
            n: fields[0].parse().map_err(|_| bad("n"))?,
            sample_index: fields[1].parse().map_err(|_| bad("sample_index"))?,
            values,
        });
    }
    Ok(rows)
}

/// Initializes a dataset in `dir` and generates all of it.
pub fn generate_dataset(dir: &Path, manifest: DatasetManifest, eval: &Evaluator) -> Result<Dataset> {
    let mut ds = Dataset::init(dir, manifest)?;
    ds.run(eval, RunOptions::default())?;
    Ok(ds)
}

/// Reopens `dir`, verifies what exists and generates the rest.
pub fn resume_dataset(dir: &Path, eval: &Evaluator) -> Result<Dataset> {
    let mut ds = Dataset::open(dir)?;
    ds.run(eval, RunOptions::default())?;
    Ok(ds)
}
