//! Sharded, resumable sample generation and the files derived from it.
//!
//! A dataset directory holds `manifest.json` and shard files
//! `shard-NNNNN.csv` with header `n,sample_index,d_o,d_s,d_c` (absent
//! functionals are left out). Stationary samples use `n = -1`, and a
//! distance of `-1` marks a solve that ran out of budget. Every row is a
//! function of `(root_seed, n, sample_index)` alone, so the bytes do not
//! depend on worker count or on how often the run was interrupted.

mod dataset;
mod emit;
mod eval;
mod manifest;

pub use dataset::{generate_dataset, parse_rows, resume_dataset, sha256_hex, Dataset, DatasetStatus, RunOptions};
pub use emit::{
    counts_by_step, emit_decay, emit_decay_from_dataset, emit_histograms, stochastically_increasing, tv_to, Histogram,
    BOOTSTRAP_STREAM,
};
pub use eval::{load_distance_table, DatasetRow, Evaluator};
pub use manifest::{
    parse_steps, DatasetManifest, Functional, Mode, Shard, ShardStatus, SolveBudget, FORMAT_VERSION, INF_STEP,
    MANIFEST_FILE, SENTINEL,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::exact::quotient_bfs;

    fn quotient_eval(functionals: &[Functional]) -> Evaluator {
        Evaluator::chain(&quotient_bfs(), functionals)
    }

    fn manifest(steps: Vec<i64>, samples: u64, shard: u64) -> DatasetManifest {
        DatasetManifest::new(
            Mode::Quotient,
            11,
            steps,
            samples,
            vec![Functional::Origin, Functional::Checkerboard],
            shard,
            SolveBudget::default(),
        )
        .unwrap()
    }

    #[test]
    fn step_zero_is_the_origin() {
        let eval = quotient_eval(&[Functional::Origin]);
        for i in 0..20 {
            assert_eq!(eval.row(5, 0, i).get(Functional::Origin), Some(0));
        }
    }

    #[test]
    fn interrupted_run_matches_uninterrupted() {
        let eval = quotient_eval(&[Functional::Origin, Functional::Checkerboard]);
        let m = manifest(vec![1, 2, 3, 9, INF_STEP], 40, 30);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        generate_dataset(a.path(), m.clone(), &eval).unwrap();
        let mut ds = Dataset::init(b.path(), m).unwrap();
        ds.run(&eval, RunOptions { max_shards: Some(2) }).unwrap();
        assert_eq!(ds.status().shards_done, 2);
        let ds = resume_dataset(b.path(), &eval).unwrap();
        assert!(ds.manifest.is_complete());
        for entry in std::fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            let x = std::fs::read(a.path().join(&name)).unwrap();
            let y = std::fs::read(b.path().join(&name)).unwrap();
            assert_eq!(x, y, "{name:?}");
        }
        let rows = ds.rows().unwrap();
        assert_eq!(rows.len(), 200);
        assert!(rows.iter().all(|r| r.get(Functional::Superflip).is_none()));
    }

    #[test]
    fn flipped_byte_is_detected() {
        let eval = quotient_eval(&[Functional::Origin, Functional::Checkerboard]);
        let dir = tempfile::tempdir().unwrap();
        let ds = generate_dataset(dir.path(), manifest(vec![4, 5], 30, 25), &eval).unwrap();
        let path = dir.path().join(&ds.manifest.shards[1].file);
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 2;
        bytes[last] ^= 1;
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(Dataset::open(dir.path()).unwrap().verify(), Err(Error::CorruptManifest(_))));
        assert!(matches!(resume_dataset(dir.path(), &eval), Err(Error::CorruptManifest(_))));
    }

    #[test]
    fn decay_of_rows_equal_to_stationary_is_flat_zero() {
        let stationary: Vec<DatasetRow> = (0..60)
            .map(|i| DatasetRow {
                n: INF_STEP,
                sample_index: i,
                values: [Some((i % 3) as i8 + 4), None, None],
            })
            .collect();
        let rows: Vec<DatasetRow> = (1..=4)
            .flat_map(|n| stationary.iter().map(move |r| DatasetRow { n, ..*r }))
            .collect();
        let curve = emit_decay(&rows, &stationary, Functional::Origin, 50, 1).unwrap();
        assert_eq!(curve.points().len(), 4);
        assert!(curve.points().iter().all(|p| p.tv == 0.0));
    }

    #[test]
    fn sentinel_rows_are_excluded() {
        let mut rows: Vec<DatasetRow> = (0..10)
            .map(|i| DatasetRow {
                n: 2,
                sample_index: i,
                values: [Some(2), None, None],
            })
            .collect();
        rows[3].values[0] = Some(SENTINEL);
        let h = emit_histograms(&rows, Functional::Origin, &[2]).unwrap();
        assert_eq!(h[0].total(), 9);
        assert_eq!(h[0].counts[2], 9);
        assert!(h[0].to_csv().starts_with("distance,count,probability\n0,0,0\n1,0,0\n2,9,1.00000000\n"));
    }

    #[test]
    fn histograms_and_non_monotone_decay_survive() {
        let eval = quotient_eval(&[Functional::Origin, Functional::Checkerboard]);
        let dir = tempfile::tempdir().unwrap();
        let ds = generate_dataset(dir.path(), manifest(vec![0, 1, 2, 3, INF_STEP], 400, 500), &eval).unwrap();
        let rows = ds.rows().unwrap();
        let h = emit_histograms(&rows, Functional::Origin, &[0, 1, 2, 3]).unwrap();
        assert_eq!(h[0].counts[0], 400);
        assert!(h.windows(2).all(|w| w[0].mean() < w[1].mean()));
        // a walk can return to the origin, so consecutive laws are not ordered
        assert!(h[2].counts[0] > 0);
        assert!(!stochastically_increasing(&h));
        let hc = emit_histograms(&rows, Functional::Checkerboard, &[0]).unwrap();
        assert_eq!(hc[0].counts.iter().position(|&c| c > 0), hc[0].counts.iter().rposition(|&c| c > 0));
        let curve = emit_decay_from_dataset(&rows, Functional::Origin, 20, 3).unwrap();
        assert_eq!(curve.points().iter().map(|p| p.n).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let n_only: Vec<DatasetRow> = rows.iter().filter(|r| r.n != INF_STEP).copied().collect();
        assert!(emit_decay_from_dataset(&n_only, Functional::Origin, 20, 3).is_err());
    }

    #[test]
    fn rows_parse_back() {
        let text = "n,sample_index,d_o,d_c\n-1,0,11,9\n3,1,-1,4\n";
        let rows = parse_rows(text, &[Functional::Origin, Functional::Checkerboard]).unwrap();
        assert_eq!(rows[0].n, INF_STEP);
        assert!(rows[1].is_sentinel(Functional::Origin));
        assert!(parse_rows("n,sample_index,d_o\n1,2,21\n", &[Functional::Origin]).is_err());
        assert!(parse_rows("n,sample_index\n", &[Functional::Origin]).is_err());
    }
}
