use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::stats::{self, bootstrap_tv_counts, format_sig9, CurveSource, DecayCurve, EmpiricalDistribution, SUPPORT};
use crate::walk::RngStream;

use super::eval::DatasetRow;
use super::manifest::{Functional, INF_STEP};

/// Stream id reserved for bootstrap draws; step `n` uses `derive(n)` of it.
pub const BOOTSTRAP_STREAM: u64 = 0xB007_0000_0000_0000;

/// Counts of one functional per step, skipping sentinel rows.
pub fn counts_by_step(rows: &[DatasetRow], f: Functional) -> Result<BTreeMap<i64, [u64; SUPPORT]>> {
    let mut out: BTreeMap<i64, [u64; SUPPORT]> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let Some(d) = r.get(f) else {
            return Err(Error::Invalid(format!("row {i} has no {f} column")));
        };
        if d < 0 {
            continue;
        }
        out.entry(r.n).or_insert([0; SUPPORT])[d as usize] += 1;
    }
    Ok(out)
}

/// Bootstrap TV of each step's rows against `stationary` rows. Steps are
/// emitted in increasing order with values as estimated; nothing is smoothed
/// or made monotone.
pub fn emit_decay(
    rows: &[DatasetRow],
    stationary: &[DatasetRow],
    f: Functional,
    resamples: usize,
    seed: u64,
) -> Result<DecayCurve> {
    let stat_counts = counts_by_step(stationary, f)?.into_values().fold([0u64; SUPPORT], |mut acc, c| {
        for (a, x) in acc.iter_mut().zip(c) {
            *a += x;
        }
        acc
    });
    let stat = EmpiricalDistribution::from_counts(stat_counts)?;
    let base = RngStream::new(seed, BOOTSTRAP_STREAM);
    let mut curve = DecayCurve::new(CurveSource::MonteCarlo);
    for (n, counts) in counts_by_step(rows, f)? {
        if n == INF_STEP {
            continue;
        }
        let e = EmpiricalDistribution::from_counts(counts)?;
        let est = bootstrap_tv_counts(&e, &stat, resamples, &base.derive(n as u64))?;
        curve.push(n, est.point, Some(est.stderr))?;
    }
    Ok(curve)
}

/// [`emit_decay`] with the stationary rows taken from the same row set.
pub fn emit_decay_from_dataset(rows: &[DatasetRow], f: Functional, resamples: usize, seed: u64) -> Result<DecayCurve> {
    let (stationary, walked): (Vec<DatasetRow>, Vec<DatasetRow>) = rows.iter().partition(|r| r.n == INF_STEP);
    if stationary.is_empty() {
        return Err(Error::Invalid("dataset has no stationary (inf) rows".into()));
    }
    emit_decay(&walked, &stationary, f, resamples, seed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub n: i64,
    pub counts: [u64; SUPPORT],
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probabilities(&self) -> [f64; SUPPORT] {
        let t = self.total().max(1) as f64;
        self.counts.map(|c| c as f64 / t)
    }

    /// CSV with header `distance,count,probability`, one line per distance 0..=20.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("distance,count,probability\n");
        for (d, (c, p)) in self.counts.iter().zip(self.probabilities()).enumerate() {
            let _ = writeln!(s, "{d},{c},{}", format_sig9(p));
        }
        s
    }

    pub fn mean(&self) -> f64 {
        let t = self.total() as f64;
        self.counts.iter().enumerate().map(|(d, &c)| d as f64 * c as f64).sum::<f64>() / t
    }
}

/// Histograms of one functional at each of `steps` (all steps if empty).
pub fn emit_histograms(rows: &[DatasetRow], f: Functional, steps: &[i64]) -> Result<Vec<Histogram>> {
    let by_step = counts_by_step(rows, f)?;
    let wanted: Vec<i64> = if steps.is_empty() { by_step.keys().copied().collect() } else { steps.to_vec() };
    wanted
        .into_iter()
        .map(|n| {
            by_step
                .get(&n)
                .map(|&counts| Histogram { n, counts })
                .ok_or_else(|| Error::Invalid(format!("no {f} rows at step {n}")))
        })
        .collect()
}

/// Whether each histogram's CDF lies on or below the previous one.
pub fn stochastically_increasing(hists: &[Histogram]) -> bool {
    let cdf = |h: &Histogram| {
        let p = h.probabilities();
        let mut acc = 0.0;
        p.map(|x| {
            acc += x;
            acc
        })
    };
    hists.windows(2).all(|w| {
        let (a, b) = (cdf(&w[0]), cdf(&w[1]));
        a.iter().zip(&b).all(|(x, y)| *y <= *x + 1e-12)
    })
}

/// TV between a histogram and a reference law on the same support.
pub fn tv_to(h: &Histogram, law: &[f64]) -> f64 {
    stats::tv(&h.probabilities(), law)
}
