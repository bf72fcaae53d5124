//! Distributions on the distance support, total-variation distance,
//! bootstrap uncertainty and mixing-time thresholds.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::walk::RngStream;

/// Distances 0..=20: God's number in the 18-move metric is 20.
pub const SUPPORT: usize = 21;

/// The thresholds reported by [`threshold_report`].
pub const EPSILONS: [f64; 6] = [0.5, 0.4, 0.3, 0.25, 0.2, 0.1];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("no samples")]
    Empty,
    #[error("sample {index} has value {value}, outside 0..=20")]
    OutOfRange { index: usize, value: i64 },
    #[error("need at least 2 bootstrap resamples, got {0}")]
    TooFewResamples(usize),
    #[error("decay curve steps must increase strictly ({prev} then {next})")]
    StepOrder { prev: i64, next: i64 },
    #[error("tv value {0} outside [0, 1]")]
    TvRange(f64),
    #[error("malformed csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    counts: [u64; SUPPORT],
    total: u64,
}

impl EmpiricalDistribution {
    pub fn from_counts(counts: [u64; SUPPORT]) -> Result<Self, StatsError> {
        let total = counts.iter().sum();
        if total == 0 {
            return Err(StatsError::Empty);
        }
        Ok(EmpiricalDistribution { counts, total })
    }

    pub fn counts(&self) -> &[u64; SUPPORT] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn probabilities(&self) -> [f64; SUPPORT] {
        let t = self.total as f64;
        self.counts.map(|c| c as f64 / t)
    }

    /// Draws `total` values with replacement from the sample itself.
    fn resample<R: Rng>(&self, rng: &mut R) -> [u64; SUPPORT] {
        let mut cumulative = [0u64; SUPPORT];
        let mut acc = 0;
        for (c, &k) in cumulative.iter_mut().zip(&self.counts) {
            acc += k;
            *c = acc;
        }
        let mut out = [0u64; SUPPORT];
        for _ in 0..self.total {
            let u = rng.random_range(0..self.total);
            let bin = cumulative.partition_point(|&c| c <= u);
            out[bin] += 1;
        }
        out
    }
}

/// Counts distance samples. Negative values and values above 20 are rejected.
pub fn empirical<T: Copy + Into<i64>>(samples: &[T]) -> Result<EmpiricalDistribution, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut counts = [0u64; SUPPORT];
    for (index, &s) in samples.iter().enumerate() {
        let value: i64 = s.into();
        if !(0..SUPPORT as i64).contains(&value) {
            return Err(StatsError::OutOfRange { index, value });
        }
        counts[value as usize] += 1;
    }
    EmpiricalDistribution::from_counts(counts)
}

/// Half the L1 distance. Shorter vectors are padded with zeros.
pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|i| (get(p, i) - get(q, i)).abs()).sum::<f64>()
}

pub fn tv_empirical(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    tv(&a.probabilities(), &b.probabilities())
}

/// A bootstrap estimate of the TV distance between two sampled laws. The
/// spread is reported both ways: `stderr` is the replicate standard
/// deviation and `ci_low..ci_high` the 2.5/97.5 percentile interval.
#[derive(Clone, Debug, PartialEq)]
pub struct TvEstimate {
    pub point: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub resamples: usize,
}

pub fn bootstrap_tv(samples_a: &[u8], samples_b: &[u8], resamples: usize, rng: &RngStream) -> Result<TvEstimate, StatsError> {
    bootstrap_tv_counts(&empirical(samples_a)?, &empirical(samples_b)?, resamples, rng)
}

/// Bootstrap on count vectors: each replicate resamples both sides at their
/// own sizes. Replicate `r` draws from `rng.derive(r)`, so the result does
/// not depend on the number of worker threads.
pub fn bootstrap_tv_counts(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    resamples: usize,
    rng: &RngStream,
) -> Result<TvEstimate, StatsError> {
    if resamples < 2 {
        return Err(StatsError::TooFewResamples(resamples));
    }
    let point = tv_empirical(a, b);
    let mut reps: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rr = rng.derive(r as u64);
            let ra = EmpiricalDistribution::from_counts(a.resample(&mut rr)).expect("non-empty");
            let rb = EmpiricalDistribution::from_counts(b.resample(&mut rr)).expect("non-empty");
            tv_empirical(&ra, &rb)
        })
        .collect();
    let mean = reps.iter().sum::<f64>() / resamples as f64;
    let var = reps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    reps.sort_by(f64::total_cmp);
    // Plug-in TV is biased upwards, so the percentile interval can sit
    // entirely above the point estimate; it is widened to contain it.
    let ci_low = percentile(&reps, 0.025).min(point);
    let ci_high = percentile(&reps, 0.975).max(point);
    Ok(TvEstimate {
        point,
        stderr: var.sqrt(),
        ci_low,
        ci_high,
        resamples,
    })
}

/// Linear interpolation between order statistics of a sorted slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveSource {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayPoint {
    pub n: i64,
    pub tv: f64,
    pub stderr: Option<f64>,
}

/// TV against the stationary law as a function of the step count. Values are
/// kept as computed: the curve need not be monotone.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    points: Vec<DecayPoint>,
    pub source: CurveSource,
}

impl DecayCurve {
    pub fn new(source: CurveSource) -> Self {
        DecayCurve { points: Vec::new(), source }
    }

    pub fn push(&mut self, n: i64, tv: f64, stderr: Option<f64>) -> Result<(), StatsError> {
        if let Some(last) = self.points.last() {
            if n <= last.n {
                return Err(StatsError::StepOrder { prev: last.n, next: n });
            }
        }
        // tolerate rounding just outside the unit interval
        if !(-1e-12..=1.0 + 1e-12).contains(&tv) || tv.is_nan() {
            return Err(StatsError::TvRange(tv));
        }
        self.points.push(DecayPoint { n, tv, stderr });
        Ok(())
    }

    pub fn from_points(source: CurveSource, pts: impl IntoIterator<Item = (i64, f64, Option<f64>)>) -> Result<Self, StatsError> {
        let mut c = DecayCurve::new(source);
        for (n, tv, se) in pts {
            c.push(n, tv, se)?;
        }
        Ok(c)
    }

    pub fn points(&self) -> &[DecayPoint] {
        &self.points
    }

    pub fn tv_at(&self, n: i64) -> Option<f64> {
        self.points.iter().find(|p| p.n == n).map(|p| p.tv)
    }

    /// CSV with header `n,tv,stderr`; `stderr` is empty for exact curves.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,tv,stderr\n");
        for p in &self.points {
            let se = p.stderr.map(format_sig9).unwrap_or_default();
            let _ = writeln!(s, "{},{},{}", p.n, format_sig9(p.tv), se);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, StatsError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "n,tv,stderr" => {}
            _ => {
                return Err(StatsError::Csv {
                    line: 1,
                    reason: "expected header n,tv,stderr".into(),
                })
            }
        }
        let mut source = CurveSource::Exact;
        let mut pts = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: &str| StatsError::Csv {
                line: i + 1,
                reason: reason.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad("expected 3 fields"));
            }
            let n = f[0].trim().parse::<i64>().map_err(|_| bad("bad n"))?;
            let tv = f[1].trim().parse::<f64>().map_err(|_| bad("bad tv"))?;
            let se = match f[2].trim() {
                "" => None,
                v => {
                    source = CurveSource::MonteCarlo;
                    Some(v.parse::<f64>().map_err(|_| bad("bad stderr"))?)
                }
            };
            pts.push((n, tv, se));
        }
        DecayCurve::from_points(source, pts)
    }
}

/// Nine significant digits; plain decimal for moderate magnitudes.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..9).contains(&e) {
        format!("{:.*}", (8 - e).max(0) as usize, x)
    } else {
        format!("{x:.8e}")
    }
}

/// First step whose TV is at most `epsilon`, even if the curve rises later.
pub fn mixing_threshold(curve: &DecayCurve, epsilon: f64) -> Option<i64> {
    curve.points.iter().find(|p| p.n >= 0 && p.tv <= epsilon).map(|p| p.n)
}

/// `(epsilon, first crossing)` for each of [`EPSILONS`].
pub fn threshold_report(curve: &DecayCurve) -> Vec<(f64, Option<i64>)> {
    EPSILONS.iter().map(|&e| (e, mixing_threshold(curve, e))).collect()
}

/// CSV with header `epsilon,n`; `n` is empty when the threshold is not reached.
pub fn threshold_csv(report: &[(f64, Option<i64>)]) -> String {
    let mut s = String::from("epsilon,n\n");
    for (e, n) in report {
        let _ = writeln!(s, "{},{}", e, n.map(|v| v.to_string()).unwrap_or_default());
    }
    s
}
