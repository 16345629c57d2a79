//! Replication harness.
//!
//! Replication `i` of a run with master seed `s` always draws from stream
//! `(s, i)`, results are kept in index order and the statistics are folded
//! over fixed chunks, so a summary does not depend on the number of worker
//! threads.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::crg::sample_crg;
use crate::error::{domain, Error, Result};
use crate::explore::explore_jam;
use crate::params::Params;
use crate::rgg::sample_rgg;
use crate::rng::RngStream;
use crate::rsa::{greedy_jam, JamResult};

/// What one replication runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModelSpec {
    /// Sample RGG(c, d), then greedy jam.
    RggGreedy(Params),
    /// Sample CRG(c, alpha), then greedy jam.
    CrgGreedy(Params),
    /// The exploration chain for CRG(c, alpha).
    Explore(Params),
}

impl ModelSpec {
    pub fn params(&self) -> &Params {
        match self {
            Self::RggGreedy(p) | Self::CrgGreedy(p) | Self::Explore(p) => p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RggGreedy(_) => "rgg",
            Self::CrgGreedy(_) => "crg",
            Self::Explore(_) => "explore",
        }
    }

    pub fn run_once(&self, rng: &mut RngStream) -> Result<JamResult> {
        match self {
            Self::RggGreedy(p) => Ok(greedy_jam(&sample_rgg(p, rng)?, rng)),
            Self::CrgGreedy(p) => Ok(greedy_jam(&sample_crg(p, rng)?, rng)),
            Self::Explore(p) => explore_jam(p, rng),
        }
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Replication {
    pub rep_index: u64,
    pub jam_count: usize,
    pub jam_fraction: f64,
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two partial accumulators (Chan et al.).
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Self {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    /// Unbiased sample variance; 0 with fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }
}

const FOLD_CHUNK: usize = 64;

/// Welford over fixed chunks of 64 values, merged as a balanced binary tree.
pub fn fold_statistics(values: &[f64]) -> Welford {
    let mut level: Vec<Welford> = values
        .chunks(FOLD_CHUNK)
        .map(|chunk| {
            let mut w = Welford::default();
            chunk.iter().for_each(|&x| w.push(x));
            w
        })
        .collect();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| {
                if pair.len() == 2 {
                    pair[0].merge(&pair[1])
                } else {
                    pair[0]
                }
            })
            .collect();
    }
    level.pop().unwrap_or_default()
}

/// Histogram bin rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Binning {
    /// Width `2 IQR / reps^{1/3}`.
    #[default]
    FreedmanDiaconis,
    /// A fixed number of equal-width bins.
    Count(usize),
}

const MAX_BINS: usize = 10_000;

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-width histogram over `[min, max]`; returns `(edges, counts)` with
/// `edges.len() == counts.len() + 1`. The last bin is closed on the right.
pub fn histogram(values: &[f64], binning: Binning) -> (Vec<f64>, Vec<u64>) {
    if values.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return (vec![lo, hi], vec![values.len() as u64]);
    }
    let bins = match binning {
        Binning::Count(k) => k.max(1),
        Binning::FreedmanDiaconis => {
            let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
            let width = 2.0 * iqr / (values.len() as f64).cbrt();
            if width > 0.0 {
                (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS)
            } else {
                1
            }
        }
    };
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
    edges.push(hi);
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    (edges, counts)
}

/// Replication-level statistics of the jam fraction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub reps: u64,
    pub mean: f64,
    pub var: f64,
    /// `n * var`.
    pub scaled_var: f64,
    pub stderr: f64,
    /// Histogram bin edges.
    pub bins: Vec<f64>,
    pub counts: Vec<u64>,
    /// Graph size of every replication.
    #[serde(skip)]
    pub n: usize,
    #[serde(skip)]
    pub replications: Vec<Replication>,
}

impl McSummary {
    pub fn from_replications(n: usize, replications: Vec<Replication>, binning: Binning) -> Result<Self> {
        if replications.is_empty() {
            return Err(domain("a summary needs at least one replication"));
        }
        let values: Vec<f64> = replications.iter().map(|r| r.jam_fraction).collect();
        let stats = fold_statistics(&values);
        let (bins, counts) = histogram(&values, binning);
        let var = stats.variance();
        Ok(Self {
            reps: stats.count,
            mean: stats.mean,
            var,
            scaled_var: n as f64 * var,
            stderr: (var / stats.count as f64).sqrt(),
            bins,
            counts,
            n,
            replications,
        })
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.replications.iter().map(|r| r.jam_fraction)
    }
}

/// Worker count used when `parallelism` is 0.
pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs `reps` independent replications of `spec`.
///
/// `parallelism` is the number of worker threads, 0 meaning all available
/// cores. The result is identical for every value of `parallelism`.
pub fn run_replications(spec: &ModelSpec, reps: u64, master_seed: u64, parallelism: usize) -> Result<McSummary> {
    run_replications_binned(spec, reps, master_seed, parallelism, Binning::default())
}

/// As [`run_replications`] with an explicit histogram rule.
pub fn run_replications_binned(
    spec: &ModelSpec,
    reps: u64,
    master_seed: u64,
    parallelism: usize,
    binning: Binning,
) -> Result<McSummary> {
    if reps == 0 {
        return Err(domain("reps must be at least 1"));
    }
    let threads = if parallelism == 0 {
        default_parallelism()
    } else {
        parallelism
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    let replications = pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngStream::new(master_seed, i);
                spec.run_once(&mut rng).map(|jam| Replication {
                    rep_index: i,
                    jam_count: jam.jam_count,
                    jam_fraction: jam.jam_fraction,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    McSummary::from_replications(spec.params().n, replications, binning)
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Comparison of a summary with the Gaussian limit `N(J*, V*/n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    /// `sqrt(n) (mean - J*)` in units of its predicted standard error
    /// `sqrt(V* / reps)`; `None` when `V* = 0`.
    pub z_score: Option<f64>,
    /// `scaled_var / V*`; `None` when `V* = 0`.
    pub variance_ratio: Option<f64>,
    /// Kolmogorov-Smirnov distance of the standardized sample from N(0, 1);
    /// `None` when `V* = 0`.
    pub ks_statistic: Option<f64>,
    /// 1% critical value `1.628 / sqrt(reps)`.
    pub ks_critical_1pct: f64,
    /// Every observation is identical.
    pub zero_variance: bool,
    /// `V* / J*`, informational.
    pub variance_to_mean: f64,
}

/// Tests a summary against the CLT prediction.
///
/// Observations are standardized as `(x - mean) / sqrt(V*/n)`. Jam fractions
/// live on the lattice `k / n`, which is coarse on the standardized scale
/// (spacing `h = 1/sqrt(n V*)`), so each atom is compared with the normal mass
/// of its cell `[z - h/2, z + h/2]`: the KS distance is taken between the
/// empirical CDF just below and at each atom and `Phi(z - h/2)`,
/// `Phi(z + h/2)` respectively.
pub fn clt_check(summary: &McSummary, params: &Params, jstar: f64, vstar: f64) -> CltReport {
    let n = params.n as f64;
    let reps = summary.reps as f64;
    let zero_variance = summary.var == 0.0;
    let ks_critical_1pct = 1.628 / reps.sqrt();
    let variance_to_mean = if jstar > 0.0 { vstar / jstar } else { 0.0 };
    if !(vstar > 0.0) {
        return CltReport {
            z_score: None,
            variance_ratio: None,
            ks_statistic: None,
            ks_critical_1pct,
            zero_variance,
            variance_to_mean,
        };
    }
    let z_score = (summary.mean - jstar) * (n * reps / vstar).sqrt();
    let scale = (vstar / n).sqrt();
    let half_cell = 0.5 / (n * vstar).sqrt();
    let mut z: Vec<f64> = summary.values().map(|x| (x - summary.mean) / scale).collect();
    z.sort_by(f64::total_cmp);
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < z.len() {
        let mut j = i;
        while j < z.len() && z[j] == z[i] {
            j += 1;
        }
        let below = i as f64 / reps;
        let at = j as f64 / reps;
        ks = ks.max((below - normal_cdf(z[i] - half_cell)).abs());
        ks = ks.max((at - normal_cdf(z[i] + half_cell)).abs());
        i = j;
    }
    CltReport {
        z_score: Some(z_score),
        variance_ratio: Some(summary.scaled_var / vstar),
        ks_statistic: Some(ks),
        ks_critical_1pct,
        zero_variance,
        variance_to_mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.013 + 5.0).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let w = fold_statistics(&xs);
        assert_eq!(w.count, 1000);
        assert!((w.mean - mean).abs() < 1e-12);
        assert!((w.variance() - var).abs() < 1e-12);
        let mut seq = Welford::default();
        xs.iter().for_each(|&x| seq.push(x));
        assert!((seq.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn histogram_counts_everything() {
        let xs: Vec<f64> = (0..500).map(|i| (i as f64).sin()).collect();
        let (edges, counts) = histogram(&xs, Binning::FreedmanDiaconis);
        assert_eq!(edges.len(), counts.len() + 1);
        assert_eq!(counts.iter().sum::<u64>(), 500);
        let (edges, counts) = histogram(&xs, Binning::Count(7));
        assert_eq!((edges.len(), counts.len()), (8, 7));
        assert_eq!(counts.iter().sum::<u64>(), 500);
        assert_eq!(histogram(&[2.0, 2.0], Binning::default()), (vec![2.0, 2.0], vec![2]));
    }

    #[test]
    fn single_replication() {
        let p = Params::new(100, 3.0, 0.5, 1).unwrap();
        let s = run_replications(&ModelSpec::Explore(p), 1, 9, 1).unwrap();
        assert_eq!(s.reps, 1);
        assert_eq!(s.var, 0.0);
        assert_eq!(s.mean, s.replications[0].jam_fraction);
        assert!(run_replications(&ModelSpec::Explore(p), 0, 9, 1).is_err());
    }

    #[test]
    fn independent_of_parallelism() {
        let p = Params::new(300, 5.0, 0.4, 2).unwrap();
        for spec in [ModelSpec::RggGreedy(p), ModelSpec::CrgGreedy(p), ModelSpec::Explore(p)] {
            let base = run_replications(&spec, 97, 42, 1).unwrap();
            let text = serde_json::to_string(&base).unwrap();
            for jobs in [4, 8] {
                let other = run_replications(&spec, 97, 42, jobs).unwrap();
                assert_eq!(other, base);
                assert_eq!(serde_json::to_string(&other).unwrap(), text);
            }
        }
    }

    #[test]
    fn zero_density_is_degenerate() {
        let p = Params::new(50, 0.0, 0.5, 1).unwrap();
        let s = run_replications(&ModelSpec::Explore(p), 20, 1, 2).unwrap();
        assert!(s.values().all(|x| x == 1.0));
        let report = clt_check(&s, &p, 1.0, 0.0);
        assert!(report.zero_variance);
        assert_eq!(report.z_score, None);
    }

    #[test]
    fn normal_cdf_reference() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.96) - 0.9750021048517795).abs() < 1e-11);
        assert!((normal_cdf(-3.0) - 0.0013498980316301).abs() < 1e-12);
    }
}
