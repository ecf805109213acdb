//! Monte-Carlo mixing diagnostics for sizes beyond enumeration.
//!
//! The law of a statistic `S(X)` is compared with its law under the
//! stationary distribution. TV between pushforwards never exceeds TV between
//! the original laws, so these curves are lower bounds up to sampling error.
//! The plug-in estimate is biased upward by sampling noise; the noise floor
//! measures that bias on two independent stationary half-samples.

use rand::Rng;
use rayon::prelude::*;

use crate::chain::{step_in_place, ProjectionState};
use crate::error::{Error, Result};
use crate::exact::{DistVector, GroupTable};
use crate::gf2::{sample_uniform_invertible, BitMatrix};
use crate::seeding;

const BATCH: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// Number of ones.
    Weight,
    /// Number of ones on the diagonal.
    Trace,
    /// Rank of the leading `ceil(n/2) x ceil(n/2)` block.
    LeadingRank,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Weight => "weight",
            Statistic::Trace => "trace",
            Statistic::LeadingRank => "leading_rank",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Statistic::Weight, Statistic::Trace, Statistic::LeadingRank]
            .into_iter()
            .find(|k| k.name() == s)
    }

    pub fn eval(self, x: &BitMatrix) -> usize {
        match self {
            Statistic::Weight => x.weight() as usize,
            Statistic::Trace => x.trace() as usize,
            Statistic::LeadingRank => x.leading_rank(x.n().div_ceil(2)),
        }
    }

    /// Largest value the statistic can take for dimension `n`.
    pub fn max_value(self, n: usize) -> usize {
        match self {
            Statistic::Weight => n * n,
            Statistic::Trace => n,
            Statistic::LeadingRank => n.div_ceil(2),
        }
    }
}

/// Integer histogram of a statistic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(max_value: usize) -> Self {
        Self {
            counts: vec![0; max_value + 1],
        }
    }

    pub fn add(&mut self, value: usize) {
        self.counts[value] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Half the l1 distance between the two normalized histograms.
    pub fn tv(&self, other: &Histogram) -> f64 {
        let (na, nb) = (self.total() as f64, other.total() as f64);
        let sum: f64 = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| (a as f64 / na - b as f64 / nb).abs())
            .sum();
        (0.5 * sum).min(1.0)
    }
}

/// A statistic-based TV estimate against the stationary law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TvEstimate {
    pub estimate: f64,
    /// Plug-in TV between two independent stationary half-samples.
    pub noise_floor: f64,
    pub chain_samples: u64,
    pub stationary_samples: u64,
}

/// Plug-in TV between the two halves of a stationary sample.
pub fn noise_floor(samples: &[usize], max_value: usize) -> f64 {
    let mid = samples.len() / 2;
    let (mut a, mut b) = (Histogram::new(max_value), Histogram::new(max_value));
    samples[..mid].iter().for_each(|&v| a.add(v));
    samples[mid..].iter().for_each(|&v| b.add(v));
    a.tv(&b)
}

fn histogram_of(samples: &[usize], max_value: usize) -> Histogram {
    let mut h = Histogram::new(max_value);
    samples.iter().for_each(|&v| h.add(v));
    h
}

/// Statistic values of `count` exact-uniform invertible matrices. Sample `i`
/// draws from its own stream, so results do not depend on batching.
pub fn stationary_statistic(
    n: usize,
    statistic: Statistic,
    count: u64,
    seed: u64,
) -> Result<Vec<usize>> {
    let batches = count.div_ceil(BATCH);
    let parts: Vec<Vec<usize>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            (b * BATCH..((b + 1) * BATCH).min(count))
                .map(|i| {
                    let mut rng = seeding::stream_rng(seed, seeding::STATIONARY, i);
                    sample_uniform_invertible(n, &mut rng).map(|x| statistic.eval(&x))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

/// Statistic values after `t` steps of `count` independent walks from `I_n`.
pub fn chain_statistic(
    n: usize,
    t: u64,
    statistic: Statistic,
    count: u64,
    seed: u64,
    lazy: bool,
) -> Vec<usize> {
    let batches = count.div_ceil(BATCH);
    let parts: Vec<Vec<usize>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            (b * BATCH..((b + 1) * BATCH).min(count))
                .map(|i| {
                    let mut rng = seeding::stream_rng(seed, seeding::MONTE_CARLO, i);
                    let mut x = BitMatrix::identity(n);
                    for _ in 0..t {
                        step_in_place(&mut x, lazy, &mut rng);
                    }
                    statistic.eval(&x)
                })
                .collect()
        })
        .collect();
    parts.concat()
}

/// Plug-in TV between the statistic at time `t` and under the uniform law.
pub fn statistic_tv(
    n: usize,
    t: u64,
    statistic: Statistic,
    trials: u64,
    seed: u64,
    lazy: bool,
) -> Result<TvEstimate> {
    if trials < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 trials, got {trials}"
        )));
    }
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    let max = statistic.max_value(n);
    let chain = histogram_of(&chain_statistic(n, t, statistic, trials, seed, lazy), max);
    let stationary = stationary_statistic(n, statistic, trials, seed)?;
    Ok(TvEstimate {
        estimate: chain.tv(&histogram_of(&stationary, max)),
        noise_floor: noise_floor(&stationary, max),
        chain_samples: trials,
        stationary_samples: trials,
    })
}

/// Exact TV between the pushforwards of `d` and of the uniform law.
pub fn exact_statistic_tv(d: &DistVector, gt: &GroupTable, statistic: Statistic) -> f64 {
    let max = statistic.max_value(gt.n());
    let mut chain = vec![0.0; max + 1];
    let mut uniform = vec![0.0; max + 1];
    let pi = gt.pi();
    for (idx, &p) in d.probs.iter().enumerate() {
        let v = statistic.eval(&gt.matrix(idx));
        chain[v] += p;
        uniform[v] += pi;
    }
    0.5 * chain
        .iter()
        .zip(&uniform)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Below this the single-column chain is too small to show a transition.
pub const CUTOFF_MIN_N: usize = 16;

/// One point of a cutoff curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffPoint {
    pub t: u64,
    pub t_over_nlogn: f64,
    pub tv: TvEstimate,
}

/// `n ln n`.
pub fn n_log_n(n: usize) -> f64 {
    n as f64 * (n as f64).ln()
}

/// `count` evenly spaced times from `lo * n ln n` to `hi * n ln n`, rounded.
pub fn scaled_grid(n: usize, lo: f64, hi: f64, count: usize) -> Vec<u64> {
    let scale = n_log_n(n);
    let mut grid: Vec<u64> = (0..count)
        .map(|k| {
            let frac = if count == 1 {
                0.0
            } else {
                k as f64 / (count - 1) as f64
            };
            ((lo + (hi - lo) * frac) * scale).round() as u64
        })
        .collect();
    grid.dedup();
    grid
}

/// Weight of the first column under the single-column projection, sampled
/// at every time in `grid`, compared with the weight of a uniform nonzero
/// vector. Each trial walks once through the sorted grid on its own stream,
/// so the value at a time does not depend on the rest of the grid.
pub fn cutoff_experiment(
    n: usize,
    grid: &[u64],
    trials: u64,
    seed: u64,
) -> Result<Vec<CutoffPoint>> {
    if n < CUTOFF_MIN_N {
        return Err(Error::TooSmall(n));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least 2 trials".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("time grid must be sorted".into()));
    }
    let batches = trials.div_ceil(BATCH);
    let per_batch: Vec<Vec<Histogram>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut hists = vec![Histogram::new(n); grid.len()];
            for i in b * BATCH..((b + 1) * BATCH).min(trials) {
                let mut rng = seeding::stream_rng(seed, seeding::MONTE_CARLO, i);
                let mut s = ProjectionState::identity(n, 1).expect("k = 1 <= n");
                let mut now = 0u64;
                for (g, &t) in grid.iter().enumerate() {
                    while now < t {
                        s.step(&mut rng).expect("n >= 2");
                        now += 1;
                    }
                    hists[g].add(s.weight() as usize);
                }
            }
            hists
        })
        .collect();
    let mut chain = vec![Histogram::new(n); grid.len()];
    for hists in &per_batch {
        for (acc, h) in chain.iter_mut().zip(hists) {
            acc.merge(h);
        }
    }

    let stationary = nonzero_vector_weights(n, trials, seed);
    let reference = histogram_of(&stationary, n);
    let noise_floor = noise_floor(&stationary, n);
    let scale = n_log_n(n);
    Ok(grid
        .iter()
        .zip(&chain)
        .map(|(&t, h)| CutoffPoint {
            t,
            t_over_nlogn: t as f64 / scale,
            tv: TvEstimate {
                estimate: h.tv(&reference),
                noise_floor,
                chain_samples: trials,
                stationary_samples: trials,
            },
        })
        .collect())
}

/// Weights of uniform nonzero vectors in `{0,1}^n`, i.e. `Binomial(n, 1/2)`
/// conditioned to be at least 1.
pub fn nonzero_vector_weights(n: usize, count: u64, seed: u64) -> Vec<usize> {
    let batches = count.div_ceil(BATCH);
    let words = n.div_ceil(64);
    let parts: Vec<Vec<usize>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            (b * BATCH..((b + 1) * BATCH).min(count))
                .map(|i| {
                    let mut rng = seeding::stream_rng(seed, seeding::STATIONARY, i);
                    loop {
                        let w: u32 = (0..words)
                            .map(|k| {
                                let bits = if k + 1 == words && n % 64 != 0 {
                                    n % 64
                                } else {
                                    64
                                };
                                let word: u64 = rng.gen();
                                let mask = if bits == 64 {
                                    u64::MAX
                                } else {
                                    (1 << bits) - 1
                                };
                                (word & mask).count_ones()
                            })
                            .sum();
                        if w > 0 {
                            break w as usize;
                        }
                    }
                })
                .collect()
        })
        .collect();
    parts.concat()
}

/// Running minimum, so the curve is non-increasing.
pub fn monotone_regularize(curve: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut low = f64::INFINITY;
    curve
        .iter()
        .map(|&(x, y)| {
            low = low.min(y);
            (x, low)
        })
        .collect()
}

/// Where the regularized curve first crosses `level`, by linear interpolation.
pub fn crossover_locator(curve: &[(f64, f64)], level: f64) -> Result<f64> {
    let reg = monotone_regularize(curve);
    for w in reg.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 > level && y1 <= level {
            return Ok(x0 + (y0 - level) / (y0 - y1) * (x1 - x0));
        }
    }
    match reg.first() {
        Some(&(x, y)) if y <= level => Ok(x),
        _ => Err(Error::NoBracket(level)),
    }
}

/// Sup distance between two curves on the union of their abscissae, each
/// linearly interpolated; only the overlap of their ranges counts.
pub fn sup_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    a.iter()
        .chain(b)
        .map(|p| p.0)
        .filter(|&x| x >= lo && x <= hi)
        .map(|x| (interpolate(a, x) - interpolate(b, x)).abs())
        .fold(0.0, f64::max)
}

fn interpolate(curve: &[(f64, f64)], x: f64) -> f64 {
    let k = curve.partition_point(|p| p.0 < x);
    if k == 0 {
        return curve[0].1;
    }
    if k == curve.len() {
        return curve[k - 1].1;
    }
    let ((x0, y0), (x1, y1)) = (curve[k - 1], curve[k]);
    if x1 == x0 {
        y1
    } else {
        y0 + (x - x0) / (x1 - x0) * (y1 - y0)
    }
}
