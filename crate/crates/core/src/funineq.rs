//! Entropy, variance and Dirichlet forms on the enumerated group, and
//! numerical checks of the inequality chain that bounds the log-Sobolev
//! constant of the walk by `O(n^2)`.
//!
//! The chain of inequalities, for `f` on the group `G` and its extension `g`
//! to all `n x n` matrices (equal to `f` on `G`, to `E_pi[f]` elsewhere):
//!
//! 1. `ent_pi(f^2) <= (2^{n^2} / |G|) ent_mu(g^2)` (extension step)
//! 2. `ent_mu(g^2) <= sum_i E_mu[ent_mu(g^2 | rows other than i)]` (sub-additivity)
//! 3. each conditional entropy is bounded by the hypercube log-Sobolev
//!    inequality in the coordinates of row `i` in a completed basis
//! 4. summing the three cases of the row move gives
//!    `ent_pi(f^2) <= n(n-1) E_P(f,f) + n var_pi(f)`
//! 5. `var_pi(f) <= 4 (31 sqrt(n) + 700)^2 E_P(f,f)`
//!
//! Convention: `0 log 0 = 0`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{kahan_sum, GroupTable, SpectralReport, TransitionStructure};
use crate::gf2::{self, key_rank};
use crate::seeding;

/// Relative tolerance for every inequality check.
pub const TOLERANCE: f64 = 1e-9;

/// A real function on the group, aligned with [`GroupTable`] indices.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOnGroup(Vec<f64>);

impl FunctionOnGroup {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value at index {i}"
            )));
        }
        Ok(Self(values))
    }

    pub fn constant(len: usize, c: f64) -> Self {
        Self(vec![c; len])
    }

    /// `1` at `idx`, `0` elsewhere.
    pub fn indicator(len: usize, idx: usize) -> Self {
        let mut v = vec![0.0; len];
        v[idx] = 1.0;
        Self(v)
    }

    pub fn gaussian<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.sample(StandardNormal)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|v| c * v).collect())
    }
}

/// Outcome of one inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            lhs,
            rhs,
            slack,
            satisfied: slack >= -TOLERANCE * rhs.abs().max(1.0),
        }
    }

    /// `lhs == rhs` within tolerance.
    pub fn equality(lhs: f64, rhs: f64) -> Self {
        Self {
            satisfied: (rhs - lhs).abs() <= TOLERANCE * rhs.abs().max(1.0),
            ..Self::new(lhs, rhs)
        }
    }
}

fn x_log_x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `ent(h) = E[h log h] - E[h] log E[h]` under the uniform law on `h`'s entries.
pub fn entropy_uniform(h: &[f64]) -> f64 {
    let len = h.len() as f64;
    let mean = kahan_sum(h.iter().copied()) / len;
    let e = kahan_sum(h.iter().map(|&x| x_log_x(x))) / len - x_log_x(mean);
    e.max(0.0)
}

/// `ent_pi(f^2)` under the uniform law on the table.
pub fn entropy_sq(f: &FunctionOnGroup) -> f64 {
    let sq: Vec<f64> = f.values().iter().map(|v| v * v).collect();
    entropy_uniform(&sq)
}

pub fn mean(f: &FunctionOnGroup) -> f64 {
    kahan_sum(f.values().iter().copied()) / f.len() as f64
}

pub fn variance(f: &FunctionOnGroup) -> f64 {
    let m = mean(f);
    kahan_sum(f.values().iter().map(|v| (v - m) * (v - m))) / f.len() as f64
}

/// `E_P(f,f) = 1/2 sum_{x,y} pi(x) P(x,y) (f(x) - f(y))^2`.
pub fn dirichlet_form(f: &FunctionOnGroup, ts: &TransitionStructure) -> Result<f64> {
    check_len(f, ts.len())?;
    let v = f.values();
    let sum = kahan_sum((0..ts.len()).map(|x| {
        ts.neighbors(x)
            .iter()
            .map(|&y| (v[x] - v[y as usize]).powi(2))
            .sum::<f64>()
    }));
    Ok(0.5 * sum * ts.step_probability() / ts.len() as f64)
}

fn check_len(f: &FunctionOnGroup, len: usize) -> Result<()> {
    if f.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: f.len(),
        });
    }
    Ok(())
}

/// `ent_pi(f^2) <= n(n-1) E_P(f,f) + n var_pi(f)`.
pub fn check_key_inequality(f: &FunctionOnGroup, ts: &TransitionStructure) -> Result<BoundReport> {
    let n = ts.n() as f64;
    let e = dirichlet_form(f, ts)?;
    Ok(BoundReport::new(
        entropy_sq(f),
        n * (n - 1.0) * e + n * variance(f),
    ))
}

/// Largest `n` for which the extension to all `2^{n^2}` matrices is built;
/// `n = 4` (65 536 matrices) needs `extended = true`.
fn check_extension_size(n: usize, extended: bool) -> Result<()> {
    let cap = if extended { 4 } else { 3 };
    if n > cap {
        return Err(Error::GroupTooLarge { n, cap });
    }
    Ok(())
}

/// Values of the extension `g` on every key in `0..2^{n^2}`.
pub fn extension_values(f: &FunctionOnGroup, gt: &GroupTable) -> Result<Vec<f64>> {
    check_len(f, gt.len())?;
    let n = gt.n();
    let fill = mean(f);
    Ok((0..1u64 << (n * n))
        .map(|key| gt.index_of(key).map_or(fill, |i| f.values()[i]))
        .collect())
}

/// `ent_pi(f^2) <= (2^{n^2} / |G|) ent_mu(g^2)`.
pub fn check_extension_inequality(
    f: &FunctionOnGroup,
    gt: &GroupTable,
    extended: bool,
) -> Result<BoundReport> {
    check_extension_size(gt.n(), extended)?;
    let g = extension_values(f, gt)?;
    let g2: Vec<f64> = g.iter().map(|v| v * v).collect();
    let ratio = g.len() as f64 / gt.len() as f64;
    Ok(BoundReport::new(
        entropy_sq(f),
        ratio * entropy_uniform(&g2),
    ))
}

/// The intermediate steps between the extension and the key inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowDecompositionReport {
    /// `ent_mu(g^2) <= sum_i E_mu[ent_mu(g^2 | L_k, k != i)]`.
    pub subadditivity: BoundReport,
    /// Per conditioning, the hypercube inequality; reports the conditioning
    /// with the smallest relative slack.
    pub worst_hypercube_step: BoundReport,
    /// Conditionings whose other rows do not span `n - 1` dimensions carry
    /// zero entropy; reports the largest such entropy against 0.
    pub degenerate_conditionings: BoundReport,
    /// The summed hypercube bounds equal the three-case expression.
    pub case_identity: BoundReport,
    /// `ent_mu(g^2) <= 1/2 sum_i sum_{j != i} E_mu[1_G (f(X) - f(X^{i<-j}))^2]
    ///  + sum_i E_mu[1_G (f(X) - E_pi f)^2]`.
    pub consolidated: BoundReport,
}

impl RowDecompositionReport {
    pub fn all_satisfied(&self) -> bool {
        [
            self.subadditivity,
            self.worst_hypercube_step,
            self.degenerate_conditionings,
            self.case_identity,
            self.consolidated,
        ]
        .iter()
        .all(|r| r.satisfied)
    }

    /// Smallest slack among the three genuine inequalities.
    pub fn min_slack(&self) -> f64 {
        [
            self.subadditivity,
            self.worst_hypercube_step,
            self.consolidated,
        ]
        .iter()
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min)
    }
}

/// Checks sub-additivity over rows, the conditional hypercube bounds and the
/// three-case consolidation, by full enumeration (`n <= 3`).
pub fn check_row_decomposition(
    f: &FunctionOnGroup,
    gt: &GroupTable,
) -> Result<RowDecompositionReport> {
    let n = gt.n();
    check_extension_size(n, false)?;
    let g = extension_values(f, gt)?;
    let g2: Vec<f64> = g.iter().map(|v| v * v).collect();
    let total = g.len() as f64;
    let fill = mean(f);
    let row_mask = (1u64 << n) - 1;
    let ent_mu = entropy_uniform(&g2);

    let mut conditional_sum = 0.0;
    let mut hypercube_sum = 0.0;
    let mut worst_step: Option<(f64, BoundReport)> = None;
    let mut degenerate_max: f64 = 0.0;
    let mut row_values = vec![0.0; 1 << n];
    for i in 0..n {
        let shift = i * n;
        // all settings of the other rows: keys with row i cleared
        for others in (0..1u64 << (n * n)).filter(|k| (k >> shift) & row_mask == 0) {
            for (l, slot) in row_values.iter_mut().enumerate() {
                *slot = g2[(others | ((l as u64) << shift)) as usize];
            }
            let cond_ent = entropy_uniform(&row_values);
            conditional_sum += cond_ent / total * (1u64 << n) as f64;

            // rank of the other rows: zero row i leaves them intact
            if key_rank(others, n) < n - 1 {
                degenerate_max = degenerate_max.max(cond_ent);
                continue;
            }
            // completion vector: smallest nonzero row value giving an invertible matrix
            let completion = (1..=row_mask)
                .find(|&l| key_rank(others | (l << shift), n) == n)
                .expect("n-1 independent rows extend to a basis");
            let mut dirichlet = 0.0;
            for l in 0..=row_mask {
                let x = others | (l << shift);
                for j in 0..n {
                    let flip = if j == i {
                        completion
                    } else {
                        (others >> (j * n)) & row_mask
                    };
                    let y = others | ((l ^ flip) << shift);
                    dirichlet += (g[x as usize] - g[y as usize]).powi(2);
                }
            }
            // 1/2 sum_j E[(g(X) - g(X^{i<-j}))^2 | others], uniform over 2^n rows
            let bound = 0.5 * dirichlet / (1u64 << n) as f64;
            hypercube_sum += bound / total * (1u64 << n) as f64;
            let report = BoundReport::new(cond_ent, bound);
            let rel = report.slack / report.rhs.abs().max(1.0);
            if worst_step.is_none_or(|(w, _)| rel < w) {
                worst_step = Some((rel, report));
            }
        }
    }

    // three-case expression, summed over invertible X only
    let mut move_term = 0.0;
    let mut variance_term = 0.0;
    for x in 0..gt.len() {
        let key = gt.key(x);
        let fx = f.values()[x];
        for t in gf2::Transvection::all(n) {
            let y = gt
                .index_of(gf2::transvect_key(key, n, t))
                .expect("group is closed");
            move_term += (fx - f.values()[y]).powi(2);
        }
        variance_term += n as f64 * (fx - fill).powi(2);
    }
    let consolidated_rhs = (0.5 * move_term + variance_term) / total;

    Ok(RowDecompositionReport {
        subadditivity: BoundReport::new(ent_mu, conditional_sum),
        worst_hypercube_step: worst_step.map_or(BoundReport::new(0.0, 0.0), |(_, r)| r),
        degenerate_conditionings: BoundReport::new(degenerate_max, 0.0),
        case_identity: BoundReport::equality(hypercube_sum, consolidated_rhs),
        consolidated: BoundReport::new(ent_mu, consolidated_rhs),
    })
}

/// `ent(f^2) <= d E_cube(f,f)` on `{0,1}^d`, where the cube walk flips a
/// uniform coordinate. `f` is indexed by the bits of its position.
pub fn hypercube_lsi_check(d: usize, f: &[f64]) -> Result<BoundReport> {
    if !(1..=12).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "cube dimension must be in 1..=12, got {d}"
        )));
    }
    if f.len() != 1 << d {
        return Err(Error::DimensionMismatch {
            expected: 1 << d,
            found: f.len(),
        });
    }
    let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
    let size = f.len() as f64;
    let sum = kahan_sum((0..f.len()).map(|a| {
        (0..d)
            .map(|j| (f[a] - f[a ^ (1 << j)]).powi(2))
            .sum::<f64>()
    }));
    let dirichlet = 0.5 * sum / (size * d as f64);
    Ok(BoundReport::new(entropy_uniform(&sq), d as f64 * dirichlet))
}

/// `4 (31 sqrt(n) + 700)^2`.
pub fn kassabov_constant(n: usize) -> f64 {
    4.0 * (31.0 * (n as f64).sqrt() + 700.0).powi(2)
}

/// `var_pi(f) <= 4 (31 sqrt(n) + 700)^2 E_P(f,f)`.
pub fn kassabov_check(f: &FunctionOnGroup, ts: &TransitionStructure) -> Result<BoundReport> {
    let e = dirichlet_form(f, ts)?;
    Ok(BoundReport::new(variance(f), kassabov_constant(ts.n()) * e))
}

/// Spectral form: `1 / (4 (31 sqrt(n) + 700)^2) <= gap`.
pub fn kassabov_spectral_check(n: usize, report: &SpectralReport) -> BoundReport {
    BoundReport::new(1.0 / kassabov_constant(n), report.gap)
}

/// Where the log-Sobolev lower bound comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum LsiWitness {
    /// An actual function; the bound is its ratio `ent_pi(f^2) / E_P(f,f)`.
    Function(Vec<f64>),
    /// The limit of the ratio along `1 + eps v` as `eps -> 0`, which equals
    /// `2 var_pi(v) / E_P(v,v)`; `v` is a second eigenvector, so this is `2 / gap`.
    ConstantLimit(Vec<f64>),
}

impl LsiWitness {
    /// The ratio this witness certifies.
    pub fn ratio(&self, ts: &TransitionStructure) -> Result<f64> {
        match self {
            LsiWitness::Function(v) => lsi_ratio(&FunctionOnGroup::new(v.clone())?, ts),
            LsiWitness::ConstantLimit(v) => {
                let f = FunctionOnGroup::new(v.clone())?;
                Ok(2.0 * variance(&f) / dirichlet_form(&f, ts)?)
            }
        }
    }
}

/// Result of the log-Sobolev constant search. Every number here is a lower
/// bound on the constant; no upper bound is claimed.
#[derive(Clone, Debug, PartialEq)]
pub struct LsiEstimate {
    /// `max(best_ratio, two_over_gap)`, certified by `witness`.
    pub lower_bound: f64,
    pub witness: LsiWitness,
    /// Largest ratio attained by an actual function.
    pub best_ratio: f64,
    /// The function attaining `best_ratio`, unit norm.
    pub best_function: Vec<f64>,
    /// Which start produced `best_function`: 0 is the identity indicator,
    /// `r + 1` the `r`-th random start.
    pub best_start: usize,
    /// `2 / gap`, with the gap of the non-lazy kernel.
    pub two_over_gap: f64,
}

fn lsi_ratio_and_gradient(v: &[f64], ts: &TransitionStructure, grad: Option<&mut [f64]>) -> f64 {
    let len = v.len() as f64;
    let m2 = kahan_sum(v.iter().map(|x| x * x)) / len;
    let ent = (kahan_sum(v.iter().map(|x| x_log_x(x * x))) / len - x_log_x(m2)).max(0.0);
    let p = ts.step_probability();
    let mut lap = vec![0.0; v.len()];
    for (x, slot) in lap.iter_mut().enumerate() {
        *slot = ts
            .neighbors(x)
            .iter()
            .map(|&y| v[x] - v[y as usize])
            .sum::<f64>()
            * p;
    }
    let dir = 0.5 * kahan_sum(v.iter().zip(&lap).map(|(a, b)| a * b)) * 2.0 / len;
    if dir <= 0.0 {
        return 0.0;
    }
    if let Some(grad) = grad {
        let log_m2 = m2.ln();
        for x in 0..v.len() {
            let d_ent = if v[x] == 0.0 {
                0.0
            } else {
                2.0 * v[x] * ((v[x] * v[x]).ln() - log_m2) / len
            };
            let d_dir = 2.0 * lap[x] / len;
            grad[x] = (d_ent * dir - ent * d_dir) / (dir * dir);
        }
    }
    ent / dir
}

/// Projected gradient ascent of the ratio on the unit sphere, with
/// backtracking on the step angle.
fn ascend(mut v: Vec<f64>, ts: &TransitionStructure, iters: usize) -> (f64, Vec<f64>) {
    normalize(&mut v);
    let mut grad = vec![0.0; v.len()];
    let mut ratio = lsi_ratio_and_gradient(&v, ts, Some(&mut grad));
    let mut angle: f64 = 0.5;
    for _ in 0..iters {
        let radial: f64 = grad.iter().zip(&v).map(|(g, x)| g * x).sum();
        let mut dir: Vec<f64> = grad.iter().zip(&v).map(|(g, x)| g - radial * x).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            break;
        }
        dir.iter_mut().for_each(|x| *x /= norm);
        let mut improved = false;
        while angle > 1e-14 {
            let (c, s) = (angle.cos(), angle.sin());
            let trial: Vec<f64> = v.iter().zip(&dir).map(|(x, d)| c * x + s * d).collect();
            let r = lsi_ratio_and_gradient(&trial, ts, None);
            if r > ratio {
                v = trial;
                normalize(&mut v);
                ratio = lsi_ratio_and_gradient(&v, ts, Some(&mut grad));
                angle = (angle * 2.0).min(1.0);
                improved = true;
                break;
            }
            angle *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (ratio, v)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Searches for functions with a large `ent_pi(f^2) / E_P(f,f)`, from the
/// identity indicator plus `restarts` Gaussian starts, and compares with the
/// near-constant limit `2 / gap`. Ties go to the lowest start index, so the
/// result does not depend on scheduling. Needs the dense spectrum (`n <= 3`).
pub fn estimate_lsi_constant(
    ts: &TransitionStructure,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<LsiEstimate> {
    let len = ts.len();
    if len > crate::exact::DENSE_EIGEN_MAX {
        return Err(Error::GroupTooLarge { n: ts.n(), cap: 3 });
    }
    let results: Vec<(f64, Vec<f64>)> = (0..=restarts)
        .into_par_iter()
        .map(|start| {
            let v0 = if start == 0 {
                FunctionOnGroup::indicator(len, 0).0
            } else {
                let mut rng = seeding::stream_rng(seed, seeding::OPTIMIZER, start as u64);
                // a constant start has no ratio; redraw until E_P > 0
                loop {
                    let v = FunctionOnGroup::gaussian(len, &mut rng).0;
                    if lsi_ratio_and_gradient(&v, ts, None) > 0.0 {
                        break v;
                    }
                }
            };
            ascend(v0, ts, iters)
        })
        .collect();
    let (best_start, (best_ratio, best_function)) = results
        .into_iter()
        .enumerate()
        .fold(
            None,
            |best: Option<(usize, (f64, Vec<f64>))>, (i, r)| match best {
                Some((bi, b)) if b.0 >= r.0 => Some((bi, b)),
                _ => Some((i, r)),
            },
        )
        .expect("at least one start");

    let second = low_eigenvectors(ts, 1).pop().expect("at least two states");
    let limit = LsiWitness::ConstantLimit(second);
    let two_over_gap = limit.ratio(ts)?;
    let (lower_bound, witness) = if best_ratio >= two_over_gap {
        (best_ratio, LsiWitness::Function(best_function.clone()))
    } else {
        (two_over_gap, limit)
    };
    Ok(LsiEstimate {
        lower_bound,
        witness,
        best_ratio,
        best_function,
        best_start,
        two_over_gap,
    })
}

/// `ent_pi(f^2) / E_P(f,f)` for a single function (0 for constants).
pub fn lsi_ratio(f: &FunctionOnGroup, ts: &TransitionStructure) -> Result<f64> {
    check_len(f, ts.len())?;
    Ok(lsi_ratio_and_gradient(f.values(), ts, None))
}

/// `(C_LS / 4) log log(1/pi_*) + (1/lambda_*) log(sqrt(1 + 2e^2) / eps) + 1`
/// with `pi_* = 1/|G|`, evaluated in the log domain.
pub fn mixing_bound(n: usize, eps: f64, cls: f64, inv_abs_gap: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if !(cls > 0.0 && inv_abs_gap > 0.0 && cls.is_finite() && inv_abs_gap.is_finite()) {
        return Err(Error::InvalidParameter(
            "log-Sobolev constant and inverse absolute gap must be positive and finite".into(),
        ));
    }
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    let log_log = gf2::ln_group_order(n).ln();
    let e2 = std::f64::consts::E.powi(2);
    Ok(cls / 4.0 * log_log + inv_abs_gap * ((1.0 + 2.0 * e2).sqrt() / eps).ln() + 1.0)
}

/// Smallest `t` with `(n(n-1))^t >= (1 - eps) |G|`: fewer steps reach too
/// few states for the TV distance to be at most `eps`.
pub fn counting_lower_bound(n: usize, eps: f64) -> Result<u64> {
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let target = (1.0 - eps).ln() + gf2::ln_group_order(n);
    let per_step = ((n * (n - 1)) as f64).ln();
    let mut t = (target / per_step).ceil().max(0.0) as u64;
    // guard the ceiling against rounding on either side
    while t > 0 && (t - 1) as f64 * per_step >= target {
        t -= 1;
    }
    while (t as f64) * per_step < target {
        t += 1;
    }
    Ok(t)
}

/// Which inequality a randomized suite exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Key,
    Extension,
    RowDecomposition,
    Hypercube,
    Kassabov,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Key,
        Suite::Extension,
        Suite::RowDecomposition,
        Suite::Hypercube,
        Suite::Kassabov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Key => "key",
            Suite::Extension => "extension",
            Suite::RowDecomposition => "row_decomposition",
            Suite::Hypercube => "hypercube",
            Suite::Kassabov => "kassabov",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Aggregate of one suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub check_name: String,
    /// Group dimension, or cube dimension for the hypercube suite.
    pub n: usize,
    pub trials: u64,
    pub violations: u64,
    pub min_slack: f64,
}

/// Holds the tables a suite needs for one `n`.
pub struct SuiteContext {
    pub gt: GroupTable,
    pub ts: TransitionStructure,
}

impl SuiteContext {
    pub fn new(n: usize) -> Result<Self> {
        let gt = GroupTable::enumerate(n)?;
        let ts = TransitionStructure::build(&gt)?;
        Ok(Self { gt, ts })
    }
}

fn check_one(suite: Suite, ctx: &SuiteContext, f: &FunctionOnGroup) -> Result<(bool, f64)> {
    Ok(match suite {
        Suite::Key => {
            let r = check_key_inequality(f, &ctx.ts)?;
            (r.satisfied, r.slack)
        }
        Suite::Extension => {
            let r = check_extension_inequality(f, &ctx.gt, false)?;
            (r.satisfied, r.slack)
        }
        Suite::RowDecomposition => {
            let r = check_row_decomposition(f, &ctx.gt)?;
            (r.all_satisfied(), r.min_slack())
        }
        Suite::Kassabov => {
            let r = kassabov_check(f, &ctx.ts)?;
            (r.satisfied, r.slack)
        }
        Suite::Hypercube => unreachable!("hypercube suite does not use group functions"),
    })
}

fn merge(results: Vec<(bool, f64)>) -> (u64, f64) {
    results
        .into_iter()
        .fold((0, f64::INFINITY), |(v, s), (ok, slack)| {
            (v + u64::from(!ok), s.min(slack))
        })
}

/// `trials` i.i.d. standard Gaussian functions, each with its own stream.
pub fn run_random_suite(suite: Suite, n: usize, trials: u64, seed: u64) -> Result<SuiteResult> {
    let results: Vec<(bool, f64)> = if suite == Suite::Hypercube {
        let d = n;
        (0..trials)
            .into_par_iter()
            .map(|k| {
                let mut rng = seeding::stream_rng(seed, seeding::TEST_FUNCTIONS, k);
                let f: Vec<f64> = (0..1usize << d)
                    .map(|_| rng.sample(StandardNormal))
                    .collect();
                hypercube_lsi_check(d, &f).map(|r| (r.satisfied, r.slack))
            })
            .collect::<Result<_>>()?
    } else {
        let ctx = SuiteContext::new(n)?;
        (0..trials)
            .into_par_iter()
            .map(|k| {
                let mut rng = seeding::stream_rng(seed, seeding::TEST_FUNCTIONS, k);
                let f = FunctionOnGroup::gaussian(ctx.gt.len(), &mut rng);
                check_one(suite, &ctx, &f)
            })
            .collect::<Result<_>>()?
    };
    let (violations, min_slack) = merge(results);
    Ok(SuiteResult {
        check_name: suite.name().to_string(),
        n,
        trials,
        violations,
        min_slack,
    })
}

/// Indicators, signed indicators, second eigenvectors and near-constant
/// perturbations of them: the regimes where the inequalities are tightest.
pub fn adversarial_functions(ctx: &SuiteContext) -> Vec<FunctionOnGroup> {
    let len = ctx.gt.len();
    let mut out = Vec::new();
    for idx in 0..len.min(64) {
        out.push(FunctionOnGroup::indicator(len, idx));
        let mut signed = vec![1.0; len];
        signed[idx] = -1.0;
        out.push(FunctionOnGroup(signed));
    }
    if len <= crate::exact::DENSE_EIGEN_MAX {
        for v in low_eigenvectors(&ctx.ts, 4) {
            out.push(FunctionOnGroup(v.clone()));
            for eps in [1e-3, 0.1, 1.0] {
                out.push(FunctionOnGroup(v.iter().map(|x| 1.0 + eps * x).collect()));
            }
        }
    }
    out
}

/// Eigenvectors for the `count` largest non-trivial eigenvalues of `P`.
fn low_eigenvectors(ts: &TransitionStructure, count: usize) -> Vec<Vec<f64>> {
    use nalgebra::{DMatrix, SymmetricEigen};
    let len = ts.len();
    let p = ts.step_probability();
    let mut m = DMatrix::<f64>::zeros(len, len);
    for x in 0..len {
        for &y in ts.neighbors(x) {
            m[(x, y as usize)] += p;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .skip(1)
        .take(count)
        .map(|i| {
            let col = eig.eigenvectors.column(i);
            let scale = (len as f64).sqrt();
            col.iter().map(|x| x * scale).collect()
        })
        .collect()
}

pub fn run_adversarial_suite(suite: Suite, n: usize) -> Result<SuiteResult> {
    let results: Vec<(bool, f64)> = if suite == Suite::Hypercube {
        let d = n;
        let size = 1usize << d;
        let mut fs: Vec<Vec<f64>> = Vec::new();
        for a in 0..size.min(64) {
            let mut ind = vec![0.0; size];
            ind[a] = 1.0;
            fs.push(ind);
        }
        // coordinate characters and near-constant perturbations of them
        for j in 0..d {
            let chi: Vec<f64> = (0..size)
                .map(|a| if a >> j & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            for eps in [1e-3, 0.1, 1.0] {
                fs.push(chi.iter().map(|c| 1.0 + eps * c).collect());
            }
        }
        fs.iter()
            .map(|f| hypercube_lsi_check(d, f).map(|r| (r.satisfied, r.slack)))
            .collect::<Result<_>>()?
    } else {
        let ctx = SuiteContext::new(n)?;
        adversarial_functions(&ctx)
            .par_iter()
            .map(|f| check_one(suite, &ctx, f))
            .collect::<Result<_>>()?
    };
    let trials = results.len() as u64;
    let (violations, min_slack) = merge(results);
    Ok(SuiteResult {
        check_name: format!("{}/adversarial", suite.name()),
        n,
        trials,
        violations,
        min_slack,
    })
}
