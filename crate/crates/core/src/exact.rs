//! Exhaustive analysis of the walk for small `n`: the group table, the
//! transition graph, exact distributions `P^t(I, .)`, mixing times and the
//! spectrum.
//!
//! The walk is a Cayley graph with generators acting on the left, so
//! `P^t(x, .)` is the right translate of `P^t(I, .)` by `x`. Every distance
//! to the uniform law is therefore the same for all starts, and the curves
//! below start at the identity (index 0).

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use crate::chain::step_in_place;
use crate::error::{Error, Result};
use crate::gf2::{self, transvect_key, BitMatrix, Transvection};
use crate::seeding;

/// Largest `n` enumerated without an explicit opt-in.
pub const DEFAULT_MAX_N: usize = 4;
/// Largest `n` that can be enumerated at all (|GL_5(F_2)| = 9 999 360).
pub const HARD_CAP_N: usize = 5;
/// Largest `n` for which the adjacency lists are materialized.
pub const TRANSITION_MAX_N: usize = 4;
/// Dense eigensolve up to this many states; Lanczos above.
pub const DENSE_EIGEN_MAX: usize = 5000;

const RENORMALIZE_EVERY: u64 = 64;
const BLOCK: usize = 1024;
const NO_INDEX: u32 = u32::MAX;

/// The elements of `GL_n(F_2)` in breadth-first order from the identity.
#[derive(Clone, Debug)]
pub struct GroupTable {
    n: usize,
    elements: Vec<u32>,
    index: Vec<u32>,
}

impl GroupTable {
    /// Enumerates the group for `n <= DEFAULT_MAX_N`.
    pub fn enumerate(n: usize) -> Result<Self> {
        Self::enumerate_with_cap(n, DEFAULT_MAX_N)
    }

    /// Enumerates the group for `n <= cap`, where `cap` may be raised up to
    /// [`HARD_CAP_N`].
    pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<Self> {
        let cap = cap.min(HARD_CAP_N);
        if n > cap {
            return Err(Error::GroupTooLarge { n, cap });
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let mut index = vec![NO_INDEX; 1usize << (n * n)];
        let identity = BitMatrix::identity(n).encode_key()? as u32;
        let mut elements = Vec::with_capacity(gf2::group_order(n).unwrap_or(0) as usize);
        index[identity as usize] = 0;
        elements.push(identity);
        let moves: Vec<Transvection> = Transvection::all(n).collect();
        let mut head = 0;
        while head < elements.len() {
            let key = elements[head] as u64;
            head += 1;
            for &t in &moves {
                let next = transvect_key(key, n, t) as u32;
                if index[next as usize] == NO_INDEX {
                    index[next as usize] = elements.len() as u32;
                    elements.push(next);
                }
            }
        }
        Ok(Self { n, elements, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Keys in canonical (BFS) order.
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn key(&self, idx: usize) -> u64 {
        self.elements[idx] as u64
    }

    pub fn matrix(&self, idx: usize) -> BitMatrix {
        BitMatrix::decode_key(self.key(idx), self.n).expect("table keys fit")
    }

    pub fn index_of(&self, key: u64) -> Option<usize> {
        match self.index.get(key as usize) {
            Some(&i) if i != NO_INDEX => Some(i as usize),
            _ => None,
        }
    }

    /// Uniform probability of one element; also `pi_star`.
    pub fn pi(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn pi_star(&self) -> f64 {
        self.pi()
    }
}

/// Adjacency of the Cayley graph; every vertex has `n(n-1)` neighbours.
#[derive(Clone, Debug)]
pub struct TransitionStructure {
    n: usize,
    degree: usize,
    adjacency: Vec<u32>,
    period: u32,
}

impl TransitionStructure {
    pub fn build(gt: &GroupTable) -> Result<Self> {
        let n = gt.n();
        if n > TRANSITION_MAX_N {
            return Err(Error::GroupTooLarge {
                n,
                cap: TRANSITION_MAX_N,
            });
        }
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        let moves: Vec<Transvection> = Transvection::all(n).collect();
        let degree = moves.len();
        let mut adjacency = vec![0u32; gt.len() * degree];
        adjacency
            .par_chunks_mut(degree)
            .enumerate()
            .for_each(|(x, row)| {
                let key = gt.key(x);
                for (slot, &t) in row.iter_mut().zip(&moves) {
                    *slot = gt
                        .index_of(transvect_key(key, n, t))
                        .expect("group is closed") as u32;
                }
                row.sort_unstable();
            });
        let mut ts = Self {
            n,
            degree,
            adjacency,
            period: 1,
        };
        ts.period = if ts.is_bipartite() { 2 } else { 1 };
        Ok(ts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.adjacency.len() / self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn step_probability(&self) -> f64 {
        1.0 / self.degree as f64
    }

    /// Sorted neighbour indices of state `x`.
    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.adjacency[x * self.degree..(x + 1) * self.degree]
    }

    /// 2 if the graph is bipartite, else 1.
    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_colors()
            .is_some_and(|c| c.iter().all(|&k| k != u8::MAX))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|x| {
            self.neighbors(x).iter().all(|&y| {
                self.neighbors(y as usize)
                    .binary_search(&(x as u32))
                    .is_ok()
            })
        })
    }

    pub fn has_self_loops(&self) -> bool {
        (0..self.len()).any(|x| self.neighbors(x).binary_search(&(x as u32)).is_ok())
    }

    fn is_bipartite(&self) -> bool {
        let Some(colors) = self.bfs_colors() else {
            return false;
        };
        (0..self.len()).all(|x| {
            self.neighbors(x)
                .iter()
                .all(|&y| colors[y as usize] != colors[x])
        })
    }

    /// BFS parity coloring from state 0; unreached states keep `u8::MAX`.
    fn bfs_colors(&self) -> Option<Vec<u8>> {
        if self.is_empty() {
            return None;
        }
        let mut colors = vec![u8::MAX; self.len()];
        colors[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                if colors[y as usize] == u8::MAX {
                    colors[y as usize] = colors[x] ^ 1;
                    queue.push_back(y as usize);
                }
            }
        }
        Some(colors)
    }

    /// `out = d P` (or `d (P + I)/2` when lazy). `P` is symmetric, so each
    /// output entry is the neighbour average of `d`. Blocks are fixed, so the
    /// result does not depend on the thread count.
    pub fn apply(&self, d: &[f64], out: &mut [f64], lazy: bool) {
        assert_eq!(d.len(), self.len());
        assert_eq!(out.len(), self.len());
        let p = self.step_probability();
        out.par_chunks_mut(BLOCK)
            .enumerate()
            .for_each(|(b, chunk)| {
                for (off, slot) in chunk.iter_mut().enumerate() {
                    let y = b * BLOCK + off;
                    let s: f64 = self.neighbors(y).iter().map(|&x| d[x as usize]).sum();
                    *slot = if lazy {
                        0.5 * d[y] + 0.5 * p * s
                    } else {
                        p * s
                    };
                }
            });
    }
}

/// Probability vector on the group at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistVector {
    pub t: u64,
    pub probs: Vec<f64>,
}

impl DistVector {
    pub fn point_mass(len: usize, at: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[at] = 1.0;
        Self { t: 0, probs }
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            t: 0,
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.probs.iter().copied())
    }

    fn renormalize(&mut self) {
        let s = self.total_mass();
        self.probs.iter_mut().for_each(|p| *p /= s);
    }
}

/// Iterates `P^t(I, .)` for `t = 0, 1, 2, ...`.
pub struct Evolution<'a> {
    ts: &'a TransitionStructure,
    lazy: bool,
    current: DistVector,
    scratch: Vec<f64>,
}

impl<'a> Evolution<'a> {
    pub fn from_identity(ts: &'a TransitionStructure, lazy: bool) -> Self {
        Self {
            ts,
            lazy,
            current: DistVector::point_mass(ts.len(), 0),
            scratch: vec![0.0; ts.len()],
        }
    }

    pub fn current(&self) -> &DistVector {
        &self.current
    }

    pub fn advance(&mut self) {
        self.ts
            .apply(&self.current.probs, &mut self.scratch, self.lazy);
        std::mem::swap(&mut self.current.probs, &mut self.scratch);
        self.current.t += 1;
        if self.current.t % RENORMALIZE_EVERY == 0 {
            self.current.renormalize();
        }
    }
}

pub fn distribution_at(ts: &TransitionStructure, t: u64, lazy: bool) -> DistVector {
    let mut ev = Evolution::from_identity(ts, lazy);
    for _ in 0..t {
        ev.advance();
    }
    ev.current
}

/// Half the l1 distance to the uniform law.
pub fn tv_distance(d: &DistVector) -> f64 {
    let pi = 1.0 / d.probs.len() as f64;
    0.5 * kahan_sum(d.probs.iter().map(|&p| (p - pi).abs()))
}

/// `|| d / pi - 1 ||_{2, pi}`.
pub fn l2_distance(d: &DistVector) -> f64 {
    let len = d.probs.len() as f64;
    let pi = 1.0 / len;
    (len * kahan_sum(d.probs.iter().map(|&p| (p - pi) * (p - pi)))).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub t: u64,
    pub tv: f64,
    pub l2: f64,
}

/// TV and l2 distances for `t = 0..=t_max`.
pub fn exact_curve(ts: &TransitionStructure, t_max: u64, lazy: bool) -> Vec<CurvePoint> {
    let mut ev = Evolution::from_identity(ts, lazy);
    let mut out = Vec::with_capacity(t_max as usize + 1);
    loop {
        let d = ev.current();
        out.push(CurvePoint {
            t: d.t,
            tv: tv_distance(d),
            l2: l2_distance(d),
        });
        if d.t >= t_max {
            return out;
        }
        ev.advance();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MixingTimes {
    pub tv: u64,
    pub l2: u64,
    pub lazy: bool,
}

pub const DEFAULT_MAX_T: u64 = 1_000_000;

/// First times the TV and l2 distances drop to `eps` or below.
pub fn mixing_times(
    ts: &TransitionStructure,
    eps: f64,
    lazy: bool,
    max_t: u64,
) -> Result<MixingTimes> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if !lazy && ts.period() != 1 {
        return Err(Error::Periodic {
            period: ts.period(),
        });
    }
    let mut ev = Evolution::from_identity(ts, lazy);
    let (mut t_tv, mut t_l2) = (None, None);
    loop {
        let d = ev.current();
        if t_tv.is_none() && tv_distance(d) <= eps {
            t_tv = Some(d.t);
        }
        if t_l2.is_none() && l2_distance(d) <= eps {
            t_l2 = Some(d.t);
        }
        if let (Some(tv), Some(l2)) = (t_tv, t_l2) {
            return Ok(MixingTimes { tv, l2, lazy });
        }
        if d.t >= max_t {
            return Err(Error::NotConverged { eps, max_t });
        }
        ev.advance();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    /// Descending. The full spectrum for dense instances; otherwise only
    /// `[1, lambda_2, lambda_min]`.
    pub eigenvalues: Vec<f64>,
    pub full_spectrum: bool,
    pub lambda_2: f64,
    pub lambda_min: f64,
    pub gap: f64,
    pub absolute_gap: f64,
    pub period: u32,
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            max_iter: 800,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

pub fn spectral_report(ts: &TransitionStructure) -> Result<SpectralReport> {
    spectral_report_with(ts, LanczosConfig::default())
}

pub fn spectral_report_with(
    ts: &TransitionStructure,
    cfg: LanczosConfig,
) -> Result<SpectralReport> {
    let (eigenvalues, full) = if ts.len() <= DENSE_EIGEN_MAX {
        (dense_spectrum(ts), true)
    } else {
        let (l2, lmin) = lanczos_extremes(ts, cfg)?;
        (vec![1.0, l2, lmin], false)
    };
    let lambda_2 = eigenvalues.get(1).copied().unwrap_or(1.0);
    let lambda_min = *eigenvalues.last().expect("nonempty spectrum");
    let period = ts.period();
    let minus_one = (lambda_min + 1.0).abs() < 1e-8;
    if minus_one != (period == 2) {
        return Err(Error::InvalidParameter(format!(
            "period {period} disagrees with smallest eigenvalue {lambda_min}"
        )));
    }
    Ok(SpectralReport {
        gap: 1.0 - lambda_2,
        absolute_gap: (1.0 - lambda_2.abs().max(lambda_min.abs())).max(0.0),
        eigenvalues,
        full_spectrum: full,
        lambda_2,
        lambda_min,
        period,
    })
}

fn dense_spectrum(ts: &TransitionStructure) -> Vec<f64> {
    let len = ts.len();
    let p = ts.step_probability();
    let mut m = DMatrix::<f64>::zeros(len, len);
    for x in 0..len {
        for &y in ts.neighbors(x) {
            m[(x, y as usize)] += p;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Largest and smallest eigenvalues of `P` on the complement of the
/// constants, by Lanczos with full reorthogonalization.
fn lanczos_extremes(ts: &TransitionStructure, cfg: LanczosConfig) -> Result<(f64, f64)> {
    let len = ts.len();
    let mut rng = seeding::stream_rng(cfg.seed, seeding::OPTIMIZER, 0);
    let mut v: Vec<f64> = (0..len).map(|_| rng.gen::<f64>() - 0.5).collect();
    deflate_constant(&mut v);
    normalize(&mut v);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; len];
    for k in 0..cfg.max_iter.min(len - 1) {
        ts.apply(&basis[k], &mut w, false);
        deflate_constant(&mut w);
        let alpha = dot(&w, &basis[k]);
        alphas.push(alpha);
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let beta = dot(&w, &w).sqrt();

        let m = alphas.len();
        if m % 10 == 0 || beta < 1e-14 {
            let tri = tridiagonal(&alphas, &betas);
            let eig = SymmetricEigen::new(tri);
            let (mut imax, mut imin) = (0, 0);
            for i in 0..m {
                if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                    imax = i;
                }
                if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                    imin = i;
                }
            }
            let residual = |i: usize| beta * eig.eigenvectors[(m - 1, i)].abs();
            if beta < 1e-14 || (residual(imax) < cfg.tol && residual(imin) < cfg.tol) {
                return Ok((eig.eigenvalues[imax], eig.eigenvalues[imin]));
            }
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }
    Err(Error::EigenNotConverged(cfg.max_iter))
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    t
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn deflate_constant(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Compensated summation.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// State counts at time `t` over `chains` independent simulated walks from
/// the identity. Chains are split into fixed batches with their own streams.
pub fn empirical_counts(gt: &GroupTable, t: u64, lazy: bool, chains: u64, seed: u64) -> Vec<u64> {
    const BATCH: u64 = 4096;
    let n = gt.n();
    let batches = chains.div_ceil(BATCH);
    let partials: Vec<Vec<u64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = seeding::stream_rng(seed, seeding::MONTE_CARLO, b);
            let mut counts = vec![0u64; gt.len()];
            let here = BATCH.min(chains - b * BATCH);
            for _ in 0..here {
                let mut x = BitMatrix::identity(n);
                for _ in 0..t {
                    step_in_place(&mut x, lazy, &mut rng);
                }
                let key = x.encode_key().expect("small n");
                counts[gt.index_of(key).expect("walk stays in the group")] += 1;
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; gt.len()];
    for p in partials {
        total.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize) -> (GroupTable, TransitionStructure) {
        let gt = GroupTable::enumerate(n).unwrap();
        let ts = TransitionStructure::build(&gt).unwrap();
        (gt, ts)
    }

    #[test]
    fn group_orders() {
        for (n, size) in [(1, 1), (2, 6), (3, 168), (4, 20160)] {
            let gt = GroupTable::enumerate(n).unwrap();
            assert_eq!(gt.len(), size);
            assert_eq!(gt.key(0), BitMatrix::identity(n).encode_key().unwrap());
            assert!((0..gt.len()).all(|i| gt.matrix(i).is_invertible()));
        }
        assert!(matches!(
            GroupTable::enumerate(5),
            Err(Error::GroupTooLarge { n: 5, cap: 4 })
        ));
        assert!(matches!(
            GroupTable::enumerate_with_cap(6, 6),
            Err(Error::GroupTooLarge { n: 6, cap: 5 })
        ));
    }

    #[test]
    fn brute_force_n2_membership() {
        let gt = GroupTable::enumerate(2).unwrap();
        for key in 0..16u64 {
            let inv = BitMatrix::decode_key(key, 2).unwrap().is_invertible();
            assert_eq!(gt.index_of(key).is_some(), inv);
        }
    }

    #[test]
    fn n2_is_a_six_cycle() {
        let (_, ts) = setup(2);
        assert_eq!(ts.degree(), 2);
        assert!(ts.is_symmetric() && ts.is_connected() && !ts.has_self_loops());
        // walk the cycle: from 0, always step to the unvisited neighbour
        let mut seen = vec![0usize];
        let mut cur = 0usize;
        let mut prev = usize::MAX;
        loop {
            let next = ts
                .neighbors(cur)
                .iter()
                .map(|&y| y as usize)
                .find(|&y| y != prev)
                .unwrap();
            if next == 0 {
                break;
            }
            seen.push(next);
            prev = cur;
            cur = next;
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(ts.period(), 2);
    }

    #[test]
    fn n3_structure() {
        let (gt, ts) = setup(3);
        assert_eq!(gt.len(), 168);
        assert_eq!(ts.degree(), 6);
        assert!(ts.is_symmetric() && ts.is_connected() && !ts.has_self_loops());
        assert_eq!(ts.period(), 1);
    }

    #[test]
    fn distribution_basics() {
        let (_, ts) = setup(2);
        let d0 = distribution_at(&ts, 0, false);
        assert_eq!(d0, DistVector::point_mass(6, 0));
        assert!((tv_distance(&d0) - 5.0 / 6.0).abs() < 1e-15);

        let u = DistVector::uniform(6);
        assert!(tv_distance(&u).abs() < 1e-15 && l2_distance(&u).abs() < 1e-15);

        let odd: Vec<usize> = distribution_at(&ts, 3, false)
            .probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(odd.len(), 3);
        for t in [1u64, 5, 7, 101] {
            let d = distribution_at(&ts, t, false);
            for (i, &p) in d.probs.iter().enumerate() {
                assert!(p == 0.0 || odd.contains(&i), "t = {t}, state {i}");
            }
        }

        let (_, ts3) = setup(3);
        let d = distribution_at(&ts3, 1000, true);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixing_time_errors() {
        let (_, ts) = setup(2);
        assert!(matches!(
            mixing_times(&ts, 0.25, false, 1000),
            Err(Error::Periodic { period: 2 })
        ));
        assert!(mixing_times(&ts, 0.0, true, 1000).is_err());
        assert!(mixing_times(&ts, 1.0, true, 1000).is_err());
        assert!(matches!(
            mixing_times(&ts, 1e-12, true, 3),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn n2_spectrum() {
        let (_, ts) = setup(2);
        let r = spectral_report(&ts).unwrap();
        let expected = [1.0, 0.5, 0.5, -0.5, -0.5, -1.0];
        for (a, b) in r.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((r.gap - 0.5).abs() < 1e-10);
        assert!(r.absolute_gap.abs() < 1e-10);
        assert_eq!(r.period, 2);
    }

    #[test]
    fn lanczos_matches_dense_on_n3() {
        let (_, ts) = setup(3);
        let dense = spectral_report(&ts).unwrap();
        let (l2, lmin) = lanczos_extremes(&ts, LanczosConfig::default()).unwrap();
        assert!(
            (l2 - dense.lambda_2).abs() < 1e-9,
            "{l2} vs {}",
            dense.lambda_2
        );
        assert!(
            (lmin - dense.lambda_min).abs() < 1e-9,
            "{lmin} vs {}",
            dense.lambda_min
        );
    }

    #[test]
    fn kahan_is_accurate() {
        let v = std::iter::once(1.0).chain(std::iter::repeat(1e-16).take(10_000));
        assert!((kahan_sum(v) - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
