//! Ranking mathematics over label co-occurrence.
//!
//! A window of label vectors becomes a symmetric [`CooccurrenceMatrix`]; each
//! row of that matrix ranks the *other* labels by how often they co-occur with
//! the row label ([`LocalRankings`]); the rows are fused into a single
//! [`GlobalRanking`]; and two global rankings are compared with the
//! position-weighted [`ws_coefficient`].
//!
//! Everything here is a pure function of its inputs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// Pairwise co-occurrence counts of labels within a window.
///
/// Symmetric with a zero diagonal. Stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    n: usize,
    counts: Vec<u32>,
}

impl CooccurrenceMatrix {
    pub fn zeros(n: usize) -> Self {
        CooccurrenceMatrix {
            n,
            counts: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        let mut m = CooccurrenceMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input("co-occurrence matrix must be square"));
            }
            for (j, &c) in row.iter().enumerate() {
                m.counts[i * n + j] = c;
            }
        }
        for i in 0..n {
            if m.get(i, i) != 0 {
                return Err(Error::input("co-occurrence diagonal must be zero"));
            }
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::input("co-occurrence matrix must be symmetric"));
                }
            }
        }
        Ok(m)
    }

    pub fn label_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Adds one instance's pairwise co-occurrences.
    pub fn add(&mut self, labels: &LabelVector) -> Result<()> {
        labels.check_len(self.n)?;
        self.apply(labels, |c| *c += 1);
        Ok(())
    }

    /// Removes one instance previously added with [`add`](Self::add).
    pub fn remove(&mut self, labels: &LabelVector) -> Result<()> {
        labels.check_len(self.n)?;
        let ones: Vec<usize> = labels.ones().collect();
        for (a, &i) in ones.iter().enumerate() {
            for &j in &ones[a + 1..] {
                if self.get(i, j) == 0 {
                    return Err(Error::input("removing an instance that was never counted"));
                }
            }
        }
        self.apply(labels, |c| *c -= 1);
        Ok(())
    }

    pub fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }

    fn apply(&mut self, labels: &LabelVector, f: impl Fn(&mut u32)) {
        let ones: Vec<usize> = labels.ones().collect();
        let n = self.n;
        for (a, &i) in ones.iter().enumerate() {
            for &j in &ones[a + 1..] {
                f(&mut self.counts[i * n + j]);
                f(&mut self.counts[j * n + i]);
            }
        }
    }
}

impl fmt::Debug for CooccurrenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.n).map(|i| self.row(i)))
            .finish()
    }
}

/// Counts, for every label pair, the window instances where both are set.
pub fn cooccurrence<'a, I>(window: I, n: usize) -> Result<CooccurrenceMatrix>
where
    I: IntoIterator<Item = &'a LabelVector>,
{
    let mut m = CooccurrenceMatrix::zeros(n);
    for labels in window {
        m.add(labels)?;
    }
    Ok(m)
}

/// Per-label competition rankings of the other labels.
///
/// `rank(i, j)` is the 1-based rank that row `i` gives label `j`. A label is
/// never ranked in its own row. Tied counts share the smallest rank, and
/// labels with a zero count are still ranked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRankings {
    n: usize,
    // 0 on the diagonal (self excluded)
    ranks: Vec<u32>,
}

impl LocalRankings {
    /// Builds rankings from explicit rank rows, `0` marking the row's own label.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        let mut ranks = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(
                    "local ranking rows must have one entry per label",
                ));
            }
            for (j, &r) in row.iter().enumerate() {
                if (i == j) != (r == 0) {
                    return Err(Error::input(format!(
                        "row {i}: only the row's own label may be unranked"
                    )));
                }
                if r as usize >= n.max(1) {
                    return Err(Error::input(format!("row {i}: rank {r} exceeds {}", n - 1)));
                }
            }
            ranks.extend_from_slice(row);
        }
        Ok(LocalRankings { n, ranks })
    }

    pub fn label_count(&self) -> usize {
        self.n
    }

    /// Rank given to `label` by `row`, or `None` when `label == row`.
    pub fn rank(&self, row: usize, label: usize) -> Option<u32> {
        match self.ranks[row * self.n + label] {
            0 => None,
            r => Some(r),
        }
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.ranks[i * self.n..(i + 1) * self.n]
    }

    /// Number of rows in which `a` is ranked strictly above `b`, counting only
    /// rows that rank both.
    fn pairwise_wins(&self) -> Vec<u32> {
        let n = self.n;
        let mut wins = vec![0u32; n * n];
        for k in 0..n {
            let row = self.row(k);
            for a in 0..n {
                if a == k {
                    continue;
                }
                for b in 0..n {
                    if b == k || b == a {
                        continue;
                    }
                    if row[a] < row[b] {
                        wins[a * n + b] += 1;
                    }
                }
            }
        }
        wins
    }

    /// True if `a` is ranked above `b` in a strict majority of the rows that
    /// rank both labels.
    fn majority(wins: &[u32], n: usize, a: usize, b: usize) -> bool {
        let shared = n.saturating_sub(2) as u32;
        2 * wins[a * n + b] > shared
    }
}

/// Ranks each row's other labels by descending co-occurrence count.
pub fn local_rankings(m: &CooccurrenceMatrix) -> LocalRankings {
    let n = m.label_count();
    let mut ranks = vec![0u32; n * n];
    let mut sorted = Vec::with_capacity(n);
    for i in 0..n {
        let row = m.row(i);
        sorted.clear();
        sorted.extend(
            row.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &c)| c),
        );
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for j in 0..n {
            if j == i {
                continue;
            }
            // competition rank: one more than the number of strictly larger counts
            let greater = sorted.partition_point(|&c| c > row[j]);
            ranks[i * n + j] = greater as u32 + 1;
        }
    }
    LocalRankings { n, ranks }
}

/// A fused ordering of all labels together with each label's fused score.
///
/// `order[0]` is the top label. The meaning and direction of `scores`
/// depends on the fusion method that produced the ranking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalRanking {
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
}

impl GlobalRanking {
    pub fn label_count(&self) -> usize {
        self.order.len()
    }

    /// Zero-based position of every label, indexed by label.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &label) in self.order.iter().enumerate() {
            pos[label] = p;
        }
        pos
    }

    /// Ranking with the given order and no meaningful scores.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let r = GlobalRanking {
            scores: vec![0.0; n],
            order,
        };
        r.check_permutation()?;
        Ok(r)
    }

    fn check_permutation(&self) -> Result<()> {
        let n = self.order.len();
        let mut seen = vec![false; n];
        for &l in &self.order {
            if l >= n || std::mem::replace(&mut seen[l], true) {
                return Err(Error::input(
                    "global ranking is not a permutation of its labels",
                ));
            }
        }
        Ok(())
    }
}

fn order_by<F>(n: usize, mut cmp: F) -> Vec<usize>
where
    F: FnMut(usize, usize) -> Ordering,
{
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp(a, b).then(a.cmp(&b)));
    order
}

fn lcm_up_to(k: usize) -> Option<u128> {
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let mut l: u128 = 1;
    for r in 2..=k as u128 {
        l = (l / gcd(l, r)).checked_mul(r)?;
    }
    Some(l)
}

/// Reciprocal rank fusion: `r_i = 1 / Σ_k 1/rank(k, i)` over every row that
/// ranks `i`. Labels are ordered by ascending `r_i`, ties by label index.
pub fn reciprocal_fuse(lr: &LocalRankings) -> GlobalRanking {
    let n = lr.n;
    // Sum the reciprocals exactly as integer multiples of 1/lcm(1..n-1) so that
    // mathematically equal scores always tie.
    let exact = lcm_up_to(n.saturating_sub(1)).filter(|l| l.checked_mul(n as u128).is_some());
    if let Some(lcm) = exact {
        let sums: Vec<u128> = (0..n)
            .map(|i| {
                (0..n)
                    .filter_map(|k| lr.rank(k, i))
                    .map(|r| lcm / r as u128)
                    .sum()
            })
            .collect();
        let scores = sums
            .iter()
            .map(|&s| {
                if s == 0 {
                    f64::INFINITY
                } else {
                    lcm as f64 / s as f64
                }
            })
            .collect();
        let order = order_by(n, |a, b| sums[b].cmp(&sums[a]));
        return GlobalRanking { order, scores };
    }

    // Large label counts: sum in a canonical order (rank histogram) so equal
    // rank multisets give bit-identical sums.
    let sums: Vec<f64> = (0..n)
        .map(|i| {
            let mut hist = vec![0u32; n];
            for k in 0..n {
                if let Some(r) = lr.rank(k, i) {
                    hist[r as usize] += 1;
                }
            }
            hist.iter()
                .enumerate()
                .skip(1)
                .map(|(r, &h)| h as f64 / r as f64)
                .sum()
        })
        .collect();
    let scores = sums.iter().map(|&s| 1.0 / s).collect();
    let order = order_by(n, |a, b| sums[b].total_cmp(&sums[a]));
    GlobalRanking { order, scores }
}

/// Borda count. A row ranking `m` candidates awards `m - rank + 1` points;
/// tied candidates all receive the points of their shared rank. Ordered by
/// descending total.
pub fn borda_fuse(lr: &LocalRankings) -> GlobalRanking {
    let n = lr.n;
    let candidates = n.saturating_sub(1) as u64;
    let totals: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter_map(|k| lr.rank(k, i))
                .map(|r| candidates - r as u64 + 1)
                .sum()
        })
        .collect();
    let order = order_by(n, |a, b| totals[b].cmp(&totals[a]));
    GlobalRanking {
        order,
        scores: totals.iter().map(|&t| t as f64).collect(),
    }
}

/// Condorcet fuse: a stable merge sort under the pairwise-majority comparator.
///
/// `a` precedes `b` when `a` is ranked above `b` in a strict majority of the
/// rows ranking both; otherwise the lower label index goes first. The
/// comparator need not be transitive, so the sort is hand-rolled to stay
/// deterministic. Scores are the number of pairwise majorities each label wins.
pub fn condorcet_fuse(lr: &LocalRankings) -> GlobalRanking {
    let n = lr.n;
    let wins = lr.pairwise_wins();
    let precedes = |a: usize, b: usize| -> bool {
        if LocalRankings::majority(&wins, n, a, b) {
            true
        } else if LocalRankings::majority(&wins, n, b, a) {
            false
        } else {
            a < b
        }
    };
    let order = merge_sort((0..n).collect(), &precedes);
    let scores = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| b != a && LocalRankings::majority(&wins, n, a, b))
                .count() as f64
        })
        .collect();
    GlobalRanking { order, scores }
}

fn merge_sort(items: Vec<usize>, precedes: &impl Fn(usize, usize) -> bool) -> Vec<usize> {
    if items.len() <= 1 {
        return items;
    }
    let mut left = items;
    let right = left.split_off(left.len() / 2);
    let left = merge_sort(left, precedes);
    let right = merge_sort(right, precedes);
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        // take from the right only when it strictly precedes: keeps the sort stable
        if precedes(right[j], left[i]) && !precedes(left[i], right[j]) {
            out.push(right[j]);
            j += 1;
        } else {
            out.push(left[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&left[i..]);
    out.extend_from_slice(&right[j..]);
    out
}

pub const MC4_PERTURBATION: f64 = 1e-6;
pub const MC4_TOLERANCE: f64 = 1e-9;
pub const MC4_MAX_ITERATIONS: usize = 10_000;

/// Convergence report for [`mc4_fuse_with_status`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mc4Status {
    pub converged: bool,
    pub iterations: usize,
}

/// MC4 Markov-chain fusion; see [`mc4_fuse_with_status`].
pub fn mc4_fuse(lr: &LocalRankings) -> GlobalRanking {
    mc4_fuse_with_status(lr).0
}

/// MC4 Markov-chain fusion.
///
/// From label `i` the chain proposes a label `j` uniformly at random and moves
/// there if `j` is ranked above `i` in a strict majority of the rows ranking
/// both. The chain is mixed with a uniform jump of weight
/// [`MC4_PERTURBATION`] and power-iterated from the uniform distribution until
/// the L1 change drops below [`MC4_TOLERANCE`]. Labels are ordered by
/// descending stationary mass. When the iteration cap is hit the last iterate
/// is used and the status says so.
pub fn mc4_fuse_with_status(lr: &LocalRankings) -> (GlobalRanking, Mc4Status) {
    let n = lr.n;
    if n == 0 {
        let status = Mc4Status {
            converged: true,
            iterations: 0,
        };
        return (
            GlobalRanking {
                order: vec![],
                scores: vec![],
            },
            status,
        );
    }
    let wins = lr.pairwise_wins();
    let nf = n as f64;
    // beaten_by[j] lists the states i that move to j (j beats i)
    let beaten_by: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| i != j && LocalRankings::majority(&wins, n, j, i))
                .collect()
        })
        .collect();
    let stay: Vec<f64> = (0..n)
        .map(|i| {
            let leaving = (0..n)
                .filter(|&j| j != i && LocalRankings::majority(&wins, n, j, i))
                .count();
            1.0 - leaving as f64 / nf
        })
        .collect();

    let eps = MC4_PERTURBATION;
    let mut pi = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut status = Mc4Status {
        converged: false,
        iterations: 0,
    };
    while status.iterations < MC4_MAX_ITERATIONS {
        status.iterations += 1;
        for j in 0..n {
            let inflow: f64 = beaten_by[j].iter().map(|&i| pi[i]).sum::<f64>() / nf;
            next[j] = (1.0 - eps) * (pi[j] * stay[j] + inflow) + eps / nf;
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|p| *p /= total);
        let delta: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if delta < MC4_TOLERANCE {
            status.converged = true;
            break;
        }
    }
    let order = order_by(n, |a, b| pi[b].total_cmp(&pi[a]));
    (GlobalRanking { order, scores: pi }, status)
}

/// Rank-fusion algorithm used to build global rankings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMethod {
    #[default]
    Reciprocal,
    Borda,
    Condorcet,
    Mc4,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 4] = [
        FusionMethod::Reciprocal,
        FusionMethod::Borda,
        FusionMethod::Condorcet,
        FusionMethod::Mc4,
    ];

    pub fn fuse(self, lr: &LocalRankings) -> GlobalRanking {
        match self {
            FusionMethod::Reciprocal => reciprocal_fuse(lr),
            FusionMethod::Borda => borda_fuse(lr),
            FusionMethod::Condorcet => condorcet_fuse(lr),
            FusionMethod::Mc4 => mc4_fuse(lr),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FusionMethod::Reciprocal => "reciprocal",
            FusionMethod::Borda => "borda",
            FusionMethod::Condorcet => "condorcet",
            FusionMethod::Mc4 => "mc4",
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FusionMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown fusion method '{s}'")))
    }
}

/// WS rank-similarity between two global rankings of the same labels.
///
/// With `p` and `q` the zero-based positions of label `i` in `new` and `old`:
///
/// `C = 1 - Σ_i 2^(-p) · |p - q| / max(|1 - p|, |n - p|)`
///
/// Weights and denominators come from `new`. `C = 1` exactly when the
/// rankings agree; for `n ≥ 2` the value is always above `-1`.
pub fn ws_coefficient(new: &GlobalRanking, old: &GlobalRanking) -> Result<f64> {
    let n = new.label_count();
    if old.label_count() != n {
        return Err(Error::input(format!(
            "rankings cover {n} and {} labels",
            old.label_count()
        )));
    }
    new.check_permutation()?;
    old.check_permutation()?;
    let pos_new = new.positions();
    let pos_old = old.positions();
    let nf = n as f64;
    let penalty: f64 = pos_new
        .iter()
        .zip(&pos_old)
        .map(|(&p, &q)| {
            if p == q {
                return 0.0;
            }
            let p = p as f64;
            let distance = (p - q as f64).abs();
            let scale = (1.0 - p).abs().max((nf - p).abs());
            (-p).exp2() * distance / scale
        })
        .sum();
    Ok(1.0 - penalty)
}
