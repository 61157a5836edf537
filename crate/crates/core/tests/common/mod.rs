//! Straight-line reference implementations used as test oracles.
//!
//! Nothing here calls into the crate's algorithms: matrices are recounted
//! from scratch, reciprocal scores use exact rationals, and the detectors are
//! replayed with plain variables.

#![allow(dead_code)]

use std::collections::VecDeque;

use num_rational::Ratio;

pub type Bits = Vec<u8>;

pub fn cooccurrence(window: &[Bits], n: usize) -> Vec<Vec<u32>> {
    let mut m = vec![vec![0u32; n]; n];
    for row in window {
        let ones: Vec<usize> = (0..n).filter(|&i| row[i] == 1).collect();
        for &i in &ones {
            for &j in &ones {
                if i != j {
                    m[i][j] += 1;
                }
            }
        }
    }
    m
}

/// `ranks[i][j]`: competition rank row `i` gives label `j` (None for `j == i`).
pub fn local_ranks(m: &[Vec<u32>]) -> Vec<Vec<Option<u32>>> {
    let n = m.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return None;
                    }
                    let better = (0..n).filter(|&k| k != i && m[i][k] > m[i][j]).count();
                    Some(better as u32 + 1)
                })
                .collect()
        })
        .collect()
}

/// Exact reciprocal-rank scores and the induced order (ascending score, then index).
pub fn reciprocal(ranks: &[Vec<Option<u32>>]) -> (Vec<Ratio<i128>>, Vec<usize>) {
    let n = ranks.len();
    let scores: Vec<Ratio<i128>> = (0..n)
        .map(|i| {
            let mut sum = Ratio::from_integer(0i128);
            for row in ranks {
                if let Some(r) = row[i] {
                    sum += Ratio::new(1, r as i128);
                }
            }
            Ratio::from_integer(1) / sum
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    // insertion sort keeps equal scores in index order
    for a in 1..n {
        let mut b = a;
        while b > 0 && scores[order[b]] < scores[order[b - 1]] {
            order.swap(b, b - 1);
            b -= 1;
        }
    }
    (scores, order)
}

/// WS coefficient, term by term, zero-based positions, weights from `new`.
pub fn ws(order_new: &[usize], order_old: &[usize]) -> f64 {
    let n = order_new.len();
    let mut pos_new = vec![0usize; n];
    let mut pos_old = vec![0usize; n];
    for p in 0..n {
        pos_new[order_new[p]] = p;
        pos_old[order_old[p]] = p;
    }
    let mut total = 0.0;
    for i in 0..n {
        let x = pos_new[i] as f64;
        let y = pos_old[i] as f64;
        let weight = 2f64.powi(-(pos_new[i] as i32));
        let denom = f64::max((1.0 - x).abs(), (n as f64 - x).abs());
        total += weight * (x - y).abs() / denom;
    }
    1.0 - total
}

pub fn sigma_count(values: &[f64], t: f64) -> usize {
    if values.iter().all(|&v| v == values[0]) {
        return 0;
    }
    let n = values.len() as f64;
    let mut mean = 0.0;
    for v in values {
        mean += v;
    }
    mean /= n;
    let mut var = 0.0;
    for v in values {
        var += (v - mean) * (v - mean);
    }
    var /= n;
    let mut count = 0;
    for &v in values {
        if v < mean - t * var.sqrt() {
            count += 1;
        }
    }
    count
}

/// Step-by-step replay of the detector with every matrix recomputed from the windows.
pub struct OracleLd3 {
    pub w: usize,
    pub t: f64,
    pub max_anomalies: usize,
    pub n: usize,
    pub new: VecDeque<Bits>,
    pub old: VecDeque<Bits>,
    pub corr: VecDeque<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleStep {
    pub drift: bool,
    pub correlation: Option<f64>,
}

impl OracleLd3 {
    pub fn new(w: usize, t: f64, max_anomalies: usize, n: usize) -> Self {
        OracleLd3 {
            w,
            t,
            max_anomalies,
            n,
            new: VecDeque::new(),
            old: VecDeque::new(),
            corr: VecDeque::new(),
        }
    }

    pub fn step(&mut self, labels: &[u8]) -> OracleStep {
        self.new.push_back(labels.to_vec());
        if self.new.len() > self.w {
            let evicted = self.new.pop_front().unwrap();
            self.old.push_back(evicted);
            if self.old.len() > self.w {
                self.old.pop_front();
            }
        }
        if self.new.len() != self.w || self.old.len() != self.w {
            return OracleStep {
                drift: false,
                correlation: None,
            };
        }
        let new: Vec<Bits> = self.new.iter().cloned().collect();
        let old: Vec<Bits> = self.old.iter().cloned().collect();
        let (_, order_new) = reciprocal(&local_ranks(&cooccurrence(&new, self.n)));
        let (_, order_old) = reciprocal(&local_ranks(&cooccurrence(&old, self.n)));
        let c = ws(&order_new, &order_old);
        self.corr.push_back(c);
        if self.corr.len() > self.w {
            self.corr.pop_front();
        }
        let mut drift = false;
        if self.corr.len() == self.w {
            let values: Vec<f64> = self.corr.iter().copied().collect();
            if sigma_count(&values, self.t) > self.max_anomalies {
                drift = true;
                self.new.clear();
                self.old.clear();
                self.corr.clear();
            }
        }
        OracleStep {
            drift,
            correlation: Some(c),
        }
    }
}

/// 0 = stable, 1 = warning, 2 = drift, per input bit (`true` = error).
pub fn ddm_phases(errors: &[bool]) -> Vec<u8> {
    let mut out = Vec::with_capacity(errors.len());
    let mut i = 0u64;
    let mut wrong = 0u64;
    let mut best = f64::INFINITY;
    let mut best_p = f64::INFINITY;
    let mut best_s = f64::INFINITY;
    for &e in errors {
        i += 1;
        if e {
            wrong += 1;
        }
        let p = wrong as f64 / i as f64;
        let s = (p * (1.0 - p) / i as f64).sqrt();
        if i < 30 {
            out.push(0);
            continue;
        }
        if p + s <= best {
            best = p + s;
            best_p = p;
            best_s = s;
        }
        if p + s > best_p + 3.0 * best_s {
            out.push(2);
            i = 0;
            wrong = 0;
            best = f64::INFINITY;
            best_p = f64::INFINITY;
            best_s = f64::INFINITY;
        } else if p + s > best_p + 2.0 * best_s {
            out.push(1);
        } else {
            out.push(0);
        }
    }
    out
}

pub fn eddm_phases(errors: &[bool]) -> Vec<u8> {
    let mut out = Vec::with_capacity(errors.len());
    let mut i = 0u64;
    let mut last = 0u64;
    let mut gaps: Vec<f64> = Vec::new();
    let mut max_level = 0.0f64;
    let mut phase = 0u8;
    for &e in errors {
        i += 1;
        if !e {
            out.push(phase);
            continue;
        }
        gaps.push((i - last) as f64);
        last = i;
        let k = gaps.len() as f64;
        let mean = gaps.iter().sum::<f64>() / k;
        let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / k;
        let level = mean + 2.0 * var.sqrt();
        if i < 30 {
            phase = 0;
        } else if level > max_level {
            max_level = level;
            phase = 0;
        } else if gaps.len() < 30 {
            phase = 0;
        } else {
            let ratio = level / max_level;
            phase = if ratio < 0.90 {
                2
            } else if ratio < 0.95 {
                1
            } else {
                0
            };
        }
        out.push(phase);
        if phase == 2 {
            i = 0;
            last = 0;
            gaps.clear();
            max_level = 0.0;
            phase = 0;
        }
    }
    out
}

/// Batch mean and population variance of column `f`.
pub fn batch_stats(rows: &[Vec<f64>], f: usize) -> (f64, f64) {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|r| r[f]).sum::<f64>() / n;
    let var = rows.iter().map(|r| (r[f] - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Small deterministic PRNG (SplitMix64) for test inputs.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
