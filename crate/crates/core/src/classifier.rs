//! Incremental multi-label classifier: a chain of binary Gaussian naive Bayes
//! links.
//!
//! Link `j` predicts label `j` from the feature vector extended with labels
//! `0..j`. Training uses the true previous labels; prediction feeds each
//! link's output into the next.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// Relative variance floor, scaled by the largest pooled feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

/// One-pass per-feature mean and sum of squared deviations (Welford).
#[derive(Clone, Debug, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningStats {
    pub fn new(dims: usize) -> Self {
        RunningStats {
            count: 0,
            mean: vec![0.0; dims],
            m2: vec![0.0; dims],
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Sum of squared deviations from the mean, per feature.
    pub fn sum_sq_dev(&self) -> &[f64] {
        &self.m2
    }

    /// Population variance of feature `f` (0 before any sample).
    pub fn variance(&self, f: usize) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m2[f] / self.count as f64
        }
    }

    fn clear(&mut self) {
        self.count = 0;
        self.mean.iter_mut().for_each(|v| *v = 0.0);
        self.m2.iter_mut().for_each(|v| *v = 0.0);
    }
}

#[derive(Clone, Debug, PartialEq)]
struct ClassModel {
    stats: RunningStats,
    // ln of the unfloored variance per feature, refreshed on every push
    ln_var: Vec<f64>,
}

impl ClassModel {
    fn new(dims: usize) -> Self {
        ClassModel {
            stats: RunningStats::new(dims),
            ln_var: vec![f64::NEG_INFINITY; dims],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.stats.push(x);
        let n = self.stats.count as f64;
        for (l, &s) in self.ln_var.iter_mut().zip(&self.stats.m2) {
            *l = (s / n).ln();
        }
    }

    fn clear(&mut self) {
        self.stats.clear();
        self.ln_var.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
    }

    /// Log prior plus Gaussian log-likelihood, dropping the shared `-ln(2π)/2` terms.
    fn log_joint(&self, x: &[f64], floor: f64, ln_floor: f64, log_prior: f64) -> f64 {
        let n = self.stats.count as f64;
        let mut acc = log_prior;
        for (f, &v) in x.iter().enumerate() {
            let raw = self.stats.m2[f] / n;
            let (var, ln_var) = if raw < floor {
                (floor, ln_floor)
            } else {
                (raw, self.ln_var[f])
            };
            let d = v - self.stats.mean[f];
            acc -= 0.5 * (ln_var + d * d / var);
        }
        acc
    }
}

/// Binary Gaussian naive Bayes with per-class running statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianLink {
    dims: usize,
    classes: [ClassModel; 2],
    pooled: RunningStats,
}

impl GaussianLink {
    pub fn new(dims: usize) -> Self {
        GaussianLink {
            dims,
            classes: [ClassModel::new(dims), ClassModel::new(dims)],
            pooled: RunningStats::new(dims),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Statistics of the samples seen with target `class`.
    pub fn class_stats(&self, class: bool) -> &RunningStats {
        &self.classes[usize::from(class)].stats
    }

    pub fn partial_fit(&mut self, x: &[f64], target: bool) {
        debug_assert_eq!(x.len(), self.dims);
        self.classes[usize::from(target)].push(x);
        self.pooled.push(x);
    }

    /// Variance floor: a fraction of the largest pooled feature variance.
    pub fn variance_floor(&self) -> f64 {
        let max = (0..self.dims)
            .map(|f| self.pooled.variance(f))
            .fold(0.0, f64::max);
        VAR_SMOOTHING * if max > 0.0 { max } else { 1.0 }
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        let [neg, pos] = &self.classes;
        match (neg.stats.count, pos.stats.count) {
            (0, 0) => false,
            (_, 0) => false,
            (0, _) => true,
            (c0, c1) => {
                let total = (c0 + c1) as f64;
                let floor = self.variance_floor();
                let ln_floor = floor.ln();
                let lp0 = ((c0 as f64 + 1.0) / (total + 2.0)).ln();
                let lp1 = ((c1 as f64 + 1.0) / (total + 2.0)).ln();
                let score0 = neg.log_joint(x, floor, ln_floor, lp0);
                let score1 = pos.log_joint(x, floor, ln_floor, lp1);
                score1 > score0
            }
        }
    }

    /// Full log joint (including the `2π` normaliser) for one class.
    pub fn log_joint(&self, x: &[f64], class: bool) -> f64 {
        let model = &self.classes[usize::from(class)];
        let total = (self.classes[0].stats.count + self.classes[1].stats.count) as f64;
        let prior = ((model.stats.count as f64 + 1.0) / (total + 2.0)).ln();
        let floor = self.variance_floor();
        model.log_joint(x, floor, floor.ln(), prior) - 0.5 * self.dims as f64 * (2.0 * PI).ln()
    }

    pub fn reset(&mut self) {
        self.classes.iter_mut().for_each(ClassModel::clear);
        self.pooled.clear();
    }
}

/// Classifier chain over `labels` binary links in natural label order.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierChain {
    features: usize,
    links: Vec<GaussianLink>,
}

impl ClassifierChain {
    pub fn new(features: usize, labels: usize) -> Self {
        ClassifierChain {
            features,
            links: (0..labels)
                .map(|j| GaussianLink::new(features + j))
                .collect(),
        }
    }

    pub fn feature_count(&self) -> usize {
        self.features
    }

    pub fn label_count(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, j: usize) -> &GaussianLink {
        &self.links[j]
    }

    fn check_features(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.features {
            return Err(Error::input(format!(
                "feature vector has length {}, expected {}",
                x.len(),
                self.features
            )));
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<LabelVector> {
        self.check_features(x)?;
        let mut input = Vec::with_capacity(self.features + self.links.len());
        input.extend_from_slice(x);
        let mut out = LabelVector::zeros(self.links.len());
        for (j, link) in self.links.iter().enumerate() {
            let bit = link.predict(&input);
            out.set(j, bit);
            input.push(if bit { 1.0 } else { 0.0 });
        }
        Ok(out)
    }

    /// Trains every link on one instance, feeding the true previous labels.
    pub fn partial_fit(&mut self, x: &[f64], y: &LabelVector) -> Result<()> {
        self.check_features(x)?;
        y.check_len(self.links.len())?;
        let mut input = Vec::with_capacity(self.features + self.links.len());
        input.extend_from_slice(x);
        for (j, link) in self.links.iter_mut().enumerate() {
            let target = y.get(j);
            link.partial_fit(&input, target);
            input.push(if target { 1.0 } else { 0.0 });
        }
        Ok(())
    }

    /// Forgets all training; dimensions are kept.
    pub fn reset(&mut self) {
        self.links.iter_mut().for_each(GaussianLink::reset);
    }
}
