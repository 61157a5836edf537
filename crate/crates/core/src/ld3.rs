//! The label-dependency drift detector.
//!
//! Predicted label vectors are buffered in two consecutive windows. Once
//! both are full, each window's co-occurrence matrix is turned into a global
//! label ranking and the two rankings are compared with the WS coefficient.
//! The coefficients are kept in a third window; a coefficient lying more than
//! `t` standard deviations below the window mean counts as an anomaly, and
//! more than `L` anomalies signal drift, after which all windows are cleared.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelVector;
use crate::rankfusion::{local_rankings, ws_coefficient, CooccurrenceMatrix, FusionMethod};

/// Detector hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ld3Config {
    /// Capacity of each of the three windows.
    pub window: usize,
    /// Standard-deviation multiplier for the anomaly test.
    pub sigma: f64,
    /// Drift is signalled when the anomaly count exceeds this.
    pub max_anomalies: usize,
    pub fusion: FusionMethod,
}

impl Default for Ld3Config {
    fn default() -> Self {
        Ld3Config {
            window: 500,
            sigma: 4.0,
            max_anomalies: 0,
            fusion: FusionMethod::Reciprocal,
        }
    }
}

impl Ld3Config {
    /// Recommended window for short or sparsely sampled streams.
    pub const SHORT_STREAM_WINDOW: usize = 50;

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::config(format!(
                "window must be at least 2, got {}",
                self.window
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::config(format!(
                "sigma multiplier must be positive and finite, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Outcome of one detector update.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct DriftSignal {
    pub drift: bool,
    /// Rank correlation computed this step; present iff both label windows were full.
    pub correlation: Option<f64>,
    /// Anomalies in the correlation window; present iff that window was full.
    pub anomaly_count: Option<usize>,
}

/// Number of values lying strictly below `mean - t * std` (population std).
///
/// A window whose values are all equal has no anomalies.
pub fn sigma_rule(values: &[f64], t: f64) -> usize {
    if values.is_empty() {
        return 0;
    }
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if min == max {
        return 0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let threshold = mean - t * var.sqrt();
    values.iter().filter(|&&v| v < threshold).count()
}

/// Streaming detector state: the new, old and correlation windows.
#[derive(Clone, Debug)]
pub struct Ld3 {
    config: Ld3Config,
    labels: usize,
    new_window: VecDeque<LabelVector>,
    old_window: VecDeque<LabelVector>,
    correlations: VecDeque<f64>,
    // kept in step with the label windows
    new_counts: CooccurrenceMatrix,
    old_counts: CooccurrenceMatrix,
}

impl Ld3 {
    pub fn new(config: Ld3Config, labels: usize) -> Result<Self> {
        config.validate()?;
        if labels < 2 {
            return Err(Error::config(format!(
                "need at least 2 labels, got {labels}"
            )));
        }
        let w = config.window;
        Ok(Ld3 {
            config,
            labels,
            new_window: VecDeque::with_capacity(w + 1),
            old_window: VecDeque::with_capacity(w + 1),
            correlations: VecDeque::with_capacity(w + 1),
            new_counts: CooccurrenceMatrix::zeros(labels),
            old_counts: CooccurrenceMatrix::zeros(labels),
        })
    }

    pub fn config(&self) -> &Ld3Config {
        &self.config
    }

    pub fn label_count(&self) -> usize {
        self.labels
    }

    pub fn new_window(&self) -> &VecDeque<LabelVector> {
        &self.new_window
    }

    pub fn old_window(&self) -> &VecDeque<LabelVector> {
        &self.old_window
    }

    pub fn correlations(&self) -> &VecDeque<f64> {
        &self.correlations
    }

    pub fn is_empty(&self) -> bool {
        self.new_window.is_empty() && self.old_window.is_empty() && self.correlations.is_empty()
    }

    /// Feeds one predicted label vector.
    ///
    /// On a length mismatch the state is left untouched.
    pub fn update(&mut self, labels: &LabelVector) -> Result<DriftSignal> {
        labels.check_len(self.labels)?;
        let w = self.config.window;
        let mut signal = DriftSignal::default();

        self.new_window.push_back(labels.clone());
        self.new_counts.add(labels)?;
        if self.new_window.len() > w {
            let evicted = self.new_window.pop_front().expect("window over capacity");
            self.new_counts.remove(&evicted)?;
            self.old_counts.add(&evicted)?;
            self.old_window.push_back(evicted);
            if self.old_window.len() > w {
                let gone = self.old_window.pop_front().expect("window over capacity");
                self.old_counts.remove(&gone)?;
            }
        }

        if self.new_window.len() < w || self.old_window.len() < w {
            return Ok(signal);
        }

        let fusion = self.config.fusion;
        let ranking_new = fusion.fuse(&local_rankings(&self.new_counts));
        let ranking_old = fusion.fuse(&local_rankings(&self.old_counts));
        let c = ws_coefficient(&ranking_new, &ranking_old)?;
        signal.correlation = Some(c);

        self.correlations.push_back(c);
        if self.correlations.len() > w {
            self.correlations.pop_front();
        }
        if self.correlations.len() < w {
            return Ok(signal);
        }

        let anomalies = sigma_rule(self.correlations.make_contiguous(), self.config.sigma);
        signal.anomaly_count = Some(anomalies);
        if anomalies > self.config.max_anomalies {
            signal.drift = true;
            self.reset();
        }
        Ok(signal)
    }

    /// Clears all three windows, as after a drift.
    pub fn reset(&mut self) {
        self.new_window.clear();
        self.old_window.clear();
        self.correlations.clear();
        self.new_counts.clear();
        self.old_counts.clear();
    }
}
