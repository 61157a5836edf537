//! Supervised error-rate drift detectors (DDM and EDDM).
//!
//! Both consume the exact-match correctness bit of each prediction and keep
//! only constant-size running statistics.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::labels::LabelVector;

/// Whether a prediction matched the true label vector exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSignal {
    pub correct: bool,
}

impl ErrorSignal {
    pub fn is_error(self) -> bool {
        !self.correct
    }
}

/// Exact-match correctness: every label must agree.
pub fn exact_match(pred: &LabelVector, truth: &LabelVector) -> Result<ErrorSignal> {
    truth.check_len(pred.len())?;
    Ok(ErrorSignal {
        correct: pred == truth,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    #[default]
    Stable,
    Warning,
    Drift,
}

impl Phase {
    pub fn is_drift(self) -> bool {
        self == Phase::Drift
    }
}

/// Drift Detection Method.
///
/// Tracks the running error rate `p` and `s = sqrt(p(1-p)/i)`, remembers the
/// `(p, s)` pair with the smallest `p + s`, and warns or signals drift when
/// `p + s` exceeds that minimum by 2 or 3 of its `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ddm {
    samples: u64,
    errors: u64,
    error_rate: f64,
    p_min: f64,
    s_min: f64,
    phase: Phase,
}

impl Default for Ddm {
    fn default() -> Self {
        Ddm {
            samples: 0,
            errors: 0,
            error_rate: 0.0,
            p_min: f64::INFINITY,
            s_min: f64::INFINITY,
            phase: Phase::Stable,
        }
    }
}

impl Ddm {
    pub const MIN_SAMPLES: u64 = 30;
    pub const WARNING_LEVEL: f64 = 2.0;
    pub const DRIFT_LEVEL: f64 = 3.0;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn error_rate(&self) -> f64 {
        self.error_rate
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn update(&mut self, signal: ErrorSignal) -> Phase {
        self.samples += 1;
        let i = self.samples as f64;
        self.errors += u64::from(signal.is_error());
        self.error_rate = self.errors as f64 / i;
        let p = self.error_rate;
        let s = (p * (1.0 - p) / i).sqrt();

        if self.samples < Self::MIN_SAMPLES {
            self.phase = Phase::Stable;
            return self.phase;
        }
        if p + s <= self.p_min + self.s_min {
            self.p_min = p;
            self.s_min = s;
        }
        self.phase = if p + s > self.p_min + Self::DRIFT_LEVEL * self.s_min {
            Phase::Drift
        } else if p + s > self.p_min + Self::WARNING_LEVEL * self.s_min {
            Phase::Warning
        } else {
            Phase::Stable
        };
        if self.phase.is_drift() {
            self.reset();
            return Phase::Drift;
        }
        self.phase
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// Early Drift Detection Method.
///
/// Tracks the mean `p'` and standard deviation `s'` of the distance (in
/// samples) between consecutive errors and the maximum of `p' + 2s'`. A
/// drop of that quantity below 95% of its maximum is a warning, below 90%
/// a drift.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Eddm {
    samples: u64,
    errors: u64,
    last_error: u64,
    mean_gap: f64,
    gap_m2: f64,
    max_level: f64,
    phase: Phase,
}

impl Eddm {
    pub const MIN_SAMPLES: u64 = 30;
    pub const MIN_ERRORS: u64 = 30;
    pub const WARNING_RATIO: f64 = 0.95;
    pub const DRIFT_RATIO: f64 = 0.90;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn errors(&self) -> u64 {
        self.errors
    }

    pub fn update(&mut self, signal: ErrorSignal) -> Phase {
        self.samples += 1;
        if !signal.is_error() {
            return self.phase;
        }
        self.errors += 1;
        let gap = (self.samples - self.last_error) as f64;
        self.last_error = self.samples;

        let k = self.errors as f64;
        let old_mean = self.mean_gap;
        self.mean_gap += (gap - old_mean) / k;
        self.gap_m2 += (gap - old_mean) * (gap - self.mean_gap);
        let level = self.mean_gap + 2.0 * (self.gap_m2 / k).sqrt();

        if self.samples < Self::MIN_SAMPLES {
            self.phase = Phase::Stable;
            return self.phase;
        }
        if level > self.max_level {
            self.max_level = level;
            self.phase = Phase::Stable;
            return self.phase;
        }
        if self.errors < Self::MIN_ERRORS {
            self.phase = Phase::Stable;
            return self.phase;
        }
        let ratio = level / self.max_level;
        self.phase = if ratio < Self::DRIFT_RATIO {
            Phase::Drift
        } else if ratio < Self::WARNING_RATIO {
            Phase::Warning
        } else {
            Phase::Stable
        };
        if self.phase.is_drift() {
            self.reset();
            return Phase::Drift;
        }
        self.phase
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}
