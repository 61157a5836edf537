//! Prequential evaluation, multi-label metrics and cross-detector ranking.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{exact_match, Ddm, Eddm, ErrorSignal};
use crate::classifier::ClassifierChain;
use crate::error::{Error, Result};
use crate::labels::LabelVector;
use crate::ld3::{Ld3, Ld3Config};
use crate::streams::Instance;

pub const DEFAULT_SEGMENTS: usize = 25;

/// Running sums behind the four multi-label metrics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricAccumulator {
    instances: u64,
    accuracy: f64,
    hamming_loss: f64,
    precision: f64,
    recall: f64,
    tp: u64,
    fp: u64,
    fn_: u64,
}

impl MetricAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, pred: &LabelVector, truth: &LabelVector) -> Result<()> {
        truth.check_len(pred.len())?;
        let (mut inter, mut p, mut t) = (0u64, 0u64, 0u64);
        for (&a, &b) in pred.bits().iter().zip(truth.bits()) {
            let (a, b) = (a == 1, b == 1);
            inter += u64::from(a && b);
            p += u64::from(a);
            t += u64::from(b);
        }
        let union = p + t - inter;
        let sym_diff = union - inter;

        self.instances += 1;
        self.accuracy += if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        };
        if !pred.is_empty() {
            self.hamming_loss += sym_diff as f64 / pred.len() as f64;
        }
        // empty-empty counts as a perfect instance; otherwise an empty side scores 0
        let (prec, rec) = match (p, t) {
            (0, 0) => (1.0, 1.0),
            (0, _) => (0.0, 0.0),
            (_, 0) => (0.0, 0.0),
            _ => (inter as f64 / p as f64, inter as f64 / t as f64),
        };
        self.precision += prec;
        self.recall += rec;
        self.tp += inter;
        self.fp += p - inter;
        self.fn_ += t - inter;
        Ok(())
    }

    pub fn instances(&self) -> u64 {
        self.instances
    }

    fn mean(&self, sum: f64) -> f64 {
        if self.instances == 0 {
            0.0
        } else {
            sum / self.instances as f64
        }
    }

    pub fn example_accuracy(&self) -> f64 {
        self.mean(self.accuracy)
    }

    pub fn hamming_score(&self) -> f64 {
        if self.instances == 0 {
            return 0.0;
        }
        1.0 - self.mean(self.hamming_loss)
    }

    pub fn example_precision(&self) -> f64 {
        self.mean(self.precision)
    }

    pub fn example_recall(&self) -> f64 {
        self.mean(self.recall)
    }

    /// Harmonic mean of the averaged example precision and recall.
    pub fn example_f1(&self) -> f64 {
        let (p, r) = (self.example_precision(), self.example_recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// `2TP / (2TP + FN + FP)` over counts pooled across labels; 0 for an empty pool.
    pub fn micro_f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fn_ + self.fp;
        if denom == 0 {
            0.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }
}

fn accumulate(preds: &[LabelVector], truths: &[LabelVector]) -> Result<MetricAccumulator> {
    if preds.len() != truths.len() {
        return Err(Error::input(format!(
            "{} predictions for {} truths",
            preds.len(),
            truths.len()
        )));
    }
    let mut acc = MetricAccumulator::new();
    for (p, t) in preds.iter().zip(truths) {
        acc.add(p, t)?;
    }
    Ok(acc)
}

/// Mean Jaccard similarity of predicted and true labelsets (empty vs empty = 1).
pub fn example_accuracy(preds: &[LabelVector], truths: &[LabelVector]) -> Result<f64> {
    Ok(accumulate(preds, truths)?.example_accuracy())
}

/// One minus the mean fraction of wrong label bits.
pub fn hamming_score(preds: &[LabelVector], truths: &[LabelVector]) -> Result<f64> {
    Ok(accumulate(preds, truths)?.hamming_score())
}

pub fn example_f1(preds: &[LabelVector], truths: &[LabelVector]) -> Result<f64> {
    Ok(accumulate(preds, truths)?.example_f1())
}

pub fn micro_f1(preds: &[LabelVector], truths: &[LabelVector]) -> Result<f64> {
    Ok(accumulate(preds, truths)?.micro_f1())
}

/// Which drift detector accompanies the classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DetectorConfig {
    None,
    Ld3(Ld3Config),
    Ddm,
    Eddm,
}

impl DetectorConfig {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorConfig::None => "none",
            DetectorConfig::Ld3(_) => "ld3",
            DetectorConfig::Ddm => "ddm",
            DetectorConfig::Eddm => "eddm",
        }
    }

    /// Name plus hyperparameters, e.g. `ld3(w=500,t=4,L=0,reciprocal)`.
    pub fn label(&self) -> String {
        match self {
            DetectorConfig::Ld3(c) => format!(
                "ld3(w={},t={},L={},{})",
                c.window, c.sigma, c.max_anomalies, c.fusion
            ),
            other => other.name().to_string(),
        }
    }

    pub fn build(&self, labels: usize) -> Result<Detector> {
        Ok(match self {
            DetectorConfig::None => Detector::None,
            DetectorConfig::Ld3(c) => Detector::Ld3(Box::new(Ld3::new(*c, labels)?)),
            DetectorConfig::Ddm => Detector::Ddm(Ddm::new()),
            DetectorConfig::Eddm => Detector::Eddm(Eddm::new()),
        })
    }
}

impl fmt::Display for DetectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for DetectorConfig {
    type Err = Error;

    /// Parses a bare detector name; LD3 gets default hyperparameters.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "nd" => Ok(DetectorConfig::None),
            "ld3" => Ok(DetectorConfig::Ld3(Ld3Config::default())),
            "ddm" => Ok(DetectorConfig::Ddm),
            "eddm" => Ok(DetectorConfig::Eddm),
            _ => Err(Error::config(format!("unknown detector '{s}'"))),
        }
    }
}

/// A live detector.
#[derive(Clone, Debug)]
pub enum Detector {
    None,
    Ld3(Box<Ld3>),
    Ddm(Ddm),
    Eddm(Eddm),
}

impl Detector {
    /// Feeds one prediction; returns true on drift. LD3 sees the predicted
    /// labels, DDM and EDDM the exact-match bit. Detectors clear themselves
    /// on drift.
    pub fn observe(&mut self, pred: &LabelVector, correct: ErrorSignal) -> Result<bool> {
        Ok(match self {
            Detector::None => false,
            Detector::Ld3(d) => d.update(pred)?.drift,
            Detector::Ddm(d) => d.update(correct).is_drift(),
            Detector::Eddm(d) => d.update(correct).is_drift(),
        })
    }
}

/// One prequential step, as seen by an observer.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<'a> {
    pub index: usize,
    pub prediction: &'a LabelVector,
    pub truth: &'a LabelVector,
    pub correct: bool,
    pub drift: bool,
}

/// Result of one prequential run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub stream: String,
    pub detector: String,
    pub samples: usize,
    pub example_accuracy: f64,
    pub hamming_score: f64,
    pub example_f1: f64,
    pub micro_f1: f64,
    /// Zero-based indices of the samples at which drift was signalled.
    pub drift_positions: Vec<usize>,
    /// Example-based accuracy per consecutive segment; `None` for an empty segment.
    pub segment_series: Vec<Option<f64>>,
}

impl MetricReport {
    /// Canonical JSON rendering (pretty, stable field order, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `segment,start,end,example_accuracy` rows for plotting.
    pub fn segments_csv(&self) -> String {
        let mut out = String::from("segment,start,end,example_accuracy\n");
        let bounds = segment_bounds(self.samples, self.segment_series.len());
        for (k, (value, (start, end))) in self.segment_series.iter().zip(bounds).enumerate() {
            let v = value.map_or(String::new(), |v| v.to_string());
            out.push_str(&format!("{k},{start},{end},{v}\n"));
        }
        out
    }
}

/// Half-open sample ranges of `segments` segments; the last absorbs the remainder.
pub fn segment_bounds(samples: usize, segments: usize) -> Vec<(usize, usize)> {
    let len = samples / segments.max(1);
    (0..segments)
        .map(|k| {
            if len == 0 {
                (k.min(samples), (k + 1).min(samples))
            } else if k + 1 == segments {
                (k * len, samples)
            } else {
                (k * len, (k + 1) * len)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub segments: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            segments: DEFAULT_SEGMENTS,
        }
    }
}

/// Test-then-train over `instances` with drift-triggered classifier reset.
pub fn prequential_run(
    instances: &[Instance],
    model: &mut ClassifierChain,
    detector: &mut Detector,
    options: RunOptions,
) -> Result<MetricReport> {
    prequential_run_with(instances, model, detector, options, |_| {})
}

/// [`prequential_run`] with a callback invoked after every step.
pub fn prequential_run_with<F>(
    instances: &[Instance],
    model: &mut ClassifierChain,
    detector: &mut Detector,
    options: RunOptions,
    mut observer: F,
) -> Result<MetricReport>
where
    F: FnMut(&StepRecord<'_>),
{
    if options.segments == 0 {
        return Err(Error::config("segment count must be positive"));
    }
    let n = instances.len();
    let bounds = segment_bounds(n, options.segments);
    let mut overall = MetricAccumulator::new();
    let mut segment_acc = vec![MetricAccumulator::new(); options.segments];
    let mut segment = 0;
    let mut drift_positions = Vec::new();

    for (i, inst) in instances.iter().enumerate() {
        let at = |e: Error| Error::input(format!("instance {i}: {e}"));
        let pred = model.predict(&inst.features).map_err(at)?;
        overall.add(&pred, &inst.labels).map_err(at)?;
        while segment + 1 < bounds.len() && i >= bounds[segment].1 {
            segment += 1;
        }
        segment_acc[segment].add(&pred, &inst.labels).map_err(at)?;

        let correct = exact_match(&pred, &inst.labels).map_err(at)?;
        let drift = detector.observe(&pred, correct).map_err(at)?;
        if drift {
            drift_positions.push(i);
            model.reset();
        }
        observer(&StepRecord {
            index: i,
            prediction: &pred,
            truth: &inst.labels,
            correct: correct.correct,
            drift,
        });
        model
            .partial_fit(&inst.features, &inst.labels)
            .map_err(at)?;
    }

    Ok(MetricReport {
        stream: String::new(),
        detector: String::new(),
        samples: n,
        example_accuracy: overall.example_accuracy(),
        hamming_score: overall.hamming_score(),
        example_f1: overall.example_f1(),
        micro_f1: overall.micro_f1(),
        drift_positions,
        segment_series: segment_acc
            .iter()
            .map(|a| (a.instances() > 0).then(|| a.example_accuracy()))
            .collect(),
    })
}

/// Tied-average ranks of one column; rank 1 is the best value.
pub fn tied_ranks(values: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        if higher_is_better {
            ord.reverse()
        } else {
            ord
        }
    });
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

/// Per-dataset ranks of each detector and their averages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    /// `ranks[detector][dataset]`.
    pub ranks: Vec<Vec<f64>>,
    pub average: Vec<f64>,
}

/// Ranks detectors (rows of `values`) within each dataset (column) and
/// averages across datasets.
pub fn average_ranks(values: &[Vec<f64>], higher_is_better: bool) -> Result<RankTable> {
    let k = values.len();
    let datasets = values.first().map_or(0, Vec::len);
    if values.iter().any(|row| row.len() != datasets) {
        return Err(Error::input("every detector needs one value per dataset"));
    }
    let mut ranks = vec![vec![0.0; datasets]; k];
    for d in 0..datasets {
        let column: Vec<f64> = values.iter().map(|row| row[d]).collect();
        for (det, r) in tied_ranks(&column, higher_is_better)
            .into_iter()
            .enumerate()
        {
            ranks[det][d] = r;
        }
    }
    let average = ranks
        .iter()
        .map(|row| {
            if datasets == 0 {
                0.0
            } else {
                row.iter().sum::<f64>() / datasets as f64
            }
        })
        .collect();
    Ok(RankTable { ranks, average })
}

// Two-tailed Nemenyi critical values q_alpha for k = 2..=20 classifiers
// (studentized range at infinite degrees of freedom divided by sqrt 2).
const NEMENYI_Q_05: [f64; 19] = [
    1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354,
    3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
];
const NEMENYI_Q_10: [f64; 19] = [
    1.645, 2.052, 2.291, 2.460, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120,
    3.159, 3.196, 3.230, 3.261, 3.291, 3.319,
];

/// Critical value `q_alpha` for `k` algorithms.
pub fn nemenyi_q(alpha: f64, k: usize) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &NEMENYI_Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &NEMENYI_Q_10
    } else {
        return Err(Error::Unsupported(format!(
            "Nemenyi table covers alpha 0.05 and 0.10, not {alpha}"
        )));
    };
    if !(2..=20).contains(&k) {
        return Err(Error::Unsupported(format!(
            "Nemenyi table covers 2 to 20 algorithms, not {k}"
        )));
    }
    Ok(table[k - 2])
}

/// Nemenyi critical distance `q_alpha * sqrt(k(k+1) / (6 K))` for `k`
/// algorithms compared over `datasets` datasets.
pub fn nemenyi_cd(alpha: f64, k: usize, datasets: usize) -> Result<f64> {
    if datasets == 0 {
        return Err(Error::input("need at least one dataset"));
    }
    let q = nemenyi_q(alpha, k)?;
    let kf = k as f64;
    Ok(q * (kf * (kf + 1.0) / (6.0 * datasets as f64)).sqrt())
}
