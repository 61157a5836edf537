//! Stream ingestion and the synthetic drift-stream generator.
//!
//! # Dataset file format
//!
//! ```text
//! # optional comment lines and blank lines are ignored
//! N D n
//! y_1,...,y_n,x_1,...,x_D
//! ...
//! ```
//!
//! The header gives the instance count `N`, feature count `D` and label count
//! `n`, separated by whitespace. Each following line is one instance:
//! `n` labels (`0` or `1`) then `D` real features, comma separated. With
//! `labels_first = false` the features come first. Fields may be padded with
//! spaces. The number of instance lines must equal `N`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// One stream element: features and the true labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub features: Vec<f64>,
    pub labels: LabelVector,
}

/// Dimensions and label statistics of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub samples: usize,
    pub features: usize,
    pub labels: usize,
    /// Mean number of set labels per instance.
    pub cardinality: f64,
    /// `cardinality / labels`.
    pub density: f64,
}

impl DatasetMeta {
    pub fn from_instances<'a, I>(features: usize, labels: usize, instances: I) -> Self
    where
        I: IntoIterator<Item = &'a Instance>,
    {
        let mut samples = 0usize;
        let mut set = 0usize;
        for inst in instances {
            samples += 1;
            set += inst.labels.cardinality();
        }
        let cardinality = if samples == 0 {
            0.0
        } else {
            set as f64 / samples as f64
        };
        let density = if labels == 0 {
            0.0
        } else {
            cardinality / labels as f64
        };
        DatasetMeta {
            samples,
            features,
            labels,
            cardinality,
            density,
        }
    }
}

/// A fully loaded dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub instances: Vec<Instance>,
}

impl IntoIterator for Dataset {
    type Item = Instance;
    type IntoIter = std::vec::IntoIter<Instance>;

    fn into_iter(self) -> Self::IntoIter {
        self.instances.into_iter()
    }
}

/// Reads a dataset file.
///
/// `label_count`, when given, must agree with the header. An empty file is
/// an empty dataset.
pub fn read_dataset(
    path: &Path,
    label_count: Option<usize>,
    labels_first: bool,
) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(BufReader::new(file), path, label_count, labels_first)
}

/// Parses a dataset from any reader; `source` is used in error messages.
pub fn parse_dataset<R: BufRead>(
    reader: R,
    source: &Path,
    label_count: Option<usize>,
    labels_first: bool,
) -> Result<Dataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };

    let mut header: Option<(usize, usize, usize)> = None;
    let mut instances = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let Some((_, d, n)) = header else {
            let fields: Vec<&str> = text.split_whitespace().collect();
            let nums: Vec<usize> = fields
                .iter()
                .map(|f| f.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(lineno, format!("bad header '{text}', expected 'N D n'")))?;
            let [count, d, n] = nums[..] else {
                return Err(parse_err(
                    lineno,
                    format!("bad header '{text}', expected 'N D n'"),
                ));
            };
            if let Some(expected) = label_count {
                if expected != n {
                    return Err(parse_err(
                        lineno,
                        format!("header declares {n} labels, expected {expected}"),
                    ));
                }
            }
            header = Some((count, d, n));
            instances.reserve(count);
            continue;
        };

        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != d + n {
            return Err(parse_err(
                lineno,
                format!(
                    "expected {} fields ({n} labels + {d} features), found {}",
                    d + n,
                    fields.len()
                ),
            ));
        }
        let (label_fields, feature_fields) = if labels_first {
            fields.split_at(n)
        } else {
            let (f, l) = fields.split_at(d);
            (l, f)
        };
        let mut bits = Vec::with_capacity(n);
        for f in label_fields {
            match *f {
                "0" => bits.push(0),
                "1" => bits.push(1),
                other => {
                    return Err(parse_err(lineno, format!("label '{other}' is not 0 or 1")));
                }
            }
        }
        let features = feature_fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| parse_err(lineno, format!("feature '{f}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        instances.push(Instance {
            features,
            labels: LabelVector::new(bits)?,
        });
    }

    let (count, d, n) = match header {
        Some(h) => h,
        None => (0, 0, label_count.unwrap_or(0)),
    };
    if instances.len() != count {
        return Err(parse_err(
            0,
            format!(
                "header declares {count} instances, file has {}",
                instances.len()
            ),
        ));
    }
    let meta = DatasetMeta::from_instances(d, n, &instances);
    Ok(Dataset { meta, instances })
}

/// Writes instances in the dataset format; returns their metadata.
pub fn write_dataset<W: Write>(
    out: W,
    features: usize,
    labels: usize,
    instances: &[Instance],
    labels_first: bool,
) -> std::io::Result<DatasetMeta> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{} {} {}", instances.len(), features, labels)?;
    let mut line = String::new();
    for inst in instances {
        line.clear();
        let labels_str = inst
            .labels
            .bits()
            .iter()
            .map(|b| if *b == 1 { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(",");
        let features_str = inst
            .features
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let (first, second) = if labels_first {
            (labels_str, features_str)
        } else {
            (features_str, labels_str)
        };
        line.push_str(&first);
        if !first.is_empty() && !second.is_empty() {
            line.push(',');
        }
        line.push_str(&second);
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(DatasetMeta::from_instances(features, labels, instances))
}

pub fn write_dataset_file(
    path: &Path,
    features: usize,
    labels: usize,
    instances: &[Instance],
    labels_first: bool,
) -> Result<DatasetMeta> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(file, features, labels, instances, labels_first).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftKind {
    Sudden,
    Incremental,
    /// Concepts alternate, so the third concept equals the first.
    Reoccurring,
}

impl std::str::FromStr for DriftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sudden" => Ok(DriftKind::Sudden),
            "incremental" => Ok(DriftKind::Incremental),
            "reoccurring" | "recurring" => Ok(DriftKind::Reoccurring),
            _ => Err(Error::config(format!("unknown drift kind '{s}'"))),
        }
    }
}

/// Parameters of a synthetic multi-label drift stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftStreamSpec {
    pub samples: usize,
    pub labels: usize,
    pub features: usize,
    pub drift_positions: Vec<usize>,
    pub drift_widths: Vec<usize>,
    pub kind: DriftKind,
    pub seed: u64,
    /// Distinct labelsets per concept.
    pub labelsets: usize,
    /// Mean of the Poisson number of labels added to the first one.
    pub extra_label_mean: f64,
    pub max_cardinality: usize,
    /// Standard deviation of each feature around its cluster centre.
    pub cluster_spread: f64,
}

impl DriftStreamSpec {
    /// 20,000 samples, 50 labels, 200 features, drifts at 4,000 and 10,000.
    /// Sudden streams switch over one sample, the others over 500.
    pub fn benchmark(kind: DriftKind, seed: u64) -> Self {
        let width = match kind {
            DriftKind::Sudden => 1,
            DriftKind::Incremental | DriftKind::Reoccurring => 500,
        };
        DriftStreamSpec {
            samples: 20_000,
            labels: 50,
            features: 200,
            drift_positions: vec![4_000, 10_000],
            drift_widths: vec![width, width],
            kind,
            seed,
            labelsets: 30,
            extra_label_mean: 0.6,
            max_cardinality: 5,
            cluster_spread: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels < 2 {
            return Err(Error::config("synthetic stream needs at least 2 labels"));
        }
        if self.features == 0 {
            return Err(Error::config("synthetic stream needs at least 1 feature"));
        }
        if self.labelsets == 0 {
            return Err(Error::config("each concept needs at least one labelset"));
        }
        if self.drift_positions.len() != self.drift_widths.len() {
            return Err(Error::config(format!(
                "{} drift positions but {} widths",
                self.drift_positions.len(),
                self.drift_widths.len()
            )));
        }
        if self.drift_widths.contains(&0) {
            return Err(Error::config("drift widths must be at least 1"));
        }
        for (k, &p) in self.drift_positions.iter().enumerate() {
            if p == 0 || p >= self.samples {
                return Err(Error::config(format!(
                    "drift position {p} outside (0, {})",
                    self.samples
                )));
            }
            if k > 0 && p <= self.drift_positions[k - 1] {
                return Err(Error::config("drift positions must be strictly increasing"));
            }
        }
        if self.max_cardinality == 0 {
            return Err(Error::config("max cardinality must be at least 1"));
        }
        if !(self.extra_label_mean >= 0.0 && self.extra_label_mean.is_finite()) {
            return Err(Error::config(
                "extra label mean must be finite and non-negative",
            ));
        }
        if !(self.cluster_spread >= 0.0 && self.cluster_spread.is_finite()) {
            return Err(Error::config(
                "cluster spread must be finite and non-negative",
            ));
        }
        Ok(())
    }

    /// Index of the concept definition used by segment `k` (0 before the
    /// first drift).
    pub fn concept_of_segment(&self, k: usize) -> usize {
        match self.kind {
            DriftKind::Reoccurring => k % 2,
            _ => k,
        }
    }

    fn concept_definitions(&self) -> usize {
        match self.kind {
            DriftKind::Reoccurring => 2.min(self.drift_positions.len() + 1),
            _ => self.drift_positions.len() + 1,
        }
    }

    pub fn meta_dims(&self) -> (usize, usize) {
        (self.features, self.labels)
    }
}

/// Probability that sample `i` comes from the concept after a drift at `p`
/// of width `w`. Width 1 is a hard switch at `p`.
pub fn drift_probability(i: usize, p: usize, w: usize) -> f64 {
    if w <= 1 {
        return if i >= p { 1.0 } else { 0.0 };
    }
    let x = -4.0 * (i as f64 - p as f64) / w as f64;
    1.0 / (1.0 + x.exp())
}

#[derive(Clone, Debug)]
struct Concept {
    labelsets: Vec<LabelVector>,
    centres: Vec<Vec<f64>>,
}

impl Concept {
    fn generate(spec: &DriftStreamSpec, rng: &mut ChaCha8Rng) -> Result<Self> {
        let poisson = if spec.extra_label_mean > 0.0 {
            Some(Poisson::new(spec.extra_label_mean).map_err(|e| Error::config(e.to_string()))?)
        } else {
            None
        };
        let cap = spec.max_cardinality.min(spec.labels);
        let mut labelsets = Vec::with_capacity(spec.labelsets);
        let mut centres = Vec::with_capacity(spec.labelsets);
        for _ in 0..spec.labelsets {
            let extra = poisson.as_ref().map_or(0, |p| p.sample(rng) as usize);
            let card = (1 + extra).min(cap);
            let mut picked = index::sample(rng, spec.labels, card).into_vec();
            picked.sort_unstable();
            labelsets.push(LabelVector::from_indices(spec.labels, &picked)?);
            centres.push((0..spec.features).map(|_| rng.random::<f64>()).collect());
        }
        Ok(Concept { labelsets, centres })
    }
}

/// Deterministic synthetic drift stream; see [`DriftStreamSpec`].
///
/// Each concept holds a fixed set of labelsets, each paired with a Gaussian
/// feature cluster. Around every drift the stream draws from the next
/// concept with sigmoid-shaped probability.
#[derive(Clone, Debug)]
pub struct SyntheticStream {
    spec: DriftStreamSpec,
    concepts: Vec<Concept>,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
    index: usize,
    last_segment: usize,
}

impl SyntheticStream {
    pub fn new(spec: DriftStreamSpec) -> Result<Self> {
        spec.validate()?;
        let mut concept_rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let concepts = (0..spec.concept_definitions())
            .map(|_| Concept::generate(&spec, &mut concept_rng))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(1);
        let noise =
            Normal::new(0.0, spec.cluster_spread).map_err(|e| Error::config(e.to_string()))?;
        Ok(SyntheticStream {
            spec,
            concepts,
            rng,
            noise,
            index: 0,
            last_segment: 0,
        })
    }

    pub fn spec(&self) -> &DriftStreamSpec {
        &self.spec
    }

    /// Segment (0 = before the first drift) the last emitted sample was drawn from.
    pub fn last_segment(&self) -> usize {
        self.last_segment
    }

    /// Labelsets defining the concept of segment `k`.
    pub fn labelsets(&self, segment: usize) -> &[LabelVector] {
        &self.concepts[self.spec.concept_of_segment(segment)].labelsets
    }

    pub fn remaining(&self) -> usize {
        self.spec.samples - self.index
    }
}

impl Iterator for SyntheticStream {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        if self.index >= self.spec.samples {
            return None;
        }
        let i = self.index;
        self.index += 1;

        let mut segment = 0;
        for (&p, &w) in self
            .spec
            .drift_positions
            .iter()
            .zip(&self.spec.drift_widths)
        {
            let u: f64 = self.rng.random();
            if u < drift_probability(i, p, w) {
                segment += 1;
            } else {
                break;
            }
        }
        self.last_segment = segment;

        let concept = &self.concepts[self.spec.concept_of_segment(segment)];
        let pick = self.rng.random_range(0..concept.labelsets.len());
        let labels = concept.labelsets[pick].clone();
        let features = concept.centres[pick]
            .iter()
            .map(|&c| c + self.noise.sample(&mut self.rng))
            .collect();
        Some(Instance { features, labels })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining(), Some(self.remaining()))
    }
}

impl ExactSizeIterator for SyntheticStream {}

/// Generates a whole synthetic stream into memory.
pub fn generate_synthetic(spec: &DriftStreamSpec) -> Result<Dataset> {
    let stream = SyntheticStream::new(spec.clone())?;
    let instances: Vec<Instance> = stream.collect();
    let meta = DatasetMeta::from_instances(spec.features, spec.labels, &instances);
    Ok(Dataset { meta, instances })
}

/// Source of a stream for an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamSource {
    File {
        path: PathBuf,
        labels: Option<usize>,
        labels_first: bool,
    },
    Synthetic(DriftStreamSpec),
}

impl StreamSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            StreamSource::File {
                path,
                labels,
                labels_first,
            } => read_dataset(path, *labels, *labels_first),
            StreamSource::Synthetic(spec) => generate_synthetic(spec),
        }
    }

    pub fn name(&self) -> String {
        match self {
            StreamSource::File { path, .. } => path.display().to_string(),
            StreamSource::Synthetic(spec) => {
                format!("synthetic-{:?}-{}", spec.kind, spec.seed).to_lowercase()
            }
        }
    }
}
