//! Command-line front end: `generate`, `run` and `compare`.
//!
//! Any flag may also come from a flat `key = value` file given with
//! `--config`; flags on the command line take precedence. Exit codes are 0
//! on success, 1 for usage errors and 2 for data or configuration errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierChain;
use crate::error::{Error, Result};
use crate::eval::{
    average_ranks, nemenyi_cd, prequential_run_with, DetectorConfig, MetricReport, RankTable,
    RunOptions, DEFAULT_SEGMENTS,
};
use crate::ld3::Ld3Config;
use crate::rankfusion::FusionMethod;
use crate::streams::{self, DriftKind, DriftStreamSpec, StreamSource};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ld3",
    version,
    about = "Label-dependency drift detection for multi-label streams",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic drift stream in the dataset format.
    Generate(GenerateArgs),
    /// Run one prequential experiment and write its metric report.
    Run(RunArgs),
    /// Run every detector on every stream and rank them.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SyntheticArgs {
    /// Total number of samples.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Number of features.
    #[arg(long, default_value_t = 200)]
    pub features: usize,
    /// Number of labels (for file streams: must match the header).
    #[arg(long)]
    pub labels: Option<usize>,
    /// Comma-separated drift positions.
    #[arg(long, value_delimiter = ',', default_values_t = [4_000usize, 10_000])]
    pub positions: Vec<usize>,
    /// Transition width in samples for every drift (default 1 for sudden, 500 otherwise).
    #[arg(long)]
    pub width: Option<usize>,
}

impl SyntheticArgs {
    fn spec(&self, kind: DriftKind, seed: u64) -> DriftStreamSpec {
        let base = DriftStreamSpec::benchmark(kind, seed);
        let width = self.width.unwrap_or(base.drift_widths[0]);
        DriftStreamSpec {
            samples: self.samples,
            features: self.features,
            labels: self.labels.unwrap_or(base.labels),
            drift_widths: vec![width; self.positions.len()],
            drift_positions: self.positions.clone(),
            ..base
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Drift kind: sudden, incremental or reoccurring.
    #[arg(long = "kind", default_value = "sudden")]
    pub kind: DriftKind,
    #[command(flatten)]
    pub shape: SyntheticArgs,
    /// Seed for all randomness.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write features before labels.
    #[arg(long)]
    pub labels_last: bool,
    /// Output dataset path.
    #[arg(long)]
    pub out: PathBuf,
    /// Flat key = value file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectorArgs {
    /// LD3 window size.
    #[arg(long = "w", default_value_t = 500)]
    pub window: usize,
    /// LD3 standard-deviation multiplier.
    #[arg(long = "t", default_value_t = 4.0)]
    pub sigma: f64,
    /// LD3 anomaly-count threshold.
    #[arg(long = "L", default_value_t = 0)]
    pub max_anomalies: usize,
    /// LD3 rank-fusion method: reciprocal, borda, condorcet or mc4.
    #[arg(long, default_value = "reciprocal")]
    pub fusion: FusionMethod,
}

impl DetectorArgs {
    fn ld3(&self) -> Ld3Config {
        Ld3Config {
            window: self.window,
            sigma: self.sigma,
            max_anomalies: self.max_anomalies,
            fusion: self.fusion,
        }
    }

    fn resolve(&self, name: &str) -> Result<DetectorConfig> {
        let cfg: DetectorConfig = name.parse()?;
        Ok(match cfg {
            DetectorConfig::Ld3(_) => DetectorConfig::Ld3(self.ld3()),
            other => other,
        })
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Dataset file to stream.
    #[arg(
        long,
        conflicts_with = "synthetic",
        required_unless_present = "synthetic"
    )]
    pub stream: Option<PathBuf>,
    /// Generate a synthetic stream of this kind instead of reading a file.
    #[arg(long)]
    pub synthetic: Option<DriftKind>,
    #[command(flatten)]
    pub shape: SyntheticArgs,
    /// Dataset files list features before labels.
    #[arg(long)]
    pub labels_last: bool,
    /// Detector: ld3, ddm, eddm or none.
    #[arg(long, default_value = "ld3")]
    pub detector: String,
    #[command(flatten)]
    pub params: DetectorArgs,
    /// Seed for all randomness.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of evaluation segments.
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub segments: usize,
    /// Report path (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the segment series as CSV here.
    #[arg(long)]
    pub segments_csv: Option<PathBuf>,
    /// Write a per-sample trace (index, exact-match bit, drift, prediction) as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Flat key = value file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Dataset files (repeatable).
    #[arg(long)]
    pub stream: Vec<PathBuf>,
    /// Synthetic stream kinds (repeatable).
    #[arg(long)]
    pub synthetic: Vec<DriftKind>,
    #[command(flatten)]
    pub shape: SyntheticArgs,
    /// Dataset files list features before labels.
    #[arg(long)]
    pub labels_last: bool,
    /// Comma-separated detectors to compare.
    #[arg(long, value_delimiter = ',', default_values_t = ["ld3".to_string(), "ddm".to_string(), "eddm".to_string(), "none".to_string()])]
    pub detectors: Vec<String>,
    #[command(flatten)]
    pub params: DetectorArgs,
    /// Seed for all randomness.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of evaluation segments.
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub segments: usize,
    /// Significance level for the critical distance (0.05 or 0.10).
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Comparison report path (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Flat key = value file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses a flat `key = value` file into command-line flags.
///
/// Blank lines and `#` comments are skipped. A value of `true` becomes a bare
/// switch, `false` drops the key.
pub fn config_file_args(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let key = match key.as_str() {
            "l" => "L".to_string(),
            _ => key,
        };
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(Error::config(format!("config line {}: invalid key", i + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

/// Splices config-file flags in front of the user's flags so the latter win.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| Error::config("--config needs a path"))?,
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let extra = config_file_args(&text)?;
    // program name and subcommand stay in front
    let split = 2.min(args.len());
    let mut merged = args[..split].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[split..]);
    Ok(merged)
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents)?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<streams::DatasetMeta> {
    let spec = args.shape.spec(args.kind, args.seed);
    let data = streams::generate_synthetic(&spec)?;
    let mut buf = Vec::new();
    streams::write_dataset(
        &mut buf,
        spec.features,
        spec.labels,
        &data.instances,
        !args.labels_last,
    )
    .map_err(|e| Error::io(&args.out, e))?;
    write_atomic(&args.out, &buf)?;
    Ok(data.meta)
}

fn source_for_file(path: &Path, shape: &SyntheticArgs, labels_last: bool) -> StreamSource {
    StreamSource::File {
        path: path.to_path_buf(),
        labels: shape.labels,
        labels_first: !labels_last,
    }
}

/// Runs one experiment, writing the report (and optional extras) to disk.
pub fn cmd_run(args: &RunArgs) -> Result<MetricReport> {
    let detector_cfg = args.params.resolve(&args.detector)?;
    let source = match (&args.stream, args.synthetic) {
        (Some(path), None) => source_for_file(path, &args.shape, args.labels_last),
        (None, Some(kind)) => StreamSource::Synthetic(args.shape.spec(kind, args.seed)),
        _ => return Err(Error::config("give exactly one of --stream or --synthetic")),
    };
    let data = source.load()?;
    let mut model = ClassifierChain::new(data.meta.features, data.meta.labels);
    let mut detector = detector_cfg.build(data.meta.labels)?;

    let mut trace = args
        .trace
        .as_ref()
        .map(|_| String::from("index,correct,drift,prediction\n"));
    let mut report = prequential_run_with(
        &data.instances,
        &mut model,
        &mut detector,
        RunOptions {
            segments: args.segments,
        },
        |step| {
            if let Some(t) = trace.as_mut() {
                let bits: String = step
                    .prediction
                    .bits()
                    .iter()
                    .map(|b| if *b == 1 { '1' } else { '0' })
                    .collect();
                t.push_str(&format!(
                    "{},{},{},{}\n",
                    step.index,
                    u8::from(step.correct),
                    u8::from(step.drift),
                    bits
                ));
            }
        },
    )?;
    report.stream = source.name();
    report.detector = detector_cfg.label();

    write_atomic(&args.out, report.to_json().as_bytes())?;
    if let Some(path) = &args.segments_csv {
        write_atomic(path, report.segments_csv().as_bytes())?;
    }
    if let (Some(path), Some(t)) = (&args.trace, trace) {
        write_atomic(path, t.as_bytes())?;
    }
    Ok(report)
}

/// Rank tables for each metric plus the Nemenyi critical distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub streams: Vec<String>,
    pub detectors: Vec<String>,
    /// `reports[detector][stream]`.
    pub reports: Vec<Vec<MetricReport>>,
    pub example_accuracy: RankTable,
    pub hamming_score: RankTable,
    pub example_f1: RankTable,
    pub micro_f1: RankTable,
    pub alpha: f64,
    /// Absent when the detector count is outside the critical-value table.
    pub critical_distance: Option<f64>,
}

impl Comparison {
    pub fn from_reports(
        streams: Vec<String>,
        detectors: Vec<String>,
        reports: Vec<Vec<MetricReport>>,
        alpha: f64,
    ) -> Result<Self> {
        let table = |f: fn(&MetricReport) -> f64| {
            let values: Vec<Vec<f64>> = reports
                .iter()
                .map(|row| row.iter().map(f).collect())
                .collect();
            average_ranks(&values, true)
        };
        let critical_distance = match nemenyi_cd(alpha, detectors.len(), streams.len()) {
            Ok(cd) => Some(cd),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Comparison {
            example_accuracy: table(|r| r.example_accuracy)?,
            hamming_score: table(|r| r.hamming_score)?,
            example_f1: table(|r| r.example_f1)?,
            micro_f1: table(|r| r.micro_f1)?,
            streams,
            detectors,
            reports,
            alpha,
            critical_distance,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("comparison serializes");
        s.push('\n');
        s
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Comparison> {
    let detectors = args
        .detectors
        .iter()
        .map(|d| args.params.resolve(d))
        .collect::<Result<Vec<_>>>()?;
    let mut sources: Vec<StreamSource> = args
        .stream
        .iter()
        .map(|p| source_for_file(p, &args.shape, args.labels_last))
        .collect();
    sources.extend(
        args.synthetic
            .iter()
            .map(|&k| StreamSource::Synthetic(args.shape.spec(k, args.seed))),
    );
    if sources.is_empty() {
        return Err(Error::config(
            "compare needs at least one --stream or --synthetic",
        ));
    }
    if detectors.is_empty() {
        return Err(Error::config("compare needs at least one detector"));
    }
    let data = sources
        .iter()
        .map(StreamSource::load)
        .collect::<Result<Vec<_>>>()?;
    let options = RunOptions {
        segments: args.segments,
    };

    // every (detector, stream) cell is independent; results keep their grid slot
    let cells: Vec<(usize, usize)> = (0..detectors.len())
        .flat_map(|d| (0..data.len()).map(move |s| (d, s)))
        .collect();
    let run_cell = |&(d, s): &(usize, usize)| -> Result<MetricReport> {
        let set = &data[s];
        let mut model = ClassifierChain::new(set.meta.features, set.meta.labels);
        let mut detector = detectors[d].build(set.meta.labels)?;
        let mut r =
            prequential_run_with(&set.instances, &mut model, &mut detector, options, |_| {})?;
        r.stream = sources[s].name();
        r.detector = detectors[d].label();
        Ok(r)
    };
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(cells.len());
    let chunk = cells.len().div_ceil(threads);
    let results: Vec<Result<MetricReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(run_cell).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("comparison worker panicked"))
            .collect()
    });
    let mut grid: Vec<Vec<MetricReport>> = vec![Vec::with_capacity(data.len()); detectors.len()];
    for ((d, _), r) in cells.iter().zip(results) {
        grid[*d].push(r?);
    }

    let comparison = Comparison::from_reports(
        sources.iter().map(StreamSource::name).collect(),
        detectors.iter().map(DetectorConfig::label).collect(),
        grid,
        args.alpha,
    )?;
    write_atomic(&args.out, comparison.to_json().as_bytes())?;
    Ok(comparison)
}

/// Entry point shared by the binary and tests; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_DATA;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a).map(|meta| {
            println!(
                "wrote {} samples, {} features, {} labels (LC {:.4}, LD {:.4}) to {}",
                meta.samples,
                meta.features,
                meta.labels,
                meta.cardinality,
                meta.density,
                a.out.display()
            );
        }),
        Command::Run(a) => cmd_run(a).map(|r| {
            println!(
                "{} on {}: accuracy {:.4}, drifts {:?}",
                r.detector, r.stream, r.example_accuracy, r.drift_positions
            );
        }),
        Command::Compare(a) => cmd_compare(a).map(|c| {
            for (d, avg) in c.detectors.iter().zip(&c.example_accuracy.average) {
                println!("{d}: average accuracy rank {avg:.3}");
            }
            if let Some(cd) = c.critical_distance {
                println!("critical distance {cd:.3}");
            }
        }),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}
