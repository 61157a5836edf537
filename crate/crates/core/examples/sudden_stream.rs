//! Runs the classifier chain with and without LD3 on a small sudden-drift
//! stream and prints where drift was signalled.

use ld3::eval::{prequential_run, RunOptions};
use ld3::streams::generate_synthetic;
use ld3::{ClassifierChain, DetectorConfig, DriftKind, DriftStreamSpec, Ld3Config};

fn main() -> ld3::Result<()> {
    let spec = DriftStreamSpec {
        samples: 6_000,
        features: 40,
        labels: 20,
        drift_positions: vec![2_000, 4_000],
        ..DriftStreamSpec::benchmark(DriftKind::Sudden, 7)
    };
    let data = generate_synthetic(&spec)?;
    println!(
        "{} samples, label cardinality {:.3}",
        data.meta.samples, data.meta.cardinality
    );

    let detectors = [
        DetectorConfig::None,
        DetectorConfig::Ld3(Ld3Config::default()),
        DetectorConfig::Ddm,
    ];
    for config in detectors {
        let mut model = ClassifierChain::new(spec.features, spec.labels);
        let mut detector = config.build(spec.labels)?;
        let report = prequential_run(
            &data.instances,
            &mut model,
            &mut detector,
            RunOptions::default(),
        )?;
        println!(
            "{:<32} accuracy {:.4}  drifts {:?}",
            config.label(),
            report.example_accuracy,
            report.drift_positions
        );
    }
    Ok(())
}
