// Precision-recall curve and DSC/nDSC threshold sweep for a soft prediction.

use ndsc::metrics::{metric_sweep, pr_curve, MetricConfig};
use ndsc::synth::{generate_gt, SubjectSpec};
use ndsc::volume::ProbabilityMap;

pub fn run() -> ndsc::Result<()> {
    let spec = SubjectSpec {
        dims: [16, 16, 16],
        target_load: 0.02,
        blob_count: 2,
        seed: 3,
    };
    let gt = generate_gt(&spec)?;

    // lesion voxels score high, background trails off with a few confident errors
    let probs = gt
        .bits()
        .iter()
        .enumerate()
        .map(|(i, &lesion)| {
            let jitter = ((i * 7919) % 100) as f64 / 100.0;
            if lesion {
                0.4 + 0.6 * jitter
            } else {
                0.5 * jitter * jitter
            }
        })
        .collect();
    let pm = ProbabilityMap::new(gt.dims(), probs)?;

    let thresholds: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let curve = pr_curve(&gt, &pm, &thresholds)?;
    println!("{:>9} {:>9} {:>9}", "threshold", "precision", "recall");
    for p in &curve.points {
        println!("{:>9.2} {:>9.4} {:>9.4}", p.threshold, p.precision, p.recall);
    }

    let rows = metric_sweep(&gt, &pm, &thresholds, &MetricConfig::default())?;
    println!("\n{:>9} {:>9} {:>9}", "threshold", "DSC", "nDSC");
    for r in &rows {
        println!("{:>9.2} {:>9.4} {:>9.4}", r.threshold, r.dsc, r.ndsc);
    }
    Ok(())
}

fn main() -> ndsc::Result<()> {
    run()
}
