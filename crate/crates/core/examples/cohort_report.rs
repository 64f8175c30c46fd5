// End to end: write a stochastic synthetic cohort to disk, then evaluate it
// from its manifest and sweep thresholds over it.

use ndsc::cohort::{
    evaluate_cohort, estimate_reference_from_manifest, sweep_cohort, threshold_grid,
    CohortManifest, CohortOptions, Objective,
};
use ndsc::metrics::MetricConfig;
use ndsc::synth::{generate_cohort, write_cohort, CohortSpec, NoiseMode, NoiseModel};

pub fn run() -> ndsc::Result<()> {
    let dir = tempfile::tempdir()?;
    let spec = CohortSpec {
        subjects: 12,
        dims: [32, 32, 32],
        load_range: (1e-3, 5e-2),
        blob_count: 3,
        noise: NoiseModel::new(0.001, 0.2, NoiseMode::Stochastic, 9)?,
        seed: 9,
    };
    let path = write_cohort(dir.path(), &spec, &generate_cohort(&spec)?)?;
    let manifest = CohortManifest::from_path(&path)?;

    let r = estimate_reference_from_manifest(&manifest)?;
    println!("mean lesion load of the cohort: {r:.5}");

    let opts = CohortOptions::default();
    let report = evaluate_cohort(&manifest, &MetricConfig::default(), &opts)?;
    print!("{}", report.to_text());

    let grid = threshold_grid(0.0, 1.0, 0.25)?;
    let sweep = sweep_cohort(&manifest, &grid, &MetricConfig::default(), Objective::Ndsc, &opts)?;
    print!("\n{}", sweep.to_text());
    Ok(())
}

fn main() -> ndsc::Result<()> {
    run()
}
