// Two small subjects where DSC and nDSC disagree on which prediction is
// better. The reference `r` is set to the first subject's own lesion load, so
// its nDSC equals its DSC, while the second subject (a much larger lesion)
// has its false positives amplified.

use ndsc::metrics::{metrics_from_counts, ConfusionCounts, MetricConfig};

pub fn run() -> ndsc::Result<()> {
    let cfg = MetricConfig::new(2.0 / 25.0)?;
    let subjects = [
        ("small lesion", ConfusionCounts::new(1, 4, 1, 19)),
        ("large lesion", ConfusionCounts::new(2, 4, 4, 15)),
    ];
    println!("r = {}", cfg.reference_r());
    println!("{:<13} {:>8} {:>8} {:>8} {:>8}", "subject", "h", "kappa", "DSC", "nDSC");
    let mut scored = Vec::new();
    for (name, counts) in subjects {
        let m = metrics_from_counts(&counts, &cfg)?;
        println!(
            "{:<13} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            name, m.h, m.kappa, m.dsc, m.ndsc
        );
        scored.push(m);
    }
    let (a, b) = (&scored[0], &scored[1]);
    println!(
        "DSC prefers the {}, nDSC prefers the {}",
        if b.dsc > a.dsc { "large lesion" } else { "small lesion" },
        if b.ndsc > a.ndsc { "large lesion" } else { "small lesion" },
    );
    Ok(())
}

fn main() -> ndsc::Result<()> {
    run()
}
