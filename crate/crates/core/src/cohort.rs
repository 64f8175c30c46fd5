//! Cohort evaluation: manifest ingestion, reference estimation, per-subject
//! metrics, load stratification and the bias report.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{binarize, evaluate_pair, metric_sweep, MetricConfig, SubjectMetrics};
use crate::stats::{correlate, rank_regression};
use crate::volume::{
    as_binary_mask, as_probability_map, read_nifti_file, BinaryMask, ProbabilityMap,
    DEFAULT_BINARY_TOLERANCE, DEFAULT_CLAMP_EPSILON,
};

pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredKind {
    Binary,
    Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub gt_path: PathBuf,
    pub pred_path: PathBuf,
    pub pred_kind: PredKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortManifest {
    pub subjects: Vec<ManifestEntry>,
    /// Binarisation threshold for probability predictions.
    pub threshold: Option<f64>,
}

impl CohortManifest {
    pub fn new(subjects: Vec<ManifestEntry>, threshold: Option<f64>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &subjects {
            if s.id.is_empty() {
                return Err(Error::Manifest("empty subject id".into()));
            }
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Manifest(format!("duplicate subject id {:?}", s.id)));
            }
            if s.gt_path.as_os_str().is_empty() || s.pred_path.as_os_str().is_empty() {
                return Err(Error::Manifest(format!("empty path for subject {:?}", s.id)));
            }
        }
        if let Some(t) = threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Manifest(format!("threshold {t} outside [0, 1]")));
            }
        }
        Ok(CohortManifest {
            subjects,
            threshold,
        })
    }

    /// Reads a `id,gt_path,pred_path,pred_kind` CSV. Relative paths are
    /// resolved against the manifest's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_reader(file, base)
    }

    pub fn from_reader(reader: impl std::io::Read, base: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let expected = ["id", "gt_path", "pred_path", "pred_kind"];
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Manifest(format!(
                "header must be {}, got {}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut subjects = Vec::new();
        for row in rdr.deserialize() {
            let mut entry: ManifestEntry =
                row.map_err(|e| Error::Manifest(format!("bad manifest row: {e}")))?;
            entry.gt_path = base.join(&entry.gt_path);
            entry.pred_path = base.join(&entry.pred_path);
            subjects.push(entry);
        }
        Self::new(subjects, None)
    }

    pub fn with_threshold(mut self, threshold: Option<f64>) -> Result<Self> {
        self.threshold = threshold;
        Self::new(self.subjects, self.threshold)
    }
}

/// Mean lesion load over the masks, unweighted by volume size.
///
/// Returns 0 (with a logged warning) when every mask is empty; such a value
/// cannot be used as a reference.
pub fn estimate_reference(gt_masks: &[BinaryMask]) -> Result<f64> {
    if gt_masks.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot estimate a reference from zero masks".into(),
        ));
    }
    let mean = gt_masks.iter().map(|m| m.lesion_load()).sum::<f64>() / gt_masks.len() as f64;
    if mean == 0.0 {
        log::warn!("every ground truth is empty: reference r = 0 must be replaced before use");
    }
    Ok(mean)
}

fn load_mask(path: &Path) -> Result<BinaryMask> {
    as_binary_mask(&read_nifti_file(path)?, DEFAULT_BINARY_TOLERANCE)
}

/// [`estimate_reference`] over the ground truths of a manifest (normally a
/// training split, separate from the cohort being evaluated).
pub fn estimate_reference_from_manifest(manifest: &CohortManifest) -> Result<f64> {
    let masks = manifest
        .subjects
        .par_iter()
        .map(|s| load_mask(&s.gt_path))
        .collect::<Result<Vec<_>>>()?;
    estimate_reference(&masks)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectRecord {
    pub id: String,
    #[serde(flatten)]
    pub metrics: SubjectMetrics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSummary {
    pub n: usize,
    pub mean_dsc: Option<f64>,
    pub mean_ndsc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub full: SubsetSummary,
    pub low_load: SubsetSummary,
    pub high_load: SubsetSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subsets {
    pub full: Vec<String>,
    pub low_load: Vec<String>,
    pub high_load: Vec<String>,
    /// The two subjects either side of the split share a lesion load; the
    /// split among them was decided by id order.
    pub boundary_tie: bool,
}

/// Rank-bias statistics of one metric against lesion load.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MetricBias {
    Computed {
        rho: f64,
        tau: f64,
        n: usize,
        slope: f64,
        intercept: f64,
    },
    Undefined {
        reason: String,
    },
}

impl MetricBias {
    fn compute(scores: &[f64], loads: &[f64]) -> Self {
        let result = correlate(scores, loads)
            .and_then(|c| rank_regression(loads, scores).map(|fit| (c, fit)));
        match result {
            Ok((c, fit)) => MetricBias::Computed {
                rho: c.rho,
                tau: c.tau,
                n: c.n,
                slope: fit.slope,
                intercept: fit.intercept,
            },
            Err(e) => {
                let constant = scores.len() >= 2 && scores.iter().all(|&s| s == scores[0]);
                MetricBias::Undefined {
                    reason: if constant {
                        "constant metric".to_string()
                    } else {
                        e.to_string()
                    },
                }
            }
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self {
            MetricBias::Computed { rho, .. } => Some(*rho),
            MetricBias::Undefined { .. } => None,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match self {
            MetricBias::Computed { tau, .. } => Some(*tau),
            MetricBias::Undefined { .. } => None,
        }
    }

    pub fn slope(&self) -> Option<f64> {
        match self {
            MetricBias::Computed { slope, .. } => Some(*slope),
            MetricBias::Undefined { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bias {
    pub dsc: MetricBias,
    pub ndsc: MetricBias,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortReport {
    pub reference_r: f64,
    pub threshold: Option<f64>,
    /// Sorted by subject id.
    pub per_subject: Vec<SubjectRecord>,
    pub summary: Summary,
    pub subsets: Subsets,
    pub bias: Bias,
    pub load_histogram: Option<Histogram>,
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CohortOptions {
    pub bins: usize,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl Default for CohortOptions {
    fn default() -> Self {
        CohortOptions {
            bins: DEFAULT_BINS,
            jobs: None,
        }
    }
}

/// Equal-width histogram over `[min, max]`; bins are half-open except the
/// last. A constant input puts every count in the first bin.
pub fn load_histogram(loads: &[f64], bins: usize) -> Result<Histogram> {
    if loads.is_empty() {
        return Err(Error::InvalidParameter("histogram of no loads".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least 1 bin".into()));
    }
    if let Some(l) = loads.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidParameter(format!("load {l} outside [0, 1]")));
    }
    let lo = loads.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = loads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    let mut counts = vec![0usize; bins];
    for &l in loads {
        let idx = if width > 0.0 {
            edges[1..bins].partition_point(|&e| e <= l)
        } else {
            0
        };
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

fn id_set(ids: &[String]) -> HashSet<&str> {
    ids.iter().map(String::as_str).collect()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn summarize(records: &[SubjectRecord], members: &HashSet<&str>) -> SubsetSummary {
    let chosen = || records.iter().filter(|r| members.contains(r.id.as_str()));
    SubsetSummary {
        n: chosen().count(),
        mean_dsc: mean(chosen().map(|r| r.metrics.dsc)),
        mean_ndsc: mean(chosen().map(|r| r.metrics.ndsc)),
    }
}

/// Sorts subjects by (lesion load, id) and assigns the lower `⌈n/2⌉` to
/// `low_load`, the rest to `high_load`; summaries are recomputed.
pub fn split_by_load(mut report: CohortReport) -> CohortReport {
    let recs = &report.per_subject;
    let mut order: Vec<usize> = (0..recs.len()).collect();
    order.sort_by(|&a, &b| {
        recs[a]
            .metrics
            .lesion_load
            .total_cmp(&recs[b].metrics.lesion_load)
            .then_with(|| recs[a].id.cmp(&recs[b].id))
    });
    let cut = recs.len().div_ceil(2);
    let ids = |range: &[usize]| range.iter().map(|&i| recs[i].id.clone()).collect::<Vec<_>>();
    let boundary_tie = cut > 0
        && cut < recs.len()
        && recs[order[cut - 1]].metrics.lesion_load == recs[order[cut]].metrics.lesion_load;
    let subsets = Subsets {
        full: recs.iter().map(|r| r.id.clone()).collect(),
        low_load: ids(&order[..cut]),
        high_load: ids(&order[cut..]),
        boundary_tie,
    };
    let summary = Summary {
        full: summarize(recs, &id_set(&subsets.full)),
        low_load: summarize(recs, &id_set(&subsets.low_load)),
        high_load: summarize(recs, &id_set(&subsets.high_load)),
    };
    report.subsets = subsets;
    report.summary = summary;
    report
}

impl CohortReport {
    /// Assembles a report from already-evaluated subjects.
    pub fn from_subjects(
        mut per_subject: Vec<SubjectRecord>,
        mut skipped: Vec<Skipped>,
        cfg: &MetricConfig,
        threshold: Option<f64>,
        bins: usize,
    ) -> Result<Self> {
        per_subject.sort_by(|a, b| a.id.cmp(&b.id));
        skipped.sort_by(|a, b| a.id.cmp(&b.id));
        let loads: Vec<f64> = per_subject.iter().map(|r| r.metrics.lesion_load).collect();
        let dscs: Vec<f64> = per_subject.iter().map(|r| r.metrics.dsc).collect();
        let ndscs: Vec<f64> = per_subject.iter().map(|r| r.metrics.ndsc).collect();
        let load_histogram = if loads.is_empty() {
            None
        } else {
            Some(load_histogram(&loads, bins)?)
        };
        let empty = SubsetSummary {
            n: 0,
            mean_dsc: None,
            mean_ndsc: None,
        };
        let report = CohortReport {
            reference_r: cfg.reference_r(),
            threshold,
            per_subject,
            summary: Summary {
                full: empty.clone(),
                low_load: empty.clone(),
                high_load: empty,
            },
            subsets: Subsets {
                full: vec![],
                low_load: vec![],
                high_load: vec![],
                boundary_tie: false,
            },
            bias: Bias {
                dsc: MetricBias::compute(&dscs, &loads),
                ndsc: MetricBias::compute(&ndscs, &loads),
            },
            load_histogram,
            skipped,
        };
        Ok(split_by_load(report))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Flat `id,lesion_load,h,kappa,dsc,ndsc,precision,recall` table.
    pub fn write_csv(&self, sink: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record([
            "id",
            "lesion_load",
            "h",
            "kappa",
            "dsc",
            "ndsc",
            "precision",
            "recall",
        ])?;
        for r in &self.per_subject {
            let m = &r.metrics;
            let mut row = vec![r.id.clone()];
            row.extend(
                [m.lesion_load, m.h, m.kappa, m.dsc, m.ndsc, m.precision, m.recall]
                    .iter()
                    .map(|v| v.to_string()),
            );
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Compact human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(out, "reference r = {}", self.reference_r);
        if let Some(t) = self.threshold {
            let _ = writeln!(out, "threshold   = {t}");
        }
        let _ = writeln!(
            out,
            "{:<16} {:>10} {:>8} {:>8}",
            "id", "load", "dsc", "ndsc"
        );
        for r in &self.per_subject {
            let _ = writeln!(
                out,
                "{:<16} {:>10.6} {:>8.4} {:>8.4}",
                r.id, r.metrics.lesion_load, r.metrics.dsc, r.metrics.ndsc
            );
        }
        let _ = writeln!(out, "\n{:<10} {:>4} {:>8} {:>8}", "subset", "n", "dsc", "ndsc");
        for (name, s) in [
            ("full", &self.summary.full),
            ("low_load", &self.summary.low_load),
            ("high_load", &self.summary.high_load),
        ] {
            let _ = writeln!(
                out,
                "{:<10} {:>4} {:>8} {:>8}",
                name,
                s.n,
                opt(s.mean_dsc),
                opt(s.mean_ndsc)
            );
        }
        let _ = writeln!(out, "\n{:<6} {:>8} {:>8} {:>8}", "metric", "rho", "tau", "slope");
        for (name, b) in [("dsc", &self.bias.dsc), ("ndsc", &self.bias.ndsc)] {
            match b {
                MetricBias::Computed { rho, tau, slope, .. } => {
                    let _ = writeln!(out, "{name:<6} {rho:>8.4} {tau:>8.4} {slope:>8.4}");
                }
                MetricBias::Undefined { reason } => {
                    let _ = writeln!(out, "{name:<6} undefined ({reason})");
                }
            }
        }
        for s in &self.skipped {
            let _ = writeln!(out, "skipped {}: {}", s.id, s.reason);
        }
        out
    }
}

fn evaluate_entry(
    entry: &ManifestEntry,
    threshold: Option<f64>,
    cfg: &MetricConfig,
) -> Result<SubjectMetrics> {
    let gt = load_mask(&entry.gt_path)?;
    if gt.positive_count() == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let volume = read_nifti_file(&entry.pred_path)?;
    let pred = match entry.pred_kind {
        PredKind::Binary => as_binary_mask(&volume, DEFAULT_BINARY_TOLERANCE)?,
        PredKind::Probability => {
            let t = threshold.ok_or_else(|| {
                Error::Manifest("probability predictions need a threshold".into())
            })?;
            binarize(&as_probability_map(&volume, DEFAULT_CLAMP_EPSILON)?, t)
        }
    };
    evaluate_pair(&gt, &pred, cfg)
}

/// Evaluates every manifest subject. Failures (unreadable files, invalid
/// masks, empty ground truth) land in `skipped` and are excluded from the
/// statistics.
pub fn evaluate_cohort(
    manifest: &CohortManifest,
    cfg: &MetricConfig,
    opts: &CohortOptions,
) -> Result<CohortReport> {
    if manifest
        .subjects
        .iter()
        .any(|s| s.pred_kind == PredKind::Probability)
        && manifest.threshold.is_none()
    {
        return Err(Error::Manifest(
            "manifest has probability predictions but no threshold".into(),
        ));
    }
    let run = || {
        manifest
            .subjects
            .par_iter()
            .map(|s| (s, evaluate_entry(s, manifest.threshold, cfg)))
            .collect::<Vec<_>>()
    };
    let results = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut per_subject = Vec::new();
    let mut skipped = Vec::new();
    for (entry, result) in results {
        match result {
            Ok(metrics) => per_subject.push(SubjectRecord {
                id: entry.id.clone(),
                metrics,
            }),
            Err(e) => skipped.push(Skipped {
                id: entry.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    CohortReport::from_subjects(per_subject, skipped, cfg, manifest.threshold, opts.bins)
}

/// Metric maximised when choosing a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Dsc,
    Ndsc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummaryRow {
    pub threshold: f64,
    pub mean_dsc: f64,
    pub mean_ndsc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestThreshold {
    pub threshold: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub reference_r: f64,
    pub optimize: Objective,
    pub subjects: usize,
    pub rows: Vec<SweepSummaryRow>,
    pub best: Option<BestThreshold>,
    pub skipped: Vec<Skipped>,
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_csv(&self, sink: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["threshold", "mean_dsc", "mean_ndsc"])?;
        for r in &self.rows {
            w.write_record([
                r.threshold.to_string(),
                r.mean_dsc.to_string(),
                r.mean_ndsc.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>10} {:>10} {:>10}", "threshold", "dsc", "ndsc");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>10} {:>10.4} {:>10.4}",
                r.threshold, r.mean_dsc, r.mean_ndsc
            );
        }
        if let Some(b) = self.best {
            let _ = writeln!(out, "best {:?}: {:.4} at {}", self.optimize, b.value, b.threshold);
        }
        for s in &self.skipped {
            let _ = writeln!(out, "skipped {}: {}", s.id, s.reason);
        }
        out
    }
}

/// Thresholds `lo, lo+step, …` up to `hi`, rounded to 9 decimals so that
/// e.g. `0.1 * 3` lands on `0.3`.
pub fn threshold_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo >= 0.0 && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold range must satisfy 0 <= lo < hi <= 1, got {lo}:{hi}"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "threshold step must be positive, got {step}"
        )));
    }
    let steps = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9)
        .filter(|&t| t <= hi)
        .collect())
}

fn sweep_entry(
    entry: &ManifestEntry,
    thresholds: &[f64],
    cfg: &MetricConfig,
) -> Result<Vec<crate::metrics::SweepRow>> {
    let gt = load_mask(&entry.gt_path)?;
    let volume = read_nifti_file(&entry.pred_path)?;
    let pm = match entry.pred_kind {
        PredKind::Binary => {
            ProbabilityMap::from(&as_binary_mask(&volume, DEFAULT_BINARY_TOLERANCE)?)
        }
        PredKind::Probability => as_probability_map(&volume, DEFAULT_CLAMP_EPSILON)?,
    };
    metric_sweep(&gt, &pm, thresholds, cfg)
}

/// Mean DSC and nDSC across the manifest at each threshold, and the
/// threshold maximising `objective` (ties go to the lower threshold).
pub fn sweep_cohort(
    manifest: &CohortManifest,
    thresholds: &[f64],
    cfg: &MetricConfig,
    objective: Objective,
    opts: &CohortOptions,
) -> Result<SweepReport> {
    let mut ts = thresholds.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut entries: Vec<&ManifestEntry> = manifest.subjects.iter().collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let run = || {
        entries
            .par_iter()
            .map(|s| (*s, sweep_entry(s, &ts, cfg)))
            .collect::<Vec<_>>()
    };
    let results = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut tables = Vec::new();
    let mut skipped = Vec::new();
    for (entry, result) in results {
        match result {
            Ok(rows) => tables.push(rows),
            Err(e) => skipped.push(Skipped {
                id: entry.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    let rows: Vec<SweepSummaryRow> = if tables.is_empty() {
        Vec::new()
    } else {
        ts.iter()
            .enumerate()
            .map(|(i, &threshold)| SweepSummaryRow {
                threshold,
                mean_dsc: mean(tables.iter().map(|t| t[i].dsc)).unwrap_or(f64::NAN),
                mean_ndsc: mean(tables.iter().map(|t| t[i].ndsc)).unwrap_or(f64::NAN),
            })
            .collect()
    };
    let mut best: Option<BestThreshold> = None;
    for r in &rows {
        let value = match objective {
            Objective::Dsc => r.mean_dsc,
            Objective::Ndsc => r.mean_ndsc,
        };
        if best.is_none_or(|b| value > b.value) {
            best = Some(BestThreshold {
                threshold: r.threshold,
                value,
            });
        }
    }
    Ok(SweepReport {
        reference_r: cfg.reference_r(),
        optimize: objective,
        subjects: tables.len(),
        rows,
        best,
        skipped,
    })
}
