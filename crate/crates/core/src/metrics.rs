//! Per-subject overlap metrics: confusion counts, DSC, the normalised DSC
//! (nDSC), precision/recall, precision-recall curves and threshold sweeps.
//!
//! nDSC rescales the false-positive term by `kappa = h * (1/r - 1)`, where
//! `h` is the positive:negative voxel ratio of the ground truth and `r` is a
//! cohort-level reference load. With that scaling the precision of the
//! all-positive prediction (recall 1) becomes exactly `r` for every subject,
//! which removes the advantage high-load subjects otherwise get.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::volume::{check_dims, BinaryMask, ProbabilityMap};

/// Reference load used when none is supplied.
pub const DEFAULT_REFERENCE_R: f64 = 0.001;
/// Probability threshold used when none is supplied.
pub const DEFAULT_THRESHOLD: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tp")]
    pub true_pos: u64,
    #[serde(rename = "fp")]
    pub false_pos: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
    #[serde(rename = "tn")]
    pub true_neg: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionCounts {
            true_pos: tp,
            false_pos: fp,
            false_neg: fn_,
            true_neg: tn,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// Ground-truth positives, `tp + fn`.
    pub fn gt_positives(&self) -> u64 {
        self.true_pos + self.false_neg
    }

    /// Ground-truth negatives, `fp + tn`.
    pub fn gt_negatives(&self) -> u64 {
        self.false_pos + self.true_neg
    }

    /// Positive:negative ratio of the ground truth.
    pub fn gt_ratio(&self) -> Result<f64> {
        match self.gt_negatives() {
            0 => Err(Error::NoNegatives),
            neg => Ok(self.gt_positives() as f64 / neg as f64),
        }
    }

    fn disagreement_free_empty(&self) -> bool {
        self.true_pos == 0 && self.false_pos == 0 && self.false_neg == 0
    }
}

/// What a score evaluates to when ground truth and prediction are both empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyConvention {
    #[default]
    BothEmptyIsOne,
    BothEmptyIsError,
}

impl EmptyConvention {
    fn resolve(self) -> Result<f64> {
        match self {
            EmptyConvention::BothEmptyIsOne => Ok(1.0),
            EmptyConvention::BothEmptyIsError => Err(Error::BothEmpty),
        }
    }
}

/// Metric parameters. Predictions are positive iff `prob >= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    reference_r: f64,
    pub empty_convention: EmptyConvention,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            reference_r: DEFAULT_REFERENCE_R,
            empty_convention: EmptyConvention::default(),
        }
    }
}

impl MetricConfig {
    pub fn new(reference_r: f64) -> Result<Self> {
        check_reference(reference_r)?;
        Ok(MetricConfig {
            reference_r,
            ..Default::default()
        })
    }

    pub fn with_empty_convention(mut self, convention: EmptyConvention) -> Self {
        self.empty_convention = convention;
        self
    }

    pub fn reference_r(&self) -> f64 {
        self.reference_r
    }
}

fn check_reference(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "reference r must lie in (0, 1), got {r}"
        )))
    }
}

/// Everything reported for one (ground truth, prediction) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectMetrics {
    pub lesion_load: f64,
    pub h: f64,
    pub kappa: f64,
    pub dsc: f64,
    pub ndsc: f64,
    pub precision: f64,
    pub recall: f64,
    /// FP/TP; absent when TP = 0.
    pub p_ratio: Option<f64>,
    /// FN/TP; absent when TP = 0.
    pub n_ratio: Option<f64>,
    pub counts: ConfusionCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision-recall points ordered by strictly decreasing threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub dsc: f64,
    pub ndsc: f64,
}

/// Counts agreement over the voxels selected by `roi` (all voxels if `None`).
pub fn confusion(
    gt: &BinaryMask,
    pred: &BinaryMask,
    roi: Option<&BinaryMask>,
) -> Result<ConfusionCounts> {
    check_dims(gt.dims(), pred.dims())?;
    if let Some(roi) = roi {
        check_dims(gt.dims(), roi.dims())?;
    }
    let mut c = ConfusionCounts::default();
    let mut tally = |g: bool, p: bool| match (g, p) {
        (true, true) => c.true_pos += 1,
        (false, true) => c.false_pos += 1,
        (true, false) => c.false_neg += 1,
        (false, false) => c.true_neg += 1,
    };
    let pairs = gt.bits().iter().zip(pred.bits());
    match roi {
        None => pairs.for_each(|(&g, &p)| tally(g, p)),
        Some(roi) => pairs
            .zip(roi.bits())
            .filter(|(_, &inside)| inside)
            .for_each(|((&g, &p), _)| tally(g, p)),
    }
    Ok(c)
}

/// `2·tp / (2·tp + fp + fn)`.
pub fn dsc(c: &ConfusionCounts, cfg: &MetricConfig) -> Result<f64> {
    if c.disagreement_free_empty() {
        return cfg.empty_convention.resolve();
    }
    let tp = c.true_pos as f64;
    Ok(2.0 * tp / (2.0 * tp + c.false_pos as f64 + c.false_neg as f64))
}

/// Scaling factor `h·(1/r − 1)` applied to the FP/TP ratio.
pub fn kappa(h: f64, r: f64) -> Result<f64> {
    check_reference(r)?;
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "h must be finite and non-negative, got {h}"
        )));
    }
    Ok(h * (1.0 / r - 1.0))
}

/// Normalised DSC in the division-safe form `2·tp / (2·tp + κ·fp + fn)`.
///
/// `h` must come from the ground truth of the same subject.
pub fn ndsc(c: &ConfusionCounts, h: f64, cfg: &MetricConfig) -> Result<f64> {
    let k = kappa(h, cfg.reference_r)?;
    if c.disagreement_free_empty() {
        return cfg.empty_convention.resolve();
    }
    if h == 0.0 && c.false_pos > 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let tp = c.true_pos as f64;
    Ok(2.0 * tp / (2.0 * tp + k * c.false_pos as f64 + c.false_neg as f64))
}

fn ratio_or_zero(num: u64, other: u64, cfg: &MetricConfig) -> Result<f64> {
    let denom = num + other;
    if denom > 0 {
        Ok(num as f64 / denom as f64)
    } else {
        cfg.empty_convention.resolve()
    }
}

/// `tp / (tp + fp)`; 0 when nothing was predicted but positives were missed.
pub fn precision(c: &ConfusionCounts, cfg: &MetricConfig) -> Result<f64> {
    if c.true_pos + c.false_pos == 0 && c.false_neg > 0 {
        return Ok(0.0);
    }
    ratio_or_zero(c.true_pos, c.false_pos, cfg)
}

/// `tp / (tp + fn)`; 0 when the ground truth is empty but positives were predicted.
pub fn recall(c: &ConfusionCounts, cfg: &MetricConfig) -> Result<f64> {
    if c.true_pos + c.false_neg == 0 && c.false_pos > 0 {
        return Ok(0.0);
    }
    ratio_or_zero(c.true_pos, c.false_neg, cfg)
}

/// Harmonic mean of precision and recall.
pub fn dsc_from_pr(precision: f64, recall: f64) -> Result<f64> {
    let valid = |v: f64| (0.0..=1.0).contains(&v);
    if !valid(precision) || !valid(recall) {
        return Err(Error::InvalidParameter(format!(
            "precision {precision} and recall {recall} must lie in [0, 1]"
        )));
    }
    if precision == 0.0 && recall == 0.0 {
        return Err(Error::InvalidParameter(
            "precision and recall are both zero".into(),
        ));
    }
    Ok(2.0 * recall * precision / (recall + precision))
}

/// Positive iff `prob >= threshold`, so a zero threshold marks every voxel.
pub fn binarize(pm: &ProbabilityMap, threshold: f64) -> BinaryMask {
    let bits = pm.probs().iter().map(|&p| p >= threshold).collect();
    BinaryMask::new(pm.dims(), bits).expect("dims carried over from a valid map")
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::InvalidParameter("no thresholds given".into()));
    }
    if let Some(t) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidParameter(format!(
            "threshold {t} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Confusion counts at every threshold, in one pass over the voxels sorted by
/// probability.
fn counts_at_thresholds(
    gt: &BinaryMask,
    pm: &ProbabilityMap,
    thresholds: &[f64],
) -> Result<Vec<ConfusionCounts>> {
    check_dims(gt.dims(), pm.dims())?;
    let mut voxels: Vec<(f64, bool)> = pm
        .probs()
        .iter()
        .copied()
        .zip(gt.bits().iter().copied())
        .collect();
    voxels.sort_by(|a, b| b.0.total_cmp(&a.0));
    let positives = gt.positive_count() as u64;
    let negatives = gt.len() as u64 - positives;

    let mut order: Vec<usize> = (0..thresholds.len()).collect();
    order.sort_by(|&a, &b| thresholds[b].total_cmp(&thresholds[a]));

    let mut out = vec![ConfusionCounts::default(); thresholds.len()];
    let (mut tp, mut fp, mut cursor) = (0u64, 0u64, 0usize);
    for idx in order {
        let t = thresholds[idx];
        while cursor < voxels.len() && voxels[cursor].0 >= t {
            if voxels[cursor].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            cursor += 1;
        }
        out[idx] = ConfusionCounts::new(tp, fp, positives - tp, negatives - fp);
    }
    Ok(out)
}

/// Precision-recall curve. `thresholds` must lie in `[0, 1]` and include 0;
/// duplicates are collapsed and points are ordered by decreasing threshold.
pub fn pr_curve(gt: &BinaryMask, pm: &ProbabilityMap, thresholds: &[f64]) -> Result<PrCurve> {
    check_thresholds(thresholds)?;
    if !thresholds.contains(&0.0) {
        return Err(Error::InvalidParameter(
            "PR curve thresholds must include 0".into(),
        ));
    }
    if gt.positive_count() == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let mut ts = thresholds.to_vec();
    ts.sort_by(|a, b| b.total_cmp(a));
    ts.dedup();
    let cfg = MetricConfig::default();
    let points = counts_at_thresholds(gt, pm, &ts)?
        .iter()
        .zip(&ts)
        .map(|(c, &threshold)| {
            Ok(PrPoint {
                threshold,
                precision: precision(c, &cfg)?,
                recall: recall(c, &cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrCurve { points })
}

/// DSC and nDSC at every threshold, in the order given.
pub fn metric_sweep(
    gt: &BinaryMask,
    pm: &ProbabilityMap,
    thresholds: &[f64],
    cfg: &MetricConfig,
) -> Result<Vec<SweepRow>> {
    check_thresholds(thresholds)?;
    if gt.positive_count() == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let counts = counts_at_thresholds(gt, pm, thresholds)?;
    let h = counts[0].gt_ratio()?;
    counts
        .iter()
        .zip(thresholds)
        .map(|(c, &threshold)| {
            Ok(SweepRow {
                threshold,
                dsc: dsc(c, cfg)?,
                ndsc: ndsc(c, h, cfg)?,
            })
        })
        .collect()
}

pub fn evaluate_pair(
    gt: &BinaryMask,
    pred: &BinaryMask,
    cfg: &MetricConfig,
) -> Result<SubjectMetrics> {
    evaluate_pair_within(gt, pred, None, cfg)
}

/// Like [`evaluate_pair`] but restricted to `roi`; the load and `h` are then
/// computed over the roi as well.
pub fn evaluate_pair_within(
    gt: &BinaryMask,
    pred: &BinaryMask,
    roi: Option<&BinaryMask>,
    cfg: &MetricConfig,
) -> Result<SubjectMetrics> {
    let c = confusion(gt, pred, roi)?;
    metrics_from_counts(&c, cfg)
}

/// All subject metrics from a set of counts; `h` comes from `tp+fn : fp+tn`.
pub fn metrics_from_counts(c: &ConfusionCounts, cfg: &MetricConfig) -> Result<SubjectMetrics> {
    if c.total() == 0 {
        return Err(Error::InvalidParameter("no voxels were evaluated".into()));
    }
    let h = c.gt_ratio()?;
    let k = kappa(h, cfg.reference_r)?;
    let (p_ratio, n_ratio) = match c.true_pos {
        0 => (None, None),
        tp => (
            Some(c.false_pos as f64 / tp as f64),
            Some(c.false_neg as f64 / tp as f64),
        ),
    };
    Ok(SubjectMetrics {
        lesion_load: c.gt_positives() as f64 / c.total() as f64,
        h,
        kappa: k,
        dsc: dsc(c, cfg)?,
        ndsc: ndsc(c, h, cfg)?,
        precision: precision(c, cfg)?,
        recall: recall(c, cfg)?,
        p_ratio,
        n_ratio,
        counts: *c,
    })
}
