//! Synthetic ground-truth and prediction generator, plus the closed-form
//! scores of the voxel-flip noise model.
//!
//! Under a fixed false-positive rate `α` (fraction of negatives flipped on)
//! and false-negative rate `γ` (fraction of positives flipped off), DSC grows
//! with lesion load while nDSC does not depend on it at all. The deterministic
//! mode flips exact voxel counts so that property can be checked as an
//! equality rather than statistically.
//!
//! Randomness comes from `ChaCha8Rng` (rand_chacha). Only `next_u64` is used;
//! floats, bounded integers and shuffles are derived here so streams do not
//! depend on the version of any sampling library. Cohort subject `i` draws
//! from stream `i` of the master seed.

use std::fs;
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::volume::{write_nifti_file, BinaryMask, Volume};

/// Name recorded in cohort metadata so outputs can be reproduced.
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9); subject i uses stream i of the master seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Flip exactly `round(α·N)` negatives and `round(γ·P)` positives.
    Deterministic,
    /// Flip every voxel independently with its class rate.
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub fp_rate: f64,
    pub fn_rate: f64,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(fp_rate: f64, fn_rate: f64, mode: NoiseMode, seed: u64) -> Result<Self> {
        for (name, rate) in [("fp", fp_rate), ("fn", fn_rate)] {
            if !(0.0..1.0).contains(&rate) {
                return Err(Error::InvalidParameter(format!(
                    "{name} rate must lie in [0, 1), got {rate}"
                )));
            }
        }
        Ok(NoiseModel {
            fp_rate,
            fn_rate,
            mode,
            seed,
        })
    }

    fn with_seed(self, seed: u64) -> Self {
        NoiseModel { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubjectSpec {
    pub dims: [usize; 3],
    pub target_load: f64,
    pub blob_count: usize,
    pub seed: u64,
}

impl SubjectSpec {
    pub fn voxel_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// `round(target_load · volume)`.
    pub fn target_positives(&self) -> usize {
        (self.target_load * self.voxel_count() as f64).round() as usize
    }

    fn validate(&self) -> Result<usize> {
        if self.dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "dims must be positive, got {:?}",
                self.dims
            )));
        }
        if self.blob_count == 0 {
            return Err(Error::InvalidParameter("blob_count must be >= 1".into()));
        }
        if !(self.target_load > 0.0 && self.target_load < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target load must lie in (0, 1), got {}",
                self.target_load
            )));
        }
        let k = self.target_positives();
        if k < 1 || k >= self.voxel_count() {
            return Err(Error::InvalidParameter(format!(
                "load {} is unachievable in {} voxels ({} positives)",
                self.target_load,
                self.voxel_count(),
                k
            )));
        }
        Ok(k)
    }
}

fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unbiased integer in `0..n` (Lemire's multiply-and-reject).
fn below(rng: &mut impl RngCore, n: u64) -> u64 {
    debug_assert!(n > 0);
    let threshold = n.wrapping_neg() % n;
    loop {
        let m = rng.next_u64() as u128 * n as u128;
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// Moves a uniformly chosen `k`-subset to the front of `items`.
fn partial_shuffle(rng: &mut impl RngCore, items: &mut [usize], k: usize) {
    let n = items.len();
    for i in 0..k.min(n) {
        let j = i + below(rng, (n - i) as u64) as usize;
        items.swap(i, j);
    }
}

fn bernoulli_cutoff(rate: f64) -> u64 {
    // rate in [0, 1): draw < cutoff has probability rate
    (rate * 18_446_744_073_709_551_616.0) as u64
}

struct Blob {
    center: [f64; 3],
    semi_axes: [f64; 3],
}

/// Union of random axis-aligned ellipsoids holding exactly
/// `round(target_load · volume)` positives.
///
/// Every voxel gets the smallest normalised squared distance to any blob
/// centre; the `k` lowest (ties broken by index) become positive, which grows
/// or shrinks the ellipsoids together until the count is hit.
pub fn generate_gt(spec: &SubjectSpec) -> Result<BinaryMask> {
    let k = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let [nx, ny, nz] = spec.dims;
    let per_blob = k as f64 / spec.blob_count as f64;
    let base = (3.0 * per_blob / (4.0 * std::f64::consts::PI)).cbrt().max(0.5);
    let blobs: Vec<Blob> = (0..spec.blob_count)
        .map(|_| {
            let mut center = [0.0; 3];
            let mut semi_axes = [0.0; 3];
            for axis in 0..3 {
                center[axis] = unit_f64(&mut rng) * spec.dims[axis] as f64;
                semi_axes[axis] = base * (0.7 + 0.7 * unit_f64(&mut rng));
            }
            Blob { center, semi_axes }
        })
        .collect();

    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(spec.voxel_count());
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let p = [x as f64 + 0.5, y as f64 + 0.5, z as f64 + 0.5];
                let d = blobs
                    .iter()
                    .map(|b| {
                        (0..3)
                            .map(|a| ((p[a] - b.center[a]) / b.semi_axes[a]).powi(2))
                            .sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min);
                scored.push((d, x + nx * (y + ny * z)));
            }
        }
    }
    let by_score = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    scored.select_nth_unstable_by(k - 1, by_score);

    let mut mask = BinaryMask::empty(spec.dims);
    let bits = mask.bits_mut();
    for &(_, i) in &scored[..k] {
        bits[i] = true;
    }
    Ok(mask)
}

/// Applies the noise model to a ground truth.
pub fn corrupt(gt: &BinaryMask, nm: &NoiseModel) -> Result<BinaryMask> {
    NoiseModel::new(nm.fp_rate, nm.fn_rate, nm.mode, nm.seed)?;
    let positives = gt.positive_count();
    if positives == 0 {
        return Err(Error::InvalidParameter(
            "cannot corrupt an empty ground truth".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(nm.seed);
    let mut out = gt.clone();
    match nm.mode {
        NoiseMode::Deterministic => {
            let (fp_flips, fn_flips) = flip_counts(gt, nm);
            if fn_flips >= positives {
                return Err(Error::InvalidParameter(format!(
                    "fn rate {} flips all {positives} positives",
                    nm.fn_rate
                )));
            }
            let (mut pos, mut neg): (Vec<usize>, Vec<usize>) =
                (0..gt.len()).partition(|&i| gt.bits()[i]);
            partial_shuffle(&mut rng, &mut neg, fp_flips);
            partial_shuffle(&mut rng, &mut pos, fn_flips);
            let bits = out.bits_mut();
            neg[..fp_flips].iter().for_each(|&i| bits[i] = true);
            pos[..fn_flips].iter().for_each(|&i| bits[i] = false);
        }
        NoiseMode::Stochastic => {
            let fp_cut = bernoulli_cutoff(nm.fp_rate);
            let fn_cut = bernoulli_cutoff(nm.fn_rate);
            let mut survivors = 0usize;
            for b in out.bits_mut() {
                let draw = rng.next_u64();
                if *b {
                    if draw < fn_cut {
                        *b = false;
                    } else {
                        survivors += 1;
                    }
                } else if draw < fp_cut {
                    *b = true;
                }
            }
            if survivors == 0 {
                return Err(Error::InvalidParameter(
                    "stochastic noise flipped every positive voxel".into(),
                ));
            }
        }
    }
    Ok(out)
}

/// `(round(α·N), round(γ·P))` for a ground truth under deterministic noise.
pub fn flip_counts(gt: &BinaryMask, nm: &NoiseModel) -> (usize, usize) {
    let p = gt.positive_count();
    let n = gt.len() - p;
    (
        (nm.fp_rate * n as f64).round() as usize,
        (nm.fn_rate * p as f64).round() as usize,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub dsc: f64,
    pub ndsc: f64,
}

/// Expected DSC and nDSC under the flip noise model.
///
/// With `h = load / (1 − load)`: `n = γ/(1−γ)`, `p = α/((1−γ)·h)`, and
/// `nDSC = 2 / (2 + (1/r − 1)·α/(1−γ) + γ/(1−γ))`, which is free of `load`.
pub fn closed_form_scores(load: f64, fp_rate: f64, fn_rate: f64, r: f64) -> Result<ClosedForm> {
    if !(load > 0.0 && load < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "load must lie in (0, 1), got {load}"
        )));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reference r must lie in (0, 1), got {r}"
        )));
    }
    NoiseModel::new(fp_rate, fn_rate, NoiseMode::Deterministic, 0)?;
    let h = load / (1.0 - load);
    let keep = 1.0 - fn_rate;
    let n = fn_rate / keep;
    let p = fp_rate / keep / h;
    Ok(ClosedForm {
        dsc: 2.0 / (2.0 + p + n),
        ndsc: 2.0 / (2.0 + (1.0 / r - 1.0) * fp_rate / keep + n),
    })
}

/// Closed form evaluated on realised counts: `positives`/`negatives` in the
/// ground truth and the number of voxels actually flipped each way.
pub fn closed_form_for_counts(
    positives: usize,
    negatives: usize,
    fp_flips: usize,
    fn_flips: usize,
    r: f64,
) -> Result<ClosedForm> {
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidParameter(
            "both classes must be present".into(),
        ));
    }
    let total = (positives + negatives) as f64;
    closed_form_scores(
        positives as f64 / total,
        fp_flips as f64 / negatives as f64,
        fn_flips as f64 / positives as f64,
        r,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSubject {
    pub id: String,
    pub spec: SubjectSpec,
    /// Noise model with the subject's own seed.
    pub noise: NoiseModel,
    pub gt: BinaryMask,
    pub pred: BinaryMask,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortSpec {
    pub subjects: usize,
    pub dims: [usize; 3],
    pub load_range: (f64, f64),
    pub blob_count: usize,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl CohortSpec {
    fn validate(&self) -> Result<()> {
        if self.subjects < 2 {
            return Err(Error::InvalidParameter(format!(
                "a cohort needs at least 2 subjects, got {}",
                self.subjects
            )));
        }
        let (lo, hi) = self.load_range;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "load range must satisfy 0 < lo < hi < 1, got ({lo}, {hi})"
            )));
        }
        NoiseModel::new(
            self.noise.fp_rate,
            self.noise.fn_rate,
            self.noise.mode,
            self.noise.seed,
        )?;
        Ok(())
    }

    /// Target loads: a log-spaced grid in deterministic mode, log-uniform
    /// draws in stochastic mode.
    fn load_for(&self, index: usize, rng: &mut impl RngCore) -> f64 {
        let (lo, hi) = self.load_range;
        let t = match self.noise.mode {
            NoiseMode::Deterministic => {
                if index == 0 {
                    return lo;
                }
                if index + 1 == self.subjects {
                    return hi;
                }
                index as f64 / (self.subjects - 1) as f64
            }
            NoiseMode::Stochastic => unit_f64(rng),
        };
        (lo.ln() + t * (hi.ln() - lo.ln())).exp()
    }
}

fn subject_stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Generates `spec.subjects` (ground truth, prediction) pairs. Output does not
/// depend on thread count.
pub fn generate_cohort(spec: &CohortSpec) -> Result<Vec<SyntheticSubject>> {
    spec.validate()?;
    (0..spec.subjects)
        .into_par_iter()
        .map(|i| {
            let mut rng = subject_stream(spec.seed, i);
            let gt_seed = rng.next_u64();
            let noise_seed = rng.next_u64();
            let subject_spec = SubjectSpec {
                dims: spec.dims,
                target_load: spec.load_for(i, &mut rng),
                blob_count: spec.blob_count,
                seed: gt_seed,
            };
            let noise = spec.noise.with_seed(noise_seed);
            let gt = generate_gt(&subject_spec)?;
            let pred = corrupt(&gt, &noise)?;
            Ok(SyntheticSubject {
                id: format!("sub-{i:03}"),
                spec: subject_spec,
                noise,
                gt,
                pred,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct CohortMetadata<'a> {
    generator: &'static str,
    cohort: &'a CohortSpec,
    subjects: Vec<SubjectMetadata<'a>>,
}

#[derive(Serialize)]
struct SubjectMetadata<'a> {
    id: &'a str,
    spec: &'a SubjectSpec,
    noise_seed: u64,
    positives: usize,
}

/// Writes every subject as `<id>_gt.nii` / `<id>_pred.nii` (uint8), a
/// `manifest.csv` readable by [`crate::cohort::CohortManifest::from_path`],
/// and `synth.json` with the generator and every seed. Returns the manifest
/// path.
pub fn write_cohort(
    dir: impl AsRef<Path>,
    spec: &CohortSpec,
    subjects: &[SyntheticSubject],
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    subjects.par_iter().try_for_each(|s| {
        write_nifti_file(&Volume::from_mask(&s.gt), dir.join(format!("{}_gt.nii", s.id)))?;
        write_nifti_file(
            &Volume::from_mask(&s.pred),
            dir.join(format!("{}_pred.nii", s.id)),
        )
    })?;

    let manifest = dir.join("manifest.csv");
    let mut w = csv::Writer::from_path(&manifest)?;
    w.write_record(["id", "gt_path", "pred_path", "pred_kind"])?;
    for s in subjects {
        w.write_record([
            s.id.as_str(),
            &format!("{}_gt.nii", s.id),
            &format!("{}_pred.nii", s.id),
            "binary",
        ])?;
    }
    w.flush().map_err(|e| Error::io(&manifest, e))?;

    let meta = CohortMetadata {
        generator: GENERATOR,
        cohort: spec,
        subjects: subjects
            .iter()
            .map(|s| SubjectMetadata {
                id: &s.id,
                spec: &s.spec,
                noise_seed: s.noise.seed,
                positives: s.gt.positive_count(),
            })
            .collect(),
    };
    let meta_path = dir.join("synth.json");
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
    Ok(manifest)
}
