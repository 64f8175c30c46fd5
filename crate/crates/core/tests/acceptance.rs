//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ndsc::cohort::{CohortReport, SubjectRecord};
use ndsc::metrics::{
    binarize, evaluate_pair, kappa, metrics_from_counts, pr_curve,
    ConfusionCounts, MetricConfig,
};
use ndsc::stats::{kendall_tau, rank_regression, spearman};
use ndsc::synth::{
    closed_form_for_counts, flip_counts, generate_cohort, CohortSpec, NoiseMode, NoiseModel,
};
use ndsc::volume::{
    read_nifti, write_nifti, write_nifti_with_order, BinaryMask, ByteOrder, Datatype,
    ProbabilityMap, Volume, VolumeHeader,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn upto(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

// ---------------------------------------------------------------------------
// worked two-subject example

fn worked_example() -> Outcome {
    let start = Instant::now();
    let r = 2.0 / 25.0;
    let cfg = MetricConfig::new(r).map_err(|e| e.to_string())?;

    // subject 1: 25 voxels, 2 lesion voxels (h = 2/23); 1 hit, 1 miss, 4 false alarms
    let s1 = ConfusionCounts::new(1, 4, 1, 19);
    // subject 2: 25 voxels, 6 lesion voxels (h = 6/19); 2 hits, 4 misses, 4 false alarms
    let s2 = ConfusionCounts::new(2, 4, 4, 15);

    let h1 = s1.gt_ratio().map_err(|e| e.to_string())?;
    let h2 = s2.gt_ratio().map_err(|e| e.to_string())?;
    ensure(h1 == 2.0 / 23.0 && h2 == 6.0 / 19.0, || format!("h1={h1} h2={h2}"))?;

    let k1 = kappa(h1, r).map_err(|e| e.to_string())?;
    let k2 = kappa(h2, r).map_err(|e| e.to_string())?;
    ensure(k1 == 1.0, || format!("kappa1 = {k1:e}, expected exactly 1"))?;
    ensure((k2 - 69.0 / 19.0).abs() < 1e-12, || format!("kappa2 = {k2}"))?;

    let m1 = metrics_from_counts(&s1, &cfg).map_err(|e| e.to_string())?;
    let m2 = metrics_from_counts(&s2, &cfg).map_err(|e| e.to_string())?;
    ensure((m1.ndsc - m1.dsc).abs() <= 1e-15, || {
        format!("nDSC1 {} != DSC1 {}", m1.ndsc, m1.dsc)
    })?;
    ensure(m2.dsc > m1.dsc, || format!("DSC2 {} <= DSC1 {}", m2.dsc, m1.dsc))?;
    ensure(m2.ndsc < m1.ndsc, || {
        format!("nDSC2 {} >= nDSC1 {}", m2.ndsc, m1.ndsc)
    })?;
    // division-safe form agrees with the closed expressions
    ensure((m2.dsc - 1.0 / 3.0).abs() < 1e-15, || format!("DSC2 = {}", m2.dsc))?;
    let expected2 = 4.0 / (4.0 + 69.0 / 19.0 * 4.0 + 4.0);
    ensure((m2.ndsc - expected2).abs() < 1e-12, || format!("nDSC2 = {}", m2.ndsc))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "DSC {:.4} -> {:.4}, nDSC {:.4} -> {:.4}, {:?}",
        m1.dsc, m2.dsc, m1.ndsc, m2.ndsc, elapsed
    ))
}

// ---------------------------------------------------------------------------
// recall-1 anchor

fn recall_one_anchor() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let dims = [
            2 + upto(&mut rng, 15) as usize,
            2 + upto(&mut rng, 15) as usize,
            1 + upto(&mut rng, 12) as usize,
        ];
        let n: usize = dims.iter().product();
        let density = 0.001 + 0.3 * unit(&mut rng);
        let mut bits: Vec<bool> = (0..n).map(|_| unit(&mut rng) < density).collect();
        // both classes present
        bits[upto(&mut rng, n as u64) as usize] = true;
        if bits.iter().all(|&b| b) {
            bits[0] = false;
        }
        let gt = BinaryMask::new(dims, bits).map_err(|e| e.to_string())?;
        let pm = ProbabilityMap::new(dims, (0..n).map(|_| unit(&mut rng)).collect())
            .map_err(|e| e.to_string())?;
        let r = if case % 2 == 0 { 0.001 } else { 0.0005 + 0.5 * unit(&mut rng) };

        let curve = pr_curve(&gt, &pm, &[0.0, 0.35, 0.7]).map_err(|e| e.to_string())?;
        let at_zero = curve.points.last().unwrap();
        ensure(at_zero.threshold == 0.0 && at_zero.recall == 1.0, || {
            format!("case {case}: recall at 0 = {}", at_zero.recall)
        })?;
        ensure(at_zero.precision == gt.lesion_load(), || {
            format!(
                "case {case}: precision {} != load {}",
                at_zero.precision,
                gt.lesion_load()
            )
        })?;

        let cfg = MetricConfig::new(r).map_err(|e| e.to_string())?;
        let m = evaluate_pair(&gt, &binarize(&pm, 0.0), &cfg).map_err(|e| e.to_string())?;
        ensure(m.precision == m.lesion_load, || format!("case {case}: evaluate_pair precision"))?;
        let p = m.p_ratio.ok_or("tp = 0 at threshold 0")?;
        let scaled = 1.0 / (1.0 + m.kappa * p);
        worst = worst.max((scaled - r).abs());
        ensure((scaled - r).abs() < 1e-12, || {
            format!("case {case}: scaled precision {scaled} vs r {r}")
        })?;
    }
    Ok(format!("100 pairs, max |1/(1+kp) - r| = {worst:.2e}, {:?}", start.elapsed()))
}

// ---------------------------------------------------------------------------
// closed-form oracle

fn closed_form_oracle() -> Outcome {
    let start = Instant::now();
    let (alpha, gamma, r) = (0.001, 0.2, 0.001);
    let spec = CohortSpec {
        subjects: 7,
        dims: [64, 64, 64],
        load_range: (1e-4, 1e-2),
        blob_count: 4,
        noise: NoiseModel::new(alpha, gamma, NoiseMode::Deterministic, 0).unwrap(),
        seed: 0xC0FFEE,
    };
    let cfg = MetricConfig::new(r).unwrap();
    let subjects = generate_cohort(&spec).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let (mut loads, mut dscs, mut ndscs) = (vec![], vec![], vec![]);
    for s in &subjects {
        let m = evaluate_pair(&s.gt, &s.pred, &cfg).map_err(|e| e.to_string())?;
        let positives = s.gt.positive_count();
        let negatives = s.gt.len() - positives;
        let (fp_flips, fn_flips) = flip_counts(&s.gt, &s.noise);
        ensure(
            m.counts.false_pos == fp_flips as u64 && m.counts.false_neg == fn_flips as u64,
            || format!("{}: realised counts differ from flip counts", s.id),
        )?;
        let cf = closed_form_for_counts(positives, negatives, fp_flips, fn_flips, r)
            .map_err(|e| e.to_string())?;
        let err = (cf.dsc - m.dsc).abs().max((cf.ndsc - m.ndsc).abs());
        worst = worst.max(err);
        ensure(err < 1e-12, || {
            format!("{} load {}: closed form off by {err:e}", s.id, m.lesion_load)
        })?;
        loads.push(m.lesion_load);
        dscs.push(m.dsc);
        ndscs.push(m.ndsc);
    }
    ensure(loads.first() < loads.last(), || "loads not spanning the range".into())?;
    ensure(dscs.windows(2).all(|w| w[0] < w[1]), || {
        format!("DSC not strictly increasing with load: {dscs:?}")
    })?;
    let spread = ndscs.iter().cloned().fold(f64::MIN, f64::max)
        - ndscs.iter().cloned().fold(f64::MAX, f64::min);
    ensure(spread < 0.01, || format!("nDSC spread {spread}"))?;
    let rho = spearman(&dscs, &loads).map_err(|e| e.to_string())?;
    ensure((rho - 1.0).abs() < 1e-12, || format!("spearman(DSC, load) = {rho}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "7 subjects 64^3, max err {worst:.1e}, nDSC spread {spread:.2e}, {elapsed:?}"
    ))
}

// ---------------------------------------------------------------------------
// bias pattern on stochastic cohorts

fn bias_pattern() -> Outcome {
    let start = Instant::now();
    let cfg = MetricConfig::new(0.001).unwrap();
    let seeds = [11u64, 22, 33, 44, 55];
    let mut sums = [0.0f64; 6];
    for &seed in &seeds {
        let spec = CohortSpec {
            subjects: 50,
            dims: [64, 64, 64],
            load_range: (1e-4, 1e-2),
            blob_count: 4,
            noise: NoiseModel::new(0.001, 0.2, NoiseMode::Stochastic, seed).unwrap(),
            seed,
        };
        let subjects = generate_cohort(&spec).map_err(|e| e.to_string())?;
        let records = subjects
            .iter()
            .map(|s| {
                evaluate_pair(&s.gt, &s.pred, &cfg).map(|metrics| SubjectRecord {
                    id: s.id.clone(),
                    metrics,
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let report = CohortReport::from_subjects(records, vec![], &cfg, None, 10)
            .map_err(|e| e.to_string())?;
        let b = &report.bias;
        let vals = [
            b.dsc.rho(),
            b.ndsc.rho(),
            b.dsc.tau(),
            b.ndsc.tau(),
            b.dsc.slope(),
            b.ndsc.slope(),
        ];
        for (acc, v) in sums.iter_mut().zip(vals) {
            *acc += v.ok_or("bias undefined")?;
        }
    }
    let k = seeds.len() as f64;
    let [rho_d, rho_n, tau_d, tau_n, slope_d, slope_n] = sums.map(|s| s / k);
    ensure(rho_d > 0.8, || format!("mean rho(DSC) = {rho_d}"))?;
    ensure(rho_n.abs() < 0.2, || format!("mean rho(nDSC) = {rho_n}"))?;
    ensure(tau_d > tau_n.abs(), || format!("tau DSC {tau_d} vs nDSC {tau_n}"))?;
    ensure(slope_d > slope_n, || format!("slope DSC {slope_d} vs nDSC {slope_n}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "rho {rho_d:.3}/{rho_n:.3}, tau {tau_d:.3}/{tau_n:.3}, slope {slope_d:.3}/{slope_n:.3}, {elapsed:?}"
    ))
}

// ---------------------------------------------------------------------------
// stats against an exhaustive pair-counting oracle

mod oracle {
    /// Rank by counting: 1 + #smaller + (#equal others)/2.
    pub fn ranks(v: &[f64]) -> Vec<f64> {
        v.iter()
            .map(|&a| {
                let less = v.iter().filter(|&&b| b < a).count() as f64;
                let equal = v.iter().filter(|&&b| b == a).count() as f64 - 1.0;
                1.0 + less + equal / 2.0
            })
            .collect()
    }

    fn cov(a: &[f64], b: &[f64]) -> f64 {
        // pairwise form, proportional to the covariance
        let mut s = 0.0;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                s += (a[i] - a[j]) * (b[i] - b[j]);
            }
        }
        s
    }

    pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
        let (rx, ry) = (ranks(x), ranks(y));
        let (vx, vy) = (cov(&rx, &rx), cov(&ry, &ry));
        (vx > 0.0 && vy > 0.0).then(|| cov(&rx, &ry) / (vx * vy).sqrt())
    }

    pub fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
        let (rx, ry) = (ranks(x), ranks(y));
        let vx = cov(&rx, &rx);
        (vx > 0.0).then(|| cov(&rx, &ry) / vx)
    }

    pub fn intercept(x: &[f64], y: &[f64]) -> Option<f64> {
        let (rx, ry) = (ranks(x), ranks(y));
        let n = x.len() as f64;
        let s = slope(x, y)?;
        Some(ry.iter().sum::<f64>() / n - s * rx.iter().sum::<f64>() / n)
    }

    pub fn tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
        let (mut c, mut d, mut only_x, mut only_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let dx = x[i] - x[j];
                let dy = y[i] - y[j];
                if dx == 0.0 && dy == 0.0 {
                    continue;
                } else if dx == 0.0 {
                    only_x += 1.0;
                } else if dy == 0.0 {
                    only_y += 1.0;
                } else if (dx > 0.0) == (dy > 0.0) {
                    c += 1.0;
                } else {
                    d += 1.0;
                }
            }
        }
        let (ax, ay) = (c + d + only_y, c + d + only_x);
        (ax > 0.0 && ay > 0.0).then(|| (c - d) / (ax * ay).sqrt())
    }

    pub fn permutations(items: &[f64]) -> Vec<Vec<f64>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, head);
                out.push(p);
            }
        }
        out
    }
}

fn stats_oracle() -> Outcome {
    let start = Instant::now();
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    let mut check = |x: &[f64], y: &[f64]| -> Result<(), String> {
        cases += 1;
        let cmp = |name: &str, got: Option<f64>, want: Option<f64>| match (got, want) {
            (Some(g), Some(w)) if (g - w).abs() < 1e-12 => Ok((g - w).abs()),
            (None, None) => Ok(0.0),
            (g, w) => Err(format!("{name} x={x:?} y={y:?}: got {g:?}, oracle {w:?}")),
        };
        let e1 = cmp("spearman", spearman(x, y).ok(), oracle::spearman(x, y))?;
        let e2 = cmp("kendall", kendall_tau(x, y).ok(), oracle::tau_b(x, y))?;
        let fit = rank_regression(x, y).ok();
        let e3 = cmp("slope", fit.map(|f| f.slope), oracle::slope(x, y))?;
        let e4 = cmp("intercept", fit.map(|f| f.intercept), oracle::intercept(x, y))?;
        worst = worst.max(e1).max(e2).max(e3).max(e4);
        Ok(())
    };
    for n in 2..=6usize {
        let distinct: Vec<f64> = (1..=n).map(|v| v as f64).collect();
        let mut xs = vec![distinct.clone()];
        // tie patterns: a leading pair, a trailing triple, all equal
        let mut pair = distinct.clone();
        pair[1] = pair[0];
        xs.push(pair);
        if n >= 3 {
            let mut triple = distinct.clone();
            triple[n - 2] = triple[n - 1];
            triple[n - 3] = triple[n - 1];
            xs.push(triple);
        }
        xs.push(vec![2.0; n]);
        let mut ys = vec![distinct.clone()];
        let mut tied = distinct.clone();
        tied[n - 1] = tied[n - 2];
        ys.push(tied);
        for x in &xs {
            for base in &ys {
                for y in oracle::permutations(base) {
                    check(x, &y)?;
                }
            }
        }
    }
    Ok(format!("{cases} vector pairs, max err {worst:.1e}, {:?}", start.elapsed()))
}

// ---------------------------------------------------------------------------
// metric core against a voxel loop

struct Naive {
    load: f64,
    h: f64,
    kappa: f64,
    dsc: f64,
    ndsc: f64,
    precision: f64,
    recall: f64,
}

/// Straight voxel loop, literal fraction forms (p = FP/TP, n = FN/TP).
fn naive_pair(gt: &[bool], pred: &[bool], r: f64) -> Option<Naive> {
    let (mut tp, mut fp, mut fn_, mut tn) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..gt.len() {
        if gt[i] && pred[i] {
            tp += 1.0;
        } else if pred[i] {
            fp += 1.0;
        } else if gt[i] {
            fn_ += 1.0;
        } else {
            tn += 1.0;
        }
    }
    let pos = tp + fn_;
    let neg = fp + tn;
    if neg == 0.0 || (pos == 0.0 && fp > 0.0) {
        return None;
    }
    let h = pos / neg;
    let kappa = h * (1.0 / r - 1.0);
    let (dsc, ndsc, precision, recall) = if tp > 0.0 {
        let p = fp / tp;
        let n = fn_ / tp;
        (
            2.0 / (2.0 + p + n),
            2.0 / (2.0 + kappa * p + n),
            1.0 / (1.0 + p),
            1.0 / (1.0 + n),
        )
    } else if fp + fn_ == 0.0 {
        (1.0, 1.0, 1.0, 1.0)
    } else {
        (0.0, 0.0, 0.0, 0.0)
    };
    Some(Naive {
        load: pos / gt.len() as f64,
        h,
        kappa,
        dsc,
        ndsc,
        precision,
        recall,
    })
}

fn metric_brute_force() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst = 0.0f64;
    let mut errors_agreed = 0;
    for case in 0..1000 {
        let dims = [
            1 + upto(&mut rng, 6) as usize,
            1 + upto(&mut rng, 6) as usize,
            1 + upto(&mut rng, 6) as usize,
        ];
        let n: usize = dims.iter().product();
        let dg = unit(&mut rng) * 0.6;
        let dp = unit(&mut rng) * 0.6;
        let g: Vec<bool> = (0..n).map(|_| unit(&mut rng) < dg).collect();
        let p: Vec<bool> = (0..n).map(|_| unit(&mut rng) < dp).collect();
        let r = 0.001 + 0.9 * unit(&mut rng);
        let cfg = MetricConfig::new(r).unwrap();
        let got = evaluate_pair(
            &BinaryMask::new(dims, g.clone()).unwrap(),
            &BinaryMask::new(dims, p.clone()).unwrap(),
            &cfg,
        );
        match (got, naive_pair(&g, &p, r)) {
            (Ok(m), Some(o)) => {
                let pairs = [
                    (m.lesion_load, o.load),
                    (m.h, o.h),
                    (m.kappa, o.kappa),
                    (m.dsc, o.dsc),
                    (m.ndsc, o.ndsc),
                    (m.precision, o.precision),
                    (m.recall, o.recall),
                ];
                for (a, b) in pairs {
                    let err = (a - b).abs();
                    worst = worst.max(err);
                    ensure(err < 1e-12, || format!("case {case}: {a} vs {b}"))?;
                }
            }
            (Err(_), None) => errors_agreed += 1,
            (got, _) => return Err(format!("case {case}: library {got:?} disagrees with oracle")),
        }
    }
    Ok(format!(
        "1000 pairs ({errors_agreed} degenerate, both rejected), max err {worst:.1e}, {:?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------
// NIfTI round trips and CLI byte stability

fn sample_volume(dt: Datatype) -> Volume {
    let mut h = VolumeHeader::new([3, 2, 2], dt);
    h.voxel_spacing = [1.0, 0.5, 2.0];
    let data: Vec<f64> = match dt {
        Datatype::Uint8 => vec![0., 1., 2., 3., 127., 128., 200., 255., 9., 8., 7., 6.],
        Datatype::Int16 => vec![-32768., -1., 0., 1., 32767., 5., -5., 300., -300., 2., 3., 4.],
        Datatype::Float32 => vec![0.0, 0.35, 1.0, -2.5, 1e-30, 3.4e38, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
            .into_iter()
            .map(|v: f64| v as f32 as f64)
            .collect(),
        Datatype::Float64 => vec![0.0, 0.35, 1.0, -2.5, 1e-300, 1e300, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
    };
    Volume::new(h, data).unwrap()
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ndsc"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "ndsc {args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

const GOLDEN_EVALUATE: &str = r#"{
  "reference_r": 0.001,
  "threshold": null,
  "lesion_load": 0.5,
  "h": 1.0,
  "kappa": 999.0,
  "dsc": 0.5,
  "ndsc": 0.001996007984031936,
  "precision": 0.5,
  "recall": 0.5,
  "p_ratio": 1.0,
  "n_ratio": 1.0,
  "counts": {
    "tp": 1,
    "fp": 1,
    "fn": 1,
    "tn": 1
  }
}
"#;

fn write_mask(dir: &Path, name: &str, dims: [usize; 3], bits: &[u8]) -> String {
    let path = dir.join(name);
    let v = Volume::from_mask(&BinaryMask::from_u8(dims, bits).unwrap());
    ndsc::volume::write_nifti_file(&v, &path).unwrap();
    path.to_string_lossy().into_owned()
}

fn io_and_cli() -> Outcome {
    let start = Instant::now();
    for dt in Datatype::ALL {
        let v = sample_volume(dt);
        let mut le = Vec::new();
        write_nifti(&v, &mut le).map_err(|e| e.to_string())?;
        let mut be = Vec::new();
        write_nifti_with_order(&v, &mut be, ByteOrder::Big).map_err(|e| e.to_string())?;
        ensure(le != be, || format!("{dt:?}: BE and LE encodings identical"))?;
        let from_le = read_nifti(&le[..]).map_err(|e| e.to_string())?;
        let from_be = read_nifti(&be[..]).map_err(|e| e.to_string())?;
        ensure(from_le == v && from_be == v, || format!("{dt:?}: round trip mismatch"))?;
        let bits_equal = from_le
            .data()
            .iter()
            .zip(v.data())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        ensure(bits_equal, || format!("{dt:?}: payload not bit-exact"))?;
        let mut again = Vec::new();
        write_nifti(&from_be, &mut again).map_err(|e| e.to_string())?;
        ensure(again == le, || format!("{dt:?}: re-encoding differs"))?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let gt = write_mask(dir.path(), "gt.nii", [2, 2, 1], &[1, 1, 0, 0]);
    let pred = write_mask(dir.path(), "pred.nii", [2, 2, 1], &[1, 0, 1, 0]);
    let args = ["--quiet", "evaluate", "--gt", &gt, "--pred", &pred];
    let first = run_cli(&args)?;
    let second = run_cli(&args)?;
    ensure(first == second, || "evaluate output differs between runs".into())?;
    ensure(first == GOLDEN_EVALUATE.as_bytes(), || {
        format!("evaluate JSON drifted:\n{}", String::from_utf8_lossy(&first))
    })?;

    let manifest = dir.path().join("manifest.csv");
    std::fs::write(
        &manifest,
        "id,gt_path,pred_path,pred_kind\nb,gt.nii,pred.nii,binary\na,gt.nii,gt.nii,binary\nc,gt.nii,pred.nii,binary\n",
    )
    .map_err(|e| e.to_string())?;
    let m = manifest.to_string_lossy().into_owned();
    let one = run_cli(&["--quiet", "--jobs", "1", "cohort", "--manifest", &m])?;
    let four = run_cli(&["--quiet", "--jobs", "4", "cohort", "--manifest", &m])?;
    ensure(one == four, || "cohort JSON depends on --jobs".into())?;
    Ok(format!("4 datatypes x 2 byte orders, CLI stable, {:?}", start.elapsed()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("worked-example anchor (kappa, re-ranking)", worked_example),
        ("recall-1 anchor", recall_one_anchor),
        ("closed-form oracle equivalence", closed_form_oracle),
        ("bias pattern on stochastic cohorts", bias_pattern),
        ("stats vs exhaustive pair-counting oracle", stats_oracle),
        ("metric core vs voxel-loop oracle", metric_brute_force),
        ("NIfTI round trip and CLI byte stability", io_and_cli),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
