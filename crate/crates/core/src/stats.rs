//! Rank statistics used to measure how strongly a metric tracks lesion load.

use serde::Serialize;

use crate::error::{Error, Result};

/// 1-based ascending ranks, ties sharing the mean of their rank span.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub tau: f64,
    pub n: usize,
}

/// Least-squares line through `(ranks(x), ranks(y))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankFit {
    pub slope: f64,
    pub intercept: f64,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Stats(format!(
            "value at index {i} is not finite ({})",
            values[i]
        ))),
        None => Ok(()),
    }
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Stats(format!(
            "need at least 2 observations, got {}",
            x.len()
        )));
    }
    check_finite(x)?;
    check_finite(y)
}

pub fn ranks(values: &[f64]) -> Result<RankVector> {
    if values.is_empty() {
        return Err(Error::Stats("cannot rank an empty vector".into()));
    }
    check_finite(values)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = avg;
        }
        start = end;
    }
    Ok(RankVector(out))
}

struct Moments {
    mean_x: f64,
    mean_y: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Moments {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Moments {
        mean_x,
        mean_y,
        sxx,
        syy,
        sxy,
    }
}

/// Spearman's rho as the Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (rx, ry) = (ranks(x)?, ranks(y)?);
    let m = moments(rx.as_slice(), ry.as_slice());
    if m.sxx == 0.0 || m.syy == 0.0 {
        return Err(Error::Stats("constant input: rank variance is zero".into()));
    }
    Ok((m.sxy / (m.sxx.sqrt() * m.syy.sqrt())).clamp(-1.0, 1.0))
}

/// Kendall's tau-b, computed with Knight's O(n log n) merge-sort algorithm.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let pairs = |len: usize| (len * (len - 1) / 2) as u64;
    let total = pairs(n);

    // ties in x, and joint ties in (x, y)
    let (mut tied_x, mut tied_xy) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1usize, 1usize);
    for w in 1..n {
        let (prev, cur) = (perm[w - 1], perm[w]);
        if x[cur] == x[prev] {
            run_x += 1;
            if y[cur] == y[prev] {
                run_xy += 1;
            } else {
                tied_xy += pairs(run_xy);
                run_xy = 1;
            }
        } else {
            tied_x += pairs(run_x);
            tied_xy += pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    tied_x += pairs(run_x);
    tied_xy += pairs(run_xy);

    let swaps = merge_sort_count(&mut perm, y);

    let mut tied_y = 0u64;
    let mut run_y = 1usize;
    for w in 1..n {
        if y[perm[w]] == y[perm[w - 1]] {
            run_y += 1;
        } else {
            tied_y += pairs(run_y);
            run_y = 1;
        }
    }
    tied_y += pairs(run_y);

    if tied_x == total || tied_y == total {
        return Err(Error::Stats("all pairs tied: tau-b undefined".into()));
    }
    let numer = total as f64 - tied_x as f64 - tied_y as f64 + tied_xy as f64 - 2.0 * swaps as f64;
    let denom = ((total - tied_x) as f64).sqrt() * ((total - tied_y) as f64).sqrt();
    Ok((numer / denom).clamp(-1.0, 1.0))
}

/// Stable merge sort of `idx` by `key`, returning the number of strict inversions.
fn merge_sort_count(idx: &mut [usize], key: &[f64]) -> u64 {
    let n = idx.len();
    if n < 2 {
        return 0;
    }
    let mut buf = idx.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    let (mut src, mut dst): (&mut [usize], &mut [usize]) = (idx, &mut buf);
    let mut in_idx = true;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if key[src[j]] < key[src[i]] {
                    dst[k] = src[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    dst[k] = src[i];
                    i += 1;
                }
                k += 1;
            }
            dst[k..k + (mid - i)].copy_from_slice(&src[i..mid]);
            k += mid - i;
            dst[k..k + (hi - j)].copy_from_slice(&src[j..hi]);
            lo = hi;
        }
        std::mem::swap(&mut src, &mut dst);
        in_idx = !in_idx;
        width *= 2;
    }
    if !in_idx {
        dst.copy_from_slice(src);
    }
    swaps
}

/// OLS fit of `ranks(y)` on `ranks(x)`.
pub fn rank_regression(x: &[f64], y: &[f64]) -> Result<RankFit> {
    check_pair(x, y)?;
    let (rx, ry) = (ranks(x)?, ranks(y)?);
    let m = moments(rx.as_slice(), ry.as_slice());
    if m.sxx == 0.0 {
        return Err(Error::Stats("constant x: rank variance is zero".into()));
    }
    let slope = m.sxy / m.sxx;
    Ok(RankFit {
        slope,
        intercept: m.mean_y - slope * m.mean_x,
    })
}

/// Spearman and Kendall together.
pub fn correlate(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    Ok(CorrelationResult {
        rho: spearman(x, y)?,
        tau: kendall_tau(x, y)?,
        n: x.len(),
    })
}
