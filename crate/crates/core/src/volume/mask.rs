use crate::error::{Error, Result};

use super::Volume;

pub const DEFAULT_BINARY_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_CLAMP_EPSILON: f64 = 1e-6;

/// One boolean per voxel; `true` is the positive (lesion) class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    dims: [usize; 3],
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(dims: [usize; 3], bits: Vec<bool>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if dims.contains(&0) || bits.len() != n {
            return Err(Error::InvalidVolume(format!(
                "mask of {} voxels does not fit dims {dims:?}",
                bits.len()
            )));
        }
        Ok(BinaryMask { dims, bits })
    }

    /// All-negative mask.
    pub fn empty(dims: [usize; 3]) -> Self {
        BinaryMask {
            dims,
            bits: vec![false; dims.iter().product()],
        }
    }

    /// Convenience constructor for tests and examples: nonzero means positive.
    pub fn from_u8(dims: [usize; 3], values: &[u8]) -> Result<Self> {
        Self::new(dims, values.iter().map(|&v| v != 0).collect())
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Fraction of positive voxels over the whole grid.
    pub fn lesion_load(&self) -> f64 {
        self.positive_count() as f64 / self.len() as f64
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }
}

/// One probability per voxel, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    dims: [usize; 3],
    probs: Vec<f64>,
}

impl ProbabilityMap {
    pub fn new(dims: [usize; 3], probs: Vec<f64>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if dims.contains(&0) || probs.len() != n {
            return Err(Error::InvalidVolume(format!(
                "map of {} voxels does not fit dims {dims:?}",
                probs.len()
            )));
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::NotProbability { index, value });
        }
        Ok(ProbabilityMap { dims, probs })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

impl From<&BinaryMask> for ProbabilityMap {
    fn from(mask: &BinaryMask) -> Self {
        ProbabilityMap {
            dims: mask.dims,
            probs: mask.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// Validates a ground-truth style volume: every value must lie within
/// `tolerance` of 0 or of 1. No thresholding happens here.
pub fn as_binary_mask(v: &Volume, tolerance: f64) -> Result<BinaryMask> {
    if !(0.0..0.5).contains(&tolerance) {
        return Err(Error::InvalidParameter(format!(
            "binary tolerance must be in [0, 0.5), got {tolerance}"
        )));
    }
    let bits = v
        .data()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if (value - 1.0).abs() <= tolerance {
                Ok(true)
            } else if value.abs() <= tolerance {
                Ok(false)
            } else {
                Err(Error::NotBinary { index, value })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinaryMask {
        dims: v.dims(),
        bits,
    })
}

/// Validates a probability volume, clamping values that stray at most
/// `clamp_epsilon` outside `[0, 1]`.
pub fn as_probability_map(v: &Volume, clamp_epsilon: f64) -> Result<ProbabilityMap> {
    if !(clamp_epsilon >= 0.0 && clamp_epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "clamp epsilon must be non-negative, got {clamp_epsilon}"
        )));
    }
    let probs = v
        .data()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value >= -clamp_epsilon && value <= 1.0 + clamp_epsilon {
                Ok(value.clamp(0.0, 1.0))
            } else {
                Err(Error::NotProbability { index, value })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityMap {
        dims: v.dims(),
        probs,
    })
}
