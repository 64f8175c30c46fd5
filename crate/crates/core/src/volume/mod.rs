//! Volumetric data: the on-disk [`Volume`] and the validated views used by
//! the metrics, [`BinaryMask`] and [`ProbabilityMap`].
//!
//! Voxels are stored in NIfTI order, fastest-varying axis first:
//! `index = x + nx * (y + ny * z)`.

mod mask;
mod nifti;

pub use mask::{
    as_binary_mask, as_probability_map, BinaryMask, ProbabilityMap, DEFAULT_BINARY_TOLERANCE,
    DEFAULT_CLAMP_EPSILON,
};
pub use nifti::{
    read_nifti, read_nifti_file, write_nifti, write_nifti_file, write_nifti_with_order,
    ByteOrder, HEADER_SIZE, MAGIC, MAX_DIM, VOX_OFFSET,
};

use crate::error::{Error, Result};

/// Voxel datatypes supported on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Datatype {
    Uint8,
    Int16,
    Float32,
    Float64,
}

impl Datatype {
    pub const ALL: [Datatype; 4] = [
        Datatype::Uint8,
        Datatype::Int16,
        Datatype::Float32,
        Datatype::Float64,
    ];

    /// NIfTI-1 `datatype` code.
    pub fn code(self) -> i16 {
        match self {
            Datatype::Uint8 => 2,
            Datatype::Int16 => 4,
            Datatype::Float32 => 16,
            Datatype::Float64 => 64,
        }
    }

    pub fn from_code(code: i16) -> Result<Self> {
        match code {
            2 => Ok(Datatype::Uint8),
            4 => Ok(Datatype::Int16),
            16 => Ok(Datatype::Float32),
            64 => Ok(Datatype::Float64),
            other => Err(Error::UnsupportedDatatype(other)),
        }
    }

    pub fn bytes_per_voxel(self) -> usize {
        match self {
            Datatype::Uint8 => 1,
            Datatype::Int16 => 2,
            Datatype::Float32 => 4,
            Datatype::Float64 => 8,
        }
    }

    pub fn bitpix(self) -> i16 {
        (self.bytes_per_voxel() * 8) as i16
    }

    /// Whether `value` is stored without loss by this datatype.
    pub fn represents(self, value: f64) -> bool {
        match self {
            Datatype::Uint8 => value.fract() == 0.0 && (0.0..=255.0).contains(&value),
            Datatype::Int16 => {
                value.fract() == 0.0 && (i16::MIN as f64..=i16::MAX as f64).contains(&value)
            }
            Datatype::Float32 => value.is_finite() && (value as f32) as f64 == value,
            Datatype::Float64 => value.is_finite(),
        }
    }
}

/// Orientation and affine fields carried through a read/write cycle untouched.
///
/// Holds `pixdim[0]` (qfac) followed by header bytes 252..328
/// (`qform_code`, `sform_code`, quaternion, offsets and `srow_*`),
/// always in little-endian order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub(crate) bytes: [u8; 80],
}

impl Default for Orientation {
    fn default() -> Self {
        Orientation { bytes: [0; 80] }
    }
}

impl Orientation {
    pub fn as_bytes(&self) -> &[u8; 80] {
        &self.bytes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeHeader {
    pub dims: [usize; 3],
    pub datatype: Datatype,
    /// Voxel size in mm along each axis.
    pub voxel_spacing: [f32; 3],
    pub scale_slope: f32,
    pub scale_intercept: f32,
    pub orientation: Orientation,
}

impl VolumeHeader {
    /// Header with unit spacing and identity scaling.
    pub fn new(dims: [usize; 3], datatype: Datatype) -> Self {
        VolumeHeader {
            dims,
            datatype,
            voxel_spacing: [1.0; 3],
            scale_slope: 1.0,
            scale_intercept: 0.0,
            orientation: Orientation::default(),
        }
    }

    pub fn voxel_count(&self) -> usize {
        self.dims.iter().product()
    }

    fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::InvalidVolume(format!(
                "all dims must be >= 1, got {:?}",
                self.dims
            )));
        }
        if self
            .voxel_spacing
            .iter()
            .any(|&s| !(s.is_finite() && s > 0.0))
        {
            return Err(Error::InvalidVolume(format!(
                "voxel spacing must be positive, got {:?}",
                self.voxel_spacing
            )));
        }
        Ok(())
    }
}

/// A dense 3D scalar grid plus its header.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    header: VolumeHeader,
    data: Vec<f64>,
}

impl Volume {
    /// Builds a volume, checking that the data fills the grid, every value is
    /// finite, and every value is representable by the header datatype.
    pub fn new(header: VolumeHeader, data: Vec<f64>) -> Result<Self> {
        header.validate()?;
        if data.len() != header.voxel_count() {
            return Err(Error::InvalidVolume(format!(
                "data length {} does not match dims {:?}",
                data.len(),
                header.dims
            )));
        }
        if let Some((i, v)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !header.datatype.represents(**v))
        {
            return Err(Error::InvalidVolume(format!(
                "voxel {i} value {v} is not representable as {:?}",
                header.datatype
            )));
        }
        Ok(Volume { header, data })
    }

    /// Encodes a mask as a uint8 volume with values 0/1.
    pub fn from_mask(mask: &BinaryMask) -> Self {
        let data = mask.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Volume {
            header: VolumeHeader::new(mask.dims(), Datatype::Uint8),
            data,
        }
    }

    /// Encodes a probability map as a float64 volume.
    pub fn from_probabilities(map: &ProbabilityMap) -> Self {
        Volume {
            header: VolumeHeader::new(map.dims(), Datatype::Float64),
            data: map.probs().to_vec(),
        }
    }

    pub fn header(&self) -> &VolumeHeader {
        &self.header
    }

    pub fn dims(&self) -> [usize; 3] {
        self.header.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

pub(crate) fn check_dims(left: [usize; 3], right: [usize; 3]) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}
