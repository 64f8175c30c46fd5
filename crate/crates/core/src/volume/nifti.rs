//! Single-file NIfTI-1 (`.nii`, magic `n+1\0`) reader and writer.
//!
//! Only the fields needed for voxel counting are interpreted: `sizeof_hdr`,
//! `dim`, `datatype`, `bitpix`, `pixdim[1..=3]`, `vox_offset`, `scl_slope`,
//! `scl_inter` and `magic`. The orientation block is carried as opaque bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{Datatype, Orientation, Volume, VolumeHeader};

pub const HEADER_SIZE: usize = 348;
pub const MAGIC: &[u8; 4] = b"n+1\0";
/// Data offset used on write: header plus the 4-byte extension flag.
pub const VOX_OFFSET: usize = 352;
/// Largest value a 16-bit `dim` entry can hold.
pub const MAX_DIM: usize = i16::MAX as usize;

const OFF_DIM: usize = 40;
const OFF_DATATYPE: usize = 70;
const OFF_BITPIX: usize = 72;
const OFF_PIXDIM: usize = 76;
const OFF_VOX_OFFSET: usize = 108;
const OFF_SCL_SLOPE: usize = 112;
const OFF_SCL_INTER: usize = 116;
const OFF_XYZT_UNITS: usize = 123;
const OFF_ORIENT: usize = 252;
const OFF_ORIENT_END: usize = 328;
const OFF_MAGIC: usize = 344;

const XYZT_MM: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

struct Fields<'a> {
    bytes: &'a [u8],
    order: ByteOrder,
}

impl Fields<'_> {
    fn raw<const N: usize>(&self, at: usize) -> [u8; N] {
        let mut b = [0u8; N];
        b.copy_from_slice(&self.bytes[at..at + N]);
        if self.order == ByteOrder::Big {
            b.reverse();
        }
        b
    }
    fn i16(&self, at: usize) -> i16 {
        i16::from_le_bytes(self.raw(at))
    }
    fn f32(&self, at: usize) -> f32 {
        f32::from_le_bytes(self.raw(at))
    }
    fn f64(&self, at: usize) -> f64 {
        f64::from_le_bytes(self.raw(at))
    }
}

fn detect_order(bytes: &[u8]) -> Result<ByteOrder> {
    let mut b = [0u8; 4];
    b.copy_from_slice(&bytes[..4]);
    if i32::from_le_bytes(b) == HEADER_SIZE as i32 {
        Ok(ByteOrder::Little)
    } else if i32::from_be_bytes(b) == HEADER_SIZE as i32 {
        Ok(ByteOrder::Big)
    } else {
        Err(Error::BadHeader(format!(
            "sizeof_hdr is neither 348 little- nor big-endian (bytes {b:02x?})"
        )))
    }
}

/// Parses a complete single-file NIfTI-1 stream.
///
/// A non-zero `scl_slope` other than the identity pair (1, 0) is applied to
/// every voxel; the resulting volume is float64 with identity scaling so the
/// scaled values are held exactly.
pub fn read_nifti<R: Read>(mut source: R) -> Result<Volume> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    parse(&bytes)
}

pub fn read_nifti_file(path: impl AsRef<Path>) -> Result<Volume> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    parse(&bytes)
}

fn parse(bytes: &[u8]) -> Result<Volume> {
    if bytes.len() < HEADER_SIZE {
        return Err(Error::BadHeader(format!(
            "stream of {} bytes is shorter than the 348-byte header",
            bytes.len()
        )));
    }
    let order = detect_order(bytes)?;
    if &bytes[OFF_MAGIC..OFF_MAGIC + 4] != MAGIC {
        return Err(Error::BadHeader(format!(
            "magic {:02x?} is not n+1",
            &bytes[OFF_MAGIC..OFF_MAGIC + 4]
        )));
    }
    let f = Fields { bytes, order };

    let ndim = f.i16(OFF_DIM);
    if !(1..=7).contains(&ndim) {
        return Err(Error::BadHeader(format!("dim[0] = {ndim} outside 1..=7")));
    }
    let ndim = ndim as usize;
    let mut dims = [1usize; 3];
    for axis in 1..=ndim {
        let d = f.i16(OFF_DIM + 2 * axis);
        if d < 1 {
            return Err(Error::BadHeader(format!("dim[{axis}] = {d} is not positive")));
        }
        if axis <= 3 {
            dims[axis - 1] = d as usize;
        } else if d != 1 {
            return Err(Error::BadHeader(format!(
                "dim[{axis}] = {d}; only 3D volumes are supported"
            )));
        }
    }

    let datatype = Datatype::from_code(f.i16(OFF_DATATYPE))?;
    let bitpix = f.i16(OFF_BITPIX);
    if bitpix != datatype.bitpix() {
        return Err(Error::BadHeader(format!(
            "bitpix {bitpix} does not match {datatype:?}"
        )));
    }

    let mut voxel_spacing = [0f32; 3];
    for (axis, s) in voxel_spacing.iter_mut().enumerate() {
        *s = f.f32(OFF_PIXDIM + 4 * (axis + 1)).abs();
    }

    let vox_offset = f.f32(OFF_VOX_OFFSET);
    if !(vox_offset.is_finite() && vox_offset >= HEADER_SIZE as f32) || vox_offset.fract() != 0.0
    {
        return Err(Error::BadHeader(format!("vox_offset {vox_offset} is invalid")));
    }
    let offset = vox_offset as usize;

    let count: usize = dims.iter().product();
    let needed = count * datatype.bytes_per_voxel();
    if offset.checked_add(needed).is_none_or(|end| end > bytes.len()) {
        return Err(Error::Truncated {
            offset,
            needed,
            available: bytes.len(),
        });
    }
    let payload = Fields {
        bytes: &bytes[offset..offset + needed],
        order,
    };
    let mut data: Vec<f64> = (0..count)
        .map(|i| match datatype {
            Datatype::Uint8 => payload.bytes[i] as f64,
            Datatype::Int16 => payload.i16(2 * i) as f64,
            Datatype::Float32 => payload.f32(4 * i) as f64,
            Datatype::Float64 => payload.f64(8 * i),
        })
        .collect();

    let slope = f.f32(OFF_SCL_SLOPE);
    let inter = f.f32(OFF_SCL_INTER);
    let mut datatype = datatype;
    if slope != 0.0 && slope.is_finite() && !(slope == 1.0 && inter == 0.0) {
        let (s, b) = (slope as f64, inter as f64);
        data.iter_mut().for_each(|v| *v = *v * s + b);
        datatype = Datatype::Float64;
    }
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidVolume(format!("voxel {i} is not finite")));
    }

    let mut orientation = Orientation::default();
    orientation.bytes[..4].copy_from_slice(&f.f32(OFF_PIXDIM).to_le_bytes());
    orientation.bytes[4..6].copy_from_slice(&f.i16(OFF_ORIENT).to_le_bytes());
    orientation.bytes[6..8].copy_from_slice(&f.i16(OFF_ORIENT + 2).to_le_bytes());
    for k in 0..18 {
        let at = OFF_ORIENT + 4 + 4 * k;
        orientation.bytes[8 + 4 * k..12 + 4 * k].copy_from_slice(&f.f32(at).to_le_bytes());
    }

    let header = VolumeHeader {
        dims,
        datatype,
        voxel_spacing,
        scale_slope: 1.0,
        scale_intercept: 0.0,
        orientation,
    };
    Volume::new(header, data)
}

/// Writes `v` as little-endian single-file NIfTI-1 with identity scaling.
pub fn write_nifti<W: Write>(v: &Volume, sink: W) -> Result<()> {
    write_nifti_with_order(v, sink, ByteOrder::Little)
}

pub fn write_nifti_file(v: &Volume, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_nifti(v, &mut w).map_err(|e| match e {
        Error::Stream(io) => Error::io(path, io),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `v` in the requested byte order. Big-endian output exists mainly
/// to produce cross-endian fixtures.
pub fn write_nifti_with_order<W: Write>(v: &Volume, mut sink: W, order: ByteOrder) -> Result<()> {
    let bytes = encode(v, order)?;
    sink.write_all(&bytes)?;
    Ok(())
}

fn encode(v: &Volume, order: ByteOrder) -> Result<Vec<u8>> {
    let h = v.header();
    if let Some(&d) = h.dims.iter().find(|&&d| d > MAX_DIM) {
        return Err(Error::InvalidVolume(format!(
            "dim {d} exceeds the 16-bit dim field limit {MAX_DIM}"
        )));
    }

    let put = |buf: &mut [u8], at: usize, le: &[u8]| {
        let dst = &mut buf[at..at + le.len()];
        dst.copy_from_slice(le);
        if order == ByteOrder::Big {
            dst.reverse();
        }
    };

    let dt = h.datatype;
    let mut out = vec![0u8; VOX_OFFSET + v.data().len() * dt.bytes_per_voxel()];
    put(&mut out, 0, &(HEADER_SIZE as i32).to_le_bytes());
    put(&mut out, OFF_DIM, &3i16.to_le_bytes());
    for axis in 0..7 {
        let d = if axis < 3 { h.dims[axis] as i16 } else { 1 };
        put(&mut out, OFF_DIM + 2 * (axis + 1), &d.to_le_bytes());
    }
    put(&mut out, OFF_DATATYPE, &dt.code().to_le_bytes());
    put(&mut out, OFF_BITPIX, &dt.bitpix().to_le_bytes());

    let o = &h.orientation.bytes;
    put(&mut out, OFF_PIXDIM, &o[..4]);
    for axis in 0..3 {
        put(
            &mut out,
            OFF_PIXDIM + 4 * (axis + 1),
            &h.voxel_spacing[axis].to_le_bytes(),
        );
    }
    put(&mut out, OFF_VOX_OFFSET, &(VOX_OFFSET as f32).to_le_bytes());
    put(&mut out, OFF_SCL_SLOPE, &1f32.to_le_bytes());
    put(&mut out, OFF_SCL_INTER, &0f32.to_le_bytes());
    out[OFF_XYZT_UNITS] = XYZT_MM;
    put(&mut out, OFF_ORIENT, &o[4..6]);
    put(&mut out, OFF_ORIENT + 2, &o[6..8]);
    for k in 0..18 {
        put(&mut out, OFF_ORIENT + 4 + 4 * k, &o[8 + 4 * k..12 + 4 * k]);
    }
    debug_assert_eq!(OFF_ORIENT + 4 + 4 * 18, OFF_ORIENT_END);
    out[OFF_MAGIC..OFF_MAGIC + 4].copy_from_slice(MAGIC);

    let payload = &mut out[VOX_OFFSET..];
    for (i, &value) in v.data().iter().enumerate() {
        match dt {
            Datatype::Uint8 => payload[i] = value as u8,
            Datatype::Int16 => put(payload, 2 * i, &(value as i16).to_le_bytes()),
            Datatype::Float32 => put(payload, 4 * i, &(value as f32).to_le_bytes()),
            Datatype::Float64 => put(payload, 8 * i, &value.to_le_bytes()),
        }
    }
    Ok(out)
}
