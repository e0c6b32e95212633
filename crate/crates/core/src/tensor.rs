//! Feature tensors and their bit-exact on-disk format.
//!
//! Layout: magic `GSC6`, u32 version (= 1), u8 dtype tag (0 = f32, 1 = f64,
//! 2 = u8), u8 ndim, `ndim` little-endian u32 dims, then the little-endian
//! row-major payload. No timestamps or padding, so writes are deterministic
//! and `read . write` is the identity on bytes.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const TENSOR_MAGIC: &[u8; 4] = b"GSC6";
pub const TENSOR_FORMAT_VERSION: u32 = 1;

/// Element type tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F32,
    F64,
    U8,
}

impl Dtype {
    pub fn tag(self) -> u8 {
        match self {
            Dtype::F32 => 0,
            Dtype::F64 => 1,
            Dtype::U8 => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Dtype::F32),
            1 => Ok(Dtype::F64),
            2 => Ok(Dtype::U8),
            other => Err(Error::UnknownDtype(other)),
        }
    }

    pub fn element_bytes(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
            Dtype::U8 => 1,
        }
    }
}

/// Row-major element buffer, one variant per dtype.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    F64(Vec<f64>),
    U8(Vec<u8>),
}

impl TensorData {
    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::F64(v) => v.len(),
            TensorData::U8(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            TensorData::F32(_) => Dtype::F32,
            TensorData::F64(_) => Dtype::F64,
            TensorData::U8(_) => Dtype::U8,
        }
    }
}

/// An n-dimensional real-valued array; the unit of everything transmitted.
///
/// Invariants (checked at construction): shape is non-empty with every
/// dimension >= 1, the buffer length equals the shape product, and float
/// elements are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    shape: Vec<usize>,
    data: TensorData,
}

impl FeatureTensor {
    pub fn new(shape: Vec<usize>, data: TensorData) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidShape("shape must be non-empty".into()));
        }
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::InvalidShape(format!(
                "every dimension must be >= 1, got {shape:?}"
            )));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::InvalidShape(format!(
                "buffer has {} elements but shape {:?} requires {}",
                data.len(),
                shape,
                expected
            )));
        }
        match &data {
            TensorData::F32(v) => {
                if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { index: i });
                }
            }
            TensorData::F64(v) => {
                if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { index: i });
                }
            }
            TensorData::U8(_) => {}
        }
        Ok(FeatureTensor { shape, data })
    }

    pub fn from_f32(shape: Vec<usize>, values: Vec<f32>) -> Result<Self> {
        Self::new(shape, TensorData::F32(values))
    }

    pub fn from_f64(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        Self::new(shape, TensorData::F64(values))
    }

    pub fn from_u8(shape: Vec<usize>, values: Vec<u8>) -> Result<Self> {
        Self::new(shape, TensorData::U8(values))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dtype(&self) -> Dtype {
        self.data.dtype()
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Payload size of the raw element buffer in bytes.
    pub fn byte_size(&self) -> usize {
        self.len() * self.dtype().element_bytes()
    }

    /// Elements widened to f64 regardless of dtype.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.data {
            TensorData::F32(v) => v.iter().map(|&x| f64::from(x)).collect(),
            TensorData::F64(v) => v.clone(),
            TensorData::U8(v) => v.iter().map(|&x| f64::from(x)).collect(),
        }
    }

    /// Rebuild a tensor of the same shape and dtype from f64 values.
    ///
    /// f32 narrows by rounding; u8 rounds and saturates to [0, 255].
    pub fn with_values_like(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::InvalidShape(format!(
                "value count {} does not match tensor length {}",
                values.len(),
                self.len()
            )));
        }
        let data = match self.dtype() {
            Dtype::F32 => TensorData::F32(values.iter().map(|&x| x as f32).collect()),
            Dtype::F64 => TensorData::F64(values.to_vec()),
            Dtype::U8 => TensorData::U8(
                values
                    .iter()
                    .map(|&x| x.round().clamp(0.0, 255.0) as u8)
                    .collect(),
            ),
        };
        FeatureTensor::new(self.shape.clone(), data)
    }

    /// Mean squared element value.
    pub fn mean_power(&self) -> f64 {
        let v = self.to_f64_vec();
        v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 4 + 2 + 4 * self.shape.len() + self.byte_size());
        out.extend_from_slice(TENSOR_MAGIC);
        out.extend_from_slice(&TENSOR_FORMAT_VERSION.to_le_bytes());
        out.push(self.dtype().tag());
        out.push(self.shape.len() as u8);
        for &d in &self.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        match &self.data {
            TensorData::F32(v) => {
                for x in v {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            TensorData::F64(v) => {
                for x in v {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            TensorData::U8(v) => out.extend_from_slice(v),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic = cur.take(4)?;
        if magic != TENSOR_MAGIC {
            return Err(Error::BadMagic { expected: "GSC6" });
        }
        let version = u32::from_le_bytes(cur.take(4)?.try_into().unwrap());
        if version != TENSOR_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let dtype = Dtype::from_tag(cur.take(1)?[0])?;
        let ndim = cur.take(1)?[0] as usize;
        if ndim == 0 {
            return Err(Error::InvalidShape("ndim must be >= 1".into()));
        }
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(u32::from_le_bytes(cur.take(4)?.try_into().unwrap()) as usize);
        }
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::InvalidShape(format!(
                "every dimension must be >= 1, got {shape:?}"
            )));
        }
        let count: usize = shape.iter().product();
        let payload = cur.take(count * dtype.element_bytes())?;
        if cur.pos != bytes.len() {
            return Err(Error::TrailingData {
                extra: bytes.len() - cur.pos,
            });
        }
        let data = match dtype {
            Dtype::F32 => TensorData::F32(
                payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            ),
            Dtype::F64 => TensorData::F64(
                payload
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            ),
            Dtype::U8 => TensorData::U8(payload.to_vec()),
        };
        FeatureTensor::new(shape, data)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Truncated {
                expected: self.pos + n,
                actual: self.bytes.len(),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}

/// Read and validate a tensor file.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<FeatureTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    FeatureTensor::from_bytes(&bytes)
}

/// Write a tensor file. Deterministic: the same tensor always produces the
/// same bytes.
pub fn write_tensor(t: &FeatureTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, t.to_bytes()).map_err(|e| Error::io(path, e))
}
