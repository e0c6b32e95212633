//! Semantic compression: uniform scalar quantization plus lossless entropy
//! coding of the quantized symbols, with compression-rate accounting.

mod huffman;

pub use huffman::{entropy_decode, entropy_encode, CompressedBlob};

use crate::error::{Error, Result};
use crate::tensor::{Dtype, FeatureTensor, TensorData};

/// How the quantizer picks its reconstruction range.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeMode {
    /// min/max of the tensor being quantized.
    PerTensor,
    Fixed { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuantizerConfig {
    /// Bits per code, 1..=16; the level count is L = 2^bits.
    pub bits: u8,
    pub range_mode: RangeMode,
}

impl QuantizerConfig {
    pub fn new(bits: u8, range_mode: RangeMode) -> Result<Self> {
        let cfg = QuantizerConfig { bits, range_mode };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits == 0 || self.bits > 16 {
            return Err(Error::InvalidBits(self.bits));
        }
        if let RangeMode::Fixed { lo, hi } = self.range_mode {
            if !(lo < hi) {
                return Err(Error::InvalidRange { lo, hi });
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> u32 {
        1u32 << self.bits
    }
}

/// A quantized tensor: integer codes plus everything needed to reconstruct.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTensor {
    pub codes: Vec<u32>,
    pub shape: Vec<usize>,
    pub lo: f64,
    pub hi: f64,
    pub bits: u8,
    pub source_dtype: Dtype,
}

impl QuantizedTensor {
    pub fn levels(&self) -> u32 {
        1u32 << self.bits
    }

    /// Byte size of the codes at fixed length (bits per code, bit-packed).
    pub fn packed_byte_size(&self) -> usize {
        (self.codes.len() * self.bits as usize).div_ceil(8)
    }
}

/// Map the continuous feature space onto L = 2^bits discrete levels.
///
/// code = round((x - lo) / (hi - lo) * (L - 1)), rounding half away from
/// zero, clamped to [0, L-1]. A constant tensor under per-tensor ranging
/// (lo == hi) maps every element to code 0.
pub fn quantize(t: &FeatureTensor, cfg: &QuantizerConfig) -> Result<QuantizedTensor> {
    cfg.validate()?;
    let values = t.to_f64_vec();
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (lo, hi) = match cfg.range_mode {
        RangeMode::Fixed { lo, hi } => (lo, hi),
        RangeMode::PerTensor => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        }
    };
    let top = (cfg.levels() - 1) as f64;
    let codes = if hi > lo {
        let scale = top / (hi - lo);
        values
            .iter()
            .map(|&x| ((x - lo) * scale).round().clamp(0.0, top) as u32)
            .collect()
    } else {
        vec![0u32; values.len()]
    };
    Ok(QuantizedTensor {
        codes,
        shape: t.shape().to_vec(),
        lo,
        hi,
        bits: cfg.bits,
        source_dtype: t.dtype(),
    })
}

/// Reconstruct x̂ = lo + code / (L - 1) * (hi - lo), preserving the source
/// shape and dtype.
pub fn dequantize(q: &QuantizedTensor) -> Result<FeatureTensor> {
    let top = (q.levels() - 1) as f64;
    let values: Vec<f64> = if q.hi > q.lo {
        let step = (q.hi - q.lo) / top;
        q.codes.iter().map(|&c| q.lo + c as f64 * step).collect()
    } else {
        vec![q.lo; q.codes.len()]
    };
    let data = match q.source_dtype {
        Dtype::F32 => TensorData::F32(values.iter().map(|&x| x as f32).collect()),
        Dtype::F64 => TensorData::F64(values),
        Dtype::U8 => TensorData::U8(
            values
                .iter()
                .map(|&x| x.round().clamp(0.0, 255.0) as u8)
                .collect(),
        ),
    };
    FeatureTensor::new(q.shape.clone(), data)
}

/// Fraction of bytes removed: 1 - compressed/original.
pub fn compression_rate(original_bytes: u64, compressed_bytes: u64) -> Result<f64> {
    if original_bytes == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(1.0 - compressed_bytes as f64 / original_bytes as f64)
}

/// Format a rate fraction as a percentage, e.g. 0.99993 -> "99.993%".
pub fn format_compression_rate(rate: f64) -> String {
    let pct = rate * 100.0;
    let mut s = format!("{pct:.4}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    format!("{s}%")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor(values: &[f64]) -> FeatureTensor {
        FeatureTensor::from_f64(vec![values.len()], values.to_vec()).unwrap()
    }

    #[test]
    fn endpoints_map_to_extreme_codes() {
        let cfg = QuantizerConfig::new(1, RangeMode::PerTensor).unwrap();
        let q = quantize(&tensor(&[0.0, 1.0]), &cfg).unwrap();
        assert_eq!(q.codes, vec![0, 1]);
    }

    #[test]
    fn midpoint_rounds_half_away_from_zero() {
        // 0.5 in [0,1] at 2 bits: (0.5 - 0) * 3 = 1.5 -> rounds to 2
        let cfg = QuantizerConfig::new(2, RangeMode::Fixed { lo: 0.0, hi: 1.0 }).unwrap();
        let q = quantize(&tensor(&[0.0, 0.5, 1.0]), &cfg).unwrap();
        assert_eq!(q.codes, vec![0, 2, 3]);
    }

    #[test]
    fn error_bounded_by_half_step_over_grid() {
        let cfg = QuantizerConfig::new(8, RangeMode::Fixed { lo: -2.0, hi: 3.0 }).unwrap();
        let n = 100_000;
        let values: Vec<f64> = (0..n)
            .map(|i| -2.0 + 5.0 * (i as f64) / (n - 1) as f64)
            .collect();
        let t = tensor(&values);
        let q = quantize(&t, &cfg).unwrap();
        let back = dequantize(&q).unwrap().to_f64_vec();
        let step = 5.0 / 255.0;
        let max_err = values
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_err <= step / 2.0 + 1e-12, "max_err {max_err} > step/2");
    }

    #[test]
    fn extreme_codes_reconstruct_range_ends() {
        let q = QuantizedTensor {
            codes: vec![0, 3],
            shape: vec![2],
            lo: -1.5,
            hi: 2.5,
            bits: 2,
            source_dtype: Dtype::F64,
        };
        let back = dequantize(&q).unwrap().to_f64_vec();
        assert_eq!(back, vec![-1.5, 2.5]);
    }

    #[test]
    fn quantize_is_idempotent_on_quantized_data() {
        let cfg = QuantizerConfig::new(4, RangeMode::Fixed { lo: 0.0, hi: 1.0 }).unwrap();
        let t = tensor(&[0.03, 0.5, 0.77, 0.99]);
        let q1 = quantize(&t, &cfg).unwrap();
        let d1 = dequantize(&q1).unwrap();
        let q2 = quantize(&d1, &cfg).unwrap();
        assert_eq!(q1.codes, q2.codes);
    }

    #[test]
    fn integer_grid_reconstructs_exactly() {
        let cfg = QuantizerConfig::new(2, RangeMode::Fixed { lo: 0.0, hi: 3.0 }).unwrap();
        let q = quantize(&tensor(&[0.0, 1.0, 2.0, 3.0]), &cfg).unwrap();
        assert_eq!(q.codes, vec![0, 1, 2, 3]);
        let back = dequantize(&q).unwrap().to_f64_vec();
        assert_eq!(back, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn constant_tensor_maps_to_code_zero() {
        let cfg = QuantizerConfig::new(8, RangeMode::PerTensor).unwrap();
        let q = quantize(&tensor(&[2.5, 2.5, 2.5]), &cfg).unwrap();
        assert_eq!(q.codes, vec![0, 0, 0]);
        assert_eq!(dequantize(&q).unwrap().to_f64_vec(), vec![2.5, 2.5, 2.5]);
    }

    #[test]
    fn fixed_range_must_be_increasing() {
        assert!(matches!(
            QuantizerConfig::new(8, RangeMode::Fixed { lo: 1.0, hi: 1.0 }),
            Err(Error::InvalidRange { .. })
        ));
    }

    #[test]
    fn bits_out_of_range_rejected() {
        assert!(matches!(
            QuantizerConfig::new(0, RangeMode::PerTensor),
            Err(Error::InvalidBits(0))
        ));
        assert!(matches!(
            QuantizerConfig::new(17, RangeMode::PerTensor),
            Err(Error::InvalidBits(17))
        ));
    }

    #[test]
    fn more_bits_never_increase_max_error() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 37) % 997) as f64 / 997.0).collect();
        let t = tensor(&values);
        let mut prev = f64::INFINITY;
        for bits in 1..=12u8 {
            let cfg = QuantizerConfig::new(bits, RangeMode::Fixed { lo: 0.0, hi: 1.0 }).unwrap();
            let back = dequantize(&quantize(&t, &cfg).unwrap()).unwrap().to_f64_vec();
            let max_err = values
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(max_err <= prev + 1e-15);
            prev = max_err;
        }
    }

    #[test]
    fn rate_arithmetic() {
        assert_eq!(compression_rate(1000, 1000).unwrap(), 0.0);
        let r = compression_rate(100_000, 7).unwrap();
        assert!((r - 0.99993).abs() < 1e-12);
        assert_eq!(format_compression_rate(r), "99.993%");
        assert_eq!(format_compression_rate(0.0), "0%");
        assert!(compression_rate(0, 5).is_err());
    }

    #[test]
    fn u8_source_roundtrips_through_dtype() {
        let t = FeatureTensor::from_u8(vec![4], vec![0, 10, 128, 255]).unwrap();
        let cfg = QuantizerConfig::new(8, RangeMode::Fixed { lo: 0.0, hi: 255.0 }).unwrap();
        let d = dequantize(&quantize(&t, &cfg).unwrap()).unwrap();
        assert_eq!(d.dtype(), Dtype::U8);
        assert_eq!(d, t);
    }
}
