//! End-to-end classical transmit paths.
//!
//! Analog JSCC maps feature pairs directly onto complex channel symbols;
//! the digital path runs quantize -> entropy code -> modulate -> AWGN ->
//! demodulate -> decode. In both paths the noise variance is referenced to
//! the power-normalized data symbols (exactly 1 for JSCC), not to the OFDM
//! time stream, so partially filled OFDM blocks do not skew the SNR.

use num_complex::Complex64;
use rand::Rng;

use super::{
    awgn_symbols_with_noise_power, bits_to_bytes, bytes_to_bits, demap_symbols, map_bits,
    ofdm_demodulate, ofdm_modulate, Bit, ChannelConfig, ChannelMode, SymbolStream,
    NO_NOISE_SNR_DB,
};
use crate::codec::{
    dequantize, entropy_decode, entropy_encode, quantize, CompressedBlob, QuantizedTensor,
    QuantizerConfig,
};
use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

/// Analog JSCC: pair features into complex symbols, power-normalize
/// (recording the gain), optionally OFDM-frame, add AWGN, invert the chain
/// and de-normalize. Odd-length tensors are zero-padded for pairing and the
/// pad is removed on receive.
pub fn jscc_transmit(
    t: &FeatureTensor,
    cfg: &ChannelConfig,
    rng: &mut impl Rng,
) -> Result<FeatureTensor> {
    cfg.validate()?;
    if cfg.mode != ChannelMode::AnalogJscc {
        return Err(Error::InvalidChannelConfig(
            "jscc_transmit requires mode = analog-jscc".into(),
        ));
    }
    let values = t.to_f64_vec();
    if values.len() < 2 {
        return Err(Error::TensorTooShort(values.len()));
    }
    let mut padded = values.clone();
    if padded.len() % 2 != 0 {
        padded.push(0.0);
    }
    let symbols: Vec<Complex64> = padded
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let stream = SymbolStream::new(symbols);
    let power = stream.mean_power();
    if power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let gain = power.sqrt();
    let normalized = SymbolStream::new(stream.symbols.iter().map(|s| s / gain).collect());
    let n_sym = normalized.len();

    let rx = send_normalized(&normalized, cfg, rng)?;
    debug_assert_eq!(rx.len(), n_sym);

    let mut out = Vec::with_capacity(padded.len());
    for s in &rx.symbols {
        out.push(s.re * gain);
        out.push(s.im * gain);
    }
    out.truncate(values.len());
    t.with_values_like(&out)
}

/// Diagnostics from one digital transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalTxOutcome {
    pub tensor: FeatureTensor,
    /// Bits pushed through the channel (coded attempt plus fallback if
    /// taken).
    pub channel_bits: u64,
    pub bit_errors: u64,
    /// True when the entropy blob was corrupted beyond decoding and the
    /// fixed-length uncoded retransmission was used.
    pub used_fallback: bool,
    /// Serialized entropy-coded blob size.
    pub compressed_bytes: u64,
    /// Fixed-length bit-packed size of the quantized codes.
    pub quantized_bytes: u64,
    /// Raw element-buffer size of the source tensor.
    pub raw_bytes: u64,
}

/// Digital path: quantize, entropy-encode, modulate, AWGN, demodulate,
/// decode, dequantize.
///
/// A single flipped bit can desynchronize a Huffman stream, so when the
/// received blob no longer decodes, the codes are retransmitted uncoded at
/// fixed length (bits-per-code each), keeping the pipeline total and
/// measurable at low SNR. Quantizer metadata (range, bits, shape) is treated
/// as out-of-band side information.
pub fn digital_transmit(
    t: &FeatureTensor,
    qcfg: &QuantizerConfig,
    cfg: &ChannelConfig,
    rng: &mut impl Rng,
) -> Result<DigitalTxOutcome> {
    cfg.validate()?;
    if cfg.mode != ChannelMode::Digital {
        return Err(Error::InvalidChannelConfig(
            "digital_transmit requires mode = digital".into(),
        ));
    }
    let q = quantize(t, qcfg)?;
    let blob = entropy_encode(&q.codes, q.levels() as usize)?;
    let blob_bytes = blob.to_bytes();

    let tx_bits = bytes_to_bits(&blob_bytes);
    let (rx_bits, mut errors) = send_bits(&tx_bits, cfg, rng)?;
    let mut channel_bits = tx_bits.len() as u64;

    let decoded = CompressedBlob::from_bytes(&bits_to_bytes(&rx_bits))
        .and_then(|b| entropy_decode(&b))
        .ok()
        .filter(|codes| codes.len() == q.codes.len());

    let (codes, used_fallback) = match decoded {
        Some(codes) => (codes, false),
        None => {
            let fixed_bits = codes_to_fixed_bits(&q);
            let (rx, fallback_errors) = send_bits(&fixed_bits, cfg, rng)?;
            channel_bits += fixed_bits.len() as u64;
            errors += fallback_errors;
            (fixed_bits_to_codes(&rx, &q), true)
        }
    };

    let received = QuantizedTensor { codes, ..q.clone() };
    let tensor = dequantize(&received)?;
    Ok(DigitalTxOutcome {
        tensor,
        channel_bits,
        bit_errors: errors,
        used_fallback,
        compressed_bytes: blob_bytes.len() as u64,
        quantized_bytes: q.packed_byte_size() as u64,
        raw_bytes: t.byte_size() as u64,
    })
}

/// Modulate bits, run the (optionally OFDM-framed) AWGN channel, demodulate,
/// and return the received bits (truncated to the transmitted count) plus
/// the bit-error count.
fn send_bits(
    bits: &[Bit],
    cfg: &ChannelConfig,
    rng: &mut impl Rng,
) -> Result<(Vec<Bit>, u64)> {
    let tx = map_bits(bits, cfg.constellation);
    let power = tx.mean_power();
    if power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let rx = send_stream(&tx, power, cfg, rng)?;
    let mut rx_bits = demap_symbols(&rx, cfg.constellation);
    rx_bits.truncate(bits.len());
    let errors = bits
        .iter()
        .zip(&rx_bits)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok((rx_bits, errors))
}

/// Channel core shared by both paths: noise variance is derived from the
/// given data-symbol power, with OFDM framing applied around the noise.
fn send_normalized(
    s: &SymbolStream,
    cfg: &ChannelConfig,
    rng: &mut impl Rng,
) -> Result<SymbolStream> {
    send_stream(s, 1.0, cfg, rng)
}

fn send_stream(
    s: &SymbolStream,
    data_power: f64,
    cfg: &ChannelConfig,
    rng: &mut impl Rng,
) -> Result<SymbolStream> {
    let n_sym = s.len();
    let framed = match &cfg.ofdm {
        Some(ofdm) => ofdm_modulate(s, ofdm)?,
        None => s.clone(),
    };
    let noisy = if cfg.snr_db >= NO_NOISE_SNR_DB {
        framed
    } else {
        let sigma2 = data_power * 10f64.powf(-cfg.snr_db / 10.0);
        awgn_symbols_with_noise_power(&framed, sigma2, rng)
    };
    let mut rx = match &cfg.ofdm {
        Some(ofdm) => ofdm_demodulate(&noisy, ofdm)?,
        None => noisy,
    };
    rx.symbols.truncate(n_sym);
    Ok(rx)
}

fn codes_to_fixed_bits(q: &QuantizedTensor) -> Vec<Bit> {
    let width = q.bits as usize;
    let mut bits = Vec::with_capacity(q.codes.len() * width);
    for &c in &q.codes {
        for j in (0..width).rev() {
            bits.push((c >> j) & 1 == 1);
        }
    }
    bits
}

fn fixed_bits_to_codes(bits: &[Bit], q: &QuantizedTensor) -> Vec<u32> {
    let width = q.bits as usize;
    q.codes
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let mut c = 0u32;
            for j in 0..width {
                let bit = bits.get(i * width + j).copied().unwrap_or(false);
                c = (c << 1) | u32::from(bit);
            }
            c
        })
        .collect()
}
