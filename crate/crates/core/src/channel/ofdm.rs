//! OFDM block framing: orthonormal IDFT/DFT plus cyclic prefix.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{OfdmConfig, SymbolStream};
use crate::error::{Error, Result};

/// Frame symbols onto OFDM blocks: zero-pad to a whole number of blocks,
/// then per block apply the orthonormal inverse DFT and prepend the cyclic
/// prefix (the block's last `cyclic_prefix_len` samples).
pub fn ofdm_modulate(s: &SymbolStream, cfg: &OfdmConfig) -> Result<SymbolStream> {
    cfg.validate()?;
    let n = cfg.n_subcarriers;
    let n_blocks = s.len().div_ceil(n).max(1);
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let scale = 1.0 / (n as f64).sqrt();

    let mut out = Vec::with_capacity(n_blocks * cfg.block_len());
    for b in 0..n_blocks {
        let mut block = vec![Complex64::new(0.0, 0.0); n];
        for (i, slot) in block.iter_mut().enumerate() {
            if let Some(&sym) = s.symbols.get(b * n + i) {
                *slot = sym;
            }
        }
        ifft.process(&mut block);
        for v in &mut block {
            *v *= scale;
        }
        out.extend_from_slice(&block[n - cfg.cyclic_prefix_len..]);
        out.extend_from_slice(&block);
    }
    Ok(SymbolStream::new(out))
}

/// Invert [`ofdm_modulate`]: strip each block's cyclic prefix and apply the
/// orthonormal forward DFT. Returns all n_subcarriers slots per block; the
/// caller truncates any padding it introduced.
pub fn ofdm_demodulate(s: &SymbolStream, cfg: &OfdmConfig) -> Result<SymbolStream> {
    cfg.validate()?;
    let block_len = cfg.block_len();
    if s.len() % block_len != 0 {
        return Err(Error::BlockLengthMismatch {
            len: s.len(),
            block: block_len,
        });
    }
    let n = cfg.n_subcarriers;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let scale = 1.0 / (n as f64).sqrt();

    let mut out = Vec::with_capacity((s.len() / block_len) * n);
    for chunk in s.symbols.chunks_exact(block_len) {
        let mut block = chunk[cfg.cyclic_prefix_len..].to_vec();
        fft.process(&mut block);
        for v in &mut block {
            *v *= scale;
        }
        out.extend_from_slice(&block);
    }
    Ok(SymbolStream::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> OfdmConfig {
        OfdmConfig {
            n_subcarriers: 64,
            cyclic_prefix_len: 16,
        }
    }

    fn random_stream(n: usize, seed: u64) -> SymbolStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SymbolStream::new(
            (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        )
    }

    #[test]
    fn loopback_is_exact() {
        let s = random_stream(64 * 5, 1);
        let c = cfg();
        let rx = ofdm_demodulate(&ofdm_modulate(&s, &c).unwrap(), &c).unwrap();
        assert_eq!(rx.len(), s.len());
        let max_err = s
            .symbols
            .iter()
            .zip(&rx.symbols)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-12, "loopback error {max_err}");
    }

    #[test]
    fn impulse_becomes_complex_exponential() {
        // A single nonzero frequency bin k maps to exp(2*pi*i*k*t/N)/sqrt(N).
        let n = 64usize;
        let k = 5usize;
        let mut symbols = vec![Complex64::new(0.0, 0.0); n];
        symbols[k] = Complex64::new(1.0, 0.0);
        let c = OfdmConfig {
            n_subcarriers: n,
            cyclic_prefix_len: 0,
        };
        let tx = ofdm_modulate(&SymbolStream::new(symbols), &c).unwrap();
        let scale = 1.0 / (n as f64).sqrt();
        for (t, &v) in tx.symbols.iter().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
            let expected = Complex64::new(phase.cos(), phase.sin()) * scale;
            assert!((v - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn cyclic_prefix_copies_block_tail() {
        let s = random_stream(64, 2);
        let c = cfg();
        let tx = ofdm_modulate(&s, &c).unwrap();
        assert_eq!(tx.len(), c.block_len());
        let (prefix, body) = tx.symbols.split_at(c.cyclic_prefix_len);
        assert_eq!(prefix, &body[c.n_subcarriers - c.cyclic_prefix_len..]);
    }

    #[test]
    fn partial_block_is_zero_padded() {
        let s = random_stream(40, 3);
        let c = cfg();
        let rx = ofdm_demodulate(&ofdm_modulate(&s, &c).unwrap(), &c).unwrap();
        assert_eq!(rx.len(), 64);
        for (a, b) in s.symbols.iter().zip(&rx.symbols) {
            assert!((a - b).norm() < 1e-12);
        }
        for pad in &rx.symbols[40..] {
            assert!(pad.norm() < 1e-12);
        }
    }

    #[test]
    fn demodulate_rejects_ragged_length() {
        let s = random_stream(81, 4);
        assert!(matches!(
            ofdm_demodulate(&s, &cfg()),
            Err(Error::BlockLengthMismatch { .. })
        ));
    }

    #[test]
    fn orthonormal_scaling_preserves_energy() {
        let s = random_stream(64 * 3, 5);
        let c = OfdmConfig {
            n_subcarriers: 64,
            cyclic_prefix_len: 0,
        };
        let tx = ofdm_modulate(&s, &c).unwrap();
        let e_in: f64 = s.symbols.iter().map(|x| x.norm_sqr()).sum();
        let e_out: f64 = tx.symbols.iter().map(|x| x.norm_sqr()).sum();
        assert!((e_in - e_out).abs() < 1e-9);
    }
}
