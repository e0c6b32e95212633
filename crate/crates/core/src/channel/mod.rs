//! Classical transmission path: PSK/QAM modulation with optional OFDM
//! framing over AWGN, plus the analog JSCC path mapping feature values
//! directly to channel symbols.

mod modulation;
mod ofdm;
mod transmit;

pub use modulation::{
    bits_to_bytes, bytes_to_bits, demap_symbols, map_bits, Bit, Constellation,
};
pub use ofdm::{ofdm_demodulate, ofdm_modulate};
pub use transmit::{digital_transmit, jscc_transmit, DigitalTxOutcome};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

/// SNRs at or above this are treated as noiseless, for exact loopback tests.
pub const NO_NOISE_SNR_DB: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMode {
    Digital,
    AnalogJscc,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub cyclic_prefix_len: usize,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        // Representative of the 802.11 FFT size; not a standards
        // implementation.
        OfdmConfig {
            n_subcarriers: 64,
            cyclic_prefix_len: 16,
        }
    }
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers < 8 || !self.n_subcarriers.is_power_of_two() {
            return Err(Error::InvalidChannelConfig(format!(
                "n_subcarriers must be a power of two >= 8, got {}",
                self.n_subcarriers
            )));
        }
        if self.cyclic_prefix_len >= self.n_subcarriers {
            return Err(Error::InvalidChannelConfig(format!(
                "cyclic_prefix_len {} must be < n_subcarriers {}",
                self.cyclic_prefix_len, self.n_subcarriers
            )));
        }
        Ok(())
    }

    pub fn block_len(&self) -> usize {
        self.n_subcarriers + self.cyclic_prefix_len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChannelConfig {
    pub snr_db: f64,
    pub mode: ChannelMode,
    pub constellation: Constellation,
    pub ofdm: Option<OfdmConfig>,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.snr_db.is_finite() && self.snr_db != f64::INFINITY {
            return Err(Error::InvalidChannelConfig(format!(
                "snr_db must be finite, got {}",
                self.snr_db
            )));
        }
        if let Some(ofdm) = &self.ofdm {
            ofdm.validate()?;
        }
        Ok(())
    }
}

/// Complex baseband symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    pub symbols: Vec<Complex64>,
}

impl SymbolStream {
    pub fn new(symbols: Vec<Complex64>) -> Self {
        SymbolStream { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Mean |s|^2 over the stream.
    pub fn mean_power(&self) -> f64 {
        if self.symbols.is_empty() {
            return 0.0;
        }
        self.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.symbols.len() as f64
    }
}

/// AWGN over complex symbols: noise variance sigma^2 = P_signal /
/// 10^(snr_db/10), split evenly between components. Deterministic given the
/// stream; `snr_db >= NO_NOISE_SNR_DB` returns the input unchanged.
pub fn awgn_symbols(
    s: &SymbolStream,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Result<SymbolStream> {
    if snr_db >= NO_NOISE_SNR_DB {
        return Ok(s.clone());
    }
    let power = s.mean_power();
    if power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let sigma2 = power * 10f64.powf(-snr_db / 10.0);
    Ok(awgn_symbols_with_noise_power(s, sigma2, rng))
}

/// AWGN with an explicit total noise variance per symbol. Used where the
/// signal power is pinned by construction (power-normalized JSCC streams,
/// OFDM frames whose data-symbol power is 1) so that partially filled OFDM
/// blocks do not skew the SNR reference.
pub fn awgn_symbols_with_noise_power(
    s: &SymbolStream,
    sigma2: f64,
    rng: &mut impl Rng,
) -> SymbolStream {
    let comp_sigma = (sigma2 / 2.0).sqrt();
    let symbols = s
        .symbols
        .iter()
        .map(|&x| {
            let nr: f64 = rng.sample(StandardNormal);
            let ni: f64 = rng.sample(StandardNormal);
            x + Complex64::new(nr * comp_sigma, ni * comp_sigma)
        })
        .collect();
    SymbolStream::new(symbols)
}

/// AWGN over a real-valued feature tensor: full variance sigma^2 =
/// P_signal / 10^(snr_db/10) per element.
pub fn awgn_tensor(
    t: &FeatureTensor,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Result<FeatureTensor> {
    if snr_db >= NO_NOISE_SNR_DB {
        return Ok(t.clone());
    }
    let values = t.to_f64_vec();
    let power = values.iter().map(|x| x * x).sum::<f64>() / values.len() as f64;
    if power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let sigma = (power * 10f64.powf(-snr_db / 10.0)).sqrt();
    let noisy: Vec<f64> = values
        .iter()
        .map(|&x| {
            let n: f64 = rng.sample(StandardNormal);
            x + n * sigma
        })
        .collect();
    t.with_values_like(&noisy)
}
