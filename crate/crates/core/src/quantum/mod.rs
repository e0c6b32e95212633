//! Exact simulation of the quantum JSCC path: classical-to-quantum
//! embeddings, entanglement layers, Pauli noise via Kraus operators or
//! trajectory sampling, repetition-code error correction, and classical
//! readback.

mod density;
mod embedding;
mod pipeline;
mod repetition;
mod state;

pub use density::{
    bitflip_channel, phaseflip_channel, DensityMatrix, KrausChannel, DM_TOLERANCE,
    MAX_DM_QUBITS, PSD_TOLERANCE,
};
pub use embedding::{
    amplitude_embed, angle_embed, apply_entanglement, apply_entanglement_inverse,
    readback_density, readback_statevector, EmbeddingKind, Entanglement, Readout,
};
pub use pipeline::{monte_carlo_channel, quantum_transmit};
pub use repetition::{
    decode_repetition, decode_statevector, encode_repetition, encode_statevector,
    repetition_logical_error_rate, RepetitionCode,
};
pub use state::{Statevector, MAX_QUBITS, NORM_TOLERANCE};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Correction {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "repetition3-bitflip")]
    Repetition3BitFlip,
    #[serde(rename = "repetition3-phaseflip")]
    Repetition3PhaseFlip,
}

/// Configuration of the quantum transmission path. `n_qubits` counts
/// physical qubits per chunk; with a repetition code it must be a multiple
/// of 3 and the data capacity shrinks accordingly.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuantumChannelConfig {
    pub embedding: EmbeddingKind,
    pub n_qubits: usize,
    pub entanglement: Entanglement,
    pub p_bitflip: f64,
    pub p_phaseflip: f64,
    pub correction: Correction,
    pub readout: Readout,
}

impl QuantumChannelConfig {
    pub fn validate(&self) -> Result<()> {
        for p in [self.p_bitflip, self.p_phaseflip] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::InvalidProbability(p));
            }
        }
        if self.n_qubits == 0 || self.n_qubits > MAX_QUBITS {
            return Err(Error::InvalidQuantumConfig(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {}",
                self.n_qubits
            )));
        }
        if self.correction != Correction::None && self.n_qubits % 3 != 0 {
            return Err(Error::InvalidQuantumConfig(format!(
                "repetition codes require n_qubits to be a multiple of 3, got {}",
                self.n_qubits
            )));
        }
        match (self.embedding, self.readout) {
            (EmbeddingKind::Amplitude, Readout::AmplitudeReadback) => {}
            (EmbeddingKind::Angle, Readout::ExpectationZ) => {}
            (e, r) => {
                return Err(Error::ReadoutMismatch(format!(
                    "embedding {e:?} cannot be read back with {r:?}"
                )))
            }
        }
        Ok(())
    }

    /// Logical (data) qubits per chunk.
    pub fn data_qubits(&self) -> usize {
        match self.correction {
            Correction::None => self.n_qubits,
            _ => self.n_qubits / 3,
        }
    }

    /// Feature values carried per chunk.
    pub fn chunk_capacity(&self) -> usize {
        match self.embedding {
            EmbeddingKind::Amplitude => 1 << self.data_qubits(),
            EmbeddingKind::Angle => self.data_qubits(),
        }
    }

    pub fn correction_code(&self) -> Option<RepetitionCode> {
        match self.correction {
            Correction::None => None,
            Correction::Repetition3BitFlip => Some(RepetitionCode::BitFlip),
            Correction::Repetition3PhaseFlip => Some(RepetitionCode::PhaseFlip),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg() -> QuantumChannelConfig {
        QuantumChannelConfig {
            embedding: EmbeddingKind::Amplitude,
            n_qubits: 3,
            entanglement: Entanglement::RingCnot,
            p_bitflip: 0.1,
            p_phaseflip: 0.0,
            correction: Correction::None,
            readout: Readout::AmplitudeReadback,
        }
    }

    #[test]
    fn validation_catches_bad_probabilities() {
        let mut cfg = base_cfg();
        cfg.p_bitflip = -0.01;
        assert!(matches!(cfg.validate(), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn repetition_requires_multiple_of_three() {
        let mut cfg = base_cfg();
        cfg.correction = Correction::Repetition3BitFlip;
        cfg.n_qubits = 4;
        assert!(cfg.validate().is_err());
        cfg.n_qubits = 6;
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.data_qubits(), 2);
        assert_eq!(cfg.chunk_capacity(), 4);
    }

    #[test]
    fn readout_must_pair_with_embedding() {
        let mut cfg = base_cfg();
        cfg.readout = Readout::ExpectationZ;
        assert!(matches!(cfg.validate(), Err(Error::ReadoutMismatch(_))));
        cfg.embedding = EmbeddingKind::Angle;
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.chunk_capacity(), 3);
    }
}
