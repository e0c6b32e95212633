//! Trajectory-sampled quantum JSCC path.
//!
//! A transmission is one stochastic trajectory: Pauli errors are sampled
//! per qubit, so a run is deterministic given its stream while the ensemble
//! average over trajectories converges to the Kraus-channel evolution.

use rand::Rng;

use super::embedding::{
    amplitude_embed, angle_embed, apply_entanglement, apply_entanglement_inverse,
    readback_statevector, EmbeddingKind, Readout,
};
use super::repetition::{decode_statevector, encode_statevector};
use super::state::Statevector;
use super::QuantumChannelConfig;
use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

/// Independently apply X with probability `p_x` and Z with probability
/// `p_z` to every qubit. One trajectory of the bit-flip/phase-flip channel
/// pair; both draws are consumed per qubit regardless of outcome so stream
/// positions stay aligned across configurations.
pub fn monte_carlo_channel(
    s: &Statevector,
    p_x: f64,
    p_z: f64,
    rng: &mut impl Rng,
) -> Result<Statevector> {
    for p in [p_x, p_z] {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidProbability(p));
        }
    }
    let mut out = s.clone();
    for q in 0..s.n_qubits() {
        let ux: f64 = rng.random();
        let uz: f64 = rng.random();
        if ux < p_x {
            out.apply_x(q);
        }
        if uz < p_z {
            out.apply_z(q);
        }
    }
    Ok(out)
}

/// Transmit a feature tensor over the quantum channel: chunk to the
/// embedding capacity, embed, entangle, optionally encode with the
/// repetition code, sample Pauli noise, decode/correct, disentangle, and
/// read back. Deterministic given the stream.
pub fn quantum_transmit(
    t: &FeatureTensor,
    cfg: &QuantumChannelConfig,
    rng: &mut impl Rng,
) -> Result<FeatureTensor> {
    cfg.validate()?;
    let data_qubits = cfg.data_qubits();
    let capacity = cfg.chunk_capacity();
    let values = t.to_f64_vec();

    let mut out = Vec::with_capacity(values.len());
    for chunk in values.chunks(capacity) {
        let (mut state, norm) = match cfg.embedding {
            EmbeddingKind::Amplitude => {
                let (s, n) = amplitude_embed(chunk, data_qubits)?;
                (s, Some(n))
            }
            EmbeddingKind::Angle => (angle_embed(chunk, data_qubits)?, None),
        };
        apply_entanglement(&mut state, cfg.entanglement);
        if let Some(code) = cfg.correction_code() {
            state = encode_statevector(&state, code)?;
        }
        state = monte_carlo_channel(&state, cfg.p_bitflip, cfg.p_phaseflip, rng)?;
        if let Some(code) = cfg.correction_code() {
            state = decode_statevector(&state, code, rng)?;
        }
        apply_entanglement_inverse(&mut state, cfg.entanglement);
        let vals = readback_statevector(&state, cfg.readout, norm)?;
        out.extend_from_slice(&vals[..chunk.len()]);
    }
    t.with_values_like(&out)
}
