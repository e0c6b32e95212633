//! Classical-to-quantum embeddings, entanglement layers, and classical
//! readback.

use num_complex::Complex64;

use super::density::DensityMatrix;
use super::state::Statevector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingKind {
    /// Normalized values become the amplitudes of an n-qubit state
    /// (capacity 2^n).
    Amplitude,
    /// Values become RY rotation angles, one per qubit (capacity n).
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Entanglement {
    None,
    RingCnot,
    ControlledPhase { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// Per-qubit <Z> mapped back to angles via arccos; pairs with angle
    /// embedding.
    ExpectationZ,
    /// Amplitudes scaled by the recorded norm; pairs with amplitude
    /// embedding. After noise only magnitudes are meaningful, so sign
    /// recovery is guaranteed for non-negative inputs only.
    AmplitudeReadback,
}

/// Embed up to 2^n values as the amplitudes of an n-qubit state: zero-pad,
/// divide by the Euclidean norm, and record the norm for readback.
pub fn amplitude_embed(values: &[f64], n_qubits: usize) -> Result<(Statevector, f64)> {
    let capacity = 1usize << n_qubits;
    if values.len() > capacity {
        return Err(Error::CapacityExceeded {
            len: values.len(),
            capacity,
        });
    }
    let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); capacity];
    for (i, &v) in values.iter().enumerate() {
        amps[i] = Complex64::new(v / norm, 0.0);
    }
    Ok((Statevector::from_amplitudes(amps)?, norm))
}

/// Embed up to n values as RY rotation angles: the state is the product of
/// cos(v/2)|0> + sin(v/2)|1> per qubit, with missing angles defaulting to 0.
///
/// Readback through arccos(<Z>) recovers angles in [0, pi]; values outside
/// that interval alias onto it.
pub fn angle_embed(values: &[f64], n_qubits: usize) -> Result<Statevector> {
    if values.len() > n_qubits {
        return Err(Error::CapacityExceeded {
            len: values.len(),
            capacity: n_qubits,
        });
    }
    let mut s = Statevector::zero(n_qubits)?;
    for (q, &v) in values.iter().enumerate() {
        s.apply_ry(q, v);
    }
    Ok(s)
}

/// Apply the entanglement layer. With n >= 3 the ring applies gate(i, i+1
/// mod n) for every i; with n == 2 the ring degenerates to the single gate
/// (0, 1); a single qubit is left untouched.
pub fn apply_entanglement(s: &mut Statevector, kind: Entanglement) {
    let n = s.n_qubits();
    match kind {
        Entanglement::None => {}
        Entanglement::RingCnot => {
            for (c, t) in ring_pairs(n) {
                s.apply_cnot(c, t);
            }
        }
        Entanglement::ControlledPhase { theta } => {
            for (c, t) in ring_pairs(n) {
                s.apply_cphase(c, t, theta);
            }
        }
    }
}

/// Invert the entanglement layer: CNOTs are self-inverse and applied in
/// reverse order; controlled-phase gates are diagonal so the conjugate
/// phase suffices.
pub fn apply_entanglement_inverse(s: &mut Statevector, kind: Entanglement) {
    let n = s.n_qubits();
    match kind {
        Entanglement::None => {}
        Entanglement::RingCnot => {
            for (c, t) in ring_pairs(n).into_iter().rev() {
                s.apply_cnot(c, t);
            }
        }
        Entanglement::ControlledPhase { theta } => {
            for (c, t) in ring_pairs(n).into_iter().rev() {
                s.apply_cphase(c, t, -theta);
            }
        }
    }
}

fn ring_pairs(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Read a pure state back into classical values.
///
/// `recorded_norm` is required for amplitude readback and ignored for
/// expectation-Z.
pub fn readback_statevector(
    s: &Statevector,
    readout: Readout,
    recorded_norm: Option<f64>,
) -> Result<Vec<f64>> {
    match readout {
        Readout::AmplitudeReadback => {
            let norm = recorded_norm.ok_or_else(|| {
                Error::ReadoutMismatch("amplitude readback requires the recorded norm".into())
            })?;
            Ok(s.amplitudes().iter().map(|a| a.re * norm).collect())
        }
        Readout::ExpectationZ => Ok((0..s.n_qubits())
            .map(|q| s.expectation_z(q).clamp(-1.0, 1.0).acos())
            .collect()),
    }
}

/// Read a mixed state back into classical values. Amplitude readback from a
/// density matrix yields magnitudes, sqrt(diag), times the recorded norm.
pub fn readback_density(
    rho: &DensityMatrix,
    readout: Readout,
    recorded_norm: Option<f64>,
) -> Result<Vec<f64>> {
    match readout {
        Readout::AmplitudeReadback => {
            let norm = recorded_norm.ok_or_else(|| {
                Error::ReadoutMismatch("amplitude readback requires the recorded norm".into())
            })?;
            Ok(rho
                .diagonal()
                .iter()
                .map(|&p| p.max(0.0).sqrt() * norm)
                .collect())
        }
        Readout::ExpectationZ => Ok((0..rho.n_qubits())
            .map(|q| rho.expectation_z(q).clamp(-1.0, 1.0).acos())
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::bitflip_channel;

    #[test]
    fn amplitude_embed_basis_vector() {
        let (s, norm) = amplitude_embed(&[1.0, 0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(norm, 1.0);
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn amplitude_embed_records_norm() {
        let (s, norm) = amplitude_embed(&[1.0, 1.0], 1).unwrap();
        assert!((norm - 2f64.sqrt()).abs() < 1e-15);
        let v = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - v).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - v).abs() < 1e-15);
    }

    #[test]
    fn amplitude_embed_pythagorean() {
        let (s, norm) = amplitude_embed(&[3.0, 4.0], 1).unwrap();
        assert!((norm - 5.0).abs() < 1e-15);
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn amplitude_embed_rejects_zero_and_oversize() {
        assert!(matches!(
            amplitude_embed(&[0.0, 0.0], 1),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            amplitude_embed(&[1.0; 5], 2),
            Err(Error::CapacityExceeded { len: 5, capacity: 4 })
        ));
    }

    #[test]
    fn angle_embed_endpoints() {
        let s = angle_embed(&[0.0], 1).unwrap();
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-15);
        let s = angle_embed(&[std::f64::consts::PI], 1).unwrap();
        assert!((s.amplitudes()[1].re.abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angle_embed_half_pi_balances() {
        let s = angle_embed(&[std::f64::consts::FRAC_PI_2], 1).unwrap();
        assert!(s.expectation_z(0).abs() < 1e-15);
    }

    #[test]
    fn ring_cnot_identity_on_basis_zero() {
        let mut s = Statevector::zero(2).unwrap();
        apply_entanglement(&mut s, Entanglement::RingCnot);
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ring_cnot_builds_bell_state() {
        let mut s = Statevector::zero(2).unwrap();
        s.apply_h(0);
        apply_entanglement(&mut s, Entanglement::RingCnot);
        let v = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - v).abs() < 1e-14);
        assert!((s.amplitudes()[3].re - v).abs() < 1e-14);
    }

    #[test]
    fn entanglement_layers_are_invertible_and_norm_preserving() {
        for kind in [
            Entanglement::None,
            Entanglement::RingCnot,
            Entanglement::ControlledPhase { theta: 0.77 },
        ] {
            let mut s = Statevector::zero(4).unwrap();
            for q in 0..4 {
                s.apply_ry(q, 0.3 + q as f64);
            }
            let original = s.clone();
            apply_entanglement(&mut s, kind);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            apply_entanglement_inverse(&mut s, kind);
            let max_err = original
                .amplitudes()
                .iter()
                .zip(s.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(max_err < 1e-12, "{kind:?} inverse failed: {max_err}");
        }
    }

    #[test]
    fn amplitude_readback_inverts_embedding() {
        let values = [0.5, 1.25, 2.0, 0.25];
        let (s, norm) = amplitude_embed(&values, 2).unwrap();
        let back = readback_statevector(&s, Readout::AmplitudeReadback, Some(norm)).unwrap();
        for (a, b) in values.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_readback_inverts_angles() {
        let values = [std::f64::consts::FRAC_PI_2, 0.3, 2.5];
        let s = angle_embed(&values, 3).unwrap();
        let back = readback_statevector(&s, Readout::ExpectationZ, None).unwrap();
        for (a, b) in values.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn half_bitflip_yields_uniform_magnitudes() {
        let (s, norm) = amplitude_embed(&[1.0, 0.0, 0.0, 0.0], 2).unwrap();
        let mut rho = DensityMatrix::from_statevector(&s).unwrap();
        for q in 0..2 {
            rho = bitflip_channel(&rho, 0.5, q).unwrap();
        }
        let back = readback_density(&rho, Readout::AmplitudeReadback, Some(norm)).unwrap();
        for v in &back {
            assert!((v - 0.5).abs() < 1e-12, "expected uniform 0.5, got {v}");
        }
    }

    #[test]
    fn amplitude_readback_without_norm_is_mode_mismatch() {
        let (s, _) = amplitude_embed(&[1.0, 1.0], 1).unwrap();
        assert!(matches!(
            readback_statevector(&s, Readout::AmplitudeReadback, None),
            Err(Error::ReadoutMismatch(_))
        ));
    }
}
