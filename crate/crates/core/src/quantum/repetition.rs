//! Three-qubit repetition codes: the bit-flip and phase-flip constituents
//! of the Shor code.
//!
//! The bit-flip code maps a|0> + b|1> to a|000> + b|111>; the phase-flip
//! code is the same construction in the Hadamard basis. Syndrome extraction
//! measures the ZZ parities of legs (0,1) and (1,2) (XX for the phase-flip
//! code, realized by undoing the Hadamards first), majority-corrects, and
//! unencodes.

use num_complex::Complex64;
use rand::Rng;

use super::density::DensityMatrix;
use super::state::Statevector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepetitionCode {
    BitFlip,
    PhaseFlip,
}

/// Triple every bit of a k-bit index: bit m becomes bits 3m, 3m+1, 3m+2.
fn expand_index(j: usize, k: usize) -> usize {
    let mut out = 0usize;
    for m in 0..k {
        if (j >> m) & 1 == 1 {
            out |= 0b111 << (3 * m);
        }
    }
    out
}

/// Encode k logical qubits into 3k physical qubits (logical qubit i maps to
/// physical legs 3i, 3i+1, 3i+2).
pub fn encode_statevector(s: &Statevector, code: RepetitionCode) -> Result<Statevector> {
    let k = s.n_qubits();
    let n_phys = 3 * k;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_phys];
    for (j, &a) in s.amplitudes().iter().enumerate() {
        amps[expand_index(j, k)] = a;
    }
    let mut encoded = Statevector::from_amplitudes(amps)?;
    if code == RepetitionCode::PhaseFlip {
        for q in 0..n_phys {
            encoded.apply_h(q);
        }
    }
    Ok(encoded)
}

/// Encode a single logical qubit into three physical qubits.
pub fn encode_repetition(s: &Statevector, code: RepetitionCode) -> Result<Statevector> {
    if s.n_qubits() != 1 {
        return Err(Error::WrongQubitCount {
            expected: 1,
            actual: s.n_qubits(),
        });
    }
    encode_statevector(s, code)
}

/// Syndrome-measure, majority-correct, and unencode a 3k-qubit trajectory
/// state back to k logical qubits. Measurement branches are drawn from
/// `rng`, so the decode is deterministic given the stream.
pub fn decode_statevector(
    s: &Statevector,
    code: RepetitionCode,
    rng: &mut impl Rng,
) -> Result<Statevector> {
    let n_phys = s.n_qubits();
    if n_phys % 3 != 0 {
        return Err(Error::WrongQubitCount {
            expected: n_phys.next_multiple_of(3),
            actual: n_phys,
        });
    }
    let k = n_phys / 3;
    let mut state = s.clone();
    if code == RepetitionCode::PhaseFlip {
        for q in 0..n_phys {
            state.apply_h(q);
        }
    }
    for i in 0..k {
        let (l0, l1, l2) = (3 * i, 3 * i + 1, 3 * i + 2);
        let s1 = state.measure_zz_parity(l0, l1, rng);
        let s2 = state.measure_zz_parity(l1, l2, rng);
        match (s1, s2) {
            (0, 0) => {}
            (1, 0) => state.apply_x(l0),
            (1, 1) => state.apply_x(l1),
            (0, 1) => state.apply_x(l2),
            _ => unreachable!(),
        }
    }
    // All triples are now aligned, so the state lives in the code space and
    // unencoding is an amplitude gather.
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << k];
    for (j, a) in amps.iter_mut().enumerate() {
        *a = state.amplitudes()[expand_index(j, k)];
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Err(Error::InvalidQuantumConfig(
            "decoded state has no support on the code space".into(),
        ));
    }
    for a in &mut amps {
        *a /= norm;
    }
    Statevector::from_amplitudes(amps)
}

/// Exact density-matrix decoder for one encoded logical qubit: project onto
/// the four syndrome subspaces, apply the majority correction per subspace,
/// and unencode. Returns the corrected logical qubit state.
pub fn decode_repetition(rho: &DensityMatrix, code: RepetitionCode) -> Result<DensityMatrix> {
    if rho.n_qubits() != 3 {
        return Err(Error::WrongQubitCount {
            expected: 3,
            actual: rho.n_qubits(),
        });
    }
    let rho = match code {
        RepetitionCode::BitFlip => rho.clone(),
        RepetitionCode::PhaseFlip => {
            // Undo the encoding Hadamards; X-type syndromes become Z-type.
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let hm = [
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ];
            let mut out = rho.clone();
            for q in 0..3 {
                out = out.apply_single_qubit_kraus(&[hm], q);
            }
            out
        }
    };

    // Basis index bits are (q0 q1 q2) MSB-first; the syndrome is the pair of
    // leg parities (q0^q1, q1^q2). Each syndrome picks the X correction that
    // returns its subspace to the code space.
    let syndrome = |idx: usize| -> (u8, u8) {
        let q0 = (idx >> 2) & 1;
        let q1 = (idx >> 1) & 1;
        let q2 = idx & 1;
        ((q0 ^ q1) as u8, (q1 ^ q2) as u8)
    };
    let correction_mask = |s: (u8, u8)| -> usize {
        match s {
            (0, 0) => 0b000,
            (1, 0) => 0b100,
            (1, 1) => 0b010,
            (0, 1) => 0b001,
            _ => unreachable!(),
        }
    };

    let mut corrected = vec![Complex64::new(0.0, 0.0); 64];
    for s1 in 0..2u8 {
        for s2 in 0..2u8 {
            let mask = correction_mask((s1, s2));
            for r in 0..8 {
                if syndrome(r) != (s1, s2) {
                    continue;
                }
                for c in 0..8 {
                    if syndrome(c) != (s1, s2) {
                        continue;
                    }
                    // X correction permutes basis states within the block.
                    corrected[(r ^ mask) * 8 + (c ^ mask)] += rho.entry(r, c);
                }
            }
        }
    }
    // The corrected state is supported on {|000>, |111>}; unencode by
    // reading that 2x2 block.
    let logical = vec![
        corrected[0],
        corrected[7],
        corrected[7 * 8],
        corrected[7 * 8 + 7],
    ];
    DensityMatrix::from_raw(1, logical)
}

/// Probability that majority voting fails under i.i.d. X errors with
/// probability p per leg: the exhaustive sum over the 8 error patterns,
/// which equals 3p^2 - 2p^3.
pub fn repetition_logical_error_rate(p: f64) -> f64 {
    let q = 1.0 - p;
    let mut rate = 0.0;
    for pattern in 0..8u32 {
        let flips = pattern.count_ones() as i32;
        if flips >= 2 {
            rate += p.powi(flips) * q.powi(3 - flips);
        }
    }
    rate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::bitflip_channel;
    use crate::rng::{derive_stream, SeedSpec};

    fn plus_state() -> Statevector {
        let mut s = Statevector::zero(1).unwrap();
        s.apply_h(0);
        s
    }

    #[test]
    fn zero_encodes_to_triple_zero() {
        let s = Statevector::zero(1).unwrap();
        let e = encode_repetition(&s, RepetitionCode::BitFlip).unwrap();
        assert!((e.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plus_encodes_to_ghz() {
        let e = encode_repetition(&plus_state(), RepetitionCode::BitFlip).unwrap();
        let v = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.amplitudes()[0].re - v).abs() < 1e-14);
        assert!((e.amplitudes()[7].re - v).abs() < 1e-14);
    }

    #[test]
    fn phaseflip_code_of_zero_is_all_plus() {
        let e = encode_repetition(&Statevector::zero(1).unwrap(), RepetitionCode::PhaseFlip)
            .unwrap();
        let expected = 1.0 / 8f64.sqrt();
        for a in e.amplitudes() {
            assert!((a.re - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn single_bitflip_on_any_leg_is_corrected() {
        let mut psi = Statevector::zero(1).unwrap();
        psi.apply_ry(0, 1.1);
        for leg in 0..3 {
            let mut e = encode_repetition(&psi, RepetitionCode::BitFlip).unwrap();
            e.apply_x(leg);
            let rho = DensityMatrix::from_statevector(&e).unwrap();
            let decoded = decode_repetition(&rho, RepetitionCode::BitFlip).unwrap();
            let f = decoded.fidelity_with_pure(&psi).unwrap();
            assert!((f - 1.0).abs() < 1e-10, "leg {leg}: fidelity {f}");
        }
    }

    #[test]
    fn single_phaseflip_corrected_by_dual_code() {
        let mut psi = Statevector::zero(1).unwrap();
        psi.apply_ry(0, 0.8);
        for leg in 0..3 {
            let mut e = encode_repetition(&psi, RepetitionCode::PhaseFlip).unwrap();
            e.apply_z(leg);
            let rho = DensityMatrix::from_statevector(&e).unwrap();
            let decoded = decode_repetition(&rho, RepetitionCode::PhaseFlip).unwrap();
            let f = decoded.fidelity_with_pure(&psi).unwrap();
            assert!((f - 1.0).abs() < 1e-10, "leg {leg}: fidelity {f}");
        }
    }

    #[test]
    fn two_bitflips_cause_logical_flip() {
        let mut psi = Statevector::zero(1).unwrap();
        psi.apply_ry(0, 0.6);
        let mut e = encode_repetition(&psi, RepetitionCode::BitFlip).unwrap();
        e.apply_x(0);
        e.apply_x(2);
        let rho = DensityMatrix::from_statevector(&e).unwrap();
        let decoded = decode_repetition(&rho, RepetitionCode::BitFlip).unwrap();
        let mut flipped = psi.clone();
        flipped.apply_x(0);
        let f = decoded.fidelity_with_pure(&flipped).unwrap();
        assert!((f - 1.0).abs() < 1e-10, "fidelity with X|psi> is {f}");
    }

    #[test]
    fn density_pipeline_matches_enumeration() {
        for p in [0.05, 0.1, 0.2] {
            let psi = Statevector::zero(1).unwrap();
            let e = encode_repetition(&psi, RepetitionCode::BitFlip).unwrap();
            let mut rho = DensityMatrix::from_statevector(&e).unwrap();
            for leg in 0..3 {
                rho = bitflip_channel(&rho, p, leg).unwrap();
            }
            let decoded = decode_repetition(&rho, RepetitionCode::BitFlip).unwrap();
            let fidelity = decoded.fidelity_with_pure(&psi).unwrap();
            let expected = 1.0 - repetition_logical_error_rate(p);
            assert!(
                (fidelity - expected).abs() < 1e-10,
                "p={p}: fidelity {fidelity} vs {expected}"
            );
        }
    }

    #[test]
    fn enumeration_matches_closed_form() {
        for p in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0] {
            let rate = repetition_logical_error_rate(p);
            let closed = 3.0 * p * p - 2.0 * p * p * p;
            assert!((rate - closed).abs() < 1e-15, "p={p}: {rate} vs {closed}");
        }
    }

    #[test]
    fn statevector_decode_corrects_trajectory_errors() {
        let mut rng = derive_stream(&SeedSpec::new(9), "rep", "decode");
        let mut psi = Statevector::zero(2).unwrap();
        psi.apply_ry(0, 0.4);
        psi.apply_ry(1, 2.0);
        psi.apply_cnot(0, 1);
        let mut e = encode_statevector(&psi, RepetitionCode::BitFlip).unwrap();
        // One X error on one leg of each logical qubit.
        e.apply_x(1);
        e.apply_x(5);
        let decoded = decode_statevector(&e, RepetitionCode::BitFlip, &mut rng).unwrap();
        let mut overlap = num_complex::Complex64::new(0.0, 0.0);
        for (a, b) in psi.amplitudes().iter().zip(decoded.amplitudes()) {
            overlap += a.conj() * b;
        }
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decode_rejects_wrong_sizes() {
        let s = Statevector::zero(2).unwrap();
        let rho = DensityMatrix::from_statevector(&s).unwrap();
        assert!(matches!(
            decode_repetition(&rho, RepetitionCode::BitFlip),
            Err(Error::WrongQubitCount { .. })
        ));
        assert!(matches!(
            encode_repetition(&s, RepetitionCode::BitFlip),
            Err(Error::WrongQubitCount { .. })
        ));
    }
}
