//! Density-matrix representation and Pauli noise channels in Kraus form.

use num_complex::Complex64;

use super::state::Statevector;
use crate::error::{Error, Result};

/// Dense density matrices cap out lower than statevectors: 2^10 x 2^10
/// complex entries is 16 MiB.
pub const MAX_DM_QUBITS: usize = 10;

pub const DM_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

/// An exact mixed-state representation: a 2^n x 2^n complex matrix,
/// row-major, Hermitian with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_statevector(s: &Statevector) -> Result<Self> {
        let n = s.n_qubits();
        if n > MAX_DM_QUBITS {
            return Err(Error::InvalidQuantumConfig(format!(
                "density matrices support at most {MAX_DM_QUBITS} qubits, got {n}"
            )));
        }
        let amps = s.amplitudes();
        let dim = amps.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Ok(DensityMatrix { n_qubits: n, data })
    }

    pub fn from_raw(n_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DM_QUBITS {
            return Err(Error::InvalidQuantumConfig(format!(
                "n_qubits must be in 1..={MAX_DM_QUBITS}, got {n_qubits}"
            )));
        }
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::InvalidQuantumConfig(format!(
                "expected {} entries for {n_qubits} qubits, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(DensityMatrix { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i).re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// max |rho[r][c] - conj(rho[c][r])|.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let e = (self.entry(r, c) - self.entry(c, r).conj()).norm();
                worst = worst.max(e);
            }
        }
        worst
    }

    /// Positive semidefiniteness within `tol`: a Cholesky factorization of
    /// rho + tol*I succeeds exactly when the minimum eigenvalue is >= -tol
    /// (up to rounding), which matches the min-eigenvalue contract without
    /// a full eigendecomposition.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let dim = self.dim();
        let mut m = self.data.clone();
        for i in 0..dim {
            m[i * dim + i] += Complex64::new(tol, 0.0);
        }
        // In-place complex Cholesky; fails on a non-positive pivot.
        for k in 0..dim {
            let mut pivot = m[k * dim + k].re;
            for j in 0..k {
                pivot -= m[k * dim + j].norm_sqr();
            }
            if pivot <= 0.0 {
                return false;
            }
            let pivot = pivot.sqrt();
            m[k * dim + k] = Complex64::new(pivot, 0.0);
            for i in (k + 1)..dim {
                let mut v = m[i * dim + k];
                for j in 0..k {
                    v -= m[i * dim + j] * m[k * dim + j].conj();
                }
                m[i * dim + k] = v / pivot;
            }
        }
        true
    }

    /// Check trace, Hermiticity, and positivity within the stated
    /// tolerances.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > DM_TOLERANCE || tr.im.abs() > DM_TOLERANCE {
            return Err(Error::InvalidQuantumConfig(format!(
                "trace {tr} differs from 1"
            )));
        }
        let herm = self.hermiticity_error();
        if herm > DM_TOLERANCE {
            return Err(Error::InvalidQuantumConfig(format!(
                "Hermiticity violation {herm:.3e}"
            )));
        }
        if !self.is_positive_semidefinite(PSD_TOLERANCE) {
            return Err(Error::InvalidQuantumConfig(
                "matrix is not positive semidefinite".into(),
            ));
        }
        Ok(())
    }

    /// <Z> on one qubit from the diagonal.
    pub fn expectation_z(&self, qubit: usize) -> f64 {
        let mask = 1usize << (self.n_qubits - 1 - qubit);
        self.diagonal()
            .iter()
            .enumerate()
            .map(|(i, &p)| if i & mask == 0 { p } else { -p })
            .sum()
    }

    /// <psi| rho |psi> fidelity against a pure state.
    pub fn fidelity_with_pure(&self, psi: &Statevector) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::WrongQubitCount {
                expected: self.n_qubits,
                actual: psi.n_qubits(),
            });
        }
        let dim = self.dim();
        let amps = psi.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                acc += amps[r].conj() * self.entry(r, c) * amps[c];
            }
        }
        Ok(acc.re)
    }

    /// Apply a single-qubit operator set as rho -> sum_i K_i rho K_i^dag on
    /// the given qubit.
    pub fn apply_single_qubit_kraus(&self, ops: &[[Complex64; 4]], qubit: usize) -> DensityMatrix {
        let dim = self.dim();
        let mask = 1usize << (self.n_qubits - 1 - qubit);
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in ops {
            // Iterate over 2x2 blocks in both row and column qubit space.
            for r in 0..dim {
                if r & mask != 0 {
                    continue;
                }
                for c in 0..dim {
                    if c & mask != 0 {
                        continue;
                    }
                    let b00 = self.data[r * dim + c];
                    let b01 = self.data[r * dim + (c | mask)];
                    let b10 = self.data[(r | mask) * dim + c];
                    let b11 = self.data[(r | mask) * dim + (c | mask)];
                    // K * B
                    let t00 = k[0] * b00 + k[1] * b10;
                    let t01 = k[0] * b01 + k[1] * b11;
                    let t10 = k[2] * b00 + k[3] * b10;
                    let t11 = k[2] * b01 + k[3] * b11;
                    // (K * B) * K^dag
                    out[r * dim + c] += t00 * k[0].conj() + t01 * k[1].conj();
                    out[r * dim + (c | mask)] += t00 * k[2].conj() + t01 * k[3].conj();
                    out[(r | mask) * dim + c] += t10 * k[0].conj() + t11 * k[1].conj();
                    out[(r | mask) * dim + (c | mask)] += t10 * k[2].conj() + t11 * k[3].conj();
                }
            }
        }
        DensityMatrix {
            n_qubits: self.n_qubits,
            data: out,
        }
    }
}

/// A single-qubit channel given by its Kraus operators (2x2, row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<[Complex64; 4]>,
}

impl KrausChannel {
    pub fn new(ops: Vec<[Complex64; 4]>) -> Self {
        KrausChannel { ops }
    }

    /// Bit-flip channel: {sqrt(1-p) I, sqrt(p) X}.
    pub fn bit_flip(p: f64) -> Result<Self> {
        check_probability(p)?;
        let zero = Complex64::new(0.0, 0.0);
        let a = Complex64::new((1.0 - p).sqrt(), 0.0);
        let b = Complex64::new(p.sqrt(), 0.0);
        Ok(KrausChannel::new(vec![
            [a, zero, zero, a],
            [zero, b, b, zero],
        ]))
    }

    /// Phase-flip channel: {sqrt(1-p) I, sqrt(p) Z}.
    pub fn phase_flip(p: f64) -> Result<Self> {
        check_probability(p)?;
        let zero = Complex64::new(0.0, 0.0);
        let a = Complex64::new((1.0 - p).sqrt(), 0.0);
        let b = Complex64::new(p.sqrt(), 0.0);
        Ok(KrausChannel::new(vec![
            [a, zero, zero, a],
            [b, zero, zero, -b],
        ]))
    }

    pub fn operators(&self) -> &[[Complex64; 4]] {
        &self.ops
    }

    /// max-entry deviation of sum K_i^dag K_i from the identity.
    pub fn completeness_error(&self) -> f64 {
        let mut sum = [Complex64::new(0.0, 0.0); 4];
        for k in &self.ops {
            let kd = [k[0].conj(), k[2].conj(), k[1].conj(), k[3].conj()];
            sum[0] += kd[0] * k[0] + kd[1] * k[2];
            sum[1] += kd[0] * k[1] + kd[1] * k[3];
            sum[2] += kd[2] * k[0] + kd[3] * k[2];
            sum[3] += kd[2] * k[1] + kd[3] * k[3];
        }
        let id = [1.0, 0.0, 0.0, 1.0];
        sum.iter()
            .zip(id)
            .map(|(s, i)| (s - Complex64::new(i, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, rho: &DensityMatrix, qubit: usize) -> DensityMatrix {
        rho.apply_single_qubit_kraus(&self.ops, qubit)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// rho' = (1-p) rho + p X_i rho X_i.
pub fn bitflip_channel(rho: &DensityMatrix, p: f64, qubit: usize) -> Result<DensityMatrix> {
    Ok(KrausChannel::bit_flip(p)?.apply(rho, qubit))
}

/// rho' = (1-p) rho + p Z_i rho Z_i; the diagonal (measurement
/// probabilities) is unchanged for any p.
pub fn phaseflip_channel(rho: &DensityMatrix, p: f64, qubit: usize) -> Result<DensityMatrix> {
    Ok(KrausChannel::phase_flip(p)?.apply(rho, qubit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pure_zero(n: usize) -> DensityMatrix {
        DensityMatrix::from_statevector(&Statevector::zero(n).unwrap()).unwrap()
    }

    #[test]
    fn p_zero_is_identity_channel() {
        let rho = pure_zero(1);
        let out = bitflip_channel(&rho, 0.0, 0).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn full_bitflip_swaps_basis_state() {
        let rho = pure_zero(1);
        let out = bitflip_channel(&rho, 1.0, 0).unwrap();
        assert!((out.entry(1, 1).re - 1.0).abs() < 1e-15);
        assert!(out.entry(0, 0).norm() < 1e-15);
    }

    #[test]
    fn half_bitflip_fully_mixes_basis_state() {
        let rho = pure_zero(1);
        let out = bitflip_channel(&rho, 0.5, 0).unwrap();
        assert!((out.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((out.entry(1, 1).re - 0.5).abs() < 1e-12);
        out.validate().unwrap();
    }

    #[test]
    fn phaseflip_preserves_diagonal() {
        // Random-ish pure state on 2 qubits, arbitrary p: diagonal exactly
        // unchanged.
        let mut s = Statevector::zero(2).unwrap();
        s.apply_ry(0, 0.9);
        s.apply_ry(1, 2.1);
        s.apply_cnot(0, 1);
        let rho = DensityMatrix::from_statevector(&s).unwrap();
        for p in [0.0, 0.17, 0.5, 0.93, 1.0] {
            let out = phaseflip_channel(&rho, p, 1).unwrap();
            for (a, b) in rho.diagonal().iter().zip(out.diagonal()) {
                assert_eq!(*a, b, "diagonal must be exactly invariant");
            }
        }
    }

    #[test]
    fn half_phaseflip_dephases_plus_state() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply_h(0);
        let rho = DensityMatrix::from_statevector(&s).unwrap();
        let out = phaseflip_channel(&rho, 0.5, 0).unwrap();
        // I/2: diagonal 0.5, off-diagonal 0.
        assert!((out.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!(out.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn kraus_completeness_holds() {
        for p in [0.0, 0.1, 0.5, 0.99, 1.0] {
            assert!(KrausChannel::bit_flip(p).unwrap().completeness_error() < 1e-12);
            assert!(KrausChannel::phase_flip(p).unwrap().completeness_error() < 1e-12);
        }
    }

    #[test]
    fn invalid_probability_rejected() {
        assert!(matches!(
            KrausChannel::bit_flip(-0.1),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            KrausChannel::phase_flip(1.5),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn channel_outputs_stay_cptp_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut s = Statevector::zero(3).unwrap();
            for q in 0..3 {
                s.apply_ry(q, rng.random::<f64>() * std::f64::consts::PI);
            }
            s.apply_cnot(0, 1);
            s.apply_cnot(1, 2);
            let mut rho = DensityMatrix::from_statevector(&s).unwrap();
            rho = bitflip_channel(&rho, rng.random(), 0).unwrap();
            rho = phaseflip_channel(&rho, rng.random(), 1).unwrap();
            rho = bitflip_channel(&rho, rng.random(), 2).unwrap();
            rho.validate().unwrap();
        }
    }

    #[test]
    fn fidelity_against_pure_state() {
        let zero = Statevector::zero(1).unwrap();
        let rho = pure_zero(1);
        assert!((rho.fidelity_with_pure(&zero).unwrap() - 1.0).abs() < 1e-15);
        let flipped = bitflip_channel(&rho, 1.0, 0).unwrap();
        assert!(flipped.fidelity_with_pure(&zero).unwrap() < 1e-15);
    }
}
