//! Dense statevector simulation.
//!
//! Qubit 0 is the leftmost qubit in ket notation, i.e. the most significant
//! bit of the amplitude index: |q0 q1 ... q_{n-1}>.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on dense statevectors (2^12 amplitudes).
pub const MAX_QUBITS: usize = 12;

pub const NORM_TOLERANCE: f64 = 1e-12;

/// A pure n-qubit state with 2^n complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The all-zeros computational basis state |0...0>.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidQuantumConfig(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    /// Wrap amplitudes that are already normalized to within
    /// [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::InvalidQuantumConfig(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidQuantumConfig(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let state = Statevector { n_qubits, amps };
        let norm_err = (state.norm_sqr() - 1.0).abs();
        if norm_err > NORM_TOLERANCE {
            return Err(Error::InvalidQuantumConfig(format!(
                "state is not normalized (|norm^2 - 1| = {norm_err:.3e})"
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Index bit mask for a qubit under the MSB-first convention.
    fn mask(&self, qubit: usize) -> usize {
        debug_assert!(qubit < self.n_qubits);
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Pauli-X on one qubit.
    pub fn apply_x(&mut self, qubit: usize) {
        let m = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    /// Pauli-Z on one qubit.
    pub fn apply_z(&mut self, qubit: usize) {
        let m = self.mask(qubit);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
    }

    /// Hadamard on one qubit.
    pub fn apply_h(&mut self, qubit: usize) {
        let m = self.mask(qubit);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let a = self.amps[i];
                let b = self.amps[i | m];
                self.amps[i] = (a + b) * s;
                self.amps[i | m] = (a - b) * s;
            }
        }
    }

    /// RY rotation: [[cos t/2, -sin t/2], [sin t/2, cos t/2]].
    pub fn apply_ry(&mut self, qubit: usize, theta: f64) {
        let m = self.mask(qubit);
        let c = (theta / 2.0).cos();
        let s = (theta / 2.0).sin();
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let a = self.amps[i];
                let b = self.amps[i | m];
                self.amps[i] = a * c - b * s;
                self.amps[i | m] = a * s + b * c;
            }
        }
    }

    /// Controlled-NOT.
    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cm = self.mask(control);
        let tm = self.mask(target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// Controlled-phase: multiplies the |11> component of the pair by
    /// exp(i theta).
    pub fn apply_cphase(&mut self, control: usize, target: usize, theta: f64) {
        let cm = self.mask(control);
        let tm = self.mask(target);
        let phase = Complex64::new(theta.cos(), theta.sin());
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & cm != 0 && i & tm != 0 {
                *a *= phase;
            }
        }
    }

    /// <Z> on one qubit: P(bit = 0) - P(bit = 1).
    pub fn expectation_z(&self, qubit: usize) -> f64 {
        let m = self.mask(qubit);
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & m == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum()
    }

    /// Projectively measure the parity Z_a Z_b of two qubits.
    ///
    /// Returns 0 for even parity (+1 eigenvalue) and 1 for odd. The state is
    /// projected and renormalized; the sampled branch is drawn from `rng`.
    pub fn measure_zz_parity(
        &mut self,
        qubit_a: usize,
        qubit_b: usize,
        rng: &mut impl rand::Rng,
    ) -> u8 {
        let ma = self.mask(qubit_a);
        let mb = self.mask(qubit_b);
        let p_even: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| ((i & ma != 0) as u8) == ((i & mb != 0) as u8))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let outcome = if p_even >= 1.0 - 1e-15 {
            0
        } else if p_even <= 1e-15 {
            1
        } else if rng.random::<f64>() < p_even {
            0
        } else {
            1
        };
        let keep_even = outcome == 0;
        let p_kept = if keep_even { p_even } else { 1.0 - p_even };
        let scale = 1.0 / p_kept.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            let even = ((i & ma != 0) as u8) == ((i & mb != 0) as u8);
            if even == keep_even {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        outcome
    }

    /// |<a|b>|^2 state overlap; the quantum-kernel evaluation between two
    /// embedded feature vectors.
    pub fn overlap(&self, other: &Statevector) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::WrongQubitCount {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_state_is_basis_zero() {
        let s = Statevector::zero(2).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_flips_msb_first_convention() {
        // X on qubit 0 of |00> must give |10>, which is index 0b10 = 2.
        let mut s = Statevector::zero(2).unwrap();
        s.apply_x(0);
        assert_eq!(s.amplitudes()[2], c(1.0));
    }

    #[test]
    fn cnot_entangles_plus_state() {
        // (|00> + |10>)/sqrt(2) --CNOT(0,1)--> (|00> + |11>)/sqrt(2)
        let mut s = Statevector::zero(2).unwrap();
        s.apply_h(0);
        s.apply_cnot(0, 1);
        let a = s.amplitudes();
        let v = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0] - c(v)).norm() < 1e-15);
        assert!((a[3] - c(v)).norm() < 1e-15);
        assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
    }

    #[test]
    fn ry_pi_is_x_up_to_sign() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply_ry(0, std::f64::consts::PI);
        assert!((s.amplitudes()[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_z_of_ry_state() {
        let theta = 1.234f64;
        let mut s = Statevector::zero(1).unwrap();
        s.apply_ry(0, theta);
        assert!((s.expectation_z(0) - theta.cos()).abs() < 1e-12);
    }

    #[test]
    fn gates_preserve_norm() {
        let mut s = Statevector::zero(3).unwrap();
        s.apply_h(0);
        s.apply_ry(1, 0.7);
        s.apply_cnot(0, 2);
        s.apply_cphase(1, 2, 0.3);
        s.apply_z(1);
        s.apply_x(2);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_measurement_projects() {
        // On a Bell state the ZZ parity is deterministically even.
        let mut s = Statevector::zero(2).unwrap();
        s.apply_h(0);
        s.apply_cnot(0, 1);
        let mut rng = derive_stream(&SeedSpec::new(1), "t", "m");
        assert_eq!(s.measure_zz_parity(0, 1, &mut rng), 0);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);

        // On |+>|0> the parity is a coin flip and projection renormalizes.
        let mut s = Statevector::zero(2).unwrap();
        s.apply_h(0);
        let _ = s.measure_zz_parity(0, 1, &mut rng);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_of_orthogonal_states_is_zero() {
        let a = Statevector::zero(1).unwrap();
        let mut b = Statevector::zero(1).unwrap();
        b.apply_x(0);
        assert!(a.overlap(&b).unwrap() < 1e-15);
        assert!((a.overlap(&a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_count_caps_enforced() {
        assert!(Statevector::zero(0).is_err());
        assert!(Statevector::zero(MAX_QUBITS + 1).is_err());
        assert!(Statevector::from_amplitudes(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(Statevector::from_amplitudes(vec![c(0.8), c(0.8)]).is_err());
    }
}
