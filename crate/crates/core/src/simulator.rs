//! Dense state-vector simulation with exact Pauli-sum expectations.
//!
//! Amplitude index bit `q` is qubit `q` (little-endian).

use num_complex::Complex64;

use crate::ansatz::{Axis, Circuit, Gate};
use crate::error::{Error, Result};
use crate::mapping::{PauliSum, REAL_TOLERANCE};

/// Default largest register a state vector may be allocated for.
pub const DEFAULT_QUBIT_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|b>`.
    pub fn basis(n_qubits: usize, b: u64) -> Result<Self> {
        Self::basis_with_cap(n_qubits, b, DEFAULT_QUBIT_CAP)
    }

    pub fn basis_with_cap(n_qubits: usize, b: u64, cap: usize) -> Result<Self> {
        if n_qubits > cap {
            return Err(Error::TooManyQubits { n: n_qubits, cap });
        }
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[b as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(Error::Invalid(format!("state length {} is not a power of two", amps.len())));
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_rz(&mut self, q: usize, theta: f64) {
        let bit = 1usize << q;
        let (lo, hi) = (Complex64::from_polar(1.0, -theta / 2.0), Complex64::from_polar(1.0, theta / 2.0));
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { lo } else { hi };
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Apply one gate with angles resolved against `params`.
    pub fn apply_gate(&mut self, g: &Gate, params: &[f64]) {
        match *g {
            Gate::H(q) => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(q, [[h, h], [h, -h]]);
            }
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
            Gate::Rot { axis, angle, qubit } => {
                let theta = angle.value(params);
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                match axis {
                    Axis::Z => self.apply_rz(qubit, theta),
                    Axis::X => self.apply_single(
                        qubit,
                        [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]],
                    ),
                    Axis::Y => self.apply_single(
                        qubit,
                        [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]],
                    ),
                }
            }
        }
    }
}

/// Basis state with ones on the `occupied` qubits.
pub fn prepare_reference(n_qubits: usize, occupied: &[usize]) -> Result<StateVector> {
    let mut b = 0u64;
    for &q in occupied {
        if q >= n_qubits {
            return Err(Error::IndexOutOfRange { index: q, n: n_qubits });
        }
        b |= 1 << q;
    }
    StateVector::basis(n_qubits, b)
}

pub fn apply_in_place(circ: &Circuit, params: &[f64], state: &mut StateVector) -> Result<()> {
    if params.len() != circ.n_params {
        return Err(Error::LengthMismatch {
            expected: circ.n_params,
            got: params.len(),
        });
    }
    if state.n_qubits != circ.n_qubits {
        return Err(Error::LengthMismatch {
            expected: circ.n_qubits,
            got: state.n_qubits,
        });
    }
    for g in &circ.gates {
        state.apply_gate(g, params);
    }
    Ok(())
}

pub fn apply(circ: &Circuit, params: &[f64], state: &StateVector) -> Result<StateVector> {
    let mut out = state.clone();
    apply_in_place(circ, params, &mut out)?;
    Ok(out)
}

/// Exact `<psi|H|psi>` for a Hermitian Pauli sum.
pub fn expectation(h: &PauliSum, state: &StateVector) -> Result<f64> {
    if let Some((p, c)) = h.terms().find(|(_, c)| c.im.abs() > REAL_TOLERANCE) {
        return Err(Error::NonRealCoefficient {
            term: p.to_string(),
            re: c.re,
            im: c.im,
        });
    }
    if h.n_qubits() > state.n_qubits {
        return Err(Error::LengthMismatch {
            expected: h.n_qubits(),
            got: state.n_qubits,
        });
    }
    let mut total = 0.0;
    for (p, c) in h.terms() {
        let mut acc = Complex64::default();
        for (b, amp) in state.amps.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let (phase, k) = p.apply_to_basis(b as u64);
            acc += state.amps[k as usize].conj() * phase * amp;
        }
        total += c.re * acc.re;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Angle;
    use crate::mapping::{Pauli, PauliString};

    #[test]
    fn reference_states() {
        let s = prepare_reference(2, &[]).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        let hf = prepare_reference(8, &[0, 1]).unwrap();
        assert_eq!(hf.amplitudes()[3], Complex64::new(1.0, 0.0));
        assert!((hf.norm() - 1.0).abs() < 1e-15);
        assert!(prepare_reference(2, &[2]).is_err());
        assert!(StateVector::basis(25, 0).is_err());
    }

    #[test]
    fn identity_and_z_expectations() {
        let s = prepare_reference(3, &[0]).unwrap();
        let id = PauliSum::term(3, PauliString::IDENTITY, 2.5);
        assert_eq!(expectation(&id, &s).unwrap(), 2.5);
        let z0 = PauliSum::term(3, PauliString::single(0, Pauli::Z), 1.0);
        assert_eq!(expectation(&z0, &s).unwrap(), -1.0);
        let bad = PauliSum::term(3, PauliString::single(0, Pauli::Z), Complex64::new(0.0, 1.0));
        assert!(expectation(&bad, &s).is_err());
    }

    #[test]
    fn zz_rotation_on_00_is_phase() {
        let mut c = Circuit::new(2, 1);
        c.push(Gate::Cnot { control: 0, target: 1 });
        c.push(Gate::Rot {
            axis: Axis::Z,
            angle: Angle::Param { slot: 0, scale: 1.0 },
            qubit: 1,
        });
        c.push(Gate::Cnot { control: 0, target: 1 });
        let theta = 0.7;
        let out = apply(&c, &[theta], &prepare_reference(2, &[]).unwrap()).unwrap();
        let expected = Complex64::from_polar(1.0, -theta / 2.0);
        assert!((out.amplitudes()[0] - expected).norm() < 1e-15);
        assert!(apply(&c, &[], &out).is_err());
    }
}
