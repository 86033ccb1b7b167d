//! Variational loop: COBYLA over circuit parameters against exact
//! state-vector expectations.

use serde::Serialize;

use crate::amplitudes::ClusterAmplitudes;
use crate::ansatz::{Circuit, Excitation, ExcitationList};
use crate::cobyla::{self, CobylaOptions};
use crate::error::{Error, Result};
use crate::mapping::PauliSum;
use crate::simulator::{apply_in_place, expectation, prepare_reference};

/// Chemical accuracy in Hartree, used for reporting.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct VqeOptions {
    pub optimizer: CobylaOptions,
    /// Recorded with the result; the optimizer itself is deterministic.
    pub seed: u64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            optimizer: CobylaOptions::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VqeProblem {
    pub hamiltonian: PauliSum,
    pub circuit: Circuit,
    /// Qubits set to one in the reference state.
    pub occupied: Vec<usize>,
    pub initial_params: Vec<f64>,
    pub options: VqeOptions,
}

impl VqeProblem {
    pub fn new(hamiltonian: PauliSum, circuit: Circuit, occupied: Vec<usize>) -> Self {
        let initial_params = vec![0.0; circuit.n_params];
        Self {
            hamiltonian,
            circuit,
            occupied,
            initial_params,
            options: VqeOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_params.len() != self.circuit.n_params {
            return Err(Error::LengthMismatch {
                expected: self.circuit.n_params,
                got: self.initial_params.len(),
            });
        }
        if self.hamiltonian.n_qubits() > self.circuit.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.circuit.n_qubits,
                got: self.hamiltonian.n_qubits(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub n_evaluations: usize,
    pub converged: bool,
    /// `(evaluation index, best energy so far)`.
    pub trace: Vec<(usize, f64)>,
}

/// `E(theta) = <ref| U(theta)+ H U(theta) |ref>`.
pub fn objective(problem: &VqeProblem, params: &[f64]) -> Result<f64> {
    let mut state = prepare_reference(problem.circuit.n_qubits, &problem.occupied)?;
    apply_in_place(&problem.circuit, params, &mut state)?;
    expectation(&problem.hamiltonian, &state)
}

pub fn minimize(problem: &VqeProblem) -> Result<VqeResult> {
    problem.validate()?;
    // surface structural errors before handing a plain closure to the optimizer
    objective(problem, &problem.initial_params)?;
    let f = |x: &[f64]| objective(problem, x).unwrap_or(f64::INFINITY);
    let r = cobyla::minimize(f, &problem.initial_params, &problem.options.optimizer)?;
    Ok(VqeResult {
        energy: r.f,
        params: r.x,
        n_evaluations: r.n_evals,
        converged: r.converged,
        trace: r.trace,
    })
}

/// Parameters taken from cluster amplitudes slot by slot (zeros where an
/// excitation has no amplitude).
pub fn warm_start(amps: &ClusterAmplitudes, exc: &ExcitationList) -> Vec<f64> {
    let m = &exc.spin_orbitals;
    exc.excitations()
        .iter()
        .map(|e| match *e {
            Excitation::Single { i, a } => amps.t1(m[i], m[a]),
            Excitation::Double { i, j, a, b } => amps.t2(m[i], m[j], m[a], m[b]),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{Angle, Axis, Gate};
    use crate::mapping::{Pauli, PauliString};

    #[test]
    fn one_parameter_ry() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::Rot {
            axis: Axis::Y,
            angle: Angle::Param { slot: 0, scale: 1.0 },
            qubit: 0,
        });
        let h = PauliSum::term(1, PauliString::single(0, Pauli::Z), 1.0);
        let p = VqeProblem::new(h, c, vec![]);
        let r = minimize(&p).unwrap();
        assert!(r.converged);
        assert!((r.energy + 1.0).abs() < 1e-10, "{}", r.energy);
        assert!((r.params[0] - std::f64::consts::PI).abs() < 1e-5, "{:?}", r.params);
        assert_eq!(objective(&p, &r.params).unwrap(), r.energy);
    }

    #[test]
    fn zero_hamiltonian() {
        let mut c = Circuit::new(2, 2);
        c.push(Gate::Rot {
            axis: Axis::X,
            angle: Angle::Param { slot: 1, scale: 1.0 },
            qubit: 1,
        });
        let p = VqeProblem::new(PauliSum::zero(2), c, vec![0]);
        let r = minimize(&p).unwrap();
        assert_eq!(r.energy, 0.0);
        assert!(r.converged);
        assert!(r.n_evaluations <= 20, "{}", r.n_evaluations);
    }

    #[test]
    fn length_mismatch() {
        let mut p = VqeProblem::new(PauliSum::zero(1), Circuit::new(1, 1), vec![]);
        p.initial_params = vec![];
        assert!(minimize(&p).is_err());
    }
}
