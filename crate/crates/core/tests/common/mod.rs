//! Shared generators and dense oracles for integration tests.
#![allow(dead_code)]

use ducc_vqe::ansatz::{Angle, Axis, Circuit, Gate};
use ducc_vqe::simulator::StateVector;
use ducc_vqe::fermion::{FermionOperator, Ladder};
use ducc_vqe::integrals::IntegralSet;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Molecule-like integrals: increasing one-body diagonal, weak off-diagonal
/// couplings, and a positive semidefinite `(ij|kl)` from a random
/// factorization, so the result carries the full 8-fold symmetry.
pub fn random_integrals(rng: &mut impl Rng, n: usize, n_electrons: usize) -> IntegralSet {
    let mut ints = IntegralSet::new(n);
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = -1.5 + 0.8 * i as f64 + rng.random_range(-0.1..0.1);
        for j in 0..i {
            let v = rng.random_range(-0.1..0.1);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    let mut factors = Vec::new();
    for _ in 0..n {
        let mut b = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            b[(i, i)] = rng.random_range(0.2..0.6);
            for j in 0..i {
                let v = rng.random_range(-0.1..0.1);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        factors.push(b);
    }
    for i in 0..n {
        for j in 0..n {
            ints.insert_h1(i + 1, j + 1, h[(i, j)]).unwrap();
            for k in 0..n {
                for l in 0..n {
                    let v: f64 = factors.iter().map(|b| b[(i, j)] * b[(k, l)]).sum();
                    ints.insert_h2(i + 1, j + 1, k + 1, l + 1, v).unwrap();
                }
            }
        }
    }
    ints.set_sector(Some(n_electrons), Some(0));
    ints
}

fn random_string(rng: &mut impl Rng, n_modes: usize, max_len: usize) -> Vec<Ladder> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| {
            let m = rng.random_range(0..n_modes);
            if rng.random_bool(0.5) {
                Ladder::create(m)
            } else {
                Ladder::annihilate(m)
            }
        })
        .collect()
}

/// Random operator with up to `n_terms` strings of length ≤ `max_len`.
pub fn random_operator(rng: &mut impl Rng, n_modes: usize, n_terms: usize, max_len: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(n_modes);
    for _ in 0..n_terms {
        let s = random_string(rng, n_modes, max_len);
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        op = op + FermionOperator::term(n_modes, &s, c);
    }
    op
}

pub fn random_hermitian(rng: &mut impl Rng, n_modes: usize, n_terms: usize, max_len: usize) -> FermionOperator {
    let a = random_operator(rng, n_modes, n_terms, max_len);
    a.clone() + a.adjoint()
}

pub fn random_anti_hermitian(rng: &mut impl Rng, n_modes: usize, n_terms: usize, max_len: usize) -> FermionOperator {
    let a = random_operator(rng, n_modes, n_terms, max_len);
    a.clone() - a.adjoint()
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, each value appearing twice.
pub fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Dense unitary of one gate on `n` little-endian qubits, built directly
/// from the textbook 2x2 matrices.
pub fn gate_matrix(g: &Gate, params: &[f64], n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let embed = |q: usize, u: [[Complex64; 2]; 2]| {
        DMatrix::from_fn(dim, dim, |r, col| {
            if (r ^ col) & !(1 << q) != 0 {
                c(0.0, 0.0)
            } else {
                u[(r >> q) & 1][(col >> q) & 1]
            }
        })
    };
    match *g {
        Gate::H(q) => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            embed(q, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
        }
        Gate::Cnot { control, target } => DMatrix::from_fn(dim, dim, |r, col| {
            let image = if col >> control & 1 == 1 { col ^ (1 << target) } else { col };
            if r == image {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }),
        Gate::Rot { axis, angle, qubit } => {
            let t = angle.value(params);
            let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
            let u = match axis {
                Axis::X => [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]],
                Axis::Y => [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]],
                Axis::Z => [[c(co, -si), c(0.0, 0.0)], [c(0.0, 0.0), c(co, si)]],
            };
            embed(qubit, u)
        }
    }
}

/// Product of gate matrices, last gate leftmost.
pub fn circuit_matrix(circ: &Circuit, params: &[f64]) -> DMatrix<Complex64> {
    let dim = 1usize << circ.n_qubits;
    circ.gates
        .iter()
        .fold(DMatrix::identity(dim, dim), |acc, g| gate_matrix(g, params, circ.n_qubits) * acc)
}

/// Random circuit mixing every gate kind, fixed and parameterized angles.
pub fn random_circuit(r: &mut impl Rng, n: usize, n_gates: usize, n_params: usize) -> Circuit {
    let mut c = Circuit::new(n, n_params);
    for _ in 0..n_gates {
        let q = r.random_range(0..n);
        let g = match r.random_range(0..4) {
            0 => Gate::H(q),
            1 if n > 1 => {
                let mut t = r.random_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                Gate::Cnot { control: q, target: t }
            }
            _ => {
                let axis = [Axis::X, Axis::Y, Axis::Z][r.random_range(0..3)];
                let angle = if n_params > 0 && r.random_bool(0.5) {
                    Angle::Param {
                        slot: r.random_range(0..n_params),
                        scale: r.random_range(-2.0..2.0),
                    }
                } else {
                    Angle::Fixed(r.random_range(-4.0..4.0))
                };
                Gate::Rot { axis, angle, qubit: q }
            }
        };
        c.push(g);
    }
    c
}

/// Normalized random complex state.
pub fn random_state(r: &mut impl Rng, n: usize) -> StateVector {
    let v: Vec<Complex64> = (0..1 << n).map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(v.into_iter().map(|z| z / norm).collect()).unwrap()
}
