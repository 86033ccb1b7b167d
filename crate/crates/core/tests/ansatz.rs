mod common;

use common::*;
use ducc_vqe::ansatz::{
    enumerate_excitations, enumerate_register, excitation_count, trotter_circuit, Angle, Circuit, Excitation, ExcitationList,
};
use ducc_vqe::fermion::ActiveSpace;
use ducc_vqe::mapping::{jordan_wigner, Pauli, PauliString, PauliSum};
use ducc_vqe::simulator::{apply, prepare_reference};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

fn single_list(n: usize, e: Excitation) -> ExcitationList {
    let mut l = enumerate_register(n, &[0, 1]);
    l.singles.clear();
    l.doubles.clear();
    match e {
        Excitation::Single { i, a } => l.singles.push((i, a)),
        Excitation::Double { i, j, a, b } => l.doubles.push((i, j, a, b)),
    }
    l
}

#[test]
fn zero_parameters_give_the_identity() {
    for n_orb in 2..=3 {
        let n = 2 * n_orb;
        let circ = trotter_circuit(&enumerate_register(n, &[0, 1])).unwrap();
        let u = circuit_matrix(&circ, &vec![0.0; circ.n_params]);
        let id = DMatrix::<Complex64>::identity(1 << n, 1 << n);
        assert!(max_abs_diff(&u, &id) < 1e-12);
    }
}

#[test]
fn circuit_conserves_number_and_sz() {
    let mut r = rng(31);
    for _ in 0..10 {
        let n = 8;
        let circ = trotter_circuit(&enumerate_register(n, &[0, 1])).unwrap();
        let params: Vec<f64> = (0..circ.n_params).map(|_| r.random_range(-1.5..1.5)).collect();
        let psi = apply(&circ, &params, &prepare_reference(n, &[0, 1]).unwrap()).unwrap();
        for (b, a) in psi.amplitudes().iter().enumerate() {
            let alpha = (b & 0x55).count_ones();
            let beta = (b & 0xaa).count_ones();
            if alpha != 1 || beta != 1 {
                assert!(a.norm() < 1e-12, "leak into {b:08b}");
            }
        }
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn circuit_is_unitary() {
    let mut r = rng(32);
    let circ = trotter_circuit(&enumerate_register(6, &[0, 1])).unwrap();
    let params: Vec<f64> = (0..circ.n_params).map(|_| r.random_range(-2.0..2.0)).collect();
    let u = circuit_matrix(&circ, &params);
    let id = DMatrix::<Complex64>::identity(64, 64);
    assert!(max_abs_diff(&(u.adjoint() * &u), &id) < 1e-12);
}

#[test]
fn single_excitation_blocks_are_exact_exponentials() {
    let mut r = rng(33);
    let n = 6;
    let all = enumerate_register(n, &[0, 1]);
    for e in all.excitations() {
        let theta = r.random_range(-1.0..1.0);
        let circ = trotter_circuit(&single_list(n, e)).unwrap();
        let u = circuit_matrix(&circ, &[theta]);
        // the Pauli strings of one excitation commute, so one Trotter step is exact
        let gen = e.operator(n) - e.operator(n).adjoint();
        let exact = (jordan_wigner(&gen).to_dense() * Complex64::new(theta, 0.0)).exp();
        assert!(max_abs_diff(&u, &exact) < 1e-10, "{}", e.label());
    }
}

#[test]
fn pauli_exponentials_in_every_basis() {
    let mut r = rng(34);
    for _ in 0..40 {
        let ops: Vec<(usize, Pauli)> = (0..4)
            .filter_map(|q| match r.random_range(0..4) {
                0 => None,
                k => Some((q, [Pauli::X, Pauli::Y, Pauli::Z][k - 1])),
            })
            .collect();
        let p = PauliString::from_ops(&ops);
        if p.is_identity() {
            continue;
        }
        let theta = r.random_range(-3.0..3.0);
        let mut c = Circuit::new(4, 0);
        c.push_pauli_exponential(&p, Angle::Fixed(theta));
        let u = circuit_matrix(&c, &[]);
        // exp(i theta P) = cos(theta) + i sin(theta) P
        let dp = PauliSum::term(4, p, 1.0).to_dense();
        let exact = DMatrix::<Complex64>::identity(16, 16) * Complex64::new(theta.cos(), 0.0) + dp * Complex64::new(0.0, theta.sin());
        assert!(max_abs_diff(&u, &exact) < 1e-12, "{p}");
    }
}

#[test]
fn gate_count_grows_with_the_excitation_list() {
    let full = enumerate_register(8, &[0, 1]);
    let mut prev = 0;
    let mut sub = full.clone();
    sub.singles.clear();
    sub.doubles.clear();
    for &d in &full.doubles {
        sub.doubles.push(d);
        let c = trotter_circuit(&sub).unwrap().gate_count();
        assert!(c > prev);
        prev = c;
    }
    for &s in &full.singles {
        sub.singles.push(s);
        let c = trotter_circuit(&sub).unwrap().gate_count();
        assert!(c > prev);
        prev = c;
    }
}

#[test]
fn enumeration_matches_the_closed_form() {
    for n_orb in 1..=8 {
        for n_occ in 0..=n_orb.min(3) {
            let space = ActiveSpace::lowest(n_orb, n_occ, n_orb - n_occ).unwrap();
            let exc = enumerate_excitations(&space, 2 * n_occ).unwrap();
            assert_eq!(exc.len(), excitation_count(n_occ, n_orb - n_occ), "{n_orb} {n_occ}");
        }
    }
}

#[test]
fn parameter_slots_follow_excitation_order() {
    let exc = enumerate_register(6, &[0, 1]);
    let circ = trotter_circuit(&exc).unwrap();
    // raising only the first slot moves the state exactly as the first excitation alone
    let mut params = vec![0.0; circ.n_params];
    params[0] = 0.4;
    let psi = apply(&circ, &params, &prepare_reference(6, &[0, 1]).unwrap()).unwrap();
    let first = trotter_circuit(&single_list(6, exc.excitations()[0])).unwrap();
    let want = circuit_matrix(&first, &[0.4]) * DVector::from_column_slice(prepare_reference(6, &[0, 1]).unwrap().amplitudes());
    let err = psi.amplitudes().iter().zip(want.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12);
}
