use ducc_vqe::amplitudes::mp2_amplitudes;
use ducc_vqe::ansatz::{enumerate_register, trotter_circuit, Excitation};
use ducc_vqe::fermion::{build_hamiltonian, exact_ground_state, Determinant, FciOptions};
use ducc_vqe::integrals::builtin_fixture;
use ducc_vqe::mapping::jordan_wigner;
use ducc_vqe::vqe::{minimize, objective, warm_start, VqeProblem};

fn fixture_problem(name: &str) -> (VqeProblem, f64) {
    let ints = builtin_fixture(name).unwrap().to_spin_orbital();
    let h = build_hamiltonian(&ints);
    let e0 = exact_ground_state(&h, 2, 0, &FciOptions::default()).unwrap().energy;
    let exc = enumerate_register(8, &[0, 1]);
    let mut p = VqeProblem::new(jordan_wigner(&h), trotter_circuit(&exc).unwrap(), vec![0, 1]);
    p.initial_params = warm_start(&mp2_amplitudes(&ints, Determinant::from_occupied([0, 1])).unwrap(), &exc);
    (p, e0)
}

#[test]
fn warm_start_copies_mp2_doubles() {
    let ints = builtin_fixture("h2_ducc_0.8").unwrap().to_spin_orbital();
    let t = mp2_amplitudes(&ints, Determinant::from_occupied([0, 1])).unwrap();
    let exc = enumerate_register(8, &[0, 1]);
    let p = warm_start(&t, &exc);
    for (e, v) in exc.excitations().iter().zip(&p) {
        match *e {
            Excitation::Single { .. } => assert_eq!(*v, 0.0),
            Excitation::Double { i, j, a, b } => assert_eq!(*v, t.t2(i, j, a, b)),
        }
    }
    assert!(p.iter().any(|v| *v != 0.0));
}

#[test]
fn fixture_vqe_reaches_the_exact_energy() {
    let (p, e0) = fixture_problem("h2_ducc_0.8");
    let r = minimize(&p).unwrap();
    assert!(r.converged);
    assert!((r.energy - e0).abs() <= 1e-4, "{} vs {e0}", r.energy);
    assert!(r.energy >= e0 - 1e-9);
    assert!(r.trace.windows(2).all(|w| w[1].1 <= w[0].1));
    assert_eq!(r.trace.len(), r.n_evaluations);
    assert!((objective(&p, &r.params).unwrap() - r.energy).abs() < 1e-12);

    let again = minimize(&p).unwrap();
    assert_eq!(again.trace.len(), r.trace.len());
    assert!((again.energy - r.energy).abs() < 1e-12);
}
