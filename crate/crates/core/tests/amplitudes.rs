mod common;

use common::*;
use ducc_vqe::amplitudes::{
    ccsd_solve, mp2_amplitudes, mp2_energy, partition, screen, top_amplitudes, ClusterAmplitudes, DEFAULT_CCSD_MAX_ITER,
    DEFAULT_CCSD_TOLERANCE,
};
use ducc_vqe::ansatz::enumerate_register;
use ducc_vqe::fermion::{build_hamiltonian, exact_ground_state, expectation_in_determinant, ActiveSpace, Determinant, FciOptions};
use ducc_vqe::integrals::{builtin_fixture, SpinIntegralSet, FIXTURE_NAMES};
use proptest::prelude::*;
use rand::Rng;

fn hf() -> Determinant {
    Determinant::from_occupied([0, 1])
}

fn fci(ints: &SpinIntegralSet) -> f64 {
    exact_ground_state(&build_hamiltonian(ints), 2, 0, &FciOptions::default()).unwrap().energy
}

fn reference_energy(ints: &SpinIntegralSet) -> f64 {
    expectation_in_determinant(&build_hamiltonian(ints), hf()).re
}

#[test]
fn ccsd_is_exact_for_two_electrons() {
    let mut r = rng(51);
    for case in 0..12 {
        let n = r.random_range(2..=6);
        let ints = random_integrals(&mut r, n, 2).to_spin_orbital();
        let res = ccsd_solve(&ints, hf(), 1e-10, 500).unwrap();
        let e = reference_energy(&ints) + res.correlation_energy;
        let err = (e - fci(&ints)).abs();
        assert!(err <= 1e-8, "case {case} ({n} orbitals): {err}");
    }
}

#[test]
fn ccsd_is_exact_on_fixtures() {
    for name in FIXTURE_NAMES {
        let ints = builtin_fixture(name).unwrap().to_spin_orbital();
        let res = ccsd_solve(&ints, hf(), DEFAULT_CCSD_TOLERANCE, DEFAULT_CCSD_MAX_ITER).unwrap();
        let e = reference_energy(&ints) + res.correlation_energy;
        assert!((e - fci(&ints)).abs() < 1e-7, "{name}");
        assert!(res.residual <= DEFAULT_CCSD_TOLERANCE);
    }
}

#[test]
fn zero_two_body_gives_zero_correlation() {
    let mut r = rng(52);
    let mut ints = random_integrals(&mut r, 3, 2).to_spin_orbital();
    ints.h2.fill(0.0);
    let mp2 = mp2_amplitudes(&ints, hf()).unwrap();
    assert_eq!(mp2_energy(&mp2, &ints), 0.0);
    let res = ccsd_solve(&ints, hf(), DEFAULT_CCSD_TOLERANCE, DEFAULT_CCSD_MAX_ITER).unwrap();
    // off-diagonal Fock terms still rotate the orbitals, so only compare with the exact answer
    assert!((reference_energy(&ints) + res.correlation_energy - fci(&ints)).abs() < 1e-8);
}

#[test]
fn dissociated_fixture_is_dominated_by_the_paired_double() {
    let ints = builtin_fixture("h2_ducc_10.0").unwrap().to_spin_orbital();
    let res = ccsd_solve(&ints, hf(), DEFAULT_CCSD_TOLERANCE, DEFAULT_CCSD_MAX_ITER).unwrap();
    let top = top_amplitudes(&res.amplitudes, 1);
    assert_eq!(top[0].0, "1α 1β -> 2α 2β");
    assert!(top[0].1.abs() > 0.5, "{}", top[0].1);
}

#[test]
fn mp2_screening_keeps_eleven_excitations_at_equilibrium() {
    let ints = builtin_fixture("h2_ducc_1.4008").unwrap().to_spin_orbital();
    let mp2 = mp2_amplitudes(&ints, hf()).unwrap();
    let exc = enumerate_register(8, &[0, 1]);
    assert_eq!(exc.len(), 15);
    assert_eq!(exc.screened(&mp2, 1e-5).len(), 11);
}

fn random_amplitudes(seed: u64, n: usize) -> ClusterAmplitudes {
    let mut r = rng(seed);
    let mut t = ClusterAmplitudes::new(2 * n, hf());
    for a in 2..2 * n {
        for i in 0..2 {
            if (a + i) % 2 == 0 && r.random_bool(0.7) {
                t.set_t1(i, a, r.random_range(-0.1..0.1)).unwrap();
            }
        }
        for b in a + 1..2 * n {
            if r.random_bool(0.7) {
                let v = 10f64.powf(r.random_range(-7.0..-1.0)) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
                t.set_t2(0, 1, a, b, v).unwrap();
            }
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_is_lossless(seed in any::<u64>(), n in 2usize..6, k in 0usize..4) {
        let t = random_amplitudes(seed, n);
        let active: Vec<usize> = (1..=1 + k.min(n - 1)).collect();
        let space = ActiveSpace::from_active_list(n, 2, &active).unwrap();
        let p = partition(&t, &space);
        prop_assert_eq!(p.internal.len() + p.external.len(), t.len());
        prop_assert_eq!(p.recombine(), t);
    }

    #[test]
    fn screening_is_idempotent(seed in any::<u64>(), n in 2usize..6, e in -6.0f64..-2.0) {
        let t = random_amplitudes(seed, n);
        let thr = 10f64.powf(e);
        let once = screen(&t, thr);
        prop_assert_eq!(screen(&once, thr), once.clone());
        prop_assert!(once.doubles().all(|(_, v)| v.abs() >= thr));
    }

    #[test]
    fn amplitude_text_round_trips(seed in any::<u64>(), n in 2usize..6) {
        let t = random_amplitudes(seed, n);
        let back = ClusterAmplitudes::from_text(&t.to_text(), 2 * n, hf()).unwrap();
        prop_assert_eq!(back, t);
    }
}
