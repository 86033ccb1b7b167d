mod common;

use common::*;
use ducc_vqe::fermion::{build_hamiltonian, exact_ground_state, FciOptions, FermionOperator, Ladder};
use ducc_vqe::integrals::{builtin_fixture, FIXTURE_NAMES};
use ducc_vqe::mapping::{jordan_wigner, pauli_multiply, Pauli, PauliString, PauliSum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn jw_matches_fock_matrix_and_spectrum() {
    let mut r = rng(11);
    for case in 0..30 {
        let n = r.random_range(1..=10);
        let op = random_hermitian(&mut r, n, 6, 4);
        let fock = op.to_dense();
        let qubit = jordan_wigner(&op).to_dense();
        assert!(max_abs_diff(&fock, &qubit) < 1e-12, "case {case}");
        if n <= 6 {
            let a = hermitian_spectrum(&fock);
            let b = hermitian_spectrum(&qubit);
            let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(d < 1e-10, "case {case}: spectrum differs by {d}");
        }
    }
}

#[test]
fn jw_anticommutators() {
    for n in 1..=5 {
        let ident = PauliSum::term(n, PauliString::IDENTITY, 1.0);
        let lad = |m: usize, dag: bool| {
            let l = if dag { Ladder::create(m) } else { Ladder::annihilate(m) };
            jordan_wigner(&FermionOperator::term(n, &[l], 1.0))
        };
        for i in 0..n {
            for j in 0..n {
                let (ai, aj, cj) = (lad(i, false), lad(j, false), lad(j, true));
                let ac = (&ai * &cj + &cj * &ai).simplify(1e-12);
                let expected = if i == j { ident.clone() } else { PauliSum::zero(n) };
                assert_eq!(ac, expected, "{{a_{i}, a+_{j}}}");
                let aa = (&ai * &aj + &aj * &ai).simplify(1e-12);
                assert!(aa.is_empty(), "{{a_{i}, a_{j}}}");
            }
        }
    }
}

#[test]
fn jw_is_linear() {
    let mut r = rng(12);
    for _ in 0..50 {
        let n = r.random_range(1..=8);
        let a = random_operator(&mut r, n, 4, 4);
        let b = random_operator(&mut r, n, 4, 4);
        let s = r.random_range(-2.0..2.0);
        let lhs = jordan_wigner(&(a.clone() * s + b.clone()));
        let rhs = jordan_wigner(&a).scale(s) + jordan_wigner(&b);
        assert!((lhs - rhs).simplify(1e-12).is_empty());
    }
}

#[test]
fn jw_of_fixture_matches_sector_ground_state() {
    for name in FIXTURE_NAMES {
        let ints = builtin_fixture(name).unwrap().to_spin_orbital();
        let h = build_hamiltonian(&ints);
        let e = exact_ground_state(&h, 2, 0, &FciOptions::default()).unwrap().energy;
        let q = jordan_wigner(&h).to_dense();
        // restrict the qubit matrix to two-electron, Sz = 0 bit strings
        let sector: Vec<usize> = (0..256usize)
            .filter(|b| b.count_ones() == 2 && (b & 0x55).count_ones() == 1)
            .collect();
        let sub = DMatrix::from_fn(sector.len(), sector.len(), |i, j| q[(sector[i], sector[j])]);
        let e_q = hermitian_spectrum(&sub)[0];
        assert!((e - e_q).abs() < 1e-10, "{name}: {e} vs {e_q}");
    }
}

fn pauli_string() -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0u8..4, 6).prop_map(|v| {
        let ops: Vec<(usize, Pauli)> = v
            .iter()
            .enumerate()
            .filter_map(|(q, &k)| match k {
                1 => Some((q, Pauli::X)),
                2 => Some((q, Pauli::Y)),
                3 => Some((q, Pauli::Z)),
                _ => None,
            })
            .collect();
        PauliString::from_ops(&ops)
    })
}

fn dense(p: &PauliString) -> DMatrix<Complex64> {
    PauliSum::term(6, *p, 1.0).to_dense()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pauli_product_is_associative(a in pauli_string(), b in pauli_string(), c in pauli_string()) {
        let (p1, ab) = pauli_multiply(&a, &b);
        let (p2, ab_c) = pauli_multiply(&ab, &c);
        let (q1, bc) = pauli_multiply(&b, &c);
        let (q2, a_bc) = pauli_multiply(&a, &bc);
        prop_assert_eq!(ab_c, a_bc);
        prop_assert!((p1 * p2 - q1 * q2).norm() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_product_matches_matrices(a in pauli_string(), b in pauli_string()) {
        let (phase, c) = pauli_multiply(&a, &b);
        let lhs = dense(&a) * dense(&b);
        let rhs = dense(&c) * phase;
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-14);
        prop_assert_eq!(a.commutes_with(&b), max_abs_diff(&(dense(&a) * dense(&b)), &(dense(&b) * dense(&a))) < 1e-14);
    }

    #[test]
    fn text_round_trip(a in pauli_string()) {
        let parsed: PauliString = a.to_string().parse().unwrap();
        prop_assert_eq!(parsed, a);
    }
}
