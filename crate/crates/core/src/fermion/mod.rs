//! Second-quantized operators: Hamiltonian assembly, normal ordering, the
//! Fock operator and exact diagonalization in particle-number/Sz sectors.

mod fci;
mod operator;

pub use fci::{exact_ground_state, sector_determinants, FciOptions, GroundState, DEFAULT_SECTOR_CAP, DENSE_BELOW};
pub use operator::{Determinant, FermionOperator, Ladder, PRUNE_THRESHOLD};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::SpinIntegralSet;

/// Partition of spatial orbitals (1-based) into occupied, active virtual and
/// frozen external orbitals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSpace {
    n_orbitals: usize,
    occupied: Vec<usize>,
    active_virtual: Vec<usize>,
    frozen_external: Vec<usize>,
}

impl ActiveSpace {
    pub fn new(n_orbitals: usize, occupied: Vec<usize>, active_virtual: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; n_orbitals + 1];
        for &o in occupied.iter().chain(&active_virtual) {
            if o == 0 || o > n_orbitals {
                return Err(Error::IndexOutOfRange { index: o, n: n_orbitals });
            }
            if seen[o] {
                return Err(Error::Invalid(format!("orbital {o} listed twice in active space")));
            }
            seen[o] = true;
        }
        let frozen_external = (1..=n_orbitals).filter(|&o| !seen[o]).collect();
        Ok(Self {
            n_orbitals,
            occupied,
            active_virtual,
            frozen_external,
        })
    }

    /// Lowest `n_occupied` orbitals occupied, the next `n_active_virtual`
    /// active, the rest external.
    pub fn lowest(n_orbitals: usize, n_occupied: usize, n_active_virtual: usize) -> Result<Self> {
        if n_occupied + n_active_virtual > n_orbitals {
            return Err(Error::Invalid(format!(
                "{n_occupied} occupied + {n_active_virtual} active virtual exceeds {n_orbitals} orbitals"
            )));
        }
        Self::new(
            n_orbitals,
            (1..=n_occupied).collect(),
            (n_occupied + 1..=n_occupied + n_active_virtual).collect(),
        )
    }

    /// Closed-shell space with every orbital active.
    pub fn full(n_orbitals: usize, n_electrons: usize) -> Result<Self> {
        let n_occ = n_electrons / 2;
        Self::lowest(n_orbitals, n_occ, n_orbitals.saturating_sub(n_occ))
    }

    /// Occupied orbitals are the lowest `n_electrons / 2`; the active set is
    /// `active` (which must contain them).
    pub fn from_active_list(n_orbitals: usize, n_electrons: usize, active: &[usize]) -> Result<Self> {
        let n_occ = n_electrons / 2;
        let occupied: Vec<usize> = (1..=n_occ).collect();
        for o in &occupied {
            if !active.contains(o) {
                return Err(Error::Invalid(format!(
                    "active list must contain every occupied orbital (missing {o})"
                )));
            }
        }
        let mut virt: Vec<usize> = active.iter().copied().filter(|o| *o > n_occ).collect();
        virt.sort_unstable();
        Self::new(n_orbitals, occupied, virt)
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn active_virtual(&self) -> &[usize] {
        &self.active_virtual
    }

    pub fn frozen_external(&self) -> &[usize] {
        &self.frozen_external
    }

    /// Occupied and active-virtual orbitals in ascending order.
    pub fn active_orbitals(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.occupied.iter().chain(&self.active_virtual).copied().collect();
        v.sort_unstable();
        v
    }

    /// Active spin orbitals (0-based, interleaved) in ascending order.
    pub fn active_spin_orbitals(&self) -> Vec<usize> {
        self.active_orbitals()
            .iter()
            .flat_map(|&o| [2 * (o - 1), 2 * (o - 1) + 1])
            .collect()
    }

    pub fn is_active_spin_orbital(&self, p: usize) -> bool {
        let o = p / 2 + 1;
        self.occupied.contains(&o) || self.active_virtual.contains(&o)
    }

    pub fn is_active_virtual_spin_orbital(&self, p: usize) -> bool {
        self.active_virtual.contains(&(p / 2 + 1))
    }

    /// Closed-shell Hartree-Fock determinant: both spins of every occupied
    /// orbital.
    pub fn hf_determinant(&self) -> Determinant {
        Determinant::from_occupied(self.occupied.iter().flat_map(|&o| [2 * (o - 1), 2 * (o - 1) + 1]))
    }

    pub fn n_electrons(&self) -> usize {
        2 * self.occupied.len()
    }
}

/// `H = scalar + sum h_pq a+_p a_q + 1/4 sum <pq||rs> a+_p a+_q a_s a_r`,
/// normal ordered.
pub fn build_hamiltonian(ints: &SpinIntegralSet) -> FermionOperator {
    let n = ints.n_spin_orbitals();
    let mut op = FermionOperator::zero(n);
    if ints.scalar != 0.0 {
        op.add_term(Vec::new(), ints.scalar.into());
    }
    for p in 0..n {
        for q in 0..n {
            let v = ints.h1[[p, q]];
            if v != 0.0 {
                op.add_term(vec![Ladder::create(p), Ladder::annihilate(q)], v.into());
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            for r in 0..n {
                for s in 0..n {
                    if r == s {
                        continue;
                    }
                    let v = ints.h2[[p, q, r, s]];
                    if v != 0.0 {
                        op.add_term(
                            vec![
                                Ladder::create(p),
                                Ladder::create(q),
                                Ladder::annihilate(s),
                                Ladder::annihilate(r),
                            ],
                            Complex64::from(0.25 * v),
                        );
                    }
                }
            }
        }
    }
    op.normal_order()
}

/// Fock matrix `f_pq = h_pq + sum_{i occ} <pi||qi>`.
pub fn fock_matrix(ints: &SpinIntegralSet, reference: Determinant) -> Array2<f64> {
    let n = ints.n_spin_orbitals();
    let occ: Vec<usize> = reference.occupied().filter(|&p| p < n).collect();
    Array2::from_shape_fn((n, n), |(p, q)| {
        ints.h1[[p, q]] + occ.iter().map(|&i| ints.h2[[p, i, q, i]]).sum::<f64>()
    })
}

/// Diagonal of the Fock matrix.
pub fn orbital_energies(ints: &SpinIntegralSet, reference: Determinant) -> Vec<f64> {
    fock_matrix(ints, reference).diag().to_vec()
}

/// One-body Fock operator `sum f_pq a+_p a_q`. It differs from the
/// particle-hole normal-ordered `F_N` only by the constant `<ref|F|ref>`,
/// which drops out of every commutator it enters.
pub fn fock_operator(ints: &SpinIntegralSet, reference: Determinant) -> FermionOperator {
    let f = fock_matrix(ints, reference);
    let n = ints.n_spin_orbitals();
    let mut op = FermionOperator::zero(n);
    for p in 0..n {
        for q in 0..n {
            if f[[p, q]] != 0.0 {
                op.add_term(vec![Ladder::create(p), Ladder::annihilate(q)], f[[p, q]].into());
            }
        }
    }
    op.prune(PRUNE_THRESHOLD)
}

/// `<det|op|det>`.
pub fn expectation_in_determinant(op: &FermionOperator, det: Determinant) -> Complex64 {
    let mut acc = Complex64::default();
    for (s, c) in op.terms() {
        if let Some((sign, out)) = det.apply(s) {
            if out == det {
                acc += c * sign;
            }
        }
    }
    acc
}

/// Total number operator over `n` modes.
pub fn number_operator(n: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(n);
    for p in 0..n {
        op.add_term(vec![Ladder::create(p), Ladder::annihilate(p)], 1.0.into());
    }
    op
}

/// `2 Sz` operator (alpha on even modes).
pub fn ms2_operator(n: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(n);
    for p in 0..n {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        op.add_term(vec![Ladder::create(p), Ladder::annihilate(p)], sign.into());
    }
    op
}
