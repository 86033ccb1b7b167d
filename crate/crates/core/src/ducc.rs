//! Active-space effective Hamiltonians from the external cluster rotation:
//! `H + [H, s] + 1/2 [[F, s], s]` with `s = T_ext - T_ext+`, projected onto
//! strings whose indices are all active and truncated to two-body terms.

use std::collections::HashMap;

use ndarray::{Array2, Array4};
use num_complex::Complex64;

use crate::amplitudes::{partition, AmplitudePartition, ClusterAmplitudes};
use crate::error::{Error, Result};
use crate::fermion::{build_hamiltonian, fock_operator, ActiveSpace, Determinant, FermionOperator, Ladder, PRUNE_THRESHOLD};
use crate::integrals::{write_spin_fcidump, SpinIntegralSet};

/// Default bound on intermediate product terms per operator multiplication.
pub const DEFAULT_TERM_CAP: usize = 100_000_000;

/// Dressed one- and two-body tensors over the active spin orbitals, which
/// are renumbered `0..n` in ascending order of their original index.
#[derive(Clone, Debug, PartialEq)]
pub struct DuccHamiltonian {
    pub chi1: Array2<f64>,
    /// Antisymmetrized, same convention as `SpinIntegralSet::h2`.
    pub chi2: Array4<f64>,
    pub scalar: f64,
    pub active: ActiveSpace,
}

impl DuccHamiltonian {
    pub fn n_spin_orbitals(&self) -> usize {
        self.chi1.nrows()
    }

    pub fn to_spin_integrals(&self) -> SpinIntegralSet {
        let mut ints = SpinIntegralSet::zeros(self.n_spin_orbitals());
        ints.h1.assign(&self.chi1);
        ints.h2.assign(&self.chi2);
        ints.scalar = self.scalar;
        ints.n_electrons = Some(self.active.n_electrons());
        ints.ms2 = Some(0);
        ints
    }

    pub fn to_operator(&self) -> FermionOperator {
        build_hamiltonian(&self.to_spin_integrals())
    }

    /// Largest violation of hermiticity or antisymmetry of the tensors.
    pub fn symmetry_error(&self) -> f64 {
        self.to_spin_integrals().symmetry_error()
    }

    /// Spin-resolved integral file readable by `integrals::parse_integrals`.
    pub fn to_fcidump(&self) -> String {
        let act: Vec<String> = self.active.active_orbitals().iter().map(|o| o.to_string()).collect();
        write_spin_fcidump(&self.to_spin_integrals(), &format!("effective Hamiltonian, active orbitals {}", act.join(",")))
    }
}

/// `sum t_ia (a+_a a_i - a+_i a_a) + sum_{i<j,a<b} t_ijab (a+_a a+_b a_j a_i - h.c.)`
/// built from the external amplitudes.
pub fn sigma_ext_operator(part: &AmplitudePartition) -> FermionOperator {
    cluster_generator(&part.external)
}

/// Anti-Hermitian `T - T+` for an amplitude set.
pub fn cluster_generator(t: &ClusterAmplitudes) -> FermionOperator {
    let n = t.n_spin_orbitals();
    let mut op = FermionOperator::zero(n);
    for ((i, a), v) in t.singles() {
        let tau = FermionOperator::term(n, &[Ladder::create(a), Ladder::annihilate(i)], v);
        op = op + tau.clone() - tau.adjoint();
    }
    for ((i, j, a, b), v) in t.doubles() {
        let tau = FermionOperator::term(
            n,
            &[Ladder::create(a), Ladder::create(b), Ladder::annihilate(j), Ladder::annihilate(i)],
            v,
        );
        op = op + tau.clone() - tau.adjoint();
    }
    op.normal_order()
}

/// `H + [H, s] + 1/2 [[F, s], s]`, vacuum normal ordered. Adding a constant
/// to `H` or `F` leaves the commutators unchanged, so the particle-hole
/// forms `H_N`, `F_N` and the plain operators give the same result.
pub fn commutator_expand(h: &FermionOperator, f: &FermionOperator, sigma: &FermionOperator, cap: usize) -> Result<FermionOperator> {
    let hs = h.commutator(sigma, cap)?;
    let fs = f.commutator(sigma, cap)?;
    let fss = fs.commutator(sigma, cap)?;
    Ok((h.normal_order() + hs + fss * 0.5).prune(PRUNE_THRESHOLD))
}

/// Keep one- and two-body strings of `h_bar` (in particle-hole normal order
/// relative to `reference`) whose indices are all active, then rewrite them
/// as plain `a+ a` strings over the active register.
pub fn project_active(h_bar: &FermionOperator, space: &ActiveSpace, reference: Determinant) -> Result<DuccHamiltonian> {
    let (constant, ph) = h_bar.normal_order_relative(reference);
    let kept = ph.filter(|s| s.len() <= 4 && s.iter().all(|l| space.is_active_spin_orbital(l.mode as usize)));
    let plain = (kept + FermionOperator::identity(h_bar.n_modes(), constant)).normal_order();

    let active = space.active_spin_orbitals();
    let map: HashMap<usize, usize> = active.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let n = active.len();
    let op = plain.remap(&map, n);

    let mut chi1 = Array2::zeros((n, n));
    let mut chi2 = Array4::zeros((n, n, n, n));
    let mut scalar = 0.0;
    for (s, c) in op.terms() {
        let c = real_part(s, c)?;
        match s {
            [] => scalar += c,
            [p, q] if p.dagger && !q.dagger => chi1[[p.mode as usize, q.mode as usize]] += c,
            [p, q, r, t] if p.dagger && q.dagger && !r.dagger && !t.dagger => {
                // c a+_P a+_Q a_R a_S (P<Q, R<S) = -chi^{PQ}_{RS} a+_P a+_Q a_S a_R
                let (p, q, r, t) = (p.mode as usize, q.mode as usize, r.mode as usize, t.mode as usize);
                let v = -c;
                chi2[[p, q, r, t]] += v;
                chi2[[q, p, r, t]] -= v;
                chi2[[p, q, t, r]] -= v;
                chi2[[q, p, t, r]] += v;
            }
            _ if c.abs() <= PRUNE_THRESHOLD => {}
            _ => {
                return Err(Error::Invalid(format!(
                    "effective Hamiltonian term {} does not conserve particle number",
                    s.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
                )))
            }
        }
    }
    Ok(DuccHamiltonian {
        chi1,
        chi2,
        scalar,
        active: space.clone(),
    })
}

fn real_part(s: &[Ladder], c: Complex64) -> Result<f64> {
    if c.im.abs() > 1e-10 {
        return Err(Error::NonRealCoefficient {
            term: s.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "),
            re: c.re,
            im: c.im,
        });
    }
    Ok(c.re)
}

/// Full pipeline: partition -> `s_ext` -> commutator expansion -> active
/// projection.
pub fn downfold(ints: &SpinIntegralSet, space: &ActiveSpace, t: &ClusterAmplitudes) -> Result<DuccHamiltonian> {
    downfold_with_cap(ints, space, t, DEFAULT_TERM_CAP)
}

pub fn downfold_with_cap(ints: &SpinIntegralSet, space: &ActiveSpace, t: &ClusterAmplitudes, cap: usize) -> Result<DuccHamiltonian> {
    if t.n_spin_orbitals() != ints.n_spin_orbitals() || 2 * space.n_orbitals() != ints.n_spin_orbitals() {
        return Err(Error::LengthMismatch {
            expected: ints.n_spin_orbitals(),
            got: t.n_spin_orbitals(),
        });
    }
    let reference = space.hf_determinant();
    let h = build_hamiltonian(ints);
    let f = fock_operator(ints, reference);
    let sigma = sigma_ext_operator(&partition(t, space));
    let h_bar = commutator_expand(&h, &f, &sigma, cap)?;
    project_active(&h_bar, space, reference)
}

/// The bare Hamiltonian restricted to the active spin orbitals.
pub fn bare_active(ints: &SpinIntegralSet, space: &ActiveSpace) -> SpinIntegralSet {
    let mut out = ints.restrict(&space.active_spin_orbitals());
    out.n_electrons = Some(space.n_electrons());
    out.ms2 = Some(0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::builtin_fixture;

    #[test]
    fn single_t1_generator() {
        let mut t = ClusterAmplitudes::new(4, Determinant::from_occupied([0, 1]));
        t.set_t1(0, 2, 0.3).unwrap();
        let s = cluster_generator(&t);
        assert_eq!(s.len(), 2);
        assert_eq!(s.coefficient(&[Ladder::create(2), Ladder::annihilate(0)]), Complex64::new(0.3, 0.0));
        assert_eq!(s.coefficient(&[Ladder::create(0), Ladder::annihilate(2)]), Complex64::new(-0.3, 0.0));
    }

    #[test]
    fn full_space_round_trip() {
        let ints = builtin_fixture("h2_ducc_1.4008").unwrap().to_spin_orbital();
        let space = ActiveSpace::full(4, 2).unwrap();
        let h = build_hamiltonian(&ints);
        let d = project_active(&h, &space, space.hf_determinant()).unwrap();
        let back = d.to_operator();
        let diff = (back - h).prune(1e-12);
        assert!(diff.is_empty(), "{diff}");
        assert!(d.symmetry_error() < 1e-12);
    }
}
