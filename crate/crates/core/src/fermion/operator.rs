use std::collections::HashMap;
use std::fmt;
use std::hash::BuildHasherDefault;
use std::collections::hash_map::DefaultHasher;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default magnitude below which merged coefficients are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Fixed-key hasher so that term iteration order (and therefore floating
/// point summation order) is reproducible between runs.
pub(crate) type DetHasher = BuildHasherDefault<DefaultHasher>;
pub(crate) type TermMap = HashMap<Vec<Ladder>, Complex64, DetHasher>;

/// A single creation (`dagger = true`) or annihilation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: u16,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder {
            mode: mode as u16,
            dagger: true,
        }
    }

    pub fn annihilate(mode: usize) -> Self {
        Ladder {
            mode: mode as u16,
            dagger: false,
        }
    }

    pub fn adjoint(self) -> Self {
        Ladder {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dagger {
            write!(f, "{}^", self.mode)
        } else {
            write!(f, "{}", self.mode)
        }
    }
}

/// Occupation bitmask over spin orbitals (bit `p` set = mode `p` occupied).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Determinant(pub u64);

impl Determinant {
    pub fn from_occupied(modes: impl IntoIterator<Item = usize>) -> Self {
        Determinant(modes.into_iter().fold(0u64, |m, p| m | (1u64 << p)))
    }

    pub fn is_occupied(self, mode: usize) -> bool {
        self.0 >> mode & 1 == 1
    }

    pub fn n_electrons(self) -> u32 {
        self.0.count_ones()
    }

    /// `2 Sz` with even modes alpha and odd modes beta.
    pub fn ms2(self) -> i32 {
        let alpha = (self.0 & 0x5555_5555_5555_5555).count_ones() as i32;
        let beta = (self.0 & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i32;
        alpha - beta
    }

    pub fn occupied(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&p| self.is_occupied(p))
    }

    /// Apply a ladder string (rightmost operator acts first). Returns the
    /// sign and resulting determinant, or `None` when the state is destroyed.
    ///
    /// Basis states are `a+_{p1} a+_{p2} ... |0>` with `p1 < p2 < ...`, so an
    /// operator on mode `p` picks up `(-1)^(occupied modes below p)`.
    pub fn apply(self, string: &[Ladder]) -> Option<(f64, Determinant)> {
        let mut bits = self.0;
        let mut sign = 1.0;
        for op in string.iter().rev() {
            let p = op.mode as u32;
            let mask = 1u64 << p;
            let occupied = bits & mask != 0;
            if op.dagger == occupied {
                return None;
            }
            if (bits & (mask - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            bits ^= mask;
        }
        Some((sign, Determinant(bits)))
    }
}

/// Sparse sum of products of ladder operators with complex coefficients.
#[derive(Clone, Debug, Default)]
pub struct FermionOperator {
    n_modes: usize,
    terms: TermMap,
}

impl PartialEq for FermionOperator {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes && self.terms == other.terms
    }
}

impl FermionOperator {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: TermMap::default(),
        }
    }

    pub fn identity(n_modes: usize, coeff: impl Into<Complex64>) -> Self {
        let mut op = Self::zero(n_modes);
        op.add_term(Vec::new(), coeff.into());
        op
    }

    /// A single product term.
    pub fn term(n_modes: usize, string: &[Ladder], coeff: impl Into<Complex64>) -> Self {
        let mut op = Self::zero(n_modes);
        op.add_term(string.to_vec(), coeff.into());
        op
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Ladder], Complex64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    /// Terms in a stable (sorted) order.
    pub fn sorted_terms(&self) -> Vec<(Vec<Ladder>, Complex64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, &c)| (k.clone(), c)).collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        v
    }

    pub fn coefficient(&self, string: &[Ladder]) -> Complex64 {
        self.terms.get(string).copied().unwrap_or_default()
    }

    /// Accumulate a raw term. Panics on a mode index outside the operator.
    pub fn add_term(&mut self, string: Vec<Ladder>, coeff: Complex64) {
        assert!(
            string.iter().all(|l| (l.mode as usize) < self.n_modes),
            "ladder index out of range for {} modes",
            self.n_modes
        );
        *self.terms.entry(string).or_default() += coeff;
    }

    fn with_terms(n_modes: usize, terms: TermMap) -> Self {
        Self { n_modes, terms }
    }

    /// Drop terms whose coefficient magnitude is below `threshold`.
    pub fn prune(mut self, threshold: f64) -> Self {
        self.terms.retain(|_, c| c.norm() >= threshold);
        self
    }

    pub fn scale(mut self, factor: impl Into<Complex64>) -> Self {
        let f = factor.into();
        for c in self.terms.values_mut() {
            *c *= f;
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (s, c) in &self.terms {
            let rev: Vec<Ladder> = s.iter().rev().map(|l| l.adjoint()).collect();
            out.add_term(rev, c.conj());
        }
        out
    }

    /// Largest number of ladder operators in any term.
    pub fn max_string_len(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Coefficient of the empty string.
    pub fn constant(&self) -> Complex64 {
        self.coefficient(&[])
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Operator product `self * other` (unsimplified), refusing to build more
    /// than `cap` raw terms.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let count = self.terms.len().saturating_mul(other.terms.len());
        if count > cap {
            return Err(Error::TermCapExceeded { count, cap });
        }
        let n = self.n_modes.max(other.n_modes);
        let mut out = TermMap::default();
        let mut scratch = Vec::new();
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                scratch.clear();
                scratch.extend_from_slice(sa);
                scratch.extend_from_slice(sb);
                *out.entry(scratch.clone()).or_default() += ca * cb;
            }
        }
        Ok(Self::with_terms(n, out))
    }

    /// Product followed by vacuum normal ordering, merged term by term so the
    /// raw product is never materialized.
    pub fn mul_normal_ordered(&self, other: &Self, cap: usize) -> Result<Self> {
        let count = self.terms.len().saturating_mul(other.terms.len());
        if count > cap {
            return Err(Error::TermCapExceeded { count, cap });
        }
        let n = self.n_modes.max(other.n_modes);
        let mut out = TermMap::default();
        let mut scratch = Vec::new();
        let is_creator = |l: Ladder| l.dagger;
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                scratch.clear();
                scratch.extend_from_slice(sa);
                scratch.extend_from_slice(sb);
                order_string(&scratch, ca * cb, &is_creator, &mut out);
            }
        }
        Ok(Self::with_terms(n, out).prune(PRUNE_THRESHOLD))
    }

    /// `[self, other]`, vacuum normal ordered.
    pub fn commutator(&self, other: &Self, cap: usize) -> Result<Self> {
        let ab = self.mul_normal_ordered(other, cap)?;
        let ba = other.mul_normal_ordered(self, cap)?;
        Ok((ab - ba).prune(PRUNE_THRESHOLD))
    }

    /// Canonical form: creators left of annihilators, each group in ascending
    /// mode order, contractions from `{a_p, a+_q} = delta_pq`, merged and
    /// pruned.
    pub fn normal_order(&self) -> Self {
        let mut out = TermMap::default();
        for (s, c) in &self.terms {
            order_string(s, *c, &|l: Ladder| l.dagger, &mut out);
        }
        Self::with_terms(self.n_modes, out).prune(PRUNE_THRESHOLD)
    }

    /// Particle-hole normal ordering relative to `reference`: returns
    /// `<ref|op|ref>` and the remainder with quasi-particle creators
    /// (`a+` on empty modes, `a` on occupied modes) to the left.
    pub fn normal_order_relative(&self, reference: Determinant) -> (Complex64, Self) {
        let mut out = TermMap::default();
        let is_creator = |l: Ladder| l.dagger != reference.is_occupied(l.mode as usize);
        for (s, c) in &self.terms {
            order_string(s, *c, &is_creator, &mut out);
        }
        let scalar = out.remove(&Vec::new()).unwrap_or_default();
        (scalar, Self::with_terms(self.n_modes, out).prune(PRUNE_THRESHOLD))
    }

    /// Largest coefficient of `op - op^dagger` after normal ordering.
    pub fn hermiticity_error(&self) -> f64 {
        (self.clone() - self.adjoint()).normal_order().max_abs()
    }

    /// Largest coefficient of `op + op^dagger` after normal ordering.
    pub fn anti_hermiticity_error(&self) -> f64 {
        (self.clone() + self.adjoint()).normal_order().max_abs()
    }

    /// Dense matrix over the full `2^n` Fock space, indexed by occupation
    /// bitmask. Built by acting on basis states directly; intended as an
    /// oracle for small systems.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.n_modes;
        assert!(n <= 14, "dense Fock matrix limited to 14 modes");
        let dim = 1usize << n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            let det = Determinant(col as u64);
            for (s, c) in &self.terms {
                if let Some((sign, out)) = det.apply(s) {
                    m[(out.0 as usize, col)] += c * sign;
                }
            }
        }
        m
    }

    /// Apply to a state given as a sparse map determinant -> amplitude.
    pub fn apply_to(&self, state: &HashMap<Determinant, Complex64>) -> HashMap<Determinant, Complex64> {
        let mut out: HashMap<Determinant, Complex64> = HashMap::new();
        for (det, amp) in state {
            for (s, c) in &self.terms {
                if let Some((sign, d)) = det.apply(s) {
                    *out.entry(d).or_default() += c * amp * sign;
                }
            }
        }
        out
    }

    /// Keep only terms satisfying `pred`.
    pub fn filter(&self, pred: impl Fn(&[Ladder]) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(s, _)| pred(s))
            .map(|(s, c)| (s.clone(), *c))
            .collect();
        Self::with_terms(self.n_modes, terms)
    }

    /// Rename modes through `map` (old -> new) into an operator over
    /// `n_modes` modes. Terms touching unmapped modes are dropped.
    pub fn remap(&self, map: &HashMap<usize, usize>, n_modes: usize) -> Self {
        let mut out = Self::zero(n_modes);
        'terms: for (s, c) in &self.terms {
            let mut new = Vec::with_capacity(s.len());
            for l in s {
                match map.get(&(l.mode as usize)) {
                    Some(&m) => new.push(Ladder {
                        mode: m as u16,
                        dagger: l.dagger,
                    }),
                    None => continue 'terms,
                }
            }
            out.add_term(new, *c);
        }
        out
    }
}

/// Insertion-sort `string` into normal order under the creator predicate,
/// pushing contraction terms onto a work stack, and accumulate the results.
fn order_string(string: &[Ladder], coeff: Complex64, is_creator: &dyn Fn(Ladder) -> bool, out: &mut TermMap) {
    let mut stack: Vec<(Vec<Ladder>, Complex64)> = vec![(string.to_vec(), coeff)];
    'outer: while let Some((mut s, mut c)) = stack.pop() {
        for i in 1..s.len() {
            let mut j = i;
            while j > 0 {
                let left = s[j - 1];
                let right = s[j];
                let (lc, rc) = (is_creator(left), is_creator(right));
                if rc && !lc {
                    if left.mode == right.mode {
                        let mut contracted = Vec::with_capacity(s.len() - 2);
                        contracted.extend_from_slice(&s[..j - 1]);
                        contracted.extend_from_slice(&s[j + 1..]);
                        stack.push((contracted, c));
                    }
                    s.swap(j - 1, j);
                    c = -c;
                } else if lc == rc {
                    if left.mode == right.mode {
                        continue 'outer;
                    }
                    if right.mode < left.mode {
                        s.swap(j - 1, j);
                        c = -c;
                    } else {
                        break;
                    }
                } else {
                    break;
                }
                j -= 1;
            }
        }
        *out.entry(s).or_default() += c;
    }
}

impl Add for FermionOperator {
    type Output = FermionOperator;
    fn add(mut self, rhs: FermionOperator) -> FermionOperator {
        self.n_modes = self.n_modes.max(rhs.n_modes);
        for (s, c) in rhs.terms {
            *self.terms.entry(s).or_default() += c;
        }
        self
    }
}

impl Sub for FermionOperator {
    type Output = FermionOperator;
    fn sub(self, rhs: FermionOperator) -> FermionOperator {
        self + (-rhs)
    }
}

impl Neg for FermionOperator {
    type Output = FermionOperator;
    fn neg(self) -> FermionOperator {
        self.scale(-1.0)
    }
}

impl Mul<f64> for FermionOperator {
    type Output = FermionOperator;
    fn mul(self, rhs: f64) -> FermionOperator {
        self.scale(rhs)
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, c) in self.sorted_terms() {
            let ops: Vec<String> = s.iter().map(|l| l.to_string()).collect();
            writeln!(f, "({:+.12e} {:+.12e}i) [{}]", c.re, c.im, ops.join(" "))?;
        }
        Ok(())
    }
}
