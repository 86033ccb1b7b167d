//! Pauli strings, Pauli sums and the Jordan-Wigner transformation.
//!
//! A Pauli string is stored as a pair of bitmasks `(x, z)`; qubit `q` carries
//! `X` if only `x` is set, `Z` if only `z` is set and `Y` if both are set.
//! The operator represented is `prod_q i^(x_q z_q) X^(x_q) Z^(z_q)`, which
//! makes `Y = iXZ` come out right.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, Ladder};

/// Coefficients below this magnitude are removed after simplification.
pub const PAULI_PRUNE_THRESHOLD: f64 = 1e-12;
/// Imaginary parts below this are treated as zero for Hermitian sums.
pub const REAL_TOLERANCE: f64 = 1e-10;

type FixedState = std::hash::BuildHasherDefault<std::collections::hash_map::DefaultHasher>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn single(qubit: usize, p: Pauli) -> Self {
        let bit = 1u64 << qubit;
        match p {
            Pauli::X => PauliString { x: bit, z: 0 },
            Pauli::Y => PauliString { x: bit, z: bit },
            Pauli::Z => PauliString { x: 0, z: bit },
        }
    }

    pub fn from_ops(ops: &[(usize, Pauli)]) -> Self {
        ops.iter().fold(PauliString::IDENTITY, |acc, &(q, p)| {
            let s = PauliString::single(q, p);
            PauliString {
                x: acc.x | s.x,
                z: acc.z | s.z,
            }
        })
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        let x = self.x >> qubit & 1 == 1;
        let z = self.z >> qubit & 1 == 1;
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    /// Non-identity factors in ascending qubit order.
    pub fn ops(&self) -> Vec<(usize, Pauli)> {
        let support = self.x | self.z;
        (0..64)
            .filter(|q| support >> q & 1 == 1)
            .map(|q| (q, self.get(q).unwrap()))
            .collect()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Highest qubit touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        let s = self.x | self.z;
        (s != 0).then(|| 63 - s.leading_zeros() as usize)
    }

    fn y_count(&self) -> i64 {
        (self.x & self.z).count_ones() as i64
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Action on a computational basis state: `P|b> = phase |b ^ x>`.
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = if (b & self.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        (i_pow(self.y_count()) * sign, b ^ self.x)
    }
}

/// Product of two Pauli strings: `a * b = phase * c` with `phase` in
/// `{1, i, -1, -i}`.
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> (Complex64, PauliString) {
    let c = PauliString {
        x: a.x ^ b.x,
        z: a.z ^ b.z,
    };
    // (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}
    let swap = 2 * (a.z & b.x).count_ones() as i64;
    let k = a.y_count() + b.y_count() - c.y_count() + swap;
    (i_pow(k), c)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .ops()
            .into_iter()
            .map(|(q, p)| format!("{p:?}{q}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "I" || s.is_empty() {
            return Ok(PauliString::IDENTITY);
        }
        let mut ops = Vec::new();
        for tok in s.split_whitespace() {
            let (head, tail) = tok.split_at(1);
            let p = match head {
                "X" => Pauli::X,
                "Y" => Pauli::Y,
                "Z" => Pauli::Z,
                _ => return Err(Error::Invalid(format!("bad Pauli factor '{tok}'"))),
            };
            let q: usize = tail
                .parse()
                .map_err(|_| Error::Invalid(format!("bad qubit index in '{tok}'")))?;
            if q >= 64 {
                return Err(Error::Invalid(format!("qubit index {q} too large")));
            }
            ops.push((q, p));
        }
        Ok(PauliString::from_ops(&ops))
    }
}

/// Weighted sum of Pauli strings over `n_qubits` qubits.
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    n_qubits: usize,
    terms: HashMap<PauliString, Complex64, FixedState>,
}

impl PartialEq for PauliSum {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.terms == other.terms
    }
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: HashMap::default(),
        }
    }

    pub fn term(n_qubits: usize, p: PauliString, coeff: impl Into<Complex64>) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(p, coeff.into());
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: PauliString, coeff: Complex64) {
        if let Some(q) = p.max_qubit() {
            assert!(q < self.n_qubits, "qubit {q} out of range for {} qubits", self.n_qubits);
        }
        *self.terms.entry(p).or_default() += coeff;
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    /// Terms sorted by Pauli string.
    pub fn sorted_terms(&self) -> Vec<(PauliString, Complex64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(p, c)| (*p, *c)).collect();
        v.sort_by_key(|(p, _)| (p.weight(), *p));
        v
    }

    pub fn simplify(mut self, threshold: f64) -> Self {
        self.terms.retain(|_, c| c.norm() >= threshold);
        self
    }

    pub fn scale(mut self, factor: impl Into<Complex64>) -> Self {
        let f = factor.into();
        self.terms.values_mut().for_each(|c| *c *= f);
        self
    }

    /// Largest imaginary part of any coefficient.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Dense `2^n x 2^n` matrix, little-endian (qubit 0 = least significant
    /// bit of the row/column index).
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.n_qubits;
        assert!(n <= 14, "dense Pauli matrix limited to 14 qubits");
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for col in 0..dim {
                let (phase, row) = p.apply_to_basis(col as u64);
                m[(row as usize, col)] += c * phase;
            }
        }
        m
    }

    /// One term per line: `<re> <im> <string>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in self.sorted_terms() {
            out.push_str(&format!("{:.17e} {:.17e} {}\n", c.re, c.im, p));
        }
        out
    }

    pub fn from_text(text: &str, n_qubits: usize) -> Result<Self> {
        let mut sum = PauliSum::zero(n_qubits);
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.splitn(3, char::is_whitespace);
            let bad = |msg: &str| Error::Parse {
                line: n + 1,
                msg: msg.to_string(),
            };
            let re: f64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad real part"))?;
            let im: f64 = it
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| bad("bad imaginary part"))?;
            let p: PauliString = it.next().unwrap_or("I").parse().map_err(|e: Error| bad(&e.to_string()))?;
            if p.max_qubit().is_some_and(|q| q >= n_qubits) {
                return Err(bad("qubit index out of range"));
            }
            sum.add_term(p, Complex64::new(re, im));
        }
        Ok(sum)
    }
}

impl Add for PauliSum {
    type Output = PauliSum;
    fn add(mut self, rhs: PauliSum) -> PauliSum {
        self.n_qubits = self.n_qubits.max(rhs.n_qubits);
        for (p, c) in rhs.terms {
            *self.terms.entry(p).or_default() += c;
        }
        self
    }
}

impl Sub for PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: PauliSum) -> PauliSum {
        self + rhs.scale(-1.0)
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits.max(rhs.n_qubits));
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                let (phase, p) = pauli_multiply(pa, pb);
                *out.terms.entry(p).or_default() += ca * cb * phase;
            }
        }
        out
    }
}

/// Image of a single ladder operator:
/// `a+_j = 1/2 (X_j - i Y_j) Z_{j-1} ... Z_0`,
/// `a_j  = 1/2 (X_j + i Y_j) Z_{j-1} ... Z_0`.
fn ladder_image(l: Ladder, n_qubits: usize) -> PauliSum {
    let j = l.mode as usize;
    let zs = (1u64 << j) - 1;
    let x = PauliString { x: 1 << j, z: zs };
    let y = PauliString {
        x: 1 << j,
        z: zs | (1 << j),
    };
    let sign = if l.dagger { -1.0 } else { 1.0 };
    let mut s = PauliSum::zero(n_qubits);
    s.add_term(x, Complex64::new(0.5, 0.0));
    s.add_term(y, Complex64::new(0.0, 0.5 * sign));
    s
}

/// Jordan-Wigner image of a fermion operator; qubit `k` is spin orbital `k`.
pub fn jordan_wigner(op: &FermionOperator) -> PauliSum {
    let n = op.n_modes();
    let images: Vec<PauliSum> = (0..n)
        .flat_map(|m| [ladder_image(Ladder::annihilate(m), n), ladder_image(Ladder::create(m), n)])
        .collect();
    let image = |l: &Ladder| &images[2 * l.mode as usize + l.dagger as usize];
    let mut out = PauliSum::zero(n);
    for (string, c) in op.sorted_terms() {
        let mut acc = PauliSum::term(n, PauliString::IDENTITY, c);
        for l in &string {
            acc = &acc * image(l);
        }
        out = out + acc;
    }
    out.simplify(PAULI_PRUNE_THRESHOLD)
}
