//! Cluster amplitudes: closed-form MP2 doubles, an iterative spin-orbital
//! CCSD solver with DIIS, and the internal/external split used for
//! downfolding.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, Array4};

use crate::error::{Error, Result};
use crate::fermion::{fock_matrix, ActiveSpace, Determinant};
use crate::integrals::SpinIntegralSet;

/// Smallest orbital-energy denominator accepted by default (Hartree).
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-8;
pub const DEFAULT_CCSD_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_CCSD_MAX_ITER: usize = 200;
const DIIS_SUBSPACE: usize = 6;

fn spin_label(p: usize) -> String {
    format!("{}{}", p / 2 + 1, if p % 2 == 0 { 'α' } else { 'β' })
}

/// `T1 = sum t_ia a+_a a_i` and `T2 = sum_{i<j, a<b} t_ijab a+_a a+_b a_j a_i`
/// over spin orbitals. Doubles are stored once in canonical order
/// (`i < j`, `a < b`); the accessor applies antisymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAmplitudes {
    n_spin_orbitals: usize,
    occupied: Vec<usize>,
    virtuals: Vec<usize>,
    t1: BTreeMap<(usize, usize), f64>,
    t2: BTreeMap<(usize, usize, usize, usize), f64>,
}

impl ClusterAmplitudes {
    pub fn new(n_spin_orbitals: usize, reference: Determinant) -> Self {
        let occupied: Vec<usize> = (0..n_spin_orbitals).filter(|&p| reference.is_occupied(p)).collect();
        let virtuals = (0..n_spin_orbitals).filter(|&p| !reference.is_occupied(p)).collect();
        Self {
            n_spin_orbitals,
            occupied,
            virtuals,
            t1: BTreeMap::new(),
            t2: BTreeMap::new(),
        }
    }

    fn empty_like(&self) -> Self {
        Self {
            n_spin_orbitals: self.n_spin_orbitals,
            occupied: self.occupied.clone(),
            virtuals: self.virtuals.clone(),
            t1: BTreeMap::new(),
            t2: BTreeMap::new(),
        }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.n_spin_orbitals
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn virtuals(&self) -> &[usize] {
        &self.virtuals
    }

    pub fn reference(&self) -> Determinant {
        Determinant::from_occupied(self.occupied.iter().copied())
    }

    fn check(&self, occ: &[usize], vir: &[usize]) -> Result<()> {
        for &p in occ {
            if !self.occupied.contains(&p) {
                return Err(Error::Invalid(format!("spin orbital {p} is not occupied")));
            }
        }
        for &p in vir {
            if !self.virtuals.contains(&p) {
                return Err(Error::Invalid(format!("spin orbital {p} is not virtual")));
            }
        }
        Ok(())
    }

    pub fn set_t1(&mut self, i: usize, a: usize, value: f64) -> Result<()> {
        self.check(&[i], &[a])?;
        self.t1.insert((i, a), value);
        Ok(())
    }

    /// Store `t_ijab`, canonicalizing the index order with the matching sign.
    pub fn set_t2(&mut self, i: usize, j: usize, a: usize, b: usize, value: f64) -> Result<()> {
        self.check(&[i, j], &[a, b])?;
        if i == j || a == b {
            return Err(Error::Invalid(format!("repeated index in double ({i},{j},{a},{b})")));
        }
        let (sign, key) = canonical_double(i, j, a, b);
        self.t2.insert(key, sign * value);
        Ok(())
    }

    pub fn t1(&self, i: usize, a: usize) -> f64 {
        self.t1.get(&(i, a)).copied().unwrap_or(0.0)
    }

    /// Antisymmetric accessor: `t(i,j,a,b) = -t(j,i,a,b) = -t(i,j,b,a)`.
    pub fn t2(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        if i == j || a == b {
            return 0.0;
        }
        let (sign, key) = canonical_double(i, j, a, b);
        sign * self.t2.get(&key).copied().unwrap_or(0.0)
    }

    pub fn singles(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.t1.iter().map(|(k, v)| (*k, *v))
    }

    pub fn doubles(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), f64)> + '_ {
        self.t2.iter().map(|(k, v)| (*k, *v))
    }

    pub fn n_singles(&self) -> usize {
        self.t1.len()
    }

    pub fn n_doubles(&self) -> usize {
        self.t2.len()
    }

    pub fn len(&self) -> usize {
        self.t1.len() + self.t2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Union of two amplitude sets over the same orbital partition; entries
    /// present in both are summed.
    pub fn merged(&self, other: &ClusterAmplitudes) -> ClusterAmplitudes {
        let mut out = self.clone();
        for (k, v) in other.singles() {
            *out.t1.entry(k).or_default() += v;
        }
        for (k, v) in other.doubles() {
            *out.t2.entry(k).or_default() += v;
        }
        out
    }

    /// `sum f_ia t_ia + sum_{i<j,a<b} <ij||ab> (t_ijab + t_ia t_jb - t_ib t_ja)`.
    pub fn energy(&self, ints: &SpinIntegralSet) -> f64 {
        let f = fock_matrix(ints, self.reference());
        let mut e = 0.0;
        for ((i, a), t) in self.singles() {
            e += f[[i, a]] * t;
        }
        for &i in &self.occupied {
            for &j in self.occupied.iter().filter(|&&j| j > i) {
                for &a in &self.virtuals {
                    for &b in self.virtuals.iter().filter(|&&b| b > a) {
                        let tau = self.t2(i, j, a, b) + self.t1(i, a) * self.t1(j, b) - self.t1(i, b) * self.t1(j, a);
                        e += ints.h2[[i, j, a, b]] * tau;
                    }
                }
            }
        }
        e
    }

    /// Line format: `T1 i a value` and `T2 i j a b value`, 0-based spin
    /// orbitals, preceded by a comment header describing the partition.
    pub fn to_text(&self) -> String {
        let occ: Vec<String> = self.occupied.iter().map(|p| p.to_string()).collect();
        let mut out = format!("# nso={} occupied={}\n", self.n_spin_orbitals, occ.join(","));
        for ((i, a), v) in self.singles() {
            writeln!(out, "T1 {i} {a} {v:.17e}").unwrap();
        }
        for ((i, j, a, b), v) in self.doubles() {
            writeln!(out, "T2 {i} {j} {a} {b} {v:.17e}").unwrap();
        }
        out
    }

    /// Parse the line format for a system of `n_spin_orbitals` with the
    /// given reference determinant.
    pub fn from_text(text: &str, n_spin_orbitals: usize, reference: Determinant) -> Result<Self> {
        let mut t = ClusterAmplitudes::new(n_spin_orbitals, reference);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: n + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let idx = |s: &str| -> Result<usize> {
                let p: usize = s.parse().map_err(|_| bad(format!("bad index '{s}'")))?;
                if p >= n_spin_orbitals {
                    return Err(bad(format!("index {p} out of range")));
                }
                Ok(p)
            };
            let val = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad value '{s}'")));
            match toks.as_slice() {
                ["T1", i, a, v] => t.set_t1(idx(i)?, idx(a)?, val(v)?).map_err(|e| bad(e.to_string()))?,
                ["T2", i, j, a, b, v] => t
                    .set_t2(idx(i)?, idx(j)?, idx(a)?, idx(b)?, val(v)?)
                    .map_err(|e| bad(e.to_string()))?,
                _ => return Err(bad(format!("unrecognized line '{line}'"))),
            }
        }
        Ok(t)
    }
}

/// Amplitudes split by whether every virtual index is an active virtual.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudePartition {
    pub internal: ClusterAmplitudes,
    pub external: ClusterAmplitudes,
}

impl AmplitudePartition {
    pub fn recombine(&self) -> ClusterAmplitudes {
        self.internal.merged(&self.external)
    }
}

pub fn partition(t: &ClusterAmplitudes, space: &ActiveSpace) -> AmplitudePartition {
    let mut internal = t.empty_like();
    let mut external = t.empty_like();
    let act = |p: usize| space.is_active_virtual_spin_orbital(p);
    for (k, v) in t.singles() {
        let dest = if act(k.1) { &mut internal } else { &mut external };
        dest.t1.insert(k, v);
    }
    for (k, v) in t.doubles() {
        let dest = if act(k.2) && act(k.3) { &mut internal } else { &mut external };
        dest.t2.insert(k, v);
    }
    AmplitudePartition { internal, external }
}

/// Drop doubles with `|t2| < threshold`; singles are always kept.
pub fn screen(t: &ClusterAmplitudes, threshold: f64) -> ClusterAmplitudes {
    let mut out = t.clone();
    out.t2.retain(|_, v| v.abs() >= threshold);
    out
}

/// The `k` largest amplitudes by magnitude with labels like
/// `1α 1β -> 2α 2β`; ties are broken by label.
pub fn top_amplitudes(t: &ClusterAmplitudes, k: usize) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = t
        .singles()
        .map(|((i, a), v)| (format!("{} -> {}", spin_label(i), spin_label(a)), v))
        .chain(t.doubles().map(|((i, j, a, b), v)| {
            (format!("{} {} -> {} {}", spin_label(i), spin_label(j), spin_label(a), spin_label(b)), v)
        }))
        .collect();
    all.sort_by(|x, y| y.1.abs().total_cmp(&x.1.abs()).then_with(|| x.0.cmp(&y.0)));
    all.truncate(k);
    all
}

fn canonical_double(i: usize, j: usize, a: usize, b: usize) -> (f64, (usize, usize, usize, usize)) {
    let mut sign = 1.0;
    let (i, j) = if i < j { (i, j) } else { sign = -sign; (j, i) };
    let (a, b) = if a < b { (a, b) } else { sign = -sign; (b, a) };
    (sign, (i, j, a, b))
}

fn spin_allowed_double(i: usize, j: usize, a: usize, b: usize) -> bool {
    (i % 2 == 0) as u8 + (j % 2 == 0) as u8 == (a % 2 == 0) as u8 + (b % 2 == 0) as u8
}

/// `t_ijab = <ij||ab> / (e_i + e_j - e_a - e_b)` with orbital energies from
/// the Fock diagonal; `t1 = 0`.
pub fn mp2_amplitudes(ints: &SpinIntegralSet, reference: Determinant) -> Result<ClusterAmplitudes> {
    mp2_amplitudes_with_floor(ints, reference, DEFAULT_DENOMINATOR_FLOOR)
}

pub fn mp2_amplitudes_with_floor(ints: &SpinIntegralSet, reference: Determinant, floor: f64) -> Result<ClusterAmplitudes> {
    let f = fock_matrix(ints, reference);
    let mut t = ClusterAmplitudes::new(ints.n_spin_orbitals(), reference);
    let (occ, vir) = (t.occupied.clone(), t.virtuals.clone());
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in vir.iter().enumerate() {
                for &b in &vir[y + 1..] {
                    if !spin_allowed_double(i, j, a, b) {
                        continue;
                    }
                    let d = f[[i, i]] + f[[j, j]] - f[[a, a]] - f[[b, b]];
                    if d.abs() < floor {
                        return Err(Error::DegenerateDenominator {
                            excitation: format!("({i},{j})->({a},{b})"),
                            value: d,
                        });
                    }
                    t.t2.insert((i, j, a, b), ints.h2[[i, j, a, b]] / d);
                }
            }
        }
    }
    Ok(t)
}

/// Correlation energy of a pure-doubles amplitude set: `sum_{i<j,a<b}
/// t_ijab <ij||ab>` (the MP2 energy for MP2 amplitudes).
pub fn mp2_energy(t: &ClusterAmplitudes, ints: &SpinIntegralSet) -> f64 {
    t.doubles().map(|((i, j, a, b), v)| v * ints.h2[[i, j, a, b]]).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CcsdResult {
    pub amplitudes: ClusterAmplitudes,
    pub correlation_energy: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Spin-orbital CCSD (Stanton-Gauss intermediates, off-diagonal Fock terms
/// included) solved by Jacobi steps with DIIS extrapolation. Converged when
/// the max-norm of the projected residual is at most `tol`.
pub fn ccsd_solve(ints: &SpinIntegralSet, reference: Determinant, tol: f64, max_iter: usize) -> Result<CcsdResult> {
    let n = ints.n_spin_orbitals();
    let mut out = ClusterAmplitudes::new(n, reference);
    let perm: Vec<usize> = out.occupied.iter().chain(&out.virtuals).copied().collect();
    let (no, nv) = (out.occupied.len(), out.virtuals.len());
    let fock = fock_matrix(ints, reference);
    let f = Array2::from_shape_fn((n, n), |(p, q)| fock[[perm[p], perm[q]]]);
    let w = Array4::from_shape_fn((n, n, n, n), |(p, q, r, s)| ints.h2[[perm[p], perm[q], perm[r], perm[s]]]);
    let sys = CcSystem { f, w, no, nv };

    let d1 = Array2::from_shape_fn((no, nv), |(i, a)| sys.f[[i, i]] - sys.f[[no + a, no + a]]);
    let d2 = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
        sys.f[[i, i]] + sys.f[[j, j]] - sys.f[[no + a, no + a]] - sys.f[[no + b, no + b]]
    });
    for ((i, a), &d) in d1.indexed_iter() {
        if d.abs() < DEFAULT_DENOMINATOR_FLOOR {
            return Err(Error::DegenerateDenominator {
                excitation: format!("{}->{}", perm[i], perm[no + a]),
                value: d,
            });
        }
    }
    for ((i, j, a, b), &d) in d2.indexed_iter() {
        if i != j && a != b && d.abs() < DEFAULT_DENOMINATOR_FLOOR {
            return Err(Error::DegenerateDenominator {
                excitation: format!("({},{})->({},{})", perm[i], perm[j], perm[no + a], perm[no + b]),
                value: d,
            });
        }
    }
    let safe = |d: f64| if d.abs() < DEFAULT_DENOMINATOR_FLOOR { 1.0 } else { d };

    let mut t1 = Array2::<f64>::zeros((no, nv));
    let mut t2 = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| sys.w[[i, j, no + a, no + b]] / safe(d2[[i, j, a, b]]));
    let mut diis = Diis::new(DIIS_SUBSPACE);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let (r1, r2) = sys.rhs(&t1, &t2);
        let res1 = &r1 - &(&d1 * &t1);
        let res2 = &r2 - &(&d2 * &t2);
        residual = res1.iter().chain(res2.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        if residual <= tol {
            break;
        }
        let new1 = Array2::from_shape_fn((no, nv), |(i, a)| r1[[i, a]] / safe(d1[[i, a]]));
        let new2 = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| r2[[i, j, a, b]] / safe(d2[[i, j, a, b]]));
        let flat: Vec<f64> = new1.iter().chain(new2.iter()).copied().collect();
        let err: Vec<f64> = flat.iter().zip(t1.iter().chain(t2.iter())).map(|(a, b)| a - b).collect();
        let next = diis.extrapolate(flat, err);
        t1 = Array2::from_shape_vec((no, nv), next[..no * nv].to_vec()).expect("t1 shape");
        t2 = Array4::from_shape_vec((no, no, nv, nv), next[no * nv..].to_vec()).expect("t2 shape");
    }
    if residual > tol {
        return Err(Error::NotConverged { iterations, residual });
    }

    for i in 0..no {
        for a in 0..nv {
            let (pi, pa) = (perm[i], perm[no + a]);
            if pi % 2 == pa % 2 {
                out.t1.insert((pi, pa), t1[[i, a]]);
            }
        }
    }
    for i in 0..no {
        for j in i + 1..no {
            for a in 0..nv {
                for b in a + 1..nv {
                    let (pi, pj, pa, pb) = (perm[i], perm[j], perm[no + a], perm[no + b]);
                    if spin_allowed_double(pi, pj, pa, pb) {
                        // occupied and virtual blocks keep ascending order, so
                        // (pi, pj, pa, pb) is already canonical
                        out.t2.insert((pi, pj, pa, pb), t2[[i, j, a, b]]);
                    }
                }
            }
        }
    }
    let correlation_energy = out.energy(ints);
    Ok(CcsdResult {
        amplitudes: out,
        correlation_energy,
        iterations,
        residual,
    })
}

/// Fock matrix and antisymmetrized integrals with occupied orbitals first.
struct CcSystem {
    f: Array2<f64>,
    w: Array4<f64>,
    no: usize,
    nv: usize,
}

impl CcSystem {
    /// Right-hand sides of `D1 t1 = rhs1`, `D2 t2 = rhs2`.
    fn rhs(&self, t1: &Array2<f64>, t2: &Array4<f64>) -> (Array2<f64>, Array4<f64>) {
        let (no, nv, f, w) = (self.no, self.nv, &self.f, &self.w);
        let v = |a: usize| no + a;
        let tau_t = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            t2[[i, j, a, b]] + 0.5 * (t1[[i, a]] * t1[[j, b]] - t1[[i, b]] * t1[[j, a]])
        });
        let tau = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            t2[[i, j, a, b]] + t1[[i, a]] * t1[[j, b]] - t1[[i, b]] * t1[[j, a]]
        });

        let fae = Array2::from_shape_fn((nv, nv), |(a, e)| {
            let mut s = if a == e { 0.0 } else { f[[v(a), v(e)]] };
            for m in 0..no {
                s -= 0.5 * f[[m, v(e)]] * t1[[m, a]];
                for ff in 0..nv {
                    s += t1[[m, ff]] * w[[m, v(a), v(ff), v(e)]];
                    for nn in 0..no {
                        s -= 0.5 * tau_t[[m, nn, a, ff]] * w[[m, nn, v(e), v(ff)]];
                    }
                }
            }
            s
        });
        let fmi = Array2::from_shape_fn((no, no), |(m, i)| {
            let mut s = if m == i { 0.0 } else { f[[m, i]] };
            for e in 0..nv {
                s += 0.5 * t1[[i, e]] * f[[m, v(e)]];
                for nn in 0..no {
                    s += t1[[nn, e]] * w[[m, nn, i, v(e)]];
                    for ff in 0..nv {
                        s += 0.5 * tau_t[[i, nn, e, ff]] * w[[m, nn, v(e), v(ff)]];
                    }
                }
            }
            s
        });
        let fme = Array2::from_shape_fn((no, nv), |(m, e)| {
            let mut s = f[[m, v(e)]];
            for nn in 0..no {
                for ff in 0..nv {
                    s += t1[[nn, ff]] * w[[m, nn, v(e), v(ff)]];
                }
            }
            s
        });
        let wmnij = Array4::from_shape_fn((no, no, no, no), |(m, nn, i, j)| {
            let mut s = w[[m, nn, i, j]];
            for e in 0..nv {
                s += t1[[j, e]] * w[[m, nn, i, v(e)]] - t1[[i, e]] * w[[m, nn, j, v(e)]];
                for ff in 0..nv {
                    s += 0.25 * tau[[i, j, e, ff]] * w[[m, nn, v(e), v(ff)]];
                }
            }
            s
        });
        let wabef = Array4::from_shape_fn((nv, nv, nv, nv), |(a, b, e, ff)| {
            let mut s = w[[v(a), v(b), v(e), v(ff)]];
            for m in 0..no {
                s -= t1[[m, b]] * w[[v(a), m, v(e), v(ff)]] - t1[[m, a]] * w[[v(b), m, v(e), v(ff)]];
                for nn in 0..no {
                    s += 0.25 * tau[[m, nn, a, b]] * w[[m, nn, v(e), v(ff)]];
                }
            }
            s
        });
        let wmbej = Array4::from_shape_fn((no, nv, nv, no), |(m, b, e, j)| {
            let mut s = w[[m, v(b), v(e), j]];
            for ff in 0..nv {
                s += t1[[j, ff]] * w[[m, v(b), v(e), v(ff)]];
            }
            for nn in 0..no {
                s -= t1[[nn, b]] * w[[m, nn, v(e), j]];
                for ff in 0..nv {
                    s -= (0.5 * t2[[j, nn, ff, b]] + t1[[j, ff]] * t1[[nn, b]]) * w[[m, nn, v(e), v(ff)]];
                }
            }
            s
        });

        let r1 = Array2::from_shape_fn((no, nv), |(i, a)| {
            let mut s = f[[i, v(a)]];
            for e in 0..nv {
                s += t1[[i, e]] * fae[[a, e]];
            }
            for m in 0..no {
                s -= t1[[m, a]] * fmi[[m, i]];
                for e in 0..nv {
                    s += t2[[i, m, a, e]] * fme[[m, e]];
                    s -= t1[[m, e]] * w[[m, v(a), i, v(e)]];
                    for ff in 0..nv {
                        s -= 0.5 * t2[[i, m, e, ff]] * w[[m, v(a), v(e), v(ff)]];
                    }
                    for nn in 0..no {
                        s -= 0.5 * t2[[m, nn, a, e]] * w[[nn, m, v(e), i]];
                    }
                }
            }
            s
        });

        let x = Array2::from_shape_fn((nv, nv), |(b, e)| {
            fae[[b, e]] - 0.5 * (0..no).map(|m| t1[[m, b]] * fme[[m, e]]).sum::<f64>()
        });
        let y = Array2::from_shape_fn((no, no), |(m, j)| {
            fmi[[m, j]] + 0.5 * (0..nv).map(|e| t1[[j, e]] * fme[[m, e]]).sum::<f64>()
        });
        let pa = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            (0..nv).map(|e| t2[[i, j, a, e]] * x[[b, e]]).sum::<f64>()
        });
        let pb = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            (0..no).map(|m| t2[[i, m, a, b]] * y[[m, j]]).sum::<f64>()
        });
        let pc = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            let mut s = 0.0;
            for m in 0..no {
                for e in 0..nv {
                    s += t2[[i, m, a, e]] * wmbej[[m, b, e, j]] - t1[[i, e]] * t1[[m, a]] * w[[m, v(b), v(e), j]];
                }
            }
            s
        });
        let pd = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            (0..nv).map(|e| t1[[i, e]] * w[[v(a), v(b), v(e), j]]).sum::<f64>()
        });
        let pe = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            (0..no).map(|m| t1[[m, a]] * w[[m, v(b), i, j]]).sum::<f64>()
        });

        let r2 = Array4::from_shape_fn((no, no, nv, nv), |(i, j, a, b)| {
            if i == j || a == b {
                return 0.0;
            }
            let mut s = w[[i, j, v(a), v(b)]];
            s += pa[[i, j, a, b]] - pa[[i, j, b, a]];
            s -= pb[[i, j, a, b]] - pb[[j, i, a, b]];
            for m in 0..no {
                for nn in 0..no {
                    s += 0.5 * tau[[m, nn, a, b]] * wmnij[[m, nn, i, j]];
                }
            }
            for e in 0..nv {
                for ff in 0..nv {
                    s += 0.5 * tau[[i, j, e, ff]] * wabef[[a, b, e, ff]];
                }
            }
            s += pc[[i, j, a, b]] - pc[[j, i, a, b]] - pc[[i, j, b, a]] + pc[[j, i, b, a]];
            s += pd[[i, j, a, b]] - pd[[j, i, a, b]];
            s -= pe[[i, j, a, b]] - pe[[i, j, b, a]];
            s
        });
        (r1, r2)
    }
}

/// Pulay extrapolation over the most recent iterates.
struct Diis {
    size: usize,
    vectors: Vec<Vec<f64>>,
    errors: Vec<Vec<f64>>,
}

impl Diis {
    fn new(size: usize) -> Self {
        Self {
            size,
            vectors: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn extrapolate(&mut self, vector: Vec<f64>, error: Vec<f64>) -> Vec<f64> {
        if self.vectors.len() == self.size {
            self.vectors.remove(0);
            self.errors.remove(0);
        }
        self.vectors.push(vector);
        self.errors.push(error);
        let m = self.vectors.len();
        if m < 2 {
            return self.vectors[m - 1].clone();
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut b = DMatrix::<f64>::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] = dot(&self.errors[i], &self.errors[j]);
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = DVector::<f64>::zeros(m + 1);
        rhs[m] = -1.0;
        match b.lu().solve(&rhs) {
            Some(c) if c.iter().all(|v| v.is_finite()) => {
                let len = self.vectors[0].len();
                (0..len).map(|k| (0..m).map(|i| c[i] * self.vectors[i][k]).sum()).collect()
            }
            _ => self.vectors[m - 1].clone(),
        }
    }
}
