//! One- and two-electron integrals over spatial orbitals, their spin-orbital
//! expansion, and the FCIDUMP-style text format used to move them around.
//!
//! Spatial integrals are stored with 1-based indices in chemists' (Mulliken)
//! order `(ij|kl)`. Only the symmetry group
//! `(i|j) = (j|i)` and `(ij|kl) = (ji|lk) = (kl|ij) = (lk|ji)` is applied:
//! dressed integrals do not in general have the full 8-fold symmetry of bare
//! real integrals.
//!
//! Spin orbitals are interleaved: spatial orbital `p` (1-based) maps to
//! spin orbital `2(p-1)` for alpha and `2(p-1)+1` for beta.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, Array4};

use crate::error::{Error, Result};

/// Tolerance used to decide whether two entries for the same canonical tuple
/// conflict.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Names of the bundled H2 DUCC fixtures.
pub const FIXTURE_NAMES: [&str; 4] = [
    "h2_ducc_0.8",
    "h2_ducc_1.4008",
    "h2_ducc_4.0",
    "h2_ducc_10.0",
];

const FIXTURE_SOURCES: [(&str, &str); 4] = [
    ("h2_ducc_0.8", include_str!("../data/h2_ducc_0.8.fcidump")),
    ("h2_ducc_1.4008", include_str!("../data/h2_ducc_1.4008.fcidump")),
    ("h2_ducc_4.0", include_str!("../data/h2_ducc_4.0.fcidump")),
    ("h2_ducc_10.0", include_str!("../data/h2_ducc_10.0.fcidump")),
];

/// Spatial-orbital integrals (bare or dressed).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    n_orbitals: usize,
    h1: BTreeMap<(usize, usize), f64>,
    h2: BTreeMap<[usize; 4], f64>,
    scalar_shift: Option<f64>,
    n_electrons: Option<usize>,
    ms2: Option<i32>,
    pub label: String,
}

fn canonical_h1(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Lexicographically smallest member of the 4-element symmetry orbit.
pub fn canonical_h2(t: [usize; 4]) -> [usize; 4] {
    let [i, j, k, l] = t;
    let orbit = [[i, j, k, l], [j, i, l, k], [k, l, i, j], [l, k, j, i]];
    *orbit.iter().min().unwrap()
}

impl IntegralSet {
    /// An all-zero integral set over `n_orbitals` spatial orbitals.
    pub fn new(n_orbitals: usize) -> Self {
        Self {
            n_orbitals,
            h1: BTreeMap::new(),
            h2: BTreeMap::new(),
            scalar_shift: None,
            n_electrons: None,
            ms2: None,
            label: String::new(),
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn scalar_shift(&self) -> Option<f64> {
        self.scalar_shift
    }

    pub fn set_scalar_shift(&mut self, value: Option<f64>) {
        self.scalar_shift = value;
    }

    /// Electron count declared in the file header, if any.
    pub fn n_electrons(&self) -> Option<usize> {
        self.n_electrons
    }

    /// `2 Sz` declared in the file header, if any.
    pub fn ms2(&self) -> Option<i32> {
        self.ms2
    }

    pub fn set_sector(&mut self, n_electrons: Option<usize>, ms2: Option<i32>) {
        self.n_electrons = n_electrons;
        self.ms2 = ms2;
    }

    fn check_index(&self, idx: usize) -> Result<()> {
        if idx == 0 || idx > self.n_orbitals {
            return Err(Error::IndexOutOfRange {
                index: idx,
                n: self.n_orbitals,
            });
        }
        Ok(())
    }

    /// Store `(i|j)`. A second store of the same canonical pair must agree
    /// within [`DUPLICATE_TOLERANCE`].
    pub fn insert_h1(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        let key = canonical_h1(i, j);
        if let Some(&old) = self.h1.get(&key) {
            if (old - value).abs() > DUPLICATE_TOLERANCE {
                return Err(Error::ConflictingDuplicate {
                    tuple: vec![key.0, key.1],
                    first: old,
                    second: value,
                });
            }
            return Ok(());
        }
        self.h1.insert(key, value);
        Ok(())
    }

    /// Store `(ij|kl)`.
    pub fn insert_h2(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) -> Result<()> {
        for idx in [i, j, k, l] {
            self.check_index(idx)?;
        }
        let key = canonical_h2([i, j, k, l]);
        if let Some(&old) = self.h2.get(&key) {
            if (old - value).abs() > DUPLICATE_TOLERANCE {
                return Err(Error::ConflictingDuplicate {
                    tuple: key.to_vec(),
                    first: old,
                    second: value,
                });
            }
            return Ok(());
        }
        self.h2.insert(key, value);
        Ok(())
    }

    /// `(i|j)`, 1-based. Indices outside the declared range read as zero.
    pub fn h1(&self, i: usize, j: usize) -> f64 {
        self.h1.get(&canonical_h1(i, j)).copied().unwrap_or(0.0)
    }

    /// `(ij|kl)`, 1-based, chemists' order.
    pub fn h2(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.h2
            .get(&canonical_h2([i, j, k, l]))
            .copied()
            .unwrap_or(0.0)
    }

    /// Stored (canonical) one-body entries.
    pub fn h1_entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.h1.iter().map(|(&k, &v)| (k, v))
    }

    /// Stored (canonical) two-body entries.
    pub fn h2_entries(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        self.h2.iter().map(|(&k, &v)| (k, v))
    }

    /// Keep only the listed spatial orbitals (1-based, any order), renumbered
    /// 1.. in ascending order of the original index.
    pub fn restrict(&self, orbitals: &[usize]) -> Result<IntegralSet> {
        let mut keep: Vec<usize> = orbitals.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &o in &keep {
            self.check_index(o)?;
        }
        let map: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n + 1)).collect();
        let mut out = IntegralSet::new(keep.len());
        out.scalar_shift = self.scalar_shift;
        out.n_electrons = self.n_electrons;
        out.ms2 = self.ms2;
        out.label = format!("{} restricted to {:?}", self.label, keep);
        for (&(i, j), &v) in &self.h1 {
            if let (Some(&a), Some(&b)) = (map.get(&i), map.get(&j)) {
                out.insert_h1(a, b, v)?;
            }
        }
        for (&[i, j, k, l], &v) in &self.h2 {
            if let (Some(&a), Some(&b), Some(&c), Some(&d)) =
                (map.get(&i), map.get(&j), map.get(&k), map.get(&l))
            {
                out.insert_h2(a, b, c, d, v)?;
            }
        }
        Ok(out)
    }

    /// Expand to spin orbitals (interleaved alpha/beta).
    pub fn to_spin_orbital(&self) -> SpinIntegralSet {
        let n = self.n_orbitals;
        let nso = 2 * n;
        let mut h1 = Array2::<f64>::zeros((nso, nso));
        for p in 0..nso {
            for q in 0..nso {
                if p % 2 == q % 2 {
                    h1[[p, q]] = self.h1(p / 2 + 1, q / 2 + 1);
                }
            }
        }
        // <pq|rs> = (pr|qs) with spin(p) = spin(r), spin(q) = spin(s)
        let coulomb = |p: usize, q: usize, r: usize, s: usize| -> f64 {
            if p % 2 == r % 2 && q % 2 == s % 2 {
                self.h2(p / 2 + 1, r / 2 + 1, q / 2 + 1, s / 2 + 1)
            } else {
                0.0
            }
        };
        let mut h2 = Array4::<f64>::zeros((nso, nso, nso, nso));
        for p in 0..nso {
            for q in 0..nso {
                for r in 0..nso {
                    for s in 0..nso {
                        h2[[p, q, r, s]] = coulomb(p, q, r, s) - coulomb(p, q, s, r);
                    }
                }
            }
        }
        SpinIntegralSet {
            h1,
            h2,
            scalar: self.scalar_shift.unwrap_or(0.0),
            n_electrons: self.n_electrons,
            ms2: self.ms2,
        }
    }
}

/// Integrals over spin orbitals.
///
/// `h2[[p, q, r, s]]` holds the antisymmetrized physicists' integral
/// `<pq||rs>`, so that `H = scalar + sum h1[p,q] a+_p a_q
/// + 1/4 sum <pq||rs> a+_p a+_q a_s a_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinIntegralSet {
    pub h1: Array2<f64>,
    pub h2: Array4<f64>,
    pub scalar: f64,
    pub n_electrons: Option<usize>,
    pub ms2: Option<i32>,
}

impl SpinIntegralSet {
    pub fn zeros(n_spin_orbitals: usize) -> Self {
        let n = n_spin_orbitals;
        Self {
            h1: Array2::zeros((n, n)),
            h2: Array4::zeros((n, n, n, n)),
            scalar: 0.0,
            n_electrons: None,
            ms2: None,
        }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.h1.nrows()
    }

    /// Keep only the listed spin orbitals (0-based), renumbered in ascending
    /// order of the original index.
    pub fn restrict(&self, spin_orbitals: &[usize]) -> SpinIntegralSet {
        let mut keep = spin_orbitals.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let n = keep.len();
        let mut out = SpinIntegralSet::zeros(n);
        out.scalar = self.scalar;
        out.n_electrons = self.n_electrons;
        out.ms2 = self.ms2;
        for (a, &p) in keep.iter().enumerate() {
            for (b, &q) in keep.iter().enumerate() {
                out.h1[[a, b]] = self.h1[[p, q]];
                for (c, &r) in keep.iter().enumerate() {
                    for (d, &s) in keep.iter().enumerate() {
                        out.h2[[a, b, c, d]] = self.h2[[p, q, r, s]];
                    }
                }
            }
        }
        out
    }

    /// Largest deviation from `h1 = h1^T`, `<pq||rs> = <rs||pq>` and
    /// `<pq||rs> = -<qp||rs> = -<pq||sr>`.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.n_spin_orbitals();
        let mut err: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                err = err.max((self.h1[[p, q]] - self.h1[[q, p]]).abs());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2[[p, q, r, s]];
                        err = err
                            .max((v - self.h2[[r, s, p, q]]).abs())
                            .max((v + self.h2[[q, p, r, s]]).abs())
                            .max((v + self.h2[[p, q, s, r]]).abs());
                    }
                }
            }
        }
        err
    }
}

/// Either kind of integral file.
#[derive(Debug, Clone)]
pub enum Integrals {
    Spatial(IntegralSet),
    SpinResolved(SpinIntegralSet),
}

impl Integrals {
    pub fn to_spin_orbital(&self) -> SpinIntegralSet {
        match self {
            Integrals::Spatial(ints) => ints.to_spin_orbital(),
            Integrals::SpinResolved(ints) => ints.clone(),
        }
    }

    pub fn n_electrons(&self) -> Option<usize> {
        match self {
            Integrals::Spatial(ints) => ints.n_electrons(),
            Integrals::SpinResolved(ints) => ints.n_electrons,
        }
    }

    pub fn ms2(&self) -> Option<i32> {
        match self {
            Integrals::Spatial(ints) => ints.ms2(),
            Integrals::SpinResolved(ints) => ints.ms2,
        }
    }

    /// Number of spatial orbitals (spin-resolved files count pairs).
    pub fn n_orbitals(&self) -> usize {
        match self {
            Integrals::Spatial(ints) => ints.n_orbitals(),
            Integrals::SpinResolved(ints) => ints.n_spin_orbitals() / 2,
        }
    }
}

#[derive(Debug, Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
    spin_resolved: bool,
}

fn parse_header_tokens(header: &mut Header, text: &str, line: usize) -> Result<()> {
    let cleaned = text
        .replace("&FCI", " ")
        .replace("&fci", " ")
        .replace("&END", " ")
        .replace('/', " ")
        .replace(',', " ");
    for tok in cleaned.split_whitespace() {
        let Some((key, value)) = tok.split_once('=') else {
            continue;
        };
        let bad = |what: &str| Error::Parse {
            line,
            msg: format!("bad {what} value '{value}'"),
        };
        match key.to_ascii_uppercase().as_str() {
            "NORB" => header.norb = Some(value.parse().map_err(|_| bad("NORB"))?),
            "NELEC" => header.nelec = Some(value.parse().map_err(|_| bad("NELEC"))?),
            "MS2" => header.ms2 = Some(value.parse().map_err(|_| bad("MS2"))?),
            "UHF" => header.spin_resolved = value.to_ascii_uppercase().contains('T'),
            _ => {}
        }
    }
    Ok(())
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.replace(['D', 'd'], "e").parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("bad numeric value '{tok}'"),
    })
}

struct RawEntry {
    line: usize,
    idx: [usize; 4],
    value: f64,
}

fn parse_body(text: &str) -> Result<(Header, Vec<RawEntry>)> {
    let mut header = Header::default();
    let mut saw_header = false;
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let first_is_number = content
            .split_whitespace()
            .next()
            .map(|t| t.parse::<i64>().is_ok())
            .unwrap_or(false);
        if !first_is_number {
            if content.starts_with('&') || content.contains('=') || content == "/" {
                parse_header_tokens(&mut header, content, line)?;
                saw_header = true;
                continue;
            }
            return Err(Error::Parse {
                line,
                msg: format!("unrecognized line '{content}'"),
            });
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 'i j k l value', got {} fields", toks.len()),
            });
        }
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[..4]) {
            *slot = tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad index '{tok}'"),
            })?;
        }
        entries.push(RawEntry {
            line,
            idx,
            value: parse_value(toks[4], line)?,
        });
    }
    if !saw_header || header.norb.is_none() {
        return Err(Error::Parse {
            line: 1,
            msg: "missing '&FCI NORB=...' header".into(),
        });
    }
    Ok((header, entries))
}

fn with_line(err: Error, line: usize) -> Error {
    match err {
        Error::IndexOutOfRange { index, n } => Error::Parse {
            line,
            msg: format!("index {index} outside 1..={n}"),
        },
        other => other,
    }
}

/// Parse FCIDUMP-style text holding spatial-orbital integrals.
pub fn parse_fcidump(text: &str, label: &str) -> Result<IntegralSet> {
    match parse_integrals(text, label)? {
        Integrals::Spatial(ints) => Ok(ints),
        Integrals::SpinResolved(_) => Err(Error::Invalid(
            "spin-resolved (UHF=.TRUE.) file where spatial integrals were expected".into(),
        )),
    }
}

/// Parse either the spatial or the spin-resolved variant.
pub fn parse_integrals(text: &str, label: &str) -> Result<Integrals> {
    let (header, entries) = parse_body(text)?;
    let norb = header.norb.unwrap_or(0);
    if header.spin_resolved {
        return parse_spin_resolved(&header, &entries).map(Integrals::SpinResolved);
    }
    let mut ints = IntegralSet::new(norb);
    ints.label = label.to_string();
    ints.n_electrons = header.nelec;
    ints.ms2 = header.ms2;
    for e in &entries {
        let [i, j, k, l] = e.idx;
        let res = match (i, j, k, l) {
            (0, 0, 0, 0) => match ints.scalar_shift {
                Some(old) if (old - e.value).abs() > DUPLICATE_TOLERANCE => {
                    Err(Error::ConflictingDuplicate {
                        tuple: vec![0, 0, 0, 0],
                        first: old,
                        second: e.value,
                    })
                }
                _ => {
                    ints.scalar_shift = Some(e.value);
                    Ok(())
                }
            },
            (_, _, 0, 0) => ints.insert_h1(i, j, e.value),
            _ => ints.insert_h2(i, j, k, l, e.value),
        };
        res.map_err(|err| with_line(err, e.line))?;
    }
    Ok(Integrals::Spatial(ints))
}

fn parse_spin_resolved(header: &Header, entries: &[RawEntry]) -> Result<SpinIntegralSet> {
    let n = header.norb.unwrap_or(0);
    let mut out = SpinIntegralSet::zeros(n);
    out.n_electrons = header.nelec;
    out.ms2 = header.ms2;
    let mut seen1: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut seen2: BTreeMap<[usize; 4], f64> = BTreeMap::new();
    for e in entries {
        let [p, q, r, s] = e.idx;
        let check = |idx: usize| -> Result<()> {
            if idx == 0 || idx > n {
                Err(Error::Parse {
                    line: e.line,
                    msg: format!("index {idx} outside 1..={n}"),
                })
            } else {
                Ok(())
            }
        };
        if (p, q, r, s) == (0, 0, 0, 0) {
            out.scalar = e.value;
            continue;
        }
        if r == 0 && s == 0 {
            check(p)?;
            check(q)?;
            let key = (p.min(q), p.max(q));
            if let Some(&old) = seen1.get(&key) {
                if (old - e.value).abs() > DUPLICATE_TOLERANCE {
                    return Err(Error::ConflictingDuplicate {
                        tuple: vec![key.0, key.1],
                        first: old,
                        second: e.value,
                    });
                }
            }
            seen1.insert(key, e.value);
            out.h1[[p - 1, q - 1]] = e.value;
            out.h1[[q - 1, p - 1]] = e.value;
            continue;
        }
        for idx in [p, q, r, s] {
            check(idx)?;
        }
        // Antisymmetrized <PQ||RS>; expand the sign-permutation orbit and
        // the bra-ket swap.
        let (p, q, r, s) = (p - 1, q - 1, r - 1, s - 1);
        let orbit = [
            ([p, q, r, s], 1.0),
            ([q, p, r, s], -1.0),
            ([p, q, s, r], -1.0),
            ([q, p, s, r], 1.0),
            ([r, s, p, q], 1.0),
            ([s, r, p, q], -1.0),
            ([r, s, q, p], -1.0),
            ([s, r, q, p], 1.0),
        ];
        let canon = orbit
            .iter()
            .filter(|(_, sign)| *sign > 0.0)
            .map(|(t, _)| *t)
            .min()
            .unwrap();
        if let Some(&old) = seen2.get(&canon) {
            if (old - e.value).abs() > DUPLICATE_TOLERANCE {
                return Err(Error::ConflictingDuplicate {
                    tuple: canon.iter().map(|x| x + 1).collect(),
                    first: old,
                    second: e.value,
                });
            }
        }
        seen2.insert(canon, e.value);
        for (t, sign) in orbit {
            out.h2[t] = sign * e.value;
        }
    }
    Ok(out)
}

/// Read an FCIDUMP-style file of spatial integrals.
pub fn load_fcidump(path: impl AsRef<Path>) -> Result<IntegralSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_fcidump(&text, &path.display().to_string())
}

/// Read an FCIDUMP-style file, spatial or spin-resolved.
pub fn load_integrals(path: impl AsRef<Path>) -> Result<Integrals> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_integrals(&text, &path.display().to_string())
}

/// Serialize the unique (canonical) entries.
pub fn write_fcidump(ints: &IntegralSet) -> String {
    let mut out = String::new();
    let _ = write!(out, "&FCI NORB={}", ints.n_orbitals);
    if let Some(ne) = ints.n_electrons {
        let _ = write!(out, " NELEC={ne}");
    }
    if let Some(ms2) = ints.ms2 {
        let _ = write!(out, " MS2={ms2}");
    }
    out.push('\n');
    if !ints.label.is_empty() {
        let _ = writeln!(out, "# {}", ints.label.replace('\n', " "));
    }
    for (&(i, j), &v) in &ints.h1 {
        let _ = writeln!(out, "{i} {j} 0 0 {v:.17e}");
    }
    for (&[i, j, k, l], &v) in &ints.h2 {
        let _ = writeln!(out, "{i} {j} {k} {l} {v:.17e}");
    }
    if let Some(c) = ints.scalar_shift {
        let _ = writeln!(out, "0 0 0 0 {c:.17e}");
    }
    out
}

/// Serialize spin-orbital integrals in the `UHF=.TRUE.` variant: 1-based
/// spin-orbital indices, `P Q 0 0` one-body entries, `P Q R S` antisymmetrized
/// two-body entries with `P < Q`, `R < S` and `(P,Q) <= (R,S)`.
pub fn write_spin_fcidump(ints: &SpinIntegralSet, comment: &str) -> String {
    let n = ints.n_spin_orbitals();
    let mut out = String::new();
    let _ = write!(out, "&FCI NORB={n}");
    if let Some(ne) = ints.n_electrons {
        let _ = write!(out, " NELEC={ne}");
    }
    if let Some(ms2) = ints.ms2 {
        let _ = write!(out, " MS2={ms2}");
    }
    out.push_str(" UHF=.TRUE.\n");
    if !comment.is_empty() {
        let _ = writeln!(out, "# {}", comment.replace('\n', " "));
    }
    for p in 0..n {
        for q in p..n {
            let v = ints.h1[[p, q]];
            if v != 0.0 {
                let _ = writeln!(out, "{} {} 0 0 {v:.17e}", p + 1, q + 1);
            }
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            for r in 0..n {
                for s in r + 1..n {
                    if (p, q) > (r, s) {
                        continue;
                    }
                    let v = ints.h2[[p, q, r, s]];
                    if v != 0.0 {
                        let _ = writeln!(out, "{} {} {} {} {v:.17e}", p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    if ints.scalar != 0.0 {
        let _ = writeln!(out, "0 0 0 0 {:.17e}", ints.scalar);
    }
    out
}

/// The bundled appendix fixtures, by name.
pub fn builtin_fixture(name: &str) -> Result<IntegralSet> {
    let (_, text) = FIXTURE_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    parse_fcidump(text, name)
}

/// Load `<dir>/<name>.fcidump`, for fixture directories supplied at run time.
pub fn fixture_from_dir(dir: impl AsRef<Path>, name: &str) -> Result<IntegralSet> {
    let path = dir.as_ref().join(format!("{name}.fcidump"));
    if !path.exists() {
        return Err(Error::UnknownFixture(format!("{name} (looked in {})", path.display())));
    }
    load_fcidump(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_one_body_line() {
        let ints = parse_fcidump("&FCI NORB=4 NELEC=2 MS2=0\n1 1 0 0 -1.5133089437\n", "t").unwrap();
        assert_eq!(ints.h1(1, 1), -1.5133089437);
        for i in 1..=4 {
            for j in 1..=4 {
                if (i, j) != (1, 1) {
                    assert_eq!(ints.h1(i, j), 0.0);
                }
                for k in 1..=4 {
                    for l in 1..=4 {
                        assert_eq!(ints.h2(i, j, k, l), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn empty_body() {
        let ints = parse_fcidump("&FCI NORB=1 NELEC=0 MS2=0\n", "t").unwrap();
        assert_eq!(ints.n_orbitals(), 1);
        assert_eq!(ints.h1(1, 1), 0.0);
        assert_eq!(ints.h2(1, 1, 1, 1), 0.0);
        assert_eq!(ints.scalar_shift(), None);
    }

    #[test]
    fn listed_permutations_agree() {
        let ints = parse_fcidump("&FCI NORB=4\n1 2 3 4 0.25\n1 1 1 1 0.7724268885\n", "t").unwrap();
        assert_eq!(ints.h2(1, 1, 1, 1), 0.7724268885);
        for t in [[1, 2, 3, 4], [2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]] {
            assert_eq!(ints.h2(t[0], t[1], t[2], t[3]), 0.25);
        }
        // not in the 4-element group
        assert_eq!(ints.h2(1, 2, 4, 3), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_fcidump("&FCI NORB=2\n1 3 0 0 1.0\n", "t"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_fcidump("&FCI NORB=2\n1 1 0 0\n", "t"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_fcidump("&FCI NORB=2\n1 2 1 2 0.5\n2 1 2 1 0.6\n", "t"),
            Err(Error::ConflictingDuplicate { .. })
        ));
        // same orbit, equal within tolerance
        assert!(parse_fcidump("&FCI NORB=2\n1 2 1 2 0.5\n2 1 2 1 0.5\n", "t").is_ok());
        assert!(matches!(builtin_fixture("h2_sto3g"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn fixture_values() {
        assert_eq!(builtin_fixture("h2_ducc_1.4008").unwrap().h1(2, 2), -0.4695131026);
        assert_eq!(builtin_fixture("h2_ducc_10.0").unwrap().h2(3, 4, 3, 4), 0.1123997215);
        let f = builtin_fixture("h2_ducc_0.8").unwrap();
        assert_eq!(f.h2(4, 4, 4, 4), 0.3740766949);
        assert_eq!(f.h1(1, 3), -0.1435962544);
        assert_eq!(f.scalar_shift(), None);
        assert_eq!(f.h2_entries().count(), 41);
        assert_eq!(f.h1_entries().count(), 6);
    }

    #[test]
    fn spin_expansion() {
        let mut ints = IntegralSet::new(1);
        ints.insert_h1(1, 1, -0.7).unwrap();
        ints.insert_h2(1, 1, 1, 1, 0.4).unwrap();
        let s = ints.to_spin_orbital();
        assert_eq!(s.n_spin_orbitals(), 2);
        assert_eq!(s.h1[[0, 0]], -0.7);
        assert_eq!(s.h1[[1, 1]], -0.7);
        assert_eq!(s.h1[[0, 1]], 0.0);
        // <ab||ab> = (aa|bb) for opposite spins
        assert_eq!(s.h2[[0, 1, 0, 1]], 0.4);
        assert_eq!(s.h2[[0, 1, 1, 0]], -0.4);
        assert_eq!(s.h2[[0, 0, 0, 0]], 0.0);

        let fx = builtin_fixture("h2_ducc_1.4008").unwrap().to_spin_orbital();
        assert_eq!(fx.n_spin_orbitals(), 8);
        assert!(fx.symmetry_error() < 1e-14);
    }

    #[test]
    fn spin_resolved_round_trip() {
        let s = builtin_fixture("h2_ducc_4.0").unwrap().to_spin_orbital();
        let text = write_spin_fcidump(&s, "roundtrip");
        let back = match parse_integrals(&text, "x").unwrap() {
            Integrals::SpinResolved(b) => b,
            _ => panic!("expected spin-resolved"),
        };
        let diff = (&back.h2 - &s.h2).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        assert!(diff < 1e-15);
        assert_eq!(back.h1, s.h1);
    }
}
