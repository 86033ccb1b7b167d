//! UCCSD excitation lists, the anti-Hermitian generator `T - T+`, and
//! first-order Trotter circuits built from Pauli-string exponentials.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::amplitudes::ClusterAmplitudes;
use crate::error::{Error, Result};
use crate::fermion::{ActiveSpace, FermionOperator, Ladder};
use crate::mapping::{jordan_wigner, Pauli, PauliString, REAL_TOLERANCE};

/// A spin-conserving excitation on the qubit register.
///
/// A double `(i, j, a, b)` stands for `a+_a a+_b a_j a_i` with `i < j`,
/// `spin(a) = spin(i)` and `spin(b) = spin(j)`; for same-spin pairs also
/// `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Excitation {
    Single { i: usize, a: usize },
    Double { i: usize, j: usize, a: usize, b: usize },
}

impl Excitation {
    /// The excitation operator `tau` (without its adjoint).
    pub fn operator(&self, n_modes: usize) -> FermionOperator {
        match *self {
            Excitation::Single { i, a } => FermionOperator::term(n_modes, &[Ladder::create(a), Ladder::annihilate(i)], 1.0),
            Excitation::Double { i, j, a, b } => FermionOperator::term(
                n_modes,
                &[Ladder::create(a), Ladder::create(b), Ladder::annihilate(j), Ladder::annihilate(i)],
                1.0,
            ),
        }
    }

    pub fn label(&self) -> String {
        let so = |p: usize| format!("{}{}", p / 2 + 1, if p % 2 == 0 { 'α' } else { 'β' });
        match *self {
            Excitation::Single { i, a } => format!("{} -> {}", so(i), so(a)),
            Excitation::Double { i, j, a, b } => format!("{} {} -> {} {}", so(i), so(j), so(a), so(b)),
        }
    }
}

/// Excitations in parameter-slot order: singles first, then doubles, each
/// group sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExcitationList {
    pub n_qubits: usize,
    pub singles: Vec<(usize, usize)>,
    pub doubles: Vec<(usize, usize, usize, usize)>,
    /// Spin orbital (in the parent integral set) carried by each qubit.
    pub spin_orbitals: Vec<usize>,
}

impl ExcitationList {
    pub fn len(&self) -> usize {
        self.singles.len() + self.doubles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn excitations(&self) -> Vec<Excitation> {
        self.singles
            .iter()
            .map(|&(i, a)| Excitation::Single { i, a })
            .chain(self.doubles.iter().map(|&(i, j, a, b)| Excitation::Double { i, j, a, b }))
            .collect()
    }

    /// Keep every single and the doubles whose amplitude magnitude reaches
    /// `threshold`. Amplitudes are indexed by parent spin orbitals.
    pub fn screened(&self, amps: &ClusterAmplitudes, threshold: f64) -> ExcitationList {
        let m = &self.spin_orbitals;
        ExcitationList {
            n_qubits: self.n_qubits,
            singles: self.singles.clone(),
            doubles: self
                .doubles
                .iter()
                .copied()
                .filter(|&(i, j, a, b)| amps.t2(m[i], m[j], m[a], m[b]).abs() >= threshold)
                .collect(),
            spin_orbitals: self.spin_orbitals.clone(),
        }
    }
}

/// All spin-conserving singles and doubles from `occupied` qubits into the
/// remaining qubits of an `n_qubits` register (qubit parity = spin).
pub fn enumerate_register(n_qubits: usize, occupied: &[usize]) -> ExcitationList {
    let occ: Vec<usize> = {
        let mut o = occupied.to_vec();
        o.sort_unstable();
        o.dedup();
        o
    };
    let virt: Vec<usize> = (0..n_qubits).filter(|q| !occ.contains(q)).collect();
    let mut singles = Vec::new();
    for &i in &occ {
        for &a in &virt {
            if i % 2 == a % 2 {
                singles.push((i, a));
            }
        }
    }
    let mut doubles = Vec::new();
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for &a in &virt {
                for &b in &virt {
                    let same_spin = i % 2 == j % 2;
                    if a % 2 == i % 2 && b % 2 == j % 2 && (!same_spin || a < b) {
                        doubles.push((i, j, a, b));
                    }
                }
            }
        }
    }
    singles.sort_unstable();
    doubles.sort_unstable();
    ExcitationList {
        n_qubits,
        singles,
        doubles,
        spin_orbitals: (0..n_qubits).collect(),
    }
}

/// Excitations within an active space. Qubit `k` carries the `k`-th active
/// spin orbital in ascending order.
pub fn enumerate_excitations(space: &ActiveSpace, n_electrons: usize) -> Result<ExcitationList> {
    if n_electrons % 2 != 0 || n_electrons != space.n_electrons() {
        return Err(Error::Invalid(format!(
            "closed-shell reference with {} electrons expected, got {n_electrons}",
            space.n_electrons()
        )));
    }
    let active = space.active_spin_orbitals();
    let hf = space.hf_determinant();
    let occupied: Vec<usize> = active
        .iter()
        .enumerate()
        .filter(|(_, &p)| hf.is_occupied(p))
        .map(|(k, _)| k)
        .collect();
    let mut list = enumerate_register(active.len(), &occupied);
    list.spin_orbitals = active;
    Ok(list)
}

/// `sum_k theta_k (tau_k - tau_k+)`.
pub fn ucc_generator(exc: &ExcitationList, params: &[f64]) -> Result<FermionOperator> {
    if params.len() != exc.len() {
        return Err(Error::LengthMismatch {
            expected: exc.len(),
            got: params.len(),
        });
    }
    let n = exc.n_qubits;
    let mut op = FermionOperator::zero(n);
    for (e, &theta) in exc.excitations().iter().zip(params) {
        let tau = e.operator(n);
        op = op + (tau.clone() - tau.adjoint()) * theta;
    }
    Ok(op.prune(crate::fermion::PRUNE_THRESHOLD))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Rotation angle: either fixed or `scale * params[slot]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Angle {
    Fixed(f64),
    Param { slot: usize, scale: f64 },
}

impl Angle {
    pub fn value(&self, params: &[f64]) -> f64 {
        match *self {
            Angle::Fixed(v) => v,
            Angle::Param { slot, scale } => scale * params[slot],
        }
    }
}

/// `Rot` is `exp(-i angle sigma_axis / 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Gate {
    H(usize),
    Rot { axis: Axis, angle: Angle, qubit: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) => vec![q],
            Gate::Rot { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Rot { axis, angle, qubit } => {
                let name = match axis {
                    Axis::X => "RX",
                    Axis::Y => "RY",
                    Axis::Z => "RZ",
                };
                match angle {
                    Angle::Fixed(v) => write!(f, "{name} {v:?} {qubit}"),
                    Angle::Param { slot, scale } if scale == 1.0 => write!(f, "{name} p{slot} {qubit}"),
                    Angle::Param { slot, scale } => write!(f, "{name} {scale:?}*p{slot} {qubit}"),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_params: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_params: usize) -> Self {
        Self {
            n_qubits,
            n_params,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(g.qubits().iter().all(|&q| q < self.n_qubits));
        self.gates.push(g);
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Greedy layering: each gate goes one layer after the latest layer
    /// occupied on any of its qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    /// Append `exp(i phi P)` where `phi = scale * params[slot]` (or a fixed
    /// angle) using basis changes, a CNOT ladder and one `RZ(-2 phi)`.
    pub fn push_pauli_exponential(&mut self, p: &PauliString, angle: Angle) {
        let ops = p.ops();
        if ops.is_empty() {
            return;
        }
        let rz = match angle {
            Angle::Fixed(v) => Angle::Fixed(-2.0 * v),
            Angle::Param { slot, scale } => Angle::Param { slot, scale: -2.0 * scale },
        };
        let half_pi = std::f64::consts::FRAC_PI_2;
        for &(q, pauli) in &ops {
            match pauli {
                Pauli::X => self.push(Gate::H(q)),
                Pauli::Y => self.push(Gate::Rot {
                    axis: Axis::X,
                    angle: Angle::Fixed(half_pi),
                    qubit: q,
                }),
                Pauli::Z => {}
            }
        }
        for w in ops.windows(2) {
            self.push(Gate::Cnot {
                control: w[0].0,
                target: w[1].0,
            });
        }
        let last = ops[ops.len() - 1].0;
        self.push(Gate::Rot {
            axis: Axis::Z,
            angle: rz,
            qubit: last,
        });
        for w in ops.windows(2).rev() {
            self.push(Gate::Cnot {
                control: w[0].0,
                target: w[1].0,
            });
        }
        for &(q, pauli) in &ops {
            match pauli {
                Pauli::X => self.push(Gate::H(q)),
                Pauli::Y => self.push(Gate::Rot {
                    axis: Axis::X,
                    angle: Angle::Fixed(-half_pi),
                    qubit: q,
                }),
                Pauli::Z => {}
            }
        }
    }

    /// One gate per line, preceded by a `# qubits=N params=M` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits={} params={}\n", self.n_qubits, self.n_params);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut circ = Circuit::default();
        for (n, raw) in text.lines().enumerate() {
            let bad = |msg: &str| Error::Parse {
                line: n + 1,
                msg: msg.to_string(),
            };
            let line = raw.trim();
            if let Some(header) = line.strip_prefix('#') {
                for kv in header.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("qubits", v)) => circ.n_qubits = v.parse().map_err(|_| bad("bad qubit count"))?,
                        Some(("params", v)) => circ.n_params = v.parse().map_err(|_| bad("bad parameter count"))?,
                        _ => {}
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let qubit = |t: &str| t.parse::<usize>().map_err(|_| bad("bad qubit index"));
            let gate = match toks.as_slice() {
                ["H", q] => Gate::H(qubit(q)?),
                ["CNOT", c, t] => Gate::Cnot {
                    control: qubit(c)?,
                    target: qubit(t)?,
                },
                [name @ ("RX" | "RY" | "RZ"), a, q] => {
                    let axis = match *name {
                        "RX" => Axis::X,
                        "RY" => Axis::Y,
                        _ => Axis::Z,
                    };
                    let angle = parse_angle(a).ok_or_else(|| bad("bad angle"))?;
                    Gate::Rot {
                        axis,
                        angle,
                        qubit: qubit(q)?,
                    }
                }
                _ => return Err(bad("unknown gate")),
            };
            if gate.qubits().iter().any(|&q| q >= circ.n_qubits) {
                return Err(bad("qubit index out of range"));
            }
            if let Gate::Rot {
                angle: Angle::Param { slot, .. },
                ..
            } = gate
            {
                if slot >= circ.n_params {
                    return Err(bad("parameter slot out of range"));
                }
            }
            circ.gates.push(gate);
        }
        Ok(circ)
    }
}

fn parse_angle(s: &str) -> Option<Angle> {
    let slot = |p: &str| p.strip_prefix('p').and_then(|v| v.parse::<usize>().ok());
    if let Some((scale, p)) = s.split_once('*') {
        return Some(Angle::Param {
            slot: slot(p)?,
            scale: scale.parse().ok()?,
        });
    }
    if let Some(k) = slot(s) {
        return Some(Angle::Param { slot: k, scale: 1.0 });
    }
    s.parse().ok().map(Angle::Fixed)
}

/// Pauli strings of `tau - tau+` with their real weights `c`, where the
/// image is `sum i c P`. Sorted by string.
pub fn excitation_strings(e: &Excitation, n_qubits: usize) -> Result<Vec<(PauliString, f64)>> {
    let tau = e.operator(n_qubits);
    let image = jordan_wigner(&(tau.clone() - tau.adjoint()));
    let mut out = Vec::with_capacity(image.len());
    for (p, c) in image.sorted_terms() {
        if c.re.abs() > REAL_TOLERANCE {
            return Err(Error::NonRealCoefficient {
                term: p.to_string(),
                re: c.re,
                im: c.im,
            });
        }
        out.push((p, (c / Complex64::i()).re));
    }
    out.sort_by_key(|(p, _)| *p);
    Ok(out)
}

/// Single first-order Trotter step of `exp(sum_k theta_k (tau_k - tau_k+))`.
pub fn trotter_circuit(exc: &ExcitationList) -> Result<Circuit> {
    let mut circ = Circuit::new(exc.n_qubits, exc.len());
    for (slot, e) in exc.excitations().iter().enumerate() {
        for (p, c) in excitation_strings(e, exc.n_qubits)? {
            circ.push_pauli_exponential(&p, Angle::Param { slot, scale: c });
        }
    }
    Ok(circ)
}

/// Table-style resource counts for one active space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub n_qubits: usize,
    pub n_excitations: usize,
    pub n_parameters: usize,
    pub gate_count: usize,
    pub depth: usize,
}

pub fn resource_report(exc: &ExcitationList, space: &ActiveSpace) -> Result<ResourceReport> {
    let circ = trotter_circuit(exc)?;
    Ok(ResourceReport {
        n_qubits: 2 * space.active_orbitals().len(),
        n_excitations: exc.len(),
        n_parameters: circ.n_params,
        gate_count: circ.gate_count(),
        depth: circ.depth(),
    })
}

/// Closed-form excitation count: `2ov + o^2 v^2 + 2 C(o,2) C(v,2)`.
pub fn excitation_count(n_occupied: usize, n_virtual: usize) -> usize {
    let (o, v) = (n_occupied, n_virtual);
    let c2 = |n: usize| n * n.saturating_sub(1) / 2;
    2 * o * v + o * o * v * v + 2 * c2(o) * c2(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_formula() {
        for o in 0..4 {
            for v in 0..5 {
                let occ: Vec<usize> = (0..2 * o).collect();
                let list = enumerate_register(2 * (o + v), &occ);
                assert_eq!(list.len(), excitation_count(o, v), "o={o} v={v}");
            }
        }
        assert_eq!(excitation_count(1, 3), 15);
        assert_eq!(excitation_count(3, 4), 204);
        assert_eq!(excitation_count(3, 11), 1485);
    }

    #[test]
    fn h2_slot_order() {
        let list = enumerate_register(8, &[0, 1]);
        assert_eq!(list.singles, vec![(0, 2), (0, 4), (0, 6), (1, 3), (1, 5), (1, 7)]);
        assert_eq!(&list.doubles[..4], &[(0, 1, 2, 3), (0, 1, 2, 5), (0, 1, 2, 7), (0, 1, 4, 3)]);
        assert_eq!(list.excitations()[6].label(), "1α 1β -> 2α 2β");
    }

    #[test]
    fn string_counts() {
        let s = excitation_strings(&Excitation::Single { i: 0, a: 2 }, 4).unwrap();
        assert_eq!(s.len(), 2);
        let d = excitation_strings(&Excitation::Double { i: 0, j: 1, a: 2, b: 3 }, 4).unwrap();
        assert_eq!(d.len(), 8);
        for (_, c) in d {
            assert!((c.abs() - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn zz_exponential_pattern() {
        let mut c = Circuit::new(2, 1);
        let zz = PauliString::from_ops(&[(0, Pauli::Z), (1, Pauli::Z)]);
        // exp(-i theta ZZ / 2) = exp(i phi ZZ) with phi = -theta / 2
        c.push_pauli_exponential(&zz, Angle::Param { slot: 0, scale: -0.5 });
        assert_eq!(c.gates.len(), 3);
        assert_eq!(c.to_text(), "# qubits=2 params=1\nCNOT 0 1\nRZ p0 1\nCNOT 0 1\n");
    }

    #[test]
    fn circuit_text_round_trip() {
        let list = enumerate_register(6, &[0, 1]);
        let circ = trotter_circuit(&list).unwrap();
        assert_eq!(Circuit::from_text(&circ.to_text()).unwrap(), circ);
        assert!(Circuit::from_text("# qubits=2 params=0\nRZ p0 1\n").is_err());
        assert!(Circuit::from_text("# qubits=2 params=0\nCNOT 0 2\n").is_err());
    }

    #[test]
    fn depth_layers_disjoint_gates() {
        let mut c = Circuit::new(3, 0);
        c.push(Gate::H(0));
        c.push(Gate::H(1));
        c.push(Gate::Cnot { control: 0, target: 1 });
        c.push(Gate::H(2));
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn no_virtuals_no_gates() {
        let space = ActiveSpace::lowest(3, 3, 0).unwrap();
        let list = enumerate_excitations(&space, 6).unwrap();
        let r = resource_report(&list, &space).unwrap();
        assert_eq!((r.n_qubits, r.n_excitations, r.gate_count, r.depth), (6, 0, 0, 0));
    }
}
