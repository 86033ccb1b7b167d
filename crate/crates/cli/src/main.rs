//! `ducc-vqe` command-line driver.
//!
//! Exit codes: 0 success, 2 usage, 3 data errors, 4 non-convergence.

use std::fmt::Write as _;
use std::io::Write as IoWrite;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ducc_vqe::amplitudes::{self, ClusterAmplitudes};
use ducc_vqe::ansatz::{enumerate_excitations, enumerate_register, resource_report, trotter_circuit};
use ducc_vqe::cobyla::CobylaOptions;
use ducc_vqe::ducc::{bare_active, downfold};
use ducc_vqe::fermion::{build_hamiltonian, exact_ground_state, expectation_in_determinant, ActiveSpace, Determinant, FciOptions};
use ducc_vqe::integrals::{builtin_fixture, fixture_from_dir, load_integrals, Integrals, SpinIntegralSet};
use ducc_vqe::mapping::jordan_wigner;
use ducc_vqe::vqe::{self, VqeOptions, VqeProblem};
use ducc_vqe::Error;

const DATA_DIR_ENV: &str = "DUCC_VQE_DATA_DIR";

#[derive(Parser)]
#[command(name = "ducc-vqe", version, about = "Active-space downfolding and simulated VQE")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Qubit, excitation and gate counts for an active space.
    Resources(ResourcesArgs),
    /// Exact ground-state energy in a particle-number / Sz sector.
    Eig(EigArgs),
    /// Variational ground-state energy with a Trotterized UCCSD circuit.
    Vqe(VqeArgs),
    /// Effective active-space Hamiltonian from external CCSD amplitudes.
    Downfold(DownfoldArgs),
    /// MP2 amplitudes and energy.
    Mp2(Mp2Args),
    /// CCSD amplitudes and energy.
    Ccsd(CcsdArgs),
    /// Potential energy scan over a manifest of integral files.
    Pes(PesArgs),
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Args, Clone)]
struct Source {
    /// Integral file (spatial or spin-resolved FCIDUMP-style text).
    #[arg(long, conflicts_with = "fixture")]
    integrals: Option<PathBuf>,
    /// Bundled fixture name, e.g. h2_ducc_1.4008.
    #[arg(long)]
    fixture: Option<String>,
    /// Electron count (defaults to the file header).
    #[arg(long)]
    nelec: Option<usize>,
    /// Twice the Sz projection (defaults to the file header, then 0).
    #[arg(long, allow_negative_numbers = true)]
    ms2: Option<i32>,
}

#[derive(Args)]
struct ResourcesArgs {
    #[arg(long)]
    orbitals: usize,
    #[arg(long)]
    electrons: usize,
    /// Doubles with |t2| below this are dropped from the screened count.
    #[arg(long, default_value_t = 1e-5)]
    mp2_threshold: f64,
    /// Integrals for the MP2-screened counts.
    #[arg(long, conflicts_with = "fixture")]
    integrals: Option<PathBuf>,
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct EigArgs {
    #[command(flatten)]
    source: Source,
    /// Active orbitals (1-based), e.g. "1,2,3,4"; bare restriction.
    #[arg(long)]
    active: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq)]
enum WarmStart {
    #[default]
    Mp2,
    Zero,
}

#[derive(Args)]
struct VqeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    active: Option<String>,
    /// Keep doubles whose MP2 amplitude reaches this magnitude (UCCS(D)).
    #[arg(long)]
    screen_threshold: Option<f64>,
    #[arg(long, value_enum, default_value_t = WarmStart::Mp2)]
    warm_start: WarmStart,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    max_evals: usize,
    #[arg(long, default_value_t = 0.1)]
    rhobeg: f64,
    #[arg(long, default_value_t = 1e-6)]
    rhoend: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum AmplitudeSource {
    #[default]
    Ccsd,
    Mp2,
}

#[derive(Args)]
struct DownfoldArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    active: String,
    /// Amplitude file (`T1 i a v` / `T2 i j a b v`); computed if absent.
    #[arg(long)]
    amplitudes: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AmplitudeSource::Ccsd)]
    amplitude_source: AmplitudeSource,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Mp2Args {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    screen_threshold: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CcsdArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = amplitudes::DEFAULT_CCSD_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = amplitudes::DEFAULT_CCSD_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    screen_threshold: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Debug)]
enum Method {
    Eig,
    Vqe,
}

#[derive(Args)]
struct PesArgs {
    /// Lines of `label source [reference]`; source is a fixture name or a
    /// path relative to the manifest.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "eig")]
    methods: Vec<Method>,
    #[arg(long)]
    nelec: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    ms2: Option<i32>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad command-line input detected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A solver finished without meeting its tolerance; the payload was
/// already written.
#[derive(Debug)]
struct NotConverged(String);

impl std::fmt::Display for NotConverged {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NotConverged {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if cause.is::<NotConverged>() {
            return 4;
        }
        if let Some(Error::NotConverged { .. }) = cause.downcast_ref::<Error>() {
            return 4;
        }
    }
    3
}

fn run(cli: Cli, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    match cli.command {
        Command::Resources(a) => cmd_resources(a, stdout),
        Command::Eig(a) => cmd_eig(a, stdout),
        Command::Vqe(a) => cmd_vqe(a, stdout),
        Command::Downfold(a) => cmd_downfold(a, stdout),
        Command::Mp2(a) => cmd_mp2(a, stdout),
        Command::Ccsd(a) => cmd_ccsd(a, stdout),
        Command::Pes(a) => cmd_pes(a, stdout),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = run(cli, &mut std::io::stdout().lock());
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn emit(stdout: &mut dyn IoWrite, out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn load_fixture(name: &str) -> anyhow::Result<Integrals> {
    load_fixture_in(std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).as_deref(), name)
}

fn load_fixture_in(dir: Option<&Path>, name: &str) -> anyhow::Result<Integrals> {
    let ints = match dir {
        Some(dir) => fixture_from_dir(dir, name)?,
        None => builtin_fixture(name)?,
    };
    Ok(Integrals::Spatial(ints))
}

fn load_source(integrals: Option<&Path>, fixture: Option<&str>) -> anyhow::Result<Integrals> {
    match (integrals, fixture) {
        (Some(p), None) => load_integrals(p).with_context(|| format!("reading {}", p.display())),
        (None, Some(name)) => load_fixture(name),
        _ => Err(usage("exactly one of --integrals or --fixture is required")),
    }
}

fn parse_active(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("bad orbital '{t}' in --active"))))
        .collect()
}

/// A Hamiltonian on a qubit register plus its sector.
struct System {
    ints: SpinIntegralSet,
    n_electrons: usize,
    ms2: i32,
}

impl System {
    /// Closed-shell-style reference: the lowest `n_electrons` spin orbitals.
    fn reference(&self) -> Determinant {
        Determinant::from_occupied(0..self.n_electrons)
    }
}

fn sector(src: &Source, ints: &Integrals) -> anyhow::Result<(usize, i32)> {
    let nelec = src
        .nelec
        .or(ints.n_electrons())
        .ok_or_else(|| usage("electron count missing: pass --nelec"))?;
    let ms2 = src.ms2.or(ints.ms2()).unwrap_or(0);
    Ok((nelec, ms2))
}

fn load_system(src: &Source, active: Option<&str>) -> anyhow::Result<System> {
    let ints = load_source(src.integrals.as_deref(), src.fixture.as_deref())?;
    let (n_electrons, ms2) = sector(src, &ints)?;
    let spin = match (active, &ints) {
        (None, _) => ints.to_spin_orbital(),
        (Some(list), Integrals::Spatial(s)) => {
            let space = ActiveSpace::from_active_list(s.n_orbitals(), n_electrons, &parse_active(list)?)?;
            bare_active(&s.to_spin_orbital(), &space)
        }
        (Some(_), Integrals::SpinResolved(_)) => return Err(usage("--active needs spatial-orbital integrals")),
    };
    let n_electrons = match active {
        Some(_) => {
            let n = spin.n_electrons.unwrap_or(n_electrons);
            if n != n_electrons {
                return Err(usage("--nelec must count electrons in the active space"));
            }
            n
        }
        None => n_electrons,
    };
    Ok(System {
        ints: spin,
        n_electrons,
        ms2,
    })
}

#[derive(Serialize)]
struct ResourceRow {
    orbitals: usize,
    electrons: usize,
    n_qubits: usize,
    all_excitations: usize,
    gate_count: usize,
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mp2_excitations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mp2_gate_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mp2_depth: Option<usize>,
}

fn cmd_resources(a: ResourcesArgs, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    if a.electrons % 2 != 0 {
        return Err(usage("--electrons must be even (closed shell)"));
    }
    let n_occ = a.electrons / 2;
    if n_occ > a.orbitals {
        return Err(usage("more occupied orbitals than --orbitals"));
    }
    let space = ActiveSpace::lowest(a.orbitals, n_occ, a.orbitals - n_occ)?;
    let exc = enumerate_excitations(&space, a.electrons)?;
    let report = resource_report(&exc, &space)?;
    let mut row = ResourceRow {
        orbitals: a.orbitals,
        electrons: a.electrons,
        n_qubits: report.n_qubits,
        all_excitations: report.n_excitations,
        gate_count: report.gate_count,
        depth: report.depth,
        mp2_excitations: None,
        mp2_gate_count: None,
        mp2_depth: None,
    };
    if a.integrals.is_some() || a.fixture.is_some() {
        let ints = load_source(a.integrals.as_deref(), a.fixture.as_deref())?;
        let Integrals::Spatial(spatial) = &ints else {
            return Err(usage("MP2 screening needs spatial-orbital integrals"));
        };
        if spatial.n_orbitals() < a.orbitals {
            bail!("integrals have {} orbitals, fewer than --orbitals {}", spatial.n_orbitals(), a.orbitals);
        }
        let full = ActiveSpace::lowest(spatial.n_orbitals(), n_occ, spatial.n_orbitals() - n_occ)?;
        let mp2 = amplitudes::mp2_amplitudes(&ints.to_spin_orbital(), full.hf_determinant())?;
        let screened = exc.screened(&mp2, a.mp2_threshold);
        let circ = trotter_circuit(&screened)?;
        row.mp2_excitations = Some(screened.len());
        row.mp2_gate_count = Some(circ.gate_count());
        row.mp2_depth = Some(circ.depth());
    }
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    let text = match a.format {
        Format::Json => to_json(&row)?,
        Format::Csv => format!(
            "orbitals,electrons,n_qubits,all_excitations,gate_count,depth,mp2_excitations,mp2_gate_count,mp2_depth\n{},{},{},{},{},{},{},{},{}\n",
            row.orbitals,
            row.electrons,
            row.n_qubits,
            row.all_excitations,
            row.gate_count,
            row.depth,
            opt(row.mp2_excitations),
            opt(row.mp2_gate_count),
            opt(row.mp2_depth)
        ),
        Format::Table => {
            let mut t = String::new();
            writeln!(t, "orbitals         {}", row.orbitals)?;
            writeln!(t, "electrons        {}", row.electrons)?;
            writeln!(t, "N_q              {}", row.n_qubits)?;
            writeln!(t, "all excitations  {}", row.all_excitations)?;
            writeln!(t, "gate count       {}", row.gate_count)?;
            writeln!(t, "depth            {}", row.depth)?;
            if let Some(n) = row.mp2_excitations {
                writeln!(t, "MP2 excitations  {n}")?;
                writeln!(t, "MP2 gate count   {}", opt(row.mp2_gate_count))?;
                writeln!(t, "MP2 depth        {}", opt(row.mp2_depth))?;
            }
            t
        }
    };
    emit(stdout, None, &text)
}

#[derive(Serialize)]
struct EigOutput {
    energy: f64,
    n_electrons: usize,
    ms2: i32,
    dimension: usize,
}

fn ground_energy(sys: &System) -> anyhow::Result<EigOutput> {
    let h = build_hamiltonian(&sys.ints);
    let gs = exact_ground_state(&h, sys.n_electrons, sys.ms2, &FciOptions::default())?;
    Ok(EigOutput {
        energy: gs.energy,
        n_electrons: sys.n_electrons,
        ms2: sys.ms2,
        dimension: gs.determinants.len(),
    })
}

fn cmd_eig(a: EigArgs, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    let sys = load_system(&a.source, a.active.as_deref())?;
    let r = ground_energy(&sys)?;
    let text = match a.format {
        Format::Csv => format!("energy,n_electrons,ms2,dimension\n{:.12},{},{},{}\n", r.energy, r.n_electrons, r.ms2, r.dimension),
        Format::Table => format!("{:.12}\n", r.energy),
        Format::Json => to_json(&r)?,
    };
    emit(stdout, a.out.as_deref(), &text)
}

struct VqeSettings {
    screen_threshold: Option<f64>,
    warm_start: WarmStart,
    seed: u64,
    optimizer: CobylaOptions,
}

fn run_vqe(sys: &System, s: &VqeSettings) -> anyhow::Result<vqe::VqeResult> {
    if sys.ms2 != 0 || sys.n_electrons % 2 != 0 {
        return Err(usage("VQE reference requires a closed-shell sector (even --nelec, --ms2 0)"));
    }
    let n = sys.ints.n_spin_orbitals();
    let occupied: Vec<usize> = (0..sys.n_electrons).collect();
    let mut exc = enumerate_register(n, &occupied);
    let needs_mp2 = s.screen_threshold.is_some() || s.warm_start == WarmStart::Mp2;
    let mp2 = if needs_mp2 && !exc.is_empty() {
        Some(amplitudes::mp2_amplitudes(&sys.ints, sys.reference())?)
    } else {
        None
    };
    if let (Some(thr), Some(t)) = (s.screen_threshold, &mp2) {
        exc = exc.screened(t, thr);
    }
    let circuit = trotter_circuit(&exc)?;
    let hamiltonian = jordan_wigner(&build_hamiltonian(&sys.ints));
    let mut problem = VqeProblem::new(hamiltonian, circuit, occupied);
    if let (WarmStart::Mp2, Some(t)) = (s.warm_start, &mp2) {
        problem.initial_params = vqe::warm_start(t, &exc);
    }
    problem.options = VqeOptions {
        optimizer: s.optimizer.clone(),
        seed: s.seed,
    };
    Ok(vqe::minimize(&problem)?)
}

fn cmd_vqe(a: VqeArgs, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    let sys = load_system(&a.source, a.active.as_deref())?;
    let settings = VqeSettings {
        screen_threshold: a.screen_threshold,
        warm_start: a.warm_start,
        seed: a.seed,
        optimizer: CobylaOptions {
            rhobeg: a.rhobeg,
            rhoend: a.rhoend,
            max_evals: a.max_evals,
        },
    };
    let r = run_vqe(&sys, &settings)?;
    emit(stdout, a.out.as_deref(), &to_json(&r)?)?;
    if !r.converged {
        return Err(anyhow::Error::new(NotConverged(format!(
            "optimizer stopped after {} evaluations without reaching the parameter tolerance",
            r.n_evaluations
        ))));
    }
    Ok(())
}

fn reference_for(ints: &Integrals, nelec: usize) -> anyhow::Result<(SpinIntegralSet, Determinant)> {
    let spin = ints.to_spin_orbital();
    if nelec > spin.n_spin_orbitals() {
        return Err(usage("--nelec exceeds the number of spin orbitals"));
    }
    Ok((spin, Determinant::from_occupied(0..nelec)))
}

fn cmd_downfold(a: DownfoldArgs, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    let ints = load_source(a.source.integrals.as_deref(), a.source.fixture.as_deref())?;
    let (nelec, _) = sector(&a.source, &ints)?;
    let Integrals::Spatial(spatial) = &ints else {
        return Err(usage("downfolding needs spatial-orbital integrals"));
    };
    let space = ActiveSpace::from_active_list(spatial.n_orbitals(), nelec, &parse_active(&a.active)?)?;
    let (spin, reference) = reference_for(&ints, nelec)?;
    let t = match (&a.amplitudes, a.amplitude_source) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ClusterAmplitudes::from_text(&text, spin.n_spin_orbitals(), reference)?
        }
        (None, AmplitudeSource::Mp2) => amplitudes::mp2_amplitudes(&spin, reference)?,
        (None, AmplitudeSource::Ccsd) => {
            amplitudes::ccsd_solve(&spin, reference, amplitudes::DEFAULT_CCSD_TOLERANCE, amplitudes::DEFAULT_CCSD_MAX_ITER)?.amplitudes
        }
    };
    let d = downfold(&spin, &space, &t)?;
    emit(stdout, a.out.as_deref(), &d.to_fcidump())
}

#[derive(Serialize)]
struct AmplitudeSummary {
    method: &'static str,
    reference_energy: f64,
    correlation_energy: f64,
    total_energy: f64,
    n_singles: usize,
    n_doubles: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_screened: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    top: Vec<(String, f64)>,
}

fn summarize(
    method: &'static str,
    spin: &SpinIntegralSet,
    reference: Determinant,
    t: &ClusterAmplitudes,
    correlation: f64,
    threshold: Option<f64>,
    iterations: Option<usize>,
) -> AmplitudeSummary {
    let e_ref = expectation_in_determinant(&build_hamiltonian(spin), reference).re;
    let n_singles = t.singles().filter(|&((i, a), _)| i % 2 == a % 2).count();
    AmplitudeSummary {
        method,
        reference_energy: e_ref,
        correlation_energy: correlation,
        total_energy: e_ref + correlation,
        n_singles,
        n_doubles: t.n_doubles(),
        n_screened: threshold.map(|thr| n_singles + amplitudes::screen(t, thr).n_doubles()),
        iterations,
        top: amplitudes::top_amplitudes(t, 5),
    }
}

fn cmd_mp2(a: Mp2Args, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    let ints = load_source(a.source.integrals.as_deref(), a.source.fixture.as_deref())?;
    let (nelec, _) = sector(&a.source, &ints)?;
    let (spin, reference) = reference_for(&ints, nelec)?;
    let t = amplitudes::mp2_amplitudes(&spin, reference)?;
    let e = amplitudes::mp2_energy(&t, &spin);
    let mut summary = summarize("mp2", &spin, reference, &t, e, a.screen_threshold, None);
    // MP2 has no singles amplitudes, but the screened ansatz keeps every single
    summary.n_singles = enumerate_register(spin.n_spin_orbitals(), &(0..nelec).collect::<Vec<_>>()).singles.len();
    summary.n_screened = a.screen_threshold.map(|thr| summary.n_singles + amplitudes::screen(&t, thr).n_doubles());
    if let Some(p) = &a.out {
        emit(stdout, Some(p), &t.to_text())?;
    }
    emit(stdout, None, &to_json(&summary)?)
}

fn cmd_ccsd(a: CcsdArgs, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    let ints = load_source(a.source.integrals.as_deref(), a.source.fixture.as_deref())?;
    let (nelec, _) = sector(&a.source, &ints)?;
    let (spin, reference) = reference_for(&ints, nelec)?;
    let r = amplitudes::ccsd_solve(&spin, reference, a.tol, a.max_iter)?;
    let summary = summarize("ccsd", &spin, reference, &r.amplitudes, r.correlation_energy, a.screen_threshold, Some(r.iterations));
    if let Some(p) = &a.out {
        emit(stdout, Some(p), &r.amplitudes.to_text())?;
    }
    emit(stdout, None, &to_json(&summary)?)
}

struct ManifestEntry {
    label: String,
    source: String,
    reference: Option<f64>,
}

fn parse_manifest(path: &Path) -> anyhow::Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| anyhow::Error::new(Error::Parse { line: n + 1, msg: msg.into() });
        let (label, source, reference) = match toks.as_slice() {
            [l, s] => (l, s, None),
            [l, s, r] => (l, s, Some(r.parse::<f64>().map_err(|_| bad("bad reference energy"))?)),
            _ => return Err(bad("expected `label source [reference]`")),
        };
        out.push(ManifestEntry {
            label: label.to_string(),
            source: source.to_string(),
            reference,
        });
    }
    if out.is_empty() {
        bail!("manifest {} lists no points", path.display());
    }
    Ok(out)
}

fn pes_point(entry: &ManifestEntry, base: &Path, a: &PesArgs) -> anyhow::Result<Vec<f64>> {
    let path = base.join(&entry.source);
    let src = if path.exists() {
        Source {
            integrals: Some(path),
            fixture: None,
            nelec: a.nelec,
            ms2: a.ms2,
        }
    } else {
        Source {
            integrals: None,
            fixture: Some(entry.source.clone()),
            nelec: a.nelec,
            ms2: a.ms2,
        }
    };
    let sys = load_system(&src, None).with_context(|| format!("point '{}'", entry.label))?;
    let settings = VqeSettings {
        screen_threshold: None,
        warm_start: WarmStart::Mp2,
        seed: a.seed,
        optimizer: CobylaOptions::default(),
    };
    a.methods
        .iter()
        .map(|m| match m {
            Method::Eig => Ok(ground_energy(&sys)?.energy),
            Method::Vqe => Ok(run_vqe(&sys, &settings)?.energy),
        })
        .collect()
}

/// Energy at the largest separation minus the minimum energy; labels are
/// read as separations when they all parse as numbers, otherwise the last
/// row is taken as the dissociated limit.
fn dissociation_energy(labels: &[String], energies: &[f64]) -> f64 {
    let seps: Option<Vec<f64>> = labels.iter().map(|l| l.parse::<f64>().ok()).collect();
    let far = match seps {
        Some(s) => (0..s.len()).max_by(|&i, &j| s[i].total_cmp(&s[j])).unwrap_or(0),
        None => energies.len() - 1,
    };
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    energies[far] - min
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Eig => "eig",
        Method::Vqe => "vqe",
    }
}

fn cmd_pes(a: PesArgs, stdout: &mut dyn IoWrite) -> anyhow::Result<()> {
    if a.methods.is_empty() {
        return Err(usage("--methods is empty"));
    }
    let entries = parse_manifest(&a.manifest)?;
    let base = a.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let results: Mutex<Vec<Option<anyhow::Result<Vec<f64>>>>> = Mutex::new((0..entries.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let jobs = a.jobs.clamp(1, entries.len());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= entries.len() {
                    break;
                }
                let r = pes_point(&entries[k], &base, &a);
                results.lock().expect("result lock")[k] = Some(r);
            });
        }
    });
    let mut rows = Vec::with_capacity(entries.len());
    for r in results.into_inner().expect("result lock") {
        rows.push(r.ok_or_else(|| anyhow!("point was not evaluated"))??);
    }

    let has_ref = entries.iter().any(|e| e.reference.is_some());
    let mut csv = String::from("label");
    for &m in &a.methods {
        write!(csv, ",e_{}", method_name(m))?;
    }
    if has_ref {
        csv.push_str(",reference");
        for &m in &a.methods {
            write!(csv, ",error_{}", method_name(m))?;
        }
    }
    csv.push('\n');
    for (e, row) in entries.iter().zip(&rows) {
        csv.push_str(&e.label);
        for v in row {
            write!(csv, ",{v:.12}")?;
        }
        if has_ref {
            match e.reference {
                Some(r) => {
                    write!(csv, ",{r:.12}")?;
                    for v in row {
                        write!(csv, ",{:.12}", v - r)?;
                    }
                }
                None => csv.push_str(&",".repeat(1 + row.len())),
            }
        }
        csv.push('\n');
    }
    let labels: Vec<String> = entries.iter().map(|e| e.label.clone()).collect();
    for (k, &m) in a.methods.iter().enumerate() {
        let energies: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        writeln!(csv, "# dissociation_energy,{},{:.12}", method_name(m), dissociation_energy(&labels, &energies))?;
    }
    emit(stdout, a.out.as_deref(), &csv)
}
