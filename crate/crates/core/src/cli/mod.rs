//! Command-line front end: `run`, `spectrum`, `bench-uccsd` and `list`.
//!
//! Exit codes: 0 success, 1 unparsable input (command line, config,
//! Hamiltonian or kernel file), 2 missing Hamiltonian or input file or an
//! empty sweep, 3 algorithm failure (including unknown service names).

pub mod config;
mod results;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::algorithms::{AlgorithmSpec, Vqe};
use crate::ansatz::{count_double_excitations, reference_state_circuit, uccsd_circuit, uccsd_with_counts, UccsdSpec};
use crate::backend::{qalloc, Accelerator, AcceleratorBuffer, AcceleratorConfig};
use crate::ir::{parse_kernel, CompositeInstruction};
use crate::optim::Optimizer;
use crate::pauli::{parse_hamiltonian, PauliOperator};
use crate::registry::{self, HeterogeneousMap, ServiceKind};
use crate::Algorithm;

use config::Config;
pub use results::{format_real, Provenance, Table};

#[derive(Debug, Parser)]
#[command(name = "qcx", version, about = "Hybrid quantum-classical chemistry driver")]
pub struct Cli {
    /// Progress messages on standard error.
    #[arg(long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured algorithm over one Hamiltonian or a sweep.
    Run(RunArgs),
    /// Like `run`, with one column per energy level or expansion order.
    Spectrum(RunArgs),
    /// Time UCCSD circuit construction.
    BenchUccsd(BenchArgs),
    /// Print the registered services.
    List,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Results file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides `shots` from the config (0 = exact expectations).
    #[arg(long)]
    pub shots: Option<i64>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Qubit counts, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub nq: Vec<usize>,
    /// Electron counts, comma-separated; every (nq, ne) pair is run.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ne: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Parse(String),
    MissingInput(String),
    Algorithm(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::MissingInput(_) => 2,
            CliError::Algorithm(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::MissingInput(m) => write!(f, "missing input: {m}"),
            CliError::Algorithm(m) => write!(f, "algorithm error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn algo_err(e: impl fmt::Display) -> CliError {
    CliError::Algorithm(e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code; diagnostics go to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qcx: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(a) => run_command(a, cli.verbose, Mode::Run),
        Command::Spectrum(a) => run_command(a, cli.verbose, Mode::Spectrum),
        Command::BenchUccsd(a) => bench_uccsd(a, cli.verbose),
        Command::List => {
            print!("{}", list_services());
            Ok(())
        }
    }
}

/// Registry contents, one `kind: name, name` line per service kind.
pub fn list_services() -> String {
    ServiceKind::ALL
        .iter()
        .map(|k| format!("{}: {}\n", k, registry::list_services(*k).join(", ")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Run,
    Spectrum,
}

/// Everything a run needs from the config, resolved once.
struct Job {
    config: Config,
    base: PathBuf,
    algorithm: String,
    points: Vec<(String, PathBuf)>,
    shots: i64,
    seed: u64,
}

fn load_job(args: &RunArgs) -> Result<(Job, Provenance), CliError> {
    let bytes = std::fs::read(&args.config)
        .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", args.config.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Parse(format!("config {} is not UTF-8", args.config.display())))?;
    let config = Config::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", args.config.display())))?;
    let parse = |e: config::ConfigError| CliError::Parse(e.to_string());
    let algorithm = config.require("run", "algorithm").map_err(parse)?.to_string();
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();

    let files: Vec<String> = if config.section("sweep").is_some() {
        config.list("sweep", "hamiltonians").unwrap_or_default()
    } else {
        config.string("run", "hamiltonian").map(|h| vec![h.to_string()]).unwrap_or_default()
    };
    if files.is_empty() {
        return Err(CliError::MissingInput(
            "no Hamiltonian given (set [run] hamiltonian or a non-empty [sweep] hamiltonians list)".into(),
        ));
    }
    let labels = match config.list("sweep", "labels") {
        Some(l) if l.len() != files.len() => {
            return Err(CliError::Parse(format!(
                "[sweep] has {} labels for {} hamiltonians",
                l.len(),
                files.len()
            )))
        }
        Some(l) => l,
        None => files
            .iter()
            .map(|f| Path::new(f).file_stem().map_or(f.clone(), |s| s.to_string_lossy().into_owned()))
            .collect(),
    };
    let points = labels.into_iter().zip(files.iter().map(|f| base.join(f))).collect();

    let shots = match args.shots {
        Some(s) => s,
        None => config.count("run", "shots").map_err(parse)?.unwrap_or(0) as i64,
    };
    let seed = match args.seed {
        Some(s) => s,
        None => config.count("run", "seed").map_err(parse)?.unwrap_or(0),
    };
    let provenance = Provenance {
        config_sha256: Some(hex::encode(Sha256::digest(&bytes))),
        seed: Some(seed),
        shots: Some(shots),
        units: Some("hartree"),
    };
    Ok((
        Job {
            config,
            base,
            algorithm,
            points,
            shots,
            seed,
        },
        provenance,
    ))
}

fn read_input(path: &Path, what: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::MissingInput(format!("{what} {}: {e}", path.display())))
}

fn load_hamiltonian(path: &Path) -> Result<PauliOperator, CliError> {
    let text = read_input(path, "Hamiltonian")?;
    parse_hamiltonian(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn build_ansatz(job: &Job, n_qubits: usize) -> Result<Option<CompositeInstruction>, CliError> {
    let cfg = &job.config;
    let parse = |e: config::ConfigError| CliError::Parse(e.to_string());
    let Some(kind) = cfg.string("ansatz", "kind") else {
        return Ok(None);
    };
    let counts = || -> Result<(usize, usize), CliError> {
        let ne = cfg
            .count("ansatz", "ne")
            .map_err(parse)?
            .ok_or_else(|| CliError::Parse(format!("[ansatz] kind = {kind} needs `ne`")))?;
        let nq = cfg.count("ansatz", "nq").map_err(parse)?.unwrap_or(n_qubits as u64);
        Ok((ne as usize, nq as usize))
    };
    let circuit = match kind {
        "none" => return Ok(None),
        "hf" => {
            let (ne, nq) = counts()?;
            reference_state_circuit(ne, nq).map_err(algo_err)?
        }
        "uccsd" => {
            let (ne, nq) = counts()?;
            uccsd_circuit(UccsdSpec::new(ne, nq).map_err(algo_err)?).map_err(algo_err)?
        }
        "kernel" => {
            let file = cfg.require("ansatz", "file").map_err(parse)?;
            let path = job.base.join(file);
            let src = read_input(&path, "kernel")?;
            parse_kernel(&src).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        }
        other => {
            return Err(CliError::Parse(format!(
                "unknown ansatz kind `{other}`; expected hf, uccsd, kernel or none"
            )))
        }
    };
    Ok(Some(circuit))
}

fn build_optimizer(job: &Job) -> Result<Arc<dyn Optimizer>, CliError> {
    let name = job.config.string("optimizer", "name").unwrap_or("nelder-mead");
    let options = job
        .config
        .typed_section("optimizer", &["name"])
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let mut opt = registry::get_optimizer(name).map_err(algo_err)?;
    opt.set_options(options).map_err(algo_err)?;
    Ok(Arc::from(opt))
}

fn build_accelerator(job: &Job) -> Result<Arc<dyn Accelerator>, CliError> {
    let name = job.config.string("run", "accelerator").unwrap_or("statevector");
    let mut acc = registry::get_accelerator(name).map_err(algo_err)?;
    acc.initialize(AcceleratorConfig {
        shots: job.shots,
        seed: Some(job.seed),
    })
    .map_err(algo_err)?;
    Ok(Arc::from(acc))
}

/// Runs the configured algorithm on one Hamiltonian and returns the buffer.
fn run_point(job: &Job, obs: PauliOperator) -> Result<AcceleratorBuffer, CliError> {
    let parse = |e: config::ConfigError| CliError::Parse(e.to_string());
    let n_qubits = obs.n_qubits();
    let mut options = job.config.typed_section("options", &[]).map_err(parse)?;
    let ansatz = build_ansatz(job, n_qubits)?;
    let accelerator = build_accelerator(job)?;
    let optimizer = build_optimizer(job)?;
    let obs = Arc::new(obs);
    options.insert("observable", obs.clone());
    options.insert("accelerator", accelerator.clone());
    if !options.contains("n-electrons") {
        if let Some(ne) = job.config.count("ansatz", "ne").map_err(parse)? {
            options.insert("n-electrons", ne as i64);
        }
    }
    if let Some(params) = job.config.get("ansatz", "parameters") {
        let values: Vec<f64> = config::split_list(&params.value)
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Parse(format!("line {}: [ansatz] parameters must be reals", params.line)))?;
        options.insert("ansatz-parameters", values);
    }
    let size = n_qubits.max(ansatz.as_ref().map_or(0, |a| a.n_qubits())).max(1);
    match job.algorithm.as_str() {
        "vqe" => {
            options.insert("optimizer", optimizer);
        }
        "adapt" => {
            options.insert("optimizer", optimizer);
            if !options.contains("sub-algorithm") {
                options.insert("sub-algorithm", "vqe");
            }
            if !options.contains("pool") {
                options.insert("pool", "uccsd");
            }
        }
        "qite" | "qcmx" | "qeom" => {
            // A symbolic ansatz without fixed parameters is first optimized.
            if let Some(a) = &ansatz {
                if a.n_variables() > 0 && !options.contains("ansatz-parameters") {
                    let mut vqe = Vqe::default();
                    vqe.initialize(
                        HeterogeneousMap::new()
                            .with("ansatz", a.clone())
                            .with("optimizer", optimizer)
                            .with("observable", obs.clone())
                            .with("accelerator", accelerator.clone()),
                    )
                    .map_err(algo_err)?;
                    let mut scratch = qalloc(size).map_err(algo_err)?;
                    vqe.execute(&mut scratch).map_err(algo_err)?;
                    let params = scratch.get::<Vec<f64>>("opt-params").map_err(algo_err)?;
                    options.insert("ansatz-parameters", params);
                }
            }
        }
        _ => {}
    }
    if let Some(a) = ansatz {
        options.insert("ansatz", a);
    }
    let mut buffer = qalloc(size).map_err(algo_err)?;
    AlgorithmSpec::new(job.algorithm.clone(), options)
        .run(&mut buffer)
        .map_err(algo_err)?;
    Ok(buffer)
}

fn joined(values: &[f64]) -> String {
    values.iter().map(|v| format_real(*v)).collect::<Vec<_>>().join(";")
}

fn run_row(algorithm: &str, buf: &AcceleratorBuffer) -> Result<(Vec<&'static str>, Vec<String>), CliError> {
    let real = |k: &str| buf.get::<f64>(k).map_err(algo_err);
    let reals = |k: &str| buf.get::<Vec<f64>>(k).map_err(algo_err);
    let mut cols = vec!["opt-val"];
    let mut row = vec![format_real(real("opt-val")?)];
    match algorithm {
        "vqe" => {
            cols.push("opt-params");
            row.push(joined(&reals("opt-params")?));
        }
        "adapt" => {
            cols.extend(["opt-params", "adapt-ops"]);
            row.push(joined(&reals("opt-params")?));
            row.push(buf.get::<Vec<String>>("adapt-ops").map_err(algo_err)?.join(";"));
        }
        "qite" => {
            cols.push("steps");
            row.push((reals("energy-history")?.len() - 1).to_string());
        }
        "qeom" => {
            cols.push("excitation-energies");
            row.push(joined(&reals("excitation-energies")?));
        }
        _ => {}
    }
    Ok((cols, row))
}

fn spectrum_row(algorithm: &str, buf: &AcceleratorBuffer) -> Result<(Vec<String>, Vec<f64>), CliError> {
    let reals = |k: &str| buf.get::<Vec<f64>>(k).map_err(algo_err);
    match algorithm {
        "qeom" => {
            let exc = reals("excitation-energies")?;
            let mut cols = vec!["E0".to_string()];
            cols.extend((1..=exc.len()).map(|k| format!("dE{k}")));
            let mut vals = vec![buf.get::<f64>("opt-val").map_err(algo_err)?];
            vals.extend(exc);
            Ok((cols, vals))
        }
        "qcmx" => {
            let mut cols = Vec::new();
            let mut vals = Vec::new();
            for (key, prefix) in [("cmx-energies", "cmx"), ("pds-energies", "pds"), ("knowles-energies", "knowles")] {
                let v = reals(key)?;
                cols.extend((0..v.len()).map(|k| format!("{prefix}-{}", k + 2)));
                vals.extend(v);
            }
            Ok((cols, vals))
        }
        other => Err(CliError::Algorithm(format!(
            "spectrum supports qcmx and qeom, not `{other}`"
        ))),
    }
}

fn run_command(args: &RunArgs, verbose: bool, mode: Mode) -> Result<(), CliError> {
    let (job, provenance) = load_job(args)?;
    if mode == Mode::Spectrum && !matches!(job.algorithm.as_str(), "qcmx" | "qeom") {
        return Err(CliError::Algorithm(format!(
            "spectrum supports qcmx and qeom, not `{}`",
            job.algorithm
        )));
    }
    // Load every Hamiltonian first so input errors surface before any work.
    let hamiltonians = job
        .points
        .iter()
        .map(|(_, p)| load_hamiltonian(p))
        .collect::<Result<Vec<_>, _>>()?;

    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for ((label, path), obs) in job.points.iter().zip(hamiltonians) {
        if verbose {
            eprintln!("qcx: {} on {} ({})", job.algorithm, label, path.display());
        }
        let started = Instant::now();
        let buf = run_point(&job, obs)?;
        let mut row = vec![label.clone()];
        let cols: Vec<String> = match mode {
            Mode::Run => {
                let (cols, values) = run_row(&job.algorithm, &buf)?;
                row.extend(values);
                cols.into_iter().map(String::from).collect()
            }
            Mode::Spectrum => {
                let (cols, values) = spectrum_row(&job.algorithm, &buf)?;
                row.extend(values.into_iter().map(format_real));
                cols
            }
        };
        if verbose {
            eprintln!("qcx:   done in {:.3} s", started.elapsed().as_secs_f64());
        }
        // Sweep points may report different numbers of levels; keep the
        // widest header and pad short rows.
        match &mut header {
            Some(h) if h.len() >= cols.len() => {}
            h => *h = Some(cols),
        }
        rows.push(row);
    }
    let mut columns = vec!["label".to_string()];
    columns.extend(header.unwrap_or_default());
    let table = Table::new(columns, rows);
    emit(&provenance, &table, args.out.as_deref())
}

fn emit(provenance: &Provenance, table: &Table, out: Option<&Path>) -> Result<(), CliError> {
    let text = table.render(provenance);
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Algorithm(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench_uccsd(args: &BenchArgs, verbose: bool) -> Result<(), CliError> {
    if args.repeats == 0 {
        return Err(CliError::Parse("--repeats must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for &nq in &args.nq {
        for &ne in &args.ne {
            let spec = match UccsdSpec::new(ne, nq) {
                Ok(s) if ne < nq / 2 => s,
                Ok(_) => {
                    eprintln!("qcx: warning: skipping nq = {nq}, ne = {ne}: timings are reported for ne < nq/2");
                    continue;
                }
                Err(e) => {
                    eprintln!("qcx: warning: skipping nq = {nq}, ne = {ne}: {e}");
                    continue;
                }
            };
            let mut best = f64::INFINITY;
            let mut counts = None;
            for _ in 0..args.repeats {
                let t = Instant::now();
                let (_, c) = uccsd_with_counts(spec).map_err(algo_err)?;
                best = best.min(t.elapsed().as_secs_f64());
                counts = Some(c);
            }
            let c = counts.expect("repeats >= 1");
            debug_assert_eq!(Some(c.doubles as u128), count_double_excitations(nq, ne).ok());
            if verbose {
                eprintln!("qcx: nq = {nq}, ne = {ne}: {} doubles, best {best:.6} s", c.doubles);
            }
            rows.push(vec![
                nq.to_string(),
                ne.to_string(),
                c.doubles.to_string(),
                c.singles.to_string(),
                c.variables.to_string(),
                c.gates.to_string(),
                format!("{best:.6}"),
            ]);
        }
    }
    let columns = ["nq", "ne", "doubles", "singles", "variables", "gates", "best-seconds"]
        .map(String::from)
        .to_vec();
    let provenance = Provenance {
        units: Some("seconds"),
        ..Default::default()
    };
    emit(&provenance, &Table::new(columns, rows), args.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["qcx", "frobnicate"]), 1);
        assert_eq!(main_with_args(["qcx", "run"]), 1);
    }

    #[test]
    fn missing_config_is_a_parse_error() {
        let code = main_with_args(["qcx", "run", "--config", "/nonexistent/qcx.cfg"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn list_names_every_kind() {
        let s = list_services();
        for k in ServiceKind::ALL {
            assert!(s.contains(&format!("{k}:")));
        }
        assert!(s.contains("vqe") && s.contains("parameter-shift"));
    }
}
