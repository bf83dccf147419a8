use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shared_asymmetry::charge::decompose_internal_states;
use shared_asymmetry::entanglement::{oracle_min_relative_entropy, verify_theorem, OracleConfig};
use shared_asymmetry::measures::{
    coherence_work_bound, holevo_asymmetry, inputs_digest, internal_coherence, shared_asymmetry, upper_bound,
    MeasureReport,
};
use shared_asymmetry::operator::{partial_trace, read_density, von_neumann_entropy, Subsystem};
use shared_asymmetry::scenario::{export, import_json, run_scenario, Format, ScenarioName, ScenarioSpec};
use shared_asymmetry::{BipartiteSystem, DensityOperator, Error, ToleranceConfig};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_INPUT: u8 = 1;

#[derive(Parser)]
#[command(name = "shasym", version, about = "Shared asymmetry and sector entanglement of U(1)-charged bipartite states")]
struct Cli {
    /// Logarithm base for reported values: a number, or `e`.
    #[arg(long, global = true)]
    log_base: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on a state.
    Compute {
        measure: Measure,
        #[arg(long)]
        state: PathBuf,
        /// JSON `{"spectrum_s": {"charges": [...]}, "spectrum_r": {...}}`.
        #[arg(long)]
        spectra: PathBuf,
        /// Temperature for `work-bound`, in units where `k_B = 1`.
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
    },
    /// Run a named scenario and print the sweep.
    Scenario {
        name: String,
        /// Main dimension of the scenario.
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        seed: Option<i64>,
        /// Extra scenario parameter as `key=value`; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Compare shared asymmetry with the weighted sector entanglement.
    VerifyTheorem {
        #[arg(long)]
        state: PathBuf,
        /// Defaults to ladder spectra on a square `d x d` split.
        #[arg(long)]
        spectra: Option<PathBuf>,
    },
    /// Numerically minimize the relative entropy to separable states.
    Oracle {
        #[arg(long)]
        state: PathBuf,
        /// Local dimensions `d1xd2`; defaults to a square split.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Also print the best ansatz.
        #[arg(long)]
        ansatz: bool,
    },
    /// Convert a sweep printed by `scenario` (JSON) to another format.
    Export {
        #[arg(long, value_enum)]
        format: OutputFormat,
        /// Sweep JSON; reads stdin when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    SharedAsymmetry,
    InternalCoherence,
    HolevoS,
    HolevoR,
    Entropy,
    UpperBound,
    WorkBound,
    Sectors,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

enum Failure {
    Input(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

fn tolerances(log_base: Option<&str>) -> Result<ToleranceConfig, Error> {
    let tol = ToleranceConfig::from_env()?;
    match log_base {
        None => Ok(tol),
        Some("e") => tol.with_log_base(std::f64::consts::E),
        Some(s) => {
            let base = s
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("log base must be a number or `e`, got `{s}`")))?;
            tol.with_log_base(base)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path, tol: &ToleranceConfig) -> Result<DensityOperator, Error> {
    read_density(open(path)?, tol)
}

fn load_system(path: &Path) -> Result<BipartiteSystem, Error> {
    Ok(serde_json::from_reader(open(path)?)?)
}

fn square_split(dim: usize) -> Result<usize, Error> {
    let d = (dim as f64).sqrt().round() as usize;
    if d * d != dim {
        return Err(Error::Input(format!(
            "dimension {dim} is not a square; give the split explicitly"
        )));
    }
    Ok(d)
}

fn print_json(value: &impl Serialize) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let tol = tolerances(cli.log_base.as_deref())?;
    match cli.command {
        Command::Compute {
            measure,
            state,
            spectra,
            temperature,
        } => compute(measure, &state, &spectra, temperature, &tol),
        Command::Scenario {
            name,
            d,
            seed,
            params,
            format,
        } => {
            let name: ScenarioName = name.parse()?;
            let mut spec = ScenarioSpec::new(name);
            if let Some(d) = d {
                let key = name
                    .dimension_param()
                    .ok_or_else(|| Error::InvalidArgument(format!("scenario {name} takes no dimension")))?;
                spec = spec.with(key, d);
            }
            if let Some(seed) = seed {
                spec = spec.with("seed", seed);
            }
            for p in params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| Error::Input(format!("parameter `{p}` is not key=value")))?;
                let v: i64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("parameter `{k}` needs an integer value")))?;
                spec = spec.with(k.trim(), v);
            }
            let result = run_scenario(&spec, &tol)?;
            export(&result, format.into(), io::stdout().lock())?;
            let failures = result.failures();
            if !failures.is_empty() {
                let params: Vec<String> = failures.iter().map(|r| r.param.to_string()).collect();
                return Err(Failure::Check(format!(
                    "{name}: {} row(s) failed at {} = {}",
                    failures.len(),
                    result.axis,
                    params.join(", ")
                )));
            }
            Ok(())
        }
        Command::VerifyTheorem { state, spectra } => {
            let rho = load_state(&state, &tol)?;
            let system = match spectra {
                Some(path) => load_system(&path)?,
                None => {
                    let d = square_split(rho.dim())?;
                    BipartiteSystem::ladder(d, d)?
                }
            };
            let check = verify_theorem(&rho, &system, &tol)?;
            print_json(&check)?;
            if !check.holds() {
                return Err(Failure::Check(format!("theorem difference {:e}", check.difference)));
            }
            Ok(())
        }
        Command::Oracle {
            state,
            dims,
            restarts,
            seed,
            max_iters,
            ansatz,
        } => {
            let rho = load_state(&state, &tol)?;
            let (d1, d2) = match dims {
                Some(s) => parse_dims(&s)?,
                None => {
                    let d = square_split(rho.dim())?;
                    (d, d)
                }
            };
            let mut config = OracleConfig::for_dims(d1, d2, seed).with_restarts(restarts);
            if let Some(n) = max_iters {
                config.max_iters = n;
            }
            let result = oracle_min_relative_entropy(&rho, d1, d2, &config, &tol)?;
            if ansatz {
                #[derive(Serialize)]
                struct WithAnsatz<'a, T: Serialize> {
                    #[serde(flatten)]
                    result: &'a T,
                    best_ansatz: Vec<shared_asymmetry::entanglement::ComponentRecord>,
                }
                print_json(&WithAnsatz {
                    result: &result,
                    best_ansatz: result.best_ansatz.to_records(),
                })?;
            } else {
                print_json(&result)?;
            }
            Ok(())
        }
        Command::Export { format, input } => {
            let result = match input {
                Some(path) => import_json(open(&path)?)?,
                None => import_json(io::stdin().lock())?,
            };
            export(&result, format.into(), io::stdout().lock())?;
            Ok(())
        }
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Input(format!("dims must look like 3x3, got `{s}`"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn compute(measure: Measure, state: &Path, spectra: &Path, temperature: f64, tol: &ToleranceConfig) -> CliResult {
    let rho = load_state(state, tol)?;
    let system = load_system(spectra)?;
    if rho.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            actual: rho.dim(),
        }
        .into());
    }
    let digest = inputs_digest(&rho, Some(&system));
    let (name, value) = match measure {
        Measure::SharedAsymmetry => ("shared_asymmetry", shared_asymmetry(&rho, &system, tol)?),
        Measure::InternalCoherence => ("internal_coherence", internal_coherence(&rho, &system, tol)?),
        Measure::HolevoS => {
            let rho_s = partial_trace(&rho, system.d_s(), system.d_r(), Subsystem::S)?;
            ("holevo_asymmetry_s", holevo_asymmetry(&rho_s, &system.spectrum_s, tol)?)
        }
        Measure::HolevoR => {
            let rho_r = partial_trace(&rho, system.d_s(), system.d_r(), Subsystem::R)?;
            ("holevo_asymmetry_r", holevo_asymmetry(&rho_r, &system.spectrum_r, tol)?)
        }
        Measure::Entropy => ("von_neumann_entropy", von_neumann_entropy(&rho, tol)?),
        Measure::UpperBound => ("upper_bound", upper_bound(&system, None, tol)?),
        Measure::WorkBound => (
            "coherence_work_bound",
            coherence_work_bound(&rho, &system, temperature, tol)?,
        ),
        Measure::Sectors => {
            let decomposition = decompose_internal_states(&rho, &system, tol)?;
            print_json(&decomposition)?;
            return Ok(());
        }
    };
    print_json(&MeasureReport::new(name, value, tol, digest))?;
    Ok(())
}
