//! `interferometry` command-line front end.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use interferometry::circuits::{
    build_ev, build_hofmann_context, parse, BombMode, Circuit, HOFMANN_MODULUS,
};
use interferometry::contextuality::{
    chain_segments, check_a1_consistency, nc_bound_bruteforce, run_kcbs, Backend, KcbsError,
    QslEngine,
};
use interferometry::fock::{FockError, FockState};
use interferometry::outcome::SamplingInfo;
use interferometry::qsl::{default_modulus, QslError};
use interferometry::surd::Surd;
use interferometry::{BeamsplitterRatio, PhaseModulus};
use serde_json::{json, Map, Value};

use render::{Format, Report};

#[derive(Parser, Debug)]
#[command(
    name = "interferometry",
    version,
    about = "Single-photon interferometers on a noncontextual QSL model and on exact quantum amplitudes"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "INTERFEROMETRY_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Elitzur-Vaidman bomb tester with a k/n beamsplitter pair.
    Ev {
        #[arg(long, default_value = "1/2")]
        ratio: BeamsplitterRatio,
        #[arg(long, value_enum, default_value_t = Mode::Live)]
        mode: Mode,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a circuit file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Five-context KCBS test on the three-path interferometer.
    Kcbs {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Reference computations that need no simulator.
    Oracle {
        #[arg(value_enum)]
        which: Oracle,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = BackendArg::Qsl)]
    backend: BackendArg,
    /// `exact` or `sampled` for qsl; `exact` or `float` for fock.
    #[arg(long, value_enum, default_value_t = EngineArg::Exact)]
    engine: EngineArg,
    /// Phase modulus for the qsl backend.
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BackendArg {
    Fock,
    Qsl,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EngineArg {
    Exact,
    Float,
    Sampled,
}

impl EngineArg {
    fn name(self) -> &'static str {
        match self {
            EngineArg::Exact => "exact",
            EngineArg::Float => "float",
            EngineArg::Sampled => "sampled",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Dud,
    Live,
    Dephase,
}

impl From<Mode> for BombMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Dud => BombMode::Dud,
            Mode::Live => BombMode::Live,
            Mode::Dephase => BombMode::Dephase,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Oracle {
    KcbsBound,
}

/// Failure with its exit code: 2 for bad input, 1 for a broken invariant.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<QslError> for Failure {
    fn from(e: QslError) -> Self {
        match e {
            QslError::PathConsumed(_)
            | QslError::PhaseOutOfRange { .. }
            | QslError::ThresholdOutOfRange { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<FockError> for Failure {
    fn from(e: FockError) -> Self {
        match e {
            FockError::NormDeviation(_) | FockError::PathMismatch { .. } => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<KcbsError> for Failure {
    fn from(e: KcbsError) -> Self {
        match e {
            KcbsError::Circuit(e) => Failure::Usage(e.to_string()),
            KcbsError::Fock(e) => e.into(),
            KcbsError::Qsl(e) => e.into(),
            other => Failure::Internal(other.to_string()),
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

/// Backend selection after checking the engine/backend pairing.
fn backend(args: &RunArgs, modulus: impl FnOnce() -> u64) -> Result<Backend, Failure> {
    match (args.backend, args.engine) {
        (BackendArg::Fock, EngineArg::Exact) => Ok(Backend::Fock { exact: true }),
        (BackendArg::Fock, EngineArg::Float) => Ok(Backend::Fock { exact: false }),
        (BackendArg::Fock, EngineArg::Sampled) => Err(usage(
            "the fock backend has no sampled engine; use exact or float",
        )),
        (BackendArg::Qsl, EngineArg::Float) => Err(usage(
            "the qsl backend has no float engine; use exact or sampled",
        )),
        (BackendArg::Qsl, engine) => {
            let modulus = PhaseModulus::new(args.modulus.unwrap_or_else(modulus)).map_err(usage)?;
            let engine = match engine {
                EngineArg::Sampled => {
                    let seed = args
                        .seed
                        .ok_or_else(|| usage("--engine sampled needs --seed"))?;
                    if args.samples == 0 {
                        return Err(usage(QslError::ZeroSamples));
                    }
                    QslEngine::Sampled {
                        samples: args.samples,
                        seed,
                    }
                }
                _ => QslEngine::Exact,
            };
            Ok(Backend::Qsl { modulus, engine })
        }
    }
}

fn base_params(backend: &Backend) -> Map<String, Value> {
    let mut params = Map::new();
    if let Backend::Qsl { modulus, .. } = backend {
        params.insert("modulus".into(), json!(modulus.get()));
    }
    params
}

fn circuit_report(
    experiment: &str,
    circuit: &Circuit,
    args: &RunArgs,
    mut params: Map<String, Value>,
) -> Result<Report, Failure> {
    if !circuit.is_runnable() {
        return Err(usage(
            "circuit has no detector or bomb, so a run produces no information",
        ));
    }
    let backend = backend(args, || default_modulus(circuit).get())?;
    params.extend(base_params(&backend));
    let dist = backend.run(circuit)?;
    Ok(Report::outcomes(
        experiment,
        backend.name(),
        args.engine.name(),
        params,
        dist,
    ))
}

fn execute(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Ev { ratio, mode, run } => {
            let circuit = build_ev(*ratio, (*mode).into()).map_err(usage)?;
            let mut params = Map::new();
            params.insert("ratio".into(), json!(ratio.to_string()));
            params.insert("mode".into(), json!(BombMode::from(*mode).to_string()));
            circuit_report("ev", &circuit, run, params)
        }
        Command::Run { file, run } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let circuit = parse(&text).map_err(|e| usage(format!("{}:\n{e}", file.display())))?;
            let mut params = Map::new();
            params.insert("file".into(), json!(file.display().to_string()));
            params.insert("paths".into(), json!(circuit.paths()));
            circuit_report("run", &circuit, run, params)
        }
        Command::Kcbs { run } => {
            let backend = backend(run, || HOFMANN_MODULUS)?;
            let report = run_kcbs(backend)?;
            let (sampling, segments) = match backend {
                Backend::Fock { exact } => {
                    let source = build_hofmann_context(1).map_err(usage)?;
                    let equal = if exact {
                        chain_segments(&FockState::<Surd>::from_source(&source)?)?
                    } else {
                        chain_segments(&FockState::<f64>::from_source(&source)?)?
                    };
                    (None, Some((equal, check_a1_consistency(exact)?)))
                }
                Backend::Qsl {
                    engine: QslEngine::Sampled { samples, seed },
                    ..
                } => (Some(SamplingInfo { samples, seed }), None),
                Backend::Qsl { .. } => (None, None),
            };
            Ok(Report::kcbs(
                backend.name(),
                run.engine.name(),
                base_params(&backend),
                sampling,
                report,
                segments,
            ))
        }
        Command::Oracle {
            which: Oracle::KcbsBound,
        } => Ok(Report::oracle(nc_bound_bruteforce())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = execute(&cli.command).and_then(|report| {
        let text = report
            .render(cli.format)
            .map_err(|e| Failure::Internal(e.to_string()))?;
        match &cli.out {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
