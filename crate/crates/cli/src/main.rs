//! Command-line front end for the two-runtime circuit semantics library:
//! law checking, circuit compilation to channel matrices, exact program
//! execution with dynamic lifting, and bundled example programs.
//!
//! Exit codes are a stable contract: `0` success, `1` a law suite failed,
//! `2` usage, parse, or input errors. All outputs are byte-deterministic
//! given the same inputs, flags, and seed; JSON goes to stdout (or `--out`),
//! progress lines go to stderr.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use twotime_core::exec::{run as run_program, Program};
use twotime_core::interp::{interpret_circuit, load_signature, GateInterp};
use twotime_core::laws::{check_by_name, law_names, LawConfig};
use twotime_core::quantum::{is_cp, is_tp};
use twotime_core::{Circuit, Signature};

/// Fallback seed when neither `--seed` nor `TWOTIME_SEED` is given.
const DEFAULT_SEED: u64 = 7;

/// Hard ceiling on `--max-wires`: vectorized channel matrices grow
/// exponentially in the wire count.
const WIRE_CEILING: usize = 10;

#[derive(Parser)]
#[command(
    name = "twotime",
    version,
    about = "Two-runtime circuit semantics: check laws, compile circuits to channels, run programs with dynamic lifting"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Tolerance for validating compiled channels and executed states.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Seed for randomized law suites and sampling. Falls back to the
    /// TWOTIME_SEED environment variable, then to 7.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Upper bound on parallel wires accepted by `compile` (at most 10).
    #[arg(long, global = true, default_value_t = WIRE_CEILING)]
    max_wires: usize,
    /// JSON gate-signature file to use instead of the stock signature.
    #[arg(long, global = true)]
    signature: Option<PathBuf>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run law suites and emit their reports as a JSON list.
    Check {
        /// Law suite to run (repeatable); defaults to every suite.
        #[arg(long = "law", value_name = "NAME")]
        laws: Vec<String>,
    },
    /// Interpret a circuit file into its channel matrix with a CP/TP report.
    Compile {
        /// Circuit file in the wire JSON format.
        circuit: PathBuf,
    },
    /// Execute a program file and print its exact branch distribution.
    Run {
        /// Program file in the statement JSON format.
        program: PathBuf,
        /// Also draw this many samples from the distribution (seeded).
        #[arg(long, value_name = "N")]
        sample: Option<usize>,
    },
    /// Write a bundled example program and the stock signature to disk.
    Examples {
        /// One of: coinflip, teleport, box-demo.
        name: String,
        /// Directory to write the files into.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

/// Any failure that should stop the command: all of them exit with code 2.
/// Law *violations* are not errors — `check` reports them and exits 1.
struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

/// Resolved global configuration after defaulting and validation.
struct Config {
    tolerance: f64,
    seed: u64,
    max_wires: usize,
    signature: Signature,
    interp: GateInterp,
    out: Option<PathBuf>,
}

impl Config {
    fn resolve(args: ConfigArgs) -> Result<Config, CliError> {
        let tolerance_ok = args.tolerance.is_finite() && args.tolerance > 0.0;
        if !tolerance_ok {
            return Err(CliError(format!(
                "--tolerance must be positive, got {}",
                args.tolerance
            )));
        }
        if args.max_wires > WIRE_CEILING {
            return Err(CliError(format!(
                "--max-wires must be at most {WIRE_CEILING}, got {}",
                args.max_wires
            )));
        }
        let seed = match args.seed {
            Some(s) => s,
            None => match std::env::var("TWOTIME_SEED") {
                Ok(text) => text
                    .parse()
                    .map_err(|_| CliError(format!("TWOTIME_SEED is not an integer: {text}")))?,
                Err(_) => DEFAULT_SEED,
            },
        };
        let (signature, interp) = match &args.signature {
            Some(path) => load_signature(&read(path)?)?,
            None => GateInterp::stock(),
        };
        Ok(Config {
            tolerance: args.tolerance,
            seed,
            max_wires: args.max_wires,
            signature,
            interp,
            out: args.out,
        })
    }

    /// Sends the command's JSON to `--out` or stdout, newline-terminated.
    fn emit(&self, value: &serde_json::Value) -> Result<(), CliError> {
        let text = format!("{}\n", serde_json::to_string_pretty(value)?);
        match &self.out {
            Some(path) => fs::write(path, text)
                .map_err(|e| CliError(format!("writing {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("reading {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match Config::resolve(cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Check { laws } => cmd_check(&config, &laws),
        Command::Compile { circuit } => cmd_compile(&config, &circuit),
        Command::Run { program, sample } => cmd_run(&config, &program, sample),
        Command::Examples { name, dir } => cmd_examples(&config, &name, &dir),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs the selected law suites; exits 0 only when every report passes.
fn cmd_check(config: &Config, laws: &[String]) -> Result<ExitCode, CliError> {
    let law_config = LawConfig {
        seed: config.seed,
        ..LawConfig::default()
    };
    let names: Vec<String> = if laws.is_empty() {
        law_names()
    } else {
        laws.to_vec()
    };
    let mut reports = Vec::with_capacity(names.len());
    for name in &names {
        let report = check_by_name(name, &law_config)?;
        eprintln!(
            "{}: {} ({} instances, max deviation {:.3e}, tolerance {:.1e})",
            report.law,
            if report.pass { "pass" } else { "FAIL" },
            report.instances,
            report.max_deviation,
            report.tolerance,
        );
        reports.push(report);
    }
    let all_pass = reports.iter().all(|r| r.pass);
    config.emit(&serde_json::to_value(&reports)?)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Interprets a circuit file and dumps its channel matrix with a CP/TP
/// report.
fn cmd_compile(config: &Config, path: &Path) -> Result<ExitCode, CliError> {
    let circuit = Circuit::from_json_str(&config.signature, &read(path)?)?;

    // The frontier never exceeds the wire bound: track the running width.
    let mut width = circuit.dom().len();
    let mut peak = width;
    for node in circuit.nodes() {
        width = width - node.ins.len() + node.outs.len();
        peak = peak.max(width);
    }
    if peak > config.max_wires {
        return Err(CliError(format!(
            "too many wires: circuit reaches {peak} parallel wires, limit {}",
            config.max_wires
        )));
    }

    let op = interpret_circuit(&config.interp, &circuit)?;
    let cp = is_cp(&op, config.tolerance);
    let tp = is_tp(&op, config.tolerance);
    let matrix: Vec<Vec<[f64; 2]>> = (0..op.mat().nrows())
        .map(|i| {
            (0..op.mat().ncols())
                .map(|j| [op.mat()[(i, j)].re, op.mat()[(i, j)].im])
                .collect()
        })
        .collect();
    config.emit(&json!({
        "dom": circuit.dom().types(),
        "cod": circuit.cod().types(),
        "rows": op.mat().nrows(),
        "cols": op.mat().ncols(),
        "matrix": matrix,
        "completely_positive": {
            "pass": cp.pass,
            "min_choi_eigenvalue": cp.min_choi_eigenvalue,
            "hermiticity_deviation": cp.hermiticity_deviation,
        },
        "trace_preserving": {
            "pass": tp.pass,
            "max_deviation": tp.max_deviation,
        },
    }))?;
    Ok(ExitCode::SUCCESS)
}

/// Executes a program file exactly; optionally samples the resulting
/// distribution with the seeded generator.
fn cmd_run(config: &Config, path: &Path, sample: Option<usize>) -> Result<ExitCode, CliError> {
    let program = Program::from_json_str(&read(path)?)?;
    let computation = run_program(&config.interp, &config.signature, &program)?;
    let mut value = computation.to_json();
    if let Some(shots) = sample {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let counts = computation.sample(&mut rng, shots);
        value["samples"] = counts
            .into_iter()
            .map(|(params, count)| json!({ "params": params, "count": count }))
            .collect();
        value["shots"] = json!(shots);
        value["seed"] = json!(config.seed);
    }
    config.emit(&value)?;
    Ok(ExitCode::SUCCESS)
}

const EXAMPLES: &[(&str, &str)] = &[
    ("coinflip", include_str!("../assets/coinflip.program.json")),
    ("teleport", include_str!("../assets/teleport.program.json")),
    ("box-demo", include_str!("../assets/box-demo.program.json")),
];

const STOCK_SIGNATURE: &str = include_str!("../assets/stock.signature.json");

/// Writes `<name>.program.json` and `stock.signature.json` into `dir`.
fn cmd_examples(_config: &Config, name: &str, dir: &Path) -> Result<ExitCode, CliError> {
    let Some((_, text)) = EXAMPLES.iter().find(|(n, _)| *n == name) else {
        let known: Vec<&str> = EXAMPLES.iter().map(|(n, _)| *n).collect();
        return Err(CliError(format!(
            "unknown example: {name} (known: {})",
            known.join(", ")
        )));
    };
    fs::create_dir_all(dir).map_err(|e| CliError(format!("creating {}: {e}", dir.display())))?;
    let program_path = dir.join(format!("{name}.program.json"));
    fs::write(&program_path, text)
        .map_err(|e| CliError(format!("writing {}: {e}", program_path.display())))?;
    let signature_path = dir.join("stock.signature.json");
    fs::write(&signature_path, STOCK_SIGNATURE)
        .map_err(|e| CliError(format!("writing {}: {e}", signature_path.display())))?;
    eprintln!(
        "wrote {} and {}",
        program_path.display(),
        signature_path.display()
    );
    Ok(ExitCode::SUCCESS)
}
