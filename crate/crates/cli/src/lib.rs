//! File formats and the `chebnet` command-line driver.

pub mod commands;
pub mod error;
pub mod expr;
pub mod formats;
pub mod manifest;
pub mod target;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chebnet_core::train::TrainConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::commands::{ApproxBasis, NetKind, Outcome};
use crate::error::CliError;
use crate::formats::{load_expansion, load_network, sig, to_json};
use crate::manifest::RunManifest;
use crate::target::Target;

#[derive(Debug, Parser)]
#[command(name = "chebnet", version, about = "Exact RePU networks from Chebyshev expansions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Primary output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Print the summary as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Reserved; recorded in the manifest.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Allow conditioning runs with N > 500.
    #[arg(long, global = true)]
    pub long: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Chebyshev,
    Legendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Chebnet,
    Powernet,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate a function by a degree-N expansion.
    Approx {
        /// `f1`, `f2`, or an expression in x.
        function: String,
        #[arg(long, value_enum, default_value = "chebyshev")]
        basis: BasisArg,
        #[arg(short = 'N', long = "N")]
        n: usize,
    },
    /// Build a network from an expansion file.
    Construct {
        expansion: PathBuf,
        #[arg(long, value_enum, default_value = "chebnet")]
        kind: KindArg,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Convert a Legendre or Chebyshev expansion to monomials first.
        #[arg(long)]
        via_monomial: bool,
    },
    /// Condition numbers of the basis transforms as CSV.
    Cond {
        /// Comma-separated sections.
        #[arg(long, default_value = "2")]
        s: String,
        /// Comma-separated degrees; may be empty.
        #[arg(short = 'N', long = "N", default_value = "")]
        n: String,
    },
    /// Fine-tune a network on a function with RMSProp.
    Train {
        network: PathBuf,
        function: String,
        #[arg(long, default_value_t = chebnet_core::train::DEFAULT_POINTS)]
        points: usize,
        #[arg(long, default_value_t = 0.99)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-5)]
        eta: f64,
        #[arg(long, default_value_t = 1e-8)]
        epsilon: f64,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        /// Trained network file; defaults to `<output>.trained.json`.
        #[arg(long)]
        trained: Option<PathBuf>,
    },
    /// Legendre, monomial, Chebyshev and hierarchical coefficients as CSV.
    Coeffs {
        function: String,
        #[arg(short = 'N', long = "N")]
        n: usize,
    },
    /// Evaluate a network file.
    Eval {
        network: PathBuf,
        /// Points separated by `;`, coordinates by `,`.
        #[arg(long, conflicts_with = "grid")]
        x: Option<String>,
        /// Number of equispaced points on [-1, 1] (scalar input only).
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Expansion to compare against.
        #[arg(long)]
        expansion: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Invalid(format!("bad {what} value `{t}`"))))
        .collect()
}

fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|p| {
            p.split(',')
                .map(|v| v.trim().parse().map_err(|_| CliError::Invalid(format!("bad coordinate `{v}`"))))
                .collect()
        })
        .collect()
}

fn dispatch(cli: &Cli, manifest: &mut RunManifest) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Approx { function, basis, n } => {
            manifest.param("function", function);
            manifest.param("basis", format!("{basis:?}").to_lowercase());
            manifest.param("N", n);
            let basis = match basis {
                BasisArg::Chebyshev => ApproxBasis::Chebyshev,
                BasisArg::Legendre => ApproxBasis::Legendre,
            };
            commands::approx(&Target::parse(function)?, basis, *n)
        }
        Command::Construct { expansion, kind, s, via_monomial } => {
            manifest.inputs.push(expansion.display().to_string());
            manifest.param("kind", format!("{kind:?}").to_lowercase());
            manifest.param("s", s);
            manifest.param("via_monomial", via_monomial);
            let e = load_expansion(&read(expansion)?)?;
            let kind = match kind {
                KindArg::Chebnet => NetKind::ChebNet,
                KindArg::Powernet => NetKind::PowerNet,
            };
            commands::construct(&e, kind, *s, *via_monomial)
        }
        Command::Cond { s, n } => {
            manifest.param("s", s);
            manifest.param("N", n);
            manifest.param("long", g.long);
            commands::cond(&parse_list(s, "s")?, &parse_list(n, "N")?, g.long)
        }
        Command::Train { network, function, points, gamma, eta, epsilon, iterations, trained } => {
            manifest.inputs.push(network.display().to_string());
            manifest.param("function", function);
            manifest.param("points", points);
            manifest.param("gamma", gamma);
            manifest.param("eta", eta);
            manifest.param("epsilon", epsilon);
            manifest.param("iterations", iterations);
            let net = load_network(&read(network)?)?;
            let trained_path = trained.clone().or_else(|| g.output.as_ref().map(|o| o.with_extension("trained.json")));
            let config = TrainConfig {
                gamma: *gamma,
                eta: *eta,
                epsilon: *epsilon,
                iterations: *iterations,
                ..TrainConfig::default()
            };
            commands::train_cmd(commands::TrainRequest {
                network: &net,
                target: &Target::parse(function)?,
                points: *points,
                config,
                trained_path,
            })
        }
        Command::Coeffs { function, n } => {
            manifest.param("function", function);
            manifest.param("N", n);
            commands::coeffs(&Target::parse(function)?, *n)
        }
        Command::Eval { network, x, grid, expansion } => {
            manifest.inputs.push(network.display().to_string());
            let net = load_network(&read(network)?)?;
            let points = match x {
                Some(text) => parse_points(text)?,
                None if net.input_dim() == 1 => commands::grid(*grid).into_iter().map(|x| vec![x]).collect(),
                None => return Err(CliError::Invalid("--x is required for multivariate networks".into())),
            };
            if let Some(p) = points.iter().find(|p| p.len() != net.input_dim()) {
                return Err(CliError::Invalid(format!(
                    "point has {} coordinates, network expects {}",
                    p.len(),
                    net.input_dim()
                )));
            }
            let reference = match expansion {
                Some(path) => {
                    manifest.inputs.push(path.display().to_string());
                    Some(load_expansion(&read(path)?)?)
                }
                None => None,
            };
            manifest.param("points", points.len());
            commands::eval(&net, &points, reference.as_ref())
        }
    }
}

fn human(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sig(n.as_f64().expect("f64"), 6),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn print_summary(outcome: &Outcome, as_json: bool, sink: &mut dyn Write) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: "<stdout>".into(), source };
    if as_json {
        let map: serde_json::Map<String, Value> = outcome.summary.iter().cloned().collect();
        sink.write_all(to_json(&Value::Object(map))?.as_bytes()).map_err(io_err)?;
        return Ok(());
    }
    for (k, v) in &outcome.summary {
        if let Value::Array(rows) = v {
            for row in rows {
                writeln!(sink, "{k}: {}", row).map_err(io_err)?;
            }
        } else {
            writeln!(sink, "{k}: {}", human(v)).map_err(io_err)?;
        }
    }
    Ok(())
}

/// Runs one invocation. The primary artifact goes to `--output` (the summary
/// then goes to `stdout`) or to `stdout` (the summary then goes to `stderr`).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            write!(stdout, "{e}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Invalid(e.to_string())),
    };
    let started = Instant::now();
    let name = format!("{:?}", cli.command).split([' ', '{']).next().unwrap_or_default().to_lowercase();
    let mut manifest = RunManifest::new(&name);
    if let Some(seed) = cli.global.seed {
        manifest.param("seed", seed);
    }
    let outcome = dispatch(&cli, &mut manifest)?;

    let mut summary_to_stdout = false;
    for artifact in &outcome.artifacts {
        match (&artifact.path, &cli.global.output) {
            (Some(path), _) | (None, Some(path)) => {
                write(path, &artifact.contents)?;
                manifest.outputs.push(path.display().to_string());
                summary_to_stdout |= artifact.path.is_none();
            }
            (None, None) => stdout
                .write_all(artifact.contents.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
        }
    }
    print_summary(&outcome, cli.global.json, if summary_to_stdout { stdout } else { stderr })?;

    if let Some(output) = &cli.global.output {
        manifest.duration_secs = started.elapsed().as_secs_f64();
        let mut path = output.clone().into_os_string();
        path.push(".manifest.json");
        write(Path::new(&path), &to_json(&manifest)?)?;
    }
    Ok(())
}
