use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ladder_mps::ModelSpec;
use ladder_mps_cli::hamiltonian_cmd::{cmd_hamiltonian, HamiltonianInput};
use ladder_mps_cli::scan::{cmd_scan, ScanSpec, SweepRange};
use ladder_mps_cli::verify::{report_json, run_verify};
use ladder_mps_cli::{read_json, write_output, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "ladder-mps",
    about = "Spin-1/2 ladder matrix product states: sweeps, verification, parent Hamiltonians",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a family parameter on a grid and tabulate the closed-form
    /// observables.
    Scan {
        /// JSON scan description; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// class_a | class_b | spin_flip
        #[arg(long)]
        family: Option<String>,
        /// Swept range as min:max:step.
        #[arg(long, value_name = "MIN:MAX:STEP", allow_hyphen_values = true)]
        param_grid: Option<String>,
        /// Swept parameter name (x, u or g); defaults to the family's natural one.
        #[arg(long)]
        param: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        /// Transverse parameter for spin_flip x-sweeps.
        #[arg(long)]
        mu_t: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Comma-separated subset of S,C,zz,nn,xi_z,xi_n,lambda.
        #[arg(long)]
        outputs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv (default) or json.
        #[arg(long)]
        format: Option<String>,
    },
    /// Run the invariants and closed-form checks that apply to one model.
    Verify {
        /// Model parameters as JSON: {family, a, b, g, epsilon, sigma, u}.
        params: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest ring used by the dense-oracle checks.
        #[arg(long = "N", default_value_t = 5)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the parent-Hamiltonian couplings (printed formulas and Pauli
    /// expansion, with deltas) for class-A parameters plus weights.
    Hamiltonian {
        /// JSON input: {a, g, epsilon, sigma, weights: {mu_22, ...}}.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the transfer operator and its spectrum for a model.
    Spectrum {
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the dense state vector of a finite ring to a binary file.
    State {
        params: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_grid(text: &str) -> CliResult<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Parse(format!(
            "--param-grid expects min:max:step, got `{text}`"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::Parse(format!("bad grid number `{p}`")))
        })
        .collect::<CliResult<_>>()?;
    Ok((nums[0], nums[1], nums[2]))
}

#[allow(clippy::too_many_arguments)]
fn assemble_scan_spec(
    config: Option<PathBuf>,
    family: Option<String>,
    param_grid: Option<String>,
    param: Option<String>,
    epsilon: Option<f64>,
    sigma: Option<f64>,
    mu_t: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    outputs: Option<String>,
    out: Option<PathBuf>,
    format: Option<String>,
) -> CliResult<ScanSpec> {
    let mut spec: ScanSpec = match config {
        Some(path) => read_json(&path)?,
        None => {
            let family = family.clone().ok_or_else(|| {
                CliError::Parse("scan needs --config or --family".into())
            })?;
            let default_param = match family.as_str() {
                "class_b" => "u",
                _ => "x",
            };
            ScanSpec {
                family,
                sweep: SweepRange {
                    param: default_param.into(),
                    min: 0.0,
                    max: 0.0,
                    step: 0.0,
                },
                epsilon: None,
                sigma: None,
                mu_t: None,
                a: None,
                b: None,
                outputs: None,
                out: None,
                format: None,
            }
        }
    };
    if let Some(f) = family {
        spec.family = f;
    }
    if let Some(grid) = param_grid {
        let (min, max, step) = parse_grid(&grid)?;
        spec.sweep.min = min;
        spec.sweep.max = max;
        spec.sweep.step = step;
    }
    if let Some(p) = param {
        spec.sweep.param = p;
    }
    if epsilon.is_some() {
        spec.epsilon = epsilon;
    }
    if sigma.is_some() {
        spec.sigma = sigma;
    }
    if mu_t.is_some() {
        spec.mu_t = mu_t;
    }
    if a.is_some() {
        spec.a = a;
    }
    if b.is_some() {
        spec.b = b;
    }
    if let Some(o) = outputs {
        spec.outputs = Some(o.split(',').map(|s| s.trim().to_string()).collect());
    }
    if out.is_some() {
        spec.out = out;
    }
    if format.is_some() {
        spec.format = format;
    }
    Ok(spec)
}

fn run() -> CliResult<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Scan {
            config,
            family,
            param_grid,
            param,
            epsilon,
            sigma,
            mu_t,
            a,
            b,
            outputs,
            out,
            format,
        } => {
            let spec = assemble_scan_spec(
                config, family, param_grid, param, epsilon, sigma, mu_t, a, b, outputs, out,
                format,
            )?;
            let output = cmd_scan(&spec)?;
            if let Some(path) = &spec.out {
                eprintln!(
                    "wrote {} rows ({}) to {}",
                    output.rows.len(),
                    output.format,
                    path.display()
                );
            } else {
                print!("{}", output.rendered);
            }
            Ok(())
        }
        Command::Verify {
            params,
            seed,
            n,
            out,
        } => {
            let spec: ModelSpec = read_json(&params)?;
            let report = run_verify(&spec, seed, n)?;
            let doc = report_json(&spec, seed, &report);
            write_output(
                out.as_deref(),
                &serde_json::to_string_pretty(&doc).expect("report serializes"),
            )?;
            if report.all_ok {
                Ok(())
            } else {
                let failing: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.in_good_standing())
                    .map(|c| c.name.as_str())
                    .collect();
                Err(CliError::Failed(format!(
                    "verification failed: {}",
                    failing.join(", ")
                )))
            }
        }
        Command::Hamiltonian { input, out } => {
            let input: HamiltonianInput = read_json(&input)?;
            let doc = cmd_hamiltonian(&input)?;
            write_output(
                out.as_deref(),
                &serde_json::to_string_pretty(&doc).expect("report serializes"),
            )
        }
        Command::Spectrum { params, out } => {
            let spec: ModelSpec = read_json(&params)?;
            let doc = ladder_mps_cli::cmd_spectrum(&spec)?;
            write_output(
                out.as_deref(),
                &serde_json::to_string_pretty(&doc).expect("report serializes"),
            )
        }
        Command::State { params, n, out } => {
            let spec: ModelSpec = read_json(&params)?;
            let doc = ladder_mps_cli::cmd_state(&spec, n, &out)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("report serializes")
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
