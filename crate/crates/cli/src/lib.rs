//! Implementations behind the `ladder-mps` subcommands: parameter scans with
//! deterministic CSV/JSON output, a per-model verification suite, parent
//! Hamiltonian export, transfer spectrum dumps, and dense-state dumps.

pub mod hamiltonian_cmd;
pub mod scan;
pub mod verify;

use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

pub const REPORT_VERSION: &str = "1";

/// Errors are split by exit code: bad input documents exit with 2 like usage
/// errors, semantic failures (failed checks, invalid physics parameters)
/// exit with 1.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or unparseable input (exit code 2).
    Parse(String),
    /// Semantically invalid input or failed verification (exit code 1).
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<ladder_mps::Error> for CliError {
    fn from(e: ladder_mps::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("cannot parse {}: {e}", path.display())))
}

/// Top-level report envelope shared by every JSON-emitting command.
pub fn envelope<I: Serialize, R: Serialize>(
    command: &str,
    inputs: &I,
    results: &R,
) -> serde_json::Value {
    json!({
        "version": REPORT_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
    })
}

pub fn write_output(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

/// Transfer spectrum dump for a model description file.
pub fn cmd_spectrum(params: &ladder_mps::ModelSpec) -> CliResult<serde_json::Value> {
    let mps = params.build()?;
    let top = ladder_mps::transfer_matrix(&mps)?;
    let matrix: Vec<Vec<f64>> = (0..4)
        .map(|r| (0..4).map(|c| top.matrix[(r, c)]).collect())
        .collect();
    let eigenvalues: Vec<serde_json::Value> = top
        .eigenvalues
        .iter()
        .map(|z| json!({"re": z.re, "im": z.im}))
        .collect();
    Ok(envelope(
        "spectrum",
        params,
        &json!({
            "matrix": matrix,
            "eigenvalues": eigenvalues,
            "degenerate_top": top.degenerate_top,
        }),
    ))
}

/// Dense-state dump: binary file (8-byte little-endian rung count, then raw
/// f64 amplitudes) plus a small JSON summary on stdout.
pub fn cmd_state(
    params: &ladder_mps::ModelSpec,
    n: usize,
    out: &Path,
) -> CliResult<serde_json::Value> {
    let mps = params.build()?;
    let state = ladder_mps::build_state(&mps, n)?;
    let file = std::fs::File::create(out)
        .map_err(|e| CliError::Failed(format!("cannot create {}: {e}", out.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    state
        .write_binary(&mut writer)
        .map_err(|e| CliError::Failed(format!("write failed: {e}")))?;
    Ok(envelope(
        "state",
        &json!({"params": params, "n": n}),
        &json!({
            "n": n,
            "amplitudes": state.dim(),
            "norm_sq": state.norm_sq(),
            "path": out.display().to_string(),
        }),
    ))
}
