//! `qcharge`: EV charging schedules through QCIO, QUBO, Ising and QAOA.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcharge_core::{BitOrder, EncodingScheme};

#[derive(Debug, Parser)]
#[command(name = "qcharge", version, about = "Quantum-inspired EV charging schedule optimization")]
pub struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Bitstring rendering: `device` puts qubit 0 rightmost, `variable` leftmost.
    #[arg(long, global = true, default_value = "device")]
    pub bit_order: BitOrder,

    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "QAOA_CHARGE_JOBS")]
    pub jobs: Option<usize>,

    /// Leave timestamps out of records so outputs are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Charging-unit model.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Exhaustive minimum of the constrained problem (or its QUBO).
    SolveExact(SolveExactArgs),
    /// Penalized binary form.
    #[command(subcommand)]
    Qubo(QuboCommand),
    /// Pauli-Z cost Hamiltonian.
    #[command(subcommand)]
    Ising(IsingCommand),
    /// QAOA simulation and parameter search.
    #[command(subcommand)]
    Qaoa(QaoaCommand),
    /// Exact p = 1 energy landscape over [0, pi] x [0, 2 pi].
    Landscape(LandscapeArgs),
    /// Hardware gate budgets.
    #[command(subcommand)]
    Transpile(TranspileCommand),
    /// Readout-error mitigation of measured counts.
    Mitigate(MitigateArgs),
    /// Fidelity between two outcome distributions.
    Fidelity(FidelityArgs),
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Print the integer program and its matrices.
    Show(InstanceArgs),
}

#[derive(Debug, Subcommand)]
pub enum QuboCommand {
    /// Build and print the QUBO.
    Build(QuboBuildArgs),
}

#[derive(Debug, Subcommand)]
pub enum IsingCommand {
    /// Render the Hamiltonian and its offset.
    Show(ProblemArgs),
}

#[derive(Debug, Subcommand)]
pub enum QaoaCommand {
    /// Evaluate fixed angles: statevector dump or sampled counts.
    Run(QaoaRunArgs),
    /// Multi-start Nelder-Mead search for good angles.
    Optimize(QaoaOptimizeArgs),
}

#[derive(Debug, Subcommand)]
pub enum TranspileCommand {
    /// Routed gate budgets per seed against the fully connected baseline.
    Report(TranspileArgs),
}

/// Instance file format:
/// {"charging_unit": {"id": str, "number_charging_levels": int, "number_time_slots": int},
///  "cars": [{"car_id": str, "time_slots_at_charging_unit": [int], "required_energy": int}]}
#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Problem instance JSON.
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Auto,
    Value(f64),
}

impl std::str::FromStr for Rho {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Rho::Auto);
        }
        let v: f64 = s.parse().map_err(|_| format!("expected a number or 'auto', got '{s}'"))?;
        if !v.is_finite() || v < 0.0 {
            return Err(format!("penalty must be finite and nonnegative, got {s}"));
        }
        Ok(Rho::Value(v))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,

    /// Penalty weight, or `auto` for the smallest feasible value on a 0.1 grid.
    #[arg(long, default_value = "auto")]
    pub rho: Rho,

    /// Integer-to-binary encoding: `bounded` or `fixed:N`.
    #[arg(long, default_value = "bounded")]
    pub encoding: EncodingScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExactForm {
    /// Constrained integer program.
    Integer,
    /// Penalized QUBO (needs a penalty).
    Qubo,
}

#[derive(Debug, Args)]
pub struct SolveExactArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, value_enum, default_value = "integer")]
    pub form: ExactForm,

    /// Most minimizers listed.
    #[arg(long, default_value_t = qcharge_core::exact::DEFAULT_TIE_CAP)]
    pub tie_cap: usize,
}

#[derive(Debug, Args)]
pub struct QuboBuildArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Also write the QUBO export ({"n", "quadratic": [[i, j, v]], "linear", "constant"}) here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    /// Number of QAOA layers; defaults to the number of angles given.
    #[arg(long)]
    pub p: Option<usize>,

    /// Comma-separated mixer angles.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub betas: Vec<f64>,

    /// Comma-separated phase angles.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub gammas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct QaoaRunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[command(flatten)]
    pub angles: AngleArgs,

    /// Dump the exact statevector instead of sampling.
    #[arg(long, conflicts_with_all = ["shots", "noise"])]
    pub exact: bool,

    #[arg(long, default_value_t = 8000)]
    pub shots: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Readout noise JSON: {"qubits": [{"p01": x, "p10": y}, ...]}.
    #[arg(long)]
    pub noise: Option<PathBuf>,

    /// Rows in the annotated solution table.
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,

    /// Write the experiment record here.
    #[arg(long)]
    pub record: Option<PathBuf>,

    #[arg(long, default_value = "statevector")]
    pub backend_label: String,
}

#[derive(Debug, Args)]
pub struct QaoaOptimizeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, default_value_t = 1)]
    pub p: usize,

    #[arg(long, default_value_t = 50)]
    pub starts: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Estimate energies from this many shots instead of exactly.
    #[arg(long)]
    pub shots: Option<u64>,

    #[arg(long, default_value_t = 1000)]
    pub max_fev: usize,

    /// Sample the best angles and write an experiment record here.
    #[arg(long)]
    pub record: Option<PathBuf>,

    /// Shots for the recorded sample.
    #[arg(long, default_value_t = 8000)]
    pub record_shots: u64,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, default_value_t = 100)]
    pub beta_points: usize,

    #[arg(long, default_value_t = 200)]
    pub gamma_points: usize,

    /// Write `beta,gamma,energy` CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TranspileArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, default_value_t = 1)]
    pub p: usize,

    /// `line`, `ring`, `full` (sized to the register) or a JSON file
    /// {"n_qubits": int, "edges": [[a, b], ...]}.
    #[arg(long, default_value = "line")]
    pub coupling_map: String,

    /// Router seeds 0..N.
    #[arg(long, default_value_t = 16)]
    pub seeds: u64,
}

#[derive(Debug, Args)]
pub struct MitigateArgs {
    /// Counts JSON ({"shots", "bit_order", "counts"}) or an experiment record.
    #[arg(long)]
    pub counts: PathBuf,

    /// Readout noise JSON; defaults to the record's noise model.
    #[arg(long)]
    pub noise: Option<PathBuf>,

    /// Write the mitigated distribution here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    /// Distribution ({"bit_order", "probabilities"}), counts or experiment record.
    pub first: PathBuf,

    pub second: PathBuf,

    /// Report the squared convention.
    #[arg(long)]
    pub squared: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return commands::report_error(&commands::CliError::Usage("--jobs must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return commands::report_error(&commands::CliError::Usage(e.to_string()));
        }
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => commands::report_error(&e),
    }
}
