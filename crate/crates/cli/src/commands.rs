//! Subcommand implementations. Each returns the full stdout text.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use qcharge_core::bits::index_to_string;
use qcharge_core::convert::build_qubo;
use qcharge_core::exact::{brute_force_integer_with, brute_force_qubo, min_feasible_penalty, MAX_INTEGER_LEAVES};
use qcharge_core::hardware::{best_of_seeds, count_fully_connected, logical_gate_profile};
use qcharge_core::ising::{qubo_to_ising, PauliTerm};
use qcharge_core::model::{fmt_coef, InstanceFile, FEASIBILITY_TOLERANCE};
use qcharge_core::optimize::{landscape_grid, multi_start};
use qcharge_core::report::{
    annotate_top_k, current_timestamp_stem, fidelity, fidelity_squared, mitigate_distribution, save_record,
    TableRow, SCHEMA_VERSION,
};
use qcharge_core::sim::sample_counts;
use qcharge_core::{
    BitOrder, Distribution, Encoding, EnergyMode, Error, ExperimentRecord, IsingHamiltonian, NelderMeadOptions,
    PenaltySearchForm, QaoaParameters, QuadraticProgram, Qubo, ReadoutNoiseModel,
};
use serde_json::{json, Value};

use crate::input::{self, Outcomes};
use crate::{
    AngleArgs, Cli, Command, ExactForm, FidelityArgs, IsingCommand, LandscapeArgs, MitigateArgs, ModelCommand,
    ProblemArgs, QaoaCommand, QaoaOptimizeArgs, QaoaRunArgs, QuboBuildArgs, QuboCommand, Rho, SolveExactArgs,
    TranspileArgs, TranspileCommand,
};

/// Penalty grid searched for `--rho auto`.
const AUTO_RHO: (f64, f64, f64) = (0.1, 0.1, 50.0);

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource_cap() => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        if self.exit_code() == 3 {
            "resource_cap"
        } else {
            "validation"
        }
    }
}

/// One line on stderr: `error[<kind>]: <message>`.
pub fn report_error(e: &CliError) -> ExitCode {
    let message = e.to_string().replace(['\n', '\r'], " ");
    eprintln!("error[{}]: {message}", e.kind());
    ExitCode::from(e.exit_code())
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let ctx = Context {
        json: cli.json,
        order: cli.bit_order,
        timestamp: !cli.no_timestamp,
    };
    match &cli.command {
        Command::Model(ModelCommand::Show(args)) => ctx.model_show(&args.instance),
        Command::SolveExact(args) => ctx.solve_exact(args),
        Command::Qubo(QuboCommand::Build(args)) => ctx.qubo_build(args),
        Command::Ising(IsingCommand::Show(args)) => ctx.ising_show(args),
        Command::Qaoa(QaoaCommand::Run(args)) => ctx.qaoa_run(args),
        Command::Qaoa(QaoaCommand::Optimize(args)) => ctx.qaoa_optimize(args),
        Command::Landscape(args) => ctx.landscape(args),
        Command::Transpile(TranspileCommand::Report(args)) => ctx.transpile(args),
        Command::Mitigate(args) => ctx.mitigate(args),
        Command::Fidelity(args) => ctx.fidelity(args),
    }
}

struct Context {
    json: bool,
    order: BitOrder,
    timestamp: bool,
}

/// The instance carried through QCIO, QUBO and Ising form.
struct Pipeline {
    instance: input::Instance,
    qcio: QuadraticProgram,
    rho: f64,
    rho_auto: bool,
    qubo: Qubo,
    encoding: Encoding,
    hamiltonian: IsingHamiltonian,
    offset: f64,
}

/// Rows of a matrix rendered with the coefficient formatter.
fn matrix_rows(rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64) -> Vec<String> {
    (0..rows)
        .map(|i| {
            let cells: Vec<String> = (0..cols).map(|j| fmt_coef(at(i, j))).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect()
}

fn resolve_rho(qcio: &QuadraticProgram, rho: Rho) -> Result<(f64, bool), CliError> {
    Ok(match rho {
        Rho::Value(v) => (v, false),
        Rho::Auto => {
            let (start, step, max) = AUTO_RHO;
            (min_feasible_penalty(qcio, PenaltySearchForm::Integer, start, step, max)?, true)
        }
    })
}

fn pipeline(args: &ProblemArgs) -> Result<Pipeline, CliError> {
    input::check_exists(&args.instance.instance)?;
    let instance = input::load_instance(&args.instance.instance)?;
    let qcio = instance.unit.build_qcio();
    let (rho, rho_auto) = resolve_rho(&qcio, args.rho)?;
    let (qubo, encoding) = build_qubo(&qcio, rho, args.encoding)?;
    let (hamiltonian, offset) = qubo_to_ising(&qubo);
    Ok(Pipeline {
        instance,
        qcio,
        rho,
        rho_auto,
        qubo,
        encoding,
        hamiltonian,
        offset,
    })
}

fn params(angles: &AngleArgs) -> Result<QaoaParameters, CliError> {
    let params = QaoaParameters::new(angles.betas.clone(), angles.gammas.clone())?;
    if let Some(p) = angles.p {
        if p != params.layers() {
            return Err(CliError::Usage(format!(
                "--p {p} but {} angle pairs were given",
                params.layers()
            )));
        }
    }
    Ok(params)
}

fn pauli_label(term: PauliTerm, n: usize, order: BitOrder) -> String {
    let mut chars = vec!['I'; n];
    match term {
        PauliTerm::Z(i) => chars[i] = 'Z',
        PauliTerm::ZZ(i, j) => {
            chars[i] = 'Z';
            chars[j] = 'Z';
        }
    }
    if order == BitOrder::Device {
        chars.reverse();
    }
    chars.into_iter().collect()
}

fn to_json(value: &Value) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn render_table(rows: &[TableRow]) -> String {
    let mut out = String::from("bitstring  probability  schedule  cost  feasible\n");
    for r in rows {
        let schedule: Vec<String> = r.integer_vector.iter().map(i64::to_string).collect();
        let _ = writeln!(
            out,
            "{}  {}  ({})  {}  {}",
            r.bitstring,
            r.probability,
            schedule.join(","),
            fmt_coef(r.cost),
            r.is_feasible
        );
    }
    out
}

fn rho_json(p: &Pipeline) -> Value {
    json!({ "value": p.rho, "auto": p.rho_auto })
}

impl Context {
    fn emit(&self, value: Value, text: impl FnOnce() -> String) -> Result<String, CliError> {
        if self.json {
            to_json(&value)
        } else {
            Ok(text())
        }
    }

    fn model_show(&self, path: &std::path::Path) -> Result<String, CliError> {
        input::check_exists(path)?;
        let instance = input::load_instance(path)?;
        let qcio = instance.unit.build_qcio();
        let m = instance.unit.generate_matrices();
        let a = matrix_rows(m.cost.nrows(), m.cost.ncols(), |i, j| m.cost[(i, j)]);
        let c = matrix_rows(m.constraint.nrows(), m.constraint.ncols(), |i, j| m.constraint[(i, j)]);
        let e: Vec<f64> = m.energy.iter().copied().collect();
        let n = qcio.num_vars();
        let quadratic: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| qcio.quadratic()[(i, j)]).collect()).collect();
        let value = json!({
            "instance": InstanceFile::from_unit(&instance.unit),
            "problem_hash": instance.hash,
            "program": {
                "name": qcio.name,
                "variables": qcio.variables(),
                "quadratic": quadratic,
                "linear": qcio.linear(),
                "constant": qcio.constant(),
                "constraints": qcio.constraints(),
            },
            "matrices": {
                "A": (0..m.cost.nrows()).map(|i| m.cost.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
                "C": (0..m.constraint.nrows()).map(|i| m.constraint.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
                "e": e,
            },
        });
        self.emit(value, || {
            let mut out = qcio.prettyprint();
            if !out.ends_with('\n') {
                out.push('\n');
            }
            let _ = writeln!(out, "\nA =\n{}", a.join("\n"));
            let _ = writeln!(out, "C =\n{}", c.join("\n"));
            let e: Vec<String> = e.iter().map(|&x| fmt_coef(x)).collect();
            let _ = writeln!(out, "e = [{}]", e.join(", "));
            out
        })
    }

    fn solve_exact(&self, args: &SolveExactArgs) -> Result<String, CliError> {
        let path = &args.problem.instance.instance;
        input::check_exists(path)?;
        if args.tie_cap == 0 {
            return Err(CliError::Usage("--tie-cap must be at least 1".into()));
        }
        let instance = input::load_instance(path)?;
        let qcio = instance.unit.build_qcio();
        let names: Vec<&str> = qcio.variables().iter().map(|v| v.name.as_str()).collect();
        match args.form {
            ExactForm::Integer => {
                let sol = brute_force_integer_with(&qcio, args.tie_cap, MAX_INTEGER_LEAVES)?;
                let value = json!({
                    "form": "integer",
                    "problem_hash": instance.hash,
                    "variables": names,
                    "min_value": sol.min_value,
                    "argmin": sol.argmin,
                    "tie_count": sol.tie_count,
                    "evaluated_count": sol.evaluated_count,
                });
                self.emit(value, || {
                    let mut out = format!("minimum value: {}\n", fmt_coef(sol.min_value));
                    let _ = writeln!(out, "minimizers: {} (listing {})", sol.tie_count, sol.argmin.len());
                    for x in &sol.argmin {
                        let cells: Vec<String> = x.iter().map(i64::to_string).collect();
                        let _ = writeln!(out, "  ({})", cells.join(", "));
                    }
                    let _ = writeln!(out, "variables: {}", names.join(", "));
                    let _ = writeln!(out, "evaluated: {}", sol.evaluated_count);
                    out
                })
            }
            ExactForm::Qubo => {
                let (rho, rho_auto) = resolve_rho(&qcio, args.problem.rho)?;
                let (qubo, encoding) = build_qubo(&qcio, rho, args.problem.encoding)?;
                let sol = brute_force_qubo(&qubo, args.tie_cap)?;
                let mut rows = Vec::new();
                for bits in &sol.argmin {
                    let b: Vec<u8> = bits.iter().map(|&v| v as u8).collect();
                    let schedule = encoding.interpret(&b)?;
                    let xf: Vec<f64> = schedule.iter().map(|&v| v as f64).collect();
                    rows.push(json!({
                        "bitstring": qcharge_core::bits::bits_to_string(&b, self.order),
                        "schedule": schedule,
                        "qcio_value": qcio.evaluate(&xf)?,
                        "is_feasible": qcio.is_feasible(&xf, FEASIBILITY_TOLERANCE)?,
                    }));
                }
                let value = json!({
                    "form": "qubo",
                    "problem_hash": instance.hash,
                    "rho": { "value": rho, "auto": rho_auto },
                    "encoding": args.problem.encoding,
                    "bit_order": self.order,
                    "n": qubo.n(),
                    "min_value": sol.min_value,
                    "minimizers": rows,
                    "tie_count": sol.tie_count,
                    "evaluated_count": sol.evaluated_count,
                });
                self.emit(value.clone(), || {
                    let mut out = format!("minimum value: {}\nrho: {}\n", fmt_coef(sol.min_value), rho);
                    let _ = writeln!(out, "minimizers: {} (listing {})", sol.tie_count, sol.argmin.len());
                    for r in value["minimizers"].as_array().into_iter().flatten() {
                        let _ = writeln!(
                            out,
                            "  {}  schedule {}  feasible {}",
                            r["bitstring"].as_str().unwrap_or_default(),
                            r["schedule"],
                            r["is_feasible"]
                        );
                    }
                    out
                })
            }
        }
    }

    fn qubo_build(&self, args: &QuboBuildArgs) -> Result<String, CliError> {
        if let Some(out) = &args.output {
            input::check_writable(out)?;
        }
        let p = pipeline(&args.problem)?;
        let export = p.qubo.export();
        if let Some(out) = &args.output {
            input::write(out, &(serde_json::to_string_pretty(&export)? + "\n"))?;
        }
        let value = json!({
            "rho": rho_json(&p),
            "encoding": args.problem.encoding,
            "n": p.qubo.n(),
            "names": p.qubo.names(),
            "qubo": export,
            "variables": p.encoding.variables,
        });
        self.emit(value, || {
            let mut out = p.qubo.prettyprint();
            if !out.ends_with('\n') {
                out.push('\n');
            }
            let _ = writeln!(out, "\nrho: {}", p.rho);
            let _ = writeln!(out, "Number binary variables: {}", p.qubo.n());
            out
        })
    }

    fn ising_show(&self, args: &ProblemArgs) -> Result<String, CliError> {
        let p = pipeline(args)?;
        let h = &p.hamiltonian;
        let terms: Vec<Value> = h
            .terms()
            .iter()
            .map(|&t| json!({ "pauli": pauli_label(t, h.n(), self.order), "coefficient": h.coefficient(t) }))
            .collect();
        let value = json!({
            "rho": rho_json(&p),
            "bit_order": self.order,
            "n": h.n(),
            "offset": p.offset,
            "num_z_terms": h.num_z_terms(),
            "num_zz_terms": h.num_zz_terms(),
            "terms": terms,
        });
        self.emit(value, || {
            let mut out = h.render(self.order);
            let _ = writeln!(out, "offset: {}", fmt_coef(p.offset));
            out
        })
    }

    fn qaoa_run(&self, args: &QaoaRunArgs) -> Result<String, CliError> {
        if let Some(path) = &args.noise {
            input::check_exists(path)?;
        }
        if let Some(path) = &args.record {
            input::check_writable(path)?;
        }
        if args.top_k == 0 {
            return Err(CliError::Usage("--top-k must be at least 1".into()));
        }
        let params = params(&args.angles)?;
        let p = pipeline(&args.problem)?;
        let noise = args.noise.as_deref().map(input::load_noise).transpose()?;
        let energy = qcharge_core::sim::QaoaEnergy::new(&p.hamiltonian, p.offset)?;
        let state = energy.state(&params)?;
        let n = p.hamiltonian.n();
        let base = json!({
            "rho": rho_json(&p),
            "bit_order": self.order,
            "p": params.layers(),
            "betas": params.betas,
            "gammas": params.gammas,
            "n": n,
        });

        if args.exact {
            let probabilities = state.probabilities();
            let exact_energy = energy.energy(&params, EnergyMode::Exact)?;
            let dist = Distribution::from_dense(&probabilities, self.order)?;
            let table = annotate_top_k(&dist, args.top_k, &p.qubo, &p.qcio, &p.encoding)?;
            let amplitudes: Vec<Value> = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(m, a)| {
                    json!({
                        "bitstring": index_to_string(m, n, self.order),
                        "re": a.re,
                        "im": a.im,
                        "probability": probabilities[m],
                    })
                })
                .collect();
            let mut value = base;
            value["mode"] = json!("exact");
            value["energy"] = json!(exact_energy);
            value["statevector"] = json!(amplitudes);
            value["table"] = json!(table);
            return self.emit(value, || {
                let mut out = format!("energy: {exact_energy}\nstatevector (index order):\n");
                for (m, a) in state.amplitudes().iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{}  {:+.8}{:+.8}j  {:.8}",
                        index_to_string(m, n, self.order),
                        a.re,
                        a.im,
                        probabilities[m]
                    );
                }
                out.push('\n');
                out.push_str(&render_table(&table));
                out
            });
        }

        if args.shots == 0 {
            return Err(CliError::Usage("--shots must be at least 1".into()));
        }
        let counts = sample_counts(&state, args.shots, args.seed, noise.as_ref(), self.order)?;
        let sampled_energy = counts
            .counts
            .iter()
            .map(|(s, &c)| -> Result<f64, CliError> {
                let m = qcharge_core::bits::string_to_index(s, self.order)?;
                Ok(c as f64 * energy.diagonal()[m])
            })
            .sum::<Result<f64, CliError>>()?
            / args.shots as f64
            + p.offset;
        let dist = qcharge_core::report::counts_to_distribution(&counts)?;
        let table = annotate_top_k(&dist, args.top_k, &p.qubo, &p.qcio, &p.encoding)?;
        let record = self.record(
            &p,
            &params,
            args.backend_label.clone(),
            args.shots,
            args.seed,
            noise,
            counts,
        );
        if let Some(path) = &args.record {
            save_record(path, &record)?;
        }
        let mut value = base;
        value["mode"] = json!("shots");
        value["energy_estimate"] = json!(sampled_energy);
        value["table"] = json!(table);
        value["record"] = serde_json::to_value(&record)?;
        self.emit(value, || {
            let mut out = format!(
                "energy estimate: {sampled_energy}\nshots: {}  seed: {}  distinct outcomes: {}\n\n",
                args.shots,
                args.seed,
                record.counts.counts.len()
            );
            out.push_str(&render_table(&table));
            if let Some(path) = &args.record {
                let _ = writeln!(out, "\nrecord written to {}", path.display());
            }
            out
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        p: &Pipeline,
        params: &QaoaParameters,
        backend_label: String,
        shots: u64,
        seed: u64,
        noise: Option<ReadoutNoiseModel>,
        counts: qcharge_core::Counts,
    ) -> ExperimentRecord {
        ExperimentRecord {
            schema_version: SCHEMA_VERSION,
            timestamp: self.timestamp.then(current_timestamp_stem),
            backend_label,
            problem_hash: p.instance.hash.clone(),
            rho: p.rho,
            p: params.layers(),
            betas: params.betas.clone(),
            gammas: params.gammas.clone(),
            shots,
            seed: Some(seed),
            noise,
            counts,
            budget: Some(count_fully_connected(&p.hamiltonian, params.layers())),
            notes: String::new(),
        }
    }

    fn qaoa_optimize(&self, args: &QaoaOptimizeArgs) -> Result<String, CliError> {
        if let Some(path) = &args.record {
            input::check_writable(path)?;
        }
        if args.p == 0 {
            return Err(CliError::Usage("--p must be at least 1".into()));
        }
        let p = pipeline(&args.problem)?;
        let energy = qcharge_core::sim::QaoaEnergy::new(&p.hamiltonian, p.offset)?;
        let mode = match args.shots {
            Some(shots) => EnergyMode::Shots { shots, seed: args.seed },
            None => EnergyMode::Exact,
        };
        let options = NelderMeadOptions {
            max_fev: args.max_fev,
            ..NelderMeadOptions::default()
        };
        let result = multi_start(&energy, args.p, args.starts, args.seed, mode, &options)?;
        let best = result.best();
        let best_params = QaoaParameters::from_flat(&best.final_point)?;
        let converged = result.runs.iter().filter(|r| r.converged).count();

        let record = match &args.record {
            Some(path) => {
                let state = energy.state(&best_params)?;
                let counts = sample_counts(&state, args.record_shots, args.seed, None, self.order)?;
                let record = self.record(
                    &p,
                    &best_params,
                    "statevector".into(),
                    args.record_shots,
                    args.seed,
                    None,
                    counts,
                );
                save_record(path, &record)?;
                Some(record)
            }
            None => None,
        };
        let value = json!({
            "rho": rho_json(&p),
            "p": args.p,
            "starts": args.starts,
            "seed": args.seed,
            "mode": mode,
            "options": options,
            "best": {
                "index": result.best_index,
                "betas": best_params.betas,
                "gammas": best_params.gammas,
                "energy": best.final_value,
                "nfev": best.nfev,
                "converged": best.converged,
            },
            "converged_runs": converged,
            "runs": result.runs,
            "record": record,
        });
        self.emit(value, || {
            let fmt = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
            let mut out = format!("best energy: {}\n", best.final_value);
            let _ = writeln!(out, "betas: {}", fmt(&best_params.betas));
            let _ = writeln!(out, "gammas: {}", fmt(&best_params.gammas));
            let _ = writeln!(out, "start {} of {}; {} converged", result.best_index, args.starts, converged);
            if let Some(path) = &args.record {
                let _ = writeln!(out, "record written to {}", path.display());
            }
            out
        })
    }

    fn landscape(&self, args: &LandscapeArgs) -> Result<String, CliError> {
        if let Some(out) = &args.output {
            input::check_writable(out)?;
        }
        let p = pipeline(&args.problem)?;
        let energy = qcharge_core::sim::QaoaEnergy::new(&p.hamiltonian, p.offset)?;
        let grid = landscape_grid(&energy, args.beta_points, args.gamma_points)?;
        let mut csv_out = csv::Writer::from_writer(Vec::new());
        csv_out.write_record(["beta", "gamma", "energy"])?;
        for (j, beta) in grid.betas.iter().enumerate() {
            for (k, gamma) in grid.gammas.iter().enumerate() {
                csv_out.write_record([beta.to_string(), gamma.to_string(), grid.energies[j][k].to_string()])?;
            }
        }
        let csv_text = String::from_utf8(csv_out.into_inner().map_err(|e| CliError::Usage(e.to_string()))?)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let min = grid.min();
        match &args.output {
            Some(path) => {
                input::write(path, &csv_text)?;
                let value = json!({
                    "rho": rho_json(&p),
                    "beta_points": args.beta_points,
                    "gamma_points": args.gamma_points,
                    "min_energy": min,
                    "output": path,
                });
                self.emit(value, || {
                    format!(
                        "wrote {} rows to {}\nminimum energy: {min}\n",
                        args.beta_points * args.gamma_points,
                        path.display()
                    )
                })
            }
            None => {
                let value = json!({
                    "rho": rho_json(&p),
                    "min_energy": min,
                    "landscape": grid,
                });
                self.emit(value, || csv_text)
            }
        }
    }

    fn transpile(&self, args: &TranspileArgs) -> Result<String, CliError> {
        if args.p == 0 || args.seeds == 0 {
            return Err(CliError::Usage("--p and --seeds must be at least 1".into()));
        }
        let p = pipeline(&args.problem)?;
        let h = &p.hamiltonian;
        let map = input::coupling_map(&args.coupling_map, h.n())?;
        let seeds: Vec<u64> = (0..args.seeds).collect();
        let routed = best_of_seeds(h, &map, args.p, &seeds)?;
        let baseline = count_fully_connected(h, args.p);
        let value = json!({
            "rho": rho_json(&p),
            "p": args.p,
            "coupling_map": map,
            "logical": logical_gate_profile(h, args.p),
            "fully_connected": baseline,
            "seeds": routed.all,
            "best": routed.best,
        });
        self.emit(value, || {
            let mut out = String::from("seed,cnot,swaps,single_qubit_hw,depth\n");
            for s in &routed.all {
                let b = s.budget;
                let _ = writeln!(out, "{},{},{},{},{}", s.seed, b.cnot, b.swaps, b.single_qubit_hw, b.depth);
            }
            let b = baseline;
            let _ = writeln!(
                out,
                "fully_connected,{},{},{},{}",
                b.cnot, b.swaps, b.single_qubit_hw, b.depth
            );
            out
        })
    }

    fn mitigate(&self, args: &MitigateArgs) -> Result<String, CliError> {
        input::check_exists(&args.counts)?;
        if let Some(path) = &args.noise {
            input::check_exists(path)?;
        }
        if let Some(path) = &args.output {
            input::check_writable(path)?;
        }
        let outcomes = Outcomes::load(&args.counts)?;
        let noise = match (&args.noise, &outcomes) {
            (Some(path), _) => input::load_noise(path)?,
            (None, Outcomes::Record(r)) => r
                .noise
                .clone()
                .ok_or_else(|| CliError::Usage("record has no noise model; pass --noise".into()))?,
            (None, _) => return Err(CliError::Usage("--noise is required for plain counts".into())),
        };
        let raw = outcomes.distribution()?;
        let mitigated = mitigate_distribution(&raw, &noise)?;
        if let Some(path) = &args.output {
            input::write(path, &(serde_json::to_string_pretty(&mitigated)? + "\n"))?;
        }
        self.emit(serde_json::to_value(&mitigated)?, || {
            let mut out = String::new();
            for (k, p) in &mitigated.probabilities {
                let _ = writeln!(out, "{k} {p}");
            }
            out
        })
    }

    fn fidelity(&self, args: &FidelityArgs) -> Result<String, CliError> {
        input::check_exists(&args.first)?;
        input::check_exists(&args.second)?;
        let p = Outcomes::load(&args.first)?.distribution()?;
        let mut q = Outcomes::load(&args.second)?.distribution()?;
        if q.bit_order != p.bit_order {
            q = q.reorder(p.bit_order);
        }
        let f = if args.squared {
            fidelity_squared(&p, &q)?
        } else {
            fidelity(&p, &q)?
        };
        let value = json!({ "fidelity": f, "squared": args.squared });
        self.emit(value, || format!("fidelity: {f}\n"))
    }
}
