//! Command-line interface: simulate scenarios, print certificates, tabulate
//! frequency-domain linearizations, and sweep parameters.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::analysis::{
    build_hybrid_matrices, linear_decay, linear_freq_response, linearize_hybrid, linearize_levant,
    linearize_linear, noise_bound_theorem2, steady_bound_theorem1, CertificateError,
    LinearizationResult,
};
use crate::differentiators::HybridParams;
use crate::integrator::{simulate, SimError, SimOutput};
use crate::metrics::RunReport;
use crate::scenario::{FamilyConfig, Scenario, ScenarioError};
use crate::signals::NoiseSpec;

/// Exit codes: 0 success, 2 validation error, 3 diverged simulation,
/// 4 I/O error, 5 certificate hypothesis failure.
const EXIT_OK: i32 = 0;
const EXIT_VALIDATION: i32 = 2;
const EXIT_DIVERGED: i32 = 3;
const EXIT_IO: i32 = 4;
const EXIT_HYPOTHESIS: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "diffkit",
    about = "Simulate and certify tracking differentiators",
    arg_required_else_help = false
)]
struct Cli {
    /// Print a template scenario file and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Kv,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate every family of a scenario and report tracking metrics.
    Run {
        scenario: PathBuf,
        /// Write one trajectory CSV per family into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Replace the seed of a seeded noise model.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Replace the integration step size.
        #[arg(long)]
        dt_override: Option<f64>,
        #[arg(long, value_enum, default_value = "kv")]
        format: Format,
    },
    /// Print stability/robustness certificates for the scenario's families.
    Certify {
        scenario: PathBuf,
        #[arg(long)]
        dt_override: Option<f64>,
    },
    /// Tabulate describing-function linearizations and the linear frequency
    /// response.
    Freq {
        scenario: PathBuf,
        /// Probe amplitudes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1.0,10.0")]
        amplitudes: Vec<f64>,
    },
    /// Re-run the scenario for each value of a swept parameter.
    Sweep {
        scenario: PathBuf,
        /// Dotted path of the parameter (e.g. sim.dt, noise.epsilon,
        /// families.0.tau).
        #[arg(long)]
        path: String,
        /// Values to sweep, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Write the sweep table to <out_dir>/sweep.csv as well.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed_override: Option<u64>,
    },
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        let code = match e {
            ScenarioError::Io(_) => EXIT_IO,
            _ => EXIT_VALIDATION,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::new(EXIT_DIVERGED, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(EXIT_IO, e.to_string())
    }
}

/// Parse arguments from the environment, execute, and return the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    if cli.print_defaults {
        print!("{}", default_scenario_toml());
        return Ok(EXIT_OK);
    }
    let Some(command) = cli.command else {
        return Err(CliError::new(
            EXIT_VALIDATION,
            "no subcommand given; try --help or --print-defaults",
        ));
    };
    match command {
        Command::Run {
            scenario,
            out_dir,
            seed_override,
            dt_override,
            format,
        } => cmd_run(&scenario, out_dir, seed_override, dt_override, format),
        Command::Certify {
            scenario,
            dt_override,
        } => cmd_certify(&scenario, dt_override),
        Command::Freq {
            scenario,
            amplitudes,
        } => cmd_freq(&scenario, &amplitudes),
        Command::Sweep {
            scenario,
            path,
            values,
            out_dir,
            seed_override,
        } => cmd_sweep(&scenario, &path, &values, out_dir, seed_override),
    }
}

fn load(
    path: &std::path::Path,
    seed_override: Option<u64>,
    dt_override: Option<f64>,
) -> Result<Scenario, CliError> {
    let mut s = Scenario::load(path)?;
    if let Some(seed) = seed_override {
        match &mut s.noise {
            NoiseSpec::SeededUniform { seed: s, .. } => *s = seed,
            _ => {
                return Err(CliError::new(
                    EXIT_VALIDATION,
                    "--seed-override requires a seeded noise model",
                ))
            }
        }
    }
    if let Some(dt) = dt_override {
        s.set_path("sim.dt", dt)?;
    }
    Ok(s)
}

fn noise_note(noise: &NoiseSpec) -> String {
    match noise {
        NoiseSpec::None => "noise: none".into(),
        NoiseSpec::SeededUniform { epsilon, seed } => format!(
            "noise: seeded-uniform, |delta| <= {epsilon}, seed {seed} \
             (path is a pure function of seed and the dt grid)"
        ),
        NoiseSpec::Sinusoidal {
            epsilon,
            noise_omega,
        } => format!("noise: sinusoidal, {epsilon} * sin({noise_omega} t)"),
    }
}

fn run_family(s: &Scenario, f: &FamilyConfig) -> Result<(SimOutput, RunReport), CliError> {
    let out = simulate(&f.to_sim(), &s.signal, &s.noise, &s.sim)?;
    let (start, end, tol) = s.metrics.resolve(s.sim.t_end);
    let report = RunReport::from_series(f.label(), &out.series, start, end, tol)
        .map_err(|e| CliError::new(EXIT_VALIDATION, e.to_string()))?;
    Ok((out, report))
}

fn cmd_run(
    path: &std::path::Path,
    out_dir: Option<PathBuf>,
    seed_override: Option<u64>,
    dt_override: Option<f64>,
    format: Format,
) -> Result<i32, CliError> {
    let s = load(path, seed_override, dt_override)?;
    for w in s.warnings() {
        eprintln!("warning: {w}");
    }
    println!("# scenario: {}", s.name);
    if !s.description.is_empty() {
        println!("# {}", s.description);
    }
    println!("# {}", noise_note(&s.noise));
    println!(
        "# sim: dt = {}, t_end = {}, method = {:?}",
        s.sim.dt, s.sim.t_end, s.sim.method
    );
    if let Some(dir) = &out_dir {
        std::fs::create_dir_all(dir)?;
    }
    if format == Format::Csv {
        println!("{}", RunReport::CSV_HEADER);
    }
    for f in &s.families {
        let (out, report) = run_family(&s, f)?;
        match format {
            Format::Kv => println!("\n{}", report.to_kv()),
            Format::Csv => println!("{}", report.to_csv_row()),
        }
        if let Some(dir) = &out_dir {
            let file = dir.join(format!("{}_{}.csv", s.name, f.label()));
            let mut w = std::io::BufWriter::new(std::fs::File::create(&file)?);
            out.series.write_csv(&mut w)?;
        }
    }
    Ok(EXIT_OK)
}

fn fmt_mat3(name: &str, m: &[[f64; 3]; 3]) -> String {
    let mut out = format!("{name} =\n");
    for row in m {
        out.push_str(&format!(
            "  [{:>12.6} {:>12.6} {:>12.6}]\n",
            row[0], row[1], row[2]
        ));
    }
    out
}

/// Certify one hybrid gain set; returns true when every printed hypothesis
/// holds.
fn certify_hybrid(label: &str, p: &HybridParams, l2: f64, epsilon: f64) -> bool {
    let mut ok = true;
    println!("## {label}: hybrid certificate (alpha = {})", p.alpha);
    let m = match build_hybrid_matrices(p) {
        Ok(m) => m,
        Err(e) => {
            println!("FAILED-HYPOTHESIS: {e}");
            return false;
        }
    };
    print!("{}", fmt_mat3("Pi", &m.pi));
    print!("{}", fmt_mat3("Omega1", &m.omega1));
    print!("{}", fmt_mat3("Omega2", &m.omega2));
    println!(
        "Gamma1 = [{} {} {}], ||Gamma1|| = {:.6}",
        m.gamma1[0], m.gamma1[1], m.gamma1[2], m.gamma1_norm
    );
    println!(
        "lambda_min(Pi) = {:.6}, lambda_max(Pi) = {:.6}",
        m.lambda_min_pi, m.lambda_max_pi
    );
    println!(
        "lambda_min(Omega1) = {:.6}, lambda_min(Omega2) = {:.6}",
        m.lambda_min_omega1, m.lambda_min_omega2
    );
    if m.lambda_min_omega1 <= 0.0 {
        println!("FAILED-HYPOTHESIS: Omega1 is not positive definite");
        ok = false;
    }
    match steady_bound_theorem1(p, l2) {
        Ok(r) => {
            println!(
                "steady-state bound: ||zeta|| <= {:.6e} (contraction ratio {:.4})",
                r.bound, r.ratio
            );
            if !r.hypothesis_holds {
                println!("FAILED-HYPOTHESIS: contraction ratio >= 1; the bound does not shrink");
                ok = false;
            }
        }
        Err(CertificateError::NonPositiveLambdaMin { .. }) => {
            // already reported above
        }
        Err(e) => println!("steady-state bound unavailable: {e}"),
    }
    if epsilon > 0.0 {
        match noise_bound_theorem2(p, l2, epsilon) {
            Ok(r) => {
                println!("Psi1({epsilon}) = {:.6e}, Psi2({epsilon}) = {:.6e}", r.psi1, r.psi2);
                match r.bound {
                    Some(b) => println!("noise bound: ||zeta|| <= {b:.6e}"),
                    None => {
                        for h in &r.failed_hypotheses {
                            println!("FAILED-HYPOTHESIS: {h}");
                        }
                        ok = false;
                    }
                }
            }
            Err(e) => println!("noise bound unavailable: {e}"),
        }
    }
    println!();
    ok
}

fn cmd_certify(path: &std::path::Path, dt_override: Option<f64>) -> Result<i32, CliError> {
    let s = load(path, None, dt_override)?;
    let l2 = s.signal.second_derivative_bound();
    let epsilon = s.noise.epsilon();
    println!("# scenario: {} (L2 = {l2}, noise epsilon = {epsilon})", s.name);
    println!("# {}\n", noise_note(&s.noise));
    let mut all_ok = true;
    for f in &s.families {
        match f {
            FamilyConfig::Hybrid {
                params, schedule, ..
            } => {
                all_ok &= certify_hybrid(f.label(), params, l2, epsilon);
                for entry in schedule {
                    let label = format!("{} (from t = {})", f.label(), entry.at);
                    all_ok &= certify_hybrid(&label, &entry.params, l2, epsilon);
                }
            }
            FamilyConfig::Nonlinear { k1, k3, alpha, .. } => {
                let p = HybridParams {
                    k1: *k1,
                    k2: 0.0,
                    k3: *k3,
                    k4: 0.0,
                    alpha: *alpha,
                };
                all_ok &= certify_hybrid(f.label(), &p, l2, epsilon);
            }
            FamilyConfig::HybridDiscontinuous { k1, k2, k3, k4, .. } => {
                let p = HybridParams {
                    k1: *k1,
                    k2: *k2,
                    k3: *k3,
                    k4: *k4,
                    alpha: 0.0,
                };
                all_ok &= certify_hybrid(f.label(), &p, l2, epsilon);
            }
            FamilyConfig::Linear { params, .. } => {
                let d = linear_decay(params);
                let bound = crate::analysis::eq46_bound(params.tau, d.sigma1, d.lambda, l2);
                println!("## {}: linear decay certificate", f.label());
                println!(
                    "decay rate lambda = {:.6}, transient constant sigma1 = {:.6}",
                    d.lambda, d.sigma1
                );
                println!(
                    "steady-state bound: |e| <= sigma1 L2 tau / lambda = {bound:.6e} \
                     (linear in tau)\n"
                );
            }
            FamilyConfig::Levant { .. } | FamilyConfig::Gred { .. } => {
                println!(
                    "## {}: no algebraic certificate tabulated; see the freq command \
                     for its equivalent linearization\n",
                    f.label()
                );
            }
            FamilyConfig::FirstOrder { .. } => {
                println!("## {}: first-order demo system, nothing to certify\n", f.label());
            }
        }
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_HYPOTHESIS })
}

fn print_linearization_table(label: &str, rows: &[LinearizationResult]) {
    println!("## {label}: equivalent linearization");
    println!("{:>12} {:>12} {:>12}", "amplitude", "omega_n", "zeta");
    for r in rows {
        println!("{:>12.4} {:>12.4} {:>12.4}", r.amplitude, r.omega_n, r.zeta);
    }
    println!();
}

fn cmd_freq(path: &std::path::Path, amplitudes: &[f64]) -> Result<i32, CliError> {
    let s = load(path, None, None)?;
    if amplitudes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(CliError::new(
            EXIT_VALIDATION,
            "--amplitudes must all be positive",
        ));
    }
    println!("# scenario: {}\n", s.name);
    for f in &s.families {
        match f {
            FamilyConfig::Hybrid { params, .. } => {
                let rows: Vec<_> = amplitudes
                    .iter()
                    .map(|a| linearize_hybrid(params, *a))
                    .collect();
                print_linearization_table(f.label(), &rows);
            }
            FamilyConfig::Nonlinear { k1, k3, alpha, .. } => {
                let p = HybridParams {
                    k1: *k1,
                    k2: 0.0,
                    k3: *k3,
                    k4: 0.0,
                    alpha: *alpha,
                };
                let rows: Vec<_> =
                    amplitudes.iter().map(|a| linearize_hybrid(&p, *a)).collect();
                print_linearization_table(f.label(), &rows);
            }
            FamilyConfig::Levant { params, .. } => {
                let rows: Vec<_> = amplitudes
                    .iter()
                    .map(|a| linearize_levant(params, *a))
                    .collect();
                print_linearization_table(f.label(), &rows);
            }
            FamilyConfig::Linear { params, .. } => {
                let rows: Vec<_> = amplitudes
                    .iter()
                    .map(|a| linearize_linear(params, *a))
                    .collect();
                print_linearization_table(f.label(), &rows);
                let wn = params.a2.sqrt() / params.tau;
                println!("## {}: frequency response", f.label());
                println!(
                    "{:>12} {:>12} {:>12}",
                    "omega", "track_db", "deriv_db"
                );
                for exp in -2..=2 {
                    for m in [1.0, 2.0, 5.0] {
                        let omega = wn * m * 10f64.powi(exp);
                        let r = linear_freq_response(params, omega);
                        println!(
                            "{:>12.4} {:>12.3} {:>12.3}",
                            omega, r.db_track, r.db_deriv
                        );
                    }
                }
                println!();
            }
            FamilyConfig::HybridDiscontinuous { .. }
            | FamilyConfig::Gred { .. }
            | FamilyConfig::FirstOrder { .. } => {
                println!(
                    "## {}: no smooth describing-function model tabulated\n",
                    f.label()
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(
    path: &std::path::Path,
    param: &str,
    values: &[f64],
    out_dir: Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<i32, CliError> {
    let base = load(path, seed_override, None)?;
    if values.is_empty() {
        return Err(CliError::new(EXIT_VALIDATION, "--values must be nonempty"));
    }
    // validate the path once up front so every worker gets a valid scenario
    {
        let mut probe = base.clone();
        probe.set_path(param, values[0])?;
    }
    let mut results: Vec<(f64, Result<Vec<RunReport>, CliError>)> = values
        .par_iter()
        .map(|&v| {
            let mut s = base.clone();
            let run = s.set_path(param, v).map_err(CliError::from).and_then(|()| {
                s.families
                    .iter()
                    .map(|f| run_family(&s, f).map(|(_, r)| r))
                    .collect()
            });
            (v, run)
        })
        .collect();
    results.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    println!("# scenario: {}, sweeping {param}", base.name);
    println!("# {}", noise_note(&base.noise));
    let header = format!("{param},{}", RunReport::CSV_HEADER);
    println!("{header}");
    let mut table = format!("{header}\n");
    for (v, run) in results {
        let reports = run.map_err(|e| {
            CliError::new(e.code, format!("{param} = {v}: {}", e.message))
        })?;
        for r in reports {
            let row = format!("{v:.6e},{}", r.to_csv_row());
            println!("{row}");
            table.push_str(&row);
            table.push('\n');
        }
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("sweep.csv"), table)?;
    }
    Ok(EXIT_OK)
}

fn default_scenario_toml() -> String {
    let s = Scenario::from_toml_str(DEFAULT_SCENARIO).expect("default scenario is valid");
    s.to_toml_string()
}

const DEFAULT_SCENARIO: &str = r#"
name = "default"
description = "hybrid differentiator tracking a clean sinusoid"

[signal]
kind = "sinusoid"
amplitude = 2.0
omega = 1.0

[noise]
kind = "none"

[sim]
dt = 1e-4
t_end = 10.0
method = "rk4"
x0 = { x1 = 0.0, x2 = 0.0 }

[[families]]
kind = "hybrid"
params = { k1 = 1.0, k2 = 7.0, k3 = 8.0, k4 = 25.0, alpha = 0.2 }

[[families.schedule]]
at = 1.0
params = { k1 = 1.0, k2 = 1.0, k3 = 8.0, k4 = 8.0, alpha = 0.2 }
"#;
