use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ofb_core::config::{self, ScenarioConfig, BUILTIN_NAMES};
use ofb_core::sim::{
    alpha_sweep, alpha_table, metrics, metrics_window, run_closed_loop, NoiseSpec, PendulumSetup, PlantSpec, RunError,
    Scenario,
};
use ofb_core::stability::{check_theorem2, sweep_certificates, CertificateInputs};

/// Output-feedback tracking control: simulation runs, certificate checks and parameter sweeps.
#[derive(Parser)]
#[command(name = "ofb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a builtin scenario or a config file; writes trace.csv and metrics.txt.
    Run {
        /// Builtin name or path to a config file.
        scenario: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Noise seed (scenarios with measurement noise only).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Final time in seconds.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Evaluate the stability certificate for a family or a config file with a [bounds] section.
    Certify {
        /// `example1` or path to a config file.
        target: String,
        #[arg(long, conflicts_with = "k_grid")]
        k: Option<f64>,
        /// Grid `A:STEP:B`.
        #[arg(long)]
        k_grid: Option<String>,
        /// Directory receiving certificate.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweep; `pendulum-alpha` writes alpha_sweep.csv.
    Sweep {
        name: String,
        #[arg(long, default_value = "0.1:0.1:1.0")]
        alpha_grid: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Print a builtin scenario as config text.
    Dump { name: String },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ofb_core::Error> for Failure {
    fn from(e: ofb_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `A:STEP:B` (or a single value). Values are rounded to 12 decimals
/// so that `0.1:0.1:6.0` yields exactly 0.8, 4.1 and so on.
fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("invalid grid '{text}': {e}")))?;
    let round = |v: f64| (v * 1e12).round() / 1e12;
    match parts[..] {
        [v] => Ok(vec![v]),
        [a, step, b] => {
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(usage(format!("invalid grid '{text}': need STEP > 0 and A <= B")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| round(a + i as f64 * step)).collect())
        }
        _ => Err(usage(format!("invalid grid '{text}': expected A:STEP:B"))),
    }
}

fn load_scenario(name: &str) -> Result<Scenario, Failure> {
    if BUILTIN_NAMES.contains(&name) {
        return Ok(config::builtin(name)?);
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(usage(format!(
            "'{name}' is neither a builtin ({}) nor a readable file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    Ok(read_config(path)?.to_scenario()?)
}

fn read_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    config::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn metrics_block(s: &Scenario, trace: &ofb_core::sim::SimulationTrace) -> String {
    match s.plant {
        PlantSpec::FirstOrder => metrics(trace, 0, 1.0).report(),
        PlantSpec::Pendulum { disturbance_onset } => {
            let mut out = metrics(trace, 1, 0.0).report();
            let d = metrics_window(trace, 1, 0.0, disturbance_onset, f64::INFINITY);
            let _ = writeln!(out, "iae_disturbed={}\niv_disturbed={}", d.iae, d.iv);
            out
        }
    }
}

fn cmd_run(scenario: &str, out: &Path, seed: Option<u64>, dt: Option<f64>, horizon: Option<f64>) -> CmdResult {
    let mut s = load_scenario(scenario)?;
    if let Some(seed) = seed {
        match &mut s.noise {
            NoiseSpec::GaussianTruncated { seed: current, .. } => *current = seed,
            NoiseSpec::Off => return Err(usage(format!("scenario '{scenario}' has no measurement noise to seed"))),
        }
    }
    if let Some(dt) = dt {
        s.dt = dt;
    }
    if let Some(h) = horizon {
        s.tf = h;
    }
    s.validate()?;
    match run_closed_loop(&s) {
        Ok(trace) => {
            write_file(out, "trace.csv", &trace.to_csv())?;
            let block = metrics_block(&s, &trace);
            write_file(out, "metrics.txt", &block)?;
            print!("{block}");
            Ok(())
        }
        Err(RunError::Invalid(e)) => Err(e.into()),
        Err(RunError::BlowUp { error, partial }) => {
            write_file(out, "trace.csv", &partial.to_csv())?;
            Err(Failure::Runtime(format!(
                "simulation failed: {error}; partial trace of {} records written",
                partial.len()
            )))
        }
    }
}

fn cmd_certify(target: &str, k: Option<f64>, k_grid: Option<&str>, out: Option<&Path>) -> CmdResult {
    let text = if target == "example1" {
        match k_grid {
            Some(g) => {
                let grid = parse_grid(g)?;
                let sweep = sweep_certificates(CertificateInputs::first_order_example, &grid, None)?;
                let mut text = String::new();
                for (k, c) in &sweep.points {
                    let min_eig = c.condition_min_eig.map_or("none".to_string(), |v| format!("{v:.2}"));
                    let _ = writeln!(text, "k={k} min_eig={min_eig} satisfied={}", c.satisfied);
                }
                match sweep.satisfied_interval {
                    Some((a, b)) => {
                        let _ = writeln!(text, "satisfied_interval=[{a},{b}]");
                    }
                    None => text.push_str("satisfied_interval=none\n"),
                }
                text
            }
            None => {
                let inputs = CertificateInputs::first_order_example(k.unwrap_or(1.5))?;
                check_theorem2(&inputs, None)?.report()
            }
        }
    } else if BUILTIN_NAMES.contains(&target) {
        return Err(usage(format!(
            "no certificate family for '{target}'; use example1 or a config file"
        )));
    } else {
        if k.is_some() || k_grid.is_some() {
            return Err(usage("--k and --k-grid apply to the example1 family only"));
        }
        let path = Path::new(target);
        if !path.is_file() {
            return Err(usage(format!("'{target}' is neither example1 nor a readable file")));
        }
        check_theorem2(&read_config(path)?.certificate_inputs()?, None)?.report()
    };
    if let Some(dir) = out {
        write_file(dir, "certificate.txt", &text)?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_sweep(name: &str, grid: &str, out: &Path, dt: Option<f64>, horizon: Option<f64>) -> CmdResult {
    if name != "pendulum-alpha" {
        return Err(usage(format!("unknown sweep '{name}' (known: pendulum-alpha)")));
    }
    let alphas = parse_grid(grid)?;
    let mut setup = PendulumSetup::default();
    if let Some(dt) = dt {
        setup.dt = dt;
    }
    if let Some(h) = horizon {
        setup.tf = h;
    }
    let points = alpha_sweep(&setup, &alphas).map_err(|e| match e {
        RunError::Invalid(e) => Failure::Usage(e.to_string()),
        blow_up => Failure::Runtime(blow_up.to_string()),
    })?;
    let table = alpha_table(&points);
    write_file(out, "alpha_sweep.csv", &table)?;
    print!("{table}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            dt,
            horizon,
        } => cmd_run(scenario, out, *seed, *dt, *horizon),
        Command::Certify { target, k, k_grid, out } => cmd_certify(target, *k, k_grid.as_deref(), out.as_deref()),
        Command::Sweep {
            name,
            alpha_grid,
            out,
            dt,
            horizon,
        } => cmd_sweep(name, alpha_grid, out, *dt, *horizon),
        Command::Dump { name } => {
            load_scenario(name).map(|s| print!("{}", ScenarioConfig::from_scenario(&s).to_toml()))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
