use clap::{Parser, Subcommand};
use onebit_mimo::bench::{apply_config_key, parse_config, run_experiment, BenchError};
use onebit_mimo::detectors::{detect, DetectOpts, Method};
use onebit_mimo::model::{complex_to_real, generate_complex, ComplexInstance};
use onebit_mimo::plot::{emit_svg_plot, PlotSpec};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

/// Exit code for invalid configuration or unusable input files.
const EXIT_CONFIG: u8 = 2;
/// Exit code when a requested solve fails outright.
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "onebit-mimo",
    version,
    about = "One-bit MIMO detection: global branch-and-bound and fast relaxations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random QPSK instance and write it as JSON.
    Gen {
        #[arg(long)]
        m_tilde: usize,
        #[arg(long)]
        n_tilde: usize,
        #[arg(long)]
        snr_db: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect the transmitted signs in one instance file; prints JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// One of: gML, AR-L1, AR-L2, AR-L1-ABB, quantZF, exhaustive, alg1-gML.
        #[arg(long)]
        method: String,
        #[arg(long)]
        node_limit: Option<usize>,
        #[arg(long)]
        time_limit_ms: Option<u64>,
        #[arg(long, default_value_t = 0)]
        init_seed: u64,
    },
    /// Run a Monte-Carlo sweep described by a key=value config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override any config key, e.g. --set trials=50 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Render an SVG line chart from a sweep CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// CSV column for the x axis.
        #[arg(long, default_value = "snr_db")]
        x: String,
        /// "ber", a CSV column, or extra:<key> from the extra_json column.
        #[arg(long, default_value = "ber")]
        y: String,
        /// Use a linear y axis instead of the default log scale.
        #[arg(long)]
        linear_y: bool,
        #[arg(long, default_value_t = 1e-6)]
        y_floor: f64,
        #[arg(long, default_value = "")]
        title: String,
        /// Plot every ok row instead of only the summary rows.
        #[arg(long)]
        all_rows: bool,
    },
}

/// Prints without panicking when stdout is a closed pipe (e.g. `| head`).
fn say(msg: impl std::fmt::Display) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{msg}");
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    use std::io::Write;
    let _ = writeln!(std::io::stderr(), "error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Gen { m_tilde, n_tilde, snr_db, seed, out } => {
            if m_tilde == 0 || n_tilde == 0 {
                return fail(EXIT_CONFIG, "m_tilde and n_tilde must be positive");
            }
            let (inst, _noise) = generate_complex(m_tilde, n_tilde, snr_db, seed);
            let text = serde_json::to_string_pretty(&inst).expect("instance serializes");
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    if let Err(e) = std::fs::create_dir_all(parent) {
                        return fail(EXIT_CONFIG, e);
                    }
                }
            }
            match std::fs::write(&out, text) {
                Ok(()) => {
                    say(format_args!("wrote {}", out.display()));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(EXIT_CONFIG, e),
            }
        }
        Cmd::Solve { instance, method, node_limit, time_limit_ms, init_seed } => {
            let Some(method) = Method::from_tag(&method) else {
                return fail(EXIT_CONFIG, format!("unknown method {method:?}"));
            };
            let text = match std::fs::read_to_string(&instance) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", instance.display())),
            };
            let complex: ComplexInstance = match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", instance.display())),
            };
            let inst = complex_to_real(&complex);
            let mut opts = DetectOpts { init_seed, ..DetectOpts::default() };
            if let Some(n) = node_limit {
                opts.solver.node_limit = n;
            }
            if let Some(ms) = time_limit_ms {
                opts.solver.time_limit = Some(Duration::from_millis(ms));
            }
            match detect(&inst, method, &opts) {
                Ok(res) => {
                    let out = json!({
                        "method": res.method.tag(),
                        "objective": res.objective,
                        "x_hat": res.x_hat,
                        "wall_time_us": res.stats.wall_time.as_micros() as u64,
                        "stats": res.stats,
                    });
                    say(serde_json::to_string_pretty(&out).expect("stats serialize"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(EXIT_SOLVER, e),
            }
        }
        Cmd::Sweep { config, overrides, output, trials } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", config.display())),
            };
            let mut cfg = match parse_config(&text) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_CONFIG, e),
            };
            for pair in &overrides {
                let Some((key, value)) = pair.split_once('=') else {
                    return fail(EXIT_CONFIG, format!("--set expects KEY=VALUE, got {pair:?}"));
                };
                if let Err(e) = apply_config_key(&mut cfg, key.trim(), value.trim()) {
                    return fail(EXIT_CONFIG, e);
                }
            }
            if let Some(path) = output {
                cfg.output_path = path;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            match run_experiment(&cfg) {
                Ok(records) => {
                    let summaries = records.iter().filter(|r| r.trial < 0).count();
                    say(format_args!(
                        "wrote {} rows ({} summary) to {}",
                        records.len(),
                        summaries,
                        cfg.output_path.display()
                    ));
                    ExitCode::SUCCESS
                }
                Err(e @ BenchError::Config(_)) => fail(EXIT_CONFIG, e),
                Err(e) => fail(EXIT_SOLVER, e),
            }
        }
        Cmd::Plot { csv, out, x, y, linear_y, y_floor, title, all_rows } => {
            let spec = PlotSpec {
                x_column: x,
                y_column: y,
                log_y: !linear_y,
                y_floor,
                title,
                summary_only: !all_rows,
            };
            match emit_svg_plot(&csv, &out, &spec) {
                Ok(()) => {
                    say(format_args!("wrote {}", out.display()));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(EXIT_CONFIG, e),
            }
        }
    }
}
