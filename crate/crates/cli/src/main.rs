mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jcbayes::bounds::{cr_bound_ml, cr_bound_mmse};
use jcbayes::ml::{average_cost, cost_max, ml_average_estimate, ml_povm};
use jcbayes::mmse::{average_estimate, solve};
use jcbayes::sweep::{find_tau_star, run_sweep, Config, Setup, SweepSpec, Table};
use jcbayes::verify::verify_all;
use output::Format;

/// Bayesian estimation of the Jaynes-Cummings coupling strength.
#[derive(Parser)]
#[command(name = "jcbayes", version)]
struct Cli {
    /// TOML configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detector-side state ρ(g) at the probe coupling.
    State,
    /// MMSE estimator, its cost, average estimate and bound at the probe.
    Mmse,
    /// ML measurement, its cost, average estimate and bound at the probe.
    Ml,
    /// One-axis sweep described by the [sweep] section.
    Sweep,
    /// Recommended interaction time.
    TauStar,
    /// Oracle and invariant suite.
    Verify {
        /// Multiply every c_max by this factor before the positivity audit.
        #[arg(long, default_value_t = 1.0)]
        inflate_cmax: f64,
    },
}

enum Failure {
    Config(String),
    Verification,
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Verification => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl From<jcbayes::Error> for Failure {
    fn from(e: jcbayes::Error) -> Self {
        use jcbayes::Error as E;
        match e {
            E::DegenerateGamma0 { .. } | E::TruncationTooSmall { .. } | E::SinVanishes | E::SingularSld { .. } => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn load(path: Option<&PathBuf>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn single_row(columns: &[&str], row: Vec<f64>) -> Table {
    Table {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows: vec![row],
    }
}

fn render(cli: &Cli, config: &Config, setup: &Setup, table: &Table) -> String {
    match cli.format {
        Format::Csv => output::csv(table),
        Format::Json => output::json(config, setup, table),
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let config = load(cli.config.as_ref())?;
    let setup = config.resolve()?;
    let Setup { prior, scenario, g } = setup;
    let field = scenario.field();
    let g0 = prior.g0;

    let table = match &cli.command {
        Command::State => {
            let rho = *scenario.detector_state(g, &field)?.matrix();
            single_row(
                &["g_over_g0", "rho_ee", "rho_gg", "rho_eg_re", "rho_eg_im"],
                vec![g / g0, rho.ee, rho.gg, rho.eg.re, rho.eg.im],
            )
        }
        Command::Mmse => {
            let res = solve(&prior, &scenario, &field)?;
            let bound = cr_bound_mmse(&res, g, &scenario, &field)?;
            let [a, b] = res.estimates;
            single_row(
                &[
                    "g0_tau_c",
                    "eig_lo",
                    "eig_hi",
                    "c_min",
                    "avg_estimate",
                    "cr_bound",
                    "mse",
                    "first_power_bound",
                ],
                vec![
                    scenario.tau_c * g0,
                    a.min(b),
                    a.max(b),
                    res.c_min,
                    average_estimate(&res, g, &scenario, &field)?,
                    bound.lower_bound,
                    bound.mse,
                    bound.first_power_bound,
                ],
            )
        }
        Command::Ml => {
            if scenario.delta != 0.0 || scenario.alpha.norm() != 0.0 || scenario.is_dissipative() {
                return Err(Failure::Config(
                    "ml requires delta = 0, alpha = 0 and no in-cavity losses".into(),
                ));
            }
            let povm = ml_povm(&prior, scenario.tau_c, scenario.gamma_tau_f)?;
            let bound = cr_bound_ml(&povm, g)?;
            single_row(
                &[
                    "g0_tau_c",
                    "c_max",
                    "cost",
                    "cost_quadrature",
                    "avg_estimate",
                    "cr_bound",
                    "mse",
                    "first_power_bound",
                ],
                vec![
                    scenario.tau_c * g0,
                    povm.c_max,
                    cost_max(&povm),
                    average_cost(&povm),
                    ml_average_estimate(&povm, g),
                    bound.lower_bound,
                    bound.mse,
                    bound.first_power_bound,
                ],
            )
        }
        Command::Sweep => {
            let sweep = config
                .sweep
                .as_ref()
                .ok_or_else(|| Failure::Config("sweep needs a [sweep] section".into()))?;
            run_sweep(&SweepSpec::new(sweep, setup)?)?
        }
        Command::TauStar => {
            let star = find_tau_star(&prior, &scenario, &field)?;
            single_row(&["g0_tau_star", "c_min"], vec![star.tau_c * g0, star.c_min])
        }
        Command::Verify { inflate_cmax } => {
            let report = verify_all(cli.seed, *inflate_cmax)?;
            let text = match cli.format {
                Format::Json => output::json(&config, &setup, &report),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = report
                        .checks
                        .iter()
                        .map(|c| {
                            vec![
                                c.name.clone(),
                                c.passed.to_string(),
                                output::number(c.value),
                                output::number(c.threshold),
                            ]
                        })
                        .collect();
                    output::key_value_csv(&["check", "passed", "value", "threshold"], &rows)
                }
            };
            emit(cli, &text)?;
            return if report.passed {
                Ok(String::new())
            } else {
                Err(Failure::Verification)
            };
        }
    };
    Ok(render(cli, &config, &setup, &table))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| if text.is_empty() { Ok(()) } else { emit(&cli, &text) });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(msg) => eprintln!("error: {msg}"),
                Failure::Numeric(msg) => eprintln!("numeric error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
