use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracwest::cli::{self, CliError, Scenario, Settings};
use fracwest::cq::CqScheme;
use fracwest::kernels::{KernelFamily, KernelSpec};

#[derive(Parser, Debug)]
#[command(name = "fracwest")]
#[command(about = "Westervelt equation with fractional damping: experiments and debug dumps")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named scenario and write CSV output.
    Run {
        #[arg(long)]
        scenario: String,
        /// key = value overrides
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Time step of sweep runs.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        corrected: bool,
        /// Also write mass/stiffness matrices and CQ weights of the first run.
        #[arg(long)]
        dump_fem: bool,
    },
    /// Print CQ weights and correction weights as CSV.
    Weights {
        #[arg(long, default_value = "A")]
        kernel: KernelFamily,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        corrected: bool,
    },
}

fn settings(scenario: Scenario, config: Option<&PathBuf>) -> Result<Settings, CliError> {
    let text = match config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    Ok(cli::parse_config(&text, scenario)?)
}

fn execute(args: Args) -> Result<bool, CliError> {
    match args.command {
        Command::Run { scenario, config, out, dt, corrected, dump_fem } => {
            let scenario: Scenario = scenario.parse()?;
            let mut s = settings(scenario, config.as_ref())?;
            if let Some(dt) = dt {
                if !(dt > 0.0) {
                    return Err(CliError::Usage(format!("--dt {dt} must be positive")));
                }
                s.dt = dt;
            }
            s.corrected |= corrected;
            let out = out.unwrap_or_else(|| cli::default_out_dir(scenario));
            if dump_fem {
                if let Ok(plans) = cli::sweep_plans(scenario, &s) {
                    if let Some(first) = plans.first() {
                        cli::dump_fem(&out.join("fem"), &first.config)?;
                    }
                }
            }
            let outcome = cli::run_scenario(scenario, &s, &out, cli::thread_count())?;
            for report in &outcome.reports {
                print!("{}", report.summary());
            }
            for r in &outcome.runs {
                println!("{r}");
            }
            println!("output written to {}", out.display());
            Ok(!outcome.failed())
        }
        Command::Weights { kernel, mu, r, dt, n, corrected } => {
            let spec = KernelSpec::new(kernel, mu, r)?;
            let scheme = CqScheme::new(spec, dt, n, corrected)?;
            let stdout = std::io::stdout();
            scheme.write_csv(stdout.lock())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
