use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use twistor_cli::{list_suites, resolve, run_suite, CliError, Format};

#[derive(Parser)]
#[command(name = "twistor", version, about = "Run numerical check suites for twistor constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite and print its report.
    Run {
        #[arg(long)]
        suite: String,
        /// Override every tolerance of the suite.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        jet_order: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Example parameter `k=v1,v2,...`; `box=R` sets the sampling half-width.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
    /// List the available suites.
    List,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for s in list_suites() {
                println!("{:<22} {}", s.name, s.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            suite,
            tol,
            jet_order,
            points,
            seed,
            format,
            params,
        } => {
            let run = || -> Result<bool, CliError> {
                let mut cfg = resolve(&suite)?;
                cfg.tol = tol.or(cfg.tol);
                cfg.jet_order = jet_order.unwrap_or(cfg.jet_order);
                cfg.points = points.unwrap_or(cfg.points);
                cfg.seed = seed.unwrap_or(cfg.seed);
                cfg.format = format.unwrap_or(cfg.format);
                for p in &params {
                    cfg.set_param(p)?;
                }
                let start = Instant::now();
                let report = run_suite(&cfg)?;
                eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
                let text = report.render(cfg.format)?;
                let mut stdout = std::io::stdout().lock();
                // a closed pipe is not worth a panic
                let _ = stdout.write_all(text.as_bytes());
                Ok(report.pass)
            };
            match run() {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
