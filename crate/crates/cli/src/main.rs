use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use tipc_cli::run::CapacityRun;
use tipc_cli::{load_experiment, load_suite, source_text, CliError, ExperimentConfig, PresetKind, Source};

#[derive(Parser)]
#[command(name = "tipc", version, about = "Information processing capacity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Static capacities of a simulated or recorded state.
    Ipc(Common),
    /// Temporal capacities on the detrended state.
    Tipc(Common),
    /// NARMA10 analyses: divergence, basins, Lyapunov, approximate model, readouts.
    Narma(Common),
    /// Write the state and input series of a configured system as CSV.
    Simulate(Common),
    /// Dump the polynomial basis on the configured input.
    Basis(Common),
}

#[derive(Args)]
struct Common {
    /// Bundled configuration by name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the configuration text and exit.
    #[arg(long)]
    print_config: bool,
}

impl Common {
    fn source(&self) -> Source {
        match (&self.preset, &self.config) {
            (Some(p), _) => Source::Preset(p.clone()),
            (None, Some(c)) => Source::File(c.clone()),
            (None, None) => unreachable!("clap requires one of them"),
        }
    }
}

fn list(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

/// Loads the experiment config; `None` when only printing it.
fn experiment(c: Common) -> Result<Option<ExperimentConfig>, CliError> {
    let src = c.source();
    if c.print_config {
        print!("{}", source_text(&src, PresetKind::Experiment)?);
        return Ok(None);
    }
    let mut cfg = load_experiment(&src)?;
    if let Some(d) = c.out {
        cfg.output.dir = d;
    }
    Ok(Some(cfg))
}

fn summarize(run: &CapacityRun) {
    let rep = &run.report;
    let per: Vec<String> = rep.per_order_totals.iter().map(|(k, v)| format!("{k}:{v:.4}")).collect();
    println!("rank {}  total {:.4}  by order [{}]", rep.rank, rep.total, per.join(" "));
    list(&run.files);
}

fn run(cli: Cli) -> Result<(), CliError> {
    let t0 = Instant::now();
    match cli.command {
        Command::Narma(c) => {
            let src = c.source();
            if c.print_config {
                print!("{}", source_text(&src, PresetKind::Suite)?);
                return Ok(());
            }
            let mut cfg = load_suite(&src)?;
            if let Some(d) = c.out {
                cfg.output.dir = d;
            }
            let (rep, files) = tipc_cli::run_narma_suite(&cfg)?;
            if let Some(d) = &rep.divergence {
                match d.knee {
                    Some(k) => println!("survival drops through 1/2 at sigma = {k:.3}"),
                    None => println!("survival never drops through 1/2 on this grid"),
                }
            }
            if let Some(r) = &rep.approx_model {
                println!("approximate model trace NRMSE {:.4}", r.trace_nrmse);
            }
            list(&files);
        }
        Command::Ipc(c) => {
            let Some(cfg) = experiment(c)? else { return Ok(()) };
            summarize(&tipc_cli::run_ipc(&cfg)?);
        }
        Command::Tipc(c) => {
            let Some(cfg) = experiment(c)? else { return Ok(()) };
            summarize(&tipc_cli::run_tipc(&cfg)?);
        }
        Command::Simulate(c) => {
            let Some(cfg) = experiment(c)? else { return Ok(()) };
            list(&tipc_cli::run_simulate(&cfg)?);
        }
        Command::Basis(c) => {
            let Some(cfg) = experiment(c)? else { return Ok(()) };
            let (dump, files) = tipc_cli::run_basis(&cfg)?;
            println!("{} up to degree {} on {} samples", dump.family, dump.degree, dump.samples);
            list(&files);
        }
    }
    eprintln!("done in {:.1}s", t0.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tipc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
