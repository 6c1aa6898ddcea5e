use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use monad_hym::flow::{self, FlowConfig};
use monad_hym::report;
use monad_hym::verify::{self, RunConfig};
use monad_hym::{Error, Result};

#[derive(Parser)]
#[command(name = "monad-hym", version, about = "Monad curvature checks, potential barrier and HYM heat flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Main sample count of a suite (points, Monte Carlo samples per shell, ...).
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Override a check tolerance, `name=value`; repeatable.
    #[arg(long = "tol", global = true)]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite: adhm, ansatz, potential, cone or growth.
    Verify { suite: String },
    /// Run the heat flow described by a JSON config.
    Flow { config: PathBuf },
    /// Merge suite reports into CSV tables.
    Report { files: Vec<PathBuf> },
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite } => {
            let mut cfg = RunConfig {
                seed: cli.seed.unwrap_or(0),
                samples: cli.samples,
                ..RunConfig::default()
            };
            for t in &cli.tol {
                cfg.add_tolerance(t)?;
            }
            if !verify::SUITES.contains(&suite.as_str()) {
                return Err(Error::Config(format!("unknown suite '{suite}'; expected one of {:?}", verify::SUITES)));
            }
            let r = verify::run_suite(&suite, &cfg)?;
            for c in &r.checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                println!("{verdict} {suite}.{} measured={:e} tolerance={:e}", c.name, c.measured, c.tolerance);
            }
            fs::create_dir_all(&cli.out)?;
            let path = cli.out.join(format!("{suite}.json"));
            write_json(&path, &r)?;
            println!("{} {suite}: report {}", if r.pass { "PASS" } else { "FAIL" }, path.display());
            Ok(r.pass)
        }
        Command::Flow { config } => {
            let mut cfg = FlowConfig::load(&config).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("{}: {io}", config.display())),
                e => e,
            })?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(n) = cli.samples {
                cfg.g_samples = n;
            }
            let (domain, mut state) = flow::setup(&cfg)?;
            fs::create_dir_all(&cli.out)?;
            let result = flow::run(&domain, &mut state, &cfg);
            flow::write_history(&cli.out.join("history.csv"), &state.history)?;
            let report = result?;
            flow::write_checkpoint(&cli.out.join("checkpoint.bin"), &domain, &state)?;
            write_json(&cli.out.join("flow_report.json"), &report)?;
            let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
            println!(
                "{} flow.ratio: {} steps, sup|iΛF| {:e} -> {:e}, ratio {:e} (target {})",
                verdict(report.ratio <= cfg.target_ratio),
                report.steps,
                report.initial_sup,
                report.final_sup,
                report.ratio,
                cfg.target_ratio
            );
            println!("{} flow.non_increasing", verdict(report.non_increasing));
            println!("{} flow.boundary_exact", verdict(report.boundary_exact));
            if let Some(b) = &report.barrier {
                println!("{} flow.barrier: C={} on {} nodes, smallest C {:e}", verdict(b.pass), b.c, b.nodes, b.required_c);
            }
            let pass = report.pass(cfg.target_ratio);
            Ok(pass)
        }
        Command::Report { files } => {
            let merged = report::merge(&report::load_reports(&files)?)?;
            for p in report::write_merged(&cli.out, &merged)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
