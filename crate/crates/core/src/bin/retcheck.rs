use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ret_core::config::{ConfigError, RunConfig, Suite};
use ret_core::sweep::Execution;
use ret_core::verify::{run_export, run_verify, VerifyError};

#[derive(Debug, Parser)]
#[command(name = "retcheck", version, about = "Verify and tabulate 14-field relativistic closures")]
struct Cli {
    /// Worker threads for point sweeps (0 = one per core).
    #[arg(long, env = "RET_THREADS", global = true, default_value_t = 0)]
    threads: usize,
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run verification suites and print a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Restrict to these suites; repeatable.
        #[arg(long = "suite", value_enum)]
        suites: Vec<Suite>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write coefficient, projection and classical-limit tables.
    Export {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(e: VerifyError) -> ExitCode {
    eprintln!("retcheck: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("retcheck: {e}");
            return ExitCode::from(3);
        }
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let load = |p: &PathBuf| RunConfig::load_file(p).map_err(|e: ConfigError| VerifyError::from(e));
    match cli.command {
        Command::Verify { config, suites, report } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let rep = match run_verify(&cfg, &suites, exec) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let json = rep.to_json();
            match report {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json) {
                        return fail(VerifyError::Io {
                            path: path.display().to_string(),
                            message: e.to_string(),
                        });
                    }
                }
                None => print!("{json}"),
            }
            for s in &rep.suites {
                eprintln!("{:<20} {:?}", s.name, s.status);
            }
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Export { config, out } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match run_export(&cfg, &out, exec) {
                Ok(paths) => {
                    for p in paths {
                        eprintln!("wrote {}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
