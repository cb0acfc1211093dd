use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hdg_stokes::experiments::{self, RunConfig};
use hdg_stokes::Error;

#[derive(Parser)]
#[command(name = "hdg-stokes", version, about = "Hybrid DG Stokes solver with Schwarz preconditioners")]
struct Cli {
    /// File of `key=value` lines; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study on uniformly refined unit-square meshes.
    Converge(Opts),
    /// GMRES iteration counts for each preconditioner.
    Precond(Opts),
    /// Mesh and dof counts.
    Info(Opts),
    /// Direct solve, one row per triangle.
    Solve(Opts),
}

/// Every option is a string so the config file and the flags go through the
/// same parser.
#[derive(Args, Default)]
struct Opts {
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    bc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    n0: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    parts: Option<String>,
    #[arg(long)]
    overlap: Option<String>,
    /// Comma-separated list of ras, mras-tvnf, mras-nvtf, none.
    #[arg(long)]
    precond: Option<String>,
    /// assembled or restricted.
    #[arg(long)]
    mras_local: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    #[arg(long)]
    restart: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// random or zero.
    #[arg(long)]
    guess: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Directory for one `iter,value` history file per preconditioner.
    #[arg(long)]
    history_dir: Option<String>,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let all = [
            ("case", &self.case),
            ("bc", &self.bc),
            ("eps", &self.eps),
            ("tau", &self.tau),
            ("nu", &self.nu),
            ("domain", &self.domain),
            ("n", &self.n),
            ("n0", &self.n0),
            ("levels", &self.levels),
            ("parts", &self.parts),
            ("overlap", &self.overlap),
            ("precond", &self.precond),
            ("mras-local", &self.mras_local),
            ("tol", &self.tol),
            ("max-iter", &self.max_iter),
            ("restart", &self.restart),
            ("seed", &self.seed),
            ("guess", &self.guess),
            ("out", &self.out),
            ("history-dir", &self.history_dir),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }
}

fn emit(cfg: &RunConfig, text: &str) -> hdg_stokes::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> hdg_stokes::Result<()> {
    let (name, opts) = match &cli.command {
        Command::Converge(o) => ("converge", o),
        Command::Precond(o) => ("precond", o),
        Command::Info(o) => ("info", o),
        Command::Solve(o) => ("solve", o),
    };
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for (k, v) in opts.pairs() {
        cfg.set(k, v)?;
    }
    match name {
        "converge" => emit(&cfg, &experiments::run_converge(&cfg)?),
        "precond" => {
            let study = experiments::precond_study(&cfg)?;
            if let Some(dir) = &cfg.history_dir {
                std::fs::create_dir_all(dir)?;
                for r in &study.runs {
                    let path = dir.join(format!("{}_{}.csv", r.choice.as_str(), r.n_sub));
                    std::fs::write(path, r.report.history_csv(Some(cfg.seed)))?;
                }
            }
            emit(&cfg, &study.table_csv())
        }
        "info" => emit(&cfg, &experiments::run_info(&cfg)?),
        _ => emit(&cfg, &experiments::run_solve(&cfg)?),
    }
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Parse { .. } | Error::Validation(_) | Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
