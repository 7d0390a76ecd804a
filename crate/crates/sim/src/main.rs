use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dynsched::config::{build_code, load_alist, load_code, CodeFile, SimArgs};
use dynsched::experiment::run_experiment;
use dynsched::report::write_csv;
use dynsched::trace::analyze_trace;
use dynsched_core::{LdpcCode, VarRole};

#[derive(Parser)]
#[command(name = "dynsched", version, about = "Dynamic layered LDPC scheduling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BLER/BER simulation and write CSV.
    Sim(Box<SimArgs>),
    /// Summarize a JSON-lines decode trace.
    Trace {
        path: PathBuf,
        /// Units per decode (checks or layers).
        #[arg(long)]
        units: Option<usize>,
    },
    /// Print statistics of a code.
    Graphinfo {
        /// Code TOML file.
        #[arg(long, conflicts_with_all = ["alist", "base"])]
        code: Option<PathBuf>,
        /// Parity-check matrix in alist format.
        #[arg(long, conflicts_with = "base")]
        alist: Option<PathBuf>,
        /// Base-graph file, or `bg1`.
        #[arg(long, requires = "lifting")]
        base: Option<String>,
        #[arg(long)]
        lifting: Option<usize>,
        #[arg(long)]
        base_rows: Option<usize>,
    },
}

fn sim(args: &SimArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let Some(code_path) = &cfg.code else {
        bail!("no code given; use --code or set `code` in the config file");
    };
    let code = load_code(code_path)?;
    let result = run_experiment(&code, &cfg)?;
    match &cfg.output {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&result.points, f)?;
        }
        None => write_csv(&result.points, io::stdout().lock())?,
    }
    Ok(())
}

fn graphinfo(code: &LdpcCode) -> Result<()> {
    let g = code.graph();
    let count = |role| code.roles().iter().filter(|&&r| r == role).count();
    let mut out = io::stdout().lock();
    writeln!(out, "variables       {}", g.num_vars())?;
    writeln!(out, "checks          {}", g.num_checks())?;
    writeln!(out, "edges           {}", g.num_edges())?;
    writeln!(out, "mean var degree {:.4}", g.mean_var_degree())?;
    writeln!(out, "mean chk degree {:.4}", g.mean_check_degree())?;
    writeln!(out, "lifting         {}", code.lifting())?;
    writeln!(out, "layers          {}", code.layers().num_layers())?;
    writeln!(out, "punctured       {}", count(VarRole::Punctured))?;
    writeln!(out, "shortened       {}", count(VarRole::Shortened))?;
    writeln!(out, "truncated       {}", count(VarRole::Truncated))?;
    writeln!(out, "info bits       {}", code.info_bits())?;
    writeln!(out, "blocklength     {}", code.blocklength())?;
    writeln!(out, "rate            {:.5}", code.rate())?;
    match code.first_check_node() {
        Ok(c) => writeln!(out, "first check     {c}")?,
        Err(e) => writeln!(out, "first check     none ({e})")?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sim(args) => sim(&args),
        Command::Trace { path, units } => {
            let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
            let report = analyze_trace(BufReader::new(f), units)?;
            serde_json::to_writer_pretty(io::stdout().lock(), &report)?;
            println!();
            Ok(())
        }
        Command::Graphinfo {
            code,
            alist,
            base,
            lifting,
            base_rows,
        } => {
            let code = match (code, alist, base) {
                (Some(path), _, _) => load_code(&path)?,
                (_, Some(path), _) => load_alist(&path)?,
                (_, _, Some(base)) => {
                    let file = CodeFile {
                        base: Some(base),
                        alist: None,
                        lifting,
                        base_rows,
                        punctured_cols: 2,
                        shortened: 0,
                        truncated: 0,
                        nominal_rate: None,
                        nominal_blocklength: None,
                    };
                    // Relative paths resolve against the working directory.
                    build_code(&file, &std::env::current_dir()?.join("cli"))?
                }
                _ => bail!("give one of --code, --alist or --base"),
            };
            graphinfo(&code)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
