use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use zeno_cli::acceptance;
use zeno_cli::commands;
use zeno_cli::config::{Method, ScenarioConfig};
use zeno_cli::figures;
use zeno_core::{CouplingKind, Execution};

#[derive(Parser, Debug)]
#[command(name = "zeno", version, about = "Survival probability of a decaying two-level emitter")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML). For `acceptance`, a directory holding acceptance.toml also works.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file, or directory for `figure`. CSV goes to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads. 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum)]
    model: Option<ModelArg>,

    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derived rates, cutoffs and time scales.
    Constants,
    /// Mode ladder: slice edges, effective frequencies and couplings.
    Discretize,
    /// Exact comb evolution with every mode occupation.
    Evolve,
    /// Survival probability by the selected method.
    Survival,
    /// Writes <id>.csv and <id>.gp for one figure.
    Figure {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(figures::FIGURE_IDS))]
        id: String,
    },
    /// Runs the acceptance criteria and exits nonzero if any fails.
    Acceptance,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    DipoleEx,
    ExactEx,
    DipoleAp,
    ExactAp,
}

impl From<ModelArg> for CouplingKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::DipoleEx => Self::DipoleEx,
            ModelArg::ExactEx => Self::ExactEx,
            ModelArg::DipoleAp => Self::DipoleAp,
            ModelArg::ExactAp => Self::ExactAp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Ww,
    Integral,
    Hybrid,
    Comb,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ww => Self::Ww,
            MethodArg::Integral => Self::Integral,
            MethodArg::Hybrid => Self::Hybrid,
            MethodArg::Comb => Self::Comb,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = match cli.threads {
        Some(0) => anyhow::bail!("--threads must be at least 1"),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("starting the thread pool")?;
            Execution::Parallel
        }
        None => Execution::default(),
    };

    if let Command::Acceptance = cli.command {
        let scenario = acceptance::load_scenario(cli.config.as_deref())?;
        let reports = acceptance::run_all(&scenario, exec);
        let text: String = reports.iter().map(|r| format!("{r}\n")).collect();
        print!("{text}");
        if let Some(out) = &cli.out {
            std::fs::write(out, &text).with_context(|| format!("writing {}", out.display()))?;
        }
        let failed = reports.iter().filter(|r| !r.passed).count();
        eprintln!("{} of {} criteria passed", reports.len() - failed, reports.len());
        return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }

    let config = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let mut scenario = config.resolve()?;
    if let Some(m) = cli.model {
        scenario.kind = m.into();
    }
    if let Some(m) = cli.method {
        scenario.method = m.into();
    }
    let out = cli.out.clone().or_else(|| scenario.out.clone().map(PathBuf::from));

    let table = match cli.command {
        Command::Constants => commands::constants(&scenario)?,
        Command::Discretize => commands::discretize(&scenario)?,
        Command::Evolve => commands::evolve_comb(&scenario, exec)?,
        Command::Survival => commands::survival(&scenario, scenario.method, exec)?,
        Command::Figure { id } => {
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            figures::build(&id, &scenario, exec)?.write(&dir)?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Acceptance => unreachable!("handled above"),
    };
    table.write(out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}
