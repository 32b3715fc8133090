use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use soliton_core::catalogue::Strategy;
use soliton_core::run::{exit, run, Command, Format, RunConfig};
use soliton_core::soliton::IdentityId;

/// Pointwise checker for almost Einstein solitons.
///
/// SOURCE is a manifold file or `catalogue:<name>` (see `list-catalogue`).
#[derive(Parser)]
#[command(name = "einsol", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Christoffel symbols, Ricci tensor and scalar curvature, with engine self-checks
    Curvature(Common),
    /// Soliton equation residual and agreement of the λ sources
    CheckSoliton(Common),
    /// Every λ source and their pairwise deviations
    Lambda(Common),
    /// Torse-forming fit and field classification
    ClassifyField(Common),
    /// The identity catalogue
    Identities {
        #[command(flatten)]
        common: Common,
        /// comma-separated identity ids, e.g. BOCHNER,EQ43
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
    },
    /// Built-in manifolds
    ListCatalogue {
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    source: String,
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::UniformRandom)]
    strategy: StrategyArg,
    /// pass threshold for every identity, in (0, 1e-2]
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    UniformRandom,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

fn config(command: Command, c: Common) -> RunConfig {
    RunConfig {
        source: c.source,
        command,
        points: c.points,
        seed: c.seed,
        strategy: match c.strategy {
            StrategyArg::UniformRandom => Strategy::UniformRandom,
            StrategyArg::Grid => Strategy::Grid,
        },
        tol: c.tol,
        only: None,
        format: c.format.into(),
        out: c.out,
    }
}

fn build(cli: Cli) -> Result<RunConfig, String> {
    Ok(match cli.command {
        Cmd::Curvature(c) => config(Command::Curvature, c),
        Cmd::CheckSoliton(c) => config(Command::CheckSoliton, c),
        Cmd::Lambda(c) => config(Command::Lambda, c),
        Cmd::ClassifyField(c) => config(Command::ClassifyField, c),
        Cmd::Identities { common, only } => {
            let mut cfg = config(Command::Identities, common);
            cfg.only = only
                .map(|names| {
                    names
                        .iter()
                        .map(|n| IdentityId::from_name(n.trim()).ok_or_else(|| format!("unknown identity id '{n}'")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?;
            cfg
        }
        Cmd::ListCatalogue { format, out } => {
            let mut cfg = RunConfig::new(Command::ListCatalogue, "catalogue");
            cfg.format = format.into();
            cfg.out = out;
            cfg
        }
    })
}

fn main() -> ExitCode {
    let cfg = match build(Cli::parse()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(exit::INPUT_ERROR as u8);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::INPUT_ERROR as u8);
        }
    };
    let rendered = report.render(cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(exit::INPUT_ERROR as u8);
            }
        }
        None => print!("{rendered}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
