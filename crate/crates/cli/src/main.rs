use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orichain::homology::ChainModel;
use orichain_cli::commands::{self, Outcome, Suite};
use orichain_cli::format::canonical;
use orichain_cli::{CliError, ProblemFile};

#[derive(Parser)]
#[command(name = "orichain", version, about = "Oriented chains, homology, gluing and cobordisms of simplicial cycles")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integral homology of a complex, optionally relative to a subcomplex.
    Homology {
        /// Problem file of kind "complex"; `-` reads stdin.
        input: String,
        #[arg(long, value_enum, default_value_t = Model::Oriented)]
        model: Model,
        /// A second complex file used as the subcomplex.
        #[arg(long)]
        subcomplex: Option<PathBuf>,
    },
    /// Glue the cells of a cycle along its face pairing.
    Glue {
        /// Problem file of kind "cycle"; `-` reads stdin.
        input: String,
        /// Write the glued surface as an OFF mesh (2-dimensional cycles only).
        #[arg(long)]
        export_off: Option<PathBuf>,
        /// Check that the fundamental cycle of the gluing is homologous to the input.
        #[arg(long)]
        check_identity: bool,
    },
    /// Partition and glue a cobordism between two cycles.
    Cobordism {
        /// Problem file of kind "cobordism"; `-` reads stdin.
        input: String,
    },
    /// Evaluate the smoothing maps.
    Smoothing {
        #[command(subcommand)]
        action: SmoothingAction,
    },
    /// Run the built-in verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Directory of cover fixtures replacing the bundled ones.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SmoothingAction {
    /// Evaluate φ_k at given points or on a grid.
    Eval {
        /// Dimension of the simplex the points live in.
        #[arg(long)]
        k: usize,
        /// JSON array of weight vectors (integers or "p/q" strings).
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        points: Option<PathBuf>,
        /// All points with coordinates in (1/n)ℤ.
        #[arg(long)]
        grid: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Oriented,
    Ordered,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Homotopy,
    Mv,
    All,
}

fn read_text(input: &str) -> Result<String, CliError> {
    if input == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
        return Ok(text);
    }
    read_path(Path::new(input))
}

fn read_path(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_path(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Homology { input, model, subcomplex } => {
            let file = ProblemFile::parse(&read_text(input)?)?;
            let extra = subcomplex.as_deref().map(|p| read_path(p).and_then(|t| ProblemFile::parse(&t))).transpose()?;
            let model = match model {
                Model::Oriented => ChainModel::Oriented,
                Model::Ordered => ChainModel::Ordered,
            };
            commands::homology_cmd(&file, model, extra.as_ref())
        }
        Command::Glue { input, export_off, check_identity } => {
            let file = ProblemFile::parse(&read_text(input)?)?;
            let result = commands::glue_cmd(&file, *check_identity, export_off.is_some())?;
            if let (Some(path), Some(off)) = (export_off, &result.off) {
                write_path(path, off)?;
            }
            Ok(result.outcome)
        }
        Command::Cobordism { input } => commands::cobordism_cmd(&ProblemFile::parse(&read_text(input)?)?),
        Command::Smoothing { action: SmoothingAction::Eval { k, points, grid } } => {
            let max_dim = commands::max_dim_from_env()?;
            if *k > max_dim {
                return Err(CliError::DimensionOverflow { requested: *k, max: max_dim });
            }
            let pts = match (points, grid) {
                (Some(path), _) => commands::parse_points(&read_path(path)?, *k)?,
                (None, Some(n)) if *n > 0 => commands::grid_points(*k, *n),
                _ => return Err(CliError::Schema("--grid needs n ≥ 1".into())),
            };
            commands::smoothing_eval_cmd(*k, &pts, max_dim)
        }
        Command::Verify { suite, fixtures } => {
            let suite = match suite {
                SuiteArg::Homotopy => Suite::Homotopy,
                SuiteArg::Mv => Suite::Mv,
                SuiteArg::All => Suite::All,
            };
            let covers = match fixtures {
                Some(dir) => commands::read_cover_dir(dir)?,
                None => commands::bundled_covers(),
            };
            commands::verify_cmd(suite, &covers)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|o| {
        let text = canonical(&o.report);
        match &cli.output {
            Some(path) => write_path(path, &text)?,
            None => print!("{text}"),
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
