use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirsimplex::{Direction, RefineOptions, Variant};
use dirsimplex_cli::error::{self, read_to_string, CliError, Result};
use dirsimplex_cli::expressivity::{self, ExpressivityOptions};
use dirsimplex_cli::{bench, commands, ExperimentConfig, Profile};

#[derive(Parser)]
#[command(name = "dirsimplex", version, about = "Directed simplicial complexes, D-SWL and Dir-SNN experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a graph file to its flag complex.
    Lift {
        graph: PathBuf,
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export one (k,i,j)-adjacency of a complex.
    Adjacency {
        complex: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "down")]
        direction: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two complexes with D-SWL.
    Dswl {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "full")]
        variant: String,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dir-GNN vs Dir-SNN on the separating digraph pair.
    Expressivity {
        /// Number of seeds, counted from --seed.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        swap_labels: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SNR sweep on the source-localization task.
    Bench {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Print the run matrix and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Write one source-localization dataset.
    Datagen {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, default_value = "directed")]
        mode: String,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long, default_value = "dataset")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML file layered over the profile.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    /// Replace the configured seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl ExperimentArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(p) => read_to_string(p)?,
            None => String::new(),
        };
        let mut cfg = ExperimentConfig::from_toml(self.profile, &text)?;
        if let Some(s) = self.seed {
            cfg.experiment.seeds = vec![s];
        }
        Ok(cfg)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => error::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Lift { graph, directed, max_dim, out } => {
            let (text, counts) = commands::lift_file(&graph, directed, max_dim)?;
            if let Some(p) = &out {
                error::write(p, text)?;
            }
            println!("{counts}");
        }
        Command::Adjacency { complex, dim, direction, k, i, j, out } => {
            let direction: Direction = direction.parse()?;
            let text = commands::adjacency_text(&read_to_string(&complex)?, dim, direction, k, i, j)?;
            emit(out.as_ref(), &text)?;
        }
        Command::Dswl { a, b, variant, max_rounds, out } => {
            let variant: Variant = variant.parse().map_err(|_| CliError::Validation(format!("unknown variant {variant:?} (expected full|reduced)")))?;
            let opts = RefineOptions { variant, max_rounds };
            let json = commands::dswl_json(&read_to_string(&a)?, &read_to_string(&b)?, opts)?;
            emit(out.as_ref(), &(json + "\n"))?;
        }
        Command::Expressivity { seeds, seed, swap_labels, out } => {
            let opts = ExpressivityOptions { seeds: (seed..seed + seeds).collect(), swap_labels, ..ExpressivityOptions::default() };
            let rows = expressivity::run(&opts)?;
            emit(out.as_ref(), &expressivity::table(&rows))?;
        }
        Command::Bench { exp, out, dry_run } => {
            let cfg = exp.load()?;
            if dry_run {
                print!("{}", bench::describe_matrix(&cfg));
                return Ok(());
            }
            bench::run(&cfg, &out, |cell, records| {
                for r in records {
                    eprintln!("{} snr={} seed={} {}: {:.3}", cell.mode(), cell.snr_db, cell.seed, r.model, r.test_accuracy);
                }
            })?;
            println!("wrote {}", out.display());
        }
        Command::Datagen { exp, mode, snr_db, out } => {
            let directed = match mode.as_str() {
                "directed" => true,
                "undirected" => false,
                other => return Err(CliError::Validation(format!("unknown mode {other:?} (expected directed|undirected)"))),
            };
            let data = commands::datagen(&exp.load()?, directed, snr_db, exp.seed.unwrap_or(0))?;
            error::write(&out.join("dataset.bin"), data.to_bytes())?;
            error::write(&out.join("labels.csv"), data.labels_csv())?;
            println!("{} samples, {} edges", data.samples.len(), data.n_edges);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
