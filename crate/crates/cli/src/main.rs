use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use treeloc::run::{self, Budgets, Command, Format, RunConfig};

#[derive(Parser)]
#[command(name = "treeloc", version, about = "Tree localization toolkit")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Seed recorded in every output and driving seeded runs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Deepest accepted domain (overrides TREELOC_MAX_DEPTH)
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Most accepted product coordinates (overrides TREELOC_MAX_COORDS)
    #[arg(long, global = true)]
    max_coords: Option<usize>,
    /// Largest accepted search space (overrides TREELOC_MAX_SEARCH_NODES)
    #[arg(long, global = true)]
    max_search_nodes: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
    Table,
}

#[derive(Subcommand)]
enum Sub {
    /// Check a tree file against a class and report its shape
    Validate {
        #[arg(long)]
        tree: PathBuf,
        /// k-tree, k-branching, accelerating or leveled
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Select functions from a family so the closure stays narrow
    Extract {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        n: u32,
        /// Arity bound, grouped families only
        #[arg(long)]
        k: Option<u32>,
        /// Guard length, grouped families only
        #[arg(long)]
        m: Option<usize>,
    },
    /// Check whether a predictor predicts a function
    Predict {
        #[arg(long)]
        predictor: PathBuf,
        /// The function, written as comma-separated letters
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 0)]
        m: usize,
    },
    /// Find the least function no listed predictor predicts
    Evade {
        #[arg(long = "predictor", required = true)]
        predictors: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        m: usize,
    },
    /// Refine a condition so its branches avoid a given tree
    Avoid {
        #[arg(long)]
        condition: PathBuf,
        #[arg(long)]
        avoid: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Prune a decided name down to a narrow value cover
    Prune {
        #[arg(long)]
        name: PathBuf,
        #[arg(long, default_value_t = 2)]
        target_splits: usize,
    },
    /// Run one refinement step on a product state
    Consolidate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 0)]
        beta: usize,
    },
    /// Read the level sets of decided values off a name
    Slalom {
        #[arg(long)]
        name: PathBuf,
    },
    /// Compute a covering family of trees or predictors
    Cover {
        #[arg(long)]
        b: u8,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        k: usize,
        /// trees or predictors
        #[arg(long, default_value = "trees")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        grace: usize,
        /// Prove minimality instead of the greedy bound
        #[arg(long)]
        exact: bool,
    },
    /// Compose an outer cover with an inner cover of its split words
    Compose {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        inner: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run the acceptance criteria and print a pass or fail table
    VerifySuite {
        /// Comma-separated criterion numbers, all when absent
        #[arg(long)]
        criteria: Option<String>,
    },
}

fn parse_letters(text: &str) -> Result<Vec<u8>, String> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u8>()
                .map_err(|_| format!("{part:?} is not a letter"))
        })
        .collect()
}

fn parse_criteria(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| format!("{part:?} is not a criterion number"))
        })
        .collect()
}

fn build_command(sub: Sub) -> Result<Command, String> {
    Ok(match sub {
        Sub::Validate { tree, class, k } => Command::Validate { tree, class, k },
        Sub::Extract { family, n, k, m } => Command::Extract { family, n, k, m },
        Sub::Predict { predictor, f, m } => Command::Predict {
            predictor,
            f: parse_letters(&f)?,
            m,
        },
        Sub::Evade { predictors, m } => Command::Evade { predictors, m },
        Sub::Avoid { condition, avoid, k } => Command::Avoid { condition, avoid, k },
        Sub::Prune { name, target_splits } => Command::Prune { name, target_splits },
        Sub::Consolidate { state, beta } => Command::Consolidate { state, beta },
        Sub::Slalom { name } => Command::Slalom { name },
        Sub::Cover {
            b,
            depth,
            k,
            mode,
            grace,
            exact,
        } => Command::Cover {
            b,
            depth,
            k,
            mode,
            grace,
            exact,
        },
        Sub::Compose { outer, inner, k } => Command::Compose { outer, inner, k },
        Sub::VerifySuite { criteria } => Command::VerifySuite {
            criteria: criteria.as_deref().map(parse_criteria).transpose()?,
        },
    })
}

fn main() {
    let cli = Cli::parse();
    let mut budgets = Budgets::from_env();
    if let Some(depth) = cli.max_depth {
        budgets.max_depth = depth;
    }
    if let Some(coords) = cli.max_coords {
        budgets.max_coords = coords;
    }
    if let Some(nodes) = cli.max_search_nodes {
        budgets.max_search_nodes = nodes;
    }
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Dot => Format::Dot,
        FormatArg::Table => Format::Table,
    };
    let command = match build_command(cli.command) {
        Ok(command) => command,
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    };
    let config = RunConfig {
        command,
        budgets,
        seed: cli.seed,
        format,
    };
    match run::execute(&config) {
        Ok(outcome) => {
            print!("{}", outcome.body);
            std::process::exit(if outcome.failed { 1 } else { 0 });
        }
        Err(error) => {
            eprintln!("error: {}", error.message());
            std::process::exit(error.exit_code());
        }
    }
}
