mod commands;

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "jsonlogic", version, about = "Query, validate, compile and check satisfiability of JSON logics")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Logic {
    Jnl,
    Jsl,
    Rjsl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Language {
    Schema,
    Jsl,
    Rjsl,
    Jnl,
    /// Find-style filter documents (`{"a.b": {"$eq": 1}}`).
    Find,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Via {
    Jsl,
}

/// Formula or schema text, given inline or read from a file.
#[derive(Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// The text itself.
    #[arg(short = 'e', long = "expr")]
    expr: Option<String>,
    /// File to read it from, `-` for standard input.
    #[arg(short = 'f', long = "file")]
    file: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Nodes of a document satisfying a JNL formula.
    Query {
        /// Document path, `-` for standard input.
        doc: String,
        #[command(flatten)]
        formula: Source,
        /// Only decide membership of this node (`a/1/b`, `(root)`).
        #[arg(long)]
        at: Option<String>,
    },
    /// Validate a document against a schema or formula.
    Validate {
        doc: String,
        #[command(flatten)]
        against: Source,
        /// What the `-e`/`-f` argument holds.
        #[arg(long, value_enum, default_value_t = Language::Schema)]
        logic: Language,
        /// Compile the schema first and evaluate the compiled formula.
        #[arg(long, value_enum)]
        via: Option<Via>,
    },
    /// Translate between schemas and the logics.
    Compile {
        #[command(flatten)]
        input: Source,
        #[arg(long, value_enum)]
        from: Language,
        #[arg(long, value_enum)]
        to: Language,
    },
    /// Bounded satisfiability.
    Sat {
        #[command(flatten)]
        formula: Source,
        #[arg(long, value_enum, default_value_t = Logic::Jsl)]
        logic: Logic,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        max_width: usize,
        #[arg(long, default_value_t = 3)]
        max_atoms: usize,
        #[arg(long, default_value_t = jsonlogic::sat::DEFAULT_BUDGET)]
        budget: u64,
        /// Search strategy by name; chosen from the input when omitted.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Precedence graph and well-formedness of a recursive expression.
    CheckWf {
        #[command(flatten)]
        expr: Source,
    },
    /// Compile a formula to a J-automaton and run it on a document.
    Automaton {
        doc: String,
        #[command(flatten)]
        formula: Source,
        #[arg(long, value_enum, default_value_t = Logic::Jsl)]
        logic: Logic,
        /// Print the automaton before the verdict.
        #[arg(long)]
        show: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Tree(#[from] jsonlogic::tree::TreeError),
    #[error(transparent)]
    Jnl(#[from] jsonlogic::jnl::JnlError),
    #[error(transparent)]
    Jsl(#[from] jsonlogic::jsl::JslError),
    #[error(transparent)]
    Recursive(#[from] jsonlogic::recursive::RecursiveError),
    #[error(transparent)]
    Schema(#[from] jsonlogic::schema::SchemaError),
    #[error(transparent)]
    Translate(#[from] jsonlogic::translate::TranslateError),
    #[error(transparent)]
    Find(#[from] jsonlogic::jnl::FindError),
    #[error(transparent)]
    Sat(#[from] jsonlogic::sat::SatError),
}

pub fn read_input(path: &str) -> Result<String, CliError> {
    let io = |source| CliError::Io { path: path.to_string(), source };
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

impl Source {
    pub fn text(&self) -> Result<String, CliError> {
        match (&self.expr, &self.file) {
            (Some(e), _) => Ok(e.clone()),
            (None, Some(f)) => read_input(f),
            (None, None) => Err(CliError::Usage("give -e TEXT or -f FILE".into())),
        }
    }
}

/// What a command found; decides the exit code.
pub enum Outcome {
    Yes,
    No,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Query { doc, formula, at } => commands::query(cli.format, doc, formula, at.as_deref()),
        Command::Validate { doc, against, logic, via } => commands::validate(cli.format, doc, against, *logic, *via),
        Command::Compile { input, from, to } => commands::compile(cli.format, input, *from, *to),
        Command::Sat { formula, logic, max_depth, max_width, max_atoms, budget, strategy } => {
            let bounds = jsonlogic::sat::Bounds { max_depth: *max_depth, max_width: *max_width, max_atoms: *max_atoms };
            commands::sat(cli.format, formula, *logic, bounds, *budget, strategy.as_deref())
        }
        Command::CheckWf { expr } => commands::check_wf(cli.format, expr),
        Command::Automaton { doc, formula, logic, show } => commands::automaton(cli.format, doc, formula, *logic, *show),
    };
    match result {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
