//! The `sketchkit` binary: argument parsing, budget wiring, report output.
//!
//! Exit codes: 0 = decision positive, 1 = decision negative or invalid
//! input semantics, 2 = parse or resolution error, 3 = budget or cap
//! exceeded. With `--json` the report goes to standard output and the
//! human text to standard error; otherwise the human text goes to
//! standard output.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use sketchkit::construct::SearchBudget;
use sketchkit::sequents::DEFAULT_SECTION_CAP;
use sketchkit::Budget;
use sketchkit_cli::commands::{self, CliError, CommandOutput, Mode};
use sketchkit_cli::corpus;
use sketchkit_cli::report::{Report, Verdict, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "sketchkit", version, about = "Decide exactness properties of finite sketches")]
struct Cli {
    /// Emit the JSON report on standard output; human text moves to
    /// standard error.
    #[arg(long, global = true)]
    json: bool,

    /// Report `elapsed_ms` as 0, making output byte-identical across runs.
    #[arg(long, global = true)]
    zero_elapsed: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every declaration in a document.
    Check { file: PathBuf },

    /// Decide whether a sequent admits a verification over a base structure.
    Verify {
        file: PathBuf,
        /// Name of the sequent to decide.
        #[arg(long)]
        sequent: String,
        /// Name of the base structure (over the sequent's base sketch).
        #[arg(long)]
        structure: String,
        /// Which decider to run.
        #[arg(long, value_enum, default_value_t = Mode::Strict)]
        mode: Mode,
        /// Candidate cap for the functorial section search.
        #[arg(long)]
        cap: Option<u64>,
    },

    /// Search for a constructibility certificate for the outer inclusion.
    Constructible {
        file: PathBuf,
        /// Name of the sequent whose outer inclusion is certified.
        #[arg(long)]
        sequent: String,
        /// Node budget for the backtracking search.
        #[arg(long)]
        budget: Option<u64>,
    },

    /// Decide whether the inner inclusion is unconditional of finite kind.
    Unconditional {
        file: PathBuf,
        /// Name of the sequent to inspect.
        #[arg(long)]
        sequent: String,
    },

    /// Dualize every declaration and print or write the result.
    Dualize {
        file: PathBuf,
        /// Write the dualized document here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Remove the convergence conditions of one sketch.
    Strip {
        file: PathBuf,
        /// Name of the sketch to strip.
        #[arg(long)]
        sketch: String,
        /// Write the stripped document here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Operations on the bundled corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Execute the golden suite and print a summary table.
    Run,
}

impl Command {
    fn title(&self) -> String {
        match self {
            Command::Check { .. } => "check",
            Command::Verify { .. } => "verify",
            Command::Constructible { .. } => "constructible",
            Command::Unconditional { .. } => "unconditional",
            Command::Dualize { .. } => "dualize",
            Command::Strip { .. } => "strip",
            Command::Corpus { .. } => "corpus run",
        }
        .to_string()
    }

    fn inputs(&self) -> Vec<String> {
        match self {
            Command::Check { file }
            | Command::Verify { file, .. }
            | Command::Constructible { file, .. }
            | Command::Unconditional { file, .. }
            | Command::Dualize { file, .. }
            | Command::Strip { file, .. } => vec![file.display().to_string()],
            Command::Corpus { .. } => vec!["bundled:corpus.sk".to_string()],
        }
    }
}

/// `SKETCHKIT_BUDGET` overrides both the enumeration and the search
/// default; explicit flags override the environment.
fn env_budget() -> Result<Option<u64>, CliError> {
    match std::env::var("SKETCHKIT_BUDGET") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Input(format!("SKETCHKIT_BUDGET must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn dispatch(command: &Command) -> Result<CommandOutput, CliError> {
    let env = env_budget()?;
    let enum_budget = Budget::new(env.unwrap_or(Budget::default().max_candidates));
    let search_budget = |flag: Option<u64>| {
        SearchBudget::new(flag.or(env).unwrap_or(SearchBudget::default().max_nodes))
    };
    match command {
        Command::Check { file } => {
            let doc = commands::load_document(file)?;
            commands::check(&doc)
        }
        Command::Verify {
            file,
            sequent,
            structure,
            mode,
            cap,
        } => {
            let doc = commands::load_document(file)?;
            commands::verify(
                &doc,
                sequent,
                structure,
                *mode,
                enum_budget,
                cap.unwrap_or(DEFAULT_SECTION_CAP),
            )
        }
        Command::Constructible { file, sequent, budget } => {
            let doc = commands::load_document(file)?;
            commands::constructible(&doc, sequent, search_budget(*budget))
        }
        Command::Unconditional { file, sequent } => {
            let doc = commands::load_document(file)?;
            commands::unconditional(&doc, sequent)
        }
        Command::Dualize { file, out } => {
            let doc = commands::load_document(file)?;
            commands::dualize(&doc, out.as_deref())
        }
        Command::Strip { file, sketch, out } => {
            let doc = commands::load_document(file)?;
            commands::strip(&doc, sketch, out.as_deref())
        }
        Command::Corpus { action: CorpusAction::Run } => {
            corpus::run_corpus(enum_budget, search_budget(None))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let command = cli.command.title();
    let inputs = cli.command.inputs();
    let outcome = dispatch(&cli.command);
    let elapsed_ms = if cli.zero_elapsed {
        0
    } else {
        started.elapsed().as_millis() as u64
    };
    let (verdict, details, human, code) = match outcome {
        Ok(out) => {
            let code = out.exit_code();
            (out.verdict, out.details, out.human, code)
        }
        Err(e) => (
            Verdict::Error,
            serde_json::json!({ "error": e.to_string(), "kind": e.kind() }),
            format!("error: {e}"),
            e.exit_code(),
        ),
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command,
        inputs,
        verdict,
        details,
        elapsed_ms,
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        if !human.is_empty() {
            eprintln!("{human}");
        }
    } else {
        println!("{human}");
    }
    std::process::exit(code);
}
