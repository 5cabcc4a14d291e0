use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "codemark", version, about = "Watermark source code with semantics-preserving rewrites")]
struct Cli {
    /// Run configuration file (JSON). Flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for batch work (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Print more diagnostics to stderr (repeat for more).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read a source tree into a codebase file, one snippet per file.
    Ingest {
        dir: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        /// Keep only these languages (c, cpp, java, javascript, python).
        #[arg(long, value_delimiter = ',')]
        lang: Vec<String>,
    },
    /// Watermark every snippet of a codebase.
    Embed {
        #[arg(short, long, value_name = "FILE")]
        codebase: PathBuf,
        #[command(flatten)]
        message: Message,
        #[command(flatten)]
        run: RunFlags,
        /// Output directory: snippets/, records.jsonl, failures.jsonl.
        #[arg(short, long, value_name = "DIR")]
        output: PathBuf,
    },
    /// Recover watermarks from suspect code.
    Extract {
        #[arg(short, long, value_name = "FILE")]
        codebase: PathBuf,
        /// A suspect file or a directory of them.
        #[arg(short, long, value_name = "PATH")]
        input: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Apply a removal attack to a directory of snippets.
    Attack {
        #[arg(short, long, value_name = "DIR")]
        input: PathBuf,
        #[command(flatten)]
        attack: AttackFlags,
        /// Random seed (default: the config seed).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Also write tuning pairs (attacked text, original id) here.
        #[arg(long, value_name = "FILE")]
        pairs: Option<PathBuf>,
        /// Output directory: snippets/ and attacks.jsonl.
        #[arg(short, long, value_name = "DIR")]
        output: PathBuf,
    },
    /// Score extraction results against embedding records.
    Eval {
        #[arg(long, value_name = "FILE")]
        records: PathBuf,
        #[arg(long, value_name = "FILE")]
        results: PathBuf,
        /// Suspect code, for syntax and unit-test rates.
        #[arg(long, value_name = "DIR")]
        suspects: Option<PathBuf>,
        /// Original codebase, for similarity degradation.
        #[arg(short, long, value_name = "FILE")]
        codebase: Option<PathBuf>,
        /// Unit-test command file.
        #[arg(long, value_name = "FILE")]
        tests: Option<PathBuf>,
        /// failures.jsonl written by embed.
        #[arg(long, value_name = "FILE")]
        failures: Option<PathBuf>,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Embed, optionally attack, extract and evaluate in one run.
    Pipeline {
        #[arg(short, long, value_name = "FILE")]
        codebase: PathBuf,
        #[command(flatten)]
        message: Message,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long = "attack", value_enum, value_name = "KIND")]
        attack_kind: Option<AttackKindArg>,
        /// Rename fraction for --attack rename.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Rule count for --attack transform.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Attack seed (default: the config seed).
        #[arg(long)]
        attack_seed: Option<u64>,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Grid-search the retrieval weights on development pairs.
    TuneWeights {
        #[arg(short, long, value_name = "FILE")]
        codebase: PathBuf,
        /// JSONL of {text, language, original_id}.
        #[arg(long, value_name = "FILE")]
        dev: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Inspect the transformation rule catalog.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
}

#[derive(Subcommand, Debug)]
enum RulesAction {
    /// Print the catalog as JSON.
    Export {
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Message {
    /// Embed this exact message (e.g. 1011) in every snippet.
    #[arg(long, conflicts_with = "seed")]
    bits: Option<String>,
    /// Draw random messages from this seed (default: the config seed).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct RunFlags {
    /// Watermark length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Retrieval weights file.
    #[arg(long, value_name = "FILE")]
    weights: Option<PathBuf>,
    /// Unit-test command file.
    #[arg(long, value_name = "FILE")]
    tests: Option<PathBuf>,
    /// Decoding margin on the semantic similarity.
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Args, Debug)]
struct AttackFlags {
    #[arg(long, value_enum)]
    kind: AttackKindArg,
    /// Fraction of variables to rename.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Number of rules to apply.
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BackendArg {
    Mock,
    Remote,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AttackKindArg {
    Rename,
    Transform,
    Paraphrase,
}

/// Bad invocation; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl fmt::Display) -> anyhow::Error {
    UsageError(msg.to_string()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("CODEMARK_LOG")
        .format_timestamp(None)
        .init();

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
