use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "entropybench", version, about = "Randomness evaluation for local generators and LLM output")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for reports, histograms, transcripts and manifests.
    #[arg(long, global = true, default_value = "entropybench-out")]
    pub out: PathBuf,
    /// What to print on stdout. Files are always written in every format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Reject input files that are not clean integer lists instead of
    /// extracting every digit run.
    #[arg(long, global = true)]
    pub strict_parse: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the statistical battery on generators and integer files.
    Battery(BatteryArgs),
    /// Pairwise-distance entropy of card shuffles.
    Shuffle(ShuffleArgs),
    /// Character frequencies, repeats and battery results for a password corpus.
    Passwords(PasswordArgs),
    /// Collect a transcript from a chat-completion endpoint.
    Llm(LlmArgs),
    /// Write integers from a local generator to a file.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct BatteryArgs {
    /// Generator: os_entropy, crypto_below, seeded:SEED, constant:VALUE,
    /// top_heavy:MASS:FLOOR[:SEED], cluster:CENTER:HALF_WIDTH:MASS[:SEED]
    /// or truncated:LOW:HIGH[:SEED]. Repeatable.
    #[arg(long = "source")]
    pub sources: Vec<String>,
    /// Integer file or stored transcript (.jsonl). Repeatable.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Values drawn per generator.
    #[arg(long)]
    pub count: Option<usize>,
    /// Inclusive upper bound of values.
    #[arg(long)]
    pub max: Option<u64>,
    /// Bits written per value.
    #[arg(long)]
    pub bit_width: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cumulative,
    Fresh,
}

#[derive(Debug, Args)]
pub struct ShuffleArgs {
    /// Number of cards.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated trial counts, ascending.
    #[arg(long, value_delimiter = ',')]
    pub rounds: Option<Vec<usize>>,
    /// Oracle seeds averaged per row.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// First oracle seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Trial file (JSON, CSV, text) or stored shuffle transcript. Repeatable.
    #[arg(long = "trials")]
    pub trials: Vec<PathBuf>,
    /// Skip the oracle series.
    #[arg(long)]
    pub no_oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    Ascii8,
    AlphabetIndex,
}

#[derive(Debug, Args)]
pub struct PasswordArgs {
    /// One password per line, or a stored transcript. Repeatable.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Permitted characters; defaults to letters, digits and !@#$%^&*()-_
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Shortest repeated substring reported.
    #[arg(long)]
    pub min_len: Option<usize>,
    /// How characters become bits for the battery.
    #[arg(long, value_enum)]
    pub encoding: Option<EncodingArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Integers,
    Shuffles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SessionArg {
    Fresh,
    Continued,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToolModeArg {
    None,
    Rng,
}

#[derive(Debug, Args)]
pub struct LlmArgs {
    #[arg(long, value_enum, default_value_t = Task::Integers)]
    pub task: Task,
    /// Base URL; requests go to {endpoint}/chat/completions.
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Name of the transcript and of the source in later reports.
    #[arg(long)]
    pub label: Option<String>,
    /// Integers to request.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 255)]
    pub max: u64,
    /// Cards per deck for shuffles.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Shuffles to request.
    #[arg(long, default_value_t = 128)]
    pub trials: usize,
    #[arg(long, value_enum)]
    pub session: Option<SessionArg>,
    /// Send the random-number-generator system prompt.
    #[arg(long)]
    pub system_prompt: bool,
    /// Offer a random_int tool backed by a local generator.
    #[arg(long, value_enum, default_value_t = ToolModeArg::None)]
    pub tool_mode: ToolModeArg,
    /// Generator serving tool calls (same syntax as battery --source).
    #[arg(long, default_value = "crypto_below")]
    pub tool_source: String,
    /// Continue an earlier shuffle transcript.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub min_interval_ms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator (same syntax as battery --source).
    #[arg(long)]
    pub source: String,
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 255)]
    pub max: u64,
    /// Output file; defaults to <out>/<label>.txt
    #[arg(long)]
    pub output: Option<PathBuf>,
}
