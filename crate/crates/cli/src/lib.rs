//! The `qlogic` command line: argument parsing, budget profiles, the
//! reproducibility header and the exit-code contract. Subcommands live in
//! [`commands`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

pub mod commands;

pub const TOOL: &str = "qlogic";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Names the default budget profile: `quick`, `desk` or `thorough`.
pub const PROFILE_VAR: &str = "QLOGIC_PROFILE";

pub mod exit {
    pub const PROVED: u8 = 0;
    pub const REFUTED: u8 = 1;
    pub const UNKNOWN: u8 = 2;
    /// A cap cut the run short; the output is partial.
    pub const TRUNCATED: u8 = 3;
    pub const USAGE: u8 = 64;
    pub const IO: u8 = 66;
    pub const INTERNAL: u8 = 70;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Dot,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Exact-sequence logic toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Saturation rounds.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Sampled models or elements.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Largest sampled dimension.
    #[arg(long, global = true)]
    pub dims: Option<usize>,
    /// Worker threads. Never changes the output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide an algebraic sequent in the exact theory of a quiver.
    Prove {
        quiver: PathBuf,
        sequent: PathBuf,
        /// Where to write a refutation witness.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Extract or load a presentation, build its model and test irreducibility.
    Present {
        quiver: PathBuf,
        /// Sort of the sampled generator.
        #[arg(long)]
        sort: Option<String>,
        /// A presentation in JSON instead of a sampled one.
        #[arg(long)]
        presentation: Option<PathBuf>,
    },
    /// Homomorphisms out of the initial model, or between two presentations.
    Hom {
        quiver: PathBuf,
        #[arg(long, requires = "target")]
        source: Option<PathBuf>,
        #[arg(long, requires = "source")]
        target: Option<PathBuf>,
        #[arg(long)]
        injective: bool,
    },
    /// Fraïssé test beds on finite structures.
    Fraisse {
        /// boolean, boolean-plain, sets, sets-plain, vector or vector-plain.
        #[arg(long)]
        cat: String,
        /// Build a chain with this many steps.
        #[arg(long, conflicts_with = "triviality")]
        chain: Option<usize>,
        #[arg(long)]
        triviality: bool,
    },
    /// Build the leveled triangulated construction and check its axioms.
    Tricat {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Quotient by the composites of every registered triangle.
        #[arg(long)]
        tprime: bool,
    },
    /// Print a quiver as a graph.
    Export { quiver: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Prove { .. } => "prove",
            Command::Present { .. } => "present",
            Command::Hom { .. } => "hom",
            Command::Fraisse { .. } => "fraisse",
            Command::Tricat { .. } => "tricat",
            Command::Export { .. } => "export",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub depth: usize,
    pub samples: usize,
    pub dims: usize,
}

impl Budgets {
    pub fn profile(name: Option<&str>) -> Result<Budgets, CliError> {
        match name.unwrap_or("desk") {
            "quick" => Ok(Budgets { depth: 2, samples: 20, dims: 3 }),
            "desk" | "" => Ok(Budgets { depth: 4, samples: 100, dims: 4 }),
            "thorough" => Ok(Budgets { depth: 6, samples: 400, dims: 6 }),
            other => Err(CliError::Usage(format!("unknown {PROFILE_VAR} profile {other}"))),
        }
    }
}

/// Everything a subcommand needs besides its own arguments.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub seed: u64,
    pub budgets: Budgets,
    pub format: Option<OutputFormat>,
    /// Subcommand-specific budgets echoed in the header.
    pub extra: Map<String, Value>,
}

impl RunConfig {
    pub fn header(&self) -> Value {
        let mut budgets = Map::new();
        budgets.insert("depth".into(), json!(self.budgets.depth));
        budgets.insert("samples".into(), json!(self.budgets.samples));
        budgets.insert("dims".into(), json!(self.budgets.dims));
        budgets.extend(self.extra.clone());
        json!({ "tool": TOOL, "version": VERSION, "command": self.command, "seed": self.seed, "budgets": budgets })
    }

    /// `{"header": ..., "result": ...}`, pretty-printed.
    pub fn json_document(&self, result: Value) -> String {
        let doc = json!({ "header": self.header(), "result": result });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }

    /// Header as `//` comment lines, for DOT output.
    pub fn comment_header(&self) -> String {
        let h = self.header();
        format!(
            "// {TOOL} {VERSION} {}\n// seed {}\n// budgets {}\n",
            self.command,
            self.seed,
            serde_json::to_string(&h["budgets"]).expect("json values serialize")
        )
    }
}

/// Text and exit code of a finished run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// What a subcommand hands back: its document and exit code.
pub struct Report {
    pub code: u8,
    pub text: String,
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, profile: Option<&str>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output { code: 0, stdout: text, stderr: String::new() },
                _ => Output { code: exit::USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    match run_cli(cli, profile) {
        Ok(out) => out,
        Err(e) => Output { code: e.code(), stdout: String::new(), stderr: format!("{TOOL}: {e}\n") },
    }
}

fn run_cli(cli: Cli, profile: Option<&str>) -> Result<Output, CliError> {
    let defaults = Budgets::profile(profile)?;
    let o = &cli.opts;
    let budgets = Budgets {
        depth: o.depth.unwrap_or(defaults.depth),
        samples: o.samples.unwrap_or(defaults.samples),
        dims: o.dims.unwrap_or(defaults.dims),
    };
    let config = RunConfig { command: cli.command.name(), seed: o.seed, budgets, format: o.format, extra: Map::new() };
    let report = match o.threads {
        Some(0) => return Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| CliError::Internal(e.to_string()))?;
            pool.install(|| commands::dispatch(&cli.command, config))?
        }
        None => commands::dispatch(&cli.command, config)?,
    };
    match &o.out {
        Some(path) => {
            write_file(path, &report.text)?;
            Ok(Output { code: report.code, stdout: String::new(), stderr: String::new() })
        }
        None => Ok(Output { code: report.code, stdout: report.text, stderr: String::new() }),
    }
}
