//! The `aivd` command line.
//!
//! [`run`] parses arguments, performs one operation and reports through its
//! exit status. Exit statuses: 0 success, 1 validation or domain failure,
//! 2 usage error, 3 I/O or store failure. Failures print one line to
//! standard error; success never writes there.

mod commands;
mod error;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use aivd_core::catalog::WeaknessClass;
use aivd_core::record::LifecycleStatus;
use aivd_core::severity::Trigger;
use aivd_core::validation::ValidationProfile;

pub use error::{exit_for, CliError, EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "aivd", version, about = "AI vulnerability database tool")]
pub struct Cli {
    /// Store directory.
    #[arg(long, global = true, env = aivd_service::DATA_DIR_ENV, default_value = aivd_service::DEFAULT_DATA_DIR)]
    pub data_dir: PathBuf,
    /// Print canonical JSON documents instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a record document against a validation profile.
    Validate {
        file: PathBuf,
        /// Defaults to the profile of the record's lifecycle status.
        #[arg(long, value_parser = profile_arg)]
        profile: Option<ValidationProfile>,
    },
    /// Score a severity vector.
    Score {
        #[arg(long)]
        vector: String,
        /// JSON file with an environmental context.
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Submit a draft record on behalf of a CNA.
    Submit {
        file: PathBuf,
        #[arg(long)]
        cna: String,
    },
    Show {
        id: String,
    },
    /// Search records; every flag is a filter criterion.
    Search(SearchArgs),
    /// Move a record along its disclosure lifecycle.
    Status {
        id: String,
        #[arg(value_parser = status_arg)]
        to: LifecycleStatus,
        #[arg(long)]
        actor: String,
        #[arg(long, default_value = "")]
        note: String,
    },
    /// Append a new severity assessment to a record.
    Rescore {
        id: String,
        #[arg(long)]
        vector: String,
        #[arg(long, value_parser = trigger_arg)]
        trigger: Trigger,
        #[arg(long, default_value = "cli")]
        actor: String,
        #[arg(long, default_value = "")]
        note: String,
    },
    #[command(subcommand)]
    Catalog(CatalogCommand),
    #[command(subcommand)]
    Aibom(AibomCommand),
    /// Write records, catalog, AIBOMs and CNAs to a directory.
    Export {
        dir: PathBuf,
    },
    /// Load an export directory into the store.
    Import {
        dir: PathBuf,
        #[arg(long, default_value = "import")]
        actor: String,
    },
    /// Run the HTTP API until interrupted.
    Serve {
        #[arg(long, env = aivd_service::ADDR_ENV, default_value = aivd_service::DEFAULT_ADDR)]
        addr: String,
    },
    #[command(subcommand)]
    Cna(CnaCommand),
    /// Load the bundled example record into the store.
    Seed {
        #[arg(long, default_value = "seed")]
        actor: String,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub weakness: Option<String>,
    /// Leading product segments, `/`-separated.
    #[arg(long)]
    pub product: Option<String>,
    #[arg(long)]
    pub vendor: Option<String>,
    /// Repeatable or comma-separated.
    #[arg(long)]
    pub status: Vec<String>,
    #[arg(long)]
    pub min_score: Option<String>,
    #[arg(long)]
    pub max_score: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    /// Substring of the description or impact.
    #[arg(long, visible_alias = "q")]
    pub text: Option<String>,
    #[arg(long)]
    pub page: Option<String>,
    #[arg(long)]
    pub page_size: Option<String>,
}

impl SearchArgs {
    /// The flags as `key=value` pairs in query-string vocabulary.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let single = [
            ("weakness", &self.weakness),
            ("product", &self.product),
            ("vendor", &self.vendor),
            ("min_score", &self.min_score),
            ("max_score", &self.max_score),
            ("from", &self.from),
            ("to", &self.to),
            ("text", &self.text),
            ("page", &self.page),
            ("page_size", &self.page_size),
        ];
        let mut pairs: Vec<_> = single
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect();
        pairs.extend(self.status.iter().map(|s| ("status", s.clone())));
        pairs
    }
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    List {
        #[arg(long, value_parser = class_arg)]
        class: Option<WeaknessClass>,
    },
    /// Show an AI-CWE or MIT entry.
    Show { id: String },
}

#[derive(Debug, Subcommand)]
pub enum AibomCommand {
    Validate { file: PathBuf },
    /// Structural difference from `a` to `b`.
    Diff { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CnaCommand {
    Register {
        cna_id: String,
        #[arg(long)]
        name: String,
        #[arg(long)]
        from: u16,
        #[arg(long)]
        to: u16,
    },
    List,
}

fn profile_arg(text: &str) -> Result<ValidationProfile, String> {
    ValidationProfile::parse(text).ok_or_else(|| "expected submission, triage or disclosure".into())
}

fn status_arg(text: &str) -> Result<LifecycleStatus, String> {
    LifecycleStatus::parse(text).ok_or_else(|| {
        let names: Vec<_> = LifecycleStatus::ALL.iter().map(|s| s.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn trigger_arg(text: &str) -> Result<Trigger, String> {
    Trigger::parse(text).ok_or_else(|| "expected initial, model-update, data-drift, scheduled or manual".into())
}

fn class_arg(text: &str) -> Result<WeaknessClass, String> {
    WeaknessClass::parse(text).ok_or_else(|| {
        "expected validation-mechanism, data-handling, learning-algorithm or privacy-safeguard".into()
    })
}

/// Runs one invocation and returns its exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let _ = writeln!(err, "{}", CliError::usage(first.trim_start_matches("error: ")).line());
            return EXIT_USAGE;
        }
    };
    match commands::dispatch(cli, out).and_then(|()| {
        out.flush()
            .or_else(commands::quiet_pipe)
            .map_err(|e| CliError::new("IO_ERROR", e.to_string()))
    }) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "{}", e.line());
            e.exit
        }
    }
}
