use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use chrono::Utc;
use serde::Serialize;

use aivd_core::aibom::{diff_aibom, parse_aibom, validate_aibom, AibomDocument, DiffEntry};
use aivd_core::ids::{AiCveId, AiCweId, MitigationId};
use aivd_core::record::{parse_record, serialize_record, validate_record, LifecycleStatus, VulnerabilityRecord};
use aivd_core::registry::{parse_filter_params, stage_profile, CnaRegistration, Registry, SystemClock, YearRange};
use aivd_core::seed::seed_catalog;
use aivd_core::severity::{apply_environmental, compute_score, parse_vector, EnvironmentalContext};
use aivd_core::validation::ValidationReport;
use aivd_service::ServeConfig;

use crate::error::CliError;
use crate::{AibomCommand, CatalogCommand, Cli, CnaCommand, Command};

type CmdResult = Result<(), CliError>;

struct Ctx<'a> {
    cli_json: bool,
    data_dir: &'a Path,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn open(&self) -> Result<Registry, CliError> {
        Ok(Registry::open(self.data_dir, Arc::new(SystemClock))?)
    }

    fn print(&mut self, text: impl AsRef<str>) -> CmdResult {
        let text = text.as_ref();
        let newline: &[u8] = if text.ends_with('\n') { b"" } else { b"\n" };
        self.out
            .write_all(text.as_bytes())
            .and_then(|()| self.out.write_all(newline))
            .or_else(quiet_pipe)
            .map_err(io)
    }

    fn print_json<T: Serialize + ?Sized>(&mut self, value: &T) -> CmdResult {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::new("IO_ERROR", e.to_string()))?;
        self.print(text)
    }

    fn print_record(&mut self, record: &VulnerabilityRecord) -> CmdResult {
        if self.cli_json {
            self.print(serialize_record(record))
        } else {
            self.print(record_summary(record))
        }
    }
}

/// A closed reader (`aivd search | head`) ends output without an error.
pub(crate) fn quiet_pipe(e: std::io::Error) -> std::io::Result<()> {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        Ok(())
    } else {
        Err(e)
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::new("IO_ERROR", e.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}

fn read_aibom(path: &Path) -> Result<AibomDocument, CliError> {
    Ok(parse_aibom(&read_file(path)?)?)
}

fn record_id(text: &str) -> Result<AiCveId, CliError> {
    Ok(text.parse::<AiCveId>()?)
}

pub(crate) fn dispatch(cli: Cli, out: &mut dyn Write) -> CmdResult {
    let mut ctx = Ctx {
        cli_json: cli.json,
        data_dir: &cli.data_dir,
        out,
    };
    match cli.command {
        Command::Validate { file, profile } => validate(&mut ctx, &file, profile),
        Command::Score { vector, env } => score(&mut ctx, &vector, env.as_deref()),
        Command::Submit { file, cna } => {
            let draft = parse_record(&read_file(&file)?)?;
            let stored = ctx.open()?.submit(draft, &cna)?;
            if ctx.cli_json {
                ctx.print(serialize_record(&stored))
            } else {
                ctx.print(stored.id.map(|id| id.to_string()).unwrap_or_default())
            }
        }
        Command::Show { id } => {
            let id = record_id(&id)?;
            let reg = ctx.open()?;
            let record = reg.get(id)?.clone();
            ctx.print_record(&record)
        }
        Command::Search(args) => {
            let filter = parse_filter_params(args.pairs()).map_err(|e| CliError::new("BAD_FILTER", e))?;
            let page = ctx.open()?.query(&filter)?;
            if ctx.cli_json {
                return ctx.print_json(&page.items);
            }
            for record in &page.items {
                ctx.print(search_line(record))?;
            }
            ctx.print(format!(
                "{} of {} record(s), page {}",
                page.items.len(),
                page.total,
                page.page
            ))
        }
        Command::Status { id, to, actor, note } => {
            let id = record_id(&id)?;
            let updated = ctx.open()?.transition_status(id, to, &actor, &note)?;
            status_result(&mut ctx, &updated)
        }
        Command::Rescore {
            id,
            vector,
            trigger,
            actor,
            note,
        } => {
            let id = record_id(&id)?;
            let vector = parse_vector(&vector)?;
            let updated = ctx.open()?.rescore(id, &vector, trigger, &actor, &note)?;
            if ctx.cli_json {
                return ctx.print(serialize_record(&updated));
            }
            let score = updated.current_score().expect("rescored records carry a score");
            ctx.print(format!("{} {} {}", id, score.value, score.band))
        }
        Command::Catalog(cmd) => catalog(&mut ctx, cmd),
        Command::Aibom(cmd) => aibom(&mut ctx, cmd),
        Command::Export { dir } => {
            let summary = ctx.open()?.export(&dir)?;
            ctx.print(format!(
                "exported {} record(s) and {} AIBOM(s) to {}",
                summary.records,
                summary.aiboms,
                dir.display()
            ))
        }
        Command::Import { dir, actor } => {
            let ids = ctx.open()?.import(&dir, &actor)?;
            if ctx.cli_json {
                return ctx.print_json(&ids);
            }
            ctx.print(format!("imported {} record(s)", ids.len()))
        }
        Command::Serve { addr } => {
            let config = ServeConfig {
                data_dir: ctx.data_dir.to_path_buf(),
                addr,
            };
            let out = &mut *ctx.out;
            aivd_service::serve_blocking(config, |bound| {
                let _ = writeln!(out, "listening on http://{bound}");
                let _ = out.flush();
            })?;
            Ok(())
        }
        Command::Cna(CnaCommand::Register { cna_id, name, from, to }) => {
            let registration = CnaRegistration {
                cna_id,
                name,
                allowed_year_range: YearRange { from, to },
            };
            ctx.open()?.register_cna(registration.clone())?;
            if ctx.cli_json {
                return ctx.print_json(&registration);
            }
            ctx.print(format!("registered {}", registration.cna_id))
        }
        Command::Cna(CnaCommand::List) => {
            let reg = ctx.open()?;
            let cnas: Vec<CnaRegistration> = reg.cnas().cloned().collect();
            if ctx.cli_json {
                return ctx.print_json(&cnas);
            }
            for c in &cnas {
                let range = c.allowed_year_range;
                ctx.print(format!("{}  {}  {}-{}", c.cna_id, c.name, range.from, range.to))?;
            }
            Ok(())
        }
        Command::Seed { actor } => {
            let id = ctx.open()?.load_seed(&actor)?;
            ctx.print(format!("loaded {id}"))
        }
    }
}

fn validate(ctx: &mut Ctx<'_>, file: &Path, profile: Option<aivd_core::validation::ValidationProfile>) -> CmdResult {
    let record = parse_record(&read_file(file)?)?;
    let profile = profile.unwrap_or_else(|| stage_profile(record.status.unwrap_or(LifecycleStatus::Reported)));
    let catalog = if ctx.data_dir.is_dir() {
        ctx.open()?.catalog().clone()
    } else {
        seed_catalog()
    };
    let report = validate_record(&record, profile, &catalog, Utc::now().date_naive());
    report_outcome(ctx, &report)
}

fn report_outcome(ctx: &mut Ctx<'_>, report: &ValidationReport) -> CmdResult {
    if ctx.cli_json {
        ctx.print_json(report)?;
    } else {
        ctx.print(report.to_string())?;
    }
    if report.is_valid() {
        Ok(())
    } else {
        let first = report.errors().next().map(ToString::to_string).unwrap_or_default();
        Err(CliError::new(
            "VALIDATION_FAILED",
            format!("{} error(s), first: {first}", report.errors().count()),
        ))
    }
}

fn score(ctx: &mut Ctx<'_>, vector: &str, env: Option<&Path>) -> CmdResult {
    let vector = parse_vector(vector)?;
    let now = Utc::now();
    let score = match env {
        Some(path) => {
            let env: EnvironmentalContext = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::new("MALFORMED_DOCUMENT", format!("{}: {e}", path.display())))?;
            apply_environmental(&vector, &env, now)
        }
        None => compute_score(&vector, now),
    };
    if ctx.cli_json {
        ctx.print_json(&score)
    } else {
        ctx.print(format!("{} {}", score.value, score.band))
    }
}

fn status_result(ctx: &mut Ctx<'_>, record: &VulnerabilityRecord) -> CmdResult {
    if ctx.cli_json {
        return ctx.print(serialize_record(record));
    }
    let id = record.id.map(|id| id.to_string()).unwrap_or_default();
    let status = record.status.map(|s| s.to_string()).unwrap_or_default();
    ctx.print(format!("{id} {status}"))
}

fn catalog(ctx: &mut Ctx<'_>, cmd: CatalogCommand) -> CmdResult {
    let catalog = if ctx.data_dir.is_dir() {
        ctx.open()?.catalog().clone()
    } else {
        seed_catalog()
    };
    match cmd {
        CatalogCommand::List { class } => {
            let entries = match class {
                Some(class) => catalog.list_by_class(class),
                None => catalog.weaknesses().collect(),
            };
            if ctx.cli_json {
                return ctx.print_json(&entries);
            }
            for entry in entries {
                ctx.print(format!(
                    "{}  {}  [{}] {}",
                    entry.id, entry.name, entry.weakness_class, entry.severity_band
                ))?;
            }
            Ok(())
        }
        CatalogCommand::Show { id } => {
            if id.to_ascii_uppercase().starts_with("MIT-") {
                let entry = catalog.get_mitigation(id.parse::<MitigationId>()?)?;
                if ctx.cli_json {
                    return ctx.print_json(entry);
                }
                let targets: Vec<String> = entry.target_weaknesses.iter().map(ToString::to_string).collect();
                ctx.print(format!(
                    "{}  {}\n  type: {:?}, orientation: {:?}\n  targets: {}\n  {}",
                    entry.id,
                    entry.name,
                    entry.kind,
                    entry.orientation,
                    targets.join(", "),
                    entry.description
                ))
            } else {
                let entry = catalog.get_weakness(id.parse::<AiCweId>()?)?;
                if ctx.cli_json {
                    return ctx.print_json(entry);
                }
                let modes: Vec<String> = entry.modes_of_introduction.iter().map(|m| format!("{m:?}")).collect();
                let mitigations: Vec<String> = entry.potential_mitigations.iter().map(ToString::to_string).collect();
                ctx.print(format!(
                    "{}  {}\n  class: {}, severity: {}\n  introduced: {}\n  mitigations: {}\n  {}",
                    entry.id,
                    entry.name,
                    entry.weakness_class,
                    entry.severity_band,
                    modes.join(", "),
                    mitigations.join(", "),
                    entry.description
                ))
            }
        }
    }
}

fn aibom(ctx: &mut Ctx<'_>, cmd: AibomCommand) -> CmdResult {
    match cmd {
        AibomCommand::Validate { file } => {
            let doc = read_aibom(&file)?;
            report_outcome(ctx, &validate_aibom(&doc))
        }
        AibomCommand::Diff { a, b } => {
            let diff = diff_aibom(&read_aibom(&a)?, &read_aibom(&b)?);
            if ctx.cli_json {
                return ctx.print_json(&diff);
            }
            let show = |v: &Option<serde_json::Value>| v.as_ref().map(ToString::to_string).unwrap_or_default();
            let line = |mark: &str, e: &DiffEntry| match mark {
                "~" => format!("~ {}: {} -> {}", e.path, show(&e.before), show(&e.after)),
                "+" => format!("+ {}: {}", e.path, show(&e.after)),
                _ => format!("- {}: {}", e.path, show(&e.before)),
            };
            let mut lines: Vec<String> = Vec::with_capacity(diff.len());
            lines.extend(diff.added.iter().map(|e| line("+", e)));
            lines.extend(diff.removed.iter().map(|e| line("-", e)));
            lines.extend(diff.modified.iter().map(|e| line("~", e)));
            if lines.is_empty() {
                lines.push("no differences".into());
            }
            ctx.print(lines.join("\n"))
        }
    }
}

fn record_summary(record: &VulnerabilityRecord) -> String {
    let id = record.id.map(|id| id.to_string()).unwrap_or_else(|| "(draft)".into());
    let status = record.status.map(|s| s.to_string()).unwrap_or_default();
    let mut lines = vec![format!("{id} [{status}]")];
    lines.push(format!("  system:      {} ({})", record.ai_system.name, record.ai_system.model_type));
    if let Some(score) = record.current_score() {
        lines.push(format!("  severity:    {} {}  {}", score.value, score.band, score.vector));
    }
    let weaknesses: Vec<String> = record.weaknesses.iter().map(ToString::to_string).collect();
    lines.push(format!("  weaknesses:  {}", weaknesses.join(", ")));
    lines.push(format!("  vendors:     {}", record.vendors.join(", ")));
    let reported = record.report_date.map(|d| d.to_string()).unwrap_or_default();
    lines.push(format!("  reported:    {reported} by {}", record.reported_by));
    lines.push(format!("  description: {}", record.description));
    lines.join("\n")
}

fn search_line(record: &VulnerabilityRecord) -> String {
    let id = record.id.map(|id| id.to_string()).unwrap_or_default();
    let score = record
        .current_score()
        .map(|s| format!("{} {}", s.value, s.band))
        .unwrap_or_else(|| "-".into());
    let status = record.status.map(|s| s.to_string()).unwrap_or_default();
    let mut summary: String = record.description.chars().take(60).collect();
    if record.description.chars().count() > 60 {
        summary.push_str("...");
    }
    format!("{id}  {score}  {status}  {summary}")
}
