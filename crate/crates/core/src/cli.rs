//! `ckm` command line: `analyze` measures a corpus, `report` compares the
//! systems produced by earlier `analyze --format json` runs.
//!
//! Exit codes: 0 on success, 1 on a fatal input problem, 2 when rows were
//! produced but some input had parse errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::frontend::{load_model_file, parse_source, ParseDiagnostic, SourceUnit};
use crate::metrics::{analyze_corpus, AnalysisOptions, CouplingOptions, MetricsRecord};
use crate::model::{build_corpus, ClassModel, MethodPolicy};
use crate::stats::{suggest_split_for_record, system_summary, SplitSuggestion, SystemSummary};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FATAL: u8 = 1;
pub const EXIT_PARSE_ERRORS: u8 = 2;

/// Fixed CSV/table column order.
pub const COLUMNS: [&str; 12] = [
    "class", "lcom", "lcom2", "nlcom", "connectivity", "wmc", "dit", "noc", "cbo", "rfc", "npm", "ca",
];

#[derive(Parser, Debug)]
#[command(name = "ckm", version, about = "Chidamber-Kemerer metrics and LCOM cohesion reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Measure every class found under the given paths
    Analyze(AnalyzeArgs),
    /// Summarize one or more analysis JSON files side by side
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum InputKind {
    Source,
    ModelFile,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Source files or directories (searched recursively)
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Inputs are class-model JSON documents instead of source
    #[arg(long)]
    pub model_file: bool,
    /// Largest LCOM still considered cohesive
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=1))]
    pub threshold: u64,
    /// Count constructors as methods in the cohesion metrics
    #[arg(long)]
    pub include_constructors: bool,
    /// Ignore static methods and static attributes in the cohesion metrics
    #[arg(long)]
    pub strict_instance: bool,
    /// Build the RFC response set from the transitive call closure
    #[arg(long)]
    pub rfc_transitive: bool,
    /// Count types outside the corpus towards CBO
    #[arg(long)]
    pub external_coupling: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Write output here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// System name for the JSON summary (defaults to the first path's name)
    #[arg(long)]
    pub system: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Json,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Analysis documents written by `analyze --format json`
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// List split suggestions for classes that qualify
    #[arg(long)]
    pub suggest_splits: bool,
    /// Reclassify with this threshold instead of the one stored in each file
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=1))]
    pub threshold: Option<u64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Everything `analyze` needs, independent of how it was parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub input_kind: InputKind,
    pub threshold: u64,
    pub options: AnalysisOptions,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub system: Option<String>,
}

impl From<&AnalyzeArgs> for RunConfig {
    fn from(a: &AnalyzeArgs) -> Self {
        let mut policy = if a.strict_instance {
            MethodPolicy::strict_instance()
        } else {
            MethodPolicy::default()
        };
        policy.include_constructors = a.include_constructors;
        RunConfig {
            inputs: a.paths.clone(),
            input_kind: if a.model_file {
                InputKind::ModelFile
            } else {
                InputKind::Source
            },
            threshold: a.threshold,
            options: AnalysisOptions {
                policy,
                coupling: CouplingOptions {
                    rfc_transitive: a.rfc_transitive,
                    include_external: a.external_coupling,
                },
            },
            format: a.format,
            out: a.out.clone(),
            system: a.system.clone(),
        }
    }
}

/// The JSON written by `analyze --format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisDocument {
    pub system: String,
    pub classes: Vec<MetricsRecord>,
    #[serde(default)]
    pub summary: Option<SystemSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub systems: Vec<SystemSummary>,
    pub total_classes: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub splits: Vec<SystemSplits>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSplits {
    pub system: String,
    pub suggestions: Vec<SplitSuggestion>,
}

pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
        }
    };
    let stderr = &mut io::stderr();
    match &cli.command {
        Command::Analyze(a) => run_analyze(&RunConfig::from(a), stderr),
        Command::Report(r) => run_report(r, stderr),
    }
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Runs `analyze`, writing rows to the configured output and diagnostics to
/// `stderr`. Returns the process exit code.
pub fn run_analyze(config: &RunConfig, stderr: &mut dyn Write) -> u8 {
    let result = analyze_inputs(config, stderr).and_then(|(records, had_errors)| {
        let mut out = open_output(&config.out)?;
        write_analysis(config, &records, &mut out)?;
        out.flush()?;
        Ok(had_errors)
    });
    match result {
        Ok(false) => EXIT_OK,
        Ok(true) => EXIT_PARSE_ERRORS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_FATAL
        }
    }
}

fn input_files(paths: &[PathBuf], extension: &str) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        let meta = fs::metadata(p).with_context(|| format!("cannot read {}", p.display()))?;
        if meta.is_dir() {
            let mut found: Vec<PathBuf> = WalkDir::new(p)
                .into_iter()
                .collect::<std::result::Result<Vec<_>, _>>()
                .with_context(|| format!("cannot walk {}", p.display()))?
                .into_iter()
                .filter(|e| e.file_type().is_file())
                .map(|e| e.into_path())
                .filter(|f| f.extension().is_some_and(|x| x == extension))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Loads the classes, prints diagnostics, measures. The flag reports whether
/// any parse error was seen.
fn analyze_inputs(config: &RunConfig, stderr: &mut dyn Write) -> Result<(Vec<MetricsRecord>, bool)> {
    let mut classes: Vec<ClassModel> = Vec::new();
    let mut diagnostics: Vec<ParseDiagnostic> = Vec::new();
    match config.input_kind {
        InputKind::Source => {
            for file in input_files(&config.inputs, "java")? {
                let unit = SourceUnit::new(&file, read_text(&file)?);
                let (cs, ds) = parse_source(&unit);
                classes.extend(cs);
                diagnostics.extend(ds);
            }
        }
        InputKind::ModelFile => {
            for file in input_files(&config.inputs, "json")? {
                let cs = load_model_file(&read_text(&file)?)
                    .with_context(|| format!("invalid class-model document {}", file.display()))?;
                classes.extend(cs);
            }
        }
    }
    for d in &diagnostics {
        writeln!(stderr, "{d}")?;
    }
    if classes.is_empty() {
        bail!("no input classes");
    }
    let corpus = build_corpus(classes)?;
    let records = analyze_corpus(&corpus, &config.options);
    Ok((records, diagnostics.iter().any(ParseDiagnostic::is_error)))
}

fn system_name(config: &RunConfig) -> String {
    if let Some(s) = &config.system {
        return s.clone();
    }
    config
        .inputs
        .first()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".to_string())
}

fn write_analysis(config: &RunConfig, records: &[MetricsRecord], out: &mut dyn Write) -> Result<()> {
    match config.format {
        OutputFormat::Csv => write_csv(records, out),
        OutputFormat::Table => write_table(records, out),
        OutputFormat::Json => {
            let name = system_name(config);
            let summary = system_summary(&name, records, config.threshold)?;
            let doc = AnalysisDocument {
                system: name,
                classes: records.to_vec(),
                summary: Some(summary),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

fn row(r: &MetricsRecord) -> [String; 12] {
    [
        r.class_name.clone(),
        r.lcom.to_string(),
        r.lcom2.to_string(),
        format!("{:.4}", r.nlcom),
        format!("{:.4}", r.connectivity),
        r.wmc.to_string(),
        r.dit.to_string(),
        r.noc.to_string(),
        r.cbo.to_string(),
        r.rfc.to_string(),
        r.npm.to_string(),
        r.ca.to_string(),
    ]
}

pub fn write_csv(records: &[MetricsRecord], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

fn write_aligned(header: &[String], rows: &[Vec<String>], out: &mut dyn Write) -> Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header))?;
    for r in rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

fn write_table(records: &[MetricsRecord], out: &mut dyn Write) -> Result<()> {
    let header: Vec<String> = COLUMNS.iter().map(|c| c.to_uppercase()).collect();
    let rows: Vec<Vec<String>> = records.iter().map(|r| row(r).to_vec()).collect();
    write_aligned(&header, &rows, out)
}

/// Runs `report`. Returns the process exit code.
pub fn run_report(args: &ReportArgs, stderr: &mut dyn Write) -> u8 {
    let result = build_report(args, stderr).and_then(|doc| {
        let mut out = open_output(&args.out)?;
        write_report(&doc, args.format, &mut out)?;
        out.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_FATAL
        }
    }
}

pub fn build_report(args: &ReportArgs, stderr: &mut dyn Write) -> Result<ReportDocument> {
    let mut systems = Vec::new();
    let mut splits = Vec::new();
    for path in &args.inputs {
        let doc: AnalysisDocument = serde_json::from_str(&read_text(path)?)
            .with_context(|| format!("invalid analysis document {}", path.display()))?;
        if doc.classes.is_empty() {
            writeln!(stderr, "warning: system `{}` has no classes; excluded", doc.system)?;
            continue;
        }
        let threshold = args
            .threshold
            .or(doc.summary.as_ref().map(|s| s.threshold_used))
            .unwrap_or(0);
        systems.push(system_summary(&doc.system, &doc.classes, threshold)?);
        if args.suggest_splits {
            let suggestions: Vec<SplitSuggestion> = doc
                .classes
                .iter()
                .map(suggest_split_for_record)
                .filter(|s| s.recommended)
                .collect();
            splits.push(SystemSplits {
                system: doc.system.clone(),
                suggestions,
            });
        }
    }
    if systems.is_empty() {
        bail!("no systems with classes to report");
    }
    let total_classes = systems.iter().map(|s| s.class_count).sum();
    Ok(ReportDocument {
        systems,
        total_classes,
        splits,
    })
}

fn pct_cell(count: usize, pct: f64) -> String {
    format!("{count} ({pct:.1}%)")
}

pub fn write_report(doc: &ReportDocument, format: ReportFormat, out: &mut dyn Write) -> Result<()> {
    if format == ReportFormat::Json {
        serde_json::to_writer_pretty(&mut *out, doc)?;
        writeln!(out)?;
        return Ok(());
    }
    let header: Vec<String> = [
        "SYSTEM", "CLASSES", "LCOM MIN", "MAX", "MEAN", "MEDIAN", "STD.DEV", "COHESIVE", "UNCOHESIVE",
        "MEDIAN<1", "MEDIAN<=1",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let yes_no = |b: bool| if b { "yes" } else { "no" }.to_string();
    let mut rows: Vec<Vec<String>> = doc
        .systems
        .iter()
        .map(|s| {
            let st = &s.lcom_stats;
            vec![
                s.system_name.clone(),
                s.class_count.to_string(),
                format!("{:.0}", st.min),
                format!("{:.0}", st.max),
                format!("{:.2}", st.mean),
                format!("{:.2}", st.median),
                format!("{:.2}", st.std_dev),
                pct_cell(s.cohesive_count, s.cohesive_pct),
                pct_cell(s.uncohesive_count, s.uncohesive_pct),
                yes_no(s.median_cohesive),
                yes_no(s.median_cohesive_lenient),
            ]
        })
        .collect();
    let mut total = vec![String::new(); header.len()];
    total[0] = "TOTAL".into();
    total[1] = doc.total_classes.to_string();
    rows.push(total);
    write_aligned(&header, &rows, out)?;

    for sys in &doc.splits {
        writeln!(out)?;
        writeln!(out, "Split suggestions for {}:", sys.system)?;
        if sys.suggestions.is_empty() {
            writeln!(out, "  (none)")?;
        }
        for s in &sys.suggestions {
            let groups: Vec<String> = s.groups.iter().map(|g| format!("{{{}}}", g.join(", "))).collect();
            writeln!(out, "  {}: {}", s.class_name, groups.join(" | "))?;
        }
    }
    Ok(())
}
