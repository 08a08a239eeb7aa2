//! Command implementations behind the `kobe` binary.
//!
//! Exit-code contract: 0 on success, 1 on configuration errors (bad flags,
//! unreadable configured paths), 2 on data errors (malformed or inconsistent
//! content). Every command is deterministic for identical inputs and
//! configuration; output ordering is pair, then system name, and results are
//! independent of `--jobs`.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::annotations::{
    discover_pairs, load_corpus_with_keys, write_annotations, AnnotationError, CorpusBundle,
    EntityMention, KeyMap, LanguagePair, SentenceAnnotation,
};
use crate::linker::{
    annotate_corpus, apply_external_tags, load_tag_file, Gazetteer, LanguageFilterSpec,
    LinkerError,
};
use crate::metaeval::{
    correlate_systems, markdown_table, read_score_tables, CorrelationReport, CsvConfig,
    MetaEvalError, SystemScoreTable,
};
use crate::reports::{
    category_breakdown, corpus_stats, entities_per_sentence_histogram, histogram_csv,
    load_category_map, CategoryBreakdown, CorpusStatsRow, ReportError,
};
use crate::scoring::{score_sides, EcpCandidatePolicy, ScoreError, ScoreReport, ScoringMode};

/// Name of the metric column injected by `correlate` for computed scores.
pub const KOBE_METRIC: &str = "KoBE";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable configured paths; exit code 1.
    Config(String),
    /// Malformed or inconsistent content; exit code 2.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<AnnotationError> for CliError {
    fn from(e: AnnotationError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ScoreError> for CliError {
    fn from(e: ScoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<MetaEvalError> for CliError {
    fn from(e: MetaEvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LinkerError> for CliError {
    fn from(e: LinkerError) -> Self {
        match e {
            LinkerError::TagFile { .. } | LinkerError::Configuration(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Reference-less: candidate entities vs. source entities.
    SourcePivot,
    /// Candidate entities vs. reference entities.
    ReferencePivot,
}

impl From<ModeArg> for ScoringMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::SourcePivot => ScoringMode::SourcePivot,
            ModeArg::ReferencePivot => ScoringMode::ReferencePivot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EcpPolicyArg {
    Filtered,
    Unfiltered,
}

impl From<EcpPolicyArg> for EcpCandidatePolicy {
    fn from(policy: EcpPolicyArg) -> Self {
        match policy {
            EcpPolicyArg::Filtered => EcpCandidatePolicy::Filtered,
            EcpPolicyArg::Unfiltered => EcpCandidatePolicy::Unfiltered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Tsv,
    Json,
    Markdown,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Corpus root directory holding <src>-<tgt>/ subdirectories.
    #[arg(long, env = "KOBE_DATA_ROOT")]
    pub root: Option<PathBuf>,
    /// Language pair like de-en; repeatable. Default: every pair under the
    /// root.
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    pub format: FormatArg,
    /// Worker threads; 0 picks automatically. Results never depend on this.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Annotation key overrides, canonical=actual[,...], e.g.
    /// `mentions=entities,id=mid`.
    #[arg(long)]
    pub keys: Option<String>,
    /// Output file (`link`: output directory). Stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Scoring-specific flags shared by `score` and `correlate`.
#[derive(Debug, Clone, Args)]
pub struct ScoringOpts {
    /// Which side the candidate must recall entities from.
    #[arg(long, value_enum, default_value_t = ModeArg::SourcePivot)]
    pub mode: ModeArg,
    /// Candidate-mention language filter: `always-pass`,
    /// `lang:<code>[:require-tags]`, or `lang:<code>:tags-dir=<dir>` with
    /// one external tag file per system named `<system>.jsonl`.
    #[arg(long, default_value = "always-pass")]
    pub filter: String,
    /// Whether the entity count penalty counts candidate entities after
    /// (filtered) or before (unfiltered) language filtering.
    #[arg(long = "ecp-policy", value_enum, default_value_t = EcpPolicyArg::Filtered)]
    pub ecp_policy: EcpPolicyArg,
}

#[derive(Debug, Parser)]
#[command(
    name = "kobe",
    version,
    about = "Reference-less MT evaluation from entity-linking annotations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every system of the requested language pairs.
    Score(ScoreArgs),
    /// Correlate metric scores with human DA scores, system-level.
    Correlate(CorrelateArgs),
    /// Corpus entity statistics (and optional per-sentence histograms).
    Stats(StatsArgs),
    /// Per-category match breakdown for the systems of one or more pairs.
    Report(ReportArgs),
    /// Annotate raw text with a gazetteer, writing annotation files.
    Link(LinkArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(flatten)]
    pub scoring: ScoringOpts,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(flatten)]
    pub scoring: ScoringOpts,
    /// WMT-style per-system scores CSV with a DA column.
    #[arg(long = "scores-csv")]
    pub scores_csv: PathBuf,
    /// Metric column to correlate; repeatable. Default: KoBE when scores
    /// are computed or ingested, otherwise every metric column.
    #[arg(long = "metric")]
    pub metrics: Vec<String>,
    /// Previously written `score` output (TSV or JSON) to ingest as the
    /// KoBE column instead of scoring annotations.
    #[arg(long = "kobe-scores")]
    pub kobe_scores: Option<PathBuf>,
    /// Language-pair column name in the CSV.
    #[arg(long = "csv-lp-column", default_value = "lp")]
    pub csv_lp_column: String,
    /// System column name in the CSV.
    #[arg(long = "csv-system-column", default_value = "system")]
    pub csv_system_column: String,
    /// Human direct-assessment column name in the CSV.
    #[arg(long = "csv-da-column", default_value = "DA")]
    pub csv_da_column: String,
    /// CSV delimiter.
    #[arg(long = "csv-delimiter", default_value = ",")]
    pub csv_delimiter: char,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub config: RunConfig,
    /// Directory to write per-pair source-side histograms as
    /// `<pair>.csv`.
    #[arg(long = "histogram-out")]
    pub histogram_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub config: RunConfig,
    /// TSV mapping `entity_id<TAB>category`; unmapped ids count as "other".
    #[arg(long = "category-map")]
    pub category_map: PathBuf,
    /// System to include; repeatable. Default: all systems of the pair.
    #[arg(long = "system")]
    pub systems: Vec<String>,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[command(flatten)]
    pub config: RunConfig,
    /// Gazetteer TSV: surface<TAB>entity_id<TAB>category(optional).
    #[arg(long)]
    pub gazetteer: PathBuf,
    /// Fold case when matching surface forms.
    #[arg(long = "case-fold", default_value_t = true, action = clap::ArgAction::Set)]
    pub case_fold: bool,
    /// Collapse whitespace runs when matching surface forms.
    #[arg(long = "collapse-whitespace", default_value_t = true, action = clap::ArgAction::Set)]
    pub collapse_whitespace: bool,
    /// Raw text files, one sentence per line.
    #[arg(required = true)]
    pub texts: Vec<PathBuf>,
}

/// Dispatches a parsed command line, returning the stdout payload.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Score(args) => cmd_score(args),
        Command::Correlate(args) => cmd_correlate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Report(args) => cmd_report(args),
        Command::Link(args) => cmd_link(args),
    }
}

/// Writes a command's payload to `--out` or stdout.
pub fn emit(config: &RunConfig, payload: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, payload).map_err(|e| {
            CliError::Config(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            std::io::stdout()
                .write_all(payload.as_bytes())
                .map_err(|e| CliError::Config(format!("cannot write stdout: {e}")))
        }
    }
}

fn parse_keys(config: &RunConfig) -> Result<KeyMap, CliError> {
    match &config.keys {
        Some(spec) => KeyMap::parse_overrides(spec).map_err(|e| CliError::Config(e.to_string())),
        None => Ok(KeyMap::default()),
    }
}

fn resolve_root(config: &RunConfig) -> Result<PathBuf, CliError> {
    let root = config.root.clone().ok_or_else(|| {
        CliError::Config("--root (or KOBE_DATA_ROOT) is required".to_string())
    })?;
    if !root.is_dir() {
        return Err(CliError::Config(format!(
            "corpus root {} is not a directory",
            root.display()
        )));
    }
    Ok(root)
}

/// Requested pairs, or every pair under the root; always sorted.
fn resolve_pairs(root: &Path, config: &RunConfig) -> Result<Vec<LanguagePair>, CliError> {
    let mut pairs = if config.pairs.is_empty() {
        discover_pairs(root)?
    } else {
        config
            .pairs
            .iter()
            .map(|s| s.parse::<LanguagePair>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(e.to_string()))?
    };
    pairs.sort();
    pairs.dedup();
    if pairs.is_empty() {
        return Err(CliError::Data(format!(
            "no language pairs found under {}",
            root.display()
        )));
    }
    Ok(pairs)
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))
}

/// Parsed `--filter` flag.
#[derive(Debug, Clone, PartialEq, Eq)]
enum CliFilter {
    None,
    Lang { target: String, require_tags: bool },
    ExternalTagsDir { target: String, dir: PathBuf },
}

fn parse_filter(spec: &str) -> Result<CliFilter, CliError> {
    let bad = || {
        CliError::Config(format!(
            "invalid --filter '{spec}'; expected always-pass, lang:<code>[:require-tags], or lang:<code>:tags-dir=<dir>"
        ))
    };
    if spec == "always-pass" || spec == "none" || spec.is_empty() {
        return Ok(CliFilter::None);
    }
    let rest = spec.strip_prefix("lang:").ok_or_else(bad)?;
    let mut parts = rest.split(':');
    let target = parts.next().filter(|t| !t.is_empty()).ok_or_else(bad)?;
    let mut require_tags = false;
    let mut tags_dir = None;
    for part in parts {
        if part == "require-tags" {
            require_tags = true;
        } else if let Some(dir) = part.strip_prefix("tags-dir=") {
            tags_dir = Some(PathBuf::from(dir));
        } else {
            return Err(bad());
        }
    }
    Ok(match tags_dir {
        Some(dir) => CliFilter::ExternalTagsDir {
            target: target.to_string(),
            dir,
        },
        None => CliFilter::Lang {
            target: target.to_string(),
            require_tags,
        },
    })
}

/// One scored system, serialized with identification first and the report
/// fields behind it in declared order.
#[derive(Debug, Clone, Serialize)]
pub struct ScoredSystem {
    pub pair: LanguagePair,
    pub system: String,
    #[serde(flatten)]
    pub report: ScoreReport,
}

fn score_one_system(
    bundle: &CorpusBundle,
    system_name: &str,
    sentences: &[SentenceAnnotation],
    mode: ScoringMode,
    filter: &CliFilter,
    ecp_policy: EcpCandidatePolicy,
) -> Result<ScoreReport, CliError> {
    let pivot = match mode {
        ScoringMode::SourcePivot => &bundle.source,
        ScoringMode::ReferencePivot => bundle.reference.as_ref().ok_or_else(|| {
            CliError::Data(format!(
                "{}: reference-pivot scoring requires reference annotations",
                bundle.language_pair
            ))
        })?,
    };
    let report = match filter {
        CliFilter::None => score_sides(pivot, sentences, None, ecp_policy)?,
        CliFilter::Lang {
            target,
            require_tags,
        } => {
            let spec = LanguageFilterSpec::annotation_field(target.clone(), *require_tags);
            let keep = move |m: &EntityMention| spec.keeps(m);
            score_sides(pivot, sentences, Some(&keep), ecp_policy)?
        }
        CliFilter::ExternalTagsDir { target, dir } => {
            let tag_path = dir.join(format!("{system_name}.jsonl"));
            let tags = load_tag_file(&tag_path)?;
            let tagged = apply_external_tags(sentences, &tags)?;
            let spec = LanguageFilterSpec::annotation_field(target.clone(), true);
            let keep = move |m: &EntityMention| spec.keeps(m);
            score_sides(pivot, &tagged, Some(&keep), ecp_policy)?
        }
    };
    Ok(report)
}

/// Scores every system of a bundle in parallel; output order follows the
/// bundle's (lexicographic) system order.
fn score_bundle(
    bundle: &CorpusBundle,
    mode: ScoringMode,
    filter: &CliFilter,
    ecp_policy: EcpCandidatePolicy,
) -> Result<Vec<ScoredSystem>, CliError> {
    bundle
        .systems
        .par_iter()
        .map(|system| {
            let report = score_one_system(
                bundle,
                &system.system_name,
                &system.sentences,
                mode,
                filter,
                ecp_policy,
            )?;
            Ok(ScoredSystem {
                pair: bundle.language_pair.clone(),
                system: system.system_name.clone(),
                report,
            })
        })
        .collect()
}

fn render_scored(rows: &[ScoredSystem], format: FormatArg) -> Result<String, CliError> {
    match format {
        FormatArg::Tsv => {
            let mut out = format!("pair\tsystem\t{}\n", ScoreReport::TSV_HEADER);
            for row in rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\n",
                    row.pair,
                    row.system,
                    row.report.to_tsv_row()
                ));
            }
            Ok(out)
        }
        FormatArg::Json => to_json(rows),
        FormatArg::Markdown => {
            let mut out = String::from(
                "| pair | system | recall | precision | ecp | kobe | matches | source | candidate |\n\
                 |---|---|---|---|---|---|---|---|---|\n",
            );
            for row in rows {
                let r = &row.report;
                out.push_str(&format!(
                    "| {} | {} | {:.4} | {:.4} | {:.4} | {:.4} | {} | {} | {} |\n",
                    row.pair,
                    row.system,
                    r.recall,
                    r.precision,
                    r.ecp,
                    r.kobe,
                    r.match_total,
                    r.source_entity_total,
                    r.candidate_entity_total
                ));
            }
            Ok(out)
        }
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut out = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("cannot serialize output: {e}")))?;
    out.push('\n');
    Ok(out)
}

/// `score`: one report per system of each requested pair, ordered by pair
/// then system name.
pub fn cmd_score(args: &ScoreArgs) -> Result<String, CliError> {
    let keys = parse_keys(&args.config)?;
    let filter = parse_filter(&args.scoring.filter)?;
    let root = resolve_root(&args.config)?;
    let pairs = resolve_pairs(&root, &args.config)?;
    let pool = thread_pool(args.config.jobs)?;

    let mut rows = Vec::new();
    for pair in &pairs {
        let bundle = load_corpus_with_keys(&root, pair, &keys)?;
        let scored = pool.install(|| {
            score_bundle(
                &bundle,
                args.scoring.mode.into(),
                &filter,
                args.scoring.ecp_policy.into(),
            )
        })?;
        rows.extend(scored);
    }
    render_scored(&rows, args.config.format)
}

/// Strips WMT-style wrappers (`newstest2019.` prefix, `.<pair>` suffix) so
/// annotation file stems join against CSV system names.
fn normalize_system_name(name: &str, pair: &LanguagePair) -> String {
    let name = name.strip_prefix("newstest2019.").unwrap_or(name);
    let suffix = format!(".{pair}");
    let name = name.strip_suffix(&suffix).unwrap_or(name);
    name.to_string()
}

fn inject_score(table: &mut SystemScoreTable, system: &str, score: f64) {
    let pair = table.language_pair.clone();
    let normalized = normalize_system_name(system, &pair);
    let existing = table
        .rows
        .iter()
        .position(|row| row.system == system)
        .or_else(|| {
            table
                .rows
                .iter()
                .position(|row| normalize_system_name(&row.system, &pair) == normalized)
        });
    match existing {
        Some(index) => {
            let name = table.rows[index].system.clone();
            table.set_metric(&name, KOBE_METRIC, score);
        }
        None => table.set_metric(system, KOBE_METRIC, score),
    }
}

/// Reads `score` output (TSV or JSON) back as (pair, system, kobe) triples.
fn read_score_output(path: &Path) -> Result<Vec<(LanguagePair, String, f64)>, CliError> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    if content.trim_start().starts_with('[') {
        let values: Vec<serde_json::Value> = serde_json::from_str(&content)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        for value in values {
            let field = |key: &str| {
                value.get(key).cloned().ok_or_else(|| {
                    CliError::Data(format!("{}: row missing '{key}'", path.display()))
                })
            };
            let pair: LanguagePair = field("pair")?
                .as_str()
                .unwrap_or("")
                .parse()
                .map_err(|e: AnnotationError| CliError::Data(e.to_string()))?;
            let system = field("system")?.as_str().unwrap_or("").to_string();
            let kobe = field("kobe")?.as_f64().ok_or_else(|| {
                CliError::Data(format!("{}: non-numeric kobe", path.display()))
            })?;
            rows.push((pair, system, kobe));
        }
    } else {
        let mut lines = content.lines();
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| CliError::Data(format!("{}: empty scores file", path.display())))?
            .split('\t')
            .collect();
        let column = |name: &str| {
            header.iter().position(|h| *h == name).ok_or_else(|| {
                CliError::Data(format!("{}: missing column '{name}'", path.display()))
            })
        };
        let (pair_col, system_col, kobe_col) = (column("pair")?, column("system")?, column("kobe")?);
        for (number, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let cell = |col: usize| fields.get(col).copied().unwrap_or("");
            let pair: LanguagePair = cell(pair_col)
                .parse()
                .map_err(|e: AnnotationError| CliError::Data(e.to_string()))?;
            let kobe: f64 = cell(kobe_col).parse().map_err(|_| {
                CliError::Data(format!(
                    "{}: line {}: non-numeric kobe",
                    path.display(),
                    number + 2
                ))
            })?;
            rows.push((pair, cell(system_col).to_string(), kobe));
        }
    }
    Ok(rows)
}

/// `correlate`: signed Pearson correlation per metric per pair.
///
/// KoBE scores come from `--kobe-scores` (previous `score` output) or are
/// computed in place when `--root` points at annotations; other metric
/// columns are read from the CSV. Pairs where a metric scored fewer than two
/// systems are skipped.
pub fn cmd_correlate(args: &CorrelateArgs) -> Result<String, CliError> {
    if !args.csv_delimiter.is_ascii() {
        return Err(CliError::Config(format!(
            "--csv-delimiter must be a single ASCII character, got '{}'",
            args.csv_delimiter
        )));
    }
    let csv_config = CsvConfig {
        delimiter: args.csv_delimiter as u8,
        lp_column: args.csv_lp_column.clone(),
        system_column: args.csv_system_column.clone(),
        da_column: args.csv_da_column.clone(),
    };
    let file = File::open(&args.scores_csv).map_err(|e| {
        CliError::Config(format!("cannot read {}: {e}", args.scores_csv.display()))
    })?;
    let mut tables = read_score_tables(BufReader::new(file), &csv_config)?;

    if !args.config.pairs.is_empty() {
        let wanted = args
            .config
            .pairs
            .iter()
            .map(|s| s.parse::<LanguagePair>())
            .collect::<Result<BTreeSet<_>, _>>()
            .map_err(|e| CliError::Config(e.to_string()))?;
        for pair in &wanted {
            if !tables.iter().any(|t| &t.language_pair == pair) {
                return Err(CliError::Data(format!(
                    "pair {pair} is not present in {}",
                    args.scores_csv.display()
                )));
            }
        }
        tables.retain(|t| wanted.contains(&t.language_pair));
    }

    let mut injected = false;
    if let Some(path) = &args.kobe_scores {
        for (pair, system, kobe) in read_score_output(path)? {
            if let Some(table) = tables.iter_mut().find(|t| t.language_pair == pair) {
                inject_score(table, &system, kobe);
            }
        }
        injected = true;
    } else if args.config.root.is_some() {
        let keys = parse_keys(&args.config)?;
        let filter = parse_filter(&args.scoring.filter)?;
        let root = resolve_root(&args.config)?;
        let pool = thread_pool(args.config.jobs)?;
        if args.config.pairs.is_empty() {
            // Without an explicit pair list, correlate whatever pairs have
            // annotations; explicitly requested pairs must load or fail.
            let available = discover_pairs(&root)?;
            tables.retain(|t| available.contains(&t.language_pair));
            if tables.is_empty() {
                return Err(CliError::Data(format!(
                    "no language pair appears in both {} and {}",
                    args.scores_csv.display(),
                    root.display()
                )));
            }
        }
        for table in &mut tables {
            let bundle = load_corpus_with_keys(&root, &table.language_pair, &keys)?;
            let scored = pool.install(|| {
                score_bundle(
                    &bundle,
                    args.scoring.mode.into(),
                    &filter,
                    args.scoring.ecp_policy.into(),
                )
            })?;
            for row in scored {
                inject_score(table, &row.system, row.report.kobe);
            }
        }
        injected = true;
    }

    let metrics: Vec<String> = if !args.metrics.is_empty() {
        args.metrics.clone()
    } else if injected {
        vec![KOBE_METRIC.to_string()]
    } else {
        let mut names = Vec::new();
        for table in &tables {
            for name in &table.metric_names {
                if !names.contains(name) {
                    names.push(name.clone());
                }
            }
        }
        names
    };

    for metric in &metrics {
        let known = tables.iter().any(|t| {
            t.metric_names.iter().any(|m| m == metric)
                || t.rows.iter().any(|r| r.metrics.contains_key(metric))
        });
        if !known {
            return Err(MetaEvalError::UnknownMetric(metric.clone()).into());
        }
    }

    let mut reports: Vec<CorrelationReport> = Vec::new();
    for table in &tables {
        for metric in &metrics {
            match correlate_systems(table, metric) {
                Ok(report) => reports.push(report),
                Err(MetaEvalError::UnknownMetric(_))
                | Err(MetaEvalError::TooFewSystems { .. }) => {
                    // Sparse participation: this metric scored too few of
                    // the pair's systems; leave the cell empty.
                }
                Err(other) => return Err(other.into()),
            }
        }
    }

    render_correlations(&reports, args.config.format)
}

fn render_correlations(
    reports: &[CorrelationReport],
    format: FormatArg,
) -> Result<String, CliError> {
    match format {
        FormatArg::Tsv => {
            let mut out = format!("{}\n", CorrelationReport::TSV_HEADER);
            for report in reports {
                out.push_str(&format!("{}\n", report.to_tsv_row()));
            }
            Ok(out)
        }
        FormatArg::Json => to_json(&reports),
        FormatArg::Markdown => Ok(markdown_table(reports)),
    }
}

/// `stats`: corpus entity statistics per pair, plus optional histograms.
pub fn cmd_stats(args: &StatsArgs) -> Result<String, CliError> {
    let keys = parse_keys(&args.config)?;
    let root = resolve_root(&args.config)?;
    let pairs = resolve_pairs(&root, &args.config)?;
    let pool = thread_pool(args.config.jobs)?;

    let bundles: Vec<CorpusBundle> = pool.install(|| {
        pairs
            .par_iter()
            .map(|pair| load_corpus_with_keys(&root, pair, &keys))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let rows: Vec<CorpusStatsRow> = bundles.iter().map(corpus_stats).collect();

    if let Some(dir) = &args.histogram_out {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        for bundle in &bundles {
            let histogram = entities_per_sentence_histogram(&bundle.source);
            let path = dir.join(format!("{}.csv", bundle.language_pair));
            std::fs::write(&path, histogram_csv(&histogram))
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    match args.config.format {
        FormatArg::Tsv => {
            let mut out = format!("{}\n", CorpusStatsRow::TSV_HEADER);
            for row in &rows {
                out.push_str(&format!("{}\n", row.to_tsv_row()));
            }
            Ok(out)
        }
        FormatArg::Json => to_json(&rows),
        FormatArg::Markdown => {
            let mut out = String::from(
                "| pair | sentences | with entities | source entities | reference entities | source distinct | reference distinct | common distinct |\n\
                 |---|---|---|---|---|---|---|---|\n",
            );
            let opt = |v: Option<u64>| v.map_or("--".to_string(), |n| n.to_string());
            for row in &rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                    row.language_pair,
                    row.sentence_count,
                    row.source_sentences_with_entities,
                    row.source_entity_total,
                    opt(row.reference_entity_total),
                    row.source_distinct_entities,
                    opt(row.reference_distinct_entities.map(|n| n as u64)),
                    opt(row.common_distinct_entities.map(|n| n as u64)),
                ));
            }
            Ok(out)
        }
    }
}

/// `report`: per-category source/candidate/match counts.
pub fn cmd_report(args: &ReportArgs) -> Result<String, CliError> {
    let keys = parse_keys(&args.config)?;
    let root = resolve_root(&args.config)?;
    let pairs = resolve_pairs(&root, &args.config)?;
    if !args.category_map.is_file() {
        return Err(CliError::Config(format!(
            "category map {} does not exist",
            args.category_map.display()
        )));
    }
    let category_map = load_category_map(&args.category_map)?;

    #[derive(Serialize)]
    struct PairBreakdown {
        pair: LanguagePair,
        #[serde(flatten)]
        breakdown: CategoryBreakdown,
    }

    let mut sections = Vec::new();
    for pair in &pairs {
        let bundle = load_corpus_with_keys(&root, pair, &keys)?;
        let systems = if args.systems.is_empty() {
            bundle.system_names()
        } else {
            args.systems.clone()
        };
        let breakdown = category_breakdown(&bundle, &systems, &category_map)?;
        sections.push(PairBreakdown {
            pair: pair.clone(),
            breakdown,
        });
    }

    match args.config.format {
        FormatArg::Tsv => {
            let mut out = format!("pair\t{}\n", CategoryBreakdown::TSV_HEADER);
            for section in &sections {
                for row in &section.breakdown.rows {
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\n",
                        section.pair,
                        row.category,
                        row.system,
                        row.source_count,
                        row.candidate_count,
                        row.match_count
                    ));
                }
            }
            Ok(out)
        }
        FormatArg::Json => to_json(&sections),
        FormatArg::Markdown => {
            let mut out = String::from(
                "| pair | category | system | source | candidate | matches |\n|---|---|---|---|---|---|\n",
            );
            for section in &sections {
                for row in &section.breakdown.rows {
                    out.push_str(&format!(
                        "| {} | {} | {} | {} | {} | {} |\n",
                        section.pair,
                        row.category,
                        row.system,
                        row.source_count,
                        row.candidate_count,
                        row.match_count
                    ));
                }
            }
            Ok(out)
        }
    }
}

/// `link`: annotate raw text files with a gazetteer, writing one annotation
/// file per input into the output directory. Idempotent: reruns produce
/// byte-identical files.
pub fn cmd_link(args: &LinkArgs) -> Result<String, CliError> {
    if !args.gazetteer.is_file() {
        return Err(CliError::Config(format!(
            "gazetteer {} does not exist",
            args.gazetteer.display()
        )));
    }
    let gazetteer =
        Gazetteer::from_tsv_file(&args.gazetteer, args.case_fold, args.collapse_whitespace)?;
    let out_dir = args.config.out.clone().ok_or_else(|| {
        CliError::Config("--out <directory> is required for link".to_string())
    })?;
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))?;

    let pool = thread_pool(args.config.jobs)?;
    let annotated: Vec<(PathBuf, Vec<SentenceAnnotation>)> = pool.install(|| {
        args.texts
            .par_iter()
            .map(|text_path| {
                let file = File::open(text_path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", text_path.display()))
                })?;
                let sentences: Vec<String> = BufReader::new(file)
                    .lines()
                    .collect::<Result<_, _>>()
                    .map_err(|e| {
                        CliError::Data(format!("{}: {e}", text_path.display()))
                    })?;
                Ok((text_path.clone(), annotate_corpus(&sentences, &gazetteer)))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let mut summary = String::new();
    for (text_path, annotations) in &annotated {
        let stem = text_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("annotations");
        let out_path = out_dir.join(format!("{stem}.jsonl"));
        let mut buffer = Vec::new();
        write_annotations(&mut buffer, annotations)?;
        std::fs::write(&out_path, &buffer)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", out_path.display())))?;
        let mention_total: usize = annotations.iter().map(|a| a.mentions.len()).sum();
        summary.push_str(&format!(
            "wrote {}\t{} sentences\t{} mentions\n",
            out_path.display(),
            annotations.len(),
            mention_total
        ));
    }
    Ok(summary)
}
