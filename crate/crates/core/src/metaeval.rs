//! System-level meta-evaluation: signed Pearson correlation of metric scores
//! against human direct-assessment (DA) scores, over the WMT-style scores
//! CSV.
//!
//! Correlations are always reported signed. `sign_negative` flags metrics
//! that anti-correlate on a pair, the cases an absolute-value report would
//! cover up.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotations::LanguagePair;

#[derive(Debug, Error)]
pub enum MetaEvalError {
    #[error("vector length mismatch: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 2 points for a correlation, got {0}")]
    TooFewPoints(usize),
    #[error("undefined correlation: {0} is constant")]
    ConstantVector(&'static str),
    #[error("unknown metric column '{0}'")]
    UnknownMetric(String),
    #[error("metric '{metric}' has {usable} usable systems on {pair}; need at least 2")]
    TooFewSystems {
        metric: String,
        pair: String,
        usable: usize,
    },
    #[error("column '{column}' is constant on {pair}; correlation undefined")]
    ConstantColumn { column: String, pair: String },
    #[error("scores CSV is missing required column '{0}'")]
    MissingColumn(String),
    #[error("scores CSV row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("duplicate system '{system}' for {pair}")]
    DuplicateSystem { pair: String, system: String },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Signed product-moment correlation.
///
/// Two-pass: means first, then centered sums. The denominator is
/// `sqrt(sxx * syy)`, computed once. Errors rather than returning NaN for
/// constant inputs.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetaEvalError> {
    if x.len() != y.len() {
        return Err(MetaEvalError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(MetaEvalError::TooFewPoints(x.len()));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(MetaEvalError::ConstantVector("x"));
    }
    if syy == 0.0 {
        return Err(MetaEvalError::ConstantVector("y"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Metric and DA scores for the systems of one language pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub system: String,
    /// Metric name -> score; metrics a system did not participate in are
    /// absent.
    pub metrics: BTreeMap<String, f64>,
    /// Standardized human direct-assessment score, consumed as given.
    pub human_da: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemScoreTable {
    pub language_pair: LanguagePair,
    /// All metric columns the source file declared, in header order.
    pub metric_names: Vec<String>,
    pub rows: Vec<ScoreRow>,
}

impl SystemScoreTable {
    pub fn new(language_pair: LanguagePair) -> Self {
        SystemScoreTable {
            language_pair,
            metric_names: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Adds or overwrites one metric score for a system, creating the row if
    /// needed. Used to inject computed metric columns.
    pub fn set_metric(&mut self, system: &str, metric: &str, score: f64) {
        if !self.metric_names.iter().any(|m| m == metric) {
            self.metric_names.push(metric.to_string());
        }
        match self.rows.iter_mut().find(|r| r.system == system) {
            Some(row) => {
                row.metrics.insert(metric.to_string(), score);
            }
            None => {
                let mut metrics = BTreeMap::new();
                metrics.insert(metric.to_string(), score);
                self.rows.push(ScoreRow {
                    system: system.to_string(),
                    metrics,
                    human_da: None,
                });
            }
        }
    }
}

/// Signed correlation of one metric with human DA on one language pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub language_pair: LanguagePair,
    pub metric_name: String,
    /// Signed Pearson coefficient; never absolute-valued.
    pub r: f64,
    pub n_systems: usize,
    /// True exactly when `r < 0`.
    pub sign_negative: bool,
    /// Rows dropped because the metric or the DA score was missing.
    pub n_dropped: usize,
}

impl CorrelationReport {
    pub const TSV_HEADER: &'static str =
        "language_pair\tmetric_name\tr\tn_systems\tsign_negative\tn_dropped";

    pub fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.language_pair,
            self.metric_name,
            self.r,
            self.n_systems,
            self.sign_negative,
            self.n_dropped
        )
    }
}

/// Correlates one metric column with the DA column across systems.
///
/// Rows missing either value are dropped and counted in `n_dropped`.
pub fn correlate_systems(
    table: &SystemScoreTable,
    metric: &str,
) -> Result<CorrelationReport, MetaEvalError> {
    if !table.metric_names.iter().any(|m| m == metric)
        && !table.rows.iter().any(|r| r.metrics.contains_key(metric))
    {
        return Err(MetaEvalError::UnknownMetric(metric.to_string()));
    }
    let mut points = Vec::new();
    let mut dropped = 0usize;
    for row in &table.rows {
        match (row.metrics.get(metric), row.human_da) {
            (Some(&score), Some(da)) => points.push((score, da)),
            _ => dropped += 1,
        }
    }
    if points.len() < 2 {
        return Err(MetaEvalError::TooFewSystems {
            metric: metric.to_string(),
            pair: table.language_pair.to_string(),
            usable: points.len(),
        });
    }
    // Summation order must not depend on row order, so the result is
    // bit-identical under row permutation.
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (x, y): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let r = pearson(&x, &y).map_err(|e| match e {
        MetaEvalError::ConstantVector(which) => MetaEvalError::ConstantColumn {
            column: if which == "x" {
                metric.to_string()
            } else {
                "DA".to_string()
            },
            pair: table.language_pair.to_string(),
        },
        other => other,
    })?;
    Ok(CorrelationReport {
        language_pair: table.language_pair.clone(),
        metric_name: metric.to_string(),
        r,
        n_systems: x.len(),
        sign_negative: r < 0.0,
        n_dropped: dropped,
    })
}

/// Recomputes the correlation for each named metric column, regenerating the
/// shared-task result rows from the ingested CSV.
pub fn reproduce_baselines(
    table: &SystemScoreTable,
    metrics: &[String],
) -> Result<Vec<CorrelationReport>, MetaEvalError> {
    metrics
        .iter()
        .map(|metric| correlate_systems(table, metric))
        .collect()
}

/// Column naming and delimiter for the scores CSV.
#[derive(Debug, Clone)]
pub struct CsvConfig {
    pub delimiter: u8,
    pub lp_column: String,
    pub system_column: String,
    pub da_column: String,
}

impl Default for CsvConfig {
    fn default() -> Self {
        CsvConfig {
            delimiter: b',',
            lp_column: "lp".to_string(),
            system_column: "system".to_string(),
            da_column: "DA".to_string(),
        }
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(
        cell.trim(),
        "" | "-" | "--" | "NA" | "N/A" | "NaN" | "nan" | "null" | "None"
    )
}

/// Ingests the per-system scores CSV into one table per language pair,
/// sorted by pair, rows sorted by system name.
///
/// Every column other than the language-pair, system, and DA columns is read
/// as a metric column; empty or `--` cells mean the metric did not score
/// that system.
pub fn read_score_tables<R: Read>(
    reader: R,
    config: &CsvConfig,
) -> Result<Vec<SystemScoreTable>, MetaEvalError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter)
        .flexible(false)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let column_index = |name: &str| -> Result<usize, MetaEvalError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| MetaEvalError::MissingColumn(name.to_string()))
    };
    let lp_index = column_index(&config.lp_column)?;
    let system_index = column_index(&config.system_column)?;
    let da_index = column_index(&config.da_column)?;

    let metric_columns: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != lp_index && i != system_index && i != da_index)
        .map(|(i, name)| (i, name.trim().to_string()))
        .collect();
    let metric_names: Vec<String> = metric_columns.iter().map(|(_, n)| n.clone()).collect();

    let mut tables: BTreeMap<LanguagePair, SystemScoreTable> = BTreeMap::new();
    for (row_number, record) in csv_reader.records().enumerate() {
        let record = record?;
        let row = row_number + 2; // 1-based, after the header
        let bad_row = |reason: String| MetaEvalError::BadRow { row, reason };

        let pair: LanguagePair = record
            .get(lp_index)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e| bad_row(format!("{e}")))?;
        let system = record.get(system_index).unwrap_or("").trim().to_string();
        if system.is_empty() {
            return Err(bad_row("empty system name".to_string()));
        }

        let parse_cell = |index: usize, name: &str| -> Result<Option<f64>, MetaEvalError> {
            let cell = record.get(index).unwrap_or("");
            if is_missing(cell) {
                return Ok(None);
            }
            cell.trim()
                .parse::<f64>()
                .map(Some)
                .map_err(|_| bad_row(format!("column '{name}': unreadable number '{cell}'")))
        };

        let human_da = parse_cell(da_index, &config.da_column)?;
        let mut metrics = BTreeMap::new();
        for (index, name) in &metric_columns {
            if let Some(score) = parse_cell(*index, name)? {
                metrics.insert(name.clone(), score);
            }
        }

        let table = tables.entry(pair.clone()).or_insert_with(|| {
            let mut t = SystemScoreTable::new(pair.clone());
            t.metric_names = metric_names.clone();
            t
        });
        if table.rows.iter().any(|r| r.system == system) {
            return Err(MetaEvalError::DuplicateSystem {
                pair: pair.to_string(),
                system,
            });
        }
        table.rows.push(ScoreRow {
            system,
            metrics,
            human_da,
        });
    }

    let mut out: Vec<SystemScoreTable> = tables.into_values().collect();
    for table in &mut out {
        table.rows.sort_by(|a, b| a.system.cmp(&b.system));
    }
    Ok(out)
}

/// Renders correlation reports as a Markdown grid: one row per metric, one
/// column per language pair, `--` where a metric has no report for a pair.
pub fn markdown_table(reports: &[CorrelationReport]) -> String {
    let pairs: BTreeSet<&LanguagePair> = reports.iter().map(|r| &r.language_pair).collect();
    let mut metrics: Vec<&str> = Vec::new();
    for report in reports {
        if !metrics.contains(&report.metric_name.as_str()) {
            metrics.push(&report.metric_name);
        }
    }

    let mut cells: BTreeMap<(&str, &LanguagePair), f64> = BTreeMap::new();
    for report in reports {
        cells.insert((&report.metric_name, &report.language_pair), report.r);
    }

    let mut out = String::from("| metric |");
    for pair in &pairs {
        out.push_str(&format!(" {pair} |"));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &pairs {
        out.push_str("---|");
    }
    out.push('\n');
    for metric in &metrics {
        out.push_str(&format!("| {metric} |"));
        for pair in &pairs {
            match cells.get(&(*metric, *pair)) {
                Some(r) => out.push_str(&format!(" {r:.3} |")),
                None => out.push_str(" -- |"),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent straight-line textbook route: separate square roots in
    /// the denominator.
    fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mean_x = x.iter().sum::<f64>() / n;
        let mean_y = y.iter().sum::<f64>() / n;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for i in 0..x.len() {
            sxy += (x[i] - mean_x) * (y[i] - mean_y);
            sxx += (x[i] - mean_x) * (x[i] - mean_x);
            syy += (y[i] - mean_y) * (y[i] - mean_y);
        }
        sxy / (sxx.sqrt() * syy.sqrt())
    }

    #[test]
    fn pearson_is_exact_on_linear_data() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn pearson_rejects_bad_inputs() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(MetaEvalError::LengthMismatch { .. })
        ));
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(MetaEvalError::TooFewPoints(1))
        ));
        assert!(matches!(
            pearson(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(MetaEvalError::ConstantVector("x"))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]),
            Err(MetaEvalError::ConstantVector("y"))
        ));
    }

    #[test]
    fn pearson_agrees_with_independent_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..50 {
            let n = rng.random_range(3..=20);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let ours = pearson(&x, &y).unwrap();
            assert!((ours - pearson_oracle(&x, &y)).abs() <= 1e-12);
        }
    }

    #[test]
    fn pearson_symmetry_and_affine_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n = rng.random_range(3..=12);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let base = pearson(&x, &y).unwrap();
            let swapped = pearson(&y, &x).unwrap();
            assert!((base - swapped).abs() <= 1e-12);

            let a = rng.random_range(0.1..3.0);
            let b = rng.random_range(-2.0..2.0);
            let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            assert!((pearson(&scaled, &y).unwrap() - base).abs() <= 1e-12);

            let flipped: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
            assert!((pearson(&flipped, &y).unwrap() + base).abs() <= 1e-12);
        }
    }

    fn demo_table() -> SystemScoreTable {
        let mut table = SystemScoreTable::new("ru-en".parse().unwrap());
        table.metric_names = vec!["BLEU".to_string(), "KoBE".to_string()];
        for (system, bleu, kobe, da) in [
            ("sys-a", Some(0.30), Some(0.55), Some(0.12)),
            ("sys-b", Some(0.25), Some(0.40), Some(-0.05)),
            ("sys-c", Some(0.35), Some(0.70), Some(0.31)),
            ("sys-d", None, Some(0.10), Some(-0.40)),
        ] {
            let mut metrics = BTreeMap::new();
            if let Some(v) = bleu {
                metrics.insert("BLEU".to_string(), v);
            }
            if let Some(v) = kobe {
                metrics.insert("KoBE".to_string(), v);
            }
            table.rows.push(ScoreRow {
                system: system.to_string(),
                metrics,
                human_da: da,
            });
        }
        table
    }

    #[test]
    fn correlate_metric_equal_to_da_gives_one() {
        let mut table = SystemScoreTable::new("de-en".parse().unwrap());
        table.metric_names = vec!["echo".to_string()];
        for (system, da) in [("a", 0.4), ("b", -0.2), ("c", 0.9)] {
            let mut metrics = BTreeMap::new();
            metrics.insert("echo".to_string(), da);
            table.rows.push(ScoreRow {
                system: system.to_string(),
                metrics,
                human_da: Some(da),
            });
        }
        let report = correlate_systems(&table, "echo").unwrap();
        assert_eq!(report.r, 1.0);
        assert!(!report.sign_negative);
        assert_eq!(report.n_systems, 3);
        assert_eq!(report.n_dropped, 0);
    }

    #[test]
    fn correlate_drops_and_counts_missing_rows() {
        let report = correlate_systems(&demo_table(), "BLEU").unwrap();
        assert_eq!(report.n_systems, 3);
        assert_eq!(report.n_dropped, 1);
    }

    #[test]
    fn correlate_is_row_order_invariant() {
        let table = demo_table();
        let mut reversed = table.clone();
        reversed.rows.reverse();
        assert_eq!(
            correlate_systems(&table, "KoBE").unwrap().r,
            correlate_systems(&reversed, "KoBE").unwrap().r
        );
    }

    #[test]
    fn sign_negative_tracks_the_sign() {
        let mut table = SystemScoreTable::new("en-ru".parse().unwrap());
        table.metric_names = vec!["anti".to_string()];
        for (system, score, da) in [("a", 3.0, -1.0), ("b", 2.0, 0.0), ("c", 1.0, 1.0)] {
            let mut metrics = BTreeMap::new();
            metrics.insert("anti".to_string(), score);
            table.rows.push(ScoreRow {
                system: system.to_string(),
                metrics,
                human_da: Some(da),
            });
        }
        let report = correlate_systems(&table, "anti").unwrap();
        assert_eq!(report.r, -1.0);
        assert!(report.sign_negative);
    }

    #[test]
    fn unknown_metric_is_an_error() {
        assert!(matches!(
            correlate_systems(&demo_table(), "chrF"),
            Err(MetaEvalError::UnknownMetric(_))
        ));
        assert!(matches!(
            reproduce_baselines(&demo_table(), &["chrF".to_string()]),
            Err(MetaEvalError::UnknownMetric(_))
        ));
    }

    #[test]
    fn constant_metric_column_error_names_the_metric() {
        let mut table = SystemScoreTable::new("de-en".parse().unwrap());
        table.metric_names = vec!["flat".to_string()];
        for (system, da) in [("a", 0.1), ("b", 0.2), ("c", 0.3)] {
            let mut metrics = BTreeMap::new();
            metrics.insert("flat".to_string(), 0.5);
            table.rows.push(ScoreRow {
                system: system.to_string(),
                metrics,
                human_da: Some(da),
            });
        }
        match correlate_systems(&table, "flat") {
            Err(MetaEvalError::ConstantColumn { column, pair }) => {
                assert_eq!(column, "flat");
                assert_eq!(pair, "de-en");
            }
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn too_few_usable_systems_is_an_error() {
        let mut table = demo_table();
        table.rows.truncate(1);
        assert!(matches!(
            correlate_systems(&table, "KoBE"),
            Err(MetaEvalError::TooFewSystems { .. })
        ));
    }

    #[test]
    fn reproduce_baselines_recovers_planted_correlations() {
        // "lin" is exactly DA; "anti" is exactly -DA.
        let mut table = SystemScoreTable::new("fi-en".parse().unwrap());
        table.metric_names = vec!["lin".to_string(), "anti".to_string()];
        for (system, da) in [("a", 0.1), ("b", 0.5), ("c", -0.3), ("d", 0.9)] {
            let mut metrics = BTreeMap::new();
            metrics.insert("lin".to_string(), 2.0 * da + 1.0);
            metrics.insert("anti".to_string(), -da);
            table.rows.push(ScoreRow {
                system: system.to_string(),
                metrics,
                human_da: Some(da),
            });
        }
        let reports =
            reproduce_baselines(&table, &["lin".to_string(), "anti".to_string()]).unwrap();
        assert_eq!(reports[0].r, 1.0);
        assert_eq!(reports[1].r, -1.0);
        assert!(reports[1].sign_negative);
    }

    #[test]
    fn csv_ingestion_groups_by_pair_and_handles_missing_cells() {
        let csv_text = "\
lp,system,BLEU,YiSi-2,DA
de-en,sys-b,0.30,--,0.10
de-en,sys-a,0.25,0.44,0.05
ru-en,sys-c,0.40,0.50,-0.20
ru-en,sys-d,,0.61,0.15
";
        let tables = read_score_tables(csv_text.as_bytes(), &CsvConfig::default()).unwrap();
        assert_eq!(tables.len(), 2);
        assert_eq!(tables[0].language_pair.to_string(), "de-en");
        // Rows sorted by system.
        assert_eq!(tables[0].rows[0].system, "sys-a");
        assert_eq!(tables[0].rows[1].metrics.get("YiSi-2"), None);
        assert_eq!(tables[1].rows[1].metrics.get("BLEU"), None);
        assert_eq!(tables[0].metric_names, vec!["BLEU", "YiSi-2"]);
    }

    #[test]
    fn csv_with_custom_header_names_and_delimiter() {
        let csv_text = "pair;mt;metricA;human\nde-en;x;0.5;0.1\nde-en;y;0.6;0.2\n";
        let config = CsvConfig {
            delimiter: b';',
            lp_column: "pair".to_string(),
            system_column: "mt".to_string(),
            da_column: "human".to_string(),
        };
        let tables = read_score_tables(csv_text.as_bytes(), &config).unwrap();
        assert_eq!(tables[0].metric_names, vec!["metricA"]);
        let report = correlate_systems(&tables[0], "metricA").unwrap();
        assert_eq!(report.n_systems, 2);
    }

    #[test]
    fn csv_missing_key_column_is_an_error() {
        let csv_text = "lp,mt,DA\nde-en,x,0.1\n";
        assert!(matches!(
            read_score_tables(csv_text.as_bytes(), &CsvConfig::default()),
            Err(MetaEvalError::MissingColumn(_))
        ));
    }

    #[test]
    fn csv_duplicate_system_is_an_error() {
        let csv_text = "lp,system,BLEU,DA\nde-en,x,0.1,0.2\nde-en,x,0.3,0.4\n";
        assert!(matches!(
            read_score_tables(csv_text.as_bytes(), &CsvConfig::default()),
            Err(MetaEvalError::DuplicateSystem { .. })
        ));
    }

    #[test]
    fn csv_unreadable_number_names_row_and_column() {
        let csv_text = "lp,system,BLEU,DA\nde-en,x,bogus,0.2\n";
        match read_score_tables(csv_text.as_bytes(), &CsvConfig::default()) {
            Err(MetaEvalError::BadRow { row, reason }) => {
                assert_eq!(row, 2);
                assert!(reason.contains("BLEU"));
            }
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn markdown_table_mirrors_metric_by_pair_grid() {
        let reports = vec![
            CorrelationReport {
                language_pair: "de-en".parse().unwrap(),
                metric_name: "BLEU".to_string(),
                r: 0.849,
                n_systems: 16,
                sign_negative: false,
                n_dropped: 0,
            },
            CorrelationReport {
                language_pair: "ru-en".parse().unwrap(),
                metric_name: "KoBE".to_string(),
                r: 0.928,
                n_systems: 14,
                sign_negative: false,
                n_dropped: 0,
            },
        ];
        let table = markdown_table(&reports);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], "| metric | de-en | ru-en |");
        assert_eq!(lines[1], "|---|---|---|");
        assert_eq!(lines[2], "| BLEU | 0.849 | -- |");
        assert_eq!(lines[3], "| KoBE | -- | 0.928 |");
    }
}
