//! Diagnostic artifacts: corpus entity statistics, per-category match
//! breakdowns, and entities-per-sentence histograms.
//!
//! All outputs are data (TSV/JSON/CSV), never rendered figures.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::annotations::{CorpusBundle, SentenceAnnotation};
use crate::scoring::{entity_bag, ScoreError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("category map line {line}: expected entity_id<TAB>category")]
    BadCategoryMapLine { line: usize },
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Entity statistics for one language pair, computed from the source and
/// reference sides. Reference fields are absent when the bundle has no
/// reference annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStatsRow {
    pub language_pair: String,
    pub sentence_count: usize,
    pub source_sentences_with_entities: usize,
    pub source_entity_total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_entity_total: Option<u64>,
    pub source_distinct_entities: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_distinct_entities: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_distinct_entities: Option<usize>,
}

impl CorpusStatsRow {
    pub const TSV_HEADER: &'static str = "language_pair\tsentence_count\tsource_sentences_with_entities\tsource_entity_total\treference_entity_total\tsource_distinct_entities\treference_distinct_entities\tcommon_distinct_entities";

    pub fn to_tsv_row(&self) -> String {
        let opt = |v: Option<u64>| v.map_or("--".to_string(), |n| n.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.language_pair,
            self.sentence_count,
            self.source_sentences_with_entities,
            self.source_entity_total,
            opt(self.reference_entity_total),
            self.source_distinct_entities,
            opt(self.reference_distinct_entities.map(|n| n as u64)),
            opt(self.common_distinct_entities.map(|n| n as u64)),
        )
    }
}

fn side_counts(annotations: &[SentenceAnnotation]) -> (usize, u64, HashSet<&str>) {
    let mut with_entities = 0usize;
    let mut total = 0u64;
    let mut distinct: HashSet<&str> = HashSet::new();
    for annotation in annotations {
        if !annotation.mentions.is_empty() {
            with_entities += 1;
        }
        total += annotation.mentions.len() as u64;
        for mention in &annotation.mentions {
            distinct.insert(mention.entity_id.as_str());
        }
    }
    (with_entities, total, distinct)
}

/// Exact integer entity statistics over the source and reference sides.
///
/// "Distinct" counts use entity-id string equality; "common" is the
/// intersection of the two distinct sets.
pub fn corpus_stats(bundle: &CorpusBundle) -> CorpusStatsRow {
    let (source_with, source_total, source_distinct) = side_counts(&bundle.source);
    let reference = bundle.reference.as_deref().map(side_counts);
    let common = reference
        .as_ref()
        .map(|(_, _, ref_distinct)| source_distinct.intersection(ref_distinct).count());
    CorpusStatsRow {
        language_pair: bundle.language_pair.to_string(),
        sentence_count: bundle.source.len(),
        source_sentences_with_entities: source_with,
        source_entity_total: source_total,
        reference_entity_total: reference.as_ref().map(|&(_, total, _)| total),
        source_distinct_entities: source_distinct.len(),
        reference_distinct_entities: reference.as_ref().map(|(_, _, d)| d.len()),
        common_distinct_entities: common,
    }
}

/// Fallback category for entity ids the category map does not cover.
pub const UNMAPPED_CATEGORY: &str = "other";

/// Per-category, per-system clipped match counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryBreakdownRow {
    pub category: String,
    pub system: String,
    pub source_count: u64,
    pub candidate_count: u64,
    pub match_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct CategoryBreakdown {
    pub rows: Vec<CategoryBreakdownRow>,
}

impl CategoryBreakdown {
    pub const TSV_HEADER: &'static str =
        "category\tsystem\tsource_count\tcandidate_count\tmatch_count";

    /// Match totals per system, summed across categories. Equals the
    /// system's `ScoreReport::match_total` because categories partition the
    /// entity ids.
    pub fn match_total(&self, system: &str) -> u64 {
        self.rows
            .iter()
            .filter(|r| r.system == system)
            .map(|r| r.match_count)
            .sum()
    }
}

/// Breaks source/candidate/match counts down by entity category.
///
/// Uses the same clipped matching as scoring, source-pivot and unfiltered;
/// ids missing from `category_map` land in [`UNMAPPED_CATEGORY`]. Rows come
/// out sorted by category, then by the order systems were requested.
pub fn category_breakdown(
    bundle: &CorpusBundle,
    system_names: &[String],
    category_map: &HashMap<String, String>,
) -> Result<CategoryBreakdown, ScoreError> {
    let category_of = |entity_id: &str| -> &str {
        category_map
            .get(entity_id)
            .map(String::as_str)
            .unwrap_or(UNMAPPED_CATEGORY)
    };

    // category -> system position -> (source, candidate, match)
    let mut table: BTreeMap<String, Vec<(u64, u64, u64)>> = BTreeMap::new();

    for (position, system_name) in system_names.iter().enumerate() {
        let system = bundle
            .system(system_name)
            .ok_or_else(|| ScoreError::UnknownSystem(system_name.clone()))?;
        for (source_annotation, candidate_annotation) in
            bundle.source.iter().zip(&system.sentences)
        {
            let source_bag = entity_bag(source_annotation, None);
            let candidate_bag = entity_bag(candidate_annotation, None);
            let mut seen: HashSet<&str> = HashSet::new();
            for (entity_id, source_n) in source_bag.iter() {
                seen.insert(entity_id);
                let candidate_n = candidate_bag.count(entity_id);
                let entry = table
                    .entry(category_of(entity_id).to_string())
                    .or_insert_with(|| vec![(0, 0, 0); system_names.len()]);
                entry[position].0 += source_n;
                entry[position].1 += candidate_n;
                entry[position].2 += source_n.min(candidate_n);
            }
            // Candidate-only entities contribute to candidate counts but can
            // never match.
            for (entity_id, candidate_n) in candidate_bag.iter() {
                if !seen.contains(entity_id) {
                    let entry = table
                        .entry(category_of(entity_id).to_string())
                        .or_insert_with(|| vec![(0, 0, 0); system_names.len()]);
                    entry[position].1 += candidate_n;
                }
            }
        }
    }

    let mut rows = Vec::new();
    for (category, per_system) in table {
        for (position, &(source, candidate, matched)) in per_system.iter().enumerate() {
            rows.push(CategoryBreakdownRow {
                category: category.clone(),
                system: system_names[position].clone(),
                source_count: source,
                candidate_count: candidate,
                match_count: matched,
            });
        }
    }
    Ok(CategoryBreakdown { rows })
}

/// Reads a TSV `entity_id<TAB>category` mapping. Blank lines are skipped.
pub fn read_category_map<R: Read>(reader: R) -> Result<HashMap<String, String>, ReportError> {
    let mut map = HashMap::new();
    for (line_number, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (entity_id, category) = line
            .split_once('\t')
            .ok_or(ReportError::BadCategoryMapLine {
                line: line_number + 1,
            })?;
        if entity_id.is_empty() || category.is_empty() {
            return Err(ReportError::BadCategoryMapLine {
                line: line_number + 1,
            });
        }
        map.insert(entity_id.to_string(), category.to_string());
    }
    Ok(map)
}

pub fn load_category_map(path: &Path) -> Result<HashMap<String, String>, ReportError> {
    read_category_map(File::open(path)?)
}

/// Frequencies of per-sentence entity counts. Bucket 0 counts entity-less
/// sentences; frequencies sum to the sentence count.
pub fn entities_per_sentence_histogram(
    annotations: &[SentenceAnnotation],
) -> BTreeMap<usize, u64> {
    let mut histogram = BTreeMap::new();
    for annotation in annotations {
        *histogram.entry(annotation.mentions.len()).or_insert(0) += 1;
    }
    histogram
}

/// Histogram as a two-column CSV for external plotting.
pub fn histogram_csv(histogram: &BTreeMap<usize, u64>) -> String {
    let mut out = String::from("entities,sentences\n");
    for (count, frequency) in histogram {
        out.push_str(&format!("{count},{frequency}\n"));
    }
    out
}
