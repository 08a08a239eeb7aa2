//! The KoBE metric: clipped entity matching, corpus recall, entity count
//! penalty, and the combined score.
//!
//! All counting is done on exact integer sums; each reported ratio performs
//! its single division at corpus level, so scores are bit-reproducible no
//! matter how the per-sentence work is scheduled.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotations::{CorpusBundle, EntityMention, SentenceAnnotation};

/// A multiset of entity ids: entities mentioned several times count
/// individually.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EntityBag {
    counts: HashMap<String, u64>,
    total: u64,
}

impl EntityBag {
    pub fn new() -> Self {
        EntityBag::default()
    }

    /// Builds a bag from mention counts. Zero counts are dropped.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut bag = EntityBag::new();
        for (id, n) in counts {
            bag.add_n(id.into(), n);
        }
        bag
    }

    pub fn add(&mut self, entity_id: &str) {
        self.add_n(entity_id.to_string(), 1);
    }

    pub fn add_n(&mut self, entity_id: String, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(entity_id).or_insert(0) += n;
        self.total += n;
    }

    pub fn count(&self, entity_id: &str) -> u64 {
        self.counts.get(entity_id).copied().unwrap_or(0)
    }

    /// Sum of all mention counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct entity ids.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(id, &n)| (id.as_str(), n))
    }
}

/// Per-mention predicate used to filter the candidate side before bagging.
pub type MentionFilter = dyn Fn(&EntityMention) -> bool + Sync;

/// Counts each mention of `annotation` that passes `filter` into a bag.
/// No filter counts every mention.
pub fn entity_bag(
    annotation: &SentenceAnnotation,
    filter: Option<&MentionFilter>,
) -> EntityBag {
    let mut bag = EntityBag::new();
    for mention in &annotation.mentions {
        if filter.is_none_or(|keep| keep(mention)) {
            bag.add(&mention.entity_id);
        }
    }
    bag
}

/// Number of matching entities between two bags: per entity id the match is
/// clipped to the smaller of the two occurrence counts.
///
/// Symmetric in value; semantically the first bag is the clipping (pivot)
/// side.
pub fn match_count(pivot: &EntityBag, candidate: &EntityBag) -> u64 {
    let (small, large) = if pivot.distinct() <= candidate.distinct() {
        (pivot, candidate)
    } else {
        (candidate, pivot)
    };
    small.iter().map(|(id, n)| n.min(large.count(id))).sum()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("unknown system '{0}'")]
    UnknownSystem(String),
    #[error("reference-pivot scoring requires reference annotations")]
    MissingReference,
    #[error("undefined denominator: zero {0} entities in the corpus")]
    ZeroDenominator(&'static str),
}

/// Corpus-level recall: total matches over total pivot-side entities.
///
/// Errors when the corpus has no pivot entities rather than returning a
/// silent zero.
pub fn corpus_recall(pairs: &[(EntityBag, EntityBag)]) -> Result<f64, ScoreError> {
    let matches: u64 = pairs.iter().map(|(s, c)| match_count(s, c)).sum();
    let pivot_total: u64 = pairs.iter().map(|(s, _)| s.total()).sum();
    if pivot_total == 0 {
        return Err(ScoreError::ZeroDenominator("pivot"));
    }
    Ok(matches as f64 / pivot_total as f64)
}

/// Corpus-level precision: total matches over total candidate-side entities.
pub fn corpus_precision(pairs: &[(EntityBag, EntityBag)]) -> Result<f64, ScoreError> {
    let matches: u64 = pairs.iter().map(|(s, c)| match_count(s, c)).sum();
    let candidate_total: u64 = pairs.iter().map(|(_, c)| c.total()).sum();
    if candidate_total == 0 {
        return Err(ScoreError::ZeroDenominator("candidate"));
    }
    Ok(matches as f64 / candidate_total as f64)
}

/// Entity count penalty: 1 while the candidate produces fewer than twice the
/// pivot's entities, decaying exponentially beyond that. Continuous at
/// `candidate_total == 2 * pivot_total`, where both branches give 1.
pub fn entity_count_penalty(candidate_total: u64, pivot_total: u64) -> Result<f64, ScoreError> {
    if pivot_total == 0 {
        return Err(ScoreError::ZeroDenominator("pivot"));
    }
    if candidate_total < 2 * pivot_total {
        Ok(1.0)
    } else {
        Ok((1.0 - candidate_total as f64 / (2.0 * pivot_total as f64)).exp())
    }
}

/// Which side supplies the entities that the candidate must recall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoringMode {
    /// Reference-less: recall of candidate entities vs. source entities.
    SourcePivot,
    /// Reference-based: recall of candidate entities vs. reference entities.
    ReferencePivot,
}

/// Whether the entity count penalty sees the candidate totals before or
/// after language filtering. Filtered keeps the penalty aligned with the
/// entity stream that matching consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EcpCandidatePolicy {
    #[default]
    Filtered,
    Unfiltered,
}

/// Score and raw counts for one system over one corpus.
///
/// `kobe` is computed as `ecp * recall` on the already-rounded field values,
/// so the identity holds bit-exactly. `source_entity_total` is the pivot-side
/// total (the recall denominator): source entities in source-pivot mode,
/// reference entities in reference-pivot mode. `candidate_entity_total` is
/// the candidate total after language filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub recall: f64,
    pub precision: f64,
    pub ecp: f64,
    pub kobe: f64,
    pub source_entity_total: u64,
    pub candidate_entity_total: u64,
    pub match_total: u64,
    pub sentences_scored: u64,
    pub sentences_without_source_entities: u64,
}

impl ScoreReport {
    pub const TSV_HEADER: &'static str = "recall\tprecision\tecp\tkobe\tsource_entity_total\tcandidate_entity_total\tmatch_total\tsentences_scored\tsentences_without_source_entities";

    /// Fields in declared order, tab-separated.
    pub fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.recall,
            self.precision,
            self.ecp,
            self.kobe,
            self.source_entity_total,
            self.candidate_entity_total,
            self.match_total,
            self.sentences_scored,
            self.sentences_without_source_entities
        )
    }
}

/// One sentence pair's contribution to the corpus sums, exposed for
/// analysis. There is no per-sentence ECP; the metric is corpus-level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceContribution {
    pub sentence_index: usize,
    pub pivot_total: u64,
    pub candidate_total: u64,
    pub matches: u64,
}

fn pivot_side(
    bundle: &CorpusBundle,
    mode: ScoringMode,
) -> Result<&[SentenceAnnotation], ScoreError> {
    match mode {
        ScoringMode::SourcePivot => Ok(&bundle.source),
        ScoringMode::ReferencePivot => bundle
            .reference
            .as_deref()
            .ok_or(ScoreError::MissingReference),
    }
}

fn candidate_side<'a>(
    bundle: &'a CorpusBundle,
    system_name: &str,
) -> Result<&'a [SentenceAnnotation], ScoreError> {
    bundle
        .system(system_name)
        .map(|s| s.sentences.as_slice())
        .ok_or_else(|| ScoreError::UnknownSystem(system_name.to_string()))
}

/// Per-sentence match counts over two aligned sides. The pivot side is
/// never filtered; the candidate side is filtered before bagging.
pub fn side_contributions(
    pivot: &[SentenceAnnotation],
    candidate: &[SentenceAnnotation],
    filter: Option<&MentionFilter>,
) -> Vec<SentenceContribution> {
    pivot
        .iter()
        .zip(candidate)
        .map(|(pivot_annotation, candidate_annotation)| {
            let pivot_bag = entity_bag(pivot_annotation, None);
            let candidate_bag = entity_bag(candidate_annotation, filter);
            SentenceContribution {
                sentence_index: pivot_annotation.sentence_index,
                pivot_total: pivot_bag.total(),
                candidate_total: candidate_bag.total(),
                matches: match_count(&pivot_bag, &candidate_bag),
            }
        })
        .collect()
}

/// Per-sentence match counts for one system of a bundle.
pub fn sentence_contributions(
    bundle: &CorpusBundle,
    system_name: &str,
    mode: ScoringMode,
    filter: Option<&MentionFilter>,
) -> Result<Vec<SentenceContribution>, ScoreError> {
    let pivot = pivot_side(bundle, mode)?;
    let candidate = candidate_side(bundle, system_name)?;
    Ok(side_contributions(pivot, candidate, filter))
}

/// Scores one system: corpus recall and precision over clipped entity
/// matches, the entity count penalty, and `kobe = ecp * recall`.
///
/// Sentences with no pivot entities contribute zero to both the numerator
/// and the denominator and are tallied in
/// `sentences_without_source_entities`. A corpus with no pivot entities at
/// all is an error. A candidate with no (post-filter) entities reports
/// precision 0.
pub fn kobe_score(
    bundle: &CorpusBundle,
    system_name: &str,
    mode: ScoringMode,
    filter: Option<&MentionFilter>,
    ecp_policy: EcpCandidatePolicy,
) -> Result<ScoreReport, ScoreError> {
    let pivot = pivot_side(bundle, mode)?;
    let candidate = candidate_side(bundle, system_name)?;
    score_sides(pivot, candidate, filter, ecp_policy)
}

/// Scores one candidate side against an aligned pivot side; the core of
/// [`kobe_score`] for callers that assemble the sides themselves.
pub fn score_sides(
    pivot: &[SentenceAnnotation],
    candidate: &[SentenceAnnotation],
    filter: Option<&MentionFilter>,
    ecp_policy: EcpCandidatePolicy,
) -> Result<ScoreReport, ScoreError> {
    let contributions = side_contributions(pivot, candidate, filter);

    let mut match_total = 0u64;
    let mut pivot_total = 0u64;
    let mut candidate_total = 0u64;
    let mut without_pivot_entities = 0u64;
    for contribution in &contributions {
        match_total += contribution.matches;
        pivot_total += contribution.pivot_total;
        candidate_total += contribution.candidate_total;
        if contribution.pivot_total == 0 {
            without_pivot_entities += 1;
        }
    }
    if pivot_total == 0 {
        return Err(ScoreError::ZeroDenominator("pivot"));
    }

    let ecp_candidate_total = match ecp_policy {
        EcpCandidatePolicy::Filtered => candidate_total,
        EcpCandidatePolicy::Unfiltered => candidate
            .iter()
            .map(|a| a.mentions.len() as u64)
            .sum(),
    };

    let recall = match_total as f64 / pivot_total as f64;
    let precision = if candidate_total == 0 {
        0.0
    } else {
        match_total as f64 / candidate_total as f64
    };
    let ecp = entity_count_penalty(ecp_candidate_total, pivot_total)?;

    Ok(ScoreReport {
        recall,
        precision,
        ecp,
        kobe: ecp * recall,
        source_entity_total: pivot_total,
        candidate_entity_total: candidate_total,
        match_total,
        sentences_scored: contributions.len() as u64,
        sentences_without_source_entities: without_pivot_entities,
    })
}
