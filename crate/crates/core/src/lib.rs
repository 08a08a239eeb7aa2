//! Knowledge-based, reference-less machine translation evaluation.
//!
//! The toolkit scores MT systems from entity-linking annotations of source
//! sentences and candidate translations: entities grounded to the same
//! knowledge-base record on both sides count as matches (clipped by the
//! source-side occurrence count), corpus-level recall is combined with an
//! entity count penalty into the final KoBE score, and system scores are
//! meta-evaluated against human direct-assessment judgements via signed
//! Pearson correlation.
//!
//! Modules:
//! - [`annotations`]: annotation data model, JSON(-lines) parsing, corpus
//!   directory loading, validation.
//! - [`scoring`]: entity bags, clipped matching, recall/precision, entity
//!   count penalty, KoBE score reports.
//! - [`linker`]: pluggable gazetteer baseline for entity linking and the
//!   target-language mention filter.
//! - [`metaeval`]: system-level Pearson correlation against human DA scores,
//!   WMT-style scores CSV ingestion.
//! - [`reports`]: corpus entity statistics, per-category match breakdowns,
//!   entities-per-sentence histograms.
//! - [`cli`]: command implementations behind the `kobe` binary.

pub mod annotations;
pub mod cli;
pub mod linker;
pub mod metaeval;
pub mod reports;
pub mod scoring;

pub use annotations::{
    load_corpus, parse_annotations, validate, AnnotationError, CorpusBundle, EntityMention,
    KeyMap, LanguagePair, SentenceAnnotation, SystemSubmission,
};
pub use linker::{Gazetteer, LanguageFilterSpec, LinkerError, TagSource};
pub use metaeval::{pearson, CorrelationReport, MetaEvalError, SystemScoreTable};
pub use reports::{corpus_stats, CorpusStatsRow};
pub use scoring::{
    entity_count_penalty, kobe_score, match_count, EcpCandidatePolicy, EntityBag, ScoreError,
    ScoreReport, ScoringMode,
};
