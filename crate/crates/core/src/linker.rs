//! Pluggable entity linking: a deterministic gazetteer baseline and the
//! target-language mention filter.
//!
//! The gazetteer annotator scans normalized text left to right, taking the
//! longest surface form that starts at each position, never overlapping
//! matches. Matches must sit on word boundaries: the characters adjacent to
//! a match may not be alphanumeric. Offsets are reported against the
//! original text in Unicode scalar values.
//!
//! Language identification is never performed here; the filter only consumes
//! language tags already present on mentions or supplied through an external
//! per-mention tag file.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::annotations::{EntityMention, SentenceAnnotation};

#[derive(Debug, Error)]
pub enum LinkerError {
    #[error("gazetteer line {line}: {reason}")]
    BadGazetteerLine { line: usize, reason: String },
    #[error("gazetteer: surface form '{surface}' maps to both '{first}' and '{second}' (ambiguous forms are not supported)")]
    AmbiguousSurface {
        surface: String,
        first: String,
        second: String,
    },
    #[error("tag file {path}: {reason}")]
    TagFile { path: PathBuf, reason: String },
    #[error("tag alignment: {0}")]
    TagAlignment(String),
    #[error("configuration: {0}")]
    Configuration(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
struct GazetteerEntry {
    entity_id: String,
    category: Option<String>,
}

/// Surface-form lookup table mapping normalized spans to entity ids.
///
/// One entity id per surface form; ambiguous forms are rejected at load
/// time. Immutable after construction and shareable across threads.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, GazetteerEntry>,
    // Scan index: first normalized char -> surfaces (as char sequences)
    // sorted longest-first.
    by_first_char: HashMap<char, Vec<Vec<char>>>,
    case_fold: bool,
    collapse_whitespace: bool,
}

impl Gazetteer {
    pub fn new(case_fold: bool, collapse_whitespace: bool) -> Self {
        Gazetteer {
            case_fold,
            collapse_whitespace,
            ..Gazetteer::default()
        }
    }

    pub fn case_fold(&self) -> bool {
        self.case_fold
    }

    pub fn collapse_whitespace(&self) -> bool {
        self.collapse_whitespace
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds one surface form. The form is normalized under this gazetteer's
    /// policy and must be non-empty afterwards.
    pub fn add(
        &mut self,
        surface: &str,
        entity_id: &str,
        category: Option<&str>,
    ) -> Result<(), LinkerError> {
        let normalized: String = normalize_chars(surface, self.case_fold, self.collapse_whitespace)
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        let normalized = normalized.trim().to_string();
        if normalized.is_empty() {
            return Err(LinkerError::Configuration(format!(
                "surface form '{surface}' is empty after normalization"
            )));
        }
        if let Some(existing) = self.entries.get(&normalized) {
            if existing.entity_id != entity_id {
                return Err(LinkerError::AmbiguousSurface {
                    surface: normalized,
                    first: existing.entity_id.clone(),
                    second: entity_id.to_string(),
                });
            }
            return Ok(());
        }
        let chars: Vec<char> = normalized.chars().collect();
        let slot = self.by_first_char.entry(chars[0]).or_default();
        slot.push(chars);
        slot.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        self.entries.insert(
            normalized,
            GazetteerEntry {
                entity_id: entity_id.to_string(),
                category: category.map(|c| c.to_string()),
            },
        );
        Ok(())
    }

    /// Reads `surface<TAB>entity_id<TAB>category(optional)` lines. Blank
    /// lines are skipped.
    pub fn from_tsv<R: Read>(
        reader: R,
        case_fold: bool,
        collapse_whitespace: bool,
    ) -> Result<Self, LinkerError> {
        let mut gazetteer = Gazetteer::new(case_fold, collapse_whitespace);
        for (line_number, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let surface = fields.next().unwrap_or("");
            let entity_id = fields.next().ok_or_else(|| LinkerError::BadGazetteerLine {
                line: line_number + 1,
                reason: "expected surface<TAB>entity_id".to_string(),
            })?;
            if entity_id.is_empty() {
                return Err(LinkerError::BadGazetteerLine {
                    line: line_number + 1,
                    reason: "empty entity id".to_string(),
                });
            }
            let category = fields.next().filter(|c| !c.is_empty());
            gazetteer.add(surface, entity_id, category)?;
        }
        Ok(gazetteer)
    }

    pub fn from_tsv_file(
        path: &Path,
        case_fold: bool,
        collapse_whitespace: bool,
    ) -> Result<Self, LinkerError> {
        let file = File::open(path).map_err(|e| LinkerError::Configuration(format!(
            "cannot open gazetteer {}: {e}",
            path.display()
        )))?;
        Gazetteer::from_tsv(file, case_fold, collapse_whitespace)
    }
}

/// Normalizes text into a char sequence, keeping for every normalized char
/// the index (in Unicode scalar values) of the original char it came from.
fn normalize_chars(text: &str, case_fold: bool, collapse_whitespace: bool) -> Vec<(char, usize)> {
    let mut out: Vec<(char, usize)> = Vec::with_capacity(text.len());
    for (index, c) in text.chars().enumerate() {
        if collapse_whitespace && c.is_whitespace() {
            if matches!(out.last(), Some((' ', _))) {
                continue;
            }
            out.push((' ', index));
        } else if case_fold {
            for lower in c.to_lowercase() {
                out.push((lower, index));
            }
        } else {
            out.push((c, index));
        }
    }
    out
}

/// Finds gazetteer mentions in one sentence.
///
/// Greedy longest-match, left-to-right, non-overlapping; deterministic for
/// identical inputs. Returned spans are sorted by start and never overlap.
pub fn gazetteer_link(text: &str, gazetteer: &Gazetteer) -> Vec<EntityMention> {
    let normalized = normalize_chars(text, gazetteer.case_fold, gazetteer.collapse_whitespace);
    let chars: Vec<char> = normalized.iter().map(|&(c, _)| c).collect();
    let n = chars.len();
    let mut mentions = Vec::new();
    let mut pos = 0usize;
    while pos < n {
        // Matches must start on a word boundary.
        if pos > 0 && chars[pos - 1].is_alphanumeric() && chars[pos].is_alphanumeric() {
            pos += 1;
            continue;
        }
        let mut matched_len = 0usize;
        if let Some(candidates) = gazetteer.by_first_char.get(&chars[pos]) {
            for surface in candidates {
                let len = surface.len();
                if pos + len > n || chars[pos..pos + len] != surface[..] {
                    continue;
                }
                // ... and end on one.
                if pos + len < n
                    && chars[pos + len].is_alphanumeric()
                    && chars[pos + len - 1].is_alphanumeric()
                {
                    continue;
                }
                matched_len = len;
                break; // candidates are sorted longest-first
            }
        }
        if matched_len > 0 {
            let key: String = chars[pos..pos + matched_len].iter().collect();
            let entry = &gazetteer.entries[&key];
            let start = normalized[pos].1;
            let end = normalized[pos + matched_len - 1].1 + 1;
            let mut mention = EntityMention::new(entry.entity_id.clone(), start, end);
            mention.category = entry.category.clone();
            mentions.push(mention);
            pos += matched_len;
        } else {
            pos += 1;
        }
    }
    mentions
}

/// Annotates every sentence with [`gazetteer_link`], assigning sentence
/// indices by position.
pub fn annotate_corpus<S: AsRef<str>>(
    texts: &[S],
    gazetteer: &Gazetteer,
) -> Vec<SentenceAnnotation> {
    texts
        .iter()
        .enumerate()
        .map(|(index, text)| {
            SentenceAnnotation::new(index, gazetteer_link(text.as_ref(), gazetteer))
        })
        .collect()
}

/// Where candidate-mention language tags come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TagSource {
    /// Use the `lang` tag carried by each mention. With `require_tags`,
    /// untagged mentions are dropped; otherwise they pass.
    AnnotationField { require_tags: bool },
    /// No filtering; the default when mentions carry no language tags.
    AlwaysPass,
    /// Tags supplied by a JSON-lines file parallel to the annotation file,
    /// one array of language codes per sentence, aligned to mention order.
    ExternalTagFile(PathBuf),
}

/// Target-language filter for candidate mentions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageFilterSpec {
    pub target_lang: String,
    pub source: TagSource,
}

impl LanguageFilterSpec {
    pub fn always_pass() -> Self {
        LanguageFilterSpec {
            target_lang: String::new(),
            source: TagSource::AlwaysPass,
        }
    }

    pub fn annotation_field(target_lang: impl Into<String>, require_tags: bool) -> Self {
        LanguageFilterSpec {
            target_lang: target_lang.into(),
            source: TagSource::AnnotationField { require_tags },
        }
    }

    pub fn external_tags(target_lang: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        LanguageFilterSpec {
            target_lang: target_lang.into(),
            source: TagSource::ExternalTagFile(path.into()),
        }
    }

    /// Per-mention predicate over the tags a mention carries. For the
    /// external-tag-file source, tags must already have been applied with
    /// [`apply_external_tags`]; any still-untagged mention is dropped.
    pub fn keeps(&self, mention: &EntityMention) -> bool {
        match &self.source {
            TagSource::AlwaysPass => true,
            TagSource::AnnotationField { require_tags } => match &mention.mention_lang {
                Some(lang) => lang == &self.target_lang,
                None => !require_tags,
            },
            TagSource::ExternalTagFile(_) => {
                mention.mention_lang.as_deref() == Some(self.target_lang.as_str())
            }
        }
    }
}

/// Filters one sentence's mentions by language, preserving order.
///
/// The result is always a subsequence of the input. For the
/// external-tag-file source the file is loaded here and must hold exactly
/// one sentence line aligned to `mentions`; corpus-wide filtering should go
/// through [`apply_external_tags`] instead.
pub fn filter_mentions(
    mentions: &[EntityMention],
    spec: &LanguageFilterSpec,
) -> Result<Vec<EntityMention>, LinkerError> {
    match &spec.source {
        TagSource::AlwaysPass | TagSource::AnnotationField { .. } => {
            Ok(mentions.iter().filter(|m| spec.keeps(m)).cloned().collect())
        }
        TagSource::ExternalTagFile(path) => {
            let tags = load_tag_file(path)?;
            if tags.len() != 1 {
                return Err(LinkerError::TagAlignment(format!(
                    "tag file {} holds {} sentences; mention-level filtering expects exactly 1",
                    path.display(),
                    tags.len()
                )));
            }
            if tags[0].len() != mentions.len() {
                return Err(LinkerError::TagAlignment(format!(
                    "tag file {} has {} tags for {} mentions",
                    path.display(),
                    tags[0].len(),
                    mentions.len()
                )));
            }
            Ok(mentions
                .iter()
                .zip(&tags[0])
                .filter(|(_, tag)| *tag == &spec.target_lang)
                .map(|(m, _)| m.clone())
                .collect())
        }
    }
}

/// Loads a per-mention language tag file: JSON-lines, one array of language
/// codes per sentence.
pub fn load_tag_file(path: &Path) -> Result<Vec<Vec<String>>, LinkerError> {
    let file = File::open(path).map_err(|e| LinkerError::TagFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let mut tags = Vec::new();
    for (line_number, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let sentence_tags: Vec<String> =
            serde_json::from_str(&line).map_err(|e| LinkerError::TagFile {
                path: path.to_path_buf(),
                reason: format!("line {}: {e}", line_number + 1),
            })?;
        tags.push(sentence_tags);
    }
    Ok(tags)
}

/// Copies the annotations with `mention_lang` set from an external tag
/// list. Both the sentence count and each sentence's mention count must
/// align.
pub fn apply_external_tags(
    annotations: &[SentenceAnnotation],
    tags: &[Vec<String>],
) -> Result<Vec<SentenceAnnotation>, LinkerError> {
    if annotations.len() != tags.len() {
        return Err(LinkerError::TagAlignment(format!(
            "{} annotated sentences vs {} tag lines",
            annotations.len(),
            tags.len()
        )));
    }
    annotations
        .iter()
        .zip(tags)
        .map(|(annotation, sentence_tags)| {
            if annotation.mentions.len() != sentence_tags.len() {
                return Err(LinkerError::TagAlignment(format!(
                    "sentence {}: {} mentions vs {} tags",
                    annotation.sentence_index,
                    annotation.mentions.len(),
                    sentence_tags.len()
                )));
            }
            let mentions = annotation
                .mentions
                .iter()
                .zip(sentence_tags)
                .map(|(mention, tag)| {
                    let mut tagged = mention.clone();
                    tagged.mention_lang = Some(tag.clone());
                    tagged
                })
                .collect();
            Ok(SentenceAnnotation {
                sentence_index: annotation.sentence_index,
                mentions,
            })
        })
        .collect()
}
