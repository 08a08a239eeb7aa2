//! Annotation data model and on-disk formats.
//!
//! Annotations live in UTF-8 JSON files, either one JSON object per line or a
//! single JSON array of objects. Each object describes one sentence and holds
//! a list of entity mentions; the canonical keys are `mentions`, `id`,
//! `start`, `end`, and the optional `category` and `lang`. Files whose key
//! names differ can be read through a [`KeyMap`].
//!
//! A corpus for one language pair is a directory tree:
//!
//! ```text
//! <root>/<src>-<tgt>/source.jsonl
//! <root>/<src>-<tgt>/reference.jsonl      (optional)
//! <root>/<src>-<tgt>/systems/<name>.jsonl (one file per MT system)
//! ```
//!
//! Character offsets are counted in Unicode scalar values, 0-based, with an
//! exclusive end.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// One grounded span: a knowledge-base entity id plus its character span.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityMention {
    /// Opaque knowledge-base identifier, e.g. `/m/02j71`. Never empty.
    pub entity_id: String,
    /// Start offset in Unicode scalar values, inclusive.
    pub start: usize,
    /// End offset in Unicode scalar values, exclusive. Greater than `start`.
    pub end: usize,
    /// Optional category label from KB metadata.
    pub category: Option<String>,
    /// Optional language code of the mention surface form.
    pub mention_lang: Option<String>,
}

impl EntityMention {
    pub fn new(entity_id: impl Into<String>, start: usize, end: usize) -> Self {
        EntityMention {
            entity_id: entity_id.into(),
            start,
            end,
            category: None,
            mention_lang: None,
        }
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.mention_lang = Some(lang.into());
        self
    }

    pub fn with_category(mut self, category: impl Into<String>) -> Self {
        self.category = Some(category.into());
        self
    }
}

/// Ordered entity mentions for one sentence of one text side.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SentenceAnnotation {
    /// 0-based position of the sentence in its corpus side.
    pub sentence_index: usize,
    /// Mentions sorted by start offset.
    pub mentions: Vec<EntityMention>,
}

impl SentenceAnnotation {
    pub fn new(sentence_index: usize, mut mentions: Vec<EntityMention>) -> Self {
        mentions.sort_by_key(|m| (m.start, m.end));
        SentenceAnnotation {
            sentence_index,
            mentions,
        }
    }
}

/// A source/target language-code pair such as `de-en`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguagePair {
    pub source: String,
    pub target: String,
}

impl LanguagePair {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        LanguagePair {
            source: source.into(),
            target: target.into(),
        }
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.source, self.target)
    }
}

impl FromStr for LanguagePair {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('-') {
            Some((src, tgt)) if !src.is_empty() && !tgt.is_empty() => {
                Ok(LanguagePair::new(src, tgt))
            }
            _ => Err(AnnotationError::BadLanguagePair(s.to_string())),
        }
    }
}

impl Serialize for LanguagePair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LanguagePair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One MT system's candidate annotations for a language pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSubmission {
    pub system_name: String,
    pub language_pair: LanguagePair,
    pub sentences: Vec<SentenceAnnotation>,
}

/// Aligned source / reference / system annotation sets for one language pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusBundle {
    pub language_pair: LanguagePair,
    pub source: Vec<SentenceAnnotation>,
    pub reference: Option<Vec<SentenceAnnotation>>,
    pub systems: Vec<SystemSubmission>,
}

impl CorpusBundle {
    /// Number of aligned sentences.
    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn system(&self, name: &str) -> Option<&SystemSubmission> {
        self.systems.iter().find(|s| s.system_name == name)
    }

    pub fn system_names(&self) -> Vec<String> {
        self.systems.iter().map(|s| s.system_name.clone()).collect()
    }
}

/// Maps the canonical annotation keys onto the key names actually present in
/// a file, for data releases that use different field names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMap {
    pub mentions: String,
    pub entity_id: String,
    pub start: String,
    pub end: String,
    pub category: String,
    pub lang: String,
}

impl Default for KeyMap {
    fn default() -> Self {
        KeyMap {
            mentions: "mentions".to_string(),
            entity_id: "id".to_string(),
            start: "start".to_string(),
            end: "end".to_string(),
            category: "category".to_string(),
            lang: "lang".to_string(),
        }
    }
}

impl KeyMap {
    /// Parses `canonical=actual` overrides separated by commas, e.g.
    /// `mentions=entities,id=mid`. Unmentioned keys keep their canonical name.
    pub fn parse_overrides(spec: &str) -> Result<Self, AnnotationError> {
        let mut keys = KeyMap::default();
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (canonical, actual) = part
                .split_once('=')
                .ok_or_else(|| AnnotationError::BadKeyMap(part.to_string()))?;
            let actual = actual.trim().to_string();
            if actual.is_empty() {
                return Err(AnnotationError::BadKeyMap(part.to_string()));
            }
            match canonical.trim() {
                "mentions" => keys.mentions = actual,
                "id" => keys.entity_id = actual,
                "start" => keys.start = actual,
                "end" => keys.end = actual,
                "category" => keys.category = actual,
                "lang" => keys.lang = actual,
                other => return Err(AnnotationError::BadKeyMap(other.to_string())),
            }
        }
        Ok(keys)
    }
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<AnnotationError>,
    },
    #[error("line {line}: malformed JSON: {message}")]
    MalformedJson { line: usize, message: String },
    #[error("line {line}: sentence record must be a JSON object or array")]
    NotAnObject { line: usize },
    #[error("line {line}: missing mention list key '{key}'")]
    MissingMentions { line: usize, key: String },
    #[error("sentence {sentence}, mention {mention}: {reason}")]
    InvalidMention {
        sentence: usize,
        mention: usize,
        reason: String,
    },
    #[error("invalid language pair '{0}' (expected <src>-<tgt>)")]
    BadLanguagePair(String),
    #[error("invalid key mapping '{0}' (expected canonical=actual with canonical one of mentions,id,start,end,category,lang)")]
    BadKeyMap(String),
    #[error("missing source annotations: {0}")]
    MissingSource(PathBuf),
    #[error("corpus for {pair} is empty")]
    EmptyCorpus { pair: LanguagePair },
    #[error("{side} has {actual} sentences but source has {expected}")]
    LengthMismatch {
        side: String,
        actual: usize,
        expected: usize,
    },
    #[error("duplicate system name '{0}'")]
    DuplicateSystem(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AnnotationError {
    fn in_file(self, path: &Path) -> AnnotationError {
        AnnotationError::InFile {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }
}

/// Parses an annotation stream with the canonical key names.
///
/// Accepts both JSON-lines (one object per line) and a single JSON array.
pub fn parse_annotations<R: Read>(reader: R) -> Result<Vec<SentenceAnnotation>, AnnotationError> {
    parse_annotations_with_keys(reader, &KeyMap::default())
}

/// Parses an annotation stream, resolving field names through `keys`.
///
/// Sentence indices are assigned by position; mentions are re-sorted by start
/// offset. Unknown fields are ignored. Offsets that are negative or violate
/// `start < end` are hard errors naming the sentence and mention.
pub fn parse_annotations_with_keys<R: Read>(
    mut reader: R,
    keys: &KeyMap,
) -> Result<Vec<SentenceAnnotation>, AnnotationError> {
    let mut content = String::new();
    reader.read_to_string(&mut content)?;

    if content.trim_start().starts_with('[') {
        let values: Vec<Value> =
            serde_json::from_str(&content).map_err(|e| AnnotationError::MalformedJson {
                line: e.line(),
                message: e.to_string(),
            })?;
        values
            .iter()
            .enumerate()
            .map(|(index, value)| sentence_from_value(value, index, index + 1, keys))
            .collect()
    } else {
        let mut annotations = Vec::new();
        for (line_number, line) in content.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let value: Value =
                serde_json::from_str(trimmed).map_err(|e| AnnotationError::MalformedJson {
                    line: line_number + 1,
                    message: e.to_string(),
                })?;
            let index = annotations.len();
            annotations.push(sentence_from_value(&value, index, line_number + 1, keys)?);
        }
        Ok(annotations)
    }
}

/// Parses one annotation file from disk, attaching the path to any error.
pub fn parse_annotation_file(
    path: &Path,
    keys: &KeyMap,
) -> Result<Vec<SentenceAnnotation>, AnnotationError> {
    let file = File::open(path).map_err(|e| AnnotationError::from(e).in_file(path))?;
    parse_annotations_with_keys(BufReader::new(file), keys).map_err(|e| e.in_file(path))
}

fn sentence_from_value(
    value: &Value,
    sentence_index: usize,
    line: usize,
    keys: &KeyMap,
) -> Result<SentenceAnnotation, AnnotationError> {
    // A bare array is taken as the mention list itself.
    let mention_values = match value {
        Value::Array(items) => items.as_slice(),
        Value::Object(map) => match map.get(&keys.mentions) {
            Some(Value::Array(items)) => items.as_slice(),
            Some(_) | None => {
                return Err(AnnotationError::MissingMentions {
                    line,
                    key: keys.mentions.clone(),
                })
            }
        },
        _ => return Err(AnnotationError::NotAnObject { line }),
    };

    let mentions = mention_values
        .iter()
        .enumerate()
        .map(|(pos, m)| mention_from_value(m, sentence_index, pos, keys))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SentenceAnnotation::new(sentence_index, mentions))
}

fn mention_from_value(
    value: &Value,
    sentence: usize,
    mention: usize,
    keys: &KeyMap,
) -> Result<EntityMention, AnnotationError> {
    let invalid = |reason: String| AnnotationError::InvalidMention {
        sentence,
        mention,
        reason,
    };

    let map = value
        .as_object()
        .ok_or_else(|| invalid("mention is not a JSON object".to_string()))?;

    let entity_id = map
        .get(&keys.entity_id)
        .and_then(Value::as_str)
        .ok_or_else(|| invalid(format!("missing or non-string '{}'", keys.entity_id)))?;
    if entity_id.is_empty() {
        return Err(invalid("empty entity id".to_string()));
    }

    let offset = |key: &str| -> Result<i64, AnnotationError> {
        map.get(key)
            .and_then(Value::as_i64)
            .ok_or_else(|| invalid(format!("missing or non-integer '{key}'")))
    };
    let start = offset(&keys.start)?;
    let end = offset(&keys.end)?;
    if start < 0 || end < 0 {
        return Err(invalid(format!("negative span [{start}, {end})")));
    }
    if start >= end {
        return Err(invalid(format!(
            "span [{start}, {end}) violates start < end"
        )));
    }

    let opt_str = |key: &str| {
        map.get(key)
            .and_then(Value::as_str)
            .map(|s| s.to_string())
    };

    Ok(EntityMention {
        entity_id: entity_id.to_string(),
        start: start as usize,
        end: end as usize,
        category: opt_str(&keys.category),
        mention_lang: opt_str(&keys.lang),
    })
}

/// Serializes annotations to JSON-lines with the canonical key names.
///
/// The output parses back to an identical structure.
pub fn write_annotations<W: Write>(
    mut writer: W,
    annotations: &[SentenceAnnotation],
) -> Result<(), AnnotationError> {
    for annotation in annotations {
        let mentions: Vec<Value> = annotation
            .mentions
            .iter()
            .map(|m| {
                let mut obj = serde_json::Map::new();
                obj.insert("id".to_string(), Value::from(m.entity_id.as_str()));
                obj.insert("start".to_string(), Value::from(m.start as u64));
                obj.insert("end".to_string(), Value::from(m.end as u64));
                if let Some(category) = &m.category {
                    obj.insert("category".to_string(), Value::from(category.as_str()));
                }
                if let Some(lang) = &m.mention_lang {
                    obj.insert("lang".to_string(), Value::from(lang.as_str()));
                }
                Value::Object(obj)
            })
            .collect();
        let mut line = serde_json::Map::new();
        line.insert("mentions".to_string(), Value::Array(mentions));
        serde_json::to_writer(&mut writer, &Value::Object(line))
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

const ANNOTATION_EXTENSIONS: [&str; 2] = ["jsonl", "json"];

fn find_side_file(dir: &Path, stem: &str) -> Option<PathBuf> {
    ANNOTATION_EXTENSIONS
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
}

/// Loads the corpus bundle for one language pair from a WMT-style directory.
///
/// Systems are discovered from `systems/*.jsonl` (or `.json`) by filename and
/// ordered lexicographically, so two loads of the same tree yield equal
/// bundles. Every side must align with the source sentence count.
pub fn load_corpus(root: &Path, pair: &LanguagePair) -> Result<CorpusBundle, AnnotationError> {
    load_corpus_with_keys(root, pair, &KeyMap::default())
}

pub fn load_corpus_with_keys(
    root: &Path,
    pair: &LanguagePair,
    keys: &KeyMap,
) -> Result<CorpusBundle, AnnotationError> {
    let dir = root.join(pair.to_string());

    let source_path = find_side_file(&dir, "source")
        .ok_or_else(|| AnnotationError::MissingSource(dir.join("source.jsonl")))?;
    let source = parse_annotation_file(&source_path, keys)?;
    if source.is_empty() {
        return Err(AnnotationError::EmptyCorpus { pair: pair.clone() });
    }

    let reference = match find_side_file(&dir, "reference") {
        Some(path) => {
            let annotations = parse_annotation_file(&path, keys)?;
            if annotations.len() != source.len() {
                return Err(AnnotationError::LengthMismatch {
                    side: "reference".to_string(),
                    actual: annotations.len(),
                    expected: source.len(),
                });
            }
            Some(annotations)
        }
        None => None,
    };

    let systems_dir = dir.join("systems");
    let mut system_files: Vec<(String, PathBuf)> = Vec::new();
    if systems_dir.is_dir() {
        for entry in std::fs::read_dir(&systems_dir)? {
            let path = entry?.path();
            if !path.is_file() {
                continue;
            }
            let Some(name) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if name.starts_with('.') {
                continue;
            }
            system_files.push((name.to_string(), path));
        }
    }
    system_files.sort();

    let mut systems = Vec::with_capacity(system_files.len());
    let mut seen = BTreeSet::new();
    for (name, path) in system_files {
        if !seen.insert(name.clone()) {
            return Err(AnnotationError::DuplicateSystem(name));
        }
        let sentences = parse_annotation_file(&path, keys)?;
        if sentences.len() != source.len() {
            return Err(AnnotationError::LengthMismatch {
                side: format!("system '{name}'"),
                actual: sentences.len(),
                expected: source.len(),
            });
        }
        systems.push(SystemSubmission {
            system_name: name,
            language_pair: pair.clone(),
            sentences,
        });
    }

    Ok(CorpusBundle {
        language_pair: pair.clone(),
        source,
        reference,
        systems,
    })
}

/// Lists the language pairs present under a corpus root, sorted.
pub fn discover_pairs(root: &Path) -> Result<Vec<LanguagePair>, AnnotationError> {
    let mut pairs = Vec::new();
    for entry in std::fs::read_dir(root)? {
        let path = entry?.path();
        if !path.is_dir() {
            continue;
        }
        let Some(name) = path.file_name().and_then(|s| s.to_str()) else {
            continue;
        };
        if let Ok(pair) = name.parse::<LanguagePair>() {
            if find_side_file(&path, "source").is_some() {
                pairs.push(pair);
            }
        }
    }
    pairs.sort();
    Ok(pairs)
}

/// What [`validate`] found wrong with one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    /// `start == end`.
    DegenerateSpan { mention: usize },
    /// `start > end`.
    InvertedSpan { mention: usize },
    /// Two mention spans overlap (the upstream linker is opaque, so this is a
    /// warning rather than an error).
    OverlappingSpans { first: usize, second: usize },
    EmptyEntityId { mention: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub side: String,
    pub sentence_index: usize,
    #[serde(flatten)]
    pub kind: IssueKind,
}

/// Per-side mention totals gathered during validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideSummary {
    pub side: String,
    pub sentence_count: usize,
    pub sentences_with_entities: usize,
    pub mention_total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    pub sides: Vec<SideSummary>,
}

/// Checks a bundle for span anomalies and tallies per-side mention counts.
///
/// Reports rather than throws: a clean bundle yields an empty issue list.
pub fn validate(bundle: &CorpusBundle) -> ValidationReport {
    let mut report = ValidationReport::default();
    validate_side("source", &bundle.source, &mut report);
    if let Some(reference) = &bundle.reference {
        validate_side("reference", reference, &mut report);
    }
    for system in &bundle.systems {
        validate_side(
            &format!("system:{}", system.system_name),
            &system.sentences,
            &mut report,
        );
    }
    report
}

fn validate_side(side: &str, annotations: &[SentenceAnnotation], report: &mut ValidationReport) {
    let mut with_entities = 0usize;
    let mut mention_total = 0u64;
    for annotation in annotations {
        if !annotation.mentions.is_empty() {
            with_entities += 1;
        }
        mention_total += annotation.mentions.len() as u64;
        let issue = |kind: IssueKind| ValidationIssue {
            side: side.to_string(),
            sentence_index: annotation.sentence_index,
            kind,
        };
        for (pos, mention) in annotation.mentions.iter().enumerate() {
            if mention.entity_id.is_empty() {
                report.issues.push(issue(IssueKind::EmptyEntityId { mention: pos }));
            }
            if mention.start == mention.end {
                report.issues.push(issue(IssueKind::DegenerateSpan { mention: pos }));
            } else if mention.start > mention.end {
                report.issues.push(issue(IssueKind::InvertedSpan { mention: pos }));
            }
        }
        for pos in 1..annotation.mentions.len() {
            let prev = &annotation.mentions[pos - 1];
            let curr = &annotation.mentions[pos];
            if curr.start < prev.end.max(prev.start) {
                report.issues.push(issue(IssueKind::OverlappingSpans {
                    first: pos - 1,
                    second: pos,
                }));
            }
        }
    }
    report.sides.push(SideSummary {
        side: side.to_string(),
        sentence_count: annotations.len(),
        sentences_with_entities: with_entities,
        mention_total,
    });
}
