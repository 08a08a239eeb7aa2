//! Python bindings for the KoBE evaluation toolkit.
//!
//! Exposes the annotation model, the scoring operations, the gazetteer
//! linker, and the meta-evaluation entry points as a `kobe_py` extension
//! module. Heavy lifting stays in the core crate; this layer only converts
//! types and errors.

use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use kobe_core::annotations as ann;
use kobe_core::linker;
use kobe_core::metaeval;
use kobe_core::reports;
use kobe_core::scoring;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_keys(keys: Option<&str>) -> PyResult<ann::KeyMap> {
    match keys {
        Some(spec) => ann::KeyMap::parse_overrides(spec).map_err(value_err),
        None => Ok(ann::KeyMap::default()),
    }
}

fn parse_mode(mode: &str) -> PyResult<scoring::ScoringMode> {
    match mode {
        "source-pivot" => Ok(scoring::ScoringMode::SourcePivot),
        "reference-pivot" => Ok(scoring::ScoringMode::ReferencePivot),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'source-pivot' or 'reference-pivot', got '{other}'"
        ))),
    }
}

fn parse_policy(policy: &str) -> PyResult<scoring::EcpCandidatePolicy> {
    match policy {
        "filtered" => Ok(scoring::EcpCandidatePolicy::Filtered),
        "unfiltered" => Ok(scoring::EcpCandidatePolicy::Unfiltered),
        other => Err(PyValueError::new_err(format!(
            "ecp_policy must be 'filtered' or 'unfiltered', got '{other}'"
        ))),
    }
}

/// One grounded span: KB entity id plus a character span (Unicode scalar
/// values, end-exclusive).
#[pyclass(name = "EntityMention", eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyEntityMention {
    inner: ann::EntityMention,
}

#[pymethods]
impl PyEntityMention {
    #[new]
    #[pyo3(signature = (entity_id, start, end, category=None, lang=None))]
    fn new(
        entity_id: String,
        start: usize,
        end: usize,
        category: Option<String>,
        lang: Option<String>,
    ) -> PyResult<Self> {
        if entity_id.is_empty() {
            return Err(PyValueError::new_err("entity_id must be non-empty"));
        }
        if start >= end {
            return Err(PyValueError::new_err(format!(
                "span [{start}, {end}) violates start < end"
            )));
        }
        Ok(PyEntityMention {
            inner: ann::EntityMention {
                entity_id,
                start,
                end,
                category,
                mention_lang: lang,
            },
        })
    }

    #[getter]
    fn entity_id(&self) -> &str {
        &self.inner.entity_id
    }

    #[getter]
    fn start(&self) -> usize {
        self.inner.start
    }

    #[getter]
    fn end(&self) -> usize {
        self.inner.end
    }

    #[getter]
    fn category(&self) -> Option<&str> {
        self.inner.category.as_deref()
    }

    #[getter]
    fn lang(&self) -> Option<&str> {
        self.inner.mention_lang.as_deref()
    }

    fn __repr__(&self) -> String {
        format!(
            "EntityMention({:?}, {}, {})",
            self.inner.entity_id, self.inner.start, self.inner.end
        )
    }
}

/// Ordered entity mentions for one sentence.
#[pyclass(name = "SentenceAnnotation", eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PySentenceAnnotation {
    inner: ann::SentenceAnnotation,
}

#[pymethods]
impl PySentenceAnnotation {
    #[new]
    #[pyo3(signature = (sentence_index, mentions=Vec::new()))]
    fn new(sentence_index: usize, mentions: Vec<PyEntityMention>) -> Self {
        PySentenceAnnotation {
            inner: ann::SentenceAnnotation::new(
                sentence_index,
                mentions.into_iter().map(|m| m.inner).collect(),
            ),
        }
    }

    #[getter]
    fn sentence_index(&self) -> usize {
        self.inner.sentence_index
    }

    #[getter]
    fn mentions(&self) -> Vec<PyEntityMention> {
        self.inner
            .mentions
            .iter()
            .map(|m| PyEntityMention { inner: m.clone() })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.mentions.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "SentenceAnnotation(index={}, mentions={})",
            self.inner.sentence_index,
            self.inner.mentions.len()
        )
    }
}

fn inner_annotations(annotations: &[PySentenceAnnotation]) -> Vec<ann::SentenceAnnotation> {
    annotations.iter().map(|a| a.inner.clone()).collect()
}

fn wrap_annotations(annotations: Vec<ann::SentenceAnnotation>) -> Vec<PySentenceAnnotation> {
    annotations
        .into_iter()
        .map(|inner| PySentenceAnnotation { inner })
        .collect()
}

/// Aligned source / reference / system annotation sets for one language
/// pair.
#[pyclass(name = "CorpusBundle")]
struct PyCorpusBundle {
    inner: ann::CorpusBundle,
}

#[pymethods]
impl PyCorpusBundle {
    #[new]
    #[pyo3(signature = (pair, source, systems, reference=None))]
    fn new(
        pair: &str,
        source: Vec<PySentenceAnnotation>,
        systems: HashMap<String, Vec<PySentenceAnnotation>>,
        reference: Option<Vec<PySentenceAnnotation>>,
    ) -> PyResult<Self> {
        let language_pair: ann::LanguagePair = pair.parse().map_err(value_err)?;
        if source.is_empty() {
            return Err(PyValueError::new_err("source must be non-empty"));
        }
        let mut names: Vec<&String> = systems.keys().collect();
        names.sort();
        let mut submissions = Vec::with_capacity(names.len());
        for name in names {
            let sentences = &systems[name];
            if sentences.len() != source.len() {
                return Err(PyValueError::new_err(format!(
                    "system '{name}' has {} sentences but source has {}",
                    sentences.len(),
                    source.len()
                )));
            }
            submissions.push(ann::SystemSubmission {
                system_name: name.clone(),
                language_pair: language_pair.clone(),
                sentences: inner_annotations(sentences),
            });
        }
        if let Some(reference) = &reference {
            if reference.len() != source.len() {
                return Err(PyValueError::new_err(format!(
                    "reference has {} sentences but source has {}",
                    reference.len(),
                    source.len()
                )));
            }
        }
        Ok(PyCorpusBundle {
            inner: ann::CorpusBundle {
                language_pair,
                source: inner_annotations(&source),
                reference: reference.as_deref().map(inner_annotations),
                systems: submissions,
            },
        })
    }

    #[getter]
    fn language_pair(&self) -> String {
        self.inner.language_pair.to_string()
    }

    #[getter]
    fn source(&self) -> Vec<PySentenceAnnotation> {
        wrap_annotations(self.inner.source.clone())
    }

    #[getter]
    fn reference(&self) -> Option<Vec<PySentenceAnnotation>> {
        self.inner.reference.clone().map(wrap_annotations)
    }

    fn system_names(&self) -> Vec<String> {
        self.inner.system_names()
    }

    fn system_sentences(&self, name: &str) -> PyResult<Vec<PySentenceAnnotation>> {
        self.inner
            .system(name)
            .map(|s| wrap_annotations(s.sentences.clone()))
            .ok_or_else(|| PyValueError::new_err(format!("unknown system '{name}'")))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "CorpusBundle(pair={}, sentences={}, systems={})",
            self.inner.language_pair,
            self.inner.len(),
            self.inner.systems.len()
        )
    }
}

/// Score and raw counts for one system over one corpus.
#[pyclass(name = "ScoreReport")]
struct PyScoreReport {
    inner: scoring::ScoreReport,
}

#[pymethods]
impl PyScoreReport {
    #[getter]
    fn recall(&self) -> f64 {
        self.inner.recall
    }

    #[getter]
    fn precision(&self) -> f64 {
        self.inner.precision
    }

    #[getter]
    fn ecp(&self) -> f64 {
        self.inner.ecp
    }

    #[getter]
    fn kobe(&self) -> f64 {
        self.inner.kobe
    }

    #[getter]
    fn source_entity_total(&self) -> u64 {
        self.inner.source_entity_total
    }

    #[getter]
    fn candidate_entity_total(&self) -> u64 {
        self.inner.candidate_entity_total
    }

    #[getter]
    fn match_total(&self) -> u64 {
        self.inner.match_total
    }

    #[getter]
    fn sentences_scored(&self) -> u64 {
        self.inner.sentences_scored
    }

    #[getter]
    fn sentences_without_source_entities(&self) -> u64 {
        self.inner.sentences_without_source_entities
    }

    /// Flat JSON object with fields in the declared order.
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let json = self.to_json()?;
        let module = py.import("json")?;
        module.call_method1("loads", (json,))
    }

    fn __repr__(&self) -> String {
        format!(
            "ScoreReport(kobe={:.6}, recall={:.6}, ecp={:.6}, matches={})",
            self.inner.kobe, self.inner.recall, self.inner.ecp, self.inner.match_total
        )
    }
}

/// Signed correlation of one metric with human DA on one language pair.
#[pyclass(name = "CorrelationReport")]
struct PyCorrelationReport {
    inner: metaeval::CorrelationReport,
}

#[pymethods]
impl PyCorrelationReport {
    #[getter]
    fn language_pair(&self) -> String {
        self.inner.language_pair.to_string()
    }

    #[getter]
    fn metric_name(&self) -> &str {
        &self.inner.metric_name
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    #[getter]
    fn n_systems(&self) -> usize {
        self.inner.n_systems
    }

    #[getter]
    fn sign_negative(&self) -> bool {
        self.inner.sign_negative
    }

    #[getter]
    fn n_dropped(&self) -> usize {
        self.inner.n_dropped
    }

    fn __repr__(&self) -> String {
        format!(
            "CorrelationReport({}, {}, r={:.4})",
            self.inner.language_pair, self.inner.metric_name, self.inner.r
        )
    }
}

/// Entity statistics over the source and reference sides of a bundle.
#[pyclass(name = "CorpusStats")]
struct PyCorpusStats {
    inner: reports::CorpusStatsRow,
}

#[pymethods]
impl PyCorpusStats {
    #[getter]
    fn language_pair(&self) -> &str {
        &self.inner.language_pair
    }

    #[getter]
    fn sentence_count(&self) -> usize {
        self.inner.sentence_count
    }

    #[getter]
    fn source_sentences_with_entities(&self) -> usize {
        self.inner.source_sentences_with_entities
    }

    #[getter]
    fn source_entity_total(&self) -> u64 {
        self.inner.source_entity_total
    }

    #[getter]
    fn reference_entity_total(&self) -> Option<u64> {
        self.inner.reference_entity_total
    }

    #[getter]
    fn source_distinct_entities(&self) -> usize {
        self.inner.source_distinct_entities
    }

    #[getter]
    fn reference_distinct_entities(&self) -> Option<usize> {
        self.inner.reference_distinct_entities
    }

    #[getter]
    fn common_distinct_entities(&self) -> Option<usize> {
        self.inner.common_distinct_entities
    }

    fn __repr__(&self) -> String {
        format!(
            "CorpusStats({}, sentences={}, source_entities={})",
            self.inner.language_pair, self.inner.sentence_count, self.inner.source_entity_total
        )
    }
}

/// Surface-form lookup table for the baseline entity linker.
#[pyclass(name = "Gazetteer")]
struct PyGazetteer {
    inner: linker::Gazetteer,
}

#[pymethods]
impl PyGazetteer {
    #[new]
    #[pyo3(signature = (case_fold=true, collapse_whitespace=true))]
    fn new(case_fold: bool, collapse_whitespace: bool) -> Self {
        PyGazetteer {
            inner: linker::Gazetteer::new(case_fold, collapse_whitespace),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (path, case_fold=true, collapse_whitespace=true))]
    fn from_tsv(path: PathBuf, case_fold: bool, collapse_whitespace: bool) -> PyResult<Self> {
        linker::Gazetteer::from_tsv_file(&path, case_fold, collapse_whitespace)
            .map(|inner| PyGazetteer { inner })
            .map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[pyo3(signature = (surface, entity_id, category=None))]
    fn add(&mut self, surface: &str, entity_id: &str, category: Option<&str>) -> PyResult<()> {
        self.inner.add(surface, entity_id, category).map_err(value_err)
    }

    /// Greedy longest-match, left-to-right, non-overlapping scan.
    fn link(&self, text: &str) -> Vec<PyEntityMention> {
        linker::gazetteer_link(text, &self.inner)
            .into_iter()
            .map(|inner| PyEntityMention { inner })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyfunction]
#[pyo3(signature = (text, keys=None))]
fn parse_annotation_text(text: &str, keys: Option<&str>) -> PyResult<Vec<PySentenceAnnotation>> {
    let keys = parse_keys(keys)?;
    ann::parse_annotations_with_keys(text.as_bytes(), &keys)
        .map(wrap_annotations)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (path, keys=None))]
fn parse_annotation_file(
    path: PathBuf,
    keys: Option<&str>,
) -> PyResult<Vec<PySentenceAnnotation>> {
    let keys = parse_keys(keys)?;
    ann::parse_annotation_file(&path, &keys)
        .map(wrap_annotations)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (root, pair, keys=None))]
fn load_corpus(root: PathBuf, pair: &str, keys: Option<&str>) -> PyResult<PyCorpusBundle> {
    let pair: ann::LanguagePair = pair.parse().map_err(value_err)?;
    let keys = parse_keys(keys)?;
    ann::load_corpus_with_keys(&root, &pair, &keys)
        .map(|inner| PyCorpusBundle { inner })
        .map_err(value_err)
}

/// Scores one system of a bundle.
///
/// `target_lang` switches on the candidate-side language filter
/// (annotation-field source); `require_tags` drops untagged mentions.
#[pyfunction]
#[pyo3(signature = (bundle, system, mode="source-pivot", target_lang=None, require_tags=false, ecp_policy="filtered"))]
fn kobe_score(
    bundle: &PyCorpusBundle,
    system: &str,
    mode: &str,
    target_lang: Option<&str>,
    require_tags: bool,
    ecp_policy: &str,
) -> PyResult<PyScoreReport> {
    let mode = parse_mode(mode)?;
    let policy = parse_policy(ecp_policy)?;
    let report = match target_lang {
        None => scoring::kobe_score(&bundle.inner, system, mode, None, policy),
        Some(target) => {
            let spec = linker::LanguageFilterSpec::annotation_field(target, require_tags);
            let keep = move |m: &ann::EntityMention| spec.keeps(m);
            scoring::kobe_score(&bundle.inner, system, mode, Some(&keep), policy)
        }
    }
    .map_err(value_err)?;
    Ok(PyScoreReport { inner: report })
}

/// Scores every system of a bundle, returning (system, report) pairs in the
/// bundle's system order.
#[pyfunction]
#[pyo3(signature = (bundle, mode="source-pivot", target_lang=None, require_tags=false, ecp_policy="filtered"))]
fn score_all(
    bundle: &PyCorpusBundle,
    mode: &str,
    target_lang: Option<&str>,
    require_tags: bool,
    ecp_policy: &str,
) -> PyResult<Vec<(String, PyScoreReport)>> {
    bundle
        .inner
        .system_names()
        .into_iter()
        .map(|name| {
            kobe_score(bundle, &name, mode, target_lang, require_tags, ecp_policy)
                .map(|report| (name, report))
        })
        .collect()
}

fn bag_from_dict(counts: HashMap<String, u64>) -> scoring::EntityBag {
    scoring::EntityBag::from_counts(counts)
}

/// Clipped multiset match count between two {entity_id: count} bags.
#[pyfunction]
fn match_count(a: HashMap<String, u64>, b: HashMap<String, u64>) -> u64 {
    scoring::match_count(&bag_from_dict(a), &bag_from_dict(b))
}

/// Corpus recall over (pivot, candidate) bag pairs.
#[pyfunction]
fn corpus_recall(pairs: Vec<(HashMap<String, u64>, HashMap<String, u64>)>) -> PyResult<f64> {
    let bags: Vec<_> = pairs
        .into_iter()
        .map(|(s, c)| (bag_from_dict(s), bag_from_dict(c)))
        .collect();
    scoring::corpus_recall(&bags).map_err(value_err)
}

/// Corpus precision over (pivot, candidate) bag pairs.
#[pyfunction]
fn corpus_precision(pairs: Vec<(HashMap<String, u64>, HashMap<String, u64>)>) -> PyResult<f64> {
    let bags: Vec<_> = pairs
        .into_iter()
        .map(|(s, c)| (bag_from_dict(s), bag_from_dict(c)))
        .collect();
    scoring::corpus_precision(&bags).map_err(value_err)
}

/// Entity count penalty for `candidate_total` candidate entities against
/// `pivot_total` pivot entities.
#[pyfunction]
fn entity_count_penalty(candidate_total: u64, pivot_total: u64) -> PyResult<f64> {
    scoring::entity_count_penalty(candidate_total, pivot_total).map_err(value_err)
}

/// Signed Pearson product-moment correlation.
#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    metaeval::pearson(&x, &y).map_err(value_err)
}

/// Entity statistics for a bundle's source and reference sides.
#[pyfunction]
fn corpus_stats(bundle: &PyCorpusBundle) -> PyCorpusStats {
    PyCorpusStats {
        inner: reports::corpus_stats(&bundle.inner),
    }
}

/// {entities_per_sentence: sentence_count} histogram.
#[pyfunction]
fn entities_per_sentence_histogram(
    annotations: Vec<PySentenceAnnotation>,
) -> std::collections::BTreeMap<usize, u64> {
    reports::entities_per_sentence_histogram(&inner_annotations(&annotations))
}

/// Copies annotations with mention languages taken from a parallel tag
/// list, one list of codes per sentence.
#[pyfunction]
fn apply_external_tags(
    annotations: Vec<PySentenceAnnotation>,
    tags: Vec<Vec<String>>,
) -> PyResult<Vec<PySentenceAnnotation>> {
    linker::apply_external_tags(&inner_annotations(&annotations), &tags)
        .map(wrap_annotations)
        .map_err(value_err)
}

/// Annotates sentences with a gazetteer, assigning indices by position.
#[pyfunction]
fn annotate_corpus(texts: Vec<String>, gazetteer: &PyGazetteer) -> Vec<PySentenceAnnotation> {
    wrap_annotations(linker::annotate_corpus(&texts, &gazetteer.inner))
}

/// Correlates one metric column of a WMT-style scores CSV with its DA
/// column, per language pair (or one requested pair).
#[pyfunction]
#[pyo3(signature = (path, metric, pair=None, lp_column="lp", system_column="system", da_column="DA", delimiter=","))]
#[allow(clippy::too_many_arguments)]
fn correlate_csv(
    path: PathBuf,
    metric: &str,
    pair: Option<&str>,
    lp_column: &str,
    system_column: &str,
    da_column: &str,
    delimiter: &str,
) -> PyResult<Vec<PyCorrelationReport>> {
    let delimiter = match delimiter.as_bytes() {
        [b] => *b,
        _ => {
            return Err(PyValueError::new_err(
                "delimiter must be a single ASCII character",
            ))
        }
    };
    let config = metaeval::CsvConfig {
        delimiter,
        lp_column: lp_column.to_string(),
        system_column: system_column.to_string(),
        da_column: da_column.to_string(),
    };
    let file = std::fs::File::open(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let tables = metaeval::read_score_tables(file, &config).map_err(value_err)?;
    let wanted: Option<ann::LanguagePair> = match pair {
        Some(p) => Some(p.parse().map_err(value_err)?),
        None => None,
    };
    let mut out = Vec::new();
    for table in &tables {
        if let Some(wanted) = &wanted {
            if &table.language_pair != wanted {
                continue;
            }
        }
        match metaeval::correlate_systems(table, metric) {
            Ok(inner) => out.push(PyCorrelationReport { inner }),
            Err(metaeval::MetaEvalError::TooFewSystems { .. }) if wanted.is_none() => {}
            Err(e) => return Err(value_err(e)),
        }
    }
    Ok(out)
}

#[pymodule]
fn kobe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyEntityMention>()?;
    m.add_class::<PySentenceAnnotation>()?;
    m.add_class::<PyCorpusBundle>()?;
    m.add_class::<PyScoreReport>()?;
    m.add_class::<PyCorrelationReport>()?;
    m.add_class::<PyCorpusStats>()?;
    m.add_class::<PyGazetteer>()?;
    m.add_function(wrap_pyfunction!(parse_annotation_text, m)?)?;
    m.add_function(wrap_pyfunction!(parse_annotation_file, m)?)?;
    m.add_function(wrap_pyfunction!(load_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(kobe_score, m)?)?;
    m.add_function(wrap_pyfunction!(score_all, m)?)?;
    m.add_function(wrap_pyfunction!(match_count, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_recall, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_precision, m)?)?;
    m.add_function(wrap_pyfunction!(entity_count_penalty, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_stats, m)?)?;
    m.add_function(wrap_pyfunction!(entities_per_sentence_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(apply_external_tags, m)?)?;
    m.add_function(wrap_pyfunction!(annotate_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(correlate_csv, m)?)?;
    Ok(())
}
