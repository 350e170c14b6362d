//! Corpus data model: loading, cleaning, deduplication, and length statistics.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, RecordError, Result};
use crate::state::UsState;
use crate::text::{clean_text, CleanMode};

/// Who published a Q&A record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contributor {
    Official,
    NonProfit,
}

impl Contributor {
    fn parse(raw: &str) -> Option<Contributor> {
        let t = raw.trim();
        if t.eq_ignore_ascii_case("official") {
            Some(Contributor::Official)
        } else if t.eq_ignore_ascii_case("non_profit")
            || t.eq_ignore_ascii_case("non-profit")
            || t.eq_ignore_ascii_case("nonprofit")
        {
            Some(Contributor::NonProfit)
        } else {
            None
        }
    }
}

/// One cleaned Q&A record with its metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaqEntry {
    pub state: UsState,
    pub contributor: Contributor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub question: String,
    pub answer: String,
}

/// Which text of an entry an analysis reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    #[serde(alias = "question")]
    Q,
    #[serde(alias = "answer")]
    A,
    #[serde(alias = "question_answer")]
    QA,
}

impl Scope {
    /// The entry text this scope selects; Q+A concatenates with one space.
    pub fn text_of(self, entry: &FaqEntry) -> String {
        match self {
            Scope::Q => entry.question.clone(),
            Scope::A => entry.answer.clone(),
            Scope::QA => format!("{} {}", entry.question, entry.answer),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scope::Q => "q",
            Scope::A => "a",
            Scope::QA => "qa",
        }
    }
}

/// The immutable analyzed corpus: entries in load order plus a state index.
#[derive(Debug, Clone, PartialEq)]
pub struct FaqCorpus {
    entries: Vec<FaqEntry>,
    state_index: BTreeMap<UsState, Vec<usize>>,
}

impl FaqCorpus {
    pub fn from_entries(entries: Vec<FaqEntry>) -> FaqCorpus {
        let mut state_index: BTreeMap<UsState, Vec<usize>> = BTreeMap::new();
        for (i, entry) in entries.iter().enumerate() {
            state_index.entry(entry.state).or_default().push(i);
        }
        FaqCorpus {
            entries,
            state_index,
        }
    }

    pub fn entries(&self) -> &[FaqEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// States present, in code order.
    pub fn states(&self) -> impl Iterator<Item = UsState> + '_ {
        self.state_index.keys().copied()
    }

    /// Indices of a state's entries in load order.
    pub fn state_entries(&self, state: UsState) -> &[usize] {
        self.state_index
            .get(&state)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn state_index(&self) -> &BTreeMap<UsState, Vec<usize>> {
        &self.state_index
    }

    /// Canonical form: entries sorted by state code, preserving load order
    /// within each state.
    pub fn canonicalized(&self) -> FaqCorpus {
        let mut entries = Vec::with_capacity(self.entries.len());
        for indices in self.state_index.values() {
            entries.extend(indices.iter().map(|&i| self.entries[i].clone()));
        }
        FaqCorpus::from_entries(entries)
    }
}

/// Shape of the input JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSchema {
    /// Detect from the JSON root: array means [`FlatArray`], object means
    /// [`StateMap`].
    #[default]
    Auto,
    /// A JSON array of records, each carrying its own `state`.
    FlatArray,
    /// A JSON object mapping state name/code to an array of records.
    StateMap,
}

/// Load, validate, and clean a corpus file.
///
/// Records require `question` and `answer` (and `state` in flat form);
/// `contributor`, `source`, and `timestamp` are optional. Load order is
/// preserved; in map form the records are read in key order of the map as
/// written in the file.
pub fn load_corpus(path: &Path, schema: InputSchema) -> Result<FaqCorpus> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&raw, schema)
}

/// Parse a corpus from in-memory JSON. See [`load_corpus`].
pub fn parse_corpus(raw: &str, schema: InputSchema) -> Result<FaqCorpus> {
    let root: Value = serde_json::from_str(raw).map_err(|e| parse_error(raw, &e))?;
    let mut entries = Vec::new();
    let mut index = 0usize;
    match (schema, &root) {
        (InputSchema::FlatArray | InputSchema::Auto, Value::Array(records)) => {
            for record in records {
                entries.push(parse_record(record, index, None)?);
                index += 1;
            }
        }
        (InputSchema::StateMap | InputSchema::Auto, Value::Object(map)) => {
            for (key, value) in map {
                let state = UsState::resolve(key)
                    .ok_or_else(|| record_error(index, RecordError::UnknownState(key.clone())))?;
                let records = value.as_array().ok_or_else(|| {
                    record_error(
                        index,
                        RecordError::WrongType {
                            field: "state entry",
                            expected: "an array of records",
                        },
                    )
                })?;
                for record in records {
                    entries.push(parse_record(record, index, Some(state))?);
                    index += 1;
                }
            }
        }
        _ => {
            return Err(Error::Parse {
                offset: 0,
                line: 1,
                column: 1,
                message: format!(
                    "expected {}",
                    match schema {
                        InputSchema::FlatArray => "a JSON array of records",
                        InputSchema::StateMap => "a JSON object of state -> records",
                        InputSchema::Auto => "a JSON array or object at the root",
                    }
                ),
            })
        }
    }
    Ok(FaqCorpus::from_entries(entries))
}

fn parse_error(raw: &str, e: &serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let offset = raw
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + column.saturating_sub(1);
    Error::Parse {
        offset,
        line,
        column,
        message: e.to_string(),
    }
}

fn record_error(index: usize, reason: RecordError) -> Error {
    Error::Record { index, reason }
}

fn parse_record(record: &Value, index: usize, map_state: Option<UsState>) -> Result<FaqEntry> {
    let obj = match record {
        Value::Object(obj) => obj,
        _ => {
            return Err(record_error(
                index,
                RecordError::WrongType {
                    field: "record",
                    expected: "a JSON object",
                },
            ))
        }
    };
    let text_field = |field: &'static str| -> Result<String> {
        match obj.get(field) {
            None | Some(Value::Null) => Err(record_error(index, RecordError::MissingField(field))),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(record_error(
                index,
                RecordError::WrongType {
                    field,
                    expected: "a string",
                },
            )),
        }
    };
    let optional_text = |field: &'static str| -> Result<Option<String>> {
        match obj.get(field) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(record_error(
                index,
                RecordError::WrongType {
                    field,
                    expected: "a string",
                },
            )),
        }
    };

    let state = match (optional_text("state")?, map_state) {
        (Some(raw), mapped) => {
            let state = UsState::resolve(&raw)
                .ok_or_else(|| record_error(index, RecordError::UnknownState(raw.clone())))?;
            if let Some(expected) = mapped {
                if state != expected {
                    return Err(record_error(
                        index,
                        RecordError::StateMismatch {
                            found: raw,
                            expected: expected.code().to_string(),
                        },
                    ));
                }
            }
            state
        }
        (None, Some(mapped)) => mapped,
        (None, None) => return Err(record_error(index, RecordError::MissingField("state"))),
    };

    let contributor = match optional_text("contributor")? {
        Some(raw) => Contributor::parse(&raw)
            .ok_or_else(|| record_error(index, RecordError::UnknownContributor(raw)))?,
        None => Contributor::NonProfit,
    };

    let timestamp = optional_text("timestamp")?;
    if let Some(ts) = &timestamp {
        if chrono::NaiveDateTime::parse_from_str(ts, "%Y-%m-%d %H:%M:%S").is_err() {
            return Err(record_error(index, RecordError::BadTimestamp(ts.clone())));
        }
    }

    let question = clean_text(&text_field("question")?, CleanMode::PreserveDomainTerms);
    if question.is_empty() {
        return Err(record_error(
            index,
            RecordError::EmptyAfterCleaning("question"),
        ));
    }
    let answer = clean_text(&text_field("answer")?, CleanMode::PreserveDomainTerms);
    if answer.is_empty() {
        return Err(record_error(
            index,
            RecordError::EmptyAfterCleaning("answer"),
        ));
    }

    Ok(FaqEntry {
        state,
        contributor,
        source: optional_text("source")?
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty()),
        timestamp,
        question,
        answer,
    })
}

/// Ratcliff/Obershelp gestalt similarity of two strings: `2M / (|a| + |b|)`
/// over characters, where `M` sums the lengths of recursively found longest
/// matching blocks. Ties prefer the earliest block in `a`, then in `b`. No
/// junk or autojunk heuristics are applied. Both sides empty gives 1.0.
pub fn similarity_ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    let matched = total_match_len(&a, &b);
    2.0 * matched as f64 / total as f64
}

/// Upper bound on [`similarity_ratio`] from character multisets alone.
/// Matching blocks are disjoint in both strings, so the total matched length
/// cannot exceed the multiset intersection.
pub fn similarity_upper_bound(a: &str, b: &str) -> f64 {
    let a_len = a.chars().count();
    let b_len = b.chars().count();
    if a_len + b_len == 0 {
        return 1.0;
    }
    let mut counts: HashMap<char, (usize, usize)> = HashMap::new();
    for c in a.chars() {
        counts.entry(c).or_default().0 += 1;
    }
    for c in b.chars() {
        counts.entry(c).or_default().1 += 1;
    }
    let common: usize = counts.values().map(|&(x, y)| x.min(y)).sum();
    2.0 * common as f64 / (a_len + b_len) as f64
}

fn total_match_len(a: &[char], b: &[char]) -> usize {
    // positions of each char in b, for the inner matching loop
    let mut b_positions: HashMap<char, Vec<usize>> = HashMap::new();
    for (j, &c) in b.iter().enumerate() {
        b_positions.entry(c).or_default().push(j);
    }
    let mut total = 0;
    let mut queue = vec![(0usize, a.len(), 0usize, b.len())];
    while let Some((alo, ahi, blo, bhi)) = queue.pop() {
        if alo >= ahi || blo >= bhi {
            continue;
        }
        let (bi, bj, size) = longest_match(a, &b_positions, alo, ahi, blo, bhi);
        if size == 0 {
            continue;
        }
        total += size;
        queue.push((alo, bi, blo, bj));
        queue.push((bi + size, ahi, bj + size, bhi));
    }
    total
}

fn longest_match(
    a: &[char],
    b_positions: &HashMap<char, Vec<usize>>,
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
) -> (usize, usize, usize) {
    let (mut best_i, mut best_j, mut best_size) = (alo, blo, 0usize);
    // j2len[j] = length of the match ending at a[i], b[j]
    let mut j2len: HashMap<usize, usize> = HashMap::new();
    for (i, ch) in a.iter().enumerate().take(ahi).skip(alo) {
        let mut new_j2len: HashMap<usize, usize> = HashMap::new();
        if let Some(positions) = b_positions.get(ch) {
            for &j in positions {
                if j < blo {
                    continue;
                }
                if j >= bhi {
                    break;
                }
                let k = if j > 0 {
                    j2len.get(&(j - 1)).copied().unwrap_or(0) + 1
                } else {
                    1
                };
                new_j2len.insert(j, k);
                if k > best_size {
                    best_i = i + 1 - k;
                    best_j = j + 1 - k;
                    best_size = k;
                }
            }
        }
        j2len = new_j2len;
    }
    (best_i, best_j, best_size)
}

/// One dedup drop: the retained entry, the dropped entry, and their ratio.
/// Indices refer to the corpus the dedup ran over, in its load order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Removal {
    pub state: UsState,
    pub kept_index: usize,
    pub dropped_index: usize,
    pub ratio: f64,
}

/// Remove near-duplicate entries within each state.
///
/// Scanning in load order, an entry is dropped when the gestalt ratio of its
/// `question answer` concatenation against any retained earlier entry of the
/// same state reaches `threshold`. Comparisons run as (earlier, later); the
/// ratio is not symmetrized. States are processed independently.
pub fn dedup_entries(corpus: &FaqCorpus, threshold: f64) -> Result<(FaqCorpus, Vec<Removal>)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "dedup threshold",
            message: format!("must be in (0, 1], got {threshold}"),
        });
    }

    let combined: Vec<String> = corpus
        .entries
        .iter()
        .map(|e| format!("{} {}", e.question, e.answer))
        .collect();

    let mut per_state: Vec<(Vec<usize>, Vec<Removal>)> = corpus
        .state_index
        .par_iter()
        .map(|(&state, indices)| {
            let mut kept: Vec<usize> = Vec::with_capacity(indices.len());
            let mut removals = Vec::new();
            'candidates: for &i in indices {
                for &k in &kept {
                    if similarity_upper_bound(&combined[k], &combined[i]) < threshold {
                        continue;
                    }
                    let ratio = similarity_ratio(&combined[k], &combined[i]);
                    if ratio >= threshold {
                        removals.push(Removal {
                            state,
                            kept_index: k,
                            dropped_index: i,
                            ratio,
                        });
                        continue 'candidates;
                    }
                }
                kept.push(i);
            }
            (kept, removals)
        })
        .collect();

    let mut kept_all: Vec<usize> = Vec::new();
    let mut removals_all: Vec<Removal> = Vec::new();
    for (kept, removals) in per_state.drain(..) {
        kept_all.extend(kept);
        removals_all.extend(removals);
    }
    kept_all.sort_unstable();
    removals_all.sort_by_key(|r| r.dropped_index);

    let entries = kept_all
        .into_iter()
        .map(|i| corpus.entries[i].clone())
        .collect();
    Ok((FaqCorpus::from_entries(entries), removals_all))
}

/// Per-state length statistics in alphanumeric characters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateStats {
    pub official_count: usize,
    pub non_profit_count: usize,
    pub q_avg: f64,
    pub q_max: usize,
    pub q_min: usize,
    pub a_avg: f64,
    pub a_max: usize,
    pub a_min: usize,
}

/// Corpus summary statistics keyed by state. States without entries are
/// omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub per_state: BTreeMap<UsState, StateStats>,
}

/// Count of alphanumeric characters after strict cleaning.
pub fn alnum_len(text: &str) -> usize {
    clean_text(text, CleanMode::StrictAlnum)
        .chars()
        .filter(|c| c.is_alphanumeric())
        .count()
}

/// Compute per-state contributor counts and question/answer length statistics.
pub fn corpus_stats(corpus: &FaqCorpus) -> CorpusStats {
    let per_state = corpus
        .state_index
        .iter()
        .map(|(&state, indices)| {
            let mut official = 0usize;
            let mut q_lens = Vec::with_capacity(indices.len());
            let mut a_lens = Vec::with_capacity(indices.len());
            for &i in indices {
                let entry = &corpus.entries[i];
                if entry.contributor == Contributor::Official {
                    official += 1;
                }
                q_lens.push(alnum_len(&entry.question));
                a_lens.push(alnum_len(&entry.answer));
            }
            let stats = StateStats {
                official_count: official,
                non_profit_count: indices.len() - official,
                q_avg: mean(&q_lens),
                q_max: q_lens.iter().copied().max().unwrap_or(0),
                q_min: q_lens.iter().copied().min().unwrap_or(0),
                a_avg: mean(&a_lens),
                a_max: a_lens.iter().copied().max().unwrap_or(0),
                a_min: a_lens.iter().copied().min().unwrap_or(0),
            };
            (state, stats)
        })
        .collect();
    CorpusStats { per_state }
}

fn mean(values: &[usize]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<usize>() as f64 / values.len() as f64
}
