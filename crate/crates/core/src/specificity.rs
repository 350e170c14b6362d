//! Generic-versus-specific question classification via cross-state cosine
//! similarity.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::FaqCorpus;
use crate::error::{Error, Result};
use crate::state::UsState;
use crate::text;

/// Pairs closer than this to cosine 1.0 count as exact duplicates.
const DUPLICATE_EPSILON: f64 = 1e-9;

/// Unit vectors for every question in corpus entry order.
#[derive(Debug, Clone)]
pub struct QuestionVectors {
    states: Vec<UsState>,
    vectors: VectorSet,
}

#[derive(Debug, Clone)]
enum VectorSet {
    /// Sparse (term, weight) rows sorted by term, from the TF-IDF provider.
    Sparse(Vec<Vec<(usize, f64)>>),
    /// Dense rows from an external sidecar file.
    Dense(Vec<Vec<f64>>),
}

impl QuestionVectors {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_of(&self, question: usize) -> UsState {
        self.states[question]
    }

    /// Cosine similarity; vectors are unit length, so this is a dot product.
    pub fn cosine(&self, i: usize, j: usize) -> f64 {
        match &self.vectors {
            VectorSet::Sparse(rows) => sparse_dot(&rows[i], &rows[j]),
            VectorSet::Dense(rows) => rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum(),
        }
    }
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let mut dot = 0.0;
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].0.cmp(&b[y].0) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                dot += a[x].1 * b[y].1;
                x += 1;
                y += 1;
            }
        }
    }
    dot
}

/// Embed every question with corpus TF-IDF: lowercased unigrams with
/// stopwords removed, idf `ln((1+N)/(1+df)) + 1`, L2-normalized. A question
/// with no content tokens cannot be embedded and is reported as a provider
/// failure naming its entry index.
pub fn question_vectors(corpus: &FaqCorpus) -> Result<QuestionVectors> {
    let token_lists: Vec<Vec<String>> = corpus
        .entries()
        .par_iter()
        .map(|e| text::content_tokens(&e.question))
        .collect();

    let mut vocabulary: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in &token_lists {
        for token in tokens {
            let next = vocabulary.len();
            vocabulary.entry(token.as_str()).or_insert(next);
        }
    }
    let n_docs = token_lists.len();
    let mut df = vec![0usize; vocabulary.len()];
    let counted: Vec<Vec<(usize, usize)>> = token_lists
        .iter()
        .map(|tokens| {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for token in tokens {
                *counts.entry(vocabulary[token.as_str()]).or_insert(0) += 1;
            }
            for &term in counts.keys() {
                df[term] += 1;
            }
            counts.into_iter().collect()
        })
        .collect();
    let idf: Vec<f64> = df
        .iter()
        .map(|&d| ((1.0 + n_docs as f64) / (1.0 + d as f64)).ln() + 1.0)
        .collect();

    let rows = counted
        .into_iter()
        .enumerate()
        .map(|(index, counts)| {
            let mut row: Vec<(usize, f64)> = counts
                .into_iter()
                .map(|(term, c)| (term, c as f64 * idf[term]))
                .collect();
            let norm = row.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Provider {
                    index,
                    reason: "question has no content tokens to embed".into(),
                });
            }
            for (_, w) in row.iter_mut() {
                *w /= norm;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(QuestionVectors {
        states: corpus.entries().iter().map(|e| e.state).collect(),
        vectors: VectorSet::Sparse(rows),
    })
}

#[derive(Debug, Deserialize)]
struct SidecarVector {
    id: usize,
    vector: Vec<f64>,
}

/// Load externally computed question embeddings from a sidecar file: a JSON
/// array of `{id, vector}` with `id` the corpus entry index. Every entry
/// needs a vector; vectors are L2-normalized here.
pub fn question_vectors_from_file(corpus: &FaqCorpus, path: &Path) -> Result<QuestionVectors> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let sidecar: Vec<SidecarVector> = serde_json::from_str(&raw).map_err(|e| Error::Parse {
        offset: 0,
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut by_id: HashMap<usize, Vec<f64>> = HashMap::new();
    for item in sidecar {
        by_id.insert(item.id, item.vector);
    }
    let dim = by_id.values().map(Vec::len).max().unwrap_or(0);
    let rows = (0..corpus.len())
        .map(|index| {
            let mut vector = by_id.remove(&index).ok_or_else(|| Error::Provider {
                index,
                reason: "no vector in the embeddings file".into(),
            })?;
            if vector.len() != dim {
                return Err(Error::Provider {
                    index,
                    reason: format!("vector has {} dimensions, expected {dim}", vector.len()),
                });
            }
            let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::Provider {
                    index,
                    reason: "vector cannot be normalized".into(),
                });
            }
            for v in vector.iter_mut() {
                *v /= norm;
            }
            Ok(vector)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuestionVectors {
        states: corpus.entries().iter().map(|e| e.state).collect(),
        vectors: VectorSet::Dense(rows),
    })
}

/// Counts for one state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StateSpecificity {
    pub generic_count: usize,
    pub specific_count: usize,
    pub duplicate_exclusions: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecificityReport {
    pub threshold: f64,
    pub per_state: BTreeMap<UsState, StateSpecificity>,
}

/// Classify each question as generic or specific.
///
/// A question is generic when some question of another state reaches the
/// similarity threshold through a non-duplicate pair; pairs at cosine 1.0
/// are presumed copies and never make a question generic. A question whose
/// only threshold-reaching cross-state pairs are duplicates is excluded from
/// both counts and tallied under `duplicate_exclusions`.
pub fn classify_questions(vectors: &QuestionVectors, threshold: f64) -> Result<SpecificityReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter {
            name: "specificity threshold",
            message: format!("must be in (0, 1), got {threshold}"),
        });
    }
    let n = vectors.len();
    #[derive(Clone, Copy)]
    enum Verdict {
        Generic,
        Specific,
        Duplicate,
    }
    let verdicts: Vec<(UsState, Verdict)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let state = vectors.state_of(i);
            let mut saw_duplicate = false;
            let mut generic = false;
            for j in 0..n {
                if vectors.state_of(j) == state {
                    continue;
                }
                let similarity = vectors.cosine(i, j);
                if similarity >= 1.0 - DUPLICATE_EPSILON {
                    saw_duplicate = true;
                } else if similarity >= threshold {
                    generic = true;
                    break;
                }
            }
            let verdict = if generic {
                Verdict::Generic
            } else if saw_duplicate {
                Verdict::Duplicate
            } else {
                Verdict::Specific
            };
            (state, verdict)
        })
        .collect();

    let mut per_state: BTreeMap<UsState, StateSpecificity> = BTreeMap::new();
    for (state, verdict) in verdicts {
        let counts = per_state.entry(state).or_default();
        match verdict {
            Verdict::Generic => counts.generic_count += 1,
            Verdict::Specific => counts.specific_count += 1,
            Verdict::Duplicate => counts.duplicate_exclusions += 1,
        }
    }
    Ok(SpecificityReport {
        threshold,
        per_state,
    })
}
