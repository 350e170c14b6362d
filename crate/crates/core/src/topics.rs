//! TF-IDF document-term matrix, seeded variational LDA, topic quality
//! scoring, and per-state topic scores.

use std::collections::{BTreeMap, HashMap, HashSet};

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::digamma;

use crate::corpus::{FaqCorpus, Scope};
use crate::error::{Error, Result};
use crate::state::UsState;
use crate::text;

/// Sparse TF-IDF matrix over unigrams and bigrams.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentTermMatrix {
    vocabulary: Vec<String>,
    /// One sparse row per document: (term index, weight), sorted by term,
    /// L2-normalized.
    rows: Vec<Vec<(usize, f64)>>,
    /// Corpus entry index behind each row.
    doc_ids: Vec<usize>,
}

impl DocumentTermMatrix {
    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn num_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn num_terms(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn row(&self, doc: usize) -> &[(usize, f64)] {
        &self.rows[doc]
    }

    pub fn doc_ids(&self) -> &[usize] {
        &self.doc_ids
    }

    /// Number of documents whose row contains the term.
    pub fn document_frequency(&self, term: usize) -> usize {
        self.rows
            .iter()
            .filter(|row| row.iter().any(|&(t, _)| t == term))
            .count()
    }
}

/// Unigrams plus adjacent bigrams of the content tokens.
fn terms_of(tokens: &[String]) -> Vec<String> {
    let mut terms = Vec::with_capacity(tokens.len().saturating_mul(2));
    terms.extend(tokens.iter().cloned());
    for pair in tokens.windows(2) {
        terms.push(format!("{} {}", pair[0], pair[1]));
    }
    terms
}

/// Build the TF-IDF matrix for one scope.
///
/// Terms are lowercased unigrams and bigrams with stopwords removed. The
/// `max_features` most frequent terms across the corpus are kept (ties break
/// alphabetically), idf is `ln((1+N)/(1+df)) + 1`, and each row is
/// L2-normalized.
pub fn build_dtm(
    corpus: &FaqCorpus,
    scope: Scope,
    max_features: usize,
) -> Result<DocumentTermMatrix> {
    if corpus.is_empty() {
        return Err(Error::InvalidParameter {
            name: "corpus",
            message: "must be non-empty".into(),
        });
    }
    if max_features == 0 {
        return Err(Error::InvalidParameter {
            name: "max_features",
            message: "must be positive".into(),
        });
    }
    let docs: Vec<Vec<String>> = corpus
        .entries()
        .par_iter()
        .map(|entry| terms_of(&text::content_tokens(&scope.text_of(entry))))
        .collect();

    let mut corpus_freq: HashMap<&str, usize> = HashMap::new();
    for doc in &docs {
        for term in doc {
            *corpus_freq.entry(term).or_insert(0) += 1;
        }
    }
    if corpus_freq.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut by_freq: Vec<(&str, usize)> = corpus_freq.iter().map(|(&t, &c)| (t, c)).collect();
    by_freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    by_freq.truncate(max_features);
    let mut vocabulary: Vec<String> = by_freq.into_iter().map(|(t, _)| t.to_string()).collect();
    vocabulary.sort();
    let term_ids: HashMap<&str, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    let n_docs = docs.len();
    let mut df = vec![0usize; vocabulary.len()];
    let mut counted: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n_docs);
    for doc in &docs {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for term in doc {
            if let Some(&id) = term_ids.get(term.as_str()) {
                *counts.entry(id).or_insert(0) += 1;
            }
        }
        for &id in counts.keys() {
            df[id] += 1;
        }
        counted.push(counts.into_iter().collect());
    }

    let idf: Vec<f64> = df
        .iter()
        .map(|&d| ((1.0 + n_docs as f64) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    let rows: Vec<Vec<(usize, f64)>> = counted
        .into_iter()
        .map(|counts| {
            let mut row: Vec<(usize, f64)> = counts
                .into_iter()
                .map(|(id, c)| (id, c as f64 * idf[id]))
                .collect();
            let norm = row.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, w) in row.iter_mut() {
                    *w /= norm;
                }
            }
            row
        })
        .collect();

    Ok(DocumentTermMatrix {
        vocabulary,
        rows,
        doc_ids: (0..n_docs).collect(),
    })
}

/// A fitted LDA model.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub k: usize,
    /// docs x k; rows sum to 1.
    pub doc_topic: Array2<f64>,
    /// k x V; rows sum to 1.
    pub topic_word: Array2<f64>,
    pub seed: u64,
    pub iterations: usize,
}

const GAMMA_TOL: f64 = 1e-3;
const DOC_MAX_ITER: usize = 100;
const PHI_FLOOR: f64 = 1e-100;

/// Fit LDA by batch variational EM with symmetric priors `alpha = eta = 1/k`.
///
/// The topic-word variational parameter starts from a seeded uniform
/// perturbation, so the same inputs and seed reproduce the model bit for
/// bit. The E-step runs per document in parallel; the M-step reduces the
/// per-document statistics in document order, keeping results independent
/// of thread count.
pub fn fit_lda(
    dtm: &DocumentTermMatrix,
    k: usize,
    max_iter: usize,
    seed: u64,
) -> Result<TopicModel> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "topic count",
            message: format!("must be at least 2, got {k}"),
        });
    }
    let n_docs = dtm.num_docs();
    if n_docs < k {
        return Err(Error::TooFewDocuments { docs: n_docs, k });
    }
    let v = dtm.num_terms();
    let alpha = 1.0 / k as f64;
    let eta = 1.0 / k as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lambda = Array2::from_shape_fn((k, v), |_| 0.5 + rng.gen::<f64>());

    let mut iterations = 0;
    for _ in 0..max_iter {
        let exp_elog_beta = exp_dirichlet_expectation(&lambda);
        let doc_stats: Vec<DocStats> = (0..n_docs)
            .into_par_iter()
            .map(|d| e_step(dtm.row(d), &exp_elog_beta, alpha))
            .collect();

        let mut sstats = Array2::<f64>::zeros((k, v));
        for stats in &doc_stats {
            for &(term, scale) in &stats.scaled_terms {
                for t in 0..k {
                    sstats[[t, term]] += stats.exp_elog_theta[t] * scale;
                }
            }
        }
        lambda = sstats * &exp_elog_beta + eta;
        iterations += 1;
    }

    // final E-step against the converged topics
    let exp_elog_beta = exp_dirichlet_expectation(&lambda);
    let doc_stats: Vec<DocStats> = (0..n_docs)
        .into_par_iter()
        .map(|d| e_step(dtm.row(d), &exp_elog_beta, alpha))
        .collect();

    let mut doc_topic = Array2::<f64>::zeros((n_docs, k));
    for (d, stats) in doc_stats.iter().enumerate() {
        let total: f64 = stats.gamma.sum();
        for t in 0..k {
            doc_topic[[d, t]] = stats.gamma[t] / total;
        }
    }
    let mut topic_word = lambda;
    for mut row in topic_word.rows_mut() {
        let total = row.sum();
        row.mapv_inplace(|x| x / total);
    }

    Ok(TopicModel {
        k,
        doc_topic,
        topic_word,
        seed,
        iterations,
    })
}

struct DocStats {
    gamma: Array1<f64>,
    exp_elog_theta: Array1<f64>,
    /// (term, n_dv / phinorm_v) for the document's nonzero terms.
    scaled_terms: Vec<(usize, f64)>,
}

fn exp_dirichlet_expectation(param: &Array2<f64>) -> Array2<f64> {
    let row_sums = param.sum_axis(Axis(1));
    let mut out = param.clone();
    for (mut row, &total) in out.rows_mut().into_iter().zip(row_sums.iter()) {
        let dg_total = digamma(total);
        row.mapv_inplace(|x| (digamma(x) - dg_total).exp());
    }
    out
}

fn e_step(row: &[(usize, f64)], exp_elog_beta: &Array2<f64>, alpha: f64) -> DocStats {
    let k = exp_elog_beta.nrows();
    let doc_total: f64 = row.iter().map(|&(_, w)| w).sum();
    let mut gamma = Array1::from_elem(k, alpha + doc_total / k as f64);
    let mut exp_elog_theta = exp_dirichlet_expectation_1d(&gamma);
    let mut phinorm: Vec<f64> = Vec::with_capacity(row.len());
    for _ in 0..DOC_MAX_ITER {
        phinorm.clear();
        for &(term, _) in row {
            let mut s = PHI_FLOOR;
            for t in 0..k {
                s += exp_elog_theta[t] * exp_elog_beta[[t, term]];
            }
            phinorm.push(s);
        }
        let mut new_gamma = Array1::from_elem(k, alpha);
        for t in 0..k {
            let mut acc = 0.0;
            for (i, &(term, weight)) in row.iter().enumerate() {
                acc += weight / phinorm[i] * exp_elog_beta[[t, term]];
            }
            new_gamma[t] += exp_elog_theta[t] * acc;
        }
        let change: f64 = gamma
            .iter()
            .zip(new_gamma.iter())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / k as f64;
        gamma = new_gamma;
        exp_elog_theta = exp_dirichlet_expectation_1d(&gamma);
        if change < GAMMA_TOL {
            break;
        }
    }
    phinorm.clear();
    for &(term, _) in row {
        let mut s = PHI_FLOOR;
        for t in 0..k {
            s += exp_elog_theta[t] * exp_elog_beta[[t, term]];
        }
        phinorm.push(s);
    }
    let scaled_terms = row
        .iter()
        .zip(&phinorm)
        .map(|(&(term, weight), &p)| (term, weight / p))
        .collect();
    DocStats {
        gamma,
        exp_elog_theta,
        scaled_terms,
    }
}

fn exp_dirichlet_expectation_1d(param: &Array1<f64>) -> Array1<f64> {
    let dg_total = digamma(param.sum());
    param.mapv(|x| (digamma(x) - dg_total).exp())
}

/// Perplexity of the matrix under the model: `exp(-L/T)` with `L` the
/// point-estimate log likelihood and `T` the total token weight.
pub fn perplexity(model: &TopicModel, dtm: &DocumentTermMatrix) -> f64 {
    let mut log_likelihood = 0.0;
    let mut tokens = 0.0;
    for d in 0..dtm.num_docs() {
        for &(term, weight) in dtm.row(d) {
            let mut p = 0.0;
            for t in 0..model.k {
                p += model.doc_topic[[d, t]] * model.topic_word[[t, term]];
            }
            log_likelihood += weight * (p + 1e-12).ln();
            tokens += weight;
        }
    }
    if tokens == 0.0 {
        return f64::INFINITY;
    }
    (-log_likelihood / tokens).exp()
}

/// Mean silhouette of documents labeled by their dominant topic, with
/// Euclidean distance on doc-topic rows. Single-member clusters score 0, and
/// a degenerate clustering (every document on one topic) reports 0.
pub fn silhouette(model: &TopicModel) -> f64 {
    let n = model.doc_topic.nrows();
    if n == 0 {
        return 0.0;
    }
    let labels: Vec<usize> = (0..n).map(|d| argmax_row(&model.doc_topic, d)).collect();
    let distinct: HashSet<usize> = labels.iter().copied().collect();
    if distinct.len() < 2 {
        return 0.0;
    }
    let mut cluster_sizes: HashMap<usize, usize> = HashMap::new();
    for &l in &labels {
        *cluster_sizes.entry(l).or_insert(0) += 1;
    }
    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            if cluster_sizes[&labels[i]] < 2 {
                return 0.0;
            }
            let mut intra = 0.0;
            let mut inter: HashMap<usize, (f64, usize)> = HashMap::new();
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dist = euclidean(&model.doc_topic, i, j);
                if labels[j] == labels[i] {
                    intra += dist;
                } else {
                    let slot = inter.entry(labels[j]).or_insert((0.0, 0));
                    slot.0 += dist;
                    slot.1 += 1;
                }
            }
            let a = intra / (cluster_sizes[&labels[i]] - 1) as f64;
            let b = inter
                .values()
                .map(|&(sum, count)| sum / count as f64)
                .fold(f64::INFINITY, f64::min);
            if a.max(b) == 0.0 {
                0.0
            } else {
                (b - a) / a.max(b)
            }
        })
        .collect();
    scores.iter().sum::<f64>() / n as f64
}

fn argmax_row(matrix: &Array2<f64>, row: usize) -> usize {
    let mut best = 0;
    for t in 1..matrix.ncols() {
        if matrix[[row, t]] > matrix[[row, best]] {
            best = t;
        }
    }
    best
}

fn euclidean(matrix: &Array2<f64>, i: usize, j: usize) -> f64 {
    (0..matrix.ncols())
        .map(|t| (matrix[[i, t]] - matrix[[j, t]]).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Mean topic mass across documents, per topic.
pub fn topic_prevalence(model: &TopicModel) -> Vec<f64> {
    model
        .doc_topic
        .mean_axis(Axis(0))
        .map(|m| m.to_vec())
        .unwrap_or_default()
}

/// How co-occurrence is aggregated into coherence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceMode {
    /// Mean of plain co-occurrence ratios `D(lower, higher) / D(higher)`.
    Ratio,
    /// Mean of smoothed log ratios `ln((D(lower, higher) + 1) / D(higher))`.
    Log,
}

/// Top `top_n` terms of each topic by topic-word probability, ties broken by
/// term index.
pub fn top_terms(model: &TopicModel, top_n: usize) -> Vec<Vec<usize>> {
    (0..model.k)
        .map(|t| {
            let mut order: Vec<usize> = (0..model.topic_word.ncols()).collect();
            order.sort_by(|&a, &b| {
                model.topic_word[[t, b]]
                    .partial_cmp(&model.topic_word[[t, a]])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            order.truncate(top_n);
            order
        })
        .collect()
}

/// Document co-occurrence coherence of each topic's top terms. For top words
/// ranked `w1..wn`, every pair contributes `D(wm, wl) / D(wl)` with `l < m`,
/// where `D` counts documents containing the term(s); pairs whose
/// higher-ranked word appears nowhere contribute 0.
pub fn topic_coherence(
    model: &TopicModel,
    dtm: &DocumentTermMatrix,
    top_n: usize,
    mode: CoherenceMode,
) -> Vec<f64> {
    let tops = top_terms(model, top_n);
    let needed: HashSet<usize> = tops.iter().flatten().copied().collect();
    let doc_sets: HashMap<usize, HashSet<usize>> = needed
        .into_iter()
        .map(|term| {
            let docs: HashSet<usize> = (0..dtm.num_docs())
                .filter(|&d| dtm.row(d).iter().any(|&(t, _)| t == term))
                .collect();
            (term, docs)
        })
        .collect();

    tops.iter()
        .map(|terms| {
            let mut total = 0.0;
            let mut pairs = 0usize;
            for m in 1..terms.len() {
                for l in 0..m {
                    let higher = &doc_sets[&terms[l]];
                    let both = doc_sets[&terms[m]].intersection(higher).count();
                    total += match mode {
                        CoherenceMode::Ratio => {
                            if higher.is_empty() {
                                0.0
                            } else {
                                both as f64 / higher.len() as f64
                            }
                        }
                        CoherenceMode::Log => {
                            if higher.is_empty() {
                                0.0
                            } else {
                                ((both as f64 + 1.0) / higher.len() as f64).ln()
                            }
                        }
                    };
                    pairs += 1;
                }
            }
            if pairs == 0 {
                0.0
            } else {
                total / pairs as f64
            }
        })
        .collect()
}

/// Jensen-Shannon divergence in base 2, bounded to [0, 1].
pub fn js_divergence(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let kl_to_mid = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                if x <= 0.0 {
                    0.0
                } else {
                    let mid = 0.5 * (x + y);
                    x * (x / mid).log2()
                }
            })
            .sum()
    };
    0.5 * kl_to_mid(p, q) + 0.5 * kl_to_mid(q, p)
}

/// Mean Jensen-Shannon divergence from each topic to the others.
pub fn topic_distinctiveness(model: &TopicModel) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = (0..model.k)
        .map(|t| model.topic_word.row(t).to_vec())
        .collect();
    (0..model.k)
        .map(|t| {
            let others: Vec<f64> = (0..model.k)
                .filter(|&s| s != t)
                .map(|s| js_divergence(&rows[t], &rows[s]))
                .collect();
            if others.is_empty() {
                0.0
            } else {
                others.iter().sum::<f64>() / others.len() as f64
            }
        })
        .collect()
}

/// Fraction of documents whose topic mass strictly exceeds `threshold`.
pub fn topic_coverage(model: &TopicModel, threshold: f64) -> Vec<f64> {
    let n = model.doc_topic.nrows();
    (0..model.k)
        .map(|t| {
            if n == 0 {
                return 0.0;
            }
            let covered = (0..n)
                .filter(|&d| model.doc_topic[[d, t]] > threshold)
                .count();
            covered as f64 / n as f64
        })
        .collect()
}

/// The four raw quality components plus the display terms of each topic.
#[derive(Debug, Clone, Serialize)]
pub struct TopicComponents {
    pub prevalence: Vec<f64>,
    pub coherence: Vec<f64>,
    pub distinctiveness: Vec<f64>,
    pub coverage: Vec<f64>,
    pub top_words: Vec<Vec<String>>,
}

/// Gather all four components and the top-10 words of each topic.
pub fn topic_components(
    model: &TopicModel,
    dtm: &DocumentTermMatrix,
    coverage_threshold: f64,
    coherence_mode: CoherenceMode,
) -> TopicComponents {
    let top_words = top_terms(model, 10)
        .into_iter()
        .map(|ids| {
            ids.into_iter()
                .map(|i| dtm.vocabulary()[i].clone())
                .collect()
        })
        .collect();
    TopicComponents {
        prevalence: topic_prevalence(model),
        coherence: topic_coherence(model, dtm, 10, coherence_mode),
        distinctiveness: topic_distinctiveness(model),
        coverage: topic_coverage(model, coverage_threshold),
        top_words,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Priority {
    High,
    Moderate,
    Low,
}

/// Priority bands: above 0.7 high, 0.3 through 0.7 moderate, below 0.3 low.
pub fn priority_of(final_score: f64) -> Priority {
    if final_score > 0.7 {
        Priority::High
    } else if final_score >= 0.3 {
        Priority::Moderate
    } else {
        Priority::Low
    }
}

/// One topic's scorecard row.
#[derive(Debug, Clone, Serialize)]
pub struct TopicScore {
    pub index: usize,
    pub label: Option<String>,
    pub prevalence_raw: f64,
    pub coherence_raw: f64,
    pub distinctiveness_raw: f64,
    pub coverage_raw: f64,
    pub prevalence: f64,
    pub coherence: f64,
    pub distinctiveness: f64,
    pub coverage: f64,
    pub final_score: f64,
    pub priority: Priority,
    pub top_words: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TopicScorecard {
    pub topics: Vec<TopicScore>,
}

/// Min-max normalize each component across topics (a constant component maps
/// to 0.5 everywhere) and combine with equal 0.25 weights.
pub fn score_topics(
    components: &TopicComponents,
    labels: Option<&[String]>,
) -> Result<TopicScorecard> {
    let k = components.prevalence.len();
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "topic count",
            message: format!("scoring needs at least 2 topics, got {k}"),
        });
    }
    let normalize = |values: &[f64]| -> Vec<f64> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max - min <= f64::EPSILON * max.abs().max(1.0) {
            return vec![0.5; values.len()];
        }
        values.iter().map(|v| (v - min) / (max - min)).collect()
    };
    let prevalence = normalize(&components.prevalence);
    let coherence = normalize(&components.coherence);
    let distinctiveness = normalize(&components.distinctiveness);
    let coverage = normalize(&components.coverage);

    let topics = (0..k)
        .map(|t| {
            let final_score =
                0.25 * (prevalence[t] + coherence[t] + distinctiveness[t] + coverage[t]);
            TopicScore {
                index: t,
                label: labels.and_then(|l| l.get(t).cloned()),
                prevalence_raw: components.prevalence[t],
                coherence_raw: components.coherence[t],
                distinctiveness_raw: components.distinctiveness[t],
                coverage_raw: components.coverage[t],
                prevalence: prevalence[t],
                coherence: coherence[t],
                distinctiveness: distinctiveness[t],
                coverage: coverage[t],
                final_score,
                priority: priority_of(final_score),
                top_words: components.top_words.get(t).cloned().unwrap_or_default(),
            }
        })
        .collect();
    Ok(TopicScorecard { topics })
}

/// A state's topic profile and final score.
#[derive(Debug, Clone, Serialize)]
pub struct StateTopicScore {
    /// Mean doc-topic mass of the state's documents, per topic.
    pub topic_values: Vec<f64>,
    pub faq_count: usize,
    pub faq_normalization: f64,
    pub faq_penalty: f64,
    pub final_score: f64,
}

impl StateTopicScore {
    pub fn median_topic_value(&self) -> f64 {
        let mut sorted = self.topic_values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.is_empty() {
            return 0.0;
        }
        let mid = sorted.len() / 2;
        if sorted.len().is_multiple_of(2) {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        }
    }
}

/// FAQ-count damping: `min(1, count/20)`.
pub fn faq_penalty(faq_count: usize) -> f64 {
    (faq_count as f64 / 20.0).min(1.0)
}

/// Score every state: sum over topics of value x weight, damped by FAQ
/// normalization (`count / max count`) and penalty (`min(1, count/20)`).
pub fn score_states(
    model: &TopicModel,
    corpus: &FaqCorpus,
    dtm: &DocumentTermMatrix,
    scorecard: &TopicScorecard,
) -> Result<BTreeMap<UsState, StateTopicScore>> {
    if dtm.num_docs() != model.doc_topic.nrows() {
        return Err(Error::InvalidParameter {
            name: "model",
            message: "document count differs from the matrix".into(),
        });
    }
    let mut docs_by_state: BTreeMap<UsState, Vec<usize>> = BTreeMap::new();
    for (doc, &entry_index) in dtm.doc_ids().iter().enumerate() {
        let entry = corpus
            .entries()
            .get(entry_index)
            .ok_or_else(|| Error::InvalidParameter {
                name: "model",
                message: format!("document {doc} references missing entry {entry_index}"),
            })?;
        docs_by_state.entry(entry.state).or_default().push(doc);
    }
    for state in corpus.states() {
        if !docs_by_state.contains_key(&state) {
            return Err(Error::StateNotInModel(state.code().to_string()));
        }
    }

    let max_count = docs_by_state.values().map(Vec::len).max().unwrap_or(0);
    let weights: Vec<f64> = scorecard.topics.iter().map(|t| t.final_score).collect();

    Ok(docs_by_state
        .into_iter()
        .map(|(state, docs)| {
            let count = docs.len();
            let topic_values: Vec<f64> = (0..model.k)
                .map(|t| docs.iter().map(|&d| model.doc_topic[[d, t]]).sum::<f64>() / count as f64)
                .collect();
            let normalization = count as f64 / max_count as f64;
            let penalty = faq_penalty(count);
            let weighted: f64 = topic_values.iter().zip(&weights).map(|(v, w)| v * w).sum();
            let score = StateTopicScore {
                topic_values,
                faq_count: count,
                faq_normalization: normalization,
                faq_penalty: penalty,
                final_score: weighted * normalization * penalty,
            };
            (state, score)
        })
        .collect())
}

/// Model-selection diagnostics for one candidate topic count.
#[derive(Debug, Clone, Serialize)]
pub struct TopicCountDiagnostics {
    pub k: usize,
    pub perplexity: f64,
    pub silhouette: f64,
    pub coherence: f64,
}

/// Fit every k in `lo..=hi` and report perplexity, silhouette, and mean
/// coherence. Selection is the caller's call; this only tabulates.
pub fn select_topic_count(
    dtm: &DocumentTermMatrix,
    lo: usize,
    hi: usize,
    max_iter: usize,
    seed: u64,
) -> Result<Vec<TopicCountDiagnostics>> {
    if lo < 2 || lo > hi {
        return Err(Error::InvalidParameter {
            name: "topic range",
            message: format!("need 2 <= lo <= hi, got [{lo}, {hi}]"),
        });
    }
    if hi > dtm.num_docs() {
        return Err(Error::InvalidParameter {
            name: "topic range",
            message: format!("upper bound {hi} exceeds document count {}", dtm.num_docs()),
        });
    }
    (lo..=hi)
        .map(|k| {
            let model = fit_lda(dtm, k, max_iter, seed)?;
            let coherences = topic_coherence(&model, dtm, 10, CoherenceMode::Ratio);
            Ok(TopicCountDiagnostics {
                k,
                perplexity: perplexity(&model, dtm),
                silhouette: silhouette(&model),
                coherence: coherences.iter().sum::<f64>() / coherences.len() as f64,
            })
        })
        .collect()
}
