//! Extractive summaries and the relevance metric suite
//! (ROUGE family, BLEU, cosine, semantic overlap).

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::FaqCorpus;
use crate::error::{Error, Result};
use crate::state::UsState;
use crate::text;

const DAMPING: f64 = 0.85;
const PAGERANK_TOL: f64 = 1e-6;
const PAGERANK_MAX_ITER: usize = 100;
const BLEU_EPSILON: f64 = 1e-9;

/// Length-driven summary reduction ratio.
pub fn reduction_ratio(answer_token_count: usize) -> f64 {
    if answer_token_count < 200 {
        0.5
    } else if answer_token_count < 300 {
        0.4
    } else {
        0.3
    }
}

/// TextRank extractive summary keeping `ceil(ratio * sentences)` sentences.
///
/// Sentences form a graph weighted by content-token overlap normalized as
/// `|A inter B| / sqrt(|A| |B|)`; scores come from damped power iteration
/// (damping 0.85, tolerance 1e-6, at most 100 rounds). Selected sentences
/// are emitted in their original order, joined by single spaces.
pub fn extractive_summary(input: &str, ratio: f64) -> Result<String> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "summary ratio",
            message: format!("must be in (0, 1], got {ratio}"),
        });
    }
    let sentences = text::sentences(input);
    let n = sentences.len();
    if n == 0 {
        return Ok(String::new());
    }
    let keep = ((ratio * n as f64).ceil() as usize).clamp(1, n);
    if keep == n {
        return Ok(sentences.join(" "));
    }

    let token_sets: Vec<HashSet<String>> = sentences
        .iter()
        .map(|s| text::content_tokens(s).into_iter().collect())
        .collect();
    let mut weights = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = overlap_similarity(&token_sets[i], &token_sets[j]);
            weights[i][j] = w;
            weights[j][i] = w;
        }
    }
    let scores = pagerank(&weights);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut selected: Vec<usize> = order.into_iter().take(keep).collect();
    selected.sort_unstable();
    Ok(selected
        .into_iter()
        .map(|i| sentences[i])
        .collect::<Vec<_>>()
        .join(" "))
}

fn overlap_similarity(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let common = a.intersection(b).count();
    common as f64 / ((a.len() * b.len()) as f64).sqrt()
}

fn pagerank(weights: &[Vec<f64>]) -> Vec<f64> {
    let n = weights.len();
    let degree: Vec<f64> = weights.iter().map(|row| row.iter().sum()).collect();
    let mut scores = vec![1.0 / n as f64; n];
    for _ in 0..PAGERANK_MAX_ITER {
        let mut next = vec![(1.0 - DAMPING) / n as f64; n];
        for j in 0..n {
            if degree[j] > 0.0 {
                let share = DAMPING * scores[j] / degree[j];
                for i in 0..n {
                    if weights[j][i] > 0.0 {
                        next[i] += share * weights[j][i];
                    }
                }
            } else {
                // dangling sentence: spread uniformly
                let share = DAMPING * scores[j] / n as f64;
                for v in next.iter_mut() {
                    *v += share;
                }
            }
        }
        let delta: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        scores = next;
        if delta < PAGERANK_TOL {
            break;
        }
    }
    scores
}

fn f1(matches: f64, cand_total: f64, ref_total: f64) -> f64 {
    if cand_total == 0.0 || ref_total == 0.0 {
        return 0.0;
    }
    let p = matches / cand_total;
    let r = matches / ref_total;
    if p + r == 0.0 {
        return 0.0;
    }
    2.0 * p * r / (p + r)
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

fn clipped_matches(
    reference: &HashMap<&[String], usize>,
    candidate: &HashMap<&[String], usize>,
) -> usize {
    candidate
        .iter()
        .map(|(gram, &count)| count.min(reference.get(gram).copied().unwrap_or(0)))
        .sum()
}

/// ROUGE-N F1 with clipped n-gram counts. Identical nonempty texts score 1;
/// an empty side (or no n-grams of order `n`) scores 0.
pub fn rouge_n(reference: &str, candidate: &str, n: usize) -> f64 {
    assert!(n >= 1, "n-gram order must be at least 1");
    let r = text::tokens_lower(reference);
    let c = text::tokens_lower(candidate);
    if r.is_empty() || c.is_empty() {
        return 0.0;
    }
    if r == c {
        return 1.0;
    }
    let r_grams = ngram_counts(&r, n);
    let c_grams = ngram_counts(&c, n);
    let matches = clipped_matches(&r_grams, &c_grams);
    f1(
        matches as f64,
        c_grams.values().sum::<usize>() as f64,
        r_grams.values().sum::<usize>() as f64,
    )
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// ROUGE-L F1 from the longest common subsequence.
pub fn rouge_l(reference: &str, candidate: &str) -> f64 {
    let r = text::tokens_lower(reference);
    let c = text::tokens_lower(candidate);
    if r.is_empty() || c.is_empty() {
        return 0.0;
    }
    if r == c {
        return 1.0;
    }
    let lcs = lcs_len(&r, &c) as f64;
    f1(lcs, c.len() as f64, r.len() as f64)
}

/// Maximum weighted common subsequence score: over all monotone alignments,
/// the best sum of `f(run length)` across maximal consecutive runs.
///
/// The dynamic program tracks, for every match cell, the settled score of
/// alignments whose current run ends there, per run length. Starting a new
/// run takes the prefix maximum of completed scores up-left; because `f` is
/// superadditive (`f(a+b) >= f(a) + f(b)` for exponents >= 1), letting a new
/// run begin right after an adjacent match never overtakes extending it, so
/// the prefix maximum needs no exclusions. Unlike the classic forced-diagonal
/// recurrence, this always attains the true maximum.
fn weighted_lcs(a: &[String], b: &[String], f: &impl Fn(f64) -> f64) -> f64 {
    let n = b.len();
    let mut best = 0.0f64;
    // runs ending at (previous row, j): settled score per run length - 1
    let mut prev_runs: Vec<Vec<f64>> = vec![Vec::new(); n];
    // prefix max of completed scores over rows <= previous, columns <= j
    let mut prev_prefix: Vec<f64> = vec![0.0; n];
    for token_a in a {
        let mut curr_runs: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut completed: Vec<f64> = vec![0.0; n];
        for (j, token_b) in b.iter().enumerate() {
            if token_a == token_b {
                let base = if j > 0 { prev_prefix[j - 1] } else { 0.0 };
                let mut runs = vec![base];
                if j > 0 && !prev_runs[j - 1].is_empty() {
                    runs.resize(prev_runs[j - 1].len() + 1, f64::NEG_INFINITY);
                    for (k, &settled) in prev_runs[j - 1].iter().enumerate() {
                        runs[k + 1] = settled;
                    }
                }
                let complete = runs
                    .iter()
                    .enumerate()
                    .map(|(k, &settled)| settled + f((k + 1) as f64))
                    .fold(f64::NEG_INFINITY, f64::max);
                completed[j] = complete;
                best = best.max(complete);
                curr_runs[j] = runs;
            }
        }
        let mut running = 0.0f64;
        for j in 0..n {
            running = running.max(completed[j]);
            prev_prefix[j] = prev_prefix[j].max(running);
        }
        prev_runs = curr_runs;
    }
    best
}

/// ROUGE-W F1: weighted LCS favoring consecutive matches with
/// `f(k) = k^weight_exponent` and the inverse applied to precision/recall.
pub fn rouge_w(reference: &str, candidate: &str, weight_exponent: f64) -> f64 {
    let r = text::tokens_lower(reference);
    let c = text::tokens_lower(candidate);
    if r.is_empty() || c.is_empty() {
        return 0.0;
    }
    if r == c {
        return 1.0;
    }
    let f = |k: f64| k.powf(weight_exponent);
    let f_inv = |x: f64| x.powf(1.0 / weight_exponent);
    let wlcs = weighted_lcs(&r, &c, &f);
    let recall = f_inv(wlcs / f(r.len() as f64));
    let precision = f_inv(wlcs / f(c.len() as f64));
    if precision + recall == 0.0 {
        return 0.0;
    }
    2.0 * precision * recall / (precision + recall)
}

fn skip_bigram_counts(tokens: &[String], max_skip: Option<usize>) -> HashMap<(&str, &str), usize> {
    let mut counts = HashMap::new();
    for i in 0..tokens.len() {
        for j in (i + 1)..tokens.len() {
            if let Some(limit) = max_skip {
                if j - i - 1 > limit {
                    break;
                }
            }
            *counts
                .entry((tokens[i].as_str(), tokens[j].as_str()))
                .or_insert(0) += 1;
        }
    }
    counts
}

fn clipped_pair_matches<K: std::hash::Hash + Eq>(
    reference: &HashMap<K, usize>,
    candidate: &HashMap<K, usize>,
) -> usize {
    candidate
        .iter()
        .map(|(k, &count)| count.min(reference.get(k).copied().unwrap_or(0)))
        .sum()
}

/// ROUGE-S F1 over skip-bigrams. `max_skip` bounds the number of tokens
/// allowed between the pair; `None` is the unlimited classic variant.
pub fn rouge_s(reference: &str, candidate: &str, max_skip: Option<usize>) -> f64 {
    let r = text::tokens_lower(reference);
    let c = text::tokens_lower(candidate);
    if r.is_empty() || c.is_empty() {
        return 0.0;
    }
    if r == c {
        return 1.0;
    }
    let r_pairs = skip_bigram_counts(&r, max_skip);
    let c_pairs = skip_bigram_counts(&c, max_skip);
    let matches = clipped_pair_matches(&r_pairs, &c_pairs);
    f1(
        matches as f64,
        c_pairs.values().sum::<usize>() as f64,
        r_pairs.values().sum::<usize>() as f64,
    )
}

/// ROUGE-SU F1: skip-bigrams plus unigrams pooled on both sides.
pub fn rouge_su(reference: &str, candidate: &str, max_skip: Option<usize>) -> f64 {
    let r = text::tokens_lower(reference);
    let c = text::tokens_lower(candidate);
    if r.is_empty() || c.is_empty() {
        return 0.0;
    }
    if r == c {
        return 1.0;
    }
    let r_pairs = skip_bigram_counts(&r, max_skip);
    let c_pairs = skip_bigram_counts(&c, max_skip);
    let r_uni = ngram_counts(&r, 1);
    let c_uni = ngram_counts(&c, 1);
    let matches = clipped_pair_matches(&r_pairs, &c_pairs) + clipped_matches(&r_uni, &c_uni);
    let c_total = c_pairs.values().sum::<usize>() + c_uni.values().sum::<usize>();
    let r_total = r_pairs.values().sum::<usize>() + r_uni.values().sum::<usize>();
    f1(matches as f64, c_total as f64, r_total as f64)
}

/// BLEU with modified n-gram precision up to `min(max_n, candidate length)`,
/// brevity penalty `exp(1 - r/c)` for short candidates, and epsilon
/// substitution (1e-9) for zero precisions. Empty candidate scores 0.
pub fn bleu(reference: &str, candidate: &str, max_n: usize) -> f64 {
    assert!(max_n >= 1, "max_n must be at least 1");
    let r = text::tokens_lower(reference);
    let c = text::tokens_lower(candidate);
    if c.is_empty() {
        return 0.0;
    }
    let order = max_n.min(c.len());
    let mut log_sum = 0.0;
    for n in 1..=order {
        let r_grams = ngram_counts(&r, n);
        let c_grams = ngram_counts(&c, n);
        let total = c_grams.values().sum::<usize>();
        let matches = clipped_matches(&r_grams, &c_grams);
        let precision = if matches == 0 {
            BLEU_EPSILON
        } else {
            matches as f64 / total as f64
        };
        log_sum += precision.ln();
    }
    let mean_log = log_sum / order as f64;
    let brevity = if c.len() < r.len() {
        (1.0 - r.len() as f64 / c.len() as f64).exp()
    } else {
        1.0
    };
    brevity * mean_log.exp()
}

/// Cosine similarity of term-frequency vectors after lowercasing and
/// stopword removal. A zero vector on either side scores 0.
pub fn cosine_similarity(a: &str, b: &str) -> f64 {
    let ta = text::content_tokens(a);
    let tb = text::content_tokens(b);
    let mut counts_a: HashMap<&str, f64> = HashMap::new();
    for t in &ta {
        *counts_a.entry(t).or_insert(0.0) += 1.0;
    }
    let mut counts_b: HashMap<&str, f64> = HashMap::new();
    for t in &tb {
        *counts_b.entry(t).or_insert(0.0) += 1.0;
    }
    if counts_a.is_empty() || counts_b.is_empty() {
        return 0.0;
    }
    if counts_a == counts_b {
        return 1.0;
    }
    let norm_a: f64 = counts_a.values().map(|v| v * v).sum::<f64>().sqrt();
    let norm_b: f64 = counts_b.values().map(|v| v * v).sum::<f64>().sqrt();
    let dot: f64 = counts_a
        .iter()
        .filter_map(|(t, va)| counts_b.get(t).map(|vb| va * vb))
        .sum();
    (dot / (norm_a * norm_b)).min(1.0)
}

/// Weighted average of cosine similarity and ROUGE-1.
pub fn semantic_overlap(cosine: f64, rouge1: f64, w_cos: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&w_cos));
    w_cos * cosine + (1.0 - w_cos) * rouge1
}

/// What summaries are evaluated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryTarget {
    /// Compare each summary to the original answer (default).
    Answer,
    /// Compare each summary to the entry's question.
    Question,
}

/// Settings for [`evaluate_state_summaries`].
#[derive(Debug, Clone, Serialize)]
pub struct SummaryOptions {
    /// Inclusive character window an answer must fall in to be summarized.
    pub length_window: (usize, usize),
    pub target: SummaryTarget,
    /// Weight of cosine similarity inside semantic overlap.
    pub w_cos: f64,
    /// Skip-bigram distance bound for ROUGE-S/SU; `None` is unlimited.
    pub max_skip: Option<usize>,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        SummaryOptions {
            length_window: (350, 800),
            target: SummaryTarget::Answer,
            w_cos: 0.5,
            max_skip: None,
        }
    }
}

/// Mean relevance metrics of one state's summarized answers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateSummaryMetrics {
    pub cosine: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub rouge_w: f64,
    pub rouge_s: f64,
    pub rouge_su: f64,
    pub bleu: f64,
    pub semantic_overlap: f64,
    pub evaluated: usize,
}

impl StateSummaryMetrics {
    /// Mean of the eight relevance metrics (semantic overlap excluded, being
    /// derived from two of them).
    pub fn mean_relevance(&self) -> f64 {
        (self.cosine
            + self.rouge1
            + self.rouge2
            + self.rouge_l
            + self.rouge_w
            + self.rouge_s
            + self.rouge_su
            + self.bleu)
            / 8.0
    }
}

/// Per-state summary evaluation; states with no answer inside the length
/// window carry `None`.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryEvaluation {
    pub options: SummaryOptions,
    pub per_state: BTreeMap<UsState, Option<StateSummaryMetrics>>,
}

impl SummaryEvaluation {
    /// States ordered best-first by mean relevance; unevaluated states sink
    /// to the end.
    pub fn ranked(&self) -> Vec<(UsState, Option<f64>)> {
        let mut rows: Vec<(UsState, Option<f64>)> = self
            .per_state
            .iter()
            .map(|(&s, m)| (s, m.as_ref().map(StateSummaryMetrics::mean_relevance)))
            .collect();
        rows.sort_by(|a, b| match (a.1, b.1) {
            (Some(x), Some(y)) => y.partial_cmp(&x).unwrap().then(a.0.cmp(&b.0)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.0.cmp(&b.0),
        });
        rows
    }
}

/// Summarize every eligible answer and average the relevance metrics per
/// state. Answers inside the character window are summarized at the
/// reduction ratio of their whitespace token count, then compared to the
/// configured target text.
pub fn evaluate_state_summaries(
    corpus: &FaqCorpus,
    options: &SummaryOptions,
) -> Result<SummaryEvaluation> {
    let (lo, hi) = options.length_window;
    if lo > hi {
        return Err(Error::InvalidParameter {
            name: "length window",
            message: format!("lower bound {lo} exceeds upper bound {hi}"),
        });
    }
    let states: Vec<UsState> = corpus.states().collect();
    let scored: Vec<(UsState, Option<StateSummaryMetrics>)> = states
        .par_iter()
        .map(|&state| {
            let mut sums = [0.0f64; 8];
            let mut evaluated = 0usize;
            for &i in corpus.state_entries(state) {
                let entry = &corpus.entries()[i];
                let answer_chars = entry.answer.chars().count();
                if answer_chars < lo || answer_chars > hi {
                    continue;
                }
                let tokens = entry.answer.split_whitespace().count();
                let ratio = reduction_ratio(tokens);
                let summary = extractive_summary(&entry.answer, ratio)
                    .expect("reduction ratios are in (0, 1]");
                let reference = match options.target {
                    SummaryTarget::Answer => entry.answer.as_str(),
                    SummaryTarget::Question => entry.question.as_str(),
                };
                sums[0] += cosine_similarity(reference, &summary);
                sums[1] += rouge_n(reference, &summary, 1);
                sums[2] += rouge_n(reference, &summary, 2);
                sums[3] += rouge_l(reference, &summary);
                sums[4] += rouge_w(reference, &summary, 1.2);
                sums[5] += rouge_s(reference, &summary, options.max_skip);
                sums[6] += rouge_su(reference, &summary, options.max_skip);
                sums[7] += bleu(reference, &summary, 4);
                evaluated += 1;
            }
            if evaluated == 0 {
                return (state, None);
            }
            let n = evaluated as f64;
            let cosine = sums[0] / n;
            let rouge1 = sums[1] / n;
            (
                state,
                Some(StateSummaryMetrics {
                    cosine,
                    rouge1,
                    rouge2: sums[2] / n,
                    rouge_l: sums[3] / n,
                    rouge_w: sums[4] / n,
                    rouge_s: sums[5] / n,
                    rouge_su: sums[6] / n,
                    bleu: sums[7] / n,
                    semantic_overlap: semantic_overlap(cosine, rouge1, options.w_cos),
                    evaluated,
                }),
            )
        })
        .collect();
    Ok(SummaryEvaluation {
        options: options.clone(),
        per_state: scored.into_iter().collect(),
    })
}
