//! Independent reference implementations used to check the library. These
//! deliberately use the most direct route available (exhaustive enumeration,
//! used-flag matching, naive recursion) and share nothing with the library
//! internals beyond published data tables.

#![allow(dead_code)]

/// Gestalt ratio by brute-force longest-common-block search: scan every
/// (i, j) start pair, extend the run, keep the first longest, recurse on
/// both flanks.
pub fn gestalt_ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let matched = matched_block_total(&a, &b);
    2.0 * matched as f64 / (a.len() + b.len()) as f64
}

fn matched_block_total(a: &[char], b: &[char]) -> usize {
    let (mut best_i, mut best_j, mut best_len) = (0, 0, 0);
    for i in 0..a.len() {
        for j in 0..b.len() {
            let mut k = 0;
            while i + k < a.len() && j + k < b.len() && a[i + k] == b[j + k] {
                k += 1;
            }
            if k > best_len {
                best_i = i;
                best_j = j;
                best_len = k;
            }
        }
    }
    if best_len == 0 {
        return 0;
    }
    matched_block_total(&a[..best_i], &b[..best_j])
        + best_len
        + matched_block_total(&a[best_i + best_len..], &b[best_j + best_len..])
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

/// Clipped n-gram matches by used-flag assignment: each candidate n-gram
/// consumes at most one unused identical reference n-gram.
fn ngram_assignment(reference: &[&str], candidate: &[&str], n: usize) -> (usize, usize, usize) {
    let ref_grams: Vec<&[&str]> = if reference.len() >= n {
        reference.windows(n).collect()
    } else {
        Vec::new()
    };
    let cand_grams: Vec<&[&str]> = if candidate.len() >= n {
        candidate.windows(n).collect()
    } else {
        Vec::new()
    };
    let mut used = vec![false; ref_grams.len()];
    let mut matches = 0;
    for cg in &cand_grams {
        if let Some(slot) = (0..ref_grams.len()).find(|&p| !used[p] && ref_grams[p] == *cg) {
            used[slot] = true;
            matches += 1;
        }
    }
    (matches, cand_grams.len(), ref_grams.len())
}

pub fn rouge_n_oracle(reference: &[&str], candidate: &[&str], n: usize) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    if reference == candidate {
        return 1.0;
    }
    let (matches, cand_total, ref_total) = ngram_assignment(reference, candidate, n);
    f1(matches as f64, cand_total as f64, ref_total as f64)
}

/// LCS length by exhaustive subsequence enumeration (inputs stay tiny).
fn lcs_by_enumeration(a: &[&str], b: &[&str]) -> usize {
    assert!(a.len() <= 16, "enumeration oracle needs short inputs");
    let mut best = 0;
    for mask in 0u32..(1 << a.len()) {
        let picked: Vec<&str> = (0..a.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| a[i])
            .collect();
        if picked.len() > best && is_subsequence(&picked, b) {
            best = picked.len();
        }
    }
    best
}

fn is_subsequence(needle: &[&str], haystack: &[&str]) -> bool {
    let mut pos = 0;
    for item in needle {
        match haystack[pos..].iter().position(|h| h == item) {
            Some(offset) => pos += offset + 1,
            None => return false,
        }
    }
    true
}

pub fn rouge_l_oracle(reference: &[&str], candidate: &[&str]) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    if reference == candidate {
        return 1.0;
    }
    let lcs = lcs_by_enumeration(reference, candidate) as f64;
    f1(lcs, candidate.len() as f64, reference.len() as f64)
}

/// All monotone alignments between two token lists, scored by the weighted
/// run decomposition `sum f(run length)`, maximized by direct recursion.
fn wlcs_by_enumeration(a: &[&str], b: &[&str], exponent: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        a: &[&str],
        b: &[&str],
        ai: usize,
        bi: usize,
        run: usize,
        score: f64,
        exponent: f64,
        best: &mut f64,
    ) {
        let f = |k: usize| (k as f64).powf(exponent);
        let settled = score + f(run);
        if settled > *best {
            *best = settled;
        }
        for i in ai..a.len() {
            for j in bi..b.len() {
                if a[i] != b[j] {
                    continue;
                }
                let extends = run > 0 && i == ai && j == bi;
                let (new_score, new_run) = if extends {
                    (score, run + 1)
                } else {
                    (score + f(run), 1)
                };
                recurse(a, b, i + 1, j + 1, new_run, new_score, exponent, best);
            }
        }
    }
    let mut best = 0.0;
    recurse(a, b, 0, 0, 0, 0.0, exponent, &mut best);
    best
}

pub fn rouge_w_oracle(reference: &[&str], candidate: &[&str], exponent: f64) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    if reference == candidate {
        return 1.0;
    }
    let wlcs = wlcs_by_enumeration(reference, candidate, exponent);
    let f = |k: f64| k.powf(exponent);
    let f_inv = |x: f64| x.powf(1.0 / exponent);
    let r = f_inv(wlcs / f(reference.len() as f64));
    let p = f_inv(wlcs / f(candidate.len() as f64));
    if p + r == 0.0 {
        return 0.0;
    }
    2.0 * p * r / (p + r)
}

fn skip_bigrams<'a>(tokens: &[&'a str], max_skip: Option<usize>) -> Vec<(&'a str, &'a str)> {
    let mut pairs = Vec::new();
    for i in 0..tokens.len() {
        for j in (i + 1)..tokens.len() {
            if let Some(limit) = max_skip {
                if j - i - 1 > limit {
                    continue;
                }
            }
            pairs.push((tokens[i], tokens[j]));
        }
    }
    pairs
}

fn pair_assignment(reference: &[(&str, &str)], candidate: &[(&str, &str)]) -> usize {
    let mut used = vec![false; reference.len()];
    let mut matches = 0;
    for cg in candidate {
        if let Some(slot) = (0..reference.len()).find(|&p| !used[p] && reference[p] == *cg) {
            used[slot] = true;
            matches += 1;
        }
    }
    matches
}

pub fn rouge_s_oracle(reference: &[&str], candidate: &[&str], max_skip: Option<usize>) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    if reference == candidate {
        return 1.0;
    }
    let ref_pairs = skip_bigrams(reference, max_skip);
    let cand_pairs = skip_bigrams(candidate, max_skip);
    let matches = pair_assignment(&ref_pairs, &cand_pairs);
    f1(
        matches as f64,
        cand_pairs.len() as f64,
        ref_pairs.len() as f64,
    )
}

pub fn rouge_su_oracle(reference: &[&str], candidate: &[&str], max_skip: Option<usize>) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    if reference == candidate {
        return 1.0;
    }
    let ref_pairs = skip_bigrams(reference, max_skip);
    let cand_pairs = skip_bigrams(candidate, max_skip);
    let pair_matches = pair_assignment(&ref_pairs, &cand_pairs);
    let (uni_matches, cand_uni, ref_uni) = ngram_assignment(reference, candidate, 1);
    f1(
        (pair_matches + uni_matches) as f64,
        (cand_pairs.len() + cand_uni) as f64,
        (ref_pairs.len() + ref_uni) as f64,
    )
}

pub fn bleu_oracle(reference: &[&str], candidate: &[&str], max_n: usize) -> f64 {
    if candidate.is_empty() {
        return 0.0;
    }
    let order = max_n.min(candidate.len());
    let mut log_sum = 0.0;
    for n in 1..=order {
        let (matches, cand_total, _) = ngram_assignment(reference, candidate, n);
        let precision = if matches == 0 {
            1e-9
        } else {
            matches as f64 / cand_total as f64
        };
        log_sum += precision.ln();
    }
    let brevity = if candidate.len() < reference.len() {
        (1.0 - reference.len() as f64 / candidate.len() as f64).exp()
    } else {
        1.0
    };
    brevity * (log_sum / order as f64).exp()
}

/// Jensen-Shannon divergence (base 2) by direct term-by-term summation.
pub fn js_divergence_oracle(p: &[f64], q: &[f64]) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let mut total = 0.0;
    for i in 0..p.len() {
        let m = 0.5 * (p[i] + q[i]);
        if p[i] > 0.0 {
            total += 0.5 * p[i] * (p[i] / m).ln() / ln2;
        }
        if q[i] > 0.0 {
            total += 0.5 * q[i] * (q[i] / m).ln() / ln2;
        }
    }
    total
}

/// Mean silhouette by naive recomputation over labeled points.
pub fn silhouette_oracle(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = points.len();
    let distinct: std::collections::HashSet<usize> = labels.iter().copied().collect();
    if n == 0 || distinct.len() < 2 {
        return 0.0;
    }
    let dist = |x: &[f64], y: &[f64]| -> f64 {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        let own_size = labels.iter().filter(|&&l| l == own).count();
        if own_size < 2 {
            continue;
        }
        let mut a = 0.0;
        for j in 0..n {
            if j != i && labels[j] == own {
                a += dist(&points[i], &points[j]);
            }
        }
        a /= (own_size - 1) as f64;
        let mut b = f64::INFINITY;
        for &other in &distinct {
            if other == own {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == other).collect();
            if members.is_empty() {
                continue;
            }
            let mean = members
                .iter()
                .map(|&j| dist(&points[i], &points[j]))
                .sum::<f64>()
                / members.len() as f64;
            b = b.min(mean);
        }
        if a.max(b) > 0.0 {
            total += (b - a) / a.max(b);
        }
    }
    total / n as f64
}

/// Straight-line reimplementation of the sentiment rules, sharing only the
/// published data tables (lexicon, boosters, negations) with the library.
pub fn sentiment_compound_oracle(text: &str) -> f64 {
    use fiqs_core::sentiment::{lexicon, BOOSTERS, CAPS_EMPHASIS, NEGATIONS};

    let raw_tokens: Vec<&str> = text
        .split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'')
                .trim_matches('\'')
        })
        .filter(|w| !w.is_empty())
        .collect();
    if raw_tokens.is_empty() {
        return 0.0;
    }
    let lower: Vec<String> = raw_tokens.iter().map(|t| t.to_lowercase()).collect();

    let all_caps = |t: &str| {
        t.chars().any(|c| c.is_alphabetic())
            && t.chars()
                .filter(|c| c.is_alphabetic())
                .all(|c| c.is_uppercase())
    };
    let caps_count = raw_tokens.iter().filter(|t| all_caps(t)).count();
    let alpha_count = raw_tokens
        .iter()
        .filter(|t| t.chars().any(char::is_alphabetic))
        .count();
    let mixed_case = caps_count > 0 && caps_count < alpha_count;

    let mut valences = Vec::with_capacity(raw_tokens.len());
    for i in 0..raw_tokens.len() {
        let base = match lexicon().valence(&lower[i]) {
            Some(v) => v,
            None => {
                valences.push(0.0);
                continue;
            }
        };
        let mut v = base;
        if all_caps(raw_tokens[i]) && mixed_case {
            v += if base > 0.0 {
                CAPS_EMPHASIS
            } else {
                -CAPS_EMPHASIS
            };
        }
        for (distance, decay) in [(1usize, 1.0), (2, 0.95), (3, 0.9)] {
            if i < distance {
                break;
            }
            let prev = i - distance;
            if let Some(&(_, raw)) = BOOSTERS.iter().find(|(w, _)| *w == lower[prev]) {
                let mut scalar = if base < 0.0 { -raw } else { raw };
                if all_caps(raw_tokens[prev]) && mixed_case {
                    scalar += if base > 0.0 {
                        CAPS_EMPHASIS
                    } else {
                        -CAPS_EMPHASIS
                    };
                }
                v += scalar * decay;
            }
            if NEGATIONS.contains(&lower[prev].as_str()) {
                v *= -0.74;
            }
        }
        valences.push(v);
    }

    if let Some(but) = lower.iter().position(|t| t == "but") {
        for (i, v) in valences.iter_mut().enumerate() {
            match i.cmp(&but) {
                std::cmp::Ordering::Less => *v *= 0.5,
                std::cmp::Ordering::Greater => *v *= 1.5,
                std::cmp::Ordering::Equal => {}
            }
        }
    }

    let exclaims = text.matches('!').count().min(4) as f64 * 0.292;
    let questions = text.matches('?').count();
    let question_amp = if questions > 1 {
        (questions as f64 * 0.18).min(0.96)
    } else {
        0.0
    };
    let emphasis = exclaims + question_amp;

    let mut x: f64 = valences.iter().sum();
    if x > 0.0 {
        x += emphasis;
    } else if x < 0.0 {
        x -= emphasis;
    }
    (x / (x * x + 15.0).sqrt()).clamp(-1.0, 1.0)
}
