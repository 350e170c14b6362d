//! Lexicon- and rule-based sentiment scoring with state-level aggregation.

use std::collections::{BTreeMap, HashMap};

use once_cell::sync::Lazy;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{FaqCorpus, Scope};
use crate::state::UsState;

/// Vendored valence table, tab-separated `token<TAB>mean valence` on a
/// -4..+4 scale.
static LEXICON_FILE: &str = include_str!("../data/sentiment_lexicon.tsv");

/// SHA-256 of the vendored lexicon; loading verifies the file against it.
pub const LEXICON_SHA256: &str = "beb1fa16c391fe4b7c436aed62260ace816c6844f425675d6369c668a59a5ea8";

/// Degree-modifier scalar applied by booster words.
pub const BOOSTER_SCALAR: f64 = 0.293;
/// Valence multiplier applied by a negation within the look-back window.
pub const NEGATION_SCALAR: f64 = -0.74;
/// Emphasis added to a valence for an ALL-CAPS word in mixed-case text.
pub const CAPS_EMPHASIS: f64 = 0.733;
/// Emphasis per exclamation mark (at most four count).
pub const EXCLAIM_EMPHASIS: f64 = 0.292;
/// The compound normalizer denominator constant.
pub const NORMALIZER_ALPHA: f64 = 15.0;
/// How many preceding tokens negations and boosters look back over.
pub const LOOKBACK_WINDOW: usize = 3;

/// Words that intensify (+) or dampen (-) the next sentiment-bearing word.
pub static BOOSTERS: &[(&str, f64)] = &[
    ("absolutely", BOOSTER_SCALAR),
    ("amazingly", BOOSTER_SCALAR),
    ("awfully", BOOSTER_SCALAR),
    ("completely", BOOSTER_SCALAR),
    ("considerably", BOOSTER_SCALAR),
    ("decidedly", BOOSTER_SCALAR),
    ("deeply", BOOSTER_SCALAR),
    ("enormously", BOOSTER_SCALAR),
    ("entirely", BOOSTER_SCALAR),
    ("especially", BOOSTER_SCALAR),
    ("exceptionally", BOOSTER_SCALAR),
    ("extremely", BOOSTER_SCALAR),
    ("fully", BOOSTER_SCALAR),
    ("greatly", BOOSTER_SCALAR),
    ("highly", BOOSTER_SCALAR),
    ("hugely", BOOSTER_SCALAR),
    ("incredibly", BOOSTER_SCALAR),
    ("intensely", BOOSTER_SCALAR),
    ("more", BOOSTER_SCALAR),
    ("most", BOOSTER_SCALAR),
    ("particularly", BOOSTER_SCALAR),
    ("purely", BOOSTER_SCALAR),
    ("quite", BOOSTER_SCALAR),
    ("really", BOOSTER_SCALAR),
    ("remarkably", BOOSTER_SCALAR),
    ("so", BOOSTER_SCALAR),
    ("substantially", BOOSTER_SCALAR),
    ("thoroughly", BOOSTER_SCALAR),
    ("totally", BOOSTER_SCALAR),
    ("tremendously", BOOSTER_SCALAR),
    ("unusually", BOOSTER_SCALAR),
    ("utterly", BOOSTER_SCALAR),
    ("very", BOOSTER_SCALAR),
    ("almost", -BOOSTER_SCALAR),
    ("barely", -BOOSTER_SCALAR),
    ("hardly", -BOOSTER_SCALAR),
    ("less", -BOOSTER_SCALAR),
    ("little", -BOOSTER_SCALAR),
    ("marginally", -BOOSTER_SCALAR),
    ("occasionally", -BOOSTER_SCALAR),
    ("partly", -BOOSTER_SCALAR),
    ("scarcely", -BOOSTER_SCALAR),
    ("slightly", -BOOSTER_SCALAR),
    ("somewhat", -BOOSTER_SCALAR),
];

/// Tokens that flip the valence of a nearby sentiment word.
pub static NEGATIONS: &[&str] = &[
    "aint",
    "ain't",
    "arent",
    "aren't",
    "cannot",
    "cant",
    "can't",
    "didnt",
    "didn't",
    "doesnt",
    "doesn't",
    "dont",
    "don't",
    "hadnt",
    "hadn't",
    "hasnt",
    "hasn't",
    "havent",
    "haven't",
    "isnt",
    "isn't",
    "mightnt",
    "mightn't",
    "mustnt",
    "mustn't",
    "neither",
    "never",
    "no",
    "nobody",
    "none",
    "nope",
    "nor",
    "not",
    "nothing",
    "nowhere",
    "rarely",
    "seldom",
    "shouldnt",
    "shouldn't",
    "wasnt",
    "wasn't",
    "werent",
    "weren't",
    "wont",
    "won't",
    "wouldnt",
    "wouldn't",
];

/// The word -> valence table.
pub struct Lexicon {
    map: HashMap<&'static str, f64>,
}

impl Lexicon {
    pub fn valence(&self, token: &str) -> Option<f64> {
        self.map.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.map.keys().copied()
    }
}

static LEXICON: Lazy<Lexicon> = Lazy::new(|| {
    let digest = Sha256::digest(LEXICON_FILE.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(
        hex, LEXICON_SHA256,
        "bundled sentiment lexicon is corrupted"
    );
    let map = LEXICON_FILE
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let (token, valence) = line
                .split_once('\t')
                .expect("lexicon line is token<TAB>valence");
            (
                token,
                valence
                    .trim()
                    .parse::<f64>()
                    .expect("lexicon valence is a number"),
            )
        })
        .collect();
    Lexicon { map }
});

/// The bundled lexicon, checksum-verified on first use.
pub fn lexicon() -> &'static Lexicon {
    &LEXICON
}

fn booster_scalar(token: &str) -> Option<f64> {
    BOOSTERS.iter().find(|(w, _)| *w == token).map(|&(_, s)| s)
}

fn is_negation(token: &str) -> bool {
    NEGATIONS.contains(&token)
}

/// Positive/negative/neutral proportions and the compound score in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SentimentScores {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
    pub compound: f64,
}

/// `x / sqrt(x^2 + 15)`, clamped to [-1, 1].
pub fn normalize_valence(x: f64) -> f64 {
    (x / (x * x + NORMALIZER_ALPHA).sqrt()).clamp(-1.0, 1.0)
}

/// Whitespace tokens with surrounding punctuation stripped; internal
/// apostrophes and hyphens survive ("can't", "voter-id").
fn sentiment_tokens(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric() && c != '\''))
        .map(|w| w.trim_matches('\''))
        .filter(|w| !w.is_empty())
        .collect()
}

fn is_all_caps(token: &str) -> bool {
    let mut has_alpha = false;
    for c in token.chars() {
        if c.is_alphabetic() {
            has_alpha = true;
            if !c.is_uppercase() {
                return false;
            }
        }
    }
    has_alpha
}

/// Score one text with the lexicon and rule set.
///
/// Rules applied per sentiment-bearing token: ALL-CAPS emphasis (when the
/// text mixes case), degree modifiers scanned up to three tokens back with
/// 0.95/0.9 distance decay, and negation flips over the same window. A
/// leading "but" reweights the clause halves 0.5/1.5. The valence sum is
/// amplified by exclamation marks (0.292 each, four max) and by two or more
/// question marks (0.18 each, capped at 0.96), then normalized by
/// `x / sqrt(x^2 + 15)`.
pub fn score_text(text: &str) -> SentimentScores {
    let lexicon = lexicon();
    let tokens = sentiment_tokens(text);
    if tokens.is_empty() {
        return SentimentScores {
            positive: 0.0,
            negative: 0.0,
            neutral: 1.0,
            compound: 0.0,
        };
    }
    let lowered: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let cap_diff = {
        let caps = tokens.iter().filter(|t| is_all_caps(t)).count();
        let alpha_tokens = tokens
            .iter()
            .filter(|t| t.chars().any(char::is_alphabetic))
            .count();
        caps > 0 && caps < alpha_tokens
    };

    let mut valences = vec![0.0f64; tokens.len()];
    for i in 0..tokens.len() {
        let Some(base) = lexicon.valence(&lowered[i]) else {
            continue;
        };
        let mut valence = base;
        if is_all_caps(tokens[i]) && cap_diff {
            valence += CAPS_EMPHASIS.copysign(base);
        }
        for distance in 1..=LOOKBACK_WINDOW {
            if distance > i {
                break;
            }
            let prev = i - distance;
            if let Some(raw_scalar) = booster_scalar(&lowered[prev]) {
                let mut scalar = raw_scalar;
                if base < 0.0 {
                    scalar = -scalar;
                }
                if is_all_caps(tokens[prev]) && cap_diff {
                    if base > 0.0 {
                        scalar += CAPS_EMPHASIS;
                    } else {
                        scalar -= CAPS_EMPHASIS;
                    }
                }
                match distance {
                    2 => scalar *= 0.95,
                    3 => scalar *= 0.9,
                    _ => {}
                }
                valence += scalar;
            }
            if is_negation(&lowered[prev]) {
                valence *= NEGATION_SCALAR;
            }
        }
        valences[i] = valence;
    }

    if let Some(but_index) = lowered.iter().position(|t| t == "but") {
        for (i, v) in valences.iter_mut().enumerate() {
            if i < but_index {
                *v *= 0.5;
            } else if i > but_index {
                *v *= 1.5;
            }
        }
    }

    let exclaim = text.chars().filter(|&c| c == '!').count().min(4) as f64 * EXCLAIM_EMPHASIS;
    let questions = text.chars().filter(|&c| c == '?').count();
    let question_amp = if questions > 1 {
        (questions as f64 * 0.18).min(0.96)
    } else {
        0.0
    };
    let punct_emphasis = exclaim + question_amp;

    let mut sum: f64 = valences.iter().sum();
    if sum > 0.0 {
        sum += punct_emphasis;
    } else if sum < 0.0 {
        sum -= punct_emphasis;
    }
    let compound = normalize_valence(sum);

    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neutral_count = 0.0;
    for &v in &valences {
        if v > 0.0 {
            pos_sum += v + 1.0;
        } else if v < 0.0 {
            neg_sum += v - 1.0;
        } else {
            neutral_count += 1.0;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += punct_emphasis;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= punct_emphasis;
    }
    let total = pos_sum + neg_sum.abs() + neutral_count;
    SentimentScores {
        positive: pos_sum / total,
        negative: neg_sum.abs() / total,
        neutral: neutral_count / total,
        compound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Classify a compound score: above 0.01 positive, below -0.01 negative,
/// the closed band between them neutral.
pub fn classify(compound: f64) -> Polarity {
    if compound > 0.01 {
        Polarity::Positive
    } else if compound < -0.01 {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}

/// One state's aggregated sentiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSentiment {
    pub average_compound: f64,
    pub positive_count: usize,
    pub negative_count: usize,
    pub neutral_count: usize,
    pub positive_pct: f64,
    pub negative_pct: f64,
    pub neutral_pct: f64,
    pub positive_compound_sum: f64,
    pub negative_compound_sum: f64,
    pub neutral_compound_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateSentimentReport {
    pub scope: Scope,
    pub per_state: BTreeMap<UsState, StateSentiment>,
}

impl StateSentimentReport {
    /// States ordered by average compound, most positive first.
    pub fn ranked(&self) -> Vec<(UsState, f64)> {
        let mut rows: Vec<(UsState, f64)> = self
            .per_state
            .iter()
            .map(|(&s, r)| (s, r.average_compound))
            .collect();
        rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        rows
    }
}

/// Score every entry's scope text and aggregate per state.
pub fn state_report(corpus: &FaqCorpus, scope: Scope) -> StateSentimentReport {
    let states: Vec<UsState> = corpus.states().collect();
    let per_state = states
        .par_iter()
        .map(|&state| {
            let indices = corpus.state_entries(state);
            let mut compound_total = 0.0;
            let mut counts = [0usize; 3];
            let mut sums = [0.0f64; 3];
            for &i in indices {
                let compound = score_text(&scope.text_of(&corpus.entries()[i])).compound;
                compound_total += compound;
                let class = match classify(compound) {
                    Polarity::Positive => 0,
                    Polarity::Negative => 1,
                    Polarity::Neutral => 2,
                };
                counts[class] += 1;
                sums[class] += compound;
            }
            let n = indices.len();
            let pct = |c: usize| 100.0 * c as f64 / n as f64;
            let report = StateSentiment {
                average_compound: compound_total / n as f64,
                positive_count: counts[0],
                negative_count: counts[1],
                neutral_count: counts[2],
                positive_pct: pct(counts[0]),
                negative_pct: pct(counts[1]),
                neutral_pct: pct(counts[2]),
                positive_compound_sum: sums[0],
                negative_compound_sum: sums[1],
                neutral_compound_sum: sums[2],
            };
            (state, report)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    StateSentimentReport { scope, per_state }
}
