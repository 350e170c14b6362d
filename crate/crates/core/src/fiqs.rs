//! Component normalization, the voter and developer composite indices, and
//! leader / mainstream / laggard classification.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::UsState;

/// Min-max normalize per-state values to [0, 1]. With `invert`, lower raw
/// values score higher (for metrics where smaller is better, like grade
/// levels). A constant column maps to 0.5 everywhere.
pub fn min_max_normalize(
    values: &BTreeMap<UsState, f64>,
    invert: bool,
) -> Result<BTreeMap<UsState, f64>> {
    if values.len() < 2 {
        return Err(Error::TooFewStates(values.len()));
    }
    let min = values.values().copied().fold(f64::INFINITY, f64::min);
    let max = values.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    Ok(values
        .iter()
        .map(|(&state, &v)| {
            let normalized = if span == 0.0 {
                0.5
            } else if invert {
                (max - v) / span
            } else {
                (v - min) / span
            };
            (state, normalized)
        })
        .collect())
}

/// One state's normalized component scores. `prompt_relevance` stays empty
/// until a predictions file is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ComponentScores {
    pub readability: Option<f64>,
    pub summarization: Option<f64>,
    pub sentiment: Option<f64>,
    pub topic: Option<f64>,
    pub prompt_relevance: Option<f64>,
}

fn require(value: Option<f64>, name: &'static str) -> Result<f64> {
    value.ok_or(Error::MissingComponent(name))
}

/// Equal-weight mean of readability, summarization, sentiment, and topic.
pub fn fiqs_voter(c: &ComponentScores) -> Result<f64> {
    let readability = require(c.readability, "readability")?;
    let summarization = require(c.summarization, "summarization")?;
    let sentiment = require(c.sentiment, "sentiment")?;
    let topic = require(c.topic, "topic")?;
    Ok(0.25 * (readability + summarization + sentiment + topic))
}

/// Equal-weight mean of the four voter components plus prompt relevance.
pub fn fiqs_developer(c: &ComponentScores) -> Result<f64> {
    let readability = require(c.readability, "readability")?;
    let summarization = require(c.summarization, "summarization")?;
    let sentiment = require(c.sentiment, "sentiment")?;
    let topic = require(c.topic, "topic")?;
    let relevance = c.prompt_relevance.ok_or(Error::MissingPredictions)?;
    Ok(0.2 * (readability + summarization + sentiment + topic + relevance))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Leader,
    Mainstream,
    Laggard,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Leader => "leader",
            Label::Mainstream => "mainstream",
            Label::Laggard => "laggard",
        }
    }
}

/// Population mean and standard deviation with the sigma multiplier used for
/// the cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationStats {
    pub mean: f64,
    pub std_dev: f64,
    pub k: u8,
}

impl PopulationStats {
    pub fn cutoff_high(&self) -> f64 {
        self.mean + self.k as f64 * self.std_dev
    }

    pub fn cutoff_low(&self) -> f64 {
        self.mean - self.k as f64 * self.std_dev
    }
}

/// Mean and population standard deviation of the score table.
pub fn population_stats(scores: &BTreeMap<UsState, f64>, k: u8) -> Result<PopulationStats> {
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidParameter {
            name: "sigma multiplier",
            message: format!("must be 1 or 2, got {k}"),
        });
    }
    if scores.len() < 2 {
        return Err(Error::TooFewStates(scores.len()));
    }
    let n = scores.len() as f64;
    let mean = scores.values().sum::<f64>() / n;
    let variance = scores.values().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(PopulationStats {
        mean,
        std_dev: variance.sqrt(),
        k,
    })
}

/// Label one score against the cutoffs; ties at the cutoffs take the extreme
/// label.
pub fn label_for(score: f64, stats: &PopulationStats) -> Label {
    if score >= stats.cutoff_high() {
        Label::Leader
    } else if score <= stats.cutoff_low() {
        Label::Laggard
    } else {
        Label::Mainstream
    }
}

/// Classify every state at mean +/- k sigma.
pub fn classify(
    scores: &BTreeMap<UsState, f64>,
    k: u8,
) -> Result<(BTreeMap<UsState, Label>, PopulationStats)> {
    let stats = population_stats(scores, k)?;
    let labels = scores
        .iter()
        .map(|(&s, &v)| (s, label_for(v, &stats)))
        .collect();
    Ok((labels, stats))
}

/// One state's composite row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScorecardRow {
    pub fiqs_voter: f64,
    pub label_voter: Label,
    pub fiqs_developer: Option<f64>,
    pub label_developer: Option<Label>,
}

/// The full scorecard. Developer columns are present only when every state
/// carried a prompt-relevance score.
#[derive(Debug, Clone, Serialize)]
pub struct StateScorecard {
    pub rows: BTreeMap<UsState, ScorecardRow>,
    pub voter_stats: PopulationStats,
    pub developer_stats: Option<PopulationStats>,
}

/// Compose both indices from per-state components and classify them.
pub fn build_scorecard(
    components: &BTreeMap<UsState, ComponentScores>,
    k: u8,
) -> Result<StateScorecard> {
    let voter: BTreeMap<UsState, f64> = components
        .iter()
        .map(|(&state, c)| Ok((state, fiqs_voter(c)?)))
        .collect::<Result<_>>()?;
    let (voter_labels, voter_stats) = classify(&voter, k)?;

    let with_relevance = components
        .values()
        .filter(|c| c.prompt_relevance.is_some())
        .count();
    let (developer, developer_stats) = if with_relevance == components.len() {
        let scores: BTreeMap<UsState, f64> = components
            .iter()
            .map(|(&state, c)| Ok((state, fiqs_developer(c)?)))
            .collect::<Result<_>>()?;
        let (labels, stats) = classify(&scores, k)?;
        (Some((scores, labels)), Some(stats))
    } else {
        (None, None)
    };

    let rows = components
        .keys()
        .map(|&state| {
            let row = ScorecardRow {
                fiqs_voter: voter[&state],
                label_voter: voter_labels[&state],
                fiqs_developer: developer.as_ref().map(|(s, _)| s[&state]),
                label_developer: developer.as_ref().map(|(_, l)| l[&state]),
            };
            (state, row)
        })
        .collect();
    Ok(StateScorecard {
        rows,
        voter_stats,
        developer_stats,
    })
}
