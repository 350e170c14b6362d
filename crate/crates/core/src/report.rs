//! CSV and JSON emitters for every pipeline stage. All emitters write rows
//! in state-code order with fixed number formatting, so identical inputs
//! produce byte-identical files.

use std::io::Write;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{CorpusStats, FaqCorpus, Removal};
use crate::error::{Error, Result};
use crate::fiqs::{ComponentScores, StateScorecard};
use crate::readability::ReadabilityReport;
use crate::sentiment::StateSentimentReport;
use crate::specificity::SpecificityReport;
use crate::state::UsState;
use crate::summarize::SummaryEvaluation;
use crate::topics::{StateTopicScore, TopicCountDiagnostics, TopicScorecard};

fn io_error(e: std::io::Error) -> Error {
    Error::Io {
        path: "<writer>".into(),
        source: e,
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io_error(io),
        other => Error::InvalidParameter {
            name: "csv",
            message: format!("{other:?}"),
        },
    }
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

/// Canonical corpus JSON: the flat entry array, pretty-printed.
pub fn write_corpus_json<W: Write>(corpus: &FaqCorpus, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, corpus.entries()).map_err(|e| {
        Error::InvalidParameter {
            name: "corpus json",
            message: e.to_string(),
        }
    })?;
    w.write_all(b"\n").map_err(io_error)
}

/// Dedup removal log. Indices refer to the load order of the corpus the
/// dedup ran over, not the canonical output order.
pub fn write_removals_csv<W: Write>(removals: &[Removal], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["State", "Kept Index", "Dropped Index", "Ratio"])
        .map_err(csv_error)?;
    for removal in removals {
        out.write_record([
            removal.state.code(),
            &removal.kept_index.to_string(),
            &removal.dropped_index.to_string(),
            &f3(removal.ratio),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Per-state counts and question/answer length statistics.
pub fn write_stats_csv<W: Write>(stats: &CorpusStats, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "State",
        "Official QA Pairs",
        "Non-Profit QA Pairs",
        "Question Average",
        "Question Longest",
        "Question Shortest",
        "Answer Average",
        "Answer Longest",
        "Answer Shortest",
    ])
    .map_err(csv_error)?;
    for (state, row) in &stats.per_state {
        out.write_record([
            state.name(),
            &row.official_count.to_string(),
            &row.non_profit_count.to_string(),
            &f3(row.q_avg),
            &row.q_max.to_string(),
            &row.q_min.to_string(),
            &f3(row.a_avg),
            &row.a_max.to_string(),
            &row.a_min.to_string(),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// The five readability indices per state, optionally with the AVERAGE
/// column used by the composite table layout.
pub fn write_readability_csv<W: Write>(
    report: &ReadabilityReport,
    include_average: bool,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["State", "FKG", "GFI", "SI", "ARI", "CLI"];
    if include_average {
        header.push("AVERAGE");
    }
    out.write_record(&header).map_err(csv_error)?;
    for (state, ix) in &report.per_state {
        let mut row = vec![
            state.name().to_string(),
            f3(ix.fkg),
            f3(ix.gfi),
            f3(ix.smog),
            f3(ix.ari),
            f3(ix.cli),
        ];
        if include_average {
            row.push(f3(ix.average));
        }
        out.write_record(&row).map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Summary relevance metrics per state. States with no eligible answers emit
/// empty cells. `include_overlap` adds the Semantic Overlap column.
pub fn write_summary_csv<W: Write>(
    evaluation: &SummaryEvaluation,
    include_overlap: bool,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![
        "State",
        "Cosine Similarity",
        "ROUGE-1",
        "ROUGE-2",
        "ROUGE-L",
        "ROUGE-W",
        "ROUGE-S",
        "ROUGE-SU",
        "BLEU Score",
    ];
    if include_overlap {
        header.push("Semantic Overlap");
    }
    out.write_record(&header).map_err(csv_error)?;
    for (state, metrics) in &evaluation.per_state {
        let mut row = vec![state.code().to_string()];
        match metrics {
            Some(m) => {
                row.extend([
                    f3(m.cosine),
                    f3(m.rouge1),
                    f3(m.rouge2),
                    f3(m.rouge_l),
                    f3(m.rouge_w),
                    f3(m.rouge_s),
                    f3(m.rouge_su),
                    f3(m.bleu),
                ]);
                if include_overlap {
                    row.push(f3(m.semantic_overlap));
                }
            }
            None => {
                let blanks = if include_overlap { 9 } else { 8 };
                row.extend(std::iter::repeat_n(String::new(), blanks));
            }
        }
        out.write_record(&row).map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

fn topic_display(index: usize, label: &Option<String>) -> String {
    match label {
        Some(l) => format!("Topic {}: {}", index + 1, l),
        None => format!("Topic {}", index + 1),
    }
}

/// Topic quality summary: normalized components, final score, priority, and
/// the top terms.
pub fn write_topic_summary_csv<W: Write>(scorecard: &TopicScorecard, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "Topic",
        "Final Score",
        "Prevalence",
        "Coherence",
        "Distinctiveness",
        "Coverage",
        "Priority",
        "Top Terms",
    ])
    .map_err(csv_error)?;
    for topic in &scorecard.topics {
        out.write_record([
            topic_display(topic.index, &topic.label).as_str(),
            &f3(topic.final_score),
            &f3(topic.prevalence),
            &f3(topic.coherence),
            &f3(topic.distinctiveness),
            &f3(topic.coverage),
            match topic.priority {
                crate::topics::Priority::High => "high",
                crate::topics::Priority::Moderate => "moderate",
                crate::topics::Priority::Low => "low",
            },
            &topic
                .top_words
                .iter()
                .take(5)
                .cloned()
                .collect::<Vec<_>>()
                .join(", "),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Per-state topic distribution with the MEDIAN column.
pub fn write_state_topics_csv<W: Write>(
    scores: &BTreeMap<UsState, StateTopicScore>,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let k = scores
        .values()
        .next()
        .map(|s| s.topic_values.len())
        .unwrap_or(0);
    let mut header = vec!["STATE".to_string()];
    header.extend((1..=k).map(|t| format!("Topic {t}")));
    header.push("MEDIAN".to_string());
    out.write_record(&header).map_err(csv_error)?;
    for (state, score) in scores {
        let mut row = vec![state.code().to_string()];
        row.extend(score.topic_values.iter().map(|&v| f3(v)));
        row.push(f3(score.median_topic_value()));
        out.write_record(&row).map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// The raw state x topic matrix behind the distribution heatmap.
pub fn write_topic_heatmap_csv<W: Write>(
    scores: &BTreeMap<UsState, StateTopicScore>,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let k = scores
        .values()
        .next()
        .map(|s| s.topic_values.len())
        .unwrap_or(0);
    let mut header = vec!["State".to_string()];
    header.extend((1..=k).map(|t| format!("Topic {t}")));
    out.write_record(&header).map_err(csv_error)?;
    for (state, score) in scores {
        let mut row = vec![state.code().to_string()];
        row.extend(score.topic_values.iter().map(|&v| f3(v)));
        out.write_record(&row).map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Per-state topic score with its damping factors.
pub fn write_state_topic_scores_csv<W: Write>(
    scores: &BTreeMap<UsState, StateTopicScore>,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "State",
        "FAQ Count",
        "FAQ Normalization",
        "FAQ Penalty",
        "Final Score",
    ])
    .map_err(csv_error)?;
    for (state, score) in scores {
        out.write_record([
            state.code(),
            &score.faq_count.to_string(),
            &f3(score.faq_normalization),
            &f3(score.faq_penalty),
            &f3(score.final_score),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Model-selection diagnostics over the candidate topic counts.
pub fn write_topic_selection_csv<W: Write>(
    diagnostics: &[TopicCountDiagnostics],
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["K", "Perplexity", "Silhouette", "Coherence"])
        .map_err(csv_error)?;
    for d in diagnostics {
        out.write_record([
            d.k.to_string(),
            f3(d.perplexity),
            f3(d.silhouette),
            f3(d.coherence),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Per-state sentiment distribution.
pub fn write_sentiment_csv<W: Write>(report: &StateSentimentReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "State",
        "Average Compound Score",
        "Positive Count",
        "Negative Count",
        "Neutral Count",
        "Positive %",
        "Negative %",
        "Neutral %",
        "Positive Compound Score",
        "Negative Compound Score",
        "Neutral Compound Score",
    ])
    .map_err(csv_error)?;
    for (state, row) in &report.per_state {
        out.write_record([
            state.code(),
            &f3(row.average_compound),
            &row.positive_count.to_string(),
            &row.negative_count.to_string(),
            &row.neutral_count.to_string(),
            &f3(row.positive_pct),
            &f3(row.negative_pct),
            &f3(row.neutral_pct),
            &f3(row.positive_compound_sum),
            &f3(row.negative_compound_sum),
            &f3(row.neutral_compound_sum),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Generic-versus-specific counts behind the scatter plot.
pub fn write_specificity_csv<W: Write>(report: &SpecificityReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["State", "Generic Count", "Specific Count"])
        .map_err(csv_error)?;
    for (state, counts) in &report.per_state {
        out.write_record([
            state.code(),
            &counts.generic_count.to_string(),
            &counts.specific_count.to_string(),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// Normalized component scores feeding the composite indices.
pub fn write_components_csv<W: Write>(
    components: &BTreeMap<UsState, ComponentScores>,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "State",
        "Readability Score",
        "Summarization Score",
        "Sentiment Score",
        "Topic Score",
        "Prompt Relevance",
    ])
    .map_err(csv_error)?;
    let cell = |v: Option<f64>| v.map(f3).unwrap_or_default();
    for (state, c) in components {
        out.write_record([
            state.code(),
            &cell(c.readability),
            &cell(c.summarization),
            &cell(c.sentiment),
            &cell(c.topic),
            &cell(c.prompt_relevance),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

/// The composite scorecard. Developer columns are blank when prompt
/// relevance was not computed.
pub fn write_scorecard_csv<W: Write>(scorecard: &StateScorecard, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "State",
        "FIQS_voter",
        "FIQS_developer",
        "label_voter",
        "label_developer",
    ])
    .map_err(csv_error)?;
    for (state, row) in &scorecard.rows {
        out.write_record([
            state.code(),
            &f4(row.fiqs_voter),
            &row.fiqs_developer.map(f4).unwrap_or_default(),
            row.label_voter.as_str(),
            row.label_developer.map(|l| l.as_str()).unwrap_or(""),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(io_error)
}

#[derive(Serialize)]
struct StatsJson {
    mean: f64,
    std_dev: f64,
    k: u8,
    cutoff_high: f64,
    cutoff_low: f64,
}

#[derive(Serialize)]
struct FiqsStatsJson {
    voter: StatsJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    developer: Option<StatsJson>,
    note: String,
}

/// Population statistics and cutoffs for both indices.
pub fn write_fiqs_stats_json<W: Write>(scorecard: &StateScorecard, mut w: W) -> Result<()> {
    let to_json = |s: &crate::fiqs::PopulationStats| StatsJson {
        mean: s.mean,
        std_dev: s.std_dev,
        k: s.k,
        cutoff_high: s.cutoff_high(),
        cutoff_low: s.cutoff_low(),
    };
    let payload = FiqsStatsJson {
        voter: to_json(&scorecard.voter_stats),
        developer: scorecard.developer_stats.as_ref().map(to_json),
        note: if scorecard.developer_stats.is_none() {
            "developer index unavailable: no predictions file supplied".to_string()
        } else {
            String::new()
        },
    };
    serde_json::to_writer_pretty(&mut w, &payload).map_err(|e| Error::InvalidParameter {
        name: "stats json",
        message: e.to_string(),
    })?;
    w.write_all(b"\n").map_err(io_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{corpus_stats, Contributor, FaqEntry};

    fn corpus() -> FaqCorpus {
        FaqCorpus::from_entries(vec![
            FaqEntry {
                state: UsState::resolve("MI").unwrap(),
                contributor: Contributor::Official,
                source: None,
                timestamp: None,
                question: "ab1".into(),
                answer: "xy".into(),
            },
            FaqEntry {
                state: UsState::resolve("AZ").unwrap(),
                contributor: Contributor::NonProfit,
                source: None,
                timestamp: None,
                question: "q".into(),
                answer: "a".into(),
            },
        ])
    }

    #[test]
    fn stats_csv_shape() {
        let stats = corpus_stats(&corpus());
        let mut buffer = Vec::new();
        write_stats_csv(&stats, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(
            lines[0].starts_with("State,Official QA Pairs,Non-Profit QA Pairs,Question Average")
        );
        // AZ sorts before MI
        assert!(lines[1].starts_with("Arizona,0,1,1.000,1,1,1.000,1,1"));
        assert!(lines[2].starts_with("Michigan,1,0,3.000,3,3,2.000,2,2"));
    }

    #[test]
    fn emitters_are_deterministic() {
        let stats = corpus_stats(&corpus());
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_stats_csv(&stats, &mut a).unwrap();
        write_stats_csv(&stats, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corpus_json_round_trips() {
        let c = corpus();
        let mut buffer = Vec::new();
        write_corpus_json(&c, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let reloaded =
            crate::corpus::parse_corpus(&text, crate::corpus::InputSchema::Auto).unwrap();
        assert_eq!(c, reloaded);
    }

    #[test]
    fn readability_average_column_is_optional() {
        let report =
            crate::readability::readability_report(&corpus(), crate::corpus::Scope::QA, true)
                .unwrap();
        let mut plain = Vec::new();
        write_readability_csv(&report, false, &mut plain).unwrap();
        let plain = String::from_utf8(plain).unwrap();
        assert!(plain.lines().next().unwrap().ends_with("CLI"));
        let mut with_average = Vec::new();
        write_readability_csv(&report, true, &mut with_average).unwrap();
        let with_average = String::from_utf8(with_average).unwrap();
        assert!(with_average.lines().next().unwrap().ends_with("AVERAGE"));
    }
}
