//! Stage runners shared by the subcommands. Each stage writes its report
//! files into the output directory and returns the file names it produced.

use std::collections::BTreeMap;
use std::fs;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Deserialize;

use fiqs_core::corpus::{self, FaqCorpus, Removal};
use fiqs_core::error::Error;
use fiqs_core::fiqs::{self, ComponentScores};
use fiqs_core::readability;
use fiqs_core::report;
use fiqs_core::sentiment;
use fiqs_core::specificity;
use fiqs_core::summarize::{self, SummaryOptions, SummaryTarget};
use fiqs_core::text::{clean_text, CleanMode};
use fiqs_core::topics;
use fiqs_core::{Scope, UsState};

use crate::config::{RunConfig, SentimentMode};

pub enum CliError {
    /// Bad usage or configuration; exit 1.
    Validation(String),
    /// The data could not be processed; exit 2.
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub struct Pipeline {
    pub config: RunConfig,
    pub corpus: FaqCorpus,
    pub removals: Vec<Removal>,
    /// Files written so far, relative to the output directory.
    pub outputs: Vec<String>,
    topic_cache: Option<(
        topics::TopicScorecard,
        BTreeMap<UsState, topics::StateTopicScore>,
    )>,
}

impl Pipeline {
    /// Load, clean, deduplicate, and canonicalize the corpus.
    pub fn load(config: RunConfig) -> CliResult<Pipeline> {
        let input = config.require_input().map_err(CliError::Validation)?;
        let loaded = corpus::load_corpus(input, config.schema)?;
        let (deduped, removals) = corpus::dedup_entries(&loaded, config.dedup_threshold)?;
        let corpus = deduped.canonicalized();
        fs::create_dir_all(&config.out).map_err(|e| {
            CliError::Validation(format!(
                "cannot create output directory {}: {e}",
                config.out.display()
            ))
        })?;
        Ok(Pipeline {
            config,
            corpus,
            removals,
            outputs: Vec::new(),
            topic_cache: None,
        })
    }

    fn writer(&mut self, name: &str) -> CliResult<BufWriter<File>> {
        let path = self.config.out.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn run_ingest(&mut self) -> CliResult<()> {
        let w = self.writer("corpus.json")?;
        report::write_corpus_json(&self.corpus, w)?;
        let w = self.writer("removals.csv")?;
        report::write_removals_csv(&self.removals, w)?;
        Ok(())
    }

    pub fn run_stats(&mut self) -> CliResult<()> {
        let stats = corpus::corpus_stats(&self.corpus);
        let w = self.writer("stats.csv")?;
        report::write_stats_csv(&stats, w)?;
        Ok(())
    }

    fn readability_for(&self, scope: Scope) -> CliResult<readability::ReadabilityReport> {
        let report = readability::readability_report(&self.corpus, scope, self.config.smog_clamp)?;
        for (state, reason) in &report.skipped {
            eprintln!("note: {} skipped in readability ({reason})", state.code());
        }
        Ok(report)
    }

    pub fn run_readability(&mut self, scopes: &[Scope]) -> CliResult<()> {
        for &scope in scopes {
            let table = self.readability_for(scope)?;
            let name = format!("readability_{}.csv", scope.label());
            let w = self.writer(&name)?;
            report::write_readability_csv(&table, false, w)?;
        }
        Ok(())
    }

    fn summary_options(&self, target: SummaryTarget) -> SummaryOptions {
        SummaryOptions {
            length_window: self.config.summary.window,
            target,
            w_cos: self.config.summary.w_cos,
            max_skip: self.config.summary.max_skip,
        }
    }

    pub fn run_summarize(&mut self, targets: &[SummaryTarget]) -> CliResult<()> {
        for &target in targets {
            let options = self.summary_options(target);
            let evaluation = summarize::evaluate_state_summaries(&self.corpus, &options)?;
            let name = match target {
                SummaryTarget::Answer => "summary_answer.csv",
                SummaryTarget::Question => "summary_question.csv",
            };
            let w = self.writer(name)?;
            report::write_summary_csv(&evaluation, false, w)?;
        }
        Ok(())
    }

    fn fit_topics(
        &mut self,
    ) -> CliResult<(
        topics::TopicScorecard,
        BTreeMap<UsState, topics::StateTopicScore>,
    )> {
        if let Some(cached) = &self.topic_cache {
            return Ok(cached.clone());
        }
        let t = &self.config.topics;
        let dtm = topics::build_dtm(&self.corpus, self.config.scope, t.max_features)?;
        let model = topics::fit_lda(&dtm, t.k, t.max_iter, t.seed)?;
        let components = topics::topic_components(
            &model,
            &dtm,
            t.coverage_threshold,
            topics::CoherenceMode::Ratio,
        );
        let labels = if t.labels.is_empty() {
            None
        } else {
            Some(t.labels.as_slice())
        };
        let scorecard = topics::score_topics(&components, labels)?;
        let state_scores = topics::score_states(&model, &self.corpus, &dtm, &scorecard)?;
        self.topic_cache = Some((scorecard.clone(), state_scores.clone()));
        Ok((scorecard, state_scores))
    }

    pub fn run_topics(&mut self, with_selection: bool) -> CliResult<()> {
        let (scorecard, state_scores) = self.fit_topics()?;
        let w = self.writer("topic_summary.csv")?;
        report::write_topic_summary_csv(&scorecard, w)?;
        let w = self.writer("state_topics.csv")?;
        report::write_state_topics_csv(&state_scores, w)?;
        let w = self.writer("topic_heatmap.csv")?;
        report::write_topic_heatmap_csv(&state_scores, w)?;
        let w = self.writer("state_topic_scores.csv")?;
        report::write_state_topic_scores_csv(&state_scores, w)?;
        if with_selection {
            if let Some((lo, hi)) = self.config.topics.select_range {
                let t = &self.config.topics;
                let dtm = topics::build_dtm(&self.corpus, self.config.scope, t.max_features)?;
                let diagnostics = topics::select_topic_count(&dtm, lo, hi, t.max_iter, t.seed)?;
                let w = self.writer("topic_selection.csv")?;
                report::write_topic_selection_csv(&diagnostics, w)?;
            }
        }
        Ok(())
    }

    pub fn run_sentiment(&mut self, scopes: &[Scope]) -> CliResult<()> {
        for &scope in scopes {
            let table = sentiment::state_report(&self.corpus, scope);
            let name = format!("sentiment_{}.csv", scope.label());
            let w = self.writer(&name)?;
            report::write_sentiment_csv(&table, w)?;
        }
        Ok(())
    }

    pub fn run_specificity(&mut self) -> CliResult<()> {
        let vectors = match &self.config.embeddings {
            Some(path) => specificity::question_vectors_from_file(&self.corpus, path)?,
            None => specificity::question_vectors(&self.corpus)?,
        };
        let table = specificity::classify_questions(&vectors, self.config.specificity_threshold)?;
        let w = self.writer("specificity.csv")?;
        report::write_specificity_csv(&table, w)?;
        Ok(())
    }

    /// Assemble the normalized component scores for every state.
    fn component_scores(&mut self) -> CliResult<BTreeMap<UsState, ComponentScores>> {
        // readability: five-index average, lower grade is better
        let readability_table = self.readability_for(self.config.scope)?;
        let readability_raw: BTreeMap<UsState, f64> = readability_table
            .per_state
            .iter()
            .map(|(&s, ix)| (s, ix.average))
            .collect();
        let readability_scores = fiqs::min_max_normalize(&readability_raw, true)?;

        // summarization: mean semantic overlap; unevaluated states score raw 0
        let evaluation = summarize::evaluate_state_summaries(
            &self.corpus,
            &self.summary_options(self.config.summary.target),
        )?;
        let summary_raw: BTreeMap<UsState, f64> = evaluation
            .per_state
            .iter()
            .map(|(&s, m)| {
                let value = match m {
                    Some(metrics) => metrics.semantic_overlap,
                    None => {
                        eprintln!(
                            "note: {} has no answers inside the summary window; summarization component is 0",
                            s.code()
                        );
                        0.0
                    }
                };
                (s, value)
            })
            .collect();
        let summary_scores = fiqs::min_max_normalize(&summary_raw, false)?;

        // sentiment: average compound, either rewarding positivity or
        // closeness to neutral
        let sentiment_table = sentiment::state_report(&self.corpus, self.config.scope);
        let (sentiment_raw, invert): (BTreeMap<UsState, f64>, bool) =
            match self.config.sentiment_mode {
                SentimentMode::Positivity => (
                    sentiment_table
                        .per_state
                        .iter()
                        .map(|(&s, r)| (s, r.average_compound))
                        .collect(),
                    false,
                ),
                SentimentMode::Neutrality => (
                    sentiment_table
                        .per_state
                        .iter()
                        .map(|(&s, r)| (s, r.average_compound.abs()))
                        .collect(),
                    true,
                ),
            };
        let sentiment_scores = fiqs::min_max_normalize(&sentiment_raw, invert)?;

        // topic: the damped per-state topic score
        let (_, state_scores) = self.fit_topics()?;
        let topic_raw: BTreeMap<UsState, f64> = state_scores
            .iter()
            .map(|(&s, r)| (s, r.final_score))
            .collect();
        let topic_scores = fiqs::min_max_normalize(&topic_raw, false)?;

        let relevance_scores = match &self.config.predictions {
            Some(path) => Some(self.prompt_relevance(path)?),
            None => None,
        };

        let mut components = BTreeMap::new();
        for state in self.corpus.states() {
            if !readability_scores.contains_key(&state) {
                eprintln!(
                    "note: {} dropped from the scorecard (readability undefined)",
                    state.code()
                );
                continue;
            }
            components.insert(
                state,
                ComponentScores {
                    readability: readability_scores.get(&state).copied(),
                    summarization: summary_scores.get(&state).copied(),
                    sentiment: sentiment_scores.get(&state).copied(),
                    topic: topic_scores.get(&state).copied(),
                    prompt_relevance: relevance_scores
                        .as_ref()
                        .and_then(|r| r.get(&state).copied()),
                },
            );
        }
        Ok(components)
    }

    /// Mean semantic overlap of predicted answers against the corpus
    /// answers, min-max normalized across states.
    fn prompt_relevance(&self, path: &Path) -> CliResult<BTreeMap<UsState, f64>> {
        let predictions = load_predictions(path, &self.corpus)?;
        let mut sums: BTreeMap<UsState, (f64, usize)> = BTreeMap::new();
        for (entry_index, prediction) in &predictions {
            let entry = &self.corpus.entries()[*entry_index];
            let overlap = summarize::semantic_overlap(
                summarize::cosine_similarity(&entry.answer, prediction),
                summarize::rouge_n(&entry.answer, prediction, 1),
                self.config.summary.w_cos,
            );
            let slot = sums.entry(entry.state).or_insert((0.0, 0));
            slot.0 += overlap;
            slot.1 += 1;
        }
        let raw: BTreeMap<UsState, f64> = self
            .corpus
            .states()
            .map(|state| {
                let value = match sums.get(&state) {
                    Some(&(total, count)) => total / count as f64,
                    None => {
                        eprintln!(
                            "note: {} has no predictions; prompt relevance component is 0",
                            state.code()
                        );
                        0.0
                    }
                };
                (state, value)
            })
            .collect();
        Ok(fiqs::min_max_normalize(&raw, false)?)
    }

    pub fn run_score(&mut self) -> CliResult<()> {
        let components = self.component_scores()?;
        let scorecard =
            fiqs::build_scorecard(&components, self.config.k_sigma).map_err(CliError::Data)?;
        if scorecard.developer_stats.is_none() {
            eprintln!("note: developer columns are empty; supply --predictions to fill them");
        }
        let w = self.writer("components.csv")?;
        report::write_components_csv(&components, w)?;
        let w = self.writer("scorecard.csv")?;
        report::write_scorecard_csv(&scorecard, w)?;
        let w = self.writer("fiqs_stats.json")?;
        report::write_fiqs_stats_json(&scorecard, w)?;
        Ok(())
    }

    pub fn run_report(&mut self) -> CliResult<()> {
        self.run_ingest()?;
        self.run_stats()?;
        self.run_readability(&[Scope::Q, Scope::A, Scope::QA])?;
        self.run_summarize(&[SummaryTarget::Answer, SummaryTarget::Question])?;
        self.run_topics(false)?;
        self.run_sentiment(&[Scope::Q, Scope::A, Scope::QA])?;
        self.run_specificity()?;
        self.run_score()?;
        Ok(())
    }
}

#[derive(Deserialize)]
struct PredictionRecord {
    id: usize,
    prediction: String,
}

/// Load a predictions file: a JSON array of `{id, prediction}` where `id`
/// indexes the canonical corpus.
fn load_predictions(path: &Path, corpus: &FaqCorpus) -> CliResult<Vec<(usize, String)>> {
    let raw = fs::read_to_string(path).map_err(|source| {
        CliError::Data(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    let records: Vec<PredictionRecord> = serde_json::from_str(&raw).map_err(|e| {
        CliError::Data(Error::Parse {
            offset: 0,
            line: e.line(),
            column: e.column(),
            message: format!("predictions file: {e}"),
        })
    })?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.id >= corpus.len() {
                return Err(CliError::Data(Error::Record {
                    index: i,
                    reason: fiqs_core::error::RecordError::WrongType {
                        field: "id",
                        expected: "an index into the canonical corpus",
                    },
                }));
            }
            Ok((
                r.id,
                clean_text(&r.prediction, CleanMode::PreserveDomainTerms),
            ))
        })
        .collect()
}
