//! Run configuration: JSON file plus flag overrides, validated before any
//! data is read.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fiqs_core::corpus::InputSchema;
use fiqs_core::summarize::SummaryTarget;
use fiqs_core::Scope;

/// How the sentiment component score rewards a state's average compound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentimentMode {
    /// Higher average compound scores higher.
    Positivity,
    /// Closer to zero scores higher.
    Neutrality,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicConfig {
    pub k: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub max_features: usize,
    pub coverage_threshold: f64,
    /// Candidate range for the model-selection table; emitted only by the
    /// `topics` subcommand when set.
    pub select_range: Option<(usize, usize)>,
    /// Manual topic labels, applied by position.
    pub labels: Vec<String>,
}

impl Default for TopicConfig {
    fn default() -> Self {
        TopicConfig {
            k: 8,
            max_iter: 20,
            seed: 42,
            max_features: 1000,
            coverage_threshold: 0.1,
            select_range: None,
            labels: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummaryConfig {
    pub window: (usize, usize),
    pub target: SummaryTarget,
    pub w_cos: f64,
    pub max_skip: Option<usize>,
}

impl Default for SummaryConfig {
    fn default() -> Self {
        SummaryConfig {
            window: (350, 800),
            target: SummaryTarget::Answer,
            w_cos: 0.5,
            max_skip: None,
        }
    }
}

/// Everything a run needs; the defaults carry the published constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub schema: InputSchema,
    pub scope: Scope,
    pub dedup_threshold: f64,
    pub smog_clamp: bool,
    pub summary: SummaryConfig,
    pub topics: TopicConfig,
    pub sentiment_mode: SentimentMode,
    pub specificity_threshold: f64,
    pub k_sigma: u8,
    pub predictions: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            out: PathBuf::from("out"),
            schema: InputSchema::Auto,
            scope: Scope::QA,
            dedup_threshold: 0.85,
            smog_clamp: true,
            summary: SummaryConfig::default(),
            topics: TopicConfig::default(),
            sentiment_mode: SentimentMode::Positivity,
            specificity_threshold: 0.8,
            k_sigma: 1,
            predictions: None,
            embeddings: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let raw = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&raw).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    /// Check every parameter range up front.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dedup_threshold > 0.0 && self.dedup_threshold <= 1.0) {
            return Err(format!(
                "dedup_threshold must be in (0, 1], got {}",
                self.dedup_threshold
            ));
        }
        if !(self.specificity_threshold > 0.0 && self.specificity_threshold < 1.0) {
            return Err(format!(
                "specificity_threshold must be in (0, 1), got {}",
                self.specificity_threshold
            ));
        }
        if !(self.k_sigma == 1 || self.k_sigma == 2) {
            return Err(format!("k_sigma must be 1 or 2, got {}", self.k_sigma));
        }
        if self.summary.window.0 > self.summary.window.1 {
            return Err(format!(
                "summary window is inverted: [{}, {}]",
                self.summary.window.0, self.summary.window.1
            ));
        }
        if !(0.0..=1.0).contains(&self.summary.w_cos) {
            return Err(format!(
                "summary w_cos must be in [0, 1], got {}",
                self.summary.w_cos
            ));
        }
        if self.topics.k < 2 {
            return Err(format!(
                "topics.k must be at least 2, got {}",
                self.topics.k
            ));
        }
        if self.topics.max_iter == 0 {
            return Err("topics.max_iter must be positive".to_string());
        }
        if self.topics.max_features == 0 {
            return Err("topics.max_features must be positive".to_string());
        }
        if !(0.0..1.0).contains(&self.topics.coverage_threshold) {
            return Err(format!(
                "topics.coverage_threshold must be in [0, 1), got {}",
                self.topics.coverage_threshold
            ));
        }
        if let Some((lo, hi)) = self.topics.select_range {
            if lo < 2 || lo > hi {
                return Err(format!(
                    "topics.select_range needs 2 <= lo <= hi, got [{lo}, {hi}]"
                ));
            }
        }
        Ok(())
    }

    /// The input path, required by every data-bearing subcommand.
    pub fn require_input(&self) -> Result<&Path, String> {
        let path = self.input.as_deref().ok_or_else(|| {
            "no input corpus: pass --input or set \"input\" in the config".to_string()
        })?;
        if !path.exists() {
            return Err(format!("input {} does not exist", path.display()));
        }
        Ok(path)
    }
}
