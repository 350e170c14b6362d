//! The five readability indices and their per-state report.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{FaqCorpus, Scope};
use crate::error::{Error, Result};
use crate::state::UsState;
use crate::text;

/// Raw counts the index formulas consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TextCounts {
    pub sentences: usize,
    pub words: usize,
    pub syllables: usize,
    pub letters: usize,
    pub characters_alnum: usize,
    /// Words of three or more syllables, excluding proper-noun proxies
    /// (capitalized mid-sentence) and words inflated past three syllables
    /// only by an -es/-ed/-ing suffix.
    pub complex_words: usize,
    /// Words of three or more syllables, no exclusions.
    pub polysyllables: usize,
}

/// Count the syllables of one word: vowel groups (a, e, i, o, u, y) with a
/// silent trailing 'e' subtracted unless the word ends in consonant + "le",
/// minimum one per word.
pub fn syllables_in_word(word: &str) -> usize {
    let w: Vec<char> = word
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphabetic())
        .collect();
    if w.is_empty() {
        return 1;
    }
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &w {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    let n = w.len();
    let silent_e = n >= 2
        && w[n - 1] == 'e'
        && !is_vowel(w[n - 2])
        && !(n >= 3 && w[n - 1] == 'e' && w[n - 2] == 'l' && !is_vowel(w[n - 3]));
    if silent_e && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

fn suffix_inflated(word: &str) -> bool {
    let lower = word.to_lowercase();
    for suffix in ["ing", "ed", "es"] {
        if let Some(stem) = lower.strip_suffix(suffix) {
            if !stem.is_empty() && syllables_in_word(stem) < 3 {
                return true;
            }
        }
    }
    false
}

/// Tokenize and count. Sentence boundaries are runs of `.!?` followed by
/// whitespace or end of text; words are letter/digit/apostrophe/hyphen runs.
/// Empty text yields all zeros.
pub fn text_counts(text: &str) -> TextCounts {
    let mut c = TextCounts {
        characters_alnum: text.chars().filter(|ch| ch.is_alphanumeric()).count(),
        letters: text.chars().filter(|ch| ch.is_alphabetic()).count(),
        ..TextCounts::default()
    };
    for sentence in text::sentences(text) {
        c.sentences += 1;
        for (position, word) in text::words(sentence).iter().enumerate() {
            c.words += 1;
            let syllables = syllables_in_word(word);
            c.syllables += syllables;
            if syllables >= 3 {
                c.polysyllables += 1;
                let capitalized = word.chars().next().is_some_and(char::is_uppercase);
                let proper_noun_proxy = capitalized && position > 0;
                if !proper_noun_proxy && !suffix_inflated(word) {
                    c.complex_words += 1;
                }
            }
        }
    }
    c
}

fn require_nonzero(c: &TextCounts) -> Result<()> {
    if c.words == 0 || c.sentences == 0 {
        return Err(Error::UndefinedInput {
            words: c.words,
            sentences: c.sentences,
        });
    }
    Ok(())
}

/// Flesch-Kincaid Grade: `0.39 W/S + 11.8 Syl/W - 15.59`.
pub fn fkg(c: &TextCounts) -> Result<f64> {
    require_nonzero(c)?;
    let w = c.words as f64;
    let s = c.sentences as f64;
    Ok(0.39 * (w / s) + 11.8 * (c.syllables as f64 / w) - 15.59)
}

/// Gunning Fog Index: `0.4 (W/S + 100 Complex/W)`.
pub fn gfi(c: &TextCounts) -> Result<f64> {
    require_nonzero(c)?;
    let w = c.words as f64;
    Ok(0.4 * (w / c.sentences as f64 + 100.0 * c.complex_words as f64 / w))
}

/// SMOG Index: `1.0430 sqrt(Poly * 30/S) + 3.1291`. With `clamp` the score
/// is reported as 0 when the text has no polysyllables, the convention used
/// for the tabulated reports. SMOG expects 30+ sentences; the value is
/// computed regardless and [`low_sentence_warning`] flags short inputs.
pub fn smog(c: &TextCounts, clamp: bool) -> Result<f64> {
    require_nonzero(c)?;
    if clamp && c.polysyllables == 0 {
        return Ok(0.0);
    }
    Ok(1.0430 * (c.polysyllables as f64 * 30.0 / c.sentences as f64).sqrt() + 3.1291)
}

/// True when the text is below the 30 sentences SMOG expects.
pub fn low_sentence_warning(c: &TextCounts) -> bool {
    c.sentences < 30
}

/// Automated Readability Index: `4.71 Chars/W + 0.5 W/S - 21.43` over
/// alphanumeric characters.
pub fn ari(c: &TextCounts) -> Result<f64> {
    require_nonzero(c)?;
    let w = c.words as f64;
    Ok(4.71 * (c.characters_alnum as f64 / w) + 0.5 * (w / c.sentences as f64) - 21.43)
}

/// Coleman-Liau Index: `0.0588 L - 0.296 S - 15.8` with L letters per 100
/// words and S sentences per 100 words.
pub fn coleman_liau(c: &TextCounts) -> Result<f64> {
    require_nonzero(c)?;
    let w = c.words as f64;
    let l = 100.0 * c.letters as f64 / w;
    let s = 100.0 * c.sentences as f64 / w;
    Ok(0.0588 * l - 0.296 * s - 15.8)
}

/// The five indices of one text plus their mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexSet {
    pub fkg: f64,
    pub gfi: f64,
    pub smog: f64,
    pub ari: f64,
    pub cli: f64,
    pub average: f64,
}

impl IndexSet {
    pub fn compute(c: &TextCounts, smog_clamp: bool) -> Result<IndexSet> {
        let fkg = fkg(c)?;
        let gfi = gfi(c)?;
        let smog = smog(c, smog_clamp)?;
        let ari = ari(c)?;
        let cli = coleman_liau(c)?;
        Ok(IndexSet {
            fkg,
            gfi,
            smog,
            ari,
            cli,
            average: (fkg + gfi + smog + ari + cli) / 5.0,
        })
    }
}

/// Per-state readability over one scope. States whose scope text has no
/// words or sentences are listed in `skipped` instead of scored.
#[derive(Debug, Clone, Serialize)]
pub struct ReadabilityReport {
    pub scope: Scope,
    pub per_state: BTreeMap<UsState, IndexSet>,
    pub skipped: Vec<(UsState, String)>,
}

impl ReadabilityReport {
    /// States ordered ascending by average index (most readable first);
    /// ties break on state code.
    pub fn ranked(&self) -> Vec<(UsState, f64)> {
        let mut rows: Vec<(UsState, f64)> = self
            .per_state
            .iter()
            .map(|(&s, ix)| (s, ix.average))
            .collect();
        rows.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        rows
    }
}

/// Score each state over the concatenation of its texts in `scope`.
pub fn readability_report(
    corpus: &FaqCorpus,
    scope: Scope,
    smog_clamp: bool,
) -> Result<ReadabilityReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidParameter {
            name: "corpus",
            message: "must be non-empty".into(),
        });
    }
    let states: Vec<UsState> = corpus.states().collect();
    let scored: Vec<(UsState, Result<IndexSet>)> = states
        .par_iter()
        .map(|&state| {
            let text = corpus
                .state_entries(state)
                .iter()
                .map(|&i| scope.text_of(&corpus.entries()[i]))
                .collect::<Vec<_>>()
                .join(" ");
            (state, IndexSet::compute(&text_counts(&text), smog_clamp))
        })
        .collect();

    let mut per_state = BTreeMap::new();
    let mut skipped = Vec::new();
    for (state, outcome) in scored {
        match outcome {
            Ok(set) => {
                per_state.insert(state, set);
            }
            Err(e @ Error::UndefinedInput { .. }) => skipped.push((state, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(ReadabilityReport {
        scope,
        per_state,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Contributor, FaqEntry};

    #[test]
    fn empty_text_counts_zero() {
        assert_eq!(text_counts(""), TextCounts::default());
    }

    #[test]
    fn the_cat_sat_counts() {
        let c = text_counts("The cat sat.");
        assert_eq!(c.sentences, 1);
        assert_eq!(c.words, 3);
        assert_eq!(c.syllables, 3);
        assert_eq!(c.characters_alnum, 9);
        assert_eq!(c.letters, 9);
        assert_eq!(c.complex_words, 0);
        assert_eq!(c.polysyllables, 0);
    }

    #[test]
    fn syllable_heuristic_cases() {
        assert_eq!(syllables_in_word("the"), 1);
        assert_eq!(syllables_in_word("cake"), 1);
        assert_eq!(syllables_in_word("table"), 2);
        assert_eq!(syllables_in_word("see"), 1);
        assert_eq!(syllables_in_word("registration"), 4);
        assert_eq!(syllables_in_word("vote"), 1);
        assert_eq!(syllables_in_word("voting"), 2);
        assert_eq!(syllables_in_word("absentee"), 3);
    }

    #[test]
    fn counts_are_additive_over_sentences() {
        let pieces = [
            "The cat sat.",
            "Voters register early!",
            "Was the absentee ballot counted?",
        ];
        let mut combined = String::new();
        let mut expected = TextCounts::default();
        for _ in 0..1000 {
            for piece in pieces {
                if !combined.is_empty() {
                    combined.push(' ');
                }
                combined.push_str(piece);
                let c = text_counts(piece);
                expected.sentences += c.sentences;
                expected.words += c.words;
                expected.syllables += c.syllables;
                expected.letters += c.letters;
                expected.characters_alnum += c.characters_alnum;
                expected.complex_words += c.complex_words;
                expected.polysyllables += c.polysyllables;
            }
        }
        assert_eq!(text_counts(&combined), expected);
    }

    #[test]
    fn formulas_on_the_cat_sat() {
        let c = text_counts("The cat sat.");
        assert!((gfi(&c).unwrap() - 1.2).abs() < 1e-12);
        assert!((ari(&c).unwrap() - (4.71 * 3.0 + 0.5 * 3.0 - 21.43)).abs() < 1e-12);
        assert!((fkg(&c).unwrap() - (0.39 * 3.0 + 11.8 - 15.59)).abs() < 1e-12);
    }

    #[test]
    fn smog_clamp_behavior() {
        let c = TextCounts {
            sentences: 1,
            words: 3,
            ..Default::default()
        };
        assert!((smog(&c, false).unwrap() - 3.1291).abs() < 1e-12);
        assert_eq!(smog(&c, true).unwrap(), 0.0);
        assert!(low_sentence_warning(&c));
    }

    #[test]
    fn zero_words_is_an_error() {
        let c = text_counts("...");
        assert!(matches!(fkg(&c), Err(Error::UndefinedInput { .. })));
    }

    #[test]
    fn complex_word_exclusions() {
        // "Innovative" mid-sentence capitalized -> proper-noun proxy, excluded
        let c = text_counts("we saw Innovative plans.");
        assert_eq!(c.polysyllables, 1);
        assert_eq!(c.complex_words, 0);
        // sentence-initial capital still counts
        let c = text_counts("Innovative plans won.");
        assert_eq!(c.complex_words, 1);
        // "edited" is 3 syllables only via -ed
        assert_eq!(syllables_in_word("edited"), 3);
        let c = text_counts("they edited it.");
        assert_eq!(c.polysyllables, 1);
        assert_eq!(c.complex_words, 0);
    }

    fn one_entry_corpus(text: &str) -> FaqCorpus {
        FaqCorpus::from_entries(vec![FaqEntry {
            state: UsState::resolve("MI").unwrap(),
            contributor: Contributor::Official,
            source: None,
            timestamp: None,
            question: text.to_string(),
            answer: text.to_string(),
        }])
    }

    #[test]
    fn report_on_single_state_matches_single_text() {
        let corpus = one_entry_corpus("The cat sat.");
        let report = readability_report(&corpus, Scope::Q, true).unwrap();
        let mi = &report.per_state[&UsState::resolve("MI").unwrap()];
        let direct = IndexSet::compute(&text_counts("The cat sat."), true).unwrap();
        assert_eq!(*mi, direct);
        let expected = (direct.fkg + direct.gfi + direct.smog + direct.ari + direct.cli) / 5.0;
        assert!((mi.average - expected).abs() < 1e-9);
    }

    #[test]
    fn harder_text_ranks_below_simpler_on_every_index() {
        let simple = FaqEntry {
            state: UsState::resolve("MI").unwrap(),
            contributor: Contributor::Official,
            source: None,
            timestamp: None,
            question: "Can I vote? Yes you can. It is easy.".to_string(),
            answer: "Go vote now. It is fast.".to_string(),
        };
        let hard = FaqEntry {
            state: UsState::resolve("OH").unwrap(),
            contributor: Contributor::Official,
            source: None,
            timestamp: None,
            question: "extraordinarily complicated bureaucratic registration prerequisites necessitate considerable constitutional interpretation alongside administrative adjudication procedures.".to_string(),
            answer: "comprehensive documentation requirements overwhelmingly presuppose sophisticated institutional familiarity.".to_string(),
        };
        let corpus = FaqCorpus::from_entries(vec![simple, hard]);
        let report = readability_report(&corpus, Scope::QA, true).unwrap();
        let mi = &report.per_state[&UsState::resolve("MI").unwrap()];
        let oh = &report.per_state[&UsState::resolve("OH").unwrap()];
        assert!(mi.fkg < oh.fkg);
        assert!(mi.gfi < oh.gfi);
        assert!(mi.smog < oh.smog);
        assert!(mi.ari < oh.ari);
        assert!(mi.cli < oh.cli);
        assert_eq!(report.ranked()[0].0.code(), "MI");
    }
}
