//! Text normalization and tokenization shared by every analysis stage.

use std::collections::HashSet;

use once_cell::sync::Lazy;

/// Bundled English stopword list (about 170 words), one token per line.
static STOPWORD_FILE: &str = include_str!("../data/stopwords_en.txt");

static STOPWORDS: Lazy<HashSet<&'static str>> = Lazy::new(|| {
    STOPWORD_FILE
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect()
});

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(token)
}

/// How aggressively [`clean_text`] normalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CleanMode {
    /// Decode escape artifacts, normalize punctuation and whitespace, but keep
    /// URL tokens and hyphenated terms ("voter-id") intact. Canonical corpus
    /// text uses this mode.
    PreserveDomainTerms,
    /// Reduce to alphanumerics and single spaces. Used for character
    /// statistics.
    StrictAlnum,
}

/// Normalize raw source text.
///
/// Both modes decode literal escape sequences (`\uXXXX`, `\n`, `\t`, ...)
/// left over from collection, map typographic punctuation to ASCII, drop
/// control and zero-width characters, and collapse runs of whitespace.
pub fn clean_text(raw: &str, mode: CleanMode) -> String {
    let decoded = decode_escapes(raw);
    let normalized = normalize_punctuation(&decoded);
    let filtered: String = match mode {
        CleanMode::PreserveDomainTerms => normalized
            .chars()
            .map(|c| if c.is_whitespace() { ' ' } else { c })
            .filter(|c| !c.is_control() && !is_zero_width(*c))
            .collect(),
        CleanMode::StrictAlnum => normalized
            .chars()
            .map(|c| if c.is_alphanumeric() { c } else { ' ' })
            .collect(),
    };
    collapse_whitespace(&filtered)
}

fn is_zero_width(c: char) -> bool {
    matches!(
        c,
        '\u{200b}' | '\u{200c}' | '\u{200d}' | '\u{2060}' | '\u{feff}'
    )
}

/// Decode escape sequences that appear literally in the text (a backslash
/// character followed by the escape), as introduced by manual collection.
/// Unrecognized sequences are left untouched.
fn decode_escapes(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.peek() {
            Some('n') | Some('t') | Some('r') => {
                chars.next();
                out.push(' ');
            }
            Some('\\') => {
                chars.next();
                out.push('\\');
            }
            Some('"') => {
                chars.next();
                out.push('"');
            }
            Some('\'') => {
                chars.next();
                out.push('\'');
            }
            Some('/') => {
                chars.next();
                out.push('/');
            }
            Some('u') => {
                let rest: String = chars.clone().skip(1).take(4).collect();
                if rest.len() == 4 && rest.chars().all(|h| h.is_ascii_hexdigit()) {
                    let code = u32::from_str_radix(&rest, 16).expect("checked hex");
                    if let Some(decoded) = char::from_u32(code) {
                        for _ in 0..5 {
                            chars.next();
                        }
                        out.push(decoded);
                        continue;
                    }
                }
                out.push('\\');
            }
            _ => out.push('\\'),
        }
    }
    out
}

/// Map typographic punctuation to its ASCII equivalent.
fn normalize_punctuation(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\u{2018}' | '\u{2019}' | '\u{201a}' | '\u{2032}' => out.push('\''),
            '\u{201c}' | '\u{201d}' | '\u{201e}' | '\u{2033}' => out.push('"'),
            '\u{2013}' | '\u{2014}' | '\u{2015}' | '\u{2212}' => out.push('-'),
            '\u{2026}' => out.push_str("..."),
            '\u{00a0}' | '\u{2009}' | '\u{202f}' => out.push(' '),
            _ => out.push(c),
        }
    }
    out
}

fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.chars() {
        if c == ' ' {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

/// Split text into sentences. A boundary is a run of `.`, `!`, or `?`
/// followed by whitespace or end of text; the terminator stays with its
/// sentence. A trailing fragment without a terminator counts as a sentence.
/// Fragments without any alphanumeric character are dropped.
pub fn sentences(text: &str) -> Vec<&str> {
    fn push<'a>(piece: &'a str, out: &mut Vec<&'a str>) {
        let piece = piece.trim();
        if piece.chars().any(char::is_alphanumeric) {
            out.push(piece);
        }
    }
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if matches!(bytes[i], b'.' | b'!' | b'?') {
            let mut end = i + 1;
            while end < bytes.len() && matches!(bytes[end], b'.' | b'!' | b'?') {
                end += 1;
            }
            if end >= bytes.len() || bytes[end].is_ascii_whitespace() {
                push(&text[start..end], &mut out);
                start = end;
            }
            i = end;
        } else {
            i += 1;
        }
    }
    push(&text[start..], &mut out);
    out
}

/// Words are maximal runs of letters, digits, apostrophes, or hyphens that
/// contain at least one alphanumeric character.
pub fn words(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() || c == '\'' || c == '-' {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            push_word(text, s, i, &mut out);
        }
    }
    if let Some(s) = start {
        push_word(text, s, text.len(), &mut out);
    }
    out
}

fn push_word<'a>(text: &'a str, start: usize, end: usize, out: &mut Vec<&'a str>) {
    let word = text[start..end].trim_matches(|c| c == '\'' || c == '-');
    if word.chars().any(char::is_alphanumeric) {
        out.push(word);
    }
}

/// Lowercased word tokens.
pub fn tokens_lower(text: &str) -> Vec<String> {
    words(text).into_iter().map(|w| w.to_lowercase()).collect()
}

/// Lowercased word tokens with stopwords removed.
pub fn content_tokens(text: &str) -> Vec<String> {
    tokens_lower(text)
        .into_iter()
        .filter(|t| !is_stopword(t))
        .collect()
}
