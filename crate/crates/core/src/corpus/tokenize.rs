//! Word tokenization and sentence splitting.
//!
//! A word token is a run of letters, optionally joined by single hyphens to
//! further letter runs (`araw-araw`). A run of digits forms a separate numeric
//! token; numeric tokens count as words but are excluded from syllable and
//! morphology features. Everything else is a separator. Output is lowercase.

use crate::error::{Error, Result};

const SENTENCE_TERMINALS: [char; 3] = ['.', '!', '?'];

/// Splits `text` into lowercase word and numeric tokens.
pub fn tokenize(text: &str) -> Result<Vec<String>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput("cannot tokenize empty text".into()));
    }
    Ok(scan_tokens(text))
}

/// True for tokens made only of digits.
pub fn is_numeric_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_numeric())
}

/// True for tokens consisting of letters and hyphens, i.e. candidates for
/// syllabification.
pub fn is_word_token(token: &str) -> bool {
    !token.is_empty()
        && token.chars().any(char::is_alphabetic)
        && token.chars().all(|c| c.is_alphabetic() || c == '-')
}

pub(crate) fn scan_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphabetic() {
            let start = i;
            i += 1;
            loop {
                while i < chars.len() && chars[i].is_alphabetic() {
                    i += 1;
                }
                // keep a hyphen only when letters continue right after it
                if i + 1 < chars.len() && chars[i] == '-' && chars[i + 1].is_alphabetic() {
                    i += 1;
                } else {
                    break;
                }
            }
            tokens.push(chars[start..i].iter().collect::<String>().to_lowercase());
        } else if c.is_numeric() {
            let start = i;
            while i < chars.len() && chars[i].is_numeric() {
                i += 1;
            }
            tokens.push(chars[start..i].iter().collect());
        } else {
            i += 1;
        }
    }
    tokens
}

/// Splits `text` into sentence strings at `.`, `!` or `?` followed by
/// whitespace or end of text. A trailing fragment without terminal
/// punctuation is its own sentence. Returned sentences are trimmed and
/// never empty.
pub fn split_sentences(text: &str) -> Result<Vec<String>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput("cannot split empty text".into()));
    }
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        current.push(c);
        let at_boundary = SENTENCE_TERMINALS.contains(&c)
            && chars.get(i + 1).is_none_or(|next| next.is_whitespace());
        if at_boundary {
            push_trimmed(&mut sentences, &current);
            current.clear();
        }
    }
    push_trimmed(&mut sentences, &current);
    Ok(sentences)
}

fn push_trimmed(out: &mut Vec<String>, sentence: &str) {
    let trimmed = sentence.trim();
    if !trimmed.is_empty() {
        out.push(trimmed.to_string());
    }
}
