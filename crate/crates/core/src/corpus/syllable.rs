//! Rule-based Filipino syllabification.
//!
//! Graphemes: the vowels are `a e i o u` (accented forms included), the
//! digraph `ng` is a single consonant unit and every other letter is a single
//! consonant unit. Each vowel is its own nucleus, so vowel sequences such as
//! `ia` split into separate syllables while a written `y`/`w` glide falls into
//! a coda (`ba|hay`).
//!
//! Between two nuclei the next syllable takes the longest permissible onset
//! (maximal onset). Permissible onsets are any single consonant unit, an
//! obstruent followed by `r` or `l` (`pr`, `bl`, `tr`, ...) and `ts`. The
//! remaining consonants close the previous syllable. Word-initial and
//! word-final consonants always attach to the first and last syllable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One syllable and its consonant/vowel template, e.g. `"prok"` / `"ccvc"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syllable {
    pub text: String,
    pub pattern: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Unit<'a> {
    text: &'a str,
    vowel: bool,
}

const CLUSTER_HEADS: [&str; 9] = ["b", "c", "d", "f", "g", "k", "p", "t", "v"];

pub fn is_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u'
            | 'á' | 'à' | 'â' | 'é' | 'è' | 'ê' | 'í' | 'ì' | 'î' | 'ó' | 'ò' | 'ô' | 'ú' | 'ù' | 'û'
    )
}

fn units(word: &str) -> Vec<Unit<'_>> {
    let mut out = Vec::with_capacity(word.len());
    let mut iter = word.char_indices().peekable();
    while let Some((start, c)) = iter.next() {
        let mut end = start + c.len_utf8();
        if c == 'n' {
            if let Some(&(_, 'g')) = iter.peek() {
                iter.next();
                end += 1;
            }
        }
        out.push(Unit {
            text: &word[start..end],
            vowel: is_vowel(c),
        });
    }
    out
}

fn permissible_pair(first: &str, second: &str) -> bool {
    (matches!(second, "r" | "l") && CLUSTER_HEADS.contains(&first)) || (first == "t" && second == "s")
}

/// Splits a lowercase word into syllables. Hyphenated words are split at the
/// hyphens and each part is syllabified on its own.
pub fn syllabify(word: &str) -> Result<Vec<Syllable>> {
    let lower = word.to_lowercase();
    let mut syllables = Vec::new();
    for part in lower.split('-').filter(|p| !p.is_empty()) {
        syllabify_part(part, &mut syllables)?;
    }
    if syllables.is_empty() {
        return Err(Error::Unsyllabifiable(word.to_string()));
    }
    Ok(syllables)
}

fn syllabify_part(part: &str, out: &mut Vec<Syllable>) -> Result<()> {
    let units = units(part);
    let nuclei: Vec<usize> = units
        .iter()
        .enumerate()
        .filter(|(_, u)| u.vowel)
        .map(|(i, _)| i)
        .collect();
    if nuclei.is_empty() {
        return Err(Error::Unsyllabifiable(part.to_string()));
    }

    let mut starts = vec![0usize];
    for pair in nuclei.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        let cluster = &units[prev + 1..next];
        let onset = match cluster.len() {
            0 => 0,
            1 => 1,
            n if permissible_pair(cluster[n - 2].text, cluster[n - 1].text) => 2,
            _ => 1,
        };
        starts.push(next - onset);
    }
    starts.push(units.len());

    for bounds in starts.windows(2) {
        let slice = &units[bounds[0]..bounds[1]];
        out.push(Syllable {
            text: slice.iter().map(|u| u.text).collect(),
            pattern: slice.iter().map(|u| if u.vowel { 'v' } else { 'c' }).collect(),
        });
    }
    Ok(())
}

/// Maps each vowel grapheme to `v` and each consonant unit (including `ng`)
/// to `c`.
pub fn classify_syllable_pattern(syllable: &str) -> String {
    units(&syllable.to_lowercase())
        .iter()
        .map(|u| if u.vowel { 'v' } else { 'c' })
        .collect()
}

/// Number of syllables, or 0 when the word cannot be syllabified.
pub fn syllable_count(word: &str) -> usize {
    syllabify(word).map(|s| s.len()).unwrap_or(0)
}
