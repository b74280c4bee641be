//! Bundled Filipino word list and a lexicon-based part-of-speech tagger.
//!
//! The lexicon is a TSV file of `word<TAB>pos[<TAB>compound]` lines where
//! `pos` is one of `noun`, `verb`, `adj`, `adv`, `func`. Lines starting with
//! `#` are comments. Entry order is significant: within a part of speech,
//! earlier words are treated as more frequent by the synthetic corpus
//! generator.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::corpus::{is_vowel, is_word_token};
use crate::error::{Error, Result};

const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Func,
    Unknown,
}

impl Pos {
    /// Nouns, verbs, adjectives and adverbs.
    pub fn is_content(self) -> bool {
        matches!(self, Pos::Noun | Pos::Verb | Pos::Adj | Pos::Adv)
    }
}

impl FromStr for Pos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noun" => Ok(Pos::Noun),
            "verb" => Ok(Pos::Verb),
            "adj" => Ok(Pos::Adj),
            "adv" => Ok(Pos::Adv),
            "func" => Ok(Pos::Func),
            other => Err(Error::Validation(format!("unknown part of speech `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub pos: Pos,
    pub compound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    entries: IndexMap<String, LexEntry>,
}

impl Lexicon {
    /// The word list shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON).expect("bundled lexicon is well-formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Ingest {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = IndexMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let word = fields.next().unwrap_or_default().trim().to_lowercase();
            let pos = fields
                .next()
                .ok_or_else(|| Error::Validation(format!("lexicon line {}: missing pos", lineno + 1)))?
                .trim()
                .parse()?;
            let compound = fields.any(|f| f.trim() == "compound");
            if word.is_empty() {
                return Err(Error::Validation(format!("lexicon line {}: empty word", lineno + 1)));
            }
            entries.entry(word).or_insert(LexEntry { pos, compound });
        }
        if entries.is_empty() {
            return Err(Error::EmptyInput("lexicon has no entries".into()));
        }
        Ok(Lexicon { entries })
    }

    pub fn get(&self, word: &str) -> Option<&LexEntry> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Words with the given part of speech, in file order.
    pub fn words_with_pos(&self, pos: Pos) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, e)| e.pos == pos)
            .map(|(w, _)| w.as_str())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LexEntry)> {
        self.entries.iter().map(|(w, e)| (w.as_str(), e))
    }
}

/// Assigns a coarse part of speech to a lowercase token.
pub trait PosTagger: Send + Sync {
    fn tag(&self, token: &str) -> Pos;

    /// Whether the token is a known compound word.
    fn is_compound(&self, token: &str) -> bool {
        token.contains('-')
    }

    /// Whether the token is listed in the tagger's word list.
    fn is_known(&self, token: &str) -> bool;
}

/// Looks words up in a [`Lexicon`] and falls back to affix heuristics for
/// unlisted words: `um`/`mag`/`nag`/`in` prefixes and an `-um-` infix mark
/// verbs; `pang`/`pam`/`pan` prefixes and `ka-…-an` circumfixes mark nouns.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    lexicon: Lexicon,
}

impl LexiconTagger {
    pub fn new(lexicon: Lexicon) -> Self {
        LexiconTagger { lexicon }
    }

    pub fn bundled() -> Self {
        Self::new(Lexicon::bundled())
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }
}

fn has_um_infix(word: &str) -> bool {
    let chars: Vec<char> = word.chars().collect();
    chars.len() >= 5
        && !is_vowel(chars[0])
        && chars[1] == 'u'
        && chars[2] == 'm'
        && is_vowel(chars[3])
}

fn affix_guess(word: &str) -> Pos {
    let len = word.chars().count();
    if len >= 5
        && (["um", "mag", "nag", "in"].iter().any(|p| word.starts_with(p)) || has_um_infix(word))
    {
        Pos::Verb
    } else if len >= 6
        && (["pang", "pam", "pan"].iter().any(|p| word.starts_with(p))
            || (word.starts_with("ka") && word.ends_with("an")))
    {
        Pos::Noun
    } else {
        Pos::Unknown
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, token: &str) -> Pos {
        if !is_word_token(token) {
            return Pos::Unknown;
        }
        match self.lexicon.get(token) {
            Some(entry) => entry.pos,
            None => affix_guess(token),
        }
    }

    fn is_compound(&self, token: &str) -> bool {
        token.contains('-') || self.lexicon.get(token).is_some_and(|e| e.compound)
    }

    fn is_known(&self, token: &str) -> bool {
        self.lexicon.contains(token)
    }
}
