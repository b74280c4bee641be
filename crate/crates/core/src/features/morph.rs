//! Verb-inflection (focus, aspect, mood) detection from an affix rule table.
//!
//! Each rule optionally strips a prefix, then an infix (after the first
//! consonant, or at the start of a vowel-initial stem), then tests for CV
//! reduplication (`ka|kain`, `a|alis`) and finally strips a suffix. A prefix
//! ending in a consonant must be followed by a consonant or a hyphen
//! (`nag-aral`, `nagluto`, but not `maganda`). A word counts once per
//! category when any of that category's rules match. The bundled table is an
//! approximation; supply a JSON table for other conventions.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::registry::MORPH_FEATURES;
use crate::corpus::{is_vowel, is_word_token};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffixRule {
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suffix: Option<String>,
    /// `Some(true)` requires reduplication, `Some(false)` forbids it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redup: Option<bool>,
    /// Suffixes that disqualify the match.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub not_suffixes: Vec<String>,
    #[serde(default = "default_min_stem")]
    pub min_stem: usize,
}

fn default_min_stem() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffixTable {
    pub categories: Vec<String>,
    pub rules: Vec<AffixRule>,
    /// Words that never match (lexicalized forms that look inflected).
    pub exclude: Vec<String>,
    /// Word beginnings that never match (superlative and intensive adjectives).
    #[serde(default)]
    pub exclude_prefixes: Vec<String>,
}

struct RuleBuilder(AffixRule);

impl RuleBuilder {
    fn new(category: &str) -> Self {
        RuleBuilder(AffixRule {
            category: category.to_string(),
            prefix: None,
            infix: None,
            suffix: None,
            redup: None,
            not_suffixes: Vec::new(),
            min_stem: default_min_stem(),
        })
    }
    fn prefix(mut self, p: &str) -> Self {
        self.0.prefix = Some(p.into());
        self
    }
    fn infix(mut self, i: &str) -> Self {
        self.0.infix = Some(i.into());
        self
    }
    fn suffix(mut self, s: &str) -> Self {
        self.0.suffix = Some(s.into());
        self
    }
    fn redup(mut self, r: bool) -> Self {
        self.0.redup = Some(r);
        self
    }
    fn not_suffixes(mut self, s: &[&str]) -> Self {
        self.0.not_suffixes = s.iter().map(|x| x.to_string()).collect();
        self
    }
    fn min_stem(mut self, n: usize) -> Self {
        self.0.min_stem = n;
        self
    }
}

impl Default for AffixTable {
    fn default() -> Self {
        use RuleBuilder as R;
        let rules = vec![
            // focus
            R::new("actor_focus").infix("um"),
            R::new("actor_focus").prefix("mag"),
            R::new("actor_focus").prefix("nag"),
            R::new("actor_focus").prefix("mang"),
            R::new("actor_focus").prefix("nang"),
            R::new("object_focus").infix("in").not_suffixes(&["an", "han"]),
            R::new("object_focus").prefix("ni"),
            R::new("object_focus").suffix("hin"),
            R::new("object_focus").suffix("in").redup(true),
            R::new("benefactive_focus").prefix("ipag"),
            R::new("benefactive_focus").prefix("ipinag"),
            R::new("locative_focus").infix("in").suffix("an"),
            R::new("locative_focus").infix("in").suffix("han"),
            R::new("locative_focus").prefix("pag").suffix("an"),
            R::new("locative_focus").prefix("pinag").suffix("an"),
            R::new("instrumental_focus").prefix("ipang"),
            R::new("instrumental_focus").prefix("ipinang"),
            R::new("instrumental_focus").prefix("ipan"),
            R::new("instrumental_focus").prefix("ipinan"),
            // aspect
            R::new("aspect_completed").infix("um").redup(false),
            R::new("aspect_completed").infix("in").redup(false),
            R::new("aspect_completed").prefix("nag").redup(false),
            R::new("aspect_completed").prefix("nang").redup(false),
            R::new("aspect_completed").prefix("ni").redup(false),
            R::new("aspect_completed").prefix("na").redup(false).min_stem(4),
            R::new("aspect_completed").prefix("ipinag").redup(false),
            R::new("aspect_completed").prefix("ipinan").redup(false),
            R::new("aspect_incompleted").infix("um").redup(true),
            R::new("aspect_incompleted").infix("in").redup(true),
            R::new("aspect_incompleted").prefix("nag").redup(true),
            R::new("aspect_incompleted").prefix("nang").redup(true),
            R::new("aspect_incompleted").prefix("ni").redup(true),
            R::new("aspect_incompleted").prefix("na").redup(true),
            R::new("aspect_incompleted").prefix("ipinag").redup(true),
            R::new("aspect_contemplated").redup(true),
            R::new("aspect_contemplated").prefix("mag").redup(true),
            R::new("aspect_contemplated").prefix("mang").redup(true),
            R::new("aspect_contemplated").prefix("ma").redup(true),
            R::new("aspect_contemplated").prefix("ipag").redup(true),
            R::new("aspect_contemplated").prefix("ipan").redup(true),
            R::new("aspect_recently_completed").prefix("ka").redup(true),
            // mood
            R::new("mood_indicative").infix("um"),
            R::new("mood_indicative").infix("in"),
            R::new("mood_indicative").prefix("nag"),
            R::new("mood_indicative").prefix("nang"),
            R::new("mood_indicative").prefix("ni"),
            R::new("mood_indicative").prefix("na").min_stem(4),
            R::new("mood_indicative").redup(true),
            R::new("mood_indicative").prefix("mag").redup(true),
            R::new("mood_indicative").prefix("ma").redup(true),
            R::new("mood_indicative").prefix("ipinag"),
            R::new("mood_indicative").prefix("ipinan"),
            R::new("mood_indicative").prefix("ipag").redup(true),
            R::new("mood_imperative").prefix("paki"),
            R::new("mood_imperative").prefix("mag").redup(false),
            R::new("mood_imperative").prefix("huwag").min_stem(0),
        ]
        .into_iter()
        .map(|b| b.0)
        .collect();

        let exclude = [
            "umaga", "tinapay", "sinigang", "lalaki", "gagamba", "magsasaka", "mangingisda",
            "magaling", "nakakatuwa", "nakakapagod", "napakaganda", "napakahalaga",
            "napakatalino", "napakalaki", "pagkakaibigan", "pagkakaisa", "pagmamahal",
            "pagmamalasakit", "pagpapahalaga", "pagdiriwang", "pagkamamamayan",
            "magkakaibigan", "mag-aaral", "nayon", "ninyo", "nila", "niya", "naman", "nanay",
            "kaka", "papa", "mama", "bababa", "tatay", "lolo", "bibig", "niyog", "inumin",
            "titik", "numero", "kumot", "tinidor", "kinabukasan", "katotohanan", "mababa",
            "matatag", "mamaya",
        ];
        let exclude_prefixes = ["pinaka", "napaka", "pakiki"];
        AffixTable {
            categories: MORPH_FEATURES.iter().map(|s| s.to_string()).collect(),
            rules,
            exclude: exclude.iter().map(|s| s.to_string()).collect(),
            exclude_prefixes: exclude_prefixes.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn is_consonant(c: char) -> bool {
    c.is_alphabetic() && !is_vowel(c)
}

fn is_reduplicated(stem: &[char]) -> bool {
    match stem {
        [c0, v0, c1, v1, ..] if is_consonant(*c0) && is_vowel(*v0) && c0 == c1 && v0 == v1 => true,
        [v0, v1, _, ..] if is_vowel(*v0) && v0 == v1 => true,
        _ => false,
    }
}

impl AffixRule {
    pub fn matches(&self, word: &str) -> bool {
        let mut stem: Vec<char> = word.chars().collect();

        if let Some(prefix) = &self.prefix {
            let p: Vec<char> = prefix.chars().collect();
            if !stem.starts_with(&p) {
                return false;
            }
            stem.drain(..p.len());
            if p.last().is_some_and(|c| is_consonant(*c)) {
                match stem.first() {
                    None => {}
                    Some('-') => {
                        stem.remove(0);
                    }
                    Some(c) if is_consonant(*c) => {}
                    Some(_) => return false,
                }
            }
        }
        stem.retain(|c| *c != '-');

        if let Some(infix) = &self.infix {
            let i: Vec<char> = infix.chars().collect();
            let followed_by_vowel = |at: usize| stem.get(at).is_some_and(|c| is_vowel(*c));
            if stem.starts_with(&i) && followed_by_vowel(i.len()) {
                stem.drain(..i.len());
            } else if stem.first().is_some_and(|c| is_consonant(*c))
                && stem[1..].starts_with(&i)
                && followed_by_vowel(1 + i.len())
            {
                stem.drain(1..1 + i.len());
            } else {
                return false;
            }
        }

        if let Some(required) = self.redup {
            if is_reduplicated(&stem) != required {
                return false;
            }
        }

        let tail: String = stem.iter().collect();
        if self.not_suffixes.iter().any(|s| tail.ends_with(s.as_str())) {
            return false;
        }
        if let Some(suffix) = &self.suffix {
            if !tail.ends_with(suffix.as_str()) {
                return false;
            }
            let keep = stem.len() - suffix.chars().count();
            stem.truncate(keep);
        }
        stem.len() >= self.min_stem
    }
}

impl AffixTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Ingest {
            path: path.to_path_buf(),
            source,
        })?;
        let table: AffixTable = serde_json::from_str(&text)?;
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        for rule in &self.rules {
            if !self.categories.contains(&rule.category) {
                return Err(Error::Validation(format!(
                    "affix rule uses undeclared category `{}`",
                    rule.category
                )));
            }
        }
        Ok(())
    }

    /// Categories matched by a single lowercase word.
    pub fn categories_of(&self, word: &str) -> Vec<&str> {
        if !is_word_token(word)
            || self.exclude.iter().any(|w| w == word)
            || self.exclude_prefixes.iter().any(|p| word.starts_with(p.as_str()))
        {
            return Vec::new();
        }
        self.categories
            .iter()
            .filter(|cat| {
                self.rules
                    .iter()
                    .any(|r| &r.category == *cat && r.matches(word))
            })
            .map(String::as_str)
            .collect()
    }

    /// Per-category match counts over `words`, in category order.
    pub fn count<'a>(&self, words: impl IntoIterator<Item = &'a str>) -> Vec<usize> {
        let mut counts = vec![0usize; self.categories.len()];
        for word in words {
            for cat in self.categories_of(word) {
                let idx = self.categories.iter().position(|c| c == cat).unwrap_or(0);
                counts[idx] += 1;
            }
        }
        counts
    }
}
