use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five predictor families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    Trad,
    Lex,
    Lm,
    Syll,
    Morph,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Trad,
        Family::Lex,
        Family::Lm,
        Family::Syll,
        Family::Morph,
    ];

    /// Parses a comma-separated list such as `trad,syll`.
    pub fn parse_list(list: &str) -> Result<Vec<Family>> {
        let mut families = Vec::new();
        for part in list.split([',', '+']).map(str::trim).filter(|p| !p.is_empty()) {
            let family: Family = part.parse()?;
            if !families.contains(&family) {
                families.push(family);
            }
        }
        if families.is_empty() {
            return Err(Error::InvalidConfig("empty feature family list".into()));
        }
        families.sort();
        Ok(families)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trad" => Ok(Family::Trad),
            "lex" => Ok(Family::Lex),
            "lm" => Ok(Family::Lm),
            "syll" => Ok(Family::Syll),
            "morph" => Ok(Family::Morph),
            other => Err(Error::InvalidConfig(format!("unknown feature family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Trad => "TRAD",
            Family::Lex => "LEX",
            Family::Lm => "LM",
            Family::Syll => "SYLL",
            Family::Morph => "MORPH",
        };
        f.write_str(name)
    }
}

pub const TRAD_FEATURES: [&str; 7] = [
    "word_count",
    "sentence_count",
    "phrase_count",
    "polysyll_count",
    "avg_word_length",
    "avg_sentence_length",
    "avg_syllables_per_word",
];

pub const LEX_FEATURES: [&str; 9] = [
    "ttr",
    "root_ttr",
    "corr_ttr",
    "bilog_ttr",
    "noun_token_ratio",
    "verb_token_ratio",
    "lexical_density",
    "foreign_word_density",
    "compound_word_density",
];

pub const LM_FEATURES: [&str; 9] = [
    "L1_unigram",
    "L1_bigram",
    "L1_trigram",
    "L2_unigram",
    "L2_bigram",
    "L2_trigram",
    "L3_unigram",
    "L3_bigram",
    "L3_trigram",
];

/// Tracked syllable templates; everything else counts as `other`.
pub const SYLLABLE_PATTERNS: [&str; 9] = [
    "v", "cv", "vc", "vcc", "cvc", "cvcc", "ccvc", "ccvcc", "ccvccc",
];

pub const SYLL_FEATURES: [&str; 10] = [
    "v_density",
    "cv_density",
    "vc_density",
    "vcc_density",
    "cvc_density",
    "cvcc_density",
    "ccvc_density",
    "ccvcc_density",
    "ccvccc_density",
    "other_syll_density",
];

pub const MORPH_FEATURES: [&str; 11] = [
    "actor_focus",
    "object_focus",
    "benefactive_focus",
    "locative_focus",
    "instrumental_focus",
    "aspect_completed",
    "aspect_incompleted",
    "aspect_contemplated",
    "aspect_recently_completed",
    "mood_indicative",
    "mood_imperative",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureEntry {
    pub name: String,
    pub family: Family,
}

/// Ordered, uniquely named list of predictors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    entries: Vec<FeatureEntry>,
}

impl Default for FeatureRegistry {
    /// All 46 predictors: 7 TRAD, 9 LEX, 9 LM, 10 SYLL, 11 MORPH.
    fn default() -> Self {
        let groups: [(Family, &[&str]); 5] = [
            (Family::Trad, &TRAD_FEATURES),
            (Family::Lex, &LEX_FEATURES),
            (Family::Lm, &LM_FEATURES),
            (Family::Syll, &SYLL_FEATURES),
            (Family::Morph, &MORPH_FEATURES),
        ];
        let entries = groups
            .iter()
            .flat_map(|(family, names)| {
                names.iter().map(move |name| FeatureEntry {
                    name: name.to_string(),
                    family: *family,
                })
            })
            .collect();
        FeatureRegistry { entries }
    }
}

impl FeatureRegistry {
    pub fn new(entries: Vec<FeatureEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for entry in &entries {
            if !seen.insert(entry.name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate feature name `{}`",
                    entry.name
                )));
            }
        }
        Ok(FeatureRegistry { entries })
    }

    /// The default registry restricted to `families`, in registry order.
    pub fn with_families(families: &[Family]) -> Self {
        let mut registry = Self::default();
        registry.entries.retain(|e| families.contains(&e.family));
        registry
    }

    /// Restriction to the given names, in registry order.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        for name in names {
            if self.family_of(name.as_ref()).is_none() {
                return Err(Error::MissingFeature(name.as_ref().to_string()));
            }
        }
        let entries = self
            .entries
            .iter()
            .filter(|e| names.iter().any(|n| n.as_ref() == e.name))
            .cloned()
            .collect();
        Ok(FeatureRegistry { entries })
    }

    pub fn entries(&self) -> &[FeatureEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn family_of(&self, name: &str) -> Option<Family> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.family)
    }

    pub fn contains_family(&self, family: Family) -> bool {
        self.entries.iter().any(|e| e.family == family)
    }

    pub fn families(&self) -> Vec<Family> {
        let set: BTreeSet<Family> = self.entries.iter().map(|e| e.family).collect();
        set.into_iter().collect()
    }
}
