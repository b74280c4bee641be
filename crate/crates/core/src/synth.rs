//! Seeded generator for a leveled, Filipino-like corpus.
//!
//! Text is assembled from the bundled lexicon. Each level has its own knobs
//! for sentence length, document length, polysyllabic word rate and
//! vocabulary breadth, and every document additionally draws a log-normal
//! jitter on its sentence length and document length so levels overlap.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{syllable_count, Document, LabeledCorpus};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, Pos};
use crate::Level;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelKnobs {
    pub mean_sentence_length: f64,
    pub mean_sentences: f64,
    /// Chance that a content slot holds a word of six or more syllables.
    pub polysyllable_rate: f64,
    /// Fraction of each part-of-speech word list (in lexicon order) in use.
    pub vocabulary_richness: f64,
    /// Rotation of the word-frequency ranking, as a fraction of the word
    /// list in use; distinct shifts give each level its own frequent words.
    pub vocabulary_shift: f64,
    /// Chance that a content slot holds a compound word.
    pub compound_rate: f64,
    /// Chance that an interior slot holds a function word.
    pub function_word_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub docs_per_level: usize,
    pub seed: u64,
    pub levels: [LevelKnobs; 3],
    /// Log-normal sigma applied per document to sentence length and count.
    pub doc_jitter: f64,
    /// Each document keeps a uniform share in `[1 - vocabulary_spread, 1]`
    /// of its level's vocabulary, so word repetition varies by author.
    pub vocabulary_spread: f64,
    pub lexicon_path: Option<PathBuf>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            docs_per_level: 100,
            seed: 42,
            levels: [
                LevelKnobs {
                    mean_sentence_length: 5.0,
                    mean_sentences: 4.0,
                    polysyllable_rate: 0.01,
                    vocabulary_richness: 0.98,
                    vocabulary_shift: 0.0,
                    compound_rate: 0.0,
                    function_word_rate: 0.35,
                },
                LevelKnobs {
                    mean_sentence_length: 8.0,
                    mean_sentences: 6.0,
                    polysyllable_rate: 0.02,
                    vocabulary_richness: 0.99,
                    vocabulary_shift: 0.012,
                    compound_rate: 0.01,
                    function_word_rate: 0.3,
                },
                LevelKnobs {
                    mean_sentence_length: 11.0,
                    mean_sentences: 9.0,
                    polysyllable_rate: 0.03,
                    vocabulary_richness: 1.0,
                    vocabulary_shift: 0.024,
                    compound_rate: 0.02,
                    function_word_rate: 0.25,
                },
            ],
            doc_jitter: 0.25,
            vocabulary_spread: 0.8,
            lexicon_path: None,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.docs_per_level < 2 {
            return Err(Error::InvalidConfig("docs_per_level must be at least 2".into()));
        }
        if !(self.doc_jitter >= 0.0 && self.doc_jitter.is_finite()) {
            return Err(Error::InvalidConfig("doc_jitter must be nonnegative".into()));
        }
        if !(0.0..1.0).contains(&self.vocabulary_spread) {
            return Err(Error::InvalidConfig("vocabulary_spread must lie in [0, 1)".into()));
        }
        for (i, k) in self.levels.iter().enumerate() {
            let bad = |what: &str| Err(Error::InvalidConfig(format!("level {} {what}", i + 1)));
            if !(k.mean_sentence_length >= 1.0 && k.mean_sentence_length.is_finite()) {
                return bad("mean_sentence_length must be at least 1");
            }
            if !(k.mean_sentences >= 1.0 && k.mean_sentences.is_finite()) {
                return bad("mean_sentences must be at least 1");
            }
            if [k.polysyllable_rate, k.compound_rate, k.function_word_rate]
                .iter()
                .any(|r| !(0.0..=1.0).contains(r))
            {
                return bad("rates must lie in [0, 1]");
            }
            if !(0.0..1.0).contains(&k.vocabulary_shift) {
                return bad("vocabulary_shift must lie in [0, 1)");
            }
            if !(k.vocabulary_richness > 0.0 && k.vocabulary_richness <= 1.0) {
                return bad("vocabulary_richness must lie in (0, 1]");
            }
        }
        Ok(())
    }
}

/// A word list sampled with Zipf weights `1 / (rank + 1)` in list order.
struct ZipfPool {
    words: Vec<String>,
    cumulative: Vec<f64>,
}

impl ZipfPool {
    fn new(words: Vec<String>) -> Self {
        let mut total = 0.0;
        let cumulative = (0..words.len())
            .map(|r| {
                total += 1.0 / (r + 1) as f64;
                total
            })
            .collect();
        ZipfPool { words, cumulative }
    }

    fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Draws from the first `fraction` of the list, with the Zipf ranking
    /// rotated forward by `shift` of that prefix.
    fn sample(&self, fraction: f64, shift: f64, rng: &mut impl Rng) -> &str {
        let limit = ((self.words.len() as f64 * fraction).ceil() as usize).clamp(1, self.words.len());
        let u = rng.random::<f64>() * self.cumulative[limit - 1];
        let rank = self.cumulative[..limit].partition_point(|c| *c <= u).min(limit - 1);
        // fractional offsets round up with probability equal to the fraction
        let exact = limit as f64 * shift;
        let offset = exact.floor() as usize + usize::from(rng.random::<f64>() < exact.fract());
        &self.words[(rank + offset) % limit]
    }
}

struct Pools {
    func: ZipfPool,
    content: [(f64, ZipfPool); 4],
    polysyllabic: Vec<String>,
    compound: Vec<String>,
}

impl Pools {
    fn new(lexicon: &Lexicon) -> Result<Self> {
        let plain = |pos: Pos| -> Vec<String> {
            lexicon
                .iter()
                .filter(|(w, e)| {
                    e.pos == pos
                        && !e.compound
                        && !is_loanword(w)
                        && syllable_count(w) > 0
                        && syllable_count(w) < 6
                })
                .map(|(w, _)| w.to_string())
                .collect()
        };
        let pools = Pools {
            func: ZipfPool::new(plain(Pos::Func)),
            content: [
                (0.5, ZipfPool::new(plain(Pos::Noun))),
                (0.3, ZipfPool::new(plain(Pos::Verb))),
                (0.15, ZipfPool::new(plain(Pos::Adj))),
                (0.05, ZipfPool::new(plain(Pos::Adv))),
            ],
            polysyllabic: lexicon
                .iter()
                .filter(|(w, e)| e.pos != Pos::Func && syllable_count(w) >= 6)
                .map(|(w, _)| w.to_string())
                .collect(),
            compound: lexicon
                .iter()
                .filter(|(_, e)| e.compound)
                .map(|(w, _)| w.to_string())
                .collect(),
        };
        if pools.func.is_empty() || pools.content.iter().any(|(_, p)| p.is_empty()) {
            return Err(Error::Validation(
                "lexicon needs function words and nouns, verbs, adjectives and adverbs".into(),
            ));
        }
        Ok(pools)
    }
}

/// Letters that in this lexicon only occur in borrowed words; such words are
/// left out so that loanword density carries no level signal.
const LOANWORD_LETTERS: [char; 7] = ['c', 'f', 'j', 'q', 'v', 'x', 'z'];

fn is_loanword(word: &str) -> bool {
    word.contains(LOANWORD_LETTERS)
}

fn pick<'a>(pool: &'a [String], rng: &mut impl Rng) -> &'a str {
    &pool[rng.random_range(0..pool.len())]
}

fn content_word<'a>(pools: &'a Pools, knobs: &LevelKnobs, rng: &mut impl Rng) -> &'a str {
    if !pools.polysyllabic.is_empty() && rng.random_bool(knobs.polysyllable_rate) {
        return pick(&pools.polysyllabic, rng);
    }
    if !pools.compound.is_empty() && rng.random_bool(knobs.compound_rate) {
        return pick(&pools.compound, rng);
    }
    let mut u: f64 = rng.random();
    let (_, pool) = pools
        .content
        .iter()
        .find(|(share, _)| {
            u -= share;
            u < 0.0
        })
        .unwrap_or(&pools.content[0]);
    pool.sample(knobs.vocabulary_richness, knobs.vocabulary_shift, rng)
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn sentence(pools: &Pools, knobs: &LevelKnobs, mean_len: f64, rng: &mut impl Rng) -> String {
    let extra = Poisson::new((mean_len - 1.0).max(0.1)).expect("positive rate");
    let len = 1 + extra.sample(rng) as usize;
    let mut words: Vec<String> = Vec::with_capacity(len);
    for i in 0..len {
        let w = if i > 0 && i + 1 < len && rng.random_bool(knobs.function_word_rate) {
            pools.func.sample(1.0, 0.0, rng)
        } else {
            content_word(pools, knobs, rng)
        };
        words.push(w.to_string());
    }
    if len >= 6 && rng.random_bool(0.5) {
        let at = rng.random_range(2..len - 2);
        words[at].push(',');
    }
    words[0] = capitalize(&words[0]);
    let end = match rng.random_range(0..10) {
        0 => '?',
        1 => '!',
        _ => '.',
    };
    format!("{}{end}", words.join(" "))
}

/// File stem of the `i`-th document of `level`.
fn stem(level: Level, i: usize) -> String {
    format!("l{}_{i:03}", level.number())
}

/// Deterministic given the config. Documents are ordered by level, and ids
/// match those `load_corpus` assigns to the written manifest.
pub fn generate_corpus(cfg: &SynthConfig) -> Result<LabeledCorpus> {
    cfg.validate()?;
    let lexicon = match &cfg.lexicon_path {
        Some(p) => Lexicon::load(p)?,
        None => Lexicon::bundled(),
    };
    let pools = Pools::new(&lexicon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jitter = LogNormal::new(0.0, cfg.doc_jitter).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut documents = Vec::with_capacity(3 * cfg.docs_per_level);
    for (li, level) in Level::ALL.into_iter().enumerate() {
        let knobs = &cfg.levels[li];
        for i in 0..cfg.docs_per_level {
            let mean_len = (knobs.mean_sentence_length * jitter.sample(&mut rng)).max(2.0);
            let mean_sents = knobs.mean_sentences * jitter.sample(&mut rng);
            let n_sents = 1 + Poisson::new((mean_sents - 1.0).max(0.1))
                .expect("positive rate")
                .sample(&mut rng) as usize;
            let style = LevelKnobs {
                vocabulary_richness: knobs.vocabulary_richness
                    * (1.0 - cfg.vocabulary_spread * rng.random::<f64>()),
                ..knobs.clone()
            };
            let text = (0..n_sents)
                .map(|_| sentence(&pools, &style, mean_len, &mut rng))
                .collect::<Vec<_>>()
                .join(" ");
            let row = documents.len();
            documents.push(Document::new(format!("{}-{row}", stem(level, i)), text, level)?);
        }
    }
    Ok(LabeledCorpus::new(documents))
}

/// Writes one text file per document plus `manifest.csv` into `dir` and
/// returns the manifest path.
pub fn write_corpus(corpus: &LabeledCorpus, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut manifest = csv::Writer::from_path(dir.join("manifest.csv"))?;
    manifest.write_record(["path", "label"])?;
    for doc in &corpus.documents {
        let stem = doc.id.rsplit_once('-').map_or(doc.id.as_str(), |(s, _)| s);
        let name = format!("{stem}.txt");
        fs::write(dir.join(&name), format!("{}\n", doc.text))?;
        manifest.write_record([name, doc.label.number().to_string()])?;
    }
    manifest.flush()?;
    Ok(dir.join("manifest.csv"))
}
