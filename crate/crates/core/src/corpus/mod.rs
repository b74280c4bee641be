//! Labeled reading materials: ingestion, tokenization, sentence splitting and
//! syllabification.

mod syllable;
mod tokenize;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Level;

pub use syllable::{classify_syllable_pattern, is_vowel, syllabify, syllable_count, Syllable};
pub use tokenize::{is_numeric_token, is_word_token, split_sentences, tokenize};

/// One reading material with its gold grade level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub sentences: Vec<Vec<String>>,
    pub label: Level,
}

impl Document {
    /// Tokenizes and sentence-splits `text`. Sentences without any token are
    /// dropped, so `tokens` is always the concatenation of `sentences`.
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Level) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        let sentences: Vec<Vec<String>> = split_sentences(&text)?
            .iter()
            .map(|s| tokenize::scan_tokens(s))
            .filter(|tokens| !tokens.is_empty())
            .collect();
        let tokens: Vec<String> = sentences.iter().flatten().cloned().collect();
        if tokens.is_empty() {
            return Err(Error::EmptyInput(format!("document `{id}` has no tokens")));
        }
        Ok(Document {
            id,
            text,
            tokens,
            sentences,
            label,
        })
    }

    /// Tokens that are alphabetic words (numeric tokens excluded).
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str).filter(|t| is_word_token(t))
    }
}

/// An ordered collection of documents with per-level counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledCorpus {
    pub documents: Vec<Document>,
    pub level_counts: BTreeMap<Level, usize>,
}

impl LabeledCorpus {
    pub fn new(documents: Vec<Document>) -> Self {
        let mut level_counts = BTreeMap::new();
        for doc in &documents {
            *level_counts.entry(doc.label).or_insert(0) += 1;
        }
        LabeledCorpus {
            documents,
            level_counts,
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<Level> {
        self.documents.iter().map(|d| d.label).collect()
    }

    /// Fails unless every grade level has at least one document.
    pub fn require_all_levels(&self) -> Result<()> {
        for level in Level::ALL {
            if self.level_counts.get(&level).copied().unwrap_or(0) == 0 {
                return Err(Error::Validation(format!("corpus has no {level} documents")));
            }
        }
        Ok(())
    }

    /// Sub-corpus made of the documents at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> LabeledCorpus {
        LabeledCorpus::new(indices.iter().map(|&i| self.documents[i].clone()).collect())
    }
}

#[derive(Debug, Deserialize)]
struct ManifestRow {
    path: String,
    label: String,
}

/// Loads a `path,label` CSV manifest. Relative paths resolve against the
/// manifest's directory. Document ids are `<file stem>-<row index>`, so a
/// file listed twice yields two distinct documents.
pub fn load_corpus(manifest_path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let manifest_path = manifest_path.as_ref();
    let raw = fs::read_to_string(manifest_path).map_err(|source| Error::Ingest {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["path", "label"] {
        return Err(Error::Validation(format!(
            "manifest {} must have header `path,label`",
            manifest_path.display()
        )));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut rows = Vec::new();
    for (index, record) in reader.deserialize::<ManifestRow>().enumerate() {
        let row = record?;
        let label: Level = row.label.parse()?;
        let path = base.join(&row.path);
        rows.push((index, path, label));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!(
            "manifest {} lists no documents",
            manifest_path.display()
        )));
    }

    let documents = rows
        .par_iter()
        .map(|(index, path, label)| read_document(*index, path, *label))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledCorpus::new(documents))
}

fn read_document(index: usize, path: &PathBuf, label: Level) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|source| Error::Ingest {
        path: path.clone(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "doc".to_string());
    Document::new(format!("{stem}-{index}"), text, label)
}
