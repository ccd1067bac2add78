//! Text preprocessing: tokenize, case-fold, drop stopwords, stem, and add
//! adjacent 2-grams. Finally the corpus vocabulary is built and rare 2-grams
//! are pruned.
//!
//! Stage order is fixed: tokenize → lowercase → stopword removal → stem →
//! minimum length → 2-grams → document-frequency filter. Stopword lists are
//! therefore written in natural (unstemmed) form.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Corpus;

/// Separator between the two halves of a 2-gram.
pub const BIGRAM_SEPARATOR: char = '_';

/// Maximum number of stopword dictionaries (English, domain-common,
/// usernames, first names).
pub const MAX_STOPWORD_TIERS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub stopword_files: Vec<PathBuf>,
    pub min_2gram_df: usize,
    pub stemming_enabled: bool,
    pub min_token_len: usize,
    /// Add every post author (tokenized) to the stopword set.
    pub seed_usernames_from_authors: bool,
    /// Merge the general-English list shipped with the crate.
    pub builtin_english_stopwords: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            stopword_files: Vec::new(),
            min_2gram_df: 3,
            stemming_enabled: true,
            min_token_len: 2,
            seed_usernames_from_authors: true,
            builtin_english_stopwords: false,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_2gram_df < 1 {
            return Err(Error::Config("min_2gram_df must be >= 1".into()));
        }
        if self.stopword_files.len() > MAX_STOPWORD_TIERS {
            return Err(Error::Config(format!(
                "at most {MAX_STOPWORD_TIERS} stopword files are supported, got {}",
                self.stopword_files.len()
            )));
        }
        Ok(())
    }
}

/// Splits text into lowercase word tokens.
///
/// Any character that is not a letter or digit separates tokens, so
/// punctuation and hyphens vanish ("anti-nausea" gives `anti`, `nausea`).
/// Tokens made only of digits are dropped.
pub fn tokenize(body: &str) -> Vec<String> {
    body.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !t.chars().all(|c| c.is_ascii_digit()))
        .map(str::to_lowercase)
        .collect()
}

/// A merged, lowercase stopword set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordSet {
    words: HashSet<String>,
}

impl StopwordSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// A small general-English list shipped with the crate.
    pub fn builtin_english() -> Self {
        let mut set = Self::new();
        set.extend_from_text(include_str!("../data/stopwords_en.txt"));
        set
    }

    /// Loads and merges stopword files (UTF-8, one term per line, `#`
    /// starts a comment).
    pub fn from_files<P: AsRef<Path>>(paths: &[P]) -> Result<Self> {
        let mut set = Self::new();
        for path in paths {
            let path = path.as_ref();
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("stopword file {}: {e}", path.display())))?;
            set.extend_from_text(&text);
        }
        Ok(set)
    }

    pub fn extend_from_text(&mut self, text: &str) {
        for line in text.lines() {
            let entry = line.split('#').next().unwrap_or("").trim();
            if !entry.is_empty() {
                self.words.insert(entry.to_lowercase());
            }
        }
    }

    pub fn insert(&mut self, word: &str) {
        self.words.insert(word.to_lowercase());
    }

    /// Adds the tokens of every post author to the set.
    pub fn seed_usernames(&mut self, corpus: &Corpus) {
        for author in corpus.posts().iter().filter_map(|p| p.author.as_deref()) {
            for token in tokenize(author) {
                self.words.insert(token);
            }
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Exact-match removal of stopwords, preserving the order of survivors.
pub fn remove_stopwords(tokens: Vec<String>, stopwords: &StopwordSet) -> Vec<String> {
    tokens.into_iter().filter(|t| !stopwords.contains(t)).collect()
}

/// English (Porter2) stemmer.
///
/// The stem is iterated to a fixed point, so `stem(stem(w)) == stem(w)` for
/// every word. For most words one pass already is the fixed point.
pub struct TermStemmer {
    inner: Stemmer,
}

impl Default for TermStemmer {
    fn default() -> Self {
        TermStemmer {
            inner: Stemmer::create(Algorithm::English),
        }
    }
}

impl TermStemmer {
    pub fn stem(&self, token: &str) -> String {
        let mut current = token.to_owned();
        for _ in 0..8 {
            let next = self.inner.stem(&current).into_owned();
            if next == current {
                break;
            }
            current = next;
        }
        current
    }
}

impl std::fmt::Debug for TermStemmer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("TermStemmer(english)")
    }
}

/// Stems one token with a freshly created English stemmer.
pub fn stem(token: &str) -> String {
    TermStemmer::default().stem(token)
}

/// Adjacent pairs joined by `_`, in document order.
pub fn generate_2grams(tokens: &[String]) -> Vec<String> {
    tokens
        .windows(2)
        .map(|w| format!("{}{BIGRAM_SEPARATOR}{}", w[0], w[1]))
        .collect()
}

pub fn is_2gram(term: &str) -> bool {
    term.contains(BIGRAM_SEPARATOR)
}

/// A preprocessed document: its unigrams (in order) followed by its 2-grams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub doc_id: String,
    pub terms: Vec<String>,
}

/// Applies tokenization, stopword removal, stemming and 2-gram generation
/// with one fixed configuration.
#[derive(Debug)]
pub struct Preprocessor {
    stopwords: StopwordSet,
    stemmer: Option<TermStemmer>,
    min_token_len: usize,
}

impl Preprocessor {
    pub fn new(stopwords: StopwordSet, config: &PreprocessConfig) -> Self {
        Preprocessor {
            stopwords,
            stemmer: config.stemming_enabled.then(TermStemmer::default),
            min_token_len: config.min_token_len,
        }
    }

    /// Loads the configured stopword files and, if enabled, seeds usernames
    /// from the corpus authors.
    pub fn from_config(config: &PreprocessConfig, corpus: &Corpus) -> Result<Self> {
        config.validate()?;
        let mut stopwords = StopwordSet::from_files(&config.stopword_files)?;
        if config.builtin_english_stopwords {
            stopwords.words.extend(StopwordSet::builtin_english().words);
        }
        if config.seed_usernames_from_authors {
            stopwords.seed_usernames(corpus);
        }
        Ok(Self::new(stopwords, config))
    }

    pub fn stopwords(&self) -> &StopwordSet {
        &self.stopwords
    }

    /// The unigram stream of a text: tokens that survive stopword removal,
    /// stemmed, and at least `min_token_len` characters long. A stem that
    /// is itself a stopword ("soing" gives "so") is dropped too.
    pub fn unigrams(&self, body: &str) -> Vec<String> {
        remove_stopwords(tokenize(body), &self.stopwords)
            .into_iter()
            .map(|t| match &self.stemmer {
                Some(s) => s.stem(&t),
                None => t,
            })
            .filter(|t| t.chars().count() >= self.min_token_len && !self.stopwords.contains(t))
            .collect()
    }

    pub fn process(&self, doc_id: &str, body: &str) -> TokenizedDoc {
        let mut terms = self.unigrams(body);
        let bigrams = generate_2grams(&terms);
        terms.extend(bigrams);
        TokenizedDoc {
            doc_id: doc_id.to_owned(),
            terms,
        }
    }

    pub fn process_corpus(&self, corpus: &Corpus) -> Vec<TokenizedDoc> {
        use rayon::prelude::*;
        corpus
            .posts()
            .par_iter()
            .map(|p| self.process(&p.id, &p.body))
            .collect()
    }
}

/// Corpus vocabulary with document frequencies. Terms are ordered by
/// descending df, ties lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    df: BTreeMap<String, usize>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from a df table, ordering terms canonically.
    pub fn from_df(df: BTreeMap<String, usize>) -> Self {
        let mut terms: Vec<String> = df.keys().cloned().collect();
        terms.sort_by(|a, b| df[b].cmp(&df[a]).then_with(|| a.cmp(b)));
        Self::with_order(terms, df)
    }

    pub(crate) fn with_order(terms: Vec<String>, df: BTreeMap<String, usize>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, df, index }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn df(&self, term: &str) -> Option<usize> {
        self.df.get(term).copied()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }
}

/// Counts document frequencies, drops 2-grams below `min_2gram_df` from the
/// vocabulary and from every document, and returns the vocabulary.
pub fn build_vocabulary(docs: &mut [TokenizedDoc], min_2gram_df: usize) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::NoDocuments);
    }
    if min_2gram_df < 1 {
        return Err(Error::Config("min_2gram_df must be >= 1".into()));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in docs.iter() {
        let unique: BTreeSet<&String> = doc.terms.iter().collect();
        for term in unique {
            *df.entry(term.clone()).or_insert(0) += 1;
        }
    }
    df.retain(|term, count| !is_2gram(term) || *count >= min_2gram_df);
    for doc in docs.iter_mut() {
        doc.terms.retain(|t| df.contains_key(t));
    }
    Ok(Vocabulary::from_df(df))
}
