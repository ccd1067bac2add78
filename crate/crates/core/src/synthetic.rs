//! Seeded generator for planted-topic corpora, used by the examples and the
//! test suites.
//!
//! Every document of a topic carries the topic's core phrase. Around it the
//! generator varies everything preprocessing is supposed to erase: letter
//! case, punctuation, hyphenation, filler stopwords, and a signature with
//! the author's username. With `extra_terms == 0` all documents of one topic
//! therefore map to the same TF-IDF row; `extra_terms > 0` appends that many
//! random words from the topic vocabulary to each document.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{Corpus, Post};

/// Filler words; all of them are in [`crate::textprep::StopwordSet::builtin_english`].
pub const FILLER_WORDS: &[&str] = &[
    "the", "and", "was", "is", "my", "for", "with", "so", "but", "very", "really", "just", "about",
];

/// Three disjoint topic vocabularies (side effects, imaging, family support).
pub fn default_topics() -> Vec<Vec<String>> {
    [
        &["nausea", "chemo", "vomiting", "fatigue", "appetite", "antiemetic"][..],
        &["scan", "nodule", "radiologist", "contrast", "biopsy", "lesion"],
        &["family", "prayer", "grandchildren", "strength", "church", "hug"],
    ]
    .iter()
    .map(|t| t.iter().map(|w| w.to_string()).collect())
    .collect()
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub topics: Vec<Vec<String>>,
    pub docs_per_topic: usize,
    pub extra_terms: usize,
    pub seed: u64,
}

impl PlantedCorpus {
    pub fn new(docs_per_topic: usize, seed: u64) -> Self {
        PlantedCorpus {
            topics: default_topics(),
            docs_per_topic,
            extra_terms: 0,
            seed,
        }
    }

    /// Documents in shuffled order, with the planted topic of each post.
    pub fn generate(&self) -> (Corpus, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut plan: Vec<usize> = (0..self.topics.len())
            .flat_map(|t| std::iter::repeat_n(t, self.docs_per_topic))
            .collect();
        plan.shuffle(&mut rng);

        let mut posts = Vec::with_capacity(plan.len());
        for (i, &topic) in plan.iter().enumerate() {
            let author = format!("member{}x{}", rng.gen_range(100..999), i);
            let body = self.body(&self.topics[topic], &author, &mut rng);
            posts.push(Post {
                id: format!("p{i:04}"),
                source: ["forum-a", "forum-b", "forum-c"][rng.gen_range(0..3)].to_string(),
                thread_id: Some(format!("t{}", rng.gen_range(0..20))),
                author: Some(author),
                timestamp: None,
                body,
            });
        }
        (Corpus::new(posts).expect("generated ids are unique"), plan)
    }

    fn body(&self, vocabulary: &[String], author: &str, rng: &mut ChaCha8Rng) -> String {
        let mut words: Vec<&str> = vocabulary.iter().map(String::as_str).collect();
        for _ in 0..self.extra_terms {
            words.push(vocabulary.choose(rng).expect("non-empty topic"));
        }
        let mut out = String::new();
        if rng.gen_bool(0.5) {
            out.push_str(FILLER_WORDS.choose(rng).unwrap());
            out.push(' ');
        }
        for (i, word) in words.iter().enumerate() {
            out.push_str(&vary_case(word, rng));
            let last = i + 1 == words.len();
            if last {
                out.push_str([".", "!", "?", "..."].choose(rng).unwrap());
            } else if rng.gen_bool(0.2) {
                out.push('-');
            } else {
                out.push_str([" ", ", ", "; ", " - "].choose(rng).unwrap());
                for _ in 0..rng.gen_range(0..3) {
                    out.push_str(&vary_case(FILLER_WORDS.choose(rng).unwrap(), rng));
                    out.push(' ');
                }
            }
        }
        out.push_str(" -- ");
        out.push_str(author);
        out
    }
}

fn vary_case(word: &str, rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..3) {
        0 => word.to_lowercase(),
        1 => word.to_uppercase(),
        _ => {
            let mut chars = word.chars();
            chars
                .next()
                .map(|c| c.to_uppercase().chain(chars).collect())
                .unwrap_or_default()
        }
    }
}
