//! Show each preprocessing step on a few sentences, then the vocabulary.
//!
//! ```bash
//! cargo run -p topic-taxonomy --example preprocess_text
//! ```

use topic_taxonomy::textprep::{
    build_vocabulary, remove_stopwords, stem, tokenize, PreprocessConfig, Preprocessor, StopwordSet,
};

const POSTS: &[&str] = &[
    "The anti-nausea meds finally helped after round 3 of chemo!",
    "Anti-nausea pills before chemo, then ginger tea. Nausea is better.",
    "My onc says the anti-nausea patch works for chemo nausea.",
    "Our families prayed through the radiation weeks.",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stopwords = StopwordSet::builtin_english();
    for post in POSTS {
        let tokens = tokenize(post);
        let kept = remove_stopwords(tokens.clone(), &stopwords);
        let stems: Vec<String> = kept.iter().map(|t| stem(t)).collect();
        println!("{post}");
        println!("  tokens:    {tokens:?}");
        println!("  stopwords: {kept:?}");
        println!("  stemmed:   {stems:?}");
    }

    let pre = Preprocessor::new(stopwords, &PreprocessConfig::default());
    let mut docs: Vec<_> = POSTS
        .iter()
        .enumerate()
        .map(|(i, p)| pre.process(&i.to_string(), p))
        .collect();
    let vocab = build_vocabulary(&mut docs, 3)?;
    println!("\nvocabulary (2-grams need df >= 3):");
    for term in vocab.terms() {
        println!("  {:<16} df={}", term, vocab.df(term).unwrap_or(0));
    }
    Ok(())
}
