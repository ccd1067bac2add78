use std::io::Write;
use std::path::{Path, PathBuf};

use proptest::prelude::*;

use topic_taxonomy::ingest::{parse_csv, parse_xml, CsvSchema, Post};
use topic_taxonomy::Error;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn write_tmp(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn csv_and_xml_fixtures_are_the_same_corpus() {
    let csv = parse_csv(&fixture("posts.csv"), &CsvSchema::default()).unwrap();
    let xml = parse_xml(&fixture("posts.xml")).unwrap();
    assert!(csv.skipped.is_empty());
    assert!(xml.skipped.is_empty());
    assert_eq!(csv.corpus, xml.corpus);

    let posts = csv.corpus.posts();
    assert_eq!(posts.len(), 4);
    assert_eq!(
        posts[1],
        Post {
            id: "102".into(),
            source: "cancer_forum".into(),
            thread_id: Some("t1".into()),
            author: Some("jim_k".into()),
            timestamp: Some("2014-03-02T11:40:00Z".into()),
            body: "My onc switched me to Zofran; the nausea is \"manageable\" now.".into(),
        }
    );
    assert_eq!(posts[2].thread_id, None);
    assert_eq!(posts[2].body, "Scan results Friday.\nPraying the nodule shrank.");
    assert_eq!(posts[3].author, None);
    assert_eq!(posts[3].body, "Family visited & we laughed for hours");
    assert_eq!(csv.corpus.source_counts()["cancer_forum"], 2);
    assert_eq!(csv.corpus.source_counts()["support_board"], 2);
}

#[test]
fn parsing_is_deterministic() {
    let schema = CsvSchema::default();
    assert_eq!(
        parse_csv(&fixture("posts.csv"), &schema).unwrap().corpus,
        parse_csv(&fixture("posts.csv"), &schema).unwrap().corpus
    );
    assert_eq!(
        parse_xml(&fixture("posts.xml")).unwrap().corpus,
        parse_xml(&fixture("posts.xml")).unwrap().corpus
    );
}

#[test]
fn malformed_xml_reports_line() {
    let f = write_tmp(
        "<corpus>\n<post>\n<id>1</id>\n<body>x</bod>\n</post>\n</corpus>\n",
        ".xml",
    );
    match parse_xml(f.path()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn unterminated_csv_quote_reports_line() {
    let f = write_tmp("id,body\n1,fine\n2,\"never closed\n3,x\n", ".csv");
    match parse_csv(f.path(), &CsvSchema::default()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
}

fn body_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        1 => Just(String::new()),
        1 => Just("   ".to_string()),
        6 => "[a-z]{1,8}( [a-z,.!?\"]{1,8}){0,6}",
    ]
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('"', "&quot;")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_record_is_kept_or_reported(bodies in prop::collection::vec(body_strategy(), 1..30)) {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "source", "body"]).unwrap();
        for (i, b) in bodies.iter().enumerate() {
            w.write_record([format!("r{i}").as_str(), "forum", b.as_str()]).unwrap();
        }
        let csv_text = String::from_utf8(w.into_inner().unwrap()).unwrap();

        let mut xml_text = String::from("<corpus>\n");
        for (i, b) in bodies.iter().enumerate() {
            xml_text.push_str(&format!(
                "<post><id>r{i}</id><source>forum</source><body>{}</body></post>\n",
                xml_escape(b)
            ));
        }
        xml_text.push_str("</corpus>\n");

        let blank: Vec<usize> = bodies
            .iter()
            .enumerate()
            .filter(|(_, b)| b.trim().is_empty())
            .map(|(i, _)| i + 1)
            .collect();

        let csv_file = write_tmp(&csv_text, ".csv");
        let xml_file = write_tmp(&xml_text, ".xml");
        let results = [
            parse_csv(csv_file.path(), &CsvSchema::default()),
            parse_xml(xml_file.path()),
        ];
        let mut corpora = Vec::new();
        for result in results {
            match result {
                Ok(ing) => {
                    prop_assert_eq!(ing.corpus.len() + ing.skipped.len(), bodies.len());
                    let reported: Vec<usize> = ing.skipped.skipped.iter().map(|s| s.record).collect();
                    prop_assert_eq!(&reported, &blank);
                    corpora.push(ing.corpus);
                }
                Err(Error::NoDocuments) => prop_assert_eq!(blank.len(), bodies.len()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        if corpora.len() == 2 {
            prop_assert_eq!(&corpora[0], &corpora[1]);
        }
    }
}
