use proptest::prelude::*;
use vindex_core::io::embeddings::format_embedding_table;
use vindex_core::io::{parse_embedding_table, parse_jsonl, parse_lexicon, read_tensor_bytes, write_tensor_bytes, Schema};
use vindex_core::matching::EmbeddingTable;
use vindex_core::{Error, FeatureGrid};

proptest! {
    #[test]
    fn tensor_bytes_round_trip(h in 1usize..5, w in 1usize..5, d in 1usize..5, seed in prop::collection::vec(-1e6f64..1e6, 64)) {
        let data: Vec<f64> = (0..h * w * d).map(|i| seed[i % seed.len()] * (i as f64 + 0.5)).collect();
        let g = FeatureGrid::new(h, w, d, data).unwrap();
        let bytes = write_tensor_bytes(&g);
        prop_assert_eq!(bytes.len(), 16 + 8 * h * w * d);
        prop_assert_eq!(read_tensor_bytes(&bytes).unwrap(), g);
    }

    #[test]
    fn embedding_text_round_trip(vals in prop::collection::vec(-10.0f64..10.0, 6)) {
        let mut t = EmbeddingTable::new(3);
        t.insert("city street", vals[..3].to_vec()).unwrap();
        t.insert("car", vals[3..].to_vec()).unwrap();
        let back = parse_embedding_table(&format_embedding_table(&t)).unwrap();
        prop_assert_eq!(back.get("city street"), t.get("city street"));
        prop_assert_eq!(back.get("car"), t.get("car"));
    }
}

#[test]
fn embedding_dim_change_names_line() {
    let err = parse_embedding_table("a 1 2 3\nb 1 2\n").unwrap_err();
    assert!(matches!(err, Error::Format { line: Some(2), .. }), "{err}");
    assert!(matches!(parse_embedding_table("").unwrap_err(), Error::Format { line: None, .. }));
}

#[test]
fn jsonl_reports_first_bad_line() {
    let text = "{\"id\":\"a\",\"response\":\"A\"}\n{\"response\":3}\n{\"response\":\"B\"}\n";
    let err = parse_jsonl(text, Schema::QaResponse).unwrap_err();
    assert!(matches!(err, Error::Format { line: Some(2), .. }), "{err}");
    assert!(parse_jsonl("", Schema::QaResponse).unwrap().is_empty());
    assert_eq!(parse_jsonl("{\"response\":\"A\"}\n\n{\"response\":\"B\"}\n", Schema::QaResponse).unwrap().len(), 2);
}

#[test]
fn lexicon_is_symmetric_and_last_key_wins() {
    let loaded = parse_lexicon(r#"{"building": ["edifice"]}"#).unwrap();
    assert!(loaded.lexicon.are_synonyms("edifice", "building"));
    assert!(loaded.lexicon.are_synonyms("building", "edifice"));
    assert!(parse_lexicon("{}").unwrap().lexicon.is_empty());
    let dup = parse_lexicon(r#"{"car": ["auto"], "car": ["automobile"]}"#).unwrap();
    assert_eq!(dup.warnings.len(), 1);
    assert!(dup.lexicon.are_synonyms("car", "automobile"));
    assert!(!dup.lexicon.are_synonyms("car", "auto"));
    assert!(matches!(parse_lexicon(r#"{"car": [1]}"#).unwrap_err(), Error::Format { .. }));
}
