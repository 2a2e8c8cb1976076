use proptest::prelude::*;
use vindex_core::caption::{SynonymLexicon, TupleSet};
use vindex_core::matching::{match_category, match_tuplesets, prf, EmbeddingTable, Stage};

const VOCAB: [&str; 8] = ["car", "truck", "tree", "sky", "dog", "road", "house", "lamp"];

fn table() -> EmbeddingTable {
    let mut t = EmbeddingTable::new(3);
    for (i, w) in VOCAB.iter().enumerate() {
        let a = i as f64 * 0.7;
        t.insert(*w, vec![a.cos(), a.sin(), 0.3]).unwrap();
    }
    t
}

fn terms() -> impl Strategy<Value = Vec<String>> {
    proptest::sample::subsequence(VOCAB.to_vec(), 0..=VOCAB.len())
        .prop_map(|v| v.into_iter().map(str::to_string).collect())
}

fn set_of(objects: &[String]) -> TupleSet {
    TupleSet::new(objects.iter().cloned(), Vec::<(String, Vec<String>)>::new(), Vec::new()).unwrap()
}

proptest! {
    #[test]
    fn swapping_sides_swaps_precision_and_recall(c in terms(), r in terms(), th in 0.0f64..1.0) {
        let (lex, t) = (SynonymLexicon::from_groups([("car", vec!["truck"])]), table());
        let ab = match_tuplesets(&set_of(&c), &set_of(&r), &lex, &t, th);
        let ba = match_tuplesets(&set_of(&r), &set_of(&c), &lex, &t, th);
        prop_assert_eq!(ab.object.n_matched, ba.object.n_matched);
        prop_assert_eq!(ab.object.precision, ba.object.recall);
        prop_assert_eq!(ab.object.recall, ba.object.precision);
        prop_assert_eq!(ab.object.f1, ba.object.f1);
    }

    #[test]
    fn matching_is_one_to_one_and_bounded(c in terms(), r in terms(), th in 0.0f64..1.0) {
        let m = match_category(&c, &r, &SynonymLexicon::new(), &table(), th);
        prop_assert!(m.n_matched() <= c.len().min(r.len()));
        let mut ci: Vec<_> = m.pairs.iter().map(|p| p.candidate).collect();
        let mut ri: Vec<_> = m.pairs.iter().map(|p| p.reference).collect();
        ci.sort(); ci.dedup(); ri.sort(); ri.dedup();
        prop_assert_eq!(ci.len(), m.pairs.len());
        prop_assert_eq!(ri.len(), m.pairs.len());
    }

    #[test]
    fn shared_terms_match_exactly(c in terms(), r in terms(), th in 0.0f64..1.0) {
        let m = match_category(&c, &r, &SynonymLexicon::new(), &table(), th);
        for (i, term) in c.iter().enumerate() {
            if r.contains(term) {
                let p = m.pairs.iter().find(|p| p.candidate == i).unwrap();
                prop_assert_eq!(p.stage, Stage::Exact);
                prop_assert_eq!(&r[p.reference], term);
            }
        }
    }

    #[test]
    fn lower_threshold_never_loses_matches(c in terms(), r in terms(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        let t = table();
        let m_lo = match_category(&c, &r, &SynonymLexicon::new(), &t, lo);
        let m_hi = match_category(&c, &r, &SynonymLexicon::new(), &t, hi);
        prop_assert!(m_lo.n_matched() >= m_hi.n_matched());
    }

    #[test]
    fn adding_a_shared_term_never_lowers_matches(c in terms(), r in terms()) {
        let t = table();
        let base = match_category(&c, &r, &SynonymLexicon::new(), &t, 0.5).n_matched();
        let (mut c2, mut r2) = (c.clone(), r.clone());
        c2.push("zebra".into());
        r2.push("zebra".into());
        prop_assert_eq!(match_category(&c2, &r2, &SynonymLexicon::new(), &t, 0.5).n_matched(), base + 1);
    }

    #[test]
    fn prf_is_harmonic(m in 0usize..20, extra_c in 0usize..20, extra_r in 0usize..20) {
        let (p, r, f) = prf(m, m + extra_c, m + extra_r);
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&r));
        if m == 0 {
            prop_assert_eq!(f, 0.0);
        } else {
            prop_assert!((f - 2.0 * p * r / (p + r)).abs() < 1e-12);
        }
    }
}

#[test]
fn synonym_stage_precedes_semantic() {
    // `car` is closer to `truck` by embedding than to `auto`, but the lexicon pairs it with `auto`
    let mut t = EmbeddingTable::new(2);
    t.insert("car", vec![1.0, 0.0]).unwrap();
    t.insert("truck", vec![0.99, 0.1]).unwrap();
    t.insert("auto", vec![0.0, 1.0]).unwrap();
    let lex = SynonymLexicon::from_groups([("car", vec!["auto"])]);
    let c = vec!["car".to_string()];
    let r = vec!["truck".to_string(), "auto".to_string()];
    let m = match_category(&c, &r, &lex, &t, 0.5);
    assert_eq!(m.pairs.len(), 1);
    assert_eq!((m.pairs[0].reference, m.pairs[0].stage), (1, Stage::Synonym));
}
