//! Deterministic grammar parser turning sentences into a [`TupleSet`].
//!
//! Handled patterns: `ADJ* NOUN` noun phrases (adjectives and noun modifiers
//! become attributes), `NP and NP` coordination, `NP VERB-PHRASE NP`
//! relations (a verb phrase is any run of verbs and prepositions), and
//! copular attributes (`NP is ADJ`). Anything else contributes nothing.

use std::collections::BTreeSet;

use super::normalize::{normalize_phrase, normalize_term};
use super::tuples::{Relation, SynonymLexicon, TupleSet};
use super::words::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Det,
    Pron,
    Aux,
    Prep,
    Conj,
    Adv,
    Adj,
    Verb,
    Noun,
    /// Possessive noun (`man's`): ends the current phrase.
    Possessive,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    tag: Tag,
}

#[derive(Debug, Clone)]
struct NounPhrase {
    head: String,
    attributes: Vec<String>,
    frame: bool,
}

#[derive(Debug, Clone)]
enum Chunk {
    Np(NounPhrase),
    Verb(String),
    Prep(String),
    Adj(String),
    Conj,
    Aux,
    Skip,
}

/// Rule parser with a configurable known-compound list.
#[derive(Debug, Clone)]
pub struct RuleParser {
    compounds: BTreeSet<String>,
    max_compound_words: usize,
}

impl Default for RuleParser {
    fn default() -> Self {
        RuleParser::with_compounds(COMPOUNDS.iter().copied())
    }
}

impl RuleParser {
    pub fn with_compounds<'a>(compounds: impl IntoIterator<Item = &'a str>) -> Self {
        let compounds: BTreeSet<String> = compounds.into_iter().map(normalize_term).collect();
        let max_compound_words = compounds
            .iter()
            .map(|c| c.split(' ').count())
            .max()
            .unwrap_or(1);
        RuleParser {
            compounds,
            max_compound_words,
        }
    }

    /// Default compounds plus every multiword term of `lexicon`.
    pub fn with_lexicon(lexicon: &SynonymLexicon) -> Self {
        RuleParser::with_compounds(COMPOUNDS.iter().copied().chain(lexicon.compounds()))
    }

    pub fn extract(&self, sentences: &[String]) -> TupleSet {
        let mut set = TupleSet::default();
        for s in sentences {
            self.extract_sentence(s, &mut set);
        }
        set
    }

    fn extract_sentence(&self, sentence: &str, set: &mut TupleSet) {
        let tokens = self.tokenize(sentence);
        let chunks = chunk(&tokens);

        let mut subjects: Vec<NounPhrase> = Vec::new();
        let mut predicate: Vec<String> = Vec::new();
        // subjects and predicate of the relation last emitted, for `V NP and NP`
        let mut last_relation: Option<(Vec<NounPhrase>, String)> = None;
        let mut pending_conj = false;
        let mut after_copula = false;

        for c in chunks {
            match c {
                Chunk::Np(np) => {
                    register(set, &np);
                    if !predicate.is_empty() && !subjects.is_empty() {
                        let pred = predicate.join(" ");
                        emit(set, &subjects, &pred, &np);
                        last_relation = Some((std::mem::take(&mut subjects), pred));
                        subjects = vec![np];
                    } else if pending_conj && !subjects.is_empty() {
                        if let Some((subj, pred)) = &last_relation {
                            emit(set, subj, pred, &np);
                        }
                        subjects.push(np);
                    } else {
                        subjects = vec![np];
                        last_relation = None;
                    }
                    predicate.clear();
                    pending_conj = false;
                    after_copula = false;
                }
                Chunk::Verb(lemma) => {
                    predicate.push(lemma);
                    pending_conj = false;
                    after_copula = false;
                }
                Chunk::Prep(word) => {
                    predicate.push(word);
                    pending_conj = false;
                }
                Chunk::Adj(word) => {
                    if after_copula || (pending_conj && predicate.is_empty()) {
                        let attr = normalize_term(&word);
                        for s in subjects.iter().filter(|s| !s.frame) {
                            set.insert_attribute(&s.head, &attr);
                        }
                        after_copula = true;
                    }
                    pending_conj = false;
                }
                Chunk::Conj => {
                    if predicate.is_empty() {
                        pending_conj = true;
                    }
                }
                Chunk::Aux => {
                    after_copula = true;
                }
                Chunk::Skip => {}
            }
        }
    }

    fn tokenize(&self, sentence: &str) -> Vec<Token> {
        let mut raw: Vec<(String, bool)> = Vec::new();
        let mut current = String::new();
        let flush = |current: &mut String, raw: &mut Vec<(String, bool)>| {
            if !current.is_empty() {
                let w = current.trim_matches(|c| c == '\'' || c == '-').to_string();
                if !w.is_empty() {
                    raw.push((w, false));
                }
                current.clear();
            }
        };
        for ch in sentence.chars() {
            if ch.is_alphanumeric() || ch == '\'' || ch == '-' || ch == '&' {
                current.extend(ch.to_lowercase());
            } else {
                flush(&mut current, &mut raw);
                if matches!(ch, ',' | ';' | ':') {
                    raw.push((",".to_string(), true));
                }
            }
        }
        flush(&mut current, &mut raw);

        let mut tokens = Vec::new();
        let mut i = 0;
        while i < raw.len() {
            if raw[i].1 {
                tokens.push(Token {
                    text: ",".into(),
                    tag: Tag::Comma,
                });
                i += 1;
                continue;
            }
            if let Some((len, phrase)) = self.compound_at(&raw, i) {
                tokens.push(Token {
                    text: phrase,
                    tag: Tag::Noun,
                });
                i += len;
                continue;
            }
            let word = &raw[i].0;
            let (text, tag) = if let Some(stem) = word.strip_suffix("'s") {
                (stem.to_string(), Tag::Possessive)
            } else {
                (word.clone(), classify(word))
            };
            tokens.push(Token { text, tag });
            i += 1;
        }
        // participles used as modifiers: `a parked car`
        for k in 0..tokens.len() {
            if tokens[k].tag == Tag::Verb
                && k > 0
                && matches!(tokens[k - 1].tag, Tag::Det | Tag::Adj)
                && tokens
                    .get(k + 1)
                    .is_some_and(|t| matches!(t.tag, Tag::Adj | Tag::Noun))
            {
                tokens[k].tag = Tag::Adj;
            }
        }
        tokens
    }

    fn compound_at(&self, raw: &[(String, bool)], start: usize) -> Option<(usize, String)> {
        for len in (2..=self.max_compound_words).rev() {
            if start + len > raw.len() || raw[start..start + len].iter().any(|r| r.1) {
                continue;
            }
            let phrase = normalize_term(
                &raw[start..start + len]
                    .iter()
                    .map(|r| r.0.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            if self.compounds.contains(&phrase) {
                return Some((len, phrase));
            }
        }
        None
    }
}

fn register(set: &mut TupleSet, np: &NounPhrase) {
    if np.frame {
        return;
    }
    set.insert_object(&np.head);
    for a in &np.attributes {
        set.insert_attribute(&np.head, a);
    }
}

fn emit(set: &mut TupleSet, subjects: &[NounPhrase], predicate: &str, object: &NounPhrase) {
    if object.frame {
        return;
    }
    for s in subjects.iter().filter(|s| !s.frame) {
        if s.head != object.head {
            set.insert_relation(Relation::new(
                s.head.clone(),
                normalize_phrase(predicate),
                object.head.clone(),
            ));
        }
    }
}

fn chunk(tokens: &[Token]) -> Vec<Chunk> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        match t.tag {
            Tag::Det | Tag::Adj | Tag::Noun | Tag::Possessive => {
                let mut modifiers: Vec<&Token> = Vec::new();
                let mut nouns: Vec<&Token> = Vec::new();
                let mut j = i;
                while j < tokens.len() {
                    let tj = &tokens[j];
                    match tj.tag {
                        Tag::Det if nouns.is_empty() => {}
                        Tag::Adj if nouns.is_empty() => modifiers.push(tj),
                        Tag::Noun => nouns.push(tj),
                        Tag::Possessive => {
                            nouns.push(tj);
                            j += 1;
                            break;
                        }
                        _ => break,
                    }
                    j += 1;
                }
                if nouns.is_empty() {
                    for m in modifiers {
                        out.push(Chunk::Adj(m.text.clone()));
                    }
                    if j == i {
                        j += 1;
                    }
                } else {
                    let head_tok = nouns.pop().unwrap();
                    let head = normalize_term(&head_tok.text);
                    let attributes = modifiers
                        .iter()
                        .chain(nouns.iter())
                        .map(|m| normalize_term(&m.text))
                        .filter(|a| !a.is_empty() && *a != head)
                        .collect();
                    let frame = FRAME_NOUNS.contains(&head.as_str());
                    out.push(Chunk::Np(NounPhrase {
                        head,
                        attributes,
                        frame,
                    }));
                }
                i = j;
            }
            Tag::Verb => {
                out.push(Chunk::Verb(lemmatize_verb(&t.text)));
                i += 1;
            }
            Tag::Prep => {
                out.push(Chunk::Prep(t.text.clone()));
                i += 1;
            }
            Tag::Conj | Tag::Comma => {
                out.push(Chunk::Conj);
                i += 1;
            }
            Tag::Aux => {
                out.push(Chunk::Aux);
                i += 1;
            }
            Tag::Pron | Tag::Adv => {
                out.push(Chunk::Skip);
                i += 1;
            }
        }
    }
    out
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn verb_base(word: &str) -> Option<&'static str> {
    if let Some(&(_, lemma)) = IRREGULAR_VERBS.iter().find(|(f, _)| *f == word) {
        return Some(lemma);
    }
    if let Some(v) = VERBS.iter().find(|v| **v == word) {
        return Some(v);
    }
    // third person singular
    let candidates = [
        word.strip_suffix("ies").map(|s| format!("{s}y")),
        word.strip_suffix("es").map(str::to_string),
        word.strip_suffix('s').map(str::to_string),
    ];
    candidates
        .into_iter()
        .flatten()
        .find_map(|c| VERBS.iter().find(|v| **v == c).copied())
}

fn classify(word: &str) -> Tag {
    let w = word;
    if w.chars().all(|c| c.is_ascii_digit()) {
        return Tag::Det;
    }
    if DETERMINERS.contains(&w) {
        return Tag::Det;
    }
    if PRONOUNS.contains(&w) {
        return Tag::Pron;
    }
    if AUXILIARIES.contains(&w) {
        return Tag::Aux;
    }
    if PREPOSITIONS.contains(&w) {
        return Tag::Prep;
    }
    if CONJUNCTIONS.contains(&w) {
        return Tag::Conj;
    }
    if ADVERBS.contains(&w) {
        return Tag::Adv;
    }
    if ADJECTIVES.contains(&w) {
        return Tag::Adj;
    }
    if NOUN_EXCEPTIONS.contains(&w) {
        return Tag::Noun;
    }
    if verb_base(w).is_some() {
        return Tag::Verb;
    }
    let n = w.len();
    if n > 4 && w.ends_with("ly") {
        return Tag::Adv;
    }
    if (n > 4 && w.ends_with("ing")) || (n > 3 && w.ends_with("ed")) {
        return Tag::Verb;
    }
    if (n > 4 && (w.ends_with("ful") || w.ends_with("ous")))
        || (n > 5 && w.ends_with("less"))
        || (n > 6 && w.ends_with("ive"))
    {
        return Tag::Adj;
    }
    Tag::Noun
}

/// Reduces an inflected verb to its lemma.
pub(crate) fn lemmatize_verb(word: &str) -> String {
    if let Some(base) = verb_base(word) {
        return base.to_string();
    }
    let stem = if let Some(s) = word.strip_suffix("ing") {
        s
    } else if let Some(s) = word.strip_suffix("ied") {
        return format!("{s}y");
    } else if let Some(s) = word.strip_suffix("ed") {
        s
    } else {
        return word.to_string();
    };
    if let Some(base) = VERBS.iter().find(|v| **v == stem) {
        return base.to_string();
    }
    let b = stem.as_bytes();
    let n = b.len();
    if n == 0 {
        return word.to_string();
    }
    if n >= 2 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !matches!(b[n - 1], b'l' | b's' | b'z')
    {
        return stem[..n - 1].to_string();
    }
    if n <= 2 {
        // used -> use, tied -> tie
        return format!("{stem}e");
    }
    let last = b[n - 1];
    let cvc = !is_vowel(b[n - 3])
        && is_vowel(b[n - 2])
        && !is_vowel(last)
        && !matches!(last, b'w' | b'x' | b'y');
    let needs_e = (cvc && n <= 4)
        || matches!(last, b'v' | b'c')
        || (last == b'z' && b[n - 2] != b'z')
        || (last == b's' && is_vowel(b[n - 2]) && b[n - 3] != b'u')
        || (last == b'g' && (b[n - 2] == b'd' || (b[n - 2] == b'n' && n > 5 && b[n - 3] == b'a')))
        || (stem.ends_with("at") && n >= 5 && !stem.ends_with("eat") && !stem.ends_with("oat"));
    if needs_e {
        format!("{stem}e")
    } else {
        stem.to_string()
    }
}

/// Extracts objects, attributes and relations with the default rule parser.
pub fn extract_tuples(sentences: &[String]) -> TupleSet {
    RuleParser::default().extract(sentences)
}

/// Renders a tuple set back into simple sentences (`There is a X.`,
/// `The X is Y.`, `The S P the O.`).
pub fn render_tuples(set: &TupleSet) -> Vec<String> {
    let mut out = Vec::new();
    for o in set.objects() {
        out.push(format!("There is a {o}."));
    }
    for (o, a) in set.attribute_pairs() {
        out.push(format!("The {o} is {a}."));
    }
    for r in set.relations() {
        out.push(format!("The {} {} the {}.", r.subject, r.predicate, r.object));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caption::split_sentences;

    fn objects(set: &TupleSet) -> Vec<&str> {
        set.objects().iter().map(String::as_str).collect()
    }

    const STREET: &str = "A red car and a white truck are driving down a city street lined with green trees. Tall buildings in the background.";

    #[test]
    fn street_caption_objects() {
        let set = extract_tuples(&split_sentences(STREET));
        assert_eq!(objects(&set), vec!["building", "car", "city street", "tree", "truck"]);
    }

    #[test]
    fn street_caption_attributes_and_relations() {
        let set = extract_tuples(&split_sentences(STREET));
        let attrs = set.attribute_pairs();
        for (o, a) in [("car", "red"), ("truck", "white"), ("tree", "green"), ("building", "tall")] {
            assert!(attrs.contains(&(o.to_string(), a.to_string())), "{o}:{a}");
        }
        assert_eq!(attrs.len(), 4);
        assert!(set.relations().contains(&Relation::new("car", "drive down", "city street")));
        assert!(set.relations().contains(&Relation::new("truck", "drive down", "city street")));
        // `background` frames the scene and is not an object
        assert!(set.relations().iter().all(|r| r.object != "background"));
    }

    #[test]
    fn single_adjective_noun() {
        let set = extract_tuples(&["a red car".to_string()]);
        assert_eq!(objects(&set), vec!["car"]);
        assert_eq!(set.attribute_pairs(), vec![("car".into(), "red".into())]);
        assert!(set.relations().is_empty());
    }

    #[test]
    fn bare_noun() {
        let set = extract_tuples(&["dog.".to_string()]);
        assert_eq!(objects(&set), vec!["dog"]);
        assert!(set.attributes().is_empty());
        assert!(set.relations().is_empty());
    }

    #[test]
    fn copular_attributes() {
        let set = extract_tuples(&split_sentences("The sky is blue and clear."));
        assert_eq!(set.attributes()["sky"].len(), 2);
    }

    #[test]
    fn coordinated_objects_of_a_relation() {
        let set = extract_tuples(&split_sentences("A man holds a cup and a plate."));
        assert!(set.relations().contains(&Relation::new("man", "hold", "cup")));
        assert!(set.relations().contains(&Relation::new("man", "hold", "plate")));
    }

    #[test]
    fn plural_subjects_and_irregulars() {
        let set = extract_tuples(&split_sentences("Several people are sitting on benches."));
        assert!(set.relations().contains(&Relation::new("person", "sit on", "bench")));
    }

    #[test]
    fn lemmas() {
        for (w, l) in [
            ("driving", "drive"),
            ("lined", "line"),
            ("running", "run"),
            ("sitting", "sit"),
            ("rolling", "roll"),
            ("playing", "play"),
            ("carried", "carry"),
            ("parked", "park"),
            ("grazing", "graze"),
            ("standing", "stand"),
            ("stands", "stand"),
            ("placed", "place"),
            ("arranged", "arrange"),
            ("hanging", "hang"),
            ("eating", "eat"),
            ("used", "use"),
            ("decorated", "decorate"),
            ("seated", "seat"),
        ] {
            assert_eq!(lemmatize_verb(w), l, "{w}");
        }
    }

    #[test]
    fn unparseable_contributes_nothing() {
        assert!(extract_tuples(&["and of the with".to_string()]).is_empty());
        assert!(extract_tuples(&[]).is_empty());
    }

    #[test]
    fn deterministic() {
        let s = split_sentences(STREET);
        assert_eq!(extract_tuples(&s), extract_tuples(&s));
    }

    const NOUNS: &[&str] = &[
        "dog", "cats", "trees", "car", "buses", "people", "benches", "building", "city street",
        "horse", "ball", "umbrella", "boxes", "child", "sky", "shirt", "river",
    ];
    const ADJS: &[&str] = &["red", "tall", "small", "wooden", "green", "busy", "old", "shiny"];
    const PREDS: &[&str] = &["is on", "sits near", "holding", "under", "next to", "standing by"];

    proptest::proptest! {
        #[test]
        fn rendering_round_trip_keeps_objects(
            parts in proptest::collection::vec((0..ADJS.len(), 0..NOUNS.len(), 0..PREDS.len(), 0..NOUNS.len()), 1..5)
        ) {
            let sentences: Vec<String> = parts.iter().map(|&(a, s, p, o)| {
                format!("A {} {} {} the {}.", ADJS[a], NOUNS[s], PREDS[p], NOUNS[o])
            }).collect();
            let first = extract_tuples(&sentences);
            let again = extract_tuples(&render_tuples(&first));
            proptest::prop_assert!(first.objects().is_subset(again.objects()),
                "{:?} vs {:?}", first.objects(), again.objects());
        }
    }
}
