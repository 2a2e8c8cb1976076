//! Synonym lexicon as a JSON object `term → [synonyms]`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use crate::caption::{normalize_term, SynonymLexicon};
use crate::error::{Error, Result};

use super::read_to_string;

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedLexicon {
    pub lexicon: SynonymLexicon,
    pub warnings: Vec<String>,
}

/// Map entries in file order, duplicates kept.
struct Entries(Vec<(String, Vec<String>)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Entries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping terms to arrays of strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Entries, A::Error> {
                let mut out = Vec::new();
                while let Some(key) = map.next_key::<String>()? {
                    let syns: Vec<String> = map
                        .next_value()
                        .map_err(|e| de::Error::custom(format!("entry `{key}`: {e}")))?;
                    out.push((key, syns));
                }
                Ok(Entries(out))
            }
        }
        d.deserialize_map(V)
    }
}

pub fn parse_lexicon(text: &str) -> Result<LoadedLexicon> {
    let Entries(entries) = serde_json::from_str(text).map_err(|e| Error::format(Some(e.line()), e.to_string()))?;
    let mut by_key: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (key, syns) in entries {
        let norm = normalize_term(&key);
        if norm.is_empty() {
            return Err(Error::format(None, "empty lexicon term"));
        }
        if by_key.insert(norm.clone(), syns).is_some() {
            let w = format!("duplicate lexicon key `{norm}`; the last entry wins");
            log::warn!("{w}");
            warnings.push(w);
        }
    }
    let mut lexicon = SynonymLexicon::new();
    for (key, syns) in &by_key {
        for s in syns {
            if normalize_term(s).is_empty() {
                return Err(Error::format(None, format!("empty synonym for `{key}`")));
            }
            lexicon.insert_pair(key, s);
        }
    }
    Ok(LoadedLexicon { lexicon, warnings })
}

pub fn load_lexicon(path: &Path) -> Result<LoadedLexicon> {
    parse_lexicon(&read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_closure() {
        let l = parse_lexicon(r#"{"building": ["edifice"]}"#).unwrap();
        assert!(l.lexicon.are_synonyms("building", "edifice"));
        assert!(l.lexicon.are_synonyms("edifice", "building"));
        assert!(l.warnings.is_empty());
    }

    #[test]
    fn empty_object() {
        assert!(parse_lexicon("{}").unwrap().lexicon.is_empty());
    }

    #[test]
    fn duplicate_keys_last_wins() {
        let l = parse_lexicon(r#"{"car": ["auto"], "car": ["automobile"]}"#).unwrap();
        assert_eq!(l.warnings.len(), 1);
        assert!(l.lexicon.are_synonyms("car", "automobile"));
        assert!(!l.lexicon.are_synonyms("car", "auto"));
    }

    #[test]
    fn non_string_entries_rejected() {
        assert!(matches!(parse_lexicon(r#"{"car": [1]}"#), Err(Error::Format { .. })));
        assert!(parse_lexicon(r#"{"car": "auto"}"#).is_err());
        assert!(parse_lexicon("[]").is_err());
    }
}
