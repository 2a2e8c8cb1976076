//! Tuple sets (objects, attributes, relations) and the synonym lexicon.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::normalize::{normalize_phrase, normalize_term};
use crate::error::{Error, Result};

/// Current version of the tuple-record JSON schema.
pub const TUPLE_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

impl Relation {
    pub fn new(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Relation {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }
}

/// Objects, per-object attributes and relation triples extracted from one caption.
///
/// Every attribute key and relation endpoint is a member of `objects`; all
/// terms are normalized.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TupleSet {
    objects: BTreeSet<String>,
    attributes: BTreeMap<String, BTreeSet<String>>,
    relations: BTreeSet<Relation>,
}

impl TupleSet {
    pub fn new(
        objects: impl IntoIterator<Item = String>,
        attributes: impl IntoIterator<Item = (String, Vec<String>)>,
        relations: impl IntoIterator<Item = Relation>,
    ) -> Result<Self> {
        let mut set = TupleSet::default();
        for o in objects {
            let o = normalize_term(&o);
            if o.is_empty() {
                return Err(Error::validation("objects", "empty object term"));
            }
            set.objects.insert(o);
        }
        for (obj, attrs) in attributes {
            let key = normalize_term(&obj);
            if !set.objects.contains(&key) {
                return Err(Error::validation(
                    format!("attributes.{obj}"),
                    "attribute key is not a listed object",
                ));
            }
            let entry = set.attributes.entry(key).or_default();
            for a in attrs {
                let a = normalize_term(&a);
                if a.is_empty() {
                    return Err(Error::validation(
                        format!("attributes.{obj}"),
                        "empty attribute term",
                    ));
                }
                entry.insert(a);
            }
        }
        set.attributes.retain(|_, v| !v.is_empty());
        for r in relations {
            let rel = Relation::new(
                normalize_term(&r.subject),
                normalize_phrase(&r.predicate),
                normalize_term(&r.object),
            );
            for (field, term) in [("subject", &rel.subject), ("object", &rel.object)] {
                if !set.objects.contains(term) {
                    return Err(Error::validation(
                        format!("relations.{field}"),
                        format!("`{term}` is not a listed object"),
                    ));
                }
            }
            if rel.predicate.is_empty() {
                return Err(Error::validation("relations.predicate", "empty predicate"));
            }
            set.relations.insert(rel);
        }
        Ok(set)
    }

    pub fn objects(&self) -> &BTreeSet<String> {
        &self.objects
    }

    pub fn attributes(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.attributes
    }

    pub fn relations(&self) -> &BTreeSet<Relation> {
        &self.relations
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// All `(object, attribute)` pairs.
    pub fn attribute_pairs(&self) -> Vec<(String, String)> {
        self.attributes
            .iter()
            .flat_map(|(o, attrs)| attrs.iter().map(move |a| (o.clone(), a.clone())))
            .collect()
    }

    pub(crate) fn insert_object(&mut self, object: &str) {
        self.objects.insert(object.to_string());
    }

    pub(crate) fn insert_attribute(&mut self, object: &str, attribute: &str) {
        self.objects.insert(object.to_string());
        self.attributes
            .entry(object.to_string())
            .or_default()
            .insert(attribute.to_string());
    }

    pub(crate) fn insert_relation(&mut self, relation: Relation) {
        self.objects.insert(relation.subject.clone());
        self.objects.insert(relation.object.clone());
        self.relations.insert(relation);
    }

    /// Union of two tuple sets.
    pub fn merge(&mut self, other: &TupleSet) {
        self.objects.extend(other.objects.iter().cloned());
        for (o, attrs) in &other.attributes {
            self.attributes
                .entry(o.clone())
                .or_default()
                .extend(attrs.iter().cloned());
        }
        self.relations.extend(other.relations.iter().cloned());
    }

    pub fn to_record(&self, id: Option<String>) -> TupleRecord {
        TupleRecord {
            schema_version: TUPLE_SCHEMA_VERSION,
            id,
            objects: self.objects.iter().cloned().collect(),
            attributes: self
                .attributes
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| [r.subject.clone(), r.predicate.clone(), r.object.clone()])
                .collect(),
        }
    }
}

/// On-disk form of a tuple set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleRecord {
    pub schema_version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub objects: Vec<String>,
    pub attributes: BTreeMap<String, Vec<String>>,
    pub relations: Vec<[String; 3]>,
}

fn string_array(value: &Value, field: &str) -> Result<Vec<String>> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::validation(field, "expected an array of strings"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::validation(format!("{field}[{i}]"), "expected a string"))
        })
        .collect()
}

/// Validates a tuple-record JSON document and converts it to a [`TupleSet`].
///
/// Missing `objects`/`attributes`/`relations` fields are read as empty.
pub fn ingest_tuples(document: &Value) -> Result<TupleSet> {
    let obj = document
        .as_object()
        .ok_or_else(|| Error::validation("record", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "schema_version" | "id" | "objects" | "attributes" | "relations"
        ) {
            return Err(Error::validation(key.as_str(), "unknown field"));
        }
    }
    if let Some(v) = obj.get("schema_version") {
        if v.as_u64() != Some(TUPLE_SCHEMA_VERSION) {
            return Err(Error::validation(
                "schema_version",
                format!("unsupported version {v}"),
            ));
        }
    }
    if let Some(id) = obj.get("id") {
        if !id.is_string() {
            return Err(Error::validation("id", "expected a string"));
        }
    }
    let objects = match obj.get("objects") {
        Some(v) => string_array(v, "objects")?,
        None => Vec::new(),
    };
    let mut attributes = Vec::new();
    if let Some(v) = obj.get("attributes") {
        let map = v
            .as_object()
            .ok_or_else(|| Error::validation("attributes", "expected an object"))?;
        for (k, vals) in map {
            attributes.push((k.clone(), string_array(vals, &format!("attributes.{k}"))?));
        }
    }
    let mut relations = Vec::new();
    if let Some(v) = obj.get("relations") {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::validation("relations", "expected an array"))?;
        for (i, triple) in arr.iter().enumerate() {
            let field = format!("relations[{i}]");
            let parts = string_array(triple, &field)?;
            if parts.len() != 3 {
                return Err(Error::validation(field, "expected [subject, predicate, object]"));
            }
            relations.push(Relation::new(&parts[0], &parts[1], &parts[2]));
        }
    }
    TupleSet::new(objects, attributes, relations)
}

/// Symmetric synonym table over normalized terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the lexicon from `term → synonyms` groups, normalizing every
    /// term and closing the relation under symmetry.
    pub fn from_groups<I, S>(groups: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut lex = SynonymLexicon::default();
        for (term, syns) in groups {
            for s in syns {
                lex.insert_pair(term.as_ref(), s.as_ref());
            }
        }
        lex
    }

    pub fn insert_pair(&mut self, a: &str, b: &str) {
        let (a, b) = (normalize_term(a), normalize_term(b));
        if a.is_empty() || b.is_empty() || a == b {
            return;
        }
        self.entries.entry(a.clone()).or_default().insert(b.clone());
        self.entries.entry(b).or_default().insert(a);
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.entries.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn synonyms(&self, term: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiword terms, usable as known compounds by the rule parser.
    pub fn compounds(&self) -> impl Iterator<Item = &str> {
        self.entries
            .keys()
            .filter(|k| k.contains(' '))
            .map(String::as_str)
    }
}
