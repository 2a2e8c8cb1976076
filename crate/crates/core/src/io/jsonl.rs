//! Line-delimited JSON inputs. Every record is validated; the first bad
//! line fails the whole load with its line number.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::caption::{ingest_tuples, split_sentences, RuleParser, TupleSet};
use crate::error::{Error, Result};
use crate::grounding::{GroundingItem, SalienceCategory};
use crate::model::{BBox, FeatureGrid};
use crate::sqa::QAItem;

use super::read_to_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schema {
    CaptionPair,
    TupleRecord,
    GroundingItem,
    QaItem,
    QaResponse,
    FeatureTensor,
}

impl Schema {
    pub const ALL: [Schema; 6] = [
        Schema::CaptionPair,
        Schema::TupleRecord,
        Schema::GroundingItem,
        Schema::QaItem,
        Schema::QaResponse,
        Schema::FeatureTensor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::CaptionPair => "caption-pair",
            Schema::TupleRecord => "tuple-record",
            Schema::GroundingItem => "grounding-item",
            Schema::QaItem => "qa-item",
            Schema::QaResponse => "qa-response",
            Schema::FeatureTensor => "feature-tensor",
        }
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Schema::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::validation("schema", format!("unknown schema `{s}`")))
    }
}

/// One side of a caption pair: ready tuples or raw caption text.
#[derive(Debug, Clone, PartialEq)]
pub enum CaptionSide {
    Tuples(TupleSet),
    Text(String),
}

impl CaptionSide {
    pub fn to_tuples(&self, parser: &RuleParser) -> TupleSet {
        match self {
            CaptionSide::Tuples(t) => t.clone(),
            CaptionSide::Text(s) => parser.extract(&split_sentences(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptionPair {
    pub id: Option<String>,
    pub candidate: CaptionSide,
    pub reference: CaptionSide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaResponse {
    #[serde(default)]
    pub id: Option<String>,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    CaptionPair(CaptionPair),
    TupleRecord { id: Option<String>, tuples: TupleSet },
    GroundingItem { id: Option<String>, item: GroundingItem },
    QaItem(QAItem),
    QaResponse(QaResponse),
    FeatureTensor(FeatureGrid),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrounding {
    #[serde(default)]
    id: Option<String>,
    expression: String,
    predicted: [f64; 4],
    reference: [f64; 4],
    category: SalienceCategory,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTensor {
    height: usize,
    width: usize,
    dim: usize,
    data: Vec<f64>,
}

fn optional_id(obj: &serde_json::Map<String, Value>) -> Result<Option<String>> {
    match obj.get("id") {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(Error::validation("id", "expected a string")),
    }
}

fn caption_side(v: Option<&Value>, field: &str) -> Result<CaptionSide> {
    match v {
        Some(Value::String(s)) => Ok(CaptionSide::Text(s.clone())),
        Some(doc @ Value::Object(_)) => ingest_tuples(doc).map(CaptionSide::Tuples).map_err(|e| match e {
            Error::Validation { field: f, reason } => Error::validation(format!("{field}.{f}"), reason),
            other => other,
        }),
        Some(_) => Err(Error::validation(field, "expected caption text or a tuple record")),
        None => Err(Error::validation(field, "missing")),
    }
}

fn parse_record(value: Value, schema: Schema) -> Result<Record> {
    let typed = |e: serde_json::Error| Error::validation(schema.name(), e.to_string());
    match schema {
        Schema::CaptionPair => {
            let obj = value
                .as_object()
                .ok_or_else(|| Error::validation("record", "expected a JSON object"))?;
            if let Some(k) = obj.keys().find(|k| !matches!(k.as_str(), "id" | "candidate" | "reference")) {
                return Err(Error::validation(k.as_str(), "unknown field"));
            }
            Ok(Record::CaptionPair(CaptionPair {
                id: optional_id(obj)?,
                candidate: caption_side(obj.get("candidate"), "candidate")?,
                reference: caption_side(obj.get("reference"), "reference")?,
            }))
        }
        Schema::TupleRecord => {
            let id = value.as_object().map(optional_id).transpose()?.flatten();
            Ok(Record::TupleRecord {
                id,
                tuples: ingest_tuples(&value)?,
            })
        }
        Schema::GroundingItem => {
            let raw: RawGrounding = serde_json::from_value(value).map_err(typed)?;
            let bbox = |c: [f64; 4], field: &str| {
                BBox::new(c[0], c[1], c[2], c[3]).map_err(|e| Error::validation(field, e.to_string()))
            };
            Ok(Record::GroundingItem {
                id: raw.id,
                item: GroundingItem {
                    expression: raw.expression,
                    predicted: bbox(raw.predicted, "predicted")?,
                    reference: bbox(raw.reference, "reference")?,
                    category: raw.category,
                },
            })
        }
        Schema::QaItem => Ok(Record::QaItem(serde_json::from_value(value).map_err(typed)?)),
        Schema::QaResponse => Ok(Record::QaResponse(serde_json::from_value(value).map_err(typed)?)),
        Schema::FeatureTensor => {
            let raw: RawTensor = serde_json::from_value(value).map_err(typed)?;
            Ok(Record::FeatureTensor(FeatureGrid::new(raw.height, raw.width, raw.dim, raw.data)?))
        }
    }
}

/// Parses JSONL text; blank lines are skipped, an empty input is valid.
pub fn parse_jsonl(text: &str, schema: Schema) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let value: Value =
            serde_json::from_str(line).map_err(|e| Error::format(Some(line_no), format!("invalid JSON: {e}")))?;
        let rec = parse_record(value, schema).map_err(|e| Error::format(Some(line_no), e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_jsonl(path: &Path, schema: Schema) -> Result<Vec<Record>> {
    parse_jsonl(&read_to_string(path)?, schema)
}

macro_rules! typed_loader {
    ($name:ident, $schema:expr, $ty:ty, $pat:pat => $val:expr) => {
        pub fn $name(path: &Path) -> Result<Vec<$ty>> {
            Ok(load_jsonl(path, $schema)?
                .into_iter()
                .filter_map(|r| match r {
                    $pat => Some($val),
                    _ => None,
                })
                .collect())
        }
    };
}

typed_loader!(load_caption_pairs, Schema::CaptionPair, CaptionPair, Record::CaptionPair(p) => p);
typed_loader!(load_tuple_records, Schema::TupleRecord, (Option<String>, TupleSet), Record::TupleRecord { id, tuples } => (id, tuples));
typed_loader!(load_grounding_items, Schema::GroundingItem, GroundingItem, Record::GroundingItem { item, .. } => item);
typed_loader!(load_qa_items, Schema::QaItem, QAItem, Record::QaItem(q) => q);
typed_loader!(load_qa_responses, Schema::QaResponse, QaResponse, Record::QaResponse(r) => r);
typed_loader!(load_feature_tensors, Schema::FeatureTensor, FeatureGrid, Record::FeatureTensor(g) => g);

#[cfg(test)]
mod tests {
    use super::*;

    const QA: &str = r#"{"question":"q","options":["a","b","c"],"correct_index":0,"is_hallucination_probe":false}"#;

    #[test]
    fn three_valid_lines() {
        let text = format!("{QA}\n{QA}\n\n{QA}\n");
        assert_eq!(parse_jsonl(&text, Schema::QaItem).unwrap().len(), 3);
        assert!(parse_jsonl("", Schema::QaItem).unwrap().is_empty());
    }

    #[test]
    fn bad_line_is_named() {
        let bad = r#"{"question":"q","options":["a","b"],"correct_index":0}"#;
        let err = parse_jsonl(&format!("{QA}\n{bad}\n{QA}\n"), Schema::QaItem).unwrap_err();
        assert!(matches!(err, Error::Format { line: Some(2), .. }), "{err:?}");
        let err = parse_jsonl("{not json\n", Schema::QaItem).unwrap_err();
        assert!(matches!(err, Error::Format { line: Some(1), .. }));
    }

    #[test]
    fn grounding_schema() {
        let line = r#"{"expression":"the dog","predicted":[0,0,2,2],"reference":[1,1,3,3],"category":"salient_creature"}"#;
        let recs = parse_jsonl(line, Schema::GroundingItem).unwrap();
        let Record::GroundingItem { item, .. } = &recs[0] else { panic!() };
        assert!((item.iou() - 1.0 / 7.0).abs() < 1e-12);
        let inverted = r#"{"expression":"x","predicted":[2,0,0,2],"reference":[1,1,3,3],"category":"inconspicuous"}"#;
        assert!(parse_jsonl(inverted, Schema::GroundingItem).is_err());
        let bad_cat = r#"{"expression":"x","predicted":[0,0,2,2],"reference":[1,1,3,3],"category":"other"}"#;
        assert!(parse_jsonl(bad_cat, Schema::GroundingItem).is_err());
    }

    #[test]
    fn caption_pair_sides() {
        let line = r#"{"id":"p1","candidate":"A red car.","reference":{"objects":["car"],"attributes":{"car":["red"]}}}"#;
        let recs = parse_jsonl(line, Schema::CaptionPair).unwrap();
        let Record::CaptionPair(p) = &recs[0] else { panic!() };
        let parser = RuleParser::default();
        assert_eq!(p.candidate.to_tuples(&parser), p.reference.to_tuples(&parser));
        let dangling = r#"{"candidate":"x","reference":{"objects":["dog"],"attributes":{"cat":["black"]}}}"#;
        let err = parse_jsonl(dangling, Schema::CaptionPair).unwrap_err();
        assert!(err.to_string().contains("reference.attributes.cat"), "{err}");
    }

    #[test]
    fn feature_tensor_schema() {
        let recs = parse_jsonl(r#"{"height":1,"width":2,"dim":1,"data":[1.0,2.0]}"#, Schema::FeatureTensor).unwrap();
        assert!(matches!(&recs[0], Record::FeatureTensor(g) if g.n_tokens() == 2));
        assert!(parse_jsonl(r#"{"height":1,"width":2,"dim":1,"data":[1.0]}"#, Schema::FeatureTensor).is_err());
    }

    #[test]
    fn schema_names_round_trip() {
        for s in Schema::ALL {
            assert_eq!(s.name().parse::<Schema>().unwrap(), s);
        }
        assert!("bogus".parse::<Schema>().is_err());
    }
}
