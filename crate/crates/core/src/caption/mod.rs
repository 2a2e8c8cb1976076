//! Caption tuple extraction: sentence splitting, normalization and parsing.

mod normalize;
mod parse;
mod split;
mod tuples;
mod words;

pub use normalize::{normalize_phrase, normalize_term, singularize};
pub use parse::{extract_tuples, render_tuples, RuleParser};
pub use split::split_sentences;
pub use tuples::{ingest_tuples, Relation, SynonymLexicon, TupleRecord, TupleSet, TUPLE_SCHEMA_VERSION};
