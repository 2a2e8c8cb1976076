//! Plain-text word vectors: `term v1 v2 … vd` per line, single spaces.
//! Underscores in a term stand for spaces (`city_street`).

use std::fmt::Write as _;
use std::path::Path;

use crate::caption::normalize_phrase;
use crate::error::{Error, Result};
use crate::matching::EmbeddingTable;

use super::{read_to_string, write_bytes};

pub fn parse_embedding_table(text: &str) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let term = fields.next().unwrap_or_default();
        if term.is_empty() {
            return Err(Error::format(Some(line_no), "line starts with a space"));
        }
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::format(Some(line_no), format!("`{f}` is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.is_empty() {
            return Err(Error::format(Some(line_no), format!("term `{term}` has no vector")));
        }
        let t = table.get_or_insert_with(|| EmbeddingTable::new(values.len()));
        if values.len() != t.dim() {
            return Err(Error::format(
                Some(line_no),
                format!("dimension {} differs from {} established on the first line", values.len(), t.dim()),
            ));
        }
        let key = normalize_phrase(&term.replace('_', " "));
        if t.get(&key).is_some() {
            return Err(Error::format(Some(line_no), format!("duplicate term `{key}`")));
        }
        t.insert(key, values).map_err(|e| Error::format(Some(line_no), e.to_string()))?;
    }
    table.ok_or_else(|| Error::format(None, "embedding table is empty"))
}

pub fn load_embedding_table(path: &Path) -> Result<EmbeddingTable> {
    parse_embedding_table(&read_to_string(path)?)
}

pub fn format_embedding_table(table: &EmbeddingTable) -> String {
    let mut out = String::new();
    for (term, v) in table.iter() {
        out.push_str(&term.replace(' ', "_"));
        for x in v {
            // `{:?}` prints the shortest representation that round-trips
            let _ = write!(out, " {x:?}");
        }
        out.push('\n');
    }
    out
}

pub fn write_embedding_table(path: &Path, table: &EmbeddingTable) -> Result<()> {
    write_bytes(path, format_embedding_table(table).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_lines() {
        let t = parse_embedding_table("cat 1 0 0\ndog 0.5 0.5 0\n").unwrap();
        assert_eq!((t.len(), t.dim()), (2, 3));
    }

    #[test]
    fn dimension_mismatch_names_line() {
        let err = parse_embedding_table("cat 1 0 0\ndog 0.5 0.5\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: Some(2), .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_embedding_table(""), Err(Error::Format { line: None, .. })));
        assert!(parse_embedding_table("cat 1 x\n").is_err());
        assert!(parse_embedding_table("cat 1 NaN\n").is_err());
        assert!(parse_embedding_table("cat\n").is_err());
        assert!(parse_embedding_table("cat 1\ncat 2\n").is_err());
    }

    #[test]
    fn underscores_are_spaces() {
        let t = parse_embedding_table("city_street 1 2\n").unwrap();
        assert_eq!(t.get("city street"), Some(&[1.0, 2.0][..]));
        assert_eq!(format_embedding_table(&t), "city_street 1.0 2.0\n");
    }
}
