//! Three-option salient QA: item validation, free-text answer parsing and
//! accuracy scoring with probe/present splits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_OPTIONS: usize = 3;
const LETTERS: [char; N_OPTIONS] = ['A', 'B', 'C'];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQaItem")]
pub struct QAItem {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub question: String,
    pub options: Vec<String>,
    pub correct_index: usize,
    pub is_hallucination_probe: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQaItem {
    #[serde(default)]
    id: Option<String>,
    question: String,
    options: Vec<String>,
    correct_index: usize,
    #[serde(default)]
    is_hallucination_probe: bool,
}

impl TryFrom<RawQaItem> for QAItem {
    type Error = Error;

    fn try_from(r: RawQaItem) -> Result<Self> {
        let mut item = QAItem::new(r.question, r.options, r.correct_index, r.is_hallucination_probe)?;
        item.id = r.id;
        Ok(item)
    }
}

impl QAItem {
    pub fn new(
        question: impl Into<String>,
        options: Vec<String>,
        correct_index: usize,
        is_hallucination_probe: bool,
    ) -> Result<Self> {
        let item = QAItem {
            id: None,
            question: question.into(),
            options,
            correct_index,
            is_hallucination_probe,
        };
        item.validate()?;
        Ok(item)
    }

    pub fn validate(&self) -> Result<()> {
        if self.options.len() != N_OPTIONS {
            return Err(Error::validation(
                "options",
                format!("expected {N_OPTIONS} options, found {}", self.options.len()),
            ));
        }
        if self.correct_index >= N_OPTIONS {
            return Err(Error::validation(
                "correct_index",
                format!("{} is not in 0..{N_OPTIONS}", self.correct_index),
            ));
        }
        let normed: Vec<String> = self.options.iter().map(|o| normalize_text(o)).collect();
        for (i, o) in normed.iter().enumerate() {
            if o.is_empty() {
                return Err(Error::validation(format!("options[{i}]"), "empty option"));
            }
            if normed[..i].contains(o) {
                // a duplicate would make two options correct
                return Err(Error::validation(format!("options[{i}]"), "duplicate option"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaSet {
    pub items: Vec<QAItem>,
    pub warnings: Vec<String>,
}

/// Checks every item and warns (without failing) when probes and
/// present-object items are unbalanced.
pub fn validate_qa_set(items: Vec<QAItem>) -> Result<QaSet> {
    for (i, item) in items.iter().enumerate() {
        item.validate().map_err(|e| match e {
            Error::Validation { field, reason } => Error::validation(format!("items[{i}].{field}"), reason),
            other => other,
        })?;
    }
    let probes = items.iter().filter(|i| i.is_hallucination_probe).count();
    let present = items.len() - probes;
    let mut warnings = Vec::new();
    if probes != present {
        let w = format!("unbalanced QA set: {present} present-object items, {probes} hallucination probes");
        log::warn!("{w}");
        warnings.push(w);
    }
    Ok(QaSet { items, warnings })
}

/// Lowercase, alphanumeric words separated by single spaces.
fn normalize_text(s: &str) -> String {
    s.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn letter_index(c: char) -> Option<usize> {
    LETTERS.iter().position(|l| *l == c.to_ascii_uppercase())
}

fn leading_letter(response: &str) -> Option<usize> {
    let t = response.trim();
    let bare = t.trim_end_matches(['.', ')', ':', '!']);
    let bare = bare.strip_prefix('(').unwrap_or(bare);
    let mut chars = bare.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        return letter_index(c);
    }
    // "(B) ...", "B. ...", "B: ...", "B) ..."
    let mut chars = t.chars();
    let mut first = chars.next()?;
    let opened = first == '(';
    if opened {
        first = chars.next()?;
    }
    let marker = chars.next()?;
    let closes = if opened { marker == ')' } else { matches!(marker, '.' | ':' | ')') };
    let next_is_break = chars.next().is_none_or(char::is_whitespace);
    if closes && next_is_break {
        return letter_index(first);
    }
    None
}

fn isolated_letters(response: &str) -> Vec<usize> {
    let words: Vec<&str> = response
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect();
    let mut found = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let cue = i > 0 && matches!(words[i - 1].to_lowercase().as_str(), "is" | "option" | "choice" | "answer");
        let mut chars = w.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            continue;
        };
        // a sentence-initial capital "A" is usually the article
        let uppercase_hit = c.is_ascii_uppercase() && i > 0;
        if uppercase_hit || cue {
            found.extend(letter_index(c));
        }
    }
    found
}

/// Maps a free-text response to an option index.
///
/// An option letter wins over option text. Conflicting letters or equally
/// long text matches yield `None`.
pub fn parse_choice(response: &str, options: &[String]) -> Option<usize> {
    let n = options.len().min(N_OPTIONS);
    if let Some(i) = leading_letter(response) {
        return (i < n).then_some(i);
    }
    let mut letters = isolated_letters(response);
    letters.sort_unstable();
    letters.dedup();
    match letters.as_slice() {
        [i] => return (*i < n).then_some(*i),
        [] => {}
        _ => return None,
    }
    let resp = format!(" {} ", normalize_text(response));
    let mut best: Option<(usize, usize)> = None;
    let mut tied = false;
    for (i, opt) in options.iter().enumerate().take(n) {
        let o = normalize_text(opt);
        if o.is_empty() || !resp.contains(&format!(" {o} ")) {
            continue;
        }
        match best {
            Some((_, len)) if o.len() < len => {}
            Some((_, len)) if o.len() == len => tied = true,
            _ => {
                best = Some((i, o.len()));
                tied = false;
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqaScore {
    pub n_items: usize,
    pub n_correct: usize,
    pub n_unparsed: usize,
    pub accuracy: f64,
    /// Accuracy over hallucination probes; `None` when there are none.
    pub probe_accuracy: Option<f64>,
    pub present_accuracy: Option<f64>,
}

/// Accuracy over parsed responses; `None` counts as incorrect.
pub fn score(items: &[QAItem], responses: &[Option<usize>]) -> Result<SqaScore> {
    if items.len() != responses.len() {
        return Err(Error::shape(format!(
            "{} QA items but {} responses",
            items.len(),
            responses.len()
        )));
    }
    if items.is_empty() {
        return Err(Error::EmptyCorpus("no QA items".into()));
    }
    let pct = |c: usize, n: usize| (n > 0).then(|| 100.0 * c as f64 / n as f64);
    let (mut probe_n, mut probe_c, mut pres_n, mut pres_c) = (0, 0, 0, 0);
    for (item, resp) in items.iter().zip(responses) {
        let ok = *resp == Some(item.correct_index);
        if item.is_hallucination_probe {
            probe_n += 1;
            probe_c += ok as usize;
        } else {
            pres_n += 1;
            pres_c += ok as usize;
        }
    }
    let n_correct = probe_c + pres_c;
    Ok(SqaScore {
        n_items: items.len(),
        n_correct,
        n_unparsed: responses.iter().filter(|r| r.is_none()).count(),
        accuracy: 100.0 * n_correct as f64 / items.len() as f64,
        probe_accuracy: pct(probe_c, probe_n),
        present_accuracy: pct(pres_c, pres_n),
    })
}

pub fn score_text(items: &[QAItem], responses: &[String]) -> Result<SqaScore> {
    if items.len() != responses.len() {
        return Err(Error::shape(format!(
            "{} QA items but {} responses",
            items.len(),
            responses.len()
        )));
    }
    let parsed: Vec<Option<usize>> = items
        .iter()
        .zip(responses)
        .map(|(i, r)| parse_choice(r, &i.options))
        .collect();
    score(items, &parsed)
}
