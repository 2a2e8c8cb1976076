//! Rule-based sentence splitting.

/// Tokens ending in `.` that do not close a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.", "vs.", "etc.", "e.g.", "i.e.",
    "approx.", "no.", "fig.", "inc.", "ltd.", "co.", "mt.", "ave.",
];

fn is_delimiter(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits `text` on `.`, `!` and `?`.
///
/// A run of delimiters stays attached to the sentence it closes. A `.` does
/// not split when it is followed by a non-space character (`3.5`, `a.m`), or
/// when the whitespace-delimited token it ends is a known abbreviation.
/// Sentences are trimmed; whitespace-only pieces are dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !is_delimiter(c) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < chars.len() && is_delimiter(chars[j + 1].1) {
            j += 1;
        }
        let end = chars.get(j + 1).map_or(text.len(), |&(b, _)| b);
        let next = chars.get(j + 1).map(|&(_, c)| c);
        let followed_by_space = next.map_or(true, |c| c.is_whitespace() || is_closing(c));
        let splits = if j == i && c == '.' {
            followed_by_space && !ends_abbreviation(&text[..end])
        } else {
            followed_by_space
        };
        if splits {
            // swallow closing quotes/brackets right after the delimiter
            let mut k = j + 1;
            while k < chars.len() && is_closing(chars[k].1) {
                k += 1;
            }
            let cut = chars.get(k).map_or(text.len(), |&(b, _)| b);
            push_trimmed(&mut sentences, &text[start..cut]);
            start = cut;
            i = k;
        } else {
            i = j + 1;
        }
    }
    push_trimmed(&mut sentences, &text[start..]);
    sentences
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let t = piece.trim();
    if !t.is_empty() {
        out.push(t.to_string());
    }
}

fn ends_abbreviation(prefix: &str) -> bool {
    let token = prefix
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(['(', '"', '\'']);
    let lower = token.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squash(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    #[test]
    fn street_caption_has_two_sentences() {
        let text = "A red car and a white truck are driving down a city street lined with green trees. Tall buildings in the background.";
        let s = split_sentences(text);
        assert_eq!(s.len(), 2);
        assert_eq!(s[1], "Tall buildings in the background.");
    }

    #[test]
    fn empty_input() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   \n").is_empty());
    }

    #[test]
    fn mixed_delimiters() {
        assert_eq!(split_sentences("Wait. Stop! Go?"), vec!["Wait.", "Stop!", "Go?"]);
    }

    #[test]
    fn abbreviations_and_decimals_do_not_split() {
        let s = split_sentences("Dr. Smith holds a 3.5 m pole, e.g. a long one. Then he leaves.");
        assert_eq!(s.len(), 2);
        assert!(s[0].starts_with("Dr. Smith"));
    }

    #[test]
    fn delimiter_runs_stay_together() {
        assert_eq!(split_sentences("Really?! Yes..."), vec!["Really?!", "Yes..."]);
    }

    #[test]
    fn trailing_text_without_delimiter_kept() {
        assert_eq!(split_sentences("One. two"), vec!["One.", "two"]);
    }

    proptest::proptest! {
        #[test]
        fn never_drops_characters(text in "[a-zA-Z .!?,]{0,80}") {
            let joined: String = split_sentences(&text).concat();
            proptest::prop_assert_eq!(squash(&joined), squash(&text));
        }
    }
}
