//! Term normalization: case folding, article stripping and plural reduction.

const ARTICLES: &[&str] = &["a", "an", "the"];

/// Plural forms that the suffix rules get wrong.
const IRREGULAR_PLURALS: &[(&str, &str)] = &[
    ("people", "person"),
    ("men", "man"),
    ("women", "woman"),
    ("children", "child"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("geese", "goose"),
    ("mice", "mouse"),
    ("oxen", "ox"),
    ("sheep", "sheep"),
    ("fish", "fish"),
    ("deer", "deer"),
    ("leaves", "leaf"),
    ("knives", "knife"),
    ("wolves", "wolf"),
    ("shelves", "shelf"),
    ("loaves", "loaf"),
    ("calves", "calf"),
    ("halves", "half"),
    ("lives", "life"),
    ("wives", "wife"),
    ("scarves", "scarf"),
    ("houses", "house"),
    ("horses", "horse"),
    ("vases", "vase"),
    ("cases", "case"),
    ("roses", "rose"),
    ("noses", "nose"),
    ("purses", "purse"),
    ("blouses", "blouse"),
    ("bases", "base"),
    ("hoses", "hose"),
    ("cheeses", "cheese"),
    ("sizes", "size"),
    ("pieces", "piece"),
    ("apples", "apple"),
    ("clothes", "clothes"),
    ("glasses", "glasses"),
    ("pants", "pants"),
    ("jeans", "jeans"),
    ("shorts", "shorts"),
    ("grass", "grass"),
    ("dice", "die"),
    ("cacti", "cactus"),
];

fn irregular(word: &str) -> Option<&'static str> {
    IRREGULAR_PLURALS
        .iter()
        .find(|(p, s)| *p == word || *s == word)
        .map(|(_, s)| *s)
}

/// Reduces a single lowercase word to its singular form.
///
/// Ordered rules: irregular table; words of three letters or fewer are
/// left alone; `-ies` → `-y`; `-es` after a sibilant (`sses`, `shes`, `ches`,
/// `xes`, `zzes`, `uses`) is dropped; a final `-s` is dropped unless the word
/// ends in `ss`, `us`, `is` or `ous`. The irregular table is consulted again
/// on the result so the function is idempotent.
pub fn singularize(word: &str) -> String {
    if let Some(s) = irregular(word) {
        return s.to_string();
    }
    let n = word.chars().count();
    let out = if n <= 3 || !word.is_ascii() {
        word.to_string()
    } else if word.ends_with("ies") && n > 4 {
        format!("{}y", &word[..word.len() - 3])
    } else if ["sses", "shes", "ches", "xes", "zzes", "uses"]
        .iter()
        .any(|s| word.ends_with(s))
    {
        word[..word.len() - 2].to_string()
    } else if word.ends_with('s') && !["ss", "us", "is", "ous"].iter().any(|s| word.ends_with(s)) {
        word[..word.len() - 1].to_string()
    } else {
        word.to_string()
    };
    match irregular(&out) {
        Some(s) => s.to_string(),
        None => out,
    }
}

/// Lowercases, trims, collapses inner whitespace, strips leading articles and
/// singularizes the last word of the phrase.
pub fn normalize_term(word: &str) -> String {
    let lower = word.to_lowercase();
    let mut words: Vec<&str> = lower.split_whitespace().collect();
    while words.len() > 1 && ARTICLES.contains(&words[0]) {
        words.remove(0);
    }
    if let Some(last) = words.pop() {
        let head = singularize(last);
        words.push(&head);
        return words.join(" ");
    }
    String::new()
}

/// Lowercase/whitespace normalization without singularization, used for
/// attributes and predicates.
pub fn normalize_phrase(text: &str) -> String {
    text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}
