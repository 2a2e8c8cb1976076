//! Three-stage (exact → synonym → semantic) matching of tuple sets and the
//! precision/recall/F1 scores computed from it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::caption::{Relation, SynonymLexicon, TupleSet};
use crate::error::{Error, Result};

/// Word vectors keyed by normalized term.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: BTreeMap::new(),
        }
    }

    /// An empty table with no dimension; every semantic lookup misses.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, term: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let term = term.into();
        if self.vectors.is_empty() && self.dim == 0 {
            self.dim = vector.len();
        }
        if vector.len() != self.dim {
            return Err(Error::shape(format!(
                "embedding for `{term}` has {} values, table dim is {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(term, "non-finite embedding value"));
        }
        self.vectors.insert(term, vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<&[f64]> {
        self.vectors.get(term).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<f64>)> {
        self.vectors.iter()
    }

    /// Vector for a possibly multiword phrase: the phrase itself if present,
    /// else the mean of its word vectors when every word is present.
    pub fn phrase_vector(&self, phrase: &str) -> Option<Vec<f64>> {
        if let Some(v) = self.vectors.get(phrase) {
            return Some(v.clone());
        }
        let words: Vec<&str> = phrase.split_whitespace().collect();
        if words.len() < 2 {
            return None;
        }
        let mut acc = vec![0.0; self.dim];
        for w in &words {
            let v = self.vectors.get(*w)?;
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
        }
        let n = words.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Some(acc)
    }
}

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::shape(format!(
            "cosine of vectors with lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::DegenerateVector("zero-norm vector".into()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Exact,
    Synonym,
    Semantic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AttributePairing {
    /// An `(object, attribute)` pair matches only under a matched object pair.
    #[default]
    ObjectFirst,
    /// Attribute terms are matched as a flat list, ignoring their objects.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Sum counts over the corpus, then take ratios.
    #[default]
    Micro,
    /// Mean of per-pair ratios.
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub threshold: f64,
    pub attribute_pairing: AttributePairing,
    pub aggregation: Aggregation,
}

pub const DEFAULT_SEMANTIC_THRESHOLD: f64 = 0.5;

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            threshold: DEFAULT_SEMANTIC_THRESHOLD,
            attribute_pairing: AttributePairing::default(),
            aggregation: Aggregation::default(),
        }
    }
}

/// One accepted pairing between candidate index and reference index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing {
    pub candidate: usize,
    pub reference: usize,
    pub stage: Stage,
    pub similarity: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CategoryMatches {
    pub pairs: Vec<Pairing>,
    /// Terms left unmatched before the semantic stage that have no embedding.
    pub missing_terms: BTreeSet<String>,
}

impl CategoryMatches {
    pub fn n_matched(&self) -> usize {
        self.pairs.len()
    }
}

/// Greedy one-to-one assignment, stage by stage.
///
/// Within a stage pairs are taken by descending similarity. Ties are broken
/// on the unordered pair of keys (smaller key first), so swapping the roles
/// of candidate and reference visits pairs in the same order.
fn staged_assign(
    cand_keys: &[String],
    ref_keys: &[String],
    score: impl Fn(usize, usize) -> Option<(Stage, f64)>,
) -> Vec<Pairing> {
    let mut by_stage: BTreeMap<Stage, Vec<Pairing>> = BTreeMap::new();
    for i in 0..cand_keys.len() {
        for j in 0..ref_keys.len() {
            if let Some((stage, similarity)) = score(i, j) {
                by_stage.entry(stage).or_default().push(Pairing {
                    candidate: i,
                    reference: j,
                    stage,
                    similarity,
                });
            }
        }
    }
    let mut used_c = vec![false; cand_keys.len()];
    let mut used_r = vec![false; ref_keys.len()];
    let mut out = Vec::new();
    for (_, mut pairs) in by_stage {
        pairs.sort_by(|a, b| {
            let ka = ordered(&cand_keys[a.candidate], &ref_keys[a.reference]);
            let kb = ordered(&cand_keys[b.candidate], &ref_keys[b.reference]);
            b.similarity
                .partial_cmp(&a.similarity)
                .unwrap_or(Ordering::Equal)
                .then_with(|| ka.cmp(&kb))
                .then_with(|| (a.candidate, a.reference).cmp(&(b.candidate, b.reference)))
        });
        for p in pairs {
            if !used_c[p.candidate] && !used_r[p.reference] {
                used_c[p.candidate] = true;
                used_r[p.reference] = true;
                out.push(p);
            }
        }
    }
    out
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Shared matching context: lexicon, embeddings and configuration.
#[derive(Debug, Clone, Copy)]
pub struct Matcher<'a> {
    pub lexicon: &'a SynonymLexicon,
    pub table: &'a EmbeddingTable,
    pub config: MatchConfig,
}

impl<'a> Matcher<'a> {
    pub fn new(lexicon: &'a SynonymLexicon, table: &'a EmbeddingTable, config: MatchConfig) -> Self {
        Matcher {
            lexicon,
            table,
            config,
        }
    }

    /// Best stage at which two terms match, if any.
    pub fn term_score(&self, cand: &str, reference: &str) -> Option<(Stage, f64)> {
        if cand == reference {
            return Some((Stage::Exact, 1.0));
        }
        if self.lexicon.are_synonyms(cand, reference) {
            return Some((Stage::Synonym, 1.0));
        }
        let u = self.table.phrase_vector(cand)?;
        let v = self.table.phrase_vector(reference)?;
        match cosine_similarity(&u, &v) {
            Ok(sim) if sim > self.config.threshold => Some((Stage::Semantic, sim)),
            _ => None,
        }
    }

    fn has_vector(&self, term: &str) -> bool {
        self.table
            .phrase_vector(term)
            .is_some_and(|v| v.iter().any(|x| *x != 0.0))
    }

    pub fn match_category(&self, cands: &[String], refs: &[String]) -> CategoryMatches {
        let pairs = staged_assign(cands, refs, |i, j| self.term_score(&cands[i], &refs[j]));
        let missing_terms = self.missing(cands, refs, &pairs, |t| vec![t.clone()]);
        CategoryMatches {
            pairs,
            missing_terms,
        }
    }

    fn missing<T>(
        &self,
        cands: &[T],
        refs: &[T],
        pairs: &[Pairing],
        terms: impl Fn(&T) -> Vec<String>,
    ) -> BTreeSet<String> {
        let mut used_c = vec![false; cands.len()];
        let mut used_r = vec![false; refs.len()];
        for p in pairs.iter().filter(|p| p.stage != Stage::Semantic) {
            used_c[p.candidate] = true;
            used_r[p.reference] = true;
        }
        // only relevant when there is something on the other side to compare with
        let mut out = BTreeSet::new();
        let open_c = used_c.iter().any(|u| !u);
        let open_r = used_r.iter().any(|u| !u);
        if !(open_c && open_r) {
            return out;
        }
        let items = cands
            .iter()
            .zip(&used_c)
            .chain(refs.iter().zip(&used_r))
            .filter(|(_, used)| !**used);
        for (item, _) in items {
            for t in terms(item) {
                if !self.has_vector(&t) {
                    out.insert(t);
                }
            }
        }
        out
    }

    fn relation_score(&self, c: &Relation, r: &Relation) -> Option<(Stage, f64)> {
        let parts = [
            self.term_score(&c.subject, &r.subject)?,
            self.term_score(&c.predicate, &r.predicate)?,
            self.term_score(&c.object, &r.object)?,
        ];
        let stage = parts.iter().map(|p| p.0).max()?;
        let sim = parts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        Some((stage, sim))
    }

    pub fn match_tuplesets(&self, cand: &TupleSet, reference: &TupleSet) -> MatchReport {
        let mut trace = Vec::new();
        let mut missing = BTreeSet::new();

        let c_obj: Vec<String> = cand.objects().iter().cloned().collect();
        let r_obj: Vec<String> = reference.objects().iter().cloned().collect();
        let obj = self.match_category(&c_obj, &r_obj);
        for p in &obj.pairs {
            trace.push(TraceEntry::new(
                Category::Object,
                &c_obj[p.candidate],
                &r_obj[p.reference],
                p,
            ));
        }
        missing.extend(obj.missing_terms.iter().cloned());
        let object = CategoryScore::from_counts(obj.n_matched(), c_obj.len(), r_obj.len());

        let c_attr = cand.attribute_pairs();
        let r_attr = reference.attribute_pairs();
        let mut attr_matched = 0;
        match self.config.attribute_pairing {
            AttributePairing::ObjectFirst => {
                let empty = BTreeSet::new();
                for p in &obj.pairs {
                    let co = &c_obj[p.candidate];
                    let ro = &r_obj[p.reference];
                    let ca: Vec<String> = cand.attributes().get(co).unwrap_or(&empty).iter().cloned().collect();
                    let ra: Vec<String> = reference.attributes().get(ro).unwrap_or(&empty).iter().cloned().collect();
                    let m = self.match_category(&ca, &ra);
                    for q in &m.pairs {
                        trace.push(TraceEntry::new(
                            Category::Attribute,
                            &format!("{co}: {}", ca[q.candidate]),
                            &format!("{ro}: {}", ra[q.reference]),
                            q,
                        ));
                    }
                    attr_matched += m.n_matched();
                    missing.extend(m.missing_terms);
                }
            }
            AttributePairing::Independent => {
                let ca: Vec<String> = c_attr.iter().map(|(_, a)| a.clone()).collect();
                let ra: Vec<String> = r_attr.iter().map(|(_, a)| a.clone()).collect();
                let m = self.match_category(&ca, &ra);
                for q in &m.pairs {
                    let (co, a) = &c_attr[q.candidate];
                    let (ro, b) = &r_attr[q.reference];
                    trace.push(TraceEntry::new(
                        Category::Attribute,
                        &format!("{co}: {a}"),
                        &format!("{ro}: {b}"),
                        q,
                    ));
                }
                attr_matched = m.n_matched();
                missing.extend(m.missing_terms);
            }
        }
        let attribute = CategoryScore::from_counts(attr_matched, c_attr.len(), r_attr.len());

        let c_rel: Vec<&Relation> = cand.relations().iter().collect();
        let r_rel: Vec<&Relation> = reference.relations().iter().collect();
        let key = |r: &Relation| format!("{} | {} | {}", r.subject, r.predicate, r.object);
        let c_keys: Vec<String> = c_rel.iter().map(|r| key(r)).collect();
        let r_keys: Vec<String> = r_rel.iter().map(|r| key(r)).collect();
        let rel_pairs = staged_assign(&c_keys, &r_keys, |i, j| self.relation_score(c_rel[i], r_rel[j]));
        missing.extend(self.missing(&c_rel, &r_rel, &rel_pairs, |r| {
            vec![r.subject.clone(), r.predicate.clone(), r.object.clone()]
        }));
        for p in &rel_pairs {
            trace.push(TraceEntry::new(
                Category::Relation,
                &c_keys[p.candidate],
                &r_keys[p.reference],
                p,
            ));
        }
        let relation = CategoryScore::from_counts(rel_pairs.len(), c_rel.len(), r_rel.len());

        MatchReport {
            object,
            attribute,
            relation,
            trace,
            missing_terms: missing.into_iter().collect(),
        }
    }

    pub fn corpus_report(&self, pairs: &[(TupleSet, TupleSet)]) -> Result<MatchReport> {
        if pairs.is_empty() {
            return Err(Error::EmptyCorpus("no caption pairs".into()));
        }
        let reports: Vec<MatchReport> = pairs
            .iter()
            .map(|(c, r)| self.match_tuplesets(c, r))
            .collect();
        Ok(aggregate(&reports, self.config.aggregation))
    }
}

/// Micro- or macro-averages per-pair reports (in the given order).
pub fn aggregate(reports: &[MatchReport], aggregation: Aggregation) -> MatchReport {
    let mut trace = Vec::new();
    let mut missing = BTreeSet::new();
    for r in reports {
        trace.extend(r.trace.iter().cloned());
        missing.extend(r.missing_terms.iter().cloned());
    }
    let pick = |f: fn(&MatchReport) -> &CategoryScore| -> CategoryScore {
        let scores: Vec<&CategoryScore> = reports.iter().map(f).collect();
        let m = scores.iter().map(|s| s.n_matched).sum();
        let c = scores.iter().map(|s| s.n_candidate).sum();
        let r = scores.iter().map(|s| s.n_reference).sum();
        match aggregation {
            Aggregation::Micro => CategoryScore::from_counts(m, c, r),
            Aggregation::Macro => {
                let n = scores.len().max(1) as f64;
                CategoryScore {
                    n_matched: m,
                    n_candidate: c,
                    n_reference: r,
                    precision: scores.iter().map(|s| s.precision).sum::<f64>() / n,
                    recall: scores.iter().map(|s| s.recall).sum::<f64>() / n,
                    f1: scores.iter().map(|s| s.f1).sum::<f64>() / n,
                }
            }
        }
    };
    MatchReport {
        object: pick(|r| &r.object),
        attribute: pick(|r| &r.attribute),
        relation: pick(|r| &r.relation),
        trace,
        missing_terms: missing.into_iter().collect(),
    }
}

/// Precision, recall and F1 from raw counts; any `0/0` ratio is 0.
pub fn prf(n_matched: usize, n_candidate: usize, n_reference: usize) -> (f64, f64, f64) {
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = ratio(n_matched, n_candidate);
    let r = ratio(n_matched, n_reference);
    let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub n_matched: usize,
    pub n_candidate: usize,
    pub n_reference: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl CategoryScore {
    /// Scores from counts. A category empty on both sides is perfect
    /// vacuous agreement and scores 1 throughout.
    pub fn from_counts(n_matched: usize, n_candidate: usize, n_reference: usize) -> Self {
        let (precision, recall, f1) = if n_candidate == 0 && n_reference == 0 {
            (1.0, 1.0, 1.0)
        } else {
            prf(n_matched, n_candidate, n_reference)
        };
        CategoryScore {
            n_matched,
            n_candidate,
            n_reference,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Object,
    Attribute,
    Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub category: Category,
    pub candidate: String,
    pub reference: String,
    pub stage: Stage,
    pub similarity: f64,
}

impl TraceEntry {
    fn new(category: Category, candidate: &str, reference: &str, p: &Pairing) -> Self {
        TraceEntry {
            category,
            candidate: candidate.to_string(),
            reference: reference.to_string(),
            stage: p.stage,
            similarity: p.similarity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub object: CategoryScore,
    pub attribute: CategoryScore,
    pub relation: CategoryScore,
    pub trace: Vec<TraceEntry>,
    pub missing_terms: Vec<String>,
}

impl MatchReport {
    pub fn category(&self, c: Category) -> &CategoryScore {
        match c {
            Category::Object => &self.object,
            Category::Attribute => &self.attribute,
            Category::Relation => &self.relation,
        }
    }
}

pub fn match_category(
    cands: &[String],
    refs: &[String],
    lexicon: &SynonymLexicon,
    table: &EmbeddingTable,
    threshold: f64,
) -> CategoryMatches {
    let config = MatchConfig {
        threshold,
        ..MatchConfig::default()
    };
    Matcher::new(lexicon, table, config).match_category(cands, refs)
}

pub fn match_tuplesets(
    cand: &TupleSet,
    reference: &TupleSet,
    lexicon: &SynonymLexicon,
    table: &EmbeddingTable,
    threshold: f64,
) -> MatchReport {
    let config = MatchConfig {
        threshold,
        ..MatchConfig::default()
    };
    Matcher::new(lexicon, table, config).match_tuplesets(cand, reference)
}

pub fn corpus_report(
    pairs: &[(TupleSet, TupleSet)],
    lexicon: &SynonymLexicon,
    table: &EmbeddingTable,
    config: MatchConfig,
) -> Result<MatchReport> {
    Matcher::new(lexicon, table, config).corpus_report(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caption::ingest_tuples;
    use serde_json::json;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn cosine_basics() {
        let u = [0.3, -1.2, 2.0];
        assert!((cosine_similarity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        assert!((cosine_similarity(&u, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::DegenerateVector(_))
        ));
    }

    #[test]
    fn street_objects_match_five() {
        let lex = SynonymLexicon::from_groups([("building", vec!["edifice"])]);
        let table = EmbeddingTable::empty();
        let m = match_category(
            &s(&["building", "city street", "truck", "tree", "car"]),
            &s(&["sky", "edifice", "car", "street", "truck", "city street", "tree"]),
            &lex,
            &table,
            0.5,
        );
        assert_eq!(m.n_matched(), 5);
        let syn: Vec<_> = m.pairs.iter().filter(|p| p.stage == Stage::Synonym).collect();
        assert_eq!(syn.len(), 1);
        assert_eq!(syn[0].candidate, 0);
        assert_eq!(syn[0].reference, 1);
    }

    #[test]
    fn identical_singletons_match_exactly() {
        let m = match_category(&s(&["dog"]), &s(&["dog"]), &SynonymLexicon::new(), &EmbeddingTable::empty(), 0.5);
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.pairs[0].stage, Stage::Exact);
    }

    #[test]
    fn no_match_at_full_threshold() {
        let mut table = EmbeddingTable::new(2);
        table.insert("cat", vec![1.0, 0.2]).unwrap();
        table.insert("dog", vec![1.0, 0.25]).unwrap();
        let m = match_category(&s(&["cat"]), &s(&["dog"]), &SynonymLexicon::new(), &table, 1.0);
        assert_eq!(m.n_matched(), 0);
        // the same pair clears a lower threshold
        let m = match_category(&s(&["cat"]), &s(&["dog"]), &SynonymLexicon::new(), &table, 0.9);
        assert_eq!(m.pairs[0].stage, Stage::Semantic);
    }

    #[test]
    fn missing_embeddings_are_reported() {
        let mut table = EmbeddingTable::new(2);
        table.insert("cat", vec![1.0, 0.0]).unwrap();
        let m = match_category(&s(&["cat"]), &s(&["dog"]), &SynonymLexicon::new(), &table, 0.1);
        assert_eq!(m.n_matched(), 0);
        assert_eq!(m.missing_terms.iter().collect::<Vec<_>>(), vec!["dog"]);
    }

    #[test]
    fn semantic_greedy_takes_best_similarity_first() {
        let mut table = EmbeddingTable::new(2);
        table.insert("a", vec![1.0, 0.0]).unwrap();
        table.insert("b", vec![1.0, 0.1]).unwrap();
        table.insert("x", vec![1.0, 0.05]).unwrap();
        table.insert("y", vec![1.0, 0.5]).unwrap();
        let m = match_category(&s(&["a", "b"]), &s(&["x", "y"]), &SynonymLexicon::new(), &table, 0.5);
        assert_eq!(m.n_matched(), 2);
        let first = m.pairs[0];
        // a·x and b·x are both near 1; b·x is the closer pair
        assert_eq!((first.candidate, first.reference), (1, 0));
    }

    #[test]
    fn multiword_terms_fall_back_to_mean_vectors() {
        let mut table = EmbeddingTable::new(2);
        table.insert("stand", vec![1.0, 0.0]).unwrap();
        table.insert("under", vec![0.0, 1.0]).unwrap();
        table.insert("below", vec![0.1, 1.0]).unwrap();
        let v = table.phrase_vector("stand under").unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
        assert!(table.phrase_vector("stand over").is_none());
    }

    #[test]
    fn prf_examples() {
        let (p, r, f) = prf(5, 5, 7);
        assert!((p - 1.0).abs() < 1e-6);
        assert!((r - 0.714286).abs() < 1e-6);
        assert!((f - 0.833333).abs() < 1e-6);
        assert_eq!(prf(4, 4, 4), (1.0, 1.0, 1.0));
        assert_eq!(prf(0, 0, 0), (0.0, 0.0, 0.0));
    }

    fn street_pair() -> (TupleSet, TupleSet) {
        let cand = ingest_tuples(&json!({
            "objects": ["building", "city street", "truck", "tree", "car"],
            "attributes": {"car": ["red"], "tree": ["green"], "truck": ["white"], "building": ["tall"]},
            "relations": [["truck", "drive down", "city street"], ["car", "drive down", "city street"]]
        }))
        .unwrap();
        let reference = ingest_tuples(&json!({
            "objects": ["sky", "edifice", "car", "street", "truck", "city street", "tree"],
            "attributes": {"car": ["red"], "city street": ["busy"], "truck": ["white"],
                           "tree": ["green"], "edifice": ["modern"], "sky": ["blue", "clear"]},
            "relations": [["tree", "surround", "street"], ["edifice", "stand under", "sky"],
                          ["car", "run in front of", "city street"]]
        }))
        .unwrap();
        (cand, reference)
    }

    #[test]
    fn street_pair_scores() {
        let (c, r) = street_pair();
        let lex = SynonymLexicon::from_groups([("building", vec!["edifice"])]);
        let rep = match_tuplesets(&c, &r, &lex, &EmbeddingTable::empty(), 0.5);
        assert!((rep.object.precision - 1.0).abs() < 1e-4);
        assert!((rep.object.recall - 0.7143).abs() < 1e-4);
        assert!((rep.object.f1 - 0.8333).abs() < 1e-4);
        assert_eq!((rep.attribute.n_matched, rep.attribute.n_candidate, rep.attribute.n_reference), (3, 4, 7));
        assert_eq!(rep.relation.n_matched, 0);
        assert!(rep
            .trace
            .iter()
            .any(|t| t.candidate == "building" && t.reference == "edifice" && t.stage == Stage::Synonym));
    }

    #[test]
    fn independent_attribute_pairing() {
        let (c, r) = street_pair();
        let (lex, table) = (SynonymLexicon::new(), EmbeddingTable::empty());
        let m = Matcher::new(
            &lex,
            &table,
            MatchConfig {
                attribute_pairing: AttributePairing::Independent,
                ..MatchConfig::default()
            },
        );
        let rep = m.match_tuplesets(&c, &r);
        // red, green, white match regardless of their objects
        assert_eq!(rep.attribute.n_matched, 3);
    }

    #[test]
    fn identical_sets_score_one() {
        let (c, _) = street_pair();
        let rep = match_tuplesets(&c, &c, &SynonymLexicon::new(), &EmbeddingTable::empty(), 0.5);
        for cat in [Category::Object, Category::Attribute, Category::Relation] {
            let s = rep.category(cat);
            assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn empty_candidate_scores_zero() {
        let (_, r) = street_pair();
        let rep = match_tuplesets(&TupleSet::default(), &r, &SynonymLexicon::new(), &EmbeddingTable::empty(), 0.5);
        for cat in [Category::Object, Category::Attribute, Category::Relation] {
            let s = rep.category(cat);
            assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn relation_predicates_match_semantically() {
        let cand = ingest_tuples(&json!({"objects": ["car", "street"], "relations": [["car", "drive on", "street"]]})).unwrap();
        let reference = ingest_tuples(&json!({"objects": ["car", "street"], "relations": [["car", "ride on", "street"]]})).unwrap();
        let mut table = EmbeddingTable::new(2);
        table.insert("drive", vec![1.0, 0.1]).unwrap();
        table.insert("ride", vec![1.0, 0.2]).unwrap();
        table.insert("on", vec![0.0, 1.0]).unwrap();
        let rep = match_tuplesets(&cand, &reference, &SynonymLexicon::new(), &table, 0.5);
        assert_eq!(rep.relation.n_matched, 1);
        let t = rep.trace.iter().find(|t| t.category == Category::Relation).unwrap();
        assert_eq!(t.stage, Stage::Semantic);
    }

    #[test]
    fn corpus_micro_average() {
        let pair = |n_ref: usize| {
            let refs: Vec<String> = (0..n_ref).map(|i| format!("obj{i}")).collect();
            let c = TupleSet::new(vec!["obj0".to_string()], Vec::new(), Vec::new()).unwrap();
            let r = TupleSet::new(refs, Vec::new(), Vec::new()).unwrap();
            (c, r)
        };
        let pairs = vec![pair(2), pair(2)];
        let rep = corpus_report(&pairs, &SynonymLexicon::new(), &EmbeddingTable::empty(), MatchConfig::default()).unwrap();
        assert_eq!(rep.object.precision, 1.0);
        assert_eq!(rep.object.recall, 0.5);
        assert!(matches!(
            corpus_report(&[], &SynonymLexicon::new(), &EmbeddingTable::empty(), MatchConfig::default()),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn corpus_single_and_duplicated() {
        let (c, r) = street_pair();
        let lex = SynonymLexicon::from_groups([("building", vec!["edifice"])]);
        let table = EmbeddingTable::empty();
        let single = match_tuplesets(&c, &r, &lex, &table, 0.5);
        let one = corpus_report(&[(c.clone(), r.clone())], &lex, &table, MatchConfig::default()).unwrap();
        assert_eq!(one, single);
        let many = corpus_report(&vec![(c, r); 4], &lex, &table, MatchConfig::default()).unwrap();
        for cat in [Category::Object, Category::Attribute, Category::Relation] {
            let (a, b) = (single.category(cat), many.category(cat));
            assert!((a.precision - b.precision).abs() < 1e-12);
            assert!((a.recall - b.recall).abs() < 1e-12);
            assert!((a.f1 - b.f1).abs() < 1e-12);
        }
    }

    #[test]
    fn macro_average_is_mean_of_ratios() {
        let a = TupleSet::new(s(&["x"]), Vec::new(), Vec::new()).unwrap();
        let b = TupleSet::new(s(&["x", "y", "z", "w"]), Vec::new(), Vec::new()).unwrap();
        let pairs = vec![(a.clone(), a.clone()), (a, b)];
        let cfg = MatchConfig {
            aggregation: Aggregation::Macro,
            ..MatchConfig::default()
        };
        let rep = corpus_report(&pairs, &SynonymLexicon::new(), &EmbeddingTable::empty(), cfg).unwrap();
        assert!((rep.object.recall - (1.0 + 0.25) / 2.0).abs() < 1e-12);
    }
}
