//! Textual forma mentis networks.
//!
//! Per sentence, every pair of content words whose dependency-tree distance
//! is at most `max_tree_distance` is linked. Nodes are lowercased lemmas, so
//! inflections collapse into one concept, and the per-sentence edge lists are
//! merged into one simple undirected graph per story.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conllu::{ParsedStory, Sentence};

/// UPOS tags that can become network nodes.
pub const CONTENT_UPOS: [&str; 5] = ["NOUN", "PROPN", "VERB", "ADJ", "ADV"];

/// Lemmas that negate the content word they attach to.
pub const NEGATORS: [&str; 4] = ["not", "never", "no", "n't"];

const DEFAULT_STOPLIST: &str = include_str!("../resources/stoplist_en.txt");
const DEFAULT_ANTONYMS: &str = include_str!("../resources/antonyms_en.tsv");

pub type Edge = (String, String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, String> {
        let words: HashSet<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        if words.is_empty() {
            return Err("stoplist is empty".into());
        }
        Ok(Self { words })
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    /// The bundled English function-word list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPLIST).expect("bundled stoplist is valid")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl FromIterator<String> for StopList {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(|w| w.to_lowercase()).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AntonymLexicon {
    map: HashMap<String, String>,
}

impl AntonymLexicon {
    /// `lemma<TAB>antonym` lines; the first antonym listed for a lemma wins.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(lemma), Some(antonym), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(format!("line {}: expected `lemma<TAB>antonym`", i + 1));
            };
            map.entry(lemma.trim().to_lowercase())
                .or_insert_with(|| antonym.trim().to_lowercase());
        }
        Ok(Self { map })
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    pub fn english() -> Self {
        Self::parse(DEFAULT_ANTONYMS).expect("bundled antonym list is valid")
    }

    pub fn antonym(&self, lemma: &str) -> Option<&str> {
        self.map.get(lemma).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for AntonymLexicon {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Self {
            map: iter
                .into_iter()
                .map(|(k, v)| (k.into().to_lowercase(), v.into().to_lowercase()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valence {
    Positive,
    Negative,
    #[default]
    Neutral,
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Valence::Positive => "positive",
            Valence::Negative => "negative",
            Valence::Neutral => "neutral",
        })
    }
}

impl FromStr for Valence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Valence::Positive),
            "negative" => Ok(Valence::Negative),
            "neutral" => Ok(Valence::Neutral),
            other => Err(format!("unknown valence `{other}`")),
        }
    }
}

/// Simple undirected graph of lemmas. Edges are stored with the smaller
/// lemma first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tfmn {
    nodes: BTreeMap<String, Valence>,
    edges: BTreeSet<Edge>,
}

impl Tfmn {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, lemma: impl Into<String>) {
        self.nodes.entry(lemma.into()).or_default();
    }

    /// Insert an undirected edge. Self-loops are ignored. Returns whether the
    /// edge was new.
    pub fn add_edge(&mut self, a: &str, b: &str) -> bool {
        if a == b {
            return false;
        }
        self.add_node(a);
        self.add_node(b);
        self.edges.insert(ordered(a, b))
    }

    pub fn set_valence(&mut self, lemma: &str, valence: Valence) {
        if let Some(v) = self.nodes.get_mut(lemma) {
            *v = valence;
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Nodes in lexicographic order.
    pub fn nodes(&self) -> impl Iterator<Item = (&str, Valence)> {
        self.nodes.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.contains(&ordered(a, b))
    }

    pub fn valence(&self, lemma: &str) -> Option<Valence> {
        self.nodes.get(lemma).copied()
    }

    pub fn contains_node(&self, lemma: &str) -> bool {
        self.nodes.contains_key(lemma)
    }

    /// Edge-list TSV, `lemma_a<TAB>lemma_b`, sorted.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (a, b) in &self.edges {
            writeln!(w, "{a}\t{b}")?;
        }
        Ok(())
    }

    /// Node-table TSV, `lemma<TAB>valence`, sorted.
    pub fn write_node_table<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (lemma, valence) in &self.nodes {
            writeln!(w, "{lemma}\t{valence}")?;
        }
        Ok(())
    }

    /// Rebuild a network from its edge-list and node-table exports.
    pub fn read_exports<E: BufRead, N: BufRead>(edges: E, nodes: N) -> Result<Self, String> {
        let mut g = Tfmn::new();
        for line in nodes.lines() {
            let line = line.map_err(|e| e.to_string())?;
            if line.is_empty() {
                continue;
            }
            let (lemma, valence) = line
                .split_once('\t')
                .ok_or_else(|| format!("bad node line `{line}`"))?;
            g.nodes.insert(lemma.to_string(), valence.parse()?);
        }
        for line in edges.lines() {
            let line = line.map_err(|e| e.to_string())?;
            if line.is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once('\t')
                .ok_or_else(|| format!("bad edge line `{line}`"))?;
            if !g.nodes.contains_key(a) || !g.nodes.contains_key(b) {
                return Err(format!("edge `{a}`-`{b}` references an unknown node"));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }
}

fn ordered(a: &str, b: &str) -> Edge {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn normalized_lemma(lemma: &str) -> String {
    lemma.to_lowercase()
}

/// Indices of tokens with a content UPOS whose lowercased lemma is not a stop word.
pub fn content_tokens(sentence: &Sentence, stoplist: &StopList) -> Vec<usize> {
    sentence
        .tokens()
        .iter()
        .filter(|t| CONTENT_UPOS.contains(&t.upos.as_str()))
        .filter(|t| !stoplist.contains(&normalized_lemma(&t.lemma)))
        .map(|t| t.index)
        .collect()
}

/// Lemma pairs of content tokens within `max_dist` tree hops, deduplicated,
/// smaller lemma first, sorted.
pub fn build_sentence_edges(sentence: &Sentence, stoplist: &StopList, max_dist: usize) -> Vec<Edge> {
    let content = content_tokens(sentence, stoplist);
    let is_content: HashSet<usize> = content.iter().copied().collect();
    let lemma = |i: usize| normalized_lemma(&sentence.tokens()[i - 1].lemma);
    let mut edges = BTreeSet::new();
    for &i in &content {
        for (j, _) in sentence.neighbourhood(i, max_dist.max(1)) {
            if j > i && is_content.contains(&j) {
                let (a, b) = (lemma(i), lemma(j));
                if a != b {
                    edges.insert(ordered(&a, &b));
                }
            }
        }
    }
    edges.into_iter().collect()
}

/// Union of per-sentence edge lists plus any isolated content lemmas.
pub fn merge_story_network<'a, I>(edge_lists: &[Vec<Edge>], content_lemmas: I) -> Tfmn
where
    I: IntoIterator<Item = &'a str>,
{
    let mut g = Tfmn::new();
    for list in edge_lists {
        for (a, b) in list {
            g.add_edge(a, b);
        }
    }
    for lemma in content_lemmas {
        g.add_node(lemma);
    }
    g
}

/// A content lemma after negation handling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveLemma {
    pub token_index: usize,
    /// Lowercased lemma as parsed.
    pub original: String,
    /// Lemma used for emotion counting: the antonym when a negation was resolved.
    pub lemma: String,
    pub negated: bool,
    /// Negated but no antonym was available, so `lemma == original`.
    pub unresolved: bool,
}

fn is_negator(token: &crate::conllu::Token) -> bool {
    if token.deprel.to_lowercase().contains("neg") {
        return true;
    }
    let lemma = token.lemma.to_lowercase();
    NEGATORS.contains(&lemma.as_str()) && matches!(token.upos.as_str(), "ADV" | "PART" | "DET")
}

/// Lemma stream of the sentence's content tokens with negated words replaced
/// by their antonyms. A token counts as negated when a negator is one of its
/// direct dependents.
pub fn apply_negations(
    sentence: &Sentence,
    stoplist: &StopList,
    antonyms: &AntonymLexicon,
) -> Vec<EffectiveLemma> {
    content_tokens(sentence, stoplist)
        .into_iter()
        .map(|idx| {
            let original = normalized_lemma(&sentence.tokens()[idx - 1].lemma);
            let negated = sentence.children(idx).any(is_negator);
            let flipped = negated.then(|| antonyms.antonym(&original)).flatten();
            EffectiveLemma {
                token_index: idx,
                lemma: flipped.map_or_else(|| original.clone(), str::to_string),
                unresolved: negated && flipped.is_none(),
                original,
                negated,
            }
        })
        .collect()
}

/// Assign each node its lexicon valence, neutral when absent.
pub fn label_valence(mut tfmn: Tfmn, valence_lexicon: &HashMap<String, Valence>) -> Tfmn {
    for (lemma, valence) in tfmn.nodes.iter_mut() {
        *valence = valence_lexicon.get(lemma).copied().unwrap_or_default();
    }
    tfmn
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfmnConfig {
    pub max_tree_distance: usize,
    /// Keep content lemmas that never got an edge as isolated nodes.
    pub include_isolated: bool,
}

impl Default for TfmnConfig {
    fn default() -> Self {
        Self {
            max_tree_distance: 3,
            include_isolated: true,
        }
    }
}

/// Everything built from one story's parse.
#[derive(Debug, Clone, PartialEq)]
pub struct StoryNetwork {
    pub story_id: String,
    pub tfmn: Tfmn,
    pub lemmas: Vec<EffectiveLemma>,
    pub diagnostics: NetworkDiagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDiagnostics {
    pub sentences: usize,
    pub content_tokens: usize,
    pub isolated_nodes: usize,
    pub negations_resolved: usize,
    /// Negated lemmas with no antonym entry, kept as-is.
    pub negations_unresolved: Vec<String>,
}

pub struct NetworkBuilder<'a> {
    pub stoplist: &'a StopList,
    pub antonyms: &'a AntonymLexicon,
    pub valence: &'a HashMap<String, Valence>,
    pub config: TfmnConfig,
}

impl NetworkBuilder<'_> {
    pub fn build(&self, parsed: &ParsedStory) -> StoryNetwork {
        let mut edge_lists = Vec::with_capacity(parsed.sentences.len());
        let mut lemmas = Vec::new();
        let mut content_lemmas = Vec::new();
        for sentence in &parsed.sentences {
            edge_lists.push(build_sentence_edges(
                sentence,
                self.stoplist,
                self.config.max_tree_distance,
            ));
            let effective = apply_negations(sentence, self.stoplist, self.antonyms);
            content_lemmas.extend(effective.iter().map(|l| l.original.clone()));
            lemmas.extend(effective);
        }
        let isolated: Vec<&str> = if self.config.include_isolated {
            content_lemmas.iter().map(String::as_str).collect()
        } else {
            Vec::new()
        };
        let graph = merge_story_network(&edge_lists, isolated);
        let degree_zero = graph
            .nodes()
            .filter(|(n, _)| !graph.edges().any(|(a, b)| a == *n || b == *n))
            .count();
        let tfmn = label_valence(graph, self.valence);
        let diagnostics = NetworkDiagnostics {
            sentences: parsed.sentences.len(),
            content_tokens: lemmas.len(),
            isolated_nodes: degree_zero,
            negations_resolved: lemmas.iter().filter(|l| l.negated && !l.unresolved).count(),
            negations_unresolved: lemmas
                .iter()
                .filter(|l| l.unresolved)
                .map(|l| l.original.clone())
                .collect(),
        };
        StoryNetwork {
            story_id: parsed.story_id.clone(),
            tfmn,
            lemmas,
            diagnostics,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::parse_conllu_str;

    const PETER: &str = include_str!("../../../fixtures/conllu/peter.conllu");

    fn tok(i: usize, lemma: &str, upos: &str, head: usize, rel: &str) -> String {
        format!("{i}\t{lemma}\t{lemma}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_\n")
    }

    fn sentence(lines: &[String]) -> Sentence {
        parse_conllu_str(&lines.concat()).unwrap().remove(0)
    }

    #[test]
    fn bundled_resources() {
        let stop = StopList::english();
        assert!((170..=190).contains(&stop.len()), "{}", stop.len());
        for w in ["and", "or", "this", "the", "not", "never", "no"] {
            assert!(stop.contains(w), "{w}");
        }
        assert!(!stop.contains("cheese"));
        let ant = AntonymLexicon::english();
        assert_eq!(ant.antonym("happy"), Some("sad"));
        assert!(ant.len() > 100);
    }

    #[test]
    fn all_stopwords_yield_nothing() {
        let s = sentence(&[
            tok(1, "the", "NOUN", 3, "dep"),
            tok(2, "of", "ADV", 3, "dep"),
            tok(3, "and", "VERB", 0, "root"),
        ]);
        assert!(content_tokens(&s, &StopList::english()).is_empty());
    }

    #[test]
    fn simple_content_sentence() {
        let s = sentence(&[
            tok(1, "Peter", "PROPN", 2, "nsubj"),
            tok(2, "love", "VERB", 0, "root"),
            tok(3, "cheese", "NOUN", 2, "obj"),
        ]);
        assert_eq!(content_tokens(&s, &StopList::english()), vec![1, 2, 3]);
    }

    #[test]
    fn peter_content_tokens_and_edges() {
        let s = &parse_conllu_str(PETER).unwrap()[0];
        let stop = StopList::english();
        let words: Vec<&str> = content_tokens(s, &stop)
            .into_iter()
            .map(|i| s.tokens()[i - 1].surface.as_str())
            .collect();
        assert_eq!(
            words,
            ["Peter", "lactose", "intolerance", "high", "cost", "milk-based", "products", "loves", "cheese"]
        );
        let edges = build_sentence_edges(s, &stop, 3);
        assert!(edges.contains(&("love".to_string(), "peter".to_string())));
        assert!(edges.contains(&("cheese".to_string(), "love".to_string())));
        // product -> cost -> intolerance -> love -> cheese is four hops
        assert!(!edges.contains(&("cheese".to_string(), "product".to_string())));
    }

    #[test]
    fn single_content_token_has_no_edges() {
        let s = sentence(&[tok(1, "the", "DET", 2, "det"), tok(2, "cat", "NOUN", 0, "root")]);
        assert!(build_sentence_edges(&s, &StopList::english(), 3).is_empty());
    }

    #[test]
    fn five_token_chain() {
        let lines: Vec<String> = ["a", "b", "c", "d", "e"]
            .iter()
            .enumerate()
            .map(|(i, w)| tok(i + 1, w, "NOUN", if i == 4 { 0 } else { i + 2 }, "dep"))
            .collect();
        let s = sentence(&lines);
        let stop: StopList = ["zzz".to_string()].into_iter().collect();
        let edges = build_sentence_edges(&s, &stop, 3);
        assert_eq!(edges.len(), 9);
        assert!(!edges.contains(&("a".to_string(), "e".to_string())));
    }

    #[test]
    fn repeated_lemma_is_not_a_self_loop() {
        let s = sentence(&[
            tok(1, "dog", "NOUN", 2, "nsubj"),
            tok(2, "see", "VERB", 0, "root"),
            tok(3, "dog", "NOUN", 2, "obj"),
        ]);
        let edges = build_sentence_edges(&s, &StopList::english(), 3);
        assert_eq!(edges, vec![("dog".to_string(), "see".to_string())]);
    }

    #[test]
    fn merge_dedups_and_unions() {
        let e = |a: &str, b: &str| (a.to_string(), b.to_string());
        let g = merge_story_network(&[vec![e("a", "b")], vec![e("a", "b")]], []);
        assert_eq!(g.edge_count(), 1);
        let g = merge_story_network(&[vec![e("a", "b")], vec![e("b", "c")]], []);
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        let g = merge_story_network(&[], []);
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        let g = merge_story_network(&[vec![e("a", "b")]], ["z"]);
        assert_eq!(g.node_count(), 3);
    }

    fn not_happy() -> Sentence {
        sentence(&[tok(1, "not", "PART", 2, "advmod"), tok(2, "happy", "ADJ", 0, "root")])
    }

    #[test]
    fn negation_flips_to_antonym() {
        let ant: AntonymLexicon = [("happy", "sad")].into_iter().collect();
        let out = apply_negations(&not_happy(), &StopList::english(), &ant);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].lemma, "sad");
        assert!(out[0].negated && !out[0].unresolved);
    }

    #[test]
    fn no_negation_is_identity() {
        let s = sentence(&[tok(1, "happy", "ADJ", 0, "root")]);
        let ant: AntonymLexicon = [("happy", "sad")].into_iter().collect();
        let out = apply_negations(&s, &StopList::english(), &ant);
        assert_eq!(out[0].lemma, "happy");
        assert!(!out[0].negated);
    }

    #[test]
    fn unresolved_negation_kept_and_flagged() {
        let s = sentence(&[
            tok(1, "not", "ADV", 2, "advmod"),
            tok(2, "flabbergasted", "ADJ", 0, "root"),
        ]);
        let out = apply_negations(&s, &StopList::english(), &AntonymLexicon::default());
        assert_eq!(out[0].lemma, "flabbergasted");
        assert!(out[0].unresolved);
    }

    #[test]
    fn neg_deprel_counts_as_negator() {
        let s = sentence(&[tok(1, "hardly", "ADV", 2, "advmod:neg"), tok(2, "happy", "ADJ", 0, "root")]);
        let out = apply_negations(&s, &StopList::english(), &AntonymLexicon::english());
        // "hardly" is content too; only "happy" is governed by it.
        let happy = out.iter().find(|l| l.original == "happy").unwrap();
        assert_eq!(happy.lemma, "sad");
    }

    #[test]
    fn valence_labels() {
        let mut g = Tfmn::new();
        g.add_edge("joy", "fear");
        g.add_node("table");
        let lex: HashMap<String, Valence> = [
            ("joy".to_string(), Valence::Positive),
            ("fear".to_string(), Valence::Negative),
        ]
        .into_iter()
        .collect();
        let g = label_valence(g, &lex);
        assert_eq!(g.valence("joy"), Some(Valence::Positive));
        assert_eq!(g.valence("fear"), Some(Valence::Negative));
        assert_eq!(g.valence("table"), Some(Valence::Neutral));
    }

    #[test]
    fn exports_round_trip() {
        let mut g = Tfmn::new();
        g.add_edge("b", "a");
        g.add_edge("c", "a");
        g.add_node("lonely");
        g.set_valence("a", Valence::Positive);
        let (mut e, mut n) = (Vec::new(), Vec::new());
        g.write_edge_list(&mut e).unwrap();
        g.write_node_table(&mut n).unwrap();
        assert_eq!(String::from_utf8(e.clone()).unwrap(), "a\tb\na\tc\n");
        assert_eq!(Tfmn::read_exports(e.as_slice(), n.as_slice()).unwrap(), g);
    }

    #[test]
    fn builder_collects_diagnostics() {
        let parsed = ParsedStory {
            story_id: "x".into(),
            sentences: vec![
                not_happy(),
                sentence(&[
                    tok(1, "never", "ADV", 2, "advmod"),
                    tok(2, "flabbergast", "VERB", 0, "root"),
                    tok(3, "cheese", "NOUN", 2, "obj"),
                ]),
            ],
        };
        let valence = HashMap::new();
        let stop = StopList::english();
        let ant = AntonymLexicon::english();
        let net = NetworkBuilder {
            stoplist: &stop,
            antonyms: &ant,
            valence: &valence,
            config: TfmnConfig::default(),
        }
        .build(&parsed);
        assert_eq!(net.diagnostics.negations_resolved, 1);
        assert_eq!(net.diagnostics.negations_unresolved, vec!["flabbergast".to_string()]);
        assert_eq!(net.diagnostics.isolated_nodes, 1); // "happy"
        assert!(net.tfmn.has_edge("flabbergast", "cheese"));
        assert_eq!(
            net.lemmas.iter().map(|l| l.lemma.as_str()).collect::<Vec<_>>(),
            ["sad", "flabbergast", "cheese"]
        );
    }

    mod props {
        use super::*;
        use crate::conllu::Sentence;
        use crate::oracles;
        use proptest::prelude::*;

        fn arb_sentence() -> impl Strategy<Value = Sentence> {
            oracles::arb_heads(15).prop_flat_map(|heads| {
                let n = heads.len();
                prop::collection::vec(0usize..oracles::TOY_VOCAB.len(), n).prop_map(move |words| {
                    Sentence::new(oracles::tokens_from_heads(&heads, &words)).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn edges_are_simple_and_monotone(s in arb_sentence()) {
                let stop = StopList::english();
                let mut previous: BTreeSet<Edge> = BTreeSet::new();
                for k in 1..=5 {
                    let edges: BTreeSet<Edge> = build_sentence_edges(&s, &stop, k).into_iter().collect();
                    for (a, b) in &edges {
                        prop_assert!(a < b);
                    }
                    prop_assert!(previous.is_subset(&edges));
                    previous = edges;
                }
            }

            #[test]
            fn merge_is_order_independent(
                sents in prop::collection::vec(arb_sentence(), 1..5),
                seed in any::<u64>()
            ) {
                let stop = StopList::english();
                let lists: Vec<Vec<Edge>> = sents.iter().map(|s| build_sentence_edges(s, &stop, 3)).collect();
                let mut shuffled = lists.clone();
                let len = shuffled.len();
                shuffled.rotate_left((seed as usize) % len);
                shuffled.reverse();
                prop_assert_eq!(merge_story_network(&lists, []), merge_story_network(&shuffled, []));
            }

            #[test]
            fn negation_touches_only_negated(s in arb_sentence()) {
                let stop = StopList::english();
                let out = apply_negations(&s, &stop, &AntonymLexicon::english());
                let plain: Vec<String> = content_tokens(&s, &stop)
                    .into_iter()
                    .map(|i| s.tokens()[i - 1].lemma.to_lowercase())
                    .collect();
                prop_assert_eq!(out.len(), plain.len());
                for (e, p) in out.iter().zip(&plain) {
                    if !e.negated {
                        prop_assert_eq!(&e.lemma, p);
                    }
                }
            }
        }
    }
}
