//! CoNLL-U reader and dependency-tree queries.
//!
//! Only the columns the network builder needs are kept: ID, FORM, LEMMA,
//! UPOS, HEAD and DEPREL. Multiword-token ranges (`3-4`) and empty nodes
//! (`5.1`) are skipped.

use std::collections::VecDeque;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sentence starting at line {line}{}: {message}", sent_id.as_ref().map(|s| format!(" ({s})")).unwrap_or_default())]
    Structure {
        line: usize,
        sent_id: Option<String>,
        message: String,
    },
    #[error("token index {index} out of range for a sentence of {len} tokens")]
    IndexOutOfRange { index: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    /// 0 for the root.
    pub head: usize,
    pub deprel: String,
}

/// A validated dependency tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
    depth: Vec<usize>,
}

impl Sentence {
    /// Build a sentence from tokens numbered `1..=n`, checking that the head
    /// pointers form a single tree.
    pub fn new(tokens: Vec<Token>) -> Result<Self, String> {
        let n = tokens.len();
        if n == 0 {
            return Err("empty sentence".into());
        }
        for (i, t) in tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(format!(
                    "token ids must run 1..{n} in order; found {} at position {}",
                    t.index,
                    i + 1
                ));
            }
            if t.head > n {
                return Err(format!("token {} has head {} beyond sentence end", t.index, t.head));
            }
            if t.head == t.index {
                return Err(format!("token {} is its own head", t.index));
            }
        }
        let roots: Vec<usize> = tokens.iter().filter(|t| t.head == 0).map(|t| t.index).collect();
        if roots.len() != 1 {
            return Err(format!("expected exactly one root, found {}", roots.len()));
        }

        // Walking up from any token must reach the root within n steps.
        let mut depth = vec![0usize; n];
        for start in 1..=n {
            let mut cur = start;
            let mut d = 0;
            while tokens[cur - 1].head != 0 {
                cur = tokens[cur - 1].head;
                d += 1;
                if d > n {
                    return Err(format!("cycle through token {start}"));
                }
            }
            depth[start - 1] = d;
        }
        Ok(Self { tokens, depth })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn root(&self) -> &Token {
        self.tokens
            .iter()
            .find(|t| t.head == 0)
            .expect("validated sentence has a root")
    }

    /// Number of edges from `index` up to the root.
    pub fn depth(&self, index: usize) -> Option<usize> {
        index.checked_sub(1).and_then(|i| self.depth.get(i).copied())
    }

    /// Direct dependents of `index` (use 0 for the root's parent).
    pub fn children(&self, index: usize) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    /// Undirected path length between two tokens in the dependency tree.
    pub fn tree_distance(&self, i: usize, j: usize) -> Result<usize, ConlluError> {
        let n = self.len();
        for idx in [i, j] {
            if idx == 0 || idx > n {
                return Err(ConlluError::IndexOutOfRange { index: idx, len: n });
            }
        }
        let (mut a, mut b) = (i, j);
        let (mut da, mut db) = (self.depth[a - 1], self.depth[b - 1]);
        let mut hops = 0;
        while da > db {
            a = self.tokens[a - 1].head;
            da -= 1;
            hops += 1;
        }
        while db > da {
            b = self.tokens[b - 1].head;
            db -= 1;
            hops += 1;
        }
        while a != b {
            a = self.tokens[a - 1].head;
            b = self.tokens[b - 1].head;
            hops += 2;
        }
        Ok(hops)
    }

    /// Tokens within `max_dist` hops of `source`, with their distances, by BFS.
    pub fn neighbourhood(&self, source: usize, max_dist: usize) -> Vec<(usize, usize)> {
        let n = self.len();
        if source == 0 || source > n {
            return Vec::new();
        }
        let mut adj = vec![Vec::new(); n + 1];
        for t in &self.tokens {
            if t.head != 0 {
                adj[t.index].push(t.head);
                adj[t.head].push(t.index);
            }
        }
        let mut dist = vec![usize::MAX; n + 1];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            out.push((u, dist[u]));
            if dist[u] == max_dist {
                continue;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        out
    }
}

/// A story's parse, one [`Sentence`] per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedStory {
    pub story_id: String,
    pub sentences: Vec<Sentence>,
}

#[derive(Default)]
struct Block {
    start_line: usize,
    sent_id: Option<String>,
    tokens: Vec<Token>,
}

impl Block {
    fn finish(self, out: &mut Vec<Sentence>) -> Result<(), ConlluError> {
        if self.tokens.is_empty() {
            return Ok(());
        }
        let sentence = Sentence::new(self.tokens).map_err(|message| ConlluError::Structure {
            line: self.start_line,
            sent_id: self.sent_id,
            message,
        })?;
        out.push(sentence);
        Ok(())
    }
}

pub fn parse_conllu<R: BufRead>(input: R) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut block = Block::default();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            std::mem::take(&mut block).finish(&mut sentences)?;
            continue;
        }
        if block.start_line == 0 {
            block.start_line = line_no;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(id) = comment.trim().strip_prefix("sent_id") {
                block.sent_id = Some(id.trim_start_matches([' ', '=']).trim().to_string());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::Parse {
                line: line_no,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let index: usize = id.parse().map_err(|_| ConlluError::Parse {
            line: line_no,
            message: format!("ID `{id}` is not an integer"),
        })?;
        if index == 0 {
            return Err(ConlluError::Parse {
                line: line_no,
                message: "ID must be at least 1".into(),
            });
        }
        let head: usize = cols[6].parse().map_err(|_| ConlluError::Parse {
            line: line_no,
            message: format!("HEAD `{}` is not an integer", cols[6]),
        })?;
        block.tokens.push(Token {
            index,
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        });
    }
    block.finish(&mut sentences)?;
    Ok(sentences)
}

pub fn parse_conllu_str(input: &str) -> Result<Vec<Sentence>, ConlluError> {
    parse_conllu(input.as_bytes())
}

/// Read `<dir>/<story_id>.conllu`.
pub fn load_parsed_story(dir: &Path, story_id: &str) -> Result<ParsedStory, ConlluError> {
    let path = dir.join(format!("{story_id}.conllu"));
    let file = std::fs::File::open(&path)?;
    let sentences = parse_conllu(std::io::BufReader::new(file))?;
    Ok(ParsedStory {
        story_id: story_id.to_string(),
        sentences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const PETER: &str = include_str!("../../../fixtures/conllu/peter.conllu");

    fn line(i: usize, form: &str, upos: &str, head: usize, rel: &str) -> String {
        format!("{i}\t{form}\t{}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_", form.to_lowercase())
    }

    #[test]
    fn minimal_block() {
        let text = format!(
            "{}\n{}\n",
            line(1, "Peter", "PROPN", 2, "nsubj"),
            line(2, "sleeps", "VERB", 0, "root")
        );
        let sents = parse_conllu_str(&text).unwrap();
        assert_eq!(sents.len(), 1);
        assert_eq!(sents[0].len(), 2);
        assert_eq!(sents[0].root().index, 2);
        assert_eq!(sents[0].tree_distance(1, 2).unwrap(), 1);
    }

    #[test]
    fn cycle_is_structural_error() {
        let text = format!(
            "# sent_id = s9\n{}\n{}\n{}\n",
            line(1, "a", "NOUN", 2, "dep"),
            line(2, "b", "NOUN", 1, "dep"),
            line(3, "c", "VERB", 0, "root")
        );
        match parse_conllu_str(&text) {
            Err(ConlluError::Structure { sent_id, message, .. }) => {
                assert_eq!(sent_id.as_deref(), Some("s9"));
                assert!(message.contains("cycle"), "{message}");
            }
            other => panic!("expected structural error, got {other:?}"),
        }
    }

    #[test]
    fn two_roots_rejected() {
        let text = format!(
            "{}\n{}\n",
            line(1, "a", "NOUN", 0, "root"),
            line(2, "b", "NOUN", 0, "root")
        );
        assert!(matches!(parse_conllu_str(&text), Err(ConlluError::Structure { .. })));
    }

    #[test]
    fn non_integer_head_names_line() {
        let text = format!("# c\n{}\n1\tx\tx\tNOUN\t_\t_\tX\troot\t_\t_\n", "# text = x");
        match parse_conllu_str(&text) {
            Err(ConlluError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("HEAD"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn skips_ranges_and_empty_nodes() {
        let text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
                    1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n\
                    2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n\
                    2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n\
                    3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n\n\
                    1\tYes\tyes\tINTJ\t_\t_\t0\troot\t_\t_\n";
        let sents = parse_conllu_str(text).unwrap();
        assert_eq!(sents.len(), 2);
        assert_eq!(sents[0].len(), 3);
        assert_eq!(sents[0].token(2).unwrap().lemma, "not");
    }

    #[test]
    fn peter_fixture() {
        let sents = parse_conllu_str(PETER).unwrap();
        assert_eq!(sents.len(), 1);
        let s = &sents[0];
        assert_eq!(s.root().surface, "loves");
        let peter = s.tokens().iter().find(|t| t.surface == "Peter").unwrap().index;
        let loves = s.root().index;
        assert_eq!(s.tree_distance(peter, loves).unwrap(), 2);
        assert_eq!(s.tokens().iter().filter(|t| t.head != 0).count(), s.len() - 1);
    }

    #[test]
    fn chain_distances() {
        // t1 <- t2 <- t3 <- t4 <- t5
        let text: String = (1..=5)
            .map(|i| line(i, &format!("w{i}"), "NOUN", if i == 5 { 0 } else { i + 1 }, "dep") + "\n")
            .collect();
        let s = &parse_conllu_str(&text).unwrap()[0];
        assert_eq!(s.tree_distance(1, 5).unwrap(), 4);
        assert_eq!(s.tree_distance(3, 3).unwrap(), 0);
        assert!(matches!(
            s.tree_distance(0, 2),
            Err(ConlluError::IndexOutOfRange { .. })
        ));
        assert!(s.tree_distance(1, 6).is_err());
        let near: Vec<usize> = s.neighbourhood(1, 2).into_iter().map(|(t, _)| t).collect();
        assert_eq!(near, vec![1, 2, 3]);
    }

    mod props {
        use super::super::*;
        use crate::oracles;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn distance_is_a_metric(heads in oracles::arb_heads(12)) {
                let s = Sentence::new(oracles::tokens_from_heads(&heads, &[])).unwrap();
                let n = s.len();
                let apsp = oracles::tree_all_pairs_bfs(&heads);
                for i in 1..=n {
                    for j in 1..=n {
                        let d = s.tree_distance(i, j).unwrap();
                        prop_assert_eq!(d, apsp[i - 1][j - 1]);
                        prop_assert_eq!(d, s.tree_distance(j, i).unwrap());
                        prop_assert_eq!(d == 0, i == j);
                        for k in 1..=n {
                            prop_assert!(d <= apsp[i - 1][k - 1] + apsp[k - 1][j - 1]);
                        }
                    }
                }
                prop_assert_eq!(s.tokens().iter().filter(|t| t.head == 0).count(), 1);
            }
        }
    }
}
