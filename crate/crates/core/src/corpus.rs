//! Story corpora: loading, validation, completeness filtering and rating binning.
//!
//! A corpus is read from either a CSV file with positional rater columns
//! (`rater1..raterN`, empty cell = missing rating) or a JSON array of story
//! records. Once loaded, a [`Corpus`] is immutable.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fixed leading CSV columns, in order. Rater columns follow.
pub const CSV_FIXED_COLUMNS: [&str; 6] =
    ["story_id", "author", "prompt1", "prompt2", "prompt3", "text"];

/// Number of rater columns written by [`write_corpus_csv`] at minimum.
pub const DEFAULT_RATER_COLUMNS: usize = 4;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("row {row}, column `{column}`: {message}")]
    Schema {
        row: usize,
        column: String,
        message: String,
    },
    #[error("duplicate story id `{0}`")]
    DuplicateId(String),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("rating {score} cannot be binned under {scheme}")]
    SchemeMismatch { score: u8, scheme: RatingScheme },
    #[error("story `{story_id}`: {source}")]
    Story {
        story_id: String,
        #[source]
        source: Box<CorpusError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuthorKind {
    Human,
    Llm,
}

impl fmt::Display for AuthorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuthorKind::Human => "human",
            AuthorKind::Llm => "llm",
        })
    }
}

impl FromStr for AuthorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "human" => Ok(AuthorKind::Human),
            "llm" => Ok(AuthorKind::Llm),
            other => Err(format!("expected `human` or `llm`, got `{other}`")),
        }
    }
}

/// One rater's 1..=5 score for a story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterScore {
    pub rater_id: String,
    pub score: u8,
}

impl RaterScore {
    pub fn new(rater_id: impl Into<String>, score: u8) -> Result<Self, String> {
        if !(1..=5).contains(&score) {
            return Err(format!("score {score} outside 1..=5"));
        }
        Ok(Self {
            rater_id: rater_id.into(),
            score,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Story {
    pub id: String,
    pub author_kind: AuthorKind,
    pub prompt: [String; 3],
    pub text: String,
    pub ratings: Vec<RaterScore>,
}

impl Story {
    /// Number of distinct raters that scored this story.
    pub fn distinct_raters(&self) -> usize {
        self.ratings
            .iter()
            .map(|r| r.rater_id.as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    /// Whitespace-delimited token count of the raw text.
    pub fn word_count(&self) -> usize {
        story_word_count(&self.text)
    }

    /// Mean of the attached scores, `None` when unrated.
    pub fn mean_rating(&self) -> Option<f64> {
        if self.ratings.is_empty() {
            return None;
        }
        let sum: u32 = self.ratings.iter().map(|r| u32::from(r.score)).sum();
        Some(f64::from(sum) / self.ratings.len() as f64)
    }

    fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("story id is empty".into());
        }
        if self.text.trim().is_empty() {
            return Err("text is empty".into());
        }
        if let Some(i) = self.prompt.iter().position(|w| w.trim().is_empty()) {
            return Err(format!("prompt word {} is empty", i + 1));
        }
        if let Some(r) = self.ratings.iter().find(|r| !(1..=5).contains(&r.score)) {
            return Err(format!("score {} outside 1..=5", r.score));
        }
        Ok(())
    }
}

/// Whitespace token count after trimming.
pub fn story_word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// An ordered, id-unique list of stories.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Corpus {
    stories: Vec<Story>,
}

impl Corpus {
    pub fn new(stories: Vec<Story>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for (row, story) in stories.iter().enumerate() {
            story.validate().map_err(|message| CorpusError::Schema {
                row: row + 1,
                column: "story".into(),
                message,
            })?;
            if !seen.insert(story.id.as_str()) {
                return Err(CorpusError::DuplicateId(story.id.clone()));
            }
        }
        Ok(Self { stories })
    }

    pub fn stories(&self) -> &[Story] {
        &self.stories
    }

    pub fn len(&self) -> usize {
        self.stories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stories.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Story> {
        self.stories.iter().find(|s| s.id == id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Story> {
        self.stories.iter()
    }

    pub fn into_stories(self) -> Vec<Story> {
        self.stories
    }

    pub fn word_counts(&self) -> Vec<usize> {
        self.stories.iter().map(Story::word_count).collect()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Story;
    type IntoIter = std::slice::Iter<'a, Story>;

    fn into_iter(self) -> Self::IntoIter {
        self.stories.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    Json,
}

impl CorpusFormat {
    /// Guess from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => CorpusFormat::Json,
            _ => CorpusFormat::Csv,
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    let file = std::fs::File::open(path.as_ref())?;
    match format {
        CorpusFormat::Csv => read_corpus_csv(file),
        CorpusFormat::Json => read_corpus_json(file),
    }
}

pub fn read_corpus_csv<R: Read>(reader: R) -> Result<Corpus, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    for (i, expected) in CSV_FIXED_COLUMNS.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h.trim() == *expected => {}
            Some(h) => {
                return Err(CorpusError::Header(format!(
                    "column {} should be `{expected}`, found `{h}`",
                    i + 1
                )))
            }
            None => return Err(CorpusError::Header(format!("missing column `{expected}`"))),
        }
    }
    let rater_columns: Vec<String> = headers
        .iter()
        .skip(CSV_FIXED_COLUMNS.len())
        .map(|h| h.trim().to_string())
        .collect();
    for (k, name) in rater_columns.iter().enumerate() {
        if *name != format!("rater{}", k + 1) {
            return Err(CorpusError::Header(format!(
                "rater columns must be positional `rater1..raterN`, found `{name}`"
            )));
        }
    }

    let mut stories = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in rdr.records().enumerate() {
        // header is line 1
        let row = i + 2;
        let record = record.map_err(|e| CorpusError::Schema {
            row,
            column: "*".into(),
            message: e.to_string(),
        })?;
        let field = |col: usize| record.get(col).unwrap_or("");
        let schema = |col: usize, message: String| CorpusError::Schema {
            row,
            column: headers.get(col).unwrap_or("?").to_string(),
            message,
        };

        let id = field(0).trim().to_string();
        if id.is_empty() {
            return Err(schema(0, "empty story id".into()));
        }
        let author_kind = field(1).parse::<AuthorKind>().map_err(|m| schema(1, m))?;
        let mut prompt: [String; 3] = Default::default();
        for (k, slot) in prompt.iter_mut().enumerate() {
            let w = field(2 + k).trim();
            if w.is_empty() {
                return Err(schema(2 + k, "empty prompt word".into()));
            }
            *slot = w.to_string();
        }
        let text = field(5).to_string();
        if text.trim().is_empty() {
            return Err(schema(5, "empty text".into()));
        }
        let mut ratings = Vec::new();
        for (k, rater) in rater_columns.iter().enumerate() {
            let col = CSV_FIXED_COLUMNS.len() + k;
            let cell = field(col).trim();
            if cell.is_empty() {
                continue;
            }
            let score = parse_score(cell).map_err(|m| schema(col, m))?;
            ratings.push(RaterScore {
                rater_id: rater.clone(),
                score,
            });
        }
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId(id));
        }
        stories.push(Story {
            id,
            author_kind,
            prompt,
            text,
            ratings,
        });
    }
    Ok(Corpus { stories })
}

fn parse_score(cell: &str) -> Result<u8, String> {
    // Spreadsheet exports sometimes write integral floats ("4.0").
    let value: f64 = cell
        .parse()
        .map_err(|_| format!("rating `{cell}` is not a number"))?;
    if value.fract() != 0.0 || !(1.0..=5.0).contains(&value) {
        return Err(format!("rating `{cell}` outside 1..=5"));
    }
    Ok(value as u8)
}

#[derive(Deserialize)]
struct JsonStory {
    story_id: String,
    author: String,
    prompt1: String,
    prompt2: String,
    prompt3: String,
    text: String,
    #[serde(default)]
    ratings: Vec<RaterScore>,
}

#[derive(Serialize)]
struct JsonStoryOut<'a> {
    story_id: &'a str,
    author: AuthorKind,
    prompt1: &'a str,
    prompt2: &'a str,
    prompt3: &'a str,
    text: &'a str,
    ratings: &'a [RaterScore],
}

pub fn read_corpus_json<R: Read>(reader: R) -> Result<Corpus, CorpusError> {
    let records: Vec<JsonStory> = serde_json::from_reader(reader)?;
    let mut stories = Vec::with_capacity(records.len());
    let mut seen = HashSet::new();
    for (i, rec) in records.into_iter().enumerate() {
        let row = i + 1;
        let schema = |column: &str, message: String| CorpusError::Schema {
            row,
            column: column.to_string(),
            message,
        };
        let author_kind = rec.author.parse().map_err(|m| schema("author", m))?;
        for (name, w) in [("prompt1", &rec.prompt1), ("prompt2", &rec.prompt2), ("prompt3", &rec.prompt3)] {
            if w.trim().is_empty() {
                return Err(schema(name, "empty prompt word".into()));
            }
        }
        if rec.story_id.trim().is_empty() {
            return Err(schema("story_id", "empty story id".into()));
        }
        if rec.text.trim().is_empty() {
            return Err(schema("text", "empty text".into()));
        }
        if let Some(r) = rec.ratings.iter().find(|r| !(1..=5).contains(&r.score)) {
            return Err(schema("ratings", format!("score {} outside 1..=5", r.score)));
        }
        if !seen.insert(rec.story_id.clone()) {
            return Err(CorpusError::DuplicateId(rec.story_id));
        }
        stories.push(Story {
            id: rec.story_id,
            author_kind,
            prompt: [rec.prompt1, rec.prompt2, rec.prompt3],
            text: rec.text,
            ratings: rec.ratings,
        });
    }
    Ok(Corpus { stories })
}

/// Write a corpus as CSV. Ratings from `raterK` ids go to column `raterK`;
/// any other ids are written positionally and lost (use JSON to keep them).
pub fn write_corpus_csv<W: Write>(corpus: &Corpus, writer: W) -> Result<(), CorpusError> {
    // Ratings whose ids are already positional (`raterK`) keep their column.
    let positional = |r: &RaterScore| {
        r.rater_id
            .strip_prefix("rater")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
    };
    let keep_columns = corpus.iter().all(|s| {
        let cols: HashSet<_> = s.ratings.iter().filter_map(positional).collect();
        cols.len() == s.ratings.len()
    });
    let column_of = |s: &Story, i: usize| -> usize {
        if keep_columns {
            positional(&s.ratings[i]).unwrap_or(i + 1) - 1
        } else {
            i
        }
    };
    let raters = corpus
        .iter()
        .flat_map(|s| (0..s.ratings.len()).map(move |i| (s, i)))
        .map(|(s, i)| column_of(s, i) + 1)
        .max()
        .unwrap_or(0)
        .max(DEFAULT_RATER_COLUMNS);
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = CSV_FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((1..=raters).map(|k| format!("rater{k}")));
    wtr.write_record(&header)?;
    for s in corpus {
        let mut rec = vec![
            s.id.clone(),
            s.author_kind.to_string(),
            s.prompt[0].clone(),
            s.prompt[1].clone(),
            s.prompt[2].clone(),
            s.text.clone(),
        ];
        let mut cells = vec![String::new(); raters];
        for (i, r) in s.ratings.iter().enumerate() {
            cells[column_of(s, i)] = r.score.to_string();
        }
        rec.extend(cells);
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_corpus_json<W: Write>(corpus: &Corpus, writer: W) -> Result<(), CorpusError> {
    let out: Vec<JsonStoryOut<'_>> = corpus
        .iter()
        .map(|s| JsonStoryOut {
            story_id: &s.id,
            author: s.author_kind,
            prompt1: &s.prompt[0],
            prompt2: &s.prompt[1],
            prompt3: &s.prompt[2],
            text: &s.text,
            ratings: &s.ratings,
        })
        .collect();
    serde_json::to_writer_pretty(writer, &out)?;
    Ok(())
}

/// Keep stories scored by at least `required_raters` distinct raters.
pub fn filter_complete(corpus: &Corpus, required_raters: usize) -> Corpus {
    let required = required_raters.max(1);
    Corpus {
        stories: corpus
            .iter()
            .filter(|s| s.distinct_raters() >= required)
            .cloned()
            .collect(),
    }
}

/// How 1..=5 ratings collapse into three creativity classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatingScheme {
    /// {1,2} -> 0, {3} -> 1, {4,5} -> 2.
    HumanScale,
    /// {3} -> 0, {4} -> 1, {5} -> 2. For corpora with no scores below 3.
    CompressedTop,
}

impl fmt::Display for RatingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatingScheme::HumanScale => "human-scale",
            RatingScheme::CompressedTop => "compressed-top",
        })
    }
}

impl FromStr for RatingScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human-scale" | "human_scale" | "HumanScale" => Ok(RatingScheme::HumanScale),
            "compressed-top" | "compressed_top" | "CompressedTop" => Ok(RatingScheme::CompressedTop),
            other => Err(format!(
                "unknown rating scheme `{other}` (expected human-scale or compressed-top)"
            )),
        }
    }
}

/// Low / mid / high creativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CreativityClass(u8);

impl CreativityClass {
    pub const LOW: CreativityClass = CreativityClass(0);
    pub const MID: CreativityClass = CreativityClass(1);
    pub const HIGH: CreativityClass = CreativityClass(2);
    pub const COUNT: usize = 3;

    pub fn new(value: u8) -> Option<Self> {
        (value < 3).then_some(CreativityClass(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }
}

pub fn bin_rating(score: u8, scheme: RatingScheme) -> Result<CreativityClass, CorpusError> {
    let class = match (scheme, score) {
        (RatingScheme::HumanScale, 1 | 2) => 0,
        (RatingScheme::HumanScale, 3) => 1,
        (RatingScheme::HumanScale, 4 | 5) => 2,
        (RatingScheme::CompressedTop, 3) => 0,
        (RatingScheme::CompressedTop, 4) => 1,
        (RatingScheme::CompressedTop, 5) => 2,
        _ => return Err(CorpusError::SchemeMismatch { score, scheme }),
    };
    Ok(CreativityClass(class))
}

/// How per-rater scores become training rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// One row per (story, rater) pair, raters pooled without distinction.
    #[default]
    PerRater,
    /// One row per story labelled by its rounded mean score (halves round up).
    MeanRating,
}

impl FromStr for LabelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-rater" => Ok(LabelMode::PerRater),
            "mean-rating" | "mean" => Ok(LabelMode::MeanRating),
            other => Err(format!("unknown label mode `{other}`")),
        }
    }
}

/// A labelled training row keyed back to its story.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRow {
    pub story_id: String,
    pub rater_id: Option<String>,
    pub class: CreativityClass,
}

/// Expand a corpus into class labels. Unrated stories produce no rows.
pub fn labeled_rows(
    corpus: &Corpus,
    scheme: RatingScheme,
    mode: LabelMode,
) -> Result<Vec<LabeledRow>, CorpusError> {
    let mut rows = Vec::new();
    for story in corpus {
        let wrap = |e: CorpusError| CorpusError::Story {
            story_id: story.id.clone(),
            source: Box::new(e),
        };
        match mode {
            LabelMode::PerRater => {
                for r in &story.ratings {
                    rows.push(LabeledRow {
                        story_id: story.id.clone(),
                        rater_id: Some(r.rater_id.clone()),
                        class: bin_rating(r.score, scheme).map_err(wrap)?,
                    });
                }
            }
            LabelMode::MeanRating => {
                if let Some(mean) = story.mean_rating() {
                    let rounded = (mean + 0.5).floor() as u8;
                    rows.push(LabeledRow {
                        story_id: story.id.clone(),
                        rater_id: None,
                        class: bin_rating(rounded, scheme).map_err(wrap)?,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Score histogram over 1..=5 for each rater id, in first-seen rater order.
pub fn rating_histograms(corpus: &Corpus) -> Vec<(String, [usize; 5])> {
    let mut order: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    for s in corpus {
        for r in &s.ratings {
            if seen.insert(r.rater_id.clone()) {
                order.push(r.rater_id.clone());
            }
        }
    }
    order
        .into_iter()
        .map(|rater| {
            let mut hist = [0usize; 5];
            for s in corpus {
                for r in s.ratings.iter().filter(|r| r.rater_id == rater) {
                    hist[usize::from(r.score - 1)] += 1;
                }
            }
            (rater, hist)
        })
        .collect()
}

/// Three-class histogram of all ratings under `scheme`.
pub fn class_histogram(corpus: &Corpus, scheme: RatingScheme) -> Result<[usize; 3], CorpusError> {
    let mut hist = [0usize; 3];
    for row in labeled_rows(corpus, scheme, LabelMode::PerRater)? {
        hist[row.class.index()] += 1;
    }
    Ok(hist)
}
