use std::fmt::Write as _;

use storynet::corpus::{write_corpus_json, AuthorKind};

use super::{corpus_csv, csv_bytes, read_corpus, tagged};
use crate::cli::IngestArgs;
use crate::error::{CliResult, Classify};
use crate::Ctx;

pub fn run(ctx: &mut Ctx, args: &IngestArgs) -> CliResult<()> {
    let corpus = read_corpus(ctx, &args.corpus)?;
    let tag = args.tag.as_deref();
    ctx.write(&tagged("features", "corpus", tag, "csv"), corpus_csv(&corpus)?)?;
    let mut json = Vec::new();
    write_corpus_json(&corpus, &mut json).internal_err("writing corpus json")?;
    ctx.write(&tagged("features", "corpus", tag, "json"), json)?;
    ctx.write(
        &tagged("features", "word_counts", tag, "csv"),
        csv_bytes(
            &["story_id", "author", "word_count"],
            corpus.iter().map(|s| vec![s.id.clone(), author(s.author_kind).into(), s.word_count().to_string()]),
        )?,
    )?;

    let mut md = String::new();
    let _ = writeln!(md, "## Corpus{}\n", tag.map(|t| format!(" ({t})")).unwrap_or_default());
    let _ = writeln!(md, "| Author | Stories | Mean words | Rated stories | Ratings |");
    let _ = writeln!(md, "|---|---|---|---|---|");
    for kind in [AuthorKind::Human, AuthorKind::Llm] {
        let stories: Vec<_> = corpus.iter().filter(|s| s.author_kind == kind).collect();
        if stories.is_empty() {
            continue;
        }
        let words: f64 = stories.iter().map(|s| s.word_count() as f64).sum::<f64>() / stories.len() as f64;
        let rated = stories.iter().filter(|s| !s.ratings.is_empty()).count();
        let ratings: usize = stories.iter().map(|s| s.ratings.len()).sum();
        let _ = writeln!(md, "| {} | {} | {words:.1} | {rated} | {ratings} |", author(kind), stories.len());
    }
    ctx.write(&tagged("reports", "ingest", tag, "md"), md)?;
    println!("ingested {} stories", corpus.len());
    Ok(())
}

pub fn author(kind: AuthorKind) -> &'static str {
    match kind {
        AuthorKind::Human => "human",
        AuthorKind::Llm => "llm",
    }
}
