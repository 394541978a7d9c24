pub mod compare;
pub mod distributions;
pub mod explain;
pub mod featurize;
pub mod ingest;
pub mod learn;
pub mod llm;
pub mod report;

use std::path::Path;

use storynet::corpus::{load_corpus, write_corpus_csv, Corpus, CorpusFormat};
use storynet::netfeat::FeatureMatrix;

use crate::error::{CliError, CliResult, Classify};
use crate::Ctx;

/// `name.ext` or `name_<tag>.ext`.
pub fn tagged(dir: &str, stem: &str, tag: Option<&str>, ext: &str) -> String {
    match tag {
        Some(t) if !t.is_empty() => format!("{dir}/{stem}_{t}.{ext}"),
        _ => format!("{dir}/{stem}.{ext}"),
    }
}

pub fn read_corpus(ctx: &mut Ctx, path: &Path) -> CliResult<Corpus> {
    ctx.record_input(path)?;
    load_corpus(path, CorpusFormat::from_path(path)).input_err(format!("loading corpus {}", path.display()))
}

pub fn read_matrix(ctx: &mut Ctx, path: &Path) -> CliResult<FeatureMatrix> {
    ctx.record_input(path)?;
    let file = std::fs::File::open(path).input_err(format!("opening {}", path.display()))?;
    FeatureMatrix::read_csv(file).input_err(format!("reading feature matrix {}", path.display()))
}

pub fn corpus_csv(corpus: &Corpus) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_corpus_csv(corpus, &mut buf).internal_err("writing corpus csv")?;
    Ok(buf)
}

pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).internal_err("csv")?;
    for r in rows {
        w.write_record(&r).internal_err("csv")?;
    }
    w.into_inner().map_err(|e| CliError::internal(e.to_string()))
}

pub fn fmt(x: f64) -> String {
    storynet::netfeat::format_float(x)
}
