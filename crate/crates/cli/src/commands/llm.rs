use std::path::Path;

use storynet::rater::{default_prompts, HttpTransport, Rater, RequestLog};

use super::{corpus_csv, csv_bytes, read_corpus, tagged};
use crate::cli::{GenerateArgs, RateArgs};
use crate::error::{CliError, CliResult, Classify};
use crate::Ctx;

fn open_log(ctx: &Ctx, rel: &str) -> CliResult<RequestLog> {
    let path = ctx.out.join(rel);
    let file = std::fs::File::create(&path).internal_err(format!("creating {}", path.display()))?;
    Ok(RequestLog::new(file))
}

/// Re-record a log file written outside `Ctx::write` so it lands in the manifest.
fn record_log(ctx: &mut Ctx, rel: &str) -> CliResult<()> {
    let bytes = std::fs::read(ctx.out.join(rel)).internal_err(format!("reading {rel}"))?;
    ctx.write(rel, bytes)
}

pub fn rate(ctx: &mut Ctx, args: &RateArgs) -> CliResult<()> {
    let cfg = &mut ctx.config.rater;
    if let Some(u) = &args.endpoint {
        cfg.endpoint_url = u.clone();
    }
    if let Some(m) = &args.model_name {
        cfg.model_name = m.clone();
    }
    if let Some(j) = args.judges {
        cfg.judges = j;
    }
    ctx.config.validate()?;
    ctx.config.prompts.validate().input_err("prompt templates")?;
    let corpus = read_corpus(ctx, &args.corpus)?;
    let tag = args.tag.as_deref();
    let transport = HttpTransport::from_config(&ctx.config.rater).input_err("configuring transport")?;
    let log_rel = tagged("reports", "rate_requests", tag, "jsonl");
    let log = open_log(ctx, &log_rel)?;
    let rater = Rater { config: &ctx.config.rater, templates: &ctx.config.prompts, transport: &transport, log: &log };
    let run = rater.rate_corpus(corpus).internal_err("rating")?;
    drop(log);
    record_log(ctx, &log_rel)?;

    ctx.write(&tagged("reports", "rated_corpus", tag, "csv"), corpus_csv(&run.corpus)?)?;
    let mut json = Vec::new();
    storynet::corpus::write_corpus_json(&run.corpus, &mut json).internal_err("corpus json")?;
    ctx.write(&tagged("reports", "rated_corpus", tag, "json"), json)?;
    ctx.write(
        &tagged("reports", "rating_failures", tag, "csv"),
        csv_bytes(
            &["story_id", "judge", "attempts", "last_reply", "error"],
            run.failures.iter().map(|f| {
                vec![
                    f.story_id.clone(),
                    f.judge.to_string(),
                    f.attempts.to_string(),
                    f.last_reply.clone().unwrap_or_default(),
                    f.error.clone().unwrap_or_default(),
                ]
            }),
        )?,
    )?;
    ctx.write(
        &tagged("reports", "rating_warnings", tag, "csv"),
        csv_bytes(
            &["story_id", "judge", "score", "reply"],
            run.warnings.iter().map(|w| vec![w.story_id.clone(), w.judge.to_string(), w.score.to_string(), w.reply.clone()]),
        )?,
    )?;
    let total = run.corpus.len() * ctx.config.rater.judges;
    println!(
        "rated {} stories with {} judges: {} scores, {} lenient parses, {} failures",
        run.corpus.len(),
        ctx.config.rater.judges,
        total - run.failures.len(),
        run.warnings.len(),
        run.failures.len()
    );
    Ok(())
}

pub fn generate(ctx: &mut Ctx, args: &GenerateArgs) -> CliResult<()> {
    let cfg = &mut ctx.config;
    if let Some(u) = &args.endpoint {
        cfg.rater.endpoint_url = u.clone();
    }
    if let Some(m) = &args.model_name {
        cfg.rater.model_name = m.clone();
    }
    if let Some(s) = args.seed {
        cfg.rater.seed = s;
    }
    if let Some(p) = args.participants {
        cfg.generate.participants = p;
    }
    ctx.config.validate()?;
    ctx.config.prompts.validate().input_err("prompt templates")?;
    let prompts = match &args.prompts {
        Some(p) => {
            ctx.record_input(p)?;
            read_prompts(p)?
        }
        None => default_prompts(),
    };
    let tag = args.tag.as_deref();
    let transport = HttpTransport::from_config(&ctx.config.rater).input_err("configuring transport")?;
    let log_rel = tagged("reports", "generate_requests", tag, "jsonl");
    let log = open_log(ctx, &log_rel)?;
    let rater = Rater { config: &ctx.config.rater, templates: &ctx.config.prompts, transport: &transport, log: &log };
    let run = rater.generate_stories(&prompts, ctx.config.generate.participants).internal_err("generation")?;
    drop(log);
    record_log(ctx, &log_rel)?;

    ctx.write(&tagged("reports", "generated_corpus", tag, "csv"), corpus_csv(&run.corpus)?)?;
    ctx.write(
        &tagged("reports", "generation_gaps", tag, "csv"),
        csv_bytes(
            &["participant", "story_id", "prompt1", "prompt2", "prompt3"],
            run.gaps.iter().map(|g| {
                let mut r = vec![g.participant.to_string(), g.story_id.clone()];
                r.extend(g.prompt.iter().cloned());
                r
            }),
        )?,
    )?;
    println!("generated {} stories ({} gaps)", run.corpus.len(), run.gaps.len());
    Ok(())
}

/// Three words per row; a `word1,word2,word3` header is skipped.
fn read_prompts(path: &Path) -> CliResult<Vec<[String; 3]>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .input_err(format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.input_err(format!("{} row {}", path.display(), i + 1))?;
        if rec.len() != 3 || rec.iter().any(str::is_empty) {
            return Err(CliError::input(format!("{} row {}: expected three words", path.display(), i + 1)));
        }
        if i == 0 && rec.iter().eq(["word1", "word2", "word3"]) {
            continue;
        }
        out.push([rec[0].to_string(), rec[1].to_string(), rec[2].to_string()]);
    }
    if out.is_empty() {
        return Err(CliError::input(format!("{} has no prompts", path.display())));
    }
    Ok(out)
}
