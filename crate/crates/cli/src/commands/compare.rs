use std::fmt::Write as _;

use storynet::corpus::{AuthorKind, Corpus};
use storynet::netfeat::{FeatureMatrix, FEATURE_COUNT, FEATURE_NAMES};
use storynet::stats::{compare_columns, mann_whitney_u, mean_std, stars, ComparisonRow};

use super::{csv_bytes, fmt, read_corpus, read_matrix, tagged};
use crate::cli::CompareArgs;
use crate::error::{CliError, CliResult, Classify};
use crate::svg::{grouped_bars, Series};
use crate::Ctx;

pub fn run(ctx: &mut Ctx, args: &CompareArgs) -> CliResult<()> {
    let tag = args.tag.as_deref();
    let (a, b, lengths) = match (&args.a, &args.b, &args.features, &args.corpus) {
        (Some(pa), Some(pb), None, None) => {
            let a = read_matrix(ctx, pa)?;
            let b = read_matrix(ctx, pb)?;
            let lengths = match (&args.corpus_a, &args.corpus_b) {
                (Some(ca), Some(cb)) => {
                    let ca = read_corpus(ctx, ca)?;
                    let cb = read_corpus(ctx, cb)?;
                    Some((word_counts(&ca, &a), word_counts(&cb, &b)))
                }
                (None, None) => None,
                _ => return Err(CliError::input("--corpus-a and --corpus-b go together")),
            };
            (a, b, lengths)
        }
        (None, None, Some(pf), Some(pc)) => {
            let m = read_matrix(ctx, pf)?;
            let corpus = read_corpus(ctx, pc)?;
            let (a, b) = split_by_author(&m, &corpus)?;
            let lengths = Some((word_counts(&corpus, &a), word_counts(&corpus, &b)));
            (a, b, lengths)
        }
        _ => return Err(CliError::input("give either --a and --b, or --features and --corpus")),
    };
    if a.is_empty() || b.is_empty() {
        return Err(CliError::input(format!(
            "both groups need stories ({}: {}, {}: {})",
            args.label_a,
            a.len(),
            args.label_b,
            b.len()
        )));
    }

    let rows = compare_columns((0..FEATURE_COUNT).map(|j| (FEATURE_NAMES[j], a.column(j), b.column(j))))
        .input_err("comparing features")?;
    ctx.write(&tagged("reports", "compare", tag, "csv"), comparison_csv(&rows, &args.label_a, &args.label_b)?)?;

    let mut md = String::new();
    let _ = writeln!(md, "## Feature comparison{}\n", tag.map(|t| format!(" ({t})")).unwrap_or_default());
    let _ = writeln!(
        md,
        "Two-sided Mann–Whitney U, {} (n = {}) against {} (n = {}). Stars: * p < 0.05, ** p < 0.01, *** p < 0.001.\n",
        args.label_a,
        a.len(),
        args.label_b,
        b.len()
    );
    let _ = writeln!(md, "| Feature | U | p | | {} mean ± std | {} mean ± std |", args.label_a, args.label_b);
    let _ = writeln!(md, "|---|---|---|---|---|---|");
    for r in &rows {
        let _ = writeln!(
            md,
            "| {} | {:.1} | {:.4} | {} | {:.3} ± {:.3} | {:.3} ± {:.3} |",
            r.feature, r.statistic, r.p_value, r.stars, r.mean_a, r.std_a, r.mean_b, r.std_b
        );
    }

    if let Some((la, lb)) = lengths {
        let t = mann_whitney_u(&la, &lb).input_err("comparing story lengths")?;
        let (ma, sa) = mean_std(&la);
        let (mb, sb) = mean_std(&lb);
        ctx.write(
            &tagged("reports", "length", tag, "csv"),
            csv_bytes(
                &["group", "n", "mean_words", "std_words", "U", "p_value", "stars"],
                [
                    vec![args.label_a.clone(), la.len().to_string(), fmt(ma), fmt(sa), fmt(t.statistic), fmt(t.p_value), stars(t.p_value).into()],
                    vec![args.label_b.clone(), lb.len().to_string(), fmt(mb), fmt(sb), fmt(t.statistic), fmt(t.p_value), stars(t.p_value).into()],
                ],
            )?,
        )?;
        let _ = writeln!(
            md,
            "\nStory length in words: {} {ma:.1} ± {sa:.1}, {} {mb:.1} ± {sb:.1} (U = {:.1}, p = {:.4}{}).",
            args.label_a,
            args.label_b,
            t.statistic,
            t.p_value,
            if t.p_value < 0.05 { format!(", {}", stars(t.p_value)) } else { String::new() }
        );
    }
    ctx.write(&tagged("reports", "compare", tag, "md"), md)?;

    let categories: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let means_a: Vec<f64> = rows.iter().map(|r| r.mean_a).collect();
    let means_b: Vec<f64> = rows.iter().map(|r| r.mean_b).collect();
    let std_a: Vec<f64> = rows.iter().map(|r| r.std_a).collect();
    let std_b: Vec<f64> = rows.iter().map(|r| r.std_b).collect();
    let svg = grouped_bars(
        "Feature means by group",
        "mean",
        &categories,
        &[
            Series { name: &args.label_a, values: &means_a, errors: Some(&std_a) },
            Series { name: &args.label_b, values: &means_b, errors: Some(&std_b) },
        ],
    );
    ctx.write(&tagged("figures", "compare", tag, "svg"), svg)?;
    let significant = rows.iter().filter(|r| r.p_value < 0.05).count();
    println!("compared {} features ({significant} with p < 0.05)", rows.len());
    Ok(())
}

fn comparison_csv(rows: &[ComparisonRow], label_a: &str, label_b: &str) -> CliResult<Vec<u8>> {
    let ma = format!("mean_{label_a}");
    let sa = format!("std_{label_a}");
    let mb = format!("mean_{label_b}");
    let sb = format!("std_{label_b}");
    csv_bytes(
        &["feature", "U", "p_value", "stars", &ma, &sa, &mb, &sb, "degenerate"],
        rows.iter().map(|r| {
            vec![
                r.feature.clone(),
                fmt(r.statistic),
                fmt(r.p_value),
                r.stars.clone(),
                fmt(r.mean_a),
                fmt(r.std_a),
                fmt(r.mean_b),
                fmt(r.std_b),
                r.degenerate.to_string(),
            ]
        }),
    )
}

fn split_by_author(m: &FeatureMatrix, corpus: &Corpus) -> CliResult<(FeatureMatrix, FeatureMatrix)> {
    let mut a = FeatureMatrix { story_ids: Vec::new(), rows: Vec::new() };
    let mut b = FeatureMatrix { story_ids: Vec::new(), rows: Vec::new() };
    for (id, row) in m.story_ids.iter().zip(&m.rows) {
        let story = corpus
            .get(id)
            .ok_or_else(|| CliError::input(format!("story {id} is in the feature matrix but not in the corpus")))?;
        let target = match story.author_kind {
            AuthorKind::Human => &mut a,
            AuthorKind::Llm => &mut b,
        };
        target.story_ids.push(id.clone());
        target.rows.push(*row);
    }
    Ok((a, b))
}

/// Word counts of the stories in `m`, in matrix order; stories absent from the corpus are skipped.
fn word_counts(corpus: &Corpus, m: &FeatureMatrix) -> Vec<f64> {
    m.story_ids.iter().filter_map(|id| corpus.get(id)).map(|s| s.word_count() as f64).collect()
}
