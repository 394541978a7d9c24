use std::fmt::Write as _;

use storynet::corpus::{class_histogram, rating_histograms, Corpus};
use storynet::stats::{kendall_tau, mann_whitney_u, pearson, spearman, stars, TestResult};

use super::{csv_bytes, fmt, read_corpus, tagged};
use crate::cli::DistributionsArgs;
use crate::error::{CliError, CliResult, Classify};
use crate::svg::histogram_panels;
use crate::Ctx;

pub fn run(ctx: &mut Ctx, args: &DistributionsArgs) -> CliResult<()> {
    if let Some(s) = args.scheme {
        ctx.config.labels.scheme = s;
    }
    let corpus = read_corpus(ctx, &args.corpus)?;
    let tag = args.tag.as_deref();
    let scheme = ctx.config.labels.scheme;

    let hist = rating_histograms(&corpus);
    if hist.is_empty() {
        return Err(CliError::input("the corpus has no ratings"));
    }
    ctx.write(
        &tagged("reports", "rating_histograms", tag, "csv"),
        csv_bytes(
            &["rater", "1", "2", "3", "4", "5"],
            hist.iter().map(|(r, h)| {
                let mut row = vec![r.clone()];
                row.extend(h.iter().map(|c| c.to_string()));
                row
            }),
        )?,
    )?;
    let classes = class_histogram(&corpus, scheme).input_err("binning ratings")?;
    ctx.write(
        &tagged("reports", "class_histogram", tag, "csv"),
        csv_bytes(&["class", "count"], classes.iter().enumerate().map(|(k, c)| vec![k.to_string(), c.to_string()]))?,
    )?;
    let score_labels: Vec<String> = (1..=5).map(|s| s.to_string()).collect();
    let panels: Vec<(String, Vec<f64>)> =
        hist.iter().map(|(r, h)| (r.clone(), h.iter().map(|&c| c as f64).collect())).collect();
    ctx.write(&tagged("figures", "ratings", tag, "svg"), histogram_panels("Ratings per rater", &score_labels, &panels))?;
    let class_labels: Vec<String> = ["0 (low)", "1 (mid)", "2 (high)"].iter().map(|s| s.to_string()).collect();
    ctx.write(
        &tagged("figures", "classes", tag, "svg"),
        histogram_panels(
            "Creativity classes",
            &class_labels,
            &[("all ratings".to_string(), classes.iter().map(|&c| c as f64).collect())],
        ),
    )?;

    let mut md = String::new();
    let _ = writeln!(md, "## Rating distributions{}\n", tag.map(|t| format!(" ({t})")).unwrap_or_default());
    let _ = writeln!(md, "| Rater | 1 | 2 | 3 | 4 | 5 |");
    let _ = writeln!(md, "|---|---|---|---|---|---|");
    for (r, h) in &hist {
        let _ = writeln!(md, "| {r} | {} | {} | {} | {} | {} |", h[0], h[1], h[2], h[3], h[4]);
    }
    let _ = writeln!(md, "\nClass counts: {} low, {} mid, {} high.", classes[0], classes[1], classes[2]);

    if let Some(p) = &args.against {
        let other = read_corpus(ctx, p)?;
        let results = correlations(&corpus, &other)?;
        ctx.write(
            &tagged("reports", "rating_correlations", tag, "csv"),
            csv_bytes(
                &["test", "statistic", "p_value", "stars", "method", "n1", "n2"],
                results.iter().map(|(name, t)| {
                    vec![
                        name.to_string(),
                        fmt(t.statistic),
                        fmt(t.p_value),
                        stars(t.p_value).to_string(),
                        t.method.to_string(),
                        t.n1.to_string(),
                        t.n2.to_string(),
                    ]
                }),
            )?,
        )?;
        let _ = writeln!(md, "\n### Agreement with {}\n", p.display());
        let _ = writeln!(md, "| Test | Statistic | p | |");
        let _ = writeln!(md, "|---|---|---|---|");
        for (name, t) in &results {
            let _ = writeln!(md, "| {name} | {:.4} | {:.4} | {} |", t.statistic, t.p_value, stars(t.p_value));
        }
        let content = std::mem::take(&mut md);
        ctx.write(&tagged("reports", "rating_correlations", tag, "md"), &content)?;
        md = content;
    }
    ctx.write(&tagged("reports", "distributions", tag, "md"), md)?;
    println!("{} raters, classes {:?}", hist.len(), classes);
    Ok(())
}

/// Correlations of per-story mean ratings over shared story ids, plus a
/// Mann–Whitney test on the pooled individual ratings.
fn correlations(a: &Corpus, b: &Corpus) -> CliResult<Vec<(&'static str, TestResult)>> {
    let mut xa = Vec::new();
    let mut xb = Vec::new();
    for s in a {
        if let (Some(ma), Some(mb)) = (s.mean_rating(), b.get(&s.id).and_then(|o| o.mean_rating())) {
            xa.push(ma);
            xb.push(mb);
        }
    }
    if xa.len() < 3 {
        return Err(CliError::input(format!("only {} stories are rated in both corpora; need at least 3", xa.len())));
    }
    let pooled = |c: &Corpus| -> Vec<f64> { c.iter().flat_map(|s| s.ratings.iter().map(|r| f64::from(r.score))).collect() };
    Ok(vec![
        ("pearson", pearson(&xa, &xb).input_err("pearson")?),
        ("spearman", spearman(&xa, &xb).input_err("spearman")?),
        ("kendall", kendall_tau(&xa, &xb).input_err("kendall")?),
        ("mann_whitney", mann_whitney_u(&pooled(a), &pooled(b)).input_err("mann-whitney")?),
    ])
}
