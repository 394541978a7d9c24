use storynet::corpus::{filter_complete, labeled_rows};
use storynet::ml::{train_gbt_with_history, ModelSpec};
use storynet::netfeat::FEATURE_NAMES;

use super::{csv_bytes, fmt, read_corpus, read_matrix, tagged};
use crate::cli::LearnArgs;
use crate::error::{CliError, CliResult, Classify};
use crate::svg::heatmap;
use crate::Ctx;

const CLASS_NAMES: [&str; 3] = ["low", "mid", "high"];

/// Labelled design matrix joined on story id.
pub struct Design {
    pub story_ids: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub names: Vec<String>,
}

fn apply_overrides(ctx: &mut Ctx, args: &LearnArgs) -> CliResult<()> {
    let cfg = &mut ctx.config;
    if let Some(s) = args.scheme {
        cfg.labels.scheme = s;
    }
    if let Some(m) = args.label_mode {
        cfg.labels.mode = m;
    }
    if let Some(kind) = &args.model {
        if cfg.model.name() != kind {
            cfg.model = match kind.as_str() {
                "gbt" => ModelSpec::Gbt(Default::default()),
                "decision_tree" => ModelSpec::DecisionTree(Default::default()),
                "random_forest" => ModelSpec::RandomForest(Default::default()),
                other => {
                    return Err(CliError::input(format!(
                        "unknown model `{other}` (expected gbt, decision_tree or random_forest)"
                    )))
                }
            };
        }
    }
    if let Some(seed) = args.seed {
        cfg.cv.seed = seed;
        match &mut cfg.model {
            ModelSpec::Gbt(p) => p.seed = seed,
            ModelSpec::RandomForest(p) => p.seed = seed,
            ModelSpec::DecisionTree(_) => {}
        }
    }
    if let Some(k) = args.folds {
        cfg.cv.folds = k;
    }
    ctx.config.validate()
}

pub fn design(ctx: &mut Ctx, args: &LearnArgs) -> CliResult<Design> {
    apply_overrides(ctx, args)?;
    let m = read_matrix(ctx, &args.features)?;
    let corpus = read_corpus(ctx, &args.corpus)?;
    let labels = &ctx.config.labels;
    let corpus = if labels.required_raters > 0 { filter_complete(&corpus, labels.required_raters) } else { corpus };
    let rows = labeled_rows(&corpus, labels.scheme, labels.mode).input_err("labelling ratings")?;
    let mut d = Design { story_ids: Vec::new(), x: Vec::new(), y: Vec::new(), names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect() };
    let mut missing = Vec::new();
    for r in rows {
        match m.row_of(&r.story_id) {
            Some(x) => {
                d.x.push(x.to_vec());
                d.y.push(r.class.index());
                d.story_ids.push(r.story_id);
            }
            None => {
                if missing.last() != Some(&r.story_id) {
                    missing.push(r.story_id);
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(CliError::input(format!("rated stories without features: {}", missing.join(", "))));
    }
    if d.y.is_empty() {
        return Err(CliError::input("no labelled rows: the corpus has no ratings"));
    }
    Ok(d)
}

pub fn train(ctx: &mut Ctx, args: &LearnArgs) -> CliResult<()> {
    let d = design(ctx, args)?;
    let tag = args.tag.as_deref();
    let spec = ctx.config.model;
    let model = match &spec {
        ModelSpec::Gbt(p) => {
            let (model, history) = train_gbt_with_history(&d.x, &d.y, &d.names, p).input_err("training")?;
            ctx.write(
                &tagged("models", "loss_history", tag, "csv"),
                csv_bytes(&["round", "train_log_loss"], history.iter().enumerate().map(|(i, l)| vec![i.to_string(), fmt(*l)]))?,
            )?;
            storynet::ml::Model::Gbt(model)
        }
        other => other.fit(&d.x, &d.y, &d.names).input_err("training")?,
    };
    ctx.write(&tagged("models", "model", tag, "json"), model.to_json() + "\n")?;
    let mut counts = [0usize; 3];
    for &k in &d.y {
        counts[k] += 1;
    }
    println!(
        "trained {} on {} rows (classes: {} low, {} mid, {} high)",
        spec.name(),
        d.y.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    Ok(())
}

pub fn evaluate(ctx: &mut Ctx, args: &LearnArgs) -> CliResult<()> {
    let d = design(ctx, args)?;
    let tag = args.tag.as_deref();
    let spec = ctx.config.model;
    let cv = &ctx.config.cv;
    let report =
        storynet::ml::cross_validate(&spec, &d.x, &d.y, &d.names, cv.folds, cv.seed).input_err("cross-validation")?;
    let title = format!(
        "Classification report, {} labels{}",
        match ctx.config.labels.scheme {
            storynet::corpus::RatingScheme::HumanScale => "human-scale",
            storynet::corpus::RatingScheme::CompressedTop => "compressed-top",
        },
        tag.map(|t| format!(" ({t})")).unwrap_or_default()
    );
    ctx.write(&tagged("reports", "classification", tag, "md"), report.to_markdown(&title))?;
    ctx.write(
        &tagged("reports", "cv", tag, "json"),
        serde_json::to_string_pretty(&report).internal_err("cv report")? + "\n",
    )?;
    ctx.write(&tagged("reports", "confusion", tag, "csv"), report.confusion_csv())?;
    let m: Vec<Vec<f64>> = report.confusion.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
    let labels: Vec<String> = CLASS_NAMES.iter().map(|s| s.to_string()).collect();
    ctx.write(
        &tagged("figures", "confusion", tag, "svg"),
        heatmap("Pooled confusion matrix", "true class", "predicted class", &labels, &m),
    )?;
    println!(
        "{}-fold accuracy {:.3} ± {:.3}, roc_auc {:.3} ± {:.3}",
        report.k, report.accuracy.mean, report.accuracy.std, report.roc_auc.mean, report.roc_auc.std
    );
    Ok(())
}
