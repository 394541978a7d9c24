use std::fmt::Write as _;

use storynet::explain::{beeswarm_export, shap_matrix, write_shap_csv, ImportanceSummary, Tercile};
use storynet::ml::Model;

use super::{csv_bytes, fmt, read_matrix, tagged};
use crate::cli::ExplainArgs;
use crate::error::{CliError, CliResult, Classify};
use crate::svg::{beeswarm, grouped_bars, Series};
use crate::Ctx;

pub fn run(ctx: &mut Ctx, args: &ExplainArgs) -> CliResult<()> {
    ctx.record_input(&args.model)?;
    let text = std::fs::read_to_string(&args.model).input_err(format!("reading {}", args.model.display()))?;
    let model = Model::from_json(&text).input_err(format!("parsing model {}", args.model.display()))?;
    let gbt = model
        .as_gbt()
        .ok_or_else(|| CliError::input("explanations need a gradient-boosted model (kind = \"gbt\")"))?;
    let m = read_matrix(ctx, &args.features)?;
    let names: Vec<String> = storynet::netfeat::FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    if gbt.feature_names != names {
        return Err(CliError::input(format!(
            "model features {:?} do not match the feature matrix columns",
            gbt.feature_names
        )));
    }
    if m.is_empty() {
        return Err(CliError::input("feature matrix has no rows"));
    }
    let x: Vec<Vec<f64>> = m.rows.iter().map(|r| r.to_vec()).collect();
    let shap = shap_matrix(gbt, &x).input_err("computing SHAP values")?;
    let tag = args.tag.as_deref();

    let mut buf = Vec::new();
    write_shap_csv(&mut buf, &m.story_ids, &x, &shap, &names).internal_err("shap csv")?;
    ctx.write(&tagged("reports", "shap_values", tag, "csv"), buf)?;
    let summary = ImportanceSummary::from_shap(&shap, &names);
    let mut buf = Vec::new();
    summary.write_csv(&mut buf).internal_err("importance csv")?;
    ctx.write(&tagged("reports", "shap_importance", tag, "csv"), buf)?;

    let series_names = ["class 0 (low)", "class 1 (mid)", "class 2 (high)"];
    let ordered: Vec<String> = summary.ranking.iter().map(|&f| names[f].clone()).collect();
    let values: Vec<Vec<f64>> =
        (0..3).map(|k| summary.ranking.iter().map(|&f| summary.mean_abs[k][f]).collect()).collect();
    let series: Vec<Series> =
        (0..3).map(|k| Series { name: series_names[k], values: &values[k], errors: None }).collect();
    ctx.write(
        &tagged("figures", "shap_importance", tag, "svg"),
        grouped_bars("Mean |SHAP| per class", "mean |SHAP value|", &ordered, &series),
    )?;

    let mut md = String::new();
    let _ = writeln!(md, "## Feature importance{}\n", tag.map(|t| format!(" ({t})")).unwrap_or_default());
    let _ = writeln!(md, "Mean absolute SHAP value on the margin scale, {} stories.\n", m.len());
    let _ = writeln!(md, "| Feature | Class 0 | Class 1 | Class 2 |");
    let _ = writeln!(md, "|---|---|---|---|");
    for &f in &summary.ranking {
        let _ = writeln!(
            md,
            "| {} | {:.4} | {:.4} | {:.4} |",
            names[f], summary.mean_abs[0][f], summary.mean_abs[1][f], summary.mean_abs[2][f]
        );
    }
    for k in 0..3 {
        let _ = writeln!(md, "\nTop features for class {k}: {}.", summary.top(k, 5).join(", "));
        let rows = beeswarm_export(&x, &shap, k, &names);
        ctx.write(
            &tagged("reports", &format!("beeswarm_class{k}"), tag, "csv"),
            csv_bytes(
                &["feature", "sample_id", "shap_value", "feature_value", "tercile"],
                rows.iter().map(|r| {
                    vec![
                        r.feature.clone(),
                        m.story_ids[r.sample].clone(),
                        fmt(r.shap_value),
                        fmt(r.feature_value),
                        r.tercile.as_str().to_string(),
                    ]
                }),
            )?,
        )?;
        let ranking = summary.class_ranking(k);
        let features: Vec<String> = ranking.iter().map(|&f| names[f].clone()).collect();
        let points: Vec<Vec<(f64, usize)>> = ranking
            .iter()
            .map(|&f| {
                rows.iter()
                    .filter(|r| r.feature == names[f])
                    .map(|r| (r.shap_value, tercile_index(r.tercile)))
                    .collect()
            })
            .collect();
        ctx.write(
            &tagged("figures", &format!("beeswarm_class{k}"), tag, "svg"),
            beeswarm(&format!("SHAP values, class {k}"), &features, &points),
        )?;
    }
    ctx.write(&tagged("reports", "importance", tag, "md"), md)?;
    println!("explained {} stories; top overall: {}", m.len(), ordered[..3.min(ordered.len())].join(", "));
    Ok(())
}

fn tercile_index(t: Tercile) -> usize {
    match t {
        Tercile::Weak => 0,
        Tercile::Moderate => 1,
        Tercile::Strong => 2,
    }
}
