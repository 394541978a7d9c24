use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use storynet::conllu::{load_parsed_story, ConlluError};
use storynet::emotions::{emotion_profile, EmotionLexicon, EmotionProfile};
use storynet::netfeat::{featurize, write_summary_csv, FeatureMatrix, ScalingParams, FEATURE_NAMES};
use storynet::tfmn::{AntonymLexicon, NetworkBuilder, StopList, StoryNetwork};

use super::{csv_bytes, read_corpus, tagged};
use crate::cli::FeaturizeArgs;
use crate::commands::ingest::author;
use crate::error::{CliError, CliResult, Classify};
use crate::Ctx;

struct StoryResult {
    network: StoryNetwork,
    profile: EmotionProfile,
    vector: storynet::netfeat::FeatureVector,
}

pub fn run(ctx: &mut Ctx, args: &FeaturizeArgs) -> CliResult<()> {
    let cfg = &mut ctx.config;
    if let Some(d) = args.max_dist {
        cfg.tfmn.max_tree_distance = d;
    }
    if let Some(m) = args.null_model {
        cfg.emotions.mode = m;
    }
    if let Some(s) = args.null_samples {
        cfg.emotions.samples = s;
    }
    if let Some(s) = args.seed {
        cfg.emotions.seed = s;
    }
    ctx.config.validate()?;

    let corpus = read_corpus(ctx, &args.corpus)?;
    ctx.record_input(&args.lexicon)?;
    let lexicon = EmotionLexicon::load(&args.lexicon).input_err(format!("loading lexicon {}", args.lexicon.display()))?;
    let stoplist = match &args.stoplist {
        Some(p) => {
            ctx.record_input(p)?;
            StopList::load(p).input_err(format!("loading stoplist {}", p.display()))?
        }
        None => StopList::english(),
    };
    let antonyms = match &args.antonyms {
        Some(p) => {
            ctx.record_input(p)?;
            AntonymLexicon::load(p).input_err(format!("loading antonyms {}", p.display()))?
        }
        None => AntonymLexicon::english(),
    };
    if !args.conllu.is_dir() {
        return Err(CliError::input(format!("parse directory {} does not exist", args.conllu.display())));
    }
    let missing: Vec<&str> =
        corpus.iter().filter(|s| !parse_path(&args.conllu, &s.id).is_file()).map(|s| s.id.as_str()).collect();
    if !missing.is_empty() {
        return Err(CliError::input(format!("missing .conllu parses for story ids: {}", missing.join(", "))));
    }
    for s in corpus.iter() {
        ctx.record_input(&parse_path(&args.conllu, &s.id))?;
    }

    let valence = lexicon.valence_map();
    let builder = NetworkBuilder { stoplist: &stoplist, antonyms: &antonyms, valence: &valence, config: ctx.config.tfmn };
    let null = ctx.config.emotions;
    let netcfg = ctx.config.network;
    let results: Vec<CliResult<StoryResult>> = corpus
        .stories()
        .par_iter()
        .map(|story| {
            let parsed = load_parsed_story(&args.conllu, &story.id)
                .map_err(|e: ConlluError| CliError::input(format!("story {}: {e}", story.id)))?;
            let network = builder.build(&parsed);
            let profile = emotion_profile(&network.lemmas, &lexicon, &null.for_story(&story.id));
            let vector = featurize(&story.id, &network.tfmn, &profile, &netcfg)
                .map_err(|e| CliError::internal(format!("story {}: {e}", story.id)))?;
            Ok(StoryResult { network, profile, vector })
        })
        .collect();
    let results: Vec<StoryResult> = results.into_iter().collect::<CliResult<_>>()?;

    let tag = args.tag.as_deref();
    let raw = FeatureMatrix::from_vectors(results.iter().map(|r| r.vector.clone()).collect());
    let stored = match &args.scaling_params {
        Some(p) => {
            ctx.record_input(p)?;
            let text = std::fs::read_to_string(p).input_err(format!("reading {}", p.display()))?;
            let params: ScalingParams = serde_json::from_str(&text).input_err("parsing scaling params")?;
            if params.min.len() != FEATURE_NAMES.len() || params.max.len() != FEATURE_NAMES.len() {
                return Err(CliError::input("scaling params must have 13 columns"));
            }
            Some(params)
        }
        None => None,
    };
    let (scaled, params) = raw.scaled(stored.as_ref());

    let mut buf = Vec::new();
    raw.write_csv(&mut buf).internal_err("raw features")?;
    ctx.write(&tagged("features", "raw", tag, "csv"), buf)?;
    let mut buf = Vec::new();
    scaled.write_csv(&mut buf).internal_err("scaled features")?;
    ctx.write(&tagged("features", "scaled", tag, "csv"), buf)?;
    ctx.write(
        &tagged("features", "scaling", tag, "json"),
        serde_json::to_string_pretty(&params).internal_err("scaling params")? + "\n",
    )?;
    if !raw.is_empty() {
        let mut buf = Vec::new();
        write_summary_csv(&raw, &mut buf).internal_err("summary")?;
        ctx.write(&tagged("features", "summary_raw", tag, "csv"), buf)?;
        let mut buf = Vec::new();
        write_summary_csv(&scaled, &mut buf).internal_err("summary")?;
        ctx.write(&tagged("features", "summary_scaled", tag, "csv"), buf)?;
        ctx.write(&tagged("reports", "summary", tag, "md"), summary_markdown(&scaled, tag))?;
    }
    ctx.write(
        &tagged("features", "word_counts", tag, "csv"),
        csv_bytes(
            &["story_id", "author", "word_count"],
            corpus.iter().map(|s| vec![s.id.clone(), author(s.author_kind).into(), s.word_count().to_string()]),
        )?,
    )?;
    ctx.write(
        &tagged("features", "diagnostics", tag, "csv"),
        csv_bytes(
            &[
                "story_id",
                "sentences",
                "content_tokens",
                "nodes",
                "edges",
                "isolated_nodes",
                "negations_resolved",
                "negations_unresolved",
                "lexicon_tokens",
                "low_coverage",
            ],
            results.iter().map(|r| {
                let d = &r.network.diagnostics;
                vec![
                    r.network.story_id.clone(),
                    d.sentences.to_string(),
                    d.content_tokens.to_string(),
                    r.network.tfmn.node_count().to_string(),
                    r.network.tfmn.edge_count().to_string(),
                    d.isolated_nodes.to_string(),
                    d.negations_resolved.to_string(),
                    d.negations_unresolved.join(" "),
                    r.profile.n_lexicon_tokens.to_string(),
                    r.profile.low_coverage.to_string(),
                ]
            }),
        )?,
    )?;
    let dir = match tag {
        Some(t) => format!("features/tfmn_{t}"),
        None => "features/tfmn".to_string(),
    };
    for r in &results {
        let mut edges = Vec::new();
        r.network.tfmn.write_edge_list(&mut edges).internal_err("edge list")?;
        ctx.write(&format!("{dir}/{}.edges.tsv", r.network.story_id), edges)?;
        let mut nodes = Vec::new();
        r.network.tfmn.write_node_table(&mut nodes).internal_err("node table")?;
        ctx.write(&format!("{dir}/{}.nodes.tsv", r.network.story_id), nodes)?;
    }
    let low = results.iter().filter(|r| r.profile.low_coverage).count();
    println!("featurized {} stories ({low} low-coverage)", results.len());
    Ok(())
}

fn parse_path(dir: &Path, id: &str) -> std::path::PathBuf {
    dir.join(format!("{id}.conllu"))
}

fn summary_markdown(m: &FeatureMatrix, tag: Option<&str>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "## Summary statistics of the scaled features{}\n", tag.map(|t| format!(" ({t})")).unwrap_or_default());
    let _ = writeln!(s, "| Feature | Mean | Std | 25% | 50% | 75% |");
    let _ = writeln!(s, "|---|---|---|---|---|---|");
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        let c = storynet::netfeat::summarize_column(&m.column(j));
        let _ = writeln!(s, "| {name} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} |", c.mean, c.std, c.q25, c.q50, c.q75);
    }
    s
}
