//! Run configuration: every knob that can change an output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use storynet::corpus::{LabelMode, RatingScheme};
use storynet::emotions::NullModelConfig;
use storynet::ml::ModelSpec;
use storynet::netfeat::NetFeatConfig;
use storynet::rater::{PromptTemplates, RaterConfig};
use storynet::tfmn::TfmnConfig;

use crate::error::{CliError, CliResult, Classify};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelConfig {
    pub scheme: RatingScheme,
    pub mode: LabelMode,
    /// Drop stories with fewer distinct raters; 0 keeps every rated story.
    pub required_raters: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig { scheme: RatingScheme::HumanScale, mode: LabelMode::PerRater, required_raters: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub participants: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig { participants: 153 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tfmn: TfmnConfig,
    pub emotions: NullModelConfig,
    pub network: NetFeatConfig,
    pub labels: LabelConfig,
    pub model: ModelSpec,
    pub cv: CvConfig,
    pub rater: RaterConfig,
    pub prompts: PromptTemplates,
    pub generate: GenerateConfig,
}

impl RunConfig {
    /// Load a TOML config, or the config of the last run recorded in a
    /// `manifest.json`.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).input_err(format!("reading config {}", path.display()))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            let m: crate::manifest::Manifest =
                serde_json::from_str(&text).input_err(format!("parsing manifest {}", path.display()))?;
            m.runs.last().map(|r| r.config.clone()).ok_or_else(|| CliError::input("manifest has no runs"))?
        } else {
            toml::from_str(&text).input_err(format!("parsing config {}", path.display()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.tfmn.max_tree_distance == 0 {
            return Err(CliError::input("tfmn.max_tree_distance must be at least 1"));
        }
        self.emotions.validate().map_err(CliError::input)?;
        if self.cv.folds < 2 {
            return Err(CliError::input("cv.folds must be at least 2"));
        }
        self.rater.validate().input_err("rater config")?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_uses_defaults() {
        let cfg: RunConfig = toml::from_str(
            "[tfmn]\nmax_tree_distance = 2\n[model]\nkind = \"random_forest\"\nn_trees = 10\n[labels]\nscheme = \"compressed-top\"\n",
        )
        .unwrap();
        assert_eq!(cfg.tfmn.max_tree_distance, 2);
        assert!(cfg.tfmn.include_isolated);
        assert_eq!(cfg.labels.scheme, RatingScheme::CompressedTop);
        match cfg.model {
            ModelSpec::RandomForest(p) => assert_eq!(p.n_trees, 10),
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.cv.folds, 4);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::default();
        let back: RunConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("[cv]\nfold = 3\n").is_err());
    }
}
