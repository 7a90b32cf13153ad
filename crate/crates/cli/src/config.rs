//! One TOML config file covering every tunable; command-line flags override
//! file values, file values override defaults.

use anyhow::{Context, Result};
use sentrack_core::features::Constants;
use sentrack_core::generate::GenConfig;
use sentrack_core::lattice::TrackerConfig;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub tracker: TrackerTable,
    pub constants: Constants,
    pub generation: GenerationTable,
    pub retrieval: RetrievalTable,
}

/// `[tracker]`. The pipeline default keeps 8 detections per frame — enough
/// for the synthetic two-event clips (6 participants plus noise) — while
/// the library default of 5 mirrors the usual detector regime.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerTable {
    pub top_k: usize,
    pub mu_f: f64,
    pub s_f: f64,
    pub mu_g: f64,
    pub s_g: f64,
    pub distinct_detections: bool,
}

impl Default for TrackerTable {
    fn default() -> Self {
        let base = TrackerConfig::default();
        TrackerTable {
            top_k: 8,
            mu_f: base.mu_f,
            s_f: base.s_f,
            mu_g: base.mu_g,
            s_g: base.s_g,
            distinct_detections: base.distinct_detections,
        }
    }
}

/// `[generation]`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationTable {
    pub beam_width: usize,
    pub contraction_threshold: f64,
    pub max_words: usize,
}

impl Default for GenerationTable {
    fn default() -> Self {
        let base = GenConfig::default();
        GenerationTable {
            beam_width: base.beam_width,
            contraction_threshold: base.contraction_threshold,
            max_words: base.max_words,
        }
    }
}

/// `[retrieval]`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RetrievalTable {
    pub folds: usize,
    pub top: usize,
    /// Worker threads; 0 means available parallelism.
    pub jobs: usize,
}

impl Default for RetrievalTable {
    fn default() -> Self {
        RetrievalTable {
            folds: 4,
            top: 3,
            jobs: 0,
        }
    }
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        match path {
            None => Ok(FileConfig::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("in {}", path.display()))
            }
        }
    }

    pub fn tracker_config(&self) -> TrackerConfig {
        TrackerConfig {
            top_k: self.tracker.top_k,
            mu_f: self.tracker.mu_f,
            s_f: self.tracker.s_f,
            mu_g: self.tracker.mu_g,
            s_g: self.tracker.s_g,
            distinct_detections: self.tracker.distinct_detections,
            constants: self.constants.clone(),
        }
    }

    pub fn gen_config(&self) -> GenConfig {
        GenConfig {
            beam_width: self.generation.beam_width,
            contraction_threshold: self.generation.contraction_threshold,
            max_words: self.generation.max_words,
            tracker: self.tracker_config(),
        }
    }
}
