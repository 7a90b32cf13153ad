//! Corpus-level evaluation: the full sentence × clip score matrix,
//! retrieval metrics with cross-validated depiction accuracy, and a
//! generation pass judged against scene ground truth.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use sentrack_core::clip::Clip;
use sentrack_core::generate::{generate, GenConfig};
use sentrack_core::lattice::{sentence_track, EngineError, TrackerConfig};
use sentrack_core::lexicon::Lexicon;
use sentrack_core::linguistics::Grammar;
use sentrack_core::retrieve::{self, Judgment, RankedList, ScoredPair};

use crate::io::SentenceEntry;
use crate::pool;
use crate::sim::ClipTruth;
use crate::truth::sentence_is_true;

/// Score every sentence against every clip in parallel and rank each
/// sentence's list, keyed by sentence id so lists join against judgments.
/// Clips with an empty frame score τ = −∞ rather than failing the run,
/// mirroring [`retrieve::score_corpus`].
pub fn score_matrix(
    corpus: &[Clip],
    sentences: &[SentenceEntry],
    lexicon: &Lexicon,
    tracker: &TrackerConfig,
    jobs: usize,
) -> Result<Vec<RankedList>> {
    if corpus.is_empty() || sentences.is_empty() {
        bail!("need at least one clip and one sentence to score");
    }
    let total = corpus.len() * sentences.len();
    let workers = pool::effective_jobs(jobs, total);
    let scores = pool::run_indexed(total, workers, |i| {
        let sentence = &sentences[i / corpus.len()];
        let clip = &corpus[i % corpus.len()];
        match sentence_track(clip, &sentence.text, lexicon, tracker) {
            Ok(result) => Ok(result.tau),
            Err(EngineError::EmptyFrame { .. }) | Err(EngineError::NoFrames) => {
                Ok(f64::NEG_INFINITY)
            }
            Err(other) => Err(other),
        }
    });

    let mut scores = scores.into_iter();
    let mut lists = Vec::with_capacity(sentences.len());
    for sentence in sentences {
        let mut entries = Vec::with_capacity(corpus.len());
        for clip in corpus {
            let tau = scores
                .next()
                .expect("one score per pair")
                .with_context(|| format!("scoring `{}` on clip {}", sentence.id, clip.id))?;
            entries.push((clip.id.clone(), tau));
        }
        retrieve::rank(&mut entries);
        lists.push(RankedList {
            sentence: sentence.id.clone(),
            entries,
        });
    }
    Ok(lists)
}

/// Retrieval metrics over a scored matrix.
#[derive(Debug, Clone, Serialize)]
pub struct RetrievalSummary {
    pub top1: f64,
    pub top3: f64,
    /// Majority-class accuracy of the judgments; the floor any useful
    /// depiction classifier must beat.
    pub base_rate: f64,
    pub cv_accuracy: f64,
    pub cv_folds: usize,
    pub cv_folds_skipped: usize,
}

/// Top-k hit rates plus cross-validated depiction accuracy.
pub fn summarize(
    lists: &[RankedList],
    judgments: &[Judgment],
    folds: usize,
    cv_seed: u64,
) -> Result<RetrievalSummary> {
    let top1 = retrieve::evaluate_topk(lists, judgments, 1)?;
    let top3 = retrieve::evaluate_topk(lists, judgments, 3)?;
    let pairs = joined_pairs(lists, judgments)?;
    let depicted = pairs.iter().filter(|p| p.depicted).count() as f64;
    let base = depicted / pairs.len() as f64;
    let cv = retrieve::threshold_cv(&pairs, folds, cv_seed)?;
    Ok(RetrievalSummary {
        top1,
        top3,
        base_rate: base.max(1.0 - base),
        cv_accuracy: cv.mean_accuracy,
        cv_folds: cv.folds.len() - cv.skipped,
        cv_folds_skipped: cv.skipped,
    })
}

/// Join ranked lists with judgments into the scored pairs CV runs on.
pub fn joined_pairs(lists: &[RankedList], judgments: &[Judgment]) -> Result<Vec<ScoredPair>> {
    let truth: BTreeMap<(&str, &str), bool> = judgments
        .iter()
        .map(|j| ((j.sentence_id.as_str(), j.clip_id.as_str()), j.depicted))
        .collect();
    let mut pairs = Vec::new();
    for list in lists {
        for (clip_id, tau) in &list.entries {
            let Some(&depicted) = truth.get(&(list.sentence.as_str(), clip_id.as_str())) else {
                bail!(
                    "no judgment for clip `{clip_id}`, sentence `{}`",
                    list.sentence
                );
            };
            pairs.push(ScoredPair {
                clip_id: clip_id.clone(),
                sentence_id: list.sentence.clone(),
                tau: *tau,
                depicted,
            });
        }
    }
    Ok(pairs)
}

/// One clip's generation result, judged against the scene ground truth.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratedDoc {
    pub clip_id: String,
    /// `None` when no sentence scores finitely on the clip.
    pub sentence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub truthful: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationOutcome {
    /// Fraction of clips whose generated sentence is true of the scene.
    pub truth_rate: f64,
    pub results: Vec<GeneratedDoc>,
}

/// Generate a description per clip (in parallel) and judge each against
/// its scene. A clip with no generable sentence counts as untruthful.
pub fn generation_pass(
    corpus: &[Clip],
    truths: &BTreeMap<String, ClipTruth>,
    grammar: &Grammar,
    lexicon: &Lexicon,
    config: &GenConfig,
    jobs: usize,
) -> Result<GenerationOutcome> {
    if corpus.is_empty() {
        bail!("need at least one clip to describe");
    }
    let workers = pool::effective_jobs(jobs, corpus.len());
    let generated = pool::run_indexed(corpus.len(), workers, |i| {
        generate(&corpus[i], grammar, lexicon, config)
    });

    let mut results = Vec::with_capacity(corpus.len());
    let mut truthful_count = 0usize;
    for (clip, outcome) in corpus.iter().zip(generated) {
        let best = outcome.with_context(|| format!("describing clip {}", clip.id))?;
        let Some(truth) = truths.get(&clip.id) else {
            bail!("no ground-truth sidecar for clip {}", clip.id);
        };
        let (sentence, tau, truthful) = match best {
            Some(g) => {
                let ok = sentence_is_true(&g.sentence, &truth.scene, lexicon)?;
                (Some(g.sentence), Some(g.tau), ok)
            }
            None => (None, None, false),
        };
        truthful_count += truthful as usize;
        results.push(GeneratedDoc {
            clip_id: clip.id.clone(),
            sentence,
            tau,
            truthful,
        });
    }
    Ok(GenerationOutcome {
        truth_rate: truthful_count as f64 / corpus.len() as f64,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_clip, Color, EventSpec, NoiseModel, ScenarioSpec, Speed};

    fn entry(id: &str, text: &str) -> SentenceEntry {
        SentenceEntry {
            id: id.into(),
            text: text.into(),
        }
    }

    #[test]
    fn matrix_scores_follow_scene_content() {
        let noise = NoiseModel::default();
        let (approach, _) = simulate_clip(
            &ScenarioSpec::new(
                "ap",
                vec![EventSpec::approach(
                    "backpack",
                    Some(Color::Red),
                    "trashcan",
                    Speed::Slow,
                )],
                0,
            ),
            &noise,
            3,
        )
        .unwrap();
        let (pick, _) = simulate_clip(
            &ScenarioSpec::new("pk", vec![EventSpec::pick_up(None, Speed::Slow)], 0),
            &noise,
            4,
        )
        .unwrap();
        let sentences = vec![
            entry("1a", "The backpack approached the trash can."),
            entry("6a", "The person picked up the backpack."),
        ];
        let lexicon = Lexicon::builtin();
        let tracker = TrackerConfig {
            top_k: 8,
            ..TrackerConfig::default()
        };
        let lists =
            score_matrix(&[approach, pick], &sentences, &lexicon, &tracker, 2).unwrap();

        let tau = |sid: &str, cid: &str| -> f64 {
            let list = lists.iter().find(|l| l.sentence == sid).unwrap();
            list.entries.iter().find(|(c, _)| c == cid).unwrap().1
        };
        assert!(tau("1a", "ap").is_finite());
        assert!(tau("6a", "pk").is_finite());
        // No person in the approach scene, no trash can motion in the pick-up.
        assert_eq!(tau("6a", "ap"), f64::NEG_INFINITY);
        assert_eq!(tau("1a", "pk"), f64::NEG_INFINITY);
    }

    #[test]
    fn summary_metrics_are_exact_on_a_hand_built_matrix() {
        // Two sentences over four clips; judgments mark one depicting clip
        // for s1 (ranked 2nd) and one for s2 (ranked 1st).
        let lists = vec![
            RankedList {
                sentence: "s1".into(),
                entries: vec![
                    ("c1".into(), 9.0),
                    ("c2".into(), 5.0),
                    ("c3".into(), 1.0),
                    ("c4".into(), f64::NEG_INFINITY),
                ],
            },
            RankedList {
                sentence: "s2".into(),
                entries: vec![
                    ("c3".into(), 7.0),
                    ("c1".into(), f64::NEG_INFINITY),
                    ("c2".into(), f64::NEG_INFINITY),
                    ("c4".into(), f64::NEG_INFINITY),
                ],
            },
        ];
        let mut judgments = Vec::new();
        for (sid, cid) in [("s1", "c2"), ("s2", "c3")] {
            for clip in ["c1", "c2", "c3", "c4"] {
                judgments.push(Judgment {
                    clip_id: clip.into(),
                    sentence_id: sid.into(),
                    depicted: clip == cid,
                });
            }
        }
        let summary = summarize(&lists, &judgments, 2, 11).unwrap();
        assert_eq!(summary.top1, 0.5);
        assert_eq!(summary.top3, 1.0);
        assert_eq!(summary.base_rate, 0.75);
        // The 9.0 non-depicted pair caps what any threshold can do, but CV
        // still evaluates both folds.
        assert!((0.0..=1.0).contains(&summary.cv_accuracy));
        assert_eq!(summary.cv_folds, 2);
    }

    #[test]
    fn separable_scores_cross_validate_perfectly() {
        // Every clip depicts exactly one sentence and depicted pairs score
        // strictly above everything else, so each training fold sees both
        // classes and any mid threshold classifies held-out pairs exactly.
        let clips = ["c1", "c2", "c3", "c4"];
        let depicted_clip = |sid: &str| if sid == "s1" { ["c1", "c2"] } else { ["c3", "c4"] };
        let mut lists = Vec::new();
        let mut judgments = Vec::new();
        for sid in ["s1", "s2"] {
            let mut entries: Vec<(String, f64)> = Vec::new();
            for (i, cid) in clips.iter().enumerate() {
                let depicted = depicted_clip(sid).contains(cid);
                let tau = if depicted { 9.0 - i as f64 } else { 3.0 - i as f64 };
                entries.push((cid.to_string(), tau));
                judgments.push(Judgment {
                    clip_id: cid.to_string(),
                    sentence_id: sid.into(),
                    depicted,
                });
            }
            retrieve::rank(&mut entries);
            lists.push(RankedList {
                sentence: sid.into(),
                entries,
            });
        }
        let summary = summarize(&lists, &judgments, 2, 5).unwrap();
        assert_eq!(summary.top1, 1.0);
        assert_eq!(summary.base_rate, 0.5);
        assert_eq!(summary.cv_accuracy, 1.0);
        assert_eq!(summary.cv_folds_skipped, 0);
    }

    #[test]
    fn missing_judgments_are_an_error() {
        let lists = vec![RankedList {
            sentence: "s1".into(),
            entries: vec![("c1".into(), 1.0)],
        }];
        let err = joined_pairs(&lists, &[]).unwrap_err();
        assert!(err.to_string().contains("no judgment"));
    }
}
