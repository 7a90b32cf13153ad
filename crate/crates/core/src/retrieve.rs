//! Sentential video retrieval: score a sentence against a corpus, rank
//! clips, and evaluate binary depiction with cross-validated thresholds.

use crate::clip::Clip;
use crate::lattice::{sentence_track, EngineError, TrackerConfig};
use crate::lexicon::Lexicon;
use crate::rng::SplitMix64;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

/// Ground truth for one (clip, sentence) pair.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Judgment {
    pub clip_id: String,
    pub sentence_id: String,
    pub depicted: bool,
}

/// Clips ranked for one sentence, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    /// The key judgments are joined on (sentence text or id, caller's choice).
    pub sentence: String,
    /// `(clip_id, τ)`, τ descending, ties by clip id.
    pub entries: Vec<(String, f64)>,
}

/// One scored (clip, sentence) pair with its ground truth, the unit
/// cross-validation operates on.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub clip_id: String,
    pub sentence_id: String,
    pub tau: f64,
    pub depicted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvFold {
    pub test_clips: Vec<String>,
    /// `None` when the fold was skipped as degenerate.
    pub threshold: Option<f64>,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Mean held-out accuracy over evaluated folds.
    pub mean_accuracy: f64,
    pub folds: Vec<CvFold>,
    pub skipped: usize,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RetrieveError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no ranked lists to evaluate")]
    NoLists,
    #[error("top-k requires k ≥ 1")]
    BadK,
    #[error("no judgment for clip `{clip_id}` and sentence `{sentence}`")]
    MissingJudgment { clip_id: String, sentence: String },
    #[error("cross-validation requires at least 2 folds and as many clips")]
    BadFolds,
    #[error("every fold was degenerate (single-class training data)")]
    NoValidFolds,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Score one sentence against every clip and rank.
///
/// Clips on which no track can exist at all (an empty frame) rank as
/// unsatisfiable (τ = −∞) rather than failing the whole corpus.
pub fn score_corpus(
    corpus: &[Clip],
    sentence: &str,
    lexicon: &Lexicon,
    config: &TrackerConfig,
) -> Result<RankedList, RetrieveError> {
    if corpus.is_empty() {
        return Err(RetrieveError::EmptyCorpus);
    }
    let mut entries = Vec::with_capacity(corpus.len());
    for clip in corpus {
        let tau = match sentence_track(clip, sentence, lexicon, config) {
            Ok(result) => result.tau,
            Err(EngineError::EmptyFrame { .. }) | Err(EngineError::NoFrames) => {
                f64::NEG_INFINITY
            }
            Err(other) => return Err(other.into()),
        };
        entries.push((clip.id.clone(), tau));
    }
    rank(&mut entries);
    Ok(RankedList {
        sentence: String::from(sentence),
        entries,
    })
}

/// Sort ranking entries: τ descending, ties by clip id ascending.
pub fn rank(entries: &mut [(String, f64)]) {
    entries.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are never NaN")
            .then_with(|| a.0.cmp(&b.0))
    });
}

/// Fraction of lists whose first `k` entries contain a depicting clip.
pub fn evaluate_topk(
    lists: &[RankedList],
    judgments: &[Judgment],
    k: usize,
) -> Result<f64, RetrieveError> {
    if lists.is_empty() {
        return Err(RetrieveError::NoLists);
    }
    if k == 0 {
        return Err(RetrieveError::BadK);
    }
    let truth: BTreeMap<(&str, &str), bool> = judgments
        .iter()
        .map(|j| ((j.sentence_id.as_str(), j.clip_id.as_str()), j.depicted))
        .collect();
    let mut hits = 0usize;
    for list in lists {
        let mut hit = false;
        for (clip_id, _) in list.entries.iter().take(k) {
            let depicted = truth
                .get(&(list.sentence.as_str(), clip_id.as_str()))
                .copied()
                .ok_or_else(|| RetrieveError::MissingJudgment {
                    clip_id: clip_id.clone(),
                    sentence: list.sentence.clone(),
                })?;
            if depicted {
                hit = true;
            }
        }
        if hit {
            hits += 1;
        }
    }
    Ok(hits as f64 / lists.len() as f64)
}

/// Binary depiction accuracy by per-fold threshold selection.
///
/// Clips are shuffled deterministically from `seed` and dealt round-robin
/// into `folds` folds. For each fold, a threshold over the other folds'
/// scores is chosen by scanning −∞, the midpoints of adjacent distinct
/// finite training scores, and +∞, maximizing training accuracy (lowest
/// threshold on ties); a pair is predicted depicted when `τ > threshold`.
/// Folds whose training pairs are single-class are skipped.
pub fn threshold_cv(
    pairs: &[ScoredPair],
    folds: usize,
    seed: u64,
) -> Result<CvReport, RetrieveError> {
    let clip_ids: BTreeSet<&str> = pairs.iter().map(|p| p.clip_id.as_str()).collect();
    let mut clip_ids: Vec<&str> = clip_ids.into_iter().collect();
    if folds < 2 || clip_ids.len() < folds {
        return Err(RetrieveError::BadFolds);
    }
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut clip_ids);
    let fold_of: BTreeMap<&str, usize> = clip_ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i % folds))
        .collect();

    let mut report_folds = Vec::with_capacity(folds);
    let mut accuracy_sum = 0.0;
    let mut evaluated = 0usize;
    for fold in 0..folds {
        let train: Vec<&ScoredPair> = pairs
            .iter()
            .filter(|p| fold_of[p.clip_id.as_str()] != fold)
            .collect();
        let test: Vec<&ScoredPair> = pairs
            .iter()
            .filter(|p| fold_of[p.clip_id.as_str()] == fold)
            .collect();
        let mut test_clips: Vec<String> = clip_ids
            .iter()
            .filter(|&&id| fold_of[id] == fold)
            .map(|&id| String::from(id))
            .collect();
        test_clips.sort();

        let degenerate = test.is_empty()
            || train.iter().all(|p| p.depicted)
            || train.iter().all(|p| !p.depicted);
        if degenerate {
            report_folds.push(CvFold {
                test_clips,
                threshold: None,
                accuracy: None,
            });
            continue;
        }

        let threshold = best_threshold(&train);
        let correct = test
            .iter()
            .filter(|p| (p.tau > threshold) == p.depicted)
            .count();
        let accuracy = correct as f64 / test.len() as f64;
        accuracy_sum += accuracy;
        evaluated += 1;
        report_folds.push(CvFold {
            test_clips,
            threshold: Some(threshold),
            accuracy: Some(accuracy),
        });
    }

    if evaluated == 0 {
        return Err(RetrieveError::NoValidFolds);
    }
    Ok(CvReport {
        mean_accuracy: accuracy_sum / evaluated as f64,
        skipped: folds - evaluated,
        folds: report_folds,
    })
}

fn best_threshold(train: &[&ScoredPair]) -> f64 {
    let mut scores: Vec<f64> = train
        .iter()
        .map(|p| p.tau)
        .filter(|t| t.is_finite())
        .collect();
    scores.sort_by(|a, b| a.partial_cmp(b).expect("scores are never NaN"));
    scores.dedup();
    let mut candidates = Vec::with_capacity(scores.len() + 1);
    candidates.push(f64::NEG_INFINITY);
    for pair in scores.windows(2) {
        candidates.push((pair[0] + pair[1]) / 2.0);
    }
    candidates.push(f64::INFINITY);

    let mut best = (f64::NEG_INFINITY, 0usize);
    for &threshold in &candidates {
        let correct = train
            .iter()
            .filter(|p| (p.tau > threshold) == p.depicted)
            .count();
        if correct > best.1 {
            best = (threshold, correct);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;

    fn pair(clip: &str, tau: f64, depicted: bool) -> ScoredPair {
        ScoredPair {
            clip_id: clip.to_string(),
            sentence_id: "s".to_string(),
            tau,
            depicted,
        }
    }

    #[test]
    fn ranking_sorts_by_score_then_id() {
        let mut entries = vec![
            ("c3".to_string(), -2.0),
            ("c1".to_string(), f64::NEG_INFINITY),
            ("c2".to_string(), -2.0),
            ("c4".to_string(), -0.5),
        ];
        rank(&mut entries);
        let ids: Vec<&str> = entries.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, ["c4", "c2", "c3", "c1"]);
    }

    #[test]
    fn ranking_is_invariant_under_monotone_transforms() {
        let mut entries = vec![
            ("a".to_string(), -3.25),
            ("b".to_string(), f64::NEG_INFINITY),
            ("c".to_string(), -0.125),
            ("d".to_string(), -11.0),
        ];
        rank(&mut entries);
        let mut transformed: Vec<(String, f64)> = entries
            .iter()
            .map(|(id, tau)| (id.clone(), crate::math::exp(*tau)))
            .collect();
        transformed.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap()
                .then_with(|| a.0.cmp(&b.0))
        });
        let order: Vec<&str> = entries.iter().map(|(id, _)| id.as_str()).collect();
        let order_exp: Vec<&str> = transformed.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(order, order_exp);
    }

    #[test]
    fn topk_counts_hits_and_requires_judgments() {
        let lists = vec![
            RankedList {
                sentence: "s1".to_string(),
                entries: vec![("c1".to_string(), -1.0), ("c2".to_string(), -2.0)],
            },
            RankedList {
                sentence: "s2".to_string(),
                entries: vec![("c1".to_string(), -1.0), ("c2".to_string(), -2.0)],
            },
        ];
        let judge = |s: &str, c: &str, d: bool| Judgment {
            clip_id: c.to_string(),
            sentence_id: s.to_string(),
            depicted: d,
        };
        let judgments = vec![
            judge("s1", "c1", true),
            judge("s1", "c2", false),
            judge("s2", "c1", false),
            judge("s2", "c2", true),
        ];
        assert_eq!(evaluate_topk(&lists, &judgments, 1).unwrap(), 0.5);
        assert_eq!(evaluate_topk(&lists, &judgments, 2).unwrap(), 1.0);

        let err = evaluate_topk(&lists, &judgments[..3], 2).unwrap_err();
        assert!(matches!(err, RetrieveError::MissingJudgment { .. }));
    }

    #[test]
    fn separable_scores_reach_full_accuracy() {
        let mut pairs = Vec::new();
        for i in 0..4 {
            pairs.push(pair(&format!("dep{i}"), -1.0 - 0.01 * i as f64, true));
            pairs.push(pair(&format!("non{i}"), -9.0 - 0.01 * i as f64, false));
        }
        let report = threshold_cv(&pairs, 4, 7).unwrap();
        assert_eq!(report.skipped, 0);
        assert_eq!(report.mean_accuracy, 1.0);
        for fold in &report.folds {
            let t = fold.threshold.unwrap();
            assert!((-9.0..=-1.03).contains(&t), "threshold {t}");
        }
    }

    #[test]
    fn identical_scores_fall_back_to_majority() {
        // Two judged sentences per clip, one of each class, so every fold
        // and every training split is exactly half depicted. With all scores
        // equal the only achievable accuracy is the class rate.
        let mut pairs = Vec::new();
        for i in 0..8 {
            let clip = format!("c{i}");
            let mut dep = pair(&clip, -2.0, true);
            dep.sentence_id = "s-pos".to_string();
            let mut non = pair(&clip, -2.0, false);
            non.sentence_id = "s-neg".to_string();
            pairs.push(dep);
            pairs.push(non);
        }
        let report = threshold_cv(&pairs, 4, 11).unwrap();
        assert_eq!(report.mean_accuracy, 0.5);
    }

    #[test]
    fn cv_is_deterministic_and_rejects_bad_folds() {
        let mut pairs = Vec::new();
        for i in 0..8 {
            pairs.push(pair(&format!("c{i}"), -(i as f64), i % 2 == 0));
        }
        let a = threshold_cv(&pairs, 4, 42).unwrap();
        let b = threshold_cv(&pairs, 4, 42).unwrap();
        assert_eq!(a, b);

        assert_eq!(
            threshold_cv(&pairs, 1, 42).unwrap_err(),
            RetrieveError::BadFolds
        );
        assert_eq!(
            threshold_cv(&pairs, 9, 42).unwrap_err(),
            RetrieveError::BadFolds
        );
    }

    #[test]
    fn all_one_class_training_is_degenerate() {
        let pairs: Vec<ScoredPair> = (0..8)
            .map(|i| pair(&format!("c{i}"), -1.0, true))
            .collect();
        assert_eq!(
            threshold_cv(&pairs, 4, 3).unwrap_err(),
            RetrieveError::NoValidFolds
        );
    }

    #[test]
    fn infinite_scores_rank_below_finite() {
        let mut entries = vec![
            ("x".to_string(), f64::NEG_INFINITY),
            ("y".to_string(), -100.0),
        ];
        rank(&mut entries);
        assert_eq!(entries[0].0, "y");
    }
}
