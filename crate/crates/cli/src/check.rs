//! Randomized differential check of the factored decoder against the
//! exhaustive oracle, exposed as the `oracle-check` subcommand.
//!
//! Instances draw small random clips, role-free queries over a fixed
//! recognizer pool, and varied pruning settings; both decoders must
//! agree bit-for-bit on the score and exactly on the decoded tracks and
//! word-state sequences. `inject_bug` negates detection flows in the
//! oracle's copy of the clip — a mutation canary proving the harness can
//! actually see a divergence (flow feeds the coherence term, so any
//! multi-frame instance splits).

use anyhow::{bail, Result};
use sentrack_core::clip::{BBox, Clip, Detection, Frame};
use sentrack_core::lattice::{solve, JointQuery, QueryWord, TrackerConfig};
use sentrack_core::oracle::brute_force_oracle;
use sentrack_core::recognizer::Recognizer;
use sentrack_core::regex::parse_regex;
use sentrack_core::rng::SplitMix64;

const CLASSES: [&str; 4] = ["person", "backpack", "chair", "trashcan"];
const COST_CAP: u128 = 5_000_000;

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_frames: usize,
    pub max_detections: usize,
    pub max_participants: usize,
    pub max_words: usize,
    pub inject_bug: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            trials: 200,
            seed: 0x0c7a_c1e5,
            max_frames: 5,
            max_detections: 3,
            max_participants: 2,
            max_words: 3,
            inject_bug: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub trials: usize,
    pub finite: usize,
    pub unsatisfiable: usize,
    /// Verbatim report of the first divergence, if any.
    pub divergence: Option<String>,
}

fn pool() -> Vec<(Recognizer, usize)> {
    [
        "PERSON+",
        "(BACKPACK | CHAIR | TRASHCAN)+",
        "TRUE+",
        "BLUE+",
        "QUICK[2,]",
        "LEFT+",
        "STATIONARYFAR+ APPROACHING[2,] STATIONARYCLOSE+",
    ]
    .iter()
    .map(|p| {
        let re = parse_regex(p).expect("pool pattern parses");
        let rec = Recognizer::compile(&re).expect("pool pattern compiles");
        let arity = rec.arity().unwrap_or(1);
        (rec, arity)
    })
    .collect()
}

fn random_clip(rng: &mut SplitMix64, frames: usize, j_max: u64) -> Clip {
    let frame_list = (0..frames)
        .map(|t| {
            let j = 1 + rng.below(j_max) as usize;
            let detections = (0..j)
                .map(|_| Detection {
                    bbox: {
                        let x = rng.range_f64(0.0, 400.0);
                        let y = rng.range_f64(50.0, 250.0);
                        BBox::new(x, y, x + 40.0, y + 80.0)
                    },
                    score: rng.next_f64(),
                    class: CLASSES[rng.below(4) as usize].to_string(),
                    flow: [rng.range_f64(-20.0, 20.0), rng.range_f64(-20.0, 20.0)],
                    hue: rng.range_f64(0.0, 360.0),
                })
                .collect();
            Frame {
                index: (t + 1) as u32,
                detections,
            }
        })
        .collect();
    Clip {
        id: "rand".to_string(),
        frame_rate: 30.0,
        frames: frame_list,
    }
}

fn oracle_cost(clip: &Clip, query: &JointQuery, config: &TrackerConfig) -> u128 {
    let mut cost: u128 = 1;
    for frame in &clip.frames {
        let kept = frame.detections.len().min(config.top_k) as u128;
        for _ in 0..query.participants {
            cost = cost.saturating_mul(kept);
        }
    }
    cost = cost.saturating_mul(clip.frames.len() as u128);
    for word in &query.words {
        cost = cost.saturating_mul(word.recognizer.num_states() as u128);
    }
    cost
}

pub fn run(opts: &CheckOptions) -> Result<CheckOutcome> {
    if opts.max_frames == 0 || opts.max_detections == 0 || opts.max_participants == 0 {
        bail!("size bounds must be at least 1");
    }
    let pool = pool();
    let mut rng = SplitMix64::new(opts.seed);
    let mut finite = 0usize;
    let mut unsatisfiable = 0usize;
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < opts.trials {
        attempts += 1;
        if attempts > opts.trials * 50 + 50 {
            bail!(
                "instance sampling stalled after {attempts} attempts; \
                 the requested sizes exceed the oracle's cost cap"
            );
        }

        let participants = 1 + rng.below(opts.max_participants as u64) as usize;
        let frames = 1 + rng.below(opts.max_frames as u64) as usize;
        let clip = random_clip(&mut rng, frames, opts.max_detections as u64);

        let word_count = rng.below(opts.max_words as u64 + 1) as usize;
        let words: Vec<QueryWord> = (0..word_count)
            .map(|_| {
                let (rec, arity) = &pool[rng.below(pool.len() as u64) as usize];
                let args = (0..*arity)
                    .map(|_| rng.below(participants as u64) as usize)
                    .collect();
                QueryWord {
                    recognizer: rec,
                    args,
                }
            })
            .collect();
        let query = JointQuery {
            participants,
            words,
        };
        let config = TrackerConfig {
            top_k: if rng.below(4) == 0 { 2 } else { 5 },
            distinct_detections: rng.below(5) == 0,
            ..TrackerConfig::default()
        };

        if oracle_cost(&clip, &query, &config) > COST_CAP {
            continue;
        }

        let fast = solve(&clip, &query, &config)?;
        let oracle_clip = if opts.inject_bug {
            let mut mutated = clip.clone();
            for frame in &mut mutated.frames {
                for det in &mut frame.detections {
                    det.flow = [-det.flow[0], -det.flow[1]];
                }
            }
            mutated
        } else {
            clip.clone()
        };
        let slow = brute_force_oracle(&oracle_clip, &query, &config)?;

        if fast.tau.to_bits() != slow.tau.to_bits()
            || fast.tracks != slow.tracks
            || fast.word_states != slow.word_states
        {
            let words_desc: Vec<String> = query
                .words
                .iter()
                .enumerate()
                .map(|(w, qw)| format!("word {w}: args {:?}", qw.args))
                .collect();
            let report = format!(
                "instance {done} of {} diverged (seed {:#x})\n\
                 sizes: T={frames} L={participants} W={word_count} top_k={} distinct={}\n\
                 {}\n\
                 decoder: tau={:?} tracks={:?} word_states={:?}\n\
                 oracle:  tau={:?} tracks={:?} word_states={:?}\n\
                 clip:\n{}",
                opts.trials,
                opts.seed,
                config.top_k,
                config.distinct_detections,
                words_desc.join("\n"),
                fast.tau,
                fast.tracks,
                fast.word_states,
                slow.tau,
                slow.tracks,
                slow.word_states,
                clip.to_json(),
            );
            return Ok(CheckOutcome {
                trials: opts.trials,
                finite,
                unsatisfiable,
                divergence: Some(report),
            });
        }

        if fast.tau == f64::NEG_INFINITY {
            unsatisfiable += 1;
        } else {
            finite += 1;
        }
        done += 1;
    }
    Ok(CheckOutcome {
        trials: opts.trials,
        finite,
        unsatisfiable,
        divergence: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_agrees_on_every_instance() {
        let opts = CheckOptions {
            trials: 40,
            seed: 9,
            ..CheckOptions::default()
        };
        let outcome = run(&opts).unwrap();
        assert!(outcome.divergence.is_none());
        assert_eq!(outcome.finite + outcome.unsatisfiable, 40);
        assert!(outcome.finite > 0);
    }

    #[test]
    fn injected_flow_flip_is_caught() {
        let opts = CheckOptions {
            trials: 40,
            seed: 9,
            inject_bug: true,
            ..CheckOptions::default()
        };
        let outcome = run(&opts).unwrap();
        let report = outcome.divergence.expect("mutation must be detected");
        assert!(report.contains("decoder: tau="), "{report}");
        assert!(report.contains("clip:"), "{report}");
    }

    #[test]
    fn zero_size_bounds_are_rejected() {
        let opts = CheckOptions {
            max_frames: 0,
            ..CheckOptions::default()
        };
        assert!(run(&opts).is_err());
    }
}
