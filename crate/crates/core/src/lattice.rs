//! Joint Viterbi decoding over detection lattices and word recognizers.
//!
//! A query couples `L` participant tracks with `W` word recognizers whose
//! arguments are bound to participants. Frame `t` offers `J_t` detections;
//! the joint state is a tuple `(j_1,…,j_L, k_1,…,k_W)` and the decoder
//! maximizes
//!
//! ```text
//!   Σ_l ( Σ_t f(b^t_{j_l}) + Σ_t g(b^{t-1}_{j_l}, b^t_{j_l}) )
//! + Σ_w ( Σ_t h_w(k_w^t, b^t_{j_θw}) + Σ_t a_w(k_w^{t-1}, k_w^t) )
//! ```
//!
//! where `f` scores detection strength, `g` scores temporal coherence, and
//! `h`/`a` are the recognizer's 0-or-−∞ output and transition costs.
//!
//! A transition between consecutive joint states decomposes per axis, so the
//! per-frame maximization is done by max-plus variable elimination, one axis
//! at a time from `k_W` back to `j_1`, instead of iterating over all
//! `S × S` state pairs. Each elimination step keeps the smallest maximizing
//! predecessor coordinate, and the final state takes the smallest maximizing
//! tuple, which together select — among all maximum-score paths — the one
//! whose reversed sequence of tuples `(j_1,…,j_L,k_1,…,k_W)` is
//! lexicographically smallest.

use crate::clip::{top_k_indices, Clip, Detection, Track};
use crate::features::{eval_atom, fwd_proj, Constants};
use crate::lexicon::{Lexicon, Role};
use crate::linguistics::{analyze, LinguisticsError};
use crate::math;
use crate::recognizer::Recognizer;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Scoring and pruning parameters, including the predicate constants.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Detections kept per frame (highest score).
    pub top_k: usize,
    /// Detection-score sigmoid midpoint and scale: `f = log σ((raw−μ_f)/s_f)`.
    pub mu_f: f64,
    pub s_f: f64,
    /// Coherence sigmoid midpoint and scale in pixels:
    /// `g = log σ((μ_g−d)/s_g)` with `d` the distance between the current
    /// center and the forward-projected previous center.
    pub mu_g: f64,
    pub s_g: f64,
    /// Forbid two participants from selecting the same detection in a frame.
    pub distinct_detections: bool,
    /// Predicate thresholds used by recognizer atoms.
    pub constants: Constants,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            top_k: 5,
            mu_f: 0.0,
            s_f: 1.0,
            mu_g: 30.0,
            s_g: 10.0,
            distinct_detections: false,
            constants: Constants::default(),
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.top_k < 1 {
            return Err(EngineError::Config {
                message: String::from("top_k must be at least 1"),
            });
        }
        if !(self.s_f > 0.0) || !(self.s_g > 0.0) {
            return Err(EngineError::Config {
                message: String::from("sigmoid scales must be positive"),
            });
        }
        Ok(())
    }
}

/// Detection strength in log space: `log σ((raw − μ_f)/s_f)`.
pub fn score_f(raw: f64, config: &TrackerConfig) -> f64 {
    math::log_sigmoid((raw - config.mu_f) / config.s_f)
}

/// Temporal coherence in log space: `log σ((μ_g − d)/s_g)` where `d` is the
/// distance from the forward-projected previous center to the current center.
pub fn score_g(prev: &Detection, cur: &Detection, config: &TrackerConfig) -> f64 {
    let projected = fwd_proj(prev).center();
    let center = cur.bbox.center();
    let d = math::hypot(center.0 - projected.0, center.1 - projected.1);
    math::log_sigmoid((config.mu_g - d) / config.s_g)
}

/// One word lattice in a query: a recognizer and the participants bound to
/// its arguments.
#[derive(Debug, Clone)]
pub struct QueryWord<'a> {
    pub recognizer: &'a Recognizer,
    pub args: Vec<usize>,
}

/// A joint decoding problem: `participants` tracking lattices and one
/// lattice per word.
#[derive(Debug, Clone)]
pub struct JointQuery<'a> {
    pub participants: usize,
    pub words: Vec<QueryWord<'a>>,
}

/// Decoder output: the score and the argmax assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredResult {
    /// τ ∈ [−∞, 0]; −∞ exactly when no joint path satisfies all recognizers.
    pub tau: f64,
    /// One track per participant (detection indices into the unpruned clip);
    /// empty when `tau` is −∞.
    pub tracks: Vec<Track>,
    /// Per word, the recognizer state sequence; empty when `tau` is −∞.
    pub word_states: Vec<Vec<usize>>,
}

/// `sentence_track` output: tracks labeled with roles plus word lattices
/// labeled with their lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceTrackResult {
    pub tau: f64,
    pub sentence: String,
    /// One entry per participant, in participant order; empty when τ = −∞.
    pub tracks: Vec<ParticipantTrack>,
    /// One entry per content word, in token order; empty when τ = −∞.
    pub word_states: Vec<WordStates>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantTrack {
    pub participant: usize,
    pub role: Role,
    pub track: Track,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordStates {
    pub lemma: String,
    /// Index into the token sequence.
    pub word_index: usize,
    pub states: Vec<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EngineError {
    #[error("invalid configuration: {message}")]
    Config { message: String },
    #[error("frame {frame} has no detections")]
    EmptyFrame { frame: u32 },
    #[error("clip has no frames")]
    NoFrames,
    #[error("word {word} binds participant {participant} but the query has {participants}")]
    BadBinding {
        word: usize,
        participant: usize,
        participants: usize,
    },
    #[error("word {word} takes {expected} argument(s) but {found} are bound")]
    WordArity {
        word: usize,
        expected: usize,
        found: usize,
    },
    #[error("track length {track_len} does not match {frames} frame(s)")]
    TrackLength { track_len: usize, frames: usize },
    #[error("track selects detection {index} in frame {frame}, which does not exist")]
    TrackIndex { frame: u32, index: usize },
    #[error("joint state space is too large for this decoder")]
    StateSpace,
    #[error(transparent)]
    Language(#[from] LinguisticsError),
}

// ---------------------------------------------------------------------------
// Public operations

/// Track the single best participant (`L = 1`, no words).
pub fn track_single(clip: &Clip, config: &TrackerConfig) -> Result<ScoredResult, EngineError> {
    let query = JointQuery {
        participants: 1,
        words: Vec::new(),
    };
    solve(clip, &query, config)
}

/// MAP state sequence of one recognizer given fixed tracks bound to its
/// arguments. Returns score 0 with the canonical state sequence when the
/// recognizer accepts, and (−∞, empty) otherwise.
pub fn event_map(
    clip: &Clip,
    recognizer: &Recognizer,
    bindings: &[&Track],
    config: &TrackerConfig,
) -> Result<(f64, Vec<usize>), EngineError> {
    config.validate()?;
    if bindings.is_empty() || recognizer.arity().is_some_and(|a| a != bindings.len()) {
        return Err(EngineError::WordArity {
            word: 0,
            expected: recognizer.arity().unwrap_or(1),
            found: bindings.len(),
        });
    }
    let frame_count = clip.frames.len();
    if frame_count == 0 {
        return Err(EngineError::NoFrames);
    }
    let mut dets: Vec<Vec<&Detection>> = Vec::with_capacity(frame_count);
    for (t, frame) in clip.frames.iter().enumerate() {
        let mut per_arg = Vec::with_capacity(bindings.len());
        for track in bindings {
            if track.indices.len() != frame_count {
                return Err(EngineError::TrackLength {
                    track_len: track.indices.len(),
                    frames: frame_count,
                });
            }
            let idx = track.indices[t];
            let det = frame.detections.get(idx).ok_or(EngineError::TrackIndex {
                frame: frame.index,
                index: idx,
            })?;
            per_arg.push(det);
        }
        dets.push(per_arg);
    }

    let k_count = recognizer.num_states();
    let constants = &config.constants;
    let holds = |k: usize, t: usize| -> bool {
        eval_atom(recognizer.atom(k), &dets[t], constants).unwrap_or(false)
    };

    // Viterbi over the K × T lattice with 0/−∞ weights reduces to reachable
    // state sets plus smallest-predecessor backpointers.
    let mut reachable = vec![false; k_count];
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(frame_count);
    for &k in recognizer.initial_states() {
        if holds(k, 0) {
            reachable[k] = true;
        }
    }
    parents.push(vec![usize::MAX; k_count]);
    for t in 1..frame_count {
        let mut next = vec![false; k_count];
        let mut parent = vec![usize::MAX; k_count];
        for k in 0..k_count {
            if !reachable[k] {
                continue;
            }
            for &succ in recognizer.successors(k) {
                if !next[succ] && holds(succ, t) {
                    next[succ] = true;
                    parent[succ] = k;
                } else if next[succ] && parent[succ] > k {
                    parent[succ] = k;
                }
            }
        }
        parents.push(parent);
        reachable = next;
    }

    let last = (0..k_count).find(|&k| reachable[k] && recognizer.is_accepting(k));
    match last {
        Some(mut k) => {
            let mut states = vec![0usize; frame_count];
            for t in (0..frame_count).rev() {
                states[t] = k;
                if t > 0 {
                    k = parents[t][k];
                }
            }
            Ok((0.0, states))
        }
        None => Ok((f64::NEG_INFINITY, Vec::new())),
    }
}

/// Decode a sentence against a clip: parse, bind arguments, and run the
/// joint decoder.
pub fn sentence_track(
    clip: &Clip,
    sentence: &str,
    lexicon: &Lexicon,
    config: &TrackerConfig,
) -> Result<SentenceTrackResult, EngineError> {
    let analysis = analyze(sentence, lexicon)?;
    let mut words = Vec::new();
    let mut labels = Vec::new();
    for binding in &analysis.mapping.theta {
        let entry = lexicon.get(&binding.lemma).expect("token came from lexicon");
        if let Some(rec) = &entry.recognizer {
            words.push(QueryWord {
                recognizer: rec,
                args: binding.args.clone(),
            });
            labels.push((binding.lemma.clone(), binding.word_index));
        }
    }
    let query = JointQuery {
        participants: analysis.mapping.participants,
        words,
    };
    let result = solve(clip, &query, config)?;
    let tracks = result
        .tracks
        .into_iter()
        .enumerate()
        .map(|(p, track)| ParticipantTrack {
            participant: p,
            role: analysis.mapping.roles[p],
            track,
        })
        .collect();
    let word_states = result
        .word_states
        .into_iter()
        .zip(labels)
        .map(|(states, (lemma, word_index))| WordStates {
            lemma,
            word_index,
            states,
        })
        .collect();
    Ok(SentenceTrackResult {
        tau: result.tau,
        sentence: String::from(sentence),
        tracks,
        word_states,
    })
}

// ---------------------------------------------------------------------------
// The joint decoder

/// Run the joint Viterbi decoder for an explicit query.
pub fn solve(
    clip: &Clip,
    query: &JointQuery,
    config: &TrackerConfig,
) -> Result<ScoredResult, EngineError> {
    config.validate()?;
    validate_query(query)?;
    let frame_count = clip.frames.len();
    if frame_count == 0 {
        return Err(EngineError::NoFrames);
    }

    // Per-frame surviving detections (indices into the original frames).
    let mut kept: Vec<Vec<usize>> = Vec::with_capacity(frame_count);
    for frame in &clip.frames {
        let keep = top_k_indices(&frame.detections, config.top_k);
        if keep.is_empty() {
            return Err(EngineError::EmptyFrame { frame: frame.index });
        }
        kept.push(keep);
    }

    let l_count = query.participants;
    let w_count = query.words.len();
    let axis_count = l_count + w_count;
    let k_sizes: Vec<usize> = query.words.iter().map(|w| w.recognizer.num_states()).collect();

    // Axis sizes for frame t: L axes of J_t followed by the fixed K_w axes.
    let sizes_at = |t: usize| -> Vec<usize> {
        let j = kept[t].len();
        let mut sizes = vec![j; l_count];
        sizes.extend_from_slice(&k_sizes);
        sizes
    };
    // The packed-state and per-axis argmax encodings bound the joint space
    // by u32 and each axis by u16.
    let space_of = |sizes: &[usize]| -> Option<usize> {
        let mut s: usize = 1;
        for &size in sizes {
            if size > u16::MAX as usize {
                return None;
            }
            s = s.checked_mul(size)?;
        }
        (s <= u32::MAX as usize).then_some(s)
    };

    // Word transition cost tables: a_w[prev][cur] ∈ {0, −∞}.
    let a_tables: Vec<Vec<f64>> = query
        .words
        .iter()
        .map(|w| {
            let k = w.recognizer.num_states();
            let mut table = vec![f64::NEG_INFINITY; k * k];
            for prev in 0..k {
                for &cur in w.recognizer.successors(prev) {
                    table[prev * k + cur] = 0.0;
                }
            }
            table
        })
        .collect();

    let mut delta: Vec<f64> = Vec::new();
    let mut backpointers: Vec<Vec<u32>> = Vec::with_capacity(frame_count);
    let mut sizes_prev: Vec<usize> = Vec::new();

    for t in 0..frame_count {
        let sizes = sizes_at(t);
        let space = space_of(&sizes).ok_or(EngineError::StateSpace)?;
        let node = node_values(clip, query, config, &kept, t, &sizes, space)?;

        if t == 0 {
            delta = node;
            backpointers.push(Vec::new());
        } else {
            let (trans, bp) = eliminate(
                &delta,
                &sizes_prev,
                &sizes,
                l_count,
                &g_table(clip, config, &kept, t),
                &a_tables,
            );
            let mut next = trans;
            for (value, n) in next.iter_mut().zip(&node) {
                *value += n;
            }
            delta = next;
            backpointers.push(bp);
        }
        sizes_prev = sizes;
    }

    // Final maximization over accepting states, smallest tuple on ties.
    let accepting: Vec<Vec<bool>> = query
        .words
        .iter()
        .map(|w| {
            (0..w.recognizer.num_states())
                .map(|k| w.recognizer.is_accepting(k))
                .collect()
        })
        .collect();
    let sizes = sizes_at(frame_count - 1);
    let mut best: Option<(f64, usize)> = None;
    let mut digits = vec![0usize; axis_count];
    for (state, &value) in delta.iter().enumerate() {
        let ok = value > f64::NEG_INFINITY
            && digits[l_count..]
                .iter()
                .enumerate()
                .all(|(w, &k)| accepting[w][k]);
        if ok && best.is_none_or(|(b, _)| value > b) {
            best = Some((value, state));
        }
        increment(&mut digits, &sizes);
    }

    let Some((tau, final_state)) = best else {
        return Ok(ScoredResult {
            tau: f64::NEG_INFINITY,
            tracks: Vec::new(),
            word_states: Vec::new(),
        });
    };

    // Walk backpointers to recover the joint path.
    let mut states = vec![0usize; frame_count];
    states[frame_count - 1] = final_state;
    for t in (1..frame_count).rev() {
        states[t - 1] = backpointers[t][states[t]] as usize;
    }

    let mut tracks = vec![
        Track {
            clip_id: clip.id.clone(),
            indices: Vec::with_capacity(frame_count),
        };
        l_count
    ];
    let mut word_states = vec![Vec::with_capacity(frame_count); w_count];
    for (t, &state) in states.iter().enumerate() {
        let digits = decode(state, &sizes_at(t));
        for l in 0..l_count {
            tracks[l].indices.push(kept[t][digits[l]]);
        }
        for w in 0..w_count {
            word_states[w].push(digits[l_count + w]);
        }
    }

    Ok(ScoredResult {
        tau,
        tracks,
        word_states,
    })
}

pub(crate) fn validate_query(query: &JointQuery) -> Result<(), EngineError> {
    for (w, word) in query.words.iter().enumerate() {
        if let Some(arity) = word.recognizer.arity() {
            if word.args.len() != arity {
                return Err(EngineError::WordArity {
                    word: w,
                    expected: arity,
                    found: word.args.len(),
                });
            }
        }
        if word.args.is_empty() {
            return Err(EngineError::WordArity {
                word: w,
                expected: 1,
                found: 0,
            });
        }
        for &p in &word.args {
            if p >= query.participants {
                return Err(EngineError::BadBinding {
                    word: w,
                    participant: p,
                    participants: query.participants,
                });
            }
        }
    }
    Ok(())
}

/// Node values for frame `t` over the joint state space: the f-scores of the
/// selected detections plus each word's 0/−∞ output cost (restricted to
/// initial states when `t = 0`), plus the distinct-detections mask.
///
/// Every value is accumulated in a fixed order — f over participants in
/// order, then h over words in order — so path scores are reproducible
/// bit for bit.
fn node_values(
    clip: &Clip,
    query: &JointQuery,
    config: &TrackerConfig,
    kept: &[Vec<usize>],
    t: usize,
    sizes: &[usize],
    space: usize,
) -> Result<Vec<f64>, EngineError> {
    let l_count = query.participants;
    let axis_count = sizes.len();
    let frame = &clip.frames[t];
    let j_count = kept[t].len();

    let f_vals: Vec<f64> = kept[t]
        .iter()
        .map(|&idx| score_f(frame.detections[idx].score, config))
        .collect();

    // h_w tables: K_w × J (unary) or K_w × J × J (binary), with non-initial
    // states masked at the first frame.
    let constants = &config.constants;
    let mut h_tables: Vec<Vec<f64>> = Vec::with_capacity(query.words.len());
    for word in &query.words {
        let rec = word.recognizer;
        let k_count = rec.num_states();
        let arity = word.args.len();
        let cells = j_count.pow(arity as u32);
        let mut table = vec![f64::NEG_INFINITY; k_count * cells];
        for k in 0..k_count {
            if t == 0 && !rec.is_initial(k) {
                continue;
            }
            let atom = rec.atom(k);
            for cell in 0..cells {
                let holds = if arity == 1 {
                    let det = &frame.detections[kept[t][cell]];
                    eval_atom(atom, &[det], constants)
                } else {
                    let d1 = &frame.detections[kept[t][cell / j_count]];
                    let d2 = &frame.detections[kept[t][cell % j_count]];
                    eval_atom(atom, &[d1, d2], constants)
                }
                .expect("word arity was validated");
                if holds {
                    table[k * cells + cell] = 0.0;
                }
            }
        }
        h_tables.push(table);
    }

    // Terms anchored at each axis: f_l at axis l; h_w at axis L+w (its j
    // arguments are earlier axes). Prefix sums over axes let the mixed-radix
    // sweep recompute only the suffix that changed.
    let mut node = vec![0.0f64; space];
    let mut digits = vec![0usize; axis_count];
    let mut prefix = vec![0.0f64; axis_count + 1];

    let eval_axis = |axis: usize, digits: &[usize]| -> f64 {
        if axis < l_count {
            let mut v = f_vals[digits[axis]];
            if config.distinct_detections {
                for other in 0..axis {
                    if digits[other] == digits[axis] {
                        v = f64::NEG_INFINITY;
                    }
                }
            }
            v
        } else {
            let w = axis - l_count;
            let word = &query.words[w];
            let cells = j_count.pow(word.args.len() as u32);
            let cell = if word.args.len() == 1 {
                digits[word.args[0]]
            } else {
                digits[word.args[0]] * j_count + digits[word.args[1]]
            };
            h_tables[w][digits[axis] * cells + cell]
        }
    };

    for axis in 0..axis_count {
        prefix[axis + 1] = prefix[axis] + eval_axis(axis, &digits);
    }
    for cell in node.iter_mut() {
        *cell = prefix[axis_count];
        // Advance the tuple and recompute the changed suffix.
        let mut axis = axis_count;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            digits[axis] += 1;
            if digits[axis] < sizes[axis] {
                break;
            }
            digits[axis] = 0;
        }
        for a in axis..axis_count {
            prefix[a + 1] = prefix[a] + eval_axis(a, &digits);
        }
    }
    Ok(node)
}

/// Coherence cost table between frames `t-1` and `t`:
/// `g[prev * J_t + cur]`.
pub(crate) fn g_table(
    clip: &Clip,
    config: &TrackerConfig,
    kept: &[Vec<usize>],
    t: usize,
) -> Vec<f64> {
    let prev_frame = &clip.frames[t - 1];
    let cur_frame = &clip.frames[t];
    let prev_kept = &kept[t - 1];
    let cur_kept = &kept[t];
    let mut table = Vec::with_capacity(prev_kept.len() * cur_kept.len());
    for &p in prev_kept {
        for &c in cur_kept {
            table.push(score_g(
                &prev_frame.detections[p],
                &cur_frame.detections[c],
                config,
            ));
        }
    }
    table
}

/// Max-plus transition via per-axis elimination.
///
/// Axes are ordered `(j_1,…,j_L,k_1,…,k_W)`; elimination runs from the last
/// axis to the first, replacing that axis's predecessor coordinate with its
/// current coordinate and adding the axis's transition cost (`a_w` for word
/// axes, `g` for participant axes). Each step records the smallest
/// maximizing predecessor coordinate; `backpointers[cur]` packs the
/// reconstructed predecessor tuple as a linear index into the previous
/// frame's state space.
fn eliminate(
    delta_prev: &[f64],
    sizes_prev: &[usize],
    sizes_cur: &[usize],
    l_count: usize,
    g: &[f64],
    a_tables: &[Vec<f64>],
) -> (Vec<f64>, Vec<u32>) {
    let axis_count = sizes_prev.len();
    let mut values: Vec<f64> = delta_prev.to_vec();
    // args[i]: smallest maximizing predecessor coordinate for axis i, shaped
    // like that step's output (prev axes < i, cur axes ≥ i).
    let mut args: Vec<Vec<u16>> = Vec::with_capacity(axis_count);
    args.resize(axis_count, Vec::new());

    let cost = |axis: usize, prev: usize, cur: usize| -> f64 {
        if axis < l_count {
            g[prev * sizes_cur[axis] + cur]
        } else {
            let k = sizes_prev[axis];
            a_tables[axis - l_count][prev * k + cur]
        }
    };

    for axis in (0..axis_count).rev() {
        let pre: usize = sizes_prev[..axis].iter().product();
        let post: usize = sizes_cur[axis + 1..].iter().product();
        let prev_size = sizes_prev[axis];
        let cur_size = sizes_cur[axis];
        let mut out = vec![f64::NEG_INFINITY; pre * cur_size * post];
        let mut arg = vec![0u16; pre * cur_size * post];
        for pre_idx in 0..pre {
            for cur in 0..cur_size {
                let out_base = (pre_idx * cur_size + cur) * post;
                for prev in 0..prev_size {
                    let in_base = (pre_idx * prev_size + prev) * post;
                    let c = cost(axis, prev, cur);
                    if c == f64::NEG_INFINITY {
                        continue;
                    }
                    for post_idx in 0..post {
                        let candidate = values[in_base + post_idx] + c;
                        if candidate > out[out_base + post_idx] {
                            out[out_base + post_idx] = candidate;
                            arg[out_base + post_idx] = prev as u16;
                        }
                    }
                }
            }
        }
        values = out;
        args[axis] = arg;
    }

    // Reconstruct the packed predecessor for every current state.
    let space_cur = values.len();
    let mut backpointers = vec![0u32; space_cur];
    let mut cur_digits = vec![0usize; axis_count];
    for (cur_linear, bp) in backpointers.iter_mut().enumerate() {
        let mut prev_linear: usize = 0;
        // args[axis] is indexed by (prev digits < axis, cur digits > axis,
        // and this axis's cur digit in the middle).
        let mut pre_idx = 0usize;
        for axis in 0..axis_count {
            let post: usize = sizes_cur[axis + 1..].iter().product();
            let idx = (pre_idx * sizes_cur[axis] + cur_digits[axis]) * post
                + cur_linear % post;
            let prev = args[axis][idx] as usize;
            prev_linear = prev_linear * sizes_prev[axis] + prev;
            pre_idx = pre_idx * sizes_prev[axis] + prev;
        }
        *bp = prev_linear as u32;
        increment(&mut cur_digits, sizes_cur);
    }

    (values, backpointers)
}

fn decode(mut linear: usize, sizes: &[usize]) -> Vec<usize> {
    let mut digits = vec![0usize; sizes.len()];
    for (axis, &size) in sizes.iter().enumerate().rev() {
        digits[axis] = linear % size;
        linear /= size;
    }
    digits
}

fn increment(digits: &mut [usize], sizes: &[usize]) {
    for axis in (0..digits.len()).rev() {
        digits[axis] += 1;
        if digits[axis] < sizes[axis] {
            return;
        }
        digits[axis] = 0;
    }
}
