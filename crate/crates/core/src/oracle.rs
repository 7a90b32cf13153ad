//! Independent reference implementations used to cross-check the decoder
//! and the compiled recognizers.
//!
//! [`brute_force_oracle`] enumerates every joint assignment of detections to
//! participants, checks each word recognizer by direct acceptance, and folds
//! path scores in exactly the order the decoder accumulates them, so on
//! agreement the scores compare bit for bit. [`regex_matches`] decides
//! regex acceptance by recursive span matching over the surface syntax tree,
//! sharing no code with desugaring or automaton construction.

use crate::clip::{top_k_indices, Clip, Track};
use crate::features::{eval_atom, Atom};
use crate::lattice::{g_table, score_f, validate_query, EngineError, JointQuery, ScoredResult, TrackerConfig};
use crate::recognizer::Recognizer;
use crate::regex::Regex;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

/// Work estimate above which [`brute_force_oracle`] refuses to run.
pub const ORACLE_COST_LIMIT: u128 = 10_000_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("estimated enumeration cost {cost} exceeds the limit of {limit}")]
    TooLarge { cost: u128, limit: u128 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Exhaustive joint decoder.
///
/// Enumerates every per-frame assignment of kept detections to participants,
/// rejects assignments some word recognizer cannot accept, and scores the
/// rest by folding `f`, `g`, `h`, and `a` terms in the decoder's exact
/// accumulation order. Ties are broken toward the path whose
/// reverse-chronological sequence of packed joint states is smallest, and
/// each word's state sequence is the smallest such accepting sequence —
/// the same canonical choices the decoder makes.
pub fn brute_force_oracle(
    clip: &Clip,
    query: &JointQuery,
    config: &TrackerConfig,
) -> Result<ScoredResult, OracleError> {
    config.validate()?;
    validate_query(query)?;
    let frame_count = clip.frames.len();
    if frame_count == 0 {
        return Err(EngineError::NoFrames.into());
    }

    let mut kept: Vec<Vec<usize>> = Vec::with_capacity(frame_count);
    for frame in &clip.frames {
        let keep = top_k_indices(&frame.detections, config.top_k);
        if keep.is_empty() {
            return Err(EngineError::EmptyFrame { frame: frame.index }.into());
        }
        kept.push(keep);
    }

    let l_count = query.participants;
    let w_count = query.words.len();

    // Refuse instances whose enumeration would be unreasonably expensive.
    let mut cost: u128 = 1;
    for keep in &kept {
        for _ in 0..l_count {
            cost = cost.saturating_mul(keep.len() as u128);
        }
    }
    cost = cost.saturating_mul(frame_count as u128);
    for word in &query.words {
        cost = cost.saturating_mul(word.recognizer.num_states() as u128);
    }
    if cost > ORACLE_COST_LIMIT {
        return Err(OracleError::TooLarge {
            cost,
            limit: ORACLE_COST_LIMIT,
        });
    }

    // Per-frame f scores and g tables, shared with the decoder's helpers so
    // identical inputs produce identical floats.
    let f_vals: Vec<Vec<f64>> = kept
        .iter()
        .enumerate()
        .map(|(t, keep)| {
            keep.iter()
                .map(|&idx| score_f(clip.frames[t].detections[idx].score, config))
                .collect()
        })
        .collect();
    let g_tables: Vec<Vec<f64>> = (1..frame_count)
        .map(|t| g_table(clip, config, &kept, t))
        .collect();

    // truth[w][t][k * cells + cell]: does word w's state-k atom hold at t for
    // the given argument cell (kept positions, row-major for binary atoms)?
    let constants = &config.constants;
    let mut truth: Vec<Vec<Vec<bool>>> = Vec::with_capacity(w_count);
    for word in &query.words {
        let rec = word.recognizer;
        let arity = word.args.len();
        let mut per_frame = Vec::with_capacity(frame_count);
        for (t, keep) in kept.iter().enumerate() {
            let j = keep.len();
            let cells = j.pow(arity as u32);
            let mut table = vec![false; rec.num_states() * cells];
            for k in 0..rec.num_states() {
                for cell in 0..cells {
                    let holds = if arity == 1 {
                        let det = &clip.frames[t].detections[keep[cell]];
                        eval_atom(rec.atom(k), &[det], constants)
                    } else {
                        let d1 = &clip.frames[t].detections[keep[cell / j]];
                        let d2 = &clip.frames[t].detections[keep[cell % j]];
                        eval_atom(rec.atom(k), &[d1, d2], constants)
                    }
                    .expect("word arity was validated");
                    table[k * cells + cell] = holds;
                }
            }
            per_frame.push(table);
        }
        truth.push(per_frame);
    }

    // Enumerate assignments: digit (t, l) picks the kept position of
    // participant l at frame t.
    let digit_count = frame_count * l_count;
    let sizes: Vec<usize> = (0..digit_count).map(|d| kept[d / l_count].len()).collect();
    let k_sizes: Vec<usize> = query.words.iter().map(|w| w.recognizer.num_states()).collect();

    let mut best: Option<(f64, Vec<u64>, Vec<usize>, Vec<Vec<usize>>)> = None;
    let mut digits = vec![0usize; digit_count];
    loop {
        if let Some((score, word_states)) = evaluate_assignment(
            &digits, l_count, &kept, &f_vals, &g_tables, &truth, query, config,
        ) {
            let key = joint_key(&digits, l_count, &kept, &k_sizes, &word_states);
            let better = match &best {
                None => true,
                Some((b, bkey, _, _)) => score > *b || (score == *b && key < *bkey),
            };
            if better {
                best = Some((score, key, digits.clone(), word_states));
            }
        }
        if digit_count == 0 {
            break;
        }
        let mut d = digit_count;
        loop {
            if d == 0 {
                break;
            }
            d -= 1;
            digits[d] += 1;
            if digits[d] < sizes[d] {
                break;
            }
            digits[d] = 0;
        }
        if digits.iter().all(|&x| x == 0) {
            break;
        }
    }

    match best {
        Some((tau, _, digits, word_states)) => {
            let mut tracks = vec![
                Track {
                    clip_id: clip.id.clone(),
                    indices: Vec::with_capacity(frame_count),
                };
                l_count
            ];
            for t in 0..frame_count {
                for (l, track) in tracks.iter_mut().enumerate() {
                    track.indices.push(kept[t][digits[t * l_count + l]]);
                }
            }
            Ok(ScoredResult {
                tau,
                tracks,
                word_states,
            })
        }
        None => Ok(ScoredResult {
            tau: f64::NEG_INFINITY,
            tracks: Vec::new(),
            word_states: Vec::new(),
        }),
    }
}

/// Score one assignment, or `None` if it is infeasible (a duplicate under
/// `distinct_detections`, or some word's recognizer rejects).
///
/// The fold mirrors the decoder: frame 0 contributes its node value; each
/// later frame adds `a_W … a_1`, then `g_L … g_1`, then its node value,
/// where a node value is `0 + f_1 + … + f_L + h_1 + … + h_W`.
#[allow(clippy::too_many_arguments)]
fn evaluate_assignment(
    digits: &[usize],
    l_count: usize,
    kept: &[Vec<usize>],
    f_vals: &[Vec<f64>],
    g_tables: &[Vec<f64>],
    truth: &[Vec<Vec<bool>>],
    query: &JointQuery,
    config: &TrackerConfig,
) -> Option<(f64, Vec<Vec<usize>>)> {
    let frame_count = kept.len();
    let at = |t: usize, l: usize| digits[t * l_count + l];

    if config.distinct_detections {
        for t in 0..frame_count {
            for l in 1..l_count {
                for other in 0..l {
                    if at(t, other) == at(t, l) {
                        return None;
                    }
                }
            }
        }
    }

    let mut word_states = Vec::with_capacity(query.words.len());
    for (w, word) in query.words.iter().enumerate() {
        let j_at = |t: usize| kept[t].len();
        let cell_at = |t: usize| {
            if word.args.len() == 1 {
                at(t, word.args[0])
            } else {
                at(t, word.args[0]) * j_at(t) + at(t, word.args[1])
            }
        };
        let holds = |k: usize, t: usize| {
            let cells = j_at(t).pow(word.args.len() as u32);
            truth[w][t][k * cells + cell_at(t)]
        };
        word_states.push(canonical_word_states(word.recognizer, frame_count, holds)?);
    }

    let node = |t: usize| -> f64 {
        let mut v = 0.0f64;
        for l in 0..l_count {
            v += f_vals[t][at(t, l)];
        }
        for _ in 0..query.words.len() {
            v += 0.0;
        }
        v
    };

    let mut score = node(0);
    for t in 1..frame_count {
        for _ in (0..query.words.len()).rev() {
            score += 0.0;
        }
        let j_cur = kept[t].len();
        for l in (0..l_count).rev() {
            score += g_tables[t - 1][at(t - 1, l) * j_cur + at(t, l)];
        }
        score += node(t);
    }
    Some((score, word_states))
}

/// The smallest accepting state sequence under reverse-chronological
/// lexicographic order, or `None` if the recognizer rejects.
fn canonical_word_states(
    rec: &Recognizer,
    frame_count: usize,
    holds: impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    let k_count = rec.num_states();
    let mut reachable = vec![false; k_count];
    for &k in rec.initial_states() {
        if holds(k, 0) {
            reachable[k] = true;
        }
    }
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(frame_count);
    parents.push(vec![usize::MAX; k_count]);
    for t in 1..frame_count {
        let mut next = vec![false; k_count];
        let mut parent = vec![usize::MAX; k_count];
        for k in 0..k_count {
            if !reachable[k] {
                continue;
            }
            for &succ in rec.successors(k) {
                if !next[succ] && holds(succ, t) {
                    next[succ] = true;
                    parent[succ] = k;
                }
            }
        }
        parents.push(parent);
        reachable = next;
    }
    let mut k = (0..k_count).find(|&k| reachable[k] && rec.is_accepting(k))?;
    let mut states = vec![0usize; frame_count];
    for t in (0..frame_count).rev() {
        states[t] = k;
        if t > 0 {
            k = parents[t][k];
        }
    }
    Some(states)
}

/// Reverse-chronological sequence of packed joint states, the decoder's
/// tie-breaking key. Axis order within a state is participants then words,
/// participants most significant.
fn joint_key(
    digits: &[usize],
    l_count: usize,
    kept: &[Vec<usize>],
    k_sizes: &[usize],
    word_states: &[Vec<usize>],
) -> Vec<u64> {
    let frame_count = kept.len();
    let mut key = Vec::with_capacity(frame_count);
    for t in (0..frame_count).rev() {
        let mut packed: u64 = 0;
        for l in 0..l_count {
            packed = packed * kept[t].len() as u64 + digits[t * l_count + l] as u64;
        }
        for (w, &k) in k_sizes.iter().enumerate() {
            packed = packed * k as u64 + word_states[w][t] as u64;
        }
        key.push(packed);
    }
    key
}

// ---------------------------------------------------------------------------
// Independent regex acceptance

/// Decide whether a regex matches a `len`-symbol sequence, where
/// `holds(atom, t)` says whether an atom holds at position `t`.
///
/// Works by recursive span matching directly on the surface syntax —
/// repetition sugar is interpreted, not rewritten — so it exercises none of
/// the code paths used by [`Recognizer`](crate::recognizer::Recognizer)
/// compilation.
pub fn regex_matches<F>(re: &Regex, len: usize, holds: &F) -> bool
where
    F: Fn(&Atom, usize) -> bool,
{
    let mut memo = BTreeMap::new();
    span(re, 0, len, holds, &mut memo)
}

type Memo = BTreeMap<(usize, u8, usize, usize, usize), bool>;

fn span<F>(re: &Regex, i: usize, j: usize, holds: &F, memo: &mut Memo) -> bool
where
    F: Fn(&Atom, usize) -> bool,
{
    let key = (re as *const Regex as usize, 0, 0, i, j);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = match re {
        Regex::Epsilon => i == j,
        Regex::Atom(atom) => j == i + 1 && holds(atom, i),
        Regex::Concat(a, b) => (i..=j).any(|m| {
            span(a, i, m, holds, memo) && span(b, m, j, holds, memo)
        }),
        Regex::Union(a, b) => span(a, i, j, holds, memo) || span(b, i, j, holds, memo),
        Regex::Optional(r) => i == j || span(r, i, j, holds, memo),
        Regex::Star(r) => reps(r, 0, i, j, false, holds, memo),
        Regex::Plus(r) => reps(r, 1, i, j, false, holds, memo),
        Regex::RepeatAtLeast(n, r) => reps(r, *n, i, j, false, holds, memo),
        Regex::NoisyRepeatAtLeast(n, r) => reps(r, *n, i, j, true, holds, memo),
    };
    memo.insert(key, v);
    v
}

/// Match at least `need` repetitions of `r` over `[i, j)`. With `noisy`,
/// each repetition is `r` followed by at most one arbitrary symbol.
fn reps<F>(
    r: &Regex,
    need: usize,
    i: usize,
    j: usize,
    noisy: bool,
    holds: &F,
    memo: &mut Memo,
) -> bool
where
    F: Fn(&Atom, usize) -> bool,
{
    let kind = if noisy { 2 } else { 1 };
    let key = (r as *const Regex as usize, kind, need, i, j);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let unit = |m: usize, memo: &mut Memo| -> bool {
        span(r, i, m, holds, memo) || (noisy && m > i && span(r, i, m - 1, holds, memo))
    };
    let v = if need == 0 {
        // Kleene closure: empty, or one nonempty repetition then the rest.
        i == j
            || (i + 1..=j).any(|m| {
                unit(m, memo) && reps(r, 0, m, j, noisy, holds, memo)
            })
    } else {
        (i..=j).any(|m| unit(m, memo) && reps(r, need - 1, m, j, noisy, holds, memo))
    };
    memo.insert(key, v);
    v
}
