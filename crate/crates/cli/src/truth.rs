//! Symbolic sentence truth over simulator ground truth.
//!
//! Decides whether a sentence is true of a [`Scene`] from the staged
//! events and exact geometry alone — no tracking and no detector noise.
//! Corpus judgments come from here, which keeps them independent of the
//! engine under test: a sentence is judged true exactly when some
//! assignment of scene entities to its participants makes every content
//! word true under the same thresholds the engine's features use.

use anyhow::{bail, ensure, Result};
use sentrack_core::features::Constants;
use sentrack_core::lexicon::Lexicon;
use sentrack_core::linguistics::{analyze, WordBinding};
use sentrack_core::math;

use crate::sim::{EventKind, Scene, Speed, TruthEvent, SENTENCE_INVENTORY};

/// True iff some entity assignment satisfies every content word.
///
/// Assignments need not be injective: "the person put down the trash
/// can to the left of the trash can" may bind both landmark and patient
/// to the same can.
pub fn sentence_is_true(sentence: &str, scene: &Scene, lexicon: &Lexicon) -> Result<bool> {
    let analysis = analyze(sentence, lexicon)?;
    let participants = analysis.mapping.participants;
    let n = scene.entities.len();
    ensure!(participants > 0, "sentence has no participants");
    if n == 0 {
        return Ok(false);
    }
    let words: Vec<&WordBinding> = analysis
        .mapping
        .theta
        .iter()
        .filter(|w| !w.args.is_empty())
        .collect();
    let constants = Constants::default();
    let mut assign = vec![0usize; participants];
    loop {
        let mut all = true;
        for w in &words {
            let args: Vec<usize> = w.args.iter().map(|&p| assign[p]).collect();
            if !word_true(&w.lemma, &args, scene, &constants)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
        let mut i = 0;
        loop {
            if i == participants {
                return Ok(false);
            }
            assign[i] += 1;
            if assign[i] < n {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// Inventory ids of sentences true of the scene, in inventory order.
pub fn depicted_inventory(scene: &Scene, lexicon: &Lexicon) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (id, text) in SENTENCE_INVENTORY {
        if sentence_is_true(text, scene, lexicon)? {
            out.push(id.to_string());
        }
    }
    Ok(out)
}

fn word_true(lemma: &str, args: &[usize], scene: &Scene, k: &Constants) -> Result<bool> {
    let class = |e: usize| scene.entities[e].class.as_str();
    Ok(match lemma {
        "person" | "backpack" | "chair" => class(args[0]) == lemma,
        "trash can" => class(args[0]) == "trashcan",
        "object" => class(args[0]) != "person",
        "red" => hue_near(scene, args[0], 0.0, k),
        "blue" => hue_near(scene, args[0], 225.0, k),
        "to the left of" => in_band(scene, args[0], args[1], k, false),
        "to the right of" => in_band(scene, args[0], args[1], k, true),
        "approached" | "towards" => approaches(scene, args[0], args[1]),
        "away from" => departs(scene, args[0], args[1]),
        "carried" => scene.events.iter().any(|e| {
            carries(e.kind) && e.agent == args[0] && e.patient == Some(args[1])
        }),
        "picked up" => handles(scene, EventKind::PickUp, args[0], args[1]),
        "put down" => handles(scene, EventKind::PutDown, args[0], args[1]),
        "quickly" => moves_at(scene, args[0], Speed::Quick),
        "slowly" => moves_at(scene, args[0], Speed::Slow),
        other => bail!("no symbolic meaning for `{other}`"),
    })
}

fn hue_near(scene: &Scene, e: usize, prototype: f64, k: &Constants) -> bool {
    math::angle_sep_deg(scene.entities[e].hue, prototype) < k.delta_hue
}

/// `a` sits in `b`'s lateral band — on the given side, within `next_to`,
/// in every frame.
fn in_band(scene: &Scene, a: usize, b: usize, k: &Constants, right_of: bool) -> bool {
    (0..scene.frames as usize).all(|t| {
        let ca = scene.entities[a].center(t)[0];
        let cb = scene.entities[b].center(t)[0];
        let dx = if right_of { ca - cb } else { cb - ca };
        dx > 0.0 && dx <= k.next_to
    })
}

fn carries(kind: EventKind) -> bool {
    matches!(kind, EventKind::CarryTowards | EventKind::CarryAway)
}

/// Everything an event moves, and so everything its speed describes.
fn movers(e: &TruthEvent) -> Vec<usize> {
    match e.kind {
        EventKind::Approach => vec![e.agent],
        EventKind::CarryTowards | EventKind::CarryAway => {
            let mut m = vec![e.agent];
            m.extend(e.patient);
            m
        }
        EventKind::PickUp | EventKind::PutDown => e.patient.into_iter().collect(),
    }
}

/// `a` ends up close to `b` having started far: a plain approach by `a`,
/// or a carry towards `b` in which `a` walks or is carried.
fn approaches(scene: &Scene, a: usize, b: usize) -> bool {
    scene.events.iter().any(|e| match e.kind {
        EventKind::Approach => e.agent == a && e.reference == Some(b),
        EventKind::CarryTowards => {
            (e.agent == a || e.patient == Some(a)) && e.reference == Some(b)
        }
        _ => false,
    })
}

fn departs(scene: &Scene, a: usize, b: usize) -> bool {
    scene.events.iter().any(|e| {
        e.kind == EventKind::CarryAway
            && (e.agent == a || e.patient == Some(a))
            && e.reference == Some(b)
    })
}

fn handles(scene: &Scene, kind: EventKind, agent: usize, patient: usize) -> bool {
    scene
        .events
        .iter()
        .any(|e| e.kind == kind && e.agent == agent && e.patient == Some(patient))
}

fn moves_at(scene: &Scene, x: usize, speed: Speed) -> bool {
    scene
        .events
        .iter()
        .any(|e| e.speed == speed && movers(e).contains(&x))
}
