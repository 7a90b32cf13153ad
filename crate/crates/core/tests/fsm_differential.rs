//! Differential battery for the compiled word recognizers: acceptance via
//! the Glushkov automaton must agree with a direct recursive match of the
//! source regular expression on random per-frame truth assignments.

use sentrack_core::features::Atom;
use sentrack_core::lexicon::Lexicon;
use sentrack_core::oracle::regex_matches;
use sentrack_core::rng::SplitMix64;

/// Pseudo-random but reproducible truth value for `atom` at frame `t`.
///
/// TRUE is pinned true: it is the wildcard symbol, and the automaton's
/// desugared noise states must mean the same thing as the sugared form's
/// "followed by one arbitrary symbol".
fn truth(atom: &Atom, t: usize, salt: u64) -> bool {
    if *atom == Atom::True {
        return true;
    }
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in format!("{atom}").bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let key = h ^ salt.rotate_left(17) ^ ((t as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    SplitMix64::new(key).next_u64() & 1 == 0
}

#[test]
fn recognizers_match_direct_regex_on_random_assignments() {
    let lexicon = Lexicon::builtin();
    let with_fsm: Vec<_> = lexicon
        .entries()
        .filter(|e| e.recognizer.is_some())
        .collect();
    assert_eq!(with_fsm.len(), 17, "built-in recognizer inventory");

    let mut rng = SplitMix64::new(0x5e9_7e4ce);
    let mut cases = 0usize;
    for entry in &with_fsm {
        let rec = entry.recognizer.as_ref().unwrap();
        let re = entry.regex.as_ref().unwrap();

        assert_eq!(
            rec.accepts_empty(),
            regex_matches(re, 0, &|_, _| true),
            "empty-sequence acceptance for `{}`",
            entry.lemma
        );

        for trial in 0..1000u64 {
            let len = 1 + (rng.below(8) as usize);
            let salt = rng.next_u64() ^ trial;
            let fast = rec.accepts(len, |atom, t| truth(atom, t, salt));
            let slow = regex_matches(re, len, &|atom, t| truth(atom, t, salt));
            assert_eq!(
                fast, slow,
                "`{}` diverged: len={len} trial={trial} salt={salt:#x}",
                entry.lemma
            );
            cases += 1;
        }
    }
    assert_eq!(cases, 17 * 1000);
}

/// The same battery over pathological hand-written patterns that stress
/// nested repetition, alternation under concatenation, and noisy bounds.
#[test]
fn stress_patterns_match_direct_regex() {
    use sentrack_core::recognizer::Recognizer;
    use sentrack_core::regex::parse_regex;

    let patterns = [
        "PERSON+",
        "(PERSON | BLUE)+ QUICK+",
        "(PERSON BLUE)+",
        "PERSON* BLUE PERSON*",
        "(PERSON | (BLUE QUICK))+ SLOW*",
        "PERSON[2,] BLUE[3,]",
        "PERSON{2,} [BLUE] QUICK*",
        "TRUE+ (QUICK | SLOW)[2,] TRUE+",
        "(PERSON+ | BLUE+)+",
        "[PERSON] [BLUE] QUICK+",
        "((PERSON | TRUE) BLUE)* QUICK",
    ];
    let mut rng = SplitMix64::new(0xa5a5_a5a5_0f0f_3c3cu64);
    for text in patterns {
        let re = parse_regex(text).unwrap();
        let rec = Recognizer::compile(&re).unwrap();
        for trial in 0..400u64 {
            let len = rng.below(9) as usize;
            let salt = rng.next_u64() ^ trial;
            let fast = rec.accepts(len, |atom, t| truth(atom, t, salt));
            let slow = regex_matches(&re, len, &|atom, t| truth(atom, t, salt));
            assert_eq!(fast, slow, "`{text}` diverged: len={len} salt={salt:#x}");
        }
    }
}
