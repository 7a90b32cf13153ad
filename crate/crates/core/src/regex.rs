//! Regular-expression DSL over predicate atoms.
//!
//! Grammar (whitespace separates tokens, juxtaposition concatenates):
//!
//! ```text
//! regex    := concat ('|' concat)*
//! concat   := postfix+
//! postfix  := primary ('*' | '+' | '{' n ',' '}' | '[' n ',' ']')*
//! primary  := ATOM | '(' regex ')' | '[' regex ']'
//! ATOM     := name, optionally with numeric parameters: HASCOLOR(225)
//! ```
//!
//! `[R]` makes `R` optional. `R{n,}` repeats `R` at least `n` times.
//! `R[n,]` is the noisy repeat: at least `n` repetitions, each of which may
//! be followed by one arbitrary frame — the identity `R[n,] = (R [TRUE]){n,}`.
//! A `[` directly after an expression is read as a noisy repeat when its
//! content starts with a digit, and as an optional group otherwise.

use crate::features::{Atom, FeatureError};
use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum Regex {
    Atom(Atom),
    Epsilon,
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Optional(Box<Regex>),
    RepeatAtLeast(usize, Box<Regex>),
    NoisyRepeatAtLeast(usize, Box<Regex>),
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RegexError {
    #[error("regex parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("regex parse error at byte {pos}: {source}")]
    Atom {
        pos: usize,
        #[source]
        source: FeatureError,
    },
    #[error("regex mixes atoms of arity {first} and arity {second}")]
    MixedArity { first: usize, second: usize },
}

impl core::fmt::Display for Regex {
    /// Prints DSL syntax that parses back to the same AST.
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        fmt_prec(self, 0, f)
    }
}

/// Precedence levels: 0 union, 1 concat, 2 postfix operand.
fn fmt_prec(re: &Regex, level: u8, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
    let needs_parens = match re {
        Regex::Union(_, _) => level >= 1,
        Regex::Concat(_, _) => level >= 2,
        _ => false,
    };
    if needs_parens {
        f.write_str("(")?;
    }
    match re {
        Regex::Atom(a) => write!(f, "{a}")?,
        // ε has no surface syntax; it never occurs in parsed ASTs.
        Regex::Epsilon => f.write_str("()")?,
        Regex::Concat(a, b) => {
            fmt_prec(a, 2, f)?;
            f.write_str(" ")?;
            fmt_prec(b, 1, f)?;
        }
        Regex::Union(a, b) => {
            fmt_prec(a, 0, f)?;
            f.write_str(" | ")?;
            fmt_prec(b, 1, f)?;
        }
        Regex::Star(r) => {
            fmt_prec(r, 2, f)?;
            f.write_str("*")?;
        }
        Regex::Plus(r) => {
            fmt_prec(r, 2, f)?;
            f.write_str("+")?;
        }
        Regex::Optional(r) => {
            f.write_str("[")?;
            fmt_prec(r, 0, f)?;
            f.write_str("]")?;
        }
        Regex::RepeatAtLeast(n, r) => {
            fmt_prec(r, 2, f)?;
            write!(f, "{{{n},}}")?;
        }
        Regex::NoisyRepeatAtLeast(n, r) => {
            fmt_prec(r, 2, f)?;
            write!(f, "[{n},]")?;
        }
    }
    if needs_parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl Regex {
    /// The common arity of all non-TRUE atoms, if any non-TRUE atom occurs.
    pub fn arity(&self) -> Result<Option<usize>, RegexError> {
        fn walk(re: &Regex, acc: &mut Option<usize>) -> Result<(), RegexError> {
            match re {
                Regex::Atom(a) => {
                    if let Some(n) = a.arity() {
                        match *acc {
                            None => *acc = Some(n),
                            Some(m) if m == n => {}
                            Some(m) => return Err(RegexError::MixedArity { first: m, second: n }),
                        }
                    }
                    Ok(())
                }
                Regex::Epsilon => Ok(()),
                Regex::Concat(a, b) | Regex::Union(a, b) => {
                    walk(a, acc)?;
                    walk(b, acc)
                }
                Regex::Star(r)
                | Regex::Plus(r)
                | Regex::Optional(r)
                | Regex::RepeatAtLeast(_, r)
                | Regex::NoisyRepeatAtLeast(_, r) => walk(r, acc),
            }
        }
        let mut acc = None;
        walk(self, &mut acc)?;
        Ok(acc)
    }
}

/// Rewrite sugar into the core constructs (atom, ε, concat, union, star).
///
/// * `R+ → R R*`
/// * `[R] → R | ε`
/// * `R{n,} → R ⋯ R R*` (n copies)
/// * `R[n,] → (R [TRUE]){n,}`
pub fn desugar(re: &Regex) -> Regex {
    match re {
        Regex::Atom(a) => Regex::Atom(a.clone()),
        Regex::Epsilon => Regex::Epsilon,
        Regex::Concat(a, b) => Regex::Concat(Box::new(desugar(a)), Box::new(desugar(b))),
        Regex::Union(a, b) => Regex::Union(Box::new(desugar(a)), Box::new(desugar(b))),
        Regex::Star(r) => Regex::Star(Box::new(desugar(r))),
        Regex::Plus(r) => {
            let inner = desugar(r);
            Regex::Concat(Box::new(inner.clone()), Box::new(Regex::Star(Box::new(inner))))
        }
        Regex::Optional(r) => Regex::Union(Box::new(desugar(r)), Box::new(Regex::Epsilon)),
        Regex::RepeatAtLeast(n, r) => {
            let inner = desugar(r);
            // R … R R*, right-associated.
            let mut out = Regex::Star(Box::new(inner.clone()));
            for _ in 0..*n {
                out = Regex::Concat(Box::new(inner.clone()), Box::new(out));
            }
            out
        }
        Regex::NoisyRepeatAtLeast(n, r) => {
            let unit = Regex::Concat(
                Box::new((**r).clone()),
                Box::new(Regex::Optional(Box::new(Regex::Atom(Atom::True)))),
            );
            desugar(&Regex::RepeatAtLeast(*n, Box::new(unit)))
        }
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Scanner<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, ch: u8) -> Result<(), RegexError> {
        match self.bump() {
            Some(b) if b == ch => Ok(()),
            other => Err(self.err_at(format_expect(ch, other))),
        }
    }

    fn err_at(&self, message: String) -> RegexError {
        RegexError::Parse {
            pos: self.pos.min(self.text.len()),
            message,
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos > start {
            Some(&self.text[start..self.pos])
        } else {
            None
        }
    }

    fn number(&mut self) -> Result<f64, RegexError> {
        self.skip_ws();
        let start = self.pos;
        if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse::<f64>()
            .map_err(|_| self.err_at("expected a number".to_string()))
    }

    fn integer(&mut self) -> Result<usize, RegexError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse::<usize>()
            .map_err(|_| self.err_at("expected a repeat count".to_string()))
    }

    /// True when the upcoming `[...]` is a noisy-repeat suffix, i.e. its
    /// content starts with a digit.
    fn bracket_is_repeat(&mut self) -> bool {
        self.skip_ws();
        let mut i = self.pos + 1; // past '['
        while i < self.bytes.len() && self.bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        i < self.bytes.len() && self.bytes[i].is_ascii_digit()
    }
}

fn format_expect(ch: u8, got: Option<u8>) -> String {
    match got {
        Some(b) => alloc::format!("expected `{}`, found `{}`", ch as char, b as char),
        None => alloc::format!("expected `{}`, found end of input", ch as char),
    }
}

/// Parse DSL text into an AST. Atom names are case-insensitive.
pub fn parse_regex(text: &str) -> Result<Regex, RegexError> {
    let mut sc = Scanner::new(text);
    let re = parse_union(&mut sc)?;
    sc.skip_ws();
    if sc.pos != sc.bytes.len() {
        return Err(sc.err_at(alloc::format!(
            "unexpected `{}`",
            sc.text[sc.pos..].chars().next().unwrap_or('?')
        )));
    }
    Ok(re)
}

fn parse_union(sc: &mut Scanner) -> Result<Regex, RegexError> {
    let mut out = parse_concat(sc)?;
    while sc.peek() == Some(b'|') {
        sc.bump();
        let rhs = parse_concat(sc)?;
        out = Regex::Union(Box::new(out), Box::new(rhs));
    }
    Ok(out)
}

fn starts_primary(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'(' || b == b'['
}

fn parse_concat(sc: &mut Scanner) -> Result<Regex, RegexError> {
    let mut parts = Vec::new();
    loop {
        match sc.peek() {
            Some(b) if starts_primary(b) => {
                if b == b'[' && sc.bracket_is_repeat() {
                    // A repeat suffix with nothing before it.
                    return Err(sc.err_at("repeat `[n,]` needs an expression before it".to_string()));
                }
                parts.push(parse_postfix(sc)?);
            }
            _ => break,
        }
    }
    let mut iter = parts.into_iter().rev();
    let last = iter
        .next()
        .ok_or_else(|| sc.err_at("expected an atom, `(` or `[`".to_string()))?;
    Ok(iter.fold(last, |acc, item| Regex::Concat(Box::new(item), Box::new(acc))))
}

fn parse_postfix(sc: &mut Scanner) -> Result<Regex, RegexError> {
    let mut out = parse_primary(sc)?;
    loop {
        match sc.peek() {
            Some(b'*') => {
                sc.bump();
                out = Regex::Star(Box::new(out));
            }
            Some(b'+') => {
                sc.bump();
                out = Regex::Plus(Box::new(out));
            }
            Some(b'{') => {
                sc.bump();
                let n = sc.integer()?;
                if n == 0 {
                    return Err(sc.err_at("repeat count must be at least 1".to_string()));
                }
                sc.expect(b',')?;
                sc.expect(b'}')?;
                out = Regex::RepeatAtLeast(n, Box::new(out));
            }
            Some(b'[') if sc.bracket_is_repeat() => {
                sc.bump();
                let n = sc.integer()?;
                if n == 0 {
                    return Err(sc.err_at("repeat count must be at least 1".to_string()));
                }
                sc.expect(b',')?;
                sc.expect(b']')?;
                out = Regex::NoisyRepeatAtLeast(n, Box::new(out));
            }
            _ => break,
        }
    }
    Ok(out)
}

fn parse_primary(sc: &mut Scanner) -> Result<Regex, RegexError> {
    match sc.peek() {
        Some(b'(') => {
            sc.bump();
            let inner = parse_union(sc)?;
            sc.expect(b')')?;
            Ok(inner)
        }
        Some(b'[') => {
            sc.bump();
            let inner = parse_union(sc)?;
            sc.expect(b']')?;
            Ok(Regex::Optional(Box::new(inner)))
        }
        _ => {
            let at = sc.pos;
            let name = sc
                .ident()
                .ok_or_else(|| sc.err_at("expected an atom, `(` or `[`".to_string()))?;
            let mut params = Vec::new();
            // Parameters attach without intervening whitespace: HASCOLOR(225).
            if sc.bytes.get(sc.pos) == Some(&b'(') {
                sc.bump();
                loop {
                    params.push(sc.number()?);
                    match sc.bump() {
                        Some(b',') => continue,
                        Some(b')') => break,
                        other => return Err(sc.err_at(format_expect(b')', other))),
                    }
                }
            }
            let atom = Atom::parse(name, &params).map_err(|source| RegexError::Atom { pos: at, source })?;
            Ok(Regex::Atom(atom))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn atom(a: Atom) -> Regex {
        Regex::Atom(a)
    }

    #[test]
    fn parses_plus_and_unions() {
        assert_eq!(parse_regex("PERSON+").unwrap(), Regex::Plus(Box::new(atom(Atom::Person))));
        let u = parse_regex("(BACKPACK|CHAIR|TRASHCAN)+").unwrap();
        match u {
            Regex::Plus(inner) => match *inner {
                Regex::Union(lhs, rhs) => {
                    assert_eq!(*rhs, atom(Atom::Trashcan));
                    assert!(matches!(*lhs, Regex::Union(_, _)));
                }
                other => panic!("expected union, got {other:?}"),
            },
            other => panic!("expected plus, got {other:?}"),
        }
    }

    #[test]
    fn parses_noisy_repeat_event_patterns() {
        let re = parse_regex("STATIONARYFAR+ APPROACHING[3,] STATIONARYCLOSE+").unwrap();
        match re {
            Regex::Concat(first, rest) => {
                assert_eq!(*first, Regex::Plus(Box::new(atom(Atom::StationaryFar))));
                match *rest {
                    Regex::Concat(mid, last) => {
                        assert_eq!(
                            *mid,
                            Regex::NoisyRepeatAtLeast(3, Box::new(atom(Atom::Approaching)))
                        );
                        assert_eq!(*last, Regex::Plus(Box::new(atom(Atom::StationaryClose))));
                    }
                    other => panic!("expected concat, got {other:?}"),
                }
            }
            other => panic!("expected concat, got {other:?}"),
        }
    }

    #[test]
    fn bracket_disambiguation() {
        // Optional group: content starts with a letter.
        assert_eq!(
            parse_regex("QUICK [TRUE]").unwrap(),
            Regex::Concat(
                Box::new(atom(Atom::Quick)),
                Box::new(Regex::Optional(Box::new(atom(Atom::True))))
            )
        );
        // Noisy repeat: content starts with a digit, even with spaces.
        assert_eq!(
            parse_regex("QUICK [ 2 , ]").unwrap(),
            Regex::NoisyRepeatAtLeast(2, Box::new(atom(Atom::Quick)))
        );
        assert_eq!(
            parse_regex("[QUICK]").unwrap(),
            Regex::Optional(Box::new(atom(Atom::Quick)))
        );
    }

    #[test]
    fn parses_parameterized_atoms() {
        assert_eq!(
            parse_regex("HASCOLOR(225)+").unwrap(),
            Regex::Plus(Box::new(atom(Atom::HasColor(225.0))))
        );
        assert_eq!(
            parse_regex("CARRY(0,-1)").unwrap(),
            atom(Atom::Carry([0.0, -1.0]))
        );
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_regex(""), Err(RegexError::Parse { .. })));
        assert!(matches!(parse_regex("FOO+"), Err(RegexError::Atom { .. })));
        assert!(matches!(parse_regex("QUICK{0,}"), Err(RegexError::Parse { .. })));
        assert!(matches!(parse_regex("(QUICK"), Err(RegexError::Parse { .. })));
        assert!(matches!(parse_regex("QUICK |"), Err(RegexError::Parse { .. })));
        assert!(matches!(parse_regex("[3,]"), Err(RegexError::Parse { .. })));
        assert!(matches!(parse_regex("QUICK)"), Err(RegexError::Parse { .. })));
    }

    #[test]
    fn desugar_produces_core_constructs_only() {
        fn is_core(re: &Regex) -> bool {
            match re {
                Regex::Atom(_) | Regex::Epsilon => true,
                Regex::Concat(a, b) | Regex::Union(a, b) => is_core(a) && is_core(b),
                Regex::Star(r) => is_core(r),
                _ => false,
            }
        }
        for text in [
            "PERSON+",
            "TRUE+ QUICK[3,] TRUE+",
            "STATIONARYCLOSE+ CARRYING[3,] STATIONARYCLOSE+",
            "[BLUE] RED{2,}",
            "(LEFT|RIGHT)*",
        ] {
            let re = parse_regex(text).unwrap();
            assert!(is_core(&desugar(&re)), "{text}");
        }
    }

    #[test]
    fn desugar_identities() {
        let a = atom(Atom::Quick);
        assert_eq!(
            desugar(&Regex::Plus(Box::new(a.clone()))),
            Regex::Concat(Box::new(a.clone()), Box::new(Regex::Star(Box::new(a.clone()))))
        );
        assert_eq!(
            desugar(&Regex::Optional(Box::new(a.clone()))),
            Regex::Union(Box::new(a.clone()), Box::new(Regex::Epsilon))
        );
        // R{2,} = R R R*.
        assert_eq!(
            desugar(&Regex::RepeatAtLeast(2, Box::new(a.clone()))),
            Regex::Concat(
                Box::new(a.clone()),
                Box::new(Regex::Concat(
                    Box::new(a.clone()),
                    Box::new(Regex::Star(Box::new(a.clone())))
                ))
            )
        );
        // R[1,] = (R [TRUE]) ((R [TRUE]))*.
        let unit = Regex::Concat(
            Box::new(a.clone()),
            Box::new(Regex::Union(Box::new(atom(Atom::True)), Box::new(Regex::Epsilon))),
        );
        assert_eq!(
            desugar(&Regex::NoisyRepeatAtLeast(1, Box::new(a.clone()))),
            Regex::Concat(Box::new(unit.clone()), Box::new(Regex::Star(Box::new(unit))))
        );
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "PERSON+",
            "(BACKPACK | CHAIR | TRASHCAN)+",
            "STATIONARYFAR+ APPROACHING[3,] STATIONARYCLOSE+",
            "TRUE+ QUICK[3,] TRUE+",
            "[BLUE] RED{2,}",
            "HASCOLOR(225)+ | CARRY(0,-1)*",
            "(LEFT | RIGHT) (QUICK | SLOW) BLUE",
        ] {
            let re = parse_regex(text).unwrap();
            let printed = alloc::format!("{re}");
            let reparsed = parse_regex(&printed).unwrap();
            assert_eq!(re, reparsed, "{text} -> {printed}");
        }
    }

    #[test]
    fn arity_signature() {
        assert_eq!(parse_regex("TRUE+ QUICK[3,] TRUE+").unwrap().arity().unwrap(), Some(1));
        assert_eq!(parse_regex("LEFT+").unwrap().arity().unwrap(), Some(2));
        assert_eq!(parse_regex("TRUE+").unwrap().arity().unwrap(), None);
        let mixed = parse_regex("QUICK LEFT").unwrap();
        assert!(matches!(mixed.arity(), Err(RegexError::MixedArity { first: 1, second: 2 })));
        let ok = vec![
            parse_regex("STATIONARYFAR+ APPROACHING[3,] STATIONARYCLOSE+").unwrap(),
        ];
        assert_eq!(ok[0].arity().unwrap(), Some(2));
    }
}
