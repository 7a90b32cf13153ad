//! The lexicon: lemmas with parts of speech, argument role sets, and
//! compiled recognizers.
//!
//! Entries are described in a line-oriented DSL:
//!
//! ```text
//! # comment
//! min_hold_frames = 3
//! lemma | pos | roles(arg1); roles(arg2) | regex
//! ```
//!
//! `pos` is one of `N`, `A`, `V`, `Adv`, `P`, `P_M`, `D`. Role fields list
//! role names separated by commas, one field per argument separated by `;`;
//! `any` abbreviates all five roles. Determiners (`D`) take `-` for both the
//! role and regex fields. Inside regexes the token `[hold,]` is replaced by
//! the current `min_hold_frames` value, so event words share one minimum
//! hold-duration setting.

use crate::recognizer::Recognizer;
use crate::regex::{parse_regex, Regex, RegexError};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Parts of speech of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Adjective,
    Verb,
    Adverb,
    Preposition,
    MotionPreposition,
    Determiner,
}

impl Pos {
    pub fn token(self) -> &'static str {
        match self {
            Pos::Noun => "N",
            Pos::Adjective => "A",
            Pos::Verb => "V",
            Pos::Adverb => "Adv",
            Pos::Preposition => "P",
            Pos::MotionPreposition => "P_M",
            Pos::Determiner => "D",
        }
    }

    pub fn parse(token: &str) -> Option<Pos> {
        Some(match token {
            "N" => Pos::Noun,
            "A" => Pos::Adjective,
            "V" => Pos::Verb,
            "Adv" => Pos::Adverb,
            "P" => Pos::Preposition,
            "P_M" => Pos::MotionPreposition,
            "D" => Pos::Determiner,
            _ => return None,
        })
    }

    /// Number of participant arguments a word of this class takes. Fixed by
    /// the word's position in the grammar.
    pub fn arity(self) -> usize {
        match self {
            Pos::Determiner => 0,
            Pos::Noun | Pos::Adjective | Pos::Adverb => 1,
            Pos::Verb | Pos::Preposition | Pos::MotionPreposition => 2,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Participant roles, in preference order: when several roles are possible
/// the earliest one listed here is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Agent,
    Patient,
    Source,
    Goal,
    Referent,
}

impl Role {
    pub const ALL: [Role; 5] = [
        Role::Agent,
        Role::Patient,
        Role::Source,
        Role::Goal,
        Role::Referent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Agent => "agent",
            Role::Patient => "patient",
            Role::Source => "source",
            Role::Goal => "goal",
            Role::Referent => "referent",
        }
    }

    pub fn parse(name: &str) -> Option<Role> {
        Some(match name {
            "agent" => Role::Agent,
            "patient" => Role::Patient,
            "source" => Role::Source,
            "goal" => Role::Goal,
            "referent" => Role::Referent,
            _ => return None,
        })
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct LexicalEntry {
    pub lemma: String,
    pub pos: Pos,
    /// One role set per argument; `role_sets.len()` is the arity.
    pub role_sets: Vec<BTreeSet<Role>>,
    /// Source regex, absent for determiners.
    pub regex: Option<Regex>,
    /// Compiled recognizer, absent for determiners.
    pub recognizer: Option<Recognizer>,
}

impl LexicalEntry {
    pub fn arity(&self) -> usize {
        self.role_sets.len()
    }
}

impl PartialEq for LexicalEntry {
    /// Recognizers are derived from the regex, so they are not compared.
    fn eq(&self, other: &Self) -> bool {
        self.lemma == other.lemma
            && self.pos == other.pos
            && self.role_sets == other.role_sets
            && self.regex == other.regex
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LexiconError {
    #[error("line {line}: expected `lemma | pos | roles | regex` ({detail})")]
    Format { line: usize, detail: String },
    #[error("line {line}: unknown part of speech `{token}`")]
    UnknownPos { line: usize, token: String },
    #[error("line {line}: unknown role `{token}`")]
    UnknownRole { line: usize, token: String },
    #[error("line {line}: `{lemma}` ({pos}) takes {expected} argument(s) but {found} role set(s) are given")]
    RoleArity {
        line: usize,
        lemma: String,
        pos: Pos,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: empty role set for `{lemma}`")]
    EmptyRoleSet { line: usize, lemma: String },
    #[error("line {line}: regex atoms take {regex} argument(s) but `{lemma}` takes {entry}")]
    ArityMismatch {
        line: usize,
        lemma: String,
        entry: usize,
        regex: usize,
    },
    #[error("line {line}: duplicate lemma `{lemma}`")]
    DuplicateLemma { line: usize, lemma: String },
    #[error("line {line}: bad directive ({detail})")]
    Directive { line: usize, detail: String },
    #[error("line {line}: {source}")]
    Regex {
        line: usize,
        #[source]
        source: RegexError,
    },
}

/// An immutable map from lemma to entry plus lexicon-wide settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexicalEntry>,
    min_hold_frames: usize,
}

pub const DEFAULT_MIN_HOLD_FRAMES: usize = 3;

const BUILTIN_DSL: &str = include_str!("../../../lexicon/builtin.lex");

impl Lexicon {
    /// The built-in lexicon: 17 lexical items (5 nouns, 2 adjectives,
    /// 4 verbs, 2 adverbs, 2 spatial-relation prepositions, 2 motion
    /// prepositions) plus the determiners *an* and *the*.
    pub fn builtin() -> Lexicon {
        Lexicon::from_dsl(BUILTIN_DSL).expect("built-in lexicon parses")
    }

    /// Parse a DSL document into a standalone lexicon.
    pub fn from_dsl(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lexicon = Lexicon {
            entries: BTreeMap::new(),
            min_hold_frames: DEFAULT_MIN_HOLD_FRAMES,
        };
        lexicon.ingest(text, false)?;
        Ok(lexicon)
    }

    /// Parse a DSL document and merge its entries over this lexicon.
    /// Lemmas may override existing entries; duplicates within `text`
    /// itself are rejected.
    pub fn extend_from_dsl(&mut self, text: &str) -> Result<(), LexiconError> {
        self.ingest(text, true)
    }

    fn ingest(&mut self, text: &str, allow_override: bool) -> Result<(), LexiconError> {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("min_hold_frames") {
                let value = rest.trim().strip_prefix('=').map(str::trim).ok_or_else(|| {
                    LexiconError::Directive {
                        line: line_no,
                        detail: "expected `min_hold_frames = <count>`".to_string(),
                    }
                })?;
                self.min_hold_frames =
                    value
                        .parse::<usize>()
                        .map_err(|_| LexiconError::Directive {
                            line: line_no,
                            detail: alloc::format!("`{value}` is not a count"),
                        })?;
                continue;
            }
            let entry = parse_entry(line, line_no, self.min_hold_frames)?;
            if !seen.insert(entry.lemma.clone())
                || (!allow_override && self.entries.contains_key(&entry.lemma))
            {
                return Err(LexiconError::DuplicateLemma {
                    line: line_no,
                    lemma: entry.lemma,
                });
            }
            self.entries.insert(entry.lemma.clone(), entry);
        }
        Ok(())
    }

    /// Serialize to DSL text that parses back to an equal lexicon.
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        out.push_str("min_hold_frames = ");
        out.push_str(&self.min_hold_frames.to_string());
        out.push('\n');
        let any: BTreeSet<Role> = Role::ALL.iter().copied().collect();
        for entry in self.entries.values() {
            out.push_str(&entry.lemma);
            out.push_str(" | ");
            out.push_str(entry.pos.token());
            out.push_str(" | ");
            if entry.role_sets.is_empty() {
                out.push('-');
            } else {
                for (i, set) in entry.role_sets.iter().enumerate() {
                    if i > 0 {
                        out.push_str("; ");
                    }
                    if *set == any {
                        out.push_str("any");
                    } else {
                        for (j, role) in set.iter().enumerate() {
                            if j > 0 {
                                out.push_str(", ");
                            }
                            out.push_str(role.name());
                        }
                    }
                }
            }
            out.push_str(" | ");
            match &entry.regex {
                Some(re) => out.push_str(&alloc::format!("{re}")),
                None => out.push('-'),
            }
            out.push('\n');
        }
        out
    }

    pub fn get(&self, lemma: &str) -> Option<&LexicalEntry> {
        self.entries.get(lemma)
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.entries.contains_key(lemma)
    }

    /// All entries in lemma order.
    pub fn entries(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries.values()
    }

    /// Lexical items proper — everything except determiners.
    pub fn lexical_entry_count(&self) -> usize {
        self.entries
            .values()
            .filter(|e| e.pos != Pos::Determiner)
            .count()
    }

    pub fn total_entry_count(&self) -> usize {
        self.entries.len()
    }

    /// Minimum repetitions substituted for `[hold,]` in loaded regexes.
    pub fn min_hold_frames(&self) -> usize {
        self.min_hold_frames
    }
}

fn parse_entry(line: &str, line_no: usize, hold: usize) -> Result<LexicalEntry, LexiconError> {
    // The regex field may itself contain `|`, so only the first three
    // delimiters split fields.
    let fields: Vec<&str> = line.splitn(4, '|').map(str::trim).collect();
    if fields.len() != 4 {
        return Err(LexiconError::Format {
            line: line_no,
            detail: alloc::format!("found {} field(s)", fields.len()),
        });
    }
    let lemma = normalize_lemma(fields[0]);
    if lemma.is_empty() {
        return Err(LexiconError::Format {
            line: line_no,
            detail: "empty lemma".to_string(),
        });
    }
    let pos = Pos::parse(fields[1]).ok_or_else(|| LexiconError::UnknownPos {
        line: line_no,
        token: fields[1].to_string(),
    })?;

    let role_sets = parse_role_sets(fields[2], line_no, &lemma)?;
    if role_sets.len() != pos.arity() {
        return Err(LexiconError::RoleArity {
            line: line_no,
            lemma,
            pos,
            expected: pos.arity(),
            found: role_sets.len(),
        });
    }

    let (regex, recognizer) = if pos == Pos::Determiner {
        if fields[3] != "-" {
            return Err(LexiconError::Format {
                line: line_no,
                detail: "determiners take `-` for the regex field".to_string(),
            });
        }
        (None, None)
    } else {
        let text = fields[3].replace("[hold,]", &alloc::format!("[{hold},]"));
        let regex = parse_regex(&text).map_err(|source| LexiconError::Regex {
            line: line_no,
            source,
        })?;
        if let Some(regex_arity) = regex.arity().map_err(|source| LexiconError::Regex {
            line: line_no,
            source,
        })? {
            if regex_arity != pos.arity() {
                return Err(LexiconError::ArityMismatch {
                    line: line_no,
                    lemma,
                    entry: pos.arity(),
                    regex: regex_arity,
                });
            }
        }
        let recognizer = Recognizer::compile(&regex).map_err(|source| LexiconError::Regex {
            line: line_no,
            source,
        })?;
        (Some(regex), Some(recognizer))
    };

    Ok(LexicalEntry {
        lemma,
        pos,
        role_sets,
        regex,
        recognizer,
    })
}

fn normalize_lemma(raw: &str) -> String {
    let mut out = String::new();
    for word in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        for ch in word.chars() {
            out.extend(ch.to_lowercase());
        }
    }
    out
}

fn parse_role_sets(
    field: &str,
    line_no: usize,
    lemma: &str,
) -> Result<Vec<BTreeSet<Role>>, LexiconError> {
    if field == "-" {
        return Ok(Vec::new());
    }
    let mut sets = Vec::new();
    for group in field.split(';') {
        let group = group.trim();
        let mut set = BTreeSet::new();
        if group == "any" {
            set.extend(Role::ALL.iter().copied());
        } else {
            for token in group.split(',') {
                let token = token.trim();
                if token.is_empty() {
                    continue;
                }
                let role = Role::parse(token).ok_or_else(|| LexiconError::UnknownRole {
                    line: line_no,
                    token: token.to_string(),
                })?;
                set.insert(role);
            }
        }
        if set.is_empty() {
            return Err(LexiconError::EmptyRoleSet {
                line: line_no,
                lemma: lemma.to_string(),
            });
        }
        sets.push(set);
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn any() -> BTreeSet<Role> {
        Role::ALL.iter().copied().collect()
    }

    #[test]
    fn builtin_inventory() {
        let lex = Lexicon::builtin();
        assert_eq!(lex.lexical_entry_count(), 17);
        assert_eq!(lex.total_entry_count(), 19);
        let count = |pos: Pos| lex.entries().filter(|e| e.pos == pos).count();
        assert_eq!(count(Pos::Noun), 5);
        assert_eq!(count(Pos::Adjective), 2);
        assert_eq!(count(Pos::Verb), 4);
        assert_eq!(count(Pos::Adverb), 2);
        assert_eq!(count(Pos::Preposition), 2);
        assert_eq!(count(Pos::MotionPreposition), 2);
        assert_eq!(count(Pos::Determiner), 2);
        assert_eq!(lex.min_hold_frames(), 3);
    }

    #[test]
    fn builtin_role_sets() {
        let lex = Lexicon::builtin();

        let approached = lex.get("approached").unwrap();
        assert_eq!(approached.arity(), 2);
        assert_eq!(approached.role_sets[0], BTreeSet::from([Role::Agent]));
        assert_eq!(approached.role_sets[1], BTreeSet::from([Role::Goal]));

        let person = lex.get("person").unwrap();
        assert_eq!(person.arity(), 1);
        assert_eq!(person.role_sets[0], any());

        let left = lex.get("to the left of").unwrap();
        assert_eq!(left.arity(), 2);
        assert_eq!(left.role_sets[0], any());
        assert_eq!(left.role_sets[1], BTreeSet::from([Role::Referent]));

        let towards = lex.get("towards").unwrap();
        assert_eq!(
            towards.role_sets[0],
            BTreeSet::from([Role::Agent, Role::Patient])
        );
        assert_eq!(towards.role_sets[1], BTreeSet::from([Role::Goal]));

        let away = lex.get("away from").unwrap();
        assert_eq!(away.role_sets[1], BTreeSet::from([Role::Source]));

        for d in ["an", "the"] {
            let det = lex.get(d).unwrap();
            assert_eq!(det.arity(), 0);
            assert!(det.regex.is_none());
            assert!(det.recognizer.is_none());
        }
    }

    #[test]
    fn builtin_recognizer_state_counts() {
        let lex = Lexicon::builtin();
        let states = |lemma: &str| lex.get(lemma).unwrap().recognizer.as_ref().unwrap().num_states();
        // Static words collapse to one state; the class disjunction keeps one
        // state per class; event words need several states to sequence their
        // phases.
        for lemma in [
            "person",
            "backpack",
            "chair",
            "trash can",
            "blue",
            "red",
            "to the left of",
            "to the right of",
        ] {
            assert_eq!(states(lemma), 1, "{lemma}");
        }
        assert_eq!(states("object"), 3);
        for lemma in [
            "approached",
            "carried",
            "picked up",
            "put down",
            "towards",
            "away from",
            "quickly",
            "slowly",
        ] {
            assert!(states(lemma) >= 2, "{lemma} has {} states", states(lemma));
        }
    }

    #[test]
    fn save_load_round_trip() {
        let lex = Lexicon::builtin();
        let text = lex.to_dsl();
        let reloaded = Lexicon::from_dsl(&text).unwrap();
        assert_eq!(lex, reloaded);
    }

    #[test]
    fn merge_adds_entries_over_builtins() {
        let mut lex = Lexicon::builtin();
        lex.extend_from_dsl("ball | N | any | BACKPACK+\n").unwrap();
        assert_eq!(lex.lexical_entry_count(), 18);
        let ball = lex.get("ball").unwrap();
        assert_eq!(ball.pos, Pos::Noun);
        assert_eq!(ball.role_sets, vec![any()]);

        // Overriding a built-in is allowed and replaces it.
        lex.extend_from_dsl("red | A | any | HASCOLOR(10)+\n").unwrap();
        assert_eq!(lex.lexical_entry_count(), 18);
        assert_eq!(
            lex.get("red").unwrap().regex.as_ref().unwrap(),
            &parse_regex("HASCOLOR(10)+").unwrap()
        );
    }

    #[test]
    fn hold_substitution_uses_directive() {
        let lex = Lexicon::from_dsl(
            "min_hold_frames = 2\nnudged | V | agent; patient | APPROACHING[hold,]\n",
        )
        .unwrap();
        let re = lex.get("nudged").unwrap().regex.as_ref().unwrap();
        assert_eq!(re, &parse_regex("APPROACHING[2,]").unwrap());
    }

    #[test]
    fn errors_carry_line_numbers() {
        // Duplicate lemma within one document.
        let err = Lexicon::from_dsl("ball | N | any | PERSON+\nball | N | any | PERSON+\n")
            .unwrap_err();
        assert_eq!(
            err,
            LexiconError::DuplicateLemma {
                line: 2,
                lemma: "ball".to_string()
            }
        );

        // Role-set count must match the part of speech.
        let err = Lexicon::from_dsl("ball | N | any; agent | PERSON+\n").unwrap_err();
        assert!(matches!(
            err,
            LexiconError::RoleArity {
                line: 1,
                expected: 1,
                found: 2,
                ..
            }
        ));

        // Regex atom arity must match the word's arity.
        let err = Lexicon::from_dsl("ball | N | any | LEFT+\n").unwrap_err();
        assert!(matches!(
            err,
            LexiconError::ArityMismatch {
                line: 1,
                entry: 1,
                regex: 2,
                ..
            }
        ));

        // Unknown part of speech and unknown role.
        assert!(matches!(
            Lexicon::from_dsl("ball | Z | any | PERSON+\n").unwrap_err(),
            LexiconError::UnknownPos { line: 1, .. }
        ));
        assert!(matches!(
            Lexicon::from_dsl("ball | N | master | PERSON+\n").unwrap_err(),
            LexiconError::UnknownRole { line: 1, .. }
        ));

        // Regex errors surface with the line.
        assert!(matches!(
            Lexicon::from_dsl("ball | N | any | PERSON+++++(\n").unwrap_err(),
            LexiconError::Regex { line: 1, .. }
        ));

        // Determiners must not carry a regex.
        assert!(matches!(
            Lexicon::from_dsl("a | D | - | PERSON+\n").unwrap_err(),
            LexiconError::Format { line: 1, .. }
        ));

        // Bad directive.
        assert!(matches!(
            Lexicon::from_dsl("min_hold_frames = soon\n").unwrap_err(),
            LexiconError::Directive { line: 1, .. }
        ));
    }

    #[test]
    fn multiword_lemmas_normalize() {
        let lex = Lexicon::builtin();
        assert!(lex.contains("trash can"));
        assert!(lex.contains("to the left of"));
        assert!(lex.contains("picked up"));
        let mut user = Lexicon::builtin();
        user.extend_from_dsl("Trash   Can | N | any | TRASHCAN+\n").unwrap();
        // Normalizes to the same lemma and overrides.
        assert_eq!(user.lexical_entry_count(), 17);
    }
}
