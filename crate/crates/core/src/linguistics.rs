//! Sentence analysis: tokenization, parsing, and argument/role assignment.
//!
//! The grammar (one production per nonterminal; brackets mark optional
//! constituents, word classes come from the lexicon):
//!
//! ```text
//! S    -> NP VP
//! NP   -> D [A] N [PP]
//! PP   -> P NP
//! VP   -> V NP [Adv] [PP_M]
//! PP_M -> P_M NP
//! ```
//!
//! Analysis maps a sentence to the number `L` of participants (one per NP),
//! a binding `θ` from every word argument to a participant, and one role per
//! participant that is consistent with the allowed role sets of every
//! argument slot the participant fills.

use crate::lexicon::{LexicalEntry, Lexicon, Pos, Role};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Nonterminals of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonTerminal {
    S,
    Np,
    Pp,
    Vp,
    PpM,
}

impl NonTerminal {
    pub fn name(self) -> &'static str {
        match self {
            NonTerminal::S => "S",
            NonTerminal::Np => "NP",
            NonTerminal::Pp => "PP",
            NonTerminal::Vp => "VP",
            NonTerminal::PpM => "PP_M",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    NonTerm(NonTerminal),
    Leaf(Pos),
}

#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub symbol: Symbol,
    pub optional: bool,
}

#[derive(Debug, Clone)]
pub struct Production {
    pub lhs: NonTerminal,
    pub rhs: Vec<Element>,
}

/// The fixed phrase-structure grammar. Word-class membership (which lemmas
/// are N, V, …) is supplied by the lexicon, so extending the lexicon extends
/// the language without touching the grammar.
#[derive(Debug, Clone)]
pub struct Grammar {
    productions: Vec<Production>,
}

fn req(symbol: Symbol) -> Element {
    Element {
        symbol,
        optional: false,
    }
}

fn opt(symbol: Symbol) -> Element {
    Element {
        symbol,
        optional: true,
    }
}

impl Grammar {
    /// A custom grammar. The first production's left-hand side is the start
    /// symbol; every nonterminal used must have a production.
    pub fn new(productions: Vec<Production>) -> Grammar {
        Grammar { productions }
    }

    pub fn builtin() -> Grammar {
        use NonTerminal::*;
        use Symbol::*;
        Grammar {
            productions: vec![
                Production {
                    lhs: S,
                    rhs: vec![req(NonTerm(Np)), req(NonTerm(Vp))],
                },
                Production {
                    lhs: Np,
                    rhs: vec![
                        req(Leaf(Pos::Determiner)),
                        opt(Leaf(Pos::Adjective)),
                        req(Leaf(Pos::Noun)),
                        opt(NonTerm(Pp)),
                    ],
                },
                Production {
                    lhs: Pp,
                    rhs: vec![req(Leaf(Pos::Preposition)), req(NonTerm(Np))],
                },
                Production {
                    lhs: Vp,
                    rhs: vec![
                        req(Leaf(Pos::Verb)),
                        req(NonTerm(Np)),
                        opt(Leaf(Pos::Adverb)),
                        opt(NonTerm(PpM)),
                    ],
                },
                Production {
                    lhs: PpM,
                    rhs: vec![req(Leaf(Pos::MotionPreposition)), req(NonTerm(Np))],
                },
            ],
        }
    }

    pub fn production(&self, nt: NonTerminal) -> &Production {
        self.productions
            .iter()
            .find(|p| p.lhs == nt)
            .expect("every nonterminal has a production")
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseTree {
    Node {
        symbol: NonTerminal,
        children: Vec<ParseTree>,
    },
    Leaf {
        pos: Pos,
        lemma: String,
        /// Index into the token sequence.
        index: usize,
    },
}

impl ParseTree {
    /// The yield of the tree — equal to the token sequence it was parsed from.
    pub fn tokens(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ParseTree::Node { children, .. } => {
                for child in children {
                    child.collect_tokens(out);
                }
            }
            ParseTree::Leaf { lemma, .. } => out.push(lemma),
        }
    }
}

impl fmt::Display for ParseTree {
    /// Bracketed form, e.g. `S(NP(D(the) N(person)) VP(…))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseTree::Node { symbol, children } => {
                write!(f, "{}(", symbol.name())?;
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{child}")?;
                }
                f.write_str(")")
            }
            ParseTree::Leaf { pos, lemma, .. } => write!(f, "{}({})", pos.token(), lemma),
        }
    }
}

/// One word's argument binding: which participants fill its argument slots.
#[derive(Debug, Clone, PartialEq)]
pub struct WordBinding {
    pub lemma: String,
    /// Index into the token sequence.
    pub word_index: usize,
    /// Participant ids, one per argument (empty for determiners).
    pub args: Vec<usize>,
    /// For motion prepositions: the verb-object participant, used as an
    /// alternative first argument if role assignment fails with the subject.
    pub pm_alt: Option<usize>,
}

/// The sentence's participant structure: `L`, `θ`, and (after role
/// assignment) one role per participant.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentMapping {
    /// Number of participants `L` (one per NP, depth-first order).
    pub participants: usize,
    /// One binding per word, in token order.
    pub theta: Vec<WordBinding>,
    /// One role per participant; empty until `assign_roles` runs.
    pub roles: Vec<Role>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LinguisticsError {
    #[error("unknown word `{word}` at word {position}")]
    UnknownWord { position: usize, word: String },
    #[error("sentence is empty")]
    Empty,
    #[error("no parse: unexpected {} at token {position}", token_or_end(.token))]
    Parse {
        position: usize,
        token: Option<String>,
    },
    #[error("no consistent role assignment for participant P{participant}")]
    UnsatisfiableRoles { participant: usize },
}

fn token_or_end(token: &Option<String>) -> String {
    match token {
        Some(t) => alloc::format!("`{t}`"),
        None => "end of sentence".to_string(),
    }
}

/// Lowercase, strip punctuation, and greedily match the longest lexicon
/// lemma at each position (so "picked up" and "to the left of" come out as
/// single tokens).
pub fn tokenize(sentence: &str, lexicon: &Lexicon) -> Result<Vec<String>, LinguisticsError> {
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    for ch in sentence.chars() {
        if ch.is_alphabetic() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            words.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    if words.is_empty() {
        return Err(LinguisticsError::Empty);
    }

    let max_len = lexicon
        .entries()
        .map(|e| e.lemma.split(' ').count())
        .max()
        .unwrap_or(1);

    let mut tokens = Vec::new();
    let mut at = 0;
    while at < words.len() {
        let limit = max_len.min(words.len() - at);
        let mut matched = None;
        for len in (1..=limit).rev() {
            let candidate = words[at..at + len].join(" ");
            if lexicon.contains(&candidate) {
                matched = Some((candidate, len));
                break;
            }
        }
        match matched {
            Some((lemma, len)) => {
                tokens.push(lemma);
                at += len;
            }
            None => {
                return Err(LinguisticsError::UnknownWord {
                    position: at,
                    word: words[at].clone(),
                })
            }
        }
    }
    Ok(tokens)
}

/// Recursive-descent parse. Optional constituents attach greedily to the
/// nearest eligible host; on failure the error reports the furthest token
/// the parser reached.
pub fn parse(
    tokens: &[String],
    grammar: &Grammar,
    lexicon: &Lexicon,
) -> Result<ParseTree, LinguisticsError> {
    if tokens.is_empty() {
        return Err(LinguisticsError::Empty);
    }
    let mut parser = Parser {
        tokens,
        grammar,
        lexicon,
        furthest: 0,
    };
    let candidates = parser.parse_nonterm(NonTerminal::S, 0);
    candidates
        .into_iter()
        .find(|(_, end)| *end == tokens.len())
        .map(|(tree, _)| tree)
        .ok_or(LinguisticsError::Parse {
            position: parser.furthest,
            token: tokens.get(parser.furthest).cloned(),
        })
}

struct Parser<'a> {
    tokens: &'a [String],
    grammar: &'a Grammar,
    lexicon: &'a Lexicon,
    furthest: usize,
}

impl<'a> Parser<'a> {
    fn parse_nonterm(&mut self, nt: NonTerminal, at: usize) -> Vec<(ParseTree, usize)> {
        let production = self.grammar.production(nt).clone();
        self.parse_sequence(&production.rhs, at)
            .into_iter()
            .map(|(children, end)| {
                (
                    ParseTree::Node {
                        symbol: nt,
                        children,
                    },
                    end,
                )
            })
            .collect()
    }

    /// All ways to parse `elems` starting at `at`, greedy alternatives first.
    fn parse_sequence(&mut self, elems: &[Element], at: usize) -> Vec<(Vec<ParseTree>, usize)> {
        let Some((head, rest)) = elems.split_first() else {
            return vec![(Vec::new(), at)];
        };
        let mut out = Vec::new();
        for (tree, mid) in self.parse_symbol(&head.symbol, at) {
            for (mut tail, end) in self.parse_sequence(rest, mid) {
                tail.insert(0, tree.clone());
                out.push((tail, end));
            }
        }
        if head.optional {
            out.extend(self.parse_sequence(rest, at));
        }
        out
    }

    fn parse_symbol(&mut self, symbol: &Symbol, at: usize) -> Vec<(ParseTree, usize)> {
        match symbol {
            Symbol::NonTerm(nt) => self.parse_nonterm(*nt, at),
            Symbol::Leaf(pos) => {
                let matched = self
                    .tokens
                    .get(at)
                    .and_then(|token| self.lexicon.get(token))
                    .filter(|entry| entry.pos == *pos);
                match matched {
                    Some(entry) => vec![(
                        ParseTree::Leaf {
                            pos: *pos,
                            lemma: entry.lemma.clone(),
                            index: at,
                        },
                        at + 1,
                    )],
                    None => {
                        self.furthest = self.furthest.max(at);
                        Vec::new()
                    }
                }
            }
        }
    }
}

/// Derive `L` and `θ` from a parse tree.
///
/// Binding rules: nouns and adjectives take their own NP's participant; a
/// preposition inside an NP takes (host participant, PP-object participant);
/// a verb takes (subject, object); an adverb takes the participant that the
/// verb sets in motion — the object when the verb's second argument is
/// patient-typed, otherwise the subject; a motion preposition takes
/// (subject, its own object), with the verb object recorded as the fallback
/// first argument for role assignment.
pub fn assign_participants(tree: &ParseTree, lexicon: &Lexicon) -> ArgumentMapping {
    let mut walker = Walker {
        lexicon,
        next_participant: 0,
        theta: Vec::new(),
    };
    walker.walk_sentence(tree);
    let mut theta = walker.theta;
    theta.sort_by_key(|b| b.word_index);
    ArgumentMapping {
        participants: walker.next_participant,
        theta,
        roles: Vec::new(),
    }
}

struct Walker<'a> {
    lexicon: &'a Lexicon,
    next_participant: usize,
    theta: Vec<WordBinding>,
}

impl<'a> Walker<'a> {
    fn walk_sentence(&mut self, tree: &ParseTree) {
        let ParseTree::Node { children, .. } = tree else {
            return;
        };
        let subject = self.walk_np(&children[0]);
        self.walk_vp(&children[1], subject);
    }

    fn bind(&mut self, lemma: &str, index: usize, args: Vec<usize>, pm_alt: Option<usize>) {
        self.theta.push(WordBinding {
            lemma: lemma.to_string(),
            word_index: index,
            args,
            pm_alt,
        });
    }

    fn walk_np(&mut self, tree: &ParseTree) -> usize {
        let participant = self.next_participant;
        self.next_participant += 1;
        let ParseTree::Node { children, .. } = tree else {
            return participant;
        };
        for child in children {
            match child {
                ParseTree::Leaf { pos: Pos::Determiner, lemma, index } => {
                    self.bind(lemma, *index, Vec::new(), None);
                }
                ParseTree::Leaf { lemma, index, .. } => {
                    // Adjective or noun: predicated of this NP's participant.
                    self.bind(lemma, *index, vec![participant], None);
                }
                ParseTree::Node { symbol: NonTerminal::Pp, children } => {
                    let (leaf, object_np) = (&children[0], &children[1]);
                    let object = self.walk_np(object_np);
                    if let ParseTree::Leaf { lemma, index, .. } = leaf {
                        self.bind(lemma, *index, vec![participant, object], None);
                    }
                }
                _ => {}
            }
        }
        participant
    }

    fn walk_vp(&mut self, tree: &ParseTree, subject: usize) {
        let ParseTree::Node { children, .. } = tree else {
            return;
        };
        let mut verb: Option<(&str, usize)> = None;
        let mut object: Option<usize> = None;
        for child in children {
            match child {
                ParseTree::Leaf { pos: Pos::Verb, lemma, index } => {
                    verb = Some((lemma, *index));
                }
                ParseTree::Node { symbol: NonTerminal::Np, .. } => {
                    let obj = self.walk_np(child);
                    object = Some(obj);
                    if let Some((lemma, index)) = verb {
                        self.bind(lemma, index, vec![subject, obj], None);
                    }
                }
                ParseTree::Leaf { pos: Pos::Adverb, lemma, index } => {
                    let target = if self.verb_sets_object_in_motion(verb) {
                        object.unwrap_or(subject)
                    } else {
                        subject
                    };
                    self.bind(lemma, *index, vec![target], None);
                }
                ParseTree::Node { symbol: NonTerminal::PpM, children } => {
                    let (leaf, object_np) = (&children[0], &children[1]);
                    let pm_object = self.walk_np(object_np);
                    if let ParseTree::Leaf { lemma, index, .. } = leaf {
                        self.bind(lemma, *index, vec![subject, pm_object], object);
                    }
                }
                _ => {}
            }
        }
    }

    /// True when the verb's second argument may be a patient — such verbs
    /// (carry, pick up, put down) move their object while the subject stays
    /// put, so manner adverbs describe the object's motion.
    fn verb_sets_object_in_motion(&self, verb: Option<(&str, usize)>) -> bool {
        verb.and_then(|(lemma, _)| self.lexicon.get(lemma))
            .map(|entry: &LexicalEntry| {
                entry
                    .role_sets
                    .get(1)
                    .is_some_and(|set| set.contains(&Role::Patient))
            })
            .unwrap_or(false)
    }
}

/// Choose one role per participant, consistent with every argument slot the
/// participant fills. Candidates are the intersection of the allowed role
/// sets over those slots; each participant takes the first candidate in the
/// preference order (agent, patient, source, goal, referent). If no
/// assignment exists and the sentence has a motion preposition, its first
/// argument is rebound from the subject to the verb object and assignment is
/// retried.
pub fn assign_roles(
    mapping: &mut ArgumentMapping,
    lexicon: &Lexicon,
) -> Result<(), LinguisticsError> {
    match solve_roles(mapping, lexicon, None) {
        Ok(roles) => {
            mapping.roles = roles;
            Ok(())
        }
        Err(first_failure) => {
            let flips: Vec<usize> = (0..mapping.theta.len())
                .filter(|&w| mapping.theta[w].pm_alt.is_some())
                .collect();
            for flip in flips {
                if let Ok(roles) = solve_roles(mapping, lexicon, Some(flip)) {
                    let alt = mapping.theta[flip].pm_alt.unwrap();
                    mapping.theta[flip].args[0] = alt;
                    mapping.roles = roles;
                    return Ok(());
                }
            }
            Err(first_failure)
        }
    }
}

fn solve_roles(
    mapping: &ArgumentMapping,
    lexicon: &Lexicon,
    flip: Option<usize>,
) -> Result<Vec<Role>, LinguisticsError> {
    let mut candidates: Vec<Vec<Role>> = vec![Role::ALL.to_vec(); mapping.participants];
    for (w, binding) in mapping.theta.iter().enumerate() {
        let Some(entry) = lexicon.get(&binding.lemma) else {
            continue;
        };
        for (slot, &participant) in binding.args.iter().enumerate() {
            let participant = if slot == 0 && flip == Some(w) {
                binding.pm_alt.unwrap()
            } else {
                participant
            };
            let allowed = &entry.role_sets[slot];
            candidates[participant].retain(|role| allowed.contains(role));
        }
    }
    let mut roles = Vec::with_capacity(mapping.participants);
    for (participant, cands) in candidates.iter().enumerate() {
        match cands.first() {
            Some(&role) => roles.push(role),
            None => return Err(LinguisticsError::UnsatisfiableRoles { participant }),
        }
    }
    Ok(roles)
}

/// Full analysis of one sentence: tokens, parse tree, and argument mapping
/// with roles assigned.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceAnalysis {
    pub tokens: Vec<String>,
    pub tree: ParseTree,
    pub mapping: ArgumentMapping,
}

pub fn analyze(sentence: &str, lexicon: &Lexicon) -> Result<SentenceAnalysis, LinguisticsError> {
    let tokens = tokenize(sentence, lexicon)?;
    analyze_tokens(&tokens, &Grammar::builtin(), lexicon)
}

/// [`analyze`] for an already-tokenized lemma sequence under an arbitrary
/// grammar.
pub fn analyze_tokens(
    tokens: &[String],
    grammar: &Grammar,
    lexicon: &Lexicon,
) -> Result<SentenceAnalysis, LinguisticsError> {
    let tree = parse(tokens, grammar, lexicon)?;
    let mut mapping = assign_participants(&tree, lexicon);
    assign_roles(&mut mapping, lexicon)?;
    Ok(SentenceAnalysis {
        tokens: tokens.to_vec(),
        tree,
        mapping,
    })
}
