//! Finite-state recognizers compiled from predicate regexes.
//!
//! Compilation desugars the AST to the core constructs, builds the position
//! (Glushkov) automaton, and then merges forward-bisimilar states: states
//! with the same atom, the same acceptance flag, and successor sets that fall
//! into the same classes are collapsed. The quotient preserves the language
//! exactly and undoes the state blow-up that desugaring introduces — `R+`
//! compiles to the same machine as `R` with a self-loop rather than two
//! copies of `R`.
//!
//! A recognizer with states `0..K` doubles as a word lattice: being in state
//! `k` at frame `t` requires `atom(k)` to hold at `t` (output cost 0,
//! otherwise -inf), and a transition `k -> k'` is allowed when
//! `k'` is in `successors(k)` (cost 0, otherwise -inf). Paths start in an
//! initial state and must end in an accepting state.

use crate::features::Atom;
use crate::regex::{desugar, Regex, RegexError};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct Recognizer {
    atoms: Vec<Atom>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    follow: Vec<Vec<usize>>,
    accepts_empty: bool,
    arity: Option<usize>,
}

impl Recognizer {
    /// Compile a regex into a minimized recognizer.
    pub fn compile(re: &Regex) -> Result<Recognizer, RegexError> {
        let arity = re.arity()?;
        let core = desugar(re);

        let mut atoms = Vec::new();
        let mut follow: Vec<BTreeSet<usize>> = Vec::new();
        let info = glushkov(&core, &mut atoms, &mut follow);

        let quotient = minimize(&atoms, &follow, &info.last);
        let class_count = quotient.count;
        let class_of = quotient.class_of;

        let mut rep = vec![usize::MAX; class_count];
        for (p, &c) in class_of.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = p;
            }
        }

        let mut q_follow = vec![BTreeSet::new(); class_count];
        let mut q_accepting = vec![false; class_count];
        for (p, &c) in class_of.iter().enumerate() {
            for &s in &follow[p] {
                q_follow[c].insert(class_of[s]);
            }
            if info.last.contains(&p) {
                q_accepting[c] = true;
            }
        }
        let initial: Vec<usize> = info
            .first
            .iter()
            .map(|&p| class_of[p])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        Ok(Recognizer {
            atoms: rep.iter().map(|&p| atoms[p].clone()).collect(),
            initial,
            accepting: q_accepting,
            follow: q_follow
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            accepts_empty: info.nullable,
            arity,
        })
    }

    pub fn num_states(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, state: usize) -> &Atom {
        &self.atoms[state]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn initial_states(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_initial(&self, state: usize) -> bool {
        self.initial.binary_search(&state).is_ok()
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// Successor states, sorted ascending.
    pub fn successors(&self, state: usize) -> &[usize] {
        &self.follow[state]
    }

    pub fn accepts_empty(&self) -> bool {
        self.accepts_empty
    }

    /// Arity shared by all non-TRUE atoms, `None` when only TRUE occurs.
    pub fn arity(&self) -> Option<usize> {
        self.arity
    }

    /// Run the recognizer over `len` frames. `holds(atom, t)` reports whether
    /// the atom is satisfied at frame `t` (0-based).
    pub fn accepts<F: FnMut(&Atom, usize) -> bool>(&self, len: usize, mut holds: F) -> bool {
        if len == 0 {
            return self.accepts_empty;
        }
        let k = self.num_states();
        let mut current = vec![false; k];
        for &s in &self.initial {
            if holds(&self.atoms[s], 0) {
                current[s] = true;
            }
        }
        for t in 1..len {
            let mut next = vec![false; k];
            for (s, &live) in current.iter().enumerate() {
                if !live {
                    continue;
                }
                for &succ in &self.follow[s] {
                    if !next[succ] && holds(&self.atoms[succ], t) {
                        next[succ] = true;
                    }
                }
            }
            current = next;
        }
        current
            .iter()
            .zip(&self.accepting)
            .any(|(&live, &acc)| live && acc)
    }
}

struct GlushkovInfo {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

fn glushkov(re: &Regex, atoms: &mut Vec<Atom>, follow: &mut Vec<BTreeSet<usize>>) -> GlushkovInfo {
    match re {
        Regex::Atom(a) => {
            let p = atoms.len();
            atoms.push(a.clone());
            follow.push(BTreeSet::new());
            GlushkovInfo {
                nullable: false,
                first: BTreeSet::from([p]),
                last: BTreeSet::from([p]),
            }
        }
        Regex::Epsilon => GlushkovInfo {
            nullable: true,
            first: BTreeSet::new(),
            last: BTreeSet::new(),
        },
        Regex::Concat(a, b) => {
            let ia = glushkov(a, atoms, follow);
            let ib = glushkov(b, atoms, follow);
            for &p in &ia.last {
                follow[p].extend(ib.first.iter().copied());
            }
            let mut first = ia.first.clone();
            if ia.nullable {
                first.extend(ib.first.iter().copied());
            }
            let mut last = ib.last.clone();
            if ib.nullable {
                last.extend(ia.last.iter().copied());
            }
            GlushkovInfo {
                nullable: ia.nullable && ib.nullable,
                first,
                last,
            }
        }
        Regex::Union(a, b) => {
            let ia = glushkov(a, atoms, follow);
            let ib = glushkov(b, atoms, follow);
            GlushkovInfo {
                nullable: ia.nullable || ib.nullable,
                first: ia.first.union(&ib.first).copied().collect(),
                last: ia.last.union(&ib.last).copied().collect(),
            }
        }
        Regex::Star(r) => {
            let ir = glushkov(r, atoms, follow);
            for &p in &ir.last {
                follow[p].extend(ir.first.iter().copied());
            }
            GlushkovInfo {
                nullable: true,
                first: ir.first,
                last: ir.last,
            }
        }
        // `compile` desugars first; these are unreachable from public entry
        // points but handled for completeness.
        other => {
            let core = desugar(other);
            glushkov(&core, atoms, follow)
        }
    }
}

struct Quotient {
    class_of: Vec<usize>,
    count: usize,
}

/// Atom identity key for partitioning (f64 parameters compared bitwise).
fn atom_key(a: &Atom) -> (String, Vec<u64>) {
    use crate::features::Atom::*;
    let bits = match a {
        HasColor(h) => vec![h.to_bits()],
        NoJitter(v) | InAngle(v) | InDirection(v) | Carry(v) => {
            vec![v[0].to_bits(), v[1].to_bits()]
        }
        _ => Vec::new(),
    };
    (String::from(a.name()), bits)
}

fn minimize(atoms: &[Atom], follow: &[BTreeSet<usize>], last: &BTreeSet<usize>) -> Quotient {
    let m = atoms.len();
    if m == 0 {
        return Quotient {
            class_of: Vec::new(),
            count: 0,
        };
    }

    // Seed partition: same atom, same acceptance flag.
    let mut class_of = vec![0usize; m];
    let mut count;
    {
        let mut ids: BTreeMap<(String, Vec<u64>, bool), usize> = BTreeMap::new();
        let mut next = 0usize;
        for p in 0..m {
            let key = {
                let (name, bits) = atom_key(&atoms[p]);
                (name, bits, last.contains(&p))
            };
            let id = *ids.entry(key).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            class_of[p] = id;
        }
        count = next;
    }

    // Refine on successor-class signatures until stable. New ids are assigned
    // in position order, so the numbering is deterministic.
    loop {
        let mut ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut next = 0usize;
        let mut refined = vec![0usize; m];
        for p in 0..m {
            let succ: BTreeSet<usize> = follow[p].iter().map(|&s| class_of[s]).collect();
            let key = (class_of[p], succ.into_iter().collect::<Vec<_>>());
            let id = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    let id = next;
                    ids.insert(key, id);
                    next += 1;
                    id
                }
            };
            refined[p] = id;
        }
        if next == count {
            class_of = refined;
            break;
        }
        class_of = refined;
        count = next;
    }

    // Renumber classes by first occurrence so state 0 is the earliest position.
    let mut remap = vec![usize::MAX; count];
    let mut next = 0usize;
    for &c in &class_of {
        if remap[c] == usize::MAX {
            remap[c] = next;
            next += 1;
        }
    }
    for c in class_of.iter_mut() {
        *c = remap[*c];
    }
    Quotient {
        class_of,
        count: next,
    }
}
