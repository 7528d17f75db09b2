//! The configuration automaton of an event structure, and an inclusion
//! oracle for such automata based on on-the-fly subset construction.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::label::{Label, Language, Word};
use crate::semantics::all_configurations;
use crate::structure::{EventId, EventStructure};

/// Default bound on product states explored by [`nfa_inclusion`].
pub const DEFAULT_SUBSET_CAP: usize = 1 << 14;

/// One state per configuration. State 0 is the empty configuration, which
/// is unreachable; state 1 is {⊥}. Accepting states are the maximal
/// configurations (after ε-removal: those whose ε-closure reaches one).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    /// Member sets the states came from; empty for parsed automata.
    pub tags: Vec<Vec<EventId>>,
    pub state_count: usize,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    /// Sorted `(source, label, target)` triples.
    pub transitions: Vec<(usize, Label, usize)>,
}

impl Nfa {
    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.transitions.iter().map(|t| t.1).collect()
    }

    fn successors(&self) -> Vec<Vec<(Label, usize)>> {
        let mut out = vec![Vec::new(); self.state_count];
        for &(p, l, q) in &self.transitions {
            out[p].push((l, q));
        }
        out
    }

    pub fn reachable_count(&self) -> usize {
        let succ = self.successors();
        let mut seen = vec![false; self.state_count];
        let mut work = vec![self.initial];
        seen[self.initial] = true;
        while let Some(p) = work.pop() {
            for &(_, q) in &succ[p] {
                if !seen[q] {
                    seen[q] = true;
                    work.push(q);
                }
            }
        }
        seen.iter().filter(|&&b| b).count()
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indegree = vec![0usize; self.state_count];
        for &(_, _, q) in &self.transitions {
            indegree[q] += 1;
        }
        let succ = self.successors();
        let mut ready: Vec<usize> = (0..self.state_count).filter(|&q| indegree[q] == 0).collect();
        let mut done = 0;
        while let Some(p) = ready.pop() {
            done += 1;
            for &(_, q) in &succ[p] {
                indegree[q] -= 1;
                if indegree[q] == 0 {
                    ready.push(q);
                }
            }
        }
        done == self.state_count
    }

    /// Plain-text form: `states:`, `initial:` and `accepting:` headers, then
    /// one `src label dst` line per transition.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "states: {}", self.state_count).unwrap();
        writeln!(out, "initial: {}", self.initial).unwrap();
        let acc: Vec<String> = self.accepting.iter().map(|q| q.to_string()).collect();
        writeln!(out, "accepting: {}", acc.join(" ")).unwrap();
        for (p, l, q) in &self.transitions {
            writeln!(out, "{p} {l} {q}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Nfa> {
        let mut states = None;
        let mut initial = None;
        let mut accepting = BTreeSet::new();
        let mut transitions = Vec::new();
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("expected a state number, found {s:?}")))
        };
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix("states:") {
                states = Some(num(rest.trim())?);
            } else if let Some(rest) = line.strip_prefix("initial:") {
                initial = Some(num(rest.trim())?);
            } else if let Some(rest) = line.strip_prefix("accepting:") {
                for q in rest.split_whitespace() {
                    accepting.insert(num(q)?);
                }
            } else {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("bad transition line {line:?}")));
                }
                transitions.push((num(parts[0])?, Label::new(parts[1]), num(parts[2])?));
            }
        }
        let initial = initial.ok_or_else(|| Error::Parse("missing initial state".into()))?;
        let max_seen = transitions
            .iter()
            .flat_map(|t| [t.0, t.2])
            .chain(accepting.iter().copied())
            .chain([initial])
            .max()
            .unwrap_or(0);
        let state_count = states.unwrap_or(max_seen + 1);
        if max_seen >= state_count {
            return Err(Error::Parse(format!("state {max_seen} out of range")));
        }
        transitions.sort();
        transitions.dedup();
        Ok(Nfa {
            tags: Vec::new(),
            state_count,
            initial,
            accepting,
            transitions,
        })
    }
}

/// Encodes `s` as its configuration automaton, with ε-transitions removed.
pub fn encode(s: &EventStructure, max_configurations: usize) -> Result<Nfa> {
    let configs = all_configurations(s, max_configurations)?;
    let index: HashMap<_, usize> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i + 1))
        .collect();
    let state_count = configs.len() + 1;
    let mut labeled = Vec::new();
    let mut silent = vec![Vec::new(); state_count];
    let mut maximal = vec![false; state_count];
    for (i, c) in configs.iter().enumerate() {
        let q = i + 1;
        let mut extended = false;
        for e in s.events() {
            if !c.contains(e.index()) && s.enabled_in(e, c) {
                extended = true;
                let mut next = c.clone();
                next.insert(e.index());
                let r = index[&next];
                if s.label(e).is_epsilon() {
                    silent[q].push(r);
                } else {
                    labeled.push((q, s.label(e), r));
                }
            }
        }
        maximal[q] = !extended;
    }
    // ε-closure: q reads σ to r if some state in closure(q) does.
    let mut by_source: Vec<Vec<(Label, usize)>> = vec![Vec::new(); state_count];
    for &(p, l, r) in &labeled {
        by_source[p].push((l, r));
    }
    let mut transitions = Vec::new();
    let mut accepting = BTreeSet::new();
    for q in 1..state_count {
        let mut closure = vec![q];
        let mut seen = BTreeSet::from([q]);
        let mut i = 0;
        while i < closure.len() {
            for &r in &silent[closure[i]] {
                if seen.insert(r) {
                    closure.push(r);
                }
            }
            i += 1;
        }
        for &p in &closure {
            if maximal[p] {
                accepting.insert(q);
            }
            for &(l, r) in &by_source[p] {
                transitions.push((q, l, r));
            }
        }
    }
    transitions.sort();
    transitions.dedup();
    let mut tags = vec![Vec::new()];
    tags.extend(configs.iter().map(|c| c.ones().map(EventId::from).collect()));
    Ok(Nfa {
        tags,
        state_count,
        initial: 1,
        accepting,
        transitions,
    })
}

/// The exact language, by path enumeration.
pub fn nfa_language(a: &Nfa, max_words: usize) -> Result<Language> {
    if !a.is_acyclic() {
        return Err(Error::CyclicAutomaton);
    }
    let succ = a.successors();
    let mut out = Language::new();
    let mut word = Vec::new();
    fn walk(
        a: &Nfa,
        succ: &[Vec<(Label, usize)>],
        q: usize,
        word: &mut Vec<Label>,
        out: &mut Language,
        cap: usize,
    ) -> Result<()> {
        if a.accepting.contains(&q) {
            out.insert(Word::from_labels(word.iter().copied()));
            if out.len() > cap {
                return Err(Error::WordCap(cap));
            }
        }
        for &(l, r) in &succ[q] {
            word.push(l);
            walk(a, succ, r, word, out, cap)?;
            word.pop();
        }
        Ok(())
    }
    walk(a, &succ, a.initial, &mut word, &mut out, max_words)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NfaInclusion {
    pub included: bool,
    /// A shortest word of L(a1) \ L(a2).
    pub witness: Option<Word>,
    pub product_states: usize,
}

/// Decides L(a1) ⊆ L(a2) by breadth-first search over pairs of an `a1` state
/// and a determinized `a2` state set.
pub fn nfa_inclusion(a1: &Nfa, a2: &Nfa, cap: usize) -> Result<NfaInclusion> {
    if !a1.is_acyclic() || !a2.is_acyclic() {
        return Err(Error::CyclicAutomaton);
    }
    let succ1 = a1.successors();
    let succ2 = a2.successors();
    type Node = (usize, Vec<usize>);
    let start: Node = (a1.initial, vec![a2.initial]);
    let mut parent: HashMap<Node, Option<(Node, Label)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        let (q1, set2) = &node;
        if a1.accepting.contains(q1) && !set2.iter().any(|q| a2.accepting.contains(q)) {
            let mut labels = Vec::new();
            let mut cur = node.clone();
            while let Some(Some((prev, l))) = parent.get(&cur) {
                labels.push(*l);
                cur = prev.clone();
            }
            labels.reverse();
            return Ok(NfaInclusion {
                included: false,
                witness: Some(Word::from_labels(labels)),
                product_states: parent.len(),
            });
        }
        for &(l, r1) in &succ1[*q1] {
            let mut next2: Vec<usize> = set2
                .iter()
                .flat_map(|&q| succ2[q].iter().filter(|t| t.0 == l).map(|t| t.1))
                .collect();
            next2.sort_unstable();
            next2.dedup();
            let next = (r1, next2);
            if !parent.contains_key(&next) {
                if parent.len() >= cap {
                    return Err(Error::SubsetCap(cap));
                }
                parent.insert(next.clone(), Some((node.clone(), l)));
                queue.push_back(next);
            }
        }
    }
    Ok(NfaInclusion {
        included: true,
        witness: None,
        product_states: parent.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::language_of;
    use crate::structure::RawStructure;

    fn build(events: &[(&str, &[u32])]) -> EventStructure {
        let mut r = RawStructure::new();
        for (l, causes) in events {
            let causes: Vec<EventId> = causes.iter().map(|&c| EventId(c)).collect();
            r.add_event(*l, &causes);
        }
        r.build().unwrap()
    }

    #[test]
    fn par_ab_encoding() {
        let s = build(&[("A", &[]), ("B", &[])]);
        let a = encode(&s, 100).unwrap();
        assert_eq!(a.state_count, 5);
        assert_eq!(a.reachable_count(), 4);
        assert_eq!(a.tags[4], vec![EventId(0), EventId(1), EventId(2)]);
        assert_eq!(a.accepting, BTreeSet::from([4]));
        assert_eq!(nfa_language(&a, 100).unwrap(), language_of(&["A B", "B A"]));
    }

    #[test]
    fn trivial_automaton() {
        let a = Nfa::parse_text("initial: 0\naccepting: 0\n").unwrap();
        assert_eq!(nfa_language(&a, 10).unwrap(), language_of(&[""]));
        let cyclic = Nfa::parse_text("initial: 0\naccepting: 0\n0 a 1\n1 a 0\n").unwrap();
        assert!(matches!(nfa_language(&cyclic, 10), Err(Error::CyclicAutomaton)));
    }

    #[test]
    fn inclusion_on_small_structures() {
        let s1 = encode(&build(&[("A", &[]), ("B", &[]), ("A", &[2])]), 100).unwrap();
        let s2 = encode(&build(&[("A", &[]), ("B", &[1]), ("A", &[])]), 100).unwrap();
        let s3 = encode(&build(&[("A", &[]), ("B", &[1]), ("A", &[2])]), 100).unwrap();
        assert!(nfa_inclusion(&s3, &s2, 1000).unwrap().included);
        let r = nfa_inclusion(&s1, &s2, 1000).unwrap();
        assert!(!r.included);
        assert_eq!(r.witness, Some(Word::parse("B A A")));
        assert!(nfa_inclusion(&s1, &s1, 1000).unwrap().included);
    }

    #[test]
    fn silent_events_are_closed_away() {
        let s = build(&[("", &[]), ("A", &[1]), ("", &[2])]);
        let a = encode(&s, 100).unwrap();
        assert_eq!(nfa_language(&a, 10).unwrap(), language_of(&["A"]));
        assert!(a.transitions.iter().all(|t| !t.1.is_epsilon()));
    }

    #[test]
    fn text_round_trip() {
        let s = build(&[("A", &[]), ("B", &[1])]);
        let a = encode(&s, 100).unwrap();
        let mut b = Nfa::parse_text(&a.to_text()).unwrap();
        b.tags = a.tags.clone();
        assert_eq!(a, b);
        assert!(Nfa::parse_text("initial: x").is_err());
    }
}
