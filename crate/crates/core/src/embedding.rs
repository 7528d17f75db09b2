//! Necessary and sufficient embeddings between configurations.
//!
//! An embedding is a label-preserving bijection between the events of two
//! configurations. It is necessary when the source order together with the
//! pulled-back target order stays acyclic (the two share a word), and
//! sufficient when every target ordering is already present in the source.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::semantics::Configuration;
use crate::structure::EventId;

/// A bijection from source local indices to target local indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    pub fn from_map(map: Vec<usize>) -> Embedding {
        Embedding { map }
    }

    pub fn identity(len: usize) -> Embedding {
        Embedding {
            map: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Target local index of source local index `i`.
    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![usize::MAX; self.map.len()];
        for (i, &t) in self.map.iter().enumerate() {
            inv[t] = i;
        }
        inv
    }

    /// The mapping as parent-id pairs.
    pub fn pairs(&self, source: &Configuration, target: &Configuration) -> Vec<(EventId, EventId)> {
        self.map
            .iter()
            .enumerate()
            .map(|(i, &t)| (source.event(i), target.event(t)))
            .collect()
    }
}

/// Concurrent source events whose images are ordered in the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub e: EventId,
    pub e2: EventId,
    /// Local indices of `e` and `e2` in the source.
    pub local: (usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sufficiency {
    Sufficient,
    Split(SplitWitness),
}

/// Label-preserving bijection check, with ⊥ mapped to ⊥.
fn is_bijective(c1: &Configuration, c2: &Configuration, emb: &Embedding) -> bool {
    if emb.len() != c1.len() || c1.len() != c2.len() || emb.map.first() != Some(&0) {
        return false;
    }
    let mut seen = FixedBitSet::with_capacity(c2.len());
    emb.map.iter().enumerate().all(|(i, &t)| {
        t < c2.len() && !seen.put(t) && c1.label(i) == c2.label(t)
    })
}

/// Whole-graph check: bijective, label-preserving, and (<₁ ∪ <₂^φ)⁺ acyclic.
pub fn is_necessary(c1: &Configuration, c2: &Configuration, emb: &Embedding) -> bool {
    if !is_bijective(c1, c2, emb) {
        return false;
    }
    let k = c1.len();
    let inv = emb.inverse();
    let mut indegree = vec![0usize; k];
    let mut edges = vec![Vec::new(); k];
    for a in 0..k {
        let mut out = c1.succs(a).clone();
        for t in c2.succs(emb.map[a]).ones() {
            out.insert(inv[t]);
        }
        for b in out.ones() {
            indegree[b] += 1;
            edges[a].push(b);
        }
    }
    let mut ready: Vec<usize> = (0..k).filter(|&i| indegree[i] == 0).collect();
    let mut done = 0;
    while let Some(a) = ready.pop() {
        done += 1;
        for &b in &edges[a] {
            indegree[b] -= 1;
            if indegree[b] == 0 {
                ready.push(b);
            }
        }
    }
    done == k
}

/// Per-event counts of each label among strict predecessors and strict successors.
struct Profile {
    hist: Vec<Vec<u32>>,
    fut: Vec<Vec<u32>>,
}

impl Profile {
    fn new(c: &Configuration, index: &HashMap<Label, usize>) -> Profile {
        let k = c.len();
        let width = index.len();
        let count = |set: &FixedBitSet| {
            let mut v = vec![0u32; width];
            for j in set.ones() {
                if let Some(&x) = index.get(&c.label(j)) {
                    v[x] += 1;
                }
            }
            v
        };
        Profile {
            hist: (0..k).map(|i| count(c.preds(i))).collect(),
            fut: (0..k).map(|i| count(c.succs(i))).collect(),
        }
    }
}

struct Search<'a> {
    c1: &'a Configuration,
    c2: &'a Configuration,
    map: Vec<usize>,
    inv: Vec<usize>,
    stack: Vec<usize>,
    candidates: Vec<Vec<usize>>,
}

const UNMAPPED: usize = usize::MAX;

impl Search<'_> {
    /// Would mapping `e` (already assigned) close a cycle in <₁ ∪ <₂^φ?
    fn closes_cycle(&self, e: usize) -> bool {
        let k = self.c1.len();
        let mut seen = FixedBitSet::with_capacity(k);
        let mut work = vec![e];
        while let Some(x) = work.pop() {
            let mut next: Vec<usize> = self.c1.succs(x).ones().collect();
            if self.map[x] != UNMAPPED {
                next.extend(
                    self.c2
                        .succs(self.map[x])
                        .ones()
                        .map(|t| self.inv[t])
                        .filter(|&y| y != UNMAPPED),
                );
            }
            for y in next {
                if y == e {
                    return true;
                }
                if !seen.put(y) {
                    work.push(y);
                }
            }
        }
        false
    }

    fn run(&mut self) -> bool {
        let Some(e) = self.stack.pop() else {
            return self.map.iter().all(|&t| t != UNMAPPED);
        };
        if self.map[e] != UNMAPPED {
            if self.run() {
                return true;
            }
            self.stack.push(e);
            return false;
        }
        for ci in 0..self.candidates[e].len() {
            let t = self.candidates[e][ci];
            if self.inv[t] != UNMAPPED {
                continue;
            }
            self.map[e] = t;
            self.inv[t] = e;
            if !self.closes_cycle(e) {
                let depth = self.stack.len();
                let succs: Vec<usize> = self.c1.dsucc(e).collect();
                // Lowest id on top.
                self.stack.extend(succs.into_iter().rev());
                if self.run() {
                    return true;
                }
                self.stack.truncate(depth);
            }
            self.map[e] = UNMAPPED;
            self.inv[t] = UNMAPPED;
        }
        self.stack.push(e);
        false
    }
}

/// Searches for a necessary embedding from `c1` into `c2`.
///
/// The frontier stack starts with the direct successors of ⊥; an event's
/// direct successors are pushed once it is mapped, and target candidates are
/// tried in ascending order, so the result is deterministic.
pub fn find_necessary(c1: &Configuration, c2: &Configuration) -> Option<Embedding> {
    if c1.len() != c2.len() || c1.label_counts() != c2.label_counts() {
        return None;
    }
    let k = c1.len();
    let mut index: HashMap<Label, usize> = HashMap::new();
    for &l in c1.labels() {
        if !l.is_epsilon() {
            let next = index.len();
            index.entry(l).or_insert(next);
        }
    }
    let mut total = vec![0u32; index.len()];
    for &l in c1.labels() {
        if let Some(&x) = index.get(&l) {
            total[x] += 1;
        }
    }
    let p1 = Profile::new(c1, &index);
    let p2 = Profile::new(c2, &index);
    // A pair can only be matched if some common linearization places both at
    // the same position, which bounds the label counts before and after.
    let feasible = |e: usize, t: usize| {
        let own = index.get(&c1.label(e)).copied();
        (0..total.len()).all(|x| {
            let avail = total[x] - u32::from(own == Some(x));
            p1.hist[e][x] + p2.fut[t][x] <= avail && p2.hist[t][x] + p1.fut[e][x] <= avail
        })
    };
    let mut candidates = vec![Vec::new(); k];
    for e in 1..k {
        candidates[e] = (1..k)
            .filter(|&t| c2.label(t) == c1.label(e) && feasible(e, t))
            .collect();
        if candidates[e].is_empty() {
            return None;
        }
    }
    let mut search = Search {
        c1,
        c2,
        map: vec![UNMAPPED; k],
        inv: vec![UNMAPPED; k],
        stack: {
            let mut v: Vec<usize> = c1.dsucc(0).collect();
            v.reverse();
            v
        },
        candidates,
    };
    if k == 0 {
        return None;
    }
    search.map[0] = 0;
    search.inv[0] = 0;
    if search.run() {
        Some(Embedding { map: search.map })
    } else {
        None
    }
}

/// Reports sufficiency, or the first split witness in (target, successor) order.
pub fn check_sufficient(
    c1: &Configuration,
    c2: &Configuration,
    emb: &Embedding,
) -> Result<Sufficiency> {
    if !is_necessary(c1, c2, emb) {
        return Err(Error::NotNecessary);
    }
    Ok(sufficiency_unchecked(c1, c2, emb))
}

/// As [`check_sufficient`], trusting that `emb` is necessary.
pub(crate) fn sufficiency_unchecked(
    c1: &Configuration,
    c2: &Configuration,
    emb: &Embedding,
) -> Sufficiency {
    let inv = emb.inverse();
    for t in 0..c2.len() {
        for t2 in c2.dsucc(t) {
            let (a, b) = (inv[t], inv[t2]);
            if c1.concurrent(a, b) {
                return Sufficiency::Split(SplitWitness {
                    e: c1.event(a),
                    e2: c1.event(b),
                    local: (a, b),
                });
            }
        }
    }
    Sufficiency::Sufficient
}
