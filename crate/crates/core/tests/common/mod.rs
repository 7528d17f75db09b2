//! Brute-force reference semantics, written independently of the library:
//! subsets for configurations, a fixpoint for conflicts, and permutation
//! search for traces.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use fles_core::{EventId, EventStructure, Label, Word};

pub type Words = BTreeSet<Vec<String>>;

pub struct Oracle {
    n: usize,
    labels: Vec<String>,
    /// lt[a][b] iff a < b.
    lt: Vec<Vec<bool>>,
    conf: Vec<Vec<bool>>,
}

impl Oracle {
    pub fn new(s: &EventStructure) -> Oracle {
        let n = s.len();
        let labels = s.labels().iter().map(|l| l.as_str().to_string()).collect();
        let mut lt = vec![vec![false; n]; n];
        for e in 0..n {
            for c in s.causes(EventId::from(e)) {
                lt[c.index()][e] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if lt[i][k] && lt[k][j] {
                        lt[i][j] = true;
                    }
                }
            }
        }
        let mut conf = vec![vec![false; n]; n];
        for &(a, b) in s.immediate_conflicts() {
            conf[a.index()][b.index()] = true;
            conf[b.index()][a.index()] = true;
        }
        // Single-step propagation to a fixpoint.
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if !conf[a][b] {
                        continue;
                    }
                    for c in 0..n {
                        if lt[b][c] && !conf[a][c] {
                            conf[a][c] = true;
                            conf[c][a] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Oracle { n, labels, lt, conf }
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.lt[a][b]
    }

    pub fn in_conflict(&self, a: usize, b: usize) -> bool {
        self.conf[a][b]
    }

    pub fn conflict_pairs(&self) -> Vec<(EventId, EventId)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.conf[a][b] {
                    out.push((EventId::from(a), EventId::from(b)));
                }
            }
        }
        out
    }

    pub fn is_configuration(&self, set: &[usize]) -> bool {
        let has = |e: usize| set.contains(&e);
        has(0)
            && set.iter().all(|&e| {
                (0..self.n).all(|p| !self.lt[p][e] || has(p))
                    && set.iter().all(|&f| !self.conf[e][f])
            })
    }

    /// All maximal configurations, as sorted member lists, by subset search.
    pub fn maximal_configurations(&self) -> Vec<Vec<usize>> {
        assert!(self.n <= 20, "subset oracle is for small structures");
        let configs: Vec<Vec<usize>> = (0u32..(1 << self.n))
            .map(|mask| (0..self.n).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>())
            .filter(|set| self.is_configuration(set))
            .collect();
        let mut out: Vec<Vec<usize>> = configs
            .iter()
            .filter(|c| {
                !configs
                    .iter()
                    .any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x)))
            })
            .cloned()
            .collect();
        out.sort();
        out
    }

    fn extend(&self, set: &[usize], placed: &mut Vec<usize>, out: &mut Words) {
        if placed.len() == set.len() {
            out.insert(
                placed
                    .iter()
                    .map(|&e| self.labels[e].clone())
                    .filter(|l| !l.is_empty())
                    .collect(),
            );
            return;
        }
        for &e in set {
            if placed.contains(&e) {
                continue;
            }
            if set.iter().all(|&p| !self.lt[p][e] || placed.contains(&p)) {
                placed.push(e);
                self.extend(set, placed, out);
                placed.pop();
            }
        }
    }

    pub fn config_language(&self, set: &[usize]) -> Words {
        let mut out = Words::new();
        self.extend(set, &mut Vec::new(), &mut out);
        out
    }

    pub fn language(&self) -> Words {
        let mut out = Words::new();
        for c in self.maximal_configurations() {
            out.extend(self.config_language(&c));
        }
        out
    }
}

pub fn words_of(lang: &fles_core::Language) -> Words {
    lang.iter()
        .map(|w| w.symbols().iter().map(|l| l.as_str().to_string()).collect())
        .collect()
}

pub fn word_labels(w: &[String]) -> Vec<Label> {
    w.iter().map(|s| Label::new(s)).collect()
}

pub fn word_strings(w: &Word) -> Vec<String> {
    w.symbols().iter().map(|l| l.as_str().to_string()).collect()
}

/// Every word up to `max_len` over `alphabet`, shortest first.
pub fn all_words(alphabet: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::<String>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut v = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

use fles_core::benchgen::{
    allpar, ccnfs, mutate, order_mutations, random_mutation, random_structure, sharing,
    MutationKind, RandomParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub name: String,
    pub left: EventStructure,
    pub right: EventStructure,
}

fn small_params(rng: &mut ChaCha8Rng) -> RandomParams {
    RandomParams {
        events: rng.gen_range(0..=8),
        labels: rng.gen_range(1..=3),
        cause_prob: rng.gen_range(0.05..0.5),
        conflict_prob: rng.gen_range(0.0..0.35),
        epsilon_prob: if rng.gen_bool(0.5) { 0.0 } else { 0.15 },
    }
}

/// A random pair of small structures. Seeds cycle through independent
/// pairs, order-refined mutants and arbitrary mutants on either side.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = small_params(&mut rng);
    let base = random_structure(&mut rng, params);
    let (left, right) = match seed % 4 {
        0 => {
            let other = random_structure(&mut rng, params);
            (base, other)
        }
        1 => {
            let options = order_mutations(&base);
            if options.is_empty() {
                let other = random_structure(&mut rng, params);
                (other, base)
            } else {
                let kind = options[rng.gen_range(0..options.len())];
                (mutate(&base, kind).unwrap(), base)
            }
        }
        2 => match random_mutation(&mut rng, &base) {
            Some(kind) => {
                let m = mutate(&base, kind).unwrap();
                (base, m)
            }
            None => (base.clone(), base),
        },
        _ => match random_mutation(&mut rng, &base) {
            Some(kind) => {
                let m = mutate(&base, kind).unwrap();
                (m, base)
            }
            None => (base.clone(), base),
        },
    };
    Case {
        name: format!("random seed {seed}"),
        left,
        right,
    }
}

/// One valid mutant of each kind, where available.
pub fn mutants(s: &EventStructure, seed: u64) -> Vec<(String, EventStructure)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if let Some(&kind) = order_mutations(s).first() {
        out.push((format!("{kind:?}"), mutate(s, kind).unwrap()));
    }
    for want in 1..4 {
        for _ in 0..200 {
            let Some(kind) = random_mutation(&mut rng, s) else { break };
            let tag = match kind {
                MutationKind::AddOrder(..) => 0,
                MutationKind::DropEvent(..) => 1,
                MutationKind::Relabel(..) => 2,
                MutationKind::AddConflict(..) => 3,
            };
            if tag == want {
                out.push((format!("{kind:?}"), mutate(s, kind).unwrap()));
                break;
            }
        }
    }
    out
}

/// Benchmark-family instances small enough for the subset oracle.
pub fn family_instances() -> Vec<(String, EventStructure)> {
    let mut out = Vec::new();
    for n in 1..=5 {
        out.push((format!("allpar({n})"), allpar(n).unwrap()));
    }
    for n in [2, 4, 6] {
        out.push((format!("ccnfs({n})"), ccnfs(n).unwrap()));
    }
    for n in 1..=3 {
        for m in 1..=3 {
            out.push((format!("sharing({n},{m})"), sharing(n, m).unwrap()));
        }
    }
    out
}

/// Family instances against themselves, their mutants, and each other
/// where alphabets overlap.
pub fn family_cases() -> Vec<Case> {
    let mut out = Vec::new();
    let fams = family_instances();
    for (i, (name, s)) in fams.iter().enumerate() {
        out.push(Case {
            name: format!("{name} vs itself"),
            left: s.clone(),
            right: s.clone(),
        });
        for (kind, m) in mutants(s, i as u64) {
            out.push(Case {
                name: format!("{name} {kind} vs original"),
                left: m.clone(),
                right: s.clone(),
            });
            out.push(Case {
                name: format!("{name} vs {kind}"),
                left: s.clone(),
                right: m,
            });
        }
    }
    for (a, b) in [("sharing(2,2)", "sharing(3,2)"), ("allpar(2)", "allpar(3)")] {
        let find = |n: &str| fams.iter().find(|f| f.0 == n).unwrap().1.clone();
        out.push(Case {
            name: format!("{a} vs {b}"),
            left: find(a),
            right: find(b),
        });
        out.push(Case {
            name: format!("{b} vs {a}"),
            left: find(b),
            right: find(a),
        });
    }
    out
}

/// The inclusion corpus: 1000 random pairs plus the family pairs.
pub fn corpus() -> Vec<Case> {
    let mut out: Vec<Case> = (0..1000).map(random_case).collect();
    out.extend(family_cases());
    out
}
