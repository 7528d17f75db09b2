//! Language inclusion between event structures, and word membership.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::embedding::{find_necessary, sufficiency_unchecked, Embedding, Sufficiency};
use crate::error::{Error, Result};
use crate::label::{Label, Word};
use crate::semantics::{for_each_maximal_bounded, maximal_member_sets, Configuration, Limits};
use crate::structure::{EventId, EventStructure};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Necessary-embedding searches started.
    pub embeddings_tried: u64,
    /// Searches that found a necessary embedding.
    pub embeddings_found: u64,
    pub splits: u64,
    /// Candidates dropped because no necessary embedding exists.
    pub candidates_pruned: u64,
}

impl Stats {
    fn add(&mut self, other: &Stats) {
        self.embeddings_tried += other.embeddings_tried;
        self.embeddings_found += other.embeddings_found;
        self.splits += other.splits;
        self.candidates_pruned += other.candidates_pruned;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// An ε-free, possibly split-refined configuration of the left structure
    /// none of whose words is in the right language.
    pub configuration: Configuration,
    /// Its lexicographically least word.
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionVerdict {
    pub included: bool,
    pub counterexample: Option<Counterexample>,
    pub stats: Stats,
    pub maximal_left: usize,
    /// Right-hand maximal configurations visited; those with more of some
    /// label than any left-hand configuration are never generated.
    pub maximal_right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub included: bool,
    pub counterexample: Option<Configuration>,
    pub stats: Stats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecisionOptions {
    pub limits: Limits,
    /// Check top-level configurations on the rayon pool.
    pub parallel: bool,
    /// Optional cap on the total number of splits per top-level configuration.
    pub max_splits: Option<u64>,
}

enum Task {
    Check {
        c1: Configuration,
        candidates: Arc<[usize]>,
        depth: usize,
    },
    Refine {
        c1: Configuration,
        target: usize,
        phi: Embedding,
        candidates: Arc<[usize]>,
        depth: usize,
    },
}

/// Decides L(c1) ⊆ ⋃ L(candidates) for ε-free configurations.
pub fn check_config(c1: &Configuration, candidates: &[Configuration]) -> Result<CheckOutcome> {
    check_config_with(c1, candidates, None)
}

fn check_config_with(
    c1: &Configuration,
    candidates: &[Configuration],
    max_splits: Option<u64>,
) -> Result<CheckOutcome> {
    let budget = c1.len() * c1.len().saturating_sub(1) / 2;
    let mut stats = Stats::default();
    let all: Arc<[usize]> = (0..candidates.len()).collect();
    let mut work = vec![Task::Check {
        c1: c1.clone(),
        candidates: all,
        depth: 0,
    }];
    while let Some(task) = work.pop() {
        match task {
            Task::Check {
                c1,
                candidates: cands,
                depth,
            } => {
                let mut kept: Vec<usize> = cands.to_vec();
                let mut found = None;
                for &ci in cands.iter() {
                    stats.embeddings_tried += 1;
                    if let Some(phi) = find_necessary(&c1, &candidates[ci]) {
                        stats.embeddings_found += 1;
                        found = Some((ci, phi));
                        break;
                    }
                    stats.candidates_pruned += 1;
                    kept.retain(|&x| x != ci);
                }
                match found {
                    None => {
                        return Ok(CheckOutcome {
                            included: false,
                            counterexample: Some(c1),
                            stats,
                        })
                    }
                    Some((target, phi)) => work.push(Task::Refine {
                        c1,
                        target,
                        phi,
                        candidates: kept.into(),
                        depth,
                    }),
                }
            }
            Task::Refine {
                c1,
                target,
                phi,
                candidates: cands,
                depth,
            } => match sufficiency_unchecked(&c1, &candidates[target], &phi) {
                Sufficiency::Sufficient => {}
                Sufficiency::Split(w) => {
                    if depth >= budget {
                        return Err(Error::SplitBudget(format!(
                            "refinement depth {} exceeds {} for a configuration of {} events",
                            depth + 1,
                            budget,
                            c1.len()
                        )));
                    }
                    stats.splits += 1;
                    if let Some(cap) = max_splits {
                        if stats.splits > cap {
                            return Err(Error::SplitBudget(format!("more than {cap} splits")));
                        }
                    }
                    let (a, b) = w.local;
                    let forward = c1.split_local(a, b)?;
                    let backward = c1.split_local(b, a)?;
                    // Evaluated after the forward refinement succeeds.
                    work.push(Task::Check {
                        c1: backward,
                        candidates: cands.clone(),
                        depth: depth + 1,
                    });
                    work.push(Task::Refine {
                        c1: forward,
                        target,
                        phi,
                        candidates: cands,
                        depth: depth + 1,
                    });
                }
            },
        }
    }
    Ok(CheckOutcome {
        included: true,
        counterexample: None,
        stats,
    })
}

fn signature_of(labels: impl Iterator<Item = Label>) -> Vec<(u32, u32)> {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for l in labels.filter(|l| !l.is_epsilon()) {
        *counts.entry(l.id()).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Per visible label, the largest count over the given configurations.
fn label_bounds(configs: &[Configuration]) -> BTreeMap<Label, usize> {
    let mut bounds = BTreeMap::new();
    for c in configs {
        for (l, k) in c.label_counts() {
            if !l.is_epsilon() {
                let b = bounds.entry(l).or_insert(0);
                *b = k.max(*b);
            }
        }
    }
    bounds
}

fn set_signature(s: &EventStructure, set: &FixedBitSet) -> Vec<(u32, u32)> {
    signature_of(set.ones().map(|e| s.label(EventId::from(e))))
}

/// Decides L(e1) ⊆ L(e2).
pub fn check_inclusion(e1: &EventStructure, e2: &EventStructure) -> Result<InclusionVerdict> {
    check_inclusion_with(e1, e2, DecisionOptions::default())
}

pub fn check_inclusion_with(
    e1: &EventStructure,
    e2: &EventStructure,
    options: DecisionOptions,
) -> Result<InclusionVerdict> {
    let cap = options.limits.max_configurations;
    let left: Vec<Configuration> = maximal_member_sets(e1, cap)?
        .iter()
        .map(|set| Configuration::from_set(e1, set).epsilon_free())
        .collect();
    let wanted: HashSet<Vec<(u32, u32)>> =
        left.iter().map(|c| signature_of(c.labels().iter().copied())).collect();

    // Right-hand configurations whose label multiset matches no left one can
    // never host a necessary embedding, so they are not kept.
    let mut right_sets = Vec::new();
    let mut maximal_right = 0usize;
    let flow = for_each_maximal_bounded(e2, &label_bounds(&left), |set| {
        maximal_right += 1;
        if maximal_right > cap {
            return ControlFlow::Break(());
        }
        if wanted.contains(&set_signature(e2, set)) {
            right_sets.push(set.clone());
        }
        ControlFlow::Continue(())
    });
    if flow.is_break() {
        return Err(Error::ConfigurationCap(cap));
    }
    right_sets.sort_by(|a, b| a.ones().cmp(b.ones()));
    let right: Vec<Configuration> = right_sets
        .iter()
        .map(|set| Configuration::from_set(e2, set).epsilon_free())
        .collect();
    let mut by_signature: BTreeMap<Vec<(u32, u32)>, Vec<Configuration>> = BTreeMap::new();
    for c in right {
        by_signature
            .entry(signature_of(c.labels().iter().copied()))
            .or_default()
            .push(c);
    }
    let empty = Vec::new();
    let run = |c1: &Configuration| {
        let cands = by_signature
            .get(&signature_of(c1.labels().iter().copied()))
            .unwrap_or(&empty);
        check_config_with(c1, cands, options.max_splits)
    };

    let mut stats = Stats::default();
    let mut failure = None;
    if options.parallel {
        let results: Vec<Result<CheckOutcome>> = left.par_iter().map(run).collect();
        for r in results {
            let outcome = r?;
            stats.add(&outcome.stats);
            if !outcome.included {
                failure = outcome.counterexample;
                break;
            }
        }
    } else {
        for c1 in &left {
            let outcome = run(c1)?;
            stats.add(&outcome.stats);
            if !outcome.included {
                failure = outcome.counterexample;
                break;
            }
        }
    }
    let counterexample = failure.map(|configuration| Counterexample {
        word: configuration.min_word(),
        configuration,
    });
    Ok(InclusionVerdict {
        included: counterexample.is_none(),
        counterexample,
        stats,
        maximal_left: left.len(),
        maximal_right,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// A trace of the structure whose labeling is the word.
    pub witness: Option<Vec<EventId>>,
}

fn check_word(labels: &[Label]) -> Result<Word> {
    if labels.iter().any(|l| l.is_epsilon()) {
        return Err(Error::EpsilonInWord);
    }
    Ok(Word::from_labels(labels.iter().copied()))
}

/// Orders all of `full`'s members so that the non-ε events follow the word.
fn witness_trace(
    s: &EventStructure,
    full: &FixedBitSet,
    reduced: &Configuration,
    phi: &Embedding,
    word_len: usize,
) -> Vec<EventId> {
    let mut placed = FixedBitSet::with_capacity(s.len());
    let mut out = Vec::with_capacity(full.count_ones(..));
    let topo: Vec<EventId> = s
        .topological_order()
        .iter()
        .copied()
        .filter(|e| full.contains(e.index()))
        .collect();
    let place_up_to = |target: Option<EventId>, placed: &mut FixedBitSet, out: &mut Vec<EventId>| {
        for &e in &topo {
            let needed = match target {
                Some(t) => s.precedes(e, t),
                None => true,
            };
            if needed && !placed.contains(e.index()) {
                placed.insert(e.index());
                out.push(e);
            }
        }
        if let Some(t) = target {
            placed.insert(t.index());
            out.push(t);
        }
    };
    for i in 1..=word_len {
        let t = reduced.event(phi.image(i));
        place_up_to(Some(t), &mut placed, &mut out);
    }
    place_up_to(None, &mut placed, &mut out);
    out
}

/// Decides w ∈ L(s) by embedding chain(w) into the maximal configurations of `s`.
pub fn membership(labels: &[Label], s: &EventStructure) -> Result<Membership> {
    membership_with(labels, s, Limits::default())
}

pub fn membership_with(labels: &[Label], s: &EventStructure, limits: Limits) -> Result<Membership> {
    let word = check_word(labels)?;
    let chain = Configuration::chain(&word);
    let want = signature_of(word.symbols().iter().copied());
    let mut seen = 0usize;
    let mut result = None;
    let mut counts = BTreeMap::new();
    for &l in word.symbols() {
        *counts.entry(l).or_insert(0) += 1;
    }
    let flow = for_each_maximal_bounded(s, &counts, |set| {
        seen += 1;
        if seen > limits.max_configurations {
            return ControlFlow::Break(());
        }
        if set_signature(s, set) != want {
            return ControlFlow::Continue(());
        }
        let reduced = Configuration::from_set(s, set).epsilon_free();
        if let Some(phi) = find_necessary(&chain, &reduced) {
            result = Some(witness_trace(s, set, &reduced, &phi, word.len()));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    if flow.is_break() && result.is_none() {
        return Err(Error::ConfigurationCap(limits.max_configurations));
    }
    Ok(Membership {
        member: result.is_some(),
        witness: result,
    })
}

/// Membership queries against one structure, sharing the enumerated
/// maximal configurations between queries.
pub struct MembershipChecker<'a> {
    s: &'a EventStructure,
    configs: Vec<Prepared>,
}

/// Label signature, full member set, and ε-free configuration.
type Prepared = (Vec<(u32, u32)>, FixedBitSet, Configuration);

impl<'a> MembershipChecker<'a> {
    pub fn new(s: &'a EventStructure, limits: Limits) -> Result<Self> {
        let configs = maximal_member_sets(s, limits.max_configurations)?
            .into_iter()
            .map(|set| {
                let reduced = Configuration::from_set(s, &set).epsilon_free();
                (set_signature(s, &set), set, reduced)
            })
            .collect();
        Ok(MembershipChecker { s, configs })
    }

    pub fn check(&self, labels: &[Label]) -> Result<Membership> {
        let word = check_word(labels)?;
        let chain = Configuration::chain(&word);
        let want = signature_of(word.symbols().iter().copied());
        for (sig, set, reduced) in &self.configs {
            if *sig != want {
                continue;
            }
            if let Some(phi) = find_necessary(&chain, reduced) {
                return Ok(Membership {
                    member: true,
                    witness: Some(witness_trace(self.s, set, reduced, &phi, word.len())),
                });
            }
        }
        Ok(Membership {
            member: false,
            witness: None,
        })
    }
}
