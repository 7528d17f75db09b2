//! Configurations, maximal-configuration enumeration, traces and languages.
//!
//! Everything here is exhaustive by design and serves as the reference the
//! decision procedure is checked against.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::label::{Label, Language, Word};
use crate::structure::{EventId, EventStructure};

/// Enumeration caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_configurations: usize,
    pub max_words: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_configurations: 1 << 20,
            max_words: 1 << 22,
        }
    }
}

/// A configuration viewed as its own event structure: members with labels and
/// the causality order restricted to them, plus any ordering added by splits.
///
/// Members are stored in ascending parent-id order, so local index 0 is ⊥.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    events: Vec<EventId>,
    labels: Vec<Label>,
    below: Vec<FixedBitSet>,
    above: Vec<FixedBitSet>,
    extra_order: Vec<(EventId, EventId)>,
}

impl Configuration {
    /// Builds the configuration of `s` with the given members.
    pub fn from_members(s: &EventStructure, members: &[EventId]) -> Result<Configuration> {
        if !is_configuration(s, members)? {
            return Err(Error::NotConfiguration(format!(
                "{{{}}}",
                members.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
        let mut set = FixedBitSet::with_capacity(s.len());
        for e in members {
            set.insert(e.index());
        }
        Ok(Configuration::from_set(s, &set))
    }

    /// Builds from a member set already known to be a configuration.
    pub(crate) fn from_set(s: &EventStructure, set: &FixedBitSet) -> Configuration {
        let events: Vec<EventId> = set.ones().map(EventId::from).collect();
        let mut local = vec![usize::MAX; s.len()];
        for (i, e) in events.iter().enumerate() {
            local[e.index()] = i;
        }
        let k = events.len();
        let mut below = vec![FixedBitSet::with_capacity(k); k];
        for (i, e) in events.iter().enumerate() {
            for p in s.ancestors(*e).ones() {
                below[i].insert(local[p]);
            }
        }
        let labels = events.iter().map(|&e| s.label(e)).collect();
        let above = transpose(&below);
        Configuration {
            events,
            labels,
            below,
            above,
            extra_order: Vec::new(),
        }
    }

    /// The totally ordered configuration ⊥ < w₁ < … < wₙ.
    pub fn chain(word: &Word) -> Configuration {
        let mut labels = vec![Label::EPSILON];
        labels.extend_from_slice(word.symbols());
        let pairs: Vec<(usize, usize)> = (1..labels.len()).map(|i| (i - 1, i)).collect();
        Configuration::from_order(labels, &pairs).expect("a chain is acyclic")
    }

    /// A stand-alone configuration over local events `0..labels.len()`, where
    /// event 0 is ⊥ and `pairs` generate the order. ⊥ is placed below all others.
    pub fn from_order(labels: Vec<Label>, pairs: &[(usize, usize)]) -> Result<Configuration> {
        let k = labels.len();
        if k == 0 || !labels[0].is_epsilon() {
            return Err(Error::NotConfiguration("event 0 must be an ε-labeled ⊥".into()));
        }
        let mut below = vec![FixedBitSet::with_capacity(k); k];
        for &(a, b) in pairs {
            if a >= k || b >= k {
                return Err(Error::UnknownEvent(EventId::from(a.max(b))));
            }
            below[b].insert(a);
        }
        for b in below.iter_mut().skip(1) {
            b.insert(0);
        }
        // Warshall closure; k is small.
        for m in 0..k {
            let via = below[m].clone();
            for row in below.iter_mut() {
                if row.contains(m) {
                    row.union_with(&via);
                }
            }
        }
        if (0..k).any(|i| below[i].contains(i)) {
            return Err(Error::CyclicOrder);
        }
        let above = transpose(&below);
        Ok(Configuration {
            events: (0..k).map(EventId::from).collect(),
            labels,
            below,
            above,
            extra_order: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Member ids in ascending order.
    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn event(&self, i: usize) -> EventId {
        self.events[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn local_index(&self, e: EventId) -> Option<usize> {
        self.events.binary_search(&e).ok()
    }

    pub fn contains(&self, e: EventId) -> bool {
        self.local_index(e).is_some()
    }

    /// Ordering pairs added by splits, by parent id.
    pub fn extra_order(&self) -> &[(EventId, EventId)] {
        &self.extra_order
    }

    /// Strict predecessors of local event `i`.
    pub fn preds(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    /// Strict successors of local event `i`.
    pub fn succs(&self, i: usize) -> &FixedBitSet {
        &self.above[i]
    }

    /// `i < j` in the (possibly split-refined) order, by local index.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(i)
    }

    pub fn concurrent(&self, i: usize, j: usize) -> bool {
        i != j && !self.precedes(i, j) && !self.precedes(j, i)
    }

    /// Local direct successors of local event `i`, ascending.
    pub fn dsucc(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let above = &self.above[i];
        above.ones().filter(move |&j| self.below[j].is_disjoint(above))
    }

    /// Non-ε label counts.
    pub fn label_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts = BTreeMap::new();
        for &l in &self.labels {
            if !l.is_epsilon() {
                *counts.entry(l).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Drops every ε-labeled event except ⊥; the order is restricted.
    pub fn epsilon_free(&self) -> Configuration {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| i == 0 || !self.labels[i].is_epsilon())
            .collect();
        if keep.len() == self.len() {
            return self.clone();
        }
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[usize]) -> Configuration {
        let mut local = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            local[old] = new;
        }
        let k = keep.len();
        let mut below = vec![FixedBitSet::with_capacity(k); k];
        for (new, &old) in keep.iter().enumerate() {
            for p in self.below[old].ones() {
                if local[p] != usize::MAX {
                    below[new].insert(local[p]);
                }
            }
        }
        let above = transpose(&below);
        let events: Vec<EventId> = keep.iter().map(|&i| self.events[i]).collect();
        let extra_order = self
            .extra_order
            .iter()
            .copied()
            .filter(|(a, b)| events.binary_search(a).is_ok() && events.binary_search(b).is_ok())
            .collect();
        Configuration {
            events,
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
            below,
            above,
            extra_order,
        }
    }

    /// C_{a<b}, by parent id.
    pub fn split(&self, a: EventId, b: EventId) -> Result<Configuration> {
        let i = self.local_index(a).ok_or(Error::UnknownEvent(a))?;
        let j = self.local_index(b).ok_or(Error::UnknownEvent(b))?;
        self.split_local(i, j)
    }

    /// C_{i<j}, by local index.
    pub fn split_local(&self, i: usize, j: usize) -> Result<Configuration> {
        if !self.concurrent(i, j) {
            return Err(Error::NotConcurrent(self.events[i], self.events[j]));
        }
        let mut out = self.clone();
        let mut lower = self.below[i].clone();
        lower.insert(i);
        let mut upper = self.above[j].clone();
        upper.insert(j);
        for y in upper.ones() {
            out.below[y].union_with(&lower);
        }
        for x in lower.ones() {
            out.above[x].union_with(&upper);
        }
        out.extra_order.push((self.events[i], self.events[j]));
        Ok(out)
    }

    /// True when the order is total on the non-⊥ events.
    pub fn is_total_order(&self) -> bool {
        (1..self.len()).all(|i| self.below[i].count_ones(..) + self.above[i].count_ones(..) == self.len() - 1)
    }

    /// Number of concurrent (unordered) pairs.
    pub fn concurrent_pairs(&self) -> usize {
        let k = self.len();
        (0..k)
            .map(|i| k - 1 - self.below[i].count_ones(..) - self.above[i].count_ones(..))
            .sum::<usize>()
            / 2
    }

    /// Streams every linearization as parent-id sequences.
    pub fn traces(&self) -> Traces<'_> {
        Traces::new(self)
    }

    /// Label sequences of all traces, ε dropped.
    pub fn language(&self, max_words: usize) -> Result<Language> {
        let mut out = Language::new();
        let mut it = LocalTraces::new(self);
        while let Some(order) = it.next_order() {
            out.insert(order.iter().map(|&i| self.labels[i]).collect());
            if out.len() > max_words {
                return Err(Error::WordCap(max_words));
            }
        }
        Ok(out)
    }

    /// The lexicographically least word of the configuration.
    pub fn min_word(&self) -> Word {
        let k = self.len();
        let saturate = |mut set: FixedBitSet| {
            loop {
                let next = (0..k).find(|&i| {
                    !set.contains(i) && self.labels[i].is_epsilon() && self.below[i].is_subset(&set)
                });
                match next {
                    Some(i) => set.insert(i),
                    None => return set,
                }
            }
        };
        let mut frontier: HashSet<FixedBitSet> = HashSet::new();
        frontier.insert(saturate(FixedBitSet::with_capacity(k)));
        let mut word = Word::empty();
        loop {
            let mut best: Option<Label> = None;
            for set in &frontier {
                for i in (0..k).filter(|&i| !set.contains(i) && self.below[i].is_subset(set)) {
                    let l = self.labels[i];
                    if best.is_none_or(|b| l < b) {
                        best = Some(l);
                    }
                }
            }
            let Some(l) = best else { return word };
            word.push(l);
            let mut next = HashSet::new();
            for set in &frontier {
                for i in (0..k).filter(|&i| {
                    !set.contains(i) && self.labels[i] == l && self.below[i].is_subset(set)
                }) {
                    let mut s2 = set.clone();
                    s2.insert(i);
                    next.insert(saturate(s2));
                }
            }
            frontier = next;
        }
    }
}

fn transpose(rel: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let k = rel.len();
    let mut out = vec![FixedBitSet::with_capacity(k); k];
    for (a, set) in rel.iter().enumerate() {
        for b in set.ones() {
            out[b].insert(a);
        }
    }
    out
}

/// Linear-extension enumerator over local indices.
struct LocalTraces<'a> {
    c: &'a Configuration,
    placed: FixedBitSet,
    order: Vec<usize>,
    // For each depth, the next local index to try at that position.
    cursor: Vec<usize>,
    started: bool,
}

impl<'a> LocalTraces<'a> {
    fn new(c: &'a Configuration) -> Self {
        LocalTraces {
            c,
            placed: FixedBitSet::with_capacity(c.len()),
            order: Vec::with_capacity(c.len()),
            cursor: vec![0],
            started: false,
        }
    }

    fn ready(&self, i: usize) -> bool {
        !self.placed.contains(i) && self.c.below[i].is_subset(&self.placed)
    }

    fn next_order(&mut self) -> Option<&[usize]> {
        let k = self.c.len();
        if self.started {
            // Backtrack out of the last complete order.
            if !self.backtrack() {
                return None;
            }
        }
        self.started = true;
        loop {
            if self.order.len() == k {
                return Some(&self.order);
            }
            let depth = self.order.len();
            let from = self.cursor[depth];
            match (from..k).find(|&i| self.ready(i)) {
                Some(i) => {
                    self.cursor[depth] = i + 1;
                    self.order.push(i);
                    self.placed.insert(i);
                    self.cursor.push(0);
                }
                None => {
                    if !self.backtrack_from_dead_end() {
                        return None;
                    }
                }
            }
        }
    }

    fn backtrack(&mut self) -> bool {
        // The cursor past the full order is exhausted; pop one level.
        self.backtrack_from_dead_end()
    }

    fn backtrack_from_dead_end(&mut self) -> bool {
        self.cursor.pop();
        match self.order.pop() {
            Some(i) => {
                self.placed.set(i, false);
                true
            }
            None => false,
        }
    }
}

/// Iterator over the traces of a configuration, as parent-id sequences.
pub struct Traces<'a> {
    inner: LocalTraces<'a>,
}

impl<'a> Traces<'a> {
    fn new(c: &'a Configuration) -> Self {
        Traces {
            inner: LocalTraces::new(c),
        }
    }
}

impl Iterator for Traces<'_> {
    type Item = Vec<EventId>;

    fn next(&mut self) -> Option<Self::Item> {
        let c = self.inner.c;
        self.inner
            .next_order()
            .map(|order| order.iter().map(|&i| c.events[i]).collect())
    }
}

fn member_set(s: &EventStructure, members: &[EventId]) -> Result<FixedBitSet> {
    let mut set = FixedBitSet::with_capacity(s.len());
    for &e in members {
        if !s.contains(e) {
            return Err(Error::UnknownEvent(e));
        }
        set.insert(e.index());
    }
    Ok(set)
}

fn is_configuration_set(s: &EventStructure, set: &FixedBitSet) -> bool {
    set.contains(0)
        && set
            .ones()
            .all(|e| s.ancestors(EventId::from(e)).is_subset(set) && s.conflicts_of(EventId::from(e)).is_disjoint(set))
}

fn is_maximal_set(s: &EventStructure, set: &FixedBitSet) -> bool {
    s.events().all(|e| set.contains(e.index()) || !s.enabled_in(e, set))
}

/// Left-closed, conflict-free, and containing ⊥.
pub fn is_configuration(s: &EventStructure, members: &[EventId]) -> Result<bool> {
    let set = member_set(s, members)?;
    Ok(is_configuration_set(s, &set))
}

pub fn is_maximal_configuration(s: &EventStructure, members: &[EventId]) -> Result<bool> {
    let set = member_set(s, members)?;
    Ok(is_configuration_set(s, &set) && is_maximal_set(s, &set))
}

/// True when `seq` lists a maximal configuration in an order respecting causality.
pub fn is_trace(s: &EventStructure, seq: &[EventId]) -> Result<bool> {
    let set = member_set(s, seq)?;
    if set.count_ones(..) != seq.len() {
        return Ok(false);
    }
    if !is_configuration_set(s, &set) || !is_maximal_set(s, &set) {
        return Ok(false);
    }
    let mut seen = FixedBitSet::with_capacity(s.len());
    for &e in seq {
        if !s.ancestors(e).is_subset(&seen) {
            return Ok(false);
        }
        seen.insert(e.index());
    }
    Ok(true)
}

/// Include/exclude search over events in topological order. An enabled event
/// may only be left out if some later event in conflict with it gets included.
/// Positions whose event is not ready are skipped; state changes are undone
/// through counters rather than copies.
/// Include/exclude search over events in topological order. An enabled event
/// may only be left out if some later event in conflict with it gets included.
/// All sets are indexed by topological position so the next includable event
/// is found by a word scan.
struct MaximalSearch<'a, F> {
    topo: &'a [EventId],
    /// Conflict sets by position, or `None` when ids are already topological.
    remapped: Option<Vec<FixedBitSet>>,
    s: &'a EventStructure,
    succs: Vec<Vec<usize>>,
    last_conflict: Vec<usize>,
    /// Causes not yet included, by position.
    missing: Vec<u32>,
    enabled: Vec<usize>,
    blocked: Vec<usize>,
    saved: Vec<usize>,
    included: FixedBitSet,
    pending: Vec<usize>,
    /// Per position, the index of its visible label in `counts`.
    slot: Vec<Option<usize>>,
    counts: Vec<usize>,
    limits: Vec<usize>,
    visit: F,
}

const BITS: usize = usize::BITS as usize;

impl<F: FnMut(&FixedBitSet) -> ControlFlow<()>> MaximalSearch<'_, F> {
    fn conflicts(&self, p: usize) -> &[usize] {
        match &self.remapped {
            Some(sets) => sets[p].as_slice(),
            None => self.s.conflicts_of(self.topo[p]).as_slice(),
        }
    }

    fn is_blocked(&self, p: usize) -> bool {
        self.blocked[p / BITS] >> (p % BITS) & 1 == 1
    }

    fn next_ready(&self, from: usize) -> usize {
        let n = self.topo.len();
        let mut w = from / BITS;
        if from >= n {
            return n;
        }
        let mut bits = self.enabled[w] & !self.blocked[w] & (usize::MAX << (from % BITS));
        loop {
            if bits != 0 {
                return (w * BITS + bits.trailing_zeros() as usize).min(n);
            }
            w += 1;
            if w == self.enabled.len() {
                return n;
            }
            bits = self.enabled[w] & !self.blocked[w];
        }
    }

    fn include(&mut self, p: usize) {
        self.included.insert(self.topo[p].index());
        self.saved.extend_from_slice(&self.blocked);
        let words = self.blocked.len();
        for w in 0..words {
            let c = self.conflicts(p).get(w).copied().unwrap_or(0);
            self.blocked[w] |= c;
        }
        for i in 0..self.succs[p].len() {
            let x = self.succs[p][i];
            self.missing[x] -= 1;
            if self.missing[x] == 0 {
                self.enabled[x / BITS] |= 1 << (x % BITS);
            }
        }
    }

    fn undo(&mut self, p: usize) {
        for i in 0..self.succs[p].len() {
            let x = self.succs[p][i];
            if self.missing[x] == 0 {
                self.enabled[x / BITS] &= !(1 << (x % BITS));
            }
            self.missing[x] += 1;
        }
        let start = self.saved.len() - self.blocked.len();
        self.blocked.copy_from_slice(&self.saved[start..]);
        self.saved.truncate(start);
        self.included.set(self.topo[p].index(), false);
    }

    fn run(&mut self, from: usize) -> ControlFlow<()> {
        let pos = self.next_ready(from);
        if self
            .pending
            .iter()
            .any(|&x| !self.is_blocked(x) && self.last_conflict[x] < pos)
        {
            return ControlFlow::Continue(());
        }
        if pos == self.topo.len() {
            return (self.visit)(&self.included);
        }
        let room = self.slot[pos].is_none_or(|k| self.counts[k] < self.limits[k]);
        if room {
            if let Some(k) = self.slot[pos] {
                self.counts[k] += 1;
            }
            self.include(pos);
            let flow = self.run(pos + 1);
            self.undo(pos);
            if let Some(k) = self.slot[pos] {
                self.counts[k] -= 1;
            }
            flow?;
        }
        if self.last_conflict[pos] != usize::MAX && self.last_conflict[pos] > pos {
            self.pending.push(pos);
            let flow = self.run(pos + 1);
            self.pending.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` with the member set of every maximal configuration, in
/// search order. Stops early when `visit` breaks.
pub fn for_each_maximal<F>(s: &EventStructure, visit: F) -> ControlFlow<()>
where
    F: FnMut(&FixedBitSet) -> ControlFlow<()>,
{
    search_maximal(s, None, visit)
}

/// Like [`for_each_maximal`], restricted to maximal configurations with at
/// most `bounds[l]` events labeled `l` for every visible label `l`. Labels
/// missing from `bounds` may not occur at all.
pub fn for_each_maximal_bounded<F>(
    s: &EventStructure,
    bounds: &BTreeMap<Label, usize>,
    visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&FixedBitSet) -> ControlFlow<()>,
{
    search_maximal(s, Some(bounds), visit)
}

fn search_maximal<F>(
    s: &EventStructure,
    bounds: Option<&BTreeMap<Label, usize>>,
    visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&FixedBitSet) -> ControlFlow<()>,
{
    let n = s.len();
    let topo = s.topological_order();
    let mut pos_of = vec![0usize; n];
    for (p, e) in topo.iter().enumerate() {
        pos_of[e.index()] = p;
    }
    let identity = topo.iter().enumerate().all(|(p, e)| e.index() == p);
    let remapped = (!identity).then(|| {
        topo.iter()
            .map(|&e| {
                let mut set = FixedBitSet::with_capacity(n);
                set.extend(s.conflicts_of(e).ones().map(|x| pos_of[x]));
                set
            })
            .collect()
    });
    let last_conflict = topo
        .iter()
        .map(|&e| s.conflicts_of(e).ones().map(|x| pos_of[x]).max().unwrap_or(usize::MAX))
        .collect();
    let mut succs = vec![Vec::new(); n];
    let mut missing = vec![0u32; n];
    for e in s.events() {
        for c in s.causes(e) {
            succs[pos_of[c.index()]].push(pos_of[e.index()]);
        }
        missing[pos_of[e.index()]] = s.causes(e).len() as u32;
    }
    let words = n.div_ceil(BITS);
    let mut enabled = vec![0usize; words];
    for p in 0..n {
        if missing[p] == 0 {
            enabled[p / BITS] |= 1 << (p % BITS);
        }
    }
    let mut slot = vec![None; n];
    let mut limits = Vec::new();
    if let Some(bounds) = bounds {
        let mut index: HashMap<Label, usize> = HashMap::new();
        for (p, &e) in topo.iter().enumerate() {
            let l = s.label(e);
            if l.is_epsilon() {
                continue;
            }
            let k = *index.entry(l).or_insert_with(|| {
                limits.push(bounds.get(&l).copied().unwrap_or(0));
                limits.len() - 1
            });
            slot[p] = Some(k);
        }
    }
    let mut search = MaximalSearch {
        topo,
        remapped,
        s,
        succs,
        last_conflict,
        missing,
        enabled,
        blocked: vec![0; words],
        saved: Vec::new(),
        included: FixedBitSet::with_capacity(n),
        pending: Vec::new(),
        counts: vec![0; limits.len()],
        slot,
        limits,
        visit,
    };
    search.run(0)
}

/// Member sets of all maximal configurations, sorted lexicographically by ids.
pub fn maximal_member_sets(s: &EventStructure, cap: usize) -> Result<Vec<FixedBitSet>> {
    let mut out = Vec::new();
    let flow = for_each_maximal(s, |set| {
        if out.len() >= cap {
            return ControlFlow::Break(());
        }
        out.push(set.clone());
        ControlFlow::Continue(())
    });
    if flow.is_break() {
        return Err(Error::ConfigurationCap(cap));
    }
    out.sort_by(|a, b| a.ones().cmp(b.ones()));
    Ok(out)
}

/// All maximal configurations, sorted lexicographically by member ids.
pub fn maximal_configurations(s: &EventStructure, cap: usize) -> Result<Vec<Configuration>> {
    Ok(maximal_member_sets(s, cap)?
        .iter()
        .map(|set| Configuration::from_set(s, set))
        .collect())
}

/// Every configuration (containing ⊥), grouped by size in breadth-first order.
pub fn all_configurations(s: &EventStructure, cap: usize) -> Result<Vec<FixedBitSet>> {
    let mut start = FixedBitSet::with_capacity(s.len());
    start.insert(0);
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    seen.insert(start.clone());
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let cur = out[head].clone();
        head += 1;
        for e in s.events() {
            if !cur.contains(e.index()) && s.enabled_in(e, &cur) {
                let mut next = cur.clone();
                next.insert(e.index());
                if seen.insert(next.clone()) {
                    if out.len() >= cap {
                        return Err(Error::ConfigurationCap(cap));
                    }
                    out.push(next);
                }
            }
        }
    }
    Ok(out)
}

/// The language of a structure, by trace enumeration of each maximal configuration.
pub fn language(s: &EventStructure, limits: Limits) -> Result<Language> {
    let mut out = Language::new();
    for c in maximal_configurations(s, limits.max_configurations)? {
        out.extend(c.language(limits.max_words)?);
        if out.len() > limits.max_words {
            return Err(Error::WordCap(limits.max_words));
        }
    }
    Ok(out)
}

/// |L(s)| without materializing the words: counts paths of the determinized
/// configuration automaton. `cap` bounds the number of subset states.
pub fn count_words(s: &EventStructure, cap: usize) -> Result<u128> {
    let close = |mut states: Vec<FixedBitSet>| -> Vec<FixedBitSet> {
        let mut seen: HashSet<FixedBitSet> = states.iter().cloned().collect();
        let mut i = 0;
        while i < states.len() {
            let cur = states[i].clone();
            i += 1;
            for e in s.events() {
                if s.label(e).is_epsilon() && !cur.contains(e.index()) && s.enabled_in(e, &cur) {
                    let mut next = cur.clone();
                    next.insert(e.index());
                    if seen.insert(next.clone()) {
                        states.push(next);
                    }
                }
            }
        }
        states.sort_by(|a, b| a.ones().cmp(b.ones()));
        states
    };
    let mut start = FixedBitSet::with_capacity(s.len());
    start.insert(0);
    let mut layer: HashMap<Vec<FixedBitSet>, u128> = HashMap::new();
    layer.insert(close(vec![start]), 1);
    let mut total: u128 = 0;
    let mut visited = 0usize;
    while !layer.is_empty() {
        visited += layer.len();
        if visited > cap {
            return Err(Error::SubsetCap(cap));
        }
        let mut next: HashMap<Vec<FixedBitSet>, u128> = HashMap::new();
        for (subset, paths) in layer {
            if subset.iter().any(|c| is_maximal_set(s, c)) {
                total += paths;
            }
            let mut by_label: BTreeMap<Label, Vec<FixedBitSet>> = BTreeMap::new();
            for c in &subset {
                for e in s.events() {
                    let l = s.label(e);
                    if !l.is_epsilon() && !c.contains(e.index()) && s.enabled_in(e, c) {
                        let mut n = c.clone();
                        n.insert(e.index());
                        by_label.entry(l).or_default().push(n);
                    }
                }
            }
            for (_, targets) in by_label {
                let mut targets = targets;
                targets.sort_by(|a, b| a.ones().cmp(b.ones()));
                targets.dedup();
                *next.entry(close(targets)).or_insert(0) += paths;
            }
        }
        layer = next;
    }
    Ok(total)
}

/// Average over maximal configurations of |C \ {⊥}| divided by the largest
/// causal depth in C. Depth counts direct-cause steps from ⊥.
pub fn pc_metric(s: &EventStructure, cap: usize) -> Result<f64> {
    let mut depth = vec![0usize; s.len()];
    for &e in s.topological_order() {
        depth[e.index()] = s
            .causes(e)
            .iter()
            .map(|c| depth[c.index()] + 1)
            .max()
            .unwrap_or(0);
    }
    let sets = maximal_member_sets(s, cap)?;
    let sum: f64 = sets
        .iter()
        .map(|set| {
            let size = set.count_ones(..) - 1;
            let max_depth = set.ones().map(|e| depth[e]).max().unwrap_or(0);
            if max_depth == 0 {
                0.0
            } else {
                size as f64 / max_depth as f64
            }
        })
        .sum();
    Ok(sum / sets.len() as f64)
}
