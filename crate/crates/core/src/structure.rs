//! The finite labeled prime event structure: events with labels, a causality
//! order generated by direct-cause edges, and a conflict relation that is
//! inherited along causality.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::semantics::Configuration;

/// Dense event index. Index 0 is always ⊥.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EventId(pub u32);

impl EventId {
    pub const BOTTOM: EventId = EventId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_bottom(self) -> bool {
        self.0 == 0
    }
}

impl From<usize> for EventId {
    fn from(i: usize) -> Self {
        EventId(i as u32)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub events: Vec<EventId>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: &'static str, events: Vec<EventId>, message: String) {
        self.violations.push(Violation {
            rule,
            events,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "[{}] {}", v.rule, v.message)?;
        }
        Ok(())
    }
}

/// Unvalidated event-structure data, as read from a file or assembled by a
/// generator. [`RawStructure::build`] turns it into an [`EventStructure`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawStructure {
    pub labels: Vec<Label>,
    pub causes: Vec<Vec<EventId>>,
    pub conflicts: Vec<(EventId, EventId)>,
}

impl RawStructure {
    /// A structure holding only ⊥.
    pub fn new() -> Self {
        RawStructure {
            labels: vec![Label::EPSILON],
            causes: vec![Vec::new()],
            conflicts: Vec::new(),
        }
    }

    /// Adds an event; an empty cause list means "caused by ⊥".
    pub fn add_event(&mut self, label: impl Into<Label>, causes: &[EventId]) -> EventId {
        let id = EventId::from(self.labels.len());
        self.labels.push(label.into());
        self.causes.push(if causes.is_empty() {
            vec![EventId::BOTTOM]
        } else {
            causes.to_vec()
        });
        id
    }

    pub fn add_conflict(&mut self, a: EventId, b: EventId) {
        self.conflicts.push((a, b));
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn build(self) -> Result<EventStructure> {
        EventStructure::new(self)
    }
}

/// Checks every structural axiom and reports all violations found.
pub fn validate(raw: &RawStructure) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = raw.labels.len();
    if n == 0 {
        report.push("bottom-missing", vec![], "structure has no events".into());
        return report;
    }
    if raw.causes.len() != n {
        report.push(
            "shape",
            vec![],
            format!("{} labels but {} cause lists", n, raw.causes.len()),
        );
        return report;
    }
    if !raw.labels[0].is_epsilon() {
        report.push(
            "bottom-label",
            vec![EventId::BOTTOM],
            format!("event 0 must be labeled ε, found {:?}", raw.labels[0]),
        );
    }
    if !raw.causes[0].is_empty() {
        report.push(
            "bottom-causes",
            vec![EventId::BOTTOM],
            "event 0 must not have causes".into(),
        );
    }
    let mut unknown = false;
    for (e, causes) in raw.causes.iter().enumerate() {
        for &c in causes {
            if c.index() >= n {
                unknown = true;
                report.push(
                    "unknown-event",
                    vec![EventId::from(e), c],
                    format!("event e{e} has unknown cause {c}"),
                );
            }
        }
    }
    for &(a, b) in &raw.conflicts {
        if a.index() >= n || b.index() >= n {
            unknown = true;
            report.push(
                "unknown-event",
                vec![a, b],
                format!("conflict ({a}, {b}) refers to an unknown event"),
            );
        }
    }
    if unknown {
        return report;
    }

    let topo = match topological_order(&raw.causes) {
        Ok(order) => order,
        Err(cyclic) => {
            report.push(
                "causality-cycle",
                cyclic.clone(),
                format!(
                    "causality cycle through {}",
                    cyclic.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
                ),
            );
            return report;
        }
    };
    let below = strict_ancestors(&raw.causes, &topo);

    for e in 1..n {
        if !below[e].contains(0) {
            report.push(
                "bottom-not-ancestor",
                vec![EventId::from(e)],
                format!("⊥ is not a causal ancestor of e{e}"),
            );
        }
    }
    for &(a, b) in &raw.conflicts {
        if a == b {
            report.push("self-conflict", vec![a], format!("{a} conflicts with itself"));
        } else if below[b.index()].contains(a.index()) || below[a.index()].contains(b.index()) {
            report.push(
                "conflict-within-history",
                vec![a, b],
                format!("{a} and {b} are causally related but declared in conflict"),
            );
        }
    }
    let above = transpose(&below);
    let conflict = close_conflicts(&raw.causes, &topo, &above, &raw.conflicts);
    for e in 0..n {
        if conflict[e].contains(e) {
            report.push(
                "inherited-self-conflict",
                vec![EventId::from(e)],
                format!("e{e} inherits a conflict with itself from its history"),
            );
        }
    }
    report
}

/// Kahn's algorithm with ascending-id tie-breaking. On failure returns the
/// events lying on causality cycles.
fn topological_order(causes: &[Vec<EventId>]) -> std::result::Result<Vec<EventId>, Vec<EventId>> {
    let n = causes.len();
    let mut indegree = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for (e, cs) in causes.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for &c in cs {
            if seen.insert(c) {
                indegree[e] += 1;
                children[c.index()].push(e);
            }
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&e| indegree[e] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(e) = ready.pop_first() {
        order.push(EventId::from(e));
        for &child in &children[e] {
            indegree[child] -= 1;
            if indegree[child] == 0 {
                ready.insert(child);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // The leftovers are on cycles or downstream of one; keep those that reach themselves.
    let left: Vec<usize> = (0..n).filter(|&e| indegree[e] > 0).collect();
    let on_cycle = left
        .iter()
        .copied()
        .filter(|&start| {
            let mut stack = children[start].clone();
            let mut seen = FixedBitSet::with_capacity(n);
            while let Some(v) = stack.pop() {
                if v == start {
                    return true;
                }
                if !seen.put(v) {
                    stack.extend(children[v].iter().copied());
                }
            }
            false
        })
        .map(EventId::from)
        .collect();
    Err(on_cycle)
}

fn strict_ancestors(causes: &[Vec<EventId>], topo: &[EventId]) -> Vec<FixedBitSet> {
    let n = causes.len();
    let mut below = vec![FixedBitSet::with_capacity(n); n];
    for &e in topo {
        let mut set = FixedBitSet::with_capacity(n);
        for &c in &causes[e.index()] {
            set.insert(c.index());
            set.union_with(&below[c.index()]);
        }
        below[e.index()] = set;
    }
    below
}

fn transpose(rel: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let n = rel.len();
    let mut out = vec![FixedBitSet::with_capacity(n); n];
    for (a, set) in rel.iter().enumerate() {
        for b in set.ones() {
            out[b].insert(a);
        }
    }
    out
}

/// Closed form of the conflict relation: x # y iff some immediate conflict
/// (a, b) has a ≤ x and b ≤ y.
fn close_conflicts(
    causes: &[Vec<EventId>],
    topo: &[EventId],
    above: &[FixedBitSet],
    immediate: &[(EventId, EventId)],
) -> Vec<FixedBitSet> {
    let n = causes.len();
    let mut direct = vec![FixedBitSet::with_capacity(n); n];
    for &(a, b) in immediate {
        let (a, b) = (a.index(), b.index());
        direct[a].union_with(&above[b]);
        direct[a].insert(b);
        direct[b].union_with(&above[a]);
        direct[b].insert(a);
    }
    let mut closed = vec![FixedBitSet::with_capacity(n); n];
    for &e in topo {
        let mut set = direct[e.index()].clone();
        for &c in &causes[e.index()] {
            set.union_with(&closed[c.index()]);
        }
        closed[e.index()] = set;
    }
    closed
}

/// A validated, immutable event structure with cached order and conflict matrices.
#[derive(Clone, Debug)]
pub struct EventStructure {
    labels: Vec<Label>,
    causes: Vec<Vec<EventId>>,
    conflicts: Vec<(EventId, EventId)>,
    topo: Vec<EventId>,
    below: Vec<FixedBitSet>,
    above: Vec<FixedBitSet>,
    conflict: Vec<FixedBitSet>,
}

impl PartialEq for EventStructure {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.causes == other.causes
            && self.conflicts == other.conflicts
    }
}

impl Eq for EventStructure {}

impl EventStructure {
    pub fn new(raw: RawStructure) -> Result<Self> {
        let report = validate(&raw);
        if !report.ok() {
            return Err(Error::Invalid(report));
        }
        let RawStructure {
            labels,
            mut causes,
            conflicts,
        } = raw;
        for cs in &mut causes {
            cs.sort_unstable();
            cs.dedup();
        }
        let mut conflicts: Vec<_> = conflicts
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        conflicts.sort_unstable();
        conflicts.dedup();
        let topo = topological_order(&causes).expect("validated structure is acyclic");
        let below = strict_ancestors(&causes, &topo);
        let above = transpose(&below);
        let conflict = close_conflicts(&causes, &topo, &above, &conflicts);
        Ok(EventStructure {
            labels,
            causes,
            conflicts,
            topo,
            below,
            above,
            conflict,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Never true: ⊥ is always present.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.len()).map(EventId::from)
    }

    pub fn contains(&self, e: EventId) -> bool {
        e.index() < self.len()
    }

    fn check(&self, e: EventId) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::UnknownEvent(e))
        }
    }

    pub fn label(&self, e: EventId) -> Label {
        self.labels[e.index()]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Direct causes as stored (sorted, deduplicated).
    pub fn causes(&self, e: EventId) -> &[EventId] {
        &self.causes[e.index()]
    }

    /// Immediate conflicts as stored, each pair ordered and the list sorted.
    pub fn immediate_conflicts(&self) -> &[(EventId, EventId)] {
        &self.conflicts
    }

    pub fn topological_order(&self) -> &[EventId] {
        &self.topo
    }

    /// `a < b` in the causality order.
    pub fn precedes(&self, a: EventId, b: EventId) -> bool {
        self.below[b.index()].contains(a.index())
    }

    pub fn ancestors(&self, e: EventId) -> &FixedBitSet {
        &self.below[e.index()]
    }

    pub fn descendants(&self, e: EventId) -> &FixedBitSet {
        &self.above[e.index()]
    }

    pub fn conflicts_of(&self, e: EventId) -> &FixedBitSet {
        &self.conflict[e.index()]
    }

    pub fn in_conflict(&self, a: EventId, b: EventId) -> bool {
        self.conflict[a.index()].contains(b.index())
    }

    /// The history ⌈e⌉ = {e' | e' < e}.
    pub fn history(&self, e: EventId) -> Result<Vec<EventId>> {
        self.check(e)?;
        Ok(self.below[e.index()].ones().map(EventId::from).collect())
    }

    /// Direct successors of `e`, optionally with the order restricted to a
    /// configuration (including any ordering added by splits).
    pub fn dsucc(&self, e: EventId, within: Option<&Configuration>) -> Result<Vec<EventId>> {
        self.check(e)?;
        if let Some(c) = within {
            let local = c
                .local_index(e)
                .ok_or_else(|| Error::NotConfiguration(format!("{e} is not a member")))?;
            return Ok(c.dsucc(local).map(|i| c.event(i)).collect());
        }
        let above = &self.above[e.index()];
        Ok(above
            .ones()
            .filter(|&s| {
                // no e'' with e < e'' < s
                !self.below[s].ones().any(|m| above.contains(m))
            })
            .map(EventId::from)
            .collect())
    }

    /// The full conflict relation as ordered pairs (a < b by id).
    pub fn full_conflicts(&self) -> Vec<(EventId, EventId)> {
        let mut out = Vec::new();
        for (a, set) in self.conflict.iter().enumerate() {
            for b in set.ones().filter(|&b| b > a) {
                out.push((EventId::from(a), EventId::from(b)));
            }
        }
        out
    }

    pub fn concurrent(&self, a: EventId, b: EventId) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a != b && !self.precedes(a, b) && !self.precedes(b, a) && !self.in_conflict(a, b))
    }

    /// The non-ε labels used by the structure.
    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.labels.iter().copied().filter(|l| !l.is_epsilon()).collect()
    }

    pub fn to_raw(&self) -> RawStructure {
        RawStructure {
            labels: self.labels.clone(),
            causes: self.causes.clone(),
            conflicts: self.conflicts.clone(),
        }
    }

    /// True when every cause of `e` is in `set` and `e` conflicts with nothing in it.
    pub(crate) fn enabled_in(&self, e: EventId, set: &FixedBitSet) -> bool {
        self.causes[e.index()].iter().all(|c| set.contains(c.index()))
            && self.conflict[e.index()].is_disjoint(set)
    }
}
