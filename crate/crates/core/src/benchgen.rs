//! Benchmark families, random structures, and structure mutations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::structure::{EventId, EventStructure, RawStructure};

/// ⊥ and `n` concurrent events labeled "1".."n".
pub fn allpar(n: usize) -> Result<EventStructure> {
    if n == 0 {
        return Err(Error::InvalidParameter("allpar needs n >= 1".into()));
    }
    let mut r = RawStructure::new();
    for i in 1..=n {
        r.add_event(i.to_string().as_str(), &[]);
    }
    r.build()
}

/// `n` uniquely labeled events "c1".."cn" in conflicting pairs (c1 # c2,
/// c3 # c4, ...), plus one ε-labeled reset event for every choice of one
/// event per pair, caused by the chosen events. There are 2^(n/2) maximal
/// configurations.
pub fn ccnfs(n: usize) -> Result<EventStructure> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("ccnfs needs a positive even n, got {n}")));
    }
    if n > 40 {
        return Err(Error::InvalidParameter(format!("ccnfs supports n <= 40, got {n}")));
    }
    let mut r = RawStructure::new();
    let events: Vec<EventId> = (1..=n)
        .map(|i| r.add_event(format!("c{i}").as_str(), &[]))
        .collect();
    for pair in events.chunks(2) {
        r.add_conflict(pair[0], pair[1]);
    }
    let pairs = n / 2;
    for mask in 0u64..(1 << pairs) {
        let causes: Vec<EventId> = (0..pairs)
            .map(|p| events[2 * p + ((mask >> p) & 1) as usize])
            .collect();
        r.add_event(Label::EPSILON, &causes);
    }
    r.build()
}

/// `n` mutually conflicting prefixes "p1".."pn", each followed by its own
/// chain "s1".."sm".
pub fn sharing(n: usize, m: usize) -> Result<EventStructure> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("sharing needs n >= 1 and m >= 1".into()));
    }
    let mut r = RawStructure::new();
    let mut prefixes = Vec::with_capacity(n);
    for i in 1..=n {
        let p = r.add_event(format!("p{i}").as_str(), &[]);
        prefixes.push(p);
        let mut prev = p;
        for j in 1..=m {
            prev = r.add_event(format!("s{j}").as_str(), &[prev]);
        }
    }
    for (i, &a) in prefixes.iter().enumerate() {
        for &b in &prefixes[i + 1..] {
            r.add_conflict(a, b);
        }
    }
    r.build()
}

/// Shape of a random structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomParams {
    /// Number of non-⊥ events.
    pub events: usize,
    /// Labels are drawn from "a", "b", ...
    pub labels: usize,
    pub cause_prob: f64,
    pub conflict_prob: f64,
    pub epsilon_prob: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            events: 6,
            labels: 3,
            cause_prob: 0.25,
            conflict_prob: 0.15,
            epsilon_prob: 0.0,
        }
    }
}

/// A random valid structure. Causes point to earlier events; a conflict is
/// only added when the two events share no causal descendant.
pub fn random_structure<R: Rng>(rng: &mut R, params: RandomParams) -> EventStructure {
    let names: Vec<Label> = (0..params.labels.max(1))
        .map(|i| Label::new(&((b'a' + (i % 26) as u8) as char).to_string()))
        .collect();
    let mut r = RawStructure::new();
    for i in 1..=params.events {
        let causes: Vec<EventId> = (1..i)
            .filter(|_| rng.gen_bool(params.cause_prob))
            .map(EventId::from)
            .collect();
        let label = if rng.gen_bool(params.epsilon_prob) {
            Label::EPSILON
        } else {
            names[rng.gen_range(0..names.len())]
        };
        r.add_event(label, &causes);
    }
    let order = r.clone().build().expect("causes point backwards");
    for a in 1..=params.events {
        for b in a + 1..=params.events {
            if rng.gen_bool(params.conflict_prob) {
                let (a, b) = (EventId::from(a), EventId::from(b));
                let mut da = order.descendants(a).clone();
                da.insert(a.index());
                let mut db = order.descendants(b).clone();
                db.insert(b.index());
                if da.is_disjoint(&db) {
                    r.add_conflict(a, b);
                }
            }
        }
    }
    r.build().expect("generated structure is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationKind {
    /// Make the first event a cause of the second.
    AddOrder(EventId, EventId),
    /// Remove an event and all its causal descendants.
    DropEvent(EventId),
    Relabel(EventId, Label),
    AddConflict(EventId, EventId),
}

fn known(s: &EventStructure, e: EventId) -> Result<()> {
    if s.contains(e) {
        Ok(())
    } else {
        Err(Error::UnknownEvent(e))
    }
}

/// Applies a mutation. AddOrder(a, b) requires `a` and `b` concurrent and
/// every conflict of `a` to be one of `b`; under that condition the mutant's
/// language is a subset of the original's.
pub fn mutate(s: &EventStructure, kind: MutationKind) -> Result<EventStructure> {
    let mut raw = s.to_raw();
    match kind {
        MutationKind::AddOrder(a, b) => {
            known(s, a)?;
            known(s, b)?;
            if !s.concurrent(a, b)? || a.is_bottom() || b.is_bottom() {
                return Err(Error::NotConcurrent(a, b));
            }
            if !s.conflicts_of(a).is_subset(s.conflicts_of(b)) {
                return Err(Error::InvalidParameter(format!(
                    "{a} has conflicts that {b} lacks; ordering them could add words"
                )));
            }
            raw.causes[b.index()].push(a);
            raw.build()
        }
        MutationKind::DropEvent(e) => {
            known(s, e)?;
            if e.is_bottom() {
                return Err(Error::InvalidParameter("cannot drop ⊥".into()));
            }
            let mut gone = s.descendants(e).clone();
            gone.insert(e.index());
            let mut renumber = vec![None; s.len()];
            let mut next = 0u32;
            for i in 0..s.len() {
                if !gone.contains(i) {
                    renumber[i] = Some(EventId(next));
                    next += 1;
                }
            }
            let map = |x: EventId| renumber[x.index()];
            let mut out = RawStructure::default();
            for i in (0..s.len()).filter(|&i| !gone.contains(i)) {
                out.labels.push(raw.labels[i]);
                out.causes
                    .push(raw.causes[i].iter().filter_map(|&c| map(c)).collect());
            }
            out.conflicts = raw
                .conflicts
                .iter()
                .filter_map(|&(a, b)| Some((map(a)?, map(b)?)))
                .collect();
            out.build()
        }
        MutationKind::Relabel(e, label) => {
            known(s, e)?;
            if e.is_bottom() {
                return Err(Error::InvalidParameter("⊥ keeps the ε label".into()));
            }
            raw.labels[e.index()] = label;
            raw.build()
        }
        MutationKind::AddConflict(a, b) => {
            known(s, a)?;
            known(s, b)?;
            raw.add_conflict(a, b);
            let report = raw.validate();
            if !report.ok() {
                return Err(Error::InvalidParameter(format!("conflict ({a}, {b}): {report}")));
            }
            raw.build()
        }
    }
}

/// All AddOrder mutations that [`mutate`] accepts.
pub fn order_mutations(s: &EventStructure) -> Vec<MutationKind> {
    let mut out = Vec::new();
    for a in s.events().skip(1) {
        for b in s.events().skip(1) {
            if s.concurrent(a, b).unwrap_or(false) && s.conflicts_of(a).is_subset(s.conflicts_of(b)) {
                out.push(MutationKind::AddOrder(a, b));
            }
        }
    }
    out
}

/// A random applicable mutation, or `None` for a ⊥-only structure.
pub fn random_mutation<R: Rng>(rng: &mut R, s: &EventStructure) -> Option<MutationKind> {
    if s.len() < 2 {
        return None;
    }
    let alphabet: Vec<Label> = s.alphabet().into_iter().collect();
    for _ in 0..32 {
        let a = EventId::from(rng.gen_range(1..s.len()));
        let b = EventId::from(rng.gen_range(1..s.len()));
        let kind = match rng.gen_range(0..4) {
            0 => MutationKind::AddOrder(a, b),
            1 => MutationKind::DropEvent(a),
            2 => {
                let l = if alphabet.is_empty() {
                    Label::new("z")
                } else {
                    alphabet[rng.gen_range(0..alphabet.len())]
                };
                MutationKind::Relabel(a, l)
            }
            _ => MutationKind::AddConflict(a, b),
        };
        if mutate(s, kind).is_ok() {
            return Some(kind);
        }
    }
    Some(MutationKind::DropEvent(EventId::from(s.len() - 1)))
}
