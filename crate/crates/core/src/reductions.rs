//! Hamiltonian-cycle reductions to membership and inclusion, with
//! brute-force graph oracles.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::structure::{EventId, EventStructure, RawStructure};

/// A directed graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// An undirected graph on vertices `0..n` with marked edges `b` (edge indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub b: Vec<usize>,
}

fn check_edges(n: usize, edges: &[(usize, usize)]) -> Result<()> {
    if n <= 1 {
        return Err(Error::InvalidGraph(format!("need at least 2 vertices, got {n}")));
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!("edge {i} ({u}, {v}) has an unknown vertex")));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("edge {i} is a self-loop on {u}")));
        }
    }
    Ok(())
}

impl DiGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> DiGraph {
        DiGraph { n, edges }
    }

    pub fn validate(&self) -> Result<()> {
        check_edges(self.n, &self.edges)
    }

    /// Drops self-loops; returns the graph and how many were removed.
    pub fn without_self_loops(&self) -> (DiGraph, usize) {
        let edges: Vec<_> = self.edges.iter().copied().filter(|(u, v)| u != v).collect();
        let removed = self.edges.len() - edges.len();
        (DiGraph { n: self.n, edges }, removed)
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.iter().any(|(u, v)| u == v)
    }
}

impl UGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, b: Vec<usize>) -> UGraph {
        UGraph { n, edges, b }
    }

    pub fn validate(&self) -> Result<()> {
        check_edges(self.n, &self.edges)?;
        let mut seen = BTreeSet::new();
        for &i in &self.b {
            if i >= self.edges.len() {
                return Err(Error::InvalidGraph(format!("B refers to unknown edge {i}")));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidGraph(format!("B lists edge {i} twice")));
            }
        }
        Ok(())
    }

    pub fn bh(&self) -> usize {
        self.b.len() / 2
    }

    /// Each undirected edge `q` becomes directed edges `2q` (u→v) and `2q+1` (v→u).
    pub fn directed(&self) -> DiGraph {
        let edges = self.edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
        DiGraph { n: self.n, edges }
    }

    pub fn without_self_loops(&self) -> (UGraph, usize) {
        let mut map = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u != v {
                map[i] = Some(edges.len());
                edges.push((u, v));
            }
        }
        let b = self.b.iter().filter_map(|&i| map.get(i).copied().flatten()).collect();
        let removed = self.edges.len() - edges.len();
        (UGraph { n: self.n, edges, b }, removed)
    }
}

/// Id of e_{f,j} inside a Hamiltonian-cycle block starting at `base`.
fn position_event(base: usize, n: usize, f: usize, j: usize) -> EventId {
    EventId::from(base + f * n + j)
}

/// Appends the Hamiltonian-cycle block for `g` under `root`: events e_{f,j}
/// for every edge and position, then e_{f,f',j} for every connected pair,
/// with the positional, edge and target conflicts.
fn add_hc_block(raw: &mut RawStructure, root: EventId, g: &DiGraph) {
    let n = g.n;
    let k = g.edges.len();
    let base = raw.len();
    let x = Label::new("x");
    for _f in 0..k {
        for _j in 0..n {
            raw.add_event(Label::EPSILON, &[root]);
        }
    }
    for (f, &(_, tf)) in g.edges.iter().enumerate() {
        for (f2, &(sf2, _)) in g.edges.iter().enumerate() {
            if tf == sf2 {
                for j in 0..n {
                    raw.add_event(
                        x,
                        &[
                            position_event(base, n, f, j),
                            position_event(base, n, f2, (j + 1) % n),
                        ],
                    );
                }
            }
        }
    }
    let mut conflicts = BTreeSet::new();
    for f in 0..k {
        for f2 in 0..k {
            for j in 0..n {
                for i in 0..n {
                    let same_edge = f == f2 && i != j;
                    let same_position = f != f2 && i == j;
                    let same_target = f != f2 && g.edges[f].1 == g.edges[f2].1;
                    if same_edge || same_position || same_target {
                        let a = position_event(base, n, f, j);
                        let b = position_event(base, n, f2, i);
                        conflicts.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
    }
    raw.conflicts.extend(conflicts);
}

/// The structure whose language contains xⁿ iff `g` has a Hamiltonian cycle.
pub fn hc_structure(g: &DiGraph) -> Result<EventStructure> {
    g.validate()?;
    let mut raw = RawStructure::new();
    add_hc_block(&mut raw, EventId::BOTTOM, g);
    raw.build()
}

/// Closed-form event count of [`hc_structure`].
pub fn hc_event_count(g: &DiGraph) -> usize {
    1 + g.n * g.edges.len() + g.n * connected_pairs(g)
}

fn connected_pairs(g: &DiGraph) -> usize {
    g.edges
        .iter()
        .map(|&(_, t)| g.edges.iter().filter(|&&(s, _)| s == t).count())
        .sum()
}

/// The pair (E₁, E₂) with L(E₁) ⊆ L(E₂) iff every removal of at most ⌊|B|/2⌋
/// marked edges leaves a Hamiltonian cycle.
pub fn dhc_pair(g: &UGraph) -> Result<(EventStructure, EventStructure)> {
    g.validate()?;
    let n = g.n;
    let m = g.b.len();
    let bh = g.bh();
    let x = Label::new("x");
    let y = Label::new("y");
    let lb: Vec<Label> = (1..=m).map(|i| Label::new(&format!("lb{i}"))).collect();

    let mut r1 = RawStructure::new();
    let mut prev = EventId::BOTTOM;
    for _ in 0..n {
        prev = r1.add_event(x, &[prev]);
    }
    for l in &lb {
        let ein = r1.add_event(*l, &[]);
        r1.add_event(y, &[ein]);
        let eout = r1.add_event(Label::EPSILON, &[]);
        r1.add_conflict(ein, eout);
    }

    let mut r2 = RawStructure::new();
    let es = r2.add_event(Label::EPSILON, &[]);
    let mut ein = Vec::with_capacity(m);
    if m > 0 {
        let mut prev = EventId::BOTTOM;
        let mut ev1 = None;
        for _ in 0..n {
            prev = r2.add_event(x, &[prev]);
            ev1.get_or_insert(prev);
        }
        let ev1 = ev1.expect("n > 1");
        r2.add_conflict(es, ev1);
        let mut prev_d = EventId::BOTTOM;
        for (i, l) in lb.iter().enumerate() {
            let e_in = r2.add_event(*l, &[]);
            let e_out = r2.add_event(Label::EPSILON, &[]);
            r2.add_conflict(e_in, e_out);
            ein.push(e_in);
            let d = r2.add_event(y, &[prev_d]);
            // efix_i hangs off eD_i; efix_0 off ⊥.
            let fix = r2.add_event(Label::EPSILON, &[prev_d]);
            r2.add_conflict(d, fix);
            if i <= bh {
                r2.add_conflict(fix, ev1);
            }
            prev_d = d;
        }
    }
    let base = r2.len();
    let dg = g.directed();
    add_hc_block(&mut r2, es, &dg);
    for (i, &bi) in g.b.iter().enumerate() {
        for f in [2 * bi, 2 * bi + 1] {
            for j in 0..n {
                r2.add_conflict(ein[i], position_event(base, n, f, j));
            }
        }
    }
    Ok((r1.build()?, r2.build()?))
}

/// Closed-form event counts of the two structures of [`dhc_pair`].
pub fn dhc_event_counts(g: &UGraph) -> (usize, usize) {
    let n = g.n;
    let m = g.b.len();
    let hc = hc_event_count(&g.directed()) - 1;
    let e1 = 1 + n + 3 * m;
    let e2 = if m == 0 { 2 + hc } else { 2 + n + 4 * m + hc };
    (e1, e2)
}

const HC_MAX_VERTICES: usize = 9;

/// Exhaustive Hamiltonian-cycle test, for at most 9 vertices.
pub fn brute_hc(g: &DiGraph) -> Result<bool> {
    let n = g.n;
    if n > HC_MAX_VERTICES {
        return Err(Error::InvalidParameter(format!(
            "brute-force search supports at most {HC_MAX_VERTICES} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok(false);
    }
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in &g.edges {
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!("edge ({u}, {v}) has an unknown vertex")));
        }
        adj[u][v] = true;
    }
    if n == 1 {
        return Ok(adj[0][0]);
    }
    fn extend(adj: &[Vec<bool>], path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = adj.len();
        let last = *path.last().unwrap();
        if path.len() == n {
            return adj[last][path[0]];
        }
        for v in 0..n {
            if !used[v] && adj[last][v] {
                used[v] = true;
                path.push(v);
                if extend(adj, path, used) {
                    return true;
                }
                path.pop();
                used[v] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[0] = true;
    Ok(extend(&adj, &mut vec![0], &mut used))
}

/// Exhaustive DHC test, for at most 8 vertices and 8 marked edges.
pub fn brute_dhc(g: &UGraph) -> Result<bool> {
    g.validate()?;
    if g.n > 8 || g.b.len() > 8 {
        return Err(Error::InvalidParameter(
            "brute-force DHC supports at most 8 vertices and 8 marked edges".into(),
        ));
    }
    let m = g.b.len();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize > g.bh() {
            continue;
        }
        let removed: BTreeSet<usize> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| g.b[i]).collect();
        let kept = g
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, &e)| e)
            .collect();
        if !brute_hc(&UGraph::new(g.n, kept, vec![]).directed())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Each ordered pair (u, v), u ≠ v, is an edge with probability `p`.
pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> DiGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    DiGraph { n, edges }
}

/// Each pair {u, v} is an edge with probability `p`; up to `max_b` edges are marked.
pub fn random_ugraph<R: Rng>(rng: &mut R, n: usize, p: f64, max_b: usize) -> UGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let mut pool: Vec<usize> = (0..edges.len()).collect();
    let count = rng.gen_range(0..=max_b.min(edges.len()));
    let mut b = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.gen_range(0..pool.len());
        b.push(pool.swap_remove(i));
    }
    b.sort_unstable();
    UGraph { n, edges, b }
}
