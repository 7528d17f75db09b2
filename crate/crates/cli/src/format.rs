//! JSON file formats for event structures and graphs.

use std::collections::BTreeSet;

use fles_core::reductions::{DiGraph, UGraph};
use fles_core::{Error, EventId, EventStructure, Label, RawStructure, Result};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDoc {
    pub id: u32,
    /// "" is the silent label.
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub causes: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlesDocument {
    pub format_version: u32,
    pub events: Vec<EventDoc>,
    #[serde(default)]
    pub conflicts: Vec<[u32; 2]>,
}

impl FlesDocument {
    /// Canonical form: events by id, causes sorted, conflicts as sorted
    /// (low, high) pairs of immediate conflicts.
    pub fn from_structure(s: &EventStructure) -> FlesDocument {
        let events = s
            .events()
            .map(|e| {
                let mut causes: Vec<u32> = s.causes(e).iter().map(|c| c.0).collect();
                causes.sort_unstable();
                causes.dedup();
                EventDoc {
                    id: e.0,
                    label: s.label(e).as_str().to_string(),
                    causes,
                }
            })
            .collect();
        let conflicts: BTreeSet<[u32; 2]> = s
            .immediate_conflicts()
            .iter()
            .map(|&(a, b)| [a.0.min(b.0), a.0.max(b.0)])
            .collect();
        FlesDocument {
            format_version: FORMAT_VERSION,
            events,
            conflicts: conflicts.into_iter().collect(),
        }
    }

    /// Builds and validates the structure. ⊥ may be omitted, and events
    /// without causes are placed directly under ⊥.
    pub fn to_structure(&self) -> Result<EventStructure> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        let mut events: Vec<&EventDoc> = self.events.iter().collect();
        events.sort_by_key(|e| e.id);
        let has_bottom = events.first().is_some_and(|e| e.id == 0);
        let offset = usize::from(!has_bottom);
        for (i, e) in events.iter().enumerate() {
            if e.id as usize != i + offset {
                return Err(Error::Parse(format!(
                    "event ids must be 0..n without gaps or repeats; found {} at position {}",
                    e.id,
                    i + offset
                )));
            }
        }
        let mut raw = RawStructure::default();
        if !has_bottom {
            raw.labels.push(Label::EPSILON);
            raw.causes.push(Vec::new());
        }
        for e in events {
            raw.labels.push(Label::new(&e.label));
            let mut causes: Vec<EventId> = e.causes.iter().map(|&c| EventId(c)).collect();
            if e.id != 0 && causes.is_empty() {
                causes.push(EventId::BOTTOM);
            }
            raw.causes.push(causes);
        }
        raw.conflicts = self
            .conflicts
            .iter()
            .map(|&[a, b]| (EventId(a), EventId(b)))
            .collect();
        raw.build()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<FlesDocument> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn parse_structure(text: &str) -> Result<EventStructure> {
    FlesDocument::from_json(text)?.to_structure()
}

pub fn serialize_structure(s: &EventStructure) -> String {
    FlesDocument::from_structure(s).to_json()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub directed: bool,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    /// Indices into `edges` of the edges that may be removed.
    #[serde(rename = "B", default, skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<usize>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<GraphDocument> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&[u, v]| (u, v)).collect()
    }

    /// Directed reading; an undirected graph contributes both directions.
    pub fn digraph(&self) -> DiGraph {
        if self.directed {
            DiGraph::new(self.n, self.edge_list())
        } else {
            UGraph::new(self.n, self.edge_list(), Vec::new()).directed()
        }
    }

    pub fn ugraph(&self) -> Result<UGraph> {
        if self.directed {
            return Err(Error::InvalidGraph("the dhc reduction needs an undirected graph".into()));
        }
        Ok(UGraph::new(self.n, self.edge_list(), self.b.clone()))
    }
}
