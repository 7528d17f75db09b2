use thiserror::Error;

use crate::structure::{EventId, ValidationReport};

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("invalid event structure: {0}")]
    Invalid(ValidationReport),
    #[error("events {0} and {1} are not concurrent")]
    NotConcurrent(EventId, EventId),
    #[error("event set is not a configuration: {0}")]
    NotConfiguration(String),
    #[error("ordering constraints are cyclic")]
    CyclicOrder,
    #[error("configuration count exceeds the cap of {0}")]
    ConfigurationCap(usize),
    #[error("word count exceeds the cap of {0}")]
    WordCap(usize),
    #[error("determinization exceeds the cap of {0} product states")]
    SubsetCap(usize),
    #[error("split budget exhausted ({0})")]
    SplitBudget(String),
    #[error("word contains the empty label")]
    EpsilonInWord,
    #[error("embedding is not a necessary embedding")]
    NotNecessary,
    #[error("automaton has a cycle")]
    CyclicAutomaton,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
