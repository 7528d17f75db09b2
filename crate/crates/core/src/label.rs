//! Interned event labels and words over them.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        let mut ids = HashMap::new();
        ids.insert("", 0);
        RwLock::new(Interner {
            names: vec![""],
            ids,
        })
    })
}

/// An event label. The empty string is the silent label ε, which has intern id 0.
///
/// Labels are interned process-wide, so equality and hashing are integer
/// compares. Ordering follows the label text, which keeps word orders stable
/// regardless of the order in which labels were first seen.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label(u32);

impl Label {
    pub const EPSILON: Label = Label(0);

    pub fn new(name: &str) -> Label {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Label(id);
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Label(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Label(id)
    }

    pub fn as_str(self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }

    pub fn is_epsilon(self) -> bool {
        self.0 == 0
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl From<&str> for Label {
    fn from(name: &str) -> Self {
        Label::new(name)
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_epsilon() {
            f.write_str("ε")
        } else {
            write!(f, "{:?}", self.as_str())
        }
    }
}

/// A finite sequence of non-ε labels.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Label>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Builds a word, dropping ε symbols.
    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I) -> Word {
        Word(labels.into_iter().filter(|l| !l.is_epsilon()).collect())
    }

    /// Parses whitespace-separated label names.
    pub fn parse(text: &str) -> Word {
        Word(text.split_whitespace().map(Label::new).collect())
    }

    pub fn symbols(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, label: Label) {
        if !label.is_epsilon() {
            self.0.push(label);
        }
    }
}

impl FromIterator<Label> for Word {
    fn from_iter<T: IntoIterator<Item = Label>>(iter: T) -> Self {
        Word::from_labels(iter)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// A finite language, kept sorted and deduplicated so equality is set equality.
pub type Language = BTreeSet<Word>;

/// Convenience for tests and examples: builds a language from space-separated words.
pub fn language_of(words: &[&str]) -> Language {
    words.iter().map(|w| Word::parse(w)).collect()
}
