use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Edge, GeodesicAutomaton, Meta};

#[derive(Serialize, Deserialize)]
struct FileEdge {
    from: usize,
    to: usize,
    label: String,
    weights: BTreeMap<String, i64>,
}

#[derive(Serialize, Deserialize, Default)]
struct FileMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fixture_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certified_depth: Option<usize>,
    #[serde(default)]
    source: String,
}

#[derive(Serialize, Deserialize)]
struct FileAutomaton {
    states: usize,
    initial: usize,
    alphabet: Vec<String>,
    edges: Vec<FileEdge>,
    #[serde(default)]
    meta: FileMeta,
}

fn single_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Automaton(format!("label `{s}` is not a single symbol"))),
    }
}

impl GeodesicAutomaton {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FileAutomaton = serde_json::from_str(text)?;
        let alphabet = raw
            .alphabet
            .iter()
            .map(|s| single_char(s))
            .collect::<Result<Vec<_>>>()?;
        let mut names: Vec<String> = Vec::new();
        for e in &raw.edges {
            for k in e.weights.keys() {
                if !names.contains(k) {
                    names.push(k.clone());
                }
            }
        }
        names.sort();
        let edges = raw
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let weights = names
                    .iter()
                    .map(|n| {
                        e.weights.get(n).copied().ok_or_else(|| {
                            Error::Automaton(format!("edge {i} is missing weight `{n}`"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Edge {
                    from: e.from,
                    to: e.to,
                    label: single_char(&e.label)?,
                    weights,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let meta = Meta {
            fixture: raw.meta.fixture,
            fixture_hash: raw.meta.fixture_hash,
            base: raw.meta.base,
            certified_depth: raw.meta.certified_depth,
            source: raw.meta.source,
        };
        GeodesicAutomaton::new(raw.states, raw.initial, alphabet, names, edges, meta)
    }

    /// Canonical serialization: edges sorted by `(from, label, to)`.
    pub fn to_json(&self) -> String {
        let raw = FileAutomaton {
            states: self.states,
            initial: self.initial,
            alphabet: self.alphabet.iter().map(|c| c.to_string()).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| FileEdge {
                    from: e.from,
                    to: e.to,
                    label: e.label.to_string(),
                    weights: self
                        .weight_names
                        .iter()
                        .cloned()
                        .zip(e.weights.iter().copied())
                        .collect(),
                })
                .collect(),
            meta: FileMeta {
                fixture: self.meta.fixture.clone(),
                fixture_hash: self.meta.fixture_hash.clone(),
                base: self.meta.base.clone(),
                certified_depth: self.meta.certified_depth,
                source: self.meta.source.clone(),
            },
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("automaton serializes");
        s.push('\n');
        s
    }
}

pub fn load_automaton(path: &Path) -> Result<GeodesicAutomaton> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GeodesicAutomaton::from_json(&text)
}

pub fn save_automaton(a: &GeodesicAutomaton, path: &Path) -> Result<()> {
    std::fs::write(path, a.to_json()).map_err(|e| Error::io(path, e))
}
