//! JSON formats for instances and flip sequences.
//!
//! Instance files look like
//! `{"n": 4, "T": [[1,2],[1,3],[3,4]], "Tprime": [[2,3],[2,4],[1,4]], "labeling": "cyclic"}`
//! with 1-based point labels. `labeling` says whether the labels are free to
//! be cut anywhere (`cyclic`) or already fix the linear representation with
//! the cut between `n` and `1` (`linear`); it defaults to `cyclic`.
//!
//! Sequence files look like
//! `{"start": {"n": 4, "edges": [[1,2],[1,3],[3,4]]}, "steps": [{"remove": [1,3], "add": [2,4]}], "meta": {...}}`.
//! Both formats round-trip losslessly.

use crate::flip::{ConstructorTag, Flip, FlipSequence, SequenceMeta};
use crate::geom::{Edge, InstanceError, Tree};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How an instance file's point labels are meant to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Labeling {
    #[default]
    Cyclic,
    Linear,
}

impl std::fmt::Display for Labeling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Labeling::Cyclic => "cyclic",
            Labeling::Linear => "linear",
        })
    }
}

/// A parsed and validated instance file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedInstance {
    pub t: Tree,
    pub tp: Tree,
    pub labeling: Labeling,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: u32,
    #[serde(rename = "T")]
    t: Vec<Edge>,
    #[serde(rename = "Tprime")]
    tprime: Vec<Edge>,
    #[serde(default)]
    labeling: Labeling,
}

pub fn parse_instance(json: &str) -> Result<LoadedInstance, IoError> {
    let raw: RawInstance = serde_json::from_str(json)?;
    let t = Tree::new(raw.n, raw.t).map_err(InstanceError::TreeT)?;
    let tp = Tree::new(raw.n, raw.tprime).map_err(InstanceError::TreeTPrime)?;
    Ok(LoadedInstance {
        t,
        tp,
        labeling: raw.labeling,
    })
}

pub fn emit_instance(t: &Tree, tp: &Tree, labeling: Labeling) -> String {
    assert_eq!(t.n(), tp.n(), "point counts must match");
    let raw = RawInstance {
        n: t.n(),
        t: t.edges().collect(),
        tprime: tp.edges().collect(),
        labeling,
    };
    serde_json::to_string_pretty(&raw).expect("instances serialize")
}

#[derive(Serialize, Deserialize)]
struct RawTree {
    n: u32,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    remove: Edge,
    add: Edge,
}

#[derive(Serialize, Deserialize)]
struct RawMeta {
    constructor: String,
    zero_flip_gaps: usize,
    one_flip_gaps: usize,
    two_flip_gaps: usize,
    phase_lengths: [usize; 5],
    greedy_steps: usize,
    fallback_cells: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    start: RawTree,
    steps: Vec<RawStep>,
    meta: Option<RawMeta>,
}

fn tag_from_str(s: &str) -> Result<ConstructorTag, serde_json::Error> {
    use serde::de::Error;
    match s {
        "general" => Ok(ConstructorTag::General),
        "careful" => Ok(ConstructorTag::Careful),
        "caterpillar" => Ok(ConstructorTag::Caterpillar),
        "all-boundary" => Ok(ConstructorTag::AllBoundary),
        "manual" => Ok(ConstructorTag::Manual),
        other => Err(serde_json::Error::custom(format!(
            "unknown constructor tag {other:?}"
        ))),
    }
}

pub fn parse_sequence(json: &str) -> Result<FlipSequence, IoError> {
    let raw: RawSequence = serde_json::from_str(json)?;
    let start = Tree::new(raw.start.n, raw.start.edges).map_err(InstanceError::TreeT)?;
    let steps = raw
        .steps
        .into_iter()
        .map(|s| Flip::new(s.remove, s.add))
        .collect();
    let meta = match raw.meta {
        None => None,
        Some(m) => Some(SequenceMeta {
            constructor: tag_from_str(&m.constructor)?,
            zero_flip_gaps: m.zero_flip_gaps,
            one_flip_gaps: m.one_flip_gaps,
            two_flip_gaps: m.two_flip_gaps,
            phase_lengths: m.phase_lengths,
            greedy_steps: m.greedy_steps,
            fallback_cells: m.fallback_cells,
        }),
    };
    let mut seq = FlipSequence::manual(start, steps);
    if let Some(meta) = meta {
        seq.meta = meta;
    }
    Ok(seq)
}

pub fn emit_sequence(seq: &FlipSequence) -> String {
    let raw = RawSequence {
        start: RawTree {
            n: seq.start.n(),
            edges: seq.start.edges().collect(),
        },
        steps: seq
            .steps
            .iter()
            .map(|f| RawStep {
                remove: f.remove,
                add: f.add,
            })
            .collect(),
        meta: Some(RawMeta {
            constructor: seq.meta.constructor.as_str().to_string(),
            zero_flip_gaps: seq.meta.zero_flip_gaps,
            one_flip_gaps: seq.meta.one_flip_gaps,
            two_flip_gaps: seq.meta.two_flip_gaps,
            phase_lengths: seq.meta.phase_lengths,
            greedy_steps: seq.meta.greedy_steps,
            fallback_cells: seq.meta.fallback_cells,
        }),
    };
    serde_json::to_string_pretty(&raw).expect("sequences serialize")
}
