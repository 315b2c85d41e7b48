use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::eval::{Engine, EvalOutcome, Session};
use crate::theory::{Atom, NodeName, Path};

/// The tree relations, embedded as features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Structural {
    Parent,
    Left,
    Right,
}

impl Structural {
    pub const ALL: [Structural; 3] = [Structural::Parent, Structural::Left, Structural::Right];

    pub fn name(self) -> &'static str {
        match self {
            Structural::Parent => "parent",
            Structural::Left => "left",
            Structural::Right => "right",
        }
    }

    pub fn atom(self) -> Atom {
        Atom::new(self.name()).expect("structural names are atoms")
    }
}

impl fmt::Display for Structural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A position relative to the distinguished leaf, e.g. `right right parent`.
pub type Position = Vec<Structural>;

pub fn position_path(position: &[Structural]) -> Path {
    Path::new(position.iter().map(|s| s.atom()).collect())
}

pub const CAT: &str = "cat";
pub const TYPE: &str = "type";
pub const ROOT: &str = "root";
pub const FORM: &str = "form";

/// The atom the fragment uses for "nothing here".
pub const UNDEF: &str = "undef";

/// Label features probed at each position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeConfig {
    pub labels: Vec<Atom>,
    /// Maximum number of structural steps below the prefix.
    pub depth: usize,
}

pub const DEFAULT_PROBE_DEPTH: usize = 16;

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            labels: [CAT, TYPE, ROOT, FORM]
                .into_iter()
                .map(|l| Atom::new(l).expect("label names are atoms"))
                .collect(),
            depth: DEFAULT_PROBE_DEPTH,
        }
    }
}

impl ProbeConfig {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    /// Adds an extra label feature to probe.
    pub fn with_label(mut self, label: Atom) -> Self {
        if !self.labels.contains(&label) {
            self.labels.push(label);
        }
        self
    }
}

/// A finite tree of positions, each carrying label values and reached
/// through structural features.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureStructure {
    labels: BTreeMap<Atom, Atom>,
    children: BTreeMap<Structural, FeatureStructure>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty() && self.children.is_empty()
    }

    pub fn labels(&self) -> &BTreeMap<Atom, Atom> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Option<&Atom> {
        self.labels
            .iter()
            .find(|(k, _)| k.as_str() == name)
            .map(|(_, v)| v)
    }

    pub fn set_label(&mut self, name: Atom, value: Atom) {
        self.labels.insert(name, value);
    }

    pub fn child(&self, rel: Structural) -> Option<&FeatureStructure> {
        self.children.get(&rel)
    }

    pub fn children(&self) -> &BTreeMap<Structural, FeatureStructure> {
        &self.children
    }

    pub fn child_mut(&mut self, rel: Structural) -> Option<&mut FeatureStructure> {
        self.children.get_mut(&rel)
    }

    pub fn set_child(&mut self, rel: Structural, child: FeatureStructure) {
        self.children.insert(rel, child);
    }

    pub fn get(&self, position: &[Structural]) -> Option<&FeatureStructure> {
        position
            .iter()
            .try_fold(self, |fs, rel| fs.children.get(rel))
    }

    /// Every position in breadth-first order, shortest first.
    pub fn positions(&self) -> Vec<(Position, &FeatureStructure)> {
        let mut out = vec![(Vec::new(), self)];
        let mut i = 0;
        while i < out.len() {
            let (pos, fs) = (out[i].0.clone(), out[i].1);
            for (rel, child) in &fs.children {
                let mut p = pos.clone();
                p.push(*rel);
                out.push((p, child));
            }
            i += 1;
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.children
            .values()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Flat `<path> = value` lines, sorted by path.
    pub fn to_listing(&self) -> String {
        let mut lines: Vec<(Path, &Atom)> = Vec::new();
        for (pos, fs) in self.positions() {
            let base = position_path(&pos);
            for (k, v) in &fs.labels {
                lines.push((base.child(k.clone()), v));
            }
        }
        lines.sort();
        lines
            .into_iter()
            .map(|(p, v)| format!("{p} = {v}\n"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("probe depth must be at least 1")]
    ZeroDepth,
    #[error("evaluating {path} at {node}: {outcome:?}")]
    Engine {
        node: NodeName,
        path: Path,
        outcome: EvalOutcome,
    },
    #[error("{path} at {node} has a multi-atom value `{value}`")]
    NonAtomic {
        node: NodeName,
        path: Path,
        value: String,
    },
}

/// Probes `node` for the tree encoded under `prefix`.
///
/// A position is kept when at least one label evaluates to something other
/// than `undef`; exploration does not continue below positions that are not
/// kept.
pub fn extract_features(
    engine: &Engine<'_>,
    node: &NodeName,
    prefix: &Path,
    config: &ProbeConfig,
) -> Result<FeatureStructure, ExtractError> {
    if config.depth == 0 {
        return Err(ExtractError::ZeroDepth);
    }
    let mut session = engine.session();
    Ok(explore(&mut session, node, prefix, config, config.depth)?.unwrap_or_default())
}

fn explore(
    session: &mut Session<'_>,
    node: &NodeName,
    at: &Path,
    config: &ProbeConfig,
    steps_left: usize,
) -> Result<Option<FeatureStructure>, ExtractError> {
    let mut fs = FeatureStructure::new();
    for label in &config.labels {
        let path = at.child(label.clone());
        match session.evaluate(node, &path) {
            EvalOutcome::Defined(v) => match v.as_atom() {
                Some(a) if a.as_str() == UNDEF => {}
                Some(a) => fs.set_label(label.clone(), a.clone()),
                None => {
                    return Err(ExtractError::NonAtomic {
                        node: node.clone(),
                        path,
                        value: v.to_string(),
                    })
                }
            },
            outcome if outcome.is_error() => {
                return Err(ExtractError::Engine {
                    node: node.clone(),
                    path,
                    outcome,
                })
            }
            _ => {}
        }
    }
    if fs.labels.is_empty() {
        return Ok(None);
    }
    if steps_left > 0 {
        for rel in Structural::ALL {
            if let Some(child) =
                explore(session, node, &at.child(rel.atom()), config, steps_left - 1)?
            {
                fs.set_child(rel, child);
            }
        }
    }
    Ok(Some(fs))
}
