//! LTAG view of a lexicon: elementary trees are stored bottom-up from their
//! anchor, with `parent`, `left` and `right` as features. This module probes
//! the engine for such an encoding, rebuilds the top-down tree and renders it.

mod features;
mod render;
mod tree;

pub use features::{
    extract_features, position_path, ExtractError, FeatureStructure, Position, ProbeConfig,
    Structural, CAT, DEFAULT_PROBE_DEPTH, FORM, ROOT, TYPE, UNDEF,
};
pub use render::{bracket, dot, json, render, Format, Markers};
pub use tree::{
    encode_tree, reconstruct_tree, EncodeError, InvalidTree, NodeType, ReconstructError,
    ReconstructProblem, TagTree,
};

use thiserror::Error;

use crate::eval::Engine;
use crate::theory::{NodeName, Path};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

/// Extracts and reconstructs the tree under `prefix`; `Ok(None)` when
/// nothing is encoded there.
pub fn tree_at(
    engine: &Engine<'_>,
    node: &NodeName,
    prefix: &Path,
    config: &ProbeConfig,
) -> Result<Option<TagTree>, TreeError> {
    let fs = extract_features(engine, node, prefix, config)?;
    if fs.is_empty() {
        return Ok(None);
    }
    Ok(Some(reconstruct_tree(&fs)?))
}
