//! Conversion between the bottom-up encoding and ordinary top-down trees.
//!
//! A description `D` is a leaf position. Its spine is `D`, `D.parent`,
//! `D.parent.parent`, ... and the last spine position is the tree top. The
//! children of spine position `p[i+1]` are the left sisters of `p[i]`
//! (nearest first, so reversed), `p[i]` itself, then its right sisters.
//! Each sister is again a description (anchored at its leftmost leaf for a
//! right sister, rightmost for a left one) and the next sister hangs off
//! that description's top.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::features::{
    position_path, FeatureStructure, Position, Structural, CAT, FORM, ROOT, TYPE,
};
use crate::theory::Atom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeType {
    Anchor,
    Internal,
    Substitution,
    Foot,
}

impl NodeType {
    pub fn name(self) -> &'static str {
        match self {
            NodeType::Anchor => "anchor",
            NodeType::Internal => "internal",
            NodeType::Substitution => "substitution",
            NodeType::Foot => "foot",
        }
    }

    pub fn is_leaf_type(self) -> bool {
        self != NodeType::Internal
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeType {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "anchor" => Ok(NodeType::Anchor),
            "internal" => Ok(NodeType::Internal),
            "substitution" => Ok(NodeType::Substitution),
            "foot" => Ok(NodeType::Foot),
            _ => Err(()),
        }
    }
}

/// A top-down elementary tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagTree {
    pub cat: Atom,
    pub node_type: NodeType,
    pub root: Option<Atom>,
    pub form: Option<Atom>,
    /// Labels outside the built-in vocabulary, carried through unchanged.
    pub extra: BTreeMap<Atom, Atom>,
    pub children: Vec<TagTree>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid tree node at child path {address:?}: {problem}")]
pub struct InvalidTree {
    pub address: Vec<usize>,
    pub problem: &'static str,
}

impl TagTree {
    pub fn leaf(cat: Atom, node_type: NodeType) -> Self {
        TagTree {
            cat,
            node_type,
            root: None,
            form: None,
            extra: BTreeMap::new(),
            children: Vec::new(),
        }
    }

    pub fn internal(cat: Atom, children: Vec<TagTree>) -> Self {
        TagTree {
            children,
            ..TagTree::leaf(cat, NodeType::Internal)
        }
    }

    pub fn with_root(mut self, root: Atom) -> Self {
        self.root = Some(root);
        self
    }

    pub fn with_form(mut self, form: Atom) -> Self {
        self.form = Some(form);
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(TagTree::node_count).sum::<usize>()
    }

    pub fn get(&self, address: &[usize]) -> Option<&TagTree> {
        address.iter().try_fold(self, |t, &i| t.children.get(i))
    }

    /// Addresses of all leaves, left to right.
    pub fn leaf_addresses(&self) -> Vec<Vec<usize>> {
        fn walk(t: &TagTree, at: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if t.is_leaf() {
                out.push(at.clone());
            }
            for (i, c) in t.children.iter().enumerate() {
                at.push(i);
                walk(c, at, out);
                at.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Leaf types have no children; internal nodes have at least one.
    pub fn validate(&self) -> Result<(), InvalidTree> {
        fn walk(t: &TagTree, at: &mut Vec<usize>) -> Result<(), InvalidTree> {
            if t.node_type.is_leaf_type() && !t.is_leaf() {
                return Err(InvalidTree {
                    address: at.clone(),
                    problem: "leaf-typed node has children",
                });
            }
            if t.node_type == NodeType::Internal && t.is_leaf() {
                return Err(InvalidTree {
                    address: at.clone(),
                    problem: "internal node has no children",
                });
            }
            for (i, c) in t.children.iter().enumerate() {
                at.push(i);
                walk(c, at)?;
                at.pop();
            }
            Ok(())
        }
        walk(self, &mut Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReconstructProblem {
    Empty,
    MissingCategory,
    MissingType,
    UnknownType(Atom),
    LeafTypeWithChildren(NodeType),
    ChildlessInternal,
}

impl fmt::Display for ReconstructProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReconstructProblem::Empty => f.write_str("empty feature structure"),
            ReconstructProblem::MissingCategory => f.write_str("no cat"),
            ReconstructProblem::MissingType => f.write_str("leaf without a type"),
            ReconstructProblem::UnknownType(t) => write!(f, "unknown node type `{t}`"),
            ReconstructProblem::LeafTypeWithChildren(t) => {
                write!(f, "{t} node has children")
            }
            ReconstructProblem::ChildlessInternal => f.write_str("internal node has no children"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ill-formed encoding at {}: {problem}", position_path(.position))]
pub struct ReconstructError {
    pub position: Position,
    pub problem: ReconstructProblem,
}

pub fn reconstruct_tree(fs: &FeatureStructure) -> Result<TagTree, ReconstructError> {
    if fs.is_empty() {
        return Err(ReconstructError {
            position: Vec::new(),
            problem: ReconstructProblem::Empty,
        });
    }
    Ok(description(fs, Vec::new())?.0)
}

/// Rebuilds the tree whose bottom-up description starts at `fs`; also
/// returns the top of the spine, where the next sister in a chain hangs.
fn description(
    fs: &FeatureStructure,
    at: Position,
) -> Result<(TagTree, &FeatureStructure, Position), ReconstructError> {
    let mut spine = vec![(fs, at)];
    while let Some(parent) = spine.last().and_then(|(f, _)| f.child(Structural::Parent)) {
        let mut pos = spine.last().expect("nonempty").1.clone();
        pos.push(Structural::Parent);
        spine.push((parent, pos));
    }

    let (bottom, bottom_at) = &spine[0];
    let mut current = make_node(bottom, bottom_at, Vec::new())?;
    for pair in spine.windows(2) {
        let (below, below_at) = &pair[0];
        let (above, above_at) = &pair[1];
        let mut children = chain(below, below_at, Structural::Left)?;
        children.reverse();
        children.push(current);
        children.extend(chain(below, below_at, Structural::Right)?);
        current = make_node(above, above_at, children)?;
    }
    let (top, top_at) = spine.pop().expect("nonempty");
    Ok((current, top, top_at))
}

/// Sisters of `fs` in one direction, nearest first.
fn chain(
    fs: &FeatureStructure,
    at: &Position,
    dir: Structural,
) -> Result<Vec<TagTree>, ReconstructError> {
    let mut out = Vec::new();
    let mut next = fs.child(dir).map(|c| {
        let mut p = at.clone();
        p.push(dir);
        (c, p)
    });
    while let Some((element, element_at)) = next {
        let (tree, top, top_at) = description(element, element_at)?;
        out.push(tree);
        next = top.child(dir).map(|c| {
            let mut p = top_at;
            p.push(dir);
            (c, p)
        });
    }
    Ok(out)
}

fn make_node(
    fs: &FeatureStructure,
    at: &Position,
    children: Vec<TagTree>,
) -> Result<TagTree, ReconstructError> {
    let fail = |problem| ReconstructError {
        position: at.clone(),
        problem,
    };
    let cat = fs
        .label(CAT)
        .cloned()
        .ok_or_else(|| fail(ReconstructProblem::MissingCategory))?;
    let declared = match fs.label(TYPE) {
        Some(t) => Some(
            t.as_str()
                .parse::<NodeType>()
                .map_err(|_| fail(ReconstructProblem::UnknownType(t.clone())))?,
        ),
        None => None,
    };
    let node_type = match (declared, children.is_empty()) {
        (Some(t), false) if t.is_leaf_type() => {
            return Err(fail(ReconstructProblem::LeafTypeWithChildren(t)))
        }
        (_, false) => NodeType::Internal,
        (None, true) => return Err(fail(ReconstructProblem::MissingType)),
        (Some(NodeType::Internal), true) => {
            return Err(fail(ReconstructProblem::ChildlessInternal))
        }
        (Some(t), true) => t,
    };
    let extra = fs
        .labels()
        .iter()
        .filter(|(k, _)| ![CAT, TYPE, ROOT, FORM].contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(TagTree {
        cat,
        node_type,
        root: fs.label(ROOT).cloned(),
        form: fs.label(FORM).cloned(),
        extra,
        children,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("no node at child path {0:?}")]
    NoSuchNode(Vec<usize>),
    #[error("node at child path {0:?} is not a leaf")]
    NotALeaf(Vec<usize>),
}

/// Bottom-up encoding of `tree` relative to the leaf at `anchor`.
/// [`reconstruct_tree`] inverts it.
pub fn encode_tree(tree: &TagTree, anchor: &[usize]) -> Result<FeatureStructure, EncodeError> {
    match tree.get(anchor) {
        None => Err(EncodeError::NoSuchNode(anchor.to_vec())),
        Some(t) if !t.is_leaf() => Err(EncodeError::NotALeaf(anchor.to_vec())),
        Some(_) => Ok(encode_from_leaf(tree, anchor)),
    }
}

fn labels_of(tree: &TagTree) -> FeatureStructure {
    let atom = |s: &str| Atom::new(s).expect("label names are atoms");
    let mut fs = FeatureStructure::new();
    for (k, v) in &tree.extra {
        fs.set_label(k.clone(), v.clone());
    }
    fs.set_label(atom(CAT), tree.cat.clone());
    fs.set_label(atom(TYPE), atom(tree.node_type.name()));
    if let Some(r) = &tree.root {
        fs.set_label(atom(ROOT), r.clone());
    }
    if let Some(f) = &tree.form {
        fs.set_label(atom(FORM), f.clone());
    }
    fs
}

fn encode_from_leaf(root: &TagTree, leaf: &[usize]) -> FeatureStructure {
    let mut fs = labels_of(root);
    let mut parent = root;
    for &index in leaf {
        let node = &parent.children[index];
        let mut below = labels_of(node);
        below.set_child(Structural::Parent, fs);
        let lefts: Vec<&TagTree> = parent.children[..index].iter().rev().collect();
        let rights: Vec<&TagTree> = parent.children[index + 1..].iter().collect();
        if let Some(c) = encode_chain(&lefts, Structural::Left) {
            below.set_child(Structural::Left, c);
        }
        if let Some(c) = encode_chain(&rights, Structural::Right) {
            below.set_child(Structural::Right, c);
        }
        fs = below;
        parent = node;
    }
    fs
}

/// `sisters` nearest first.
fn encode_chain(sisters: &[&TagTree], dir: Structural) -> Option<FeatureStructure> {
    let mut acc: Option<FeatureStructure> = None;
    for sister in sisters.iter().rev() {
        let mut element = encode_from_leaf(sister, &edge_leaf(sister, dir));
        if let Some(next) = acc.take() {
            top_mut(&mut element).set_child(dir, next);
        }
        acc = Some(element);
    }
    acc
}

/// The leaf adjacent to the spine: leftmost for a right sister.
fn edge_leaf(tree: &TagTree, dir: Structural) -> Vec<usize> {
    let mut at = Vec::new();
    let mut t = tree;
    while !t.is_leaf() {
        let i = if dir == Structural::Right {
            0
        } else {
            t.children.len() - 1
        };
        at.push(i);
        t = &t.children[i];
    }
    at
}

fn top_mut(fs: &mut FeatureStructure) -> &mut FeatureStructure {
    let mut cur = fs;
    while cur.child(Structural::Parent).is_some() {
        cur = cur.child_mut(Structural::Parent).expect("checked");
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn sub(cat: &str) -> TagTree {
        TagTree::leaf(a(cat), NodeType::Substitution)
    }

    fn give_tree() -> TagTree {
        TagTree::internal(
            a("s"),
            vec![
                sub("np"),
                TagTree::internal(
                    a("vp"),
                    vec![
                        TagTree::leaf(a("v"), NodeType::Anchor).with_root(a("give")),
                        sub("np"),
                        TagTree::internal(
                            a("pp"),
                            vec![
                                TagTree::leaf(a("p"), NodeType::Anchor).with_root(a("to")),
                                sub("np"),
                            ],
                        ),
                    ],
                ),
            ],
        )
    }

    fn cats(fs: &FeatureStructure) -> Vec<(String, String)> {
        fs.positions()
            .into_iter()
            .map(|(pos, f)| {
                (
                    position_path(&pos).to_string(),
                    f.label(CAT).unwrap().to_string(),
                )
            })
            .collect()
    }

    #[test]
    fn encode_give_at_verb() {
        let fs = encode_tree(&give_tree(), &[1, 0]).unwrap();
        let mut got = cats(&fs);
        got.sort();
        let mut want: Vec<(String, String)> = [
            ("<>", "v"),
            ("<parent>", "vp"),
            ("<parent left>", "np"),
            ("<parent parent>", "s"),
            ("<right>", "np"),
            ("<right right>", "p"),
            ("<right right parent>", "pp"),
            ("<right right right>", "np"),
        ]
        .iter()
        .map(|(p, c)| (p.to_string(), c.to_string()))
        .collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn reconstruct_inverts_encode_at_every_leaf() {
        let t = give_tree();
        for leaf in t.leaf_addresses() {
            let fs = encode_tree(&t, &leaf).unwrap();
            assert_eq!(reconstruct_tree(&fs).unwrap(), t, "anchor {leaf:?}");
        }
    }

    #[test]
    fn single_node() {
        let t = TagTree::leaf(a("v"), NodeType::Anchor);
        let fs = encode_tree(&t, &[]).unwrap();
        assert_eq!(fs.positions().len(), 1);
        assert_eq!(reconstruct_tree(&fs).unwrap(), t);
    }

    #[test]
    fn encode_rejects_non_leaf_and_bad_address() {
        assert_eq!(
            encode_tree(&give_tree(), &[1]),
            Err(EncodeError::NotALeaf(vec![1]))
        );
        assert_eq!(
            encode_tree(&give_tree(), &[7]),
            Err(EncodeError::NoSuchNode(vec![7]))
        );
    }

    #[test]
    fn leaf_type_with_children_is_ill_formed() {
        let mut fs = FeatureStructure::new();
        fs.set_label(a("cat"), a("v"));
        fs.set_label(a("type"), a("anchor"));
        let mut parent = FeatureStructure::new();
        parent.set_label(a("cat"), a("vp"));
        parent.set_label(a("type"), a("foot"));
        fs.set_child(Structural::Parent, parent);
        let err = reconstruct_tree(&fs).unwrap_err();
        assert_eq!(err.position, vec![Structural::Parent]);
        assert_eq!(
            err.problem,
            ReconstructProblem::LeafTypeWithChildren(NodeType::Foot)
        );
        assert_eq!(
            err.to_string(),
            "ill-formed encoding at <parent>: foot node has children"
        );
    }

    #[test]
    fn other_reconstruction_errors() {
        assert_eq!(
            reconstruct_tree(&FeatureStructure::new())
                .unwrap_err()
                .problem,
            ReconstructProblem::Empty
        );
        let mut fs = FeatureStructure::new();
        fs.set_label(a("cat"), a("v"));
        assert_eq!(
            reconstruct_tree(&fs).unwrap_err().problem,
            ReconstructProblem::MissingType
        );
        fs.set_label(a("type"), a("internal"));
        assert_eq!(
            reconstruct_tree(&fs).unwrap_err().problem,
            ReconstructProblem::ChildlessInternal
        );
        fs.set_label(a("type"), a("odd"));
        assert_eq!(
            reconstruct_tree(&fs).unwrap_err().problem,
            ReconstructProblem::UnknownType(a("odd"))
        );
        let mut fs = FeatureStructure::new();
        fs.set_label(a("type"), a("anchor"));
        assert_eq!(
            reconstruct_tree(&fs).unwrap_err().problem,
            ReconstructProblem::MissingCategory
        );
    }

    #[test]
    fn long_left_chain() {
        let t = TagTree::internal(
            a("s"),
            vec![
                sub("a"),
                sub("b"),
                TagTree::internal(a("c"), vec![sub("d"), sub("e")]),
                sub("f"),
            ],
        );
        for leaf in t.leaf_addresses() {
            let fs = encode_tree(&t, &leaf).unwrap();
            assert_eq!(reconstruct_tree(&fs).unwrap(), t);
        }
    }

    #[test]
    fn validate_invariants() {
        assert!(give_tree().validate().is_ok());
        let mut bad = give_tree();
        bad.children[0].children.push(sub("x"));
        assert_eq!(bad.validate().unwrap_err().address, vec![0]);
        let lonely = TagTree::internal(a("s"), vec![]);
        assert!(lonely.validate().is_err());
    }
}
