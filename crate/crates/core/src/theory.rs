//! Abstract syntax of DATR theories.
//!
//! A [`Theory`] is a set of named nodes, each holding path equations
//! (`<path> == rvalue`). Atoms and node names live in disjoint lexical
//! spaces decided by the case of their first character.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("invalid atom `{0}`")]
    Atom(String),
    #[error("invalid node name `{0}`")]
    Node(String),
}

/// A value or path attribute: lowercase- or digit-initial token made of
/// letters, digits and `-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(text: impl Into<String>) -> Result<Self, NameError> {
        let text = text.into();
        if is_atom(&text) {
            Ok(Atom(text))
        } else {
            Err(NameError::Atom(text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_atom(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '-')
}

pub(crate) fn is_node_name(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '+')
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for Atom {
    type Err = NameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Atom::new(s)
    }
}

/// Name of a node: uppercase-initial, letters, digits, `+` and `-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeName(String);

impl NodeName {
    pub fn new(text: impl Into<String>) -> Result<Self, NameError> {
        let text = text.into();
        if is_node_name(&text) {
            Ok(NodeName(text))
        } else {
            Err(NameError::Node(text))
        }
    }

    /// Names synthesized by the engine itself (e.g. rule-chain nodes) may
    /// use characters that user sources cannot, such as `%`.
    pub(crate) fn synthetic(text: String) -> Self {
        NodeName(text)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for NodeName {
    type Err = NameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeName::new(s)
    }
}

/// An ordered sequence of attributes. `<>` is the empty path.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<Atom>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    pub fn new(attributes: Vec<Atom>) -> Self {
        Path(attributes)
    }

    /// Parses space-separated attributes, e.g. `"parent left cat"`.
    pub fn parse(text: &str) -> Result<Self, NameError> {
        text.split_whitespace()
            .map(Atom::new)
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }

    pub fn attributes(&self) -> &[Atom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn concat(&self, tail: &[Atom]) -> Path {
        let mut attrs = Vec::with_capacity(self.0.len() + tail.len());
        attrs.extend_from_slice(&self.0);
        attrs.extend_from_slice(tail);
        Path(attrs)
    }

    pub fn child(&self, attr: Atom) -> Path {
        let mut attrs = self.0.clone();
        attrs.push(attr);
        Path(attrs)
    }
}

impl Borrow<[Atom]> for Path {
    fn borrow(&self) -> &[Atom] {
        &self.0
    }
}

impl From<Vec<Atom>> for Path {
    fn from(attrs: Vec<Atom>) -> Self {
        Path(attrs)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(a.as_str())?;
        }
        f.write_str(">")
    }
}

/// One element of a right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Descriptor {
    Atom(Atom),
    LocalPath(Path),
    LocalNode(NodeName),
    LocalNodePath(NodeName, Path),
    GlobalPath(Path),
    GlobalNode(NodeName),
    GlobalNodePath(NodeName, Path),
}

impl Descriptor {
    pub fn is_global(&self) -> bool {
        matches!(
            self,
            Descriptor::GlobalPath(_) | Descriptor::GlobalNode(_) | Descriptor::GlobalNodePath(..)
        )
    }

    pub fn node(&self) -> Option<&NodeName> {
        match self {
            Descriptor::LocalNode(n)
            | Descriptor::LocalNodePath(n, _)
            | Descriptor::GlobalNode(n)
            | Descriptor::GlobalNodePath(n, _) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Atom(a) => write!(f, "{a}"),
            Descriptor::LocalPath(p) => write!(f, "{p}"),
            Descriptor::LocalNode(n) => write!(f, "{n}"),
            Descriptor::LocalNodePath(n, p) => write!(f, "{n}:{p}"),
            Descriptor::GlobalPath(p) => write!(f, "\"{p}\""),
            Descriptor::GlobalNode(n) => write!(f, "\"{n}\""),
            Descriptor::GlobalNodePath(n, p) => write!(f, "\"{n}:{p}\""),
        }
    }
}

/// Nonempty sequence of descriptors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rvalue(Vec<Descriptor>);

impl Rvalue {
    /// Returns `None` for an empty sequence.
    pub fn new(items: Vec<Descriptor>) -> Option<Self> {
        if items.is_empty() {
            None
        } else {
            Some(Rvalue(items))
        }
    }

    pub fn single(item: Descriptor) -> Self {
        Rvalue(vec![item])
    }

    pub fn items(&self) -> &[Descriptor] {
        &self.0
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeName> {
        self.0.iter().filter_map(Descriptor::node)
    }
}

impl fmt::Display for Rvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// `node: path == rvalue`. `definitional` records `==` versus `=`; it is
/// kept for linting only and does not take part in equality.
#[derive(Debug, Clone, Eq)]
pub struct Sentence {
    pub node: NodeName,
    pub path: Path,
    pub rvalue: Rvalue,
    pub definitional: bool,
}

impl PartialEq for Sentence {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node && self.path == other.path && self.rvalue == other.rvalue
    }
}

impl Sentence {
    pub fn new(node: NodeName, path: Path, rvalue: Rvalue) -> Self {
        Sentence {
            node,
            path,
            rvalue,
            definitional: true,
        }
    }
}

/// The sentences of one node, keyed by path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeDef {
    sentences: BTreeMap<Path, Sentence>,
}

impl NodeDef {
    pub fn get(&self, path: &[Atom]) -> Option<&Sentence> {
        self.sentences.get(path)
    }

    /// The sentence with the longest path that is a prefix of `query`.
    pub fn longest_prefix(&self, query: &[Atom]) -> Option<&Sentence> {
        (0..=query.len())
            .rev()
            .find_map(|k| self.sentences.get(&query[..k]))
    }

    /// Sentences in path order.
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.sentences.values()
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Returns the displaced sentence if the path already existed.
    pub(crate) fn insert(&mut self, sentence: Sentence) -> Option<Sentence> {
        self.sentences.insert(sentence.path.clone(), sentence)
    }
}

/// A complete set of node definitions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    nodes: HashMap<NodeName, NodeDef>,
    order: Vec<NodeName>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {node} already defines {path}")]
pub struct DuplicatePath {
    pub node: NodeName,
    pub path: Path,
}

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&self, name: &NodeName) -> Option<&NodeDef> {
        self.nodes.get(name)
    }

    pub fn contains(&self, name: &NodeName) -> bool {
        self.nodes.contains_key(name)
    }

    /// Node names in source order.
    pub fn node_names(&self) -> &[NodeName] {
        &self.order
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeName, &NodeDef)> {
        self.order.iter().map(move |n| (n, &self.nodes[n]))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.nodes().flat_map(|(_, def)| def.sentences())
    }

    /// Adds a sentence, creating its node on first use.
    pub fn add_sentence(&mut self, sentence: Sentence) -> Result<(), DuplicatePath> {
        let def = match self.nodes.get_mut(&sentence.node) {
            Some(def) => def,
            None => {
                self.order.push(sentence.node.clone());
                self.nodes.entry(sentence.node.clone()).or_default()
            }
        };
        if def.get(sentence.path.attributes()).is_some() {
            return Err(DuplicatePath {
                node: sentence.node,
                path: sentence.path,
            });
        }
        def.insert(sentence);
        Ok(())
    }

    /// Registers a node with no sentences (an empty block).
    pub(crate) fn declare(&mut self, name: &NodeName) {
        if !self.nodes.contains_key(name) {
            self.order.push(name.clone());
            self.nodes.insert(name.clone(), NodeDef::default());
        }
    }

    /// Canonical text: one block per node in source order, sentences
    /// sorted by path, two-space indent, `==`, closing `.` on its own line.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for (i, (name, def)) in self.nodes().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(name.as_str());
            out.push_str(":\n");
            for s in def.sentences() {
                out.push_str(&format!("  {} == {}\n", s.path, s.rvalue));
            }
            out.push_str(".\n");
        }
        out
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}
