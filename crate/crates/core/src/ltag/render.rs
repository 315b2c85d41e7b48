use std::fmt::Write;

use serde_json::{Map, Value as Json};

use super::tree::{NodeType, TagTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Bracket,
    Dot,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bracket" => Ok(Format::Bracket),
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (bracket, dot, json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Markers {
    #[default]
    Ascii,
    Unicode,
}

impl Markers {
    fn mark(self, t: NodeType) -> &'static str {
        match (self, t) {
            (_, NodeType::Internal) => "",
            (Markers::Ascii, NodeType::Anchor) => "^",
            (Markers::Ascii, NodeType::Substitution) => "!",
            (Markers::Unicode, NodeType::Anchor) => "\u{22c4}",
            (Markers::Unicode, NodeType::Substitution) => "\u{2193}",
            (_, NodeType::Foot) => "*",
        }
    }
}

pub fn render(tree: &TagTree, format: Format, markers: Markers) -> String {
    match format {
        Format::Bracket => bracket(tree, markers),
        Format::Dot => dot(tree),
        Format::Json => json(tree).to_string(),
    }
}

fn label(tree: &TagTree) -> String {
    match &tree.form {
        Some(form) => format!("{}/{}", tree.cat, form),
        None => tree.cat.to_string(),
    }
}

/// `(s (np!) (vp (v^ give) ...))`; a form shows as `cat/form`.
pub fn bracket(tree: &TagTree, markers: Markers) -> String {
    let mut out = String::new();
    write_bracket(tree, markers, &mut out);
    out
}

fn write_bracket(tree: &TagTree, markers: Markers, out: &mut String) {
    out.push('(');
    out.push_str(&label(tree));
    out.push_str(markers.mark(tree.node_type));
    if let Some(root) = &tree.root {
        out.push(' ');
        out.push_str(root.as_str());
    }
    for child in &tree.children {
        out.push(' ');
        write_bracket(child, markers, out);
    }
    out.push(')');
}

pub fn dot(tree: &TagTree) -> String {
    let mut out = String::from("digraph tree {\n");
    let mut next = 0usize;
    write_dot(tree, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn write_dot(tree: &TagTree, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let shape = if tree.node_type == NodeType::Anchor {
        ", shape=doublecircle"
    } else {
        ""
    };
    writeln!(out, "  n{id} [label=\"{}\"{shape}];", label(tree)).expect("string write");
    for child in &tree.children {
        let cid = write_dot(child, next, out);
        writeln!(out, "  n{id} -> n{cid};").expect("string write");
    }
    id
}

/// Keys are sorted; absent optional fields and empty `children` are omitted.
pub fn json(tree: &TagTree) -> Json {
    let mut obj = Map::new();
    for (k, v) in &tree.extra {
        obj.insert(k.to_string(), Json::String(v.to_string()));
    }
    obj.insert("cat".into(), Json::String(tree.cat.to_string()));
    obj.insert("type".into(), Json::String(tree.node_type.name().into()));
    if let Some(r) = &tree.root {
        obj.insert("root".into(), Json::String(r.to_string()));
    }
    if let Some(f) = &tree.form {
        obj.insert("form".into(), Json::String(f.to_string()));
    }
    if !tree.children.is_empty() {
        obj.insert(
            "children".into(),
            Json::Array(tree.children.iter().map(json).collect()),
        );
    }
    Json::Object(obj)
}
