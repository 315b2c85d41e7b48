#![allow(dead_code)]

//! Shared test helpers: a slow reference evaluator and random generators.

use datr_ltag::ltag::{NodeType, TagTree};
use datr_ltag::{Atom, Descriptor, NodeName, Path, Rvalue, Sentence, Theory};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn atom(s: &str) -> Atom {
    Atom::new(s).unwrap()
}

pub fn node(s: &str) -> NodeName {
    NodeName::new(s).unwrap()
}

pub fn path(s: &str) -> Path {
    Path::parse(s).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefOutcome {
    Value(Vec<String>),
    NoMatch,
    Cycle,
    Depth,
}

pub const REF_MAX_DEPTH: usize = 512;

type RefFrame = (String, Vec<String>, String, Vec<String>);

/// Straight from the definition: scan every sentence of the node for the
/// longest prefix, no indexes, no caching. Frames are
/// (local node, path, global node, global path).
pub fn reference_eval(theory: &Theory, n: &str, p: &[String]) -> RefOutcome {
    let mut stack = Vec::new();
    reference_frame(
        theory,
        (n.to_string(), p.to_vec(), n.to_string(), p.to_vec()),
        &mut stack,
    )
}

fn strings(p: &Path) -> Vec<String> {
    p.attributes()
        .iter()
        .map(|a| a.as_str().to_string())
        .collect()
}

fn reference_frame(theory: &Theory, frame: RefFrame, stack: &mut Vec<RefFrame>) -> RefOutcome {
    if stack.len() >= REF_MAX_DEPTH {
        return RefOutcome::Depth;
    }
    if stack.contains(&frame) {
        return RefOutcome::Cycle;
    }
    let (local, q, gnode, gpath) = frame.clone();

    let mut best: Option<(&Sentence, usize)> = None;
    for s in theory.sentences() {
        if s.node.as_str() != local {
            continue;
        }
        let lhs = strings(&s.path);
        let longer = best.is_none_or(|(_, len)| lhs.len() > len);
        if lhs.len() <= q.len() && lhs[..] == q[..lhs.len()] && longer {
            best = Some((s, lhs.len()));
        }
    }
    let Some((sentence, matched)) = best else {
        return RefOutcome::NoMatch;
    };
    let ext: Vec<String> = q[matched..].to_vec();
    let with_ext = |p: &Path| {
        let mut v = strings(p);
        v.extend(ext.iter().cloned());
        v
    };

    stack.push(frame);
    let mut out = Vec::new();
    let mut result = None;
    for d in sentence.rvalue.items() {
        let sub = match d {
            Descriptor::Atom(a) => RefOutcome::Value(vec![a.as_str().to_string()]),
            Descriptor::LocalPath(p) => reference_frame(
                theory,
                (local.clone(), with_ext(p), gnode.clone(), gpath.clone()),
                stack,
            ),
            Descriptor::LocalNode(n) => reference_frame(
                theory,
                (
                    n.as_str().to_string(),
                    q.clone(),
                    gnode.clone(),
                    gpath.clone(),
                ),
                stack,
            ),
            Descriptor::LocalNodePath(n, p) => reference_frame(
                theory,
                (
                    n.as_str().to_string(),
                    with_ext(p),
                    gnode.clone(),
                    gpath.clone(),
                ),
                stack,
            ),
            Descriptor::GlobalPath(p) => {
                let np = with_ext(p);
                reference_frame(
                    theory,
                    (gnode.clone(), np.clone(), gnode.clone(), np),
                    stack,
                )
            }
            Descriptor::GlobalNode(n) => {
                let n = n.as_str().to_string();
                reference_frame(theory, (n.clone(), gpath.clone(), n, gpath.clone()), stack)
            }
            Descriptor::GlobalNodePath(n, p) => {
                let n = n.as_str().to_string();
                let np = with_ext(p);
                reference_frame(theory, (n.clone(), np.clone(), n, np), stack)
            }
        };
        match sub {
            RefOutcome::Value(v) => out.extend(v),
            other => {
                result = Some(other);
                break;
            }
        }
    }
    stack.pop();
    result.unwrap_or(RefOutcome::Value(out))
}

pub fn to_ref(outcome: &datr_ltag::EvalOutcome) -> RefOutcome {
    use datr_ltag::{EvalOutcome, UndefinedReason};
    match outcome {
        EvalOutcome::Defined(v) => {
            RefOutcome::Value(v.atoms().iter().map(|a| a.as_str().to_string()).collect())
        }
        EvalOutcome::Undefined { reason, .. } => match reason {
            UndefinedReason::NoMatchingSentence => RefOutcome::NoMatch,
            UndefinedReason::CycleDetected => RefOutcome::Cycle,
            UndefinedReason::DepthExceeded => RefOutcome::Depth,
        },
    }
}

pub const ATTRS: [&str; 3] = ["a", "b", "c"];

pub fn random_path<R: Rng>(rng: &mut R, max_len: usize) -> Path {
    let len = rng.gen_range(0..=max_len);
    Path::new((0..len).map(|_| atom(ATTRS.choose(rng).unwrap())).collect())
}

/// Right-hand paths are never longer than the left-hand side, so no
/// derivation grows the queried path. Reachable frames are then finite and
/// every non-terminating derivation repeats one.
fn random_descriptor<R: Rng>(rng: &mut R, nodes: &[NodeName], max_len: usize) -> Descriptor {
    let target = nodes.choose(rng).unwrap().clone();
    let n = || target.clone();
    match rng.gen_range(0..10) {
        0..=2 => Descriptor::Atom(atom(["x", "y", "z"].choose(rng).unwrap())),
        3 => Descriptor::LocalPath(random_path(rng, max_len)),
        4 => Descriptor::LocalNode(n()),
        5..=6 => Descriptor::LocalNodePath(n(), random_path(rng, max_len)),
        7 => Descriptor::GlobalPath(random_path(rng, max_len)),
        8 => Descriptor::GlobalNode(n()),
        _ => Descriptor::GlobalNodePath(n(), random_path(rng, max_len)),
    }
}

/// A theory over a few nodes where each node's sentence paths are nested
/// prefixes of one another (plus some strays), so that longest-prefix
/// selection and extension passing are exercised on every query.
pub fn random_theory<R: Rng>(rng: &mut R) -> Theory {
    let count = rng.gen_range(2..=5);
    let nodes: Vec<NodeName> = (0..count).map(|i| node(&format!("N{i}"))).collect();
    let mut theory = Theory::new();
    for n in &nodes {
        let spine = random_path(rng, 4);
        let mut paths: Vec<Path> = (0..=spine.len())
            .filter(|_| rng.gen_bool(0.7))
            .map(|k| Path::new(spine.attributes()[..k].to_vec()))
            .collect();
        for _ in 0..rng.gen_range(0..3) {
            paths.push(random_path(rng, 3));
        }
        if paths.is_empty() {
            paths.push(Path::empty());
        }
        for p in paths {
            let items: Vec<Descriptor> = (0..rng.gen_range(1..=2))
                .map(|_| random_descriptor(rng, &nodes, p.len()))
                .collect();
            let s = Sentence::new(n.clone(), p, Rvalue::new(items).unwrap());
            // Repeated paths from the stray draws are simply skipped.
            let _ = theory.add_sentence(s);
        }
    }
    theory
}

const CATS: [&str; 6] = ["s", "vp", "np", "pp", "v", "p"];
const ROOTS: [&str; 3] = ["give", "to", "eat"];
const FORMS: [&str; 3] = ["wh", "null", "passive"];

/// A well-formed tree with at most `budget` nodes.
pub fn random_tree<R: Rng>(rng: &mut R, budget: usize) -> TagTree {
    let (t, _) = grow(rng, budget.max(1));
    t
}

fn grow<R: Rng>(rng: &mut R, budget: usize) -> (TagTree, usize) {
    let cat = atom(CATS.choose(rng).unwrap());
    let leaf = budget < 2 || rng.gen_bool(0.35);
    let mut t = if leaf {
        let ty = *[NodeType::Anchor, NodeType::Substitution, NodeType::Foot]
            .choose(rng)
            .unwrap();
        TagTree::leaf(cat, ty)
    } else {
        let mut children = Vec::new();
        let mut left = budget - 1;
        let want = rng.gen_range(1..=3);
        while children.len() < want && left > 0 {
            let share = rng.gen_range(1..=left);
            let (c, used) = grow(rng, share);
            left -= used;
            children.push(c);
        }
        TagTree::internal(cat, children)
    };
    if rng.gen_bool(0.25) {
        t.root = Some(atom(ROOTS.choose(rng).unwrap()));
    }
    if rng.gen_bool(0.2) {
        t.form = Some(atom(FORMS.choose(rng).unwrap()));
    }
    let used = t.node_count();
    (t, used)
}
