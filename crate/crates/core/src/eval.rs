//! Query evaluation by default inheritance.
//!
//! A query `(node, path)` selects the sentence at `node` with the longest
//! path that prefixes the query; the unmatched remainder (the extension) is
//! appended to whatever path the right-hand side names. Quoted descriptors
//! evaluate against the global context, which starts as the original query
//! and is replaced only by quoted inheritance.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::theory::{Atom, Descriptor, NodeName, Path, Rvalue, Theory};

pub const DEFAULT_MAX_DEPTH: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryContext {
    pub local_node: NodeName,
    pub global_node: NodeName,
    pub global_path: Path,
}

impl fmt::Display for QueryContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [global {}:{}]",
            self.local_node, self.global_node, self.global_path
        )
    }
}

/// A defined value: a nonempty sequence of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Value(Vec<Atom>);

impl Value {
    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    /// The atom of a length-1 value.
    pub fn as_atom(&self) -> Option<&Atom> {
        match self.0.as_slice() {
            [a] => Some(a),
            _ => None,
        }
    }

    pub fn is(&self, atom: &str) -> bool {
        self.as_atom().is_some_and(|a| a.as_str() == atom)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(a.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UndefinedReason {
    NoMatchingSentence,
    CycleDetected,
    DepthExceeded,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UndefinedReason::NoMatchingSentence => "no-matching-sentence",
            UndefinedReason::CycleDetected => "cycle-detected",
            UndefinedReason::DepthExceeded => "depth-exceeded",
        })
    }
}

/// `Undefined` is distinct from `Defined` with the atom `undef`, which is an
/// ordinary value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EvalOutcome {
    Defined(Value),
    Undefined {
        reason: UndefinedReason,
        at: NodeName,
        path: Path,
    },
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Value> {
        match self {
            EvalOutcome::Defined(v) => Some(v),
            EvalOutcome::Undefined { .. } => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, EvalOutcome::Defined(_))
    }

    pub fn reason(&self) -> Option<UndefinedReason> {
        match self {
            EvalOutcome::Defined(_) => None,
            EvalOutcome::Undefined { reason, .. } => Some(*reason),
        }
    }

    /// True for the engine's hard failures (as opposed to a missing match).
    pub fn is_error(&self) -> bool {
        matches!(
            self.reason(),
            Some(UndefinedReason::CycleDetected | UndefinedReason::DepthExceeded)
        )
    }
}

impl fmt::Display for EvalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalOutcome::Defined(v) => write!(f, "{v}"),
            EvalOutcome::Undefined { reason, .. } => write!(f, "UNDEFINED({reason})"),
        }
    }
}

/// One sentence selection on the derivation path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub context: QueryContext,
    pub queried_path: Path,
    pub matched_prefix: Path,
    pub rvalue: Rvalue,
    pub extension: Path,
}

impl TraceStep {
    /// An atom right-hand side reached with a nonempty extension drops it.
    pub fn discards_extension(&self) -> bool {
        !self.extension.is_empty()
            && self
                .rvalue
                .items()
                .iter()
                .all(|d| matches!(d, Descriptor::Atom(_)))
    }
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} + {}  [global {}:{}]",
            self.context.local_node,
            self.matched_prefix,
            self.extension,
            self.context.global_node,
            self.context.global_path
        )
    }
}

/// One line per step.
pub fn format_trace(steps: &[TraceStep]) -> String {
    let mut out = String::new();
    for s in steps {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Frame {
    local_node: NodeName,
    path: Path,
    global_node: NodeName,
    global_path: Path,
}

type Memo = HashMap<Frame, (EvalOutcome, usize)>;

/// Read-only evaluator over a borrowed theory.
#[derive(Debug, Clone, Copy)]
pub struct Engine<'t> {
    theory: &'t Theory,
    max_depth: usize,
}

impl<'t> Engine<'t> {
    pub fn new(theory: &'t Theory) -> Self {
        Engine {
            theory,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn theory(&self) -> &'t Theory {
        self.theory
    }

    pub fn evaluate(&self, node: &NodeName, path: &Path) -> EvalOutcome {
        Run::new(self, None, None).top(node, path)
    }

    pub fn evaluate_traced(&self, node: &NodeName, path: &Path) -> (EvalOutcome, Vec<TraceStep>) {
        let mut steps = Vec::new();
        let outcome = Run::new(self, None, Some(&mut steps)).top(node, path);
        (outcome, steps)
    }

    /// Batch evaluation sharing one memo table across the paths.
    pub fn evaluate_many<I>(&self, node: &NodeName, paths: I) -> BTreeMap<Path, EvalOutcome>
    where
        I: IntoIterator<Item = Path>,
    {
        let mut session = self.session();
        paths
            .into_iter()
            .map(|p| {
                let o = session.evaluate(node, &p);
                (p, o)
            })
            .collect()
    }

    /// A memoizing evaluator; results are identical to [`Engine::evaluate`].
    pub fn session(&self) -> Session<'t> {
        Session {
            engine: *self,
            memo: Memo::new(),
        }
    }
}

/// Owns a memo table keyed on the full evaluation context. Only outcomes
/// that do not depend on the active stack are cached (defined values and
/// missing matches), each with the frame height it needed, so a hit is
/// used only where a fresh evaluation would also fit under the depth bound.
#[derive(Debug)]
pub struct Session<'t> {
    engine: Engine<'t>,
    memo: Memo,
}

impl<'t> Session<'t> {
    pub fn evaluate(&mut self, node: &NodeName, path: &Path) -> EvalOutcome {
        Run::new(&self.engine, Some(&mut self.memo), None).top(node, path)
    }

    pub fn engine(&self) -> &Engine<'t> {
        &self.engine
    }
}

struct Run<'r> {
    theory: &'r Theory,
    max_depth: usize,
    stack: Vec<Frame>,
    active: HashSet<Frame>,
    memo: Option<&'r mut Memo>,
    trace: Option<&'r mut Vec<TraceStep>>,
}

impl<'r> Run<'r> {
    fn new(
        engine: &Engine<'r>,
        memo: Option<&'r mut Memo>,
        trace: Option<&'r mut Vec<TraceStep>>,
    ) -> Self {
        Run {
            theory: engine.theory,
            max_depth: engine.max_depth,
            stack: Vec::new(),
            active: HashSet::new(),
            memo,
            trace,
        }
    }

    fn top(mut self, node: &NodeName, path: &Path) -> EvalOutcome {
        self.eval(Frame {
            local_node: node.clone(),
            path: path.clone(),
            global_node: node.clone(),
            global_path: path.clone(),
        })
        .0
    }

    fn undefined(reason: UndefinedReason, frame: &Frame) -> EvalOutcome {
        EvalOutcome::Undefined {
            reason,
            at: frame.local_node.clone(),
            path: frame.path.clone(),
        }
    }

    /// Returns the outcome and the number of frames it occupied.
    fn eval(&mut self, frame: Frame) -> (EvalOutcome, usize) {
        if self.stack.len() >= self.max_depth {
            return (Self::undefined(UndefinedReason::DepthExceeded, &frame), 1);
        }
        if self.active.contains(&frame) {
            return (Self::undefined(UndefinedReason::CycleDetected, &frame), 1);
        }
        if let Some(memo) = self.memo.as_deref() {
            if let Some((outcome, height)) = memo.get(&frame) {
                if self.stack.len() + height <= self.max_depth {
                    return (outcome.clone(), *height);
                }
            }
        }

        let theory = self.theory;
        let sentence = theory
            .node(&frame.local_node)
            .and_then(|def| def.longest_prefix(frame.path.attributes()));
        let Some(sentence) = sentence else {
            let outcome = Self::undefined(UndefinedReason::NoMatchingSentence, &frame);
            self.remember(frame, &outcome, 1);
            return (outcome, 1);
        };
        let extension = &frame.path.attributes()[sentence.path.len()..];

        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(TraceStep {
                context: QueryContext {
                    local_node: frame.local_node.clone(),
                    global_node: frame.global_node.clone(),
                    global_path: frame.global_path.clone(),
                },
                queried_path: frame.path.clone(),
                matched_prefix: sentence.path.clone(),
                rvalue: sentence.rvalue.clone(),
                extension: Path::new(extension.to_vec()),
            });
        }

        self.stack.push(frame.clone());
        self.active.insert(frame.clone());

        let mut atoms = Vec::new();
        let mut failure = None;
        let mut height = 0;
        for item in sentence.rvalue.items() {
            let (outcome, h) = match item {
                Descriptor::Atom(a) => (EvalOutcome::Defined(Value(vec![a.clone()])), 0),
                Descriptor::LocalPath(q) => self.eval(Frame {
                    local_node: frame.local_node.clone(),
                    path: q.concat(extension),
                    global_node: frame.global_node.clone(),
                    global_path: frame.global_path.clone(),
                }),
                Descriptor::LocalNode(n) => self.eval(Frame {
                    local_node: n.clone(),
                    path: frame.path.clone(),
                    global_node: frame.global_node.clone(),
                    global_path: frame.global_path.clone(),
                }),
                Descriptor::LocalNodePath(n, q) => self.eval(Frame {
                    local_node: n.clone(),
                    path: q.concat(extension),
                    global_node: frame.global_node.clone(),
                    global_path: frame.global_path.clone(),
                }),
                Descriptor::GlobalPath(q) => {
                    let p = q.concat(extension);
                    self.eval(Frame {
                        local_node: frame.global_node.clone(),
                        path: p.clone(),
                        global_node: frame.global_node.clone(),
                        global_path: p,
                    })
                }
                Descriptor::GlobalNode(n) => self.eval(Frame {
                    local_node: n.clone(),
                    path: frame.global_path.clone(),
                    global_node: n.clone(),
                    global_path: frame.global_path.clone(),
                }),
                Descriptor::GlobalNodePath(n, q) => {
                    let p = q.concat(extension);
                    self.eval(Frame {
                        local_node: n.clone(),
                        path: p.clone(),
                        global_node: n.clone(),
                        global_path: p,
                    })
                }
            };
            height = height.max(h);
            match outcome {
                EvalOutcome::Defined(v) => atoms.extend(v.0),
                undefined => {
                    failure = Some(undefined);
                    break;
                }
            }
        }

        self.stack.pop();
        self.active.remove(&frame);

        let outcome = failure.unwrap_or(EvalOutcome::Defined(Value(atoms)));
        let height = height + 1;
        self.remember(frame, &outcome, height);
        (outcome, height)
    }

    fn remember(&mut self, frame: Frame, outcome: &EvalOutcome, height: usize) {
        if outcome.is_error() {
            return;
        }
        if let Some(memo) = self.memo.as_deref_mut() {
            memo.insert(frame, (outcome.clone(), height));
        }
    }
}

/// Shorthand for a one-off [`Engine::evaluate`] with default settings.
pub fn evaluate(theory: &Theory, node: &NodeName, path: &Path) -> EvalOutcome {
    Engine::new(theory).evaluate(node, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_theory;

    fn n(s: &str) -> NodeName {
        NodeName::new(s).unwrap()
    }

    fn p(s: &str) -> Path {
        Path::parse(s).unwrap()
    }

    fn eval(src: &str, node: &str, path: &str) -> EvalOutcome {
        let t = parse_theory(src).unwrap();
        evaluate(&t, &n(node), &p(path))
    }

    #[test]
    fn direct_atom() {
        let o = eval("X: <a> == b.", "X", "a");
        assert_eq!(o.to_string(), "b");
    }

    #[test]
    fn atom_discards_extension() {
        let t = parse_theory("X: <cat> == v.").unwrap();
        let (o, steps) = Engine::new(&t).evaluate_traced(&n("X"), &p("cat foo"));
        assert_eq!(o.to_string(), "v");
        assert!(steps[0].discards_extension());
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let o = eval("X: <> == X.", "X", "a");
        assert_eq!(o.reason(), Some(UndefinedReason::CycleDetected));
    }

    #[test]
    fn missing_node_and_missing_match() {
        let o = eval("X: <a> == b.", "Nonesuch", "cat");
        assert_eq!(
            o,
            EvalOutcome::Undefined {
                reason: UndefinedReason::NoMatchingSentence,
                at: n("Nonesuch"),
                path: p("cat")
            }
        );
        let o = eval("X: <a> == b.", "X", "c");
        assert_eq!(o.reason(), Some(UndefinedReason::NoMatchingSentence));
        assert_eq!(o.to_string(), "UNDEFINED(no-matching-sentence)");
    }

    #[test]
    fn growing_path_hits_depth_bound() {
        let t = parse_theory("X: <> == X:<a>.").unwrap();
        let o = Engine::new(&t)
            .with_max_depth(40)
            .evaluate(&n("X"), &p("b"));
        assert_eq!(o.reason(), Some(UndefinedReason::DepthExceeded));
    }

    #[test]
    fn local_path_keeps_local_node() {
        let src = "A:\n <> == B\n <x> == <y>.\nB:\n <y> == from-b\n <x> == wrong.";
        // <x> at A -> <y> evaluated at A, which falls through to B.
        assert_eq!(eval(src, "A", "x").to_string(), "from-b");
    }

    #[test]
    fn node_inherits_full_path() {
        let src = "A: <f> == B.\nB: <f g> == yes.";
        assert_eq!(eval(src, "A", "f g").to_string(), "yes");
    }

    #[test]
    fn node_path_transports_extension() {
        let src = "A: <f> == B:<h>.\nB: <h g> == yes.";
        assert_eq!(eval(src, "A", "f g").to_string(), "yes");
    }

    #[test]
    fn global_path_reroots_at_query_node() {
        let src = "Top:\n <> == Mid\n <leaf> == top-leaf.\nMid:\n <x> == \"<leaf>\"\n <leaf> == mid-leaf.";
        assert_eq!(eval(src, "Top", "x").to_string(), "top-leaf");
        assert_eq!(eval(src, "Mid", "x").to_string(), "mid-leaf");
    }

    #[test]
    fn global_node_resets_global_context() {
        let src = "A:\n <x> == \"B\"\n <y> == a.\nB:\n <x> == \"<y>\"\n <y> == b.";
        // "B" evaluates the global path <x> at B with global node B.
        let t = parse_theory(src).unwrap();
        let (o, steps) = Engine::new(&t).evaluate_traced(&n("A"), &p("x"));
        assert_eq!(o.to_string(), "b");
        assert_eq!(steps[1].context.global_node, n("B"));
        assert_eq!(steps[2].context.local_node, n("B"));
    }

    #[test]
    fn global_node_path() {
        let src = "A: <x> == \"B:<z>\".\nB:\n <z q> == \"<w>\"\n <w> == bw.";
        assert_eq!(eval(src, "A", "x q").to_string(), "bw");
    }

    #[test]
    fn sequences_concatenate() {
        let src = "X:\n <a> == b <c> Y:<d>\n <c> == c1 c2.\nY: <d> == d.";
        assert_eq!(eval(src, "X", "a").to_string(), "b c1 c2 d");
        let src = "X: <a> == b <c>.";
        assert_eq!(
            eval(src, "X", "a").reason(),
            Some(UndefinedReason::NoMatchingSentence)
        );
    }

    #[test]
    fn trace_format() {
        let t = parse_theory("A: <> == B:<q>.\nB: <q r> == v.").unwrap();
        let (_, steps) = Engine::new(&t).evaluate_traced(&n("A"), &p("r s"));
        assert_eq!(
            format_trace(&steps),
            "A:<> + <r s>  [global A:<r s>]\nB:<q r> + <s>  [global A:<r s>]\n"
        );
    }

    #[test]
    fn memo_respects_depth_bound() {
        // Chain of 6 frames from A; from C only 4 are needed.
        let src = "A: <> == B.\nB: <> == C.\nC: <> == D.\nD: <> == E.\nE: <> == F.\nF: <x> == v.";
        let t = parse_theory(src).unwrap();
        let engine = Engine::new(&t).with_max_depth(5);
        let mut session = engine.session();
        assert!(session.evaluate(&n("C"), &p("x")).is_defined());
        let fresh = engine.evaluate(&n("A"), &p("x"));
        assert_eq!(fresh.reason(), Some(UndefinedReason::DepthExceeded));
        assert_eq!(session.evaluate(&n("A"), &p("x")), fresh);
    }

    #[test]
    fn evaluate_many_empty() {
        let t = parse_theory("X: <a> == b.").unwrap();
        assert!(Engine::new(&t)
            .evaluate_many(&n("X"), Vec::new())
            .is_empty());
    }
}
