//! Lexical-rule chaining.
//!
//! Each rule `r` relates `<input r ...>` to `<output r ...>` inside one
//! feature structure. Applying rules `r1 ... rk` to a word means linking
//! the base description to `<input r1>`, each `<output ri>` to the next
//! input, and the last output to `<surface>`. The links are synthesized as
//! sentences of a fresh node below the word; applicability constraints are
//! checked before any link is made.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::eval::{Engine, EvalOutcome};
use crate::ltag::{render, tree_at, Format, Markers, ProbeConfig, TagTree, TreeError, UNDEF};
use crate::theory::{Atom, Descriptor, DuplicatePath, NodeName, Path, Rvalue, Sentence, Theory};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleName(Atom);

impl RuleName {
    pub fn new(atom: Atom) -> Self {
        RuleName(atom)
    }

    pub fn atom(&self) -> &Atom {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        self.0.as_str()
    }
}

impl std::str::FromStr for RuleName {
    type Err = crate::theory::NameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Atom::new(s).map(RuleName)
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn rule(s: &str) -> RuleName {
    s.parse().expect("rule names are atoms")
}

/// Comma-joined names, e.g. `whq,topic`.
pub fn join_rules(rules: &[RuleName]) -> String {
    rules
        .iter()
        .map(RuleName::as_str)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintTable {
    pub mutually_exclusive: Vec<BTreeSet<RuleName>>,
    pub requires: BTreeMap<RuleName, BTreeSet<RuleName>>,
}

/// Known rules in their canonical application order, plus constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleCatalog {
    order: Vec<RuleName>,
    constraints: ConstraintTable,
}

impl Default for RuleCatalog {
    fn default() -> Self {
        Self::shipped()
    }
}

impl RuleCatalog {
    /// dative < passive < auxinv < whq < rel < topic, with whq, rel and
    /// topic mutually exclusive.
    pub fn shipped() -> Self {
        let order = ["dative", "passive", "auxinv", "whq", "rel", "topic"]
            .into_iter()
            .map(rule)
            .collect();
        RuleCatalog {
            order,
            constraints: ConstraintTable {
                mutually_exclusive: vec![["whq", "rel", "topic"].into_iter().map(rule).collect()],
                requires: BTreeMap::new(),
            },
        }
    }

    pub fn new(order: Vec<RuleName>, constraints: ConstraintTable) -> Self {
        RuleCatalog { order, constraints }
    }

    pub fn rules(&self) -> &[RuleName] {
        &self.order
    }

    pub fn constraints(&self) -> &ConstraintTable {
        &self.constraints
    }

    pub fn knows(&self, r: &RuleName) -> bool {
        self.order.contains(r)
    }

    fn rank(&self, r: &RuleName) -> usize {
        self.order.iter().position(|x| x == r).unwrap_or(usize::MAX)
    }

    /// Sorts rules into canonical order, dropping duplicates.
    pub fn canonical(&self, rules: impl IntoIterator<Item = RuleName>) -> Vec<RuleName> {
        let mut v: Vec<RuleName> = rules
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        v.sort_by_key(|r| self.rank(r));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    pub base: NodeName,
    pub applied: Vec<RuleName>,
    pub derived_name: NodeName,
}

/// `Give%dative+passive`. `%` cannot occur in parsed names.
pub fn derived_name(base: &NodeName, applied: &[RuleName]) -> NodeName {
    let rules: Vec<&str> = applied.iter().map(RuleName::as_str).collect();
    NodeName::synthetic(format!("{base}%{}", rules.join("+")))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintViolation {
    #[error("constraint: {}", join_rules(.0))]
    Exclusive(Vec<RuleName>),
    #[error("constraint: {rule} requires {}", join_rules(.missing))]
    Requires {
        rule: RuleName,
        missing: Vec<RuleName>,
    },
}

impl ConstraintViolation {
    /// The rules involved in the clash.
    pub fn rules(&self) -> Vec<RuleName> {
        match self {
            ConstraintViolation::Exclusive(v) => v.clone(),
            ConstraintViolation::Requires { rule, missing } => {
                let mut v = vec![rule.clone()];
                v.extend(missing.iter().cloned());
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("unknown rule `{0}`")]
    UnknownRule(RuleName),
    #[error(transparent)]
    Violation(#[from] ConstraintViolation),
}

pub fn build_chain(
    word: &NodeName,
    flags: &BTreeSet<RuleName>,
    catalog: &RuleCatalog,
) -> Result<ChainSpec, ChainError> {
    if let Some(unknown) = flags.iter().find(|r| !catalog.knows(r)) {
        return Err(ChainError::UnknownRule(unknown.clone()));
    }
    for group in &catalog.constraints.mutually_exclusive {
        let present: Vec<RuleName> = group.intersection(flags).cloned().collect();
        if present.len() >= 2 {
            return Err(ConstraintViolation::Exclusive(catalog.canonical(present)).into());
        }
    }
    for (r, needed) in &catalog.constraints.requires {
        if flags.contains(r) {
            let missing: Vec<RuleName> = needed.difference(flags).cloned().collect();
            if !missing.is_empty() {
                return Err(ConstraintViolation::Requires {
                    rule: r.clone(),
                    missing: catalog.canonical(missing),
                }
                .into());
            }
        }
    }
    let applied = catalog.canonical(flags.iter().cloned());
    Ok(ChainSpec {
        derived_name: derived_name(word, &applied),
        base: word.clone(),
        applied,
    })
}

fn attr(s: &str) -> Atom {
    Atom::new(s).expect("glue attributes are atoms")
}

fn stage(which: &str, r: &RuleName) -> Path {
    Path::new(vec![attr(which), r.atom().clone()])
}

/// The linking sentences for a chain, all at `spec.derived_name`.
pub fn synthesize_glue(spec: &ChainSpec) -> Vec<Sentence> {
    let at = &spec.derived_name;
    let sentence = |path: Path, d: Descriptor| Sentence::new(at.clone(), path, Rvalue::single(d));
    let mut out = vec![sentence(
        Path::empty(),
        Descriptor::LocalNode(spec.base.clone()),
    )];
    let mut previous = Path::empty();
    for r in &spec.applied {
        out.push(sentence(stage("input", r), Descriptor::LocalPath(previous)));
        previous = stage("output", r);
    }
    out.push(sentence(
        Path::new(vec![attr("surface")]),
        Descriptor::LocalPath(previous),
    ));
    out
}

/// Glue for a word whose flags violate a constraint: inherit the base and
/// define no surface.
pub fn violation_glue(base: &NodeName, derived: &NodeName) -> Vec<Sentence> {
    vec![Sentence::new(
        derived.clone(),
        Path::empty(),
        Rvalue::single(Descriptor::LocalNode(base.clone())),
    )]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("unknown word or lexeme {0}")]
    UnknownWord(NodeName),
    #[error("flag <alt {rule}> at {word} has value `{value}`, expected true or false")]
    BadFlag {
        word: NodeName,
        rule: RuleName,
        value: String,
    },
    #[error("evaluating <alt {rule}> at {word}: {outcome:?}")]
    FlagEvaluation {
        word: NodeName,
        rule: RuleName,
        outcome: EvalOutcome,
    },
    #[error("unknown rule `{0}`")]
    UnknownRule(RuleName),
    #[error(transparent)]
    Glue(#[from] DuplicatePath),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Rules whose `<alt r>` flag is `true` at `word`. `false` and the
/// fragment's `undef` default both mean unset.
pub fn read_alt_flags(
    theory: &Theory,
    word: &NodeName,
    known: &[RuleName],
) -> Result<BTreeSet<RuleName>, DeriveError> {
    let engine = Engine::new(theory);
    let mut session = engine.session();
    let mut out = BTreeSet::new();
    for r in known {
        let path = Path::new(vec![attr("alt"), r.atom().clone()]);
        match session.evaluate(word, &path) {
            EvalOutcome::Defined(v) if v.is("true") => {
                out.insert(r.clone());
            }
            EvalOutcome::Defined(v) if v.is("false") || v.is(UNDEF) => {}
            EvalOutcome::Defined(v) => {
                return Err(DeriveError::BadFlag {
                    word: word.clone(),
                    rule: r.clone(),
                    value: v.to_string(),
                })
            }
            outcome if outcome.is_error() => {
                return Err(DeriveError::FlagEvaluation {
                    word: word.clone(),
                    rule: r.clone(),
                    outcome,
                })
            }
            _ => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Derivation {
    /// The input theory plus the glue node.
    pub theory: Theory,
    pub derived: NodeName,
    pub flags: BTreeSet<RuleName>,
    pub chain: Result<ChainSpec, ConstraintViolation>,
    /// `None` under a constraint violation, or when the chain leaves the
    /// surface undefined.
    pub surface: Option<TagTree>,
}

fn augment(theory: &Theory, glue: Vec<Sentence>) -> Result<Theory, DuplicatePath> {
    let mut t = theory.clone();
    for s in glue {
        t.add_sentence(s)?;
    }
    Ok(t)
}

fn surface_path() -> Path {
    Path::new(vec![attr("surface")])
}

fn derive_with_flags(
    theory: &Theory,
    word: &NodeName,
    flags: BTreeSet<RuleName>,
    catalog: &RuleCatalog,
    probe: &ProbeConfig,
) -> Result<Derivation, DeriveError> {
    if !theory.contains(word) {
        return Err(DeriveError::UnknownWord(word.clone()));
    }
    match build_chain(word, &flags, catalog) {
        Err(ChainError::UnknownRule(r)) => Err(DeriveError::UnknownRule(r)),
        Err(ChainError::Violation(v)) => {
            let derived = derived_name(word, &catalog.canonical(flags.iter().cloned()));
            let theory = augment(theory, violation_glue(word, &derived))?;
            Ok(Derivation {
                theory,
                derived,
                flags,
                chain: Err(v),
                surface: None,
            })
        }
        Ok(spec) => {
            let theory = augment(theory, synthesize_glue(&spec))?;
            let surface = tree_at(
                &Engine::new(&theory),
                &spec.derived_name,
                &surface_path(),
                probe,
            )?;
            Ok(Derivation {
                derived: spec.derived_name.clone(),
                theory,
                flags,
                chain: Ok(spec),
                surface,
            })
        }
    }
}

/// Reads the word's flags, chains the selected rules and reconstructs the
/// surface tree. Word-local overrides stay in force because the chain's
/// first input is the word itself.
pub fn derive_word(
    theory: &Theory,
    word: &NodeName,
    catalog: &RuleCatalog,
    probe: &ProbeConfig,
) -> Result<Derivation, DeriveError> {
    if !theory.contains(word) {
        return Err(DeriveError::UnknownWord(word.clone()));
    }
    let flags = read_alt_flags(theory, word, catalog.rules())?;
    if flags.is_empty() && defines_surface(theory, word) {
        let surface = tree_at(&Engine::new(theory), word, &surface_path(), probe)?;
        return Ok(Derivation {
            theory: theory.clone(),
            derived: word.clone(),
            flags,
            chain: Ok(ChainSpec {
                base: word.clone(),
                applied: Vec::new(),
                derived_name: word.clone(),
            }),
            surface,
        });
    }
    derive_with_flags(theory, word, flags, catalog, probe)
}

/// A word that links its own chain, like `Give-dat`, has local `<surface ...>`
/// sentences and needs no glue.
fn defines_surface(theory: &Theory, word: &NodeName) -> bool {
    theory.node(word).is_some_and(|def| {
        def.sentences().any(|s| {
            s.path
                .attributes()
                .first()
                .is_some_and(|a| a.as_str() == "surface")
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    /// In canonical order.
    pub rules: Vec<RuleName>,
    pub surface: Option<TagTree>,
}

/// Surface trees for every admissible subset of `rules` applied to
/// `lexeme`, ordered by subset size and then lexicographically. Subsets
/// that violate a constraint are left out.
pub fn enumerate_family(
    theory: &Theory,
    lexeme: &NodeName,
    rules: &BTreeSet<RuleName>,
    catalog: &RuleCatalog,
    probe: &ProbeConfig,
) -> Result<Vec<FamilyMember>, DeriveError> {
    if !theory.contains(lexeme) {
        return Err(DeriveError::UnknownWord(lexeme.clone()));
    }
    if let Some(unknown) = rules.iter().find(|r| !catalog.knows(r)) {
        return Err(DeriveError::UnknownRule(unknown.clone()));
    }
    let pool: Vec<RuleName> = rules.iter().cloned().collect();
    let mut subsets: Vec<Vec<RuleName>> = (0u64..1 << pool.len())
        .map(|mask| {
            let chosen = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, r)| r.clone());
            catalog.canonical(chosen)
        })
        .collect();
    subsets.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            a.iter()
                .map(RuleName::as_str)
                .cmp(b.iter().map(RuleName::as_str))
        })
    });

    let mut out = Vec::new();
    for subset in subsets {
        let flags: BTreeSet<RuleName> = subset.iter().cloned().collect();
        let d = derive_with_flags(theory, lexeme, flags, catalog, probe)?;
        if d.chain.is_err() {
            continue;
        }
        out.push(FamilyMember {
            rules: subset,
            surface: d.surface,
        });
    }
    Ok(out)
}

/// One line per member: rule names, a tab, then the bracket tree or
/// `UNDEFINED`.
pub fn format_family(members: &[FamilyMember], markers: Markers) -> String {
    let mut out = String::new();
    for m in members {
        out.push_str(&join_rules(&m.rules));
        out.push('\t');
        match &m.surface {
            Some(t) => out.push_str(&render(t, Format::Bracket, markers)),
            None => out.push_str("UNDEFINED"),
        }
        out.push('\n');
    }
    out
}
