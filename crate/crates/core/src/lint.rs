//! Static checks over a parsed theory. Diagnostics only; nothing here
//! rejects a theory.

use std::collections::BTreeSet;
use std::fmt;

use crate::theory::{NodeName, Path, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    UndefinedNode {
        referenced: NodeName,
        path: Path,
    },
    MixedEquations,
    /// Two sentences in a prefix relation inheriting from different nodes.
    /// Legal default overriding; reported only in strict mode.
    NonOrthogonal {
        shorter: Path,
        longer: Path,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub node: NodeName,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Info => "note",
            Severity::Warning => "warning",
        };
        match &self.kind {
            DiagnosticKind::UndefinedNode { referenced, path } => write!(
                f,
                "{level}: {}:{path} refers to undefined node {referenced}",
                self.node
            ),
            DiagnosticKind::MixedEquations => {
                write!(
                    f,
                    "{level}: node {} mixes `=` and `==` sentences",
                    self.node
                )
            }
            DiagnosticKind::NonOrthogonal { shorter, longer } => write!(
                f,
                "{level}: {}:{shorter} and {}:{longer} inherit from different nodes",
                self.node, self.node
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LintOptions {
    pub strict: bool,
}

pub fn lint_theory(theory: &Theory, options: LintOptions) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (name, def) in theory.nodes() {
        for s in def.sentences() {
            // One warning per distinct missing node per sentence.
            let missing: BTreeSet<&NodeName> =
                s.rvalue.nodes().filter(|n| !theory.contains(n)).collect();
            for referenced in missing {
                out.push(Diagnostic {
                    severity: Severity::Warning,
                    node: name.clone(),
                    kind: DiagnosticKind::UndefinedNode {
                        referenced: referenced.clone(),
                        path: s.path.clone(),
                    },
                });
            }
        }

        let kinds: BTreeSet<bool> = def.sentences().map(|s| s.definitional).collect();
        if kinds.len() > 1 {
            out.push(Diagnostic {
                severity: Severity::Warning,
                node: name.clone(),
                kind: DiagnosticKind::MixedEquations,
            });
        }

        if options.strict {
            let sentences: Vec<_> = def.sentences().collect();
            for (i, a) in sentences.iter().enumerate() {
                let a_nodes: BTreeSet<_> = a.rvalue.nodes().collect();
                if a_nodes.is_empty() {
                    continue;
                }
                for b in &sentences[i + 1..] {
                    if !a.path.is_prefix_of(&b.path) {
                        continue;
                    }
                    let b_nodes: BTreeSet<_> = b.rvalue.nodes().collect();
                    if !b_nodes.is_empty() && a_nodes != b_nodes {
                        out.push(Diagnostic {
                            severity: Severity::Info,
                            node: name.clone(),
                            kind: DiagnosticKind::NonOrthogonal {
                                shorter: a.path.clone(),
                                longer: b.path.clone(),
                            },
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_theory;

    #[test]
    fn undefined_reference() {
        let t = parse_theory("VERB+NP+PP:\n <right right> == PTREE:<>.").unwrap();
        let d = lint_theory(&t, LintOptions::default());
        assert_eq!(d.len(), 1);
        assert!(matches!(
            &d[0].kind,
            DiagnosticKind::UndefinedNode { referenced, .. } if referenced.as_str() == "PTREE"
        ));
        assert_eq!(
            d[0].to_string(),
            "warning: VERB+NP+PP:<right right> refers to undefined node PTREE"
        );
    }

    #[test]
    fn mixed_equations() {
        let t = parse_theory("X:\n <a> = b\n <c> == d.").unwrap();
        let d = lint_theory(&t, LintOptions::default());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::MixedEquations);
    }

    #[test]
    fn non_orthogonal_only_when_strict() {
        let t = parse_theory("A: <x> == a.\nB: <x> == b.\nN:\n <> == A\n <cat> == B:<x>.").unwrap();
        assert!(lint_theory(&t, LintOptions::default()).is_empty());
        let d = lint_theory(&t, LintOptions { strict: true });
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Info);
        assert_eq!(
            d[0].kind,
            DiagnosticKind::NonOrthogonal {
                shorter: Path::empty(),
                longer: Path::parse("cat").unwrap()
            }
        );
    }

    #[test]
    fn same_node_or_atoms_are_orthogonal() {
        let t = parse_theory("A: <x> == a.\nN:\n <> == A\n <cat> == A:<x>\n <type> == v.").unwrap();
        assert!(lint_theory(&t, LintOptions { strict: true }).is_empty());
    }
}
