use std::collections::BTreeSet;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use datr_ltag::eval::format_trace;
use datr_ltag::lint::{lint_theory, LintOptions, Severity};
use datr_ltag::ltag::{
    render, tree_at, Format, Markers, ProbeConfig, TreeError, DEFAULT_PROBE_DEPTH,
};
use datr_ltag::rules::{
    derive_word, enumerate_family, format_family, DeriveError, RuleCatalog, RuleName,
};
use datr_ltag::{corpus, Atom, Engine, EvalOutcome, NodeName, Path, Theory, TheoryBuilder};

/// Query DATR lexicons and view the LTAG trees they encode.
#[derive(Parser)]
#[command(name = "datr-ltag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and lint a theory.
    Check {
        #[arg(value_name = "THEORY")]
        theory: String,
        /// Treat warnings as errors and report non-orthogonal overrides.
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate NODE:<PATH...>.
    Query {
        #[arg(value_name = "THEORY")]
        theory: String,
        node: String,
        path: Vec<String>,
    },
    /// Evaluate NODE:<PATH...> and print the inheritance steps.
    Trace {
        #[arg(value_name = "THEORY")]
        theory: String,
        node: String,
        path: Vec<String>,
    },
    /// Print the tree encoded at NODE under a path prefix.
    Tree {
        #[arg(value_name = "THEORY")]
        theory: String,
        node: String,
        /// Space-separated attributes, e.g. `surface`.
        #[arg(long, default_value = "")]
        prefix: String,
        #[command(flatten)]
        view: View,
    },
    /// Apply the rules flagged at WORD and print its surface tree.
    Derive {
        #[arg(value_name = "THEORY")]
        theory: String,
        word: String,
        #[command(flatten)]
        view: View,
    },
    /// Print the surface tree for every admissible subset of rules.
    Family {
        #[arg(value_name = "THEORY")]
        theory: String,
        lexeme: String,
        /// Comma-separated rule names; defaults to all known rules.
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
        #[arg(long, env = "DATR_PROBE_DEPTH", default_value_t = DEFAULT_PROBE_DEPTH)]
        depth: usize,
        #[arg(long)]
        unicode: bool,
    },
}

#[derive(Args)]
struct View {
    #[arg(long, default_value = "bracket")]
    format: Format,
    /// Maximum number of structural steps to probe.
    #[arg(long, env = "DATR_PROBE_DEPTH", default_value_t = DEFAULT_PROBE_DEPTH)]
    depth: usize,
    /// Use the diamond and down-arrow markers.
    #[arg(long)]
    unicode: bool,
}

impl View {
    fn markers(&self) -> Markers {
        markers(self.unicode)
    }

    fn probe(&self) -> ProbeConfig {
        ProbeConfig::default().with_depth(self.depth)
    }
}

fn markers(unicode: bool) -> Markers {
    if unicode {
        Markers::Unicode
    } else {
        Markers::Ascii
    }
}

/// THEORY is a file, a comma-separated list of files, or a directory. A
/// directory holding `hierarchy.dtr`, `rules.dtr` and `words.dtr` loads those
/// in order; any other directory loads its `*.dtr` files sorted by name.
/// `corpus` names the built-in fragment unless such a path exists.
fn load_theory(arg: &str) -> Result<Theory> {
    let files = theory_files(arg)?;
    let mut builder = TheoryBuilder::new();
    match files {
        None => {
            for (name, text) in corpus::FILES {
                builder.add_source(&format!("corpus/{name}"), text)?;
            }
        }
        Some(files) => {
            for f in files {
                let text =
                    fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
                builder.add_source(&f.display().to_string(), &text)?;
            }
        }
    }
    Ok(builder.finish())
}

fn theory_files(arg: &str) -> Result<Option<Vec<PathBuf>>> {
    if arg.contains(',') {
        return Ok(Some(
            arg.split(',')
                .filter(|s| !s.is_empty())
                .map(PathBuf::from)
                .collect(),
        ));
    }
    let path = FsPath::new(arg);
    if !path.exists() {
        if arg == "corpus" {
            return Ok(None);
        }
        bail!("no such theory file or directory: {arg}");
    }
    if !path.is_dir() {
        return Ok(Some(vec![path.to_path_buf()]));
    }
    let layout: Vec<PathBuf> = corpus::FILES.iter().map(|(n, _)| path.join(n)).collect();
    if layout.iter().all(|p| p.is_file()) {
        return Ok(Some(layout));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("reading directory {arg}"))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "dtr"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .dtr files in {arg}");
    }
    Ok(Some(files))
}

fn node_name(s: &str) -> Result<NodeName> {
    NodeName::new(s).with_context(|| format!("invalid node name `{s}`"))
}

fn path_from(atoms: &[String]) -> Result<Path> {
    atoms
        .iter()
        .flat_map(|a| a.split_whitespace())
        .map(|a| Atom::new(a).with_context(|| format!("invalid attribute `{a}`")))
        .collect::<Result<Vec<_>>>()
        .map(Path::new)
}

fn emit(rendered: &str) {
    print!("{rendered}");
    if !rendered.ends_with('\n') {
        println!();
    }
}

fn exit_for(outcome: &EvalOutcome) -> ExitCode {
    if outcome.is_defined() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn tree_failure(e: TreeError) -> Result<ExitCode> {
    match e {
        TreeError::Reconstruct(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(3))
        }
        e => Err(e.into()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { theory, strict } => {
            let t = load_theory(&theory)?;
            let diagnostics = lint_theory(&t, LintOptions { strict });
            let mut failed = false;
            for d in &diagnostics {
                if strict && d.severity == Severity::Warning {
                    failed = true;
                    eprintln!("error: {}", d.to_string().trim_start_matches("warning: "));
                } else {
                    eprintln!("{d}");
                }
            }
            if failed {
                return Ok(ExitCode::from(1));
            }
            println!("ok: {} nodes, {} sentences", t.len(), t.sentences().count());
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { theory, node, path } => {
            let t = load_theory(&theory)?;
            let outcome = Engine::new(&t).evaluate(&node_name(&node)?, &path_from(&path)?);
            println!("{outcome}");
            Ok(exit_for(&outcome))
        }
        Command::Trace { theory, node, path } => {
            let t = load_theory(&theory)?;
            let (outcome, steps) =
                Engine::new(&t).evaluate_traced(&node_name(&node)?, &path_from(&path)?);
            print!("{}", format_trace(&steps));
            println!("= {outcome}");
            Ok(exit_for(&outcome))
        }
        Command::Tree {
            theory,
            node,
            prefix,
            view,
        } => {
            let t = load_theory(&theory)?;
            let node = node_name(&node)?;
            let prefix = path_from(&[prefix])?;
            match tree_at(&Engine::new(&t), &node, &prefix, &view.probe()) {
                Ok(Some(tree)) => {
                    emit(&render(&tree, view.format, view.markers()));
                    Ok(ExitCode::SUCCESS)
                }
                Ok(None) => {
                    eprintln!("error: no tree encoded at {node}:{prefix}");
                    Ok(ExitCode::from(2))
                }
                Err(e) => tree_failure(e),
            }
        }
        Command::Derive { theory, word, view } => {
            let t = load_theory(&theory)?;
            let word = node_name(&word)?;
            let d = match derive_word(&t, &word, &RuleCatalog::shipped(), &view.probe()) {
                Ok(d) => d,
                Err(DeriveError::Tree(e)) => return tree_failure(e),
                Err(e) => return Err(e.into()),
            };
            match (&d.chain, &d.surface) {
                (Err(violation), _) => {
                    println!("UNDEFINED({violation})");
                    Ok(ExitCode::from(2))
                }
                (Ok(_), None) => {
                    println!("UNDEFINED(no-surface)");
                    Ok(ExitCode::from(2))
                }
                (Ok(_), Some(tree)) => {
                    emit(&render(tree, view.format, view.markers()));
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Family {
            theory,
            lexeme,
            rules,
            depth,
            unicode,
        } => {
            let t = load_theory(&theory)?;
            let catalog = RuleCatalog::shipped();
            let rules: BTreeSet<RuleName> = if rules.is_empty() {
                catalog.rules().iter().cloned().collect()
            } else {
                rules
                    .iter()
                    .map(|r| {
                        r.parse()
                            .with_context(|| format!("invalid rule name `{r}`"))
                    })
                    .collect::<Result<_>>()?
            };
            let probe = ProbeConfig::default().with_depth(depth);
            let members = match enumerate_family(&t, &node_name(&lexeme)?, &rules, &catalog, &probe)
            {
                Ok(m) => m,
                Err(DeriveError::Tree(e)) => return tree_failure(e),
                Err(e) => return Err(e.into()),
            };
            print!("{}", format_family(&members, markers(unicode)));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
