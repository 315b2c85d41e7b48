//! The shipped grammar fragment, embedded at build time.

use crate::parse::{ParseError, TheoryBuilder};
use crate::theory::Theory;

pub const HIERARCHY: &str = include_str!("../../../corpus/hierarchy.dtr");
pub const RULES: &str = include_str!("../../../corpus/rules.dtr");
pub const WORDS: &str = include_str!("../../../corpus/words.dtr");

/// File names and contents in load order.
pub const FILES: [(&str, &str); 3] = [
    ("hierarchy.dtr", HIERARCHY),
    ("rules.dtr", RULES),
    ("words.dtr", WORDS),
];

/// The complete fragment: hierarchy, rules, words.
pub fn load() -> Theory {
    load_files(&FILES).expect("shipped corpus parses")
}

/// Only the lexical hierarchy, without rules or words.
pub fn hierarchy() -> Theory {
    load_files(&FILES[..1]).expect("shipped corpus parses")
}

fn load_files(files: &[(&str, &str)]) -> Result<Theory, ParseError> {
    let mut builder = TheoryBuilder::new();
    for (name, text) in files {
        builder.add_source(name, text)?;
    }
    Ok(builder.finish())
}
