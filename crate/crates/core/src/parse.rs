//! Concrete syntax: `Node: <path> == rvalue ... .` blocks, `%` comments.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::theory::{
    is_atom, is_node_name, Atom, Descriptor, NodeName, Path, Rvalue, Sentence, Theory,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub source: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.source, self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("duplicate path {path} in node {node} (first defined at {first})")]
    DuplicatePath {
        node: NodeName,
        path: Path,
        first: Box<Location>,
    },
    #[error("duplicate node {node} (first block at {first})")]
    DuplicateNode {
        node: NodeName,
        first: Box<Location>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{at}: {kind}")]
pub struct ParseError {
    pub at: Location,
    pub kind: ParseErrorKind,
}

/// Parses a single source into a theory.
pub fn parse_theory(source: &str) -> Result<Theory, ParseError> {
    let mut builder = TheoryBuilder::new();
    builder.add_source("<input>", source)?;
    Ok(builder.finish())
}

/// Accumulates several sources into one theory, in the order added.
///
/// A node may be reopened by a block in a later source, extending it; a
/// second block for the same node inside one source is an error, as is
/// any repeated `(node, path)` pair.
#[derive(Debug, Default)]
pub struct TheoryBuilder {
    theory: Theory,
    sentence_at: HashMap<(NodeName, Path), Location>,
    block_at: HashMap<NodeName, Location>,
}

impl TheoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_source(&mut self, name: &str, text: &str) -> Result<(), ParseError> {
        let tokens = lex(name, text)?;
        let blocks = Parser {
            tokens: &tokens,
            pos: 0,
            eof: eof_location(name, text),
        }
        .blocks()?;

        let mut seen_here: HashMap<NodeName, Location> = HashMap::new();
        for block in blocks {
            if let Some(first) = seen_here.get(&block.name) {
                return Err(ParseError {
                    at: block.at,
                    kind: ParseErrorKind::DuplicateNode {
                        node: block.name,
                        first: Box::new(first.clone()),
                    },
                });
            }
            seen_here.insert(block.name.clone(), block.at.clone());
            self.block_at
                .entry(block.name.clone())
                .or_insert_with(|| block.at.clone());
            self.theory.declare(&block.name);
            for (sentence, at) in block.sentences {
                let key = (sentence.node.clone(), sentence.path.clone());
                if let Some(first) = self.sentence_at.get(&key) {
                    return Err(ParseError {
                        at,
                        kind: ParseErrorKind::DuplicatePath {
                            node: key.0,
                            path: key.1,
                            first: Box::new(first.clone()),
                        },
                    });
                }
                self.theory
                    .add_sentence(sentence)
                    .expect("duplicate paths are caught above");
                self.sentence_at.insert(key, at);
            }
        }
        Ok(())
    }

    /// Where the first block of `node` was seen.
    pub fn location(&self, node: &NodeName) -> Option<&Location> {
        self.block_at.get(node)
    }

    pub fn finish(self) -> Theory {
        self.theory
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Atom(String),
    Colon,
    Open,
    Close,
    Eq,
    DefEq,
    Quote,
    Dot,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) | Tok::Atom(s) => write!(f, "`{s}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Open => f.write_str("`<`"),
            Tok::Close => f.write_str("`>`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::DefEq => f.write_str("`==`"),
            Tok::Quote => f.write_str("`\"`"),
            Tok::Dot => f.write_str("`.`"),
        }
    }
}

struct Spanned {
    tok: Tok,
    at: Location,
}

fn eof_location(source: &str, text: &str) -> Location {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Location {
        source: source.to_string(),
        line,
        col,
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '+'
}

fn lex(source: &str, text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let loc = |line, col| Location {
        source: source.to_string(),
        line,
        col,
    };

    while let Some(&c) = chars.peek() {
        let at = loc(line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let single = match c {
            ':' => Some(Tok::Colon),
            '<' => Some(Tok::Open),
            '>' => Some(Tok::Close),
            '"' => Some(Tok::Quote),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            col += 1;
            out.push(Spanned { tok, at });
            continue;
        }
        if c == '=' {
            chars.next();
            col += 1;
            let tok = if chars.peek() == Some(&'=') {
                chars.next();
                col += 1;
                Tok::DefEq
            } else {
                Tok::Eq
            };
            out.push(Spanned { tok, at });
            continue;
        }
        if is_word_char(c) {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !is_word_char(c) {
                    break;
                }
                word.push(c);
                chars.next();
                col += 1;
            }
            let tok = if is_node_name(&word) {
                Tok::Name(word)
            } else if is_atom(&word) {
                Tok::Atom(word)
            } else {
                return Err(ParseError {
                    at,
                    kind: ParseErrorKind::Syntax(format!("malformed token `{word}`")),
                });
            };
            out.push(Spanned { tok, at });
            continue;
        }
        return Err(ParseError {
            at,
            kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
        });
    }
    Ok(out)
}

struct Block {
    name: NodeName,
    at: Location,
    sentences: Vec<(Sentence, Location)>,
}

struct Parser<'a> {
    tokens: &'a [Spanned],
    pos: usize,
    eof: Location,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&'a Tok> {
        self.tokens.get(self.pos + offset).map(|s| &s.tok)
    }

    fn here(&self) -> Location {
        self.tokens
            .get(self.pos)
            .map_or_else(|| self.eof.clone(), |s| s.at.clone())
    }

    fn error<T>(&self, msg: String) -> Result<T, ParseError> {
        Err(ParseError {
            at: self.here(),
            kind: ParseErrorKind::Syntax(msg),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(tok) => self.error(format!("expected {wanted}, found {tok}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn blocks(mut self) -> Result<Vec<Block>, ParseError> {
        let mut blocks = Vec::new();
        while self.peek().is_some() {
            blocks.push(self.block()?);
        }
        Ok(blocks)
    }

    fn block(&mut self) -> Result<Block, ParseError> {
        let at = self.here();
        let name = match self.peek() {
            Some(Tok::Name(n)) => NodeName::new(n.clone()).expect("lexer validated"),
            _ => return self.unexpected("a node name"),
        };
        self.pos += 1;
        self.expect(Tok::Colon, "`:` after node name")?;

        let mut sentences = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Dot) => {
                    if sentences.is_empty() {
                        return self.error(format!("node {name} has no sentences"));
                    }
                    self.pos += 1;
                    break;
                }
                Some(Tok::Open) => {
                    let clause_at = self.here();
                    let path = self.path()?;
                    let definitional = match self.peek() {
                        Some(Tok::DefEq) => true,
                        Some(Tok::Eq) => false,
                        _ => return self.unexpected("`==` or `=`"),
                    };
                    self.pos += 1;
                    let rvalue = self.rvalue()?;
                    sentences.push((
                        Sentence {
                            node: name.clone(),
                            path,
                            rvalue,
                            definitional,
                        },
                        clause_at,
                    ));
                }
                _ => return self.unexpected("`<` or `.`"),
            }
        }
        Ok(Block {
            name,
            at,
            sentences,
        })
    }

    fn path(&mut self) -> Result<Path, ParseError> {
        self.expect(Tok::Open, "`<`")?;
        let mut attrs = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Atom(a)) => {
                    attrs.push(Atom::new(a.clone()).expect("lexer validated"));
                    self.pos += 1;
                }
                Some(Tok::Close) => {
                    self.pos += 1;
                    return Ok(Path::new(attrs));
                }
                _ => return self.unexpected("an attribute or `>`"),
            }
        }
    }

    /// A `<` starts the next clause when its path is followed by `=`/`==`.
    fn at_clause_start(&self) -> bool {
        if self.peek() != Some(&Tok::Open) {
            return false;
        }
        let mut i = 1;
        while let Some(tok) = self.peek_at(i) {
            match tok {
                Tok::Atom(_) => i += 1,
                Tok::Close => {
                    return matches!(self.peek_at(i + 1), Some(Tok::Eq | Tok::DefEq));
                }
                _ => return false,
            }
        }
        false
    }

    fn rvalue(&mut self) -> Result<Rvalue, ParseError> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                None | Some(Tok::Dot) => break,
                Some(Tok::Open) if self.at_clause_start() => break,
                _ => items.push(self.descriptor()?),
            }
        }
        match Rvalue::new(items) {
            Some(rv) => Ok(rv),
            None => self.unexpected("a right-hand side"),
        }
    }

    fn node_ref(&mut self) -> Result<(NodeName, Option<Path>), ParseError> {
        let name = match self.peek() {
            Some(Tok::Name(n)) => NodeName::new(n.clone()).expect("lexer validated"),
            _ => return self.unexpected("a node name"),
        };
        self.pos += 1;
        if self.peek() == Some(&Tok::Colon) {
            self.pos += 1;
            let path = self.path()?;
            Ok((name, Some(path)))
        } else {
            Ok((name, None))
        }
    }

    fn descriptor(&mut self) -> Result<Descriptor, ParseError> {
        match self.peek() {
            Some(Tok::Atom(a)) => {
                self.pos += 1;
                Ok(Descriptor::Atom(
                    Atom::new(a.clone()).expect("lexer validated"),
                ))
            }
            Some(Tok::Open) => Ok(Descriptor::LocalPath(self.path()?)),
            Some(Tok::Name(_)) => Ok(match self.node_ref()? {
                (n, None) => Descriptor::LocalNode(n),
                (n, Some(p)) => Descriptor::LocalNodePath(n, p),
            }),
            Some(Tok::Quote) => {
                self.pos += 1;
                let d = match self.peek() {
                    Some(Tok::Open) => Descriptor::GlobalPath(self.path()?),
                    Some(Tok::Name(_)) => match self.node_ref()? {
                        (n, None) => Descriptor::GlobalNode(n),
                        (n, Some(p)) => Descriptor::GlobalNodePath(n, p),
                    },
                    _ => return self.unexpected("a path or node name inside quotes"),
                };
                self.expect(Tok::Quote, "closing `\"`")?;
                Ok(d)
            }
            _ => self.unexpected("a descriptor"),
        }
    }
}
