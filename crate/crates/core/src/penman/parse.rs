//! PENMAN parser.
//!
//! Grammar:
//!
//! ```text
//! node   ::= '(' id '/' label edge* ')'
//! edge   ::= ':'role ( constant | id | node )
//! ```
//!
//! A bare token in target position is a variable reference when it matches
//! some variable defined in the same tree, and a constant otherwise. That
//! resolution happens in a second pass once every definition is known, so
//! forward references parse fine.

use std::fmt;

use super::tree::{Branch, Node, Target, Tree};

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    LParen,
    RParen,
    Slash,
    /// Role including the leading colon.
    Role(String),
    /// Unquoted token: variable, concept, number, symbol.
    Atom(String),
    /// Quoted string, lexeme kept verbatim including the quotes.
    Str(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '/' | ':' | '"')
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut tokens = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let (line, column) = (self.line, self.column);
            match c {
                _ if c.is_whitespace() => {
                    self.bump();
                }
                '(' => {
                    self.bump();
                    tokens.push(Token { kind: TokenKind::LParen, line, column });
                }
                ')' => {
                    self.bump();
                    tokens.push(Token { kind: TokenKind::RParen, line, column });
                }
                '/' => {
                    self.bump();
                    tokens.push(Token { kind: TokenKind::Slash, line, column });
                }
                ':' => {
                    self.bump();
                    let name = self.take_word();
                    tokens.push(Token {
                        kind: TokenKind::Role(format!(":{name}")),
                        line,
                        column,
                    });
                }
                '"' => {
                    self.bump();
                    let mut lexeme = String::from("\"");
                    let mut closed = false;
                    while let Some(c) = self.bump() {
                        lexeme.push(c);
                        if c == '\\' {
                            if let Some(escaped) = self.bump() {
                                lexeme.push(escaped);
                            }
                        } else if c == '"' {
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        return Err(self.error(line, column, "unterminated string"));
                    }
                    tokens.push(Token { kind: TokenKind::Str(lexeme), line, column });
                }
                _ => {
                    let word = self.take_word();
                    tokens.push(Token { kind: TokenKind::Atom(word), line, column });
                }
            }
        }
        Ok(tokens)
    }

    fn take_word(&mut self) -> String {
        let mut word = String::new();
        while let Some(&c) = self.chars.peek() {
            if is_delimiter(c) {
                break;
            }
            word.push(c);
            self.bump();
        }
        word
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Position just past the last token, for end-of-input errors.
    end: (usize, usize),
    defined: std::collections::HashSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn error_at(&self, token: Option<&Token>, message: impl Into<String>) -> ParseError {
        let (line, column) = match token {
            Some(t) => (t.line, t.column),
            None => self.end,
        };
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn parse_node(&mut self) -> Result<Node, ParseError> {
        match self.next() {
            Some(Token { kind: TokenKind::LParen, .. }) => {}
            other => {
                return Err(self.error_at(other.as_ref(), "expected '('"));
            }
        }

        let variable = match self.next() {
            Some(Token { kind: TokenKind::Atom(name), line, column }) => {
                if !self.defined.insert(name.clone()) {
                    return Err(ParseError {
                        line,
                        column,
                        message: format!("variable '{name}' is defined more than once"),
                    });
                }
                name
            }
            other => {
                return Err(self.error_at(other.as_ref(), "expected a variable after '('"));
            }
        };

        match self.next() {
            Some(Token { kind: TokenKind::Slash, .. }) => {}
            other => {
                return Err(self.error_at(
                    other.as_ref(),
                    format!("expected '/' and a concept for variable '{variable}'"),
                ));
            }
        }

        // Concepts are normally plain atoms, but a quoted string is accepted
        // so that graphs whose concepts came from quoted constants (see
        // attribute reification) stay printable and reparseable.
        let label = match self.next() {
            Some(Token { kind: TokenKind::Atom(name), .. }) if !name.is_empty() => name,
            Some(Token { kind: TokenKind::Str(lexeme), .. }) => lexeme,
            other => {
                return Err(self.error_at(
                    other.as_ref(),
                    format!("expected a concept after '/' for variable '{variable}'"),
                ));
            }
        };

        let mut branches = Vec::new();
        loop {
            match self.peek() {
                Some(Token { kind: TokenKind::RParen, .. }) => {
                    self.next();
                    break;
                }
                Some(Token { kind: TokenKind::Role(_), .. }) => {
                    let token = self.next().unwrap();
                    let role = match &token.kind {
                        TokenKind::Role(role) => role.clone(),
                        _ => unreachable!(),
                    };
                    if role == ":" {
                        return Err(self.error_at(Some(&token), "empty role label"));
                    }
                    let target = self.parse_target(&role)?;
                    branches.push(Branch { role, target });
                }
                other => {
                    return Err(self.error_at(other, "expected a ':role' or ')'"));
                }
            }
        }

        Ok(Node {
            variable,
            label: Some(label),
            branches,
        })
    }

    fn parse_target(&mut self, role: &str) -> Result<Target, ParseError> {
        match self.peek() {
            Some(Token { kind: TokenKind::LParen, .. }) => Ok(Target::Node(self.parse_node()?)),
            Some(Token { kind: TokenKind::Atom(_), .. }) => {
                let token = self.next().unwrap();
                match token.kind {
                    // Stored as a constant for now; the resolution pass turns
                    // it into a reference if the token is a defined variable.
                    TokenKind::Atom(word) => Ok(Target::Constant(word)),
                    _ => unreachable!(),
                }
            }
            Some(Token { kind: TokenKind::Str(_), .. }) => {
                let token = self.next().unwrap();
                match token.kind {
                    TokenKind::Str(lexeme) => Ok(Target::Constant(lexeme)),
                    _ => unreachable!(),
                }
            }
            other => Err(self.error_at(other, format!("missing target for role '{role}'"))),
        }
    }
}

/// Parse one PENMAN expression.
///
/// Rejects text before or after the outermost parentheses, duplicate variable
/// definitions, empty roles, and missing concepts. Whether the result denotes
/// a well-formed graph (acyclic, etc.) is checked by
/// [`super::graph::tree_to_graph`], not here.
pub fn parse(text: &str) -> Result<Tree, ParseError> {
    let lexer = Lexer::new(text);
    let end = {
        // Recompute the end position for EOF errors.
        let mut line = 1;
        let mut column = 1;
        for c in text.chars() {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    };
    let tokens = lexer.tokenize()?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
        defined: std::collections::HashSet::new(),
    };

    let mut root = parser.parse_node()?;
    if let Some(extra) = parser.peek() {
        return Err(parser.error_at(Some(extra), "unexpected text after the expression"));
    }

    resolve_references(&mut root, &parser.defined);
    Ok(Tree::new(root))
}

fn resolve_references(node: &mut Node, defined: &std::collections::HashSet<String>) {
    for branch in &mut node.branches {
        match &mut branch.target {
            Target::Node(child) => resolve_references(child, defined),
            Target::Constant(word) => {
                if defined.contains(word.as_str()) {
                    branch.target = Target::Reference(word.clone());
                }
            }
            Target::Reference(_) => {}
        }
    }
}
