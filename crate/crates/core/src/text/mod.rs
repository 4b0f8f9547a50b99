//! Text formats for stacks, automata, run certificates, tiling problems and
//! solutions, and pushdown systems.
//!
//! The line-oriented formats share one lexical structure: `#` starts a comment
//! that runs to the end of the line, tokens are separated by whitespace, and
//! `{` and `}` are always tokens of their own.

mod automaton;
mod cpds;
mod run;
mod stack;
mod tiling;

use thiserror::Error;

pub use automaton::{parse_automaton, print_automaton};
pub use cpds::{parse_configuration, parse_cpds, print_configuration, print_cpds};
pub use run::{parse_run, print_run};
pub use stack::parse_stack;
pub use tiling::{parse_solution, parse_tiling, print_solution, print_tiling};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}, column {column}: {message}")]
    Invalid {
        line: usize,
        column: usize,
        message: String,
    },
}

impl ParseError {
    pub fn location(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. } | ParseError::Invalid { line, column, .. } => {
                (*line, *column)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

impl<'a> Token<'a> {
    pub fn expected(&self, what: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            expected: what.to_string(),
            found: format!("`{}`", self.text),
        }
    }

    pub fn invalid(&self, message: impl Into<String>) -> ParseError {
        ParseError::Invalid {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

/// Tokens of one non-blank line, with a position just past its end.
pub(crate) struct Line<'a> {
    pub tokens: Vec<Token<'a>>,
    pub line: usize,
    pub end: usize,
}

impl<'a> Line<'a> {
    pub fn head(&self) -> Token<'a> {
        self.tokens[0]
    }

    pub fn cursor(&self) -> Cursor<'a, '_> {
        Cursor { line: self, at: 0 }
    }
}

pub(crate) struct Cursor<'a, 'l> {
    line: &'l Line<'a>,
    at: usize,
}

impl<'a> Cursor<'a, '_> {
    fn end_of_line(&self, what: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line.line,
            column: self.line.end,
            expected: what.to_string(),
            found: "end of line".to_string(),
        }
    }

    pub fn peek(&self) -> Option<Token<'a>> {
        self.line.tokens.get(self.at).copied()
    }

    pub fn next(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        let t = self.peek().ok_or_else(|| self.end_of_line(what))?;
        self.at += 1;
        Ok(t)
    }

    pub fn expect(&mut self, text: &str) -> Result<Token<'a>, ParseError> {
        let what = format!("`{text}`");
        let t = self.next(&what)?;
        if t.text == text {
            Ok(t)
        } else {
            Err(t.expected(&what))
        }
    }

    pub fn number(&mut self, what: &str) -> Result<(u32, Token<'a>), ParseError> {
        let t = self.next(what)?;
        t.text.parse().map(|v| (v, t)).map_err(|_| t.expected(what))
    }

    pub fn rest(&mut self) -> Vec<Token<'a>> {
        let out = self.line.tokens[self.at..].to_vec();
        self.at = self.line.tokens.len();
        out
    }

    /// `{ x y ... }`
    pub fn braced(&mut self) -> Result<Vec<Token<'a>>, ParseError> {
        self.expect("{")?;
        let mut out = Vec::new();
        loop {
            let t = self.next("a name or `}`")?;
            match t.text {
                "}" => return Ok(out),
                "{" => return Err(t.expected("a name or `}`")),
                _ => out.push(t),
            }
        }
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) => Err(t.expected("end of line")),
            None => Ok(()),
        }
    }
}

pub(crate) fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.find('#').map_or(raw, |cut| &raw[..cut]);
        let mut tokens = Vec::new();
        let mut start: Option<(usize, usize)> = None;
        for (column, (b, c)) in content.char_indices().enumerate() {
            let column = column + 1;
            let separate = c == '{' || c == '}';
            if c.is_whitespace() || separate {
                if let Some((s, col)) = start.take() {
                    tokens.push(Token { text: &content[s..b], line: idx + 1, column: col });
                }
                if separate {
                    tokens.push(Token { text: &content[b..b + 1], line: idx + 1, column });
                }
            } else if start.is_none() {
                start = Some((b, column));
            }
        }
        if let Some((s, col)) = start {
            tokens.push(Token { text: &content[s..], line: idx + 1, column: col });
        }
        if !tokens.is_empty() {
            out.push(Line {
                tokens,
                line: idx + 1,
                end: raw.chars().count() + 1,
            });
        }
    }
    out
}

/// Error for a file that ended before `what`.
pub(crate) fn missing(text: &str, what: &str) -> ParseError {
    ParseError::Syntax {
        line: text.lines().count().max(1),
        column: text.lines().last().map_or(1, |l| l.chars().count() + 1),
        expected: what.to_string(),
        found: "end of input".to_string(),
    }
}
