use std::str::FromStr;

use super::ParseError;
use crate::stack::{Link, Stack, Symbol};

struct Scanner {
    chars: Vec<char>,
    at: usize,
    line: usize,
    column: usize,
}

impl Scanner {
    fn new(src: &str, line: usize, column: usize) -> Self {
        Scanner {
            chars: src.chars().collect(),
            at: 0,
            line,
            column,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_space(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            expected: expected.to_string(),
            found,
        }
    }

    fn invalid(&self, line: usize, column: usize, message: String) -> ParseError {
        ParseError::Invalid { line, column, message }
    }

    fn eat(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        let start = self.at;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.at {
            return Err(self.error("a number"));
        }
        let digits: String = self.chars[start..self.at].iter().collect();
        digits.parse().map_err(|_| self.error("a smaller number"))
    }

    fn stack(&mut self) -> Result<Stack, ParseError> {
        self.skip_space();
        if self.peek() == Some('[') {
            let (line, column) = (self.line, self.column);
            self.bump();
            let mut items = Vec::new();
            loop {
                self.skip_space();
                if self.peek() == Some(']') {
                    break;
                }
                if self.peek().is_none() {
                    return Err(self.error("a character, `[` or `]`"));
                }
                items.push(self.stack()?);
            }
            self.bump();
            let order = self.number()?;
            if order == 0 {
                return Err(self.invalid(line, column, "stack order must be at least 1".into()));
            }
            if let Some(bad) = items.iter().find(|i| i.order() + 1 != order) {
                return Err(self.invalid(
                    line,
                    column,
                    format!(
                        "an order-{order} stack cannot hold an order-{} item",
                        bad.order()
                    ),
                ));
            }
            Ok(Stack::seq(order, items))
        } else {
            let start = self.at;
            while self.peek().is_some_and(|c| c != '(' && !c.is_whitespace() && !"[]".contains(c)) {
                self.bump();
            }
            let name: String = self.chars[start..self.at].iter().collect();
            if name.is_empty() || !Symbol::is_valid_name(&name) {
                return Err(self.error("a character name"));
            }
            self.eat('(')?;
            let order = self.number()?;
            self.eat(',')?;
            let index = self.number()?;
            self.eat(')')?;
            Ok(Stack::atom(Symbol::new(&name), Link::new(order, index)))
        }
    }
}

/// Parses one stack. Positions in errors are counted from `line`, `column`.
pub(crate) fn parse_stack_at(text: &str, line: usize, column: usize) -> Result<Stack, ParseError> {
    let mut s = Scanner::new(text, line, column);
    s.skip_space();
    if s.peek() != Some('[') {
        return Err(s.error("`[`"));
    }
    let w = s.stack()?;
    s.skip_space();
    if s.peek().is_some() {
        return Err(s.error("end of input"));
    }
    Ok(w)
}

/// Parses the bracketed stack syntax, e.g. `[[a(2,1)]1 [b(1,0)]1]2`.
pub fn parse_stack(text: &str) -> Result<Stack, ParseError> {
    parse_stack_at(text, 1, 1)
}

impl FromStr for Stack {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_stack(s)
    }
}
