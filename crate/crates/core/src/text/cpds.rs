use std::fmt::Write;

use super::stack::parse_stack_at;
use super::{lines, missing, ParseError};
use crate::cpds::{Configuration, Cpds, Rule};
use crate::stack::{StackOp, Symbol};

/// ```text
/// order 2
/// alphabet a b
/// controls p q
/// rule p a push2 q
/// alt p -> { p q }
/// ```
pub fn print_cpds(sys: &Cpds) -> String {
    let mut out = format!("order {}\nalphabet", sys.order());
    for a in sys.alphabet() {
        let _ = write!(out, " {a}");
    }
    out.push_str("\ncontrols");
    for q in sys.controls() {
        let _ = write!(out, " {q}");
    }
    out.push('\n');
    for r in sys.rules() {
        match r {
            Rule::Ordinary { from, symbol, op, to } => {
                let _ = writeln!(out, "rule {from} {symbol} {op} {to}");
            }
            Rule::Alternating { from, to } => {
                let names: Vec<&str> = to.iter().map(String::as_str).collect();
                let _ = writeln!(out, "alt {from} -> {{ {} }}", names.join(" "));
            }
        }
    }
    out
}

pub fn parse_cpds(text: &str) -> Result<Cpds, ParseError> {
    let ls = lines(text);
    let Some(first) = ls.first() else {
        return Err(missing(text, "`order N`"));
    };
    let mut c = first.cursor();
    c.expect("order")?;
    let (n, at) = c.number("an order")?;
    if n == 0 {
        return Err(at.invalid("order must be at least 1"));
    }
    c.finish()?;
    let mut sys = Cpds::new(n);
    let mut rules = Vec::new();
    for l in &ls[1..] {
        let mut c = l.cursor();
        let key = c.next("a keyword")?;
        match key.text {
            "alphabet" => {
                for t in c.rest() {
                    if !Symbol::is_valid_name(t.text) {
                        return Err(t.expected("a character name"));
                    }
                    sys.add_symbol(t.text);
                }
            }
            "controls" => {
                for t in c.rest() {
                    sys.add_control(t.text);
                }
            }
            "rule" => {
                let from = c.next("a control state")?.text.to_string();
                let symbol = Symbol::new(c.next("a character")?.text);
                let opt = c.next("an operation")?;
                let op: StackOp = opt.text.parse().map_err(|_| opt.expected("an operation"))?;
                let to = c.next("a control state")?.text.to_string();
                c.finish()?;
                rules.push((key, Rule::Ordinary { from, symbol, op, to }));
            }
            "alt" => {
                let from = c.next("a control state")?.text.to_string();
                c.expect("->")?;
                let to = c.braced()?.iter().map(|t| t.text.to_string()).collect();
                c.finish()?;
                rules.push((key, Rule::Alternating { from, to }));
            }
            _ => return Err(key.expected("`alphabet`, `controls`, `rule` or `alt`")),
        }
    }
    for (at, r) in rules {
        sys.add_rule(r).map_err(|e| at.invalid(e.to_string()))?;
    }
    Ok(sys)
}

pub fn print_configuration(c: &Configuration) -> String {
    format!("{c}\n")
}

/// A control state followed by a stack, e.g. `p [[a(1,0)]1]2`.
pub fn parse_configuration(text: &str) -> Result<Configuration, ParseError> {
    let ls = lines(text);
    let Some(first) = ls.first() else {
        return Err(missing(text, "a control state"));
    };
    let head = first.head();
    // the stack is everything after the control state
    let line_start: usize = text.lines().take(head.line - 1).map(|l| l.len() + 1).sum();
    let line_text = text.lines().nth(head.line - 1).unwrap_or("");
    let offset = line_text
        .char_indices()
        .nth(head.column - 1)
        .map_or(0, |(b, _)| b)
        + head.text.len();
    let rest = &text[line_start + offset..];
    let column = head.column + head.text.chars().count();
    let stack = parse_stack_at(rest, head.line, column)?;
    Ok(Configuration::new(head.text, stack))
}
