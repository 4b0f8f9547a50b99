use std::fmt::Write;

use super::{lines, missing, Cursor, Line, ParseError, Token};
use crate::automata::{StackAutomaton, StateId, StateSet};
use crate::stack::Symbol;

/// Canonical text of `a`: header, alphabet, states and accepting states from
/// order n down to 1, then transitions from order n down to 1, sorted.
pub fn print_automaton(a: &StackAutomaton) -> String {
    let n = a.order();
    let mut out = String::new();
    let _ = writeln!(out, "order {n}");
    let alphabet: Vec<&str> = a.alphabet().iter().map(Symbol::as_str).collect();
    line(&mut out, "alphabet", &alphabet);
    for k in (1..=n).rev() {
        let names: Vec<&str> = a.states_of_order(k).map(|q| a.name(q)).collect();
        line(&mut out, &format!("states{k}"), &names);
    }
    for k in (1..=n).rev() {
        line(&mut out, &format!("final{k}"), &sorted(a, a.finals(k)));
    }
    for k in (2..=n).rev() {
        let mut rows: Vec<String> = a
            .higher_transitions()
            .filter(|t| t.order == k)
            .map(|t| {
                format!(
                    "t{k} {} / {} -> {}",
                    a.name(t.from),
                    a.name(t.read),
                    braces(&sorted(a, &t.to))
                )
            })
            .collect();
        rows.sort();
        for r in rows {
            let _ = writeln!(out, "{r}");
        }
    }
    let mut rows: Vec<String> = a
        .char_transitions()
        .map(|t| {
            let branch = match &t.branch {
                Some(b) => format!("{} {}", b.order, braces(&sorted(a, &b.states))),
                None => "{ }".to_string(),
            };
            format!(
                "t1 {} {} / {branch} -> {}",
                a.name(t.from),
                t.symbol,
                braces(&sorted(a, &t.to))
            )
        })
        .collect();
    rows.sort();
    for r in rows {
        let _ = writeln!(out, "{r}");
    }
    out
}

fn line(out: &mut String, key: &str, items: &[&str]) {
    out.push_str(key);
    for i in items {
        out.push(' ');
        out.push_str(i);
    }
    out.push('\n');
}

fn sorted<'a>(a: &'a StackAutomaton, set: &StateSet) -> Vec<&'a str> {
    let mut names = a.set_names(set);
    names.sort();
    names
}

fn braces(names: &[&str]) -> String {
    if names.is_empty() {
        "{ }".to_string()
    } else {
        format!("{{ {} }}", names.join(" "))
    }
}

fn state(a: &StackAutomaton, t: Token<'_>) -> Result<StateId, ParseError> {
    a.state(t.text)
        .ok_or_else(|| t.invalid(format!("state {} is not declared", t.text)))
}

fn state_set(a: &StackAutomaton, c: &mut Cursor<'_, '_>) -> Result<StateSet, ParseError> {
    c.braced()?.into_iter().map(|t| state(a, t)).collect()
}

fn order_suffix(t: Token<'_>, key: &str, n: u32) -> Result<u32, ParseError> {
    let k: u32 = t.text[key.len()..]
        .parse()
        .map_err(|_| t.expected(&format!("`{key}K`")))?;
    if k == 0 || k > n {
        return Err(t.invalid(format!("order {k} is outside 1..={n}")));
    }
    Ok(k)
}

/// Parses the automaton format; the result passes validation.
pub fn parse_automaton(text: &str) -> Result<StackAutomaton, ParseError> {
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
    let mut a = StackAutomaton::new(n);
    for l in &ls[1..] {
        parse_line(&mut a, l, n)?;
    }
    if let Err(v) = a.validate() {
        let last = ls.last().unwrap();
        return Err(last.head().invalid(format!("automaton is not well-formed: {v}")));
    }
    Ok(a)
}

fn parse_line(a: &mut StackAutomaton, l: &Line<'_>, n: u32) -> Result<(), ParseError> {
    let mut c = l.cursor();
    let key = c.next("a keyword")?;
    match key.text {
        "alphabet" => {
            for t in c.rest() {
                if !Symbol::is_valid_name(t.text) {
                    return Err(t.expected("a character name"));
                }
                a.add_symbol(t.text);
            }
        }
        k if k.starts_with("states") => {
            let order = order_suffix(key, "states", n)?;
            for t in c.rest() {
                a.add_state(t.text, order).map_err(|e| t.invalid(e.to_string()))?;
            }
        }
        k if k.starts_with("final") => {
            let order = order_suffix(key, "final", n)?;
            for t in c.rest() {
                let q = state(a, t)?;
                a.add_final(order, q);
            }
        }
        "t1" => {
            let from = state(a, c.next("a state")?)?;
            let sym = c.next("a character")?;
            if !a.alphabet().iter().any(|s| s.as_str() == sym.text) {
                return Err(sym.invalid(format!("character {} is not in the alphabet", sym.text)));
            }
            c.expect("/")?;
            let tag = match c.peek() {
                Some(t) if t.text != "{" => Some(c.number("a branch order")?),
                _ => None,
            };
            let branch = state_set(a, &mut c)?;
            if !branch.is_empty() && tag.is_none() {
                return Err(key.invalid("a non-empty branch set needs its order"));
            }
            c.expect("->")?;
            let to = state_set(a, &mut c)?;
            c.finish()?;
            a.add_char(from, sym.text, tag.map(|(o, _)| (o, branch)), to);
        }
        k if k.starts_with('t') => {
            let order = order_suffix(key, "t", n)?;
            if order < 2 {
                return Err(key.expected("`t1` with a character"));
            }
            let from = state(a, c.next("a state")?)?;
            c.expect("/")?;
            let read = state(a, c.next("a state")?)?;
            c.expect("->")?;
            let to = state_set(a, &mut c)?;
            c.finish()?;
            a.add_higher_at(order, from, read, to);
        }
        _ => {
            return Err(key.expected(
                "`alphabet`, `statesK`, `finalK` or a transition `tK`",
            ))
        }
    }
    Ok(())
}
