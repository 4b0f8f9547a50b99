use std::fmt::Write;

use super::{lines, ParseError};
use crate::automata::{RunCertificate, StackAutomaton, StateSet};
use crate::layout::SubstackPosition;

/// One line `pos P order K { q ... }` per entry, by position then order.
pub fn print_run(a: &StackAutomaton, run: &RunCertificate) -> String {
    let mut out = String::new();
    for (p, k, set) in run.iter() {
        let mut names = a.set_names(set);
        names.sort();
        let body = if names.is_empty() {
            "{ }".to_string()
        } else {
            format!("{{ {} }}", names.join(" "))
        };
        let _ = writeln!(out, "pos {} order {k} {body}", p.0);
    }
    out
}

/// Parses a certificate, resolving state names against `a`.
pub fn parse_run(text: &str, a: &StackAutomaton) -> Result<RunCertificate, ParseError> {
    let mut run = RunCertificate::new();
    for l in lines(text) {
        let mut c = l.cursor();
        c.expect("pos")?;
        let (p, _) = c.number("a position")?;
        c.expect("order")?;
        let (k, kt) = c.number("an order")?;
        if k == 0 || k > a.order() {
            return Err(kt.invalid(format!("order {k} is outside 1..={}", a.order())));
        }
        let mut set = StateSet::new();
        for t in c.braced()? {
            let q = a
                .state(t.text)
                .ok_or_else(|| t.invalid(format!("state {} is not declared", t.text)))?;
            set.insert(q);
        }
        c.finish()?;
        let pos = SubstackPosition(p as usize);
        if run.get(pos, k).is_some() {
            return Err(l.head().invalid(format!("position {p} order {k} given twice")));
        }
        run.insert(pos, k, set);
    }
    Ok(run)
}
