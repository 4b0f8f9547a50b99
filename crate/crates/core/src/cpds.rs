//! Alternating collapsible pushdown systems.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::stack::{Stack, StackOp, Symbol};

pub type Control = String;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// In `from` with `symbol` on top, apply `op` and move to `to`.
    Ordinary {
        from: Control,
        symbol: Symbol,
        op: StackOp,
        to: Control,
    },
    /// From `from`, continue in every state of `to` on the same stack.
    Alternating { from: Control, to: BTreeSet<Control> },
}

impl Rule {
    pub fn from(&self) -> &Control {
        match self {
            Rule::Ordinary { from, .. } | Rule::Alternating { from, .. } => from,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub control: Control,
    pub stack: Stack,
}

impl Configuration {
    pub fn new(control: impl Into<Control>, stack: Stack) -> Self {
        Configuration {
            control: control.into(),
            stack,
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.control, self.stack)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpdsError {
    #[error("unknown control state {0}")]
    UnknownControl(String),
    #[error("character {0} is not in the alphabet")]
    UnknownSymbol(String),
    #[error("operation {op} exceeds the system order {order}")]
    OperationOrder { op: String, order: u32 },
    #[error("configuration stack is not a well-formed order-{0} stack")]
    BadConfiguration(u32),
    #[error("more than {0} configurations visited")]
    ResourceBound(usize),
}

/// One step from a configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Successor {
    Single(Configuration),
    All(BTreeSet<Configuration>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cpds {
    order: u32,
    controls: BTreeSet<Control>,
    alphabet: BTreeSet<Symbol>,
    rules: BTreeSet<Rule>,
}

impl Cpds {
    pub fn new(order: u32) -> Self {
        Cpds {
            order,
            ..Default::default()
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn controls(&self) -> &BTreeSet<Control> {
        &self.controls
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn rules(&self) -> &BTreeSet<Rule> {
        &self.rules
    }

    pub fn add_control(&mut self, q: impl Into<Control>) {
        self.controls.insert(q.into());
    }

    pub fn add_symbol(&mut self, a: impl Into<Symbol>) {
        self.alphabet.insert(a.into());
    }

    /// Adds a rule after checking its endpoints, characters and operation
    /// order. Duplicates collapse into one rule.
    pub fn add_rule(&mut self, rule: Rule) -> Result<(), CpdsError> {
        let control = |q: &Control| {
            if self.controls.contains(q) {
                Ok(())
            } else {
                Err(CpdsError::UnknownControl(q.clone()))
            }
        };
        let symbol = |a: &Symbol| {
            if self.alphabet.contains(a) {
                Ok(())
            } else {
                Err(CpdsError::UnknownSymbol(a.to_string()))
            }
        };
        control(rule.from())?;
        match &rule {
            Rule::Ordinary { symbol: a, op, to, .. } => {
                symbol(a)?;
                control(to)?;
                if op.order() > self.order {
                    return Err(CpdsError::OperationOrder {
                        op: op.to_string(),
                        order: self.order,
                    });
                }
                if let StackOp::CPush(b, _) | StackOp::Rew(b) = op {
                    symbol(b)?;
                }
            }
            Rule::Alternating { to, .. } => to.iter().try_for_each(control)?,
        }
        self.rules.insert(rule);
        Ok(())
    }

    /// Checks that `c` is a configuration of this system.
    pub fn check_configuration(&self, c: &Configuration) -> Result<(), CpdsError> {
        if !self.controls.contains(&c.control) {
            return Err(CpdsError::UnknownControl(c.control.clone()));
        }
        if c.stack.order() != self.order || !c.stack.validate(self.order) {
            return Err(CpdsError::BadConfiguration(self.order));
        }
        Ok(())
    }
}

/// Every one-step successor of `c`, ordered. Rules whose character does not
/// match or whose operation is undefined contribute nothing.
pub fn successors(c: &Configuration, sys: &Cpds) -> Vec<Successor> {
    let top = c.stack.top_atom().ok().map(|a| &a.symbol);
    let mut out = BTreeSet::new();
    for rule in sys.rules.iter().filter(|r| *r.from() == c.control) {
        match rule {
            Rule::Ordinary { symbol, op, to, .. } => {
                if top != Some(symbol) {
                    continue;
                }
                if let Ok(stack) = c.stack.apply(op) {
                    out.insert(Successor::Single(Configuration::new(to.clone(), stack)));
                }
            }
            Rule::Alternating { to, .. } => {
                let set = to
                    .iter()
                    .map(|q| Configuration::new(q.clone(), c.stack.clone()))
                    .collect();
                out.insert(Successor::All(set));
            }
        }
    }
    out.into_iter().collect()
}

/// Configurations reachable in at most `depth` steps, counting every member
/// of an alternating step as reached. Fails once more than `cap`
/// configurations have been seen.
pub fn bounded_reach(
    start: &Configuration,
    sys: &Cpds,
    depth: usize,
    cap: usize,
) -> Result<BTreeSet<Configuration>, CpdsError> {
    let mut seen: HashSet<Configuration> = HashSet::from([start.clone()]);
    let mut frontier = vec![start.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for c in &frontier {
            for s in successors(c, sys) {
                let members = match s {
                    Successor::Single(c) => vec![c],
                    Successor::All(set) => set.into_iter().collect(),
                };
                for m in members {
                    if !seen.contains(&m) {
                        seen.insert(m.clone());
                        next.push(m);
                    }
                }
            }
            if seen.len() > cap {
                return Err(CpdsError::ResourceBound(cap));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stack::Link;

    fn chars(n: u32, cs: &[&str]) -> Stack {
        let inner = Stack::seq(1, cs.iter().map(|c| Stack::atom(*c, Link::NULL)).collect());
        let mut s = inner;
        for k in 2..=n {
            s = Stack::seq(k, vec![s]);
        }
        s
    }

    fn system() -> Cpds {
        let mut sys = Cpds::new(2);
        for q in ["q", "q1", "q2", "r"] {
            sys.add_control(q);
        }
        for a in ["a", "b", "f"] {
            sys.add_symbol(a);
        }
        sys
    }

    fn ordinary(from: &str, a: &str, op: &str, to: &str) -> Rule {
        Rule::Ordinary {
            from: from.into(),
            symbol: a.into(),
            op: op.parse().unwrap(),
            to: to.into(),
        }
    }

    #[test]
    fn pop_rule_steps() {
        let mut sys = system();
        sys.add_rule(ordinary("q", "a", "pop1", "r")).unwrap();
        let c = Configuration::new("q", chars(2, &["a", "b"]));
        assert_eq!(
            successors(&c, &sys),
            vec![Successor::Single(Configuration::new("r", chars(2, &["b"])))]
        );
    }

    #[test]
    fn alternating_rule_shares_stack() {
        let mut sys = system();
        sys.add_rule(Rule::Alternating {
            from: "q".into(),
            to: ["q1".to_string(), "q2".to_string()].into(),
        })
        .unwrap();
        let w = chars(2, &["a"]);
        let c = Configuration::new("q", w.clone());
        let expected: BTreeSet<_> = [Configuration::new("q1", w.clone()), Configuration::new("q2", w)].into();
        assert_eq!(successors(&c, &sys), vec![Successor::All(expected)]);
    }

    #[test]
    fn collapse_order_mismatch_is_skipped() {
        let mut sys = Cpds::new(3);
        sys.add_control("q");
        sys.add_symbol("a");
        sys.add_rule(ordinary("q", "a", "collapse2", "q")).unwrap();
        let w = Stack::seq(
            3,
            vec![
                Stack::seq(2, vec![Stack::seq(1, vec![Stack::atom("a", Link::new(3, 1))])]),
                Stack::seq(2, vec![]),
            ],
        );
        assert!(w.validate(3));
        assert!(successors(&Configuration::new("q", w), &sys).is_empty());
    }

    #[test]
    fn reach_depths() {
        let mut sys = system();
        sys.add_rule(ordinary("q", "a", "pop1", "q")).unwrap();
        let c = Configuration::new("q", chars(2, &["a", "a", "a"]));
        assert_eq!(bounded_reach(&c, &sys, 0, 100).unwrap(), [c.clone()].into());
        assert_eq!(bounded_reach(&c, &sys, 2, 100).unwrap().len(), 3);
        assert_eq!(bounded_reach(&c, &sys, 10, 100).unwrap().len(), 4);
        assert_eq!(bounded_reach(&c, &sys, 10, 2), Err(CpdsError::ResourceBound(2)));
    }

    #[test]
    fn cpush_then_collapse_returns_to_pop() {
        let mut sys = system();
        sys.add_rule(ordinary("q", "a", "push2", "q1")).unwrap();
        sys.add_rule(ordinary("q1", "a", "cpush2:f", "q2")).unwrap();
        sys.add_rule(ordinary("q2", "f", "collapse2", "r")).unwrap();
        let w = chars(2, &["a"]);
        let reach = bounded_reach(&Configuration::new("q", w.clone()), &sys, 3, 100).unwrap();
        assert!(reach.contains(&Configuration::new("r", w)));
        assert!(reach.iter().all(|c| c.stack.validate(2)));
    }

    #[test]
    fn rejects_bad_rules() {
        let mut sys = system();
        assert!(matches!(
            sys.add_rule(ordinary("x", "a", "pop1", "q")),
            Err(CpdsError::UnknownControl(_))
        ));
        assert!(matches!(
            sys.add_rule(ordinary("q", "z", "pop1", "q")),
            Err(CpdsError::UnknownSymbol(_))
        ));
        assert!(matches!(
            sys.add_rule(ordinary("q", "a", "pop3", "q")),
            Err(CpdsError::OperationOrder { .. })
        ));
        sys.add_rule(ordinary("q", "a", "pop1", "q")).unwrap();
        sys.add_rule(ordinary("q", "a", "pop1", "q")).unwrap();
        assert_eq!(sys.rules().len(), 1);
    }
}
