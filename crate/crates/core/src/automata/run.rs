//! Run certificates and the checker for the formal run conditions.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{StackAutomaton, StateId, StateSet};
use crate::layout::{StackLayout, SubstackPosition, Token};
use crate::stack::{Malformed, Stack};

/// At most one state set per (substack position, order).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunCertificate {
    sets: BTreeMap<(SubstackPosition, u32), StateSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("malformed certificate: no order-{order} set at position {}", pos.0)]
    Missing { pos: SubstackPosition, order: u32 },
    #[error("malformed certificate: position {} is not a substack", pos.0)]
    NoSuchPosition { pos: SubstackPosition },
    #[error("malformed certificate: state {state} at position {} is not in Q{order}", pos.0)]
    ForeignState {
        pos: SubstackPosition,
        order: u32,
        state: String,
    },
    #[error("stack has order {stack}, automaton has order {automaton}")]
    OrderMismatch { stack: u32, automaton: u32 },
    #[error("stack is not well-formed: {0}")]
    MalformedStack(#[from] Malformed),
}

impl RunCertificate {
    pub fn new() -> Self {
        Self::default()
    }

    /// Associates `set` with the pair, replacing any previous set.
    pub fn insert(&mut self, pos: SubstackPosition, order: u32, set: StateSet) {
        self.sets.insert((pos, order), set);
    }

    pub fn get(&self, pos: SubstackPosition, order: u32) -> Option<&StateSet> {
        self.sets.get(&(pos, order))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubstackPosition, u32, &StateSet)> {
        self.sets.iter().map(|(&(p, k), s)| (p, k, s))
    }

    /// Every pair the run conditions mention, mapped to the empty set.
    pub fn empty_for(w: &Stack) -> Self {
        let layout = StackLayout::new(w);
        let mut run = RunCertificate::new();
        for p in 0..layout.len() {
            for k in layout.level(p)..=layout.order() {
                run.insert(SubstackPosition(p), k, StateSet::new());
            }
        }
        run
    }
}

/// Checks that `run` is an accepting run of `a` over `w` whose order-n set at
/// the whole stack contains `initial`.
pub fn check_run(
    w: &Stack,
    a: &StackAutomaton,
    run: &RunCertificate,
    initial: &StateSet,
) -> Result<bool, RunError> {
    let n = a.order();
    if w.order() != n {
        return Err(RunError::OrderMismatch {
            stack: w.order(),
            automaton: n,
        });
    }
    w.check_well_formed(n)?;
    let layout = StackLayout::new(w);
    for (pos, order, set) in run.iter() {
        if pos.0 >= layout.len() {
            return Err(RunError::NoSuchPosition { pos });
        }
        if let Some(&q) = set.iter().find(|&&q| a.state_order(q) != order) {
            return Err(RunError::ForeignState {
                pos,
                order,
                state: a.name(q).to_string(),
            });
        }
    }
    let at = |p: usize, k: u32| {
        run.get(SubstackPosition(p), k).ok_or(RunError::Missing {
            pos: SubstackPosition(p),
            order: k,
        })
    };

    if !initial.is_subset(at(0, n)?) {
        return Ok(false);
    }

    for p in 0..layout.len() {
        match layout.token(p) {
            // the empty order-n stack, and every []_k :_(k+1) v
            Token::Close(k) => {
                if !at(p, k)?.is_subset(a.finals(k)) {
                    return Ok(false);
                }
            }
            Token::Atom(atom) => {
                let here = at(p, 1)?;
                let next = at(p + 1, 1)?;
                let dest = match layout.link_destination(p) {
                    Some(d) if atom.link.order >= 2 => Some(at(d, atom.link.order)?),
                    _ => None,
                };
                let fires = |q: StateId| {
                    a.char_transitions_from(q).any(|t| {
                        t.symbol == atom.symbol
                            && t.to.is_subset(next)
                            && match &t.branch {
                                None => true,
                                Some(b) => {
                                    b.order == atom.link.order
                                        && dest.is_some_and(|d| b.states.is_subset(d))
                                }
                            }
                    })
                };
                if !here.iter().all(|&q| fires(q)) {
                    return Ok(false);
                }
            }
        }
        for k in (layout.level(p) + 1).max(2)..=n {
            if !layout.decomposes_at(p, k) {
                continue;
            }
            let here = at(p, k)?;
            let below = at(p, k - 1)?;
            let rest = at(layout.next_at(p, k), k)?;
            let fires = |q: StateId| {
                a.higher_transitions_from(k, q)
                    .any(|t| below.contains(&t.read) && t.to.is_subset(rest))
            };
            if !here.iter().all(|&q| fires(q)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::extract_run;
    use crate::stack::Link;

    fn two_state() -> StackAutomaton {
        let mut a = StackAutomaton::new(2);
        a.add_symbol("a");
        let p = a.add_state("p", 2).unwrap();
        let pf = a.add_state("pf", 2).unwrap();
        let q = a.add_state("q", 1).unwrap();
        let f1 = a.add_state("f1", 1).unwrap();
        a.add_final(2, pf);
        a.add_final(1, f1);
        a.add_char(q, "a", None, []);
        a.add_higher(p, q, [pf]);
        a
    }

    fn single_a() -> Stack {
        Stack::seq(2, vec![Stack::seq(1, vec![Stack::atom("a", Link::NULL)])])
    }

    #[test]
    fn all_empty_certificate_accepts_with_empty_initial() {
        let a = two_state();
        let w = single_a();
        let run = RunCertificate::empty_for(&w);
        assert_eq!(check_run(&w, &a, &run, &StateSet::new()), Ok(true));
    }

    #[test]
    fn final_set_on_empty_stack() {
        let a = two_state();
        let w = Stack::empty(2);
        let pf = a.state("pf").unwrap();
        let mut run = RunCertificate::new();
        run.insert(SubstackPosition(0), 2, [pf].into());
        assert_eq!(check_run(&w, &a, &run, &[pf].into()), Ok(true));
        let p = a.state("p").unwrap();
        run.insert(SubstackPosition(0), 2, [p].into());
        assert_eq!(check_run(&w, &a, &run, &[p].into()), Ok(false));
    }

    #[test]
    fn extracted_run_checks() {
        let a = two_state();
        let w = single_a();
        let p: StateSet = [a.state("p").unwrap()].into();
        let run = extract_run(&w, &a, &p).unwrap();
        assert_eq!(run.get(SubstackPosition(0), 2), Some(&p));
        assert_eq!(check_run(&w, &a, &run, &p), Ok(true));
    }

    #[test]
    fn unjustified_state_fails() {
        let a = two_state();
        let w = Stack::seq(2, vec![Stack::seq(1, vec![Stack::atom("a", Link::NULL)]), Stack::empty(1)]);
        let p: StateSet = [a.state("p").unwrap()].into();
        // p needs pf to accept the second component, which is not empty
        let mut run = RunCertificate::empty_for(&w);
        run.insert(SubstackPosition(0), 2, p.clone());
        run.insert(SubstackPosition(0), 1, [a.state("q").unwrap()].into());
        run.insert(SubstackPosition(2), 2, [a.state("pf").unwrap()].into());
        assert_eq!(check_run(&w, &a, &run, &p), Ok(false));
    }

    #[test]
    fn missing_pair_is_malformed() {
        let a = two_state();
        let w = single_a();
        let mut run = RunCertificate::new();
        run.insert(SubstackPosition(0), 2, StateSet::new());
        assert!(matches!(
            check_run(&w, &a, &run, &StateSet::new()),
            Err(RunError::Missing { .. })
        ));
        let mut run = RunCertificate::empty_for(&w);
        run.insert(SubstackPosition(9), 1, StateSet::new());
        assert!(matches!(
            check_run(&w, &a, &run, &StateSet::new()),
            Err(RunError::NoSuchPosition { .. })
        ));
        let mut run = RunCertificate::empty_for(&w);
        run.insert(SubstackPosition(0), 1, [a.state("p").unwrap()].into());
        assert!(matches!(
            check_run(&w, &a, &run, &StateSet::new()),
            Err(RunError::ForeignState { .. })
        ));
    }
}
