//! Order-n stack automata.
//!
//! States are partitioned by order. An order-`k` transition (`k >= 2`)
//! `q -q'-> Q` reads the topmost order-`(k-1)` stack from `q'` and the rest of
//! the order-`k` stack from every state of `Q`. An order-1 transition
//! `q -(a, P)-> Q` reads the character `a`, requires the destination of its
//! collapse link to be accepted from every state of the branch set `P`, and
//! the rest of the order-1 stack from `Q`.

mod membership;
mod run;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::stack::Symbol;

pub use membership::{extract_run, member, Membership, MembershipError, MembershipTable};
pub use run::{check_run, RunCertificate, RunError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

pub type StateSet = BTreeSet<StateId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateInfo {
    pub name: String,
    pub order: u32,
}

/// `from -read-> to` in the order-`order` relation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HigherTransition {
    pub order: u32,
    pub from: StateId,
    pub read: StateId,
    pub to: StateSet,
}

/// Non-empty branch set tagged with the order of its states.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub order: u32,
    pub states: StateSet,
}

/// `from -(symbol, branch)-> to`. A missing branch fires on any link.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharTransition {
    pub from: StateId,
    pub symbol: Symbol,
    pub branch: Option<Branch>,
    pub to: StateSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("state name {0:?} is not usable")]
    BadName(String),
    #[error("state {name} declared at orders {first} and {second}")]
    Redeclared { name: String, first: u32, second: u32 },
    #[error("unknown state {0}")]
    UnknownState(String),
}

/// First reason an automaton is not well-formed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("automaton order must be at least 1")]
    ZeroOrder,
    #[error("state {name} has order {order}, outside 1..={n}")]
    StateOrder { name: String, order: u32, n: u32 },
    #[error("accepting state {name} listed in F{listed} but belongs to Q{actual}")]
    FinalOrder { name: String, listed: u32, actual: u32 },
    #[error("order-{order} transition from {from}: {problem}")]
    Higher {
        order: u32,
        from: String,
        problem: String,
    },
    #[error("order-1 transition from {from} on {symbol}: {problem}")]
    Char {
        from: String,
        symbol: Symbol,
        problem: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StackAutomaton {
    order: u32,
    alphabet: BTreeSet<Symbol>,
    states: Vec<StateInfo>,
    names: HashMap<String, StateId>,
    /// `finals[k]` is F_k as written; entry 0 is unused.
    finals: Vec<StateSet>,
    higher: BTreeSet<HigherTransition>,
    chars: BTreeSet<CharTransition>,
}

impl StackAutomaton {
    pub fn new(order: u32) -> Self {
        StackAutomaton {
            order,
            finals: vec![StateSet::new(); order as usize + 1],
            ..Default::default()
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn add_symbol(&mut self, symbol: impl Into<Symbol>) {
        self.alphabet.insert(symbol.into());
    }

    /// Declares a state, or returns the existing id if it was declared at the
    /// same order before.
    pub fn add_state(&mut self, name: &str, order: u32) -> Result<StateId, AutomatonError> {
        if let Some(&id) = self.names.get(name) {
            let first = self.states[id.0 as usize].order;
            if first != order {
                return Err(AutomatonError::Redeclared {
                    name: name.to_string(),
                    first,
                    second: order,
                });
            }
            return Ok(id);
        }
        if !is_state_name(name) {
            return Err(AutomatonError::BadName(name.to_string()));
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(StateInfo {
            name: name.to_string(),
            order,
        });
        self.names.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.names.get(name).copied()
    }

    pub fn state_named(&self, name: &str) -> Result<StateId, AutomatonError> {
        self.state(name)
            .ok_or_else(|| AutomatonError::UnknownState(name.to_string()))
    }

    pub fn state_info(&self, id: StateId) -> &StateInfo {
        &self.states[id.0 as usize]
    }

    pub fn name(&self, id: StateId) -> &str {
        &self.states[id.0 as usize].name
    }

    pub fn state_order(&self, id: StateId) -> u32 {
        self.states[id.0 as usize].order
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// All states in declaration order.
    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn states_of_order(&self, k: u32) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(move |&id| self.state_order(id) == k)
    }

    /// Lists `state` in F_k.
    pub fn add_final(&mut self, k: u32, state: StateId) {
        if self.finals.len() <= k as usize {
            self.finals.resize(k as usize + 1, StateSet::new());
        }
        self.finals[k as usize].insert(state);
    }

    pub fn finals(&self, k: u32) -> &StateSet {
        static EMPTY: StateSet = StateSet::new();
        self.finals.get(k as usize).unwrap_or(&EMPTY)
    }

    /// Adds `from -read-> to` to the relation of `from`'s order.
    pub fn add_higher(&mut self, from: StateId, read: StateId, to: impl IntoIterator<Item = StateId>) {
        let order = self.state_order(from);
        self.add_higher_at(order, from, read, to);
    }

    /// Adds a transition to Δ_order regardless of the states' orders.
    pub fn add_higher_at(
        &mut self,
        order: u32,
        from: StateId,
        read: StateId,
        to: impl IntoIterator<Item = StateId>,
    ) {
        self.higher.insert(HigherTransition {
            order,
            from,
            read,
            to: to.into_iter().collect(),
        });
    }

    /// Adds `from -(symbol, branch)-> to`. An empty branch set is stored
    /// untagged.
    pub fn add_char(
        &mut self,
        from: StateId,
        symbol: impl Into<Symbol>,
        branch: Option<(u32, StateSet)>,
        to: impl IntoIterator<Item = StateId>,
    ) {
        let branch = branch
            .filter(|(_, states)| !states.is_empty())
            .map(|(order, states)| Branch { order, states });
        self.chars.insert(CharTransition {
            from,
            symbol: symbol.into(),
            branch,
            to: to.into_iter().collect(),
        });
    }

    pub fn higher_transitions(&self) -> impl Iterator<Item = &HigherTransition> {
        self.higher.iter()
    }

    pub fn char_transitions(&self) -> impl Iterator<Item = &CharTransition> {
        self.chars.iter()
    }

    /// Order-1 transitions leaving `q`.
    pub fn char_transitions_from(&self, q: StateId) -> impl Iterator<Item = &CharTransition> {
        let low = CharTransition {
            from: q,
            symbol: Symbol::new(""),
            branch: None,
            to: StateSet::new(),
        };
        self.chars.range(low..).take_while(move |t| t.from == q)
    }

    /// Order-`k` transitions leaving `q`.
    pub fn higher_transitions_from(&self, k: u32, q: StateId) -> impl Iterator<Item = &HigherTransition> {
        let low = HigherTransition {
            order: k,
            from: q,
            read: StateId(0),
            to: StateSet::new(),
        };
        self.higher
            .range(low..)
            .take_while(move |t| t.order == k && t.from == q)
    }

    pub fn transition_count(&self) -> usize {
        self.higher.len() + self.chars.len()
    }

    pub fn set_names(&self, set: &StateSet) -> Vec<&str> {
        set.iter().map(|&q| self.name(q)).collect()
    }

    /// Checks disjointness, containments and branch-order constraints.
    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.order;
        if n == 0 {
            return Err(Violation::ZeroOrder);
        }
        for info in &self.states {
            if info.order == 0 || info.order > n {
                return Err(Violation::StateOrder {
                    name: info.name.clone(),
                    order: info.order,
                    n,
                });
            }
        }
        for (k, set) in self.finals.iter().enumerate() {
            for &q in set {
                if self.state_order(q) != k as u32 {
                    return Err(Violation::FinalOrder {
                        name: self.name(q).to_string(),
                        listed: k as u32,
                        actual: self.state_order(q),
                    });
                }
            }
        }
        for t in &self.higher {
            let problem = if t.order < 2 || t.order > n {
                Some(format!("no order-{} relation in an order-{n} automaton", t.order))
            } else if self.state_order(t.from) != t.order {
                Some(format!("source is not in Q{}", t.order))
            } else if self.state_order(t.read) != t.order - 1 {
                Some(format!("{} is not in Q{}", self.name(t.read), t.order - 1))
            } else {
                t.to.iter()
                    .find(|&&q| self.state_order(q) != t.order)
                    .map(|&q| format!("target {} is not in Q{}", self.name(q), t.order))
            };
            if let Some(problem) = problem {
                return Err(Violation::Higher {
                    order: t.order,
                    from: self.name(t.from).to_string(),
                    problem,
                });
            }
        }
        for t in &self.chars {
            let problem = if self.state_order(t.from) != 1 {
                Some("source is not in Q1".to_string())
            } else if !self.alphabet.contains(&t.symbol) {
                Some("symbol is not in the alphabet".to_string())
            } else if let Some(q) = t.to.iter().find(|&&q| self.state_order(q) != 1) {
                Some(format!("target {} is not in Q1", self.name(*q)))
            } else if let Some(b) = &t.branch {
                if b.order < 2 || b.order > n {
                    Some(format!("branch order {} outside 2..={n}", b.order))
                } else {
                    b.states
                        .iter()
                        .find(|&&q| self.state_order(q) != b.order)
                        .map(|&q| {
                            format!(
                                "branch set mixes orders: {} is in Q{}, branch is tagged {}",
                                self.name(q),
                                self.state_order(q),
                                b.order
                            )
                        })
                }
            } else {
                None
            };
            if let Some(problem) = problem {
                return Err(Violation::Char {
                    from: self.name(t.from).to_string(),
                    symbol: t.symbol.clone(),
                    problem,
                });
            }
        }
        Ok(())
    }
}

pub fn is_state_name(name: &str) -> bool {
    !name.is_empty()
        && name != "->"
        && name != "/"
        && name.chars().all(|c| !c.is_whitespace() && c != '{' && c != '}' && c != '#')
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
