//! Linear-time membership.
//!
//! One pass from the bottom of the stack to the top associates with every
//! (substack, order) pair the largest set of states accepting the suffix at
//! that pair. Every lookup made while filling an entry (the next character,
//! the rest of the enclosing stack, the destination of a collapse link) refers
//! to a strictly lower substack, which has already been filled in.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::{Block, FixedBitSet};
use thiserror::Error;

use super::{RunCertificate, StackAutomaton, StateId, StateSet, Violation};
use crate::layout::{StackLayout, SubstackPosition, Token};
use crate::stack::{Malformed, Stack, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MembershipError {
    #[error("stack has order {stack}, automaton has order {automaton}")]
    OrderMismatch { stack: u32, automaton: u32 },
    #[error("stack is not well-formed: {0}")]
    MalformedStack(#[from] Malformed),
    #[error("initial states mix orders {0} and {1}")]
    MixedInitial(u32, u32),
    #[error("the stack is not accepted")]
    NotAccepted,
    #[error("automaton is not well-formed: {0}")]
    InvalidAutomaton(#[from] Violation),
}

struct CharRule {
    from: usize,
    branch: Option<(u32, FixedBitSet)>,
    to: FixedBitSet,
}

struct HigherRule {
    from: usize,
    read: usize,
    to: FixedBitSet,
}

/// The automaton with states renumbered densely per order.
struct Compiled {
    order: u32,
    /// Per order, index -> StateId.
    ids: Arc<Vec<Vec<StateId>>>,
    finals: Vec<FixedBitSet>,
    higher: Vec<Vec<HigherRule>>,
    chars: HashMap<Symbol, Vec<CharRule>>,
}

impl Compiled {
    fn new(a: &StackAutomaton) -> Self {
        let n = a.order() as usize;
        let mut ids = vec![Vec::new(); n + 1];
        let mut local = vec![0; a.state_count()];
        for q in a.states() {
            let k = a.state_order(q) as usize;
            if k <= n {
                local[q.0 as usize] = ids[k].len();
                ids[k].push(q);
            }
        }
        let set = |k: usize, states: &StateSet| {
            let mut bits = FixedBitSet::with_capacity(ids[k].len());
            for &q in states {
                bits.insert(local[q.0 as usize]);
            }
            bits
        };
        let finals = (0..=n)
            .map(|k| {
                let listed: StateSet = a
                    .finals(k as u32)
                    .iter()
                    .copied()
                    .filter(|&q| a.state_order(q) as usize == k)
                    .collect();
                set(k, &listed)
            })
            .collect();
        let mut higher: Vec<Vec<HigherRule>> = (0..=n).map(|_| Vec::new()).collect();
        for t in a.higher_transitions() {
            let k = t.order as usize;
            higher[k].push(HigherRule {
                from: local[t.from.0 as usize],
                read: local[t.read.0 as usize],
                to: set(k, &t.to),
            });
        }
        let mut chars: HashMap<Symbol, Vec<CharRule>> = HashMap::new();
        for t in a.char_transitions() {
            let branch = t
                .branch
                .as_ref()
                .map(|b| (b.order, set(b.order as usize, &b.states)));
            chars.entry(t.symbol.clone()).or_default().push(CharRule {
                from: local[t.from.0 as usize],
                branch,
                to: set(1, &t.to),
            });
        }
        Compiled {
            order: a.order(),
            ids: Arc::new(ids),
            finals,
            higher,
            chars,
        }
    }
}

/// Largest accepting state set per (substack position, order).
pub struct MembershipTable {
    order: u32,
    positions: usize,
    /// Bit blocks per (position, order), `stride` blocks per position.
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    stride: usize,
    present: FixedBitSet,
    ids: Arc<Vec<Vec<StateId>>>,
}

impl MembershipTable {
    /// Number of substack positions covered.
    pub fn positions(&self) -> usize {
        self.positions
    }

    /// Number of (position, order) pairs holding a set.
    pub fn entry_count(&self) -> usize {
        self.present.count_ones(..)
    }

    pub fn get(&self, p: SubstackPosition, k: u32) -> Option<StateSet> {
        let bits = self.slot(p.0, k)?;
        Some(
            self.ids[k as usize]
                .iter()
                .enumerate()
                .filter(|&(i, _)| has(bits, i))
                .map(|(_, &q)| q)
                .collect(),
        )
    }

    fn slot(&self, p: usize, k: u32) -> Option<&[Block]> {
        if k == 0 || k > self.order || p >= self.positions {
            return None;
        }
        if !self.present.contains(p * self.order as usize + k as usize - 1) {
            return None;
        }
        let base = p * self.stride + self.offsets[k as usize];
        Some(&self.blocks[base..base + self.offsets[k as usize + 1] - self.offsets[k as usize]])
    }

    /// The whole table as a run certificate.
    pub fn to_certificate(&self) -> RunCertificate {
        let mut run = RunCertificate::new();
        for p in 0..self.positions() {
            for k in 1..=self.order {
                if let Some(set) = self.get(SubstackPosition(p), k) {
                    run.insert(SubstackPosition(p), k, set);
                }
            }
        }
        run
    }
}

const BITS: usize = Block::BITS as usize;

fn has(bits: &[Block], i: usize) -> bool {
    bits[i / BITS] >> (i % BITS) & 1 == 1
}

fn within(small: &FixedBitSet, big: &[Block]) -> bool {
    small.as_slice().iter().zip(big).all(|(s, b)| s & !b == 0)
}

impl StackAutomaton {
    /// Builds the membership table for `w` in one bottom-to-top pass.
    pub fn membership_table(&self, w: &Stack) -> Result<MembershipTable, MembershipError> {
        Membership::new(self)?.table(w)
    }
}

/// A validated automaton prepared for repeated membership queries.
pub struct Membership<'a> {
    automaton: &'a StackAutomaton,
    compiled: Compiled,
}

impl<'a> Membership<'a> {
    pub fn new(a: &'a StackAutomaton) -> Result<Self, MembershipError> {
        a.validate()?;
        Ok(Membership {
            automaton: a,
            compiled: Compiled::new(a),
        })
    }

    pub fn table(&self, w: &Stack) -> Result<MembershipTable, MembershipError> {
        let n = self.automaton.order();
        if w.order() != n {
            return Err(MembershipError::OrderMismatch {
                stack: w.order(),
                automaton: n,
            });
        }
        w.check_well_formed(n)?;
        Ok(fill(&self.compiled, &StackLayout::new(w)))
    }

    /// True iff the stack behind `table` is accepted from every state of
    /// `initial`.
    pub fn accepts(&self, table: &MembershipTable, initial: &StateSet) -> Result<bool, MembershipError> {
        accepted(self.automaton, table, initial)
    }

    pub fn member(&self, w: &Stack, initial: &StateSet) -> Result<bool, MembershipError> {
        let table = self.table(w)?;
        self.accepts(&table, initial)
    }
}

fn fill(c: &Compiled, layout: &StackLayout<'_>) -> MembershipTable {
    let n = c.order as usize;
    let len = layout.len();
    let mut offsets = vec![0; n + 2];
    for k in 1..=n {
        offsets[k + 1] = offsets[k] + c.ids[k].len().div_ceil(BITS);
    }
    let stride = offsets[n + 1];
    let mut blocks: Vec<Block> = vec![0; len * stride];
    let mut present = FixedBitSet::with_capacity(len * n);
    let at = |p: usize, k: u32| p * stride + offsets[k as usize];
    let words = |k: u32| offsets[k as usize + 1] - offsets[k as usize];
    let mut scratch: Vec<Block> = Vec::with_capacity(stride);

    for p in (0..len).rev() {
        let lowest = match layout.token(p) {
            Token::Close(k) => {
                let base = at(p, k);
                let finals = c.finals[k as usize].as_slice();
                blocks[base..base + finals.len()].copy_from_slice(finals);
                present.insert(p * n + k as usize - 1);
                k + 1
            }
            Token::Atom(atom) => {
                scratch.clear();
                scratch.resize(words(1), 0);
                let next = &blocks[at(p + 1, 1)..at(p + 1, 1) + words(1)];
                let dest = layout.link_destination(p);
                if let Some(rules) = c.chars.get(&atom.symbol) {
                    for rule in rules {
                        if !within(&rule.to, next) {
                            continue;
                        }
                        let branch_ok = match &rule.branch {
                            None => true,
                            Some((order, states)) => match dest {
                                Some(d) if atom.link.order == *order => {
                                    let base = at(d, *order);
                                    present.contains(d * n + *order as usize - 1)
                                        && within(states, &blocks[base..base + words(*order)])
                                }
                                _ => false,
                            },
                        };
                        if branch_ok {
                            scratch[rule.from / BITS] |= 1 << (rule.from % BITS);
                        }
                    }
                }
                let base = at(p, 1);
                blocks[base..base + scratch.len()].copy_from_slice(&scratch);
                present.insert(p * n);
                2
            }
        };
        for k in lowest..=c.order {
            let next = layout.next_at(p, k);
            scratch.clear();
            scratch.resize(words(k), 0);
            {
                let below = &blocks[at(p, k - 1)..at(p, k - 1) + words(k - 1)];
                let rest = &blocks[at(next, k)..at(next, k) + words(k)];
                for rule in &c.higher[k as usize] {
                    if has(below, rule.read) && within(&rule.to, rest) {
                        scratch[rule.from / BITS] |= 1 << (rule.from % BITS);
                    }
                }
            }
            let base = at(p, k);
            blocks[base..base + scratch.len()].copy_from_slice(&scratch);
            present.insert(p * n + k as usize - 1);
        }
    }

    MembershipTable {
        order: c.order,
        positions: len,
        blocks,
        offsets,
        stride,
        present,
        ids: c.ids.clone(),
    }
}

fn initial_order(a: &StackAutomaton, initial: &StateSet) -> Result<Option<u32>, MembershipError> {
    let mut order = None;
    for &q in initial {
        let k = a.state_order(q);
        match order {
            None => order = Some(k),
            Some(o) if o != k => return Err(MembershipError::MixedInitial(o, k)),
            _ => {}
        }
    }
    Ok(order)
}

fn accepted(
    a: &StackAutomaton,
    table: &MembershipTable,
    initial: &StateSet,
) -> Result<bool, MembershipError> {
    let Some(k) = initial_order(a, initial)? else {
        return Ok(true);
    };
    let compiled_local = |q: StateId| table.ids[k as usize].iter().position(|&x| x == q);
    let Some(at_top) = table.slot(0, k) else {
        return Ok(false);
    };
    Ok(initial
        .iter()
        .all(|&q| compiled_local(q).is_some_and(|i| has(at_top, i))))
}

/// True iff `w` is accepted from every state of `initial`. An empty initial
/// set accepts every stack.
pub fn member(w: &Stack, a: &StackAutomaton, initial: &StateSet) -> Result<bool, MembershipError> {
    Membership::new(a)?.member(w, initial)
}

/// An accepting run for `w` from `initial`: the full membership table.
pub fn extract_run(
    w: &Stack,
    a: &StackAutomaton,
    initial: &StateSet,
) -> Result<RunCertificate, MembershipError> {
    let table = a.membership_table(w)?;
    if !accepted(a, &table, initial)? {
        return Err(MembershipError::NotAccepted);
    }
    Ok(table.to_certificate())
}
