//! Bounded search for stacks accepted by a stack automaton.
//!
//! The search is sound but incomplete: a witness proves non-emptiness, while
//! finding none only says that no stack within the bounds is accepted.

use rayon::prelude::*;
use thiserror::Error;

use crate::automata::{Membership, MembershipError, StackAutomaton, StateSet};
use crate::stack::{Link, Stack, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationBounds {
    /// Most characters in a stack.
    pub max_atoms: usize,
    /// Most components in any stack of order 2 or more. Order-1 stacks are
    /// bounded by `max_atoms` alone.
    pub max_width: usize,
    pub alphabet: Vec<Symbol>,
}

impl EnumerationBounds {
    pub fn new(max_atoms: usize, max_width: usize, alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        let mut alphabet: Vec<Symbol> = alphabet.into_iter().collect();
        alphabet.sort();
        alphabet.dedup();
        EnumerationBounds {
            max_atoms,
            max_width,
            alphabet,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmptinessVerdict {
    Witness(Stack),
    NoWitnessWithinBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmptinessError {
    #[error("search budget of {0} stacks exhausted")]
    ResourceBound(u64),
    #[error(transparent)]
    Membership(#[from] MembershipError),
}

/// Character positions of a shape with, per position, the largest index an
/// order-`o` link may carry (entry `o - 2`).
#[derive(Clone, Debug)]
struct Shape {
    stack: Stack,
    slots: Vec<Vec<u32>>,
}

fn shapes(k: u32, atoms: usize, width: usize) -> Vec<Stack> {
    if k == 1 {
        let slot = Stack::atom("?", Link::NULL);
        return vec![Stack::seq(1, vec![slot; atoms])];
    }
    let mut out = Vec::new();
    for count in 0..=width {
        for parts in compositions(atoms, count) {
            let mut partial: Vec<Vec<Stack>> = vec![Vec::new()];
            for &part in &parts {
                let subs = shapes(k - 1, part, width);
                partial = partial
                    .into_iter()
                    .flat_map(|prefix| {
                        subs.iter().map(move |s| {
                            let mut p = prefix.clone();
                            p.push(s.clone());
                            p
                        })
                    })
                    .collect();
            }
            out.extend(partial.into_iter().map(|items| Stack::seq(k, items)));
        }
    }
    out
}

/// Ordered ways to write `total` as `count` non-negative parts.
fn compositions(total: usize, count: usize) -> Vec<Vec<usize>> {
    if count == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, count - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Shape {
    fn new(stack: Stack, n: u32) -> Shape {
        let mut slots = Vec::new();
        let mut limits = vec![0u32; n.saturating_sub(1) as usize];
        collect_slots(&stack, &mut limits, &mut slots);
        Shape { stack, slots }
    }

    fn fill(&self, chars: &[Symbol], links: &[Link]) -> Stack {
        let mut k = 0;
        fill(&self.stack, chars, links, &mut k)
    }
}

fn collect_slots(s: &Stack, limits: &mut [u32], out: &mut Vec<Vec<u32>>) {
    match s {
        Stack::Atom(_) => out.push(limits.to_vec()),
        Stack::Seq { order, items } => {
            let m = items.len() as u32;
            for (j, item) in items.iter().enumerate() {
                if *order >= 2 {
                    limits[*order as usize - 2] = m - j as u32 - 1;
                }
                collect_slots(item, limits, out);
            }
        }
    }
}

fn fill(s: &Stack, chars: &[Symbol], links: &[Link], k: &mut usize) -> Stack {
    match s {
        Stack::Atom(_) => {
            let a = Stack::atom(chars[*k].clone(), links[*k]);
            *k += 1;
            a
        }
        Stack::Seq { order, items } => {
            Stack::seq(*order, items.iter().map(|i| fill(i, chars, links, k)).collect())
        }
    }
}

/// Advances `digits` like an odometer with the last digit fastest; returns
/// false after the last combination.
fn bump(digits: &mut [u32], limit: impl Fn(usize) -> u32) -> bool {
    for i in (0..digits.len()).rev() {
        if digits[i] < limit(i) {
            digits[i] += 1;
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Every well-formed order-`n` stack within `b`, each exactly once. Stacks
/// come by atom count, then shape, then characters, then link orders, then
/// link indices. Order-1 links are always null.
pub fn enumerate_stacks(n: u32, b: &EnumerationBounds) -> impl Iterator<Item = Stack> + Send + '_ {
    (0..=b.max_atoms)
        .flat_map(move |atoms| {
            let alphabet_ok = atoms == 0 || !b.alphabet.is_empty();
            let list = if n == 0 || !alphabet_ok {
                Vec::new()
            } else {
                shapes(n, atoms, b.max_width)
            };
            list.into_iter().map(move |s| Shape::new(s, n))
        })
        .flat_map(move |shape| ShapeFillings::new(shape, n, &b.alphabet))
}

struct ShapeFillings<'a> {
    shape: Shape,
    n: u32,
    alphabet: &'a [Symbol],
    chars: Vec<u32>,
    orders: Vec<u32>,
    indices: Vec<u32>,
    done: bool,
}

impl<'a> ShapeFillings<'a> {
    fn new(shape: Shape, n: u32, alphabet: &'a [Symbol]) -> Self {
        let s = shape.slots.len();
        ShapeFillings {
            shape,
            n,
            alphabet,
            chars: vec![0; s],
            orders: vec![0; s],
            indices: vec![0; s],
            done: false,
        }
    }

    fn index_limit(&self, i: usize) -> u32 {
        match self.orders[i] {
            0 => 0,
            o => self.shape.slots[i][o as usize - 1],
        }
    }

    fn advance(&mut self) {
        let mut indices = std::mem::take(&mut self.indices);
        let more = bump(&mut indices, |i| self.index_limit(i));
        self.indices = indices;
        if more {
            return;
        }
        let top = self.n - 1;
        if bump(&mut self.orders, |_| top) {
            return;
        }
        let letters = (self.alphabet.len() as u32).saturating_sub(1);
        if bump(&mut self.chars, |_| letters) {
            return;
        }
        self.done = true;
    }
}

impl Iterator for ShapeFillings<'_> {
    type Item = Stack;

    fn next(&mut self) -> Option<Stack> {
        if self.done {
            return None;
        }
        // orders are stored minus one: 0 is the null order-1 link
        let chars: Vec<Symbol> = self.chars.iter().map(|&c| self.alphabet[c as usize].clone()).collect();
        let links: Vec<Link> = self
            .orders
            .iter()
            .zip(&self.indices)
            .map(|(&o, &i)| Link::new(o + 1, i))
            .collect();
        let out = self.shape.fill(&chars, &links);
        self.advance();
        Some(out)
    }
}

const BATCH: usize = 2048;

/// The first enumerated stack accepted from `initial`. `budget` caps how
/// many stacks are tested.
pub fn is_empty_bounded(
    a: &StackAutomaton,
    initial: &StateSet,
    b: &EnumerationBounds,
    budget: Option<u64>,
) -> Result<EmptinessVerdict, EmptinessError> {
    let m = Membership::new(a)?;
    let mut stream = enumerate_stacks(a.order(), b).peekable();
    let mut tested: u64 = 0;
    loop {
        let room = budget.map_or(BATCH as u64, |k| (k - tested).min(BATCH as u64)) as usize;
        if room == 0 {
            return match stream.peek() {
                Some(_) => Err(EmptinessError::ResourceBound(tested)),
                None => Ok(EmptinessVerdict::NoWitnessWithinBounds),
            };
        }
        let batch: Vec<Stack> = stream.by_ref().take(room).collect();
        if batch.is_empty() {
            return Ok(EmptinessVerdict::NoWitnessWithinBounds);
        }
        tested += batch.len() as u64;
        let results: Vec<Result<bool, MembershipError>> =
            batch.par_iter().map(|w| m.member(w, initial)).collect();
        for (w, r) in batch.into_iter().zip(results) {
            if r? {
                return Ok(EmptinessVerdict::Witness(w));
            }
        }
    }
}

/// The first stack of `shapes` accepted from `initial`.
pub fn search_shaped(
    a: &StackAutomaton,
    initial: &StateSet,
    shapes: impl IntoIterator<Item = Stack>,
) -> Result<EmptinessVerdict, MembershipError> {
    let m = Membership::new(a)?;
    for w in shapes {
        if m.member(&w, initial)? {
            return Ok(EmptinessVerdict::Witness(w));
        }
    }
    Ok(EmptinessVerdict::NoWitnessWithinBounds)
}
