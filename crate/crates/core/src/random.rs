//! Random well-formed stacks and automata for testing and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automata::{StackAutomaton, StateId, StateSet};
use crate::stack::{Link, Stack, Symbol};

#[derive(Clone, Debug)]
pub struct StackParams {
    pub order: u32,
    pub max_atoms: usize,
    pub max_width: usize,
    pub alphabet: Vec<Symbol>,
}

/// A random well-formed stack with at most `max_atoms` characters. Links are
/// drawn uniformly among the orders and then among the indices allowed at
/// each position.
pub fn random_stack<R: Rng + ?Sized>(rng: &mut R, p: &StackParams) -> Stack {
    let mut budget = p.max_atoms;
    let mut limits = vec![0u32; p.order as usize + 1];
    build(rng, p, p.order, &mut budget, &mut limits)
}

fn build<R: Rng + ?Sized>(
    rng: &mut R,
    p: &StackParams,
    k: u32,
    budget: &mut usize,
    limits: &mut [u32],
) -> Stack {
    let width = if k == 1 {
        rng.gen_range(0..=(*budget).min(p.max_width.max(1)))
    } else {
        rng.gen_range(0..=p.max_width)
    };
    let mut items = Vec::with_capacity(width);
    for j in 0..width {
        limits[k as usize] = (width - j - 1) as u32;
        if k == 1 {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            let symbol = p.alphabet.choose(rng).expect("non-empty alphabet").clone();
            let o = rng.gen_range(1..=p.order);
            let link = if o == 1 {
                Link::NULL
            } else {
                Link::new(o, rng.gen_range(0..=limits[o as usize]))
            };
            items.push(Stack::atom(symbol, link));
        } else {
            items.push(build(rng, p, k - 1, budget, limits));
        }
    }
    Stack::seq(k, items)
}

#[derive(Clone, Debug)]
pub struct AutomatonParams {
    pub order: u32,
    pub alphabet: Vec<Symbol>,
    /// States per order, at least 1.
    pub states: usize,
    /// Chance that a given (state, character) or (state, read state) pair
    /// gets a transition.
    pub density: f64,
}

fn subset<R: Rng + ?Sized>(rng: &mut R, pool: &[StateId], p: f64) -> StateSet {
    pool.iter().copied().filter(|_| rng.gen_bool(p)).collect()
}

/// A random valid automaton with states `q<k>.<i>`.
pub fn random_automaton<R: Rng + ?Sized>(rng: &mut R, p: &AutomatonParams) -> StackAutomaton {
    let n = p.order;
    let mut a = StackAutomaton::new(n);
    for s in &p.alphabet {
        a.add_symbol(s.clone());
    }
    let mut by_order: Vec<Vec<StateId>> = vec![Vec::new()];
    for k in 1..=n {
        let qs = (0..p.states.max(1))
            .map(|i| a.add_state(&format!("q{k}.{i}"), k).expect("fresh name"))
            .collect();
        by_order.push(qs);
    }
    for k in 1..=n {
        for q in subset(rng, &by_order[k as usize], 0.5) {
            a.add_final(k, q);
        }
    }
    for k in 2..=n as usize {
        for &from in &by_order[k] {
            for &read in &by_order[k - 1] {
                if rng.gen_bool(p.density) {
                    let to = subset(rng, &by_order[k], 0.4);
                    a.add_higher(from, read, to);
                }
            }
        }
    }
    for &from in &by_order[1] {
        for s in &p.alphabet {
            if !rng.gen_bool(p.density) {
                continue;
            }
            let branch = if n >= 2 && rng.gen_bool(0.5) {
                let o = rng.gen_range(2..=n);
                let set = subset(rng, &by_order[o as usize], 0.5);
                Some((o, set))
            } else {
                None
            };
            let to = subset(rng, &by_order[1], 0.4);
            a.add_char(from, s.clone(), branch, to);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_values_are_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let alphabet = vec![Symbol::new("a"), Symbol::new("b")];
        for order in 1..=3 {
            let sp = StackParams {
                order,
                max_atoms: 12,
                max_width: 3,
                alphabet: alphabet.clone(),
            };
            let ap = AutomatonParams {
                order,
                alphabet: alphabet.clone(),
                states: 3,
                density: 0.6,
            };
            for _ in 0..50 {
                let w = random_stack(&mut rng, &sp);
                assert!(w.validate(order), "{w}");
                assert!(w.atom_count() <= 12);
                assert_eq!(random_automaton(&mut rng, &ap).validate(), Ok(()));
            }
        }
    }
}
