//! Oracles and generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use collapsible::automata::{check_run, RunCertificate, StackAutomaton, StateId, StateSet};
use collapsible::layout::{StackLayout, SubstackPosition, Token};
use collapsible::random::{random_automaton, AutomatonParams};
use collapsible::stack::{Link, Stack, Symbol};
use collapsible::tiling::TilingProblem;
use rand::Rng;

pub fn sym(s: &str) -> Symbol {
    Symbol::new(s)
}

pub fn alphabet(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|s| sym(s)).collect()
}

pub fn example_stack() -> Stack {
    "[[[a(3,1) b(1,0)]1]2 [[c(2,1)]1 [d(1,1) e(1,0)]1]2]3".parse().unwrap()
}

pub fn tiling(tiles: &[&str], h: &[(&str, &str)], v: &[(&str, &str)], init: &str, fin: &str) -> TilingProblem {
    let pairs = |r: &[(&str, &str)]| r.iter().map(|(a, b)| (sym(a), sym(b))).collect::<Vec<_>>();
    TilingProblem::new(tiles.iter().map(|t| sym(t)), pairs(h), pairs(v), sym(init), sym(fin)).unwrap()
}

/// T = {I, X, F}, H = V = {(I,X), (X,X), (X,F)}.
pub fn small_instance() -> TilingProblem {
    let rel = [("I", "X"), ("X", "X"), ("X", "F")];
    tiling(&["I", "X", "F"], &rel, &rel, "I", "F")
}

/// As [`small_instance`] without `(X, F)` in the vertical relation.
pub fn small_negative_instance() -> TilingProblem {
    let rel = [("I", "X"), ("X", "X"), ("X", "F")];
    tiling(&["I", "X", "F"], &rel, &rel[..2], "I", "F")
}

/// Random automaton with between 1 and `max_states` states per order.
pub fn small_automaton<R: Rng>(rng: &mut R, order: u32, letters: &[Symbol], max_states: usize) -> StackAutomaton {
    let p = AutomatonParams {
        order,
        alphabet: letters.to_vec(),
        states: rng.gen_range(1..=max_states),
        density: rng.gen_range(0.3..0.9),
    };
    random_automaton(rng, &p)
}

/// Every well-formed order-2 stack with at most `atoms` characters over
/// `letters` and at most `width` order-1 components. Order-1 links are null;
/// order-2 links take every index the position allows, 0 included.
pub fn all_order2_stacks(atoms: usize, width: usize, letters: &[Symbol]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut items: Vec<Vec<(Symbol, Link)>> = Vec::new();
    grow(atoms, width, letters, &mut items, &mut out);
    out
}

fn grow(
    budget: usize,
    width: usize,
    letters: &[Symbol],
    items: &mut Vec<Vec<(Symbol, Link)>>,
    out: &mut BTreeSet<String>,
) {
    // items are built bottom-up so the link limit of every new character is
    // the number of components already below it
    let below = items.len() as u32;
    let render = |items: &Vec<Vec<(Symbol, Link)>>| {
        let s = Stack::seq(
            2,
            items
                .iter()
                .rev()
                .map(|c| Stack::seq(1, c.iter().map(|(a, l)| Stack::atom(a.clone(), *l)).collect()))
                .collect(),
        );
        s.to_string()
    };
    out.insert(render(items));
    if items.len() == width {
        return;
    }
    for len in 0..=budget {
        for component in components(len, below, letters) {
            items.push(component);
            grow(budget - len, width, letters, items, out);
            items.pop();
        }
    }
}

fn components(len: usize, below: u32, letters: &[Symbol]) -> Vec<Vec<(Symbol, Link)>> {
    let mut choices = Vec::new();
    for a in letters {
        choices.push((a.clone(), Link::NULL));
        for i in 0..=below {
            choices.push((a.clone(), Link::new(2, i)));
        }
    }
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Brute-force search for accepting run certificates. Every candidate is the
/// least certificate induced by one choice of transition for every state the
/// run has to justify; each complete candidate is judged by `check_run`. Any
/// accepting certificate contains such a least one, so the search is complete.
/// Transitions demanding a superset of what another demands are never chosen,
/// and a partial search already known to fail is not repeated.
pub struct CertificateOracle<'a> {
    a: &'a StackAutomaton,
    /// Per order, local index -> state.
    ids: Vec<Vec<StateId>>,
    local: BTreeMap<StateId, usize>,
    finals: Vec<u64>,
    symbols: Vec<Symbol>,
    /// [from][symbol][link order] -> (targets, branch states). Link order 0
    /// stands for links without a destination.
    chars: Vec<Vec<Vec<Vec<(u64, u64)>>>>,
    /// [order][from] -> (targets, read state).
    higher: Vec<Vec<Vec<(u64, u64)>>>,
}

/// Keeps the options not dominated by another option.
fn prune(mut options: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    options.sort();
    options.dedup();
    let le = |x: &(u64, u64), y: &(u64, u64)| x.0 & !y.0 == 0 && x.1 & !y.1 == 0;
    options
        .iter()
        .filter(|o| !options.iter().any(|v| v != *o && le(v, o)))
        .copied()
        .collect()
}

struct Search<'s, 'w> {
    layout: &'s StackLayout<'w>,
    w: &'s Stack,
    order: Vec<(usize, u32)>,
    failed: HashSet<(usize, Vec<u64>)>,
}

/// Ways to justify a state: a list of mask pairs and the two slots they go to.
type Options<'o> = (&'o [(u64, u64)], usize, usize);

impl<'a> CertificateOracle<'a> {
    pub fn new(a: &'a StackAutomaton) -> Self {
        let n = a.order() as usize;
        let ids: Vec<Vec<StateId>> = (0..=n as u32).map(|k| a.states_of_order(k).collect()).collect();
        assert!(ids.iter().all(|v| v.len() <= 64));
        let local: BTreeMap<StateId, usize> = ids
            .iter()
            .flat_map(|v| v.iter().enumerate().map(|(i, &q)| (q, i)))
            .collect();
        let mask = |set: &StateSet| set.iter().fold(0u64, |m, q| m | 1 << local[q]);
        let finals = (0..=n as u32).map(|k| mask(a.finals(k))).collect();
        let symbols: Vec<Symbol> = a.alphabet().iter().cloned().collect();
        let mut chars = vec![vec![vec![Vec::new(); n + 1]; symbols.len()]; ids[1].len()];
        for t in a.char_transitions() {
            let (Some(f), Some(x)) = (local.get(&t.from), symbols.iter().position(|s| *s == t.symbol)) else {
                continue;
            };
            let to = mask(&t.to);
            for o in 0..=n {
                match &t.branch {
                    None => chars[*f][x][o].push((to, 0)),
                    Some(b) if b.order as usize == o && o >= 2 => chars[*f][x][o].push((to, mask(&b.states))),
                    Some(_) => {}
                }
            }
        }
        for per_symbol in &mut chars {
            for per_order in per_symbol.iter_mut() {
                for list in per_order.iter_mut() {
                    *list = prune(std::mem::take(list));
                }
            }
        }
        let mut higher: Vec<Vec<Vec<(u64, u64)>>> = (0..=n).map(|k| vec![Vec::new(); ids[k].len()]).collect();
        for t in a.higher_transitions() {
            higher[t.order as usize][local[&t.from]].push((mask(&t.to), 1 << local[&t.read]));
        }
        for per_from in &mut higher {
            for list in per_from.iter_mut() {
                *list = prune(std::mem::take(list));
            }
        }
        CertificateOracle {
            a,
            ids,
            local,
            finals,
            symbols,
            chars,
            higher,
        }
    }

    fn slot(&self, p: usize, k: u32) -> usize {
        p * self.a.order() as usize + k as usize - 1
    }

    /// Ways to justify local state `q` at `(p, k)`: each entry of the list
    /// adds its two masks to the two slots. Empty if there is none.
    fn ways(&self, layout: &StackLayout, p: usize, k: u32, q: usize) -> Options<'_> {
        const TRIVIAL: &[(u64, u64)] = &[(0, 0)];
        match layout.token(p) {
            Token::Close(c) if c == k => {
                let list = if self.finals[k as usize] >> q & 1 == 1 { TRIVIAL } else { &[] };
                (list, 0, 0)
            }
            Token::Atom(atom) if k == 1 => {
                let Some(x) = self.symbols.iter().position(|s| *s == atom.symbol) else {
                    return (&[], 0, 0);
                };
                let dest = layout.link_destination(p).filter(|_| atom.link.order >= 2);
                let o = dest.map_or(0, |_| atom.link.order);
                let next = self.slot(p + 1, 1);
                let d = dest.map_or(next, |d| self.slot(d, o));
                (&self.chars[q][x][o as usize], next, d)
            }
            _ if k >= 2 && layout.decomposes_at(p, k) => {
                let next = self.slot(layout.next_at(p, k), k);
                (&self.higher[k as usize][q], next, self.slot(p, k - 1))
            }
            // no condition applies
            _ => (TRIVIAL, 0, 0),
        }
    }

    pub fn accepts(&self, layout: &StackLayout, w: &Stack, initial: &StateSet) -> bool {
        let n = self.a.order();
        let mut order = Vec::new();
        for p in 0..layout.len() {
            for k in (layout.level(p)..=n).rev() {
                order.push((p, k));
            }
        }
        let mut demands = vec![0u64; layout.len() * n as usize];
        for q in initial {
            if self.a.state_order(*q) != n {
                return false;
            }
            demands[self.slot(0, n)] |= 1 << self.local[q];
        }
        let mut s = Search {
            layout,
            w,
            order,
            failed: HashSet::new(),
        };
        self.search(&mut s, 0, &mut demands)
    }

    fn search(&self, s: &mut Search, at: usize, demands: &mut [u64]) -> bool {
        let Some(&(p, k)) = s.order.get(at) else {
            return self.judge(s.layout, s.w, demands);
        };
        let m = demands[self.slot(p, k)];
        let mut options = Vec::new();
        let mut branching = false;
        for q in (0..64).filter(|i| m >> i & 1 == 1) {
            let ways = self.ways(s.layout, p, k, q);
            if ways.0.is_empty() {
                return false;
            }
            branching |= ways.0.len() > 1;
            options.push(ways);
        }
        if !branching {
            return self.choose(s, at, demands, &options, 0);
        }
        // what is left to decide depends only on the pending pairs
        let key: Vec<u64> = s.order[at..].iter().map(|&(p, k)| demands[self.slot(p, k)]).collect();
        if s.failed.contains(&(at, key.clone())) {
            return false;
        }
        let found = self.choose(s, at, demands, &options, 0);
        if !found {
            s.failed.insert((at, key));
        }
        found
    }

    fn choose(&self, s: &mut Search, at: usize, demands: &mut [u64], options: &[Options], i: usize) -> bool {
        let Some(&(list, x, y)) = options.get(i) else {
            return self.search(s, at + 1, demands);
        };
        for &(mx, my) in list {
            let saved = (demands[x], demands[y]);
            demands[x] |= mx;
            demands[y] |= my;
            if self.choose(s, at, demands, options, i + 1) {
                return true;
            }
            demands[y] = saved.1;
            demands[x] = saved.0;
        }
        false
    }

    fn judge(&self, layout: &StackLayout, w: &Stack, demands: &[u64]) -> bool {
        let n = self.a.order();
        let mut run = RunCertificate::new();
        for p in 0..layout.len() {
            for k in layout.level(p)..=n {
                let m = demands[self.slot(p, k)];
                let set: StateSet = (0..64).filter(|i| m >> i & 1 == 1).map(|i| self.ids[k as usize][i]).collect();
                run.insert(SubstackPosition(p), k, set);
            }
        }
        let initial = run.get(SubstackPosition(0), n).cloned().unwrap_or_default();
        check_run(w, self.a, &run, &initial) == Ok(true)
    }
}

pub fn certificate_search(w: &Stack, a: &StackAutomaton, initial: &StateSet) -> bool {
    CertificateOracle::new(a).accepts(&StackLayout::new(w), w, initial)
}

/// Tries literally every certificate over the pairs of `w`. Only usable for
/// a handful of pairs and states.
pub fn exhaustive_certificates(w: &Stack, a: &StackAutomaton, initial: &StateSet) -> bool {
    let skeleton = RunCertificate::empty_for(w);
    let keys: Vec<(SubstackPosition, u32)> = skeleton.iter().map(|(p, k, _)| (p, k)).collect();
    let pools: Vec<Vec<StateId>> = keys.iter().map(|&(_, k)| a.states_of_order(k).collect()).collect();
    let total: u32 = pools.iter().map(|p| p.len() as u32).sum();
    assert!(total <= 20, "too many certificates to enumerate");
    for mask in 0u64..(1 << total) {
        let mut run = RunCertificate::new();
        let mut bit = 0;
        for (key, pool) in keys.iter().zip(&pools) {
            let set: StateSet = pool
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> (bit + j) & 1 == 1)
                .map(|(_, &q)| q)
                .collect();
            bit += pool.len();
            run.insert(key.0, key.1, set);
        }
        if check_run(w, a, &run, initial) == Ok(true) {
            return true;
        }
    }
    false
}

/// Ordered sample of states used as single-state initial sets, one per order.
pub fn initial_choices(a: &StackAutomaton) -> Vec<StateSet> {
    let mut out = vec![StateSet::new()];
    for q in a.states_of_order(a.order()) {
        out.push([q].into());
    }
    out
}
