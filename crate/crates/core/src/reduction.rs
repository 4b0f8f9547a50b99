//! Tiling problems as emptiness of order-2 stack automata.
//!
//! A solution over a `2^n x 2^n` corridor is written as an order-2 stack: three
//! order-1 stacks holding only a spacer, then one order-1 stack per cell in
//! row-major order holding a spacer, the row and column indices as `n`-bit
//! binary numbers (most significant bit first) and the tile. The spacer of
//! every cell outside the last row carries an order-2 link to the cell below.
//!
//! [`build_automaton`] accepts exactly the stacks of that shape whose grid
//! satisfies the corner and adjacency conditions. Each property is checked by
//! its own alternating branch started from the initial state. Bit positions in
//! the `2n`-bit number `bin(i) bin(j)` are numbered from 1 at the right, so the
//! column occupies positions `1..=n` and the row positions `n+1..=2n`.

use thiserror::Error;

use crate::automata::{StackAutomaton, StateId, StateSet};
use crate::stack::{Link, Stack, Symbol};
use crate::tiling::{cell_count, Tile, TilingError, TilingProblem, TilingSolution};

pub const SPACER: &str = "_";
pub const ZERO: &str = "0";
pub const ONE: &str = "1";

const BITS: [&str; 2] = [ZERO, ONE];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("the corridor exponent must be at least 1")]
    ZeroCorridor,
    #[error("tile name {0} is reserved for the encoding")]
    ReservedTile(String),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub automaton: StackAutomaton,
    pub initial: StateId,
}

impl ReductionOutput {
    pub fn initial_set(&self) -> StateSet {
        [self.initial].into()
    }
}

struct Builder {
    a: StackAutomaton,
}

impl Builder {
    fn q2(&mut self, name: &str) -> StateId {
        self.a.add_state(name, 2).expect("generated names are distinct per order")
    }

    fn q1(&mut self, name: &str) -> StateId {
        self.a.add_state(name, 1).expect("generated names are distinct per order")
    }

    fn t2(&mut self, from: StateId, read: StateId, to: &[StateId]) {
        self.a.add_higher(from, read, to.iter().copied());
    }

    fn t1(&mut self, from: StateId, symbol: &str, to: &[StateId]) {
        self.a.add_char(from, symbol, None, to.iter().copied());
    }

    fn t1_bits(&mut self, from: StateId, to: &[StateId]) {
        for b in BITS {
            self.t1(from, b, to);
        }
    }

    /// Leading spacer followed by `w` copies of `bit`.
    fn constant(&mut self, tag: &str, bit: &str, w: u32) -> StateId {
        let head = self.q1(tag);
        let st: Vec<StateId> = (1..=w).map(|j| self.q1(&format!("{tag}.j={j}"))).collect();
        self.t1(head, SPACER, &[st[w as usize - 1]]);
        for j in (1..w as usize).rev() {
            self.t1(st[j], bit, &[st[j - 1]]);
        }
        self.t1(st[0], bit, &[]);
        head
    }
}

/// Builds the automaton and its initial state for `p` over a `2^n x 2^n`
/// corridor.
pub fn build_automaton(p: &TilingProblem, n: u32) -> Result<ReductionOutput, ReductionError> {
    if n == 0 {
        return Err(ReductionError::ZeroCorridor);
    }
    check_tile_names(p)?;
    let w = 2 * n;
    let mut b = Builder {
        a: StackAutomaton::new(2),
    };
    for s in [SPACER, ZERO, ONE] {
        b.a.add_symbol(s);
    }
    for t in p.tiles() {
        b.a.add_symbol(t.clone());
    }

    let qi = b.q2("qI");
    let qf2 = b.q2("qf2");
    let qf1 = b.q1("qf1");
    b.a.add_final(2, qf2);
    b.a.add_final(1, qf1);

    let spacer_only = b.q1("q_");
    b.t1(spacer_only, SPACER, &[qf1]);
    let any = b.q1("q*");
    b.t1(any, SPACER, &[]);

    let props: Vec<StateId> = (1..=9).map(|k| b.q2(&format!("p{k}"))).collect();
    b.t2(qi, spacer_only, &props);
    let [p1, p2, p3, p4, p5, p6, p7, p8, p9] = props[..] else {
        unreachable!()
    };

    // order-1 checks on whole cells
    let has: Vec<(Tile, StateId)> = p
        .tiles()
        .iter()
        .map(|t| (t.clone(), b.q1(&format!("has[{t}]"))))
        .collect();
    for (t, q) in &has {
        for c in [SPACER, ZERO, ONE] {
            b.t1(*q, c, &[*q]);
        }
        b.t1(*q, t.as_str(), &[]);
    }
    let has_tile = |t: &Tile| has.iter().find(|(u, _)| u == t).map(|&(_, q)| q).unwrap();
    let first_cell = b.constant("q00", ZERO, w);
    let last_cell = b.constant("qDD", ONE, w);
    let last_row = row_is_last(&mut b, n);
    let last_col = col_is_last(&mut b, n);

    // 1: shape
    let p1_1 = b.q2("p1.1");
    let p1_2 = b.q2("p1.2");
    b.t2(p1, spacer_only, &[p1_1]);
    b.t2(p1_1, spacer_only, &[p1_2]);
    let shape = b.q1("qS");
    let counts: Vec<StateId> = (0..=w).map(|j| b.q1(&format!("qB.j={j}"))).collect();
    b.t1(shape, SPACER, &[counts[w as usize]]);
    for j in 1..=w as usize {
        b.t1_bits(counts[j], &[counts[j - 1]]);
    }
    for t in p.tiles() {
        b.t1(counts[0], t.as_str(), &[qf1]);
    }
    b.t2(p1_2, shape, &[p1_2]);
    b.t2(p1_2, shape, &[qf2]);

    // 2: the first cell is (0, 0)
    let p2_1 = b.q2("p2.1");
    let p2_2 = b.q2("p2.2");
    b.t2(p2, any, &[p2_1]);
    b.t2(p2_1, any, &[p2_2]);
    b.t2(p2_2, first_cell, &[]);

    // 3: the last cell is (D, D)
    b.t2(p3, any, &[p3]);
    b.t2(p3, last_cell, &[qf2]);

    // 4: consecutive cells hold consecutive 2n-bit numbers
    let z: Vec<StateId> = (1..=w).map(|i| rightmost(&mut b, "z", i, 1, w, 0)).collect();
    let o: Vec<StateId> = (1..=w).map(|i| rightmost(&mut b, "o", i, 1, w, 1)).collect();
    let bit: Vec<[StateId; 2]> = (1..=w)
        .map(|i| [bit_is(&mut b, i, w, 0), bit_is(&mut b, i, w, 1)])
        .collect();
    let zero4: Vec<StateId> = (1..=w).map(|i| b.q2(&format!("p4.zero.i={i}"))).collect();
    let zero4n: Vec<StateId> = (1..=w).map(|i| b.q2(&format!("p4.zero.i={i}.next"))).collect();
    let one4: Vec<StateId> = (1..=w).map(|i| b.q2(&format!("p4.one.i={i}"))).collect();
    let eq4: Vec<StateId> = (1..=w).map(|i| b.q2(&format!("p4.eq.i={i}"))).collect();
    let eq4b: Vec<[StateId; 2]> = (1..=w)
        .map(|i| [0, 1].map(|v| b.q2(&format!("p4.eq.i={i}.b={v}"))))
        .collect();
    let eq4bn: Vec<[StateId; 2]> = (1..=w)
        .map(|i| [0, 1].map(|v| b.q2(&format!("p4.eq.i={i}.b={v}.next"))))
        .collect();
    for i in 0..w as usize {
        let mut to = vec![p4, zero4[i]];
        to.extend(&eq4[i + 1..]);
        b.t2(p4, any, &to);
        b.t2(zero4[i], any, &[zero4n[i]]);
        b.t2(zero4n[i], z[i], &[one4[i]]);
        b.t2(one4[i], o[i], &[]);
        for v in 0..2 {
            b.t2(eq4[i], any, &[eq4b[i][v]]);
            b.t2(eq4b[i][v], bit[i][v], &[eq4bn[i][v]]);
            b.t2(eq4bn[i][v], bit[i][v], &[]);
        }
        for q in [zero4[i], zero4n[i], eq4[i], eq4b[i][0], eq4b[i][1]] {
            b.t2(q, any, &[qf2]);
        }
    }
    b.t2(p4, any, &[qf2]);

    // 5: each spacer link outside the last row reaches the cell below
    let mut pass_requests = Vec::new();
    let rows = n as usize..w as usize;
    let zr: Vec<StateId> = (n + 1..=w).map(|i| rightmost(&mut b, "z'", i, n + 1, w, 0)).collect();
    let or: Vec<StateId> = (n + 1..=w).map(|i| rightmost(&mut b, "o'", i, n + 1, w, 1)).collect();
    let zero5: Vec<StateId> = (n + 1..=w).map(|i| b.q2(&format!("p5.zero.i={i}"))).collect();
    let zero5n: Vec<StateId> = (n + 1..=w).map(|i| b.q2(&format!("p5.zero.i={i}.next"))).collect();
    let one5: Vec<StateId> = (n + 1..=w).map(|i| b.q2(&format!("p5.one.i={i}"))).collect();
    let one5l: Vec<StateId> = (n + 1..=w).map(|i| b.q2(&format!("p5.one.i={i}.link"))).collect();
    let eq5: Vec<StateId> = (1..=w).map(|i| b.q2(&format!("p5.eq.i={i}"))).collect();
    let eq5b: Vec<[StateId; 2]> = (1..=w)
        .map(|i| [0, 1].map(|v| b.q2(&format!("p5.eq.i={i}.b={v}"))))
        .collect();
    let eq5bl: Vec<[StateId; 2]> = (1..=w)
        .map(|i| [0, 1].map(|v| b.q2(&format!("p5.eq.i={i}.b={v}.link"))))
        .collect();
    let eq5bn: Vec<[StateId; 2]> = (1..=w)
        .map(|i| [0, 1].map(|v| b.q2(&format!("p5.eq.i={i}.b={v}.next"))))
        .collect();
    for (k, i) in rows.clone().enumerate() {
        let mut to = vec![p5, zero5[k]];
        to.extend(&eq5[..n as usize]);
        to.extend(&eq5[i + 1..]);
        b.t2(p5, any, &to);
        b.t2(zero5[k], any, &[zero5n[k], one5l[k]]);
        b.t2(zero5n[k], zr[k], &[]);
        pass_requests.push((one5l[k], one5[k]));
        b.t2(one5[k], or[k], &[]);
        for q in [zero5[k], zero5n[k], one5l[k]] {
            b.t2(q, last_row, &[]);
        }
    }
    for i in 0..w as usize {
        for v in 0..2 {
            b.t2(eq5[i], any, &[eq5b[i][v], eq5bl[i][v]]);
            b.t2(eq5b[i][v], bit[i][v], &[]);
            pass_requests.push((eq5bl[i][v], eq5bn[i][v]));
            b.t2(eq5bn[i][v], bit[i][v], &[]);
            b.t2(eq5b[i][v], last_row, &[]);
            b.t2(eq5bl[i][v], last_row, &[]);
        }
        b.t2(eq5[i], last_row, &[]);
    }
    b.t2(p5, last_row, &[]);

    // 6: the first cell holds the initial tile
    let p6_1 = b.q2("p6.1");
    let p6_2 = b.q2("p6.2");
    b.t2(p6, any, &[p6_1]);
    b.t2(p6_1, any, &[p6_2]);
    b.t2(p6_2, has_tile(p.init()), &[]);

    // 7: the last cell holds the final tile
    b.t2(p7, any, &[p7]);
    b.t2(p7, has_tile(p.fin()), &[qf2]);

    // 8: horizontal neighbours
    let p8_loop = b.q2("p8.loop");
    b.t2(p8, any, &[p8_loop]);
    b.t2(p8_loop, last_col, &[qf2]);
    for (t, u) in p.horizontal() {
        let pair = b.q2(&format!("h[{t},{u}]"));
        let second = b.q2(&format!("h[{u}]"));
        b.t2(p8_loop, any, &[p8_loop, pair]);
        b.t2(pair, has_tile(t), &[second]);
        b.t2(second, has_tile(u), &[]);
        b.t2(pair, last_col, &[]);
    }

    // 9: vertical neighbours, through the spacer links
    let p9_loop = b.q2("p9.loop");
    b.t2(p9, any, &[p9_loop]);
    b.t2(p9_loop, last_row, &[]);
    for (t, u) in p.vertical() {
        let upper = b.q2(&format!("v[{t}]"));
        let link = b.q2(&format!("v.link[{u}]"));
        let lower = b.q2(&format!("v.next[{u}]"));
        b.t2(p9_loop, any, &[p9_loop, upper, link]);
        b.t2(upper, has_tile(t), &[]);
        pass_requests.push((link, lower));
        b.t2(lower, has_tile(u), &[]);
        b.t2(upper, last_row, &[]);
        b.t2(link, last_row, &[]);
    }

    // every order-2 state can be sent through a spacer link
    let order2: Vec<StateId> = b.a.states_of_order(2).collect();
    let pass: Vec<(StateId, StateId)> = order2
        .iter()
        .map(|&q| {
            let name = format!("pass[{}]", b.a.name(q));
            (q, b.q1(&name))
        })
        .collect();
    for &(q, via) in &pass {
        b.a.add_char(via, SPACER, Some((2, [q].into())), []);
    }
    for (from, target) in pass_requests {
        let via = pass.iter().find(|&&(q, _)| q == target).unwrap().1;
        b.t2(from, via, &[]);
    }

    Ok(ReductionOutput {
        automaton: b.a,
        initial: qi,
    })
}

/// Order-1 check that bit `i` is the rightmost `b`-bit among positions
/// `lo..=w`, reading bits from position `w` down.
fn rightmost(b: &mut Builder, tag: &str, i: u32, lo: u32, w: u32, bit: usize) -> StateId {
    let head = b.q1(&format!("{tag}.i={i}"));
    let st: Vec<StateId> = (lo..=w).map(|j| b.q1(&format!("{tag}.i={i}.j={j}"))).collect();
    let at = |j: u32| st[(j - lo) as usize];
    b.t1(head, SPACER, &[at(w)]);
    for j in lo..=w {
        let next: Vec<StateId> = if j > lo { vec![at(j - 1)] } else { vec![] };
        if j > i {
            b.t1_bits(at(j), &next);
        } else if j == i {
            b.t1(at(j), BITS[bit], &next);
        } else {
            b.t1(at(j), BITS[1 - bit], &next);
        }
    }
    head
}

/// Order-1 check that bit `i` of the `w`-bit number is `bit`.
fn bit_is(b: &mut Builder, i: u32, w: u32, bit: usize) -> StateId {
    let head = b.q1(&format!("bit.i={i}.b={bit}"));
    let st: Vec<StateId> = (i..=w).map(|j| b.q1(&format!("bit.i={i}.b={bit}.j={j}"))).collect();
    b.t1(head, SPACER, &[st[(w - i) as usize]]);
    for j in i + 1..=w {
        b.t1_bits(st[(j - i) as usize], &[st[(j - i - 1) as usize]]);
    }
    b.t1(st[0], BITS[bit], &[]);
    head
}

/// Order-1 check that the row index is all ones.
fn row_is_last(b: &mut Builder, n: u32) -> StateId {
    let w = 2 * n;
    let head = b.q1("qD*");
    let st: Vec<StateId> = (n + 1..=w).map(|j| b.q1(&format!("qD*.j={j}"))).collect();
    b.t1(head, SPACER, &[st[(n - 1) as usize]]);
    for k in (1..n as usize).rev() {
        b.t1(st[k], ONE, &[st[k - 1]]);
    }
    b.t1(st[0], ONE, &[]);
    head
}

/// Order-1 check that the column index is all ones.
fn col_is_last(b: &mut Builder, n: u32) -> StateId {
    let w = 2 * n;
    let head = b.q1("q*D");
    let st: Vec<StateId> = (1..=w).map(|j| b.q1(&format!("q*D.j={j}"))).collect();
    b.t1(head, SPACER, &[st[0]]);
    for k in 0..w as usize - 1 {
        if k < n as usize {
            b.t1_bits(st[k], &[st[k + 1]]);
        } else {
            b.t1(st[k], ONE, &[st[k + 1]]);
        }
    }
    b.t1(st[w as usize - 1], ONE, &[]);
    head
}

fn check_tile_names(p: &TilingProblem) -> Result<(), ReductionError> {
    match p.tiles().iter().find(|t| [SPACER, ZERO, ONE].contains(&t.as_str())) {
        Some(t) => Err(ReductionError::ReservedTile(t.to_string())),
        None => Ok(()),
    }
}

fn binary(x: usize, n: u32) -> impl Iterator<Item = &'static str> {
    (0..n).rev().map(move |k| BITS[(x >> k) & 1])
}

/// Writes `s` as a grid-shaped order-2 stack.
pub fn encode_witness(p: &TilingProblem, n: u32, s: &TilingSolution) -> Result<Stack, ReductionError> {
    check_tile_names(p)?;
    if s.n() != n {
        return Err(TilingError::DimensionMismatch {
            n,
            expected: cell_count(n),
            actual: s.cells().len(),
        }
        .into());
    }
    if let Some(t) = s.cells().iter().find(|t| !p.tiles().contains(*t)) {
        return Err(TilingError::UnknownTile(t.to_string()).into());
    }
    let side = 1usize << n;
    let m = 3 + side * side;
    let spacer_only = || Stack::seq(1, vec![Stack::atom(SPACER, Link::NULL)]);
    let mut items = vec![spacer_only(), spacer_only(), spacer_only()];
    for (idx, tile) in s.cells().iter().enumerate() {
        let (row, col) = (idx / side, idx % side);
        let pos = 4 + idx;
        let link = if row + 1 < side {
            Link::new(2, (m - pos - side + 1) as u32)
        } else {
            Link::NULL
        };
        let mut cell = vec![Stack::atom(SPACER, link)];
        for bit in binary(row, n).chain(binary(col, n)) {
            cell.push(Stack::atom(bit, Link::NULL));
        }
        cell.push(Stack::atom(tile.clone(), Link::NULL));
        items.push(Stack::seq(1, cell));
    }
    Ok(Stack::seq(2, items))
}

/// Recovers the grid from a stack of the witness shape, ignoring links.
pub fn decode_witness(w: &Stack, n: u32) -> Result<TilingSolution, ReductionError> {
    let bad = |msg: String| Err(ReductionError::MalformedWitness(msg));
    if w.order() != 2 {
        return bad(format!("expected an order-2 stack, found order {}", w.order()));
    }
    let side = 1usize << n;
    let items = w.items();
    if items.len() != 3 + side * side {
        return bad(format!(
            "expected {} order-1 stacks, found {}",
            3 + side * side,
            items.len()
        ));
    }
    let symbols = |s: &Stack| -> Vec<Symbol> {
        s.items()
            .iter()
            .filter_map(|a| a.as_atom().map(|a| a.symbol.clone()))
            .collect()
    };
    for (k, item) in items[..3].iter().enumerate() {
        if symbols(item) != [Symbol::new(SPACER)] {
            return bad(format!("stack {} should hold only a spacer", k + 1));
        }
    }
    let mut cells = Vec::with_capacity(side * side);
    for (idx, item) in items[3..].iter().enumerate() {
        let pos = idx + 4;
        let syms = symbols(item);
        if syms.len() != 2 * n as usize + 2 {
            return bad(format!(
                "stack {pos} has {} characters, expected {}",
                syms.len(),
                2 * n + 2
            ));
        }
        if syms[0].as_str() != SPACER {
            return bad(format!("stack {pos} does not start with a spacer"));
        }
        let (row, col) = (idx / side, idx % side);
        let expected = binary(row, n).chain(binary(col, n));
        if !syms[1..=2 * n as usize].iter().map(Symbol::as_str).eq(expected) {
            return bad(format!("stack {pos} should be indexed ({row}, {col})"));
        }
        let tile = &syms[2 * n as usize + 1];
        if [SPACER, ZERO, ONE].contains(&tile.as_str()) {
            return bad(format!("stack {pos} does not end with a tile"));
        }
        cells.push(tile.clone());
    }
    Ok(TilingSolution::new(n, cells)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::member;
    use crate::tiling::{all_assignments, check_solution, solve_bruteforce};

    fn t(s: &str) -> Tile {
        Tile::new(s)
    }

    fn sample(vertical_xf: bool) -> TilingProblem {
        let h = [("I", "X"), ("X", "X"), ("X", "F")].map(|(a, b)| (t(a), t(b)));
        let v = h.iter().filter(|(a, b)| vertical_xf || (a.as_str(), b.as_str()) != ("X", "F"));
        TilingProblem::new([t("I"), t("X"), t("F")], h.clone(), v.cloned(), t("I"), t("F")).unwrap()
    }

    fn ixxf() -> TilingSolution {
        TilingSolution::new(1, ["I", "X", "X", "F"].map(t).to_vec()).unwrap()
    }

    #[test]
    fn witness_layout_for_n1() {
        let w = encode_witness(&sample(true), 1, &ixxf()).unwrap();
        assert_eq!(
            w.to_string(),
            "[[_(1,0)]1 [_(1,0)]1 [_(1,0)]1 [_(2,2) 0(1,0) 0(1,0) I(1,0)]1 \
             [_(2,1) 0(1,0) 1(1,0) X(1,0)]1 [_(1,0) 1(1,0) 0(1,0) X(1,0)]1 \
             [_(1,0) 1(1,0) 1(1,0) F(1,0)]1]2"
        );
        assert!(w.validate(2));
        // the (0,0) spacer points at the stack headed by cell (1,0)
        let cell = Stack::seq(2, w.items()[3..].to_vec());
        let dest = cell.bottom(2, 2).unwrap();
        assert_eq!(dest.items()[0], w.items()[5]);
    }

    #[test]
    fn decode_inverts_encode() {
        let p = sample(true);
        for s in all_assignments(&p, 1) {
            let w = encode_witness(&p, 1, &s).unwrap();
            assert_eq!(decode_witness(&w, 1).unwrap(), s);
        }
    }

    #[test]
    fn decode_rejects_wrong_shapes() {
        let w = encode_witness(&sample(true), 1, &ixxf()).unwrap();
        let short = Stack::seq(2, w.items()[1..].to_vec());
        assert!(decode_witness(&short, 1).is_err());
        let mut items = w.items().to_vec();
        let mut long = items[4].items().to_vec();
        long.insert(1, Stack::atom(ZERO, Link::NULL));
        items[4] = Stack::seq(1, long);
        assert!(decode_witness(&Stack::seq(2, items), 1).is_err());
    }

    #[test]
    fn automaton_validates() {
        for n in 1..=3 {
            let out = build_automaton(&sample(true), n).unwrap();
            assert_eq!(out.automaton.validate(), Ok(()));
            for t in out.automaton.char_transitions() {
                if let Some(br) = &t.branch {
                    assert_eq!(br.order, 2);
                    assert_eq!(t.symbol.as_str(), SPACER);
                }
            }
        }
    }

    #[test]
    fn exhaustive_n1_agrees_with_checker() {
        for xf in [true, false] {
            let p = sample(xf);
            let out = build_automaton(&p, 1).unwrap();
            let init = out.initial_set();
            for s in all_assignments(&p, 1) {
                let w = encode_witness(&p, 1, &s).unwrap();
                let got = member(&w, &out.automaton, &init).unwrap();
                assert_eq!(got, check_solution(&p, 1, &s).unwrap(), "{:?}", s.cells());
            }
        }
    }

    #[test]
    fn accepts_n2_solution() {
        let p = sample(true);
        let s = solve_bruteforce(&p, 2).unwrap().unwrap();
        let out = build_automaton(&p, 2).unwrap();
        let w = encode_witness(&p, 2, &s).unwrap();
        assert_eq!(w.items().len(), 19);
        assert_eq!(member(&w, &out.automaton, &out.initial_set()), Ok(true));
    }

    #[test]
    fn reserved_tile_names_rejected() {
        let rel = [(t("0"), t("0"))];
        let p = TilingProblem::new([t("0")], rel.clone(), rel, t("0"), t("0")).unwrap();
        assert!(matches!(build_automaton(&p, 1), Err(ReductionError::ReservedTile(_))));
    }
}
