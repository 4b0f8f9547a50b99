//! Flat indexing of the substacks of a stack.
//!
//! Substacks are numbered top to bottom. Reading the bracketed text of a stack
//! left to right, every character and every closing bracket is one position:
//! the substack at a character is `a :_1 v`, the substack at the closing
//! bracket of an inner order-`k` stack is `[]_k :_(k+1) v`, and the final
//! closing bracket is the empty order-`n` stack.

use crate::stack::{Atom, Stack};

/// Index into the top-to-bottom enumeration of `substacks(w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubstackPosition(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Token<'a> {
    Atom(&'a Atom),
    /// End of an order-k sequence.
    Close(u32),
}

#[derive(Debug)]
struct Node {
    close: usize,
    /// The first positions of the components, top first, are
    /// `starts[first..first + width]` of the layout.
    first: usize,
    width: usize,
}

const NONE: u32 = u32::MAX;

#[derive(Debug)]
pub struct StackLayout<'a> {
    order: u32,
    tokens: Vec<Token<'a>>,
    nodes: Vec<Node>,
    starts: Vec<usize>,
    /// Per position and order: the enclosing node of that order.
    enclosing: Vec<u32>,
    /// Per position and order: which component of the enclosing node holds it.
    component: Vec<u32>,
}

impl<'a> StackLayout<'a> {
    /// Indexes `w`. `w` should be well-formed; link lookups on malformed
    /// stacks return `None`.
    pub fn new(w: &'a Stack) -> Self {
        let order = w.order();
        let positions = w.atom_count() + w.seq_count();
        let slots = positions * (order as usize + 1);
        let mut layout = StackLayout {
            order,
            tokens: Vec::with_capacity(positions),
            nodes: Vec::with_capacity(w.seq_count()),
            starts: Vec::with_capacity(positions),
            enclosing: Vec::with_capacity(slots),
            component: Vec::with_capacity(slots),
        };
        let mut path = vec![(NONE, NONE); order as usize + 1];
        if order > 0 {
            layout.visit(w, &mut path);
        }
        layout
    }

    fn visit(&mut self, s: &'a Stack, path: &mut [(u32, u32)]) {
        let width = self.order as usize + 1;
        match s {
            Stack::Atom(a) => {
                self.tokens.push(Token::Atom(a));
                for &(node, comp) in path.iter() {
                    self.enclosing.push(node);
                    self.component.push(comp);
                }
            }
            Stack::Seq { order, items } => {
                let k = *order as usize;
                let id = self.nodes.len() as u32;
                let first = self.starts.len();
                self.starts.resize(first + items.len(), 0);
                self.nodes.push(Node {
                    close: 0,
                    first,
                    width: items.len(),
                });
                for (j, item) in items.iter().enumerate() {
                    path[k] = (id, j as u32);
                    self.starts[first + j] = self.tokens.len();
                    self.visit(item, path);
                }
                let pos = self.tokens.len();
                self.tokens.push(Token::Close(*order));
                for (o, &(node, comp)) in path.iter().enumerate().take(width) {
                    if o < k {
                        self.enclosing.push(NONE);
                        self.component.push(NONE);
                    } else if o == k {
                        self.enclosing.push(id);
                        self.component.push(items.len() as u32);
                    } else {
                        self.enclosing.push(node);
                        self.component.push(comp);
                    }
                }
                self.nodes[id as usize].close = pos;
                path[k] = (NONE, NONE);
            }
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of substacks.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, p: usize) -> Token<'a> {
        self.tokens[p]
    }

    /// Lowest order at which the substack at `p` carries a state set: 1 for
    /// characters, `k` at the end of an order-`k` sequence.
    pub fn level(&self, p: usize) -> u32 {
        match self.tokens[p] {
            Token::Atom(_) => 1,
            Token::Close(k) => k,
        }
    }

    /// True iff the substack at `p` decomposes as `u :_k v`.
    pub fn decomposes_at(&self, p: usize, k: u32) -> bool {
        match self.tokens[p] {
            Token::Atom(_) => (1..=self.order).contains(&k),
            Token::Close(c) => k > c && k <= self.order,
        }
    }

    /// For `u :_k v` at `p` (with `k >= 2`), the position of `v`.
    pub fn next_at(&self, p: usize, k: u32) -> usize {
        debug_assert!(k >= 2 && self.decomposes_at(p, k));
        let node = self.enclosing[p * (self.order as usize + 1) + k as usize - 1];
        self.nodes[node as usize].close + 1
    }

    /// Destination of the link on the character at `p`, or `None` for
    /// closing positions, null links and links that point nowhere.
    pub fn link_destination(&self, p: usize) -> Option<usize> {
        let Token::Atom(atom) = self.tokens[p] else {
            return None;
        };
        let (o, i) = (atom.link.order, atom.link.index as usize);
        if i == 0 || o == 0 || o > self.order {
            return None;
        }
        let slot = p * (self.order as usize + 1) + o as usize;
        let node = self.nodes.get(self.enclosing[slot] as usize)?;
        let j = self.component[slot] as usize;
        let m = node.width;
        if i + j + 1 > m {
            return None;
        }
        Some(self.starts[node.first + m - i])
    }
}

/// Position of the destination of the link on top of the substack at `p`.
pub fn link_destination(w: &Stack, p: SubstackPosition) -> Option<SubstackPosition> {
    let layout = StackLayout::new(w);
    if p.0 >= layout.len() {
        return None;
    }
    layout.link_destination(p.0).map(SubstackPosition)
}
