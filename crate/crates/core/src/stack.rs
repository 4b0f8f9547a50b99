//! Order-n collapsible stacks and the operations defined on them.
//!
//! A stack of order `k >= 1` is a sequence of order-`(k-1)` stacks, the first
//! element being the top. Order-0 stacks are single characters, each carrying
//! a collapse link `(order, index)`. A link of order `o` with index `i` names
//! the `i` bottommost components of the topmost order-`o` stack, so links are
//! plain integers and duplicating a subtree never rewrites them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// A stack character.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Names usable in the text formats: non-empty, no whitespace, none of
    /// the reserved punctuation `()[]{},:#/`.
    pub fn is_valid_name(name: &str) -> bool {
        !name.is_empty()
            && name
                .chars()
                .all(|c| !c.is_whitespace() && !"()[]{},:#/".contains(c))
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A collapse link. Index 0 is the null link: collapsing on it is undefined.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Link {
    pub order: u32,
    pub index: u32,
}

impl Link {
    pub const NULL: Link = Link { order: 1, index: 0 };

    pub fn new(order: u32, index: u32) -> Self {
        Link { order, index }
    }

    pub fn is_null(&self) -> bool {
        self.index == 0
    }
}

/// An order-0 stack: a character with its link.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    pub symbol: Symbol,
    pub link: Link,
}

impl Atom {
    pub fn new(symbol: impl Into<Symbol>, link: Link) -> Self {
        Atom {
            symbol: symbol.into(),
            link,
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stack {
    Atom(Atom),
    /// `items[0]` is the top component.
    Seq { order: u32, items: Vec<Stack> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StackError {
    #[error("undefined: the topmost order-{0} stack is empty")]
    Empty(u32),
    #[error("undefined: order {order} is out of range for an order-{stack_order} stack")]
    OrderOutOfRange { order: u32, stack_order: u32 },
    #[error("undefined: bottom index {index} exceeds the {available} available components")]
    IndexOutOfRange { index: u32, available: usize },
    #[error("undefined: bottom index must be positive")]
    ZeroIndex,
    #[error("undefined: collapse{expected} needs an order-{expected} link, top character has order {found}")]
    LinkOrderMismatch { expected: u32, found: u32 },
    #[error("undefined: top character carries a null link")]
    NullLink,
    #[error("order-{component} stack cannot be placed inside an order-{target} stack")]
    ComponentOrder { component: u32, target: u32 },
    #[error("operation {0} does not exist")]
    NoSuchOperation(String),
}

/// Why a stack fails the well-formedness check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Malformed {
    #[error("expected an order-{expected} stack, found order {found}")]
    Order { expected: u32, found: u32 },
    #[error("character {symbol} carries a link of order {order}, outside 1..={n}")]
    LinkOrder { symbol: Symbol, order: u32, n: u32 },
    #[error("character {symbol} has link ({order},{index}) but only {max} components lie below it")]
    LinkIndex {
        symbol: Symbol,
        order: u32,
        index: u32,
        max: u32,
    },
}

impl Stack {
    pub fn atom(symbol: impl Into<Symbol>, link: Link) -> Stack {
        Stack::Atom(Atom::new(symbol, link))
    }

    pub fn seq(order: u32, items: Vec<Stack>) -> Stack {
        debug_assert!(order >= 1);
        Stack::Seq { order, items }
    }

    pub fn empty(order: u32) -> Stack {
        Stack::seq(order, Vec::new())
    }

    pub fn order(&self) -> u32 {
        match self {
            Stack::Atom(_) => 0,
            Stack::Seq { order, .. } => *order,
        }
    }

    /// Components, top first. Empty for characters.
    pub fn items(&self) -> &[Stack] {
        match self {
            Stack::Atom(_) => &[],
            Stack::Seq { items, .. } => items,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Stack::Atom(a) => Some(a),
            Stack::Seq { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Stack::Seq { items, .. } if items.is_empty())
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Stack::Atom(_) => 1,
            Stack::Seq { items, .. } => items.iter().map(Stack::atom_count).sum(),
        }
    }

    /// Number of order >= 1 sub-sequences, including `self`.
    pub fn seq_count(&self) -> usize {
        match self {
            Stack::Atom(_) => 0,
            Stack::Seq { items, .. } => 1 + items.iter().map(Stack::seq_count).sum::<usize>(),
        }
    }

    /// True iff `self` is a well-formed order-`n` stack.
    pub fn validate(&self, n: u32) -> bool {
        self.check_well_formed(n).is_ok()
    }

    pub fn check_well_formed(&self, n: u32) -> Result<(), Malformed> {
        if n == 0 || self.order() != n {
            return Err(Malformed::Order {
                expected: n,
                found: self.order(),
            });
        }
        // (component count, 1-based position of the current component) per order
        let mut ctx = vec![(0u32, 0u32); n as usize + 1];
        check_rec(self, n, n, &mut ctx)
    }

    /// `top_k`: the topmost order-`(k-1)` stack. `top(n + 1)` is the stack itself.
    pub fn top(&self, k: u32) -> Result<&Stack, StackError> {
        let order = self.order();
        if k == order + 1 {
            return Ok(self);
        }
        if k == 0 || k > order {
            return Err(StackError::OrderOutOfRange {
                order: k,
                stack_order: order,
            });
        }
        let first = self.items().first().ok_or(StackError::Empty(order))?;
        if k == order {
            Ok(first)
        } else {
            first.top(k)
        }
    }

    /// The character on top, with its link.
    pub fn top_atom(&self) -> Result<&Atom, StackError> {
        Ok(self.top(1)?.as_atom().expect("top_1 is a character"))
    }

    /// `bottom_k^i`: keep only the `i` bottommost components of the topmost
    /// order-`k` stack.
    pub fn bottom(&self, k: u32, i: u32) -> Result<Stack, StackError> {
        if i == 0 {
            return Err(StackError::ZeroIndex);
        }
        let (order, items) = match self {
            Stack::Seq { order, items } if *order >= k && k >= 1 => (*order, items),
            _ => {
                return Err(StackError::OrderOutOfRange {
                    order: k,
                    stack_order: self.order(),
                })
            }
        };
        if order == k {
            let m = items.len();
            if i as usize > m {
                return Err(StackError::IndexOutOfRange {
                    index: i,
                    available: m,
                });
            }
            return Ok(Stack::seq(order, items[m - i as usize..].to_vec()));
        }
        let first = items.first().ok_or(StackError::Empty(order))?;
        let mut out = Vec::with_capacity(items.len());
        out.push(first.bottom(k, i)?);
        out.extend_from_slice(&items[1..]);
        Ok(Stack::seq(order, out))
    }

    /// Splits `self` as `u :_k v`, returning `(u, v)`.
    pub fn decompose(&self, k: u32) -> Result<(Stack, Stack), StackError> {
        let (order, items) = match self {
            Stack::Seq { order, items } if *order >= k && k >= 1 => (*order, items),
            _ => {
                return Err(StackError::OrderOutOfRange {
                    order: k,
                    stack_order: self.order(),
                })
            }
        };
        let first = items.first().ok_or(StackError::Empty(order))?;
        if order == k {
            return Ok((first.clone(), Stack::seq(order, items[1..].to_vec())));
        }
        let (u, rest) = first.decompose(k)?;
        let mut out = Vec::with_capacity(items.len());
        out.push(rest);
        out.extend_from_slice(&items[1..]);
        Ok((u, Stack::seq(order, out)))
    }

    pub fn apply(&self, op: &StackOp) -> Result<Stack, StackError> {
        let n = self.order();
        let k = op.order();
        let min = if matches!(op, StackOp::Pop(_) | StackOp::Rew(_)) { 1 } else { 2 };
        if k < min {
            return Err(StackError::NoSuchOperation(op.to_string()));
        }
        if k > n {
            return Err(StackError::OrderOutOfRange {
                order: k,
                stack_order: n,
            });
        }
        match op {
            StackOp::Pop(k) => Ok(self.decompose(*k)?.1),
            StackOp::Push(k) => {
                let (u, v) = self.decompose(*k)?;
                compose(u.clone(), *k, &compose(u, *k, &v)?)
            }
            StackOp::Collapse(k) => {
                let link = self.top_atom()?.link;
                if link.order != *k {
                    return Err(StackError::LinkOrderMismatch {
                        expected: *k,
                        found: link.order,
                    });
                }
                if link.is_null() {
                    return Err(StackError::NullLink);
                }
                self.bottom(*k, link.index)
            }
            StackOp::CPush(b, k) => {
                let m = self.top(k + 1)?.items().len();
                if m == 0 {
                    return Err(StackError::Empty(*k));
                }
                let atom = Stack::atom(b.clone(), Link::new(*k, m as u32 - 1));
                compose(atom, 1, self)
            }
            StackOp::Rew(b) => {
                let link = self.top_atom()?.link;
                let (_, v) = self.decompose(1)?;
                compose(Stack::atom(b.clone(), link), 1, &v)
            }
        }
    }

    /// All substacks, top to bottom: position 0 is `self`, the last is the
    /// empty order-n stack.
    pub fn substacks(&self) -> Vec<Stack> {
        match self {
            Stack::Atom(_) => vec![self.clone()],
            Stack::Seq { order, items } => {
                let mut out = Vec::new();
                for (j, item) in items.iter().enumerate() {
                    for s in item.substacks() {
                        let mut v = Vec::with_capacity(items.len() - j);
                        v.push(s);
                        v.extend_from_slice(&items[j + 1..]);
                        out.push(Stack::seq(*order, v));
                    }
                }
                out.push(Stack::empty(*order));
                out
            }
        }
    }
}

fn check_rec(s: &Stack, expected: u32, n: u32, ctx: &mut [(u32, u32)]) -> Result<(), Malformed> {
    match s {
        Stack::Atom(a) => {
            if expected != 0 {
                return Err(Malformed::Order { expected, found: 0 });
            }
            let Link { order, index } = a.link;
            if order == 0 || order > n {
                return Err(Malformed::LinkOrder {
                    symbol: a.symbol.clone(),
                    order,
                    n,
                });
            }
            let (m, j) = ctx[order as usize];
            if index > m - j {
                return Err(Malformed::LinkIndex {
                    symbol: a.symbol.clone(),
                    order,
                    index,
                    max: m - j,
                });
            }
            Ok(())
        }
        Stack::Seq { order, items } => {
            if *order != expected {
                return Err(Malformed::Order {
                    expected,
                    found: *order,
                });
            }
            let m = items.len() as u32;
            for (j, item) in items.iter().enumerate() {
                ctx[*order as usize] = (m, j as u32 + 1);
                check_rec(item, order - 1, n, ctx)?;
            }
            Ok(())
        }
    }
}

/// `u :_k v`: place `u` on top of the topmost order-`k` stack of `v`.
pub fn compose(u: Stack, k: u32, v: &Stack) -> Result<Stack, StackError> {
    if u.order() + 1 != k {
        return Err(StackError::ComponentOrder {
            component: u.order(),
            target: k,
        });
    }
    let (order, items) = match v {
        Stack::Seq { order, items } if *order >= k => (*order, items),
        _ => {
            return Err(StackError::OrderOutOfRange {
                order: k,
                stack_order: v.order(),
            })
        }
    };
    let mut out = Vec::with_capacity(items.len() + 1);
    if order == k {
        out.push(u);
        out.extend_from_slice(items);
    } else {
        let first = items.first().ok_or(StackError::Empty(order))?;
        out.push(compose(u, k, first)?);
        out.extend_from_slice(&items[1..]);
    }
    Ok(Stack::seq(order, out))
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum StackOp {
    Pop(u32),
    Push(u32),
    Collapse(u32),
    CPush(Symbol, u32),
    Rew(Symbol),
}

impl StackOp {
    /// The least `k` such that the operation belongs to the order-`k` set.
    pub fn order(&self) -> u32 {
        match self {
            StackOp::Pop(k) | StackOp::Push(k) | StackOp::Collapse(k) | StackOp::CPush(_, k) => *k,
            StackOp::Rew(_) => 1,
        }
    }
}

impl fmt::Display for StackOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackOp::Pop(k) => write!(f, "pop{k}"),
            StackOp::Push(k) => write!(f, "push{k}"),
            StackOp::Collapse(k) => write!(f, "collapse{k}"),
            StackOp::CPush(b, k) => write!(f, "cpush{k}:{b}"),
            StackOp::Rew(b) => write!(f, "rew:{b}"),
        }
    }
}

impl FromStr for StackOp {
    type Err = StackError;

    /// Accepts `popK`, `pushK`, `collapseK`, `cpushK:b` and `rew:b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || StackError::NoSuchOperation(s.to_string());
        let order = |digits: &str| digits.parse::<u32>().ok().filter(|k| *k >= 1).ok_or_else(bad);
        let symbol = |name: &str| {
            if Symbol::is_valid_name(name) {
                Ok(Symbol::new(name))
            } else {
                Err(bad())
            }
        };
        if let Some(rest) = s.strip_prefix("rew:") {
            return Ok(StackOp::Rew(symbol(rest)?));
        }
        if let Some(rest) = s.strip_prefix("cpush") {
            let (k, b) = rest.split_once(':').ok_or_else(bad)?;
            let k = order(k)?;
            if k < 2 {
                return Err(bad());
            }
            return Ok(StackOp::CPush(symbol(b)?, k));
        }
        if let Some(rest) = s.strip_prefix("collapse") {
            let k = order(rest)?;
            return if k >= 2 { Ok(StackOp::Collapse(k)) } else { Err(bad()) };
        }
        if let Some(rest) = s.strip_prefix("push") {
            let k = order(rest)?;
            return if k >= 2 { Ok(StackOp::Push(k)) } else { Err(bad()) };
        }
        if let Some(rest) = s.strip_prefix("pop") {
            return Ok(StackOp::Pop(order(rest)?));
        }
        Err(bad())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.symbol, self.link.order, self.link.index)
    }
}

/// Canonical text: `[a(3,1) b(1,0)]1`, leftmost item on top.
impl fmt::Display for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stack::Atom(a) => write!(f, "{a}"),
            Stack::Seq { order, items } => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, "]{order}")
            }
        }
    }
}

impl fmt::Debug for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
