//! Order-n collapsible pushdown stacks, stack automata over them, linear-time
//! membership, bounded emptiness search, and the tiling reduction showing
//! emptiness is NEXPTIME-hard.

pub mod automata;
pub mod cpds;
pub mod emptiness;
pub mod layout;
pub mod random;
pub mod reduction;
pub mod stack;
pub mod text;
pub mod tiling;

pub use automata::{check_run, extract_run, member, RunCertificate, StackAutomaton, StateId, StateSet};
pub use layout::SubstackPosition;
pub use stack::{Atom, Link, Stack, StackOp, Symbol};
