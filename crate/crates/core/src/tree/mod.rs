pub mod automaton;
pub mod automorphism;
pub mod format;
pub mod lazy;
pub mod perm;
pub mod portrait;

pub use automaton::{Automaton, State};
pub use automorphism::{Automorphism, DEFAULT_STATE_BOUND};
pub use format::{parse_automaton, serialize, AutomatonFile};
pub use lazy::{LazyAutomaton, LazyMachine, DEFAULT_MEMO_BUDGET};
pub use perm::{format_word, parse_letters, Perm};
pub use portrait::{ambient_order, vertex_count, Portrait};
