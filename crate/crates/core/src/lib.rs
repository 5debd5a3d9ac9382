//! Exact computation with self-similar groups of automorphisms of rooted
//! m-ary trees.

pub mod catalog;
pub mod centralizer;
pub mod diag;
pub mod error;
pub mod gdata;
pub mod permsym;
pub mod report;
pub mod tree;

pub use error::{Error, Result};
pub use tree::{Automaton, Automorphism, Perm, Portrait};
