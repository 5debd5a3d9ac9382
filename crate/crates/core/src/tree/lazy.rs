//! Automata whose states are produced on demand by a generator map.
//!
//! Used for recursively defined families (powers of a cyclic generator,
//! representations induced by virtual endomorphisms, index-map families)
//! where the state set is either infinite or not known up front. Keys are
//! interned to dense ids; the memo table sits behind a mutex so concurrent
//! readers see the same expansion.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::tree::perm::Perm;

/// Default cap on generator evaluations per lazy automaton.
pub const DEFAULT_MEMO_BUDGET: usize = 1_000_000;

/// Object-safe view of a lazy automaton with interned state ids.
pub trait LazyMachine: Send + Sync {
    fn degree(&self) -> usize;
    /// Root permutation and child ids of state `id`.
    fn expand(&self, id: usize) -> Result<(Perm, Vec<usize>)>;
    /// Human-readable name of a state.
    fn label(&self, id: usize) -> String;
}

type Generator<K> = Box<dyn Fn(&K) -> (Perm, Vec<K>) + Send + Sync>;
type Labeler<K> = Box<dyn Fn(&K) -> String + Send + Sync>;

struct Memo<K> {
    ids: HashMap<K, usize>,
    keys: Vec<K>,
    expanded: Vec<Option<(Perm, Vec<usize>)>>,
    evaluations: usize,
}

pub struct LazyAutomaton<K> {
    m: usize,
    generator: Generator<K>,
    labeler: Option<Labeler<K>>,
    budget: usize,
    memo: Mutex<Memo<K>>,
}

impl<K> LazyAutomaton<K>
where
    K: Clone + Eq + Hash + std::fmt::Debug + Send + Sync + 'static,
{
    /// The generator must be deterministic: the same key always yields the
    /// same permutation and children.
    pub fn new(m: usize, generator: impl Fn(&K) -> (Perm, Vec<K>) + Send + Sync + 'static) -> Self {
        LazyAutomaton {
            m,
            generator: Box::new(generator),
            labeler: None,
            budget: DEFAULT_MEMO_BUDGET,
            memo: Mutex::new(Memo {
                ids: HashMap::new(),
                keys: Vec::new(),
                expanded: Vec::new(),
                evaluations: 0,
            }),
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_labels(mut self, labeler: impl Fn(&K) -> String + Send + Sync + 'static) -> Self {
        self.labeler = Some(Box::new(labeler));
        self
    }

    pub fn intern(&self, key: &K) -> usize {
        let mut memo = self.memo.lock().expect("lazy automaton memo poisoned");
        intern(&mut memo, key)
    }

    pub fn key(&self, id: usize) -> K {
        let memo = self.memo.lock().expect("lazy automaton memo poisoned");
        memo.keys[id].clone()
    }

    pub fn evaluations(&self) -> usize {
        self.memo
            .lock()
            .expect("lazy automaton memo poisoned")
            .evaluations
    }
}

fn intern<K: Clone + Eq + Hash>(memo: &mut Memo<K>, key: &K) -> usize {
    if let Some(&id) = memo.ids.get(key) {
        return id;
    }
    let id = memo.keys.len();
    memo.ids.insert(key.clone(), id);
    memo.keys.push(key.clone());
    memo.expanded.push(None);
    id
}

impl<K> LazyMachine for LazyAutomaton<K>
where
    K: Clone + Eq + Hash + std::fmt::Debug + Send + Sync + 'static,
{
    fn degree(&self) -> usize {
        self.m
    }

    fn expand(&self, id: usize) -> Result<(Perm, Vec<usize>)> {
        let mut memo = self.memo.lock().expect("lazy automaton memo poisoned");
        if let Some(done) = &memo.expanded[id] {
            return Ok(done.clone());
        }
        if memo.evaluations >= self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
            });
        }
        memo.evaluations += 1;
        let key = memo.keys[id].clone();
        let (perm, children) = (self.generator)(&key);
        if perm.degree() != self.m || children.len() != self.m {
            return Err(Error::input(format!(
                "lazy generator produced wrong degree for state {key:?}"
            )));
        }
        let child_ids: Vec<usize> = children.iter().map(|k| intern(&mut memo, k)).collect();
        memo.expanded[id] = Some((perm.clone(), child_ids.clone()));
        Ok((perm, child_ids))
    }

    fn label(&self, id: usize) -> String {
        let memo = self.memo.lock().expect("lazy automaton memo poisoned");
        let key = &memo.keys[id];
        match &self.labeler {
            Some(f) => f(key),
            None => format!("{key:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memoizes_and_counts() {
        // key n: perm trivial, children n+1 (an infinite chain)
        let lazy = LazyAutomaton::new(2, |n: &u64| (Perm::identity(2), vec![n + 1, n + 1]));
        let id = lazy.intern(&0);
        let (_, ch) = lazy.expand(id).unwrap();
        assert_eq!(ch[0], ch[1]);
        lazy.expand(id).unwrap();
        assert_eq!(lazy.evaluations(), 1);
        assert_eq!(lazy.key(ch[0]), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let lazy =
            LazyAutomaton::new(2, |n: &u64| (Perm::identity(2), vec![n + 1, n + 1])).with_budget(3);
        let mut id = lazy.intern(&0);
        let mut err = None;
        for _ in 0..10 {
            match lazy.expand(id) {
                Ok((_, ch)) => id = ch[0],
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        assert_eq!(err, Some(Error::BudgetExhausted { budget: 3 }));
    }
}
