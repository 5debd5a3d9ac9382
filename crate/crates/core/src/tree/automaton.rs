//! Finite automata in wreath-recursion form.
//!
//! A state `q` carries a root permutation and one child state per letter:
//! `q = (q_1, ..., q_m) perm(q)`. Minimization is Moore-style partition
//! refinement; canonical forms renumber the reachable, minimized part by
//! breadth-first search from the initial state in letter order.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::tree::perm::Perm;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub perm: Perm,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automaton {
    m: usize,
    states: Vec<State>,
}

impl Automaton {
    pub fn new(m: usize, states: Vec<State>) -> Result<Self> {
        if m == 0 {
            return Err(Error::input("alphabet must be non-empty"));
        }
        for (q, s) in states.iter().enumerate() {
            if s.perm.degree() != m {
                return Err(Error::DegreeMismatch {
                    expected: m,
                    found: s.perm.degree(),
                });
            }
            if s.children.len() != m {
                return Err(Error::input(format!(
                    "state {q} has {} children, expected {m}",
                    s.children.len()
                )));
            }
            if let Some(&c) = s.children.iter().find(|&&c| c >= states.len()) {
                return Err(Error::input(format!(
                    "state {q} points to missing state {c}"
                )));
            }
        }
        Ok(Automaton { m, states })
    }

    /// One-state automaton for the identity.
    pub fn trivial(m: usize) -> Self {
        Automaton {
            m,
            states: vec![State {
                perm: Perm::identity(m),
                children: vec![0; m],
            }],
        }
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, q: usize) -> &State {
        &self.states[q]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// The first state that is the identity element: trivial permutation and
    /// every child pointing to itself.
    pub fn identity_state(&self) -> Option<usize> {
        self.states
            .iter()
            .enumerate()
            .position(|(q, s)| s.perm.is_identity() && s.children.iter().all(|&c| c == q))
    }

    /// States reachable from `init`, in breadth-first letter order.
    pub fn reachable(&self, init: usize) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([init]);
        seen[init] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &c in &self.states[q].children {
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        order
    }

    /// Coarsest bisimulation: returns a class id per state. Two states share
    /// a class iff they define the same tree automorphism.
    pub fn bisimulation_classes(&self) -> Vec<usize> {
        let n = self.states.len();
        let mut class = vec![0usize; n];
        let mut ids: HashMap<&Perm, usize> = HashMap::new();
        for (q, s) in self.states.iter().enumerate() {
            let next = ids.len();
            class[q] = *ids.entry(&s.perm).or_insert(next);
        }
        let mut count = ids.len();
        loop {
            let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_class = vec![0usize; n];
            for (q, s) in self.states.iter().enumerate() {
                let sig = (class[q], s.children.iter().map(|&c| class[c]).collect());
                let fresh = sigs.len();
                next_class[q] = *sigs.entry(sig).or_insert(fresh);
            }
            let new_count = sigs.len();
            class = next_class;
            if new_count == count {
                return class;
            }
            count = new_count;
        }
    }

    /// Partition-refinement quotient. Returns the quotient automaton and the
    /// map from old state to new state.
    pub fn minimize(&self) -> (Automaton, Vec<usize>) {
        let class = self.bisimulation_classes();
        let count = class.iter().copied().max().map_or(0, |c| c + 1);
        let mut reps = vec![usize::MAX; count];
        for (q, &c) in class.iter().enumerate() {
            if reps[c] == usize::MAX {
                reps[c] = q;
            }
        }
        let states = reps
            .iter()
            .map(|&q| State {
                perm: self.states[q].perm.clone(),
                children: self.states[q].children.iter().map(|&c| class[c]).collect(),
            })
            .collect();
        (Automaton { m: self.m, states }, class)
    }

    /// Canonical form of the automorphism `(self, init)`: the reachable part,
    /// minimized, renumbered in breadth-first letter order from `init` (which
    /// becomes state 0).
    pub fn canonical(&self, init: usize) -> Automaton {
        let (min, map) = self.minimize();
        let start = map[init];
        let order = min.reachable(start);
        let mut renum = vec![usize::MAX; min.len()];
        for (i, &q) in order.iter().enumerate() {
            renum[q] = i;
        }
        let states = order
            .iter()
            .map(|&q| State {
                perm: min.states[q].perm.clone(),
                children: min.states[q].children.iter().map(|&c| renum[c]).collect(),
            })
            .collect();
        Automaton { m: self.m, states }
    }

    /// Disjoint union; returns the union and the offset of `other`'s states.
    pub fn union(&self, other: &Automaton) -> Result<(Automaton, usize)> {
        if self.m != other.m {
            return Err(Error::DegreeMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        let offset = self.states.len();
        let mut states = self.states.clone();
        states.extend(other.states.iter().map(|s| State {
            perm: s.perm.clone(),
            children: s.children.iter().map(|&c| c + offset).collect(),
        }));
        Ok((Automaton { m: self.m, states }, offset))
    }

    /// Product automaton on reachable state pairs. The section rule is
    /// `(ab)_y = a_y b_{(y)perm(a)}` and the root permutation `perm(a) perm(b)`.
    pub fn product(
        &self,
        a: usize,
        other: &Automaton,
        b: usize,
        state_bound: usize,
    ) -> Result<Automaton> {
        if self.m != other.m {
            return Err(Error::DegreeMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(a, b)];
        index.insert((a, b), 0);
        let mut states = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let sp = &self.states[p];
            let sq = &other.states[q];
            let mut children = Vec::with_capacity(self.m);
            for y in 0..self.m {
                let key = (sp.children[y], sq.children[sp.perm.apply(y)]);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = pairs.len();
                        if id >= state_bound {
                            return Err(Error::StateExplosion { bound: state_bound });
                        }
                        index.insert(key, id);
                        pairs.push(key);
                        id
                    }
                };
                children.push(id);
            }
            states.push(State {
                perm: sp.perm.then(&sq.perm),
                children,
            });
            i += 1;
        }
        Ok(Automaton { m: self.m, states })
    }

    /// Automaton of inverses on the same state set.
    pub fn inverse(&self) -> Automaton {
        let states = self
            .states
            .iter()
            .map(|s| {
                let inv = s.perm.inverse();
                State {
                    children: (0..self.m).map(|y| s.children[inv.apply(y)]).collect(),
                    perm: inv,
                }
            })
            .collect();
        Automaton { m: self.m, states }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adding() -> Automaton {
        // 0 = a = (e, a)(1 2), 1 = e
        Automaton::new(
            2,
            vec![
                State {
                    perm: Perm::parse(2, "(1 2)").unwrap(),
                    children: vec![1, 0],
                },
                State {
                    perm: Perm::identity(2),
                    children: vec![1, 1],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn duplicated_identity_collapses() {
        let aut = Automaton::new(
            2,
            vec![
                State {
                    perm: Perm::identity(2),
                    children: vec![1, 2],
                },
                State {
                    perm: Perm::identity(2),
                    children: vec![2, 1],
                },
                State {
                    perm: Perm::identity(2),
                    children: vec![0, 0],
                },
            ],
        )
        .unwrap();
        let canon = aut.canonical(0);
        assert_eq!(canon.len(), 1);
        assert_eq!(canon.identity_state(), Some(0));
    }

    #[test]
    fn product_with_inverse_minimizes_to_one_state() {
        let a = adding();
        let inv = a.inverse();
        let prod = a.product(0, &inv, 0, 1000).unwrap();
        assert!(prod.len() > 1);
        assert_eq!(prod.canonical(0).len(), 1);
    }

    #[test]
    fn rejects_dangling_child() {
        let bad = Automaton::new(
            2,
            vec![State {
                perm: Perm::identity(2),
                children: vec![0, 3],
            }],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn product_respects_state_bound() {
        let a = adding();
        assert!(matches!(
            a.product(0, &a, 0, 1),
            Err(Error::StateExplosion { .. })
        ));
    }
}
