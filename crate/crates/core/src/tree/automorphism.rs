//! Tree automorphisms given by an automaton and an initial state.
//!
//! Finite-state automorphisms are always stored in canonical form (reachable
//! part, minimized, breadth-first numbered with the initial state at 0), so
//! two finite automorphisms are equal exactly when their automata are equal.
//! Lazy automorphisms are compared only through portraits, or after being
//! materialized by a bounded reachability closure.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tree::automaton::{Automaton, State};
use crate::tree::lazy::{LazyAutomaton, LazyMachine};
use crate::tree::perm::Perm;
use crate::tree::portrait::{vertex_count, Portrait};

/// Default cap on the number of states a materialization may reach.
pub const DEFAULT_STATE_BOUND: usize = 100_000;

#[derive(Clone)]
pub struct Automorphism {
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    /// Canonical automaton; the automorphism is its state 0.
    Finite(Arc<Automaton>),
    Lazy {
        machine: Arc<dyn LazyMachine>,
        state: usize,
    },
}

impl Automorphism {
    /// The automorphism defined by state `init` of `aut`.
    pub fn new(aut: &Automaton, init: usize) -> Result<Self> {
        if init >= aut.len() {
            return Err(Error::input(format!("initial state {init} out of range")));
        }
        Ok(Automorphism {
            repr: Repr::Finite(Arc::new(aut.canonical(init))),
        })
    }

    pub fn identity(m: usize) -> Self {
        Automorphism {
            repr: Repr::Finite(Arc::new(Automaton::trivial(m))),
        }
    }

    /// Builds `(s_1, ..., s_m) perm` from finite-state sections.
    pub fn from_sections(perm: &Perm, sections: &[Automorphism]) -> Result<Self> {
        let m = perm.degree();
        if sections.len() != m {
            return Err(Error::input("need one section per letter"));
        }
        let mut states = vec![State {
            perm: perm.clone(),
            children: vec![0; m],
        }];
        for (y, s) in sections.iter().enumerate() {
            if s.degree() != m {
                return Err(Error::DegreeMismatch {
                    expected: m,
                    found: s.degree(),
                });
            }
            let aut = s.finite()?;
            let offset = states.len();
            states.extend(aut.states().iter().map(|st| State {
                perm: st.perm.clone(),
                children: st.children.iter().map(|&c| c + offset).collect(),
            }));
            states[0].children[y] = offset;
        }
        Automorphism::new(&Automaton::new(m, states)?, 0)
    }

    /// Lazy automorphism rooted at `key`.
    pub fn lazy<K>(machine: Arc<LazyAutomaton<K>>, key: &K) -> Self
    where
        K: Clone + Eq + Hash + fmt::Debug + Send + Sync + 'static,
    {
        let state = machine.intern(key);
        Automorphism {
            repr: Repr::Lazy { machine, state },
        }
    }

    pub fn degree(&self) -> usize {
        match &self.repr {
            Repr::Finite(aut) => aut.degree(),
            Repr::Lazy { machine, .. } => machine.degree(),
        }
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.repr, Repr::Lazy { .. })
    }

    /// Canonical automaton (initial state 0), if this is a finite-state
    /// representation.
    pub fn automaton(&self) -> Option<&Automaton> {
        match &self.repr {
            Repr::Finite(aut) => Some(aut),
            Repr::Lazy { .. } => None,
        }
    }

    /// Label of a lazy root state (family names, exponents).
    pub fn lazy_label(&self) -> Option<String> {
        match &self.repr {
            Repr::Lazy { machine, state } => Some(machine.label(*state)),
            Repr::Finite(_) => None,
        }
    }

    fn expand(&self) -> Result<(Perm, Vec<Automorphism>)> {
        match &self.repr {
            Repr::Finite(aut) => {
                let s = aut.state(0);
                let children = s
                    .children
                    .iter()
                    .map(|&c| Automorphism {
                        repr: Repr::Finite(Arc::new(aut.canonical(c))),
                    })
                    .collect();
                Ok((s.perm.clone(), children))
            }
            Repr::Lazy { machine, state } => {
                let (perm, ids) = machine.expand(*state)?;
                let children = ids
                    .into_iter()
                    .map(|id| Automorphism {
                        repr: Repr::Lazy {
                            machine: machine.clone(),
                            state: id,
                        },
                    })
                    .collect();
                Ok((perm, children))
            }
        }
    }

    pub fn root_perm(&self) -> Result<Perm> {
        match &self.repr {
            Repr::Finite(aut) => Ok(aut.state(0).perm.clone()),
            Repr::Lazy { machine, state } => Ok(machine.expand(*state)?.0),
        }
    }

    /// All first-level sections `(a_1, ..., a_m)`.
    pub fn sections(&self) -> Result<Vec<Automorphism>> {
        Ok(self.expand()?.1)
    }

    /// Section at a vertex word; the empty word gives `self`.
    pub fn section(&self, word: &[usize]) -> Result<Automorphism> {
        let mut cur = self.clone();
        for &y in word {
            if y >= self.degree() {
                return Err(Error::input(format!("letter {} out of range", y + 1)));
            }
            cur = cur.expand()?.1.swap_remove(y);
        }
        Ok(cur)
    }

    /// Right action on a word: `(y w)^a = (y)perm(a) (w)^{a_y}`.
    pub fn act(&self, word: &[usize]) -> Result<Vec<usize>> {
        let m = self.degree();
        let mut out = Vec::with_capacity(word.len());
        match &self.repr {
            Repr::Finite(aut) => {
                let mut q = 0;
                for &y in word {
                    if y >= m {
                        return Err(Error::input(format!(
                            "letter {} out of range 1..{m}",
                            y + 1
                        )));
                    }
                    let s = aut.state(q);
                    out.push(s.perm.apply(y));
                    q = s.children[y];
                }
            }
            Repr::Lazy { machine, state } => {
                let mut q = *state;
                for &y in word {
                    if y >= m {
                        return Err(Error::input(format!(
                            "letter {} out of range 1..{m}",
                            y + 1
                        )));
                    }
                    let (perm, children) = machine.expand(q)?;
                    out.push(perm.apply(y));
                    q = children[y];
                }
            }
        }
        Ok(out)
    }

    /// Portrait of depth `depth`.
    pub fn portrait(&self, depth: usize) -> Result<Portrait> {
        let m = self.degree();
        let mut data = Vec::with_capacity(vertex_count(m, depth) * m);
        match &self.repr {
            Repr::Finite(aut) => {
                let mut level = vec![0usize];
                for l in 0..depth {
                    let mut next = Vec::with_capacity(level.len() * m);
                    for &q in &level {
                        let s = aut.state(q);
                        data.extend_from_slice(s.perm.as_bytes());
                        if l + 1 < depth {
                            next.extend_from_slice(&s.children);
                        }
                    }
                    level = next;
                }
            }
            Repr::Lazy { machine, state } => {
                let mut level = vec![*state];
                for l in 0..depth {
                    let mut next = Vec::with_capacity(level.len() * m);
                    for &q in &level {
                        let (perm, children) = machine.expand(q)?;
                        data.extend_from_slice(perm.as_bytes());
                        if l + 1 < depth {
                            next.extend_from_slice(&children);
                        }
                    }
                    level = next;
                }
            }
        }
        Ok(Portrait::from_raw(m, depth, data))
    }

    /// Materializes the reachable state set, failing past `state_bound`.
    pub fn to_finite(&self, state_bound: usize) -> Result<Automorphism> {
        match &self.repr {
            Repr::Finite(_) => Ok(self.clone()),
            Repr::Lazy { machine, state } => {
                let m = machine.degree();
                let mut index: HashMap<usize, usize> = HashMap::from([(*state, 0)]);
                let mut order = vec![*state];
                let mut queue = VecDeque::from([*state]);
                let mut raw: Vec<(Perm, Vec<usize>)> = Vec::new();
                while let Some(id) = queue.pop_front() {
                    let (perm, children) = machine.expand(id)?;
                    for &c in &children {
                        if let std::collections::hash_map::Entry::Vacant(e) = index.entry(c) {
                            if order.len() >= state_bound {
                                return Err(Error::StateExplosion { bound: state_bound });
                            }
                            e.insert(order.len());
                            order.push(c);
                            queue.push_back(c);
                        }
                    }
                    raw.push((perm, children));
                }
                let states = raw
                    .into_iter()
                    .map(|(perm, children)| State {
                        perm,
                        children: children.iter().map(|c| index[c]).collect(),
                    })
                    .collect();
                Automorphism::new(&Automaton::new(m, states)?, 0)
            }
        }
    }

    /// Canonical automaton, materializing lazy inputs with the default bound.
    pub fn finite(&self) -> Result<Arc<Automaton>> {
        match &self.to_finite(DEFAULT_STATE_BOUND)?.repr {
            Repr::Finite(aut) => Ok(aut.clone()),
            Repr::Lazy { .. } => unreachable!("to_finite returns a finite representation"),
        }
    }

    /// Product `self * other` (first `self`, then `other`), minimized.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        let (raw, init) = self.compose_unminimized(other)?;
        Automorphism::new(&raw, init)
    }

    /// Raw product automaton on reachable state pairs, not minimized.
    pub fn compose_unminimized(&self, other: &Automorphism) -> Result<(Automaton, usize)> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        let a = self.finite()?;
        let b = other.finite()?;
        Ok((a.product(0, &b, 0, DEFAULT_STATE_BOUND)?, 0))
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        let a = self.finite()?;
        Automorphism::new(&a.inverse(), 0)
    }

    pub fn pow(&self, n: i64) -> Result<Automorphism> {
        let mut base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut out = Automorphism::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                out = out.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(out)
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, g: &Automorphism) -> Result<Automorphism> {
        g.inverse()?.compose(self)?.compose(g)
    }

    /// `[self, other] = self^{-1} other^{-1} self other`.
    pub fn commutator(&self, other: &Automorphism) -> Result<Automorphism> {
        self.inverse()?
            .compose(&other.inverse()?)?
            .compose(self)?
            .compose(other)
    }

    pub fn is_identity(&self) -> Result<bool> {
        let a = self.finite()?;
        Ok(a.len() == 1 && a.state(0).perm.is_identity())
    }

    /// Bisimulation equality; both sides must be finite-state.
    pub fn equal(&self, other: &Automorphism) -> Result<bool> {
        if self.degree() != other.degree() {
            return Ok(false);
        }
        Ok(*self.finite()? == *other.finite()?)
    }

    pub fn equal_at_depth(&self, other: &Automorphism, depth: usize) -> Result<bool> {
        if self.degree() != other.degree() {
            return Ok(false);
        }
        Ok(self.portrait(depth)? == other.portrait(depth)?)
    }

    /// The set of states `Q(a)`: all bisimulation-distinct sections, in
    /// breadth-first order starting with `a` itself.
    pub fn states(&self) -> Result<Vec<Automorphism>> {
        self.states_bounded(DEFAULT_STATE_BOUND)
    }

    pub fn states_bounded(&self, state_bound: usize) -> Result<Vec<Automorphism>> {
        let fin = self.to_finite(state_bound)?;
        let aut = fin.finite()?;
        Ok((0..aut.len())
            .map(|q| Automorphism {
                repr: Repr::Finite(Arc::new(aut.canonical(q))),
            })
            .collect())
    }

    /// Reachable states of a lazy automorphism by key, without merging
    /// bisimilar keys; breadth-first from `self`. Finite automorphisms fall
    /// back to [`Automorphism::states_bounded`].
    pub fn lazy_states(&self, state_bound: usize) -> Result<Vec<Automorphism>> {
        let Repr::Lazy { machine, state } = &self.repr else {
            return self.states_bounded(state_bound);
        };
        let mut seen = std::collections::HashSet::from([*state]);
        let mut order = vec![*state];
        let mut i = 0;
        while i < order.len() {
            let (_, ids) = machine.expand(order[i])?;
            i += 1;
            for id in ids {
                if seen.insert(id) {
                    if order.len() >= state_bound {
                        return Err(Error::StateExplosion { bound: state_bound });
                    }
                    order.push(id);
                }
            }
        }
        Ok(order
            .into_iter()
            .map(|id| Automorphism {
                repr: Repr::Lazy {
                    machine: machine.clone(),
                    state: id,
                },
            })
            .collect())
    }

    /// Number of states of the minimized automaton.
    pub fn state_count(&self) -> Result<usize> {
        Ok(self.finite()?.len())
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Finite(aut) => {
                write!(f, "Automorphism[")?;
                for (q, s) in aut.states().iter().enumerate() {
                    if q > 0 {
                        write!(f, "; ")?;
                    }
                    let ch: Vec<String> = s.children.iter().map(|c| c.to_string()).collect();
                    write!(f, "{q}={}->({})", s.perm.cycle_string(), ch.join(","))?;
                }
                write!(f, "]")
            }
            Repr::Lazy { machine, state } => {
                write!(f, "LazyAutomorphism({})", machine.label(*state))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::perm::parse_letters;

    fn adding() -> Automorphism {
        let aut = Automaton::new(
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
        .unwrap();
        Automorphism::new(&aut, 0).unwrap()
    }

    fn word(m: usize, s: &str) -> Vec<usize> {
        parse_letters(m, s).unwrap()
    }

    #[test]
    fn adding_machine_acts_as_increment() {
        let a = adding();
        assert_eq!(a.act(&word(2, "2 2 1")).unwrap(), word(2, "1 1 2"));
        let inv = a.inverse().unwrap();
        assert_eq!(inv.act(&word(2, "1 1 2")).unwrap(), word(2, "2 2 1"));
    }

    #[test]
    fn square_of_adding_machine() {
        let a = adding();
        let a2 = a.compose(&a).unwrap();
        assert!(a2.root_perm().unwrap().is_identity());
        for s in a2.sections().unwrap() {
            assert!(s.equal(&a).unwrap());
        }
    }

    #[test]
    fn lazy_and_finite_agree() {
        // lazy adding machine: key true = a, false = e
        let lazy = Arc::new(LazyAutomaton::new(2, |k: &bool| {
            if *k {
                (Perm::parse(2, "(1 2)").unwrap(), vec![false, true])
            } else {
                (Perm::identity(2), vec![false, false])
            }
        }));
        let la = Automorphism::lazy(lazy, &true);
        assert!(la.equal_at_depth(&adding(), 6).unwrap());
        assert!(la.equal(&adding()).unwrap());
        assert_eq!(la.states().unwrap().len(), 2);
    }

    #[test]
    fn state_bound_is_reported() {
        let lazy = Arc::new(LazyAutomaton::new(2, |n: &u64| {
            (Perm::identity(2), vec![n + 1, 0])
        }));
        let a = Automorphism::lazy(lazy, &1);
        assert_eq!(
            a.states_bounded(50).unwrap_err(),
            Error::StateExplosion { bound: 50 }
        );
    }
}
