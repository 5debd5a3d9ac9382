//! Subgroups of the truncated ambient group `Aut(T_m) mod Stab(k)`.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::tree::perm::Perm;
use crate::tree::portrait::{ambient_order, vertex_count, Portrait};

/// Largest ambient that the brute-force oracle will scan.
pub const BRUTE_GUARD: u128 = 10_000_000;
/// Default cap on enumerated subgroup orders.
pub const ENUM_GUARD: usize = 2_000_000;
/// Bytes of portrait data a single enumeration may hold.
pub const STORAGE_GUARD: usize = 1 << 30;

/// Largest element count that fits in `STORAGE_GUARD` at this size.
pub(crate) fn storage_cap(m: usize, depth: usize) -> usize {
    STORAGE_GUARD / (vertex_count(m, depth) * m).max(1)
}

/// An explicitly enumerated subgroup, elements sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedGroup {
    m: usize,
    depth: usize,
    elements: Vec<Portrait>,
}

impl TruncatedGroup {
    pub fn from_elements(m: usize, depth: usize, mut elements: Vec<Portrait>) -> Self {
        elements.sort();
        elements.dedup();
        TruncatedGroup { m, depth, elements }
    }

    /// Closure of `gens` under composition.
    pub fn generate(m: usize, depth: usize, gens: &[Portrait], cap: usize) -> Result<Self> {
        for g in gens {
            if g.degree() != m || g.depth() != depth {
                return Err(Error::input(
                    "generator portrait has the wrong degree or depth",
                ));
            }
        }
        let id = Portrait::identity(m, depth);
        let gens: Vec<&Portrait> = gens.iter().filter(|g| !g.is_identity()).collect();
        let cap = cap.min(storage_cap(m, depth) / 2);
        let mut seen: HashSet<Portrait> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &gens {
                let q = p.compose(g);
                if !seen.contains(&q) {
                    if seen.len() >= cap {
                        return Err(Error::SizeGuard(format!("subgroup order exceeds {cap}")));
                    }
                    seen.insert(q.clone());
                    queue.push_back(q);
                }
            }
        }
        Ok(TruncatedGroup::from_elements(
            m,
            depth,
            seen.into_iter().collect(),
        ))
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Portrait] {
        &self.elements
    }

    pub fn contains(&self, p: &Portrait) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subset_of(&self, other: &TruncatedGroup) -> bool {
        self.elements.iter().all(|p| other.contains(p))
    }

    pub fn is_abelian(&self) -> bool {
        // enough to test a generating set, but elements are what we have
        let gens = self.small_generating_set();
        gens.iter()
            .enumerate()
            .all(|(i, g)| gens[i + 1..].iter().all(|h| g.commutes_with(h)))
    }

    /// Closed under composition and inverses (finite, so composition suffices).
    pub fn is_closed(&self) -> bool {
        let gens = self.small_generating_set();
        self.elements
            .iter()
            .all(|p| gens.iter().all(|g| self.contains(&p.compose(g))))
    }

    /// Greedy generating set: walk elements in order, keep those not yet
    /// generated.
    pub fn small_generating_set(&self) -> Vec<Portrait> {
        let mut gens: Vec<Portrait> = Vec::new();
        let mut have: HashSet<Portrait> = HashSet::from([Portrait::identity(self.m, self.depth)]);
        for e in &self.elements {
            if !have.contains(e) {
                gens.push(e.clone());
                let g = TruncatedGroup::generate(self.m, self.depth, &gens, usize::MAX)
                    .expect("subgroup of an enumerated group");
                have = g.elements.into_iter().collect();
            }
        }
        gens
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self) -> u64 {
        self.elements
            .iter()
            .fold(1, |acc, p| num_integer::lcm(acc, p.order()))
    }

    /// Elements with trivial root permutation.
    pub fn stabilizer_level1(&self) -> Vec<&Portrait> {
        self.elements
            .iter()
            .filter(|p| p.root_perm().is_identity())
            .collect()
    }

    pub fn truncate(&self, depth: usize) -> TruncatedGroup {
        TruncatedGroup::from_elements(
            self.m,
            depth,
            self.elements.iter().map(|p| p.truncate(depth)).collect(),
        )
    }
}

/// Exhaustive centralizer in the truncated ambient: every vertex runs over
/// `allowed` (all of `Sym(m)` when `None`). Guarded by [`BRUTE_GUARD`].
pub fn centralizer_brute(
    m: usize,
    xs: &[Portrait],
    depth: usize,
    allowed: Option<&[Perm]>,
) -> Result<TruncatedGroup> {
    let choices: Vec<Perm> = match allowed {
        Some(a) => a.to_vec(),
        None => Perm::all(m),
    };
    let vertices = vertex_count(m, depth);
    let size = if allowed.is_none() {
        ambient_order(m, depth)
    } else {
        (choices.len() as u128).checked_pow(vertices as u32)
    };
    match size {
        Some(n) if n <= BRUTE_GUARD => {}
        _ => {
            return Err(Error::SizeGuard(format!(
                "ambient of degree {m} at depth {depth} exceeds {BRUTE_GUARD} elements"
            )))
        }
    }
    for x in xs {
        if x.degree() != m || x.depth() != depth {
            return Err(Error::input(
                "generator portrait has the wrong degree or depth",
            ));
        }
    }
    let mut digits = vec![0usize; vertices];
    let mut out = Vec::new();
    let mut perms: Vec<Perm> = vec![choices[0].clone(); vertices];
    loop {
        let c = Portrait::from_vertex_perms(m, depth, &perms)?;
        if xs.iter().all(|x| x.commutes_with(&c)) {
            out.push(c);
        }
        // odometer
        let mut v = 0;
        loop {
            if v == vertices {
                return Ok(TruncatedGroup::from_elements(m, depth, out));
            }
            digits[v] += 1;
            if digits[v] < choices.len() {
                perms[v] = choices[digits[v]].clone();
                break;
            }
            digits[v] = 0;
            perms[v] = choices[0].clone();
            v += 1;
        }
    }
}
