//! Small permutation groups: orbits, orbit-type and permutation-type, rigid
//! permutations, and centralizers in `Sym(m)`.
//!
//! Groups are given by generators; elements are enumerated on demand by
//! closure, with a degree guard of 12 and an element-count guard.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::tree::automorphism::Automorphism;
use crate::tree::perm::Perm;

/// Largest degree for which elements may be enumerated.
pub const MAX_ENUM_DEGREE: usize = 12;
/// Largest group order that will be enumerated.
pub const MAX_ENUM_ORDER: usize = 5_000_000;

pub struct PermGroup {
    m: usize,
    generators: Vec<Perm>,
    elements: OnceLock<std::result::Result<Vec<Perm>, Error>>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let elements = OnceLock::new();
        if let Some(e) = self.elements.get() {
            let _ = elements.set(e.clone());
        }
        PermGroup {
            m: self.m,
            generators: self.generators.clone(),
            elements,
        }
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| g.cycle_string()).collect();
        if gens.is_empty() {
            write!(f, "<>")
        } else {
            write!(f, "<{}>", gens.join(", "))
        }
    }
}

impl PermGroup {
    /// Identity generators are dropped.
    pub fn new(m: usize, generators: Vec<Perm>) -> Result<Self> {
        for g in &generators {
            if g.degree() != m {
                return Err(Error::DegreeMismatch {
                    expected: m,
                    found: g.degree(),
                });
            }
        }
        let mut gens: Vec<Perm> = Vec::new();
        for g in generators {
            if !g.is_identity() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        Ok(PermGroup {
            m,
            generators: gens,
            elements: OnceLock::new(),
        })
    }

    pub fn trivial(m: usize) -> Self {
        PermGroup {
            m,
            generators: Vec::new(),
            elements: OnceLock::new(),
        }
    }

    pub fn symmetric(m: usize) -> Self {
        let mut gens = Vec::new();
        if m >= 2 {
            gens.push(Perm::from_cycles(m, &[vec![0, 1]]).expect("valid transposition"));
        }
        if m >= 3 {
            gens.push(Perm::from_cycles(m, &[(0..m).collect()]).expect("valid cycle"));
        }
        PermGroup::new(m, gens).expect("degrees agree")
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// All elements, identity first, in breadth-first order over generators.
    pub fn elements(&self) -> Result<&[Perm]> {
        self.elements
            .get_or_init(|| closure(self.m, &self.generators, MAX_ENUM_ORDER))
            .as_deref()
            .map_err(|e| e.clone())
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, p: &Perm) -> Result<bool> {
        if p.degree() != self.m {
            return Ok(false);
        }
        Ok(self.elements()?.contains(p))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, g)| self.generators[i + 1..].iter().all(|h| g.commutes_with(h)))
    }

    /// Same element set, compared by enumeration.
    pub fn same_elements(&self, other: &PermGroup) -> Result<bool> {
        if self.m != other.m {
            return Ok(false);
        }
        let a: HashSet<&Perm> = self.elements()?.iter().collect();
        let b: HashSet<&Perm> = other.elements()?.iter().collect();
        Ok(a == b)
    }
}

fn closure(m: usize, gens: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    if m > MAX_ENUM_DEGREE && !gens.is_empty() {
        return Err(Error::SizeGuard(format!(
            "element enumeration needs degree <= {MAX_ENUM_DEGREE}, got {m}"
        )));
    }
    let id = Perm::identity(m);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                if out.len() >= cap {
                    return Err(Error::SizeGuard(format!("group order exceeds {cap}")));
                }
                out.push(q.clone());
                queue.push_back(q);
            }
        }
    }
    Ok(out)
}

/// Ordered orbits `O_(1), ..., O_(s)` of a subgroup of `Sym(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitPartition {
    m: usize,
    orbits: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl OrbitPartition {
    /// Validates and normalizes: each orbit sorted, orbits sorted by minimum.
    pub fn new(m: usize, mut orbits: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; m];
        for o in orbits.iter_mut() {
            if o.is_empty() {
                return Err(Error::input("empty orbit"));
            }
            o.sort_unstable();
        }
        orbits.sort_by_key(|o| o[0]);
        for (i, o) in orbits.iter().enumerate() {
            for &y in o {
                if y >= m {
                    return Err(Error::input(format!("letter {} out of range", y + 1)));
                }
                if owner[y] != usize::MAX {
                    return Err(Error::input("orbits overlap"));
                }
                owner[y] = i;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::input("orbits do not cover the alphabet"));
        }
        Ok(OrbitPartition { m, orbits, owner })
    }

    pub fn discrete(m: usize) -> Self {
        OrbitPartition::new(m, (0..m).map(|y| vec![y]).collect()).expect("valid partition")
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Number of orbits `s`.
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit(&self, i: usize) -> &[usize] {
        &self.orbits[i]
    }

    /// Index of the orbit containing letter `y`.
    pub fn orbit_of(&self, y: usize) -> usize {
        self.owner[y]
    }

    pub fn orbit_type(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.len()).collect()
    }

    /// True when every orbit is invariant under `p`.
    pub fn is_preserved_by(&self, p: &Perm) -> bool {
        p.degree() == self.m && (0..self.m).all(|y| self.owner[p.apply(y)] == self.owner[y])
    }

    /// Conjugator `pi` taking the partition to consecutive blocks in orbit
    /// order: the k-th letter of `O_(i)` goes to `|O_(1)| + ... + |O_(i-1)| + k`.
    pub fn block_relabeling(&self) -> Perm {
        let mut images = vec![0usize; self.m];
        let mut next = 0;
        for o in &self.orbits {
            for &y in o {
                images[y] = next;
                next += 1;
            }
        }
        Perm::from_images(images).expect("orbits cover the alphabet")
    }
}

impl fmt::Display for OrbitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .orbits
            .iter()
            .map(|o| {
                let inner: Vec<String> = o.iter().map(|y| (y + 1).to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `P(G)`: the group generated by the root permutations.
pub fn activity_group(gens: &[Automorphism]) -> Result<PermGroup> {
    let m = gens
        .first()
        .ok_or_else(|| Error::input("empty generator list"))?
        .degree();
    let perms = gens
        .iter()
        .map(|g| g.root_perm())
        .collect::<Result<Vec<_>>>()?;
    PermGroup::new(m, perms)
}

/// Orbits of `P` on `{1..m}` via union-find over generator edges.
pub fn orbits(p: &PermGroup) -> OrbitPartition {
    orbits_of(p.degree(), p.generators())
}

pub fn orbits_of(m: usize, gens: &[Perm]) -> OrbitPartition {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for y in 0..m {
            let a = find(&mut parent, y);
            let b = find(&mut parent, g.apply(y));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); m];
    for y in 0..m {
        let r = find(&mut parent, y);
        buckets[r].push(y);
    }
    OrbitPartition::new(m, buckets.into_iter().filter(|b| !b.is_empty()).collect())
        .expect("union-find yields a partition")
}

/// `p` on `orbit`, identity elsewhere. The orbit must be `p`-invariant.
pub fn restrict(p: &Perm, orbit: &[usize]) -> Perm {
    let mut images: Vec<usize> = (0..p.degree()).collect();
    for &y in orbit {
        images[y] = p.apply(y);
    }
    Perm::from_images(images).expect("orbit is invariant")
}

/// The permutation-type `(P_(1), ..., P_(s))`: projections of `P` onto its
/// orbits, each realized inside `Sym(m)` acting trivially off its orbit.
pub fn permutation_type(p: &PermGroup, partition: &OrbitPartition) -> Result<Vec<PermGroup>> {
    partition
        .orbits()
        .iter()
        .map(|o| {
            PermGroup::new(
                p.degree(),
                p.generators().iter().map(|g| restrict(g, o)).collect(),
            )
        })
        .collect()
}

/// Checks that every generator of `P` preserves every orbit and equals the
/// product of its orbit projections, i.e. `P <= P_(1) x ... x P_(s)`.
pub fn embeds_in_product(p: &PermGroup, partition: &OrbitPartition) -> bool {
    p.generators().iter().all(|g| {
        partition.is_preserved_by(g)
            && partition
                .orbits()
                .iter()
                .fold(Perm::identity(p.degree()), |acc, o| {
                    acc.then(&restrict(g, o))
                })
                == *g
    })
}

/// Rigid: maps each orbit onto an orbit, preserving the internal order.
pub fn is_rigid(xi: &Perm, partition: &OrbitPartition) -> bool {
    if xi.degree() != partition.degree() {
        return false;
    }
    partition.orbits().iter().all(|o| {
        let target = partition.orbit(partition.orbit_of(xi.apply(o[0])));
        target.len() == o.len() && o.iter().zip(target).all(|(&y, &t)| xi.apply(y) == t)
    })
}

/// Order-preserving swap of two orbits of equal length.
pub fn block_swap(partition: &OrbitPartition, i: usize, j: usize) -> Perm {
    let mut images: Vec<usize> = (0..partition.degree()).collect();
    for (&x, &y) in partition.orbit(i).iter().zip(partition.orbit(j)) {
        images[x] = y;
        images[y] = x;
    }
    Perm::from_images(images).expect("orbits of equal length")
}

/// `S`: all rigid permutations, generated by swaps of consecutive
/// equal-length orbits.
pub fn rigid_group(partition: &OrbitPartition) -> PermGroup {
    let mut gens = Vec::new();
    let s = partition.len();
    for i in 0..s {
        let len = partition.orbit(i).len();
        if let Some(j) = (i + 1..s).find(|&j| partition.orbit(j).len() == len) {
            gens.push(block_swap(partition, i, j));
        }
    }
    PermGroup::new(partition.degree(), gens).expect("degrees agree")
}

/// Attempts to extend `x0 -> y0` to a map from the orbit of `x0` onto the
/// orbit of `y0` that commutes with every generator.
fn intertwiner(gens: &[Perm], m: usize, x0: usize, y0: usize) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; m];
    map[x0] = y0;
    used[y0] = true;
    let mut queue = VecDeque::from([x0]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let (xg, yg) = (g.apply(x), g.apply(map[x]));
            if map[xg] == usize::MAX {
                if used[yg] {
                    return None;
                }
                map[xg] = yg;
                used[yg] = true;
                queue.push_back(xg);
            } else if map[xg] != yg {
                return None;
            }
        }
    }
    Some(map)
}

/// `C_{Sym(m)}(Q)`.
///
/// For abelian `Q` each orbit projection is regular, so its centralizer on
/// the orbit is the projection itself; the remaining freedom is permuting
/// orbits whose actions are equivalent. Other groups go through a
/// propagation backtrack over orbit representatives (degree <= 12).
pub fn centralizer_sym(q: &PermGroup) -> Result<PermGroup> {
    let m = q.degree();
    if q.generators().is_empty() {
        return Ok(PermGroup::symmetric(m));
    }
    if q.is_abelian() {
        return Ok(centralizer_abelian(q));
    }
    if m > MAX_ENUM_DEGREE {
        return Err(Error::SizeGuard(format!(
            "non-abelian centralizer needs degree <= {MAX_ENUM_DEGREE}"
        )));
    }
    let elements = centralizer_elements(q, MAX_ENUM_ORDER)?;
    Ok(generate_from_elements(m, elements))
}

fn centralizer_abelian(q: &PermGroup) -> PermGroup {
    let m = q.degree();
    let gens = q.generators();
    let part = orbits(q);
    let mut out: Vec<Perm> = Vec::new();
    for o in part.orbits() {
        out.extend(gens.iter().map(|g| restrict(g, o)));
    }
    // chain equivalent orbits with involutive swaps between consecutive members
    let mut claimed = vec![false; part.len()];
    for i in 0..part.len() {
        if claimed[i] {
            continue;
        }
        let mut prev = i;
        for j in i + 1..part.len() {
            if claimed[j] || part.orbit(j).len() != part.orbit(i).len() {
                continue;
            }
            let x0 = part.orbit(prev)[0];
            let hit = part
                .orbit(j)
                .iter()
                .find_map(|&y0| intertwiner(gens, m, x0, y0));
            if let Some(f) = hit {
                claimed[j] = true;
                let mut images: Vec<usize> = (0..m).collect();
                for &x in part.orbit(prev) {
                    images[x] = f[x];
                    images[f[x]] = x;
                }
                out.push(Perm::from_images(images).expect("intertwiner is bijective"));
                prev = j;
            }
        }
    }
    PermGroup::new(m, out).expect("degrees agree")
}

/// All elements of `C_{Sym(m)}(Q)`: choose an image for each orbit
/// representative and propagate `(xq)c = (xc)q` along the orbit.
pub fn centralizer_elements(q: &PermGroup, cap: usize) -> Result<Vec<Perm>> {
    let m = q.degree();
    let gens = q.generators();
    let part = orbits(q);
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; m];
    fn rec(
        i: usize,
        part: &OrbitPartition,
        gens: &[Perm],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Perm>,
        cap: usize,
    ) -> Result<()> {
        let m = part.degree();
        if i == part.len() {
            if out.len() >= cap {
                return Err(Error::SizeGuard(format!("centralizer order exceeds {cap}")));
            }
            out.push(Perm::from_images(map.clone()).expect("complete bijection"));
            return Ok(());
        }
        let x0 = part.orbit(i)[0];
        for y0 in 0..m {
            if used[y0] || part.orbit(part.orbit_of(y0)).len() != part.orbit(i).len() {
                continue;
            }
            if let Some(f) = intertwiner(gens, m, x0, y0) {
                if part.orbit(i).iter().any(|&x| used[f[x]]) {
                    continue;
                }
                for &x in part.orbit(i) {
                    map[x] = f[x];
                    used[f[x]] = true;
                }
                rec(i + 1, part, gens, map, used, out, cap)?;
                for &x in part.orbit(i) {
                    used[f[x]] = false;
                    map[x] = usize::MAX;
                }
            }
        }
        Ok(())
    }
    rec(0, &part, gens, &mut map, &mut used, &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// Exhaustive oracle: filters all of `Sym(m)`. Degree <= 9.
pub fn centralizer_sym_brute(q: &PermGroup) -> Result<Vec<Perm>> {
    if q.degree() > 9 {
        return Err(Error::SizeGuard(
            "brute-force centralizer needs degree <= 9".into(),
        ));
    }
    Ok(Perm::all(q.degree())
        .into_iter()
        .filter(|c| q.generators().iter().all(|g| g.commutes_with(c)))
        .collect())
}

/// Greedy generating set for an enumerated group.
fn generate_from_elements(m: usize, elements: Vec<Perm>) -> PermGroup {
    let mut gens: Vec<Perm> = Vec::new();
    let mut have: HashSet<Perm> = HashSet::from([Perm::identity(m)]);
    for e in elements {
        if !have.contains(&e) {
            gens.push(e);
            have = closure(m, &gens, usize::MAX)
                .expect("subgroup of an enumerated group")
                .into_iter()
                .collect();
        }
    }
    PermGroup::new(m, gens).expect("degrees agree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: usize, s: &str) -> Perm {
        Perm::parse(m, s).unwrap()
    }

    fn group(m: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(m, gens.iter().map(|g| p(m, g)).collect()).unwrap()
    }

    #[test]
    fn orbit_types() {
        assert_eq!(orbits(&group(4, &["(1 2)(3 4)"])).orbit_type(), vec![2, 2]);
        assert_eq!(
            orbits(&PermGroup::trivial(4)).orbit_type(),
            vec![1, 1, 1, 1]
        );
        assert_eq!(orbits(&group(4, &["(1 2 3)"])).orbit_type(), vec![3, 1]);
        assert_eq!(
            orbits(&group(4, &["(2 4)"])).orbits(),
            &[vec![0], vec![1, 3], vec![2]]
        );
    }

    #[test]
    fn permutation_types() {
        let g = group(4, &["(1 2)(3 4)"]);
        let pt = permutation_type(&g, &orbits(&g)).unwrap();
        assert_eq!(pt[0].generators(), &[p(4, "(1 2)")]);
        assert_eq!(pt[1].generators(), &[p(4, "(3 4)")]);
        assert!(embeds_in_product(&g, &orbits(&g)));

        let g = group(4, &["(1 2)"]);
        let pt = permutation_type(&g, &orbits(&g)).unwrap();
        assert_eq!(pt.len(), 3);
        assert!(pt[1].generators().is_empty() && pt[2].generators().is_empty());
    }

    #[test]
    fn rigid_groups() {
        let part = orbits(&group(4, &["(1 2)(3 4)"]));
        assert_eq!(rigid_group(&part).generators(), &[p(4, "(1 3)(2 4)")]);
        assert!(is_rigid(&p(4, "(1 3)(2 4)"), &part));
        assert!(!is_rigid(&p(4, "(1 4)(2 3)"), &part));

        let part = orbits(&group(4, &["(1 2 3)"]));
        assert_eq!(rigid_group(&part).order().unwrap(), 1);

        let part = orbits(&group(4, &["(1 2)"]));
        assert_eq!(rigid_group(&part).generators(), &[p(4, "(3 4)")]);
    }

    #[test]
    fn centralizers() {
        assert_eq!(
            centralizer_sym(&group(4, &["(1 2)(3 4)"]))
                .unwrap()
                .order()
                .unwrap(),
            8
        );
        let c = centralizer_sym(&group(4, &["(1 2 3)"])).unwrap();
        assert!(c.same_elements(&group(4, &["(1 2 3)"])).unwrap());
        assert_eq!(
            centralizer_sym(&PermGroup::trivial(5))
                .unwrap()
                .order()
                .unwrap(),
            120
        );
        // not B(Q)S(Q): the block swap fails to commute with (1 2)
        assert_eq!(
            centralizer_sym(&group(4, &["(1 2)", "(3 4)"]))
                .unwrap()
                .order()
                .unwrap(),
            4
        );
    }

    #[test]
    fn non_abelian_path_matches_brute_force() {
        let q = group(6, &["(1 2 3)", "(1 2)"]);
        let c = centralizer_sym(&q).unwrap();
        let mut elems = c.elements().unwrap().to_vec();
        elems.sort();
        assert_eq!(elems, centralizer_sym_brute(&q).unwrap());
    }

    #[test]
    fn block_relabeling_makes_blocks_consecutive() {
        let q = group(4, &["(1 3)"]);
        let part = orbits(&q);
        let pi = part.block_relabeling();
        let moved = q.generators()[0].conjugate_by(&pi);
        assert_eq!(moved, p(4, "(1 2)"));
    }
}
