//! Vertex monomorphisms, partial diagonals and the factorization over orbits.
//!
//! `(a)δ_w` places `a` at the vertex `w` and the identity elsewhere;
//! `(a)δ_N` does the same at every vertex of an incomparable set `N`. The
//! partial diagonal `x_i` is `δ_{O_(i)}`, with `O_(i)` read as a set of
//! one-letter vertices. Words act left to right, so `(a)δ_u δ_v = (a)δ_{vu}`.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::permsym::{restrict, OrbitPartition};
use crate::tree::automaton::Automaton;
use crate::tree::automorphism::Automorphism;
use crate::tree::perm::Perm;
use crate::tree::portrait::{vertex_count, word_index, Portrait};

fn is_prefix(u: &[usize], v: &[usize]) -> bool {
    u.len() <= v.len() && v[..u.len()] == *u
}

/// Rejects vertex sets with a member that is a prefix of another.
pub fn check_incomparable(words: &[Vec<usize>]) -> Result<()> {
    for (i, u) in words.iter().enumerate() {
        for v in &words[i + 1..] {
            if is_prefix(u, v) || is_prefix(v, u) {
                return Err(Error::input(format!(
                    "vertices {:?} and {:?} are comparable",
                    crate::tree::perm::format_word(u),
                    crate::tree::perm::format_word(v)
                )));
            }
        }
    }
    Ok(())
}

/// `(a)δ_w`.
pub fn delta_vertex(a: &Automorphism, w: &[usize]) -> Result<Automorphism> {
    delta_set(a, &[w.to_vec()])
}

/// `(a)δ_N` for a pairwise incomparable set `N`; the empty set gives `e`.
pub fn delta_set(a: &Automorphism, n: &[Vec<usize>]) -> Result<Automorphism> {
    check_incomparable(n)?;
    let m = a.degree();
    if n.iter().flatten().any(|&y| y >= m) {
        return Err(Error::input("vertex letter out of range"));
    }
    build_delta(a, m, n)
}

fn build_delta(a: &Automorphism, m: usize, n: &[Vec<usize>]) -> Result<Automorphism> {
    if n.is_empty() {
        return Ok(Automorphism::identity(m));
    }
    if n.len() == 1 && n[0].is_empty() {
        return Ok(a.clone());
    }
    let children = (0..m)
        .map(|y| {
            let sub: Vec<Vec<usize>> = n
                .iter()
                .filter(|w| w[0] == y)
                .map(|w| w[1..].to_vec())
                .collect();
            build_delta(a, m, &sub)
        })
        .collect::<Result<Vec<_>>>()?;
    Automorphism::from_sections(&Perm::identity(m), &children)
}

/// Portrait of `(p)δ_N` at `depth`; `p` must reach `depth - |w|` for every
/// member `w` that is shorter than `depth`.
pub fn delta_set_portrait(p: &Portrait, n: &[Vec<usize>], depth: usize) -> Result<Portrait> {
    check_incomparable(n)?;
    let m = p.degree();
    let mut out = Portrait::identity(m, depth);
    let mut perms: Vec<Perm> = (0..vertex_count(m, depth))
        .map(|_| Perm::identity(m))
        .collect();
    for w in n {
        if w.len() >= depth {
            continue;
        }
        if p.depth() + w.len() < depth {
            return Err(Error::input("portrait too shallow for the requested depth"));
        }
        let base = word_index(m, w);
        for level in w.len()..depth {
            let rel = level - w.len();
            let width = m.pow(rel as u32);
            for k in 0..width {
                let idx = vertex_count(m, level) + base * width + k;
                perms[idx] = p.perm_at_index(rel, k);
            }
        }
    }
    if !n.is_empty() {
        out = Portrait::from_vertex_perms(m, depth, &perms)?;
    }
    Ok(out)
}

/// A finite pairwise-incomparable vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectingSet {
    m: usize,
    words: Vec<Vec<usize>>,
}

impl ConnectingSet {
    pub fn new(m: usize, words: Vec<Vec<usize>>) -> Result<Self> {
        if words.iter().flatten().any(|&y| y >= m) {
            return Err(Error::input("vertex letter out of range"));
        }
        check_incomparable(&words)?;
        Ok(ConnectingSet { m, words })
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Every vertex is comparable to some member. Checked on the level of
    /// the longest member, which decides it.
    pub fn is_complete(&self) -> bool {
        let depth = self.words.iter().map(|w| w.len()).max().unwrap_or(0);
        if self.words.is_empty() {
            return false;
        }
        (0..self.m.pow(depth as u32)).all(|idx| {
            let v = crate::tree::portrait::index_word(self.m, depth, idx);
            self.words.iter().any(|u| is_prefix(u, &v))
        })
    }
}

/// `Σ_{u ∈ U} δ_u` over an incomparable set `U`.
#[derive(Clone, Debug)]
pub struct MonoSum {
    vertices: Vec<Vec<usize>>,
}

impl MonoSum {
    pub fn new(vertices: Vec<Vec<usize>>) -> Result<Self> {
        check_incomparable(&vertices)?;
        Ok(MonoSum { vertices })
    }

    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    pub fn apply(&self, a: &Automorphism) -> Result<Automorphism> {
        delta_set(a, &self.vertices)
    }

    /// Distinct inputs (compared at `depth`) have distinct images (compared
    /// at `depth` plus the longest vertex).
    pub fn injective_on(&self, inputs: &[Automorphism], depth: usize) -> Result<bool> {
        let shift = self.vertices.iter().map(|w| w.len()).max().unwrap_or(0);
        let mut seen_in = HashSet::new();
        let mut seen_out = HashSet::new();
        for a in inputs {
            let pin = a.portrait(depth)?;
            let pout = self.apply(a)?.portrait(depth + shift)?;
            if seen_in.insert(pin) != seen_out.insert(pout) {
                return Ok(false);
            }
        }
        Ok(seen_in.len() == seen_out.len())
    }
}

/// A word over the partial diagonals `x_1..x_s`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DeltaWord(pub Vec<usize>);

impl DeltaWord {
    /// Parses `x1 x2 x1`; an empty string is the empty word.
    pub fn parse(s: usize, text: &str) -> Result<Self> {
        text.split_whitespace()
            .map(|t| {
                t.strip_prefix('x')
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&i| (1..=s).contains(&i))
                    .map(|i| i - 1)
                    .ok_or_else(|| Error::input(format!("bad diagonal letter {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(DeltaWord)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All words of length exactly `len` over `s` letters, lexicographic.
    pub fn all_of_length(s: usize, len: usize) -> Vec<DeltaWord> {
        let mut out = vec![DeltaWord::default()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..s).map(move |i| {
                        let mut v = w.0.clone();
                        v.push(i);
                        DeltaWord(v)
                    })
                })
                .collect();
        }
        out
    }

    /// Vertex set of `δ` equal to this word: `O_(i_L) × ... × O_(i_1)`.
    pub fn vertices(&self, partition: &OrbitPartition) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &i in self.0.iter().rev() {
            out = out
                .into_iter()
                .flat_map(|w: Vec<usize>| {
                    partition.orbit(i).iter().map(move |&y| {
                        let mut v = w.clone();
                        v.push(y);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for DeltaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("x{}", i + 1)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn orbit_vertices(partition: &OrbitPartition, i: usize) -> Result<Vec<Vec<usize>>> {
    if i >= partition.len() {
        return Err(Error::input(format!(
            "diagonal x{} does not exist, s = {}",
            i + 1,
            partition.len()
        )));
    }
    Ok(partition.orbit(i).iter().map(|&y| vec![y]).collect())
}

/// `a^{x_i}`: `a` at every letter of `O_(i)`, identity elsewhere.
pub fn x_i(a: &Automorphism, partition: &OrbitPartition, i: usize) -> Result<Automorphism> {
    check_degree(a.degree(), partition)?;
    delta_set(a, &orbit_vertices(partition, i)?)
}

/// `a^w`, applying the letters of `w` left to right.
pub fn apply_delta_word(
    a: &Automorphism,
    partition: &OrbitPartition,
    w: &DeltaWord,
) -> Result<Automorphism> {
    check_degree(a.degree(), partition)?;
    delta_set(a, &w.vertices(partition))
}

/// Portrait of `p^{x_i}` at `depth`; needs `p.depth() >= depth - 1`.
pub fn x_i_portrait(
    p: &Portrait,
    partition: &OrbitPartition,
    i: usize,
    depth: usize,
) -> Result<Portrait> {
    check_degree(p.degree(), partition)?;
    delta_set_portrait(p, &orbit_vertices(partition, i)?, depth)
}

pub fn apply_delta_word_portrait(
    p: &Portrait,
    partition: &OrbitPartition,
    w: &DeltaWord,
    depth: usize,
) -> Result<Portrait> {
    check_degree(p.degree(), partition)?;
    delta_set_portrait(p, &w.vertices(partition), depth)
}

fn check_degree(m: usize, partition: &OrbitPartition) -> Result<()> {
    if m != partition.degree() {
        return Err(Error::DegreeMismatch {
            expected: partition.degree(),
            found: m,
        });
    }
    Ok(())
}

/// `(r)κ` applied to `b`: `r^{-1} b r`.
pub fn conj_action(b: &Automorphism, r: &Automorphism) -> Result<Automorphism> {
    b.conjugate_by(r)
}

/// Both sides of `((a)δ_w)^r = (a^{r_w})δ_{(w)r}` at `depth`.
pub fn permutability_sides(
    a: &Automorphism,
    r: &Automorphism,
    w: &[usize],
    depth: usize,
) -> Result<(Portrait, Portrait)> {
    let lhs = delta_vertex(a, w)?
        .portrait(depth)?
        .conjugate_by(&r.portrait(depth)?);
    let rw = r.section(w)?;
    let image = r.act(w)?;
    let inner = a.portrait(depth.saturating_sub(w.len()))?;
    let inner = inner.conjugate_by(&rw.portrait(depth.saturating_sub(w.len()))?);
    let rhs = delta_set_portrait(&inner, &[image], depth)?;
    Ok((lhs, rhs))
}

/// `a = a_[1] ⋯ a_[s]`.
#[derive(Clone, Debug)]
pub struct FactorDecomposition {
    pub factors: Vec<Automorphism>,
}

impl FactorDecomposition {
    pub fn product(&self) -> Result<Automorphism> {
        let m = self.factors[0].degree();
        self.factors
            .iter()
            .try_fold(Automorphism::identity(m), |acc, f| acc.compose(f))
    }

    /// Product equals `a`, factors commute, and `a_[i]` is trivial off `O_(i)`.
    pub fn check(&self, a: &Automorphism, partition: &OrbitPartition) -> Result<bool> {
        if !self.product()?.equal(a)? {
            return Ok(false);
        }
        for (i, f) in self.factors.iter().enumerate() {
            for g in &self.factors[i + 1..] {
                if !f.compose(g)?.equal(&g.compose(f)?)? {
                    return Ok(false);
                }
            }
            let root = f.root_perm()?;
            let sections = f.sections()?;
            for y in 0..partition.degree() {
                if partition.orbit_of(y) != i
                    && (root.apply(y) != y || !sections[y].is_identity()?)
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The factors `a_[i]`: activity restricted to `O_(i)` and the sections of
/// `a` on `O_(i)`, identity elsewhere.
pub fn factor(a: &Automorphism, partition: &OrbitPartition) -> Result<FactorDecomposition> {
    check_degree(a.degree(), partition)?;
    let m = a.degree();
    let sigma = a.root_perm()?;
    if !partition.is_preserved_by(&sigma) {
        return Err(Error::input(
            "activity does not preserve the orbit partition",
        ));
    }
    let sections = a.sections()?;
    let factors = partition
        .orbits()
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let children: Vec<Automorphism> = (0..m)
                .map(|y| {
                    if partition.orbit_of(y) == i {
                        sections[y].clone()
                    } else {
                        Automorphism::identity(m)
                    }
                })
                .collect();
            Automorphism::from_sections(&restrict(&sigma, o), &children)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FactorDecomposition { factors })
}

/// Portrait version of [`factor`]; needs depth at least 1.
pub fn factor_portrait(p: &Portrait, partition: &OrbitPartition) -> Result<Vec<Portrait>> {
    check_degree(p.degree(), partition)?;
    if p.depth() == 0 {
        return Err(Error::input("factorization needs depth at least 1"));
    }
    let m = p.degree();
    let sigma = p.root_perm();
    if !partition.is_preserved_by(&sigma) {
        return Err(Error::input(
            "activity does not preserve the orbit partition",
        ));
    }
    let sections: Vec<Portrait> = (0..m).map(|y| p.section(&[y])).collect();
    let id = Portrait::identity(m, p.depth() - 1);
    partition
        .orbits()
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let children: Vec<Portrait> = (0..m)
                .map(|y| {
                    if partition.orbit_of(y) == i {
                        sections[y].clone()
                    } else {
                        id.clone()
                    }
                })
                .collect();
            Portrait::from_sections(&restrict(&sigma, o), &children)
        })
        .collect()
}

/// Generators of `B(G)`: every non-trivial factor of every generator.
pub fn b_group(gens: &[Automorphism], partition: &OrbitPartition) -> Result<Vec<Automorphism>> {
    let mut out = Vec::new();
    let mut seen: HashSet<Automaton> = HashSet::new();
    for g in gens {
        for f in factor(g, partition)?.factors {
            if !f.is_identity()? && seen.insert((*f.finite()?).clone()) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// `{g^ω : g ∈ gens, |ω| <= len}`, deduplicated, in order of word length.
pub fn delta_closure(
    gens: &[Automorphism],
    partition: &OrbitPartition,
    len: usize,
) -> Result<Vec<Automorphism>> {
    for g in gens {
        check_degree(g.degree(), partition)?;
        if !partition.is_preserved_by(&g.root_perm()?) {
            return Err(Error::input(
                "generator activity does not preserve the partition",
            ));
        }
    }
    let mut out = Vec::new();
    let mut seen: HashSet<Automaton> = HashSet::new();
    for l in 0..=len {
        for w in DeltaWord::all_of_length(partition.len(), l) {
            for g in gens {
                let h = apply_delta_word(g, partition, &w)?;
                if seen.insert((*h.finite()?).clone()) {
                    out.push(h);
                }
            }
        }
    }
    Ok(out)
}

/// Truncated version of [`delta_closure`] on portraits of depth `depth`.
/// Words longer than `depth - 1` only give the identity and are skipped.
pub fn delta_closure_portraits(
    gens: &[Portrait],
    partition: &OrbitPartition,
    len: usize,
    depth: usize,
) -> Result<Vec<Portrait>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for l in 0..=len.min(depth.saturating_sub(1)) {
        for w in DeltaWord::all_of_length(partition.len(), l) {
            for g in gens {
                let h = apply_delta_word_portrait(g, partition, &w, depth)?;
                if !h.is_identity() && seen.insert(h.clone()) {
                    out.push(h);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permsym::{activity_group, orbits};
    use crate::tree::format::parse_automaton;

    fn aut(text: &str) -> Automorphism {
        parse_automaton(text)
            .unwrap()
            .generators()
            .unwrap()
            .remove(0)
    }

    fn adding() -> Automorphism {
        aut("m 2\nstate a perm 2 1 to e a\ninit a\n")
    }

    fn double() -> Automorphism {
        aut("m 4\nstate a perm 2 1 4 3 to e a e a\ninit a\n")
    }

    fn part(a: &Automorphism) -> OrbitPartition {
        orbits(&activity_group(std::slice::from_ref(a)).unwrap())
    }

    #[test]
    fn delta_vertex_places_section() {
        let a = adding();
        let d = delta_vertex(&a, &[0]).unwrap();
        assert!(d.section(&[0]).unwrap().equal(&a).unwrap());
        assert!(d.section(&[1]).unwrap().is_identity().unwrap());
        let d = delta_vertex(&a, &[1, 0]).unwrap();
        assert!(d.section(&[1, 0]).unwrap().equal(&a).unwrap());
        // (a)δ_1 δ_2 = (a)δ_{21}
        let two = delta_vertex(&delta_vertex(&a, &[0]).unwrap(), &[1]).unwrap();
        assert!(two.equal(&d).unwrap());
    }

    #[test]
    fn delta_sets() {
        let a = adding();
        let both = delta_set(&a, &[vec![0], vec![1]]).unwrap();
        assert!(both.equal(&a.pow(2).unwrap()).unwrap());
        assert!(delta_set(&a, &[]).unwrap().is_identity().unwrap());
        assert!(delta_set(&a, &[vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn mono_sum_is_injective_on_powers() {
        let a = adding();
        let sum = MonoSum::new(vec![vec![0], vec![1, 0]]).unwrap();
        let img = sum.apply(&a).unwrap();
        assert!(img.section(&[0]).unwrap().equal(&a).unwrap());
        assert!(img.section(&[1, 0]).unwrap().equal(&a).unwrap());
        let inputs: Vec<_> = (0..8).map(|k| a.pow(k).unwrap()).collect();
        assert!(sum.injective_on(&inputs, 4).unwrap());
    }

    #[test]
    fn partial_diagonals() {
        let d = double();
        let p = part(&d);
        let x1 = x_i(&d, &p, 0).unwrap();
        let e = Automorphism::identity(4);
        let expect =
            Automorphism::from_sections(&Perm::identity(4), &[d.clone(), d.clone(), e.clone(), e])
                .unwrap();
        assert!(x1.equal(&expect).unwrap());

        let a = adding();
        let x = x_i(&a, &part(&a), 0).unwrap();
        assert!(x.equal(&a.pow(2).unwrap()).unwrap());
    }

    #[test]
    fn delta_words_act_left_to_right() {
        let d = double();
        let p = part(&d);
        let w = DeltaWord::parse(2, "x1 x2").unwrap();
        let direct = apply_delta_word(&d, &p, &w).unwrap();
        let stepwise = x_i(&x_i(&d, &p, 0).unwrap(), &p, 1).unwrap();
        assert!(direct.equal(&stepwise).unwrap());
        assert_eq!(w.to_string(), "x1 x2");
        for depth in 1..5 {
            let pd = apply_delta_word_portrait(&d.portrait(depth).unwrap(), &p, &w, depth).unwrap();
            assert_eq!(pd, direct.portrait(depth).unwrap());
        }
    }

    #[test]
    fn permutability_example() {
        // ((a)δ_1)^a = (a)δ_2 for the adding machine
        let a = adding();
        let (l, r) = permutability_sides(&a, &a, &[0], 5).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, delta_vertex(&a, &[1]).unwrap().portrait(5).unwrap());
    }

    #[test]
    fn factors_of_double_adding_machine() {
        let d = double();
        let p = part(&d);
        let f = factor(&d, &p).unwrap();
        let e = Automorphism::identity(4);
        let f1 = Automorphism::from_sections(
            &Perm::parse(4, "(1 2)").unwrap(),
            &[e.clone(), d.clone(), e.clone(), e.clone()],
        )
        .unwrap();
        let f2 = Automorphism::from_sections(
            &Perm::parse(4, "(3 4)").unwrap(),
            &[e.clone(), e.clone(), e, d.clone()],
        )
        .unwrap();
        assert!(f.factors[0].equal(&f1).unwrap());
        assert!(f.factors[1].equal(&f2).unwrap());
        assert!(f.check(&d, &p).unwrap());
    }

    #[test]
    fn connecting_sets() {
        assert!(ConnectingSet::new(2, vec![vec![0], vec![1, 0], vec![1, 1]])
            .unwrap()
            .is_complete());
        assert!(!ConnectingSet::new(2, vec![vec![0], vec![1, 0]])
            .unwrap()
            .is_complete());
        assert!(ConnectingSet::new(2, vec![vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn closure_of_adding_machine_stays_cyclic() {
        let a = adding();
        let c = delta_closure(std::slice::from_ref(&a), &part(&a), 3).unwrap();
        // a, a^2, a^4, a^8
        assert_eq!(c.len(), 4);
        assert!(c[3].equal(&a.pow(8).unwrap()).unwrap());
    }
}
