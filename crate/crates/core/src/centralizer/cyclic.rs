//! Cyclic self-similar groups `A = <a>` with `a = (a^{i_1}, ..., a^{i_m}) σ`.
//!
//! Powers of `a` are generated lazily: the state `a^n` has permutation `σ^n`
//! and section `a^{e(n, y)}` at `y`, where `e(n, y)` sums the exponents along
//! the `σ`-orbit of `y`. The generator is always self-similar but need not
//! be finite-state, so everything downstream works on portraits.

use std::fmt;
use std::sync::Arc;

use crate::centralizer::solver::{Mode, Problem};
use crate::error::{Error, Result};
use crate::permsym::{
    centralizer_sym, is_rigid, orbits_of, rigid_group, OrbitPartition, PermGroup,
};
use crate::tree::automorphism::Automorphism;
use crate::tree::lazy::LazyAutomaton;
use crate::tree::perm::Perm;
use crate::tree::portrait::Portrait;

#[derive(Clone)]
pub struct CyclicGenerator {
    sigma: Perm,
    exps: Vec<i64>,
    machine: Arc<LazyAutomaton<i128>>,
}

impl fmt::Debug for CyclicGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CyclicGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exps.iter().map(|&i| power_name(i)).collect();
        write!(f, "({}){}", parts.join(","), self.sigma.cycle_string())
    }
}

/// `e`, `a`, `a^k`.
pub fn power_name(i: i64) -> String {
    match i {
        0 => "e".to_string(),
        1 => "a".to_string(),
        _ => format!("a^{i}"),
    }
}

/// Exponent of the section of `a^n` at `y`.
fn section_exponent(sigma: &Perm, inv: &Perm, exps: &[i64], n: i128, y: usize) -> i128 {
    let mut e: i128 = 0;
    if n >= 0 {
        let mut z = y;
        for _ in 0..n {
            e += exps[z] as i128;
            z = sigma.apply(z);
        }
    } else {
        let mut z = y;
        for _ in 0..(-n) {
            z = inv.apply(z);
            e -= exps[z] as i128;
        }
    }
    e
}

impl CyclicGenerator {
    pub fn new(sigma: Perm, exps: Vec<i64>) -> Result<Self> {
        let m = sigma.degree();
        if exps.len() != m {
            return Err(Error::input(format!(
                "expected {m} exponents, found {}",
                exps.len()
            )));
        }
        let (s, e) = (sigma.clone(), exps.clone());
        let inv = sigma.inverse();
        // reduce n modulo whole cycles so repeated powers stay cheap
        let cycles = sigma.cycles();
        let machine = LazyAutomaton::new(m, move |&n: &i128| {
            let perm = s.pow((n % (s.order() as i128)) as i64);
            let children = (0..m)
                .map(|y| {
                    let c = cycles.iter().find(|c| c.contains(&y)).expect("cycle");
                    let len = c.len() as i128;
                    let total: i128 = c.iter().map(|&z| e[z] as i128).sum();
                    let (q, r) = (n.div_euclid(len), n.rem_euclid(len));
                    q * total + section_exponent(&s, &inv, &e, r, y)
                })
                .collect();
            (perm, children)
        })
        .with_labels(|&n: &i128| power_name(n as i64));
        Ok(CyclicGenerator {
            sigma,
            exps,
            machine: Arc::new(machine),
        })
    }

    /// Reads `a = (a^{i_1}, ..., a^{i_m}) σ` off a finite-state automorphism
    /// by matching each section against `a^n`, `|n| <= bound`.
    pub fn from_automorphism(a: &Automorphism, bound: i64) -> Result<Self> {
        let sections = a.sections()?;
        let mut powers = Vec::new();
        for n in -bound..=bound {
            powers.push((n, a.pow(n)?));
        }
        let mut exps = Vec::with_capacity(sections.len());
        for (y, s) in sections.iter().enumerate() {
            let mut hit = None;
            for (n, p) in &powers {
                if s.equal(p)? {
                    hit = Some(*n);
                    break;
                }
            }
            match hit {
                Some(n) => exps.push(n),
                None => {
                    return Err(Error::NotSelfSimilar(format!(
                        "section at letter {} is not a power a^n with |n| <= {bound}",
                        y + 1
                    )))
                }
            }
        }
        // n = 0 is found before larger exponents only if ordered by size
        let exps = exps
            .into_iter()
            .zip(&sections)
            .map(|(n, s)| {
                let mut best = n;
                for (k, p) in &powers {
                    if k.abs() < best.abs() && s.equal(p).unwrap_or(false) {
                        best = *k;
                    }
                }
                best
            })
            .collect();
        CyclicGenerator::new(a.root_perm()?, exps)
    }

    pub fn degree(&self) -> usize {
        self.sigma.degree()
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn power(&self, n: i64) -> Automorphism {
        Automorphism::lazy(self.machine.clone(), &(n as i128))
    }

    pub fn a(&self) -> Automorphism {
        self.power(1)
    }

    pub fn partition(&self) -> OrbitPartition {
        orbits_of(self.degree(), std::slice::from_ref(&self.sigma))
    }

    /// Cycles of `σ`, each starting at its minimal letter.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.sigma.cycles()
    }

    /// Exponent sum `j` over each cycle.
    pub fn cycle_sums(&self) -> Vec<i64> {
        self.cycles()
            .iter()
            .map(|c| c.iter().map(|&y| self.exps[y]).sum())
            .collect()
    }
}

/// First term of the normal-form conjugator: on each cycle
/// `y_1 -> y_2 -> ... -> y_L` of the root permutation,
/// `g_{y_1} = a_{y_1}` and `g_{y_{t+1}} = a_{y_t}^{-1} g_{y_t}`.
pub fn first_term(a: &Automorphism) -> Result<Automorphism> {
    let sigma = a.root_perm()?;
    let sections = a.sections()?;
    let m = a.degree();
    let mut g: Vec<Option<Automorphism>> = vec![None; m];
    for cycle in sigma.cycles() {
        let mut cur = sections[cycle[0]].clone();
        g[cycle[0]] = Some(cur.clone());
        for w in cycle.windows(2) {
            cur = sections[w[0]].inverse()?.compose(&cur)?;
            g[w[1]] = Some(cur.clone());
        }
    }
    let g: Vec<Automorphism> = g
        .into_iter()
        .map(|x| x.expect("every letter on a cycle"))
        .collect();
    Automorphism::from_sections(&Perm::identity(m), &g)
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub conjugator: Portrait,
    pub normal: Portrait,
}

/// Truncated normal-form conjugator `g` with `b = a^g` in right normal
/// form. Each cycle's section product `c` is normalized recursively and
/// its conjugator is spread over the cycle.
pub fn normal_form_conjugator(a: &Portrait) -> NormalForm {
    let g = nf_conjugator(a);
    let normal = a.conjugate_by(&g);
    NormalForm {
        conjugator: g,
        normal,
    }
}

fn nf_conjugator(p: &Portrait) -> Portrait {
    let m = p.degree();
    let depth = p.depth();
    if depth == 0 {
        return Portrait::identity(m, 0);
    }
    let sigma = p.root_perm();
    let s: Vec<Portrait> = (0..m).map(|y| p.section(&[y])).collect();
    let mut g: Vec<Portrait> = vec![Portrait::identity(m, depth - 1); m];
    for cycle in sigma.cycles() {
        let mut cur = s[cycle[0]].clone();
        let mut terms = vec![cur.clone()];
        for w in cycle.windows(2) {
            cur = s[w[0]].inverse().compose(&cur);
            terms.push(cur.clone());
        }
        let last = *cycle.last().expect("non-empty");
        let c = cur.inverse().compose(&s[last]).compose(&terms[0]);
        let h = nf_conjugator(&c);
        for (&y, t) in cycle.iter().zip(terms) {
            g[y] = t.compose(&h);
        }
    }
    Portrait::from_sections(&Perm::identity(m), &g).expect("consistent depths")
}

/// Right normal form: on every cycle of the root permutation all sections
/// are trivial except at the last letter, whose section is again in right
/// normal form.
pub fn is_right_normal(p: &Portrait) -> bool {
    if p.depth() == 0 {
        return true;
    }
    p.root_perm().cycles().iter().all(|cycle| {
        let last = *cycle.last().expect("non-empty");
        cycle[..cycle.len() - 1]
            .iter()
            .all(|&y| p.section(&[y]).is_identity())
            && is_right_normal(&p.section(&[last]))
    })
}

/// Some `c` with `x^c = y` modulo `Stab(depth)`, or `None` if there is none
/// at this depth.
pub fn conjugate_at_depth(x: &Portrait, y: &Portrait, depth: usize) -> Result<Option<Portrait>> {
    let out = Problem::twisted(x.degree(), depth, vec![(x.clone(), y.clone())])?
        .solve(Mode::FindFirst)?;
    Ok(out.solutions.into_iter().next())
}

/// A conjugator `g` with `(a^ξ)^g = a` at `depth`, found by the level-wise
/// search; `None` certifies non-conjugacy at this depth.
pub fn conjugator_unit_power(a: &Automorphism, xi: i64, depth: usize) -> Result<Option<Portrait>> {
    let p = a.portrait(depth)?;
    conjugate_at_depth(&p.pow(xi), &p, depth)
}

/// One orbit of the first-level stabilizer:
/// `{(c, c^{a^{E_2}}, ..., c^{a^{E_L}}) : c ∈ C(a^j)}` on the letters of a
/// cycle, `E_t` the running exponent sums from the representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitComponent {
    pub letters: Vec<usize>,
    pub chain: Vec<i64>,
    pub j: i64,
}

impl fmt::Display for OrbitComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.letters.iter().map(|y| (y + 1).to_string()).collect();
        let entries: Vec<String> = self
            .chain
            .iter()
            .map(|&e| {
                if e == 0 {
                    "c".to_string()
                } else {
                    format!("c^({})", power_name(e))
                }
            })
            .collect();
        write!(
            f,
            "letters {}: ({}) with c in C({})",
            letters.join(","),
            entries.join(", "),
            power_name(self.j)
        )
    }
}

#[derive(Clone, Debug)]
pub struct RigidLift {
    pub xi: Perm,
    pub lift: Option<Portrait>,
}

#[derive(Clone, Debug)]
pub struct CentralizerDescription {
    pub depth: usize,
    pub stab1_components: Vec<OrbitComponent>,
    /// Factors `a_[i]` as portraits at `depth`.
    pub b_part: Vec<Portrait>,
    pub rigid_part: Vec<RigidLift>,
    pub s_candidates: Vec<Perm>,
}

impl CentralizerDescription {
    /// Element of `Stab_C(1)` with the given per-component values `c`
    /// (portraits of depth `depth - 1`).
    pub fn instantiate(&self, gen: &CyclicGenerator, values: &[Portrait]) -> Result<Portrait> {
        let m = gen.degree();
        let sub = self.depth - 1;
        let mut children = vec![Portrait::identity(m, sub); m];
        for (comp, c) in self.stab1_components.iter().zip(values) {
            for (&y, &e) in comp.letters.iter().zip(&comp.chain) {
                children[y] = c.conjugate_by(&gen.power(e).portrait(sub)?);
            }
        }
        Portrait::from_sections(&Perm::identity(m), &children)
    }
}

impl fmt::Display for CentralizerDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Stab_C(1) components at depth {}:", self.depth)?;
        for c in &self.stab1_components {
            writeln!(f, "  {c}")?;
        }
        writeln!(f, "B(A) generators: {}", self.b_part.len())?;
        for r in &self.rigid_part {
            match &r.lift {
                Some(l) => writeln!(f, "rigid {} lifts: {l}", r.xi.cycle_string())?,
                None => writeln!(
                    f,
                    "rigid {} has no lift at depth {}",
                    r.xi.cycle_string(),
                    self.depth
                )?,
            }
        }
        Ok(())
    }
}

/// Centralizer of a cyclic self-similar group: the first-level stabilizer
/// as per-orbit chains, `B(A)`, and a search for lifts of each rigid
/// permutation that centralizes `P(A)`.
pub fn cyclic_centralizer(gen: &CyclicGenerator, depth: usize) -> Result<CentralizerDescription> {
    if depth == 0 {
        return Err(Error::input("depth must be at least 1"));
    }
    let m = gen.degree();
    let partition = gen.partition();
    let mut comps = Vec::new();
    for cycle in gen.cycles() {
        let mut chain = Vec::with_capacity(cycle.len());
        let mut run = 0i64;
        for &y in &cycle {
            chain.push(run);
            run += gen.exps[y];
        }
        comps.push(OrbitComponent {
            letters: cycle,
            chain,
            j: run,
        });
    }
    comps.sort_by_key(|c| c.letters[0]);

    let a = gen.a().portrait(depth)?;
    let b_part = crate::diag::factor_portrait(&a, &partition)?
        .into_iter()
        .filter(|f| !f.is_identity())
        .collect();

    let activity = PermGroup::new(m, vec![gen.sigma.clone()])?;
    let csym = centralizer_sym(&activity)?;
    let mut s_candidates = Vec::new();
    for xi in rigid_group(&partition).elements()? {
        if !xi.is_identity() && is_rigid(xi, &partition) && csym.contains(xi)? {
            s_candidates.push(xi.clone());
        }
    }
    let mut rigid_part = Vec::new();
    for xi in &s_candidates {
        // identity sections first
        let bare = Portrait::from_sections(xi, &vec![Portrait::identity(m, depth - 1); m])?;
        if bare.commutes_with(&a) {
            rigid_part.push(RigidLift {
                xi: xi.clone(),
                lift: Some(bare),
            });
            continue;
        }
        let out = Problem::centralizer(m, depth, std::slice::from_ref(&a))?
            .with_root_candidates(vec![xi.clone()])
            .solve(Mode::FindFirst)?;
        rigid_part.push(RigidLift {
            xi: xi.clone(),
            lift: out.solutions.into_iter().next(),
        });
    }
    Ok(CentralizerDescription {
        depth,
        stab1_components: comps,
        b_part,
        rigid_part,
        s_candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::format::parse_automaton;

    fn p(m: usize, s: &str) -> Perm {
        Perm::parse(m, s).unwrap()
    }

    #[test]
    fn power_automaton_matches_composition() {
        let gen = CyclicGenerator::new(p(4, "(1 2)(3 4)"), vec![0, 1, 0, 1]).unwrap();
        let a = gen.a().to_finite(100).unwrap();
        for n in -5..=5 {
            assert!(gen.power(n).equal_at_depth(&a.pow(n).unwrap(), 5).unwrap());
        }
        let gen = CyclicGenerator::new(p(4, "(1 2 3)"), vec![1, -2, 0, 3]).unwrap();
        let a = gen.a().portrait(4).unwrap();
        for n in -4..=4 {
            assert_eq!(gen.power(n).portrait(4).unwrap(), a.pow(n));
        }
    }

    #[test]
    fn reads_exponents_back() {
        let a = parse_automaton("m 4\nstate a perm 2 1 4 3 to e a e a\ninit a\n")
            .unwrap()
            .generators()
            .unwrap()
            .remove(0);
        let gen = CyclicGenerator::from_automorphism(&a, 4).unwrap();
        assert_eq!(gen.exps(), &[0, 1, 0, 1]);
        assert_eq!(gen.cycle_sums(), vec![1, 1]);
    }

    #[test]
    fn first_term_example() {
        // a = (a, e)(1 2): g = (a, e) and a^g = (e, a)(1 2)
        let gen = CyclicGenerator::new(p(2, "(1 2)"), vec![1, 0]).unwrap();
        let a = gen.a().to_finite(100).unwrap();
        let g = first_term(&a).unwrap();
        let e = Automorphism::identity(2);
        let expect_g =
            Automorphism::from_sections(&Perm::identity(2), &[a.clone(), e.clone()]).unwrap();
        assert!(g.equal(&expect_g).unwrap());
        let b = a.conjugate_by(&g).unwrap();
        let s = b.sections().unwrap();
        assert!(s[0].is_identity().unwrap());
        assert!(s[1].equal(&a).unwrap());
    }

    #[test]
    fn normal_form_is_normal() {
        for exps in [vec![1, 0], vec![2, -1], vec![0, 1], vec![3, 3]] {
            let gen = CyclicGenerator::new(p(2, "(1 2)"), exps).unwrap();
            let a = gen.a().portrait(5).unwrap();
            let nf = normal_form_conjugator(&a);
            assert!(is_right_normal(&nf.normal));
        }
        let gen = CyclicGenerator::new(p(4, "(1 2)(3 4)"), vec![0, 1, 0, 1]).unwrap();
        let a = gen.a().portrait(4).unwrap();
        let nf = normal_form_conjugator(&a);
        assert!(nf.conjugator.is_identity());
        assert_eq!(nf.normal, a);
    }

    #[test]
    fn unit_power_conjugators() {
        let gen = CyclicGenerator::new(p(2, "(1 2)"), vec![0, 1]).unwrap();
        let a = gen.a();
        let g = conjugator_unit_power(&a, 3, 5).unwrap().unwrap();
        let pa = a.portrait(5).unwrap();
        assert_eq!(pa.pow(3).conjugate_by(&g), pa);
        assert!(conjugator_unit_power(&a, 1, 5)
            .unwrap()
            .unwrap()
            .is_identity());
        assert!(conjugator_unit_power(&a, 2, 3).unwrap().is_none());
    }

    #[test]
    fn double_adding_rigid_lift() {
        let gen = CyclicGenerator::new(p(4, "(1 2)(3 4)"), vec![0, 1, 0, 1]).unwrap();
        let d = cyclic_centralizer(&gen, 3).unwrap();
        assert_eq!(d.s_candidates, vec![p(4, "(1 3)(2 4)")]);
        let lift = d.rigid_part[0].lift.as_ref().unwrap();
        assert!(lift.commutes_with(&gen.a().portrait(3).unwrap()));
        assert_eq!(d.stab1_components[0].j, 1);
        assert_eq!(d.stab1_components[1].chain, vec![0, 0]);
    }
}
