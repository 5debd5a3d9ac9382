//! Truncated checks of the centralizer theorems for abelian self-similar
//! groups: `C(Δ(A)) = closure of Δ(B(A))`, the finitely generated variant
//! with `H <= B(A)`, the structure of `C(A)`, and exponents of torsion
//! examples.

use std::collections::HashSet;

use crate::centralizer::solver::{Mode, Problem};
use crate::centralizer::truncated::{TruncatedGroup, ENUM_GUARD};
use crate::diag::{delta_closure_portraits, factor_portrait, x_i_portrait};
use crate::error::{Error, Result};
use crate::permsym::{
    activity_group, centralizer_sym, is_rigid, orbits_of, permutation_type, OrbitPartition,
    PermGroup,
};
use crate::report::Report;
use crate::tree::automorphism::Automorphism;
use crate::tree::perm::Perm;
use crate::tree::portrait::Portrait;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Restrict vertex permutations of the searched centralizer to the
    /// activity group of `B(A)`.
    pub layer_guard: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { layer_guard: true }
    }
}

/// Generators with their orbit partition, as depth-`depth` portraits.
pub struct Setup {
    pub m: usize,
    pub depth: usize,
    pub partition: OrbitPartition,
    pub activity: PermGroup,
    pub gens: Vec<Portrait>,
}

impl Setup {
    pub fn new(gens: &[Automorphism], depth: usize) -> Result<Self> {
        let activity = activity_group(gens)?;
        let m = activity.degree();
        let partition = orbits_of(m, activity.generators());
        let gens = gens
            .iter()
            .map(|g| g.portrait(depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(Setup {
            m,
            depth,
            partition,
            activity,
            gens,
        })
    }

    pub fn from_portraits(m: usize, depth: usize, gens: Vec<Portrait>) -> Result<Self> {
        if gens.iter().any(|g| g.degree() != m || g.depth() != depth) {
            return Err(Error::input(
                "generator portraits must share degree and depth",
            ));
        }
        let roots: Vec<Perm> = gens.iter().map(|g| g.root_perm()).collect();
        let activity = PermGroup::new(m, roots)?;
        let partition = orbits_of(m, activity.generators());
        Ok(Setup {
            m,
            depth,
            partition,
            activity,
            gens,
        })
    }

    /// Same generators truncated to a smaller depth.
    pub fn truncate(&self, depth: usize) -> Setup {
        Setup {
            m: self.m,
            depth,
            partition: self.partition.clone(),
            activity: self.activity.clone(),
            gens: self.gens.iter().map(|g| g.truncate(depth)).collect(),
        }
    }

    /// Elements of `P(B(A)) = P_(1) x ... x P_(s)`.
    pub fn layer_perms(&self) -> Result<Vec<Perm>> {
        let factors = permutation_type(&self.activity, &self.partition)?;
        let gens: Vec<Perm> = factors
            .iter()
            .flat_map(|f| f.generators().to_vec())
            .collect();
        Ok(PermGroup::new(self.m, gens)?.elements()?.to_vec())
    }

    /// Portraits of the `B(A)` generators.
    pub fn b_gens(&self) -> Result<Vec<Portrait>> {
        if self.depth == 0 {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for g in &self.gens {
            for f in factor_portrait(g, &self.partition)? {
                if !f.is_identity() && seen.insert(f.clone()) {
                    out.push(f);
                }
            }
        }
        Ok(out)
    }

    /// Portraits of generators of `H`: per orbit, factors whose activities
    /// are needed to generate the orbit's activity group.
    pub fn h_gens(&self) -> Result<Vec<Portrait>> {
        if self.depth == 0 {
            return Ok(Vec::new());
        }
        let factors: Vec<Vec<Portrait>> = self
            .gens
            .iter()
            .map(|g| factor_portrait(g, &self.partition))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for i in 0..self.partition.len() {
            let mut chosen: Vec<Perm> = Vec::new();
            for f in &factors {
                let root = f[i].root_perm();
                let have = PermGroup::new(self.m, chosen.clone())?;
                if !root.is_identity() && !have.contains(&root)? {
                    chosen.push(root);
                    out.push(f[i].clone());
                }
            }
        }
        Ok(out)
    }

    /// Δ-closure of the generators with words up to `depth - 1`.
    pub fn delta_gens(&self) -> Result<Vec<Portrait>> {
        delta_closure_portraits(&self.gens, &self.partition, self.depth, self.depth)
    }

    /// `C(Δ(A)) mod Stab(depth)`, by the level-wise solver.
    pub fn delta_centralizer(&self, opts: VerifyOptions) -> Result<TruncatedGroup> {
        let xs = self.delta_gens()?;
        let mut problem = Problem::centralizer(self.m, self.depth, &xs)?
            .with_root_candidates(centralizer_sym(&self.activity)?.elements()?.to_vec());
        if opts.layer_guard {
            problem = problem.with_allowed(self.layer_perms()?);
        }
        let out = problem.solve(Mode::Enumerate)?;
        Ok(TruncatedGroup::from_elements(
            self.m,
            self.depth,
            out.solutions,
        ))
    }

    /// `C(A) mod Stab(depth)` in the full truncated ambient.
    pub fn centralizer(&self) -> Result<TruncatedGroup> {
        let out = Problem::centralizer(self.m, self.depth, &self.gens)?
            .with_root_candidates(centralizer_sym(&self.activity)?.elements()?.to_vec())
            .solve(Mode::Enumerate)?;
        Ok(TruncatedGroup::from_elements(
            self.m,
            self.depth,
            out.solutions,
        ))
    }

    /// Truncated group generated by the Δ-closure of `gens`.
    pub fn delta_generated(&self, gens: &[Portrait]) -> Result<TruncatedGroup> {
        let closure = delta_closure_portraits(gens, &self.partition, self.depth, self.depth)?;
        TruncatedGroup::generate(self.m, self.depth, &closure, ENUM_GUARD)
    }

    pub fn generators_commute(&self) -> bool {
        pairwise_commute(&self.gens)
    }
}

fn pairwise_commute(gens: &[Portrait]) -> bool {
    gens.iter()
        .enumerate()
        .all(|(i, g)| gens[i + 1..].iter().all(|h| g.commutes_with(h)))
}

fn theorem_report(
    title: &str,
    setup: &Setup,
    side_b_gens: &[Portrait],
    side_b_name: &str,
    opts: VerifyOptions,
) -> Result<Report> {
    let mut r = Report::new(title);
    let depth = setup.depth;
    r.fact(format!("degree {} depth {}", setup.m, depth));
    r.fact(format!("orbits {}", setup.partition));
    r.fact(format!(
        "ambient {}",
        if opts.layer_guard {
            "layer closure of P(B(A))"
        } else {
            "full truncated ambient"
        }
    ));
    r.check("A abelian", setup.generators_commute(), "");
    let side_a = setup.delta_centralizer(opts)?;
    let side_b = setup.delta_generated(side_b_gens)?;
    r.fact(format!("|C(Delta(A))| = {}", side_a.order()));
    r.fact(format!("|<Delta({side_b_name})>| = {}", side_b.order()));
    r.check(
        "side (a) equals side (b)",
        side_a == side_b,
        format!("{} vs {}", side_a.order(), side_b.order()),
    );
    let rigid_bad = side_a
        .elements()
        .iter()
        .filter(|c| {
            let root = c.root_perm();
            !root.is_identity() && is_rigid(&root, &setup.partition)
        })
        .count();
    r.check(
        "rigid part empty",
        rigid_bad == 0,
        format!("{rigid_bad} elements with a rigid root"),
    );
    let moved = side_a
        .elements()
        .iter()
        .filter(|c| !setup.partition.is_preserved_by(&c.root_perm()))
        .count();
    r.check(
        "orbits invariant",
        moved == 0,
        format!("{moved} elements move an orbit"),
    );
    if depth >= 1 {
        let lower = setup.truncate(depth - 1).delta_centralizer(opts)?;
        let stab = side_a.stabilizer_level1();
        let shaped = stab.iter().all(|c| {
            setup.partition.orbits().iter().all(|o| {
                let first = c.section(&[o[0]]);
                lower.contains(&first) && o.iter().all(|&y| c.section(&[y]) == first)
            })
        });
        let expected = (lower.order() as u128).pow(setup.partition.len() as u32);
        r.check(
            "stabilizer is a product of diagonal copies",
            shaped && stab.len() as u128 == expected,
            format!(
                "|Stab(1)| = {}, |C at depth {}|^s = {expected}",
                stab.len(),
                depth - 1
            ),
        );
    }
    Ok(r)
}

/// Truncated form of `C(Δ(A)) = closure of Δ(B(A))`.
pub fn verify_theorem_a(
    gens: &[Automorphism],
    depth: usize,
    opts: VerifyOptions,
) -> Result<Report> {
    let setup = Setup::new(gens, depth)?;
    let b = setup.b_gens()?;
    theorem_report(
        "centralizer of the diagonal closure versus B(A)",
        &setup,
        &b,
        "B(A)",
        opts,
    )
}

/// Same comparison with a finitely generated `H <= B(A)` built from one
/// activity-generating set per orbit.
pub fn verify_theorem_b(
    gens: &[Automorphism],
    depth: usize,
    opts: VerifyOptions,
) -> Result<Report> {
    let setup = Setup::new(gens, depth)?;
    let h = setup.h_gens()?;
    let mut r = theorem_report(
        "centralizer of the diagonal closure versus H",
        &setup,
        &h,
        "H",
        opts,
    )?;
    r.fact(format!("H has {} generators", h.len()));
    Ok(r)
}

/// Exponent of a truncated group given by generators: lcm of generator
/// orders when they commute, otherwise by enumeration.
pub fn group_exponent(m: usize, depth: usize, gens: &[Portrait]) -> Result<u64> {
    if pairwise_commute(gens) {
        Ok(gens
            .iter()
            .fold(1, |acc, g| num_integer::lcm(acc, g.order())))
    } else {
        Ok(TruncatedGroup::generate(m, depth, gens, ENUM_GUARD)?.exponent())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentCheck {
    pub depth: usize,
    pub closure: u64,
    pub h: u64,
}

/// Exponents of the truncated Δ-closure of `B(A)` and of `H`.
pub fn exponent_check(gens: &[Automorphism], depth: usize) -> Result<ExponentCheck> {
    let setup = Setup::new(gens, depth)?;
    let closure = delta_closure_portraits(&setup.b_gens()?, &setup.partition, depth, depth)?;
    Ok(ExponentCheck {
        depth,
        closure: group_exponent(setup.m, depth, &closure)?,
        h: group_exponent(setup.m, depth, &setup.h_gens()?)?,
    })
}

/// Structural checks on `C(A)` for an abelian self-similar `A`.
pub fn verify_prop_4_2(gens: &[Automorphism], depth: usize) -> Result<Report> {
    let setup = Setup::new(gens, depth)?;
    let mut r = Report::new("structure of the centralizer of A");
    r.fact(format!("degree {} depth {}", setup.m, depth));
    r.fact(format!("orbits {}", setup.partition));
    r.check("A abelian", setup.generators_commute(), "");
    let a = TruncatedGroup::generate(setup.m, depth, &setup.gens, ENUM_GUARD)?;
    let c = setup.centralizer()?;
    r.fact(format!("|A| = {}, |C(A)| = {}", a.order(), c.order()));

    let constant = a.stabilizer_level1().iter().all(|g| {
        setup.partition.orbits().iter().all(|o| {
            let first = g.section(&[o[0]]);
            o.iter().all(|&y| g.section(&[y]) == first)
        })
    });
    r.check("(i) stabilizer sections constant on orbits", constant, "");

    let csym = centralizer_sym(&setup.activity)?;
    let mut roots_ok = true;
    for g in c.elements() {
        roots_ok &= csym.contains(&g.root_perm())?;
    }
    r.check("(ii) activities of C(A) centralize P(A)", roots_ok, "");

    let b = TruncatedGroup::generate(setup.m, depth, &setup.b_gens()?, ENUM_GUARD)?;
    let stab_c = c.stabilizer_level1();
    let central = b
        .small_generating_set()
        .iter()
        .all(|x| stab_c.iter().all(|s| x.commutes_with(s)));
    r.check(
        "(iv) B(A) centralizes Stab_C(1)",
        central,
        format!("|B(A)| = {}", b.order()),
    );

    if depth >= 1 {
        let lower = setup.truncate(depth - 1).centralizer()?;
        let mut invariant = true;
        for g in lower.small_generating_set() {
            for i in 0..setup.partition.len() {
                invariant &= c.contains(&x_i_portrait(&g, &setup.partition, i, depth)?);
            }
        }
        r.check("(v) C(A) is diagonal invariant", invariant, "");
    }

    let delta_a = setup.delta_gens()?;
    let delta_b = delta_closure_portraits(&setup.b_gens()?, &setup.partition, depth, depth)?;
    // same orbits and same orbit projections; the activity group itself
    // may grow (for B(A) it becomes the full product of the projections)
    let own_type = permutation_type(&setup.activity, &setup.partition)?;
    let same_type = |gens: &[Portrait]| -> Result<bool> {
        let p = PermGroup::new(setup.m, gens.iter().map(|g| g.root_perm()).collect())?;
        if orbits_of(setup.m, p.generators()) != setup.partition {
            return Ok(false);
        }
        let t = permutation_type(&p, &setup.partition)?;
        for (x, y) in t.iter().zip(&own_type) {
            if !x.same_elements(y)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    r.check(
        "(vi) Delta(A), Delta(B(A)) abelian of the permutation-type of A",
        pairwise_commute(&delta_a)
            && pairwise_commute(&delta_b)
            && same_type(&delta_a)?
            && same_type(&delta_b)?,
        "",
    );
    Ok(r)
}
