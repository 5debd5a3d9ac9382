//! Generator families indexed by `1, 2, 3, ...` whose recursion strictly
//! decreases the index, so every member is finite-state.
//!
//! Two variants act on `T_{m+1}` with orbit-type `(m, 1)`:
//!
//! * infinite rank: `α_1 = (e, ..., e, α_1, e)(1 2 ... m)`,
//!   `α_{2i-1} = α_i^{x_1}` for `i >= 2` and `α_{2i} = α_i^{x_2}`;
//! * finite extension of a rank-`n` group `A` with a simple virtual
//!   endomorphism `f: H -> A`: copy `p` of a basis vector `v` acts on the
//!   first `m` letters through `(A, H, f)` when `p = 1`; for `p >= 2` it is
//!   `(β, ..., β, γ)` with `β` itself and `γ` copy `p - 1` of `v`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::diag::{x_i, x_i_portrait};
use crate::error::{Error, Result};
use crate::gdata::data::GDataSpec;
use crate::gdata::lattice::{apply_integral, Vector};
use crate::permsym::OrbitPartition;
use crate::report::Report;
use crate::tree::automorphism::Automorphism;
use crate::tree::lazy::LazyAutomaton;
use crate::tree::perm::Perm;
use crate::tree::portrait::Portrait;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    InfiniteRank,
    FiniteExtension,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::InfiniteRank => "infinite-rank",
            Variant::FiniteExtension => "finite-extension",
        })
    }
}

enum Machine {
    Indexed(Arc<LazyAutomaton<usize>>),
    Copies {
        rank: usize,
        machine: Arc<LazyAutomaton<(usize, Vector)>>,
    },
}

pub struct IndexMapFamily {
    m: usize,
    variant: Variant,
    machine: Machine,
}

impl fmt::Debug for IndexMapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexMapFamily({}, m = {})", self.variant, self.m)
    }
}

/// Family on `T_{m+1}`. The finite-extension variant uses the adding
/// machine data `(Z, mZ, x/m)`; see [`IndexMapFamily::extension`].
pub fn theorem_c_family(m: usize, variant: Variant) -> Result<IndexMapFamily> {
    match variant {
        Variant::InfiniteRank => IndexMapFamily::infinite_rank(m),
        Variant::FiniteExtension => {
            let text = format!("rank 1\norbit 1 index {m}\nH\n{m}\nf\n1/{m}\n");
            IndexMapFamily::extension(&GDataSpec::parse(&text)?)
        }
    }
}

impl IndexMapFamily {
    pub fn infinite_rank(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::input("the family needs m >= 2"));
        }
        let degree = m + 1;
        let cycle = Perm::from_images(
            (0..degree)
                .map(|y| if y < m { (y + 1) % m } else { y })
                .collect(),
        )?;
        let machine = LazyAutomaton::new(degree, move |&i: &usize| {
            let mut children = vec![0usize; degree];
            match i {
                0 => (Perm::identity(degree), children),
                1 => {
                    children[m - 1] = 1;
                    (cycle.clone(), children)
                }
                _ if i % 2 == 0 => {
                    children[m] = i / 2;
                    (Perm::identity(degree), children)
                }
                _ => {
                    for c in children.iter_mut().take(m) {
                        *c = i.div_ceil(2);
                    }
                    (Perm::identity(degree), children)
                }
            }
        })
        .with_labels(|&i: &usize| {
            if i == 0 {
                "e".to_string()
            } else {
                format!("α_{i}")
            }
        });
        Ok(IndexMapFamily {
            m,
            variant: Variant::InfiniteRank,
            machine: Machine::Indexed(Arc::new(machine)),
        })
    }

    /// Needs single-orbit data `(A, H, f)`.
    pub fn extension(base: &GDataSpec) -> Result<Self> {
        if base.orbits().len() != 1 {
            return Err(Error::input("the extension needs data with a single orbit"));
        }
        let o = base.orbits()[0].clone();
        let (m, n) = (o.index, base.rank());
        let degree = m + 1;
        let lookup: std::collections::HashMap<Vector, usize> = o
            .transversal
            .iter()
            .enumerate()
            .map(|(k, t)| (o.h.reduce(t), k))
            .collect();
        let zero_key = (0usize, vec![BigInt::zero(); n]);
        let zk = zero_key.clone();
        let machine = LazyAutomaton::new(degree, move |key: &(usize, Vector)| {
            let (p, g) = key;
            let norm = |p: usize, v: Vector| {
                if v.iter().all(Zero::is_zero) {
                    zk.clone()
                } else {
                    (p, v)
                }
            };
            if *p == 0 {
                return (Perm::identity(degree), vec![zk.clone(); degree]);
            }
            if *p >= 2 {
                let mut children = vec![(*p, g.clone()); degree];
                children[m] = norm(p - 1, g.clone());
                return (Perm::identity(degree), children);
            }
            let mut images: Vec<usize> = (0..degree).collect();
            let mut children = vec![zk.clone(); degree];
            for (k, t) in o.transversal.iter().enumerate() {
                let moved: Vector = t.iter().zip(g).map(|(a, b)| a + b).collect();
                let target = lookup[&o.h.reduce(&moved)];
                let diff: Vector = moved
                    .iter()
                    .zip(&o.transversal[target])
                    .map(|(a, b)| a - b)
                    .collect();
                images[k] = target;
                children[k] = norm(1, apply_integral(&diff, &o.f).expect("f integral on H"));
            }
            (Perm::from_images(images).expect("coset action"), children)
        })
        .with_labels(|(p, g): &(usize, Vector)| {
            if *p == 0 {
                return "e".to_string();
            }
            let xs: Vec<String> = g.iter().map(|x| x.to_string()).collect();
            format!("({})@{p}", xs.join(","))
        });
        Ok(IndexMapFamily {
            m,
            variant: Variant::FiniteExtension,
            machine: Machine::Copies {
                rank: n,
                machine: Arc::new(machine),
            },
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Degree of the tree, `m + 1`.
    pub fn degree(&self) -> usize {
        self.m + 1
    }

    /// Orbits `{1..m}` and `{m+1}`.
    pub fn partition(&self) -> OrbitPartition {
        OrbitPartition::new(self.m + 1, vec![(0..self.m).collect(), vec![self.m]])
            .expect("valid partition")
    }

    /// Member `i >= 1`. For the extension, `i` runs over copies of the
    /// basis: copy `(i - 1) / n + 1` of basis vector `(i - 1) % n`.
    pub fn realize(&self, i: usize) -> Result<Automorphism> {
        if i == 0 {
            return Err(Error::input("family indices start at 1"));
        }
        match &self.machine {
            Machine::Indexed(mach) => Ok(Automorphism::lazy(mach.clone(), &i)),
            Machine::Copies { rank, machine } => {
                let mut v = vec![BigInt::zero(); *rank];
                v[(i - 1) % rank] = BigInt::from(1);
                Ok(Automorphism::lazy(
                    machine.clone(),
                    &((i - 1) / rank + 1, v),
                ))
            }
        }
    }

    /// Finite-state form of member `i`.
    pub fn realize_finite(&self, i: usize) -> Result<Automorphism> {
        self.realize(i)?.to_finite(crate::tree::DEFAULT_STATE_BOUND)
    }
}

/// Infinite rank: `α_i^{x_1} = α_{2i-1}` (`α_1^{x_1} = α_1^m`) and
/// `α_i^{x_2} = α_{2i}` as automata, for `i <= bound`. Finite extension:
/// the first copy is state-closed, and copy `p` agrees at `depth` with the
/// product of the `x_1`-iterates of copy `p - 1` placed by `x_2`.
pub fn delta_invariance_check(f: &IndexMapFamily, bound: usize) -> Result<Report> {
    let part = f.partition();
    let mut report = Report::new(format!(
        "Δ-invariance of the {} family (m = {})",
        f.variant, f.m
    ));
    match f.variant {
        Variant::InfiniteRank => {
            let mut bad1 = Vec::new();
            let mut bad2 = Vec::new();
            for i in 1..=bound {
                let a = f.realize_finite(i)?;
                let y1 = x_i(&a, &part, 0)?;
                let want1 = if i == 1 {
                    a.pow(f.m as i64)?
                } else {
                    f.realize_finite(2 * i - 1)?
                };
                if !y1.equal(&want1)? {
                    bad1.push(i);
                }
                let y2 = x_i(&a, &part, 1)?;
                if !y2.equal(&f.realize_finite(2 * i)?)? {
                    bad2.push(i);
                }
            }
            report.check(
                "x_1 maps the family into itself",
                bad1.is_empty(),
                format!("indices 1..={bound}, failures {bad1:?}"),
            );
            report.check(
                "x_2 maps the family into itself",
                bad2.is_empty(),
                format!("indices 1..={bound}, failures {bad2:?}"),
            );
        }
        Variant::FiniteExtension => {
            let Machine::Copies { rank, .. } = &f.machine else {
                unreachable!()
            };
            let depth = 6;
            let mut closed = true;
            for i in 1..=*rank {
                for s in f
                    .realize(i)?
                    .lazy_states(crate::tree::DEFAULT_STATE_BOUND)?
                {
                    let label = s.lazy_label().unwrap_or_default();
                    closed &= label == "e" || label.ends_with("@1");
                }
            }
            report.check(
                "first copy is state-closed",
                closed,
                format!("{rank} generators"),
            );
            let mut bad = Vec::new();
            for i in *rank + 1..=bound.max(*rank + 1) {
                let prev = f.realize(i - rank)?.portrait(depth)?;
                if !in_extension_closure(&f.realize(i)?.portrait(depth)?, &prev, &part, depth)? {
                    bad.push(i);
                }
            }
            report.check(
                "later copies lie in the Δ-closure of earlier ones",
                bad.is_empty(),
                format!("at depth {depth}, failures {bad:?}"),
            );
        }
    }
    Ok(report)
}

/// `x = ∏_t (y^{x_2})^{x_1^t}` modulo `Stab(depth)`.
fn in_extension_closure(
    x: &Portrait,
    y: &Portrait,
    part: &OrbitPartition,
    depth: usize,
) -> Result<bool> {
    let mut term = x_i_portrait(y, part, 1, depth)?;
    let mut prod = Portrait::identity(x.degree(), depth);
    for _ in 0..depth {
        prod = prod.compose(&term);
        term = x_i_portrait(&term.truncate(depth - 1), part, 0, depth)?;
    }
    Ok(prod == *x)
}

/// No product `α_1^{c_1} ⋯ α_r^{c_r}` with `0 < max |c_i| <= coeff_bound`
/// is trivial at `depth`.
pub fn independence_check(
    f: &IndexMapFamily,
    r: usize,
    coeff_bound: i64,
    depth: usize,
) -> Result<Report> {
    let mut report = Report::new(format!(
        "independence of the first {r} members at depth {depth}"
    ));
    let mut powers = Vec::with_capacity(r);
    for i in 1..=r {
        let p = f.realize(i)?.portrait(depth)?;
        powers.push(
            (-coeff_bound..=coeff_bound)
                .map(|c| p.pow(c))
                .collect::<Vec<_>>(),
        );
    }
    let width = (2 * coeff_bound + 1) as usize;
    let total = width.pow(r as u32);
    let mut relations = Vec::new();
    for code in 0..total {
        let mut c = Vec::with_capacity(r);
        let mut x = code;
        for _ in 0..r {
            c.push((x % width) as i64 - coeff_bound);
            x /= width;
        }
        if c.iter().all(|&k| k == 0) {
            continue;
        }
        let mut prod = Portrait::identity(f.degree(), depth);
        for (i, &k) in c.iter().enumerate() {
            prod = prod.compose(&powers[i][(k + coeff_bound) as usize]);
        }
        if prod.is_identity() {
            relations.push(c);
        }
    }
    report.fact(format!("coefficient vectors checked: {}", total - 1));
    report.check(
        "no relation found",
        relations.is_empty(),
        match relations.first() {
            Some(c) => format!("trivial product with exponents {c:?}"),
            None => format!("|c| <= {coeff_bound}"),
        },
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_member_on_t3() {
        let f = theorem_c_family(2, Variant::InfiniteRank).unwrap();
        let a1 = f.realize(1).unwrap();
        assert_eq!(a1.root_perm().unwrap(), Perm::parse(3, "(1 2)").unwrap());
        let s = a1.sections().unwrap();
        assert!(s[0].is_identity().unwrap() && s[2].is_identity().unwrap());
        assert!(s[1].equal_at_depth(&a1, 6).unwrap());
    }

    #[test]
    fn states_of_fourth_member() {
        let f = theorem_c_family(2, Variant::InfiniteRank).unwrap();
        let states = f.realize(4).unwrap().lazy_states(100).unwrap();
        let mut labels: Vec<String> = states.iter().map(|s| s.lazy_label().unwrap()).collect();
        labels.sort();
        assert_eq!(labels, vec!["e", "α_1", "α_2", "α_4"]);
    }

    #[test]
    fn invariance_and_commutation() {
        let f = theorem_c_family(3, Variant::InfiniteRank).unwrap();
        assert!(delta_invariance_check(&f, 6).unwrap().passed());
        let ps: Vec<Portrait> = (1..=5)
            .map(|i| f.realize(i).unwrap().portrait(5).unwrap())
            .collect();
        for a in &ps {
            for b in &ps {
                assert!(a.commutes_with(b));
            }
        }
    }

    #[test]
    fn extension_variant() {
        let f = theorem_c_family(2, Variant::FiniteExtension).unwrap();
        // first copy is the adding machine with a fixed extra letter
        let a = f.realize(1).unwrap();
        assert_eq!(a.root_perm().unwrap(), Perm::parse(3, "(1 2)").unwrap());
        let r = delta_invariance_check(&f, 3).unwrap();
        assert!(r.passed(), "{r}");
        assert!(independence_check(&f, 2, 2, 6).unwrap().passed());
    }
}
