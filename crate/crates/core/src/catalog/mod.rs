//! Named example machines with their expected properties.
//!
//! An entry is addressed as `name` or `name:key=value:key=value`, list
//! values comma-separated, e.g. `t4-cyclic:type=3,1:exps=1,0,0,1`.

pub mod dot;
pub mod t4;

use std::collections::BTreeMap;
use std::fmt;

use crate::centralizer::cyclic::CyclicGenerator;
use crate::centralizer::truncated::TruncatedGroup;
use crate::error::{Error, Result};
use crate::gdata::family::{theorem_c_family, Variant};
use crate::permsym::{activity_group, orbits};
use crate::report::Report;
use crate::tree::automaton::{Automaton, State};
use crate::tree::automorphism::Automorphism;
use crate::tree::perm::Perm;
use crate::tree::portrait::Portrait;

pub use dot::{export_dot, DotOptions};
pub use t4::{t4_analysis, t4_sigma, T4Case};

/// Names, parameters and one-line descriptions.
pub const ENTRIES: &[(&str, &str, &str)] = &[
    ("adding", "m=2", "adding machine (e,...,e,a)(1 2 ... m)"),
    ("double-adding", "", "double adding machine (e,a,e,a)(1 2)(3 4)"),
    ("multiplicity", "m=2 s=2", "s parallel m-adding blocks, a_(i) = (e,...,e,a)"),
    ("t4-cyclic", "type=2,2 exps=0,1,0,1", "cyclic (a^i1,...,a^i4)σ on T_4, σ by orbit-type"),
    ("transposition", "", "rooted (1 2) on T_2"),
    ("rooted", "m=4 perm=(1 2)(3 4)", "rooted automorphism with trivial sections"),
    ("flip", "", "(a,e)(1 2)"),
    ("thm-c", "m=2 index=", "α_1 = (e,...,e,α_1,e)(1 ... m), α_2i-1 = α_i^x1, α_2i = α_i^x2; α_1..α_3 unless index is given"),
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CatalogParams(BTreeMap<String, String>);

impl CatalogParams {
    pub fn new() -> Self {
        CatalogParams::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                Error::input(format!("parameter {key} must be a non-negative integer"))
            }),
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.0
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse().map_err(|_| {
                            Error::input(format!("bad entry `{x}` in parameter {key}"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }
}

impl fmt::Display for CatalogParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Splits `name:key=value:...`.
pub fn parse_spec(spec: &str) -> Result<(String, CatalogParams)> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or("").trim().to_string();
    let mut params = CatalogParams::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::input(format!("catalog parameter `{p}` is not key=value")))?;
        params.0.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok((name, params))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub orbit_type: Vec<usize>,
    pub self_similar: bool,
    pub abelian: bool,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub params: CatalogParams,
    pub generators: Vec<Automorphism>,
    pub names: Vec<String>,
    pub expected: Expected,
}

fn single(m: usize, perm: Perm, children: Vec<usize>) -> Result<Automorphism> {
    // state 0 is the machine, state 1 the identity
    let aut = Automaton::new(
        m,
        vec![
            State { perm, children },
            State {
                perm: Perm::identity(m),
                children: vec![1; m],
            },
        ],
    )?;
    Automorphism::new(&aut, 0)
}

/// Cycle `(1 2 ... k)` shifted to start at `offset`, on `m` letters.
fn block_cycle(m: usize, offset: usize, k: usize) -> Vec<usize> {
    let mut images: Vec<usize> = (0..m).collect();
    for t in 0..k {
        images[offset + t] = offset + (t + 1) % k;
    }
    images
}

pub fn catalog(name: &str, params: &CatalogParams) -> Result<CatalogEntry> {
    let (generators, names, orbit_type, abelian) = match name {
        "adding" => {
            let m = params.usize("m", 2)?;
            if m < 2 {
                return Err(Error::input("adding machine needs m >= 2"));
            }
            let mut children = vec![1; m];
            children[m - 1] = 0;
            let a = single(m, Perm::from_images(block_cycle(m, 0, m))?, children)?;
            (vec![a], vec!["a".to_string()], vec![m], true)
        }
        "double-adding" => {
            let a = single(4, Perm::parse(4, "(1 2)(3 4)")?, vec![1, 0, 1, 0])?;
            (vec![a], vec!["a".to_string()], vec![2, 2], true)
        }
        "multiplicity" => {
            let m = params.usize("m", 2)?;
            let s = params.usize("s", 2)?;
            if m < 2 || s < 1 {
                return Err(Error::input("multiplicity machine needs m >= 2 and s >= 1"));
            }
            let degree = m * s;
            let mut images: Vec<usize> = (0..degree).collect();
            let mut children = vec![1; degree];
            for i in 0..s {
                let c = block_cycle(degree, i * m, m);
                images[i * m..(i + 1) * m].copy_from_slice(&c[i * m..(i + 1) * m]);
                children[(i + 1) * m - 1] = 0;
            }
            let a = single(degree, Perm::from_images(images)?, children)?;
            (vec![a], vec!["a".to_string()], vec![m; s], true)
        }
        "t4-cyclic" => {
            let ty: Vec<usize> = params.list("type")?.unwrap_or_else(|| vec![2, 2]);
            let exps: Vec<i64> = params.list("exps")?.unwrap_or_else(|| vec![0, 1, 0, 1]);
            let gen = CyclicGenerator::new(t4_sigma(&ty)?, exps)?;
            let a = gen.a();
            // finite-state when the powers close up
            let a = a.to_finite(1000).unwrap_or(a);
            (vec![a], vec!["a".to_string()], ty, true)
        }
        "transposition" => {
            let a = single(2, Perm::parse(2, "(1 2)")?, vec![1, 1])?;
            (vec![a], vec!["a".to_string()], vec![2], true)
        }
        "rooted" => {
            let m = params.usize("m", 4)?;
            let text = params
                .0
                .get("perm")
                .map(String::as_str)
                .unwrap_or("(1 2)(3 4)");
            let p = Perm::parse(m, text)?;
            let ty = crate::permsym::orbits_of(m, std::slice::from_ref(&p)).orbit_type();
            let a = single(m, p, vec![1; m])?;
            (vec![a], vec!["a".to_string()], ty, true)
        }
        "flip" => {
            let a = single(2, Perm::parse(2, "(1 2)")?, vec![0, 1])?;
            (vec![a], vec!["a".to_string()], vec![2], true)
        }
        "thm-c" => {
            let m = params.usize("m", 2)?;
            let fam = theorem_c_family(m, Variant::InfiniteRank)?;
            let indices: Vec<usize> = match params.0.get("index") {
                Some(_) => vec![params.usize("index", 1)?],
                None => vec![1, 2, 3],
            };
            let gens = indices
                .iter()
                .map(|&i| fam.realize_finite(i))
                .collect::<Result<Vec<_>>>()?;
            let names = indices.iter().map(|i| format!("α_{i}")).collect();
            // a lone α_i with i > 1 fixes the first level
            let ty = if indices.contains(&1) {
                vec![m, 1]
            } else {
                vec![1; m + 1]
            };
            (gens, names, ty, true)
        }
        _ => return Err(Error::input(format!("unknown catalog entry `{name}`"))),
    };
    Ok(CatalogEntry {
        name: name.to_string(),
        params: params.clone(),
        generators,
        names,
        expected: Expected {
            orbit_type,
            self_similar: true,
            abelian,
        },
    })
}

/// `catalog(name, params)` from a `name:key=value` string.
pub fn catalog_spec(spec: &str) -> Result<CatalogEntry> {
    let (name, params) = parse_spec(spec)?;
    catalog(&name, &params)
}

/// Largest truncated group generated for the self-similarity check.
const SELF_CHECK_CAP: usize = 1_000_000;

impl CatalogEntry {
    pub fn degree(&self) -> usize {
        self.generators[0].degree()
    }

    /// Orbit-type, commutation at `depth`, and every state of every
    /// generator lying in the truncated generated group.
    pub fn self_check(&self, depth: usize) -> Result<Report> {
        let mut r = Report::new(format!("catalog entry {}", self.name));
        let ty = orbits(&activity_group(&self.generators)?).orbit_type();
        r.check(
            "orbit-type",
            ty == self.expected.orbit_type,
            format!("{ty:?}, expected {:?}", self.expected.orbit_type),
        );
        let ps: Vec<Portrait> = self
            .generators
            .iter()
            .map(|g| g.portrait(depth))
            .collect::<Result<_>>()?;
        let commute = ps
            .iter()
            .enumerate()
            .all(|(i, a)| ps[i + 1..].iter().all(|b| a.commutes_with(b)));
        r.check(
            "abelian",
            commute == self.expected.abelian,
            format!("generators commute at depth {depth}: {commute}"),
        );
        let group = TruncatedGroup::generate(self.degree(), depth, &ps, SELF_CHECK_CAP)?;
        let mut outside = 0;
        let mut checked = 0;
        for g in &self.generators {
            for s in state_sample(g, 64)? {
                checked += 1;
                if !group.contains(&s.portrait(depth)?) {
                    outside += 1;
                }
            }
        }
        r.check(
            "self-similar",
            (outside == 0) == self.expected.self_similar,
            format!(
                "{checked} states checked in a truncated group of order {}",
                group.order()
            ),
        );
        Ok(r)
    }
}

/// All states when there are at most `limit`, else the sections at words
/// of length at most 3.
fn state_sample(g: &Automorphism, limit: usize) -> Result<Vec<Automorphism>> {
    match g.lazy_states(limit) {
        Ok(s) => Ok(s),
        Err(e) if e.is_resource() => {
            let m = g.degree();
            let mut out = Vec::new();
            let mut words: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..=3 {
                let mut next = Vec::new();
                for w in &words {
                    out.push(g.section(w)?);
                    for y in 0..m {
                        let mut v = w.clone();
                        v.push(y);
                        next.push(v);
                    }
                }
                words = next;
            }
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_passes_its_self_check() {
        for (name, _, _) in ENTRIES {
            let e = catalog(name, &CatalogParams::new()).unwrap();
            let r = e.self_check(4).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn t4_cyclic_three_one() {
        let e = catalog_spec("t4-cyclic:type=3,1:exps=1,0,0,1").unwrap();
        let a = &e.generators[0];
        assert_eq!(a.root_perm().unwrap(), Perm::parse(4, "(1 2 3)").unwrap());
        let s = a.sections().unwrap();
        assert!(s[0].equal_at_depth(a, 4).unwrap());
        assert!(s[3].equal_at_depth(a, 4).unwrap());
        assert!(s[1].is_identity().unwrap());
        assert!(e.self_check(4).unwrap().passed());
    }

    #[test]
    fn multiplicity_one_block_is_adding() {
        let a = catalog_spec("multiplicity:m=3:s=1")
            .unwrap()
            .generators
            .remove(0);
        let b = catalog_spec("adding:m=3").unwrap().generators.remove(0);
        assert!(a.equal(&b).unwrap());
        let d = catalog_spec("multiplicity:m=2:s=2")
            .unwrap()
            .generators
            .remove(0);
        let dd = catalog_spec("double-adding").unwrap().generators.remove(0);
        assert!(d.equal(&dd).unwrap());
    }

    #[test]
    fn bad_specs() {
        assert!(catalog_spec("nope").is_err());
        assert!(catalog_spec("adding:m").is_err());
        assert!(catalog_spec("t4-cyclic:type=2,2:exps=1,2").is_err());
        assert!(catalog_spec("t4-cyclic:type=5").is_err());
    }
}
