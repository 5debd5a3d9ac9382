//! Graphviz export of automaton state diagrams.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::tree::automorphism::Automorphism;

#[derive(Clone, Copy, Debug)]
pub struct DotOptions {
    /// Join edges with the same endpoints into one `in|out,in|out` label.
    pub merge_parallel: bool,
    pub state_bound: usize,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            merge_parallel: true,
            state_bound: 10_000,
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per distinct state reachable from the named generators, in
/// breadth-first order. Roots take the given names, the identity is `e`,
/// lazy states keep their labels, the rest are `q<k>`.
pub fn export_dot(gens: &[(String, Automorphism)], opts: DotOptions) -> Result<String> {
    let m = gens
        .first()
        .ok_or_else(|| Error::input("nothing to export"))?
        .1
        .degree();
    let mut nodes: Vec<Automorphism> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let find = |nodes: &[Automorphism], x: &Automorphism| -> Result<Option<usize>> {
        for (i, n) in nodes.iter().enumerate() {
            if n.equal(x)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    };
    for (name, g) in gens {
        if g.degree() != m {
            return Err(Error::DegreeMismatch {
                expected: m,
                found: g.degree(),
            });
        }
        if find(&nodes, g)?.is_none() {
            nodes.push(g.clone());
            labels.push(name.clone());
        }
    }
    let mut edges: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let perm = nodes[i].root_perm()?;
        let sections = nodes[i].sections()?;
        for (y, s) in sections.into_iter().enumerate() {
            let j = match find(&nodes, &s)? {
                Some(j) => j,
                None => {
                    if nodes.len() >= opts.state_bound {
                        return Err(Error::StateExplosion {
                            bound: opts.state_bound,
                        });
                    }
                    let label = if s.is_identity()? {
                        "e".to_string()
                    } else {
                        s.lazy_label()
                            .unwrap_or_else(|| format!("q{}", nodes.len()))
                    };
                    nodes.push(s);
                    labels.push(label);
                    nodes.len() - 1
                }
            };
            edges.push((i, j, y + 1, perm.apply(y) + 1));
        }
        i += 1;
    }
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
    for (k, l) in labels.iter().enumerate() {
        writeln!(out, "  n{k} [label={}];", quote(l)).expect("write to string");
    }
    if opts.merge_parallel {
        let mut merged: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
        for (a, b, x, y) in &edges {
            merged.entry((*a, *b)).or_default().push(format!("{x}|{y}"));
        }
        for ((a, b), ls) in merged {
            writeln!(out, "  n{a} -> n{b} [label={}];", quote(&ls.join(",")))
                .expect("write to string");
        }
    } else {
        for (a, b, x, y) in edges {
            writeln!(out, "  n{a} -> n{b} [label=\"{x}|{y}\"];").expect("write to string");
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_spec;

    #[test]
    fn double_adding_diagram() {
        let a = catalog_spec("double-adding").unwrap().generators.remove(0);
        let d = export_dot(&[("a".into(), a)], DotOptions::default()).unwrap();
        assert!(d.contains("n0 [label=\"a\"]"));
        assert!(d.contains("n1 [label=\"e\"]"));
        assert!(d.contains("n0 -> n0 [label=\"2|1,4|3\"]"));
        assert!(d.contains("n0 -> n1 [label=\"1|2,3|4\"]"));
        assert_eq!(d.matches("->").count(), 3);
    }

    #[test]
    fn identity_diagram() {
        let e = Automorphism::identity(3);
        let merged = export_dot(&[("e".into(), e.clone())], DotOptions::default()).unwrap();
        assert_eq!(merged.matches("->").count(), 1);
        let split = export_dot(
            &[("e".into(), e)],
            DotOptions {
                merge_parallel: false,
                ..DotOptions::default()
            },
        )
        .unwrap();
        assert_eq!(split.matches("n0 -> n0").count(), 3);
    }

    #[test]
    fn family_member_diagram() {
        let f = crate::gdata::theorem_c_family(2, crate::gdata::Variant::InfiniteRank).unwrap();
        let d = export_dot(
            &[("α_3".into(), f.realize(3).unwrap())],
            DotOptions::default(),
        )
        .unwrap();
        assert_eq!(d.matches("[label=").count() - d.matches("->").count(), 4);
        assert!(d.contains("α_2") && d.contains("α_1"));
    }
}
