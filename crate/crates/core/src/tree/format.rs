//! Line-oriented automaton text format.
//!
//! ```text
//! m 2
//! state a perm 2 1 to e a
//! init a
//! ```
//!
//! Letters are 1-based. The identity state `e` may be referenced without
//! being declared. Several `init` lines declare a generator list. Blank
//! lines and text after `#` are ignored.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tree::automaton::{Automaton, State};
use crate::tree::automorphism::Automorphism;
use crate::tree::perm::Perm;

#[derive(Clone, Debug)]
pub struct AutomatonFile {
    pub automaton: Automaton,
    pub names: Vec<String>,
    pub inits: Vec<usize>,
}

impl AutomatonFile {
    pub fn generators(&self) -> Result<Vec<Automorphism>> {
        self.inits
            .iter()
            .map(|&q| Automorphism::new(&self.automaton, q))
            .collect()
    }
}

pub fn parse_automaton(text: &str) -> Result<AutomatonFile> {
    let mut m: Option<usize> = None;
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut raw: Vec<(usize, Vec<usize>, Vec<String>)> = Vec::new();
    let mut init_names: Vec<(usize, String)> = Vec::new();

    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "m" => {
                if tokens.len() != 2 {
                    return Err(Error::parse(line_no, "expected `m <int>`"));
                }
                let v: usize = tokens[1]
                    .parse()
                    .map_err(|_| Error::parse(line_no, "alphabet size is not an integer"))?;
                if v == 0 || v > 255 {
                    return Err(Error::parse(line_no, "alphabet size must be in 1..255"));
                }
                m = Some(v);
            }
            "state" => {
                let m = m.ok_or_else(|| Error::parse(line_no, "`m` must come first"))?;
                let to = tokens
                    .iter()
                    .position(|&t| t == "to")
                    .ok_or_else(|| Error::parse(line_no, "missing `to`"))?;
                if tokens.len() < 4 || tokens[2] != "perm" {
                    return Err(Error::parse(
                        line_no,
                        "expected `state <name> perm ... to ...`",
                    ));
                }
                let name = tokens[1].to_string();
                if index.contains_key(&name) {
                    return Err(Error::parse(
                        line_no,
                        format!("state {name} declared twice"),
                    ));
                }
                let images: Vec<usize> = tokens[3..to]
                    .iter()
                    .map(|t| {
                        t.parse::<usize>()
                            .ok()
                            .filter(|&y| (1..=m).contains(&y))
                            .map(|y| y - 1)
                            .ok_or_else(|| Error::parse(line_no, format!("bad image {t:?}")))
                    })
                    .collect::<Result<_>>()?;
                if images.len() != m {
                    return Err(Error::parse(line_no, format!("expected {m} images")));
                }
                let children: Vec<String> =
                    tokens[to + 1..].iter().map(|s| s.to_string()).collect();
                if children.len() != m {
                    return Err(Error::parse(line_no, format!("expected {m} children")));
                }
                index.insert(name.clone(), names.len());
                names.push(name);
                raw.push((line_no, images, children));
            }
            "init" => {
                if tokens.len() != 2 {
                    return Err(Error::parse(line_no, "expected `init <name>`"));
                }
                init_names.push((line_no, tokens[1].to_string()));
            }
            other => return Err(Error::parse(line_no, format!("unknown keyword {other:?}"))),
        }
    }

    let m = m.ok_or_else(|| Error::parse(0, "missing `m` line"))?;
    let mut uses_implied_e = !index.contains_key("e")
        && (raw.iter().any(|(_, _, ch)| ch.iter().any(|c| c == "e"))
            || init_names.iter().any(|(_, n)| n == "e"));
    if uses_implied_e {
        index.insert("e".to_string(), names.len());
        names.push("e".to_string());
    } else {
        uses_implied_e = false;
    }

    let mut states = Vec::with_capacity(names.len());
    for (line_no, images, children) in raw {
        let perm = Perm::from_images(images).map_err(|e| Error::parse(line_no, e.to_string()))?;
        let children = children
            .iter()
            .map(|c| {
                index
                    .get(c)
                    .copied()
                    .ok_or_else(|| Error::parse(line_no, format!("unknown state {c:?}")))
            })
            .collect::<Result<_>>()?;
        states.push(State { perm, children });
    }
    if uses_implied_e {
        let q = states.len();
        states.push(State {
            perm: Perm::identity(m),
            children: vec![q; m],
        });
    }
    if init_names.is_empty() {
        return Err(Error::parse(0, "missing `init` line"));
    }
    let inits = init_names
        .iter()
        .map(|(line_no, n)| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::parse(*line_no, format!("unknown init state {n:?}")))
        })
        .collect::<Result<_>>()?;
    Ok(AutomatonFile {
        automaton: Automaton::new(m, states)?,
        names,
        inits,
    })
}

/// Serializes a generator list over one shared minimized automaton.
///
/// States are numbered breadth-first from the generators in order; the
/// identity state is written as `e` and omitted, every other state as `q<k>`.
pub fn serialize(gens: &[Automorphism]) -> Result<String> {
    let m = gens
        .first()
        .ok_or_else(|| Error::input("nothing to serialize"))?
        .degree();
    let mut joint = Automaton::new(m, Vec::new())?;
    let mut roots = Vec::new();
    for g in gens {
        let aut = g.finite()?;
        let (u, offset) = joint.union(&aut)?;
        joint = u;
        roots.push(offset);
    }
    let (min, map) = joint.minimize();
    // breadth-first renumbering from the roots, in order
    let mut order: Vec<usize> = Vec::new();
    let mut seen = vec![false; min.len()];
    for &r in &roots {
        let r = map[r];
        if !seen[r] {
            seen[r] = true;
            let mut i = order.len();
            order.push(r);
            while i < order.len() {
                for &c in &min.state(order[i]).children {
                    if !seen[c] {
                        seen[c] = true;
                        order.push(c);
                    }
                }
                i += 1;
            }
        }
    }
    let identity = min.identity_state();
    let mut name = vec![String::new(); min.len()];
    let mut k = 0;
    for &q in &order {
        if Some(q) == identity {
            name[q] = "e".to_string();
        } else {
            name[q] = format!("q{k}");
            k += 1;
        }
    }
    let mut out = format!("m {m}\n");
    for &q in &order {
        if Some(q) == identity {
            continue;
        }
        let s = min.state(q);
        let children: Vec<&str> = s.children.iter().map(|&c| name[c].as_str()).collect();
        out.push_str(&format!(
            "state {} perm {} to {}\n",
            name[q],
            s.perm,
            children.join(" ")
        ));
    }
    for &r in &roots {
        out.push_str(&format!("init {}\n", name[map[r]]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOUBLE: &str = "m 4\nstate a perm 2 1 4 3 to e a e a\ninit a\n";

    #[test]
    fn parse_with_implied_identity() {
        let f = parse_automaton(DOUBLE).unwrap();
        assert_eq!(f.automaton.len(), 2);
        let a = &f.generators().unwrap()[0];
        assert_eq!(a.act(&[2, 2]).unwrap(), vec![3, 2]);
    }

    #[test]
    fn round_trip_is_canonical() {
        let f = parse_automaton(DOUBLE).unwrap();
        let gens = f.generators().unwrap();
        let text = serialize(&gens).unwrap();
        assert_eq!(text, "m 4\nstate q0 perm 2 1 4 3 to e q0 e q0\ninit q0\n");
        let back = parse_automaton(&text).unwrap().generators().unwrap();
        assert!(back[0].equal(&gens[0]).unwrap());
    }

    #[test]
    fn identity_only() {
        let f = parse_automaton("m 3\ninit e\n").unwrap();
        let g = f.generators().unwrap();
        assert!(g[0].is_identity().unwrap());
        assert_eq!(serialize(&g).unwrap(), "m 3\ninit e\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_automaton("m 2\nstate a perm 1 1 to a a\ninit a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_automaton("m 2\nstate a perm 2 1 to b a\ninit a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_automaton("m 2\nstate a perm 2 1 to a a\n").is_err());
    }
}
