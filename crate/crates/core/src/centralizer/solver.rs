//! Level-by-level solver for `x_j c = c y_j mod Stab(k)`.
//!
//! With `y_j = x_j` this is the centralizer of the `x_j`; with a single pair
//! it is the set of conjugators taking `x` to `y`. Writing `σ_g(u)` for the
//! permutation of `g` at vertex `u`, the equation reads, vertex by vertex,
//!
//! ```text
//! σ_c(u^x) = σ_x(u)^{-1} σ_c(u) σ_y(u^c)
//! ```
//!
//! On level `l` the images `u^c` are fixed by the levels above, so the
//! unknowns on that level are tied together along the orbits of the `x_j`:
//! one free value per orbit, the rest forced. Levels are solved depth-first;
//! on the last level solution counts multiply instead of being enumerated.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::centralizer::truncated::storage_cap;
use crate::error::{Error, Result};
use crate::tree::perm::Perm;
use crate::tree::portrait::{vertex_count, Portrait};

/// Default cap on search nodes (partial assignments of a whole level).
pub const DEFAULT_NODE_BUDGET: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Enumerate,
    Count,
    FindFirst,
}

pub struct Problem {
    m: usize,
    depth: usize,
    pairs: Vec<(Portrait, Portrait)>,
    allowed: Vec<Perm>,
    restricted: bool,
    root_candidates: Option<Vec<Perm>>,
    node_budget: usize,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    /// Solutions, in search order (only in `Enumerate` and `FindFirst`).
    pub solutions: Vec<Portrait>,
    pub count: BigUint,
    pub nodes: usize,
}

impl Problem {
    /// `x_j c = c y_j` for all pairs, at `depth`.
    pub fn twisted(m: usize, depth: usize, pairs: Vec<(Portrait, Portrait)>) -> Result<Self> {
        for (x, y) in &pairs {
            for p in [x, y] {
                if p.degree() != m || p.depth() < depth {
                    return Err(Error::input(
                        "portrait has the wrong degree or is too shallow",
                    ));
                }
            }
        }
        let pairs = pairs
            .into_iter()
            .map(|(x, y)| (x.truncate(depth), y.truncate(depth)))
            .collect();
        Ok(Problem {
            m,
            depth,
            pairs,
            allowed: Perm::all(m),
            restricted: false,
            root_candidates: None,
            node_budget: DEFAULT_NODE_BUDGET,
        })
    }

    /// Centralizer of the `xs`.
    pub fn centralizer(m: usize, depth: usize, xs: &[Portrait]) -> Result<Self> {
        Problem::twisted(
            m,
            depth,
            xs.iter().map(|x| (x.clone(), x.clone())).collect(),
        )
    }

    /// Restricts every vertex permutation to `allowed`.
    pub fn with_allowed(mut self, allowed: Vec<Perm>) -> Self {
        self.allowed = allowed;
        self.allowed.sort();
        self.restricted = true;
        self
    }

    /// Root permutations to try, in order (also filtered by `allowed`).
    pub fn with_root_candidates(mut self, roots: Vec<Perm>) -> Self {
        self.root_candidates = Some(roots);
        self
    }

    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn solve(&self, mode: Mode) -> Result<Outcome> {
        let mut search = Search::new(self, mode);
        let mut data = vec![0u8; vertex_count(self.m, self.depth) * self.m];
        if self.depth == 0 {
            search.found(&data)?;
        } else {
            search.level(0, &mut data, &[0])?;
        }
        Ok(Outcome {
            solutions: search.solutions,
            count: search.count,
            nodes: search.nodes,
        })
    }
}

/// Orbits of the `x_j` on one level, each with a representative.
struct LevelGraph {
    /// `targets[j][u]` = image of vertex `u` under `x_j`.
    targets: Vec<Vec<usize>>,
    reps: Vec<usize>,
}

struct Search<'a> {
    p: &'a Problem,
    mode: Mode,
    graphs: Vec<LevelGraph>,
    /// Per pair and level: inverse permutations of `x` at each vertex.
    x_inv: Vec<Vec<Vec<u8>>>,
    solutions: Vec<Portrait>,
    count: BigUint,
    nodes: usize,
    done: bool,
}

impl<'a> Search<'a> {
    fn new(p: &'a Problem, mode: Mode) -> Self {
        let m = p.m;
        let mut graphs = Vec::with_capacity(p.depth);
        for l in 0..p.depth {
            let targets: Vec<Vec<usize>> = p.pairs.iter().map(|(x, _)| x.level_images(l)).collect();
            let width = m.pow(l as u32);
            let mut seen = vec![false; width];
            let mut reps = Vec::new();
            for u in 0..width {
                if seen[u] {
                    continue;
                }
                reps.push(u);
                let mut stack = vec![u];
                seen[u] = true;
                while let Some(v) = stack.pop() {
                    for t in &targets {
                        if !seen[t[v]] {
                            seen[t[v]] = true;
                            stack.push(t[v]);
                        }
                    }
                }
            }
            graphs.push(LevelGraph { targets, reps });
        }
        let x_inv = p
            .pairs
            .iter()
            .map(|(x, _)| {
                (0..p.depth)
                    .map(|l| {
                        let width = m.pow(l as u32);
                        let mut out = vec![0u8; width * m];
                        for u in 0..width {
                            let q = x.perm_bytes(l, u);
                            for z in 0..m {
                                out[u * m + q[z] as usize] = z as u8;
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        Search {
            p,
            mode,
            graphs,
            x_inv,
            solutions: Vec::new(),
            count: BigUint::zero(),
            nodes: 0,
            done: false,
        }
    }

    fn found(&mut self, data: &[u8]) -> Result<()> {
        self.count += 1u32;
        if self.mode != Mode::Count {
            let cap = storage_cap(self.p.m, self.p.depth);
            if self.solutions.len() >= cap {
                return Err(Error::SizeGuard(format!(
                    "more than {cap} solutions to store"
                )));
            }
            self.solutions
                .push(Portrait::from_raw(self.p.m, self.p.depth, data.to_vec()));
        }
        if self.mode == Mode::FindFirst {
            self.done = true;
        }
        Ok(())
    }

    /// Valid assignments for the orbit of `rep` on level `l`, given the
    /// images `cimg` of level-`l` vertices under the partial solution.
    fn orbit_options(&self, l: usize, rep: usize, cimg: &[usize]) -> Vec<Vec<(usize, Vec<u8>)>> {
        let m = self.p.m;
        let g = &self.graphs[l];
        let width = cimg.len();
        let candidates: Vec<&Perm> = match (&self.p.root_candidates, l) {
            (Some(roots), 0) => roots
                .iter()
                .filter(|r| !self.p.restricted || self.p.allowed.binary_search(r).is_ok())
                .collect(),
            _ => self.p.allowed.iter().collect(),
        };
        let mut out = Vec::new();
        let mut value: Vec<Option<Vec<u8>>> = vec![None; width];
        'cand: for cand in candidates {
            for v in value.iter_mut() {
                *v = None;
            }
            let mut order = vec![rep];
            value[rep] = Some(cand.as_bytes().to_vec());
            let mut i = 0;
            while i < order.len() {
                let u = order[i];
                i += 1;
                let vu = value[u].clone().expect("assigned");
                for (j, (_, y)) in self.p.pairs.iter().enumerate() {
                    let t = g.targets[j][u];
                    let xinv = &self.x_inv[j][l][u * m..(u + 1) * m];
                    let yq = y.perm_bytes(l, cimg[u]);
                    let forced: Vec<u8> =
                        (0..m).map(|z| yq[vu[xinv[z] as usize] as usize]).collect();
                    match &value[t] {
                        Some(existing) => {
                            if *existing != forced {
                                continue 'cand;
                            }
                        }
                        None => {
                            if self.p.restricted
                                && self
                                    .p
                                    .allowed
                                    .binary_search(&Perm::from_bytes_unchecked(&forced))
                                    .is_err()
                            {
                                continue 'cand;
                            }
                            value[t] = Some(forced);
                            order.push(t);
                        }
                    }
                }
            }
            out.push(
                order
                    .into_iter()
                    .map(|u| (u, value[u].clone().expect("assigned")))
                    .collect(),
            );
        }
        out
    }

    fn level(&mut self, l: usize, data: &mut Vec<u8>, cimg: &[usize]) -> Result<()> {
        let m = self.p.m;
        let reps = self.graphs[l].reps.clone();
        let mut options = Vec::with_capacity(reps.len());
        for &rep in &reps {
            let o = self.orbit_options(l, rep, cimg);
            if o.is_empty() {
                return Ok(());
            }
            options.push(o);
        }
        let last = l + 1 == self.p.depth;
        if last && self.mode == Mode::Count {
            let mut prod = BigUint::one();
            for o in &options {
                prod *= o.len();
            }
            self.count += prod;
            self.nodes += 1;
            return Ok(());
        }
        let base = vertex_count(m, l) * m;
        let mut digits = vec![0usize; options.len()];
        loop {
            self.nodes += 1;
            if self.nodes > self.p.node_budget {
                return Err(Error::BudgetExhausted {
                    budget: self.p.node_budget,
                });
            }
            for (k, o) in options.iter().enumerate() {
                for (u, val) in &o[digits[k]] {
                    data[base + u * m..base + (u + 1) * m].copy_from_slice(val);
                }
            }
            if last {
                self.found(data)?;
            } else {
                let mut next = Vec::with_capacity(cimg.len() * m);
                for (u, &i) in cimg.iter().enumerate() {
                    let q = &data[base + u * m..base + (u + 1) * m];
                    for &z in q.iter().take(m) {
                        next.push(i * m + z as usize);
                    }
                }
                self.level(l + 1, data, &next)?;
            }
            if self.done {
                return Ok(());
            }
            // advance the odometer
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return Ok(());
                }
                digits[k] += 1;
                if digits[k] < options[k].len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }
}
