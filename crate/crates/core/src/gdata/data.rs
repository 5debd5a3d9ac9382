//! G-data over a free abelian group `Z^n`: finite-index subgroups `H_i`,
//! virtual endomorphisms `f_i: H_i -> Z^n`, and coset transversals.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gdata::lattice::{
    apply_integral, image, kernel_lattice, preimage, Lattice, RatMatrix, Vector,
};
use crate::tree::automorphism::Automorphism;
use crate::tree::lazy::LazyAutomaton;
use crate::tree::perm::Perm;

/// Largest transversal materialized for a representation.
pub const TRANSVERSAL_LIMIT: usize = 4096;
/// Default bound on the index of the core iteration.
pub const DEFAULT_INDEX_BOUND: u64 = 1_000_000_000;

/// Three-valued answer for properties that depend on the F-core.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreVerdict {
    Trivial,
    Nontrivial(Lattice),
    Unknown,
}

impl fmt::Display for CoreVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreVerdict::Trivial => write!(f, "trivial"),
            CoreVerdict::Nontrivial(l) => write!(f, "nontrivial {l}"),
            CoreVerdict::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitData {
    pub index: usize,
    pub h: Lattice,
    pub f: RatMatrix,
    pub transversal: Vec<Vector>,
}

#[derive(Clone, Debug)]
pub struct GDataSpec {
    n: usize,
    orbits: Vec<OrbitData>,
}

fn rat_str(x: &BigRational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl GDataSpec {
    /// Validates indices, integrality of each `f_i` on `H_i`, and the
    /// transversals. An empty transversal is replaced by the digit one.
    pub fn new(n: usize, orbits: Vec<OrbitData>) -> Result<Self> {
        if orbits.is_empty() {
            return Err(Error::input("G-data needs at least one orbit"));
        }
        let mut checked = Vec::with_capacity(orbits.len());
        for (i, mut o) in orbits.into_iter().enumerate() {
            let tag = i + 1;
            if o.h.dim() != n || o.f.len() != n || o.f.iter().any(|r| r.len() != n) {
                return Err(Error::input(format!(
                    "orbit {tag}: dimensions do not match rank {n}"
                )));
            }
            let idx =
                o.h.index()
                    .ok_or_else(|| Error::input(format!("orbit {tag}: H has deficient rank")))?;
            if idx != BigInt::from(o.index) {
                return Err(Error::input(format!(
                    "orbit {tag}: declared index {} but [Z^n : H] = {idx}",
                    o.index
                )));
            }
            image(&o.h, &o.f)
                .map_err(|_| Error::input(format!("orbit {tag}: f does not map H into Z^{n}")))?;
            if o.transversal.is_empty() {
                o.transversal = o.h.digit_transversal(TRANSVERSAL_LIMIT)?;
            }
            if o.transversal.len() != o.index {
                return Err(Error::input(format!(
                    "orbit {tag}: transversal has {} rows, expected {}",
                    o.transversal.len(),
                    o.index
                )));
            }
            let mut seen = HashMap::new();
            for t in &o.transversal {
                if t.len() != n {
                    return Err(Error::input(format!(
                        "orbit {tag}: transversal row of wrong length"
                    )));
                }
                if seen.insert(o.h.reduce(t), ()).is_some() {
                    return Err(Error::input(format!(
                        "orbit {tag}: transversal rows are congruent modulo H"
                    )));
                }
            }
            checked.push(o);
        }
        Ok(GDataSpec { n, orbits: checked })
    }

    /// Text format: `rank n`, then per orbit `orbit i index m_i`, `H` and
    /// `n` rows, `f` and `n` rational rows, optional `transversal` rows.
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                (
                    i + 1,
                    l.split('#')
                        .next()
                        .unwrap_or("")
                        .split_whitespace()
                        .collect::<Vec<_>>(),
                )
            })
            .filter(|(_, w)| !w.is_empty())
            .collect();
        let mut it = lines.into_iter().peekable();
        let n = match it.next() {
            Some((_, w)) if w.len() == 2 && w[0] == "rank" => w[1]
                .parse::<usize>()
                .map_err(|_| Error::parse(1, "rank must be a non-negative integer"))?,
            Some((ln, _)) => return Err(Error::parse(ln, "expected `rank n`")),
            None => return Err(Error::parse(1, "empty G-data")),
        };
        let int_row = |ln: usize, w: &[&str]| -> Result<Vector> {
            if w.len() != n {
                return Err(Error::parse(ln, format!("expected {n} entries")));
            }
            w.iter()
                .map(|s| {
                    s.parse::<BigInt>()
                        .map_err(|_| Error::parse(ln, format!("bad integer `{s}`")))
                })
                .collect()
        };
        let rat_row = |ln: usize, w: &[&str]| -> Result<Vec<BigRational>> {
            if w.len() != n {
                return Err(Error::parse(ln, format!("expected {n} entries")));
            }
            w.iter()
                .map(|s| {
                    parse_rational(s).ok_or_else(|| Error::parse(ln, format!("bad rational `{s}`")))
                })
                .collect()
        };
        let mut orbits = Vec::new();
        while let Some((ln, w)) = it.next() {
            if w.len() != 4 || w[0] != "orbit" || w[2] != "index" {
                return Err(Error::parse(ln, "expected `orbit i index m_i`"));
            }
            let pos: usize = w[1]
                .parse()
                .map_err(|_| Error::parse(ln, "bad orbit number"))?;
            if pos != orbits.len() + 1 {
                return Err(Error::parse(
                    ln,
                    "orbits must be numbered 1, 2, ... in order",
                ));
            }
            let index: usize = w[3].parse().map_err(|_| Error::parse(ln, "bad index"))?;
            let mut expect = |kw: &str| -> Result<usize> {
                match it.next() {
                    Some((ln, w)) if w.len() == 1 && w[0] == kw => Ok(ln),
                    Some((ln, _)) => Err(Error::parse(ln, format!("expected `{kw}`"))),
                    None => Err(Error::parse(0, format!("missing `{kw}`"))),
                }
            };
            expect("H")?;
            let mut hrows = Vec::new();
            for _ in 0..n {
                let (ln, w) = it.next().ok_or_else(|| Error::parse(0, "missing H row"))?;
                hrows.push(int_row(ln, &w)?);
            }
            let mut expect = |kw: &str| -> Result<usize> {
                match it.next() {
                    Some((ln, w)) if w.len() == 1 && w[0] == kw => Ok(ln),
                    Some((ln, _)) => Err(Error::parse(ln, format!("expected `{kw}`"))),
                    None => Err(Error::parse(0, format!("missing `{kw}`"))),
                }
            };
            expect("f")?;
            let mut f = Vec::new();
            for _ in 0..n {
                let (ln, w) = it.next().ok_or_else(|| Error::parse(0, "missing f row"))?;
                f.push(rat_row(ln, &w)?);
            }
            let mut transversal = Vec::new();
            if matches!(it.peek(), Some((_, w)) if w.len() == 1 && w[0] == "transversal") {
                it.next();
                for _ in 0..index {
                    let (ln, w) = it
                        .next()
                        .ok_or_else(|| Error::parse(0, "missing transversal row"))?;
                    transversal.push(int_row(ln, &w)?);
                }
            }
            orbits.push(OrbitData {
                index,
                h: Lattice::from_rows(n, hrows)?,
                f,
                transversal,
            });
        }
        GDataSpec::new(n, orbits)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn orbits(&self) -> &[OrbitData] {
        &self.orbits
    }

    /// The `m` vector.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.index).collect()
    }

    pub fn degree(&self) -> usize {
        self.orbit_sizes().iter().sum()
    }

    /// Each `f_i` maps `H_i` onto `Z^n`.
    pub fn all_onto(&self) -> Result<bool> {
        for o in &self.orbits {
            if image(&o.h, &o.f)? != Lattice::full(self.n) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for GDataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {}", self.n)?;
        for (i, o) in self.orbits.iter().enumerate() {
            writeln!(f, "orbit {} index {}", i + 1, o.index)?;
            writeln!(f, "H")?;
            // H as given by its HNF, padded to n rows is not meaningful for
            // deficient rank, which validation rules out
            for r in o.h.basis() {
                let xs: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                writeln!(f, "{}", xs.join(" "))?;
            }
            writeln!(f, "f")?;
            for r in &o.f {
                let xs: Vec<String> = r.iter().map(rat_str).collect();
                writeln!(f, "{}", xs.join(" "))?;
            }
            writeln!(f, "transversal")?;
            for t in &o.transversal {
                let xs: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                writeln!(f, "{}", xs.join(" "))?;
            }
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p.parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn valuation(x: &BigInt, p: &BigInt) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.abs();
    let mut v = 0;
    while (&x % p).is_zero() {
        x /= p;
        v += 1;
    }
    Some(v)
}

fn rat_valuation(x: &BigRational, p: &BigInt) -> Option<i64> {
    Some(valuation(x.numer(), p)? - valuation(x.denom(), p)?)
}

fn prime_factors(mut x: BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= x {
        if (&x % &d).is_zero() {
            out.push(d.clone());
            while (&x % &d).is_zero() {
                x /= &d;
            }
        }
        d += 1;
    }
    if x > BigInt::one() {
        out.push(x);
    }
    out
}

/// Characteristic polynomial `det(xI - F)`, coefficients from degree 0 up,
/// by the Faddeev-LeVerrier recursion.
pub fn char_poly(f: &RatMatrix) -> Vec<BigRational> {
    let n = f.len();
    let mul = |a: &RatMatrix, b: &RatMatrix| -> RatMatrix {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(BigRational::zero(), |s, k| s + &a[i][k] * &b[k][j]))
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m: RatMatrix = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut next = mul(f, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let fm = mul(f, &m);
        let trace = (0..n).fold(BigRational::zero(), |s, i| s + &fm[i][i]);
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
    }
    coeffs
}

/// Every eigenvalue of `F` has negative `p`-adic valuation for some prime
/// `p`, so no nonzero lattice is `F`-stable: an invariant lattice would
/// carry eigenvalues that are algebraic integers.
fn expanding_certificate(f: &RatMatrix) -> bool {
    let chi = char_poly(f);
    let n = f.len();
    if n == 0 || chi[0].is_zero() {
        return false;
    }
    let mut denoms = BigInt::one();
    for c in &chi {
        denoms *= c.denom();
    }
    prime_factors(denoms).iter().any(|p| {
        let v0 = rat_valuation(&chi[0], p).expect("nonzero");
        (1..=n).all(|k| rat_valuation(&chi[k], p).is_none_or(|v| v > v0))
    })
}

impl GDataSpec {
    pub fn intersection_of_domains(&self) -> Lattice {
        self.orbits
            .iter()
            .skip(1)
            .fold(self.orbits[0].h.clone(), |k, o| k.intersect(&o.h))
    }

    /// Iterates `K ← K ∩ ⋂ f_i^{-1}(K)` from `K = ⋂ H_i`. A fixed point is
    /// the core. Past `index_bound` the chain is abandoned; triviality is
    /// then claimed only when some `f_i` admits no invariant lattice at all.
    pub fn f_core(&self, index_bound: u64) -> Result<CoreVerdict> {
        let bound = BigInt::from(index_bound);
        let mut k = self.intersection_of_domains();
        loop {
            let mut next = k.clone();
            for o in &self.orbits {
                next = next.intersect(&preimage(&k, &o.f, &k)?);
            }
            if next == k {
                return Ok(if k.rank() == 0 {
                    CoreVerdict::Trivial
                } else {
                    CoreVerdict::Nontrivial(k)
                });
            }
            if next.rank() == 0 {
                return Ok(CoreVerdict::Trivial);
            }
            k = next;
            if k.index().is_some_and(|i| i > bound) {
                break;
            }
        }
        if self.orbits.iter().any(|o| expanding_certificate(&o.f)) {
            Ok(CoreVerdict::Trivial)
        } else {
            Ok(CoreVerdict::Unknown)
        }
    }

    /// Every `f_i` onto and the F-core trivial.
    pub fn is_recurrent(&self) -> Result<Tri> {
        if !self.all_onto()? {
            return Ok(Tri::False);
        }
        Ok(match self.f_core(DEFAULT_INDEX_BOUND)? {
            CoreVerdict::Trivial => Tri::True,
            CoreVerdict::Nontrivial(_) => Tri::False,
            CoreVerdict::Unknown => Tri::Unknown,
        })
    }

    /// Recurrent, and each `f_i` stays onto on `H_i ∩ ⋂_{j≠i} ker f_j`.
    pub fn is_strongly_recurrent(&self) -> Result<Tri> {
        let kernels = self
            .orbits
            .iter()
            .map(|o| kernel_lattice(&o.h, &o.f))
            .collect::<Result<Vec<_>>>()?;
        for (i, o) in self.orbits.iter().enumerate() {
            let mut dom = o.h.clone();
            for (j, kj) in kernels.iter().enumerate() {
                if j != i {
                    dom = dom.intersect(kj);
                }
            }
            if image(&dom, &o.f)? != Lattice::full(self.n) {
                return Ok(Tri::False);
            }
        }
        self.is_recurrent()
    }

    /// Self-similar representation of `Z^n`: the images of the standard
    /// basis. Letters are the cosets `H_i t`, orbit blocks in order; `g`
    /// sends `H_i t` to `H_i t'` with `t' ≡ t + g`, with section
    /// `φ(f_i(t + g - t'))`.
    pub fn induced_representation(&self) -> Result<Vec<Automorphism>> {
        let machine = Arc::new(self.machine()?);
        Ok((0..self.n)
            .map(|i| {
                let e: Vector = (0..self.n).map(|j| BigInt::from((i == j) as i32)).collect();
                Automorphism::lazy(machine.clone(), &e)
            })
            .collect())
    }

    /// Image of an arbitrary element.
    pub fn represent(&self, g: &[BigInt]) -> Result<Automorphism> {
        if g.len() != self.n {
            return Err(Error::input(format!(
                "element must have {} coordinates",
                self.n
            )));
        }
        Ok(Automorphism::lazy(Arc::new(self.machine()?), &g.to_vec()))
    }

    fn machine(&self) -> Result<LazyAutomaton<Vector>> {
        let m = self.degree();
        // coset lookup: reduced representative -> letter
        let mut blocks = Vec::new();
        let mut offset = 0;
        for o in &self.orbits {
            let lookup: HashMap<Vector, usize> = o
                .transversal
                .iter()
                .enumerate()
                .map(|(k, t)| (o.h.reduce(t), offset + k))
                .collect();
            blocks.push((o.clone(), offset, lookup));
            offset += o.index;
        }
        let blocks = Arc::new(blocks);
        // integrality was checked on H; t + g - t' lies in H
        let gen = move |g: &Vector| {
            let mut images = vec![0usize; m];
            let mut children = vec![Vec::new(); m];
            for (o, offset, lookup) in blocks.iter() {
                for (k, t) in o.transversal.iter().enumerate() {
                    let moved: Vector = t.iter().zip(g).map(|(a, b)| a + b).collect();
                    let target = lookup[&o.h.reduce(&moved)];
                    let t2 = &o.transversal[target - offset];
                    let diff: Vector = moved.iter().zip(t2).map(|(a, b)| a - b).collect();
                    images[offset + k] = target;
                    children[offset + k] = apply_integral(&diff, &o.f).expect("f integral on H");
                }
            }
            (
                Perm::from_images(images).expect("coset action is a permutation"),
                children,
            )
        };
        Ok(LazyAutomaton::new(m, gen).with_labels(|g: &Vector| {
            let xs: Vec<String> = g.iter().map(|x| x.to_string()).collect();
            format!("({})", xs.join(","))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ADDING: &str = "rank 1\norbit 1 index 2\nH\n2\nf\n1/2\ntransversal\n0\n1\n";
    const DOUBLE: &str = "rank 1\norbit 1 index 2\nH\n2\nf\n1/2\norbit 2 index 2\nH\n2\nf\n1/2\n";

    #[test]
    fn halving_core_is_trivial() {
        let d = GDataSpec::parse(ADDING).unwrap();
        assert_eq!(d.f_core(DEFAULT_INDEX_BOUND).unwrap(), CoreVerdict::Trivial);
        assert_eq!(d.is_recurrent().unwrap(), Tri::True);
        assert_eq!(d.is_strongly_recurrent().unwrap(), Tri::True);
    }

    #[test]
    fn identity_core_is_everything() {
        let d = GDataSpec::parse("rank 1\norbit 1 index 1\nH\n1\nf\n1\n").unwrap();
        assert_eq!(
            d.f_core(DEFAULT_INDEX_BOUND).unwrap(),
            CoreVerdict::Nontrivial(Lattice::full(1))
        );
        assert_eq!(d.is_recurrent().unwrap(), Tri::False);
        let id = &d.induced_representation().unwrap()[0];
        assert!(id.is_identity().unwrap());
    }

    #[test]
    fn double_adding_data() {
        let d = GDataSpec::parse(DOUBLE).unwrap();
        assert_eq!(d.is_recurrent().unwrap(), Tri::True);
        assert_eq!(d.is_strongly_recurrent().unwrap(), Tri::False);
        let a = &d.induced_representation().unwrap()[0];
        assert_eq!(
            a.root_perm().unwrap(),
            Perm::parse(4, "(1 2)(3 4)").unwrap()
        );
        let s = a.sections().unwrap();
        assert!(s[0].is_identity().unwrap() && s[2].is_identity().unwrap());
        assert!(s[1].equal_at_depth(a, 6).unwrap());
    }

    #[test]
    fn non_onto_is_not_recurrent() {
        let d = GDataSpec::parse("rank 1\norbit 1 index 2\nH\n2\nf\n1\n").unwrap();
        assert_eq!(d.is_recurrent().unwrap(), Tri::False);
    }

    #[test]
    fn unknown_when_core_has_no_certificate() {
        // diag(1/2, 1): the core 0 x Z is never reached by the finite chain
        let d = GDataSpec::parse("rank 2\norbit 1 index 2\nH\n2 0\n0 1\nf\n1/2 0\n0 1\n").unwrap();
        assert_eq!(d.f_core(1 << 20).unwrap(), CoreVerdict::Unknown);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(GDataSpec::parse("rank 1\norbit 1 index 3\nH\n2\nf\n1/2\n").is_err());
        assert!(GDataSpec::parse("rank 1\norbit 1 index 2\nH\n2\nf\n1/4\n").is_err());
        assert!(
            GDataSpec::parse("rank 1\norbit 1 index 2\nH\n2\nf\n1/2\ntransversal\n0\n2\n").is_err()
        );
    }

    #[test]
    fn char_poly_of_companion() {
        let r = |p: i64| BigRational::from_integer(p.into());
        // x^2 - 3x + 2
        let f = vec![vec![r(0), r(1)], vec![r(-2), r(3)]];
        assert_eq!(char_poly(&f), vec![r(2), r(-3), r(1)]);
    }
}
