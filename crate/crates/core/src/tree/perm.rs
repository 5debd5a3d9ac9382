//! Permutations of the alphabet `{1..m}`.
//!
//! Letters are stored 0-based; every text form (parsing and `Display`) is
//! 1-based. Permutations act on the right: `(y)(p * q) = ((y)p)q`, so
//! [`Perm::then`] composes left to right.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(m: usize) -> Self {
        assert!(m <= u8::MAX as usize, "alphabet too large");
        Perm {
            images: (0..m as u8).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        if m > u8::MAX as usize {
            return Err(Error::input("alphabet too large"));
        }
        let mut seen = vec![false; m];
        for &x in &images {
            if x >= m || seen[x] {
                return Err(Error::input(format!(
                    "not a permutation of 1..{m}: {:?}",
                    images.iter().map(|i| i + 1).collect::<Vec<_>>()
                )));
            }
            seen[x] = true;
        }
        Ok(Perm {
            images: images.into_iter().map(|x| x as u8).collect(),
        })
    }

    pub(crate) fn from_bytes_unchecked(images: &[u8]) -> Self {
        Perm {
            images: images.to_vec(),
        }
    }

    /// Builds a permutation of degree `m` from 0-based disjoint cycles.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..m).collect();
        let mut touched = vec![false; m];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= m {
                    return Err(Error::input(format!(
                        "letter {} out of range 1..{m}",
                        x + 1
                    )));
                }
                if touched[x] {
                    return Err(Error::input("cycles are not disjoint"));
                }
                touched[x] = true;
                images[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    /// Parses either an image list (`2 1 4 3`) or cycle notation
    /// (`(1 2)(3 4)`, `()` for the identity). Both forms are 1-based.
    pub fn parse(m: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('(') {
            let mut cycles = Vec::new();
            let mut rest = text;
            while !rest.is_empty() {
                let open = rest
                    .find('(')
                    .ok_or_else(|| Error::input(format!("bad cycle notation: {text}")))?;
                if !rest[..open].trim().is_empty() {
                    return Err(Error::input(format!("bad cycle notation: {text}")));
                }
                let close = rest
                    .find(')')
                    .ok_or_else(|| Error::input(format!("unclosed cycle: {text}")))?;
                let body = &rest[open + 1..close];
                let cycle = parse_letters(m, body)?;
                if !cycle.is_empty() {
                    cycles.push(cycle);
                }
                rest = rest[close + 1..].trim_start();
            }
            Perm::from_cycles(m, &cycles)
        } else {
            let images = parse_letters(m, text)?;
            if images.len() != m {
                return Err(Error::input(format!(
                    "expected {m} images, found {}",
                    images.len()
                )));
            }
            Perm::from_images(images)
        }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based letter `y`.
    #[inline]
    pub fn apply(&self, y: usize) -> usize {
        self.images[y] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&x| x as usize)
    }

    pub(crate) fn as_bytes(&self) -> &[u8] {
        &self.images
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u8; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u8;
        }
        Perm { images }
    }

    pub fn pow(&self, n: i64) -> Perm {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        for _ in 0..n.unsigned_abs() {
            out = out.then(&base);
        }
        out
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &x)| i == x as usize)
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.then(other) == other.then(self)
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }

    /// Disjoint cycles (0-based), each starting at its minimal letter,
    /// ordered by that letter. Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let m = self.degree();
        let mut seen = vec![false; m];
        let mut out = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// 1-based cycle notation without fixed points; `()` for the identity.
    pub fn cycle_string(&self) -> String {
        let parts: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let inner: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
                format!("({})", inner.join(" "))
            })
            .collect();
        if parts.is_empty() {
            "()".to_string()
        } else {
            parts.concat()
        }
    }

    /// All permutations of degree `m` in lexicographic order of image lists.
    pub fn all(m: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..m).collect();
        loop {
            out.push(Perm {
                images: current.iter().map(|&x| x as u8).collect(),
            });
            if !next_permutation(&mut current) {
                break;
            }
        }
        out
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Parses whitespace/comma separated 1-based letters into 0-based ones.
pub fn parse_letters(m: usize, text: &str) -> Result<Vec<usize>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let y: usize = t
                .parse()
                .map_err(|_| Error::input(format!("not a letter: {t:?}")))?;
            if y == 0 || y > m {
                return Err(Error::input(format!("letter {y} out of range 1..{m}")));
            }
            Ok(y - 1)
        })
        .collect()
}

/// Formats a 0-based word as space separated 1-based letters.
pub fn format_word(word: &[usize]) -> String {
    word.iter()
        .map(|y| (y + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Perm {
    /// Image list, 1-based: `2 1 4 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images().map(|x| (x + 1).to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self.cycle_string())
    }
}
