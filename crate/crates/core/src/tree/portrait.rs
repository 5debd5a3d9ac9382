//! Depth-truncated automorphisms.
//!
//! A portrait of depth `d` stores the permutation at every vertex of length
//! `< d`, i.e. the image of an automorphism modulo the level-`d` stabilizer.
//! Vertices of level `l` are indexed `0..m^l` by reading the word as a
//! base-`m` number, most significant letter first; the permutations are
//! stored level by level in one flat byte buffer.

use std::fmt;

use crate::error::{Error, Result};
use crate::tree::perm::Perm;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    m: usize,
    depth: usize,
    data: Vec<u8>,
}

/// Number of vertices of length `< depth`.
pub fn vertex_count(m: usize, depth: usize) -> usize {
    (0..depth).map(|l| m.pow(l as u32)).sum()
}

/// Order of the full truncated ambient group `prod_{l<depth} (m!)^{m^l}`,
/// or `None` on overflow.
pub fn ambient_order(m: usize, depth: usize) -> Option<u128> {
    let fact: u128 = (1..=m as u128).product();
    let mut out: u128 = 1;
    for l in 0..depth {
        let count = (m as u128).checked_pow(l as u32)?;
        let factor = fact.checked_pow(u32::try_from(count).ok()?)?;
        out = out.checked_mul(factor)?;
    }
    Some(out)
}

impl Portrait {
    pub fn identity(m: usize, depth: usize) -> Self {
        let n = vertex_count(m, depth);
        let mut data = Vec::with_capacity(n * m);
        for _ in 0..n {
            data.extend(0..m as u8);
        }
        Portrait { m, depth, data }
    }

    /// Builds a portrait from one permutation per vertex, level by level.
    pub fn from_vertex_perms(m: usize, depth: usize, perms: &[Perm]) -> Result<Self> {
        if perms.len() != vertex_count(m, depth) {
            return Err(Error::input("wrong number of vertex permutations"));
        }
        let mut data = Vec::with_capacity(perms.len() * m);
        for p in perms {
            if p.degree() != m {
                return Err(Error::DegreeMismatch {
                    expected: m,
                    found: p.degree(),
                });
            }
            data.extend_from_slice(p.as_bytes());
        }
        Ok(Portrait { m, depth, data })
    }

    pub(crate) fn from_raw(m: usize, depth: usize, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), vertex_count(m, depth) * m);
        Portrait { m, depth, data }
    }

    /// `root` at the root and the children's portraits below it. Children
    /// must have depth `depth - 1`.
    pub fn from_sections(root: &Perm, children: &[Portrait]) -> Result<Self> {
        let m = root.degree();
        if children.len() != m {
            return Err(Error::input("need one child portrait per letter"));
        }
        let sub = children[0].depth;
        if children.iter().any(|c| c.depth != sub || c.m != m) {
            return Err(Error::input("child portraits must share degree and depth"));
        }
        let depth = sub + 1;
        let mut data = Vec::with_capacity(vertex_count(m, depth) * m);
        data.extend_from_slice(root.as_bytes());
        for l in 0..sub {
            let start = vertex_count(m, l) * m;
            let len = m.pow(l as u32) * m;
            for c in children {
                data.extend_from_slice(&c.data[start..start + len]);
            }
        }
        Ok(Portrait { m, depth, data })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.depth
    }

    #[inline]
    fn offset(&self, level: usize, index: usize) -> usize {
        (vertex_count(self.m, level) + index) * self.m
    }

    #[inline]
    pub(crate) fn perm_bytes(&self, level: usize, index: usize) -> &[u8] {
        let o = self.offset(level, index);
        &self.data[o..o + self.m]
    }

    /// Permutation at the vertex with the given level and index.
    pub fn perm_at_index(&self, level: usize, index: usize) -> Perm {
        Perm::from_bytes_unchecked(self.perm_bytes(level, index))
    }

    /// Permutation at a (0-based) vertex word of length `< depth`.
    pub fn perm_at(&self, word: &[usize]) -> Perm {
        assert!(word.len() < self.depth, "vertex below portrait depth");
        self.perm_at_index(word.len(), word_index(self.m, word))
    }

    pub fn root_perm(&self) -> Perm {
        if self.depth == 0 {
            Perm::identity(self.m)
        } else {
            self.perm_at_index(0, 0)
        }
    }

    pub fn is_identity(&self) -> bool {
        self.data
            .chunks(self.m)
            .all(|c| c.iter().enumerate().all(|(i, &x)| i == x as usize))
    }

    /// Truncation to a smaller depth.
    pub fn truncate(&self, depth: usize) -> Portrait {
        assert!(depth <= self.depth);
        Portrait {
            m: self.m,
            depth,
            data: self.data[..vertex_count(self.m, depth) * self.m].to_vec(),
        }
    }

    /// Images of all level-`level` vertex indices (requires `level <= depth`).
    pub fn level_images(&self, level: usize) -> Vec<usize> {
        assert!(level <= self.depth);
        let mut img = vec![0usize];
        for l in 0..level {
            let mut next = Vec::with_capacity(img.len() * self.m);
            for (idx, &i) in img.iter().enumerate() {
                let p = self.perm_bytes(l, idx);
                for y in 0..self.m {
                    next.push(i * self.m + p[y] as usize);
                }
            }
            img = next;
        }
        img
    }

    /// Image of a word of length `<= depth` under the right action.
    pub fn act(&self, word: &[usize]) -> Result<Vec<usize>> {
        if word.len() > self.depth {
            return Err(Error::input("word longer than portrait depth"));
        }
        let mut idx = 0;
        let mut out = Vec::with_capacity(word.len());
        for (l, &y) in word.iter().enumerate() {
            if y >= self.m {
                return Err(Error::input(format!("letter {} out of range", y + 1)));
            }
            out.push(self.perm_bytes(l, idx)[y] as usize);
            idx = idx * self.m + y;
        }
        Ok(out)
    }

    /// Product `self * other`: first `self`, then `other`.
    pub fn compose(&self, other: &Portrait) -> Portrait {
        assert_eq!(self.m, other.m, "degree mismatch");
        assert_eq!(self.depth, other.depth, "depth mismatch");
        let m = self.m;
        let mut data = Vec::with_capacity(self.data.len());
        let mut img = vec![0usize];
        for l in 0..self.depth {
            let mut next = Vec::with_capacity(img.len() * m);
            for (idx, &i) in img.iter().enumerate() {
                let p = self.perm_bytes(l, idx);
                let q = other.perm_bytes(l, i);
                for y in 0..m {
                    data.push(q[p[y] as usize]);
                    next.push(i * m + p[y] as usize);
                }
            }
            img = next;
        }
        Portrait {
            m,
            depth: self.depth,
            data,
        }
    }

    pub fn inverse(&self) -> Portrait {
        let m = self.m;
        let mut data = vec![0u8; self.data.len()];
        let mut img = vec![0usize];
        for l in 0..self.depth {
            let base = vertex_count(m, l);
            let mut next = Vec::with_capacity(img.len() * m);
            for (idx, &i) in img.iter().enumerate() {
                let p = self.perm_bytes(l, idx);
                let o = (base + i) * m;
                for y in 0..m {
                    data[o + p[y] as usize] = y as u8;
                    next.push(i * m + p[y] as usize);
                }
            }
            img = next;
        }
        Portrait {
            m,
            depth: self.depth,
            data,
        }
    }

    pub fn pow(&self, n: i64) -> Portrait {
        let mut base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut out = Portrait::identity(self.m, self.depth);
        while e > 0 {
            if e & 1 == 1 {
                out = out.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        out
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, g: &Portrait) -> Portrait {
        g.inverse().compose(self).compose(g)
    }

    pub fn commutes_with(&self, other: &Portrait) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// Order in the truncated group.
    pub fn order(&self) -> u64 {
        let id = Portrait::identity(self.m, self.depth);
        let mut x = self.clone();
        let mut n = 1;
        while x != id {
            x = x.compose(self);
            n += 1;
        }
        n
    }

    /// Section at a vertex, as a portrait of depth `depth - |word|`.
    pub fn section(&self, word: &[usize]) -> Portrait {
        assert!(word.len() <= self.depth);
        let m = self.m;
        let idx = word_index(m, word);
        let depth = self.depth - word.len();
        let mut data = Vec::with_capacity(vertex_count(m, depth) * m);
        for j in 0..depth {
            let width = m.pow(j as u32);
            let start = self.offset(word.len() + j, idx * width);
            data.extend_from_slice(&self.data[start..start + width * m]);
        }
        Portrait { m, depth, data }
    }

    /// Multi-line listing: one `word: perm` line per vertex with a
    /// non-trivial permutation (cycle notation, 1-based).
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for l in 0..self.depth {
            for idx in 0..self.m.pow(l as u32) {
                let p = self.perm_at_index(l, idx);
                if !p.is_identity() {
                    let word = index_word(self.m, l, idx);
                    let w = if word.is_empty() {
                        "root".to_string()
                    } else {
                        crate::tree::perm::format_word(&word)
                    };
                    out.push_str(&format!("{w}: {}\n", p.cycle_string()));
                }
            }
        }
        if out.is_empty() {
            out.push_str("identity\n");
        }
        out
    }
}

/// Index of a word among the vertices of its level.
pub fn word_index(m: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &y| acc * m + y)
}

/// Word of the vertex with the given level and index.
pub fn index_word(m: usize, level: usize, mut index: usize) -> Vec<usize> {
    let mut word = vec![0; level];
    for slot in word.iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
    word
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait(m={}, depth={}; ", self.m, self.depth)?;
        for l in 0..self.depth {
            let perms: Vec<String> = (0..self.m.pow(l as u32))
                .map(|i| self.perm_at_index(l, i).cycle_string())
                .collect();
            write!(f, "[{}]", perms.join(" "))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Portrait {
    /// Compact one-line form: levels separated by ` | `, vertex permutations
    /// in cycle notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let levels: Vec<String> = (0..self.depth)
            .map(|l| {
                (0..self.m.pow(l as u32))
                    .map(|i| self.perm_at_index(l, i).cycle_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", levels.join(" | "))
    }
}
