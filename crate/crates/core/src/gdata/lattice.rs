//! Integer lattices in `Z^n` in row Hermite normal form, and rational
//! linear maps acting on row vectors (`v ↦ v·F`).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Vector = Vec<BigInt>;
pub type RatMatrix = Vec<Vec<BigRational>>;

/// Sublattice of `Z^n`. Rows are the nonzero rows of the Hermite normal
/// form: pivots strictly increase, are positive, and entries above a pivot
/// are reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    n: usize,
    rows: Vec<Vector>,
}

/// Row-reduces `rows` to Hermite normal form on the first `cols` columns,
/// carrying any further columns along. Returns the pivot columns; rows
/// past the rank are zero on the first `cols` columns.
fn row_reduce(rows: &mut [Vector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        // Euclid on column c among rows r..
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if !rows[i][c].is_zero()
                    && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot_row = rows[r].clone();
        for i in 0..r {
            let q = rows[i][c].div_floor(&pivot_row[c]);
            if !q.is_zero() {
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{a : a·M = 0}` for the rows of `M`.
fn left_kernel(m: &[Vector], cols: usize) -> Vec<Vector> {
    let k = m.len();
    let mut aug: Vec<Vector> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| {
                if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
            r
        })
        .collect();
    let rank = row_reduce(&mut aug, cols).len();
    aug[rank..].iter().map(|r| r[cols..].to_vec()).collect()
}

fn combine(coeffs: &[BigInt], basis: &[Vector], n: usize) -> Vector {
    let mut out = vec![BigInt::zero(); n];
    for (a, row) in coeffs.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(row) {
            *o += a * x;
        }
    }
    out
}

impl Lattice {
    pub fn from_rows(n: usize, rows: Vec<Vector>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input(format!("lattice rows must have length {n}")));
        }
        let mut rows = rows;
        let rank = row_reduce(&mut rows, n).len();
        rows.truncate(rank);
        Ok(Lattice { n, rows })
    }

    pub fn from_i64(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        Lattice::from_rows(
            n,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn full(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
        Lattice { n, rows }
    }

    pub fn zero(n: usize) -> Self {
        Lattice {
            n,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.n
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    /// `[Z^n : L]`, or `None` when `L` is not of full rank.
    pub fn index(&self) -> Option<BigInt> {
        self.is_full_rank().then(|| {
            self.rows
                .iter()
                .enumerate()
                .map(|(i, r)| r[i].clone())
                .product()
        })
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.n {
            return false;
        }
        let mut v = v.to_vec();
        for row in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            let (q, r) = v[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        v.iter().all(Zero::is_zero)
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Canonical representative of `v + L` (full-rank lattices): the
    /// coordinate at each pivot lands in `[0, pivot)`.
    pub fn reduce(&self, v: &[BigInt]) -> Vector {
        let mut v = v.to_vec();
        for row in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            let q = v[p].div_floor(&row[p]);
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        v
    }

    /// Digit representatives of `Z^n / L`, lexicographically ordered.
    pub fn digit_transversal(&self, limit: usize) -> Result<Vec<Vector>> {
        let index = self
            .index()
            .ok_or_else(|| Error::input("transversal of a lattice of deficient rank"))?;
        if index > BigInt::from(limit) {
            return Err(Error::SizeGuard(format!(
                "lattice index {index} exceeds {limit}"
            )));
        }
        let mut out: Vec<Vector> = vec![Vec::new()];
        for (i, row) in self.rows.iter().enumerate() {
            let d: usize = row[i].clone().try_into().expect("bounded by limit");
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(BigInt::from(x));
                        v
                    })
                })
                .collect();
        }
        Ok(out)
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let rows = self.rows.iter().chain(&other.rows).cloned().collect();
        Lattice::from_rows(self.n, rows).expect("same dimension")
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        let stacked: Vec<Vector> = self.rows.iter().chain(&other.rows).cloned().collect();
        let r = self.rows.len();
        let rows = left_kernel(&stacked, self.n)
            .iter()
            .map(|k| combine(&k[..r], &self.rows, self.n))
            .collect();
        Lattice::from_rows(self.n, rows).expect("same dimension")
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "0");
        }
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let xs: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("({})", xs.join(","))
            })
            .collect();
        write!(f, "<{}>", rows.join(", "))
    }
}

/// `v·F`.
pub fn apply(v: &[BigInt], f: &RatMatrix) -> Vec<BigRational> {
    let n = f.first().map_or(0, Vec::len);
    let mut out = vec![BigRational::zero(); n];
    for (x, row) in v.iter().zip(f) {
        if x.is_zero() {
            continue;
        }
        let x = BigRational::from_integer(x.clone());
        for (o, y) in out.iter_mut().zip(row) {
            *o += &x * y;
        }
    }
    out
}

/// `v·F`, failing if it is not integral.
pub fn apply_integral(v: &[BigInt], f: &RatMatrix) -> Result<Vector> {
    apply(v, f)
        .into_iter()
        .map(|x| {
            if x.is_integer() {
                Ok(x.to_integer())
            } else {
                Err(Error::input(
                    "virtual endomorphism does not map its domain into Z^n",
                ))
            }
        })
        .collect()
}

/// Image of `L` under `F`; `F` must be integral on `L`.
pub fn image(l: &Lattice, f: &RatMatrix) -> Result<Lattice> {
    let rows = l
        .basis()
        .iter()
        .map(|r| apply_integral(r, f))
        .collect::<Result<Vec<_>>>()?;
    Lattice::from_rows(f.first().map_or(0, Vec::len), rows)
}

/// `{x ∈ domain : x·F ∈ target}`.
pub fn preimage(domain: &Lattice, f: &RatMatrix, target: &Lattice) -> Result<Lattice> {
    let n = domain.dim();
    let images = domain
        .basis()
        .iter()
        .map(|r| apply_integral(r, f))
        .collect::<Result<Vec<_>>>()?;
    let r = images.len();
    let stacked: Vec<Vector> = images
        .into_iter()
        .chain(target.basis().iter().cloned())
        .collect();
    let rows = left_kernel(&stacked, target.dim())
        .iter()
        .map(|k| combine(&k[..r], domain.basis(), n))
        .collect();
    Lattice::from_rows(n, rows)
}

/// `ker F` restricted to `domain`.
pub fn kernel_lattice(domain: &Lattice, f: &RatMatrix) -> Result<Lattice> {
    preimage(domain, f, &Lattice::zero(f.first().map_or(0, Vec::len)))
}
