//! Linear algebra over `F_p` for subspaces of `F_p^n`.
//!
//! A subspace is held as a canonical echelon basis: basis vectors sorted by
//! pivot position, each pivot equal to 1 and every other basis vector zero in
//! that pivot's coordinate. Two subspaces are equal iff their bases are
//! identical.

use rand::Rng;

use crate::error::{HspError, Result};
use crate::rng::RngStream;

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        p - b + a
    }
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    // Fermat: a^(p-2)
    let mut base = a as u64 % p as u64;
    let mut exp = p as u64 - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// `v -= coef * row` over `F_p`.
fn axpy(v: &mut [u32], coef: u32, row: &[u32], p: u32) {
    for (x, &r) in v.iter_mut().zip(row) {
        if r != 0 {
            *x = sub_mod(*x, mul_mod(coef, r, p), p);
        }
    }
}

/// Canonical basis of a subspace of `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EchelonBasis {
    prime: u32,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    /// The zero subspace of `F_p^n`.
    pub fn zero(prime: u32, dim: usize) -> Self {
        EchelonBasis {
            prime,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Span of `vectors`. Residues must already be reduced modulo `prime`.
    pub fn span<'a>(prime: u32, dim: usize, vectors: impl IntoIterator<Item = &'a [u32]>) -> Self {
        let mut basis = Self::zero(prime, dim);
        for v in vectors {
            basis.insert(v);
            if basis.rank() == dim {
                break;
            }
        }
        basis
    }

    /// Builds a basis from rows that are already in canonical form, verifying that they are.
    pub fn from_canonical_rows(prime: u32, dim: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let candidate = Self::span(prime, dim, rows.iter().map(Vec::as_slice));
        if candidate.rows != rows {
            return Err(HspError::domain(
                "basis rows are not linearly independent or not in canonical echelon form",
            ));
        }
        Ok(candidate)
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Adds `v` to the spanning set. Returns whether the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let p = self.prime;
        let mut v = v.to_vec();
        self.reduce_in_place(&mut v);
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let scale = inv_mod(v[pivot], p);
        for x in v.iter_mut() {
            *x = mul_mod(*x, scale, p);
        }
        for row in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                axpy(row, c, &v, p);
            }
        }
        let at = self.pivots.partition_point(|&q| q < pivot);
        self.rows.insert(at, v);
        self.pivots.insert(at, pivot);
        true
    }

    fn reduce_in_place(&self, v: &mut [u32]) {
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            let c = v[pivot];
            if c != 0 {
                axpy(v, c, row, self.prime);
            }
        }
    }

    /// Canonical representative of the coset `v + span`: the unique vector in
    /// the coset that is zero at every pivot coordinate.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut out = v.to_vec();
        self.reduce_in_place(&mut out);
        out
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Every element of the subspace. Intended for small `p^rank`.
    pub fn elements(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32; self.dim]];
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * self.prime as usize);
            for v in &out {
                for c in 0..self.prime {
                    let mut w = v.clone();
                    for (x, &r) in w.iter_mut().zip(row) {
                        *x = ((*x as u64 + c as u64 * r as u64) % self.prime as u64) as u32;
                    }
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}

/// Rank of a list of vectors over `F_p`.
pub fn rank_of(prime: u32, dim: usize, vectors: &[Vec<u32>]) -> usize {
    EchelonBasis::span(prime, dim, vectors.iter().map(Vec::as_slice)).rank()
}

/// Column space of a uniformly random full-rank `n x k` matrix over `F_p`,
/// found by rejection. Uniform over all `k`-dimensional subspaces.
pub fn random_subspace(prime: u32, dim: usize, rank: usize, rng: &mut RngStream) -> EchelonBasis {
    loop {
        let cols: Vec<Vec<u32>> = (0..rank)
            .map(|_| (0..dim).map(|_| rng.random_range(0..prime)).collect())
            .collect();
        let basis = EchelonBasis::span(prime, dim, cols.iter().map(Vec::as_slice));
        if basis.rank() == rank {
            return basis;
        }
    }
}

/// Probability that a uniform `n x k` matrix over `F_p` has rank `k`:
/// `prod_{j<k} (1 - p^{j-n})`.
pub fn full_rank_probability(prime: u32, dim: usize, rank: usize) -> f64 {
    (0..rank)
        .map(|j| 1.0 - (prime as f64).powi(j as i32 - dim as i32))
        .product()
}

/// Every `rank`-dimensional subspace of `F_p^dim`, each exactly once, in a
/// fixed order (pivot sets lexicographically, then free entries).
pub fn enumerate_subspaces(prime: u32, dim: usize, rank: usize) -> Vec<EchelonBasis> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(rank);
    pivot_sets(dim, rank, 0, &mut pivots, &mut |piv| {
        // Free slots: (row, col) with col > pivot[row] and col not a pivot.
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| {
                ((c + 1)..dim)
                    .filter(|j| !piv.contains(j))
                    .map(move |j| (r, j))
            })
            .collect();
        let mut values = vec![0u32; free.len()];
        loop {
            let mut rows = vec![vec![0u32; dim]; rank];
            for (r, &c) in piv.iter().enumerate() {
                rows[r][c] = 1;
            }
            for (&(r, j), &v) in free.iter().zip(&values) {
                rows[r][j] = v;
            }
            out.push(EchelonBasis {
                prime,
                dim,
                rows,
                pivots: piv.to_vec(),
            });
            // odometer
            let mut i = 0;
            while i < values.len() {
                values[i] += 1;
                if values[i] < prime {
                    break;
                }
                values[i] = 0;
                i += 1;
            }
            if i == values.len() {
                break;
            }
        }
    });
    out
}

fn pivot_sets(
    dim: usize,
    rank: usize,
    start: usize,
    acc: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if acc.len() == rank {
        visit(acc);
        return;
    }
    let remaining = rank - acc.len();
    for c in start..=(dim - remaining) {
        acc.push(c);
        pivot_sets(dim, rank, c + 1, acc, visit);
        acc.pop();
    }
}
