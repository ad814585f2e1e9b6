//! Exact dense linear algebra over prime fields F_p.
//!
//! Subspaces are stored as reduced row echelon bases with no zero rows.
//! The RREF basis is canonical, so comparing bases entry for entry is the
//! subspace equality test; every ideal identity in the crate bottoms out
//! in that comparison.

use rayon::prelude::*;
use thiserror::Error;

/// Largest accepted modulus. Keeps `(p-1)^2` products inside `u64` and
/// trial-division primality affordable.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// Row updates run on the rayon pool once a matrix holds this many entries.
const PAR_ENTRIES: usize = 1 << 17;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("{0} is not a supported prime modulus (must be prime, 2 <= p <= {MAX_PRIME})")]
    BadModulus(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub fn is_prime(p: u64) -> bool {
    if !(2..=MAX_PRIME).contains(&p) {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<(), LinalgError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(LinalgError::BadModulus(p))
    }
}

pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    base %= p;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert_ne!(a % p, 0, "zero has no inverse");
    mod_pow(a, p - 2, p)
}

/// `dst += factor * src` mod p, entrywise.
fn row_axpy(p: u64, dst: &mut [u64], src: &[u64], factor: u64) {
    if factor == 0 {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d = (*d + factor * s) % p;
    }
}

fn row_scale(p: u64, row: &mut [u64], factor: u64) {
    for e in row.iter_mut() {
        *e = *e * factor % p;
    }
}

/// A dense matrix over F_p with entries reduced into `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Result<Self, LinalgError> {
        check_prime(p)?;
        Ok(FpMatrix { p, rows, cols, entries: vec![0; rows * cols] })
    }

    pub fn from_rows(p: u64, cols: usize, rows: Vec<Vec<u64>>) -> Result<Self, LinalgError> {
        check_prime(p)?;
        let mut entries = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row of length {} in a {cols}-column matrix",
                    row.len()
                )));
            }
            entries.extend(row.into_iter().map(|e| e % p));
        }
        Ok(FpMatrix { p, rows: nrows, cols, entries })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self, LinalgError> {
        let mut m = FpMatrix::zero(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix product, with `(p-1)^2`-bounded accumulation chunks so the
    /// sums never leave `u64`.
    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if self.p != other.p {
            return Err(LinalgError::ModulusMismatch(self.p, other.p));
        }
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p;
        let chunk = accumulation_chunk(p);
        let mut out = FpMatrix::zero(p, self.rows, other.cols)?;
        for i in 0..self.rows {
            for (ks, krange) in (0..self.cols).step_by(chunk).enumerate() {
                let hi = (krange + chunk).min(self.cols);
                for k in krange..hi {
                    let a = self.get(i, k);
                    if a == 0 {
                        continue;
                    }
                    let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                    let src = other.row(k);
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += a * s;
                    }
                }
                let _ = ks;
                for d in &mut out.entries[i * other.cols..(i + 1) * other.cols] {
                    *d %= p;
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let p = self.p;
        let chunk = accumulation_chunk(p);
        Ok((0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut acc = 0u64;
                for part in row.chunks(chunk).zip(v.chunks(chunk)) {
                    let mut local = 0u64;
                    for (a, b) in part.0.iter().zip(part.1) {
                        local += a * b;
                    }
                    acc = (acc + local) % p;
                }
                acc
            })
            .collect())
    }
}

/// How many `(p-1)^2` products can be summed before a reduction is needed.
fn accumulation_chunk(p: u64) -> usize {
    let sq = (p - 1) * (p - 1);
    if sq == 0 {
        return usize::MAX;
    }
    ((u64::MAX / sq) as usize).max(1)
}

/// A subspace of F_p^d held as a reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpSubspace {
    p: u64,
    ambient: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FpSubspace {
    pub fn zero(p: u64, ambient: usize) -> Result<Self, LinalgError> {
        check_prime(p)?;
        Ok(FpSubspace { p, ambient, rows: Vec::new(), pivots: Vec::new() })
    }

    pub fn full(p: u64, ambient: usize) -> Result<Self, LinalgError> {
        check_prime(p)?;
        let rows = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Ok(FpSubspace { p, ambient, rows, pivots: (0..ambient).collect() })
    }

    pub fn from_rows(p: u64, ambient: usize, rows: Vec<Vec<u64>>) -> Result<Self, LinalgError> {
        let m = FpMatrix::from_rows(p, ambient, rows)?;
        Ok(rref(&m))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivots
    }

    /// Subtract the projection onto the basis, leaving the residual.
    pub fn reduce_in_place(&self, v: &mut [u64]) {
        let p = self.p;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                row_axpy(p, v, row, p - c);
            }
        }
    }

    pub fn contains_vector(&self, v: &[u64]) -> bool {
        let mut w: Vec<u64> = v.iter().map(|e| e % self.p).collect();
        self.reduce_in_place(&mut w);
        w.iter().all(|&e| e == 0)
    }

    pub fn contains(&self, other: &FpSubspace) -> Result<bool, LinalgError> {
        self.check_compatible(other)?;
        if other.dim() > self.dim() {
            return Ok(false);
        }
        if other.dim() * self.dim() * self.ambient >= PAR_ENTRIES {
            Ok(other.rows.par_iter().all(|r| self.contains_vector(r)))
        } else {
            Ok(other.rows.iter().all(|r| self.contains_vector(r)))
        }
    }

    pub fn to_matrix(&self) -> FpMatrix {
        FpMatrix::from_rows(self.p, self.ambient, self.rows.clone()).expect("basis is rectangular")
    }

    fn check_compatible(&self, other: &FpSubspace) -> Result<(), LinalgError> {
        if self.p != other.p {
            return Err(LinalgError::ModulusMismatch(self.p, other.p));
        }
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch(format!(
                "ambient {} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }
}

/// Incrementally maintained RREF basis. `insert` keeps the basis fully
/// reduced, so `finish` hands back a canonical subspace at any point.
#[derive(Debug, Clone)]
pub struct SubspaceBuilder {
    p: u64,
    ambient: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl SubspaceBuilder {
    pub fn new(p: u64, ambient: usize) -> Result<Self, LinalgError> {
        check_prime(p)?;
        Ok(SubspaceBuilder { p, ambient, rows: Vec::new(), pivots: Vec::new() })
    }

    pub fn from_subspace(s: &FpSubspace) -> Self {
        SubspaceBuilder {
            p: s.p,
            ambient: s.ambient,
            rows: s.rows.clone(),
            pivots: s.pivots.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn contains_vector(&self, v: &[u64]) -> bool {
        let mut w: Vec<u64> = v.iter().map(|e| e % self.p).collect();
        self.reduce(&mut w);
        w.iter().all(|&e| e == 0)
    }

    fn reduce(&self, v: &mut [u64]) {
        let p = self.p;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                row_axpy(p, v, row, p - c);
            }
        }
    }

    /// Insert a vector; returns the new reduced basis row if the dimension
    /// grew, `None` if the vector was already in the span.
    pub fn insert(&mut self, v: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|e| e % p).collect();
        self.reduce(&mut w);
        let lead = w.iter().position(|&e| e != 0)?;
        let inv = mod_inv(w[lead], p);
        row_scale(p, &mut w, inv);
        for (row, _) in self.rows.iter_mut().zip(&self.pivots) {
            let c = row[lead];
            if c != 0 {
                row_axpy(p, row, &w, p - c);
            }
        }
        let at = self.pivots.partition_point(|&pc| pc < lead);
        self.pivots.insert(at, lead);
        self.rows.insert(at, w.clone());
        Some(w)
    }

    pub fn finish(self) -> FpSubspace {
        FpSubspace { p: self.p, ambient: self.ambient, rows: self.rows, pivots: self.pivots }
    }
}

/// Reduced row echelon form of the row space. Deterministic: pivots are
/// chosen as the first nonzero entry in column order.
pub fn rref(m: &FpMatrix) -> FpSubspace {
    let p = m.p;
    let cols = m.cols;
    let mut data = m.entries.clone();
    let nrows = m.rows;
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    let parallel = nrows * cols >= PAR_ENTRIES;
    for c in 0..cols {
        if rank == nrows {
            break;
        }
        let Some(pr) = (rank..nrows).find(|&r| data[r * cols + c] != 0) else {
            continue;
        };
        if pr != rank {
            for k in 0..cols {
                data.swap(rank * cols + k, pr * cols + k);
            }
        }
        let inv = mod_inv(data[rank * cols + c], p);
        row_scale(p, &mut data[rank * cols..(rank + 1) * cols], inv);
        let prow = data[rank * cols..(rank + 1) * cols].to_vec();
        let eliminate = |(r, row): (usize, &mut [u64])| {
            if r != rank {
                let f = row[c];
                if f != 0 {
                    row_axpy(p, row, &prow, p - f);
                }
            }
        };
        if parallel {
            data.par_chunks_mut(cols).enumerate().for_each(eliminate);
        } else {
            data.chunks_mut(cols).enumerate().for_each(eliminate);
        }
        pivots.push(c);
        rank += 1;
    }
    let rows = (0..rank).map(|r| data[r * cols..(r + 1) * cols].to_vec()).collect();
    FpSubspace { p, ambient: cols, rows, pivots }
}

/// The right kernel `{v : m v = 0}`, dim = cols - rank.
pub fn nullspace(m: &FpMatrix) -> FpSubspace {
    let p = m.p;
    let cols = m.cols;
    let reduced = rref(m);
    let pivset: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &reduced.pivots {
            v[c] = true;
        }
        v
    };
    let mut rows = Vec::with_capacity(cols - reduced.dim());
    for f in 0..cols {
        if pivset[f] {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (row, &pc) in reduced.rows.iter().zip(&reduced.pivots) {
            v[pc] = (p - row[f]) % p;
        }
        rows.push(v);
    }
    let m = FpMatrix::from_rows(p, cols, rows).expect("kernel rows are rectangular");
    rref(&m)
}

pub fn sum(a: &FpSubspace, b: &FpSubspace) -> Result<FpSubspace, LinalgError> {
    a.check_compatible(b)?;
    let mut rows = a.rows.clone();
    rows.extend(b.rows.iter().cloned());
    FpSubspace::from_rows(a.p, a.ambient, rows)
}

/// Intersection, computed from the kernel of `[A^T | -B^T]`: a kernel
/// vector `(u, v)` pins down one vector `u . A = v . B` lying in both.
pub fn intersect(a: &FpSubspace, b: &FpSubspace) -> Result<FpSubspace, LinalgError> {
    a.check_compatible(b)?;
    if a.is_zero() || b.is_zero() {
        return FpSubspace::zero(a.p, a.ambient);
    }
    let p = a.p;
    let (r, s) = (a.dim(), b.dim());
    let mut stacked = FpMatrix::zero(p, a.ambient, r + s)?;
    for (j, row) in a.rows.iter().enumerate() {
        for (i, &e) in row.iter().enumerate() {
            stacked.set(i, j, e);
        }
    }
    for (j, row) in b.rows.iter().enumerate() {
        for (i, &e) in row.iter().enumerate() {
            stacked.set(i, r + j, (p - e) % p);
        }
    }
    let kernel = nullspace(&stacked);
    let chunk = accumulation_chunk(p);
    let rows: Vec<Vec<u64>> = kernel
        .basis()
        .iter()
        .map(|uv| {
            let mut w = vec![0u64; a.ambient];
            for part in (0..r).collect::<Vec<_>>().chunks(chunk) {
                for &i in part {
                    if uv[i] != 0 {
                        for (d, s) in w.iter_mut().zip(&a.rows[i]) {
                            *d += uv[i] * s;
                        }
                    }
                }
                for d in w.iter_mut() {
                    *d %= p;
                }
            }
            w
        })
        .collect();
    FpSubspace::from_rows(p, a.ambient, rows)
}

/// `{x : f x in a}` for a linear map given by its matrix.
pub fn preimage(f: &FpMatrix, a: &FpSubspace) -> Result<FpSubspace, LinalgError> {
    if f.p != a.p {
        return Err(LinalgError::ModulusMismatch(f.p, a.p));
    }
    if f.rows != a.ambient {
        return Err(LinalgError::DimensionMismatch(format!(
            "map into F^{} against subspace of F^{}",
            f.rows, a.ambient
        )));
    }
    // Rows of N cut out `a` as a kernel, so the preimage is ker(N f).
    let n = nullspace(&a.to_matrix());
    let nf = n.to_matrix().mul(f)?;
    Ok(nullspace(&nf))
}
