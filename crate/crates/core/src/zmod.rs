//! Residue rings `Z/p^k` with `p^k < 2^32`, and dense matrices over them.
//!
//! The field case `k = 1` adds echelon forms, kernels and solves. Echelon
//! forms are reduced and pivots are taken left to right, so every basis
//! returned here is a deterministic function of the input.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::padic::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    prime: u64,
    exponent: u32,
    modulus: u64,
}

impl ResidueRing {
    pub fn new(prime: u64, exponent: u32) -> Result<Self> {
        if prime <= 2 || !is_prime(prime) {
            return Err(Error::InvalidPrime(prime));
        }
        if exponent == 0 {
            return Err(Error::NotAdmissible("exponent must be positive"));
        }
        match prime.checked_pow(exponent) {
            Some(m) if m < (1 << 32) => Ok(ResidueRing { prime, exponent, modulus: m }),
            _ => Err(Error::PrecisionTooLarge { prime, precision: exponent }),
        }
    }

    pub fn field(prime: u64) -> Result<Self> {
        Self::new(prime, 1)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_field(&self) -> bool {
        self.exponent == 1
    }

    /// The residue field `F_p`.
    pub fn residue_field(&self) -> ResidueRing {
        ResidueRing { prime: self.prime, exponent: 1, modulus: self.prime }
    }

    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.modulus as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b) % self.modulus
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        let mut b = a % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.prime)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        // phi(p^k) = p^(k-1) (p-1)
        let phi = self.modulus / self.prime * (self.prime - 1);
        Some(self.pow(a, phi - 1))
    }

    /// The inverse of 2.
    pub fn half(&self) -> u64 {
        self.modulus.div_ceil(2)
    }

    /// p-adic valuation of a residue; `exponent` for zero.
    pub fn valuation(&self, a: u64) -> u32 {
        let mut a = a % self.modulus;
        if a == 0 {
            return self.exponent;
        }
        let mut v = 0;
        while a.is_multiple_of(self.prime) {
            a /= self.prime;
            v += 1;
        }
        v
    }
}

pub fn vec_add(ring: &ResidueRing, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| ring.add(x, y)).collect()
}

pub fn vec_sub(ring: &ResidueRing, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| ring.sub(x, y)).collect()
}

pub fn vec_scale(ring: &ResidueRing, s: u64, a: &[u64]) -> Vec<u64> {
    a.iter().map(|&x| ring.mul(s, x)).collect()
}

pub fn vec_neg(ring: &ResidueRing, a: &[u64]) -> Vec<u64> {
    a.iter().map(|&x| ring.neg(x)).collect()
}

pub fn dot(ring: &ResidueRing, a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| ring.add(acc, ring.mul(x, y)))
}

pub fn is_zero_vec(a: &[u64]) -> bool {
    a.iter().all(|&x| x == 0)
}

/// Dense row-major matrix over a [`ResidueRing`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    ring: ResidueRing,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(ring: ResidueRing, rows: usize, cols: usize) -> Self {
        ModMatrix { ring, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ring: ResidueRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % ring.modulus;
        }
        m
    }

    pub fn scalar(ring: ResidueRing, n: usize, s: u64) -> Self {
        Self::identity(ring, n).scale(s)
    }

    pub fn diagonal(ring: ResidueRing, diag: &[u64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(ring, n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d % ring.modulus;
        }
        m
    }

    pub fn from_fn(ring: ResidueRing, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % ring.modulus);
            }
        }
        ModMatrix { ring, rows, cols, data }
    }

    /// Build from signed integer rows; all rows must have `cols` entries.
    pub fn from_rows(ring: ResidueRing, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged matrix rows"));
            }
            data.extend(r.iter().map(|&v| ring.reduce(v)));
        }
        Ok(ModMatrix { ring, rows: rows.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(ring: ResidueRing, rows: usize, columns: &[Vec<u64>]) -> Self {
        Self::from_fn(ring, rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.ring.modulus;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.ring, self.rows)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: u64) -> Self {
        let data = self.data.iter().map(|&x| self.ring.mul(s, x)).collect();
        ModMatrix { data, ..self.clone() }
    }

    pub fn add(&self, o: &ModMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum shape");
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| self.ring.add(a, b)).collect();
        ModMatrix { data, ..self.clone() }
    }

    pub fn sub(&self, o: &ModMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference shape");
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| self.ring.sub(a, b)).collect();
        ModMatrix { data, ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        self.scale(self.ring.modulus - 1)
    }

    pub fn mul(&self, o: &ModMatrix) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let m = self.ring.modulus;
        let mut out = Self::zeros(self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    out.data[idx] = (out.data[idx] + a * o.data[k * o.cols + j]) % m;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(&self.ring, self.row(i), v)).collect()
    }

    /// `v^t M w`.
    pub fn bilinear(&self, v: &[u64], w: &[u64]) -> u64 {
        dot(&self.ring, v, &self.mul_vec(w))
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &ModMatrix) -> Self {
        let (r, c) = (self.rows + o.rows, self.cols + o.cols);
        Self::from_fn(self.ring, r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j)
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols)
            } else {
                0
            }
        })
    }

    /// `[self | o]`.
    pub fn hstack(&self, o: &ModMatrix) -> Self {
        assert_eq!(self.rows, o.rows, "hstack rows");
        Self::from_fn(self.ring, self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                o.get(i, j - self.cols)
            }
        })
    }

    /// `[self ; o]`.
    pub fn vstack(&self, o: &ModMatrix) -> Self {
        assert_eq!(self.cols, o.cols, "vstack cols");
        Self::from_fn(self.ring, self.rows + o.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j)
            } else {
                o.get(i - self.rows, j)
            }
        })
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(self.ring, rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Entrywise reduction into another residue ring of the same prime.
    pub fn reduce_to(&self, ring: ResidueRing) -> Self {
        assert_eq!(ring.prime, self.ring.prime, "reduction across primes");
        assert!(ring.exponent <= self.ring.exponent, "reduction must lower the exponent");
        let data = self.data.iter().map(|&x| x % ring.modulus).collect();
        ModMatrix { ring, rows: self.rows, cols: self.cols, data }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.ring, self.rows);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Inverse over `Z/p^k`, by elimination with unit pivots.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotInvertible);
        }
        let n = self.rows;
        let r = self.ring;
        let mut a = self.clone();
        let mut inv = Self::identity(r, n);
        for k in 0..n {
            let piv = (k..n).find(|&i| r.is_unit(a.get(i, k))).ok_or(Error::NotInvertible)?;
            a.swap_rows(k, piv);
            inv.swap_rows(k, piv);
            let u = r.inv(a.get(k, k)).ok_or(Error::NotInvertible)?;
            a.scale_row(k, u);
            inv.scale_row(k, u);
            for i in 0..n {
                if i != k {
                    let f = a.get(i, k);
                    if f != 0 {
                        a.add_row_multiple(i, k, r.neg(f));
                        inv.add_row_multiple(i, k, r.neg(f));
                    }
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    pub fn scale_row(&mut self, i: usize, s: u64) {
        for c in 0..self.cols {
            let idx = i * self.cols + c;
            self.data[idx] = self.ring.mul(self.data[idx], s);
        }
    }

    /// `row_i += s * row_j`.
    pub fn add_row_multiple(&mut self, i: usize, j: usize, s: u64) {
        for c in 0..self.cols {
            let v = self.ring.mul(s, self.data[j * self.cols + c]);
            let idx = i * self.cols + c;
            self.data[idx] = self.ring.add(self.data[idx], v);
        }
    }

    fn require_field(&self) -> Result<()> {
        if self.ring.is_field() {
            Ok(())
        } else {
            Err(Error::FieldRequired)
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> Result<(ModMatrix, Vec<usize>)> {
        self.require_field()?;
        let r = self.ring;
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&i| a.get(i, col) != 0) else {
                continue;
            };
            a.swap_rows(row, piv);
            let u = r.inv(a.get(row, col)).ok_or(Error::NotInvertible)?;
            a.scale_row(row, u);
            for i in 0..self.rows {
                if i != row {
                    let f = a.get(i, col);
                    if f != 0 {
                        a.add_row_multiple(i, row, r.neg(f));
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Ok((a, pivots))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.1.len())
    }

    /// Kernel basis, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<u64>>> {
        let (a, pivots) = self.rref()?;
        let r = self.ring;
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = r.neg(a.get(i, free));
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Reduced echelon basis of the column space.
    pub fn column_space_basis(&self) -> Result<Vec<Vec<u64>>> {
        let (a, pivots) = self.transpose().rref()?;
        Ok((0..pivots.len()).map(|i| a.row(i).to_vec()).collect())
    }

    /// Some `x` with `self x = b`, if one exists.
    pub fn solve(&self, b: &[u64]) -> Result<Option<Vec<u64>>> {
        self.require_field()?;
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch("right-hand side length"));
        }
        let aug = self.hstack(&ModMatrix::from_columns(self.ring, self.rows, &[b.to_vec()]));
        let (a, pivots) = aug.rref()?;
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = a.get(i, self.cols);
        }
        Ok(Some(x))
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

/// Echelon basis of the span of `vectors` (as rows), pivots included.
pub fn span_basis(ring: ResidueRing, dim: usize, vectors: &[Vec<u64>]) -> Result<(Vec<Vec<u64>>, Vec<usize>)> {
    if vectors.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let m = ModMatrix::from_fn(ring, vectors.len(), dim, |i, j| vectors[i][j]);
    let (a, pivots) = m.rref()?;
    Ok(((0..pivots.len()).map(|i| a.row(i).to_vec()).collect(), pivots))
}

/// Reduce `v` against an echelon basis with the given pivots.
pub fn reduce_against(ring: &ResidueRing, basis: &[Vec<u64>], pivots: &[usize], v: &[u64]) -> Vec<u64> {
    let mut out = v.to_vec();
    for (b, &pc) in basis.iter().zip(pivots) {
        let f = out[pc];
        if f != 0 {
            for (o, &x) in out.iter_mut().zip(b) {
                *o = ring.sub(*o, ring.mul(f, x));
            }
        }
    }
    out
}
