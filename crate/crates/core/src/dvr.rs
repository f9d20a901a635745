//! Matrices over the fixed-precision DVR `Z_p`.
//!
//! Vectors are columns and the image of a matrix is its column span.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::padic::{PadicRing, PadicScalar, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvrMatrix {
    ring: PadicRing,
    rows: usize,
    cols: usize,
    data: Vec<PadicScalar>,
}

impl DvrMatrix {
    pub fn zeros(ring: PadicRing, rows: usize, cols: usize) -> Self {
        DvrMatrix { ring, rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: PadicRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_fn(ring: PadicRing, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> PadicScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = f(i, j);
                assert_eq!(x.ring(), ring, "matrix entry from another ring");
                data.push(x);
            }
        }
        DvrMatrix { ring, rows, cols, data }
    }

    pub fn from_i128_rows(ring: PadicRing, cols: usize, rows: &[Vec<i128>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows"));
        }
        Ok(Self::from_fn(ring, rows.len(), cols, |i, j| ring.from_i128(rows[i][j])))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(ring: PadicRing, rows: usize, columns: &[Vec<PadicScalar>]) -> Self {
        Self::from_fn(ring, rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> PadicScalar {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PadicScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<PadicScalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<PadicScalar> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[PadicScalar] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, o: &DvrMatrix) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        Self::from_fn(self.ring, self.rows, o.cols, |i, j| {
            (0..self.cols).fold(self.ring.zero(), |acc, k| acc + self.get(i, k) * o.get(k, j))
        })
    }

    pub fn mul_vec(&self, v: &[PadicScalar]) -> Vec<PadicScalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| (0..self.cols).fold(self.ring.zero(), |acc, k| acc + self.get(i, k) * v[k]))
            .collect()
    }

    pub fn sub(&self, o: &DvrMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference shape");
        Self::from_fn(self.ring, self.rows, self.cols, |i, j| self.get(i, j) - o.get(i, j))
    }

    /// Smallest valuation over all entries (`AtLeast(N)` for an empty matrix).
    pub fn valuation(&self) -> Valuation {
        self.data.iter().fold(Valuation::AtLeast(self.ring.precision()), |v, x| v.min(x.valuation()))
    }

    /// Equality of residues at the common known precision of each entry pair.
    pub fn congruent(&self, o: &DvrMatrix) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.sub(o).data.iter().all(|x| x.is_indeterminate_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && self.congruent(&Self::identity(self.ring, self.rows))
    }

    /// Residues mod p.
    pub fn reduce_mod_p(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).reduce_mod_p()).collect()).collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + i, r * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, i: usize, s: PadicScalar) {
        for c in 0..self.cols {
            let idx = i * self.cols + c;
            self.data[idx] = self.data[idx] * s;
        }
    }

    fn scale_col(&mut self, j: usize, s: PadicScalar) {
        for r in 0..self.rows {
            let idx = r * self.cols + j;
            self.data[idx] = self.data[idx] * s;
        }
    }

    /// `row_i += s * row_j`.
    fn add_row_multiple(&mut self, i: usize, j: usize, s: PadicScalar) {
        for c in 0..self.cols {
            let v = self.data[j * self.cols + c] * s;
            let idx = i * self.cols + c;
            self.data[idx] = self.data[idx] + v;
        }
    }

    /// `col_i += s * col_j`.
    fn add_col_multiple(&mut self, i: usize, j: usize, s: PadicScalar) {
        for r in 0..self.rows {
            let v = self.data[r * self.cols + j] * s;
            let idx = r * self.cols + i;
            self.data[idx] = self.data[idx] + v;
        }
    }

    /// Determinant by elimination with minimal-valuation pivots.
    pub fn determinant(&self) -> Result<PadicScalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.ring.one();
        for k in 0..n {
            let piv = (k..n)
                .filter(|&i| !a.get(i, k).is_indeterminate_zero())
                .min_by_key(|&i| (a.get(i, k).valuation().bound(), i));
            let Some(piv) = piv else {
                return Ok(self.ring.zero());
            };
            if piv != k {
                a.swap_rows(k, piv);
                det = -det;
            }
            let pivot = a.get(k, k);
            for i in k + 1..n {
                let q = a.get(i, k).exact_quotient(&pivot)?;
                a.add_row_multiple(i, k, -q);
            }
            det = det * pivot;
        }
        Ok(det)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.is_unit()).unwrap_or(false)
    }
}

/// `m = S D T` with `S`, `T` invertible and `D` diagonal with entries `p^e_1 | p^e_2 | ...`.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub s: DvrMatrix,
    pub s_inv: DvrMatrix,
    pub d: DvrMatrix,
    pub t: DvrMatrix,
    pub t_inv: DvrMatrix,
    /// Exponents of the nonzero diagonal entries, non-decreasing.
    pub exponents: Vec<u32>,
    /// Set when a block of indeterminate zeros stopped the elimination.
    pub precision_limited: bool,
}

impl SnfDecomposition {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn reconstruct(&self) -> DvrMatrix {
        self.s.mul(&self.d).mul(&self.t)
    }
}

/// Smith normal form with minimal-valuation pivots, ties broken by `(row, col)`.
pub fn smith_normal_form(m: &DvrMatrix) -> Result<SnfDecomposition> {
    let ring = m.ring;
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut s = DvrMatrix::identity(ring, rows);
    let mut s_inv = DvrMatrix::identity(ring, rows);
    let mut t = DvrMatrix::identity(ring, cols);
    let mut t_inv = DvrMatrix::identity(ring, cols);
    let mut exponents = Vec::new();
    let mut precision_limited = false;

    // Invariant: m = s * d * t. A row operation d <- E d updates s <- s E^-1,
    // a column operation d <- d F updates t <- F^-1 t.
    for k in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Valuation::Finite(v) = d.get(i, j).valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            precision_limited = true;
            break;
        };
        d.swap_rows(k, pi);
        s.swap_cols(k, pi);
        s_inv.swap_rows(k, pi);
        d.swap_cols(k, pj);
        t.swap_rows(k, pj);
        t_inv.swap_cols(k, pj);

        let pv = ring.p_power(v);
        let unit = d.get(k, k).exact_quotient(&pv)?;
        let unit_inv = unit.inv()?;
        d.scale_row(k, unit_inv);
        s.scale_col(k, unit);
        s_inv.scale_row(k, unit_inv);
        d.set(k, k, pv);

        for i in k + 1..rows {
            let q = d.get(i, k).exact_quotient(&pv)?;
            if q.is_indeterminate_zero() {
                continue;
            }
            d.add_row_multiple(i, k, -q);
            s.add_col_multiple(k, i, q);
            s_inv.add_row_multiple(i, k, -q);
            d.set(i, k, ring.zero());
        }
        for j in k + 1..cols {
            let q = d.get(k, j).exact_quotient(&pv)?;
            if q.is_indeterminate_zero() {
                continue;
            }
            d.add_col_multiple(j, k, -q);
            t.add_row_multiple(k, j, q);
            t_inv.add_col_multiple(j, k, -q);
            d.set(k, j, ring.zero());
        }
        exponents.push(v);
    }
    Ok(SnfDecomposition { s, s_inv, d, t, t_inv, exponents, precision_limited })
}

/// Elementary divisors of `coker(d: Z_p^t -> Z_p^s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelInvariants {
    /// Exponents `n` of the torsion summands `Z_p / p^n`, non-decreasing.
    pub torsion: Vec<u32>,
    pub free_rank: usize,
}

impl CokernelInvariants {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }
}

pub fn cokernel_from_snf(m: &DvrMatrix, snf: &SnfDecomposition) -> CokernelInvariants {
    CokernelInvariants {
        torsion: snf.exponents.iter().copied().filter(|&e| e > 0).collect(),
        free_rank: m.rows - snf.rank(),
    }
}

pub fn cokernel_invariants(d: &DvrMatrix) -> Result<CokernelInvariants> {
    let snf = smith_normal_form(d)?;
    Ok(cokernel_from_snf(d, &snf))
}

/// Basis `x_1..x_s` of `Z_p^s` with `span(gens) = span(p^n x_1, x_2, .., x_s)`.
#[derive(Clone, Debug)]
pub struct AdaptedBasis {
    /// Columns are `x_1, .., x_s`.
    pub basis: DvrMatrix,
    pub n: u32,
}

pub fn adapt_basis(rank: usize, gens: &DvrMatrix) -> Result<AdaptedBasis> {
    if gens.rows != rank {
        return Err(Error::DimensionMismatch("generators must live in the ambient module"));
    }
    let snf = smith_normal_form(gens)?;
    let inv = cokernel_from_snf(gens, &snf);
    if inv.is_trivial() {
        return Err(Error::DegenerateInput);
    }
    if inv.free_rank != 0 || inv.torsion.len() != 1 {
        return Err(Error::NonCyclicCokernel);
    }
    // Exponents are sorted, so the single torsion exponent sits last.
    let s = rank;
    let n = inv.torsion[0];
    let ring = gens.ring;
    let basis = DvrMatrix::from_fn(ring, s, s, |i, j| {
        let src = if j == 0 { s - 1 } else { j - 1 };
        snf.s.get(i, src)
    });
    Ok(AdaptedBasis { basis, n })
}

/// Solve `d z = w` using a precomputed SNF, with `v(z_i) >= floor` for every `i`.
pub fn constrained_preimage_with(snf: &SnfDecomposition, w: &[PadicScalar], floor: u32) -> Result<Vec<PadicScalar>> {
    let ring = snf.d.ring();
    let (rows, cols) = (snf.d.rows(), snf.d.cols());
    if w.len() != rows {
        return Err(Error::DimensionMismatch("right-hand side length"));
    }
    let wp = snf.s_inv.mul_vec(w);
    let mut u = vec![ring.zero(); cols];
    let mut floor_fails = false;
    for (i, wi) in wp.iter().enumerate() {
        if i < snf.rank() {
            let e = snf.exponents[i];
            if !wi.valuation().at_least(e) {
                return Err(Error::NotInImage);
            }
            let q = wi.exact_quotient(&ring.p_power(e))?;
            if !q.valuation().at_least(floor) {
                floor_fails = true;
            }
            u[i] = q;
        } else if !wi.is_indeterminate_zero() {
            return Err(Error::NotInImage);
        }
    }
    if floor_fails {
        // T is unimodular, so a low coordinate of u forces a low coordinate of z.
        return Err(Error::FloorInfeasible);
    }
    Ok(snf.t_inv.mul_vec(&u))
}

pub fn constrained_preimage(d: &DvrMatrix, w: &[PadicScalar], floor: u32) -> Result<Vec<PadicScalar>> {
    constrained_preimage_with(&smith_normal_form(d)?, w, floor)
}

/// Some `z` with `d z = w`, or `None` when `w` is outside the image.
pub fn image_membership(d: &DvrMatrix, w: &[PadicScalar]) -> Result<Option<Vec<PadicScalar>>> {
    match constrained_preimage(d, w, 0) {
        Ok(z) => Ok(Some(z)),
        Err(Error::NotInImage) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64) -> PadicRing {
        PadicRing::new(p, 16).unwrap()
    }

    #[test]
    fn diagonal_reorders() {
        let r = ring(3);
        let m = DvrMatrix::from_i128_rows(r, 2, &[vec![9, 0], vec![0, 1]]).unwrap();
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.exponents, vec![0, 2]);
        assert!(snf.reconstruct().congruent(&m));
        assert!(snf.s.is_unimodular() && snf.t.is_unimodular());
        assert!(snf.s.mul(&snf.s_inv).is_identity());
        assert!(snf.t.mul(&snf.t_inv).is_identity());
    }

    #[test]
    fn cokernels() {
        let r = ring(5);
        assert!(cokernel_invariants(&DvrMatrix::identity(r, 3)).unwrap().is_trivial());
        let c = cokernel_invariants(&DvrMatrix::from_i128_rows(ring(3), 1, &[vec![3]]).unwrap()).unwrap();
        assert_eq!(c, CokernelInvariants { torsion: vec![1], free_rank: 0 });
        let z = DvrMatrix::zeros(r, 2, 1);
        assert_eq!(cokernel_invariants(&z).unwrap().free_rank, 2);
        assert!(smith_normal_form(&z).unwrap().precision_limited);
        let empty = DvrMatrix::zeros(r, 1, 0);
        assert_eq!(cokernel_invariants(&empty).unwrap().free_rank, 1);
    }

    #[test]
    fn adapt_basis_cases() {
        let r = ring(5);
        let gens = DvrMatrix::from_i128_rows(r, 2, &[vec![5, 0], vec![0, 1]]).unwrap();
        let ab = adapt_basis(2, &gens).unwrap();
        assert_eq!(ab.n, 1);
        assert!(ab.basis.is_unimodular());
        assert_eq!(adapt_basis(2, &DvrMatrix::identity(r, 2)).unwrap_err(), Error::DegenerateInput);
        let two = DvrMatrix::from_i128_rows(r, 2, &[vec![5, 0], vec![0, 5]]).unwrap();
        assert_eq!(adapt_basis(2, &two).unwrap_err(), Error::NonCyclicCokernel);
    }

    #[test]
    fn preimage_with_floor() {
        let r = ring(7);
        let d = DvrMatrix::identity(r, 2);
        let w = [r.from_u128(7), r.zero()];
        let z = constrained_preimage(&d, &w, 1).unwrap();
        assert_eq!(z[0].residue(), 7);
        assert!(z[1].is_indeterminate_zero());
        assert_eq!(constrained_preimage(&d, &[r.one(), r.zero()], 1).unwrap_err(), Error::FloorInfeasible);
        let d3 = DvrMatrix::from_i128_rows(r, 1, &[vec![7], vec![0]]).unwrap();
        assert_eq!(constrained_preimage(&d3, &[r.one(), r.zero()], 0).unwrap_err(), Error::NotInImage);
        assert_eq!(constrained_preimage(&d3, &[r.zero(), r.one()], 0).unwrap_err(), Error::NotInImage);
    }
}
