//! Class-2 graded Lie algebras `gr^1 + gr^0`, their unipotent groups, and
//! block-matrix realizations inside `GL_{a+b+c}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::zmod::{vec_add, vec_neg, vec_scale, vec_sub, ModMatrix, ResidueRing};

/// Bracket `gr^1 x gr^1 -> gr^0` given by one antisymmetric matrix per `gr^0` coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class2Algebra {
    ring: ResidueRing,
    dim1: usize,
    dim0: usize,
    bracket: Vec<ModMatrix>,
}

impl Class2Algebra {
    pub fn new(ring: ResidueRing, dim1: usize, dim0: usize, bracket: Vec<ModMatrix>) -> Result<Self> {
        if bracket.len() != dim0 {
            return Err(Error::DimensionMismatch("one structure matrix per gr0 coordinate"));
        }
        for b in &bracket {
            if b.rows() != dim1 || b.cols() != dim1 || b.ring() != ring {
                return Err(Error::DimensionMismatch("structure matrices must be dim1 x dim1"));
            }
            if b.transpose() != b.neg() {
                return Err(Error::NotAntisymmetric);
            }
        }
        Ok(Class2Algebra { ring, dim1, dim0, bracket })
    }

    pub fn abelian(ring: ResidueRing, dim1: usize, dim0: usize) -> Self {
        Class2Algebra { ring, dim1, dim0, bracket: vec![ModMatrix::zeros(ring, dim1, dim1); dim0] }
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn dim1(&self) -> usize {
        self.dim1
    }

    pub fn dim0(&self) -> usize {
        self.dim0
    }

    pub fn structure(&self) -> &[ModMatrix] {
        &self.bracket
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket.iter().all(|b| b.is_zero())
    }

    pub fn bracket(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        assert_eq!((u.len(), v.len()), (self.dim1, self.dim1), "bracket arguments live in gr1");
        self.bracket.iter().map(|b| b.bilinear(u, v)).collect()
    }

    /// Same algebra over a smaller residue ring.
    pub fn reduce_to(&self, ring: ResidueRing) -> Class2Algebra {
        Class2Algebra { ring, dim1: self.dim1, dim0: self.dim0, bracket: self.bracket.iter().map(|b| b.reduce_to(ring)).collect() }
    }

    fn check(&self, e: &Class2Element) -> Result<()> {
        if e.log1.len() != self.dim1 || e.log0.len() != self.dim0 {
            return Err(Error::DimensionMismatch("element coordinates do not match the algebra"));
        }
        Ok(())
    }
}

/// The group element `exp(log1 + log0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Class2Element {
    pub log1: Vec<u64>,
    pub log0: Vec<u64>,
}

impl Class2Element {
    pub fn identity(alg: &Class2Algebra) -> Self {
        Class2Element { log1: vec![0; alg.dim1], log0: vec![0; alg.dim0] }
    }
}

/// `log(ab) = log a + log b + [log a, log b] / 2`.
pub fn group_multiply(alg: &Class2Algebra, a: &Class2Element, b: &Class2Element) -> Result<Class2Element> {
    alg.check(a)?;
    alg.check(b)?;
    let r = &alg.ring;
    let br = alg.bracket(&a.log1, &b.log1);
    let log0 = vec_add(r, &vec_add(r, &a.log0, &b.log0), &vec_scale(r, r.half(), &br));
    Ok(Class2Element { log1: vec_add(r, &a.log1, &b.log1), log0 })
}

pub fn group_inverse(alg: &Class2Algebra, a: &Class2Element) -> Result<Class2Element> {
    alg.check(a)?;
    Ok(Class2Element { log1: vec_neg(&alg.ring, &a.log1), log0: vec_neg(&alg.ring, &a.log0) })
}

/// `exp(N) = 1 + N + N^2/2`, exact when `N^3 = 0`.
pub fn matrix_exp(n: &ModMatrix) -> Result<ModMatrix> {
    if !n.is_square() {
        return Err(Error::DimensionMismatch("exponential of a non-square matrix"));
    }
    let n2 = n.mul(n);
    if !n2.mul(n).is_zero() {
        return Err(Error::NotUnipotent);
    }
    let r = n.ring();
    Ok(ModMatrix::identity(r, n.rows()).add(n).add(&n2.scale(r.half())))
}

/// `log(u) = (u - 1) - (u - 1)^2/2`, exact when `(u - 1)^3 = 0`.
pub fn matrix_log(u: &ModMatrix) -> Result<ModMatrix> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch("logarithm of a non-square matrix"));
    }
    let r = u.ring();
    let n = u.sub(&ModMatrix::identity(r, u.rows()));
    let n2 = n.mul(&n);
    if !n2.mul(&n).is_zero() {
        return Err(Error::NotUnipotent);
    }
    Ok(n.sub(&n2.scale(r.half())))
}

/// The algebra of block-strictly-upper matrices with blocks `(a, b, c)`:
/// `gr^1 = Mat_{a x b} + Mat_{b x c}`, `gr^0 = Mat_{a x c}`, all row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockRealization {
    pub ring: ResidueRing,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl BlockRealization {
    pub fn new(ring: ResidueRing, a: usize, b: usize, c: usize) -> Self {
        BlockRealization { ring, a, b, c }
    }

    pub fn size(&self) -> usize {
        self.a + self.b + self.c
    }

    pub fn dim1(&self) -> usize {
        self.a * self.b + self.b * self.c
    }

    pub fn dim0(&self) -> usize {
        self.a * self.c
    }

    /// Coordinates `[0, a b)` are the first summand `Mat_{a x b}`.
    pub fn summand_dims(&self) -> (usize, usize) {
        (self.a * self.b, self.b * self.c)
    }

    /// Bracket `[(X, Y), (X', Y')] = X Y' - X' Y`.
    pub fn algebra(&self) -> Class2Algebra {
        let (a, b, c) = (self.a, self.b, self.c);
        let off = a * b;
        let mut bracket = Vec::with_capacity(a * c);
        for i in 0..a {
            for l in 0..c {
                let mut m = ModMatrix::zeros(self.ring, self.dim1(), self.dim1());
                for j in 0..b {
                    let xi = i * b + j;
                    let yi = off + j * c + l;
                    m.set(xi, yi, 1);
                    m.set(yi, xi, self.ring.modulus() - 1);
                }
                bracket.push(m);
            }
        }
        Class2Algebra { ring: self.ring, dim1: self.dim1(), dim0: self.dim0(), bracket }
    }

    /// The nilpotent matrix with blocks `X`, `Y`, `Z`.
    pub fn embed(&self, log1: &[u64], log0: &[u64]) -> ModMatrix {
        assert_eq!((log1.len(), log0.len()), (self.dim1(), self.dim0()), "realization coordinates");
        let (a, b, c) = (self.a, self.b, self.c);
        let mut m = ModMatrix::zeros(self.ring, self.size(), self.size());
        for i in 0..a {
            for j in 0..b {
                m.set(i, a + j, log1[i * b + j]);
            }
            for l in 0..c {
                m.set(i, a + b + l, log0[i * c + l]);
            }
        }
        for j in 0..b {
            for l in 0..c {
                m.set(a + j, a + b + l, log1[a * b + j * c + l]);
            }
        }
        m
    }

    /// Inverse of [`embed`](Self::embed); fails off the block-strictly-upper shape.
    pub fn project(&self, m: &ModMatrix) -> Result<(Vec<u64>, Vec<u64>)> {
        let n = self.size();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch("matrix size differs from the realization"));
        }
        let (a, b, c) = (self.a, self.b, self.c);
        let mut log1 = vec![0; self.dim1()];
        let mut log0 = vec![0; self.dim0()];
        for i in 0..a {
            for j in 0..b {
                log1[i * b + j] = m.get(i, a + j);
            }
            for l in 0..c {
                log0[i * c + l] = m.get(i, a + b + l);
            }
        }
        for j in 0..b {
            for l in 0..c {
                log1[a * b + j * c + l] = m.get(a + j, a + b + l);
            }
        }
        if self.embed(&log1, &log0) != *m {
            return Err(Error::NotUnipotent);
        }
        Ok((log1, log0))
    }

    pub fn group_matrix(&self, e: &Class2Element) -> Result<ModMatrix> {
        matrix_exp(&self.embed(&e.log1, &e.log0))
    }

    pub fn element_of(&self, u: &ModMatrix) -> Result<Class2Element> {
        let (log1, log0) = self.project(&matrix_log(u)?)?;
        Ok(Class2Element { log1, log0 })
    }

    fn is_levi(&self, f: &ModMatrix) -> bool {
        let (a, b) = (self.a, self.b);
        let block = |i: usize| if i < a { 0 } else if i < a + b { 1 } else { 2 };
        f.rows() == self.size()
            && f.cols() == self.size()
            && (0..self.size()).all(|i| (0..self.size()).all(|j| block(i) == block(j) || f.get(i, j) == 0))
    }

    /// Matrices of `N -> f N f^-1` on `gr^1` and `gr^0`, for block-diagonal invertible `f`.
    pub fn levi_action(&self, f: &ModMatrix) -> Result<(ModMatrix, ModMatrix)> {
        if !self.is_levi(f) {
            return Err(Error::NotAdmissible("Levi element must be block diagonal"));
        }
        let f_inv = f.inverse()?;
        let conj = |m: &ModMatrix| self.project(&f.mul(m).mul(&f_inv));
        let (d1, d0) = (self.dim1(), self.dim0());
        let mut int1 = ModMatrix::zeros(self.ring, d1, d1);
        for k in 0..d1 {
            let mut e = vec![0; d1];
            e[k] = 1;
            let (col, _) = conj(&self.embed(&e, &vec![0; d0]))?;
            for (i, v) in col.into_iter().enumerate() {
                int1.set(i, k, v);
            }
        }
        let mut int0 = ModMatrix::zeros(self.ring, d0, d0);
        for k in 0..d0 {
            let mut e = vec![0; d0];
            e[k] = 1;
            let (_, col) = conj(&self.embed(&vec![0; d1], &e))?;
            for (i, v) in col.into_iter().enumerate() {
                int0.set(i, k, v);
            }
        }
        Ok((int1, int0))
    }

    /// `([phi], [gamma]) = (exp(x) f, exp(y) g)`.
    pub fn extension_matrices(&self, f: &ModMatrix, g: &ModMatrix, x: &Class2Element, y: &Class2Element) -> Result<(ModMatrix, ModMatrix)> {
        Ok((self.group_matrix(x)?.mul(f), self.group_matrix(y)?.mul(g)))
    }

    /// `[phi] [gamma] = [gamma] [phi]`: the relation `[phi] phi([gamma]) = [gamma] gamma([phi])`
    /// when phi and gamma act trivially on matrix entries.
    pub fn commutation_relation(&self, f: &ModMatrix, g: &ModMatrix, x: &Class2Element, y: &Class2Element) -> Result<bool> {
        let (phi, gamma) = self.extension_matrices(f, g, x, y)?;
        Ok(phi.mul(&gamma) == gamma.mul(&phi))
    }

    /// `u_f Int_g(u_f^-1) = u_g Int_f(u_g^-1)` with `u_f = exp(x)`, `u_g = exp(y)`.
    pub fn intertwining_relation(&self, f: &ModMatrix, g: &ModMatrix, x: &Class2Element, y: &Class2Element) -> Result<bool> {
        let (uf, ug) = (self.group_matrix(x)?, self.group_matrix(y)?);
        let (uf_inv, ug_inv) = (uf.inverse()?, ug.inverse()?);
        let (f_inv, g_inv) = (f.inverse()?, g.inverse()?);
        let lhs = uf.mul(&g.mul(&uf_inv).mul(&g_inv));
        let rhs = ug.mul(&f.mul(&ug_inv).mul(&f_inv));
        Ok(lhs == rhs)
    }
}

/// The operators `Int_f o phi` and `Int_g o gamma` on both graded pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionActions {
    pub f1: ModMatrix,
    pub g1: ModMatrix,
    pub f0: ModMatrix,
    pub g0: ModMatrix,
}

/// Residuals of the degree-1 and degree-0 extension equations:
/// `(1 - G1) x1 - (1 - F1) y1` and
/// `(1 - G0) x0 - (1 - F0) y0 - [x1, G1 x1]/2 + [y1, F1 y1]/2`.
pub fn cocycle_equations_split(alg: &Class2Algebra, x: &Class2Element, y: &Class2Element, act: &ExtensionActions) -> Result<(Vec<u64>, Vec<u64>)> {
    alg.check(x)?;
    alg.check(y)?;
    let shapes = [(&act.f1, alg.dim1), (&act.g1, alg.dim1), (&act.f0, alg.dim0), (&act.g0, alg.dim0)];
    if shapes.iter().any(|(m, d)| m.rows() != *d || m.cols() != *d) {
        return Err(Error::DimensionMismatch("action matrices do not match the algebra"));
    }
    let r = &alg.ring;
    let one_minus = |m: &ModMatrix, v: &[u64]| vec_sub(r, v, &m.mul_vec(v));
    let res1 = vec_sub(r, &one_minus(&act.g1, &x.log1), &one_minus(&act.f1, &y.log1));
    let lin0 = vec_sub(r, &one_minus(&act.g0, &x.log0), &one_minus(&act.f0, &y.log0));
    let qx = alg.bracket(&x.log1, &act.g1.mul_vec(&x.log1));
    let qy = alg.bracket(&y.log1, &act.f1.mul_vec(&y.log1));
    let q = vec_scale(r, r.half(), &vec_sub(r, &qx, &qy));
    Ok((res1, vec_sub(r, &lin0, &q)))
}
