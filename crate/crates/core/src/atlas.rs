//! Gram presentations of the symplectic and orthogonal similitude groups and
//! of the unitary L-group twist, their maximal parabolics, and the
//! involutions `j` on the unipotent radical.
//!
//! The parabolic `P_k` has blocks `(k, m, k)`. `Lie U` uses the coordinates of
//! [`BlockRealization`]: `X` is `k x m`, `Y` is `m x k`, `Z` is `k x k`.

use alloc::vec;
use alloc::vec::Vec;

use crate::cochain::GradedActionPair;
use crate::delta::{is_classical, DeltaAction};
use crate::error::{Error, Result};
use crate::nilpotent::{matrix_exp, BlockRealization};
use crate::zmod::{ModMatrix, ResidueRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `GL_n` with the twist `w_n (-)^-t w_n`.
    UnitaryL,
    /// `GSp_2n`.
    Symplectic,
    /// `GO_n`.
    Orthogonal,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::UnitaryL => "unitary",
            Family::Symplectic => "gsp",
            Family::Orthogonal => "go",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        match s {
            "unitary" => Some(Family::UnitaryL),
            "gsp" => Some(Family::Symplectic),
            "go" => Some(Family::Orthogonal),
            _ => None,
        }
    }
}

/// `n` is the rank for `GSp_2n` and the matrix size otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassicalGroupSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub ring: ResidueRing,
}

impl ClassicalGroupSpec {
    pub fn new(family: Family, n: usize, k: usize, ring: ResidueRing) -> Result<Self> {
        let ok = match family {
            Family::Symplectic => k >= 1 && k <= n,
            Family::Orthogonal | Family::UnitaryL => k >= 1 && 2 * k <= n,
        };
        if !ok {
            return Err(Error::InvalidRank { n, k });
        }
        Ok(ClassicalGroupSpec { family, n, k, ring })
    }

    /// Size of the matrices.
    pub fn size(&self) -> usize {
        match self.family {
            Family::Symplectic => 2 * self.n,
            _ => self.n,
        }
    }

    /// Size of the middle block.
    pub fn middle(&self) -> usize {
        self.size() - 2 * self.k
    }

    pub fn gram(&self) -> ModMatrix {
        let r = self.ring;
        let (k, m, size) = (self.k, self.middle(), self.size());
        let mut g = ModMatrix::zeros(r, size, size);
        match self.family {
            Family::Symplectic => {
                let h = m / 2;
                for i in 0..k {
                    g.set(i, k + m + i, 1);
                    g.set(k + m + i, i, r.neg(1));
                }
                for i in 0..h {
                    g.set(k + i, k + h + i, 1);
                    g.set(k + h + i, k + i, r.neg(1));
                }
            }
            Family::Orthogonal => {
                for i in 0..k {
                    g.set(i, k + m + i, 1);
                    g.set(k + m + i, i, 1);
                }
                for i in 0..m {
                    g.set(k + i, k + i, 1);
                }
            }
            Family::UnitaryL => g = antidiagonal(r, size),
        }
        g
    }

    /// `dim G - dim M_k`, from the standard dimension formulas.
    pub fn formula_radical_dim(&self) -> usize {
        let (k, m) = (self.k, self.middle());
        let (g, levi) = match self.family {
            Family::Symplectic => {
                let gsp = |r: usize| r * (2 * r + 1) + 1;
                (gsp(self.n), k * k + gsp(m / 2))
            }
            Family::Orthogonal => {
                let go = |r: usize| r * r.saturating_sub(1) / 2 + 1;
                (go(self.n), k * k + go(m))
            }
            Family::UnitaryL => {
                let o = |r: usize| r * r.saturating_sub(1) / 2;
                (o(self.n), k * k + o(m))
            }
        };
        (g - levi) / 2
    }
}

/// `w_n`: ones on the antidiagonal.
pub fn antidiagonal(ring: ResidueRing, n: usize) -> ModMatrix {
    ModMatrix::from_fn(ring, n, n, |i, j| u64::from(i + j + 1 == n))
}

/// `X^t J X = lambda J`.
pub fn membership(spec: &ClassicalGroupSpec, x: &ModMatrix, lambda: u64) -> Result<bool> {
    let n = spec.size();
    if x.rows() != n || x.cols() != n || x.ring() != spec.ring {
        return Err(Error::DimensionMismatch("matrix does not match the group"));
    }
    let j = spec.gram();
    Ok(x.transpose().mul(&j).mul(x) == j.scale(lambda))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicData {
    pub spec: ClassicalGroupSpec,
    pub realization: BlockRealization,
    /// `j` on `gr^1` coordinates.
    pub j1: ModMatrix,
    /// `j` on `gr^0` coordinates.
    pub j0: ModMatrix,
}

impl ParabolicData {
    pub fn gr1_dims(&self) -> (usize, usize) {
        self.realization.summand_dims()
    }

    pub fn gr0_dim(&self) -> usize {
        self.realization.dim0()
    }

    /// `j` on `Lie U = gr^1 + gr^0`.
    pub fn involution(&self) -> ModMatrix {
        self.j1.direct_sum(&self.j0)
    }

    pub fn delta_action(&self) -> Result<DeltaAction> {
        DeltaAction::new(self.j1.clone(), self.j0.clone(), self.gr1_dims())
    }

    /// The nilpotent matrix of a `Lie U` coordinate vector.
    pub fn lie_matrix(&self, v: &[u64]) -> ModMatrix {
        let d1 = self.realization.dim1();
        self.realization.embed(&v[..d1], &v[d1..])
    }

    /// `diag(A, 1, C)` with `C` chosen so the element lies in the group with `lambda = 1`.
    pub fn levi_element(&self, a: &ModMatrix) -> Result<ModMatrix> {
        let (k, m) = (self.spec.k, self.spec.middle());
        let r = self.spec.ring;
        if a.rows() != k || !a.is_square() {
            return Err(Error::DimensionMismatch("Levi block size"));
        }
        let a_inv_t = a.inverse()?.transpose();
        let c = match self.spec.family {
            Family::UnitaryL => {
                let w = antidiagonal(r, k);
                w.mul(&a_inv_t).mul(&w)
            }
            _ => a_inv_t,
        };
        Ok(a.direct_sum(&ModMatrix::identity(r, m)).direct_sum(&c))
    }
}

fn matrix_of(ring: ResidueRing, dim: usize, mut f: impl FnMut(&[u64]) -> Vec<u64>) -> ModMatrix {
    let cols: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0; dim];
            e[i] = 1;
            f(&e)
        })
        .collect();
    ModMatrix::from_columns(ring, dim, &cols)
}

fn block(ring: ResidueRing, rows: usize, cols: usize, v: &[u64]) -> ModMatrix {
    ModMatrix::from_fn(ring, rows, cols, |i, j| v[i * cols + j])
}

fn flat(m: &ModMatrix) -> Vec<u64> {
    m.to_rows().concat()
}

pub fn build_parabolic(spec: &ClassicalGroupSpec) -> Result<ParabolicData> {
    let spec = ClassicalGroupSpec::new(spec.family, spec.n, spec.k, spec.ring)?;
    let r = spec.ring;
    let (k, m) = (spec.k, spec.middle());
    let realization = BlockRealization::new(r, k, m, k);
    let (dx, dy) = realization.summand_dims();
    let om = spec.gram().submatrix(k, k, m, m);
    let (wk, wm) = (antidiagonal(r, k), antidiagonal(r, m));
    let j1 = matrix_of(r, dx + dy, |v| {
        let x = block(r, k, m, &v[..dx]);
        let y = block(r, m, k, &v[dx..]);
        let (x2, y2) = match spec.family {
            Family::Symplectic => (y.transpose().mul(&om), om.mul(&x.transpose())),
            Family::Orthogonal => (y.transpose().neg(), x.transpose().neg()),
            Family::UnitaryL => (wk.mul(&y.transpose()).mul(&wm).neg(), wm.mul(&x.transpose()).mul(&wk).neg()),
        };
        [flat(&x2), flat(&y2)].concat()
    });
    let j0 = matrix_of(r, k * k, |v| {
        let z = block(r, k, k, v);
        let z2 = match spec.family {
            Family::Symplectic => z.transpose(),
            Family::Orthogonal => z.transpose().neg(),
            Family::UnitaryL => wk.mul(&z.transpose()).mul(&wk).neg(),
        };
        flat(&z2)
    });
    Ok(ParabolicData { spec, realization, j1, j0 })
}

/// `N -> -J^-1 N^t J` on `Lie U`, the involution whose fixed points are the Lie algebra of the group.
pub fn lie_involution(data: &ParabolicData) -> Result<ModMatrix> {
    let j = data.spec.gram();
    let j_inv = j.inverse()?;
    let d1 = data.realization.dim1();
    let dim = d1 + data.gr0_dim();
    let mut failure = None;
    let m = matrix_of(data.spec.ring, dim, |v| {
        let n = data.lie_matrix(v);
        let image = j_inv.mul(&n.transpose()).mul(&j).neg();
        match data.realization.project(&image) {
            Ok((a, b)) => [a, b].concat(),
            Err(e) => {
                failure = Some(e);
                vec![0; dim]
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedPointReport {
    /// Dimension of the fixed space of `j`.
    pub fixed_dim: usize,
    /// Dimension of `{N in Lie U : N^t J + J N = 0}`.
    pub lie_dim: usize,
    /// `(dim G - dim M_k) / 2`.
    pub formula_dim: usize,
    /// The fixed space lies in the Lie condition.
    pub fixed_in_lie: bool,
    /// `exp` of every fixed basis vector and of their sum lies in the group.
    pub exp_membership: bool,
    pub passes: bool,
}

pub fn verify_fixed_points(data: &ParabolicData) -> Result<FixedPointReport> {
    let spec = &data.spec;
    let r = spec.ring;
    let dim = data.realization.dim1() + data.gr0_dim();
    let jm = data.involution();
    let fixed = jm.sub(&ModMatrix::identity(r, dim)).kernel_basis()?;
    let gram = spec.gram();
    let lie_map = |v: &[u64]| {
        let n = data.lie_matrix(v);
        flat(&n.transpose().mul(&gram).add(&gram.mul(&n)))
    };
    let size = spec.size();
    let lie_cols: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0; dim];
            e[i] = 1;
            lie_map(&e)
        })
        .collect();
    let lie_dim = if dim == 0 { 0 } else { ModMatrix::from_columns(r, size * size, &lie_cols).kernel_basis()?.len() };
    let fixed_in_lie = fixed.iter().all(|v| lie_map(v).iter().all(|&x| x == 0));
    let mut samples = fixed.clone();
    if !fixed.is_empty() {
        let mut sum = vec![0; dim];
        for v in &fixed {
            sum = crate::zmod::vec_add(&r, &sum, v);
        }
        samples.push(sum);
    }
    let mut exp_membership = true;
    for v in &samples {
        if !membership(spec, &matrix_exp(&data.lie_matrix(v))?, 1)? {
            exp_membership = false;
        }
    }
    let formula_dim = spec.formula_radical_dim();
    let fixed_dim = fixed.len();
    let passes = fixed_in_lie && exp_membership && fixed_dim == lie_dim && fixed_dim == formula_dim;
    Ok(FixedPointReport { fixed_dim, lie_dim, formula_dim, fixed_in_lie, exp_membership, passes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvolutionReport {
    pub involutive: bool,
    /// `j` maps each summand of `gr^1` into the other.
    pub swaps_summands: bool,
    /// `j0 [u, v] = [j1 u, j1 v]` on basis pairs.
    pub bracket_compatible: bool,
    /// Classicality of the induced action on cohomology, when a Levi pair is given.
    pub classical: Option<bool>,
}

impl InvolutionReport {
    pub fn all_pass(&self) -> bool {
        self.involutive && self.swaps_summands && self.bracket_compatible && self.classical.unwrap_or(true)
    }
}

/// Checks on `j`; with a commuting Levi pair over a field, also classicality on the cochain action.
pub fn involution_properties(data: &ParabolicData, levi: Option<(&ModMatrix, &ModMatrix)>) -> Result<InvolutionReport> {
    let r = data.spec.ring;
    let d1 = data.realization.dim1();
    let (dx, _) = data.gr1_dims();
    let involutive = data.j1.mul(&data.j1).is_identity() && data.j0.mul(&data.j0).is_identity();
    let swaps_summands = (0..d1).all(|c| (0..d1).all(|i| (i < dx) != (c < dx) || data.j1.get(i, c) == 0));
    let alg = data.realization.algebra();
    let mut bracket_compatible = true;
    for i in 0..d1 {
        for l in 0..d1 {
            let mut u = vec![0; d1];
            let mut v = vec![0; d1];
            u[i] = 1;
            v[l] = 1;
            let lhs = data.j0.mul_vec(&alg.bracket(&u, &v));
            let rhs = alg.bracket(&data.j1.mul_vec(&u), &data.j1.mul_vec(&v));
            if lhs != rhs {
                bracket_compatible = false;
            }
        }
    }
    let classical = match levi {
        Some((f, g)) => {
            if !r.is_field() {
                return Err(Error::FieldRequired);
            }
            if involutive {
                let pair = GradedActionPair::from_realization(&data.realization, f, g)?;
                Some(is_classical(&pair, &data.delta_action()?)?.classical)
            } else {
                Some(false)
            }
        }
        None => None,
    };
    Ok(InvolutionReport { involutive, swaps_summands, bracket_compatible, classical })
}

/// `w rho^-t w^-1` for the antidiagonal `w`.
pub fn unitary_twist(rho: &ModMatrix) -> Result<ModMatrix> {
    let w = antidiagonal(rho.ring(), rho.rows());
    Ok(w.mul(&rho.inverse()?.transpose()).mul(&w))
}

/// Blocks of `w rho^-t w^-1` for block-upper-triangular `rho = [[A, B, *], [0, D, E], [0, 0, F]]`
/// with blocks `(k, m, k)`: returns `(J1 F^-t J1, -J1 F^-t E^t D^-t J2, J2 D^-t J2, -J2 D^-t B^t A^-t J1, J1 A^-t J1)`
/// where `J1 = w_k`, `J2 = w_m`.
pub fn unitary_twist_blocks(rho: &ModMatrix, k: usize) -> Result<[ModMatrix; 5]> {
    let r = rho.ring();
    let m = rho.rows() - 2 * k;
    let a = rho.submatrix(0, 0, k, k);
    let b = rho.submatrix(0, k, k, m);
    let d = rho.submatrix(k, k, m, m);
    let e = rho.submatrix(k, k + m, m, k);
    let f = rho.submatrix(k + m, k + m, k, k);
    let (j1, j2) = (antidiagonal(r, k), antidiagonal(r, m));
    let (a_t, d_t, f_t) = (a.inverse()?.transpose(), d.inverse()?.transpose(), f.inverse()?.transpose());
    Ok([
        j1.mul(&f_t).mul(&j1),
        j1.mul(&f_t).mul(&e.transpose()).mul(&d_t).mul(&j2).neg(),
        j2.mul(&d_t).mul(&j2),
        j2.mul(&d_t).mul(&b.transpose()).mul(&a_t).mul(&j1).neg(),
        j1.mul(&a_t).mul(&j1),
    ])
}
