//! Involutions `j` on graded pairs with `M1 = A + B`, the classicality
//! predicate, block identities for the cup product, and a pairing bound.
//!
//! `j` is given on modules: `j1` on `M1` and `j0` on `M0`. It acts on every
//! cochain group coordinatewise and on cohomology when it commutes with the
//! operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::cochain::{cup, field_cohomology, DegreeCohomology, GradedActionPair, ToyPhiGammaModule};
use crate::error::{Error, Result};
use crate::zmod::{is_zero_vec, vec_add, vec_scale, vec_sub, ModMatrix, ResidueRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaAction {
    pub j1: ModMatrix,
    pub j0: ModMatrix,
    /// Dimensions of the two summands of `M1`, in coordinate order.
    pub summands: (usize, usize),
}

impl DeltaAction {
    pub fn new(j1: ModMatrix, j0: ModMatrix, summands: (usize, usize)) -> Result<Self> {
        if !j1.is_square() || !j0.is_square() || summands.0 + summands.1 != j1.rows() {
            return Err(Error::DimensionMismatch("involution shape"));
        }
        for j in [&j1, &j0] {
            if !j.mul(j).is_identity() {
                return Err(Error::NotInvolution);
            }
        }
        Ok(DeltaAction { j1, j0, summands })
    }

    /// Whether `j` commutes with `F` and `G` on both pieces.
    pub fn descends(&self, pair: &GradedActionPair) -> bool {
        let commutes = |j: &ModMatrix, a: &ModMatrix| j.mul(a) == a.mul(j);
        self.j1.rows() == pair.m1.dim()
            && self.j0.rows() == pair.m0.dim()
            && commutes(&self.j1, pair.m1.f())
            && commutes(&self.j1, pair.m1.g())
            && commutes(&self.j0, pair.m0.f())
            && commutes(&self.j0, pair.m0.g())
    }

    /// `j1` applied blockwise to a cochain on `M1`.
    pub fn apply1(&self, c: &[u64]) -> Vec<u64> {
        apply_blocks(&self.j1, c)
    }

    pub fn apply0(&self, c: &[u64]) -> Vec<u64> {
        apply_blocks(&self.j0, c)
    }
}

fn apply_blocks(j: &ModMatrix, c: &[u64]) -> Vec<u64> {
    c.chunks(j.rows()).flat_map(|b| j.mul_vec(b)).collect()
}

/// Why an action fails to be classical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassicalWitness {
    /// A cocycle of one summand whose image has a nonzero class in the same summand.
    SwapFails { degree: usize, summand: usize, cocycle: Vec<u64> },
    /// Basis classes with `j(u cup v) != ju cup jv`.
    CupIncompatible { u: Vec<u64>, v: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalReport {
    pub classical: bool,
    pub witness: Option<ClassicalWitness>,
}

struct Summands {
    a: ToyPhiGammaModule,
    b: ToyPhiGammaModule,
    da: usize,
    db: usize,
}

fn summands(pair: &GradedActionPair, dims: (usize, usize)) -> Result<Summands> {
    if dims.0 + dims.1 != pair.m1.dim() {
        return Err(Error::DimensionMismatch("summand dimensions"));
    }
    Ok(Summands { a: pair.m1.restrict(0, dims.0)?, b: pair.m1.restrict(dims.0, dims.1)?, da: dims.0, db: dims.1 })
}

/// Spread a cochain on one summand over `copies` blocks of `M1`.
fn embed(c: &[u64], copies: usize, offset: usize, len: usize, total: usize) -> Vec<u64> {
    let mut out = vec![0; copies * total];
    for k in 0..copies {
        out[k * total + offset..k * total + offset + len].copy_from_slice(&c[k * len..(k + 1) * len]);
    }
    out
}

fn project(c: &[u64], copies: usize, offset: usize, len: usize, total: usize) -> Vec<u64> {
    (0..copies).flat_map(|k| c[k * total + offset..k * total + offset + len].iter().copied()).collect()
}

fn copies(degree: usize) -> usize {
    if degree == 1 {
        2
    } else {
        1
    }
}

pub fn is_classical(pair: &GradedActionPair, action: &DeltaAction) -> Result<ClassicalReport> {
    if !action.descends(pair) {
        return Err(Error::DoesNotDescend);
    }
    let s = summands(pair, action.summands)?;
    let n = pair.m1.dim();
    for degree in 0..3 {
        let k = copies(degree);
        for (summand, (src, off, len)) in [(&s.a, 0, s.da), (&s.b, s.da, s.db)].into_iter().enumerate() {
            let h_src = field_cohomology(src, degree)?;
            // The image must have no class in the summand it came from.
            for z in &h_src.representatives {
                let image = action.apply1(&embed(z, k, off, len, n));
                let back = project(&image, k, off, len, n);
                if !h_src.is_coboundary(&back) {
                    return Ok(ClassicalReport {
                        classical: false,
                        witness: Some(ClassicalWitness::SwapFails { degree, summand, cocycle: embed(z, k, off, len, n) }),
                    });
                }
            }
        }
    }
    let h1 = field_cohomology(&pair.m1, 1)?;
    let h2 = field_cohomology(&pair.m0, 2)?;
    for u in &h1.representatives {
        for v in &h1.representatives {
            let lhs = action.apply0(&cup(pair, u, v)?);
            let rhs = cup(pair, &action.apply1(u), &action.apply1(v))?;
            if h2.class_of(&lhs)? != h2.class_of(&rhs)? {
                return Ok(ClassicalReport {
                    classical: false,
                    witness: Some(ClassicalWitness::CupIncompatible { u: u.clone(), v: v.clone() }),
                });
            }
        }
    }
    Ok(ClassicalReport { classical: true, witness: None })
}

fn check_block_bracket(pair: &GradedActionPair, dims: (usize, usize)) -> Result<()> {
    let n = pair.m1.dim();
    let mut u = vec![0; n];
    let mut v = vec![0; n];
    for (lo, hi) in [(0, dims.0), (dims.0, n)] {
        for i in lo..hi {
            for j in lo..hi {
                u.fill(0);
                v.fill(0);
                u[i] = 1;
                v[j] = 1;
                if !is_zero_vec(&pair.algebra.bracket(&u, &v)) {
                    return Err(Error::BracketNotBlock);
                }
            }
        }
    }
    Ok(())
}

/// The five cochain residuals
/// `(c1,0)u(c1,0)`, `(0,c2)u(0,c2)`, `(c1,0)u(0,c2) - (c1,c2)u(c1,c2)/2`,
/// `(c1,0)u(c1',0)`, `(0,c2)u(0,c2')`.
pub fn cup_block_identities(
    pair: &GradedActionPair,
    dims: (usize, usize),
    c1: &[u64],
    c2: &[u64],
    c1p: &[u64],
    c2p: &[u64],
) -> Result<[Vec<u64>; 5]> {
    check_block_bracket(pair, dims)?;
    let s = summands(pair, dims)?;
    for (m, c) in [(&s.a, c1), (&s.a, c1p), (&s.b, c2), (&s.b, c2p)] {
        if !m.is_cocycle1(c) {
            return Err(Error::NotACocycle);
        }
    }
    let n = pair.m1.dim();
    let r = pair.ring();
    let a = |c: &[u64]| embed(c, 2, 0, s.da, n);
    let b = |c: &[u64]| embed(c, 2, s.da, s.db, n);
    let both = vec_add(&r, &a(c1), &b(c2));
    let mixed = vec_sub(&r, &cup(pair, &a(c1), &b(c2))?, &vec_scale(&r, r.half(), &cup(pair, &both, &both)?));
    Ok([
        cup(pair, &a(c1), &a(c1))?,
        cup(pair, &b(c2), &b(c2))?,
        mixed,
        cup(pair, &a(c1), &a(c1p))?,
        cup(pair, &b(c2), &b(c2p))?,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferReport {
    /// The cup pairing is nonzero on the `j`-invariant part of `H^1(M1)`.
    pub on_invariants: bool,
    /// The cup pairing is nonzero on `H^1(M1)`.
    pub overall: bool,
    /// `H^2(M0)` is one-dimensional and `j` acts trivially on it.
    pub hypothesis: bool,
}

/// Matrix of `j1` on `H^1(M1)` in the representative basis.
fn action_on_h1(h1: &DegreeCohomology, action: &DeltaAction, ring: ResidueRing) -> Result<ModMatrix> {
    let cols = h1.representatives.iter().map(|z| h1.class_of(&action.apply1(z))).collect::<Result<Vec<_>>>()?;
    Ok(ModMatrix::from_columns(ring, h1.dim(), &cols))
}

pub fn nontriviality_transfer_check(pair: &GradedActionPair, action: &DeltaAction) -> Result<TransferReport> {
    if !is_classical(pair, action)?.classical {
        return Err(Error::NotClassical);
    }
    let r = pair.ring();
    let h1 = field_cohomology(&pair.m1, 1)?;
    let h2 = field_cohomology(&pair.m0, 2)?;
    let jh = action_on_h1(&h1, action, r)?;
    let fixed = jh.sub(&ModMatrix::identity(r, h1.dim())).kernel_basis()?;
    let invariants: Vec<Vec<u64>> = fixed.iter().map(|c| h1.representative(c)).collect();
    let nonzero_on = |basis: &[Vec<u64>]| -> Result<bool> {
        for u in basis {
            for v in basis {
                if !is_zero_vec(&h2.class_of(&cup(pair, u, v)?)?) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    };
    let trivial_on_h2 = h2
        .representatives
        .iter()
        .map(|z| Ok(h2.class_of(&action.apply0(z))? == h2.class_of(z)?))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    Ok(TransferReport {
        on_invariants: nonzero_on(&invariants)?,
        overall: nonzero_on(&h1.representatives)?,
        hypothesis: h2.dim() == 1 && trivial_on_h2,
    })
}

/// A bilinear pairing `X x Y -> k` given by its matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearPairingSpace {
    pub pairing: ModMatrix,
}

impl BilinearPairingSpace {
    pub fn dim_x(&self) -> usize {
        self.pairing.rows()
    }

    pub fn dim_y(&self) -> usize {
        self.pairing.cols()
    }

    pub fn pair(&self, x: &[u64], y: &[u64]) -> u64 {
        self.pairing.bilinear(x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub holds: bool,
    pub dim_x: usize,
    pub dim_y: usize,
    pub dim_hx: usize,
    pub dim_hy: usize,
}

/// `dim X >= 2 dim H_X` or `dim Y >= 2 dim H_Y` for mutually orthogonal `H_X`, `H_Y`.
pub fn orthogonal_subspace_bound(space: &BilinearPairingSpace, hx: &[Vec<u64>], hy: &[Vec<u64>]) -> Result<BoundReport> {
    let p = &space.pairing;
    let r = p.ring();
    if !r.is_field() {
        return Err(Error::FieldRequired);
    }
    if !p.is_square() || p.rank()? != p.rows() {
        return Err(Error::DegeneratePairing);
    }
    for x in hx {
        for y in hy {
            if x.len() != p.rows() || y.len() != p.cols() {
                return Err(Error::DimensionMismatch("subspace vector length"));
            }
            if space.pair(x, y) != 0 {
                return Err(Error::NotOrthogonal);
            }
        }
    }
    let dim_of = |vs: &[Vec<u64>], n: usize| -> Result<usize> {
        if vs.is_empty() {
            Ok(0)
        } else {
            ModMatrix::from_columns(r, n, vs).rank()
        }
    };
    let (dim_x, dim_y) = (space.dim_x(), space.dim_y());
    let dim_hx = dim_of(hx, dim_x)?;
    let dim_hy = dim_of(hy, dim_y)?;
    Ok(BoundReport { holds: dim_x >= 2 * dim_hx || dim_y >= 2 * dim_hy, dim_x, dim_y, dim_hx, dim_hy })
}

/// Integer bounds `h1 >= [K:Q_p] a b` and `h2 <= a b` from declared inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionBounds {
    pub h1_lower: u64,
    pub h2_upper: u64,
}

pub fn dimension_bounds(degree: u64, a: u64, b: u64) -> DimensionBounds {
    DimensionBounds { h1_lower: degree * a * b, h2_upper: a * b }
}
