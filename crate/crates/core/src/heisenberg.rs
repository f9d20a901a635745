//! Heisenberg quadratic systems `x^t Sigma x + d y = 0` over `Z_p`.
//!
//! [`LiftPlan`] holds everything that depends only on the system (adapted
//! coordinates, the H2 witness, a Smith form of the adapted `d`) so that many
//! mod-p solutions can be lifted cheaply.

use alloc::vec;
use alloc::vec::Vec;

use crate::dvr::{cokernel_from_snf, constrained_preimage_with, smith_normal_form, CokernelInvariants, DvrMatrix, SnfDecomposition};
use crate::error::{Error, Result};
use crate::padic::{newton_polygon_roots, FieldDescriptor, PadicRing, PadicScalar, QuadraticPolynomial, RootMethod, Scalar, Valuation};

/// Default cap on brute-force search spaces.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct HeisenbergSystem {
    ring: PadicRing,
    r: usize,
    sigma: Vec<DvrMatrix>,
    d: DvrMatrix,
}

impl HeisenbergSystem {
    /// `sigma` has one `r x r` matrix per equation; `d` is `s x t`.
    pub fn new(ring: PadicRing, r: usize, sigma: Vec<DvrMatrix>, d: DvrMatrix) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::DimensionMismatch("a system needs at least one equation"));
        }
        if d.rows() != sigma.len() {
            return Err(Error::DimensionMismatch("d must have one row per equation"));
        }
        if sigma.iter().any(|m| m.rows() != r || m.cols() != r) {
            return Err(Error::DimensionMismatch("each Sigma_i must be r x r"));
        }
        if sigma.iter().any(|m| m.ring() != ring) || d.ring() != ring {
            return Err(Error::DimensionMismatch("coefficients from different rings"));
        }
        Ok(HeisenbergSystem { ring, r, sigma, d })
    }

    pub fn from_integers(ring: PadicRing, r: usize, t: usize, sigma: &[Vec<Vec<i128>>], d: &[Vec<i128>]) -> Result<Self> {
        let sigma = sigma.iter().map(|m| DvrMatrix::from_i128_rows(ring, r, m)).collect::<Result<Vec<_>>>()?;
        if sigma.iter().any(|m| m.rows() != r) {
            return Err(Error::DimensionMismatch("each Sigma_i must be r x r"));
        }
        let d = if d.is_empty() { DvrMatrix::zeros(ring, sigma.len(), t) } else { DvrMatrix::from_i128_rows(ring, t, d)? };
        Self::new(ring, r, sigma, d)
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.sigma.len()
    }

    pub fn t(&self) -> usize {
        self.d.cols()
    }

    pub fn sigma(&self) -> &[DvrMatrix] {
        &self.sigma
    }

    pub fn d(&self) -> &DvrMatrix {
        &self.d
    }

    /// `x^t Sigma x + d y`, coordinate by coordinate.
    pub fn residual(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        assert_eq!((x.len(), y.len()), (self.r, self.t()), "solution shape");
        residual_with(&self.sigma, &self.d, x, y)
    }

    /// Residuals of a candidate mod-p solution, as residues mod p.
    pub fn residual_mod_p(&self, xbar: &[u64], ybar: &[u64]) -> Vec<u64> {
        let p = self.ring.prime();
        let sig: Vec<Vec<Vec<u64>>> = self.sigma.iter().map(|m| m.reduce_mod_p()).collect();
        let d = self.d.reduce_mod_p();
        (0..self.s()).map(|i| eval_mod_p(&sig[i], &d[i], xbar, ybar, p)).collect()
    }
}

fn eval_mod_p(sig: &[Vec<u64>], drow: &[u64], x: &[u64], y: &[u64], p: u64) -> u64 {
    let mut acc = 0u64;
    for (j, xj) in x.iter().enumerate() {
        if *xj == 0 {
            continue;
        }
        let inner = sig[j].iter().zip(x).fold(0u64, |a, (s, xk)| (a + s * xk) % p);
        acc = (acc + xj * inner) % p;
    }
    drow.iter().zip(y).fold(acc, |a, (dv, yv)| (a + dv * yv) % p)
}

fn quad_form(m: &DvrMatrix, u: &[Scalar], v: &[Scalar]) -> Scalar {
    let ring = m.ring();
    let mut acc = Scalar::Base(ring.zero());
    for (j, uj) in u.iter().enumerate() {
        let mut inner = Scalar::Base(ring.zero());
        for (k, vk) in v.iter().enumerate() {
            let e = m.get(j, k);
            if !e.is_indeterminate_zero() {
                inner = inner + Scalar::Base(e) * *vk;
            }
        }
        acc = acc + *uj * inner;
    }
    acc
}

fn residual_with(sigma: &[DvrMatrix], d: &DvrMatrix, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    sigma
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut acc = quad_form(m, x, x);
            for (k, yk) in y.iter().enumerate() {
                acc = acc + Scalar::Base(d.get(i, k)) * *yk;
            }
            acc
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModPSolution {
    pub xbar: Vec<u64>,
    pub ybar: Vec<u64>,
}

/// Equations rewritten in a basis adapted to `coker d`.
#[derive(Clone, Debug)]
pub struct AdaptedCoordinates {
    /// `A` with `Sigma'_i = sum_j A_ij Sigma_j` and `d' = A d`.
    pub transform: DvrMatrix,
    pub sigma: Vec<DvrMatrix>,
    pub d: DvrMatrix,
    /// `Some(n)` for `coker d = Z_p / p^n`, `None` for `coker d = Z_p`.
    pub n: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct H1Report {
    pub holds: bool,
    pub cokernel: CokernelInvariants,
    pub adapted: Option<AdaptedCoordinates>,
}

pub fn check_h1(sys: &HeisenbergSystem) -> Result<H1Report> {
    let snf = smith_normal_form(&sys.d)?;
    let cokernel = cokernel_from_snf(&sys.d, &snf);
    let s = sys.s();
    let n = match (cokernel.free_rank, cokernel.torsion.as_slice()) {
        (1, []) => None,
        (0, [n]) => Some(*n),
        _ => return Ok(H1Report { holds: false, cokernel, adapted: None }),
    };
    // The distinguished coordinate (zero row or p^n row of D) is the last
    // one of the Smith basis; rotate it to the front.
    let a = DvrMatrix::from_fn(sys.ring, s, s, |i, j| {
        let src = if i == 0 { s - 1 } else { i - 1 };
        snf.s_inv.get(src, j)
    });
    let sigma = (0..s)
        .map(|i| {
            DvrMatrix::from_fn(sys.ring, sys.r, sys.r, |u, v| {
                (0..s).fold(sys.ring.zero(), |acc, j| acc + a.get(i, j) * sys.sigma[j].get(u, v))
            })
        })
        .collect();
    let d = a.mul(&sys.d);
    Ok(H1Report { holds: true, cokernel, adapted: Some(AdaptedCoordinates { transform: a, sigma, d, n }) })
}

fn search_size(p: u64, dims: usize, budget: u64) -> Result<u64> {
    let size = (p as u128).checked_pow(dims as u32).unwrap_or(u128::MAX);
    if size > budget as u128 {
        return Err(Error::SearchSpaceTooLarge { size, budget });
    }
    Ok(size as u64)
}

fn decode(mut index: u64, p: u64, out: &mut [u64]) {
    for slot in out.iter_mut().rev() {
        *slot = index % p;
        index /= p;
    }
}

/// First `f` in lexicographic order with `f^t Sigma'_1 f` a unit.
pub fn h2_witness(adapted: &AdaptedCoordinates, p: u64, budget: u64) -> Result<Option<Vec<u64>>> {
    let r = adapted.sigma[0].rows();
    let size = search_size(p, r, budget)?;
    let sig = adapted.sigma[0].reduce_mod_p();
    let mut f = vec![0; r];
    for index in 1..size {
        decode(index, p, &mut f);
        if eval_mod_p(&sig, &[], &f, &[], p) != 0 {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// H2 witness, or `None` when the search space is exhausted.
pub fn check_h2(sys: &HeisenbergSystem, budget: u64) -> Result<Option<Vec<u64>>> {
    let h1 = check_h1(sys)?;
    let adapted = h1.adapted.ok_or(Error::NotHeisenbergH1)?;
    h2_witness(&adapted, sys.ring.prime(), budget)
}

/// Solutions with lexicographic index in `[start, end)` of `F_p^(r+t)`.
pub fn enumerate_mod_p_range(sys: &HeisenbergSystem, start: u64, end: u64) -> Vec<ModPSolution> {
    let p = sys.ring.prime();
    let (r, t) = (sys.r, sys.t());
    let sig: Vec<Vec<Vec<u64>>> = sys.sigma.iter().map(|m| m.reduce_mod_p()).collect();
    let d = sys.d.reduce_mod_p();
    let mut coords = vec![0; r + t];
    let mut out = Vec::new();
    for index in start..end {
        decode(index, p, &mut coords);
        let (x, y) = coords.split_at(r);
        if (0..sys.s()).all(|i| eval_mod_p(&sig[i], &d[i], x, y, p) == 0) {
            out.push(ModPSolution { xbar: x.to_vec(), ybar: y.to_vec() });
        }
    }
    out
}

/// Size of the brute-force space `p^(r+t)`, checked against the budget.
pub fn enumeration_size(sys: &HeisenbergSystem, budget: u64) -> Result<u64> {
    search_size(sys.ring.prime(), sys.r + sys.t(), budget)
}

/// All mod-p solutions in lexicographic order.
pub fn enumerate_mod_p(sys: &HeisenbergSystem, budget: u64) -> Result<Vec<ModPSolution>> {
    let size = enumeration_size(sys, budget)?;
    Ok(enumerate_mod_p_range(sys, 0, size))
}

#[derive(Clone, Debug)]
pub struct LiftResult {
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
    pub field: FieldDescriptor,
    pub achieved_prec: u32,
    pub witness: Vec<u64>,
    pub lambda: Scalar,
    pub method: RootMethod,
}

impl LiftResult {
    /// Whether the lift reduces to `sol` modulo the maximal ideal.
    pub fn reduces_to(&self, sol: &ModPSolution) -> bool {
        let close = |a: &Scalar, b: u64| {
            let diff = *a - Scalar::Base(a.ring().from_u128(b as u128));
            !matches!(diff.valuation_halves(), Valuation::Finite(0))
        };
        self.x.len() == sol.xbar.len()
            && self.y.len() == sol.ybar.len()
            && self.x.iter().zip(&sol.xbar).all(|(a, &b)| close(a, b))
            && self.y.iter().zip(&sol.ybar).all(|(a, &b)| close(a, b))
    }
}

/// Precomputed data for lifting solutions of one system.
#[derive(Clone, Debug)]
pub struct LiftPlan {
    sys: HeisenbergSystem,
    adapted: AdaptedCoordinates,
    adapted_snf: SnfDecomposition,
    witness: Vec<u64>,
}

impl LiftPlan {
    pub fn new(sys: &HeisenbergSystem, budget: u64) -> Result<Self> {
        let h1 = check_h1(sys)?;
        let adapted = h1.adapted.ok_or(Error::NotHeisenbergH1)?;
        let witness = h2_witness(&adapted, sys.ring.prime(), budget)?.ok_or(Error::NotHeisenbergH2)?;
        let adapted_snf = smith_normal_form(&adapted.d)?;
        Ok(LiftPlan { sys: sys.clone(), adapted, adapted_snf, witness })
    }

    pub fn system(&self) -> &HeisenbergSystem {
        &self.sys
    }

    pub fn adapted(&self) -> &AdaptedCoordinates {
        &self.adapted
    }

    pub fn witness(&self) -> &[u64] {
        &self.witness
    }

    pub fn lift(&self, sol: &ModPSolution) -> Result<LiftResult> {
        let sys = &self.sys;
        let ring = sys.ring;
        let p = ring.prime();
        if sol.xbar.len() != sys.r || sol.ybar.len() != sys.t() || sol.xbar.iter().chain(&sol.ybar).any(|&v| v >= p) {
            return Err(Error::InvalidModPSolution);
        }
        if sys.residual_mod_p(&sol.xbar, &sol.ybar).iter().any(|&v| v != 0) {
            return Err(Error::InvalidModPSolution);
        }
        let lift = |v: &u64| Scalar::Base(ring.from_u128(*v as u128));
        let mut x: Vec<Scalar> = sol.xbar.iter().map(lift).collect();
        let mut y: Vec<Scalar> = sol.ybar.iter().map(lift).collect();
        let f: Vec<Scalar> = self.witness.iter().map(lift).collect();

        let sig1 = &self.adapted.sigma[0];
        let a = quad_form(sig1, &f, &f).as_base().expect("base data");
        let b = (quad_form(sig1, &x, &f) + quad_form(sig1, &f, &x)).as_base().expect("base data");
        let mut c = quad_form(sig1, &x, &x);
        for (k, yk) in y.iter().enumerate() {
            c = c + Scalar::Base(self.adapted.d.get(0, k)) * *yk;
        }
        let c = c.as_base().expect("base data");
        let root = newton_polygon_roots(&QuadraticPolynomial::new(a, b, c))?;
        let lambda = root.root;
        for (xi, fi) in x.iter_mut().zip(&f) {
            *xi = *xi + lambda * *fi;
        }

        let w = residual_with(&self.adapted.sigma, &self.adapted.d, &x, &y);
        match lambda.minpoly() {
            None => {
                let w: Vec<PadicScalar> = w.iter().map(|v| v.as_base().expect("base residual")).collect();
                let z = constrained_preimage_with(&self.adapted_snf, &w, 1)?;
                for (yk, zk) in y.iter_mut().zip(&z) {
                    *yk = *yk - Scalar::Base(*zk);
                }
            }
            Some(mp) => {
                let w: Vec<_> = w.iter().map(|v| v.promote(mp)).collect();
                let w0: Vec<PadicScalar> = w.iter().map(|v| v.a0).collect();
                let w1: Vec<PadicScalar> = w.iter().map(|v| v.a1).collect();
                // theta has positive valuation, so only the rational part needs the floor.
                let z0 = constrained_preimage_with(&self.adapted_snf, &w0, 1)?;
                let z1 = constrained_preimage_with(&self.adapted_snf, &w1, 0)?;
                for (k, yk) in y.iter_mut().enumerate() {
                    let z = crate::padic::QuadExtScalar::new(z0[k], z1[k], mp);
                    *yk = Scalar::Ext(yk.promote(mp) - z);
                }
                for xi in x.iter_mut() {
                    *xi = Scalar::Ext(xi.promote(mp));
                }
            }
        }

        let coord_prec = x.iter().chain(&y).map(|v| v.known_prec()).min().unwrap_or(ring.precision());
        let resid = sys
            .residual(&x, &y)
            .iter()
            .fold(Valuation::AtLeast(ring.precision()), |acc, v| acc.min(v.coordinate_valuation()));
        let achieved_prec = coord_prec.min(resid.bound());
        if achieved_prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
        Ok(LiftResult { x, y, field: root.field, achieved_prec, witness: self.witness.clone(), lambda, method: root.method })
    }
}

/// Lift one mod-p solution to a solution over `Z_p` or a quadratic extension.
pub fn lift(sys: &HeisenbergSystem, sol: &ModPSolution, budget: u64) -> Result<LiftResult> {
    LiftPlan::new(sys, budget)?.lift(sol)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualReport {
    /// Valuation of each coordinate of `x^t Sigma x + d y`.
    pub residuals: Vec<Valuation>,
    pub min: Valuation,
}

impl ResidualReport {
    pub fn meets(&self, prec: u32) -> bool {
        self.min.at_least(prec)
    }
}

/// Recompute the residual of a candidate solution from the original data.
pub fn verify(sys: &HeisenbergSystem, x: &[Scalar], y: &[Scalar]) -> ResidualReport {
    let residuals: Vec<Valuation> = sys.residual(x, y).iter().map(|v| v.coordinate_valuation()).collect();
    let min = residuals.iter().fold(Valuation::AtLeast(sys.ring.precision()), |a, v| a.min(*v));
    ResidualReport { residuals, min }
}
