//! Herr-shaped complexes `V -> V + V -> V` for commuting operator pairs,
//! their cohomology, and the quadratic obstruction map to degree two.
//!
//! A degree-one cochain is stored as the concatenation `x ++ y`.
//! Coefficient rings act trivially, so everything here is linear algebra
//! over `Z/p^k`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::dvr::{smith_normal_form, DvrMatrix};
use crate::error::{Error, Result};
use crate::heisenberg::{HeisenbergSystem, ModPSolution};
use crate::nilpotent::{group_multiply, BlockRealization, Class2Algebra, Class2Element};
use crate::padic::PadicRing;
use crate::zmod::{is_zero_vec, reduce_against, span_basis, vec_add, vec_neg, vec_scale, vec_sub, ModMatrix, ResidueRing};

/// A finite free module with commuting operators `F` (for phi) and `G` (for gamma).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyPhiGammaModule {
    ring: ResidueRing,
    f: ModMatrix,
    g: ModMatrix,
}

impl ToyPhiGammaModule {
    pub fn new(f: ModMatrix, g: ModMatrix) -> Result<Self> {
        if !f.is_square() || f.rows() != g.rows() || !g.is_square() {
            return Err(Error::DimensionMismatch("F and G must be square of the same size"));
        }
        if f.ring() != g.ring() {
            return Err(Error::DimensionMismatch("F and G over different rings"));
        }
        if f.mul(&g) != g.mul(&f) {
            return Err(Error::NonCommuting);
        }
        Ok(ToyPhiGammaModule { ring: f.ring(), f, g })
    }

    pub fn trivial(ring: ResidueRing, dim: usize) -> Self {
        ToyPhiGammaModule { ring, f: ModMatrix::identity(ring, dim), g: ModMatrix::identity(ring, dim) }
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.f.rows()
    }

    pub fn f(&self) -> &ModMatrix {
        &self.f
    }

    pub fn g(&self) -> &ModMatrix {
        &self.g
    }

    fn f_minus_one(&self) -> ModMatrix {
        self.f.sub(&ModMatrix::identity(self.ring, self.dim()))
    }

    fn g_minus_one(&self) -> ModMatrix {
        self.g.sub(&ModMatrix::identity(self.ring, self.dim()))
    }

    /// `d0(v) = ((F - 1) v, (G - 1) v)`.
    pub fn d0(&self) -> ModMatrix {
        self.f_minus_one().vstack(&self.g_minus_one())
    }

    /// `d1(a, b) = (G - 1) a - (F - 1) b`.
    pub fn d1(&self) -> ModMatrix {
        self.g_minus_one().hstack(&self.f_minus_one().neg())
    }

    pub fn reduce_to(&self, ring: ResidueRing) -> ToyPhiGammaModule {
        ToyPhiGammaModule { ring, f: self.f.reduce_to(ring), g: self.g.reduce_to(ring) }
    }

    /// The submodule on coordinates `[start, start + len)`, if both operators preserve it.
    pub fn restrict(&self, start: usize, len: usize) -> Result<ToyPhiGammaModule> {
        let n = self.dim();
        let inside = |i: usize| i >= start && i < start + len;
        for m in [&self.f, &self.g] {
            for i in 0..n {
                for j in 0..n {
                    if inside(j) && !inside(i) && m.get(i, j) != 0 {
                        return Err(Error::SummandsNotStable);
                    }
                }
            }
        }
        Ok(ToyPhiGammaModule {
            ring: self.ring,
            f: self.f.submatrix(start, start, len, len),
            g: self.g.submatrix(start, start, len, len),
        })
    }

    pub fn is_cocycle1(&self, c: &[u64]) -> bool {
        c.len() == 2 * self.dim() && is_zero_vec(&self.d1().mul_vec(c))
    }

    /// Differentials into and out of degree `i`.
    fn around(&self, degree: usize) -> Result<(ModMatrix, ModMatrix)> {
        let n = self.dim();
        let r = self.ring;
        match degree {
            0 => Ok((ModMatrix::zeros(r, n, 0), self.d0())),
            1 => Ok((self.d0(), self.d1())),
            2 => Ok((self.d1(), ModMatrix::zeros(r, 0, n))),
            _ => Err(Error::NotAdmissible("cohomological degree must be 0, 1 or 2")),
        }
    }
}

/// Cohomology in one degree over `F_p`, with reduced representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCohomology {
    pub degree: usize,
    pub cochain_dim: usize,
    /// Representatives in echelon form, reduced against the coboundaries.
    pub representatives: Vec<Vec<u64>>,
    pub cocycle_basis: Vec<Vec<u64>>,
    pub coboundary_basis: Vec<Vec<u64>>,
    ring: ResidueRing,
    coboundary_pivots: Vec<usize>,
    rep_pivots: Vec<usize>,
}

impl DegreeCohomology {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coboundary-reduced normal form of a cochain.
    pub fn normal_form(&self, z: &[u64]) -> Vec<u64> {
        reduce_against(&self.ring, &self.coboundary_basis, &self.coboundary_pivots, z)
    }

    pub fn is_coboundary(&self, z: &[u64]) -> bool {
        is_zero_vec(&self.normal_form(z))
    }

    /// Coordinates of the class of a cocycle in the representative basis.
    pub fn class_of(&self, z: &[u64]) -> Result<Vec<u64>> {
        if z.len() != self.cochain_dim {
            return Err(Error::DimensionMismatch("cochain length"));
        }
        let nf = self.normal_form(z);
        let coords: Vec<u64> = self.rep_pivots.iter().map(|&pc| nf[pc]).collect();
        if !is_zero_vec(&reduce_against(&self.ring, &self.representatives, &self.rep_pivots, &nf)) {
            return Err(Error::NotACocycle);
        }
        Ok(coords)
    }

    /// The cochain `sum_i coords_i rep_i`.
    pub fn representative(&self, coords: &[u64]) -> Vec<u64> {
        let mut v = vec![0; self.cochain_dim];
        for (c, rep) in coords.iter().zip(&self.representatives) {
            v = vec_add(&self.ring, &v, &vec_scale(&self.ring, *c, rep));
        }
        v
    }
}

/// Cohomology over `F_p` in degree 0, 1 or 2.
pub fn field_cohomology(m: &ToyPhiGammaModule, degree: usize) -> Result<DegreeCohomology> {
    let r = m.ring;
    if !r.is_field() {
        return Err(Error::FieldRequired);
    }
    let (incoming, outgoing) = m.around(degree)?;
    let n = incoming.rows();
    let cocycle_basis = if outgoing.rows() == 0 {
        (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect()
    } else {
        outgoing.kernel_basis()?
    };
    let (coboundary_basis, coboundary_pivots) = if incoming.cols() == 0 {
        (Vec::new(), Vec::new())
    } else {
        let b = incoming.column_space_basis()?;
        span_basis(r, n, &b)?
    };
    let reduced: Vec<Vec<u64>> = cocycle_basis.iter().map(|z| reduce_against(&r, &coboundary_basis, &coboundary_pivots, z)).collect();
    let (representatives, rep_pivots) = span_basis(r, n, &reduced)?;
    Ok(DegreeCohomology { degree, cochain_dim: n, representatives, cocycle_basis, coboundary_basis, ring: r, coboundary_pivots, rep_pivots })
}

/// Exponents `e` of the cyclic summands `Z/p^e` of `H^degree` over `Z/p^k`.
pub fn invariant_factors(m: &ToyPhiGammaModule, degree: usize) -> Result<Vec<u32>> {
    let (incoming, outgoing) = m.around(degree)?;
    let r = m.ring;
    let k = r.exponent();
    let n = incoming.rows();
    // Work in Z_p with room to spare: every invariant factor divides p^k.
    let pr = PadicRing::new(r.prime(), 2 * k + 2)?;
    let lift = |a: &ModMatrix| DvrMatrix::from_fn(pr, a.rows(), a.cols(), |i, j| pr.from_u128(a.get(i, j) as u128));
    let snf = smith_normal_form(&lift(&outgoing))?;
    // Cocycles mod p^k form the lattice T^-1 diag(p^c_j), c_j = max(k - e_j, 0).
    let shifts: Vec<u32> = (0..n).map(|j| snf.exponents.get(j).map_or(0, |&e| k.saturating_sub(e))).collect();
    let mut gens: Vec<Vec<crate::padic::PadicScalar>> = Vec::new();
    for j in 0..incoming.cols() {
        gens.push(incoming.column(j).iter().map(|&v| pr.from_u128(v as u128)).collect());
    }
    for l in 0..n {
        let mut e = vec![pr.zero(); n];
        e[l] = pr.p_power(k);
        gens.push(e);
    }
    let mut columns = Vec::with_capacity(gens.len());
    for g in &gens {
        let u = snf.t.mul_vec(g);
        let col = u
            .iter()
            .zip(&shifts)
            .map(|(x, &c)| x.exact_quotient(&pr.p_power(c)))
            .collect::<Result<Vec<_>>>()?;
        columns.push(col);
    }
    let rel = DvrMatrix::from_columns(pr, n, &columns);
    let rsnf = smith_normal_form(&rel)?;
    let mut out: Vec<u32> = rsnf.exponents.iter().copied().filter(|&e| e > 0).collect();
    out.extend(core::iter::repeat_n(2 * k + 2, n - rsnf.rank()));
    Ok(out)
}

/// Cohomology in one degree: a basis over a field, invariant factors otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cohomology {
    Field(DegreeCohomology),
    Ring { invariant_factors: Vec<u32> },
}

impl Cohomology {
    /// Length as a module (dimension over a field).
    pub fn length(&self) -> u32 {
        match self {
            Cohomology::Field(h) => h.dim() as u32,
            Cohomology::Ring { invariant_factors } => invariant_factors.iter().sum(),
        }
    }
}

pub fn cohomology(m: &ToyPhiGammaModule, degree: usize) -> Result<Cohomology> {
    if m.ring.is_field() {
        Ok(Cohomology::Field(field_cohomology(m, degree)?))
    } else {
        Ok(Cohomology::Ring { invariant_factors: invariant_factors(m, degree)? })
    }
}

/// `M1`, `M0` and an equivariant bracket `M1 x M1 -> M0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedActionPair {
    pub m1: ToyPhiGammaModule,
    pub m0: ToyPhiGammaModule,
    pub algebra: Class2Algebra,
}

impl GradedActionPair {
    pub fn new(m1: ToyPhiGammaModule, m0: ToyPhiGammaModule, algebra: Class2Algebra) -> Result<Self> {
        if algebra.dim1() != m1.dim() || algebra.dim0() != m0.dim() {
            return Err(Error::DimensionMismatch("bracket does not match the module dimensions"));
        }
        if m1.ring != m0.ring || algebra.ring() != m1.ring {
            return Err(Error::DimensionMismatch("pair over mixed rings"));
        }
        let pair = GradedActionPair { m1, m0, algebra };
        pair.check_equivariance()?;
        Ok(pair)
    }

    /// The pair given by a commuting Levi pair `(f, g)` acting on a block realization.
    pub fn from_realization(real: &BlockRealization, f: &ModMatrix, g: &ModMatrix) -> Result<Self> {
        let (f1, f0) = real.levi_action(f)?;
        let (g1, g0) = real.levi_action(g)?;
        Self::new(ToyPhiGammaModule::new(f1, g1)?, ToyPhiGammaModule::new(f0, g0)?, real.algebra())
    }

    fn check_equivariance(&self) -> Result<()> {
        let d = self.m1.dim();
        let mut ei = vec![0; d];
        let mut ej = vec![0; d];
        for i in 0..d {
            ei.fill(0);
            ei[i] = 1;
            for j in 0..d {
                ej.fill(0);
                ej[j] = 1;
                let br = self.algebra.bracket(&ei, &ej);
                for (a1, a0) in [(&self.m1.f, &self.m0.f), (&self.m1.g, &self.m0.g)] {
                    if a0.mul_vec(&br) != self.algebra.bracket(&a1.mul_vec(&ei), &a1.mul_vec(&ej)) {
                        return Err(Error::NotEquivariant);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> ResidueRing {
        self.m1.ring
    }

    pub fn reduce_to(&self, ring: ResidueRing) -> GradedActionPair {
        GradedActionPair { m1: self.m1.reduce_to(ring), m0: self.m0.reduce_to(ring), algebra: self.algebra.reduce_to(ring) }
    }

    fn split<'a>(&self, c: &'a [u64]) -> Result<(&'a [u64], &'a [u64])> {
        if c.len() != 2 * self.m1.dim() {
            return Err(Error::DimensionMismatch("degree-one cochain length"));
        }
        Ok(c.split_at(self.m1.dim()))
    }
}

/// `Q(x1, y1) = [x1, G x1]/2 - [y1, F y1]/2`.
pub fn q_map(pair: &GradedActionPair, c: &[u64]) -> Result<Vec<u64>> {
    let (x, y) = pair.split(c)?;
    let r = pair.ring();
    let alg = &pair.algebra;
    let qx = alg.bracket(x, &pair.m1.g.mul_vec(x));
    let qy = alg.bracket(y, &pair.m1.f.mul_vec(y));
    Ok(vec_scale(&r, r.half(), &vec_sub(&r, &qx, &qy)))
}

/// Polarization `(Q(c + c') - Q(c) - Q(c'))/2`.
pub fn cup(pair: &GradedActionPair, c: &[u64], c2: &[u64]) -> Result<Vec<u64>> {
    let r = pair.ring();
    let sum = vec_add(&r, c, c2);
    let v = vec_sub(&r, &vec_sub(&r, &q_map(pair, &sum)?, &q_map(pair, c)?), &q_map(pair, c2)?);
    Ok(vec_scale(&r, r.half(), &v))
}

/// Class of `c u c'` in `H^2(M0)` for cocycles `c`, `c'`, in the basis of `h2`.
pub fn cup_on_cohomology(pair: &GradedActionPair, h2: &DegreeCohomology, c: &[u64], c2: &[u64]) -> Result<Vec<u64>> {
    if !pair.m1.is_cocycle1(c) || !pair.m1.is_cocycle1(c2) {
        return Err(Error::NotACocycle);
    }
    h2.class_of(&cup(pair, c, c2)?)
}

/// The cup pairing on a basis of `H^1(M1)` with values in `H^2(M0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupPairing {
    pub h1: DegreeCohomology,
    pub h2: DegreeCohomology,
    /// One symmetric `h1 x h1` matrix per coordinate of `H^2(M0)`.
    pub matrices: Vec<ModMatrix>,
}

impl CupPairing {
    pub fn is_trivial(&self) -> bool {
        self.matrices.iter().all(|m| m.is_zero())
    }
}

pub fn cup_pairing(pair: &GradedActionPair) -> Result<CupPairing> {
    let h1 = field_cohomology(&pair.m1, 1)?;
    let h2 = field_cohomology(&pair.m0, 2)?;
    let r = pair.ring();
    let n = h1.dim();
    let mut matrices = vec![ModMatrix::zeros(r, n, n); h2.dim()];
    for i in 0..n {
        for j in 0..n {
            let cls = cup_on_cohomology(pair, &h2, &h1.representatives[i], &h1.representatives[j])?;
            for (k, v) in cls.into_iter().enumerate() {
                matrices[k].set(i, j, v);
            }
        }
    }
    Ok(CupPairing { h1, h2, matrices })
}

/// `(x1, y1)` in `C^1(M1)` and `(x0, y0)` in `C^1(M0)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeisenbergCocycle {
    pub c1: Vec<u64>,
    pub c0: Vec<u64>,
}

impl HeisenbergCocycle {
    /// Group elements `(exp(x1 + x0), exp(y1 + y0))`.
    pub fn elements(&self) -> (Class2Element, Class2Element) {
        let (d1, d0) = (self.c1.len() / 2, self.c0.len() / 2);
        (
            Class2Element { log1: self.c1[..d1].to_vec(), log0: self.c0[..d0].to_vec() },
            Class2Element { log1: self.c1[d1..].to_vec(), log0: self.c0[d0..].to_vec() },
        )
    }
}

/// Whether `d(x1, y1) = 0` and `d(x0, y0) + (x1, y1) u (x1, y1) = 0`.
pub fn is_heisenberg_cocycle(pair: &GradedActionPair, z: &HeisenbergCocycle) -> Result<bool> {
    if !pair.m1.is_cocycle1(&z.c1) {
        return Ok(false);
    }
    if z.c0.len() != 2 * pair.m0.dim() {
        return Err(Error::DimensionMismatch("degree-one cochain length"));
    }
    let lhs = vec_add(&pair.ring(), &pair.m0.d1().mul_vec(&z.c0), &cup(pair, &z.c1, &z.c1)?);
    Ok(is_zero_vec(&lhs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionClassification {
    /// Every solution, sorted.
    pub cocycles: Vec<HeisenbergCocycle>,
    /// Orbits under conjugation by `U`.
    pub class_count: usize,
    /// Whether conjugation maps the solution set into itself.
    pub closed_under_conjugation: bool,
}

fn enumerate_span(ring: &ResidueRing, dim: usize, basis: &[Vec<u64>], mut visit: impl FnMut(&[u64])) {
    let p = ring.prime();
    let total = p.pow(basis.len() as u32);
    let mut coeffs = vec![0u64; basis.len()];
    for index in 0..total {
        let mut rest = index;
        for c in coeffs.iter_mut().rev() {
            *c = rest % p;
            rest /= p;
        }
        let mut v = vec![0; dim];
        for (c, b) in coeffs.iter().zip(basis) {
            if *c != 0 {
                v = vec_add(ring, &v, &vec_scale(ring, *c, b));
            }
        }
        visit(&v);
    }
}

/// Size of the solution space that classification walks.
pub fn classification_size(pair: &GradedActionPair) -> Result<u128> {
    let z1 = field_cohomology(&pair.m1, 1)?.cocycle_basis.len();
    let z0 = field_cohomology(&pair.m0, 1)?.cocycle_basis.len();
    Ok((pair.ring().prime() as u128).pow((z1 + z0) as u32))
}

/// All solutions of the two degree-split equations over `F_p`.
pub fn classify_extensions(pair: &GradedActionPair, budget: u64) -> Result<ExtensionClassification> {
    let r = pair.ring();
    if !r.is_field() {
        return Err(Error::FieldRequired);
    }
    let size = classification_size(pair)?;
    if size > budget as u128 {
        return Err(Error::SearchSpaceTooLarge { size, budget });
    }
    let z1 = field_cohomology(&pair.m1, 1)?.cocycle_basis;
    let z0 = field_cohomology(&pair.m0, 1)?.cocycle_basis;
    let d1_0 = pair.m0.d1();
    let (n1, n0) = (2 * pair.m1.dim(), 2 * pair.m0.dim());
    let mut cocycles = Vec::new();
    let mut failure = None;
    enumerate_span(&r, n1, &z1, |c1| {
        if failure.is_some() {
            return;
        }
        let rhs = match cup(pair, c1, c1) {
            Ok(q) => vec_neg(&r, &q),
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let particular = match d1_0.solve(&rhs) {
            Ok(Some(v)) => v,
            Ok(None) => return,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        enumerate_span(&r, n0, &z0, |h| {
            cocycles.push(HeisenbergCocycle { c1: c1.to_vec(), c0: vec_add(&r, &particular, h) });
        });
    });
    if let Some(e) = failure {
        return Err(e);
    }
    cocycles.sort();
    let (class_count, closed_under_conjugation) = conjugation_orbits(pair, &cocycles)?;
    Ok(ExtensionClassification { cocycles, class_count, closed_under_conjugation })
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Orbits of `(x, y) -> (w x F(w)^-1, w y G(w)^-1)` with `w = exp` of basis vectors.
fn conjugation_orbits(pair: &GradedActionPair, cocycles: &[HeisenbergCocycle]) -> Result<(usize, bool)> {
    let alg = &pair.algebra;
    let r = pair.ring();
    let index: BTreeMap<&HeisenbergCocycle, usize> = cocycles.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut parent: Vec<usize> = (0..cocycles.len()).collect();
    let mut closed = true;
    let (d1, d0) = (alg.dim1(), alg.dim0());
    let mut generators = Vec::new();
    for k in 0..d1 + d0 {
        let mut w = Class2Element::identity(alg);
        if k < d1 {
            w.log1[k] = 1;
        } else {
            w.log0[k - d1] = 1;
        }
        generators.push(w);
    }
    let twist = |w: &Class2Element, a1: &ModMatrix, a0: &ModMatrix| Class2Element {
        log1: vec_neg(&r, &a1.mul_vec(&w.log1)),
        log0: vec_neg(&r, &a0.mul_vec(&w.log0)),
    };
    for w in &generators {
        let wf = twist(w, &pair.m1.f, &pair.m0.f);
        let wg = twist(w, &pair.m1.g, &pair.m0.g);
        for (i, z) in cocycles.iter().enumerate() {
            let (x, y) = z.elements();
            let x2 = group_multiply(alg, &group_multiply(alg, w, &x)?, &wf)?;
            let y2 = group_multiply(alg, &group_multiply(alg, w, &y)?, &wg)?;
            let image = HeisenbergCocycle {
                c1: [x2.log1, y2.log1].concat(),
                c0: [x2.log0, y2.log0].concat(),
            };
            match index.get(&image) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => closed = false,
            }
        }
    }
    let roots = (0..cocycles.len()).filter(|&i| find(&mut parent, i) == i).count();
    Ok((roots, closed))
}

/// How the solutions behave as matrix pairs in a block realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealizationCheck {
    pub solutions: usize,
    /// Solutions whose matrices fail `[phi][gamma] = [gamma][phi]`.
    pub commutation_failures: usize,
    /// Solutions failing `u_f Int_g(u_f^-1) = u_g Int_f(u_g^-1)`.
    pub intertwining_failures: usize,
}

pub fn check_in_realization(real: &BlockRealization, f: &ModMatrix, g: &ModMatrix, cls: &ExtensionClassification) -> Result<RealizationCheck> {
    let mut out = RealizationCheck { solutions: cls.cocycles.len(), commutation_failures: 0, intertwining_failures: 0 };
    for z in &cls.cocycles {
        let (x, y) = z.elements();
        if !real.commutation_relation(f, g, &x, &y)? {
            out.commutation_failures += 1;
        }
        if !real.intertwining_relation(f, g, &x, &y)? {
            out.intertwining_failures += 1;
        }
    }
    Ok(out)
}

/// Brute-force counts over all pairs `(x, y)` in `Lie U`: `(commuting, intertwining)`.
pub fn count_matrix_extensions(real: &BlockRealization, f: &ModMatrix, g: &ModMatrix, budget: u64) -> Result<(usize, usize)> {
    let r = real.ring;
    let dim = real.dim1() + real.dim0();
    let side = (r.modulus() as u128).pow(dim as u32);
    let size = side * side;
    if size > budget as u128 {
        return Err(Error::SearchSpaceTooLarge { size, budget });
    }
    let elements: Vec<(Class2Element, ModMatrix)> = (0..side as u64)
        .map(|mut index| {
            let mut coords = vec![0; dim];
            for c in coords.iter_mut().rev() {
                *c = index % r.modulus();
                index /= r.modulus();
            }
            let e = Class2Element { log1: coords[..real.dim1()].to_vec(), log0: coords[real.dim1()..].to_vec() };
            let u = real.group_matrix(&e).expect("realized elements are unipotent");
            (e, u)
        })
        .collect();
    let (f_inv, g_inv) = (f.inverse()?, g.inverse()?);
    // Precompute u f, u g, u Int_g(u^-1) and u Int_f(u^-1) per element.
    let mut phis = Vec::with_capacity(elements.len());
    let mut gammas = Vec::with_capacity(elements.len());
    let mut tw_g = Vec::with_capacity(elements.len());
    let mut tw_f = Vec::with_capacity(elements.len());
    for (_, u) in &elements {
        let u_inv = u.inverse()?;
        phis.push(u.mul(f));
        gammas.push(u.mul(g));
        tw_g.push(u.mul(&g.mul(&u_inv).mul(&g_inv)));
        tw_f.push(u.mul(&f.mul(&u_inv).mul(&f_inv)));
    }
    let mut commuting = 0;
    let mut intertwining = 0;
    for i in 0..elements.len() {
        for j in 0..elements.len() {
            if phis[i].mul(&gammas[j]) == gammas[j].mul(&phis[i]) {
                commuting += 1;
            }
            if tw_g[i] == tw_f[j] {
                intertwining += 1;
            }
        }
    }
    Ok((commuting, intertwining))
}

/// The three truncation predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HlReport {
    pub hl1: bool,
    pub hl2: bool,
    pub hl3: bool,
}

/// Decide the predicates for a pair over `Z/p^N`, a sub-basis `h` of cocycles of `M1`,
/// and a mod-p cocycle `bar` of `M1`.
pub fn hl_predicates(pair: &GradedActionPair, h: &[Vec<u64>], bar: &[u64]) -> Result<HlReport> {
    for c in h {
        if !pair.m1.is_cocycle1(c) {
            return Err(Error::NotACocycle);
        }
    }
    let field = pair.ring().residue_field();
    let red = pair.reduce_to(field);
    if !red.m1.is_cocycle1(bar) {
        return Err(Error::NotACocycle);
    }
    let n1 = 2 * red.m1.dim();
    let hbar: Vec<Vec<u64>> = h.iter().map(|c| c.iter().map(|v| v % field.modulus()).collect()).collect();
    let span = ModMatrix::from_columns(field, n1, &hbar).hstack(&red.m1.d0());
    let hl1 = span.solve(bar)?.is_some();

    let mut values = Vec::new();
    for i in 0..h.len() {
        for j in i..h.len() {
            values.push(cup(pair, &h[i], &h[j])?.iter().map(|v| v % field.modulus()).collect::<Vec<u64>>());
        }
    }
    let dim0 = red.m0.dim();
    let onto = red.m0.d1().hstack(&ModMatrix::from_columns(field, dim0, &values));
    // Over a local ring, spanning the cokernel can be tested mod p.
    let hl2 = onto.rank()? == dim0;
    let hl3 = dim0 - red.m0.d1().rank()? == 1;
    Ok(HlReport { hl1, hl2, hl3 })
}

/// The finite system `xi^t Sigma xi + d y = 0` with `x1 = sum xi_i X_i` and `y = (x0, y0)`.
#[derive(Clone, Debug)]
pub struct TruncatedSystem {
    pub system: HeisenbergSystem,
    /// Cocycles spanning the `x1` variables: the supplied basis, then `d0(e_j)`.
    pub generators: Vec<Vec<u64>>,
}

pub fn assemble_truncated_system(pair: &GradedActionPair, h: &[Vec<u64>]) -> Result<TruncatedSystem> {
    let r = pair.ring();
    for c in h {
        if !pair.m1.is_cocycle1(c) {
            return Err(Error::NotACocycle);
        }
    }
    let mut generators: Vec<Vec<u64>> = h.to_vec();
    let d0 = pair.m1.d0();
    generators.extend((0..pair.m1.dim()).map(|j| d0.column(j)));
    let pr = PadicRing::new(r.prime(), r.exponent())?;
    let nx = generators.len();
    let dim0 = pair.m0.dim();
    let mut sigma = vec![vec![vec![0i128; nx]; nx]; dim0];
    for i in 0..nx {
        for j in 0..nx {
            let v = cup(pair, &generators[i], &generators[j])?;
            for (l, val) in v.into_iter().enumerate() {
                sigma[l][i][j] = val as i128;
            }
        }
    }
    let d1 = pair.m0.d1();
    let d: Vec<Vec<i128>> = (0..dim0).map(|i| d1.row(i).iter().map(|&v| v as i128).collect()).collect();
    let system = HeisenbergSystem::from_integers(pr, nx, 2 * dim0, &sigma, &d)?;
    Ok(TruncatedSystem { system, generators })
}

impl TruncatedSystem {
    /// Mod-p solution for a mod-p Heisenberg cocycle whose `x1` part is in the span of the generators.
    pub fn mod_p_solution(&self, field: ResidueRing, z: &HeisenbergCocycle) -> Result<ModPSolution> {
        let n1 = z.c1.len();
        let gens: Vec<Vec<u64>> = self.generators.iter().map(|g| g.iter().map(|v| v % field.modulus()).collect()).collect();
        let xi = ModMatrix::from_columns(field, n1, &gens).solve(&z.c1)?.ok_or(Error::InvalidModPSolution)?;
        Ok(ModPSolution { xbar: xi, ybar: z.c0.clone() })
    }

    /// The cochains `(sum xi_i X_i, y)` modulo `p^k`.
    pub fn cocycle_from(&self, ring: ResidueRing, xi: &[u64], y: &[u64]) -> HeisenbergCocycle {
        let n1 = self.generators[0].len();
        let mut c1 = vec![0; n1];
        for (c, g) in xi.iter().zip(&self.generators) {
            c1 = vec_add(&ring, &c1, &vec_scale(&ring, *c % ring.modulus(), g));
        }
        HeisenbergCocycle { c1, c0: y.iter().map(|v| v % ring.modulus()).collect() }
    }
}
