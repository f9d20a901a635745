//! Acceptance criteria 1 to 10. Each prints one PASS/FAIL line.
//!
//! Oracles live here and share no code paths with the library beyond the
//! data types. The process exits nonzero on any failure not listed in
//! `KNOWN_RED`.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heislift_core::atlas::{build_parabolic, verify_fixed_points, ClassicalGroupSpec, Family};
use heislift_core::cochain::{
    classify_extensions, cup, cup_pairing, field_cohomology, q_map, GradedActionPair, ToyPhiGammaModule,
};
use heislift_core::delta::{
    cup_block_identities, nontriviality_transfer_check, orthogonal_subspace_bound, BilinearPairingSpace, DeltaAction,
};
use heislift_core::dvr::{adapt_basis, image_membership, smith_normal_form, DvrMatrix};
use heislift_core::heisenberg::{check_h1, check_h2, enumerate_mod_p, verify, HeisenbergSystem, LiftPlan};
use heislift_core::nilpotent::{group_multiply, matrix_exp, matrix_log, BlockRealization, Class2Algebra, Class2Element};
use heislift_core::padic::{newton_polygon_roots, FieldDescriptor, PadicRing, PadicScalar, QuadraticPolynomial, RootMethod, Scalar, Valuation};
use heislift_core::zmod::{is_zero_vec, ModMatrix, ResidueRing};

const BUDGET: u64 = 10_000_000;

/// Criteria expected to fail, with the reason printed next to the verdict.
const KNOWN_RED: &[(usize, &str)] = &[(
    5,
    "commutation of the matrix pair differs from the classified equations by the term [x1, y1] in degree 0",
)];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn main() {
    let criteria: [(usize, &str, f64, fn() -> Verdict); 10] = [
        (1, "heisenberg lifting round-trip", 60.0, c1_lifting),
        (2, "smith normal form and adapted bases", 10.0, c2_snf),
        (3, "newton polygon roots", 5.0, c3_roots),
        (4, "bch against realization matrices", 10.0, c4_bch),
        (5, "extension classification vs matrix pairs", 120.0, c5_classification),
        (6, "cup calculus", 30.0, c6_cup),
        (7, "non-triviality transfer", 60.0, c7_transfer),
        (8, "orthogonal subspace bound", 5.0, c8_bound),
        (9, "atlas fixed points", 10.0, c9_atlas),
        (10, "determinism of machine reports", 60.0, c10_determinism),
    ];
    let mut unexpected = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let v = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        let pass = v.pass && secs <= limit;
        let known = KNOWN_RED.iter().find(|(k, _)| *k == n);
        let mut line = format!(
            "criterion {n:>2} {name}: {} ({}; {secs:.2}s of {limit:.0}s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
        match (pass, known) {
            (false, Some((_, why))) => line.push_str(&format!(" [known: {why}]")),
            (false, None) => unexpected += 1,
            (true, Some(_)) => line.push_str(" [listed as known red but passed]"),
            (true, None) => {}
        }
        println!("{line}");
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- criterion 1

fn random_system(rng: &mut ChaCha8Rng) -> Option<HeisenbergSystem> {
    let p = [3u64, 5, 7][rng.gen_range(0..3)];
    let r = rng.gen_range(1..=3usize);
    let s = rng.gen_range(1..=3usize);
    let t = rng.gen_range(0..=3usize);
    let q = (p * p) as i128;
    let sigma: Vec<Vec<Vec<i128>>> = (0..s)
        .map(|_| {
            let mut m = vec![vec![0i128; r]; r];
            for i in 0..r {
                for j in i..r {
                    let v = rng.gen_range(0..q);
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            m
        })
        .collect();
    let d: Vec<Vec<i128>> = (0..s).map(|_| (0..t).map(|_| rng.gen_range(0..q)).collect()).collect();
    HeisenbergSystem::from_integers(PadicRing::new(p, 32).ok()?, r, t, &sigma, &d).ok()
}

/// `x^t Sigma_l x + (d y)_l`, evaluated entry by entry.
fn residual_oracle(sys: &HeisenbergSystem, x: &[Scalar], y: &[Scalar]) -> Valuation {
    let ring = sys.ring();
    let mut min = Valuation::AtLeast(ring.precision());
    for (l, sig) in sys.sigma().iter().enumerate() {
        let mut acc = Scalar::Base(ring.zero());
        for i in 0..sys.r() {
            for j in 0..sys.r() {
                acc = acc + x[i] * Scalar::Base(sig.get(i, j)) * x[j];
            }
        }
        for (k, yk) in y.iter().enumerate() {
            acc = acc + Scalar::Base(sys.d().get(l, k)) * *yk;
        }
        min = min.min(acc.coordinate_valuation());
    }
    min
}

fn c1_lifting() -> Verdict {
    let mut rng = rng(101);
    let (mut systems, mut lifted, mut worst) = (0, 0usize, u32::MAX);
    let mut failures = Vec::new();
    let mut fields = BTreeSet::new();
    for _ in 0..200_000 {
        if systems >= 200 {
            break;
        }
        let Some(sys) = random_system(&mut rng) else { continue };
        if !matches!(check_h1(&sys), Ok(h) if h.holds) || !matches!(check_h2(&sys, BUDGET), Ok(Some(_))) {
            continue;
        }
        let Ok(sols) = enumerate_mod_p(&sys, BUDGET) else { continue };
        if sols.is_empty() {
            continue;
        }
        systems += 1;
        let plan = match LiftPlan::new(&sys, BUDGET) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("plan: {e}"));
                continue;
            }
        };
        for sol in &sols {
            match plan.lift(sol) {
                Ok(l) => {
                    lifted += 1;
                    fields.insert(l.field.name());
                    worst = worst.min(l.achieved_prec);
                    let oracle = residual_oracle(&sys, &l.x, &l.y);
                    let rep = verify(&sys, &l.x, &l.y);
                    if !oracle.at_least(l.achieved_prec) || !rep.meets(l.achieved_prec) || l.achieved_prec < 28 || !l.reduces_to(sol) {
                        failures.push(format!("residual {oracle} at prec {}", l.achieved_prec));
                    }
                }
                Err(e) => failures.push(format!("lift: {e}")),
            }
        }
    }
    let detail = format!(
        "{systems} systems, {lifted} lifts, min achieved_prec {worst}, fields {fields:?}, {} failures{}",
        failures.len(),
        failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
    );
    verdict(systems >= 200 && failures.is_empty(), detail)
}

// ---------------------------------------------------------------- criterion 2

fn random_padic(rng: &mut ChaCha8Rng, ring: PadicRing) -> PadicScalar {
    let v = rng.gen_range(0..=4u32);
    if rng.gen_bool(0.15) {
        return ring.zero();
    }
    let unit = rng.gen_range(1..ring.modulus());
    let unit = if unit % ring.prime() as u128 == 0 { unit + 1 } else { unit };
    ring.from_u128(unit) * ring.p_power(v)
}

fn random_dvr(rng: &mut ChaCha8Rng, ring: PadicRing, rows: usize, cols: usize) -> DvrMatrix {
    DvrMatrix::from_fn(ring, rows, cols, |_, _| random_padic(rng, ring))
}

fn same(a: &DvrMatrix, b: &DvrMatrix) -> bool {
    let n = a.ring().precision();
    a.rows() == b.rows()
        && a.cols() == b.cols()
        && a.entries().iter().zip(b.entries()).all(|(x, y)| (*x - *y).valuation().at_least(n))
}

fn unimodular_oracle(m: &DvrMatrix, inv: &DvrMatrix) -> bool {
    let id = DvrMatrix::identity(m.ring(), m.rows());
    same(&m.mul(inv), &id) && same(&inv.mul(m), &id)
}

fn c2_snf() -> Verdict {
    let mut rng = rng(202);
    let mut bad = 0;
    for _ in 0..1000 {
        let p = [3u64, 5, 7, 11][rng.gen_range(0..4)];
        let ring = PadicRing::new(p, 20).unwrap();
        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let m = random_dvr(&mut rng, ring, rows, cols);
        let Ok(snf) = smith_normal_form(&m) else {
            bad += 1;
            continue;
        };
        let diagonal = (0..rows).all(|i| (0..cols).all(|j| i == j || snf.d.get(i, j).valuation().at_least(20)));
        let divides = snf.exponents.windows(2).all(|w| w[0] <= w[1])
            && snf.exponents.iter().enumerate().all(|(i, &e)| snf.d.get(i, i).valuation() == Valuation::Finite(e));
        if !(same(&snf.reconstruct(), &m) && unimodular_oracle(&snf.s, &snf.s_inv) && unimodular_oracle(&snf.t, &snf.t_inv) && diagonal && divides) {
            bad += 1;
        }
    }
    let mut adapt_bad = 0;
    let mut done = 0;
    while done < 200 {
        let p = [3u64, 5, 7][rng.gen_range(0..3)];
        let ring = PadicRing::new(p, 24).unwrap();
        let s = rng.gen_range(1..=5);
        let extra = rng.gen_range(0..=2);
        let n = rng.gen_range(1..=4u32);
        // gens = A diag(p^n, 1, .., 1) B with A, B unimodular, plus extra columns in the lattice
        let a = random_unimodular(&mut rng, ring, s);
        let mut gens_cols = Vec::new();
        for j in 0..s {
            let scale = if j == 0 { ring.p_power(n) } else { ring.one() };
            gens_cols.push(a.column(j).iter().map(|v| *v * scale).collect::<Vec<_>>());
        }
        for _ in 0..extra {
            let coeffs: Vec<PadicScalar> = (0..s).map(|_| random_padic(&mut rng, ring)).collect();
            let col = (0..s)
                .map(|i| (0..s).fold(ring.zero(), |acc, j| acc + gens_cols[j][i] * coeffs[j]))
                .collect();
            gens_cols.push(col);
        }
        // shuffle columns
        for i in (1..gens_cols.len()).rev() {
            gens_cols.swap(i, rng.gen_range(0..=i));
        }
        let gens = DvrMatrix::from_columns(ring, s, &gens_cols);
        let Ok(ab) = adapt_basis(s, &gens) else {
            adapt_bad += 1;
            done += 1;
            continue;
        };
        done += 1;
        // span(gens) in span(p^n x1, x2, ..): coordinates in the basis, first one divisible by p^n
        let inv = match ab.basis.determinant() {
            Ok(det) if det.is_unit() => invert(&ab.basis),
            _ => {
                adapt_bad += 1;
                continue;
            }
        };
        let forward = gens_cols.iter().all(|g| inv.mul_vec(g)[0].valuation().at_least(ab.n));
        let mut targets: Vec<Vec<PadicScalar>> = (1..s).map(|j| ab.basis.column(j)).collect();
        targets.push(ab.basis.column(0).iter().map(|v| *v * ring.p_power(ab.n)).collect());
        let backward = targets.iter().all(|w| matches!(image_membership(&gens, w), Ok(Some(_))));
        if !(forward && backward && ab.n == n) {
            adapt_bad += 1;
        }
    }
    verdict(bad == 0 && adapt_bad == 0, format!("1000 SNF, {bad} bad; 200 adapted bases, {adapt_bad} bad"))
}

fn random_unimodular(rng: &mut ChaCha8Rng, ring: PadicRing, n: usize) -> DvrMatrix {
    // product of a unit lower and a unit upper triangular matrix
    let lower = DvrMatrix::from_fn(ring, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => ring.one(),
        std::cmp::Ordering::Greater => ring.from_u128(rng.gen_range(0..1000)),
        std::cmp::Ordering::Less => ring.zero(),
    });
    let upper = DvrMatrix::from_fn(ring, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => ring.from_u128(rng.gen_range(1..ring.prime() as u128)),
        std::cmp::Ordering::Less => ring.from_u128(rng.gen_range(0..1000)),
        std::cmp::Ordering::Greater => ring.zero(),
    });
    lower.mul(&upper)
}

/// Gauss-Jordan inverse of a matrix with unit determinant.
fn invert(m: &DvrMatrix) -> DvrMatrix {
    let n = m.rows();
    let ring = m.ring();
    let mut a: Vec<Vec<PadicScalar>> = (0..n).map(|i| m.row(i)).collect();
    let mut b: Vec<Vec<PadicScalar>> = (0..n).map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| a[r][c].is_unit()).expect("unit pivot");
        a.swap(c, piv);
        b.swap(c, piv);
        let inv = a[c][c].inv().unwrap();
        for j in 0..n {
            a[c][j] = a[c][j] * inv;
            b[c][j] = b[c][j] * inv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] = a[r][j] - f * a[c][j];
                    b[r][j] = b[r][j] - f * b[c][j];
                }
            }
        }
    }
    DvrMatrix::from_fn(ring, n, n, |i, j| b[i][j])
}

// ---------------------------------------------------------------- criterion 3

fn legendre(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let (mut b, mut e) = (a % p, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn c3_roots() -> Verdict {
    let mut rng = rng(303);
    let prec = 30u32;
    let (mut bad, mut by_method) = (Vec::new(), [0usize; 3]);
    let mut base_without_hensel = 0;
    for _ in 0..500 {
        let p = [3u64, 5, 7, 11, 13][rng.gen_range(0..5)];
        let ring = PadicRing::new(p, prec).unwrap();
        let unit = |rng: &mut ChaCha8Rng| {
            let u = rng.gen_range(1..ring.modulus());
            ring.from_u128(if u % p as u128 == 0 { u + 1 } else { u })
        };
        let a = unit(&mut rng);
        let vb = rng.gen_range(0..=4u32);
        let b = if rng.gen_bool(0.1) { ring.zero() } else { unit(&mut rng) * ring.p_power(vb) };
        let vc = rng.gen_range(1..=6u32);
        let c = unit(&mut rng) * ring.p_power(vc);
        let q = QuadraticPolynomial::new(a, b, c);
        let root = match newton_polygon_roots(&q) {
            Ok(r) => r,
            Err(e) => {
                bad.push(format!("error {e}"));
                continue;
            }
        };
        let res = q.eval(root.root).coordinate_valuation();
        if !res.at_least(prec - vc) {
            bad.push(format!("residual {res} at precision {prec}, v(c) = {vc}"));
        }
        // the Hensel branch is taken exactly when b is a unit
        let hensel = root.method == RootMethod::Hensel;
        if hensel != b.is_unit() {
            bad.push(format!("method {:?} with v(b) = {}", root.method, b.valuation()));
        }
        by_method[match root.method {
            RootMethod::Hensel => 0,
            RootMethod::Discriminant => 1,
            RootMethod::ZeroConstant => 2,
        }] += 1;
        if !b.is_unit() {
            // base roots off the Hensel branch need a square discriminant
            let disc = b * b - ring.from_u128(4) * a * c;
            let square = match disc.valuation() {
                Valuation::Finite(e) => e % 2 == 0 && legendre(disc.div_p_pow(e).unwrap().reduce_mod_p(), p) == 1,
                Valuation::AtLeast(_) => true,
            };
            let base = root.field == FieldDescriptor::Base;
            if base != square {
                bad.push(format!("field {:?} with square discriminant {square}", root.field));
            }
            base_without_hensel += base as usize;
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "500 quadratics (hensel {}, discriminant {}, zero {}), {base_without_hensel} base roots with v(b) > 0, {} bad{}",
            by_method[0],
            by_method[1],
            by_method[2],
            bad.len(),
            bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- criterion 4

/// Dense matrices mod `q`, independent of the library's matrix type.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Raw {
    n: usize,
    q: u64,
    a: Vec<u64>,
}

impl Raw {
    fn id(n: usize, q: u64) -> Raw {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        Raw { n, q, a }
    }

    fn of(m: &ModMatrix) -> Raw {
        Raw { n: m.rows(), q: m.ring().modulus(), a: m.to_rows().concat() }
    }

    fn mul(&self, o: &Raw) -> Raw {
        let n = self.n;
        let mut a = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] = (a[i * n + j] + x * o.a[k * n + j]) % self.q;
                }
            }
        }
        Raw { n, q: self.q, a }
    }

    fn add(&self, o: &Raw) -> Raw {
        Raw { n: self.n, q: self.q, a: self.a.iter().zip(&o.a).map(|(x, y)| (x + y) % self.q).collect() }
    }

    fn scale(&self, s: u64) -> Raw {
        Raw { n: self.n, q: self.q, a: self.a.iter().map(|x| x * s % self.q).collect() }
    }

    fn neg(&self) -> Raw {
        self.scale(self.q - 1)
    }

    /// `1 + N + N^2 (q + 1) / 2`, valid for odd `q`.
    fn exp(&self) -> Raw {
        let half = (self.q + 1) / 2;
        Raw::id(self.n, self.q).add(self).add(&self.mul(self).scale(half))
    }
}

/// The block-strictly-upper matrix of `(log1, log0)` in realization `(a, b, c)`.
fn raw_nilpotent(a: usize, b: usize, c: usize, q: u64, log1: &[u64], log0: &[u64]) -> Raw {
    let n = a + b + c;
    let mut m = vec![0; n * n];
    for i in 0..a {
        for j in 0..b {
            m[i * n + a + j] = log1[i * b + j];
        }
        for l in 0..c {
            m[i * n + a + b + l] = log0[i * c + l];
        }
    }
    for j in 0..b {
        for l in 0..c {
            m[(a + j) * n + a + b + l] = log1[a * b + j * c + l];
        }
    }
    Raw { n, q, a: m }
}

fn c4_bch() -> Verdict {
    let mut rng = rng(404);
    let ring = ResidueRing::new(5, 6).unwrap();
    let q = ring.modulus();
    let specs = [(Family::Symplectic, 2, 1), (Family::Symplectic, 3, 2), (Family::Orthogonal, 5, 2), (Family::Orthogonal, 6, 3), (Family::UnitaryL, 5, 1)];
    let datas: Vec<_> = specs
        .iter()
        .map(|&(f, n, k)| build_parabolic(&ClassicalGroupSpec::new(f, n, k, ring).unwrap()).unwrap())
        .collect();
    let (mut mult_bad, mut trip_bad) = (0, 0);
    for i in 0..500 {
        let real = datas[i % datas.len()].realization;
        let alg = real.algebra();
        let random = |rng: &mut ChaCha8Rng| Class2Element {
            log1: (0..alg.dim1()).map(|_| rng.gen_range(0..q)).collect(),
            log0: (0..alg.dim0()).map(|_| rng.gen_range(0..q)).collect(),
        };
        let (x, y) = (random(&mut rng), random(&mut rng));
        let prod = group_multiply(&alg, &x, &y).unwrap();
        let (a, b, c) = (real.a, real.b, real.c);
        let ex = raw_nilpotent(a, b, c, q, &x.log1, &x.log0).exp();
        let ey = raw_nilpotent(a, b, c, q, &y.log1, &y.log0).exp();
        let ep = raw_nilpotent(a, b, c, q, &prod.log1, &prod.log0).exp();
        if ex.mul(&ey) != ep || Raw::of(&real.group_matrix(&prod).unwrap()) != ep {
            mult_bad += 1;
        }
        let nx = real.embed(&x.log1, &x.log0);
        let round = matrix_log(&matrix_exp(&nx).unwrap()).unwrap();
        if round != nx || real.element_of(&real.group_matrix(&x).unwrap()).unwrap() != x {
            trip_bad += 1;
        }
    }
    verdict(mult_bad == 0 && trip_bad == 0, format!("500 pairs over Z/5^6, {mult_bad} product mismatches, {trip_bad} round-trip failures"))
}

// ---------------------------------------------------------------- criterion 5

/// Gauss-Jordan inverse over a prime field.
fn raw_inverse(m: &Raw) -> Raw {
    let (n, p) = (m.n, m.q);
    let mut a = m.a.clone();
    let mut b = Raw::id(n, p).a;
    let inv = |x: u64| (1..p).find(|y| x * y % p == 1).expect("invertible");
    for c in 0..n {
        let piv = (c..n).find(|&r| a[r * n + c] != 0).expect("invertible");
        for j in 0..n {
            a.swap(c * n + j, piv * n + j);
            b.swap(c * n + j, piv * n + j);
        }
        let s = inv(a[c * n + c]);
        for j in 0..n {
            a[c * n + j] = a[c * n + j] * s % p;
            b[c * n + j] = b[c * n + j] * s % p;
        }
        for r in 0..n {
            if r != c && a[r * n + c] != 0 {
                let f = a[r * n + c];
                for j in 0..n {
                    a[r * n + j] = (a[r * n + j] + (p - f) * a[c * n + j]) % p;
                    b[r * n + j] = (b[r * n + j] + (p - f) * b[c * n + j]) % p;
                }
            }
        }
    }
    Raw { n, q: p, a: b }
}

type PairSet = BTreeSet<(Vec<u64>, Vec<u64>)>;

/// All `(x, y)` whose matrices commute, and all satisfying the intertwining form.
fn brute_force(real: &BlockRealization, f: &Raw, g: &Raw) -> (PairSet, PairSet) {
    let p = real.ring.modulus();
    let (d1, d0) = (real.dim1(), real.dim0());
    let dim = d1 + d0;
    let side = p.pow(dim as u32);
    let (fi, gi) = (raw_inverse(f), raw_inverse(g));
    let mut elems = Vec::with_capacity(side as usize);
    for mut idx in 0..side {
        let mut v = vec![0; dim];
        for slot in v.iter_mut().rev() {
            *slot = idx % p;
            idx /= p;
        }
        let n = raw_nilpotent(real.a, real.b, real.c, p, &v[..d1], &v[d1..]);
        let u = n.exp();
        let u_inv = n.neg().exp();
        let phi = u.mul(f);
        let gamma = u.mul(g);
        let tw_g = u.mul(g).mul(&u_inv).mul(&gi);
        let tw_f = u.mul(f).mul(&u_inv).mul(&fi);
        elems.push((v, phi, gamma, tw_g, tw_f));
    }
    let (mut commuting, mut intertwining) = (PairSet::new(), PairSet::new());
    for (x, phi, _, tw_g, _) in &elems {
        for (y, _, gamma, _, tw_f) in &elems {
            if phi.mul(gamma) == gamma.mul(phi) {
                commuting.insert((x.clone(), y.clone()));
            }
            if tw_g == tw_f {
                intertwining.insert((x.clone(), y.clone()));
            }
        }
    }
    (commuting, intertwining)
}

fn levi(ring: ResidueRing, blocks: &[&[&[i64]]]) -> ModMatrix {
    let mut out: Option<ModMatrix> = None;
    for b in blocks {
        let rows: Vec<Vec<i64>> = b.iter().map(|r| r.to_vec()).collect();
        let m = ModMatrix::from_rows(ring, rows.len(), &rows).unwrap();
        out = Some(match out {
            None => m,
            Some(o) => o.direct_sum(&m),
        });
    }
    out.unwrap()
}

fn c5_classification() -> Verdict {
    let f3 = ResidueRing::field(3).unwrap();
    let one: &[&[i64]] = &[&[1]];
    let two: &[&[i64]] = &[&[2]];
    let i2: &[&[i64]] = &[&[1, 0], &[0, 1]];
    let j2: &[&[i64]] = &[&[1, 1], &[0, 1]];
    let jj: &[&[i64]] = &[&[1, 2], &[0, 1]];
    let sw: &[&[i64]] = &[&[0, 1], &[1, 0]];
    let cases: Vec<(usize, usize, usize, ModMatrix, ModMatrix)> = vec![
        (1, 1, 1, levi(f3, &[one, one, one]), levi(f3, &[one, one, one])),
        (1, 1, 1, levi(f3, &[two, one, one]), levi(f3, &[one, one, one])),
        (1, 1, 1, levi(f3, &[one, two, one]), levi(f3, &[one, one, two])),
        (1, 2, 1, levi(f3, &[one, i2, one]), levi(f3, &[one, i2, one])),
        (1, 2, 1, levi(f3, &[one, j2, one]), levi(f3, &[one, jj, one])),
        (1, 2, 1, levi(f3, &[two, sw, one]), levi(f3, &[one, i2, two])),
        (2, 1, 1, levi(f3, &[sw, one, one]), levi(f3, &[i2, two, one])),
        (1, 1, 2, levi(f3, &[one, two, j2]), levi(f3, &[one, one, i2])),
    ];
    let (mut inter_ok, mut comm_ok) = (0, 0);
    let mut counts = Vec::new();
    for (a, b, c, f, g) in &cases {
        let real = BlockRealization::new(f3, *a, *b, *c);
        let pair = GradedActionPair::from_realization(&real, f, g).unwrap();
        let cls = classify_extensions(&pair, BUDGET).unwrap();
        let (d1, d0) = (real.dim1(), real.dim0());
        let classified: PairSet = cls
            .cocycles
            .iter()
            .map(|z| {
                let x = [&z.c1[..d1], &z.c0[..d0]].concat();
                let y = [&z.c1[d1..], &z.c0[d0..]].concat();
                (x, y)
            })
            .collect();
        // the oracle's matrices and the library's agree on the embedding
        let probe: Vec<u64> = (0..d1).map(|i| (i as u64 + 1) % 3).collect();
        let probe0: Vec<u64> = (0..d0).map(|i| (i as u64 + 2) % 3).collect();
        assert_eq!(Raw::of(&real.embed(&probe, &probe0)), raw_nilpotent(*a, *b, *c, 3, &probe, &probe0));
        let (commuting, intertwining) = brute_force(&real, &Raw::of(f), &Raw::of(g));
        inter_ok += (classified == intertwining) as usize;
        comm_ok += (classified == commuting) as usize;
        counts.push(format!("({a},{b},{c}) {}/{}/{}", classified.len(), commuting.len(), intertwining.len()));
    }
    let n = cases.len();
    // The intertwining form is the one the classified equations come from; it must agree everywhere.
    assert_eq!(inter_ok, n, "classification disagrees with the intertwining relation: {counts:?}");
    verdict(
        comm_ok == n,
        format!(
            "classified/commuting/intertwining {}; commutation matches {comm_ok}/{n}, intertwining matches {inter_ok}/{n}",
            counts.join(", ")
        ),
    )
}

// ---------------------------------------------------------------- criterion 6

/// `Q(x, y) = [x, Gx]/2 - [y, Fy]/2` from the structure matrices.
fn q_oracle(pair: &GradedActionPair, c: &[u64]) -> Vec<u64> {
    let r = pair.ring();
    let q = r.modulus();
    let n = pair.m1.dim();
    let (x, y) = c.split_at(n);
    let gx = pair.m1.g().mul_vec(x);
    let fy = pair.m1.f().mul_vec(y);
    let form = |b: &ModMatrix, u: &[u64], v: &[u64]| {
        let mut s = 0u64;
        for i in 0..n {
            for j in 0..n {
                s = (s + u[i] * b.get(i, j) % q * v[j]) % q;
            }
        }
        s
    };
    pair.algebra
        .structure()
        .iter()
        .map(|b| {
            let d = (form(b, x, &gx) + q - form(b, y, &fy)) % q;
            d * r.half() % q
        })
        .collect()
}

fn random_cocycle(rng: &mut ChaCha8Rng, m: &ToyPhiGammaModule) -> Vec<u64> {
    let h = field_cohomology(m, 1).unwrap();
    let r = m.ring();
    let mut v = vec![0; 2 * m.dim()];
    for z in h.cocycle_basis.iter() {
        let s = rng.gen_range(0..r.modulus());
        for (vi, zi) in v.iter_mut().zip(z) {
            *vi = r.add(*vi, r.mul(s, *zi));
        }
    }
    v
}

fn realization_pairs(rng: &mut ChaCha8Rng, ring: ResidueRing, shapes: &[(usize, usize, usize)], count: usize) -> Vec<(BlockRealization, GradedActionPair)> {
    let mut out = Vec::new();
    while out.len() < count {
        let (a, b, c) = shapes[rng.gen_range(0..shapes.len())];
        let real = BlockRealization::new(ring, a, b, c);
        // f, g: diagonal blocks with unit scalars, g a power of f times a scalar
        let units: Vec<u64> = (1..ring.modulus()).filter(|&u| ring.is_unit(u)).collect();
        let fd: Vec<u64> = (0..3).map(|_| units[rng.gen_range(0..units.len())]).collect();
        let e = rng.gen_range(0..3u64);
        let s = units[rng.gen_range(0..units.len())];
        let mut diag_f = Vec::new();
        let mut diag_g = Vec::new();
        for (blk, len) in [a, b, c].into_iter().enumerate() {
            for _ in 0..len {
                diag_f.push(fd[blk]);
                diag_g.push(ring.mul(s, ring.pow(fd[blk], e)));
            }
        }
        let f = ModMatrix::diagonal(ring, &diag_f);
        let g = ModMatrix::diagonal(ring, &diag_g);
        if let Ok(pair) = GradedActionPair::from_realization(&real, &f, &g) {
            out.push((real, pair));
        }
    }
    out
}

fn c6_cup() -> Verdict {
    let mut rng = rng(606);
    // cup(c, c) = Q(c) on arbitrary cochains
    let mut diag_bad = 0;
    for (p, shapes) in [(5u64, [(1, 1, 1), (1, 2, 1), (2, 1, 2)]), (7, [(1, 1, 2), (2, 2, 1), (1, 3, 1)])] {
        let ring = ResidueRing::field(p).unwrap();
        for (_, pair) in realization_pairs(&mut rng, ring, &shapes, 50) {
            for _ in 0..10 {
                let c: Vec<u64> = (0..2 * pair.m1.dim()).map(|_| rng.gen_range(0..p)).collect();
                let q = q_oracle(&pair, &c);
                if cup(&pair, &c, &c).unwrap() != q || q_map(&pair, &c).unwrap() != q {
                    diag_bad += 1;
                }
            }
        }
    }
    // representative independence over F_3, dim M1 <= 3, all coboundary shifts
    let f3 = ResidueRing::field(3).unwrap();
    let mut indep_bad = 0;
    let mut indep_checks = 0;
    let mut small = realization_pairs(&mut rng, f3, &[(1, 1, 1)], 12);
    small.extend(toy_pairs(&mut rng, f3, 12, 3));
    for (_, pair) in &small {
        let h1 = field_cohomology(&pair.m1, 1).unwrap();
        let h2 = field_cohomology(&pair.m0, 2).unwrap();
        let n = pair.m1.dim();
        let d0 = pair.m1.d0();
        let shifts: Vec<Vec<u64>> = (0..3u64.pow(n as u32))
            .map(|mut idx| {
                let mut v = vec![0; n];
                for s in v.iter_mut() {
                    *s = idx % 3;
                    idx /= 3;
                }
                d0.mul_vec(&v)
            })
            .collect();
        for u in &h1.representatives {
            for v in &h1.representatives {
                let base = cup(pair, u, v).unwrap();
                for bu in &shifts {
                    for bv in &shifts {
                        let u2: Vec<u64> = u.iter().zip(bu).map(|(a, b)| (a + b) % 3).collect();
                        let v2: Vec<u64> = v.iter().zip(bv).map(|(a, b)| (a + b) % 3).collect();
                        let diff: Vec<u64> = cup(pair, &u2, &v2).unwrap().iter().zip(&base).map(|(a, b)| (a + 3 - b) % 3).collect();
                        indep_checks += 1;
                        if !h2.is_coboundary(&diff) {
                            indep_bad += 1;
                        }
                    }
                }
            }
        }
    }
    // the five block identities on random summand cocycles
    let ring = ResidueRing::field(7).unwrap();
    let mut block_bad = 0;
    let pairs = realization_pairs(&mut rng, ring, &[(1, 1, 1), (1, 2, 1), (2, 1, 1), (1, 2, 2)], 50);
    for i in 0..500 {
        let (real, pair) = &pairs[i % pairs.len()];
        let dims = real.summand_dims();
        let ma = pair.m1.restrict(0, dims.0).unwrap();
        let mb = pair.m1.restrict(dims.0, dims.1).unwrap();
        let (c1, c1p) = (random_cocycle(&mut rng, &ma), random_cocycle(&mut rng, &ma));
        let (c2, c2p) = (random_cocycle(&mut rng, &mb), random_cocycle(&mut rng, &mb));
        let res = cup_block_identities(pair, dims, &c1, &c2, &c1p, &c2p).unwrap();
        if !res.iter().all(|v| is_zero_vec(v)) {
            block_bad += 1;
        }
    }
    verdict(
        diag_bad == 0 && indep_bad == 0 && block_bad == 0,
        format!("{diag_bad} diagonal mismatches in 1000; {indep_bad} of {indep_checks} shifted cups off class; {block_bad} of 500 block residuals nonzero"),
    )
}

/// Random pairs on `M1 = k^n` with `F = G^e` unipotent and `M0` trivial, bracket invariant under `F`.
fn toy_pairs(rng: &mut ChaCha8Rng, ring: ResidueRing, count: usize, max_dim: usize) -> Vec<(BlockRealization, GradedActionPair)> {
    let mut out = Vec::new();
    let dummy = BlockRealization::new(ring, 1, 1, 1);
    let p = ring.modulus();
    let mut tries = 0;
    while out.len() < count && tries < 10_000 {
        tries += 1;
        let n = rng.gen_range(2..=max_dim);
        let mut f = ModMatrix::identity(ring, n);
        for i in 0..n {
            for j in i + 1..n {
                f.set(i, j, rng.gen_range(0..p));
            }
        }
        let g = f.pow(rng.gen_range(0..3));
        // random antisymmetric forms, kept when invariant under f and g
        let forms: Vec<ModMatrix> = (0..rng.gen_range(1..=2))
            .map(|_| {
                let mut b = ModMatrix::zeros(ring, n, n);
                for i in 0..n {
                    for j in i + 1..n {
                        let v = rng.gen_range(0..p);
                        b.set(i, j, v);
                        b.set(j, i, ring.neg(v));
                    }
                }
                b
            })
            .collect();
        let m0 = ToyPhiGammaModule::trivial(ring, forms.len());
        let Ok(m1) = ToyPhiGammaModule::new(f, g) else { continue };
        let Ok(alg) = Class2Algebra::new(ring, n, forms.len(), forms) else { continue };
        if alg.is_abelian() {
            continue;
        }
        if let Ok(pair) = GradedActionPair::new(m1, m0, alg) {
            out.push((dummy, pair));
        }
    }
    out
}

// ---------------------------------------------------------------- criterion 7

/// `M1 = V + V` with the swap, `M0` trivial of dimension 1, bracket `w(a, b') - w(a', b)`
/// for a symplectic form `w` preserved by `F` and `G`.
fn swap_instance(ring: ResidueRing, f: &ModMatrix, g: &ModMatrix) -> Option<(GradedActionPair, DeltaAction)> {
    let m = f.rows();
    let mut w = ModMatrix::zeros(ring, m, m);
    for i in 0..m / 2 {
        w.set(2 * i, 2 * i + 1, 1);
        w.set(2 * i + 1, 2 * i, ring.neg(1));
    }
    let n = 2 * m;
    let mut b = ModMatrix::zeros(ring, n, n);
    for i in 0..m {
        for j in 0..m {
            b.set(i, m + j, w.get(i, j));
            b.set(m + j, i, ring.neg(w.get(i, j)));
        }
    }
    let m1 = ToyPhiGammaModule::new(f.direct_sum(f), g.direct_sum(g)).ok()?;
    let alg = Class2Algebra::new(ring, n, 1, vec![b]).ok()?;
    let pair = GradedActionPair::new(m1, ToyPhiGammaModule::trivial(ring, 1), alg).ok()?;
    let mut j1 = ModMatrix::zeros(ring, n, n);
    for i in 0..m {
        j1.set(i, m + i, 1);
        j1.set(m + i, i, 1);
    }
    let action = DeltaAction::new(j1, ModMatrix::identity(ring, 1), (m, m)).ok()?;
    Some((pair, action))
}

fn random_sl2(rng: &mut ChaCha8Rng, ring: ResidueRing) -> ModMatrix {
    let p = ring.modulus();
    loop {
        let (a, b, c) = (rng.gen_range(0..p), rng.gen_range(0..p), rng.gen_range(0..p));
        if let Some(ai) = ring.inv(a) {
            // d = (1 + b c) / a
            let d = ring.mul(ring.add(1, ring.mul(b, c)), ai);
            return ModMatrix::from_fn(ring, 2, 2, |i, j| [[a, b], [c, d]][i][j]);
        }
    }
}

fn c7_transfer() -> Verdict {
    let mut rng = rng(707);
    let (mut instances, mut agree, mut trues, mut falses, mut skipped) = (0, 0, 0, 0, 0);
    let mut oracle_bad = 0;
    for i in 0..200 {
        let p = [3u64, 5, 7][i % 3];
        let ring = ResidueRing::field(p).unwrap();
        let f = match rng.gen_range(0..4) {
            0 => ModMatrix::identity(ring, 2),
            1 => ModMatrix::from_rows(ring, 2, &[vec![1, 1], vec![0, 1]]).unwrap(),
            _ => random_sl2(&mut rng, ring),
        };
        let g = f.pow(rng.gen_range(0..4));
        let (f, g) = if rng.gen_bool(0.5) { (f, g) } else { (g, f) };
        let Some((pair, action)) = swap_instance(ring, &f, &g) else {
            skipped += 1;
            continue;
        };
        let rep = match nontriviality_transfer_check(&pair, &action) {
            Ok(r) => r,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if !rep.hypothesis {
            skipped += 1;
            continue;
        }
        instances += 1;
        agree += (rep.on_invariants == rep.overall) as usize;
        if rep.overall {
            trues += 1;
        } else {
            falses += 1;
        }
        if rep.overall == cup_pairing(&pair).unwrap().is_trivial() {
            oracle_bad += 1;
        }
    }
    verdict(
        instances >= 50 && agree == instances && trues > 0 && falses > 0 && oracle_bad == 0,
        format!("{instances} instances ({trues} nontrivial, {falses} trivial), {agree} agree, {skipped} skipped, {oracle_bad} pairing mismatches"),
    )
}

// ---------------------------------------------------------------- criterion 8

fn c8_bound() -> Verdict {
    let mut rng = rng(808);
    let ring = ResidueRing::field(5).unwrap();
    let mut bad = 0;
    let mut done = 0;
    while done < 500 {
        let n = rng.gen_range(1..=6);
        let pm = ModMatrix::from_fn(ring, n, n, |_, _| rng.gen_range(0..5));
        if pm.rank().unwrap() != n {
            continue;
        }
        let space = BilinearPairingSpace { pairing: pm.clone() };
        let kx = rng.gen_range(0..=n);
        let hx: Vec<Vec<u64>> = (0..kx).map(|_| (0..n).map(|_| rng.gen_range(0..5)).collect()).collect();
        // orthogonal complement of hx: y with x^t P y = 0 for all x in hx
        let complement = if hx.is_empty() {
            (0..n).map(|i| (0..n).map(|j| (i == j) as u64).collect()).collect()
        } else {
            let rows: Vec<Vec<i64>> = hx.iter().map(|x| pm.transpose().mul_vec(x).iter().map(|&v| v as i64).collect()).collect();
            ModMatrix::from_rows(ring, n, &rows).unwrap().kernel_basis().unwrap()
        };
        let ky = rng.gen_range(0..=complement.len());
        let hy: Vec<Vec<u64>> = (0..ky)
            .map(|_| {
                let mut y = vec![0; n];
                for c in &complement {
                    let s = rng.gen_range(0..5);
                    for (yi, ci) in y.iter_mut().zip(c) {
                        *yi = (*yi + s * ci) % 5;
                    }
                }
                y
            })
            .collect();
        done += 1;
        match orthogonal_subspace_bound(&space, &hx, &hy) {
            Ok(rep) => {
                let rank = |vs: &[Vec<u64>]| if vs.is_empty() { 0 } else { ModMatrix::from_columns(ring, n, vs).rank().unwrap() };
                let expect = n >= 2 * rank(&hx) || n >= 2 * rank(&hy);
                if !rep.holds || rep.holds != expect {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    verdict(bad == 0, format!("500 pairings over F_5, {bad} failures"))
}

// ---------------------------------------------------------------- criterion 9

/// `dim Lie U` counted by blocks: `X` free, `Y` determined by `X`, `Z` constrained.
fn block_count(family: Family, n: usize, k: usize) -> usize {
    match family {
        Family::Symplectic => k * (2 * n - 2 * k) + k * (k + 1) / 2,
        Family::Orthogonal => k * (n - 2 * k) + k * (k - 1) / 2,
        Family::UnitaryL => k * (n - 2 * k) + k * (k - 1) / 2,
    }
}

/// `(dim G - dim M_k) / 2` from the usual dimension tables.
fn formula(family: Family, n: usize, k: usize) -> usize {
    let (g, m) = match family {
        Family::Symplectic => (n * (2 * n + 1) + 1, k * k + (n - k) * (2 * (n - k) + 1) + 1),
        Family::Orthogonal => (n * (n - 1) / 2 + 1, k * k + (n - 2 * k) * (n - 2 * k).saturating_sub(1) / 2 + 1),
        Family::UnitaryL => (n * (n - 1) / 2, k * k + (n - 2 * k) * (n - 2 * k).saturating_sub(1) / 2),
    };
    (g - m) / 2
}

fn c9_atlas() -> Verdict {
    let ring = ResidueRing::field(5).unwrap();
    let mut cases = Vec::new();
    for n in 1..=4 {
        for k in 1..=n {
            cases.push((Family::Symplectic, n, k));
        }
    }
    for n in 2..=8 {
        for k in 1..=n / 2 {
            cases.push((Family::Orthogonal, n, k));
        }
    }
    let (mut bad, mut negatives_caught) = (Vec::new(), 0);
    for &(fam, n, k) in &cases {
        let data = build_parabolic(&ClassicalGroupSpec::new(fam, n, k, ring).unwrap()).unwrap();
        let rep = verify_fixed_points(&data).unwrap();
        let count = block_count(fam, n, k);
        if !rep.passes || rep.fixed_dim != count || formula(fam, n, k) != count {
            bad.push(format!("{} {n} {k}", fam.name()));
        }
        let mut broken = data.clone();
        broken.j1 = broken.j1.neg();
        let mut broken0 = data.clone();
        broken0.j0 = broken0.j0.neg();
        // negating an empty block changes nothing, so only real corruptions count
        let controls: Vec<&_> = [&broken, &broken0].into_iter().filter(|d| d.involution() != data.involution()).collect();
        let neg = !controls.is_empty() && controls.iter().all(|d| !verify_fixed_points(d).unwrap().passes);
        negatives_caught += neg as usize;
    }
    let total = cases.len();
    verdict(
        bad.is_empty() && negatives_caught == total,
        format!("{total} parabolics, {} failing, {negatives_caught} of {total} corrupted controls rejected{}", bad.len(), bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()),
    )
}

// ---------------------------------------------------------------- criterion 10

fn write_inputs() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("heislift-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let files = [
        ("system.json", r#"{"prime":5,"r":2,"s":1,"t":0,"Sigma":[[[1,0],[0,1]]],"d":[]}"#),
        ("torsion.json", r#"{"prime":3,"r":2,"s":2,"t":1,"Sigma":[[[1,0],[0,2]],[[0,1],[1,0]]],"d":[[3],[1]]}"#),
        ("module.json", r#"{"prime":5,"dim":2,"F":[[1,1],[0,1]],"G":[[1,2],[0,1]]}"#),
        (
            "pair.json",
            r#"{"prime":5,"M1":{"dim":2,"F":[[1,1],[0,1]],"G":[[1,2],[0,1]]},"M0":{"dim":1,"F":[[1]],"G":[[1]]},"bracket":[[[0,1],[-1,0]]],"hl":{"h":[[0,1,0,2]],"bar":[0,1,0,2]}}"#,
        ),
        ("real.json", r#"{"prime":3,"realization":{"a":1,"b":1,"c":1,"f":[[2,0,0],[0,1,0],[0,0,1]],"g":[[1,0,0],[0,1,0],[0,0,1]]}}"#),
    ];
    for (name, body) in files {
        std::fs::write(dir.join(name), body).unwrap();
    }
    dir
}

fn c10_determinism() -> Verdict {
    let dir = write_inputs();
    let f = |n: &str| dir.join(n).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["heis-check".into(), f("system.json")],
        vec!["heis-enumerate".into(), f("torsion.json")],
        vec!["--seed".into(), "7".into(), "heis-solve".into(), f("system.json")],
        vec!["--seed".into(), "11".into(), "heis-solve".into(), f("torsion.json")],
        vec!["coh-compute".into(), f("module.json")],
        vec!["coh-cup".into(), f("pair.json")],
        vec!["coh-classify".into(), "--oracle".into(), f("real.json")],
        vec!["atlas-dump".into(), "gsp".into(), "2".into(), "1".into()],
        vec!["atlas-verify".into(), "go".into(), "5".into(), "2".into()],
        vec!["dim-bounds".into(), "--degree".into(), "2".into(), "--a".into(), "3".into(), "--b".into(), "4".into()],
    ];
    let bin = env!("CARGO_BIN_EXE_heislift");
    let mut mismatches = Vec::new();
    for args in &runs {
        let full: Vec<String> = ["heislift", "--format", "machine"].iter().map(|s| s.to_string()).chain(args.iter().cloned()).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let ca = heislift::run(&full, &mut a);
        let cb = heislift::run(&full, &mut b);
        let p1 = Command::new(bin).args(&full[1..]).output().unwrap();
        let p2 = Command::new(bin).args(&full[1..]).output().unwrap();
        let codes = [ca, cb, p1.status.code().unwrap_or(-1), p2.status.code().unwrap_or(-1)];
        if a != b || a != p1.stdout || p1.stdout != p2.stdout || codes.iter().any(|&c| c != ca) || a.is_empty() {
            mismatches.push(args.join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(mismatches.is_empty(), format!("{} commands run 4 times each, {} differing{}", runs.len(), mismatches.len(), mismatches.first().map(|m| format!(", first: {m}")).unwrap_or_default()))
}
