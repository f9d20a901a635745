//! Fixed-precision arithmetic in `Z_p` and in one quadratic extension.
//!
//! A [`PadicScalar`] stores a residue modulo `p^k` where `k` is its known
//! precision. Operations never raise `k`. Zero modulo `p^k` is an
//! indeterminate zero; its valuation is only known to be at least `k`.

use alloc::vec::Vec;
use core::cmp::min;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Residues must stay below `2^MAX_MODULUS_BITS`.
pub const MAX_MODULUS_BITS: u32 = 120;

pub(crate) fn bit_len(m: u128) -> u32 {
    128 - m.leading_zeros()
}

/// `a * b mod m` for `a, b < m < 2^120`.
pub(crate) fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    // Horner over chunks of b, sized so neither shift nor product overflows.
    let chunk = 127 - bit_len(m);
    let mask = (1u128 << chunk) - 1;
    let mut top = bit_len(b);
    if top == 0 {
        return 0;
    }
    top = top.div_ceil(chunk) * chunk;
    let mut r = 0u128;
    while top > 0 {
        top -= chunk;
        let piece = (b >> top) & mask;
        r = ((r << chunk) % m + (a * piece) % m) % m;
    }
    r
}

fn addmod(a: u128, b: u128, m: u128) -> u128 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

fn submod(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub(crate) fn invmod(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u128)
}

fn powmod_u64(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = base as u128 % m128;
    let mut acc = 1u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'outer: for &a in &BASES {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol of a unit residue mod the odd prime `p`.
pub fn is_square_mod_p(a: u64, p: u64) -> bool {
    let a = a % p;
    a == 0 || powmod_u64(a, (p - 1) / 2, p) == 1
}

/// A square root of the nonzero square `a` modulo `p`, normalised into `[1, (p-1)/2]`.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || !is_square_mod_p(a, p) {
        return None;
    }
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let root = if p % 4 == 3 {
        powmod_u64(a, (p + 1) / 4, p)
    } else {
        // Tonelli-Shanks
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while is_square_mod_p(z, p) {
            z += 1;
        }
        let mut m = s;
        let mut c = powmod_u64(z, q, p);
        let mut t = powmod_u64(a, q, p);
        let mut r = powmod_u64(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = mul(tt, tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = mul(b, b);
            }
            m = i;
            c = mul(b, b);
            t = mul(t, c);
            r = mul(r, b);
        }
        r
    };
    Some(if root > (p - 1) / 2 { p - root } else { root })
}

/// `Z_p` truncated at absolute precision `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicRing {
    prime: u64,
    precision: u32,
}

impl PadicRing {
    pub fn new(prime: u64, precision: u32) -> Result<Self> {
        if prime <= 2 || !is_prime(prime) {
            return Err(Error::InvalidPrime(prime));
        }
        if precision == 0 {
            return Err(Error::NotAdmissible("precision must be positive"));
        }
        match (prime as u128).checked_pow(precision) {
            Some(m) if bit_len(m) <= MAX_MODULUS_BITS => Ok(PadicRing { prime, precision }),
            _ => Err(Error::PrecisionTooLarge { prime, precision }),
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^k` as an integer; `k` must not exceed the precision.
    pub fn pow_p(&self, k: u32) -> u128 {
        assert!(k <= self.precision);
        (self.prime as u128).pow(k)
    }

    pub fn modulus(&self) -> u128 {
        self.pow_p(self.precision)
    }

    fn element(&self, residue: u128, known_prec: u32) -> PadicScalar {
        let modulus = self.pow_p(known_prec);
        PadicScalar {
            ring: *self,
            known_prec,
            modulus,
            residue: residue % modulus,
        }
    }

    pub fn zero(&self) -> PadicScalar {
        self.element(0, self.precision)
    }

    pub fn one(&self) -> PadicScalar {
        self.element(1, self.precision)
    }

    pub fn from_u128(&self, v: u128) -> PadicScalar {
        self.element(v, self.precision)
    }

    pub fn from_i128(&self, v: i128) -> PadicScalar {
        let m = self.modulus() as i128;
        self.element(v.rem_euclid(m) as u128, self.precision)
    }

    pub fn from_i64(&self, v: i64) -> PadicScalar {
        self.from_i128(v as i128)
    }

    /// An element known only modulo `p^known_prec`.
    pub fn with_known_prec(&self, residue: u128, known_prec: u32) -> PadicScalar {
        self.element(residue, min(known_prec, self.precision))
    }

    /// The exact element `p^k` (an indeterminate zero once `k >= N`).
    pub fn p_power(&self, k: u32) -> PadicScalar {
        if k >= self.precision {
            self.zero()
        } else {
            self.from_u128(self.pow_p(k))
        }
    }

    /// Build from base-p digits, least significant first.
    pub fn from_digits(&self, digits: &[u64], known_prec: u32) -> Result<PadicScalar> {
        if known_prec > self.precision || digits.len() > self.precision as usize {
            return Err(Error::NotAdmissible("too many digits for the precision"));
        }
        let mut v = 0u128;
        for &d in digits.iter().rev() {
            if d >= self.prime {
                return Err(Error::NotAdmissible("digit out of range"));
            }
            v = v * self.prime as u128 + d as u128;
        }
        Ok(self.element(v, known_prec))
    }
}

/// Valuation of a fixed-precision element: exact, or a lower bound for an indeterminate zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    /// The largest integer certainly below or equal to the valuation.
    pub fn bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// True when the valuation is certainly at least `k`.
    pub fn at_least(self, k: u32) -> bool {
        self.bound() >= k
    }

    /// Valuation of a sum is at least the smaller of the two.
    pub fn min(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::AtLeast(a), Valuation::AtLeast(b)) => Valuation::AtLeast(min(a, b)),
            (Valuation::Finite(a), Valuation::AtLeast(b)) | (Valuation::AtLeast(b), Valuation::Finite(a)) => {
                if a <= b {
                    Valuation::Finite(a)
                } else {
                    Valuation::AtLeast(b)
                }
            }
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(min(a, b)),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// An element of `Z_p` known modulo `p^known_prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    ring: PadicRing,
    known_prec: u32,
    modulus: u128,
    residue: u128,
}

impl PadicScalar {
    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn prime(&self) -> u64 {
        self.ring.prime
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision
    }

    pub fn known_prec(&self) -> u32 {
        self.known_prec
    }

    /// Canonical residue in `[0, p^known_prec)`.
    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn is_indeterminate_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn valuation(&self) -> Valuation {
        if self.residue == 0 {
            return Valuation::AtLeast(self.known_prec);
        }
        let p = self.ring.prime as u128;
        let mut r = self.residue;
        let mut v = 0;
        while r.is_multiple_of(p) {
            r /= p;
            v += 1;
        }
        Valuation::Finite(v)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    /// Residue modulo p (zero if no digit is known).
    pub fn reduce_mod_p(&self) -> u64 {
        if self.known_prec == 0 {
            0
        } else {
            (self.residue % self.ring.prime as u128) as u64
        }
    }

    /// Forget digits beyond `k`.
    pub fn truncate(&self, k: u32) -> PadicScalar {
        self.ring.element(self.residue, min(k, self.known_prec))
    }

    /// Base-p digits, least significant first, `known_prec` of them.
    pub fn digits(&self) -> Vec<u64> {
        let p = self.ring.prime as u128;
        let mut r = self.residue;
        (0..self.known_prec)
            .map(|_| {
                let d = (r % p) as u64;
                r /= p;
                d
            })
            .collect()
    }

    fn check_ring(&self, other: &PadicScalar) {
        assert_eq!(self.ring, other.ring, "p-adic operands from different rings");
    }

    fn lower(&self, other: &PadicScalar) -> (u32, u128) {
        if self.known_prec <= other.known_prec {
            (self.known_prec, self.modulus)
        } else {
            (other.known_prec, other.modulus)
        }
    }

    pub fn pow(&self, mut e: u64) -> PadicScalar {
        let mut acc = self.ring.one().truncate(self.known_prec);
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse at full known precision.
    pub fn inv(&self) -> Result<PadicScalar> {
        if self.known_prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
        if !self.is_unit() {
            return Err(Error::NonUnitInverse);
        }
        let r = invmod(self.residue, self.modulus).ok_or(Error::NonUnitInverse)?;
        Ok(self.ring.element(r, self.known_prec))
    }

    /// Exact division by `p^k`; the result loses `k` digits of precision.
    pub fn div_p_pow(&self, k: u32) -> Result<PadicScalar> {
        if k == 0 {
            return Ok(*self);
        }
        if !self.valuation().at_least(k) {
            return Err(Error::NotAdmissible("division by p^k of an element not divisible by it"));
        }
        if self.known_prec <= k {
            return Err(Error::PrecisionExhausted);
        }
        let q = self.residue / self.ring.pow_p(k);
        Ok(self.ring.element(q, self.known_prec - k))
    }

    /// Valuation and unit part: `self = p^v * u`, with `u` known to `known_prec - v` digits.
    pub fn unit_part(&self) -> Result<(u32, PadicScalar)> {
        match self.valuation() {
            Valuation::Finite(v) => Ok((v, self.div_p_pow(v)?)),
            Valuation::AtLeast(_) => Err(Error::PrecisionExhausted),
        }
    }

    /// A quotient `q` with `q * divisor == self` modulo the common precision.
    ///
    /// When the divisor is not a unit the quotient is only determined up to
    /// `p^(k - v)`; this picks the representative built from canonical residues,
    /// so the product identity holds at full precision.
    pub fn exact_quotient(&self, divisor: &PadicScalar) -> Result<PadicScalar> {
        self.check_ring(divisor);
        let (k, m) = self.lower(divisor);
        let e = match divisor.truncate(k).valuation() {
            Valuation::Finite(e) => e,
            Valuation::AtLeast(_) => return Err(Error::PrecisionExhausted),
        };
        let num = self.residue % m;
        let pe = self.ring.pow_p(e);
        if !num.is_multiple_of(pe) {
            return Err(Error::NotAdmissible("quotient does not exist in Z_p"));
        }
        let unit = (divisor.residue % m) / pe;
        let inv = invmod(unit, m).ok_or(Error::NonUnitInverse)?;
        Ok(self.ring.element(mulmod(num / pe, inv, m), k))
    }

    /// Square root chosen by the digit tie-break, at the honest precision `k - v/2`.
    pub fn hensel_sqrt(&self) -> Result<PadicScalar> {
        match self.valuation() {
            Valuation::AtLeast(k) => Ok(self.ring.element(0, k.div_ceil(2))),
            Valuation::Finite(v) => {
                let s = self.sqrt_representative()?;
                Ok(s.truncate(self.known_prec - v / 2))
            }
        }
    }

    /// Square root `s` with `s^2 == self` at full known precision.
    pub(crate) fn sqrt_representative(&self) -> Result<PadicScalar> {
        let v = match self.valuation() {
            Valuation::Finite(v) => v,
            Valuation::AtLeast(k) => return Ok(self.ring.element(0, k)),
        };
        if v % 2 == 1 {
            return Err(Error::OddValuation);
        }
        let p = self.ring.prime;
        let depth = self.known_prec - v;
        let m = self.ring.pow_p(depth);
        let unit = self.residue / self.ring.pow_p(v);
        let t0 = sqrt_mod_p((unit % p as u128) as u64, p).ok_or(Error::NonResidue)?;
        let mut t = t0 as u128 % m;
        let mut correct = 1u32;
        while correct < depth {
            // t <- t - (t^2 - u) / (2t)
            let f = submod(mulmod(t, t, m), unit % m, m);
            let inv = invmod(mulmod(2, t, m), m).ok_or(Error::NonResidue)?;
            t = submod(t, mulmod(f, inv, m), m);
            correct *= 2;
        }
        let s = mulmod(self.ring.pow_p(v / 2), t, self.modulus);
        Ok(self.ring.element(s, self.known_prec))
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.residue, self.ring.prime, self.known_prec)
    }
}

impl Add for PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: PadicScalar) -> PadicScalar {
        self.check_ring(&rhs);
        let (k, m) = self.lower(&rhs);
        self.ring.element(addmod(self.residue % m, rhs.residue % m, m), k)
    }
}

impl Sub for PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: PadicScalar) -> PadicScalar {
        self.check_ring(&rhs);
        let (k, m) = self.lower(&rhs);
        self.ring.element(submod(self.residue % m, rhs.residue % m, m), k)
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: PadicScalar) -> PadicScalar {
        self.check_ring(&rhs);
        let (k, m) = self.lower(&rhs);
        self.ring.element(mulmod(self.residue % m, rhs.residue % m, m), k)
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        self.ring.element(submod(0, self.residue, self.modulus), self.known_prec)
    }
}

/// Monic minimal polynomial `T^2 + bT + c` of the generator `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MinPoly {
    pub b: PadicScalar,
    pub c: PadicScalar,
}

impl MinPoly {
    pub fn discriminant(&self) -> PadicScalar {
        let four = self.b.ring().from_u128(4);
        self.b * self.b - four * self.c
    }
}

/// `a0 + a1 * theta` in `Z_p[theta] / (theta^2 + b theta + c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExtScalar {
    pub a0: PadicScalar,
    pub a1: PadicScalar,
    pub minpoly: MinPoly,
}

impl QuadExtScalar {
    pub fn new(a0: PadicScalar, a1: PadicScalar, minpoly: MinPoly) -> Self {
        QuadExtScalar { a0, a1, minpoly }
    }

    pub fn from_base(a: PadicScalar, minpoly: MinPoly) -> Self {
        QuadExtScalar { a0: a, a1: a.ring().zero(), minpoly }
    }

    pub fn theta(minpoly: MinPoly) -> Self {
        let ring = minpoly.b.ring();
        QuadExtScalar { a0: ring.zero(), a1: ring.one(), minpoly }
    }

    pub fn ring(&self) -> PadicRing {
        self.a0.ring()
    }

    pub fn known_prec(&self) -> u32 {
        min(self.a0.known_prec(), self.a1.known_prec())
    }

    fn check_minpoly(&self, other: &QuadExtScalar) {
        assert_eq!(self.minpoly, other.minpoly, "extension operands with different minimal polynomials");
    }

    /// The other root substituted for theta: `a0 + a1 * (-b - theta)`.
    pub fn conj(&self) -> QuadExtScalar {
        QuadExtScalar { a0: self.a0 - self.a1 * self.minpoly.b, a1: -self.a1, minpoly: self.minpoly }
    }

    /// `a0^2 - b a0 a1 + c a1^2`.
    pub fn norm(&self) -> PadicScalar {
        let (a0, a1, b, c) = (self.a0, self.a1, self.minpoly.b, self.minpoly.c);
        a0 * a0 - b * a0 * a1 + c * a1 * a1
    }

    /// Valuation counted in units of 1/2.
    pub fn valuation_halves(&self) -> Valuation {
        self.norm().valuation()
    }

    /// Smallest coordinate valuation: `self` lies in `p^v Z_p[theta]`.
    pub fn coordinate_valuation(&self) -> Valuation {
        self.a0.valuation().min(self.a1.valuation())
    }

    pub fn inv(&self) -> Result<QuadExtScalar> {
        let n_inv = self.norm().inv()?;
        let c = self.conj();
        Ok(QuadExtScalar { a0: c.a0 * n_inv, a1: c.a1 * n_inv, minpoly: self.minpoly })
    }

    pub fn scale(&self, s: PadicScalar) -> QuadExtScalar {
        QuadExtScalar { a0: self.a0 * s, a1: self.a1 * s, minpoly: self.minpoly }
    }
}

impl Add for QuadExtScalar {
    type Output = QuadExtScalar;
    fn add(self, rhs: QuadExtScalar) -> QuadExtScalar {
        self.check_minpoly(&rhs);
        QuadExtScalar { a0: self.a0 + rhs.a0, a1: self.a1 + rhs.a1, minpoly: self.minpoly }
    }
}

impl Sub for QuadExtScalar {
    type Output = QuadExtScalar;
    fn sub(self, rhs: QuadExtScalar) -> QuadExtScalar {
        self.check_minpoly(&rhs);
        QuadExtScalar { a0: self.a0 - rhs.a0, a1: self.a1 - rhs.a1, minpoly: self.minpoly }
    }
}

impl Neg for QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        QuadExtScalar { a0: -self.a0, a1: -self.a1, minpoly: self.minpoly }
    }
}

impl Mul for QuadExtScalar {
    type Output = QuadExtScalar;
    fn mul(self, rhs: QuadExtScalar) -> QuadExtScalar {
        self.check_minpoly(&rhs);
        // theta^2 = -b theta - c
        let hi = self.a1 * rhs.a1;
        let a0 = self.a0 * rhs.a0 - hi * self.minpoly.c;
        let a1 = self.a0 * rhs.a1 + self.a1 * rhs.a0 - hi * self.minpoly.b;
        QuadExtScalar { a0, a1, minpoly: self.minpoly }
    }
}

/// A scalar of the lifting problem: base ring or the single extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Base(PadicScalar),
    Ext(QuadExtScalar),
}

impl Scalar {
    pub fn ring(&self) -> PadicRing {
        match self {
            Scalar::Base(a) => a.ring(),
            Scalar::Ext(a) => a.ring(),
        }
    }

    pub fn known_prec(&self) -> u32 {
        match self {
            Scalar::Base(a) => a.known_prec(),
            Scalar::Ext(a) => a.known_prec(),
        }
    }

    /// Valuation in units of 1/2 (twice the base valuation for base elements).
    pub fn valuation_halves(&self) -> Valuation {
        match self {
            Scalar::Base(a) => match a.valuation() {
                Valuation::Finite(v) => Valuation::Finite(2 * v),
                Valuation::AtLeast(v) => Valuation::AtLeast(2 * v),
            },
            Scalar::Ext(a) => a.valuation_halves(),
        }
    }

    pub fn coordinate_valuation(&self) -> Valuation {
        match self {
            Scalar::Base(a) => a.valuation(),
            Scalar::Ext(a) => a.coordinate_valuation(),
        }
    }

    pub fn minpoly(&self) -> Option<MinPoly> {
        match self {
            Scalar::Base(_) => None,
            Scalar::Ext(a) => Some(a.minpoly),
        }
    }

    pub fn as_base(&self) -> Option<PadicScalar> {
        match self {
            Scalar::Base(a) => Some(*a),
            Scalar::Ext(_) => None,
        }
    }

    pub fn promote(&self, minpoly: MinPoly) -> QuadExtScalar {
        match self {
            Scalar::Base(a) => QuadExtScalar::from_base(*a, minpoly),
            Scalar::Ext(a) => *a,
        }
    }

    fn zip(self, rhs: Scalar, base: fn(PadicScalar, PadicScalar) -> PadicScalar, ext: fn(QuadExtScalar, QuadExtScalar) -> QuadExtScalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Base(a), Scalar::Base(b)) => Scalar::Base(base(a, b)),
            (Scalar::Ext(a), b) => Scalar::Ext(ext(a, b.promote(a.minpoly))),
            (a, Scalar::Ext(b)) => Scalar::Ext(ext(a.promote(b.minpoly), b)),
        }
    }
}

impl From<PadicScalar> for Scalar {
    fn from(a: PadicScalar) -> Scalar {
        Scalar::Base(a)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.zip(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.zip(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.zip(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Base(a) => Scalar::Base(-a),
            Scalar::Ext(a) => Scalar::Ext(-a),
        }
    }
}

/// `a lambda^2 + b lambda + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticPolynomial {
    pub a: PadicScalar,
    pub b: PadicScalar,
    pub c: PadicScalar,
}

impl QuadraticPolynomial {
    pub fn new(a: PadicScalar, b: PadicScalar, c: PadicScalar) -> Self {
        QuadraticPolynomial { a, b, c }
    }

    pub fn eval(&self, x: Scalar) -> Scalar {
        let (a, b, c) = (Scalar::Base(self.a), Scalar::Base(self.b), Scalar::Base(self.c));
        (a * x + b) * x + c
    }

    pub fn discriminant(&self) -> PadicScalar {
        let four = self.a.ring().from_u128(4);
        self.b * self.b - four * self.a * self.c
    }
}

/// Where the root of positive valuation lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Base,
    Ramified,
    Unramified,
}

impl FieldDescriptor {
    pub fn name(self) -> &'static str {
        match self {
            FieldDescriptor::Base => "base",
            FieldDescriptor::Ramified => "ramified",
            FieldDescriptor::Unramified => "unramified",
        }
    }
}

/// Which branch of the Newton-polygon case split produced the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootMethod {
    /// `c` is an indeterminate zero; the root is 0.
    ZeroConstant,
    /// `v(b) = 0`: two distinct slopes, Hensel refinement from `-c/b`.
    Hensel,
    /// `v(b) > 0`: both roots share a valuation; solved by the discriminant.
    Discriminant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolygonRoot {
    pub root: Scalar,
    pub field: FieldDescriptor,
    pub method: RootMethod,
}

/// A root of positive valuation of an admissible quadratic.
pub fn newton_polygon_roots(q: &QuadraticPolynomial) -> Result<PolygonRoot> {
    let QuadraticPolynomial { a, b, c } = *q;
    if a.known_prec() == 0 || b.known_prec() == 0 || c.known_prec() == 0 {
        return Err(Error::PrecisionExhausted);
    }
    if !a.is_unit() {
        return Err(Error::NotAdmissible("leading coefficient must be a unit"));
    }
    let ring = a.ring();
    let cv = c.valuation();
    if cv == Valuation::Finite(0) {
        return Err(Error::NotAdmissible("constant term must have positive valuation"));
    }
    if c.is_indeterminate_zero() {
        return Ok(PolygonRoot {
            root: Scalar::Base(ring.zero().truncate(c.known_prec())),
            field: FieldDescriptor::Base,
            method: RootMethod::ZeroConstant,
        });
    }
    if b.is_unit() {
        let mut lambda = -(c * b.inv()?);
        let two_a = a + a;
        for _ in 0..8 {
            let f = (a * lambda + b) * lambda + c;
            if f.is_indeterminate_zero() {
                break;
            }
            let df = two_a * lambda + b;
            lambda = lambda - f * df.inv()?;
        }
        return Ok(PolygonRoot { root: Scalar::Base(lambda), field: FieldDescriptor::Base, method: RootMethod::Hensel });
    }
    let disc = q.discriminant();
    let inv_two_a = (a + a).inv()?;
    let base_root = |s: PadicScalar| PolygonRoot {
        root: Scalar::Base((s - b) * inv_two_a),
        field: FieldDescriptor::Base,
        method: RootMethod::Discriminant,
    };
    let field = match disc.valuation() {
        Valuation::AtLeast(_) => return Ok(base_root(ring.zero())),
        Valuation::Finite(e) if e % 2 == 1 => FieldDescriptor::Ramified,
        Valuation::Finite(e) => {
            let unit = disc.div_p_pow(e)?;
            if is_square_mod_p(unit.reduce_mod_p(), ring.prime()) {
                return Ok(base_root(disc.sqrt_representative()?));
            }
            FieldDescriptor::Unramified
        }
    };
    let a_inv = a.inv()?;
    let minpoly = MinPoly { b: b * a_inv, c: c * a_inv };
    Ok(PolygonRoot { root: Scalar::Ext(QuadExtScalar::theta(minpoly)), field, method: RootMethod::Discriminant })
}
