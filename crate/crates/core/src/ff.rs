//! Exact arithmetic in F_q, q = p^r odd.
//!
//! Elements are [`Felt`] indices in `[0, q)`. For `r > 1` the index is read
//! as the base-p digits `(c_0, ..., c_{r-1})` of `sum c_i * alpha^i`, where
//! `alpha` is a root of the field's modulus polynomial. The modulus is the
//! monic irreducible of degree `r` whose coefficient vector, read as a
//! base-p integer with `c_0` least significant, is smallest.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldDesc::new`].
pub const DEFAULT_SIZE_CAP: u64 = 1 << 20;

/// A field element, encoded as its index in `[0, q)`.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Felt(u32);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Inner {
    p: u32,
    r: u32,
    q: u32,
    /// Full monic modulus, low degree first; empty for prime fields.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a primitive element `g`; only built when `r > 1`.
    exp: Vec<u32>,
    log: Vec<u32>,
    inv: Vec<u32>,
}

/// Description of F_q. Immutable and cheap to clone.
#[derive(Clone)]
pub struct FieldDesc(Arc<Inner>);

impl FieldDesc {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        Self::with_cap(p, r, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(p: u64, r: u32, cap: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
        }
        if p == 2 {
            return Err(Error::CharacteristicTwo);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let size = (p as u128).checked_pow(r).unwrap_or(u128::MAX);
        if size > cap as u128 || size > u32::MAX as u128 {
            return Err(Error::SizeExceeded { size, cap });
        }
        let (p, q) = (p as u32, size as u32);

        let mut inner = Inner {
            p,
            r,
            q,
            modulus: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
            inv: Vec::new(),
        };
        if r > 1 {
            inner.modulus = least_irreducible(p, r as usize);
            build_log_tables(&mut inner);
        }
        build_inverse_table(&mut inner);
        Ok(FieldDesc(Arc::new(inner)))
    }

    /// Field of order `q`, for odd prime powers `q`.
    pub fn from_order(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
        }
        let p = smallest_prime_factor(q);
        let mut r = 0u32;
        let mut rest = q;
        while rest.is_multiple_of(p) {
            rest /= p;
            r += 1;
        }
        if rest != 1 {
            return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
        }
        Self::new(p, r)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.0.r
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Monic modulus coefficients `(c_0, ..., c_r)`, or `None` for a prime field.
    pub fn modulus(&self) -> Option<&[u32]> {
        if self.0.r > 1 {
            Some(&self.0.modulus)
        } else {
            None
        }
    }

    /// The `p^r` form accepted by [`FromStr`].
    pub fn spec(&self) -> String {
        format!("{}^{}", self.0.p, self.0.r)
    }

    pub fn elem(&self, index: u64) -> Result<Felt> {
        if index < self.0.q as u64 {
            Ok(Felt(index as u32))
        } else {
            Err(Error::ElementOutOfRange { index, q: self.0.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, n: i64) -> Felt {
        Felt(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn zero(&self) -> Felt {
        Felt::ZERO
    }

    pub fn one(&self) -> Felt {
        Felt::ONE
    }

    pub fn minus_one(&self) -> Felt {
        Felt(self.0.p - 1)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> {
        (0..self.0.q).map(Felt)
    }

    /// `q mod 4`, which is 1 or 3.
    pub fn q_mod4(&self) -> u32 {
        self.0.q % 4
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        let p = self.0.p;
        if self.0.r == 1 {
            let s = a.0 + b.0;
            return Felt(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.0.r {
            let s = (x % p + y % p) % p;
            out += s * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        Felt(out)
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        let p = self.0.p;
        if self.0.r == 1 {
            return Felt(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.0.r {
            let d = x % p;
            out += ((p - d) % p) * place;
            place = place.wrapping_mul(p);
            x /= p;
        }
        Felt(out)
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        if self.0.r == 1 {
            let p = self.0.p;
            return Felt(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 });
        }
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if self.0.r == 1 {
            return Felt(((a.0 as u64 * b.0 as u64) % self.0.p as u64) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return Felt::ZERO;
        }
        let order = self.0.q - 1;
        let mut e = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        if e >= order {
            e -= order;
        }
        Felt(self.0.exp[e as usize])
    }

    #[inline]
    pub fn square(&self, a: Felt) -> Felt {
        self.mul(a, a)
    }

    #[inline]
    pub fn inv(&self, a: Felt) -> Result<Felt> {
        if a.0 == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(Felt(self.0.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Felt, mut e: u64) -> Felt {
        let mut base = a;
        let mut acc = Felt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Euler criterion; zero counts as a square.
    pub fn is_square(&self, a: Felt) -> bool {
        a.is_zero() || self.pow(a, (self.0.q as u64 - 1) / 2) == Felt::ONE
    }

    /// The square root with the smaller index.
    pub fn sqrt(&self, a: Felt) -> Result<Felt> {
        if !self.is_square(a) {
            return Err(Error::NotASquare(a.0));
        }
        self.elements()
            .find(|&t| self.square(t) == a)
            .ok_or_else(|| Error::Internal(format!("Euler criterion accepted {a} but no root found")))
    }

    /// Base-p digits of `a`, least significant first.
    pub fn digits(&self, a: Felt) -> Vec<u32> {
        to_digits(a.0, self.0.p, self.0.r as usize)
    }

    /// Multiplication by polynomial reduction modulo the modulus.
    ///
    /// Reference path for the table-driven [`FieldDesc::mul`].
    pub fn mul_by_reduction(&self, a: Felt, b: Felt) -> Felt {
        if self.0.r == 1 {
            return self.mul(a, b);
        }
        Felt(poly_mulmod(a.0, b.0, self.0.p, &self.0.modulus))
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.r == other.0.r
    }
}

impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modulus() {
            Some(m) => write!(f, "FieldDesc({}, modulus {:?})", self.spec(), m),
            None => write!(f, "FieldDesc({})", self.spec()),
        }
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl FromStr for FieldDesc {
    type Err = Error;

    /// Accepts `"p^r"`, or a bare prime `"p"` meaning `p^1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("field must look like p^r, got {s:?}"));
        let s = s.trim();
        let (p, r) = match s.split_once('^') {
            Some((p, r)) => (p.trim(), r.trim()),
            None => (s, "1"),
        };
        let p: u64 = p.parse().map_err(|_| bad())?;
        let r: u32 = r.parse().map_err(|_| bad())?;
        FieldDesc::new(p, r)
    }
}

impl Serialize for FieldDesc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return k;
        }
        k += 1;
    }
    n
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            out.push(k);
            while n.is_multiple_of(k) {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn to_digits(mut x: u32, p: u32, r: usize) -> Vec<u32> {
    let mut out = vec![0; r];
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` by the monic polynomial `m` (low degree first), mod `p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut rem: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    while rem.len() > dm {
        let lead = rem.pop().unwrap() % p64;
        let shift = rem.len() - dm;
        if lead != 0 {
            for (j, &mj) in m[..dm].iter().enumerate() {
                let sub = lead * mj as u64 % p64;
                rem[shift + j] = (rem[shift + j] + p64 - sub) % p64;
            }
        }
    }
    rem.into_iter().map(|c| (c % p64) as u32).collect()
}

fn poly_mulmod(a: u32, b: u32, p: u32, modulus: &[u32]) -> u32 {
    let r = modulus.len() - 1;
    let (da, db) = (to_digits(a, p, r), to_digits(b, p, r));
    let mut prod = vec![0u64; 2 * r - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    let mut rem = poly_rem(&prod, modulus, p);
    rem.resize(r, 0);
    from_digits(&rem, p)
}

/// True if the monic `m` has no monic factor of degree `1..=deg/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for fd in 1..=deg / 2 {
        let count = (p as u64).pow(fd as u32);
        for low in 0..count {
            let mut f = to_digits(low as u32, p, fd);
            f.push(1);
            if poly_rem(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u32, r: usize) -> Vec<u32> {
    let count = (p as u64).pow(r as u32);
    for low in 0..count {
        let mut m = to_digits(low as u32, p, r);
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn build_log_tables(inner: &mut Inner) {
    let (p, q) = (inner.p, inner.q);
    let order = (q - 1) as u64;
    let factors = distinct_prime_factors(order);
    let pow = |mut base: u32, mut e: u64| {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(acc, base, p, &inner.modulus);
            }
            base = poly_mulmod(base, base, p, &inner.modulus);
            e >>= 1;
        }
        acc
    };
    let g = (2..q)
        .find(|&g| factors.iter().all(|&l| pow(g, order / l) != 1))
        .expect("the multiplicative group is cyclic");

    let mut exp = Vec::with_capacity(q as usize - 1);
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..q - 1 {
        exp.push(x);
        log[x as usize] = i;
        x = poly_mulmod(x, g, p, &inner.modulus);
    }
    inner.exp = exp;
    inner.log = log;
}

fn build_inverse_table(inner: &mut Inner) {
    let q = inner.q as usize;
    let mut inv = vec![0u32; q];
    if inner.r == 1 {
        let p = inner.p as u64;
        inv[1] = 1;
        for i in 2..q {
            let i64_ = i as u64;
            inv[i] = ((p - p / i64_) * inv[(p % i64_) as usize] as u64 % p) as u32;
        }
    } else {
        let order = inner.q - 1;
        for (slot, &l) in inv.iter_mut().zip(&inner.log).skip(1) {
            *slot = inner.exp[((order - l) % order) as usize];
        }
    }
    inner.inv = inv;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, r: u32) -> FieldDesc {
        FieldDesc::new(p, r).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldDesc::new(2, 3).unwrap_err(), Error::CharacteristicTwo);
        assert_eq!(FieldDesc::new(9, 1).unwrap_err(), Error::NotPrime(9));
        assert_eq!(FieldDesc::new(1, 1).unwrap_err(), Error::NotPrime(1));
        assert!(matches!(FieldDesc::new(3, 13), Err(Error::SizeExceeded { .. })));
        assert!(matches!(FieldDesc::with_cap(5, 2, 24), Err(Error::SizeExceeded { .. })));
        assert!(FieldDesc::new(3, 0).is_err());
    }

    #[test]
    fn prime_field_has_no_modulus() {
        let f5 = f(5, 1);
        assert_eq!(f5.q(), 5);
        assert!(f5.modulus().is_none());
    }

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        // Oracle: scan monic degree-2 polynomials over F_3 by root search.
        let first = (0..9u32)
            .map(|low| (low % 3, low / 3))
            .find(|&(c0, c1)| (0..3u32).all(|x| (x * x + c1 * x + c0) % 3 != 0))
            .unwrap();
        assert_eq!(first, (1, 0));
        assert_eq!(f(3, 2).modulus(), Some(&[1u32, 0, 1][..]));
    }

    #[test]
    fn small_examples() {
        let f5 = f(5, 1);
        let e = |i| f5.elem(i).unwrap();
        assert_eq!(f5.add(e(3), e(4)), e(2));
        assert_eq!(f5.mul(e(2), e(3)), e(1));
        assert_eq!(f5.inv(e(2)).unwrap(), e(3));
        assert_eq!(f5.div(e(1), e(0)).unwrap_err(), Error::DivisionByZero);

        let f9 = f(3, 2);
        let alpha = f9.elem(3).unwrap();
        assert_eq!(f9.mul(alpha, alpha), f9.elem(2).unwrap());
        assert_eq!(f9.minus_one(), f9.elem(2).unwrap());
    }

    #[test]
    fn squares_and_roots() {
        let f5 = f(5, 1);
        assert!(f5.is_square(Felt(4)));
        assert!(!f5.is_square(Felt(2)));
        assert_eq!(f5.sqrt(Felt(4)).unwrap(), Felt(2));
        assert_eq!(f5.sqrt(Felt(0)).unwrap(), Felt(0));
        assert_eq!(f(7, 1).sqrt(Felt(6)).unwrap_err(), Error::NotASquare(6));
        let f9 = f(3, 2);
        assert!(f9.is_square(f9.minus_one()));
        let i = f9.sqrt(f9.minus_one()).unwrap();
        assert_eq!(f9.square(i), f9.minus_one());
    }

    #[test]
    fn table_mul_matches_reduction() {
        for (p, r) in [(3, 2), (3, 3), (5, 2), (7, 2), (3, 4)] {
            let fd = f(p, r);
            for a in fd.elements() {
                for b in fd.elements() {
                    assert_eq!(fd.mul(a, b), fd.mul_by_reduction(a, b), "{p}^{r}: {a}*{b}");
                }
            }
        }
    }

    #[test]
    fn parse_spec_string() {
        let fd: FieldDesc = "3^2".parse().unwrap();
        assert_eq!(fd.q(), 9);
        assert_eq!("5".parse::<FieldDesc>().unwrap().q(), 5);
        assert!("x^2".parse::<FieldDesc>().is_err());
        assert_eq!("2^1".parse::<FieldDesc>().unwrap_err(), Error::CharacteristicTwo);
        assert_eq!(FieldDesc::from_order(27).unwrap().spec(), "3^3");
        assert!(FieldDesc::from_order(15).is_err());
    }
}
