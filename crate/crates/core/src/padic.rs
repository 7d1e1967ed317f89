//! Truncated p-adic integers `Z/p^a` and p-adic valuations of rationals.
//!
//! A [`PadicScalar`] is a residue class modulo `p^a`, stored by its canonical
//! representative in `[0, p^a)`. Mixed-precision arithmetic reduces to the
//! smaller precision, which is the transition map of the projective system
//! `Z/p^a -> Z/p^(a-1)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus `p^a` accepted; keeps products inside `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("p^a = {p}^{a} exceeds the supported modulus")]
    ModulusTooLarge { p: u64, a: u32 },
    #[error("element {value} mod {p}^{a} is not a unit")]
    NonUnit { value: u64, p: u64, a: u32 },
    #[error("rational {0} is not p-integral")]
    NotIntegral(String),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("endomorphism changed precision from {expected} to {got}")]
    PrecisionMismatch { expected: u32, got: u32 },
}

pub type Result<T> = std::result::Result<T, PadicError>;

/// Deterministic primality test for the small primes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `p^a`, checked against [`MAX_MODULUS`].
pub fn modulus(p: u64, a: u32) -> Result<u64> {
    let mut m: u64 = 1;
    for _ in 0..a {
        m = m
            .checked_mul(p)
            .filter(|m| *m <= MAX_MODULUS)
            .ok_or(PadicError::ModulusTooLarge { p, a })?;
    }
    Ok(m)
}

/// p-adic valuation of a rational number; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `v >= bound`, with the infinite valuation above every bound.
    pub fn at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)`; negative when `p` divides the reduced denominator.
pub fn val_p(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// `d(x) = max(0, -v_p(x))`, the `p`-power of the denominator of an exponent.
pub fn denominator_exponent(x: &BigRational, p: u64) -> u32 {
    match val_p(x, p) {
        Valuation::Finite(v) if v < 0 => (-v) as u32,
        _ => 0,
    }
}

/// Valuation of a residue class; the zero class only knows `v >= a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarValuation {
    Exact(u32),
    AtLeast(u32),
}

/// A residue class in `Z/p^a`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicScalar {
    p: u64,
    precision: u32,
    value: u64,
}

impl PadicScalar {
    pub fn new(p: u64, precision: u32, value: i128) -> Result<Self> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        let m = modulus(p, precision)? as i128;
        Ok(Self {
            p,
            precision,
            value: value.rem_euclid(m) as u64,
        })
    }

    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 0)
    }

    pub fn one(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 1)
    }

    /// Image of a p-integral rational in `Z/p^a`.
    pub fn from_rational(x: &BigRational, p: u64, precision: u32) -> Result<Self> {
        if !val_p(x, p).at_least(0) {
            return Err(PadicError::NotIntegral(x.to_string()));
        }
        let m = BigInt::from(modulus(p, precision)?);
        let num = x.numer().mod_floor(&m).to_i128().expect("reduced below modulus");
        let den = x.denom().mod_floor(&m).to_i128().expect("reduced below modulus");
        let den = Self::new(p, precision, den)?.invert_unit()?;
        Ok(Self::new(p, precision, num)? * den)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Canonical representative in `[0, p^a)`.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        modulus(self.p, self.precision).expect("validated at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.value))
    }

    pub fn valuation(&self) -> ScalarValuation {
        if self.value == 0 {
            return ScalarValuation::AtLeast(self.precision);
        }
        let mut v = 0;
        let mut x = self.value;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        ScalarValuation::Exact(v)
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.p != 0
    }

    /// Reduction to a smaller precision.
    pub fn reduce_to(&self, precision: u32) -> Self {
        let precision = precision.clamp(1, self.precision);
        let m = modulus(self.p, precision).expect("smaller than existing modulus");
        Self {
            p: self.p,
            precision,
            value: self.value % m,
        }
    }

    /// Multiplicative inverse of a unit, via the extended Euclidean algorithm.
    pub fn invert_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(PadicError::NonUnit {
                value: self.value,
                p: self.p,
                a: self.precision,
            });
        }
        let m = self.modulus() as i128;
        let (mut r0, mut r1) = (m, self.value as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Self {
            value: s0.rem_euclid(m) as u64,
            ..*self
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let m = self.modulus() as u128;
        let mut base = self.value as u128;
        let mut acc: u128 = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Self {
            value: acc as u64,
            ..*self
        }
    }

    /// Teichmuller representative of the residue of `self` mod `p`: iterate
    /// `x -> x^p` starting from the residue; `a - 1` steps reach the fixed point.
    pub fn teichmuller(&self) -> Self {
        let mut x = Self {
            value: self.value % self.p,
            ..*self
        };
        for _ in 1..self.precision {
            x = x.pow(self.p);
        }
        x
    }

    fn combine(self, rhs: Self, f: impl Fn(u128, u128, u128) -> u128) -> Self {
        assert_eq!(self.p, rhs.p, "p-adic scalars over different primes");
        let precision = self.precision.min(rhs.precision);
        let a = self.reduce_to(precision);
        let b = rhs.reduce_to(precision);
        let m = a.modulus() as u128;
        Self {
            p: self.p,
            precision,
            value: f(a.value as u128, b.value as u128, m) as u64,
        }
    }

    /// `p * self`, which loses the top digit.
    pub fn times_p(&self) -> Self {
        let m = self.modulus() as u128;
        Self {
            value: ((self.value as u128 * self.p as u128) % m) as u64,
            ..*self
        }
    }
}

impl Add for PadicScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b, m| (a + b) % m)
    }
}

impl Sub for PadicScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b, m| (a + m - b) % m)
    }
}

impl Mul for PadicScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b, m| a * b % m)
    }
}

impl Neg for PadicScalar {
    type Output = Self;
    fn neg(self) -> Self {
        let m = self.modulus();
        Self {
            value: (m - self.value) % m,
            ..self
        }
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.p, self.precision)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Truncation of `(1 - pF)^{-1} x = sum_{i<a} p^i F^i(x)` modulo `p^a`.
///
/// The remaining terms `p^i F^i(x)` with `i >= a` vanish modulo `p^a`.
pub fn geometric_resolvent<F>(apply_f: F, x: PadicScalar) -> Result<PadicScalar>
where
    F: Fn(&PadicScalar) -> PadicScalar,
{
    let a = x.precision();
    let mut acc = PadicScalar::zero(x.prime(), a)?;
    let mut term = x;
    for i in 0..a {
        acc = acc + term;
        if i + 1 == a {
            break;
        }
        let next = apply_f(&term);
        if next.precision() != a {
            return Err(PadicError::PrecisionMismatch {
                expected: a,
                got: next.precision(),
            });
        }
        if next.prime() != x.prime() {
            return Err(PadicError::PrimeMismatch(x.prime(), next.prime()));
        }
        term = next.times_p();
    }
    Ok(acc)
}

/// Canonical residue in `[0, p^k)` of a p-integral rational, as a rational.
pub(crate) fn residue_rational(x: &BigRational, p: u64, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Ok(BigRational::zero());
    }
    Ok(PadicScalar::from_rational(x, p, k)?.to_rational())
}

pub(crate) fn p_power(p: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base, (-e) as usize).recip()
    }
}

/// `true` when `x` lies in `Z_(p)`.
pub fn is_p_integral(x: &BigRational, p: u64) -> bool {
    val_p(x, p).at_least(0)
}

/// Unit part `x / p^{v_p(x)}`; `None` for zero.
pub fn unit_part(x: &BigRational, p: u64) -> Option<BigRational> {
    let v = val_p(x, p).finite()?;
    Some(x * p_power(p, -v))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    // extended-Euclid oracle, independent of the implementation's loop
    fn brute_inverse(x: u64, m: u64) -> u64 {
        (1..m).find(|y| (x * y) % m == 1).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(val_p(&q(50, 1), 5), Valuation::Finite(2));
        assert_eq!(val_p(&q(1, 1), 7), Valuation::Finite(0));
        assert_eq!(val_p(&q(3, 4), 2), Valuation::Finite(-2));
        assert_eq!(val_p(&q(0, 1), 3), Valuation::Infinite);
        assert_eq!(denominator_exponent(&q(7, 9), 3), 2);
        assert_eq!(denominator_exponent(&q(9, 2), 3), 0);
    }

    #[test]
    fn inverses() {
        let x = PadicScalar::new(5, 2, 2).unwrap();
        assert_eq!(x.invert_unit().unwrap().value(), 13);
        assert_eq!(brute_inverse(2, 25), 13);
        let one = PadicScalar::one(7, 3).unwrap();
        assert_eq!(one.invert_unit().unwrap().value(), 1);
        let x = PadicScalar::new(3, 1, 2).unwrap();
        assert_eq!(x.invert_unit().unwrap().value(), 2);
        let bad = PadicScalar::new(5, 2, 10).unwrap();
        assert!(matches!(bad.invert_unit(), Err(PadicError::NonUnit { .. })));
    }

    #[test]
    fn resolvent_examples() {
        let x = PadicScalar::new(5, 1, 7).unwrap();
        assert_eq!(geometric_resolvent(|y| *y, x).unwrap().value(), 2);
        let x = PadicScalar::one(5, 2).unwrap();
        assert_eq!(geometric_resolvent(|y| *y, x).unwrap().value(), 6);
        let x = PadicScalar::zero(5, 3).unwrap();
        assert!(geometric_resolvent(|y| *y * *y, x).unwrap().is_zero());
    }

    #[test]
    fn resolvent_rejects_precision_change() {
        let x = PadicScalar::one(3, 3).unwrap();
        let err = geometric_resolvent(|y| y.reduce_to(1), x).unwrap_err();
        assert!(matches!(err, PadicError::PrecisionMismatch { .. }));
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let two = PadicScalar::new(5, 2, 2).unwrap();
        let t = two.teichmuller();
        assert_eq!(t.value(), 7);
        assert_eq!(t.pow(5), t);
    }

    #[test]
    fn zero_valuation_is_lower_bound() {
        let z = PadicScalar::zero(3, 4).unwrap();
        assert_eq!(z.valuation(), ScalarValuation::AtLeast(4));
        let x = PadicScalar::new(3, 4, 18).unwrap();
        assert_eq!(x.valuation(), ScalarValuation::Exact(2));
    }

    #[test]
    fn mixed_precision_reduces() {
        let a = PadicScalar::new(5, 3, 124).unwrap();
        let b = PadicScalar::new(5, 1, 1).unwrap();
        let s = a + b;
        assert_eq!(s.precision(), 1);
        assert_eq!(s.value(), 0);
    }

    #[test]
    fn rational_images() {
        let x = PadicScalar::from_rational(&q(1, 2), 5, 2).unwrap();
        assert_eq!(x.value(), 13);
        assert!(PadicScalar::from_rational(&q(1, 5), 5, 2).is_err());
    }

    #[test]
    fn primes() {
        let primes: Vec<u64> = (0..30).filter(|n| is_prime(*n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(PadicScalar::new(9, 2, 1).is_err());
    }
}
