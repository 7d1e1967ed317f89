//! Exact rational functions with factored denominators.
//!
//! Every denominator arising here is a product of powers of variables and of
//! linear forms, so a coefficient is stored as a numerator polynomial over a
//! map from primitive irreducible factors to exponents. This form is
//! canonical: factors are primitive with positive leading coefficient and no
//! factor divides the numerator.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Expr, ExprAlgebra, Monomial, ParseError, Poly, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported divisor {0}: only monomials times a linear form can be inverted")]
    UnsupportedDivisor(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RationalCoeff {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

impl RationalCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: BTreeMap::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn integer(n: i64) -> Self {
        Self::from_poly(Poly::integer(n))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(Poly::var(v))
    }

    /// `num / prod f^e` for primitive irreducible factors `f`.
    pub fn from_parts(num: Poly, den: BTreeMap<Poly, u32>) -> Self {
        Self { num, den }.normalize()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &BTreeMap<Poly, u32> {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        self.den.iter().fold(Poly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    fn normalize(mut self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let factors: Vec<Poly> = self.den.keys().cloned().collect();
        for f in factors {
            loop {
                let e = self.den[&f];
                if e == 0 {
                    self.den.remove(&f);
                    break;
                }
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        *self.den.get_mut(&f).expect("factor") -= 1;
                    }
                    None => break,
                }
            }
        }
        self
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        Self { num: self.num.mul(&other.num), den }.normalize()
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self { num: self.num.mul(p), den: self.den.clone() }.normalize()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self { num: self.num.add(&other.num), den: self.den.clone() }.normalize();
        }
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            let slot = den.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        let lift = |x: &Self| {
            let mut n = x.num.clone();
            for (f, e) in &den {
                let have = x.den.get(f).copied().unwrap_or(0);
                if *e > have {
                    n = n.mul(&f.pow(e - have));
                }
            }
            n
        };
        let num = lift(self).add(&lift(other));
        Self { num, den }.normalize()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Sum of many coefficients over a single common denominator.
    pub fn sum_of<'a>(items: impl IntoIterator<Item = &'a Self>) -> Self {
        let items: Vec<&Self> = items.into_iter().filter(|x| !x.is_zero()).collect();
        let mut den: BTreeMap<Poly, u32> = BTreeMap::new();
        for x in &items {
            for (f, e) in &x.den {
                let slot = den.entry(f.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        let mut num = Poly::zero();
        for x in &items {
            let mut n = x.num.clone();
            for (f, e) in &den {
                let have = x.den.get(f).copied().unwrap_or(0);
                if *e > have {
                    n = n.mul(&f.pow(e - have));
                }
            }
            num.add_assign(&n);
        }
        Self { num, den }.normalize()
    }

    /// Split a polynomial into `c * monomial * rest` with `rest` primitive.
    fn factor_poly(p: &Poly) -> Result<(BigRational, Vec<(Poly, u32)>), RatError> {
        if p.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        let m = p.monomial_content();
        let rest = p.div_exact(&Poly::monomial(m.clone(), BigRational::one())).expect("monomial content divides");
        let (c, prim) = rest.primitive();
        let mut out: Vec<(Poly, u32)> = m.pairs().iter().map(|(v, e)| (Poly::var(*v), *e)).collect();
        match prim.total_degree() {
            0 => {}
            1 => out.push((prim, 1)),
            _ => return Err(RatError::UnsupportedDivisor(p.to_string())),
        }
        Ok((c, out))
    }

    pub fn recip(&self) -> Result<Self, RatError> {
        let (c, factors) = Self::factor_poly(&self.num)?;
        let mut den = BTreeMap::new();
        for (f, e) in factors {
            *den.entry(f).or_insert(0) += e;
        }
        let num = self.denominator().scale(&c.recip());
        Ok(Self { num, den }.normalize())
    }

    pub fn div(&self, other: &Self) -> Result<Self, RatError> {
        Ok(self.mul(&other.recip()?))
    }

    /// `1 / p` for a polynomial `p` that is a monomial times a linear form.
    pub fn inverse_of(p: &Poly) -> Result<Self, RatError> {
        Self::from_poly(p.clone()).recip()
    }

    pub fn pow(&self, e: i32) -> Result<Self, RatError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn partial(&self, v: Var) -> Self {
        let mut parts = vec![Self { num: self.num.partial(v), den: self.den.clone() }];
        for (f, e) in &self.den {
            let df = f.partial(v);
            if df.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            *den.get_mut(f).expect("factor") += 1;
            let num = self.num.mul(&df).scale(&BigRational::from_integer((-(*e as i64)).into()));
            parts.push(Self { num, den });
        }
        Self::sum_of(parts.iter())
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, map: &BTreeMap<Var, Poly>) -> Result<Self, RatError> {
        let mut out = Self::from_poly(self.num.substitute(map));
        for (f, e) in &self.den {
            let g = Self::inverse_of(&f.substitute(map))?;
            out = out.mul(&g.pow(*e as i32)?);
        }
        Ok(out)
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Self {
        let mut out = Self::from_poly(self.num.rename(f));
        for (g, e) in &self.den {
            let inv = Self::inverse_of(&g.rename(f)).expect("renamed factor stays invertible");
            out = out.mul(&inv.pow(*e as i32).expect("invertible"));
        }
        out
    }

    pub fn parse(s: &str) -> Result<Self, RatError> {
        Expr::parse(s)?.eval(&CoeffAlgebra)
    }

    /// Numerator after multiplying by the denominator `common`, which must be
    /// a multiple of this coefficient's denominator.
    pub fn numerator_over(&self, common: &BTreeMap<Poly, u32>) -> Poly {
        let mut n = self.num.clone();
        for (f, e) in common {
            let have = self.den.get(f).copied().unwrap_or(0);
            assert!(*e >= have, "common denominator too small");
            if *e > have {
                n = n.mul(&f.pow(e - have));
            }
        }
        n
    }

    pub fn lcm_denominators<'a>(items: impl IntoIterator<Item = &'a Self>) -> BTreeMap<Poly, u32> {
        let mut den: BTreeMap<Poly, u32> = BTreeMap::new();
        for x in items {
            for (f, e) in &x.den {
                let slot = den.entry(f.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        den
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut vs = self.num.vars();
        for f in self.den.keys() {
            vs.extend(f.vars());
        }
        vs
    }

    pub fn eval_constant(&self, values: &BTreeMap<Var, BigRational>) -> Option<BigRational> {
        let num = self.num.eval_constant(values)?;
        let den = self.denominator().eval_constant(values)?;
        (!den.is_zero()).then(|| num / den)
    }
}

impl From<Poly> for RationalCoeff {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 || self.num.leading().is_some_and(|(_, c)| c.is_negative()) {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        for (g, e) in &self.den {
            if *e == 1 {
                write!(f, "/({g})")?;
            } else {
                write!(f, "/({g})^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RationalCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct CoeffAlgebra;

impl ExprAlgebra<RationalCoeff, RatError> for CoeffAlgebra {
    fn constant(&self, c: BigRational) -> RationalCoeff {
        RationalCoeff::constant(c)
    }
    fn var(&self, v: Var) -> RationalCoeff {
        RationalCoeff::var(v)
    }
    fn add(&self, a: RationalCoeff, b: RationalCoeff) -> RationalCoeff {
        a.add(&b)
    }
    fn sub(&self, a: RationalCoeff, b: RationalCoeff) -> RationalCoeff {
        a.sub(&b)
    }
    fn mul(&self, a: RationalCoeff, b: RationalCoeff) -> RationalCoeff {
        a.mul(&b)
    }
    fn div(&self, a: RationalCoeff, b: RationalCoeff) -> Result<RationalCoeff, RatError> {
        a.div(&b)
    }
}

/// Monomial helper used by callers that build coefficients term by term.
pub fn monomial_coeff(pairs: Vec<(Var, u32)>, c: BigRational) -> RationalCoeff {
    RationalCoeff::from_poly(Poly::monomial(Monomial::from_pairs(pairs), c))
}
