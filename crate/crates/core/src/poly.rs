//! Sparse multivariate polynomials over `Q` with a lexicographic monomial order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variables: coordinates `t_i`, `z_b`, `x_i` and the formal parameters
/// `m_b`, `kappa`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    T(u16),
    Z(u16),
    X(u16),
    M(u16),
    Kappa,
}

impl Var {
    /// Coordinates carry differentials; parameters do not.
    pub fn is_coordinate(self) -> bool {
        matches!(self, Var::T(_) | Var::Z(_) | Var::X(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T(i) => write!(f, "t{i}"),
            Var::Z(i) => write!(f, "z{i}"),
            Var::X(1) => write!(f, "x"),
            Var::X(2) => write!(f, "y"),
            Var::X(i) => write!(f, "x{i}"),
            Var::M(i) => write!(f, "m{i}"),
            Var::Kappa => write!(f, "kappa"),
        }
    }
}

impl std::str::FromStr for Var {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bad = || ParseError(format!("unknown variable {s:?}"));
        match s {
            "x" => return Ok(Var::X(1)),
            "y" => return Ok(Var::X(2)),
            "kappa" | "k" => return Ok(Var::Kappa),
            _ => {}
        }
        let (head, idx) = s.split_at(1);
        let i: u16 = idx.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match head {
            "t" => Ok(Var::T(i)),
            "z" => Ok(Var::Z(i)),
            "x" => Ok(Var::X(i)),
            "m" => Ok(Var::M(i)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error: {0}")]
pub struct ParseError(pub String);

/// A monomial as a sorted list of `(variable, exponent > 0)`.
///
/// Ordered lexicographically with the smallest variable most significant, so
/// the order is a monomial order and the leading term is the maximum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Self(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|(_, e)| *e > 0);
        pairs.sort();
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Self(out)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        (j == other.0.len()).then_some(Self(out))
    }

    /// Componentwise minimum (the gcd of two monomials).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = other.degree_in(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Self(out)
    }

    pub fn without(&self, v: Var) -> Self {
        Self(self.0.iter().copied().filter(|(w, _)| *w != v).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        // degree first, then terms from the leading one down
        self.total_degree().cmp(&other.total_degree()).then_with(|| {
            let a = self.terms.iter().rev();
            let b = other.terms.iter().rev();
            for (x, y) in a.zip(b) {
                let c = x.0.cmp(y.0).then_with(|| x.1.cmp(y.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.terms.len().cmp(&other.terms.len())
        })
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// `sum_v coeffs[v] * v + constant`.
    pub fn linear(coeffs: &[(Var, BigRational)], constant: BigRational) -> Self {
        let mut p = Self::constant(constant);
        for (v, c) in coeffs {
            p.add_term(Monomial::var(*v), c.clone());
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().expect("one term");
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// `(monomial, coefficient)` when the polynomial has a single term.
    pub fn as_monomial(&self) -> Option<(&Monomial, &BigRational)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().expect("one term"))
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| *v)).collect()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut big, small) = if self.terms.len() >= other.terms.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Self {
        Self { terms: self.terms.iter().map(|(x, y)| (x.mul(m), y * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some((m, c)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            r = r.sub(&d.mul_monomial(&qm, &qc));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    pub fn partial(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e == 0 {
                continue;
            }
            let rest = m.without(v).mul(&Monomial::from_pairs(vec![(v, e - 1)]));
            out.add_term(rest, c * BigRational::from_integer(e.into()));
        }
        out
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, map: &BTreeMap<Var, Poly>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            let mut kept = Vec::new();
            for &(v, e) in &m.0 {
                match map.get(&v) {
                    Some(p) => term = term.mul(&p.pow(e)),
                    None => kept.push((v, e)),
                }
            }
            out.add_assign(&term.mul_monomial(&Monomial::from_pairs(kept), &BigRational::one()));
        }
        out
    }

    /// Renaming of variables by an injective map.
    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let pairs = m.0.iter().map(|(v, e)| (f(*v), *e)).collect();
            out.add_term(Monomial::from_pairs(pairs), c.clone());
        }
        out
    }

    /// `(content, primitive part)`: the primitive part has coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn primitive(&self) -> (BigRational, Self) {
        if self.is_zero() {
            return (BigRational::one(), Self::zero());
        }
        let lcm_den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd_num = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&lcm_den / c.denom()))));
        let mut content = BigRational::new(gcd_num, lcm_den);
        if self.leading().expect("nonzero").1.is_negative() {
            content = -content;
        }
        (content.clone(), self.scale(&content.recip()))
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = it.next().cloned().unwrap_or_default();
        it.fold(first, |acc, m| acc.gcd(m))
    }

    pub fn eval_constant(&self, values: &BTreeMap<Var, BigRational>) -> Option<BigRational> {
        let map: BTreeMap<Var, Poly> = values.iter().map(|(v, c)| (*v, Poly::constant(c.clone()))).collect();
        self.substitute(&map).as_constant()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            match (m.is_one(), a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{m}")?,
                (false, false) => write!(f, "{a}*{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parsed arithmetic expression over numbers and [`Var`]s.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn parse(s: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(ParseError(format!("trailing input in {s:?}")));
        }
        Ok(e)
    }

    /// Evaluate into any field-like target.
    pub fn eval<T: Clone, E>(&self, alg: &impl ExprAlgebra<T, E>) -> Result<T, E> {
        Ok(match self {
            Expr::Num(c) => alg.constant(c.clone()),
            Expr::Var(v) => alg.var(*v),
            Expr::Add(a, b) => alg.add(a.eval(alg)?, b.eval(alg)?),
            Expr::Sub(a, b) => alg.sub(a.eval(alg)?, b.eval(alg)?),
            Expr::Mul(a, b) => alg.mul(a.eval(alg)?, b.eval(alg)?),
            Expr::Div(a, b) => {
                let lhs = a.eval(alg)?;
                b.divide_into(lhs, alg)?
            }
            Expr::Neg(a) => alg.sub(alg.constant(BigRational::zero()), a.eval(alg)?),
            Expr::Pow(a, e) => {
                let mut acc = alg.constant(BigRational::one());
                if *e < 0 {
                    for _ in 0..e.unsigned_abs() {
                        acc = a.divide_into(acc, alg)?;
                    }
                } else {
                    let base = a.eval(alg)?;
                    for _ in 0..*e {
                        acc = alg.mul(acc, base.clone());
                    }
                }
                acc
            }
        })
    }

    /// `lhs / self`, dividing factor by factor through products and powers so
    /// that only irreducible pieces are ever inverted.
    fn divide_into<T: Clone, E>(&self, lhs: T, alg: &impl ExprAlgebra<T, E>) -> Result<T, E> {
        match self {
            Expr::Mul(a, b) => {
                let t = a.divide_into(lhs, alg)?;
                b.divide_into(t, alg)
            }
            Expr::Div(a, b) => {
                let t = a.divide_into(lhs, alg)?;
                Ok(alg.mul(t, b.eval(alg)?))
            }
            Expr::Pow(a, e) if *e > 0 => {
                let mut t = lhs;
                for _ in 0..*e {
                    t = a.divide_into(t, alg)?;
                }
                Ok(t)
            }
            other => alg.div(lhs, other.eval(alg)?),
        }
    }
}

/// Operations an expression can be evaluated with.
pub trait ExprAlgebra<T, E> {
    fn constant(&self, c: BigRational) -> T;
    fn var(&self, v: Var) -> T;
    fn add(&self, a: T, b: T) -> T;
    fn sub(&self, a: T, b: T) -> T;
    fn mul(&self, a: T, b: T) -> T;
    fn div(&self, a: T, b: T) -> Result<T, E>;
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(text.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(ParseError(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let neg = if self.peek_op() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e: i32 = match self.tokens.get(self.pos) {
                Some(Token::Num(n)) => i32::try_from(n).map_err(|_| ParseError("exponent too large".into()))?,
                _ => return Err(ParseError("expected integer exponent".into())),
            };
            self.pos += 1;
            return Ok(Expr::Pow(base.into(), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| ParseError("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(n) => Ok(Expr::Num(BigRational::from_integer(n))),
            Token::Ident(s) => Ok(Expr::Var(s.parse()?)),
            Token::Op('(') => {
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(ParseError("missing ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Token::Op(c) => Err(ParseError(format!("unexpected {c:?}"))),
        }
    }
}

/// A numerator/denominator pair without canonical reduction; equality is
/// decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct FracPoly {
    pub num: Poly,
    pub den: Poly,
}

impl FracPoly {
    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn parse(s: &str) -> Result<Self, ParseError> {
        Expr::parse(s)?.eval(&FracAlgebra)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    pub fn recip(&self) -> Option<Self> {
        (!self.num.is_zero()).then(|| Self { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn pow(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Some(Self { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { num: self.num.mul(&o.den).sub(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }
    }

    pub fn one_minus(&self) -> Self {
        Self::from_poly(Poly::one()).sub(self)
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn same_as(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        Some(self.num.as_constant()? / self.den.as_constant()?)
    }
}

impl fmt::Display for FracPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

struct FracAlgebra;

impl ExprAlgebra<FracPoly, ParseError> for FracAlgebra {
    fn constant(&self, c: BigRational) -> FracPoly {
        FracPoly::from_poly(Poly::constant(c))
    }
    fn var(&self, v: Var) -> FracPoly {
        FracPoly::from_poly(Poly::var(v))
    }
    fn add(&self, a: FracPoly, b: FracPoly) -> FracPoly {
        a.sub(&b.neg())
    }
    fn sub(&self, a: FracPoly, b: FracPoly) -> FracPoly {
        a.sub(&b)
    }
    fn mul(&self, a: FracPoly, b: FracPoly) -> FracPoly {
        a.mul(&b)
    }
    fn div(&self, a: FracPoly, b: FracPoly) -> Result<FracPoly, ParseError> {
        Ok(a.mul(&b.recip().ok_or_else(|| ParseError("division by zero".into()))?))
    }
}

pub fn parse_poly(s: &str) -> Result<Poly, ParseError> {
    let f = FracPoly::parse(s)?;
    let c = f.den.as_constant().ok_or_else(|| ParseError(format!("{s:?} is not a polynomial")))?;
    Ok(f.num.scale(&c.recip()))
}
