//! Characteristic-zero logarithmic differential forms.
//!
//! A [`LogForm`] is a sum of rational coefficients times wedges of `d log f`
//! for linear forms `f`. Equality is decided by expanding `d log f = df / f`
//! into a [`CoordForm`] over the coordinate differentials.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::poly::{Monomial, ParseError, Poly, Var};
use crate::ratfn::{RatError, RationalCoeff};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("{0} is not a nonconstant linear form in the coordinates")]
    NotLinear(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error(transparent)]
    Rat(#[from] RatError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed form json: {0}")]
    Json(String),
}

/// Sign of the sorting permutation, or `None` when there is a repeat.
pub fn sort_with_sign<T: Ord>(mut v: Vec<T>) -> Option<(Vec<T>, i64)> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if prefix.len() == n {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| prefix[i] > prefix[j]).count();
            out.push((prefix.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// A nonconstant linear form up to scalar, normalized to be primitive with a
/// positive leading coefficient. `d log` of a scalar vanishes, so the
/// normalization does not change `d log f`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogAtom(Poly);

impl LogAtom {
    pub fn new(f: &Poly) -> Result<Self, FormError> {
        if f.total_degree() != 1 || f.vars().iter().any(|v| !v.is_coordinate()) {
            return Err(FormError::NotLinear(f.to_string()));
        }
        Ok(Self(f.primitive().1))
    }

    pub fn var(v: Var) -> Self {
        Self(Poly::var(v))
    }

    pub fn difference(a: Var, b: Var) -> Self {
        Self::new(&Poly::var(a).sub(&Poly::var(b))).expect("distinct coordinates")
    }

    pub fn t(i: u16) -> Self {
        Self::var(Var::T(i))
    }

    pub fn z(b: u16) -> Self {
        Self::var(Var::Z(b))
    }

    pub fn t_t(i: u16, j: u16) -> Self {
        Self::difference(Var::T(i), Var::T(j))
    }

    pub fn t_z(i: u16, b: u16) -> Self {
        Self::difference(Var::T(i), Var::Z(b))
    }

    pub fn z_z(b: u16, c: u16) -> Self {
        Self::difference(Var::Z(b), Var::Z(c))
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Self {
        Self::new(&self.0.rename(f)).expect("renaming keeps linear forms")
    }

    /// `df / f` as a coordinate 1-form.
    pub fn expand(&self) -> CoordForm {
        let inv = RationalCoeff::inverse_of(&self.0).expect("linear forms are invertible");
        let mut out = CoordForm::zero(1);
        for v in self.0.vars() {
            let c = self.0.partial(v);
            out.add_term(vec![v], inv.mul_poly(&c));
        }
        out
    }
}

impl fmt::Display for LogAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for LogAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dlog({})", self.0)
    }
}

/// Forms `sum_V c_V dV` with `V` a sorted set of coordinate differentials.
#[derive(Clone, PartialEq, Eq)]
pub struct CoordForm {
    degree: usize,
    terms: BTreeMap<Vec<Var>, RationalCoeff>,
}

impl CoordForm {
    pub fn zero(degree: usize) -> Self {
        Self { degree, terms: BTreeMap::new() }
    }

    pub fn scalar(c: RationalCoeff) -> Self {
        let mut out = Self::zero(0);
        out.add_term(Vec::new(), c);
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Var>, RationalCoeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c dV`, sorting `V` with sign.
    pub fn add_term(&mut self, block: Vec<Var>, c: RationalCoeff) {
        if c.is_zero() {
            return;
        }
        let Some((block, sign)) = sort_with_sign(block) else { return };
        let c = if sign < 0 { c.neg() } else { c };
        match self.terms.get_mut(&block) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&block);
                }
            }
            None => {
                self.terms.insert(block, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { degree: self.degree, terms: self.terms.iter().map(|(b, c)| (b.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &RationalCoeff) -> Self {
        let mut out = Self::zero(self.degree);
        for (b, x) in &self.terms {
            out.add_term(b.clone(), x.mul(c));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for (ba, ca) in &self.terms {
            for (bb, cb) in &other.terms {
                let mut block = ba.clone();
                block.extend_from_slice(bb);
                out.add_term(block, ca.mul(cb));
            }
        }
        out
    }

    pub fn differential(&self) -> Self {
        let mut out = Self::zero(self.degree + 1);
        for (b, c) in &self.terms {
            for v in c.vars() {
                if !v.is_coordinate() {
                    continue;
                }
                let mut block = vec![v];
                block.extend_from_slice(b);
                out.add_term(block, c.partial(v));
            }
        }
        out
    }
}

impl fmt::Display for CoordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]")?;
            for v in b {
                write!(f, " d{v}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CoordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A nonzero term witnessing that a form does not vanish: the coordinate
/// block, a coordinate monomial and its coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroCertificate {
    pub block: String,
    pub monomial: String,
    pub coefficient: String,
}

fn block_string(block: &[Var]) -> String {
    if block.is_empty() {
        return "1".into();
    }
    block.iter().map(|v| format!("d{v}")).collect::<Vec<_>>().join("^")
}

/// Rank over `Q` of a family of coordinate forms of equal degree.
pub fn coord_rank(forms: &[CoordForm]) -> usize {
    let common = RationalCoeff::lcm_denominators(forms.iter().flat_map(|f| f.terms.values()));
    let mut columns: BTreeMap<(Vec<Var>, Monomial), usize> = BTreeMap::new();
    let sparse: Vec<Vec<(usize, BigRational)>> = forms
        .iter()
        .map(|f| {
            let mut row = Vec::new();
            for (b, c) in &f.terms {
                for (m, x) in c.numerator_over(&common).terms() {
                    let n = columns.len();
                    let col = *columns.entry((b.clone(), m.clone())).or_insert(n);
                    row.push((col, x.clone()));
                }
            }
            row
        })
        .collect();
    let width = columns.len();
    let dense: Vec<Vec<BigRational>> = sparse
        .into_iter()
        .map(|r| {
            let mut row = vec![BigRational::zero(); width];
            for (c, x) in r {
                row[c] = x;
            }
            row
        })
        .collect();
    linalg::rank(&dense)
}

/// A sum of rational coefficients times sorted wedges of `d log` atoms.
#[derive(Clone, PartialEq, Eq)]
pub struct LogForm {
    degree: usize,
    terms: BTreeMap<Vec<LogAtom>, RationalCoeff>,
}

#[derive(Serialize, Deserialize)]
struct LogFormJson {
    degree: usize,
    terms: Vec<LogTermJson>,
}

#[derive(Serialize, Deserialize)]
struct LogTermJson {
    coeff: String,
    block: Vec<String>,
}

impl LogForm {
    pub fn zero(degree: usize) -> Self {
        Self { degree, terms: BTreeMap::new() }
    }

    pub fn scalar(c: RationalCoeff) -> Self {
        Self::term(c, Vec::new())
    }

    pub fn one() -> Self {
        Self::scalar(RationalCoeff::one())
    }

    pub fn dlog(a: LogAtom) -> Self {
        Self::term(RationalCoeff::one(), vec![a])
    }

    pub fn term(c: RationalCoeff, block: Vec<LogAtom>) -> Self {
        let mut out = Self::zero(block.len());
        out.add_term(block, c);
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<LogAtom>, RationalCoeff> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, block: Vec<LogAtom>, c: RationalCoeff) {
        debug_assert_eq!(block.len(), self.degree);
        if c.is_zero() {
            return;
        }
        let Some((block, sign)) = sort_with_sign(block) else { return };
        let c = if sign < 0 { c.neg() } else { c };
        match self.terms.get_mut(&block) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&block);
                }
            }
            None => {
                self.terms.insert(block, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        if other.is_empty() {
            return;
        }
        if self.is_empty() {
            self.degree = other.degree;
        }
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        for (b, c) in &other.terms {
            self.add_term(b.clone(), c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        Self { degree: self.degree, terms: self.terms.iter().map(|(b, c)| (b.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &RationalCoeff) -> Self {
        let mut out = Self::zero(self.degree);
        for (b, x) in &self.terms {
            out.add_term(b.clone(), x.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        self.scale(&RationalCoeff::constant(c.clone()))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for (ba, ca) in &self.terms {
            for (bb, cb) in &other.terms {
                let mut block = ba.clone();
                block.extend_from_slice(bb);
                out.add_term(block, ca.mul(cb));
            }
        }
        out
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RationalCoeff) -> Result<RationalCoeff, RatError>) -> Result<Self, RatError> {
        let mut out = Self::zero(self.degree);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Self {
        let mut out = Self::zero(self.degree);
        for (b, c) in &self.terms {
            out.add_term(b.iter().map(|a| a.rename(f)).collect(), c.rename(f));
        }
        out
    }

    /// `sum_sigma sign(sigma) w(t_sigma(1), ..., t_sigma(n))`.
    pub fn alt_symmetrize(&self, n: usize) -> Self {
        let perms = permutations_with_sign(n);
        let parts: Vec<LogForm> = perms
            .par_iter()
            .map(|(sigma, sign)| {
                let rename = |v: Var| match v {
                    Var::T(i) if (i as usize) <= n => Var::T(sigma[i as usize - 1] as u16 + 1),
                    w => w,
                };
                let w = self.rename(&rename);
                if *sign < 0 { w.neg() } else { w }
            })
            .collect();
        let mut out = Self::zero(self.degree);
        for p in &parts {
            out.add_assign(p);
        }
        out
    }

    pub fn expand_coordinates(&self) -> CoordForm {
        let mut out = CoordForm::zero(self.degree);
        for (b, c) in &self.terms {
            let mut acc = CoordForm::scalar(c.clone());
            for a in b {
                acc = acc.wedge(&a.expand());
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_witness().is_none()
    }

    /// `None` when the form vanishes after coordinate expansion, otherwise
    /// one nonzero term of the expansion.
    pub fn nonzero_witness(&self) -> Option<ZeroCertificate> {
        if self.terms.is_empty() {
            return None;
        }
        if self.coefficients_constant() {
            let (den, acc) = self.cleared_expansion();
            return acc.into_iter().find(|(_, c)| !c.is_zero()).map(|((block, m), c)| ZeroCertificate {
                block: block_string(&block),
                monomial: m.to_string(),
                coefficient: RationalCoeff::from_parts(c, den.clone()).to_string(),
            });
        }
        let e = self.expand_coordinates();
        e.terms().iter().next().map(|(block, c)| ZeroCertificate {
            block: block_string(block),
            monomial: "1".into(),
            coefficient: c.to_string(),
        })
    }

    /// Like [`LogForm::nonzero_witness`] for forms with rational constant
    /// coefficients, testing vanishing modulo `p^a`.
    pub fn nonzero_witness_mod(&self, p: u64, a: u32) -> Option<ZeroCertificate> {
        let (_, acc) = self.cleared_expansion();
        acc.into_iter()
            .find(|(_, c)| {
                let x = c.as_constant().expect("constant coefficients");
                !crate::padic::val_p(&x, p).at_least(a as i64)
            })
            .map(|((block, m), c)| ZeroCertificate { block: block_string(&block), monomial: m.to_string(), coefficient: c.to_string() })
    }

    fn coefficients_constant(&self) -> bool {
        self.terms.values().all(|c| c.vars().iter().all(|v| !v.is_coordinate()))
    }

    /// The coordinate expansion multiplied by the product `L` of all atoms
    /// and by a common denominator `D` of the coefficients, as polynomial
    /// coefficients per `(block, coordinate monomial)`. Returns `D` in
    /// factored form. Requires coefficients free of coordinates.
    fn cleared_expansion(&self) -> (BTreeMap<Poly, u32>, BTreeMap<(Vec<Var>, Monomial), Poly>) {
        let mut atoms: Vec<&LogAtom> = self.terms.keys().flatten().collect();
        atoms.sort();
        atoms.dedup();
        let common = RationalCoeff::lcm_denominators(self.terms.values());
        let parts: Vec<BTreeMap<(Vec<Var>, Monomial), Poly>> = self
            .terms
            .par_iter()
            .map(|(block, c)| {
                let num = c.numerator_over(&common);
                let cofactor = atoms
                    .iter()
                    .filter(|a| !block.contains(a))
                    .fold(Poly::one(), |acc, a| acc.mul(a.poly()));
                let mut wedge: BTreeMap<Vec<Var>, BigRational> = BTreeMap::new();
                wedge.insert(Vec::new(), BigRational::from_integer(1.into()));
                for a in block {
                    let grad: Vec<(Var, BigRational)> =
                        a.poly().vars().into_iter().map(|v| (v, a.poly().partial(v).as_constant().expect("linear"))).collect();
                    let mut next: BTreeMap<Vec<Var>, BigRational> = BTreeMap::new();
                    for (b, x) in &wedge {
                        for (v, y) in &grad {
                            let mut nb = b.clone();
                            nb.push(*v);
                            if let Some((nb, sign)) = sort_with_sign(nb) {
                                let slot = next.entry(nb).or_insert_with(BigRational::zero);
                                *slot += if sign < 0 { -(x * y) } else { x * y };
                            }
                        }
                    }
                    next.retain(|_, x| !x.is_zero());
                    wedge = next;
                }
                let mut out: BTreeMap<(Vec<Var>, Monomial), Poly> = BTreeMap::new();
                for (b, x) in &wedge {
                    for (m, y) in cofactor.terms() {
                        let slot = out.entry((b.clone(), m.clone())).or_default();
                        slot.add_assign(&num.scale(&(x * y)));
                    }
                }
                out
            })
            .collect();
        let mut acc: BTreeMap<(Vec<Var>, Monomial), Poly> = BTreeMap::new();
        for part in parts {
            for (k, v) in part {
                acc.entry(k).or_default().add_assign(&v);
            }
        }
        (common, acc)
    }

    /// Equality of the underlying differential forms.
    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// `d` of the form; only coefficients contribute since `d log` atoms are
    /// closed.
    pub fn differential(&self) -> CoordForm {
        let mut out = CoordForm::zero(self.degree + 1);
        for (b, c) in &self.terms {
            let mut acc = CoordForm::scalar(c.clone()).differential();
            for a in b {
                acc = acc.wedge(&a.expand());
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = LogFormJson {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(b, c)| LogTermJson { coeff: c.to_string(), block: b.iter().map(ToString::to_string).collect() })
                .collect(),
        };
        serde_json::to_value(j).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, FormError> {
        let j: LogFormJson = serde_json::from_value(v.clone()).map_err(|e| FormError::Json(e.to_string()))?;
        let mut out = Self::zero(j.degree);
        for t in j.terms {
            if t.block.len() != j.degree {
                return Err(FormError::DegreeMismatch(t.block.len(), j.degree));
            }
            let block = t
                .block
                .iter()
                .map(|s| LogAtom::new(&crate::poly::parse_poly(s)?))
                .collect::<Result<Vec<_>, FormError>>()?;
            out.add_term(block, RationalCoeff::parse(&t.coeff)?);
        }
        Ok(out)
    }
}

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if b.is_empty() || !c.is_one() {
                write!(f, "[{c}]")?;
            }
            for (k, a) in b.iter().enumerate() {
                if k > 0 || !c.is_one() {
                    write!(f, " ")?;
                }
                write!(f, "dlog({a})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `prod_i d log(a_i)` with unit coefficient.
pub fn dlog_wedge(atoms: &[LogAtom]) -> LogForm {
    LogForm::term(RationalCoeff::one(), atoms.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> LogAtom {
        LogAtom::var(Var::X(1))
    }
    fn y() -> LogAtom {
        LogAtom::var(Var::X(2))
    }
    fn xy() -> LogAtom {
        LogAtom::difference(Var::X(1), Var::X(2))
    }

    #[test]
    fn repeated_atom_vanishes() {
        let a = LogForm::dlog(LogAtom::t_z(1, 1));
        assert!(a.wedge(&a).is_empty());
    }

    #[test]
    fn orientation_is_absorbed() {
        assert_eq!(LogAtom::difference(Var::Z(2), Var::Z(1)), LogAtom::z_z(1, 2));
        assert_eq!(LogAtom::t_z(1, 1).to_string(), "t1 - z1");
    }

    #[test]
    fn arnold_relation() {
        let rel = dlog_wedge(&[x(), xy()]).sub(&dlog_wedge(&[y(), xy()])).sub(&dlog_wedge(&[x(), y()]));
        assert!(!rel.is_empty());
        assert!(rel.is_zero());
    }

    #[test]
    fn expansions() {
        let e = LogForm::dlog(LogAtom::t(1)).expand_coordinates();
        let mut want = CoordForm::zero(1);
        want.add_term(vec![Var::T(1)], RationalCoeff::parse("1/t1").unwrap());
        assert_eq!(e, want);
        let e = LogForm::dlog(LogAtom::z_z(1, 2)).expand_coordinates();
        let mut want = CoordForm::zero(1);
        want.add_term(vec![Var::Z(1)], RationalCoeff::parse("1/(z1 - z2)").unwrap());
        want.add_term(vec![Var::Z(2)], RationalCoeff::parse("-1/(z1 - z2)").unwrap());
        assert_eq!(e, want);
    }

    #[test]
    fn alternation() {
        let w = dlog_wedge(&[LogAtom::t_z(1, 1)]);
        assert_eq!(w.alt_symmetrize(1), w);
        let sym = dlog_wedge(&[LogAtom::t_z(1, 1)]).add(&dlog_wedge(&[LogAtom::t_z(2, 1)]));
        assert!(sym.alt_symmetrize(2).is_zero());
        let w = dlog_wedge(&[LogAtom::t_z(1, 1), LogAtom::t_z(2, 1)]);
        // the swap maps the block to its reverse, which carries a sign of -1
        assert_eq!(w.alt_symmetrize(2), w.scale_rational(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn json_roundtrip() {
        let w = dlog_wedge(&[LogAtom::t_z(1, 1), LogAtom::z_z(1, 2)]).scale(&RationalCoeff::parse("m1/kappa").unwrap());
        assert_eq!(LogForm::from_json(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn permutation_signs() {
        let p = permutations_with_sign(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<i64>(), 0);
    }
}
