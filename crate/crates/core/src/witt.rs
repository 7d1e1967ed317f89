//! De Rham-Witt forms of (Laurent) polynomial rings over `F_p`.
//!
//! A form is a finite sum `c * t^I * dlog t_{k1} ^ ... ^ dlog t_{km}` where `I`
//! ranges over exponent vectors in `Z[1/p]` and `c` is a rational number with
//! its p-adic valuation tracked. Coefficients are exact rationals, so negative
//! valuations appear transiently (for instance in `d(t^{1/p})`), while the
//! lattice predicates ([`DrwForm::is_in_e`], [`DrwForm::fil_membership`],
//! [`DrwForm::wa_normal_form`]) work inside `Z_(p)`.
//!
//! `F` multiplies exponents by `p`, `V = pF^{-1}` divides them by `p` and
//! multiplies the coefficient by `p`, and `d` is the de Rham differential in
//! the `dlog` basis. All of these preserve the grading by exponent vector up
//! to rescaling, which is what makes `Fil^a` computable piece by piece.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::PLattice;
use crate::padic::{self, PadicError, PadicScalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DrwError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("duplicate atom {0} in ring description")]
    DuplicateAtom(Atom),
    #[error("atom index {0} out of range")]
    AtomIndex(usize),
    #[error("negative exponent on non-invertible atom {0}")]
    Positivity(Atom),
    #[error("atom {0} is not invertible")]
    NotInvertible(Atom),
    #[error("exponent {0} is not an integer")]
    NonIntegralExponent(String),
    #[error("forms live over different rings")]
    RingMismatch,
    #[error("form is not in E (it or its differential has a non-integral coefficient)")]
    NotInE,
    #[error("level {level} exceeds the ring precision {precision}")]
    LevelTooLarge { level: u32, precision: u32 },
    #[error("level must be positive")]
    ZeroLevel,
    #[error("at most 32 atoms are supported")]
    TooManyAtoms,
    #[error("exponent {exponent} has denominator beyond p^{cap}")]
    DenominatorCap { exponent: String, cap: u32 },
    #[error("malformed form description: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, DrwError>;

/// Generator of the ambient ring: a coordinate `t_i` or a difference such
/// as `t_i - z_b` or `z_b - z_c`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    T(u16),
    TMinusZ(u16, u16),
    ZMinusZ(u16, u16),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::T(i) => write!(f, "t{i}"),
            Atom::TMinusZ(i, b) => write!(f, "t{i}-z{b}"),
            Atom::ZMinusZ(b, c) => write!(f, "z{b}-z{c}"),
        }
    }
}

impl std::str::FromStr for Atom {
    type Err = DrwError;
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || DrwError::Parse(format!("bad atom {s:?}"));
        let idx = |x: &str, prefix: char| -> Result<u16> {
            x.strip_prefix(prefix).and_then(|r| r.parse().ok()).ok_or_else(bad)
        };
        match s.split_once('-') {
            None => Ok(Atom::T(idx(&s, 't')?)),
            Some((l, r)) if l.starts_with('t') => Ok(Atom::TMinusZ(idx(l, 't')?, idx(r, 'z')?)),
            Some((l, r)) => Ok(Atom::ZMinusZ(idx(l, 'z')?, idx(r, 'z')?)),
        }
    }
}

/// An exponent `num / p^den_exp` in `Z[1/p]`, canonical when `p` does not
/// divide `num` whenever `den_exp > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FracExponent {
    num: i64,
    den_exp: u32,
}

impl FracExponent {
    pub const ZERO: Self = Self { num: 0, den_exp: 0 };

    pub fn new(num: i64, den_exp: u32, p: u64) -> Self {
        let (mut num, mut den_exp) = (num, den_exp);
        if num == 0 {
            return Self::ZERO;
        }
        while den_exp > 0 && num % p as i64 == 0 {
            num /= p as i64;
            den_exp -= 1;
        }
        Self { num, den_exp }
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den_exp: 0 }
    }

    pub fn from_rational(x: &BigRational, p: u64) -> Result<Self> {
        let den = x.denom();
        let mut k = 0u32;
        let mut d = den.clone();
        let pb = BigInt::from(p);
        while (&d % &pb).is_zero() {
            d /= &pb;
            k += 1;
        }
        if !d.is_one() {
            return Err(DrwError::Parse(format!("exponent {x} is not in Z[1/{p}]")));
        }
        let num: i64 = x.numer().try_into().map_err(|_| DrwError::Parse(format!("exponent {x} too large")))?;
        Ok(Self::new(num, k, p))
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    /// `d(e) = max(0, -v_p(e))`, which is the stored denominator exponent.
    pub fn denominator_exponent(&self) -> u32 {
        self.den_exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integral(&self) -> bool {
        self.den_exp == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn to_rational(&self, p: u64) -> BigRational {
        BigRational::from_integer(self.num.into()) * padic::p_power(p, -(self.den_exp as i64))
    }

    pub fn add(&self, other: &Self, p: u64) -> Self {
        let k = self.den_exp.max(other.den_exp);
        let scale = |e: &Self| e.num * (p as i64).pow(k - e.den_exp);
        Self::new(scale(self) + scale(other), k, p)
    }

    pub fn times_p(&self, p: u64) -> Self {
        if self.den_exp > 0 {
            Self::new(self.num, self.den_exp - 1, p)
        } else {
            Self::new(self.num * p as i64, 0, p)
        }
    }

    pub fn div_p(&self, p: u64) -> Self {
        Self::new(self.num, self.den_exp + 1, p)
    }

    pub fn display(&self, p: u64) -> String {
        if self.den_exp == 0 {
            self.num.to_string()
        } else {
            format!("{}/{}", self.num, (p as i64).pow(self.den_exp))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub atom: Atom,
    pub invertible: bool,
}

/// The ambient ring: prime, working precision and the ordered atom list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    p: u64,
    precision: u32,
    atoms: Vec<AtomSpec>,
}

impl RingSpec {
    pub fn new(p: u64, precision: u32, atoms: Vec<AtomSpec>) -> Result<Self> {
        if !padic::is_prime(p) {
            return Err(PadicError::NotPrime(p).into());
        }
        if precision == 0 {
            return Err(PadicError::ZeroPrecision.into());
        }
        padic::modulus(p, precision)?;
        if atoms.len() > 32 {
            return Err(DrwError::TooManyAtoms);
        }
        let mut atoms = atoms;
        atoms.sort_by_key(|a| a.atom);
        for w in atoms.windows(2) {
            if w[0].atom == w[1].atom {
                return Err(DrwError::DuplicateAtom(w[0].atom));
            }
        }
        Ok(Self { p, precision, atoms })
    }

    /// `F_p[t_1..t_n]`.
    pub fn polynomial(p: u64, precision: u32, n: u16) -> Result<Self> {
        Self::new(p, precision, (1..=n).map(|i| AtomSpec { atom: Atom::T(i), invertible: false }).collect())
    }

    /// `F_p[t_1^{+-1}..t_n^{+-1}]`.
    pub fn laurent(p: u64, precision: u32, n: u16) -> Result<Self> {
        Self::new(p, precision, (1..=n).map(|i| AtomSpec { atom: Atom::T(i), invertible: true }).collect())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn atoms(&self) -> &[AtomSpec] {
        &self.atoms
    }

    pub fn rank(&self) -> usize {
        self.atoms.len()
    }

    pub fn index_of(&self, atom: Atom) -> Option<usize> {
        self.atoms.iter().position(|a| a.atom == atom)
    }

    fn check_exponents(&self, exps: &[FracExponent]) -> Result<()> {
        for (e, a) in exps.iter().zip(&self.atoms) {
            if e.is_negative() && !a.invertible {
                return Err(DrwError::Positivity(a.atom));
            }
        }
        Ok(())
    }

    /// Input exponents carry denominators at most `p^{a-1}`.
    fn check_cap(&self, exps: &[FracExponent]) -> Result<()> {
        let cap = self.precision - 1;
        match exps.iter().find(|e| e.denominator_exponent() > cap) {
            Some(e) => Err(DrwError::DenominatorCap { exponent: e.display(self.p), cap }),
            None => Ok(()),
        }
    }
}

/// Exponent vector and `dlog` block (a bit mask over atom indices).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub exponents: Vec<FracExponent>,
    pub block: u32,
}

fn block_sign_insert(k: usize, block: u32) -> i32 {
    // sign of moving dlog_k past the atoms of `block` with smaller index
    let below = block & ((1u32 << k) - 1);
    if below.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `omega_a ^ omega_b` rewritten in sorted order, or `None` when the
/// blocks share an atom.
fn block_product_sign(a: u32, b: u32) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let k = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> k).count_ones() - ((a >> k) & 1);
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// All `m`-element subsets of `0..r` as masks, in increasing numeric order.
pub fn subsets(r: usize, m: usize) -> Vec<u32> {
    fn go(start: usize, r: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for k in start..r {
            if r - k < left {
                break;
            }
            go(k + 1, r, left - 1, acc | (1 << k), out);
        }
    }
    let mut out = Vec::new();
    if m <= r {
        go(0, r, m, 0, &mut out);
    }
    out.sort_unstable();
    out
}

/// A de Rham-Witt form over a fixed [`RingSpec`].
#[derive(Clone, PartialEq)]
pub struct DrwForm {
    spec: Arc<RingSpec>,
    terms: BTreeMap<TermKey, BigRational>,
}

impl DrwForm {
    pub fn zero(spec: &Arc<RingSpec>) -> Self {
        Self { spec: spec.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(spec: &Arc<RingSpec>, c: BigRational) -> Self {
        let mut f = Self::zero(spec);
        f.add_term(TermKey { exponents: vec![FracExponent::ZERO; spec.rank()], block: 0 }, c);
        f
    }

    /// `c * prod atom_k^{e_k} * dlog atom_{b1} ^ ... ^ dlog atom_{bm}`; the
    /// block is given in any order and sorted with the matching sign.
    pub fn monomial(spec: &Arc<RingSpec>, c: BigRational, exponents: &[FracExponent], block: &[usize]) -> Result<Self> {
        if exponents.len() != spec.rank() {
            return Err(DrwError::AtomIndex(exponents.len()));
        }
        spec.check_exponents(exponents)?;
        spec.check_cap(exponents)?;
        let mut mask = 0u32;
        let mut sign = 1;
        for &k in block {
            if k >= spec.rank() {
                return Err(DrwError::AtomIndex(k));
            }
            if mask & (1 << k) != 0 {
                return Ok(Self::zero(spec));
            }
            // appending dlog_k on the right: move it past larger atoms
            let above = mask >> (k + 1);
            if above.count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= 1 << k;
        }
        let mut f = Self::zero(spec);
        let c = if sign < 0 { -c } else { c };
        f.add_term(TermKey { exponents: exponents.to_vec(), block: mask }, c);
        Ok(f)
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree when homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|k| k.block.count_ones() as usize);
        let first = degs.next().unwrap_or(0);
        degs.all(|d| d == first).then_some(first)
    }

    /// The degree-`m` part.
    pub fn homogeneous(&self, m: usize) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| k.block.count_ones() as usize == m);
        Self { spec: self.spec.clone(), terms: terms.map(|(k, c)| (k.clone(), c.clone())).collect() }
    }

    fn p(&self) -> u64 {
        self.spec.p
    }

    fn add_term(&mut self, key: TermKey, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    fn same_ring(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(DrwError::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(&self.spec);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    /// Wedge product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let p = self.p();
        let mut out = Self::zero(&self.spec);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let Some(sign) = block_product_sign(ka.block, kb.block) else { continue };
                let exponents: Vec<FracExponent> =
                    ka.exponents.iter().zip(&kb.exponents).map(|(x, y)| x.add(y, p)).collect();
                self.spec.check_exponents(&exponents)?;
                let c = ca * cb;
                out.add_term(TermKey { exponents, block: ka.block | kb.block }, if sign < 0 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `d(c t^I w_B) = c sum_{k not in B} i_k t^I dlog_k ^ w_B`.
    pub fn differential(&self) -> Self {
        let p = self.p();
        let mut out = Self::zero(&self.spec);
        for (key, c) in &self.terms {
            for (k, e) in key.exponents.iter().enumerate() {
                if e.is_zero() || key.block & (1 << k) != 0 {
                    continue;
                }
                let coeff = c * e.to_rational(p);
                let coeff = if block_sign_insert(k, key.block) < 0 { -coeff } else { coeff };
                out.add_term(TermKey { exponents: key.exponents.clone(), block: key.block | (1 << k) }, coeff);
            }
        }
        out
    }

    /// Frobenius: `atom^e -> atom^{pe}`, blocks fixed.
    pub fn frobenius(&self) -> Self {
        let p = self.p();
        let mut out = Self::zero(&self.spec);
        for (key, c) in &self.terms {
            let exponents = key.exponents.iter().map(|e| e.times_p(p)).collect();
            out.add_term(TermKey { exponents, block: key.block }, c.clone());
        }
        out
    }

    /// Verschiebung `V = pF^{-1}`.
    pub fn verschiebung(&self) -> Self {
        let p = self.p();
        let pq = BigRational::from_integer(BigInt::from(p));
        let mut out = Self::zero(&self.spec);
        for (key, c) in &self.terms {
            let exponents = key.exponents.iter().map(|e| e.div_p(p)).collect();
            out.add_term(TermKey { exponents, block: key.block }, c * &pq);
        }
        out
    }

    pub fn frobenius_pow(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |x, _| x.frobenius())
    }

    pub fn verschiebung_pow(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |x, _| x.verschiebung())
    }

    /// Teichmuller lift of `scalar * prod atom^{e}` for a unit of `A`:
    /// the scalar goes to its Teichmuller representative mod `p^a`, each atom
    /// to itself.
    pub fn teichmuller(spec: &Arc<RingSpec>, monomial: &[(usize, i64)], scalar: u64) -> Result<Self> {
        let lift = PadicScalar::new(spec.p, spec.precision, scalar as i128)?;
        if !lift.is_unit() {
            return Err(PadicError::NonUnit { value: scalar, p: spec.p, a: spec.precision }.into());
        }
        let mut exps = vec![FracExponent::ZERO; spec.rank()];
        for &(k, e) in monomial {
            let slot = exps.get_mut(k).ok_or(DrwError::AtomIndex(k))?;
            *slot = slot.add(&FracExponent::integer(e), spec.p);
        }
        Self::monomial(spec, lift.teichmuller().to_rational(), &exps, &[])
    }

    /// Like [`DrwForm::teichmuller`] but taking rational exponents, rejecting
    /// non-integral ones.
    pub fn teichmuller_rational(spec: &Arc<RingSpec>, monomial: &[(usize, BigRational)], scalar: u64) -> Result<Self> {
        let ints = monomial
            .iter()
            .map(|(k, e)| {
                if e.is_integer() {
                    i64::try_from(e.to_integer()).map(|v| (*k, v)).map_err(|_| DrwError::NonIntegralExponent(e.to_string()))
                } else {
                    Err(DrwError::NonIntegralExponent(e.to_string()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::teichmuller(spec, &ints, scalar)
    }

    /// `dlog f` for an invertible atom `f`.
    pub fn dlog_atom(spec: &Arc<RingSpec>, k: usize) -> Result<Self> {
        let a = spec.atoms.get(k).ok_or(DrwError::AtomIndex(k))?;
        if !a.invertible {
            return Err(DrwError::NotInvertible(a.atom));
        }
        Self::monomial(spec, BigRational::one(), &vec![FracExponent::ZERO; spec.rank()], &[k])
    }

    pub fn is_f_fixed(&self) -> bool {
        self.frobenius() == *self
    }

    /// `sum_{i<a} p^i F^i(x)`, the truncated inverse of `1 - pF`.
    pub fn resolvent(&self, a: u32) -> Self {
        let p = BigRational::from_integer(BigInt::from(self.p()));
        let mut acc = Self::zero(&self.spec);
        let mut term = self.clone();
        for _ in 0..a {
            acc = acc.add(&term).expect("same ring");
            term = term.frobenius().scale(&p);
        }
        acc
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| padic::is_p_integral(c, self.p()))
    }

    /// Membership in `E`: the form and its differential are integral.
    pub fn is_in_e(&self) -> bool {
        self.is_integral() && self.differential().is_integral()
    }

    /// Reduction of the coefficients modulo `p^a` (dropping zero classes).
    pub fn reduce_mod(&self, a: u32) -> Result<Self> {
        let mut out = Self::zero(&self.spec);
        for (k, c) in &self.terms {
            let r = PadicScalar::from_rational(c, self.p(), a)?;
            out.add_term(k.clone(), r.to_rational());
        }
        Ok(out)
    }

    /// Pieces of the exponent grading: `(exponent vector, degree) -> coefficient
    /// vector over the degree-m blocks` in [`subsets`] order.
    fn pieces(&self) -> BTreeMap<(Vec<FracExponent>, usize), BTreeMap<u32, BigRational>> {
        let mut out: BTreeMap<_, BTreeMap<u32, BigRational>> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry((k.exponents.clone(), k.block.count_ones() as usize))
                .or_default()
                .insert(k.block, c.clone());
        }
        out
    }

    fn check_level(&self, level: u32) -> Result<()> {
        if level == 0 {
            return Err(DrwError::ZeroLevel);
        }
        if level > self.spec.precision {
            return Err(DrwError::LevelTooLarge { level, precision: self.spec.precision });
        }
        Ok(())
    }

    /// Membership in `Fil^a E = V^a E + d V^a E`.
    pub fn fil_membership(&self, level: u32) -> Result<bool> {
        self.check_level(level)?;
        if !self.is_in_e() {
            return Err(DrwError::NotInE);
        }
        let r = self.spec.rank();
        for ((exps, m), coeffs) in self.pieces() {
            let basis = subsets(r, m);
            let lattice = fil_lattice(&self.spec, &exps, m, level)?;
            let v: Vec<BigRational> =
                basis.iter().map(|s| coeffs.get(s).cloned().unwrap_or_else(BigRational::zero)).collect();
            if !lattice.contains(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Canonical representative of the class of `self` in `W_a = E / Fil^a E`.
    pub fn wa_normal_form(&self, level: u32) -> Result<Self> {
        self.check_level(level)?;
        if !self.is_in_e() {
            return Err(DrwError::NotInE);
        }
        let r = self.spec.rank();
        let mut out = Self::zero(&self.spec);
        for ((exps, m), coeffs) in self.pieces() {
            let basis = subsets(r, m);
            let lattice = fil_lattice(&self.spec, &exps, m, level)?;
            let v: Vec<BigRational> =
                basis.iter().map(|s| coeffs.get(s).cloned().unwrap_or_else(BigRational::zero)).collect();
            let reduced = lattice.reduce(&v)?;
            for (s, c) in basis.iter().zip(reduced) {
                out.add_term(TermKey { exponents: exps.clone(), block: *s }, c);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> FormJson {
        let p = self.p();
        FormJson {
            p,
            precision: self.spec.precision,
            atoms: self.spec.atoms.iter().map(|a| AtomJson { atom: a.atom.to_string(), invertible: a.invertible }).collect(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    coeff: c.to_string(),
                    exponents: k
                        .exponents
                        .iter()
                        .zip(&self.spec.atoms)
                        .filter(|(e, _)| !e.is_zero())
                        .map(|(e, a)| (a.atom.to_string(), e.display(p)))
                        .collect(),
                    block: (0..self.spec.rank())
                        .filter(|k2| k.block & (1 << k2) != 0)
                        .map(|k2| self.spec.atoms[k2].atom.to_string())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FormJson) -> Result<Self> {
        let atoms = json
            .atoms
            .iter()
            .map(|a| Ok(AtomSpec { atom: a.atom.parse()?, invertible: a.invertible }))
            .collect::<Result<Vec<_>>>()?;
        let spec = Arc::new(RingSpec::new(json.p, json.precision, atoms)?);
        let mut out = Self::zero(&spec);
        for t in &json.terms {
            let c: BigRational = parse_rational(&t.coeff)?;
            let mut exps = vec![FracExponent::ZERO; spec.rank()];
            for (name, e) in &t.exponents {
                let k = spec.index_of(name.parse()?).ok_or_else(|| DrwError::Parse(format!("unknown atom {name}")))?;
                exps[k] = FracExponent::from_rational(&parse_rational(e)?, spec.p)?;
            }
            let block = t
                .block
                .iter()
                .map(|name| spec.index_of(name.parse()?).ok_or_else(|| DrwError::Parse(format!("unknown atom {name}"))))
                .collect::<Result<Vec<_>>>()?;
            out = out.add(&Self::monomial(&spec, c, &exps, &block)?)?;
        }
        Ok(out)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || DrwError::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AtomJson {
    pub atom: String,
    pub invertible: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub coeff: String,
    #[serde(default)]
    pub exponents: BTreeMap<String, String>,
    #[serde(default)]
    pub block: Vec<String>,
}

/// JSON shape of a [`DrwForm`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormJson {
    pub p: u64,
    pub precision: u32,
    pub atoms: Vec<AtomJson>,
    pub terms: Vec<TermJson>,
}

impl fmt::Debug for DrwForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DrwForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let p = self.p();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (e, a) in k.exponents.iter().zip(&self.spec.atoms) {
                if !e.is_zero() {
                    write!(f, "*({})^({})", a.atom, e.display(p))?;
                }
            }
            for (j, a) in self.spec.atoms.iter().enumerate() {
                if k.block & (1 << j) != 0 {
                    write!(f, " dlog({})", a.atom)?;
                }
            }
        }
        Ok(())
    }
}

/// `theta_I = sum_k i_k e_k` as a rational vector over the atoms.
fn theta(spec: &RingSpec, exps: &[FracExponent]) -> Vec<BigRational> {
    exps.iter().map(|e| e.to_rational(spec.p)).collect()
}

/// `theta ^ e_S` expanded in the degree `|S| + 1` basis.
fn wedge_one_form(theta: &[BigRational], s: u32, target: &[u32]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); target.len()];
    for (k, t) in theta.iter().enumerate() {
        if t.is_zero() || s & (1 << k) != 0 {
            continue;
        }
        let mask = s | (1 << k);
        let pos = target.binary_search(&mask).expect("subset of the right size");
        let v = if block_sign_insert(k, s) < 0 { -t.clone() } else { t.clone() };
        out[pos] += v;
    }
    out
}

/// Generators of the `Z_(p)`-lattice `E^m` in the piece of exponent `J`:
/// `E^m_J = theta' ^ Lambda^{m-1} + p^{d(J)} Lambda^m` with `theta'` the
/// primitive rescaling of `sum_k j_k dlog_k`.
pub fn e_generators(spec: &RingSpec, exps: &[FracExponent], m: usize) -> Vec<Vec<BigRational>> {
    let r = spec.rank();
    let target = subsets(r, m);
    let unit = |s: u32, scale: &BigRational| -> Vec<BigRational> {
        target.iter().map(|t| if *t == s { scale.clone() } else { BigRational::zero() }).collect()
    };
    let th = theta(spec, exps);
    let Some(v) = th.iter().filter_map(|x| padic::val_p(x, spec.p).finite()).min() else {
        return target.iter().map(|s| unit(*s, &BigRational::one())).collect();
    };
    let d = (-v).max(0);
    let primitive: Vec<BigRational> = th.iter().map(|x| x * padic::p_power(spec.p, -v)).collect();
    let pd = padic::p_power(spec.p, d);
    let mut gens: Vec<Vec<BigRational>> = target.iter().map(|s| unit(*s, &pd)).collect();
    if m >= 1 {
        for s in subsets(r, m - 1) {
            gens.push(wedge_one_form(&primitive, s, &target));
        }
    }
    gens
}

/// The lattice `Fil^a E^m` inside the piece of exponent `I`:
/// `p^a E^m_J + p^a theta_I ^ E^{m-1}_J` with `J = p^a I`.
pub fn fil_lattice(spec: &RingSpec, exps: &[FracExponent], m: usize, level: u32) -> Result<PLattice> {
    let p = spec.p;
    let r = spec.rank();
    let target = subsets(r, m);
    let lifted: Vec<FracExponent> = exps.iter().map(|e| (0..level).fold(*e, |x, _| x.times_p(p))).collect();
    let pa = padic::p_power(p, level as i64);
    let mut gens: Vec<Vec<BigRational>> =
        e_generators(spec, &lifted, m).into_iter().map(|g| g.into_iter().map(|x| x * &pa).collect()).collect();
    if m >= 1 {
        let th = theta(spec, exps);
        let lower = subsets(r, m - 1);
        for g in e_generators(spec, &lifted, m - 1) {
            let mut acc = vec![BigRational::zero(); target.len()];
            for (s, c) in lower.iter().zip(&g) {
                if c.is_zero() {
                    continue;
                }
                for (a, b) in acc.iter_mut().zip(wedge_one_form(&th, *s, &target)) {
                    *a += c * b * &pa;
                }
            }
            gens.push(acc);
        }
    }
    Ok(PLattice::from_generators(p, target.len(), &gens)?)
}

/// Bounds for random E-form generation.
#[derive(Debug, Clone, Copy)]
pub struct SampleBounds {
    pub max_terms: usize,
    pub max_den_exp: u32,
    pub max_numerator: i64,
    pub max_coeff: i64,
}

impl Default for SampleBounds {
    fn default() -> Self {
        Self { max_terms: 6, max_den_exp: 2, max_numerator: 4, max_coeff: 20 }
    }
}

/// Random exponent vector respecting the positivity constraints.
pub fn random_exponents<R: Rng>(spec: &RingSpec, rng: &mut R, bounds: &SampleBounds) -> Vec<FracExponent> {
    spec.atoms
        .iter()
        .map(|a| {
            if rng.gen_bool(0.3) {
                return FracExponent::ZERO;
            }
            let lo = if a.invertible { -bounds.max_numerator } else { 0 };
            let num = rng.gen_range(lo..=bounds.max_numerator);
            let k = rng.gen_range(0..=bounds.max_den_exp);
            FracExponent::new(num, k, spec.p)
        })
        .collect()
}

/// A random element of `E` built from integer combinations of the lattice
/// generators of randomly chosen pieces.
pub fn random_e_form<R: Rng>(spec: &Arc<RingSpec>, rng: &mut R, bounds: &SampleBounds) -> DrwForm {
    let mut out = DrwForm::zero(spec);
    let r = spec.rank();
    let pieces = rng.gen_range(1..=bounds.max_terms.max(1));
    for _ in 0..pieces {
        let exps = random_exponents(spec, rng, bounds);
        let m = rng.gen_range(0..=r);
        let target = subsets(r, m);
        let gens = e_generators(spec, &exps, m);
        let mut v = vec![BigRational::zero(); target.len()];
        for g in &gens {
            let c = BigRational::from_integer(rng.gen_range(-bounds.max_coeff..=bounds.max_coeff).into());
            if c.is_zero() {
                continue;
            }
            for (a, b) in v.iter_mut().zip(g) {
                *a += &c * b;
            }
        }
        for (s, c) in target.iter().zip(v) {
            out.add_term(TermKey { exponents: exps.clone(), block: *s }, c);
        }
        if out.len() >= bounds.max_terms {
            break;
        }
    }
    out
}

/// A random form with arbitrary rational coefficients (not necessarily in `E`).
pub fn random_form<R: Rng>(spec: &Arc<RingSpec>, rng: &mut R, bounds: &SampleBounds) -> DrwForm {
    let mut out = DrwForm::zero(spec);
    let r = spec.rank();
    for _ in 0..rng.gen_range(1..=bounds.max_terms.max(1)) {
        let exps = random_exponents(spec, rng, bounds);
        let m = rng.gen_range(0..=r);
        let blocks = subsets(r, m);
        let block = blocks[rng.gen_range(0..blocks.len())];
        let num = rng.gen_range(-bounds.max_coeff..=bounds.max_coeff);
        let den = rng.gen_range(1..=3i64);
        out.add_term(TermKey { exponents: exps, block }, BigRational::new(num.into(), den.into()));
    }
    out
}

/// Random F-fixed form: a constant-coefficient combination of `dlog` wedges
/// of invertible atoms.
pub fn random_f_fixed<R: Rng>(spec: &Arc<RingSpec>, rng: &mut R, max_coeff: i64) -> DrwForm {
    let inv: u32 = spec.atoms.iter().enumerate().filter(|(_, a)| a.invertible).fold(0, |m, (k, _)| m | (1 << k));
    let mut out = DrwForm::zero(spec);
    for s in (0..=spec.rank()).flat_map(|m| subsets(spec.rank(), m)) {
        if s & !inv != 0 || rng.gen_bool(0.5) {
            continue;
        }
        let c = BigRational::from_integer(rng.gen_range(-max_coeff..=max_coeff).into());
        out.add_term(TermKey { exponents: vec![FracExponent::ZERO; spec.rank()], block: s }, c);
    }
    out
}

impl DrwForm {
    /// Largest absolute numerator among coefficients (diagnostics).
    pub fn max_coefficient(&self) -> BigInt {
        self.terms.values().map(|c| c.numer().abs()).max().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn laurent(p: u64, a: u32, n: u16) -> Arc<RingSpec> {
        Arc::new(RingSpec::laurent(p, a, n).unwrap())
    }

    fn mono(spec: &Arc<RingSpec>, c: BigRational, exps: &[(i64, u32)], block: &[usize]) -> DrwForm {
        let e: Vec<FracExponent> = exps.iter().map(|(n, k)| FracExponent::new(*n, *k, spec.p())).collect();
        DrwForm::monomial(spec, c, &e, block).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let s = laurent(5, 2, 2);
        let d1 = DrwForm::dlog_atom(&s, 0).unwrap();
        let d2 = DrwForm::dlog_atom(&s, 1).unwrap();
        assert!(d1.multiply(&d1).unwrap().is_zero());
        assert_eq!(d1.multiply(&d2).unwrap(), d2.multiply(&d1).unwrap().neg());
        let x = mono(&s, q(1, 1), &[(1, 1), (0, 0)], &[0]);
        let y = mono(&s, q(1, 1), &[(0, 0), (1, 0)], &[1]);
        let expected = mono(&s, q(1, 1), &[(1, 1), (1, 0)], &[0, 1]);
        assert_eq!(x.multiply(&y).unwrap(), expected);
    }

    #[test]
    fn multiply_across_rings_fails() {
        let a = laurent(5, 2, 1);
        let b = laurent(3, 2, 1);
        let x = DrwForm::constant(&a, q(1, 1));
        let y = DrwForm::constant(&b, q(1, 1));
        assert_eq!(x.multiply(&y), Err(DrwError::RingMismatch));
    }

    #[test]
    fn denominator_cap() {
        let s = laurent(3, 2, 1);
        assert!(DrwForm::monomial(&s, q(1, 1), &[FracExponent::new(1, 1, 3)], &[]).is_ok());
        let err = DrwForm::monomial(&s, q(1, 1), &[FracExponent::new(1, 2, 3)], &[]).unwrap_err();
        assert!(matches!(err, DrwError::DenominatorCap { cap: 1, .. }));
    }

    #[test]
    fn positivity_enforced() {
        let s = Arc::new(RingSpec::polynomial(3, 2, 1).unwrap());
        let err = DrwForm::monomial(&s, q(1, 1), &[FracExponent::integer(-1)], &[]).unwrap_err();
        assert!(matches!(err, DrwError::Positivity(_)));
        assert!(DrwForm::dlog_atom(&s, 0).is_err());
    }

    #[test]
    fn differential_examples() {
        let s = laurent(3, 2, 1);
        assert!(DrwForm::constant(&s, q(7, 1)).differential().is_zero());
        let x = mono(&s, q(1, 1), &[(1, 1)], &[]);
        let dx = x.differential();
        assert_eq!(dx, mono(&s, q(1, 3), &[(1, 1)], &[0]));
        let (_, c) = dx.terms().next().unwrap();
        assert_eq!(padic::val_p(c, 3), padic::Valuation::Finite(-1));
        assert!(x.is_integral() && !x.is_in_e());
        assert!(DrwForm::dlog_atom(&s, 0).unwrap().differential().is_zero());
    }

    #[test]
    fn frobenius_and_verschiebung_examples() {
        let s = laurent(5, 3, 1);
        let root = mono(&s, q(1, 1), &[(1, 1)], &[]);
        assert_eq!(root.frobenius(), mono(&s, q(1, 1), &[(1, 0)], &[]));
        let dl = DrwForm::dlog_atom(&s, 0).unwrap();
        assert_eq!(dl.frobenius(), dl);
        let tdl = mono(&s, q(1, 1), &[(1, 0)], &[0]);
        assert_eq!(tdl.frobenius(), mono(&s, q(1, 1), &[(5, 0)], &[0]));
        let t = mono(&s, q(1, 1), &[(1, 0)], &[]);
        assert_eq!(t.verschiebung(), mono(&s, q(5, 1), &[(1, 1)], &[]));
        assert_eq!(DrwForm::constant(&s, q(1, 1)).verschiebung(), DrwForm::constant(&s, q(5, 1)));
    }

    #[test]
    fn verschiebung_at_precision_one_is_zero_class() {
        let s = laurent(3, 1, 1);
        let t = mono(&s, q(1, 1), &[(1, 0)], &[]);
        assert!(t.verschiebung().reduce_mod(1).unwrap().is_zero());
    }

    #[test]
    fn teichmuller_examples() {
        let s = laurent(5, 2, 1);
        let t = DrwForm::teichmuller(&s, &[(0, 1)], 1).unwrap();
        assert_eq!(t, mono(&s, q(1, 1), &[(1, 0)], &[]));
        assert_eq!(DrwForm::teichmuller(&s, &[], 1).unwrap(), DrwForm::constant(&s, q(1, 1)));
        assert_eq!(DrwForm::teichmuller(&s, &[], 2).unwrap(), DrwForm::constant(&s, q(7, 1)));
        let err = DrwForm::teichmuller_rational(&s, &[(0, q(1, 5))], 1).unwrap_err();
        assert!(matches!(err, DrwError::NonIntegralExponent(_)));
    }

    #[test]
    fn teichmuller_is_multiplicative_mod_pa() {
        let s = laurent(7, 3, 2);
        for a in 1..7u64 {
            for b in 1..7u64 {
                let ta = DrwForm::teichmuller(&s, &[(0, 2)], a).unwrap();
                let tb = DrwForm::teichmuller(&s, &[(0, -1), (1, 3)], b).unwrap();
                let tab = DrwForm::teichmuller(&s, &[(0, 1), (1, 3)], (a * b) % 7).unwrap();
                let prod = ta.multiply(&tb).unwrap().reduce_mod(3).unwrap();
                assert_eq!(prod, tab.reduce_mod(3).unwrap());
            }
        }
    }

    #[test]
    fn e_membership_examples() {
        let s = laurent(3, 3, 2);
        // p^i t^{p^-i}
        for i in 0..3u32 {
            let x = mono(&s, padic::p_power(3, i as i64), &[(1, i), (0, 0)], &[]);
            assert!(x.is_in_e());
        }
        assert!(!mono(&s, q(1, 1), &[(1, 1), (0, 0)], &[]).is_in_e());
        let poly = mono(&s, q(4, 1), &[(2, 0), (3, 0)], &[]);
        assert!(poly.is_in_e());
    }

    #[test]
    fn fil_examples() {
        let s = laurent(5, 3, 1);
        // constants: c in Fil^a iff p^a | c
        assert!(DrwForm::constant(&s, q(25, 1)).fil_membership(2).unwrap());
        assert!(!DrwForm::constant(&s, q(5, 1)).fil_membership(2).unwrap());
        // d V^2 (t) = t^{1/25} dlog t
        let t = mono(&s, q(1, 1), &[(1, 0)], &[]);
        let x = t.verschiebung_pow(2).differential();
        assert_eq!(x, mono(&s, q(1, 1), &[(1, 2)], &[0]));
        assert!(x.fil_membership(2).unwrap());
        // p^2 t
        let y = mono(&s, q(25, 1), &[(1, 0)], &[]);
        assert!(y.fil_membership(2).unwrap());
        assert!(y.wa_normal_form(2).unwrap().is_zero());
        assert_eq!(DrwForm::constant(&s, q(1, 1)).wa_normal_form(2).unwrap(), DrwForm::constant(&s, q(1, 1)));
    }

    #[test]
    fn fil_rejects_non_e_input() {
        let s = laurent(5, 2, 1);
        let x = mono(&s, q(1, 1), &[(1, 1)], &[]);
        assert_eq!(x.fil_membership(1), Err(DrwError::NotInE));
        assert!(DrwForm::constant(&s, q(1, 1)).fil_membership(3).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let s = laurent(5, 2, 2);
        let x = mono(&s, q(3, 7), &[(1, 1), (-2, 0)], &[1]);
        let back = DrwForm::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn atom_parsing() {
        for a in [Atom::T(3), Atom::TMinusZ(1, 2), Atom::ZMinusZ(1, 3)] {
            assert_eq!(a.to_string().parse::<Atom>().unwrap(), a);
        }
    }
}
