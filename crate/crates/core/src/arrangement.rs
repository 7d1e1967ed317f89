//! Affine hyperplane arrangements and their Orlik-Solomon algebras.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::logform::{coord_rank, sort_with_sign, FormError, LogAtom, LogForm};
use crate::padic;
use crate::poly::{Poly, Var};
use crate::witt::{DrwError, DrwForm, RingSpec};

pub const DEFAULT_MAX_HYPERPLANES: usize = 12;

#[derive(Debug, Error)]
pub enum ArrangementError {
    #[error("hyperplane {0} has a zero coefficient vector")]
    ZeroHyperplane(usize),
    #[error("hyperplane {0} has {1} coefficients, expected {2}")]
    WrongLength(usize, usize, usize),
    #[error("hyperplanes {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("arrangement has {0} hyperplanes, above the bound {1}")]
    TooLarge(usize, usize),
    #[error("hyperplane {0} is not representable in the target: {1}")]
    UnsupportedHyperplane(usize, String),
    #[error("index {0} out of range")]
    Index(usize),
    #[error("bad number {0:?}")]
    BadNumber(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("invalid arrangement json: {0}")]
    Json(String),
    #[error(transparent)]
    Drw(#[from] DrwError),
    #[error(transparent)]
    Form(#[from] FormError),
}

type Result<T> = std::result::Result<T, ArrangementError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Q,
    Fp(u64),
}

impl Field {
    fn normalize(&self, x: BigRational) -> Result<BigRational> {
        match self {
            Field::Q => Ok(x),
            Field::Fp(p) => {
                let r = padic::PadicScalar::from_rational(&x, *p, 1).map_err(|_| ArrangementError::BadNumber(x.to_string()))?;
                Ok(BigRational::from_integer(BigInt::from(r.value())))
            }
        }
    }

    /// Rank of a matrix with entries in this field.
    pub fn rank(&self, rows: &[Vec<BigRational>]) -> usize {
        match self {
            Field::Q => linalg::rank(rows),
            Field::Fp(p) => {
                let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
                linalg::rank_mod_p(&ints, *p)
            }
        }
    }
}

/// The hyperplane `sum_j coeffs[j] x_j + constant = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
}

impl Hyperplane {
    pub fn new(coeffs: Vec<BigRational>, constant: BigRational) -> Self {
        Self { coeffs, constant }
    }

    pub fn from_ints(coeffs: &[i64], constant: i64) -> Self {
        Self {
            coeffs: coeffs.iter().map(|c| BigRational::from_integer((*c).into())).collect(),
            constant: BigRational::from_integer(constant.into()),
        }
    }

    /// `f` as a polynomial in the coordinates `x_1, x_2, ...`.
    pub fn linear_form(&self) -> Poly {
        let terms: Vec<(Var, BigRational)> =
            self.coeffs.iter().enumerate().map(|(j, c)| (Var::X(j as u16 + 1), c.clone())).collect();
        Poly::linear(&terms, self.constant.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangement {
    field: Field,
    dim: usize,
    hyperplanes: Vec<Hyperplane>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrangementJson {
    field: Field,
    dim: usize,
    hyperplanes: Vec<HyperplaneJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperplaneJson {
    coeffs: Vec<serde_json::Value>,
    #[serde(rename = "const", default)]
    constant: Option<serde_json::Value>,
}

fn parse_number(v: &serde_json::Value) -> Result<BigRational> {
    let s = match v {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.trim().to_string(),
        other => return Err(ArrangementError::BadNumber(other.to_string())),
    };
    let bad = || ArrangementError::BadNumber(s.clone());
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Arrangement {
    pub fn new(field: Field, dim: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self> {
        if let Field::Fp(p) = field {
            if !padic::is_prime(p) {
                return Err(ArrangementError::NotPrime(p));
            }
        }
        let hyperplanes = hyperplanes
            .into_iter()
            .map(|h| {
                Ok(Hyperplane {
                    coeffs: h.coeffs.into_iter().map(|c| field.normalize(c)).collect::<Result<Vec<_>>>()?,
                    constant: field.normalize(h.constant)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.coeffs.len() != dim {
                return Err(ArrangementError::WrongLength(i, h.coeffs.len(), dim));
            }
            if h.coeffs.iter().all(Zero::is_zero) {
                return Err(ArrangementError::ZeroHyperplane(i));
            }
        }
        for i in 0..hyperplanes.len() {
            for j in i + 1..hyperplanes.len() {
                let rows: Vec<Vec<BigRational>> = [i, j]
                    .iter()
                    .map(|&k| {
                        let mut r = hyperplanes[k].coeffs.clone();
                        r.push(hyperplanes[k].constant.clone());
                        r
                    })
                    .collect();
                if field.rank(&rows) < 2 {
                    return Err(ArrangementError::Duplicate(i, j));
                }
            }
        }
        Ok(Self { field, dim, hyperplanes })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: ArrangementJson = serde_json::from_value(v.clone()).map_err(|e| ArrangementError::Json(e.to_string()))?;
        let hs = j
            .hyperplanes
            .iter()
            .map(|h| {
                let coeffs = h.coeffs.iter().map(parse_number).collect::<Result<Vec<_>>>()?;
                let constant = match &h.constant {
                    Some(c) => parse_number(c)?,
                    None => BigRational::zero(),
                };
                Ok(Hyperplane { coeffs, constant })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.field, j.dim, hs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = ArrangementJson {
            field: self.field,
            dim: self.dim,
            hyperplanes: self
                .hyperplanes
                .iter()
                .map(|h| HyperplaneJson {
                    coeffs: h.coeffs.iter().map(|c| serde_json::Value::String(c.to_string())).collect(),
                    constant: Some(serde_json::Value::String(h.constant.to_string())),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("serializable")
    }

    fn matrices(&self, subset: &[usize]) -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>) {
        let a: Vec<Vec<BigRational>> = subset.iter().map(|&i| self.hyperplanes[i].coeffs.clone()).collect();
        let ab = subset
            .iter()
            .map(|&i| {
                let mut r = self.hyperplanes[i].coeffs.clone();
                r.push(self.hyperplanes[i].constant.clone());
                r
            })
            .collect();
        (a, ab)
    }

    /// Linear parts independent and the affine system consistent.
    pub fn general_position(&self, subset: &[usize]) -> bool {
        let (a, ab) = self.matrices(subset);
        let r = self.field.rank(&a);
        r == subset.len() && r == self.field.rank(&ab)
    }

    /// The common intersection of the hyperplanes in `subset` is nonempty.
    pub fn intersects(&self, subset: &[usize]) -> bool {
        let (a, ab) = self.matrices(subset);
        self.field.rank(&a) == self.field.rank(&ab)
    }

    pub fn linearly_independent(&self, subset: &[usize]) -> bool {
        let (a, _) = self.matrices(subset);
        self.field.rank(&a) == subset.len()
    }
}

/// Element of the exterior algebra on the hyperplane generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OSElement {
    degree: usize,
    terms: BTreeMap<Vec<usize>, BigRational>,
}

impl OSElement {
    pub fn zero(degree: usize) -> Self {
        Self { degree, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::tuple(&[])
    }

    /// The wedge `e_{i_1} ... e_{i_m}` in the given order.
    pub fn tuple(indices: &[usize]) -> Self {
        let mut out = Self::zero(indices.len());
        out.add_term(indices.to_vec(), BigRational::one());
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, indices: Vec<usize>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let Some((key, sign)) = sort_with_sign(indices) else { return };
        let c = if sign < 0 { -c } else { c };
        let slot = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.degree);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut k = a.clone();
                k.extend_from_slice(b);
                out.add_term(k, x * y);
            }
        }
        out
    }

    /// `sum_k (-1)^k e_{i_1} .. omit(i_k) .. e_{i_m}`.
    pub fn boundary(&self) -> Self {
        let mut out = Self::zero(self.degree.saturating_sub(1));
        for (a, x) in &self.terms {
            for k in 0..a.len() {
                let mut rest = a.clone();
                rest.remove(k);
                let c = if k % 2 == 0 { x.clone() } else { -x.clone() };
                out.add_term(rest, c);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct DegreeData {
    /// all index subsets of this size, i.e. the columns
    subsets: Vec<Vec<usize>>,
    column: BTreeMap<Vec<usize>, usize>,
    /// reduced relation rows and their pivot columns
    relations: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    basis: Vec<usize>,
}

/// The Orlik-Solomon algebra with an explicit basis per degree.
#[derive(Debug, Clone)]
pub struct OSAlgebra {
    arrangement: Arc<Arrangement>,
    degrees: Vec<DegreeData>,
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    crate::witt::subsets(n, k)
        .into_iter()
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

impl OSAlgebra {
    pub fn build(arr: &Arrangement) -> Result<Self> {
        Self::build_with_bound(arr, DEFAULT_MAX_HYPERPLANES)
    }

    pub fn build_with_bound(arr: &Arrangement, bound: usize) -> Result<Self> {
        let n = arr.len();
        if n > bound {
            return Err(ArrangementError::TooLarge(n, bound));
        }
        let top = n.min(arr.dim());
        // relation generators: empty intersections, and boundaries of
        // dependent tuples that do meet
        let mut generators: Vec<OSElement> = Vec::new();
        for k in 1..=n.min(top + 1) {
            for s in all_subsets(n, k) {
                if !arr.intersects(&s) {
                    if k <= top {
                        generators.push(OSElement::tuple(&s));
                    }
                } else if !arr.linearly_independent(&s) {
                    generators.push(OSElement::tuple(&s).boundary());
                }
            }
        }
        let mut degrees = Vec::new();
        for k in 0..=top {
            let subsets = all_subsets(n, k);
            let column: BTreeMap<Vec<usize>, usize> = subsets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
            let mut rows = Vec::new();
            for g in generators.iter().filter(|g| g.degree() <= k) {
                for u in all_subsets(n, k - g.degree()) {
                    let prod = OSElement::tuple(&u).wedge(g);
                    if prod.is_zero() {
                        continue;
                    }
                    let mut row = vec![BigRational::zero(); subsets.len()];
                    for (t, c) in prod.terms() {
                        row[column[t]] = c.clone();
                    }
                    rows.push(row);
                }
            }
            // eliminate lexicographically late tuples first, so the basis
            // consists of tuples using small indices
            let order: Vec<usize> = (0..subsets.len()).rev().collect();
            let (relations, pivots) = linalg::rref_with_order(&rows, &order);
            let basis = (0..subsets.len()).filter(|c| !pivots.contains(c)).collect();
            degrees.push(DegreeData { subsets, column, relations, pivots, basis });
        }
        Ok(Self { arrangement: Arc::new(arr.clone()), degrees })
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn top_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    /// Dimensions per degree with trailing zeros removed.
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.degrees.iter().map(|x| x.basis.len()).collect();
        while d.len() > 1 && d.last() == Some(&0) {
            d.pop();
        }
        d
    }

    pub fn dim(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.basis.len())
    }

    /// Basis tuples of degree `k`.
    pub fn basis(&self, k: usize) -> Vec<Vec<usize>> {
        self.degrees.get(k).map_or_else(Vec::new, |d| d.basis.iter().map(|&c| d.subsets[c].clone()).collect())
    }

    pub fn basis_element(&self, k: usize, i: usize) -> OSElement {
        OSElement::tuple(&self.basis(k)[i])
    }

    /// Coordinates of an exterior element in the basis of its degree.
    pub fn coordinates(&self, x: &OSElement) -> Vec<BigRational> {
        let Some(d) = self.degrees.get(x.degree()) else {
            return Vec::new();
        };
        let mut v = vec![BigRational::zero(); d.subsets.len()];
        for (t, c) in x.terms() {
            v[d.column[t]] += c;
        }
        for (row, &p) in d.relations.iter().zip(&d.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        d.basis.iter().map(|&c| v[c].clone()).collect()
    }

    pub fn from_coordinates(&self, k: usize, coords: &[BigRational]) -> OSElement {
        let mut out = OSElement::zero(k);
        for (t, c) in self.basis(k).into_iter().zip(coords) {
            out.add_term(t, c.clone());
        }
        out
    }

    /// Canonical representative: the element rewritten in the basis.
    pub fn reduce(&self, x: &OSElement) -> OSElement {
        if x.degree() > self.top_degree() {
            return OSElement::zero(x.degree());
        }
        self.from_coordinates(x.degree(), &self.coordinates(x))
    }

    pub fn multiply(&self, a: &OSElement, b: &OSElement) -> OSElement {
        self.reduce(&a.wedge(b))
    }

    /// `psi` into rational log forms: `e_i -> d log f_i`.
    pub fn psi_rational(&self, x: &OSElement) -> Result<LogForm> {
        let arr = &self.arrangement;
        if arr.field() != Field::Q {
            return Err(ArrangementError::UnsupportedHyperplane(0, "rational target needs a field of characteristic 0".into()));
        }
        let atoms = arr
            .hyperplanes()
            .iter()
            .map(|h| LogAtom::new(&h.linear_form()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut out = LogForm::zero(x.degree());
        for (t, c) in x.terms() {
            let block = t.iter().map(|&i| atoms[i].clone()).collect();
            out.add_assign(&LogForm::term(crate::ratfn::RationalCoeff::constant(c.clone()), block));
        }
        Ok(out)
    }

    /// `psi` into de Rham-Witt forms. The linear parts must be independent;
    /// then the `f_i` are coordinates of the ambient space and `d log f_i`
    /// becomes the `d log` of the `i`-th invertible coordinate.
    pub fn psi_drw(&self, x: &OSElement, p: u64, precision: u32) -> Result<DrwForm> {
        let arr = &self.arrangement;
        let all: Vec<usize> = (0..arr.len()).collect();
        if !arr.linearly_independent(&all) {
            return Err(ArrangementError::UnsupportedHyperplane(
                arr.len().saturating_sub(1),
                "linear parts are dependent, so the forms are not coordinates".into(),
            ));
        }
        let spec = Arc::new(RingSpec::laurent(p, precision, arr.len() as u16)?);
        let mut out = DrwForm::zero(&spec);
        for (t, c) in x.terms() {
            let mut term = DrwForm::constant(&spec, c.clone());
            for &i in t {
                term = term.multiply(&DrwForm::dlog_atom(&spec, i)?)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiDegree {
    pub degree: usize,
    pub os_dim: usize,
    pub psi_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiIsoReport {
    pub degrees: Vec<PsiDegree>,
    pub ok: bool,
}

/// Compare, degree by degree, the rank of the `psi`-images of the basis with
/// the dimension of the Orlik-Solomon algebra.
pub fn verify_psi_iso(os: &OSAlgebra, max_degree: usize) -> Result<PsiIsoReport> {
    let mut degrees = Vec::new();
    for k in 0..=max_degree.min(os.top_degree()) {
        let images = (0..os.dim(k))
            .map(|i| Ok(os.psi_rational(&os.basis_element(k, i))?.expand_coordinates()))
            .collect::<Result<Vec<_>>>()?;
        degrees.push(PsiDegree { degree: k, os_dim: os.dim(k), psi_rank: coord_rank(&images) });
    }
    let ok = degrees.iter().all(|d| d.os_dim == d.psi_rank);
    Ok(PsiIsoReport { degrees, ok })
}

pub const FIXTURE_NAMES: &[&str] =
    &["empty", "single", "threelines", "parallel", "generic4", "coordinate3", "braid3", "points1", "points2", "points3", "points4", "points5", "points6"];

/// Bundled desk-scale arrangements.
pub fn fixture(name: &str) -> Result<Arrangement> {
    let h = Hyperplane::from_ints;
    let (dim, hs) = match name {
        "empty" => (2, vec![]),
        "single" => (1, vec![h(&[1], 0)]),
        "threelines" => (2, vec![h(&[1, 0], 0), h(&[0, 1], 0), h(&[1, -1], 0)]),
        "parallel" => (2, vec![h(&[1, 0], 0), h(&[1, 0], -1)]),
        "generic4" => (2, vec![h(&[1, 0], 0), h(&[0, 1], 0), h(&[1, 1], -1), h(&[1, -2], 3)]),
        "coordinate3" => (3, vec![h(&[1, 0, 0], 0), h(&[0, 1, 0], 0), h(&[0, 0, 1], 0)]),
        "braid3" => (3, vec![h(&[1, -1, 0], 0), h(&[1, 0, -1], 0), h(&[0, 1, -1], 0)]),
        _ => match name.strip_prefix("points").and_then(|s| s.parse::<i64>().ok()) {
            Some(k) if (1..=6).contains(&k) => (1, (0..k).map(|i| h(&[1], -i)).collect()),
            _ => return Err(ArrangementError::UnknownFixture(name.into())),
        },
    };
    Arrangement::new(Field::Q, dim, hs)
}

/// `n` distinct points `x = 0, 1, .., n - 1` on the line.
pub fn points_on_line(n: usize) -> Arrangement {
    let hs = (0..n as i64).map(|i| Hyperplane::from_ints(&[1], -i)).collect();
    Arrangement::new(Field::Q, 1, hs).expect("distinct points")
}

/// Euler characteristic `sum_k (-1)^k d_k`.
pub fn euler(dims: &[usize]) -> i64 {
    dims.iter().enumerate().map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_position_examples() {
        let arr = fixture("threelines").unwrap();
        assert!(arr.general_position(&[0, 1]));
        assert!(!arr.general_position(&[0, 1, 2]));
        let par = fixture("parallel").unwrap();
        assert!(!par.general_position(&[0, 1]));
    }

    #[test]
    fn os_dimensions() {
        assert_eq!(OSAlgebra::build(&fixture("empty").unwrap()).unwrap().dims(), vec![1]);
        assert_eq!(OSAlgebra::build(&fixture("threelines").unwrap()).unwrap().dims(), vec![1, 3, 2]);
        assert_eq!(OSAlgebra::build(&points_on_line(4)).unwrap().dims(), vec![1, 4]);
        assert_eq!(OSAlgebra::build(&fixture("parallel").unwrap()).unwrap().dims(), vec![1, 2]);
        assert_eq!(OSAlgebra::build(&fixture("coordinate3").unwrap()).unwrap().dims(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn arnold_relation_maps_to_zero() {
        let os = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap();
        let rel = OSElement::tuple(&[0, 1, 2]).boundary();
        assert!(os.reduce(&rel).is_zero());
        assert!(os.psi_rational(&rel).unwrap().is_zero());
    }

    #[test]
    fn drw_target_needs_independent_forms() {
        let os = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap();
        assert!(matches!(
            os.psi_drw(&OSElement::tuple(&[0]), 5, 2),
            Err(ArrangementError::UnsupportedHyperplane(..))
        ));
        let os = OSAlgebra::build(&fixture("coordinate3").unwrap()).unwrap();
        let img = os.psi_drw(&OSElement::tuple(&[0, 2]), 5, 2).unwrap();
        assert!(img.is_f_fixed());
        assert!(img.differential().is_zero());
    }

    #[test]
    fn oversize_is_rejected() {
        let arr = points_on_line(5);
        assert!(matches!(OSAlgebra::build_with_bound(&arr, 4), Err(ArrangementError::TooLarge(5, 4))));
    }

    #[test]
    fn json_roundtrip() {
        let v = serde_json::json!({"field": "Q", "dim": 2, "hyperplanes": [
            {"coeffs": [1, 0], "const": 0}, {"coeffs": ["1/2", 1], "const": "-3"}]});
        let arr = Arrangement::from_json(&v).unwrap();
        assert_eq!(Arrangement::from_json(&arr.to_json()).unwrap(), arr);
        let fp = serde_json::json!({"field": {"Fp": 5}, "dim": 1, "hyperplanes": [
            {"coeffs": [1], "const": 0}, {"coeffs": [1], "const": 5}]});
        assert!(matches!(Arrangement::from_json(&fp), Err(ArrangementError::Duplicate(0, 1))));
    }
}
