//! Milnor K-symbols over the field of rational functions, checked rewriting
//! with the defining relations, and the maps to the Orlik-Solomon algebra and
//! to logarithmic forms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{Arrangement, Field, OSAlgebra, OSElement};
use crate::logform::{coord_rank, LogAtom, LogForm};
use crate::poly::Poly;
use crate::ratfn::{RatError, RationalCoeff};

/// The derivation of `{x, x - y} - {y, x - y} = {x, y}`.
pub const GELFAND_FIXTURE: &str = include_str!("../fixtures/gelfand.json");

#[derive(Debug, Error)]
pub enum MilnorError {
    #[error("step {index}: {reason}")]
    MalformedStep { index: usize, reason: String },
    #[error("symbol entries must be nonzero")]
    ZeroEntry,
    #[error("entry {0} is not a product of the arrangement's linear forms")]
    OutsideSubgroup(String),
    #[error("entry {0} cannot be written with d log atoms")]
    Unrepresentable(String),
    #[error("malformed symbol: {0}")]
    Json(String),
    #[error(transparent)]
    Rat(#[from] RatError),
}

type Result<T> = std::result::Result<T, MilnorError>;

pub type Entry = RationalCoeff;

pub fn parse_entry(s: &str) -> Result<Entry> {
    let e = RationalCoeff::parse(s)?;
    if e.is_zero() {
        return Err(MilnorError::ZeroEntry);
    }
    Ok(e)
}

/// A formal rational combination of tuples `{g_1, .., g_m}`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct KSymbol {
    degree: usize,
    terms: BTreeMap<Vec<Entry>, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    degree: usize,
    terms: Vec<SymbolTermJson>,
}

#[derive(Serialize, Deserialize)]
struct SymbolTermJson {
    coeff: String,
    tuple: Vec<String>,
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let b: BigInt = b.trim().parse().ok()?;
            (!b.is_zero()).then_some(())?;
            Some(BigRational::new(a.trim().parse().ok()?, b))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn coeff_from_json(v: &serde_json::Value) -> Option<BigRational> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(|x| BigRational::from_integer(x.into())),
        serde_json::Value::String(s) => parse_rational(s),
        _ => None,
    }
}

impl KSymbol {
    pub fn zero(degree: usize) -> Self {
        Self { degree, terms: BTreeMap::new() }
    }

    pub fn tuple(entries: Vec<Entry>) -> Self {
        let mut out = Self::zero(entries.len());
        out.add_term(entries, BigRational::one());
        out
    }

    pub fn parse_tuple(entries: &[&str]) -> Result<Self> {
        Ok(Self::tuple(entries.iter().map(|s| parse_entry(s)).collect::<Result<Vec<_>>>()?))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Entry>, BigRational> {
        &self.terms
    }

    /// Formally zero: no tuple survives after merging.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, tuple: Vec<Entry>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(tuple.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&tuple);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.degree);
        for (t, x) in &self.terms {
            out.add_term(t.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Product by concatenation of tuples.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut t = a.clone();
                t.extend_from_slice(b);
                out.add_term(t, x * y);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = SymbolJson {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| SymbolTermJson { coeff: c.to_string(), tuple: t.iter().map(ToString::to_string).collect() })
                .collect(),
        };
        serde_json::to_value(j).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: SymbolJson = serde_json::from_value(v.clone()).map_err(|e| MilnorError::Json(e.to_string()))?;
        let mut out = Self::zero(j.degree);
        for t in j.terms {
            if t.tuple.len() != j.degree {
                return Err(MilnorError::Json(format!("tuple of length {} in a degree {} symbol", t.tuple.len(), j.degree)));
            }
            let c = parse_rational(&t.coeff).ok_or_else(|| MilnorError::Json(format!("bad coefficient {:?}", t.coeff)))?;
            let tuple = t.tuple.iter().map(|s| parse_entry(s)).collect::<Result<Vec<_>>>()?;
            out.add_term(tuple, c);
        }
        Ok(out)
    }
}

impl fmt::Display for KSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !c.abs().is_one() {
                write!(f, "{}*", c.abs())?;
            }
            let entries: Vec<String> = t.iter().map(ToString::to_string).collect();
            write!(f, "{{{}}}", entries.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for KSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Bilinearity,
    Steinberg,
    InverseAntisymmetry,
    TorsionHalf,
}

/// One rewriting step: add `coeff` times a relation `R = 0` to the current
/// symbol. `position` is the slot of `tuple` the relation acts on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivationStep {
    pub rule: Rule,
    pub position: usize,
    pub data: serde_json::Value,
}

#[derive(Deserialize)]
struct StepData {
    tuple: Vec<String>,
    #[serde(default)]
    coeff: Option<serde_json::Value>,
    #[serde(default)]
    factors: Vec<FactorJson>,
    #[serde(default)]
    form: Option<String>,
}

#[derive(Deserialize)]
struct FactorJson {
    entry: String,
    exp: i64,
}

/// A relation together with the multiple of it that a step adds.
#[derive(Debug, Clone)]
pub struct RuleInstance {
    pub relation: KSymbol,
    pub coeff: BigRational,
}

fn replace(tuple: &[Entry], slot: usize, with: Entry) -> Vec<Entry> {
    let mut t = tuple.to_vec();
    t[slot] = with;
    t
}

impl DerivationStep {
    /// Outer error: the step is malformed. Inner error: it is well formed but
    /// does not match the rule's schema.
    pub fn instantiate(&self, index: usize) -> Result<std::result::Result<RuleInstance, String>> {
        let bad = |reason: String| MilnorError::MalformedStep { index, reason };
        let data: StepData = serde_json::from_value(self.data.clone()).map_err(|e| bad(e.to_string()))?;
        let tuple = data
            .tuple
            .iter()
            .map(|s| parse_entry(s).map_err(|e| bad(format!("entry {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let coeff = match &data.coeff {
            None => BigRational::one(),
            Some(v) => coeff_from_json(v).ok_or_else(|| bad(format!("bad coefficient {v}")))?,
        };
        let k = self.position;
        let width = match self.rule {
            Rule::Bilinearity => 1,
            Rule::Steinberg | Rule::TorsionHalf => 2,
            Rule::InverseAntisymmetry => 2,
        };
        if k + width > tuple.len() {
            return Err(bad(format!("position {k} out of range for a tuple of length {}", tuple.len())));
        }
        let one = Entry::one();
        let relation = match self.rule {
            Rule::Bilinearity => {
                if data.factors.is_empty() {
                    return Err(bad("bilinearity needs factors".into()));
                }
                let mut product = Entry::one();
                let mut rel = KSymbol::tuple(tuple.clone());
                for f in &data.factors {
                    let g = parse_entry(&f.entry).map_err(|e| bad(format!("factor {:?}: {e}", f.entry)))?;
                    let e = i32::try_from(f.exp).map_err(|_| bad("exponent out of range".into()))?;
                    product = product.mul(&g.pow(e)?);
                    let mut term = KSymbol::zero(tuple.len());
                    term.add_term(replace(&tuple, k, g), BigRational::from_integer((-f.exp).into()));
                    rel = rel.add(&term);
                }
                if product != tuple[k] {
                    return Ok(Err(format!("factors multiply to {product}, not {}", tuple[k])));
                }
                rel
            }
            Rule::Steinberg => {
                if tuple[k] == one {
                    return Ok(Err("steinberg needs an entry different from 1".into()));
                }
                if tuple[k + 1] != one.sub(&tuple[k]) {
                    return Ok(Err(format!("{} is not 1 - ({})", tuple[k + 1], tuple[k])));
                }
                KSymbol::tuple(tuple)
            }
            Rule::InverseAntisymmetry => match data.form.as_deref() {
                Some("swap") | None => {
                    let mut swapped = tuple.clone();
                    swapped.swap(k, k + 1);
                    KSymbol::tuple(tuple).add(&KSymbol::tuple(swapped))
                }
                Some("negation") => {
                    if tuple[k + 1] != tuple[k].neg() {
                        return Ok(Err(format!("{} is not -({})", tuple[k + 1], tuple[k])));
                    }
                    KSymbol::tuple(tuple)
                }
                Some(other) => return Err(bad(format!("unknown form {other:?}"))),
            },
            Rule::TorsionHalf => {
                if tuple[k] != tuple[k + 1] {
                    return Ok(Err(format!("{} and {} differ", tuple[k], tuple[k + 1])));
                }
                KSymbol::tuple(tuple)
            }
        };
        Ok(Ok(RuleInstance { relation, coeff }))
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct Derivation {
    pub start: serde_json::Value,
    pub end: serde_json::Value,
    /// allow `{y, y} = 0`, i.e. work with coefficients in `Z[1/2]`
    #[serde(default)]
    pub half_torsion: bool,
    pub steps: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationVerdict {
    pub valid: bool,
    pub steps_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub final_symbol: String,
}

fn coefficient_allowed(c: &BigRational, half_torsion: bool) -> bool {
    let mut d = c.denom().clone();
    if !half_torsion {
        return d.is_one();
    }
    let two = BigInt::from(2);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    d.is_one()
}

/// Check a chain of rewriting steps from `start` to `end`.
pub fn verify_derivation(start: &KSymbol, steps: &[DerivationStep], end: &KSymbol, half_torsion: bool) -> Result<DerivationVerdict> {
    let mut current = start.clone();
    let fail = |i: usize, reason: String, current: &KSymbol| DerivationVerdict {
        valid: false,
        steps_checked: i,
        failed_step: Some(i),
        reason: Some(reason),
        final_symbol: current.to_string(),
    };
    for (i, step) in steps.iter().enumerate() {
        let inst = match step.instantiate(i)? {
            Ok(inst) => inst,
            Err(reason) => return Ok(fail(i, reason, &current)),
        };
        if step.rule == Rule::TorsionHalf && !half_torsion {
            return Ok(fail(i, "torsion-half needs coefficients with 1/2 adjoined".into(), &current));
        }
        if !coefficient_allowed(&inst.coeff, half_torsion) {
            return Ok(fail(i, format!("coefficient {} not allowed", inst.coeff), &current));
        }
        if inst.relation.degree() != current.degree() && !current.is_zero() {
            return Ok(fail(i, "degree mismatch".into(), &current));
        }
        current = current.add(&inst.relation.scale(&inst.coeff));
    }
    if &current != end {
        return Ok(DerivationVerdict {
            valid: false,
            steps_checked: steps.len(),
            failed_step: None,
            reason: Some(format!("chain ends at {current}, expected {end}")),
            final_symbol: current.to_string(),
        });
    }
    Ok(DerivationVerdict { valid: true, steps_checked: steps.len(), failed_step: None, reason: None, final_symbol: current.to_string() })
}

/// Parse and check a derivation document.
pub fn verify_derivation_json(v: &serde_json::Value) -> Result<DerivationVerdict> {
    let d: Derivation = serde_json::from_value(v.clone()).map_err(|e| MilnorError::Json(e.to_string()))?;
    let start = KSymbol::from_json(&d.start)?;
    let end = KSymbol::from_json(&d.end)?;
    let steps = d
        .steps
        .iter()
        .enumerate()
        .map(|(index, s)| {
            serde_json::from_value::<DerivationStep>(s.clone())
                .map_err(|e| MilnorError::MalformedStep { index, reason: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    verify_derivation(&start, &steps, &end, d.half_torsion)
}

/// Split a nonzero polynomial as `unit * prod atoms^e`, dividing by the
/// candidate linear forms and then by coordinate variables.
fn factor_poly(p: &Poly, candidates: &[Poly]) -> Option<(BigRational, Vec<(Poly, i64)>)> {
    let mut rest = p.clone();
    let mut out: Vec<(Poly, i64)> = Vec::new();
    let m = rest.monomial_content();
    for (v, e) in m.pairs() {
        out.push((Poly::var(*v), *e as i64));
    }
    rest = rest.div_exact(&Poly::monomial(m, BigRational::one()))?;
    for c in candidates {
        if c.total_degree() == 0 {
            continue;
        }
        let mut e = 0;
        while let Some(q) = rest.div_exact(c) {
            if rest.total_degree() == 0 {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((c.clone(), e));
        }
    }
    match rest.total_degree() {
        0 => Some((rest.as_constant().expect("constant"), out)),
        1 => {
            let (c, prim) = rest.primitive();
            out.push((prim, 1));
            Some((c, out))
        }
        _ => None,
    }
}

/// `unit * prod f^e` for an entry, with `f` primitive linear forms.
pub fn factor_entry(g: &Entry, candidates: &[Poly]) -> Option<(BigRational, Vec<(Poly, i64)>)> {
    let (unit, mut factors) = factor_poly(g.numerator(), candidates)?;
    for (f, e) in g.denominator_factors() {
        factors.push((f.clone(), -(*e as i64)));
    }
    let mut merged: BTreeMap<Poly, i64> = BTreeMap::new();
    for (f, e) in factors {
        let prim = f.primitive().1;
        *merged.entry(prim).or_insert(0) += e;
    }
    merged.retain(|_, e| *e != 0);
    Some((unit, merged.into_iter().collect()))
}

fn arrangement_forms(arr: &Arrangement) -> Vec<Poly> {
    arr.hyperplanes().iter().map(|h| h.linear_form().primitive().1).collect()
}

fn exponent_vector(g: &Entry, forms: &[Poly]) -> Result<Vec<i64>> {
    let (_, factors) = factor_entry(g, forms).ok_or_else(|| MilnorError::OutsideSubgroup(g.to_string()))?;
    let mut v = vec![0; forms.len()];
    for (f, e) in factors {
        let i = forms.iter().position(|h| *h == f).ok_or_else(|| MilnorError::OutsideSubgroup(g.to_string()))?;
        v[i] += e;
    }
    Ok(v)
}

/// `chi`: `{f_i1, .., f_im} -> e_i1 ... e_im`, multilinear, reduced in the
/// Orlik-Solomon algebra. Scalars go to zero.
pub fn chi(sym: &KSymbol, os: &OSAlgebra) -> Result<OSElement> {
    let forms = arrangement_forms(os.arrangement());
    let mut out = OSElement::zero(sym.degree());
    for (tuple, c) in sym.terms() {
        let vectors = tuple.iter().map(|g| exponent_vector(g, &forms)).collect::<Result<Vec<_>>>()?;
        let mut acc = OSElement::one().scale(c);
        for v in &vectors {
            let mut deg1 = OSElement::zero(1);
            for (i, e) in v.iter().enumerate() {
                deg1 = deg1.add(&OSElement::tuple(&[i]).scale(&BigRational::from_integer((*e).into())));
            }
            acc = acc.wedge(&deg1);
        }
        out = out.add(&acc);
    }
    Ok(os.reduce(&out))
}

fn entry_candidates(sym: &KSymbol) -> Vec<Poly> {
    let mut c: Vec<Poly> = Vec::new();
    for t in sym.terms().keys() {
        for g in t {
            c.extend(g.denominator_factors().keys().cloned());
            if g.numerator().total_degree() == 1 {
                c.push(g.numerator().primitive().1);
            }
        }
    }
    c.sort();
    c.dedup();
    c
}

/// `{g_1, .., g_m} -> d log g_1 ∧ .. ∧ d log g_m`.
pub fn dlog_realize(sym: &KSymbol) -> Result<LogForm> {
    let candidates = entry_candidates(sym);
    let mut out = LogForm::zero(sym.degree());
    for (tuple, c) in sym.terms() {
        let mut acc = LogForm::scalar(RationalCoeff::constant(c.clone()));
        for g in tuple {
            let (_, factors) = factor_entry(g, &candidates).ok_or_else(|| MilnorError::Unrepresentable(g.to_string()))?;
            let mut one_form = LogForm::zero(1);
            for (f, e) in factors {
                let atom = LogAtom::new(&f).map_err(|_| MilnorError::Unrepresentable(g.to_string()))?;
                one_form.add_assign(&LogForm::dlog(atom).scale_rational(&BigRational::from_integer(e.into())));
            }
            acc = acc.wedge(&one_form);
        }
        out.add_assign(&acc);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub degree: usize,
    pub symbols: usize,
    pub chi_rank: usize,
    /// `None` when the base field is not of characteristic zero
    pub dlog_rank: Option<usize>,
    pub os_dim: usize,
}

/// Degree-2 symbols in the `f_i` and their pairwise products, up to the
/// budget, compared by rank against `dim A_2`.
pub fn chi_rank_probe(os: &OSAlgebra, budget: usize) -> Result<ProbeReport> {
    let forms = arrangement_forms(os.arrangement());
    let mut entries: Vec<Poly> = forms.clone();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            entries.push(forms[i].mul(&forms[j]));
        }
    }
    let mut symbols = Vec::new();
    'outer: for a in &entries {
        for b in &entries {
            if symbols.len() >= budget {
                break 'outer;
            }
            symbols.push(KSymbol::tuple(vec![Entry::from_poly(a.clone()), Entry::from_poly(b.clone())]));
        }
    }
    let chis = symbols.par_iter().map(|s| chi(s, os)).collect::<Result<Vec<_>>>()?;
    let chi_rows: Vec<Vec<BigRational>> = chis.iter().map(|x| os.coordinates(x)).collect();
    let chi_rank = if os.dim(2) == 0 { 0 } else { crate::linalg::rank(&chi_rows) };
    let dlog_rank = if os.arrangement().field() == Field::Q {
        let forms = symbols
            .par_iter()
            .map(|s| Ok(dlog_realize(s)?.expand_coordinates()))
            .collect::<Result<Vec<_>>>()?;
        Some(coord_rank(&forms))
    } else {
        None
    };
    Ok(ProbeReport { degree: 2, symbols: symbols.len(), chi_rank, dlog_rank, os_dim: os.dim(2) })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{fixture, OSAlgebra};

    fn gelfand() -> serde_json::Value {
        serde_json::from_str(GELFAND_FIXTURE).unwrap()
    }

    #[test]
    fn gelfand_fixture_verifies() {
        let v = verify_derivation_json(&gelfand()).unwrap();
        assert!(v.valid, "{v:?}");
    }

    #[test]
    fn gelfand_needs_half_torsion() {
        let mut d = gelfand();
        d["half_torsion"] = serde_json::Value::Bool(false);
        let v = verify_derivation_json(&d).unwrap();
        assert!(!v.valid);
    }

    #[test]
    fn empty_chain() {
        let s = KSymbol::parse_tuple(&["x", "y"]).unwrap();
        assert!(verify_derivation(&s, &[], &s, false).unwrap().valid);
    }

    #[test]
    fn steinberg_schema_mismatch() {
        let step = DerivationStep {
            rule: Rule::Steinberg,
            position: 0,
            data: serde_json::json!({"tuple": ["x", "1 - x^2"], "coeff": -1}),
        };
        let s = KSymbol::parse_tuple(&["x", "1 - x^2"]).unwrap();
        let v = verify_derivation(&s, &[step], &KSymbol::zero(2), false).unwrap();
        assert!(!v.valid);
        assert_eq!(v.failed_step, Some(0));
    }

    #[test]
    fn malformed_step_is_tagged() {
        let mut d = gelfand();
        d["steps"][3]["data"] = serde_json::json!({"tuple": ["x", "(("]});
        match verify_derivation_json(&d) {
            Err(MilnorError::MalformedStep { index, .. }) => assert_eq!(index, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chi_examples() {
        let os = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap();
        let s = KSymbol::parse_tuple(&["x*y"]).unwrap();
        assert_eq!(chi(&s, &os).unwrap(), os.reduce(&OSElement::tuple(&[0]).add(&OSElement::tuple(&[1]))));
        assert!(chi(&KSymbol::parse_tuple(&["3"]).unwrap(), &os).unwrap().is_zero());
        let g = KSymbol::parse_tuple(&["x", "x - y"])
            .unwrap()
            .sub(&KSymbol::parse_tuple(&["y", "x - y"]).unwrap())
            .sub(&KSymbol::parse_tuple(&["x", "y"]).unwrap());
        assert!(chi(&g, &os).unwrap().is_zero());
        assert!(dlog_realize(&g).unwrap().is_zero());
        assert!(matches!(chi(&KSymbol::parse_tuple(&["x + 1"]).unwrap(), &os), Err(MilnorError::OutsideSubgroup(_))));
    }

    #[test]
    fn probe_examples() {
        let os = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap();
        let r = chi_rank_probe(&os, 20).unwrap();
        assert_eq!((r.chi_rank, r.dlog_rank, r.os_dim), (2, Some(2), 2));
        let os = OSAlgebra::build(&fixture("parallel").unwrap()).unwrap();
        let r = chi_rank_probe(&os, 20).unwrap();
        assert_eq!((r.chi_rank, r.dlog_rank, r.os_dim), (0, Some(0), 0));
        let os = OSAlgebra::build(&fixture("single").unwrap()).unwrap();
        assert_eq!(chi_rank_probe(&os, 20).unwrap().chi_rank, 0);
    }
}
