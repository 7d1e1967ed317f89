//! Check suites behind the command-line subcommands. Every suite is a pure
//! function of its configuration and produces a [`Report`] whose records are
//! sorted by id, so equal configurations give byte-identical JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::aomoto::AomotoComplex;
use crate::arrangement::{self, euler, Arrangement, OSAlgebra, OSElement};
use crate::kz::{self, CasimirVariant, KzParams, FROZEN_READING};
use crate::milnor::{self, KSymbol};
use crate::padic::{self, PadicScalar};
use crate::witt::{self, DrwForm, FracExponent, RingSpec, SampleBounds};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn config_err(msg: impl Into<String>) -> SuiteError {
    SuiteError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    /// The invariant or identity under test.
    pub reference: String,
    pub status: Status,
    pub payload: Value,
}

impl Record {
    pub fn new(id: impl Into<String>, reference: impl Into<String>, ok: bool, payload: Value) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self { id: id.into(), reference: reference.into(), status, payload }
    }

    pub fn info(id: impl Into<String>, reference: impl Into<String>, payload: Value) -> Self {
        Self { id: id.into(), reference: reference.into(), status: Status::Info, payload }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub pass: usize,
    pub fail: usize,
    pub info: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub suite: String,
    pub config: Value,
    pub records: Vec<Record>,
    pub totals: Totals,
}

impl Report {
    pub fn new(suite: &str, config: &RunConfig, mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let mut totals = Totals::default();
        for r in &records {
            match r.status {
                Status::Pass => totals.pass += 1,
                Status::Fail => totals.fail += 1,
                Status::Info => totals.info += 1,
            }
        }
        Self {
            schema: REPORT_SCHEMA,
            tool_version: TOOL_VERSION.into(),
            suite: suite.into(),
            config: serde_json::to_value(config).expect("config serializes"),
            records,
            totals,
        }
    }

    pub fn passed(&self) -> bool {
        self.totals.fail == 0
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} (wittkz {})\n", self.suite, self.tool_version);
        for r in &self.records {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
            };
            s.push_str(&format!("  {tag}  {:<40} {}\n", r.id, r.reference));
        }
        s.push_str(&format!("{} passed, {} failed, {} info\n", self.totals.pass, self.totals.fail, self.totals.info));
        s
    }
}

/// Parameters shared by all suites; unset fields take per-suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// fixture name or path, as given
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// `"symbolic"`, a list of values, or a comma-separated string
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Value>,
    /// `"symbolic"` or a value
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casimir: Option<CasimirVariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

impl RunConfig {
    fn prime(&self, default: u64) -> Result<u64, SuiteError> {
        let p = self.p.unwrap_or(default);
        if !padic::is_prime(p) {
            return Err(config_err(format!("p = {p} is not prime")));
        }
        Ok(p)
    }

    fn precision_for(&self, p: u64, default: u32) -> Result<u32, SuiteError> {
        let a = self.precision.unwrap_or(default);
        if a == 0 {
            return Err(config_err("precision must be at least 1"));
        }
        padic::modulus(p, a).map_err(|e| config_err(e.to_string()))?;
        Ok(a)
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

/// Independent deterministic stream for sample `i`.
pub fn sample_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn parse_rational(s: &str) -> Result<BigRational, SuiteError> {
    BigRational::from_str(s.trim()).map_err(|_| config_err(format!("not a rational number: {s:?}")))
}

fn value_to_rational(v: &Value) -> Result<BigRational, SuiteError> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(q(n.as_i64().expect("checked"))),
        Value::String(s) => parse_rational(s),
        other => Err(config_err(format!("expected an integer or a rational string, got {other}"))),
    }
}

// ---------------------------------------------------------------------------
// de Rham-Witt suites

fn sample_spec(p: u64, a: u32, i: usize) -> Arc<RingSpec> {
    let r = 1 + (i % 3) as u16;
    let spec = if (i / 3) % 2 == 0 { RingSpec::laurent(p, a, r) } else { RingSpec::polynomial(p, a, r) };
    Arc::new(spec.expect("valid ring"))
}

type IdentityCheck = fn(&DrwForm, &DrwForm) -> bool;

const DRW_IDENTITIES: &[(&str, &str, IdentityCheck)] = &[
    ("drw.fv", "FV = p", |x, _| x.verschiebung().frobenius() == x.scale(&q(x.spec().p() as i64))),
    ("drw.vf", "VF = p", |x, _| x.frobenius().verschiebung() == x.scale(&q(x.spec().p() as i64))),
    ("drw.fdv", "FdV = d", |x, _| x.verschiebung().differential().frobenius() == x.differential()),
    ("drw.df", "dF = pFd", |x, _| {
        x.frobenius().differential() == x.differential().frobenius().scale(&q(x.spec().p() as i64))
    }),
    ("drw.vd", "Vd = pdV", |x, _| {
        x.differential().verschiebung() == x.verschiebung().differential().scale(&q(x.spec().p() as i64))
    }),
    ("drw.projection", "V(x Fy) = V(x) y", |x, y| {
        match (x.multiply(&y.frobenius()), x.verschiebung().multiply(y)) {
            (Ok(l), Ok(r)) => l.verschiebung() == r,
            _ => false,
        }
    }),
    ("drw.dd", "d d = 0", |x, _| x.differential().differential().is_zero()),
    ("drw.e-stable", "E is stable under d, F and V", |x, _| {
        !x.is_in_e() || (x.differential().is_in_e() && x.frobenius().is_in_e() && x.verschiebung().is_in_e())
    }),
    ("drw.graded-commutative", "x y = (-1)^{|x||y|} y x", |x, y| {
        let sign = x.degree().unwrap_or(0) * y.degree().unwrap_or(0) % 2;
        match (x.multiply(y), y.multiply(x)) {
            (Ok(xy), Ok(yx)) => xy == if sign == 0 { yx } else { yx.neg() },
            _ => false,
        }
    }),
];

fn drw_sample(p: u64, a: u32, seed: u64, i: usize) -> (DrwForm, DrwForm) {
    let spec = sample_spec(p, a, i);
    let mut rng = sample_rng(seed, i as u64);
    let bounds = SampleBounds { max_den_exp: a - 1, ..SampleBounds::default() };
    // homogeneous factors, so that graded commutativity has a single sign
    let r = spec.rank();
    let x = homogeneous_e_form(&spec, &mut rng, &bounds, i % (r + 1));
    let y = homogeneous_e_form(&spec, &mut rng, &bounds, (i / 3) % (r + 1));
    (x, y)
}

/// Nonzero E-form of degree `m` with at most `max_terms` terms, summed from
/// the degree-`m` parts of random E-forms.
fn homogeneous_e_form(spec: &Arc<RingSpec>, rng: &mut ChaCha8Rng, bounds: &SampleBounds, m: usize) -> DrwForm {
    let mut x = DrwForm::zero(spec);
    for _ in 0..256 {
        let piece = witt::random_e_form(spec, rng, bounds).homogeneous(m);
        let sum = x.add(&piece).expect("same ring");
        if sum.len() > bounds.max_terms {
            break;
        }
        x = sum;
        if x.len() * 2 > bounds.max_terms {
            break;
        }
    }
    x
}

/// The operator identities on seeded random E-forms in at most three atoms.
pub fn drw_identities(cfg: &RunConfig) -> Result<Report, SuiteError> {
    let p = cfg.prime(5)?;
    let a = cfg.precision_for(p, 3)?;
    let samples = cfg.samples_or(100);
    let results: Vec<(Vec<bool>, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (x, y) = drw_sample(p, a, cfg.seed, i);
            let checks = DRW_IDENTITIES.iter().map(|(_, _, check)| check(&x, &y)).collect();
            (checks, x.len())
        })
        .collect();
    let terms: usize = results.iter().map(|r| r.1).sum();
    let results: Vec<Vec<bool>> = results.into_iter().map(|r| r.0).collect();
    let mut records = Vec::new();
    for (j, (id, reference, _)) in DRW_IDENTITIES.iter().enumerate() {
        let failed: Vec<usize> = results.iter().enumerate().filter(|(_, r)| !r[j]).map(|(i, _)| i).collect();
        let mut payload = json!({"samples": samples, "terms": terms, "failures": failed.len()});
        if let Some(&i) = failed.first() {
            let (x, y) = drw_sample(p, a, cfg.seed, i);
            payload["first_failure"] = json!({"sample": i, "x": x.to_json(), "y": y.to_json()});
        }
        records.push(Record::new(*id, *reference, failed.is_empty(), payload));
    }
    records.push(f_fixed_record(p, a, cfg.seed, samples));
    records.push(dlog_record(p, a));
    Ok(Report::new("drw-identities", cfg, records))
}

fn f_fixed_record(p: u64, a: u32, seed: u64, samples: usize) -> Record {
    let failures: Vec<usize> = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let spec = sample_spec(p, a, i);
            let mut rng = sample_rng(seed ^ 0x5eed, i as u64);
            let x = witt::random_f_fixed(&spec, &mut rng, 20);
            !(x.is_f_fixed() && x.differential().is_zero())
        })
        .collect();
    Record::new(
        "drw.f-fixed-closed",
        "F(x) = x implies dx = 0",
        failures.is_empty(),
        json!({"samples": samples, "failures": failures}),
    )
}

fn dlog_record(p: u64, a: u32) -> Record {
    let spec = Arc::new(RingSpec::laurent(p, a, 3).expect("valid ring"));
    let ok = (0..3).all(|k| {
        let d = DrwForm::dlog_atom(&spec, k).expect("invertible atom");
        d.is_f_fixed() && d.differential().is_zero()
    });
    Record::new("drw.dlog-fixed-closed", "dlog atoms are F-fixed and closed", ok, json!({"atoms": 3}))
}

fn constant_form(spec: &Arc<RingSpec>, c: i64) -> DrwForm {
    DrwForm::constant(spec, q(c))
}

/// `W_a` of the point, the closed form of `E^0`, and consistency of the
/// `Fil` normal forms.
pub fn drw_normal_form(cfg: &RunConfig) -> Result<Report, SuiteError> {
    let p = cfg.prime(5)?;
    let a = cfg.precision_for(p, 3)?;
    let samples = cfg.samples_or(50);
    let mut records = vec![point_record(p, a), e0_grid_record(p)];

    let results: Vec<[bool; 4]> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (x, _) = drw_sample(p, a, cfg.seed, i);
            let nf = |f: &DrwForm, l: u32| f.wa_normal_form(l).expect("E-form");
            let mut ok = [true; 4];
            for l in 1..=a {
                let top = nf(&x, l);
                ok[0] &= nf(&top, l) == top && x.sub(&top).and_then(|d| d.fil_membership(l)).unwrap_or(false);
                if l > 1 {
                    ok[1] &= nf(&top, l - 1) == nf(&x, l - 1);
                }
                let v = x.verschiebung_pow(l);
                let dv = v.differential();
                ok[2] &= v.fil_membership(l).unwrap_or(false) && dv.fil_membership(l).unwrap_or(false);
                ok[3] &= dv.differential().is_zero() && nf(&v, l).is_zero();
            }
            ok
        })
        .collect();
    let table = [
        ("wa.normal-form", "normal forms are idempotent and differ from the input by Fil"),
        ("wa.projective-system", "reducing a level-a normal form to level a-1 agrees with the level a-1 normal form"),
        ("fil.contains-v-image", "V^a E and dV^a E lie in Fil^a"),
        ("fil.subcomplex", "Fil^a is closed under d and V^a x has normal form 0"),
    ];
    for (j, (id, reference)) in table.iter().enumerate() {
        let failed: Vec<usize> = results.iter().enumerate().filter(|(_, r)| !r[j]).map(|(i, _)| i).collect();
        records.push(Record::new(*id, *reference, failed.is_empty(), json!({"samples": samples, "failures": failed})));
    }
    Ok(Report::new("drw-normal-form", cfg, records))
}

/// Integer constants `c, c'` have equal normal forms at level `l` iff
/// `p^l | c - c'`, for every `l <= a`.
pub fn point_record(p: u64, a: u32) -> Record {
    let spec = Arc::new(RingSpec::polynomial(p, a, 1).expect("valid ring"));
    let mut per_level = Vec::new();
    let mut ok = true;
    for l in 1..=a {
        let m = p.pow(l) as i64;
        let range: Vec<i64> = (-m..2 * m).collect();
        let forms: Vec<(i64, DrwForm)> =
            range.par_iter().map(|&c| (c, constant_form(&spec, c).wa_normal_form(l).expect("integral"))).collect();
        // each normal form must determine the residue and conversely
        let mut by_form: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
        let mut by_residue: BTreeMap<i64, BTreeSet<String>> = BTreeMap::new();
        for (c, f) in &forms {
            let key = serde_json::to_string(&f.to_json()).expect("json");
            by_form.entry(key.clone()).or_default().insert(c.rem_euclid(m));
            by_residue.entry(c.rem_euclid(m)).or_default().insert(key);
        }
        let level_ok = by_form.values().all(|s| s.len() == 1) && by_residue.values().all(|s| s.len() == 1) && by_form.len() == m as usize;
        ok &= level_ok;
        per_level.push(json!({"level": l, "constants": range.len(), "classes": by_form.len(), "ok": level_ok}));
    }
    Record::new("wa.point", "W_a of the point is Z/p^a", ok, json!({"p": p, "levels": per_level}))
}

/// `c t^I` lies in `E^0` iff `v_p(c) >= d(I)`, checked on a grid of one- and
/// two-atom monomials with denominator exponents up to 3.
pub fn e0_grid_record(p: u64) -> Record {
    let spec1 = Arc::new(RingSpec::laurent(p, 4, 1).expect("valid ring"));
    let spec2 = Arc::new(RingSpec::polynomial(p, 4, 2).expect("valid ring"));
    let pi = p as i64;
    let mut exps: BTreeSet<FracExponent> = BTreeSet::new();
    for k in 0..=3u32 {
        for num in -(2 * pi + 1)..=(2 * pi + 1) {
            exps.insert(FracExponent::new(num, k, p));
        }
    }
    let coeffs: Vec<BigRational> = (-1..=4)
        .flat_map(|v| {
            [1, 2, -1, pi + 1].into_iter().map(move |u| q(u) * padic::p_power(p, v))
        })
        .collect();
    let oracle = |c: &BigRational, es: &[FracExponent]| {
        let d = es.iter().map(FracExponent::denominator_exponent).max().unwrap_or(0) as i64;
        padic::val_p(c, p).at_least(d)
    };
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for e in &exps {
        for c in &coeffs {
            let f = DrwForm::monomial(&spec1, c.clone(), &[*e], &[]).expect("valid monomial");
            checked += 1;
            if f.is_in_e() != oracle(c, &[*e]) {
                mismatches.push(format!("{} t^{}", c, e.display(p)));
            }
        }
    }
    let nonneg: Vec<FracExponent> = exps.iter().copied().filter(|e| !e.is_negative()).collect();
    for (i, e1) in nonneg.iter().enumerate() {
        for e2 in nonneg.iter().skip(i % 3).step_by(3) {
            for c in coeffs.iter().step_by(2) {
                let es = [*e1, *e2];
                let f = DrwForm::monomial(&spec2, c.clone(), &es, &[]).expect("valid monomial");
                checked += 1;
                if f.is_in_e() != oracle(c, &es) {
                    mismatches.push(format!("{} t1^{} t2^{}", c, e1.display(p), e2.display(p)));
                }
            }
        }
    }
    mismatches.truncate(10);
    Record::new(
        "e0.closed-form",
        "E^0 is the union of p^i Z_p[t^{p^-i}]",
        mismatches.is_empty(),
        json!({"p": p, "monomials": checked, "mismatches": mismatches}),
    )
}

// ---------------------------------------------------------------------------
// arrangement suites

fn os_for(arr: &Arrangement) -> Result<OSAlgebra, SuiteError> {
    OSAlgebra::build(arr).map_err(|e| config_err(e.to_string()))
}

fn subsets_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=max.min(n) {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == size {
                out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
            }
        }
    }
    out
}

fn random_os_element<R: Rng>(n: usize, degree: usize, rng: &mut R) -> OSElement {
    let mut x = OSElement::zero(degree);
    if n == 0 {
        return if degree == 0 { OSElement::one() } else { x };
    }
    for _ in 0..3 {
        let mut t: Vec<usize> = (0..degree).map(|_| rng.gen_range(0..n)).collect();
        t.sort_unstable();
        t.dedup();
        if t.len() == degree {
            x.add_term(t, q(rng.gen_range(-5..=5)));
        }
    }
    x
}

pub fn os_build(arr: &Arrangement, cfg: &RunConfig) -> Result<Report, SuiteError> {
    let os = os_for(arr)?;
    let dims = os.dims();
    let mut records = vec![Record::info("os.dims", "graded dimensions of the Orlik-Solomon algebra", json!({"dims": dims, "euler": euler(&dims)}))];
    let n = arr.len();
    let empty: Vec<Vec<usize>> = subsets_up_to(n, arr.dim() + 1)
        .into_iter()
        .filter(|t| !t.is_empty() && !arr.intersects(t))
        .filter(|t| !os.reduce(&OSElement::tuple(t)).is_zero())
        .collect();
    records.push(Record::new("os.empty-intersection", "tuples with empty intersection reduce to 0", empty.is_empty(), json!({"offending": empty})));
    let samples = cfg.samples_or(30);
    let top = os.top_degree();
    let failures: Vec<usize> = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = sample_rng(cfg.seed, i as u64);
            let da = rng.gen_range(0..=top.max(1));
            let db = rng.gen_range(0..=top.max(1));
            let x = random_os_element(n, da, &mut rng);
            let y = random_os_element(n, db, &mut rng);
            os.reduce(&x.wedge(&y)) != os.reduce(&os.reduce(&x).wedge(&os.reduce(&y)))
        })
        .collect();
    records.push(Record::new(
        "os.reduce-multiplicative",
        "reduce(ab) = reduce(reduce(a) reduce(b))",
        failures.is_empty(),
        json!({"samples": samples, "failures": failures}),
    ));
    Ok(Report::new("os-build", cfg, records))
}

/// Rank of the `psi` images per degree against the OS dimensions, and the
/// DRW images of the generators.
pub fn psi_verify(arrs: &[(String, Arrangement)], cfg: &RunConfig) -> Result<Report, SuiteError> {
    let p = cfg.prime(5)?;
    let a = cfg.precision_for(p, 2)?;
    let mut records = Vec::new();
    for (name, arr) in arrs {
        let os = os_for(arr)?;
        let report = arrangement::verify_psi_iso(&os, os.top_degree()).map_err(|e| config_err(e.to_string()))?;
        records.push(Record::new(
            format!("psi.rank.{name}"),
            "psi induces an isomorphism onto the span of dlog forms",
            report.ok,
            serde_json::to_value(&report).expect("serializes"),
        ));
        let drw: Vec<Value> = (0..arr.len())
            .map(|i| match os.psi_drw(&OSElement::tuple(&[i]), p, a) {
                Ok(f) => json!({"hyperplane": i, "f_fixed": f.is_f_fixed(), "closed": f.differential().is_zero()}),
                Err(e) => json!({"hyperplane": i, "skipped": e.to_string()}),
            })
            .collect();
        let applicable: Vec<&Value> = drw.iter().filter(|v| v.get("skipped").is_none()).collect();
        if applicable.is_empty() {
            records.push(Record::info(format!("psi.drw.{name}"), "psi(H_i) = dlog f_i in the de Rham-Witt complex", json!({"generators": drw})));
        } else {
            let ok = applicable.iter().all(|v| v["f_fixed"] == json!(true) && v["closed"] == json!(true));
            records.push(Record::new(format!("psi.drw.{name}"), "psi(H_i) = dlog f_i is F-fixed and closed", ok, json!({"generators": drw})));
        }
    }
    Ok(Report::new("psi-verify", cfg, records))
}

fn generic_weights(n: usize, seed: u64) -> Vec<BigRational> {
    let mut rng = sample_rng(seed, 0);
    (0..n)
        .map(|_| {
            let mut k = 0;
            while k == 0 {
                k = rng.gen_range(-50..=50);
            }
            BigRational::new(k.into(), rng.gen_range(1..=7).into())
        })
        .collect()
}

pub fn aomoto(arr: &Arrangement, cfg: &RunConfig) -> Result<Report, SuiteError> {
    let os = os_for(arr)?;
    let weights = match &cfg.weights {
        Some(w) => w.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?,
        None => generic_weights(arr.len(), cfg.seed),
    };
    let p = cfg.p.map(|_| cfg.prime(5)).transpose()?;
    let cx = AomotoComplex::build(&os, &weights).map_err(|e| config_err(e.to_string()))?;
    let report = cx.report(p);
    let zero = AomotoComplex::build(&os, &vec![BigRational::zero(); arr.len()]).expect("weight count");
    let mut zero_dims = zero.cohomology_dims();
    zero_dims.truncate(os.dims().len());
    let records = vec![
        Record::new("aomoto.squares-to-zero", "(w ∧)^2 = 0", report.squares_to_zero, json!({})),
        Record::new(
            "aomoto.euler",
            "the Euler characteristic does not depend on the weights",
            report.euler == euler(&os.dims()),
            json!({"euler": report.euler, "os_euler": euler(&os.dims())}),
        ),
        Record::new("aomoto.zero-weights", "w = 0 gives the OS dimensions", zero_dims == os.dims(), json!({"dims": zero_dims})),
        Record::info("aomoto.dims", "cohomology dimensions of the Aomoto complex", serde_json::to_value(&report).expect("serializes")),
    ];
    Ok(Report::new("aomoto", cfg, records))
}

// ---------------------------------------------------------------------------
// Milnor K-theory suites

fn gelfand_symbol() -> KSymbol {
    let s = |a: &str, b: &str| KSymbol::parse_tuple(&[a, b]).expect("valid entries");
    s("x", "x - y").sub(&s("y", "x - y")).sub(&s("x", "y"))
}

/// Verify a derivation (the bundled one by default) together with the
/// realizations of the Gelfand identity.
pub fn milnor_verify(derivation: &Value, cfg: &RunConfig) -> Result<Report, SuiteError> {
    let verdict = milnor::verify_derivation_json(derivation).map_err(|e| config_err(e.to_string()))?;
    let mut records = vec![Record::new(
        "milnor.derivation",
        "every step adds an instance of a defining relation and the result is the claimed end",
        verdict.valid,
        serde_json::to_value(&verdict).expect("serializes"),
    )];
    let g = gelfand_symbol();
    let form = milnor::dlog_realize(&g).expect("representable");
    let witness = form.nonzero_witness();
    records.push(Record::new(
        "milnor.gelfand-dlog",
        "dlog realization of {x,x-y} - {y,x-y} - {x,y} vanishes",
        witness.is_none(),
        json!({"certificate": witness}),
    ));
    let os = OSAlgebra::build(&arrangement::fixture("threelines").expect("bundled")).expect("small");
    let chi = milnor::chi(&g, &os).expect("inside the subgroup");
    records.push(Record::new(
        "milnor.gelfand-chi",
        "chi of the Gelfand combination vanishes in the Orlik-Solomon algebra",
        chi.is_zero(),
        json!({"chi": chi.terms().iter().map(|(t, c)| json!({"tuple": t, "coeff": c.to_string()})).collect::<Vec<_>>()}),
    ));
    records.push(steinberg_record(cfg));
    Ok(Report::new("milnor-verify", cfg, records))
}

/// `{g, 1 - g}` realizes to zero for random linear `g` in two variables.
fn steinberg_record(cfg: &RunConfig) -> Record {
    let samples = cfg.samples_or(20);
    let failures: Vec<usize> = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = sample_rng(cfg.seed, i as u64);
            let (a, b, c) = (rng.gen_range(1..=9), rng.gen_range(-9..=9), rng.gen_range(-9..=9));
            let g = format!("{a}*x + {b}*y + {c}");
            let h = format!("1 - ({g})");
            let Ok(sym) = KSymbol::parse_tuple(&[g.as_str(), h.as_str()]) else { return true };
            milnor::dlog_realize(&sym).map(|f| !f.is_zero()).unwrap_or(true)
        })
        .collect();
    Record::new("milnor.steinberg-dlog", "dlog g ∧ dlog(1 - g) = 0", failures.is_empty(), json!({"samples": samples, "failures": failures}))
}

pub fn milnor_probe(arr: &Arrangement, cfg: &RunConfig) -> Result<Report, SuiteError> {
    let os = os_for(arr)?;
    let budget = cfg.budget.unwrap_or(20);
    let probe = milnor::chi_rank_probe(&os, budget).map_err(|e| config_err(e.to_string()))?;
    let records = vec![Record::info(
        "milnor.chi-rank-probe",
        "ranks of chi and dlog images of degree-2 symbols against dim A_2",
        serde_json::to_value(&probe).expect("serializes"),
    )];
    Ok(Report::new("milnor-probe", cfg, records))
}

// ---------------------------------------------------------------------------
// KZ suites

/// How the parameters `(m, kappa)` of a KZ run are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamChoice {
    Symbolic,
    Fixed(Vec<BigRational>, BigRational),
    Sampled(usize),
}

fn is_symbolic(v: &Value) -> bool {
    v.as_str().is_some_and(|s| s.trim() == "symbolic")
}

fn parse_m(v: &Value, n: usize) -> Result<Vec<BigRational>, SuiteError> {
    let items: Vec<BigRational> = match v {
        Value::Array(xs) => xs.iter().map(value_to_rational).collect::<Result<_, _>>()?,
        Value::String(s) => s.split(',').map(parse_rational).collect::<Result<_, _>>()?,
        other => vec![value_to_rational(other)?],
    };
    if items.len() != n {
        return Err(config_err(format!("expected {n} highest weights, got {}", items.len())));
    }
    Ok(items)
}

fn kz_shape(cfg: &RunConfig, default: (usize, u32)) -> Result<(usize, u32), SuiteError> {
    let n = cfg.n.unwrap_or(default.0);
    let level = cfg.level.unwrap_or(default.1);
    if n == 0 {
        return Err(config_err("n must be at least 1"));
    }
    if level == 0 {
        return Err(config_err("N must be at least 1"));
    }
    Ok((n, level))
}

/// Symbolic when requested or when `n + N <= 4`, otherwise seeded samples.
pub fn param_choice(cfg: &RunConfig, n: usize, level: u32) -> Result<ParamChoice, SuiteError> {
    let m_sym = cfg.m.as_ref().map(is_symbolic);
    let k_sym = cfg.kappa.as_ref().map(is_symbolic);
    match (m_sym, k_sym) {
        (Some(true), Some(false)) | (Some(false), Some(true)) => {
            Err(config_err("m and kappa must both be symbolic or both be values"))
        }
        (Some(false), None) | (None, Some(false)) => Err(config_err("numeric runs need both m and kappa")),
        (Some(false), Some(false)) => {
            let m = parse_m(cfg.m.as_ref().expect("set"), n)?;
            let kappa = value_to_rational(cfg.kappa.as_ref().expect("set"))?;
            if kappa.is_zero() {
                return Err(config_err("kappa must be nonzero"));
            }
            Ok(ParamChoice::Fixed(m, kappa))
        }
        (Some(true), _) | (_, Some(true)) => Ok(ParamChoice::Symbolic),
        (None, None) if n + level as usize <= 4 => Ok(ParamChoice::Symbolic),
        (None, None) => Ok(ParamChoice::Sampled(cfg.samples_or(5).max(5))),
    }
}

fn param_points(choice: &ParamChoice, n: usize, seed: u64) -> Vec<(String, KzParams)> {
    match choice {
        ParamChoice::Symbolic => vec![("symbolic".into(), KzParams::symbolic(n))],
        ParamChoice::Fixed(m, k) => vec![("fixed".into(), KzParams::numeric(m, k).expect("nonzero kappa"))],
        ParamChoice::Sampled(count) => (0..*count)
            .map(|i| (format!("sample-{i:02}"), KzParams::sample(n, &mut sample_rng(seed, i as u64))))
            .collect(),
    }
}

fn sampling_note(choice: &ParamChoice) -> Option<Value> {
    match choice {
        ParamChoice::Sampled(count) => Some(json!({
            "points": count,
            "sample_set": "k/7 with k uniform in [-1000, 1000] \\ {0}",
            "sample_set_size": kz::SAMPLE_SET_SIZE,
            "residual_degree_bound": kz::RESIDUAL_DEGREE_BOUND,
            "miss_probability_bound": kz::schwartz_zippel_bound(*count),
        })),
        _ => None,
    }
}

/// The small cases on which the `u_c` reading and the Casimir are decided.
pub const SELECTION_CASES: [(usize, u32); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// Exactly one Casimir variant commutes with the diagonal action and makes
/// the cocycle identities hold on the selection cases.
pub fn casimir_arbitration() -> Record {
    let mut verdicts = Vec::new();
    for variant in CasimirVariant::ALL {
        let commutes = (2..=3).all(|n| (1..=2).all(|l| kz::casimir_commutes(variant, n, l, &KzParams::symbolic(n).m)));
        let cocycle = SELECTION_CASES.iter().all(|&(n, l)| {
            let params = KzParams::symbolic(n);
            let c = kz::build_cocycle(n, l, &params, FROZEN_READING).expect("valid shape");
            kz::verify_cocycle(&c, &params, variant).passed()
        });
        verdicts.push((variant, commutes, cocycle));
    }
    let passing: Vec<CasimirVariant> = verdicts.iter().filter(|v| v.1 && v.2).map(|v| v.0).collect();
    Record::new(
        "kz.casimir-arbitration",
        "exactly one Casimir variant commutes with the diagonal action and satisfies the cocycle identities",
        passing.len() == 1,
        json!({
            "variants": verdicts.iter().map(|(v, c, k)| json!({"variant": v, "commutes": c, "cocycle": k})).collect::<Vec<_>>(),
            "selected": passing.first(),
        }),
    )
}

pub fn reading_selection_record() -> Record {
    let sel = kz::select_reading(&SELECTION_CASES, CasimirVariant::Standard).expect("valid cases");
    let ok = sel.selected == Some(FROZEN_READING);
    Record::new(
        "kz.reading-selection",
        "exactly one reading of u_c satisfies the cocycle identities on the small cases",
        ok,
        serde_json::to_value(&sel).expect("serializes"),
    )
}

/// Both cocycle identities for `I = (I_0, I_1)`.
pub fn kz_cocycle(cfg: &RunConfig) -> Result<Report, SuiteError> {
    let (n, level) = kz_shape(cfg, (2, 2))?;
    let variant = cfg.casimir.unwrap_or(CasimirVariant::Standard);
    let mut records = Vec::new();
    if let Some(p) = cfg.p {
        let p = cfg.prime(p)?;
        let a = cfg.precision_for(p, 3)?;
        if p <= level as u64 {
            return Err(config_err(format!("p = {p} must exceed N = {level}")));
        }
        let points: Vec<(Vec<BigRational>, BigRational)> = match param_choice(cfg, n, level)? {
            ParamChoice::Fixed(m, k) => vec![(m, k)],
            ParamChoice::Symbolic if cfg.m.is_some() => {
                return Err(config_err("p-adic mode needs numeric parameters"));
            }
            _ => (0..cfg.samples_or(5).max(1)).map(|i| padic_point(n, p, cfg.seed, i)).collect(),
        };
        for (i, (m, k)) in points.iter().enumerate() {
            let r = kz::verify_cocycle_padic(n, level, m, k, p, a, FROZEN_READING, variant)
                .map_err(|e| config_err(e.to_string()))?;
            records.push(Record::new(
                format!("kz.cocycle.padic-{i:02}"),
                "both cocycle identities vanish with coefficients in Z/p^a",
                r.passed(),
                serde_json::to_value(&r).expect("serializes"),
            ));
        }
    } else {
        let choice = param_choice(cfg, n, level)?;
        let points = param_points(&choice, n, cfg.seed);
        let reports: Vec<(String, kz::CocycleReport)> = points
            .par_iter()
            .map(|(label, params)| {
                let c = kz::build_cocycle(n, level, params, FROZEN_READING).expect("valid shape");
                (label.clone(), kz::verify_cocycle(&c, params, variant))
            })
            .collect();
        for (label, r) in reports {
            let mut payload = serde_json::to_value(&r).expect("serializes");
            if let Some(note) = sampling_note(&choice) {
                payload["sampling"] = note;
            }
            records.push(Record::new(
                format!("kz.cocycle.{label}"),
                "nabla I_0 = 0 and d_Ch I_0 + nabla I_1 = 0",
                r.passed(),
                payload,
            ));
        }
    }
    let sym = KzParams::symbolic(n);
    records.push(Record::new(
        "kz.casimir-commutes",
        "[Omega_bc, Delta(x)] = 0 for x in {e, f, h}",
        kz::casimir_commutes(variant, n, level, &sym.m),
        json!({"variant": variant}),
    ));
    records.push(reading_selection_record());
    records.push(casimir_arbitration());
    Ok(Report::new("kz-cocycle", cfg, records))
}

/// Integer parameters with `kappa` a p-adic unit.
fn padic_point(n: usize, p: u64, seed: u64, i: usize) -> (Vec<BigRational>, BigRational) {
    let mut rng = sample_rng(seed, i as u64);
    let m = (0..n).map(|_| q(rng.gen_range(-1000..=1000))).collect();
    let kappa = loop {
        let k = q(rng.gen_range(-1000..=1000));
        if PadicScalar::from_rational(&k, p, 1).is_ok_and(|s| s.is_unit()) {
            break k;
        }
    };
    (m, kappa)
}

pub fn kz_flatness(cfg: &RunConfig) -> Result<Report, SuiteError> {
    let variant = cfg.casimir.unwrap_or(CasimirVariant::Standard);
    let cases: Vec<(usize, u32)> = match (cfg.n, cfg.level) {
        (None, None) => (1..=3).flat_map(|n| (1..=2).map(move |l| (n, l))).collect(),
        _ => vec![kz_shape(cfg, (2, 1))?],
    };
    let mut records = Vec::new();
    for (n, level) in cases {
        let choice = param_choice(cfg, n, level)?;
        let choice = if matches!(choice, ParamChoice::Sampled(_)) && cfg.m.is_none() { ParamChoice::Symbolic } else { choice };
        for (label, params) in param_points(&choice, n, cfg.seed) {
            let r = kz::flatness(n, level, &params, variant);
            records.push(Record::new(
                format!("kz.flatness.n{n}-N{level}.{label}"),
                "the curvature of d + (omega_m - omega_KZ)/kappa vanishes",
                r.passed(),
                serde_json::to_value(&r).expect("serializes"),
            ));
        }
    }
    Ok(Report::new("kz-flatness", cfg, records))
}

pub fn bosonization(cfg: &RunConfig) -> Result<Report, SuiteError> {
    let (n, level) = kz_shape(cfg, (2, 1))?;
    let variant = cfg.casimir.unwrap_or(CasimirVariant::Standard);
    let choice = param_choice(cfg, n, level)?;
    let mut records = Vec::new();
    for (label, params) in param_points(&choice, n, cfg.seed) {
        let c = kz::build_cocycle(n, level, &params, FROZEN_READING).expect("valid shape");
        let r = kz::bosonization_check(&c, &params, variant);
        let payload = serde_json::to_value(&r).expect("serializes");
        records.push(Record::new(
            format!("bosonization.chain-map.{label}"),
            "eta(I) intertwines the source differential with the Coulomb connection",
            r.chain_map,
            payload.clone(),
        ));
        records.push(Record::new(
            format!("bosonization.d-squared.{label}"),
            "the source differential squares to zero",
            r.source_d_squared_zero,
            json!({"source_elements": r.source_elements}),
        ));
        records.push(Record::new(
            format!("bosonization.filtration.{label}"),
            "eta maps forms of degree i in z into forms with at least i dz factors",
            r.filtration,
            json!({"source_elements": r.source_elements}),
        ));
    }
    Ok(Report::new("bosonization", cfg, records))
}
