//! sl2 Verma tensor modules, the Chevalley complex in weight `N`, the Coulomb
//! and KZ forms, the hypergeometric cocycle and the bosonization chain map.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logform::{CoordForm, LogAtom, LogForm, ZeroCertificate};
use crate::padic::{self, PadicError, PadicScalar};
use crate::poly::Var;
use crate::ratfn::{RatError, RationalCoeff};

#[derive(Debug, Error)]
pub enum KzError {
    #[error("n must be at least 1")]
    NoPoints,
    #[error("N must be at least {0}")]
    LevelTooSmall(u32),
    #[error("expected {expected} highest weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("p = {p} must exceed N = {n} so that the factorials are invertible")]
    PrimeTooSmall { p: u64, n: u32 },
    #[error("kappa must be invertible")]
    KappaNotInvertible,
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Rat(#[from] RatError),
}

type Result<T> = std::result::Result<T, KzError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CasimirVariant {
    /// `h⊗h/2 + e⊗f + f⊗e`
    Standard,
    /// `h⊗h/2 + e⊗e + f⊗f`
    Printed,
}

impl CasimirVariant {
    pub const ALL: [CasimirVariant; 2] = [CasimirVariant::Standard, CasimirVariant::Printed];
}

/// Candidate readings of the forms `u_c` in degree `N - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UcReading {
    /// prefactor `-kappa`, variables `t_2, .., t_N` in blocks
    PrintedNegKappa,
    /// prefactor `-kappa`, variables `t_1, .., t_{N-1}` in blocks
    ShiftedNegKappa,
    /// prefactor `-kappa`, variables `t_2, .., t_N` with the last one
    /// replaced by `t_1` when the last block is nonempty
    TerminalT1NegKappa,
    /// prefactor `+kappa`, variables `t_2, .., t_N` in blocks
    PositiveKappa,
}

impl UcReading {
    pub const ALL: [UcReading; 4] =
        [UcReading::PrintedNegKappa, UcReading::ShiftedNegKappa, UcReading::TerminalT1NegKappa, UcReading::PositiveKappa];
}

/// The reading fixed by [`select_reading`] on the small cases.
pub const FROZEN_READING: UcReading = UcReading::PositiveKappa;

/// Highest weights and `kappa`, symbolic or numeric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KzParams {
    pub m: Vec<RationalCoeff>,
    pub kappa: RationalCoeff,
}

impl KzParams {
    pub fn symbolic(n: usize) -> Self {
        Self { m: (1..=n).map(|b| RationalCoeff::var(Var::M(b as u16))).collect(), kappa: RationalCoeff::var(Var::Kappa) }
    }

    pub fn numeric(m: &[BigRational], kappa: &BigRational) -> Result<Self> {
        if kappa.is_zero() {
            return Err(KzError::KappaNotInvertible);
        }
        Ok(Self { m: m.iter().map(|x| RationalCoeff::constant(x.clone())).collect(), kappa: RationalCoeff::constant(kappa.clone()) })
    }

    /// A random point with coordinates `k / 7`, `k` uniform in
    /// `[-1000, 1000] \ {0}`.
    pub fn sample<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut draw = || {
            let mut k = 0i64;
            while k == 0 {
                k = rng.gen_range(-1000..=1000);
            }
            BigRational::new(k.into(), 7.into())
        };
        let m: Vec<BigRational> = (0..n).map(|_| draw()).collect();
        let kappa = draw();
        Self::numeric(&m, &kappa).expect("nonzero kappa")
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn kappa_inverse(&self) -> RationalCoeff {
        self.kappa.recip().expect("kappa is a nonzero monomial or constant")
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "kappa": self.kappa.to_string(),
        })
    }
}

/// Size of the set each sampled coordinate is drawn from.
pub const SAMPLE_SET_SIZE: u64 = 2000;
/// Total degree bound in `(m, kappa)` of every residual coefficient after
/// clearing the powers of `kappa`.
pub const RESIDUAL_DEGREE_BOUND: u64 = 4;

/// `b ∈ N^n` with `|b| = total`, in ascending lexicographic order.
pub fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            go(n, total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(n, total, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sl2 {
    E,
    F,
    H,
}

impl Sl2 {
    pub const ALL: [Sl2; 3] = [Sl2::E, Sl2::F, Sl2::H];
}

/// `x · f^k v = c f^{k'} v` in the Verma module of highest weight `m`.
pub fn verma_action(x: Sl2, m: &RationalCoeff, k: u32) -> Option<(u32, RationalCoeff)> {
    let kk = RationalCoeff::integer(k as i64);
    match x {
        Sl2::F => Some((k + 1, RationalCoeff::one())),
        Sl2::H => Some((k, m.sub(&kk.scale(&BigRational::from_integer(2.into()))))),
        Sl2::E if k == 0 => None,
        Sl2::E => Some((k - 1, kk.mul(&m.sub(&RationalCoeff::integer(k as i64 - 1))))),
    }
}

/// Sparse vectors in the tensor product, keyed by the exponents `b`.
pub type TensorVec = BTreeMap<Vec<u32>, RationalCoeff>;

fn add_into(out: &mut TensorVec, key: Vec<u32>, c: RationalCoeff) {
    if c.is_zero() {
        return;
    }
    let slot = out.entry(key.clone()).or_default();
    *slot = slot.add(&c);
    if slot.is_zero() {
        out.remove(&key);
    }
}

/// Action of `x` through the factor `b` (0-based).
pub fn act_on_factor(x: Sl2, b: usize, v: &TensorVec, m: &[RationalCoeff]) -> TensorVec {
    let mut out = TensorVec::new();
    for (key, c) in v {
        if let Some((k, a)) = verma_action(x, &m[b], key[b]) {
            let mut nk = key.clone();
            nk[b] = k;
            add_into(&mut out, nk, c.mul(&a));
        }
    }
    out
}

/// Diagonal action `Δ(x) = sum_b x_b`.
pub fn diagonal(x: Sl2, v: &TensorVec, m: &[RationalCoeff]) -> TensorVec {
    let mut out = TensorVec::new();
    for b in 0..m.len() {
        for (k, c) in act_on_factor(x, b, v, m) {
            add_into(&mut out, k, c);
        }
    }
    out
}

/// `Ω` acting through factors `b < c` (0-based), without projection.
pub fn casimir_apply(variant: CasimirVariant, b: usize, c: usize, v: &TensorVec, m: &[RationalCoeff]) -> TensorVec {
    let two = |x: Sl2, y: Sl2| act_on_factor(x, b, &act_on_factor(y, c, v, m), m);
    let mut out = TensorVec::new();
    let half = BigRational::new(1.into(), 2.into());
    for (k, a) in two(Sl2::H, Sl2::H) {
        add_into(&mut out, k, a.scale(&half));
    }
    let pairs = match variant {
        CasimirVariant::Standard => [(Sl2::E, Sl2::F), (Sl2::F, Sl2::E)],
        CasimirVariant::Printed => [(Sl2::E, Sl2::E), (Sl2::F, Sl2::F)],
    };
    for (x, y) in pairs {
        for (k, a) in two(x, y) {
            add_into(&mut out, k, a);
        }
    }
    out
}

/// Dense matrix, `rows[x][y]` = coefficient of basis `x` in the image of
/// basis `y`.
pub type CoeffMatrix = Vec<Vec<RationalCoeff>>;

fn unit(key: &[u32]) -> TensorVec {
    let mut v = TensorVec::new();
    v.insert(key.to_vec(), RationalCoeff::one());
    v
}

/// Matrix of `Ω_{bc}` on the weight-`N` basis (components leaving the
/// weight space are dropped).
pub fn casimir_matrix(variant: CasimirVariant, b: usize, c: usize, basis: &[Vec<u32>], m: &[RationalCoeff]) -> CoeffMatrix {
    let images: Vec<TensorVec> = basis.iter().map(|y| casimir_apply(variant, b, c, &unit(y), m)).collect();
    basis
        .iter()
        .map(|x| images.iter().map(|img| img.get(x).cloned().unwrap_or_default()).collect())
        .collect()
}

/// `[Ω_{bc}, Δ(x)] = 0` on every basis vector of weight `N`, for all pairs
/// and `x ∈ {e, f, h}`.
pub fn casimir_commutes(variant: CasimirVariant, n: usize, level: u32, m: &[RationalCoeff]) -> bool {
    let basis = compositions(n, level);
    (0..n).flat_map(|b| (b + 1..n).map(move |c| (b, c))).all(|(b, c)| {
        Sl2::ALL.iter().all(|&x| {
            basis.iter().all(|y| {
                let v = unit(y);
                let lhs = casimir_apply(variant, b, c, &diagonal(x, &v, m), m);
                let rhs = diagonal(x, &casimir_apply(variant, b, c, &v, m), m);
                lhs == rhs
            })
        })
    })
}

/// `E[y][x]`: coefficient of `f^y v` in `Δ(e) f^x v`, from weight `N` to
/// weight `N - 1`.
pub fn chevalley_matrix(n: usize, level: u32, m: &[RationalCoeff]) -> CoeffMatrix {
    let src = compositions(n, level);
    let dst = compositions(n, level.saturating_sub(1));
    let images: Vec<TensorVec> = src.iter().map(|x| diagonal(Sl2::E, &unit(x), m)).collect();
    dst.iter().map(|y| images.iter().map(|img| img.get(y).cloned().unwrap_or_default()).collect()).collect()
}

/// `sum_{b<c} (m_b m_c / 2) dlog(z_b - z_c) + sum_{i<j} 2 dlog(t_i - t_j)
/// - sum_{i,b} m_b dlog(t_i - z_b)`.
pub fn omega_coulomb(n: usize, level: u32, params: &KzParams) -> LogForm {
    let mut w = LogForm::zero(1);
    let half = BigRational::new(1.into(), 2.into());
    for b in 1..=n {
        for c in b + 1..=n {
            let coeff = params.m[b - 1].mul(&params.m[c - 1]).scale(&half);
            w.add_term(vec![LogAtom::z_z(b as u16, c as u16)], coeff);
        }
    }
    for i in 1..=level {
        for j in i + 1..=level {
            w.add_term(vec![LogAtom::t_t(i as u16, j as u16)], RationalCoeff::integer(2));
        }
    }
    for i in 1..=level {
        for b in 1..=n {
            w.add_term(vec![LogAtom::t_z(i as u16, b as u16)], params.m[b - 1].neg());
        }
    }
    w
}

/// `ω_KZ = sum_{b<c} Ω_{bc} dlog(z_b - z_c)` as a list of
/// `(atom, matrix)` on the weight-`N` basis.
pub fn omega_kz(n: usize, level: u32, variant: CasimirVariant, params: &KzParams) -> Vec<(LogAtom, CoeffMatrix)> {
    let basis = compositions(n, level);
    let mut out = Vec::new();
    for b in 0..n {
        for c in b + 1..n {
            out.push((LogAtom::z_z(b as u16 + 1, c as u16 + 1), casimir_matrix(variant, b, c, &basis, &params.m)));
        }
    }
    out
}

fn block_wedge(counts: &[u32], t_indices: &[u16]) -> LogForm {
    let mut atoms = Vec::new();
    let mut next = 0;
    for (b, &k) in counts.iter().enumerate() {
        for _ in 0..k {
            atoms.push(LogAtom::t_z(t_indices[next], b as u16 + 1));
            next += 1;
        }
    }
    LogForm::term(RationalCoeff::one(), atoms)
}

/// `u_b`: wedge of the blocks `dlog(t_i - z_b)` over consecutive `t`.
pub fn u_b(b: &[u32]) -> LogForm {
    let level: u32 = b.iter().sum();
    let ts: Vec<u16> = (1..=level as u16).collect();
    block_wedge(b, &ts)
}

/// `u_c` under the given reading.
pub fn u_c(c: &[u32], reading: UcReading, kappa: &RationalCoeff) -> LogForm {
    let len: u32 = c.iter().sum();
    let mut ts: Vec<u16> = match reading {
        UcReading::ShiftedNegKappa => (1..=len as u16).collect(),
        _ => (2..=len as u16 + 1).collect(),
    };
    if reading == UcReading::TerminalT1NegKappa && c.last().is_some_and(|&k| k >= 1) {
        *ts.last_mut().expect("nonempty") = 1;
    }
    let prefactor = match reading {
        UcReading::PositiveKappa => kappa.clone(),
        _ => kappa.neg(),
    };
    block_wedge(c, &ts).scale(&prefactor)
}

fn factorial_product(b: &[u32]) -> BigRational {
    let f = b.iter().fold(BigInt::one(), |acc, &k| (1..=k).fold(acc, |a, i| a * BigInt::from(i)));
    BigRational::from_integer(f)
}

/// `w = Alt(u) / (b_1! .. b_n!)`.
pub fn hypergeometric(u: &LogForm, b: &[u32], level: u32) -> LogForm {
    u.alt_symmetrize(level as usize).scale_rational(&factorial_product(b).recip())
}

#[derive(Debug, Clone)]
pub struct Cocycle {
    pub n: usize,
    pub level: u32,
    pub reading: UcReading,
    /// `(b, w_b)` for `|b| = N`
    pub i0: Vec<(Vec<u32>, LogForm)>,
    /// `(c, w_c)` for `|c| = N - 1`
    pub i1: Vec<(Vec<u32>, LogForm)>,
}

pub fn build_cocycle(n: usize, level: u32, params: &KzParams, reading: UcReading) -> Result<Cocycle> {
    if n == 0 {
        return Err(KzError::NoPoints);
    }
    if level == 0 {
        return Err(KzError::LevelTooSmall(1));
    }
    if params.n() != n {
        return Err(KzError::WeightCount { expected: n, got: params.n() });
    }
    let i0 = compositions(n, level).into_par_iter().map(|b| {
        let w = hypergeometric(&u_b(&b), &b, level);
        (b, w)
    });
    let i1 = compositions(n, level - 1).into_par_iter().map(|c| {
        let w = hypergeometric(&u_c(&c, reading, &params.kappa), &c, level);
        (c, w)
    });
    Ok(Cocycle { n, level, reading, i0: i0.collect(), i1: i1.collect() })
}

fn apply_matrix(m: &CoeffMatrix, forms: &[LogForm]) -> Vec<LogForm> {
    m.iter()
        .map(|row| {
            let mut acc = LogForm::zero(forms.first().map_or(0, LogForm::degree));
            for (c, f) in row.iter().zip(forms) {
                if !c.is_zero() {
                    acc.add_assign(&f.scale(c));
                }
            }
            acc
        })
        .collect()
}

/// `κ⁻¹ ω_KZ ∧ F` for a vector of forms over the basis of `kz`.
fn kz_term(kz: &[(LogAtom, CoeffMatrix)], forms: &[LogForm], kinv: &RationalCoeff) -> Vec<LogForm> {
    let deg = forms.first().map_or(0, LogForm::degree);
    let mut out = vec![LogForm::zero(deg + 1); forms.len()];
    for (atom, mat) in kz {
        let dl = LogForm::dlog(atom.clone()).scale(kinv);
        for (x, f) in apply_matrix(mat, forms).iter().enumerate() {
            out[x].add_assign(&dl.wedge(f));
        }
    }
    out
}

/// `(d + κ⁻¹ω_m ∧ - κ⁻¹ω_KZ ∧) F`, with the closedness of the coefficient
/// part reported separately.
fn nabla(forms: &[LogForm], omega_m: &LogForm, kz: &[(LogAtom, CoeffMatrix)], kinv: &RationalCoeff) -> (Vec<LogForm>, bool) {
    let closed = forms.iter().all(|f| f.differential().is_zero());
    let coul = omega_m.scale(kinv);
    let kzt = kz_term(kz, forms, kinv);
    let out = forms.iter().zip(kzt).map(|(f, k)| coul.wedge(f).sub(&k)).collect();
    (out, closed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualFailure {
    pub identity: String,
    pub basis: String,
    pub certificate: ZeroCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub level: u32,
    pub variant: CasimirVariant,
    pub reading: UcReading,
    pub params: serde_json::Value,
    pub nabla_i0_zero: bool,
    pub dch_i0_plus_nabla_i1_zero: bool,
    pub failures: Vec<ResidualFailure>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.nabla_i0_zero && self.dch_i0_plus_nabla_i1_zero
    }
}

fn fmt_basis(prefix: &str, b: &[u32]) -> String {
    format!("{prefix}({})", b.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

/// Residuals of `∇ I_0` and `d_Ch I_0 + ∇ I_1` per basis vector.
pub fn cocycle_residuals(cocycle: &Cocycle, params: &KzParams, variant: CasimirVariant) -> (Vec<(String, LogForm)>, Vec<(String, LogForm)>, bool) {
    let n = cocycle.n;
    let level = cocycle.level;
    let kinv = params.kappa_inverse();
    let omega_m = omega_coulomb(n, level, params);
    let kz0 = omega_kz(n, level, variant, params);
    let kz1 = omega_kz(n, level - 1, variant, params);
    let i0: Vec<LogForm> = cocycle.i0.iter().map(|(_, w)| w.clone()).collect();
    let i1: Vec<LogForm> = cocycle.i1.iter().map(|(_, w)| w.clone()).collect();
    let (r0, closed0) = nabla(&i0, &omega_m, &kz0, &kinv);
    let (mut r1, closed1) = nabla(&i1, &omega_m, &kz1, &kinv);
    let dch = apply_matrix(&chevalley_matrix(n, level, &params.m), &i0);
    for (r, d) in r1.iter_mut().zip(dch) {
        r.add_assign(&d);
    }
    let first = cocycle.i0.iter().map(|(b, _)| fmt_basis("f^b v, b=", b)).zip(r0).collect();
    let second = cocycle.i1.iter().map(|(c, _)| fmt_basis("f ⊗ f^c v, c=", c)).zip(r1).collect();
    (first, second, closed0 && closed1)
}

fn witness(f: &LogForm, padic: Option<(u64, u32)>) -> Option<ZeroCertificate> {
    match padic {
        None => f.nonzero_witness(),
        Some((p, a)) => f.nonzero_witness_mod(p, a),
    }
}

fn check_residuals(items: &[(String, LogForm)], identity: &str, padic: Option<(u64, u32)>) -> Vec<ResidualFailure> {
    items
        .par_iter()
        .filter_map(|(basis, r)| {
            witness(r, padic).map(|certificate| ResidualFailure { identity: identity.into(), basis: basis.clone(), certificate })
        })
        .collect()
}

pub fn verify_cocycle(cocycle: &Cocycle, params: &KzParams, variant: CasimirVariant) -> CocycleReport {
    let (first, second, closed) = cocycle_residuals(cocycle, params, variant);
    report_from(cocycle, params, variant, &first, &second, closed, None)
}

fn report_from(
    cocycle: &Cocycle,
    params: &KzParams,
    variant: CasimirVariant,
    first: &[(String, LogForm)],
    second: &[(String, LogForm)],
    closed: bool,
    padic: Option<(u64, u32)>,
) -> CocycleReport {
    let mut failures = check_residuals(first, "nabla I0", padic);
    let n0 = failures.len();
    failures.extend(check_residuals(second, "d_Ch I0 + nabla I1", padic));
    let n1 = failures.len() - n0;
    CocycleReport {
        n: cocycle.n,
        level: cocycle.level,
        variant,
        reading: cocycle.reading,
        params: params.describe(),
        nabla_i0_zero: n0 == 0 && closed,
        dch_i0_plus_nabla_i1_zero: n1 == 0 && closed,
        failures,
    }
}

/// Cocycle check with coefficients reduced into `Z/p^a`: the parameters
/// must be p-integral, `kappa` a unit and `p > N`.
pub fn verify_cocycle_padic(
    n: usize,
    level: u32,
    m: &[BigRational],
    kappa: &BigRational,
    p: u64,
    precision: u32,
    reading: UcReading,
    variant: CasimirVariant,
) -> Result<CocycleReport> {
    if p <= level as u64 {
        return Err(KzError::PrimeTooSmall { p, n: level });
    }
    let k = PadicScalar::from_rational(kappa, p, precision)?;
    if !k.is_unit() {
        return Err(KzError::KappaNotInvertible);
    }
    for x in m {
        PadicScalar::from_rational(x, p, precision)?;
    }
    let params = KzParams::numeric(m, kappa)?;
    let cocycle = build_cocycle(n, level, &params, reading)?;
    let (first, second, closed) = cocycle_residuals(&cocycle, &params, variant);
    let reduce = |items: Vec<(String, LogForm)>| -> Result<Vec<(String, LogForm)>> {
        items
            .into_iter()
            .map(|(b, f)| {
                let g = f
                    .map_coeffs(|c| {
                        let q = c.as_constant().expect("numeric parameters");
                        let r = PadicScalar::from_rational(&q, p, precision).map_err(|_| RatError::DivisionByZero)?;
                        Ok(RationalCoeff::constant(r.to_rational()))
                    })
                    .map_err(|_| KzError::Padic(PadicError::NotIntegral(format!("a coefficient of {b}"))))?;
                Ok((b, g))
            })
            .collect()
    };
    let first = reduce(first)?;
    let second = reduce(second)?;
    Ok(report_from(&cocycle, &params, variant, &first, &second, closed, Some((p, precision))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadingCandidate {
    pub reading: UcReading,
    pub passes: bool,
    pub failed_cases: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadingSelection {
    pub cases: Vec<(usize, u32)>,
    pub candidates: Vec<ReadingCandidate>,
    pub selected: Option<UcReading>,
}

/// Try every reading of `u_c` on the given cases with symbolic parameters;
/// the selection is the unique reading passing all of them.
pub fn select_reading(cases: &[(usize, u32)], variant: CasimirVariant) -> Result<ReadingSelection> {
    let mut candidates = Vec::new();
    for reading in UcReading::ALL {
        let mut failed = Vec::new();
        for &(n, level) in cases {
            let params = KzParams::symbolic(n);
            let cocycle = build_cocycle(n, level, &params, reading)?;
            if !verify_cocycle(&cocycle, &params, variant).passed() {
                failed.push((n, level));
            }
        }
        candidates.push(ReadingCandidate { reading, passes: failed.is_empty(), failed_cases: failed });
    }
    let passing: Vec<UcReading> = candidates.iter().filter(|c| c.passes).map(|c| c.reading).collect();
    let selected = (passing.len() == 1).then(|| passing[0]);
    Ok(ReadingSelection { cases: cases.to_vec(), candidates, selected })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatnessReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub level: u32,
    pub variant: CasimirVariant,
    pub params: serde_json::Value,
    pub d_omega_kz_zero: bool,
    pub omega_kz_squared_zero: bool,
    pub casimir_commutators_zero: bool,
    pub curvature_zero: bool,
    pub failures: Vec<ResidualFailure>,
}

impl FlatnessReport {
    pub fn passed(&self) -> bool {
        self.d_omega_kz_zero && self.omega_kz_squared_zero && self.curvature_zero
    }
}

fn mat_forms(kz: &[(LogAtom, CoeffMatrix)], dim: usize) -> Vec<Vec<LogForm>> {
    let mut a = vec![vec![LogForm::zero(1); dim]; dim];
    for (atom, mat) in kz {
        for x in 0..dim {
            for y in 0..dim {
                if !mat[x][y].is_zero() {
                    a[x][y].add_term(vec![atom.clone()], mat[x][y].clone());
                }
            }
        }
    }
    a
}

fn mat_wedge(a: &[Vec<LogForm>], b: &[Vec<LogForm>]) -> Vec<Vec<LogForm>> {
    let dim = a.len();
    (0..dim)
        .map(|x| {
            (0..dim)
                .map(|z| {
                    let mut acc = LogForm::zero(2);
                    for y in 0..dim {
                        acc.add_assign(&a[x][y].wedge(&b[y][z]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &CoeffMatrix, b: &CoeffMatrix) -> CoeffMatrix {
    let dim = a.len();
    (0..dim)
        .map(|x| (0..dim).map(|z| RationalCoeff::sum_of((0..dim).map(|y| a[x][y].mul(&b[y][z])).collect::<Vec<_>>().iter())).collect())
        .collect()
}

/// Curvature of `∇ = d + κ⁻¹(ω_m - ω_KZ)` on the weight-`N` space.
pub fn flatness(n: usize, level: u32, params: &KzParams, variant: CasimirVariant) -> FlatnessReport {
    let basis = compositions(n, level);
    let dim = basis.len();
    let kinv = params.kappa_inverse();
    let kz = omega_kz(n, level, variant, params);
    let omega_m = omega_coulomb(n, level, params);
    let kz_forms = mat_forms(&kz, dim);
    let d_omega_kz_zero = kz_forms.iter().flatten().all(|f| f.differential().is_zero());
    let mut failures = Vec::new();
    let mut omega_kz_squared_zero = true;
    for (x, row) in mat_wedge(&kz_forms, &kz_forms).iter().enumerate() {
        for (z, f) in row.iter().enumerate() {
            if let Some(c) = f.nonzero_witness() {
                omega_kz_squared_zero = false;
                failures.push(ResidualFailure {
                    identity: "omega_KZ ^ omega_KZ".into(),
                    basis: format!("{} <- {}", fmt_basis("", &basis[x]), fmt_basis("", &basis[z])),
                    certificate: c,
                });
            }
        }
    }
    // [Ω_ab, Ω_ac + Ω_bc] = 0 for every triple
    let mut casimir_commutators_zero = true;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let m = &params.m;
                let oab = casimir_matrix(variant, a, b, &basis, m);
                let oac = casimir_matrix(variant, a, c, &basis, m);
                let obc = casimir_matrix(variant, b, c, &basis, m);
                let sum: CoeffMatrix =
                    oac.iter().zip(&obc).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add(y)).collect()).collect();
                let lhs = mat_mul(&oab, &sum);
                let rhs = mat_mul(&sum, &oab);
                if lhs != rhs {
                    casimir_commutators_zero = false;
                }
            }
        }
    }
    // A = ω_m Id - ω_KZ, curvature = κ⁻¹ dA + κ⁻² A ∧ A
    let mut a = kz_forms.iter().map(|r| r.iter().map(LogForm::neg).collect::<Vec<_>>()).collect::<Vec<_>>();
    for (x, row) in a.iter_mut().enumerate() {
        row[x].add_assign(&omega_m);
    }
    let da_zero = a.iter().flatten().all(|f| f.differential().is_zero());
    let k2 = kinv.mul(&kinv);
    let aa = mat_wedge(&a, &a);
    let mut curvature_zero = da_zero;
    for (x, row) in aa.iter().enumerate() {
        for (z, f) in row.iter().enumerate() {
            if let Some(c) = f.scale(&k2).nonzero_witness() {
                curvature_zero = false;
                failures.push(ResidualFailure {
                    identity: "curvature".into(),
                    basis: format!("{} <- {}", fmt_basis("", &basis[x]), fmt_basis("", &basis[z])),
                    certificate: c,
                });
            }
        }
    }
    FlatnessReport {
        n,
        level,
        variant,
        params: params.describe(),
        d_omega_kz_zero,
        omega_kz_squared_zero,
        casimir_commutators_zero,
        curvature_zero,
        failures,
    }
}

/// Dual Chevalley basis: `φ_x` for `|x| = N` and `φ'_y` for `|y| = N - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DualIndex {
    Zero(usize),
    One(usize),
}

/// Element of `Ω(U_n) ⊗ C_•(M*)_N`: a `z`-form per dual basis vector.
pub type SourceElement = BTreeMap<DualIndex, LogForm>;

fn source_add(s: &mut SourceElement, k: DualIndex, f: LogForm) {
    if f.is_empty() {
        return;
    }
    match s.get_mut(&k) {
        Some(g) => g.add_assign(&f),
        None => {
            s.insert(k, f);
        }
    }
}

struct Bosonization<'a> {
    cocycle: &'a Cocycle,
    kinv: RationalCoeff,
    omega_m: LogForm,
    kz0: Vec<(LogAtom, CoeffMatrix)>,
    kz1: Vec<(LogAtom, CoeffMatrix)>,
    chevalley: CoeffMatrix,
}

impl Bosonization<'_> {
    /// `η(ψ ⊗ φ) = ψ ∧ <φ, I>`.
    fn eta(&self, s: &SourceElement) -> LogForm {
        let mut out = LogForm::zero(0);
        for (k, psi) in s {
            let w = match k {
                DualIndex::Zero(x) => &self.cocycle.i0[*x].1,
                DualIndex::One(y) => &self.cocycle.i1[*y].1,
            };
            out.add_assign(&psi.wedge(w));
        }
        out
    }

    /// Source differential: `d ψ ⊗ φ + (-1)^|ψ| ψ ∧ (κ⁻¹ sum dlog z_bc ⊗ Ωᵀ φ)
    /// - (-1)^|ψ| ψ ⊗ d_Ch* φ`, the forms `ψ` being closed.
    fn source_d(&self, s: &SourceElement) -> SourceElement {
        let mut out = SourceElement::new();
        for (k, psi) in s {
            let sign = if psi.degree() % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            let (kz, make): (&[(LogAtom, CoeffMatrix)], fn(usize) -> DualIndex) = match k {
                DualIndex::Zero(_) => (&self.kz0, DualIndex::Zero),
                DualIndex::One(_) => (&self.kz1, DualIndex::One),
            };
            let (DualIndex::Zero(x) | DualIndex::One(x)) = *k;
            for (atom, mat) in kz {
                let base = psi.wedge(&LogForm::dlog(atom.clone())).scale(&self.kinv).scale_rational(&sign);
                for (y, c) in mat[x].iter().enumerate() {
                    if !c.is_zero() {
                        source_add(&mut out, make(y), base.scale(c));
                    }
                }
            }
            if let DualIndex::One(y) = *k {
                for (x, c) in self.chevalley[y].iter().enumerate() {
                    if !c.is_zero() {
                        source_add(&mut out, DualIndex::Zero(x), psi.scale(c).scale_rational(&-sign.clone()));
                    }
                }
            }
        }
        out
    }

    fn nabla_coul(&self, f: &LogForm) -> LogForm {
        self.omega_m.scale(&self.kinv).wedge(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BosonizationReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub level: u32,
    pub params: serde_json::Value,
    pub source_elements: usize,
    pub chain_map: bool,
    pub source_d_squared_zero: bool,
    pub filtration: bool,
    pub failures: Vec<ResidualFailure>,
}

impl BosonizationReport {
    pub fn passed(&self) -> bool {
        self.chain_map && self.source_d_squared_zero && self.filtration
    }
}

fn z_degree_ok(f: &LogForm, min: usize) -> bool {
    let e: CoordForm = f.expand_coordinates();
    e.terms().keys().all(|block| block.iter().filter(|v| matches!(v, Var::Z(_))).count() >= min)
}

/// Chain-map and filtration check of `η(I)` on the source elements
/// `ψ ⊗ φ` with `ψ ∈ {1} ∪ {dlog(z_b - z_c)}`.
pub fn bosonization_check(cocycle: &Cocycle, params: &KzParams, variant: CasimirVariant) -> BosonizationReport {
    let n = cocycle.n;
    let level = cocycle.level;
    let ctx = Bosonization {
        cocycle,
        kinv: params.kappa_inverse(),
        omega_m: omega_coulomb(n, level, params),
        kz0: omega_kz(n, level, variant, params),
        kz1: omega_kz(n, level - 1, variant, params),
        chevalley: chevalley_matrix(n, level, &params.m),
    };
    let mut psis = vec![LogForm::one()];
    for b in 1..=n {
        for c in b + 1..=n {
            psis.push(LogForm::dlog(LogAtom::z_z(b as u16, c as u16)));
        }
    }
    let duals: Vec<DualIndex> =
        (0..cocycle.i0.len()).map(DualIndex::Zero).chain((0..cocycle.i1.len()).map(DualIndex::One)).collect();
    let mut sources = Vec::new();
    for psi in &psis {
        for k in &duals {
            let mut s = SourceElement::new();
            s.insert(*k, psi.clone());
            sources.push((psi.degree(), format!("{psi} ⊗ {k:?}"), s));
        }
    }
    let results: Vec<(Option<ResidualFailure>, Option<ResidualFailure>, bool)> = sources
        .par_iter()
        .map(|(deg, label, s)| {
            let lhs = ctx.nabla_coul(&ctx.eta(s));
            let rhs = ctx.eta(&ctx.source_d(s));
            let chain = lhs.sub(&rhs).nonzero_witness().map(|certificate| ResidualFailure {
                identity: "nabla_Coul eta - eta D".into(),
                basis: label.clone(),
                certificate,
            });
            let dd = ctx.source_d(&ctx.source_d(s));
            let square = dd.iter().find_map(|(k, f)| {
                f.nonzero_witness().map(|certificate| ResidualFailure {
                    identity: "D^2".into(),
                    basis: format!("{label} -> {k:?}"),
                    certificate,
                })
            });
            let filt = z_degree_ok(&ctx.eta(s), *deg);
            (chain, square, filt)
        })
        .collect();
    let mut failures = Vec::new();
    let mut chain_map = true;
    let mut square_zero = true;
    let mut filtration = true;
    for (c, s, f) in results {
        if let Some(c) = c {
            chain_map = false;
            failures.push(c);
        }
        if let Some(s) = s {
            square_zero = false;
            failures.push(s);
        }
        filtration &= f;
    }
    BosonizationReport {
        n,
        level,
        params: params.describe(),
        source_elements: sources.len(),
        chain_map,
        source_d_squared_zero: square_zero,
        filtration,
        failures,
    }
}

/// Probability that a nonzero residual vanishes at `samples` independent
/// sampled points.
pub fn schwartz_zippel_bound(samples: usize) -> f64 {
    (RESIDUAL_DEGREE_BOUND as f64 / SAMPLE_SET_SIZE as f64).powi(samples as i32)
}

pub fn p_adic_unit(x: &BigRational, p: u64) -> bool {
    padic::val_p(x, p) == padic::Valuation::Finite(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(i: u16) -> RationalCoeff {
        RationalCoeff::var(Var::M(i))
    }

    #[test]
    fn verma_examples() {
        let m1 = m(1);
        assert!(verma_action(Sl2::E, &m1, 0).is_none());
        assert_eq!(verma_action(Sl2::H, &m1, 0), Some((0, m1.clone())));
        let (k, c) = verma_action(Sl2::E, &m1, 2).unwrap();
        assert_eq!(k, 1);
        assert_eq!(c, RationalCoeff::parse("2*m1 - 2").unwrap());
    }

    #[test]
    fn commutator_relations() {
        // [e, f] = h, [h, e] = 2e, [h, f] = -2f on f^k v
        let ms = vec![m(1)];
        for k in 0..5 {
            let v = unit(&[k]);
            let ef = act_on_factor(Sl2::E, 0, &act_on_factor(Sl2::F, 0, &v, &ms), &ms);
            let fe = act_on_factor(Sl2::F, 0, &act_on_factor(Sl2::E, 0, &v, &ms), &ms);
            let h = act_on_factor(Sl2::H, 0, &v, &ms);
            let mut diff = ef.clone();
            for (key, c) in fe {
                add_into(&mut diff, key, c.neg());
            }
            assert_eq!(diff, h);
        }
    }

    #[test]
    fn casimir_small_cases() {
        let ms = vec![m(1), m(2)];
        let om = casimir_matrix(CasimirVariant::Standard, 0, 1, &compositions(2, 0), &ms);
        assert_eq!(om[0][0], RationalCoeff::parse("m1*m2/2").unwrap());
        assert!(casimir_commutes(CasimirVariant::Standard, 2, 2, &ms));
        assert!(!casimir_commutes(CasimirVariant::Printed, 2, 2, &ms));
    }

    #[test]
    fn coulomb_form_examples() {
        let p = KzParams::symbolic(1);
        let w = omega_coulomb(1, 1, &p);
        assert_eq!(w, LogForm::term(m(1).neg(), vec![LogAtom::t_z(1, 1)]));
        let p = KzParams::symbolic(2);
        let w = omega_coulomb(2, 0, &p);
        assert_eq!(w, LogForm::term(RationalCoeff::parse("m1*m2/2").unwrap(), vec![LogAtom::z_z(1, 2)]));
    }

    #[test]
    fn forms_and_basis_sizes() {
        assert_eq!(u_b(&[1]), LogForm::dlog(LogAtom::t_z(1, 1)));
        assert_eq!(u_b(&[1, 1]), LogForm::term(RationalCoeff::one(), vec![LogAtom::t_z(1, 1), LogAtom::t_z(2, 2)]));
        assert_eq!(compositions(3, 2).len(), 6);
        assert_eq!(compositions(3, 1).len(), 3);
        let p = KzParams::symbolic(2);
        let c = build_cocycle(2, 1, &p, FROZEN_READING).unwrap();
        assert_eq!(c.i0[0], (vec![0, 1], LogForm::dlog(LogAtom::t_z(1, 2))));
        assert_eq!(c.i0[1], (vec![1, 0], LogForm::dlog(LogAtom::t_z(1, 1))));
    }

    #[test]
    fn cocycle_n1_n1() {
        let p = KzParams::symbolic(1);
        let c = build_cocycle(1, 1, &p, FROZEN_READING).unwrap();
        assert!(verify_cocycle(&c, &p, CasimirVariant::Standard).passed());
    }

    #[test]
    fn padic_mode_requires_large_prime() {
        let q = |n: i64| BigRational::from_integer(n.into());
        assert!(matches!(
            verify_cocycle_padic(1, 2, &[q(3)], &q(2), 2, 3, FROZEN_READING, CasimirVariant::Standard),
            Err(KzError::PrimeTooSmall { .. })
        ));
        let r = verify_cocycle_padic(2, 2, &[q(3), q(4)], &q(2), 5, 3, FROZEN_READING, CasimirVariant::Standard).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
