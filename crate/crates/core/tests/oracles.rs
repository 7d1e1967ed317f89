//! Expected values recomputed by small independent oracles.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use wittkz_core::arrangement::{fixture, points_on_line, Arrangement, OSAlgebra, FIXTURE_NAMES};
use wittkz_core::kz::{self, CasimirVariant, KzParams, Sl2, FROZEN_READING};
use wittkz_core::logform::{LogAtom, LogForm};
use wittkz_core::padic::PadicScalar;
use wittkz_core::ratfn::RationalCoeff;
use wittkz_core::witt::{DrwForm, FracExponent, RingSpec};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

// ---- brute-force Orlik-Solomon dimensions --------------------------------

/// Wedge of a sorted index set with a sorted index set, with sign, or `None`
/// when they overlap.
fn wedge_sets(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect()).collect()
}

fn gauss_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, piv);
        let pv = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pv;
                for k in c..cols {
                    let d = &f * &rows[rank][k];
                    rows[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of an affine system over Q, augmented or not.
fn rank_of(arr: &Arrangement, s: &[usize], augmented: bool) -> usize {
    let rows = s
        .iter()
        .map(|&i| {
            let h = &arr.hyperplanes()[i];
            let mut r = h.coeffs.clone();
            if augmented {
                r.push(h.constant.clone());
            }
            r
        })
        .collect();
    gauss_rank(rows)
}

fn oracle_os_dims(arr: &Arrangement) -> Vec<usize> {
    let n = arr.len();
    // relations: e_S for empty intersection, boundary of e_S for dependent S
    let mut relations: Vec<(usize, BTreeMap<Vec<usize>, BigRational>)> = Vec::new();
    for k in 1..=n {
        for s in all_subsets(n, k) {
            let lin = rank_of(arr, &s, false);
            let aug = rank_of(arr, &s, true);
            if aug > lin {
                relations.push((k, BTreeMap::from([(s, q(1))])));
            } else if lin < k {
                let mut b = BTreeMap::new();
                for j in 0..k {
                    let mut t = s.clone();
                    t.remove(j);
                    b.insert(t, q(if j % 2 == 0 { 1 } else { -1 }));
                }
                relations.push((k - 1, b));
            }
        }
    }
    let mut dims = Vec::new();
    for k in 0..=n {
        let basis = all_subsets(n, k);
        let index: BTreeMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut rows = Vec::new();
        for (d, r) in &relations {
            if *d > k {
                continue;
            }
            for m in all_subsets(n, k - d) {
                let mut row = vec![BigRational::zero(); basis.len()];
                let mut any = false;
                for (t, c) in r {
                    if let Some((u, sign)) = wedge_sets(&m, t) {
                        row[index[&u]] += c * q(sign);
                        any = true;
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }
        dims.push(basis.len() - if rows.is_empty() { 0 } else { gauss_rank(rows) });
    }
    while dims.len() > 1 && dims.last() == Some(&0) {
        dims.pop();
    }
    dims
}

#[test]
fn os_dims_match_brute_force() {
    for name in FIXTURE_NAMES {
        let arr = fixture(name).unwrap();
        let os = OSAlgebra::build(&arr).unwrap();
        assert_eq!(os.dims(), oracle_os_dims(&arr), "{name}");
    }
    assert_eq!(oracle_os_dims(&fixture("threelines").unwrap()), [1, 3, 2]);
    assert_eq!(oracle_os_dims(&points_on_line(4)), [1, 4]);
}

// ---- sl2 actions ----------------------------------------------------------

/// `e f^k v` from `[e, f] = h` and `h f^j v = (m - 2j) f^j v`:
/// `e f^k v = sum_{j<k} (m - 2j) f^{k-1} v`.
fn e_on_fk(m: &BigRational, k: u32) -> BigRational {
    (0..k).map(|j| m - q(2 * j as i64)).fold(BigRational::zero(), |a, b| a + b)
}

#[test]
fn verma_e_action_matches_commutator_recursion() {
    for m in [q(3), q(-2), BigRational::new(5.into(), 7.into())] {
        let mc = RationalCoeff::constant(m.clone());
        for k in 1..8 {
            let (kk, c) = kz::verma_action(Sl2::E, &mc, k).unwrap();
            assert_eq!(kk, k - 1);
            assert_eq!(c.as_constant().unwrap(), e_on_fk(&m, k), "m={m} k={k}");
        }
    }
    // e f^2 v = 2(m - 1) f v
    let c = kz::verma_action(Sl2::E, &RationalCoeff::parse("m1").unwrap(), 2).unwrap().1;
    assert_eq!(c, RationalCoeff::parse("2*m1 - 2").unwrap());
}

#[test]
fn casimir_on_highest_weight_vector() {
    let p = KzParams::symbolic(2);
    let m = kz::casimir_matrix(CasimirVariant::Standard, 0, 1, &kz::compositions(2, 0), &p.m);
    assert_eq!(m, vec![vec![RationalCoeff::parse("m1*m2/2").unwrap()]]);
}

// ---- p-adic and DRW examples ---------------------------------------------

#[test]
fn teichmuller_of_two_mod_25() {
    // iterate x -> x^p, which stabilizes at the Teichmuller lift
    let mut x: u64 = 2;
    for _ in 0..4 {
        x = (0..5).fold(1, |acc, _| acc * x % 25);
    }
    assert_eq!(x, 7);
    assert_eq!(PadicScalar::new(5, 2, 2).unwrap().teichmuller().value(), x);
}

#[test]
fn differential_of_fractional_power() {
    let spec = Arc::new(RingSpec::polynomial(5, 2, 1).unwrap());
    let e = [FracExponent::new(1, 1, 5)];
    let x = DrwForm::monomial(&spec, q(1), &e, &[]).unwrap();
    let expected = DrwForm::monomial(&spec, BigRational::new(1.into(), 5.into()), &e, &[0]).unwrap();
    assert_eq!(x.differential(), expected);
    assert!(!x.is_in_e());
    let y = x.scale(&q(5));
    assert!(y.is_in_e());
}

// ---- forms: fast zero test against full expansion -------------------------

fn residuals(n: usize, level: u32, variant: CasimirVariant) -> Vec<LogForm> {
    let p = KzParams::symbolic(n);
    let c = kz::build_cocycle(n, level, &p, FROZEN_READING).unwrap();
    let (a, b, _) = kz::cocycle_residuals(&c, &p, variant);
    a.into_iter().chain(b).map(|(_, f)| f).collect()
}

#[test]
fn cocycle_residuals_vanish_after_full_expansion() {
    for (n, level) in [(1, 1), (2, 1), (1, 2)] {
        for r in residuals(n, level, CasimirVariant::Standard) {
            assert!(r.expand_coordinates().is_zero(), "({n},{level})");
            assert!(r.nonzero_witness().is_none());
        }
    }
}

#[test]
fn printed_casimir_residual_is_nonzero_in_both_tests() {
    let rs = residuals(2, 1, CasimirVariant::Printed);
    let bad: Vec<&LogForm> = rs.iter().filter(|r| !r.expand_coordinates().is_zero()).collect();
    assert!(!bad.is_empty());
    for r in &rs {
        assert_eq!(r.expand_coordinates().is_zero(), r.nonzero_witness().is_none());
    }
}

#[test]
fn small_cocycle_components() {
    // n = 2, N = 1: I_0 = dlog(t1 - z1) (fv ⊗ v) + dlog(t1 - z2) (v ⊗ fv)
    let p = KzParams::symbolic(2);
    let c = kz::build_cocycle(2, 1, &p, FROZEN_READING).unwrap();
    let by_b: BTreeMap<Vec<u32>, LogForm> = c.i0.into_iter().collect();
    assert_eq!(by_b[&vec![1, 0]], LogForm::dlog(LogAtom::t_z(1, 1)));
    assert_eq!(by_b[&vec![0, 1]], LogForm::dlog(LogAtom::t_z(1, 2)));
    // n = 1, N = 2: Alt(u)/2! = u, since u is already antisymmetric in (t1, t2)
    let p = KzParams::symbolic(1);
    let c = kz::build_cocycle(1, 2, &p, FROZEN_READING).unwrap();
    let u = LogForm::term(RationalCoeff::one(), vec![LogAtom::t_z(1, 1), LogAtom::t_z(2, 1)]);
    assert_eq!(c.i0[0].1, u);
    // Coulomb form for n = 1, N = 1
    let w = kz::omega_coulomb(1, 1, &p);
    assert_eq!(w, LogForm::term(RationalCoeff::parse("-m1").unwrap(), vec![LogAtom::t_z(1, 1)]));
}

#[test]
fn arnold_relation_expands_to_zero() {
    let (x, y, xy) = (LogAtom::t(1), LogAtom::t(2), LogAtom::t_t(1, 2));
    let d = |a: &LogAtom| LogForm::dlog(a.clone());
    let rel = d(&x).wedge(&d(&y)).sub(&d(&x).wedge(&d(&xy))).add(&d(&y).wedge(&d(&xy)));
    assert!(rel.expand_coordinates().is_zero());
}
