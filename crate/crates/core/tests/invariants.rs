//! Property tests of the algebraic invariants.

use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wittkz_core::aomoto::AomotoComplex;
use wittkz_core::arrangement::{euler, Arrangement, Field, Hyperplane, OSAlgebra, OSElement};
use wittkz_core::kz::{self, CasimirVariant, KzParams, Sl2, TensorVec, FROZEN_READING};
use wittkz_core::logform::{LogAtom, LogForm};
use wittkz_core::milnor::{self, KSymbol};
use wittkz_core::padic::PadicScalar;
use wittkz_core::poly::Var;
use wittkz_core::ratfn::RationalCoeff;
use wittkz_core::witt::{self, RingSpec, SampleBounds};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn padic_unit_inverse(p in prime(), a in 1u32..5, v in 1i128..10_000) {
        let x = PadicScalar::new(p, a, v).unwrap();
        prop_assume!(x.is_unit());
        let y = x.invert_unit().unwrap();
        prop_assert_eq!((x * y).value(), 1);
    }

    #[test]
    fn teichmuller_is_multiplicative_and_fixed(p in prime(), a in 1u32..5, u in 1i128..1000, v in 1i128..1000) {
        let x = PadicScalar::new(p, a, u).unwrap();
        let y = PadicScalar::new(p, a, v).unwrap();
        prop_assume!(x.is_unit() && y.is_unit());
        let (tx, ty) = (x.teichmuller(), y.teichmuller());
        prop_assert_eq!((x * y).teichmuller(), tx * ty);
        prop_assert_eq!(tx.pow(p), tx);
    }

    #[test]
    fn drw_operator_identities(p in prime(), a in 1u32..5, r in 1u16..4, laurent in any::<bool>(), seed in any::<u64>()) {
        let spec = if laurent { RingSpec::laurent(p, a, r) } else { RingSpec::polynomial(p, a, r) };
        let spec = Arc::new(spec.unwrap());
        let bounds = SampleBounds { max_den_exp: a - 1, ..SampleBounds::default() };
        let mut g = rng(seed);
        let x = witt::random_e_form(&spec, &mut g, &bounds);
        let y = witt::random_e_form(&spec, &mut g, &bounds);
        let pq = q(p as i64);
        prop_assert_eq!(x.verschiebung().frobenius(), x.scale(&pq));
        prop_assert_eq!(x.frobenius().verschiebung(), x.scale(&pq));
        prop_assert_eq!(x.verschiebung().differential().frobenius(), x.differential());
        prop_assert_eq!(x.frobenius().differential(), x.differential().frobenius().scale(&pq));
        prop_assert_eq!(x.differential().verschiebung(), x.verschiebung().differential().scale(&pq));
        prop_assert_eq!(x.multiply(&y.frobenius()).unwrap().verschiebung(), x.verschiebung().multiply(&y).unwrap());
        prop_assert!(x.differential().differential().is_zero());
        prop_assert!(x.is_in_e());
        prop_assert!(x.differential().is_in_e() && x.frobenius().is_in_e() && x.verschiebung().is_in_e());
    }

    #[test]
    fn d_squared_on_arbitrary_forms(p in prime(), r in 1u16..4, seed in any::<u64>()) {
        let spec = Arc::new(RingSpec::laurent(p, 3, r).unwrap());
        let x = witt::random_form(&spec, &mut rng(seed), &SampleBounds::default());
        prop_assert!(x.differential().differential().is_zero());
    }

    #[test]
    fn fil_normal_forms_form_a_projective_system(p in prime(), seed in any::<u64>()) {
        let a = 3;
        let spec = Arc::new(RingSpec::laurent(p, a, 2).unwrap());
        let bounds = SampleBounds { max_den_exp: a - 1, max_terms: 4, ..SampleBounds::default() };
        let x = witt::random_e_form(&spec, &mut rng(seed), &bounds);
        for l in 2..=a {
            let top = x.wa_normal_form(l).unwrap();
            prop_assert_eq!(top.wa_normal_form(l - 1).unwrap(), x.wa_normal_form(l - 1).unwrap());
            prop_assert!(x.verschiebung_pow(l).fil_membership(l).unwrap());
            prop_assert!(x.verschiebung_pow(l).differential().fil_membership(l).unwrap());
        }
    }

    #[test]
    fn f_fixed_forms_are_closed(p in prime(), r in 1u16..4, seed in any::<u64>()) {
        let spec = Arc::new(RingSpec::laurent(p, 2, r).unwrap());
        let x = witt::random_f_fixed(&spec, &mut rng(seed), 30);
        prop_assert!(x.is_f_fixed());
        prop_assert!(x.differential().is_zero());
    }
}

fn coeff() -> impl Strategy<Value = RationalCoeff> {
    let vars = prop::sample::select(vec!["x", "y", "t1", "z1", "x - y", "t1 - z1", "x + 2*y - 3"]);
    (vars.clone(), vars, -5i64..6, 1i64..5).prop_map(|(a, b, n, d)| {
        RationalCoeff::parse(&format!("{n}*({a})/({d}*({b}))")).unwrap()
    })
}

fn atom() -> impl Strategy<Value = LogAtom> {
    prop::sample::select(vec![
        LogAtom::t(1),
        LogAtom::t(2),
        LogAtom::t_z(1, 1),
        LogAtom::t_z(2, 1),
        LogAtom::t_t(1, 2),
        LogAtom::z_z(1, 2),
    ])
}

fn form_coeff() -> impl Strategy<Value = RationalCoeff> {
    prop::sample::select(vec!["1", "-2", "3/2", "m1", "m1*m2/2 - 1", "1/kappa", "t1", "1/(z1 - z2)"])
        .prop_map(|s| RationalCoeff::parse(s).unwrap())
}

fn log_form_of(d: usize) -> impl Strategy<Value = LogForm> {
    prop::collection::vec((prop::collection::vec(atom(), d), form_coeff()), 1..4).prop_map(move |terms| {
        let mut f = LogForm::zero(d);
        for (atoms, c) in terms {
            f.add_assign(&LogForm::term(c, atoms));
        }
        f
    })
}

fn log_form(max_degree: usize) -> impl Strategy<Value = LogForm> {
    (0..=max_degree).prop_flat_map(log_form_of)
}

fn same_degree_pair() -> impl Strategy<Value = (LogForm, LogForm)> {
    (0..=2usize).prop_flat_map(|d| (log_form_of(d), log_form_of(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_axioms(a in coeff(), b in coeff(), c in coeff()) {
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !b.is_zero() {
            if let Ok(inv) = b.recip() {
                prop_assert_eq!(a.mul(&b).mul(&inv), a.clone());
            }
        }
        let shown = RationalCoeff::parse(&a.to_string()).unwrap();
        prop_assert_eq!(shown, a);
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative(x in log_form(2), y in log_form(2), z in log_form(1)) {
        let sign = if x.degree() * y.degree() % 2 == 0 { 1 } else { -1 };
        prop_assert!(x.wedge(&y).sub(&y.wedge(&x).scale(&RationalCoeff::integer(sign))).is_zero());
        prop_assert!(x.wedge(&y).wedge(&z).sub(&x.wedge(&y.wedge(&z))).is_zero());
    }

    #[test]
    fn fast_zero_test_agrees_with_expansion((x, y) in same_degree_pair()) {
        let f = x.sub(&y);
        prop_assert_eq!(f.nonzero_witness().is_none(), f.expand_coordinates().is_zero());
        // the Arnold relation gives nontrivial zeros
        let d = |a: LogAtom| LogForm::dlog(a);
        let arnold = d(LogAtom::t_z(1, 1)).wedge(&d(LogAtom::t_z(1, 2)))
            .sub(&d(LogAtom::t_z(1, 1)).wedge(&d(LogAtom::z_z(1, 2))))
            .add(&d(LogAtom::t_z(1, 2)).wedge(&d(LogAtom::z_z(1, 2))));
        let g = x.wedge(&arnold);
        prop_assert!(g.nonzero_witness().is_none());
        prop_assert!(g.expand_coordinates().is_zero());
    }

    #[test]
    fn alt_is_idempotent_up_to_factorial(x in log_form(2)) {
        let once = x.alt_symmetrize(2);
        prop_assert!(once.alt_symmetrize(2).sub(&once.scale(&RationalCoeff::integer(2))).is_zero());
    }
}

fn plane_arrangement() -> impl Strategy<Value = Arrangement> {
    prop::collection::vec((-2i64..3, -2i64..3, -2i64..3), 1..6).prop_filter_map("valid arrangement", |hs| {
        let hs: Vec<Hyperplane> = hs.into_iter().map(|(a, b, c)| Hyperplane::from_ints(&[a, b], c)).collect();
        Arrangement::new(Field::Q, 2, hs).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn os_reduction_is_multiplicative(arr in plane_arrangement(), seed in any::<u64>()) {
        use rand::Rng;
        let os = OSAlgebra::build(&arr).unwrap();
        let n = arr.len();
        let mut g = rng(seed);
        let mut random = |d: usize| {
            let mut x = OSElement::zero(d);
            for _ in 0..3 {
                let mut t: Vec<usize> = (0..d).map(|_| g.gen_range(0..n)).collect();
                t.sort_unstable();
                t.dedup();
                if t.len() == d {
                    x.add_term(t, q(g.gen_range(-3..4)));
                }
            }
            x
        };
        let (x, y) = (random(1), random(1));
        prop_assert_eq!(os.reduce(&x.wedge(&y)), os.reduce(&os.reduce(&x).wedge(&os.reduce(&y))));
    }

    #[test]
    fn aomoto_squares_to_zero_and_keeps_euler(arr in plane_arrangement(), ws in prop::collection::vec(-6i64..7, 6)) {
        let os = OSAlgebra::build(&arr).unwrap();
        let w: Vec<BigRational> = ws[..arr.len()].iter().map(|&v| q(v)).collect();
        let cx = AomotoComplex::build(&os, &w).unwrap();
        prop_assert!(cx.squares_to_zero());
        let mut dims = cx.cohomology_dims();
        dims.truncate(os.dims().len());
        prop_assert_eq!(euler(&dims), euler(&os.dims()));
    }

    #[test]
    fn psi_images_have_full_rank(arr in plane_arrangement()) {
        let os = OSAlgebra::build(&arr).unwrap();
        let r = wittkz_core::arrangement::verify_psi_iso(&os, os.top_degree()).unwrap();
        prop_assert!(r.ok, "{:?}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn steinberg_instances_realize_to_zero(a in 1i64..9, b in -9i64..10, c in -9i64..10) {
        let g = format!("{a}*x + {b}*y + {c}");
        let h = format!("1 - ({g})");
        let sym = KSymbol::parse_tuple(&[g.as_str(), h.as_str()]).unwrap();
        prop_assert!(milnor::dlog_realize(&sym).unwrap().is_zero());
    }

    #[test]
    fn chi_is_multiplicative(i in 0usize..3, j in 0usize..3) {
        let arr = wittkz_core::arrangement::fixture("threelines").unwrap();
        let os = OSAlgebra::build(&arr).unwrap();
        let f = ["x", "y", "x - y"];
        let a = KSymbol::parse_tuple(&[f[i]]).unwrap();
        let b = KSymbol::parse_tuple(&[f[j]]).unwrap();
        let lhs = milnor::chi(&a.mul(&b), &os).unwrap();
        let rhs = os.reduce(&milnor::chi(&a, &os).unwrap().wedge(&milnor::chi(&b, &os).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn standard_casimir_commutes_with_diagonal_action(m in prop::collection::vec(-20i64..21, 3), level in 1u32..4) {
        let ms: Vec<RationalCoeff> = m.iter().map(|&v| RationalCoeff::integer(v)).collect();
        prop_assert!(kz::casimir_commutes(CasimirVariant::Standard, 3, level, &ms));
    }

    #[test]
    fn diagonal_action_satisfies_ef_minus_fe(m in prop::collection::vec(-20i64..21, 2), b in prop::collection::vec(0u32..4, 2)) {
        let ms: Vec<RationalCoeff> = m.iter().map(|&v| RationalCoeff::integer(v)).collect();
        let mut v = TensorVec::new();
        v.insert(b, RationalCoeff::one());
        let ef = kz::diagonal(Sl2::E, &kz::diagonal(Sl2::F, &v, &ms), &ms);
        let fe = kz::diagonal(Sl2::F, &kz::diagonal(Sl2::E, &v, &ms), &ms);
        let h = kz::diagonal(Sl2::H, &v, &ms);
        let mut lhs = ef;
        for (k, c) in fe {
            let e = lhs.entry(k.clone()).or_insert_with(RationalCoeff::zero);
            *e = e.sub(&c);
            if e.is_zero() {
                lhs.remove(&k);
            }
        }
        prop_assert_eq!(lhs, h);
    }

    #[test]
    fn cocycle_holds_at_random_points(m in prop::collection::vec(-50i64..51, 2), k in 1i64..50, neg in any::<bool>()) {
        let kappa = if neg { -k } else { k };
        let m: Vec<BigRational> = m.into_iter().map(q).collect();
        let params = KzParams::numeric(&m, &q(kappa)).unwrap();
        let c = kz::build_cocycle(2, 2, &params, FROZEN_READING).unwrap();
        prop_assert!(kz::verify_cocycle(&c, &params, CasimirVariant::Standard).passed());
    }
}

#[test]
fn symbolic_parameters_are_variables() {
    let p = KzParams::symbolic(2);
    assert_eq!(p.m[1], RationalCoeff::var(Var::M(2)));
    assert_eq!(p.kappa, RationalCoeff::var(Var::Kappa));
}
