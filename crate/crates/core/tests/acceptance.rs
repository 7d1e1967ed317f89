//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use wittkz_core::aomoto::AomotoComplex;
use wittkz_core::arrangement::{self, fixture, points_on_line, OSAlgebra, OSElement, FIXTURE_NAMES};
use wittkz_core::kz::{self, CasimirVariant, KzParams, FROZEN_READING};
use wittkz_core::milnor::GELFAND_FIXTURE;
use wittkz_core::suite::{self, RunConfig, Status};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn cfg(p: u64, a: u32, samples: usize, seed: u64) -> RunConfig {
    RunConfig { p: Some(p), precision: Some(a), samples: Some(samples), seed, ..RunConfig::default() }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut forms = 0;
    for p in [3, 5, 7] {
        for a in 1..=4 {
            let r = suite::drw_identities(&cfg(p, a, 100, 42)).expect("valid config");
            forms += 100;
            for id in ["drw.fv", "drw.vf", "drw.fdv", "drw.df", "drw.vd", "drw.projection"] {
                if r.record(id).map(|x| x.status) != Some(Status::Pass) {
                    bad.push(format!("p={p} a={a} {id}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(60);
    outcome(ok, format!("{forms} forms per identity, {:.2?}, failures {bad:?}", elapsed))
}

fn criterion_2() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for p in [3, 5, 7] {
        let r = suite::point_record(p, 4);
        ok &= r.status == Status::Pass;
        detail.push(format!("p={p}:{:?}", r.status));
    }
    outcome(ok, format!("levels 1..4, {}", detail.join(" ")))
}

fn criterion_3() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for p in [3, 5, 7] {
        let r = suite::e0_grid_record(p);
        ok &= r.status == Status::Pass;
        detail.push(format!("p={p}: {} monomials {:?}", r.payload["monomials"], r.status));
    }
    outcome(ok, detail.join(", "))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    for p in [3, 5, 7] {
        let r = suite::drw_identities(&cfg(p, 3, 100, 7)).expect("valid config");
        for id in ["drw.f-fixed-closed", "drw.dlog-fixed-closed"] {
            ok &= r.record(id).map(|x| x.status) == Some(Status::Pass);
        }
    }
    let mut generators = 0;
    for name in ["single", "coordinate3", "points1"] {
        let os = OSAlgebra::build(&fixture(name).unwrap()).unwrap();
        for i in 0..os.arrangement().len() {
            let f = os.psi_drw(&OSElement::tuple(&[i]), 5, 3).unwrap();
            ok &= f.is_f_fixed() && f.differential().is_zero();
            generators += 1;
        }
    }
    outcome(ok, format!("random F-fixed forms at p=3,5,7 and {generators} arrangement dlog forms"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let three = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap().dims();
    let mut ok = three == [1, 3, 2];
    for n in 1..=6 {
        ok &= OSAlgebra::build(&points_on_line(n)).unwrap().dims() == [1, n];
    }
    let mut checked = Vec::new();
    for name in FIXTURE_NAMES {
        let arr = fixture(name).unwrap();
        if arr.len() > 6 || arr.dim() > 3 {
            continue;
        }
        let os = OSAlgebra::build(&arr).unwrap();
        let r = arrangement::verify_psi_iso(&os, os.top_degree()).unwrap();
        ok &= r.ok;
        checked.push(*name);
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    outcome(ok, format!("threelines {three:?}, points 1..6, psi ranks on {} fixtures, {:.2?}", checked.len(), elapsed))
}

fn criterion_6() -> Outcome {
    let q = |n: i64| BigRational::from_integer(n.into());
    let mut ok = true;
    for name in FIXTURE_NAMES {
        let os = OSAlgebra::build(&fixture(name).unwrap()).unwrap();
        let cx = AomotoComplex::build(&os, &vec![q(0); os.arrangement().len()]).unwrap();
        let mut dims = cx.cohomology_dims();
        dims.truncate(os.dims().len());
        ok &= dims == os.dims();
    }
    let primes = [2, 3, 5, 7, 11, 13];
    for n in 1..=6 {
        let os = OSAlgebra::build(&points_on_line(n)).unwrap();
        let w: Vec<BigRational> = primes[..n].iter().map(|&p| q(p)).collect();
        ok &= AomotoComplex::build(&os, &w).unwrap().cohomology_dims() == [0, n - 1];
    }
    let os = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap();
    let three = AomotoComplex::build(&os, &[q(2), q(3), q(5)]).unwrap().cohomology_dims();
    ok &= three == [0, 0, 0];
    outcome(ok, format!("zero weights on {} fixtures, points 1..6 -> (0, n-1), threelines -> {three:?}", FIXTURE_NAMES.len()))
}

fn criterion_7() -> Outcome {
    let derivation = serde_json::from_str(GELFAND_FIXTURE).unwrap();
    let r = suite::milnor_verify(&derivation, &RunConfig::default()).unwrap();
    let derivation_ok = r.record("milnor.derivation").map(|x| x.status) == Some(Status::Pass);
    let dlog_ok = r.record("milnor.gelfand-dlog").map(|x| x.status) == Some(Status::Pass);
    outcome(derivation_ok && dlog_ok, format!("derivation {derivation_ok}, dlog realization zero {dlog_ok}"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, level) in suite::SELECTION_CASES {
        let params = KzParams::symbolic(n);
        let c = kz::build_cocycle(n, level, &params, FROZEN_READING).unwrap();
        let r = kz::verify_cocycle(&c, &params, CasimirVariant::Standard);
        ok &= r.passed();
        detail.push(format!("({n},{level}) symbolic {}", r.passed()));
    }
    let r = suite::kz_cocycle(&RunConfig { n: Some(3), level: Some(2), samples: Some(5), seed: 2024, ..RunConfig::default() })
        .unwrap();
    let sampled: Vec<_> = r.records.iter().filter(|x| x.id.starts_with("kz.cocycle.sample-")).collect();
    ok &= sampled.len() >= 5 && sampled.iter().all(|x| x.status == Status::Pass);
    detail.push(format!("(3,2) at {} sampled points", sampled.len()));
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    outcome(ok, format!("{}, {:.2?}", detail.join(", "), elapsed))
}

fn criterion_9() -> Outcome {
    let r = suite::casimir_arbitration();
    let selected = r.payload["selected"].clone();
    outcome(r.status == Status::Pass && selected == serde_json::json!("standard"), format!("selected {selected}"))
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut cases = 0;
    for n in 1..=3 {
        for level in 1..=2 {
            let params = KzParams::symbolic(n);
            let r = kz::flatness(n, level, &params, CasimirVariant::Standard);
            ok &= r.passed();
            cases += 1;
        }
    }
    outcome(ok, format!("{cases} symbolic cases n <= 3, N <= 2"))
}

fn run_all_suites(seed: u64) -> Vec<String> {
    let c = RunConfig { seed, samples: Some(20), ..RunConfig::default() };
    let three = fixture("threelines").unwrap();
    let derivation = serde_json::from_str(GELFAND_FIXTURE).unwrap();
    let kz = RunConfig { n: Some(3), level: Some(2), samples: Some(5), seed, ..RunConfig::default() };
    vec![
        suite::drw_identities(&c).unwrap().to_json(),
        suite::drw_normal_form(&c).unwrap().to_json(),
        suite::os_build(&three, &c).unwrap().to_json(),
        suite::psi_verify(&[("threelines".into(), three.clone())], &c).unwrap().to_json(),
        suite::aomoto(&three, &c).unwrap().to_json(),
        suite::milnor_verify(&derivation, &c).unwrap().to_json(),
        suite::milnor_probe(&three, &c).unwrap().to_json(),
        suite::kz_cocycle(&kz).unwrap().to_json(),
        suite::bosonization(&c).unwrap().to_json(),
    ]
}

fn criterion_11() -> Outcome {
    let pool = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let a = pool(1).install(|| run_all_suites(11));
    let b = pool(4).install(|| run_all_suites(11));
    let c = run_all_suites(11);
    let other = run_all_suites(12);
    let ok = a == b && b == c && a != other;
    outcome(ok, format!("{} suites identical across 1/4/default threads, a different seed changes the report: {}", a.len(), a != other))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("DRW operator identities", criterion_1),
        ("W_a of the point is Z/p^a", criterion_2),
        ("E^0 closed form", criterion_3),
        ("F-fixed forms are closed", criterion_4),
        ("OS dimensions and psi ranks", criterion_5),
        ("Aomoto desk checks", criterion_6),
        ("Gelfand identity", criterion_7),
        ("hypergeometric cocycle", criterion_8),
        ("Casimir arbitration", criterion_9),
        ("KZ flatness", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.ok { "PASS" } else { "FAIL" };
        if !o.ok {
            failed += 1;
        }
        println!("criterion {:>2} {tag} {name} [{:.2?}]: {}", i + 1, start.elapsed(), o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
