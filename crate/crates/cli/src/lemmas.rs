use bdcover::bd::{check_star_paths, construct_square, sq_extend, verify_square_theorem, BDTriple};
use bdcover::ext::{baer_sum_n, pushout_m, CocycleKind, Extension};
use bdcover::lattice::CoeffGroup;
use bdcover::qform::{invariant_form_space, weyl_invariant_form, QFormError};
use bdcover::roots::{build_root_datum, Family};
use bdcover::symbols::{tame_hilbert, TameLocalField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::report::{Check, ReportDocument};
use crate::Global;

const FORM_CASES: &[(Family, &[usize])] =
    &[(Family::A, &[1, 2, 3]), (Family::B, &[2, 3, 4]), (Family::C, &[1, 2, 3, 4]), (Family::D, &[2, 3, 4])];

fn admissible(f: Family, a: i64) -> bool {
    !matches!(f, Family::B | Family::D) || a % 2 == 0
}

fn form_uniqueness() -> Check {
    let mut bad = Vec::new();
    for &(f, ranks) in FORM_CASES {
        for &n in ranks {
            let d = build_root_datum(f, n).expect("family and rank are valid");
            let weyl = d.weyl_group();
            let dim = invariant_form_space(&d).len();
            for a in (1..=4).filter(|&a| admissible(f, a)) {
                let ok = dim == 1
                    && weyl_invariant_form(&d, a).is_ok_and(|q| {
                        weyl.iter().all(|w| {
                            (0..d.rank).all(|i| q.q(&w[i]) == q.diag[i] && (0..d.rank).all(|j| q.bilinear(&w[i], &w[j]) == q.b(i, j)))
                        })
                    });
                if !ok {
                    bad.push(format!("{f}{n} a={a}"));
                }
            }
        }
    }
    Check::new("invariant_form_unique_and_weyl_invariant", bad.is_empty(), json!({"failures": bad}))
}

fn parity() -> Check {
    let mut bad = Vec::new();
    for &(f, ranks) in FORM_CASES {
        for &n in ranks {
            let d = build_root_datum(f, n).expect("family and rank are valid");
            for a in 1..=6 {
                let violation = matches!(weyl_invariant_form(&d, a), Err(QFormError::ParityViolation { .. }));
                if violation == admissible(f, a) {
                    bad.push(format!("{f}{n} a={a}"));
                }
            }
        }
    }
    Check::new("parity_violation_exactly_for_odd_a_in_b_and_d", bad.is_empty(), json!({"failures": bad}))
}

fn baer_equals_pushout(rng: &mut ChaCha8Rng) -> Check {
    let mu = CoeffGroup::MuN(12);
    let mut failures = 0;
    for _ in 0..50 {
        let r = rng.gen_range(1..=3);
        let table = (0..r).map(|_| (0..r).map(|_| mu.residue(rng.gen_range(0..12))).collect()).collect();
        let e = Extension::from_table(mu, table, CocycleKind::ExplicitTable);
        for m in 0..=5 {
            if !pushout_m(&e, m).same_table(&baer_sum_n(&e, m as usize)) {
                failures += 1;
            }
        }
    }
    Check::new("baer_sum_equals_pushout", failures == 0, json!({"extensions": 50, "failures": failures}))
}

fn commutator_is_sign_of_b(window: i64) -> Check {
    let mut bad = Vec::new();
    for &(f, ranks) in FORM_CASES {
        for &n in ranks.iter().filter(|&&n| n <= 3) {
            let d = build_root_datum(f, n).expect("family and rank are valid");
            let a = if admissible(f, 1) { 1 } else { 2 };
            let q = weyl_invariant_form(&d, a).expect("admissible");
            let e = Extension::standard_from_q(&q, CoeffGroup::MuN(2)).expect("mu_2 has -1");
            if !e.commutator_matches(&q, window) {
                bad.push(format!("{f}{n}"));
            }
        }
    }
    Check::new("standard_extension_commutator_is_minus_one_to_b", bad.is_empty(), json!({"window": window, "failures": bad}))
}

fn sq_closure() -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    for (f, n) in [(Family::C, 3), (Family::B, 3), (Family::D, 4), (Family::A, 3)] {
        let t = BDTriple::standard_for(f, n, 2, CoeffGroup::QmodZ).expect("even form is admissible");
        let (paths, agree, inverses) = match sq_extend(&t) {
            Ok(lift) => {
                let d = &lift.triple.datum;
                let inverses = (0..d.coroots.len()).all(|i| {
                    t.e.mul(&lift.values[d.negative_of(i)], &lift.values[i]).is_ok_and(|p| p == t.e.identity())
                });
                match check_star_paths(&lift) {
                    Ok(p) => (p.len(), p.iter().all(|c| c.agrees), inverses),
                    Err(_) => (0, false, inverses),
                }
            }
            Err(_) => (0, false, false),
        };
        ok &= agree && inverses;
        rows.push(json!({"datum": format!("{f}{n}"), "paths": paths, "paths_agree": agree, "inverse_relation": inverses}));
    }
    Check::new("s_q_closure", ok, Value::Array(rows))
}

fn square_sweep(jobs: usize) -> Check {
    let mut cases = Vec::new();
    for (f, n) in [(Family::C, 1), (Family::C, 2), (Family::D, 2), (Family::D, 3), (Family::B, 2), (Family::A, 1), (Family::A, 2)] {
        for a in [1, 2].into_iter().filter(|&a| admissible(f, a)) {
            for k in [1, 2] {
                for cover in 1..=4 {
                    cases.push((f, n, a, k, cover));
                }
            }
        }
    }
    let run = |&(f, n, a, k, cover): &(Family, usize, i64, i64, i64)| -> Option<String> {
        let ok = BDTriple::standard_for(f, n, a, CoeffGroup::QmodZ)
            .and_then(|t| construct_square(&t, k, cover))
            .and_then(|sc| verify_square_theorem(&sc))
            .is_ok_and(|r| r.passed);
        (!ok).then(|| format!("{f}{n} a={a} k={k} n={cover}"))
    };
    let failures: Vec<String> = with_jobs(jobs, || cases.par_iter().filter_map(run).collect());
    Check::new("square_theorem_sweep", failures.is_empty(), json!({"cases": cases.len(), "failures": failures}))
}

fn symbol_sanity(rng: &mut ChaCha8Rng) -> Check {
    let k: TameLocalField = "Qp:5,n:4".parse().expect("valid field");
    let mut failures = 0;
    for _ in 0..200 {
        let a = rng.gen_range(2..200i64);
        let b = rng.gen_range(2..200i64);
        let (ea, eb) = (k.from_i64(a), k.from_i64(b));
        if !tame_hilbert(&ea, &eb, &k).mul(&tame_hilbert(&eb, &ea, &k)).is_one() {
            failures += 1;
        }
        if let Some(one_minus) = ea.one_minus() {
            if !tame_hilbert(&ea, &one_minus, &k).is_one() {
                failures += 1;
            }
        }
    }
    Check::new("hilbert_steinberg_and_antisymmetry", failures == 0, json!({"samples": 200, "failures": failures}))
}

fn with_jobs<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        return work();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

pub fn run(g: &Global) -> ReportDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let results = vec![
        form_uniqueness(),
        parity(),
        baer_equals_pushout(&mut rng),
        commutator_is_sign_of_b(g.window),
        sq_closure(),
        square_sweep(g.jobs),
        symbol_sanity(&mut rng),
    ];
    let mut p = Map::new();
    p.insert("jobs".into(), json!(g.jobs));
    p.insert("seed".into(), json!(g.seed));
    p.insert("window".into(), json!(g.window));
    ReportDocument::new("lemmas", p, results)
}
