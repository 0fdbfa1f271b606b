//! Acceptance suite: one line per criterion.
//!
//! Run with `cargo test -p bdcover --test acceptance`. The process fails if a criterion
//! fails that is not listed in `KNOWN_FAILURES`, or if a listed one starts passing.

use std::time::{Duration, Instant};

use bdcover::bd::{check_star_paths, construct_square, sq_extend, verify_square_theorem, BDTriple};
use bdcover::ext::{baer_sum_n, pushout_m, CocycleKind, Extension};
use bdcover::field::{Field, GaloisField, Rationals};
use bdcover::geometry::orbits::{grassmannian_size, maximal_isotropics};
use bdcover::geometry::{build_group, enumerate_double_cosets, DoublingContext, EnumerationOptions, OmegaClass, OrbitClass};
use bdcover::lattice::CoeffGroup;
use bdcover::qform::{invariant_form_space, weyl_invariant_form, QFormError, QuadraticForm};
use bdcover::roots::{build_root_datum, Family};
use bdcover::symbols::{residue_symbol, tame_hilbert, torus_commutator, LaurentSeries, LocalElem, TameLocalField, TorusCoverElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail, with the reason (see the README).
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    7,
    "over F_2 the A_(k-1) map carries a factor 2, so psi_bullet vanishes and no coset is in Omega_1 or Omega_2",
)];

struct Outcome {
    pass: bool,
    /// For a known failure: whether it fails for the documented reason only.
    explained: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, explained: false, detail: detail.into() }
}

fn admissible(f: Family, a: i64) -> bool {
    !matches!(f, Family::B | Family::D) || a % 2 == 0
}

const FORM_CASES: &[(Family, &[usize])] =
    &[(Family::A, &[1, 2, 3]), (Family::B, &[2, 3, 4]), (Family::C, &[1, 2, 3, 4]), (Family::D, &[2, 3, 4])];

fn form_is_invariant(q: &QuadraticForm, weyl: &[Vec<Vec<i64>>]) -> bool {
    let r = q.rank();
    weyl.iter().all(|w| (0..r).all(|i| q.q(&w[i]) == q.diag[i] && (0..r).all(|j| q.bilinear(&w[i], &w[j]) == q.b(i, j))))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    for &(f, ranks) in FORM_CASES {
        for &n in ranks {
            let d = build_root_datum(f, n).unwrap();
            let weyl = d.weyl_group();
            let dim = invariant_form_space(&d).len();
            for a in (1..=4).filter(|&a| admissible(f, a)) {
                cases += 1;
                let ok = dim == 1
                    && weyl_invariant_form(&d, a).is_ok_and(|q| {
                        // value a on a short coroot (on e_1 for GL), and W-invariance over the whole group
                        let probe = if f == Family::A {
                            let mut e = vec![0; d.rank];
                            e[0] = 1;
                            e
                        } else {
                            d.coroots.iter().min_by_key(|c| c.iter().map(|x| x * x).sum::<i64>()).unwrap().clone()
                        };
                        q.q(&probe) == a && form_is_invariant(&q, &weyl)
                    });
                if !ok {
                    bad.push(format!("{f}{n}/a={a}"));
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(bad.is_empty() && t < Duration::from_secs(10), format!("{cases} cases, failures {bad:?}, {t:.2?} (< 10s)"))
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut raised = 0;
    for &(f, ranks) in FORM_CASES {
        for &n in ranks {
            let d = build_root_datum(f, n).unwrap();
            for a in 1..=6 {
                let violation = matches!(weyl_invariant_form(&d, a), Err(QFormError::ParityViolation { .. }));
                raised += violation as usize;
                let expected = matches!(f, Family::B | Family::D) && a % 2 == 1;
                if violation != expected {
                    bad.push(format!("{f}{n}/a={a}"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("ParityViolation raised {raised} times, mismatches {bad:?}"))
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let mu = CoeffGroup::MuN(12);
    let mut bad = 0;
    for _ in 0..50 {
        let r = rng.gen_range(1..=3);
        let table: Vec<Vec<_>> = (0..r).map(|_| (0..r).map(|_| mu.residue(rng.gen_range(0..12))).collect()).collect();
        let e = Extension::from_table(mu, table.clone(), CocycleKind::ExplicitTable);
        for m in 0..=5i64 {
            let baer = baer_sum_n(&e, m as usize);
            let push = pushout_m(&e, m);
            // oracle: a bilinear cocycle pushed out along x -> x^m is the entrywise m-th power
            let powered = (0..r).all(|i| (0..r).all(|j| push.entry(i, j) == table[i][j].pow(m)));
            if !push.same_table(&baer) || !powered {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("50 extensions x m in 0..=5, {bad} mismatches"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (f, n) in [(Family::C, 3), (Family::B, 3), (Family::D, 4), (Family::A, 3)] {
        let t = BDTriple::standard_for(f, n, 2, CoeffGroup::QmodZ).unwrap();
        let lift = sq_extend(&t).unwrap();
        let d = &lift.triple.datum;
        let paths = check_star_paths(&lift).unwrap();
        let agree = paths.iter().all(|p| p.agrees);
        let inverses = (0..d.coroots.len()).all(|i| t.e.mul(&lift.values[d.negative_of(i)], &lift.values[i]).unwrap() == t.e.identity());
        ok &= agree && inverses && !paths.is_empty();
        parts.push(format!("{f}{n}: {} paths {}", paths.len(), if agree && inverses { "ok" } else { "BAD" }));
    }
    let t = start.elapsed();
    outcome(ok && t < Duration::from_secs(30), format!("{}, {t:.2?} (< 30s)", parts.join(", ")))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    for (f, n) in [(Family::C, 1), (Family::C, 2), (Family::D, 2), (Family::D, 3), (Family::B, 2), (Family::A, 1), (Family::A, 2)] {
        for a in [1, 2].into_iter().filter(|&a| admissible(f, a)) {
            for k in [1, 2] {
                for cover in 1..=4 {
                    cases += 1;
                    let t = BDTriple::standard_for(f, n, a, CoeffGroup::QmodZ).unwrap();
                    let sc = construct_square(&t, k, cover).unwrap();
                    let r = verify_square_theorem(&sc).unwrap();
                    // oracle: the plus copy carries Q scaled by 2 k n_Q - 1
                    let scale = 2 * k * sc.nq - 1;
                    let expected: Vec<i64> = t.datum.simple_coroots().iter().map(|c| scale * t.q.q(c)).collect();
                    let ok = r.minus_q && r.minus_iso && r.plus_q && r.plus_iso && r.cross_b_zero
                        && r.plus_q_values == expected
                        && sc.copies as i64 == 2 * k * sc.nq;
                    if !ok {
                        bad.push(format!("{f}{n}/a={a}/k={k}/n={cover}"));
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(bad.is_empty() && t < Duration::from_secs(120), format!("{cases} cases, failures {bad:?}, {t:.2?} (< 2 min)"))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn random_q_series(rng: &mut ChaCha8Rng) -> LaurentSeries<Rationals> {
    let v = rng.gen_range(-3..=3);
    let len = rng.gen_range(1..=5);
    let mut c: Vec<BigRational> = (0..len).map(|_| BigRational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=5)))).collect();
    if c[0] == rat(0) {
        c[0] = rat(1);
    }
    LaurentSeries::from_poly(Rationals, v, c, 12)
}

fn random_f7_series(rng: &mut ChaCha8Rng, f7: &GaloisField) -> LaurentSeries<GaloisField> {
    let v = rng.gen_range(-3..=3);
    let mut c: Vec<u16> = (0..rng.gen_range(1..=5)).map(|_| rng.gen_range(0..7)).collect();
    c[0] = rng.gen_range(1..7);
    LaurentSeries::from_poly(f7.clone(), v, c, 12)
}

fn random_padic(rng: &mut ChaCha8Rng, k: &TameLocalField) -> (i64, i64, LocalElem) {
    loop {
        let u = rng.gen_range(1..2000i64);
        if u % 5 != 0 {
            let v = rng.gen_range(-3..=3);
            return (u, v, k.parse_elem(&format!("{u}*p^{v}")).unwrap());
        }
    }
}

fn random_f9(rng: &mut ChaCha8Rng, k: &TameLocalField) -> LocalElem {
    let v = rng.gen_range(-3..=3);
    let mut c: Vec<String> = vec![rng.gen_range(1..9).to_string()];
    c.extend((0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..9).to_string()));
    k.parse_elem(&format!("[{}]*t^{v}", c.join(","))).unwrap()
}

fn pow_mod(b: i64, e: i64, m: i64) -> i64 {
    (0..e).fold(1, |acc, _| acc * b.rem_euclid(m) % m)
}

/// `(u 5^v, u' 5^v')_4` from the tame formula with integer arithmetic mod 5, as a power of 2.
fn hilbert_q5_oracle(u: i64, v: i64, u2: i64, v2: i64) -> u64 {
    let inv = |x: i64| pow_mod(x, 3, 5);
    let sign = if (v * v2) % 2 == 0 { 1 } else { 4 };
    let a = if v2 >= 0 { pow_mod(u, v2, 5) } else { inv(pow_mod(u, -v2, 5)) };
    let b = if v >= 0 { pow_mod(u2, v, 5) } else { inv(pow_mod(u2, -v, 5)) };
    let x = sign * a % 5 * inv(b) % 5;
    (0..4).find(|&i| pow_mod(2, i, 5) == x).unwrap() as u64
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    let samples = 200;
    let mut bad = Vec::new();
    let f7 = GaloisField::new(7).unwrap();
    let q5: TameLocalField = "Qp:5,n:4".parse().unwrap();
    let f9: TameLocalField = "Fq:9,n:8".parse().unwrap();
    let (mut tested_q, mut tested_f7) = (0, 0);
    while tested_q < samples {
        let f = random_q_series(rng);
        let g = LaurentSeries::monomial(Rationals, rat(1), 0, 12).sub(&f);
        if g.is_zero() {
            continue;
        }
        tested_q += 1;
        if residue_symbol(&f, &g).unwrap() != rat(1) {
            bad.push("steinberg Q((t))");
        }
        let (f2, h) = (random_q_series(rng), random_q_series(rng));
        if residue_symbol(&f.mul(&f2), &h).unwrap() != residue_symbol(&f, &h).unwrap() * residue_symbol(&f2, &h).unwrap() {
            bad.push("bimultiplicativity Q((t))");
        }
    }
    while tested_f7 < samples {
        let f = random_f7_series(rng, &f7);
        let g = LaurentSeries::monomial(f7.clone(), 1, 0, 12).sub(&f);
        if g.is_zero() {
            continue;
        }
        tested_f7 += 1;
        if residue_symbol(&f, &g).unwrap() != 1 {
            bad.push("steinberg F7((t))");
        }
        let (f2, h) = (random_f7_series(rng, &f7), random_f7_series(rng, &f7));
        let rhs = f7.mul(&residue_symbol(&f, &h).unwrap(), &residue_symbol(&f2, &h).unwrap());
        if residue_symbol(&f.mul(&f2), &h).unwrap() != rhs {
            bad.push("bimultiplicativity F7((t))");
        }
    }
    for _ in 0..samples {
        let (u, v, a) = random_padic(rng, &q5);
        let (u2, v2, b) = random_padic(rng, &q5);
        let (_, _, a2) = random_padic(rng, &q5);
        if tame_hilbert(&a, &b, &q5).idx != hilbert_q5_oracle(u, v, u2, v2) {
            bad.push("tame formula Q5");
        }
        if a.one_minus().is_some_and(|c| !tame_hilbert(&a, &c, &q5).is_one()) {
            bad.push("steinberg Q5");
        }
        if tame_hilbert(&a.mul(&a2).unwrap(), &b, &q5) != tame_hilbert(&a, &b, &q5).mul(&tame_hilbert(&a2, &b, &q5)) {
            bad.push("bimultiplicativity Q5");
        }
        let (x, y, z) = (random_f9(rng, &f9), random_f9(rng, &f9), random_f9(rng, &f9));
        if x.one_minus().is_some_and(|c| !tame_hilbert(&x, &c, &f9).is_one()) {
            bad.push("steinberg F9((t))");
        }
        if tame_hilbert(&x, &y.mul(&z).unwrap(), &f9) != tame_hilbert(&x, &y, &f9).mul(&tame_hilbert(&x, &z, &f9)) {
            bad.push("bimultiplicativity F9((t))");
        }
    }
    let mut pairs = 0;
    for _ in 0..3 {
        let r = rng.gen_range(1..=3usize);
        let diag: Vec<i64> = (0..r).map(|_| rng.gen_range(-3..=3)).collect();
        let mut off = vec![vec![0; r]; r];
        for i in 0..r {
            for j in i + 1..r {
                off[i][j] = rng.gen_range(-3..=3);
                off[j][i] = off[i][j];
            }
        }
        let q = QuadraticForm::new(diag, off);
        let (_, _, u) = random_padic(rng, &q5);
        let (_, _, w) = random_padic(rng, &q5);
        let sym = tame_hilbert(&u, &w, &q5);
        for i in 0..r {
            for j in 0..r {
                pairs += 1;
                let x = TorusCoverElement::basis_lift(&q5, r, i, u.clone());
                let y = TorusCoverElement::basis_lift(&q5, r, j, w.clone());
                if torus_commutator(&x, &y, &q, &q5).unwrap() != sym.pow(q.b(i, j)) {
                    bad.push("torus commutator");
                }
            }
        }
    }
    bad.dedup();
    outcome(
        bad.is_empty(),
        format!("{samples} samples per field and identity, {pairs} torus basis pairs, failures {bad:?}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let opts = EnumerationOptions::default();
    for q in [2u64, 3] {
        let r = enumerate_double_cosets(Family::C, 1, q, 1, &opts).unwrap();
        let lagrangians = (q + 1) * (q * q + 1);
        let sp2 = q * (q * q - 1);
        let main = r.main_orbits();
        let clause = r.grassmannian_size as u64 == lagrangians
            && r.sizes_partition()
            && main.len() == 1
            && main[0].stabilizer_order as u64 == sp2
            && main[0].stabilizer_is_diagonal
            && r.orbits.iter().filter(|o| o.class != OrbitClass::Main).all(|o| o.n_minus_detected);
        ok &= clause;
        parts.push(format!("k=1 q={q}: {} Lagrangians, {} orbits {}", r.grassmannian_size, r.orbits.len(), if clause { "ok" } else { "BAD" }));
    }
    let ctx = DoublingContext::new(Family::C, 1, 2, 2).unwrap();
    let space = &ctx.dbl.space;
    let points = maximal_isotropics(space, &ctx.dbl.w_delta_k(), &opts).unwrap();
    let nb = ctx.nb.elements(1 << 20).unwrap();
    let mut mismatches = 0;
    let mut omega1_disagreements = 0;
    let mut unexplained = 0;
    for l in &points {
        let c = ctx.classify_lagrangian(l);
        if (c.class == OmegaClass::Tilde) != c.geometric_tilde {
            mismatches += 1;
            // the documented failure: a tilde coset meeting Y_1
            unexplained += (c.class != OmegaClass::Tilde || c.geometric_tilde) as usize;
        }
        if ctx.omega1_by_enumeration(l, &nb) != (c.class == OmegaClass::Omega1) {
            omega1_disagreements += 1;
        }
    }
    let complete = points.len() as u128 == grassmannian_size(space);
    let psi_vanishes = nb.iter().all(|u| ctx.psi_argument(u) == Ok(0));
    let others_ok = ok && complete && omega1_disagreements == 0;
    ok = others_ok && mismatches == 0;
    parts.push(format!(
        "k=2 q=2: {} cosets, |N_bullet| = {}, omega vs L cap Y_1 = 0 disagrees on {mismatches}, psi enumeration vs Omega_1 disagrees on {omega1_disagreements}",
        points.len(),
        nb.len()
    ));
    let t = start.elapsed();
    ok &= t < Duration::from_secs(300);
    let explained = others_ok && psi_vanishes && unexplained == 0 && t < Duration::from_secs(300);
    Outcome { pass: ok, explained, detail: format!("{}; psi_bullet identically 0: {psi_vanishes}; {t:.2?} (< 5 min)", parts.join("; ")) }
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    let ctx = DoublingContext::new(Family::C, 1, 3, 2).unwrap();
    let g = build_group(Family::C, 1, 3).unwrap().elements(1000).unwrap();
    let delta_ok = (0..100).all(|_| {
        let (g1, g2) = (&g[rng.gen_range(0..g.len())], &g[rng.gen_range(0..g.len())]);
        ctx.modular_character_check(g1, g2) == Ok(1)
    });
    let mut diag = Vec::new();
    for q in [2u64, 3] {
        let els = build_group(Family::C, 1, q).unwrap().elements(1000).unwrap();
        for k in [1, 2] {
            diag.push(DoublingContext::new(Family::C, 1, q, k).unwrap().diagonal_intersection_check(&els));
        }
    }
    let diag_ok = diag.iter().all(|&x| x);
    outcome(delta_ok && diag_ok, format!("delta = 1 on 100 random pairs: {delta_ok}; iota(G x G) cap P diagonal for q in {{2,3}}, k in {{1,2}}: {diag:?}"))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let names = [
        "quadratic-form uniqueness",
        "parity lemmas",
        "Baer sum = pushout",
        "s_Q closure",
        "square-construction theorem",
        "symbol suite",
        "unfolding geometry",
        "modular character and diagonal lemmas",
    ];
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(&mut rng),
        criterion_4(),
        criterion_5(),
        criterion_6(&mut rng),
        criterion_7(),
        criterion_8(&mut rng),
    ];
    let mut unexpected = 0;
    for (i, (name, r)) in names.iter().zip(&results).enumerate() {
        let n = i as u32 + 1;
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n).map(|(_, why)| *why);
        let status = if r.pass { "PASS" } else { "FAIL" };
        match (r.pass, known) {
            (false, Some(why)) if r.explained => println!("criterion {n} [{name}]: {status} (known: {why}) {}", r.detail),
            (false, Some(_)) => {
                unexpected += 1;
                println!("criterion {n} [{name}]: {status} (beyond the known failure) {}", r.detail);
            }
            (true, Some(_)) => {
                unexpected += 1;
                println!("criterion {n} [{name}]: {status} (listed as a known failure) {}", r.detail);
            }
            (false, None) => {
                unexpected += 1;
                println!("criterion {n} [{name}]: {status} {}", r.detail);
            }
            (true, None) => println!("criterion {n} [{name}]: {status} {}", r.detail),
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria pass", results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
