use bdcover::bd::{construct_square, verify_square_theorem, BDTriple};
use bdcover::field::{Field, GaloisField, Rationals};
use bdcover::geometry::{enumerate_double_cosets, EnumerationOptions, OrbitClass};
use bdcover::lattice::CoeffGroup;
use bdcover::qform::{compute_nq, invariant_form_space, is_weyl_invariant, weyl_invariant_form, QuadraticForm};
use bdcover::roots::{build_root_datum, chevalley_signs_simple, Family};
use bdcover::symbols::{
    default_precision, residue_symbol, tame_hilbert, torus_commutator, LaurentSeries, LocalElem, TameLocalField,
    TorusCoverElement,
};
use clap::Args;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::report::{Check, ReportDocument};
use crate::Global;

/// Bad arguments: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<ReportDocument, UsageError>;

fn params(g: &Global, extra: Value) -> Map<String, Value> {
    let mut m = match extra {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    m.insert("jobs".into(), json!(g.jobs));
    m.insert("seed".into(), json!(g.seed));
    m.insert("window".into(), json!(g.window));
    m
}

fn family(s: &str) -> Result<Family, UsageError> {
    s.parse::<Family>().map_err(UsageError)
}

pub fn rootdatum(g: &Global, fam: &str, rank: usize) -> Outcome {
    let d = build_root_datum(family(fam)?, rank)?;
    let weyl = d.weyl_group().len();
    let pairing_ok = d.roots.iter().zip(&d.coroots).all(|(a, c)| bdcover::roots::dot(a, c) == 2);
    let closed = d.roots.iter().enumerate().all(|(i, _)| d.simple.iter().all(|&s| d.root_index(&d.roots[d.reflect_root(s, i)]).is_some()));
    let signs = chevalley_signs_simple(&d).map_err(UsageError::from)?;
    let results = vec![
        Check::info("datum", serde_json::to_value(&d).expect("datum serializes")),
        Check::new("pairing_is_two", pairing_ok, json!(d.num_roots())),
        Check::new("reflections_permute_roots", closed, json!(null)),
        Check::info("weyl_order", json!(weyl)),
        Check::info("chevalley_signs_simple", json!(signs)),
    ];
    Ok(ReportDocument::new("rootdatum", params(g, json!({"family": fam, "rank": rank})), results))
}

fn form_json(q: &QuadraticForm) -> Value {
    json!({"diag": q.diag, "offdiag": q.offdiag})
}

pub fn qform(g: &Global, fam: &str, rank: usize, a: i64, n: Option<i64>) -> Outcome {
    let d = build_root_datum(family(fam)?, rank)?;
    let p = params(g, json!({"family": fam, "rank": rank, "a": a, "n": n}));
    let space = invariant_form_space(&d);
    let mut results = vec![Check::new("solution_space_dimension", space.len() == 1, json!(space.len()))];
    let q = match weyl_invariant_form(&d, a) {
        Ok(q) => q,
        Err(e) => {
            results.push(Check::new("solve", false, json!(e.to_string())));
            return Ok(ReportDocument::new("qform", p, results));
        }
    };
    results.push(Check::info("form", form_json(&q)));
    let orbit_ok = d.weyl_group().iter().all(|w| {
        (0..d.rank).all(|i| q.q(&w[i]) == q.diag[i] && (0..d.rank).all(|j| q.bilinear(&w[i], &w[j]) == q.b(i, j)))
    });
    results.push(Check::new("weyl_invariant", orbit_ok && is_weyl_invariant(&d, &q), json!(null)));
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let polar = (0..100).all(|_| {
        let y: Vec<i64> = (0..d.rank).map(|_| rng.gen_range(-9..=9)).collect();
        q.bilinear(&y, &y) == 2 * q.q(&y)
    });
    results.push(Check::new("b_of_y_y_is_2q", polar, json!(100)));
    if let Some(n) = n {
        if n < 1 {
            return Err(UsageError("--n must be positive".into()));
        }
        results.push(Check::info("n_q", json!(compute_nq(n, &q, &d))));
    }
    Ok(ReportDocument::new("qform", p, results))
}

pub fn square(g: &Global, fam: &str, rank: usize, a: i64, k: i64, n: i64) -> Outcome {
    if k < 1 || n < 1 {
        return Err(UsageError("--k and --n must be positive".into()));
    }
    let p = params(g, json!({"family": fam, "rank": rank, "a": a, "k": k, "n": n}));
    let t = match BDTriple::standard_for(family(fam)?, rank, a, CoeffGroup::QmodZ) {
        Ok(t) => t,
        Err(e) => return Ok(ReportDocument::new("square", p, vec![Check::new("input", false, json!(e.to_string()))])),
    };
    let checked = construct_square(&t, k, n).and_then(|sc| verify_square_theorem(&sc));
    let results = match checked {
        Ok(r) => vec![
            Check::info("doubled_group", json!({"output": r.output, "copies": r.copies, "n_q": r.nq})),
            Check::new("minus_copy_form", r.minus_q, json!(null)),
            Check::new("minus_copy_isomorphic_to_input", r.minus_iso, json!({"on_the_nose": r.minus_exact})),
            Check::new("plus_copy_form", r.plus_q, json!({"q_on_simple_coroots": r.plus_q_values})),
            Check::new("plus_copy_isomorphic_to_pushout", r.plus_iso, json!({"on_the_nose": r.plus_exact, "power": r.copies - 1})),
            Check::new("cross_copy_bilinear_form_vanishes", r.cross_b_zero, json!(null)),
        ],
        Err(e) => vec![Check::new("construct", false, json!(e.to_string()))],
    };
    Ok(ReportDocument::new("square", p, results))
}

#[derive(Args, Debug)]
pub struct SymbolsArgs {
    /// `Q` or `Fq:<q>` for residues; `Qp:<p>` or `Fq:<q>` for Hilbert symbols and torus covers.
    #[arg(long)]
    pub field: String,
    /// Order of the roots of unity (must divide q - 1).
    #[arg(long)]
    pub n: Option<u64>,
    /// Residue symbol of two Laurent series `[c0,c1,...]*t^v`.
    #[arg(long, num_args = 2, value_names = ["F", "G"], allow_hyphen_values = true)]
    pub residue: Option<Vec<String>>,
    /// Tame Hilbert symbol `(a, b)_n`.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub hilbert: Option<Vec<String>>,
    /// Commutators of `e_i(u)` and `e_j(v)` in the torus cover, for all basis pairs.
    #[arg(long = "torus-commutator", num_args = 2, value_names = ["U", "V"], allow_hyphen_values = true)]
    pub torus_commutator: Option<Vec<String>>,
    /// `Q(e_i)` for the torus cover.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub diag: Vec<i64>,
    /// `B(e_i, e_j)` for `i < j`, row by row.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub offdiag: Vec<i64>,
}

/// Parses `[c0,c1,...]` optionally followed by `*t^v`.
fn parse_series<F: Field>(field: F, s: &str, coeff: impl Fn(&str) -> Option<F::Elem>) -> Result<LaurentSeries<F>, UsageError> {
    let bad = || UsageError(format!("cannot parse series {s:?}"));
    let (list, v) = match s.split_once("t^") {
        Some((head, v)) => (head.trim().trim_end_matches('*').trim(), v.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim(), 0),
    };
    let inner = list.strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(bad)?;
    let coeffs = inner.split(',').map(|c| coeff(c.trim()).ok_or_else(bad)).collect::<Result<Vec<_>, _>>()?;
    Ok(LaurentSeries::from_poly(field, v, coeffs, default_precision()))
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let (a, b) = (a.trim().parse::<BigInt>().ok()?, b.trim().parse::<BigInt>().ok()?);
    (b != BigInt::from(0)).then(|| BigRational::new(a, b))
}

fn residue_check(field: &str, f: &str, g: &str) -> Result<Check, UsageError> {
    let value = if field == "Q" {
        let fs = parse_series(Rationals, f, parse_rational)?;
        let gs = parse_series(Rationals, g, parse_rational)?;
        residue_symbol(&fs, &gs).map(|x| x.to_string())
    } else {
        let q: u64 = field
            .strip_prefix("Fq:")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| UsageError(format!("residues need --field Q or Fq:<q>, got {field:?}")))?;
        let k = GaloisField::new(q)?;
        let elem = |c: &str| c.parse::<u64>().ok().filter(|&c| c < q).map(|c| c as u16);
        let fs = parse_series(k.clone(), f, elem)?;
        let gs = parse_series(k, g, elem)?;
        residue_symbol(&fs, &gs).map(|x| x.to_string())
    };
    Ok(match value {
        Ok(v) => Check::info("residue", json!({"f": f, "g": g, "value": v})),
        Err(e) => Check::new("residue", false, json!(e.to_string())),
    })
}

fn local_field(args: &SymbolsArgs) -> Result<TameLocalField, UsageError> {
    let spec = match args.n {
        Some(n) => format!("{},n:{n}", args.field),
        None => args.field.clone(),
    };
    Ok(spec.parse::<TameLocalField>()?)
}

fn torus_form(args: &SymbolsArgs) -> Result<QuadraticForm, UsageError> {
    let r = args.diag.len();
    if r == 0 || args.offdiag.len() != r * (r - 1) / 2 {
        return Err(UsageError(format!("--diag gives the rank r; --offdiag needs r(r-1)/2 = {} entries", r * r.saturating_sub(1) / 2)));
    }
    let mut off = vec![vec![0; r]; r];
    let mut it = args.offdiag.iter();
    for i in 0..r {
        for j in i + 1..r {
            let b = *it.next().unwrap();
            off[i][j] = b;
            off[j][i] = b;
        }
    }
    Ok(QuadraticForm::new(args.diag.clone(), off))
}

pub fn symbols(g: &Global, args: &SymbolsArgs) -> Outcome {
    let p = params(
        g,
        json!({"field": args.field, "n": args.n, "residue": args.residue, "hilbert": args.hilbert,
               "torus_commutator": args.torus_commutator, "diag": args.diag, "offdiag": args.offdiag,
               "precision": default_precision()}),
    );
    let mut results = Vec::new();
    if let Some(v) = &args.residue {
        results.push(residue_check(&args.field, &v[0], &v[1])?);
    }
    if args.hilbert.is_some() || args.torus_commutator.is_some() {
        let k = local_field(args)?;
        let parse = |s: &str| -> Result<LocalElem, UsageError> { Ok(k.parse_elem(s)?) };
        if let Some(v) = &args.hilbert {
            let (a, b) = (parse(&v[0])?, parse(&v[1])?);
            let ab = tame_hilbert(&a, &b, &k);
            let ba = tame_hilbert(&b, &a, &k);
            results.push(Check::info("hilbert", json!({"a": v[0], "b": v[1], "n": k.n, "index": ab.idx})));
            results.push(Check::new("antisymmetry", ab.mul(&ba).is_one(), json!({"reverse_index": ba.idx})));
        }
        if let Some(v) = &args.torus_commutator {
            let q = torus_form(args)?;
            let (u, w) = (parse(&v[0])?, parse(&v[1])?);
            let sym = tame_hilbert(&u, &w, &k);
            let r = q.rank();
            let mut rows = Vec::new();
            let mut ok = true;
            for i in 0..r {
                for j in 0..r {
                    let x = TorusCoverElement::basis_lift(&k, r, i, u.clone());
                    let y = TorusCoverElement::basis_lift(&k, r, j, w.clone());
                    let c = torus_commutator(&x, &y, &q, &k)?;
                    let expected = sym.pow(q.b(i, j));
                    ok &= c == expected;
                    rows.push(json!({"i": i, "j": j, "commutator": c.idx, "expected": expected.idx}));
                }
            }
            results.push(Check::new("torus_commutator", ok, Value::Array(rows)));
        }
    }
    if results.is_empty() {
        return Err(UsageError("give at least one of --residue, --hilbert, --torus-commutator".into()));
    }
    Ok(ReportDocument::new("symbols", p, results))
}

pub fn orbits(g: &Global, fam: &str, m: usize, k: usize, q: u64) -> Outcome {
    let p = params(g, json!({"family": fam, "m": m, "k": k, "q": q, "max_states": g.max_states.to_string()}));
    let opts = EnumerationOptions { max_states: g.max_states, jobs: g.jobs, ..Default::default() };
    let r = match enumerate_double_cosets(family(fam)?, m, q, k, &opts) {
        Ok(r) => r,
        Err(e) => return Ok(ReportDocument::new("orbits", p, vec![Check::new("enumerate", false, json!(e.to_string()))])),
    };
    let main = r.main_orbits();
    let table: Vec<Value> = r
        .orbits
        .iter()
        .map(|o| {
            json!({"size": o.size, "class": o.class, "stabilizer_order": o.stabilizer_order,
                   "n_minus_order": o.n_minus_order, "representative": o.representative})
        })
        .collect();
    let main_stab = main.len() == 1 && main[0].stabilizer_is_diagonal;
    let negligible: Vec<_> = r.orbits.iter().filter(|o| o.class == OrbitClass::Negligible).collect();
    let negligible_check = if negligible.is_empty() {
        Check::skip("negligible_orbits_have_n_minus", "no negligible orbits")
    } else {
        Check::new("negligible_orbits_have_n_minus", negligible.iter().all(|o| o.n_minus_detected), json!(negligible.len()))
    };
    let results = vec![
        Check::new(
            "grassmannian_size",
            r.grassmannian_size as u128 == r.expected_grassmannian_size,
            json!({"enumerated": r.grassmannian_size, "expected": r.expected_grassmannian_size.to_string()}),
        ),
        Check::new("sizes_partition", r.sizes_partition(), json!(r.orbits.len())),
        Check::new("one_main_orbit", main.len() == 1, json!(main.len())),
        Check::new(
            "main_stabilizer_is_diagonal",
            main_stab,
            json!({"stabilizer_order": main.first().map(|o| o.stabilizer_order), "group_order": r.group_order}),
        ),
        negligible_check,
        Check::info("orbits", Value::Array(table)),
        Check::info("n_bullet_order", json!(r.n_bullet_order.to_string())),
        Check::info("induced_flag_repeats_removed", json!(r.normalization_fired)),
    ];
    Ok(ReportDocument::new("orbits", p, results))
}
