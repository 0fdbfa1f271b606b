//! Central extensions of lattices by coefficient groups.
//!
//! Every extension here is presented by a bilinear cocycle
//! `sigma(y, y') = prod c_ij^(y_i y'_j)`, which is normalized and satisfies the
//! cocycle identity on all of `Y`. Over a free lattice every central extension
//! by an abelian group is isomorphic to one of this shape.

use std::fmt::Write as _;

use serde::Serialize;

use crate::lattice::{solve_character, Character, CoeffElem, CoeffGroup, Lattice, LatticeHom, Vector};
use crate::qform::QuadraticForm;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ExtError {
    #[error("elements belong to different extensions")]
    ExtensionMismatch,
    #[error("coefficient groups differ")]
    CoeffMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("pr_* parents differ; mul is only defined on pr_*(E + E)")]
    ParentsDiffer,
    #[error("{0} has no element -1 but the form has odd cross terms")]
    NoMinusOne(CoeffGroup),
}

/// How an extension was produced. The table alone determines the group law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CocycleKind {
    /// `sigma = (-1)^(sum_{i>j} B_ij y_i y'_j)`.
    StandardFromQ(QuadraticForm),
    ExplicitTable,
    TwistedProduct,
    /// Obtained from other extensions by a functor, with a short description.
    Derived(String),
}

/// A central extension `1 -> A -> E -> Z^rank -> 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub lattice: Lattice,
    pub coeff: CoeffGroup,
    /// `table[i][j] = c_ij`.
    table: Vec<Vec<CoeffElem>>,
    pub kind: CocycleKind,
}

/// An element `(c, y)` of an extension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExtElement {
    pub coeff: CoeffElem,
    pub point: Vector,
}

impl ExtElement {
    pub fn new(coeff: CoeffElem, point: Vector) -> Self {
        ExtElement { coeff, point }
    }
}

// points of {-w..w}^rank
pub fn window_points(rank: usize, w: i64) -> Vec<Vector> {
    let mut out = vec![Vec::with_capacity(rank)];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-w..=w).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

// a deterministic spread of test points when the full window is too large
fn probe_points(rank: usize, w: i64) -> Vec<Vector> {
    if (2 * w + 1).pow(rank.min(12) as u32) <= 125 && rank <= 3 {
        return window_points(rank, w);
    }
    let mut pts = vec![vec![0; rank]];
    for i in 0..rank {
        for s in [1, -1] {
            let mut e = vec![0; rank];
            e[i] = s;
            pts.push(e);
        }
    }
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15 ^ rank as u64;
    for _ in 0..24 {
        let p = (0..rank)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) % (2 * w as u64 + 1)) as i64 - w
            })
            .collect();
        pts.push(p);
    }
    pts
}

impl Extension {
    /// An extension from an explicit bilinear table.
    pub fn from_table(coeff: CoeffGroup, table: Vec<Vec<CoeffElem>>, kind: CocycleKind) -> Self {
        let n = table.len();
        for row in &table {
            assert_eq!(row.len(), n, "cocycle table must be square");
            assert!(row.iter().all(|c| c.group() == coeff));
        }
        let e = Extension { lattice: Lattice::new(n), coeff, table, kind };
        e.assert_cocycle(2);
        e
    }

    /// The standard extension attached to `Q`, with commutator `(-1)^B_Q`.
    pub fn standard_from_q(q: &QuadraticForm, coeff: CoeffGroup) -> Result<Self, ExtError> {
        let n = q.rank();
        let mut table = vec![vec![coeff.one(); n]; n];
        for i in 0..n {
            for j in 0..i {
                let b = q.offdiag[i][j];
                if b % 2 != 0 {
                    table[i][j] = coeff.minus_one().ok_or(ExtError::NoMinusOne(coeff))?;
                }
            }
        }
        let e = Extension::from_table(coeff, table, CocycleKind::StandardFromQ(q.clone()));
        debug_assert!(e.commutator_matches(q, 1));
        Ok(e)
    }

    /// The split extension.
    pub fn trivial(rank: usize, coeff: CoeffGroup) -> Self {
        Extension::from_table(coeff, vec![vec![coeff.one(); rank]; rank], CocycleKind::ExplicitTable)
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank
    }

    pub fn table(&self) -> &[Vec<CoeffElem>] {
        &self.table
    }

    pub fn entry(&self, i: usize, j: usize) -> CoeffElem {
        self.table[i][j]
    }

    pub fn sigma(&self, y1: &[i64], y2: &[i64]) -> CoeffElem {
        let mut acc = self.coeff.one();
        let right: Vec<(usize, i64)> = y2.iter().copied().enumerate().filter(|&(_, b)| b != 0).collect();
        for (i, &a) in y1.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(j, b) in &right {
                acc = acc.mul(&self.table[i][j].pow(a * b));
            }
        }
        acc
    }

    /// Checks normalization and the cocycle identity on a window.
    pub fn assert_cocycle(&self, w: i64) {
        let pts = probe_points(self.rank(), w);
        let zero = vec![0; self.rank()];
        for a in &pts {
            assert!(self.sigma(&zero, a).is_one() && self.sigma(a, &zero).is_one(), "cocycle not normalized");
        }
        let small: Vec<&Vector> = pts.iter().take(12).collect();
        for a in &small {
            for b in &small {
                for c in &small {
                    let ab = crate::roots::add(a, b);
                    let bc = crate::roots::add(b, c);
                    let lhs = self.sigma(a, b).mul(&self.sigma(&ab, c));
                    let rhs = self.sigma(b, c).mul(&self.sigma(a, &bc));
                    assert_eq!(lhs, rhs, "cocycle identity fails");
                }
            }
        }
    }

    fn check_elem(&self, x: &ExtElement) -> Result<(), ExtError> {
        if x.point.len() != self.rank() {
            return Err(ExtError::DimensionMismatch { expected: self.rank(), got: x.point.len() });
        }
        if x.coeff.group() != self.coeff {
            return Err(ExtError::ExtensionMismatch);
        }
        Ok(())
    }

    pub fn identity(&self) -> ExtElement {
        ExtElement::new(self.coeff.one(), self.lattice.zero())
    }

    /// The section `y -> (1, y)`.
    pub fn lift(&self, y: &[i64]) -> ExtElement {
        ExtElement::new(self.coeff.one(), y.to_vec())
    }

    pub fn mul(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement, ExtError> {
        self.check_elem(x)?;
        self.check_elem(y)?;
        let c = x.coeff.mul(&y.coeff).mul(&self.sigma(&x.point, &y.point));
        Ok(ExtElement::new(c, crate::roots::add(&x.point, &y.point)))
    }

    pub fn inv(&self, x: &ExtElement) -> Result<ExtElement, ExtError> {
        self.check_elem(x)?;
        let ny = crate::roots::neg(&x.point);
        // (c, y)(c', -y) = (c c' sigma(y, -y), 0)
        let c = x.coeff.mul(&self.sigma(&x.point, &ny)).inv();
        Ok(ExtElement::new(c, ny))
    }

    /// `x^k` for any integer `k`.
    pub fn pow(&self, x: &ExtElement, k: i64) -> Result<ExtElement, ExtError> {
        let base = if k < 0 { self.inv(x)? } else { x.clone() };
        let mut acc = self.identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base)?;
        }
        Ok(acc)
    }

    /// `x y x^-1 y^-1`, a central element.
    pub fn commutator(&self, x: &ExtElement, y: &ExtElement) -> Result<CoeffElem, ExtError> {
        self.check_elem(x)?;
        self.check_elem(y)?;
        Ok(self.sigma(&x.point, &y.point).div(&self.sigma(&y.point, &x.point)))
    }

    /// Whether the commutator is `(-1)^B_Q`. The commutator of a bilinear
    /// cocycle is bilinear, so basis pairs decide it; a window is checked too.
    pub fn commutator_matches(&self, q: &QuadraticForm, w: i64) -> bool {
        let n = self.rank();
        if q.rank() != n {
            return false;
        }
        let basis_ok = (0..n).all(|i| (0..n).all(|j| self.table[i][j].div(&self.table[j][i]) == self.coeff.sign(q.b(i, j))));
        if !basis_ok {
            return false;
        }
        if n > 8 {
            return true;
        }
        let pts = probe_points(self.rank(), w);
        pts.iter().all(|a| {
            pts.iter().all(|b| {
                let c = self.sigma(a, b).div(&self.sigma(b, a));
                c == self.coeff.sign(q.bilinear(a, b))
            })
        })
    }

    pub fn same_table(&self, other: &Extension) -> bool {
        self.coeff == other.coeff && self.table == other.table
    }

    /// TSV rows `y1, y2, value` over `{-w..w}^rank`.
    pub fn to_tsv(&self, w: i64) -> String {
        let pts = window_points(self.rank(), w);
        let fmt = |v: &Vector| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::from("y1\ty2\tvalue\n");
        for a in &pts {
            for b in &pts {
                let _ = writeln!(s, "{}\t{}\t{}", fmt(a), fmt(b), self.sigma(a, b));
            }
        }
        s
    }

    /// Table of `sigma` over `{-w..w}^rank`, row major.
    pub fn cocycle_window(&self, w: i64) -> Vec<CoeffElem> {
        let pts = window_points(self.rank(), w);
        pts.iter().flat_map(|a| pts.iter().map(move |b| self.sigma(a, b))).collect()
    }
}

/// Pushout along `a -> a^m`.
pub fn pushout_m(e: &Extension, m: i64) -> Extension {
    let table = e.table.iter().map(|r| r.iter().map(|c| c.pow(m)).collect()).collect();
    Extension::from_table(e.coeff, table, CocycleKind::Derived(format!("pushout by [{m}]")))
}

/// Extension of `Y_1 + ... + Y_k` obtained from the product by multiplying coefficients.
pub fn pr_star_many(parts: &[&Extension]) -> Result<Extension, ExtError> {
    let coeff = parts.first().map(|e| e.coeff).ok_or(ExtError::ExtensionMismatch)?;
    if parts.iter().any(|e| e.coeff != coeff) {
        return Err(ExtError::CoeffMismatch);
    }
    let n: usize = parts.iter().map(|e| e.rank()).sum();
    let mut table = vec![vec![coeff.one(); n]; n];
    let mut base = 0;
    for e in parts {
        for i in 0..e.rank() {
            for j in 0..e.rank() {
                table[base + i][base + j] = e.table[i][j];
            }
        }
        base += e.rank();
    }
    Ok(Extension::from_table(coeff, table, CocycleKind::Derived("pr_*".into())))
}

pub fn pr_star(e1: &Extension, e2: &Extension) -> Result<Extension, ExtError> {
    pr_star_many(&[e1, e2])
}

/// Pullback along `h: Y' -> Y`: `c'_kl = prod c_ij^(h_ik h_jl)`.
pub fn pullback_ext(e: &Extension, h: &LatticeHom) -> Result<Extension, ExtError> {
    if h.target.rank != e.rank() {
        return Err(ExtError::DimensionMismatch { expected: e.rank(), got: h.target.rank });
    }
    let n = h.source.rank;
    let imgs: Vec<Vector> = (0..n).map(|i| h.image_of_basis(i)).collect();
    let table = (0..n).map(|k| (0..n).map(|l| e.sigma(&imgs[k], &imgs[l])).collect()).collect();
    Ok(Extension::from_table(e.coeff, table, CocycleKind::Derived("pullback".into())))
}

/// Baer sum of `n` copies, computed as the diagonal pullback of `pr_*` of the copies.
pub fn baer_sum_n(e: &Extension, n: usize) -> Extension {
    if n == 0 {
        return Extension::trivial(e.rank(), e.coeff);
    }
    let copies: Vec<&Extension> = vec![e; n];
    let big = pr_star_many(&copies).expect("copies share coefficients");
    let r = e.rank();
    let diag: Vec<Vector> = (0..r)
        .map(|i| {
            let mut v = vec![0; r * n];
            for c in 0..n {
                v[c * r + i] = 1;
            }
            v
        })
        .collect();
    let h = LatticeHom::from_images(big.lattice, &diag);
    let mut out = pullback_ext(&big, &h).expect("diagonal has the right shape");
    out.kind = CocycleKind::Derived(format!("Baer sum of {n} copies"));
    out
}

/// An element of `pr_*(E_1 + E_2)`, in canonical form.
///
/// The triple `(x, (c_1, y_1), (c_2, y_2))` is stored as the coefficient
/// `x c_1 c_2` together with `(y_1, y_2)`; two triples define the same element
/// exactly when these agree. When both parents equal `E`, the mul value is
/// this coefficient times `sigma_E(y_1, y_2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrStarElement {
    pub coeff: CoeffElem,
    pub points: (Vector, Vector),
}

/// `pr_*(E_1 + E_2)` together with its parents.
#[derive(Clone, Debug)]
pub struct PrStar {
    pub left: Extension,
    pub right: Extension,
    pub ext: Extension,
}

impl PrStar {
    pub fn new(left: &Extension, right: &Extension) -> Result<Self, ExtError> {
        Ok(PrStar { left: left.clone(), right: right.clone(), ext: pr_star(left, right)? })
    }

    pub fn element(&self, x: CoeffElem, e1: &ExtElement, e2: &ExtElement) -> PrStarElement {
        PrStarElement { coeff: x.mul(&e1.coeff).mul(&e2.coeff), points: (e1.point.clone(), e2.point.clone()) }
    }

    fn to_ext(&self, p: &PrStarElement) -> ExtElement {
        let mut y = p.points.0.clone();
        y.extend_from_slice(&p.points.1);
        ExtElement::new(p.coeff, y)
    }

    fn from_ext(&self, e: &ExtElement) -> PrStarElement {
        let r = self.left.rank();
        PrStarElement { coeff: e.coeff, points: (e.point[..r].to_vec(), e.point[r..].to_vec()) }
    }

    pub fn mul(&self, a: &PrStarElement, b: &PrStarElement) -> PrStarElement {
        let p = self.ext.mul(&self.to_ext(a), &self.to_ext(b)).expect("same extension");
        self.from_ext(&p)
    }

    pub fn identity(&self) -> PrStarElement {
        self.from_ext(&self.ext.identity())
    }

    /// `(x, e_1, e_2) -> x e_1 e_2` in `E`.
    pub fn mul_map(&self, p: &PrStarElement) -> Result<ExtElement, ExtError> {
        if !self.left.same_table(&self.right) {
            return Err(ExtError::ParentsDiffer);
        }
        let e = &self.left;
        let c = p.coeff.mul(&e.sigma(&p.points.0, &p.points.1));
        Ok(ExtElement::new(c, crate::roots::add(&p.points.0, &p.points.1)))
    }
}

/// The auxiliary extension of `Y_1 + Y_2 + Z e_x` used for odd orthogonal groups.
///
/// The group law is that of `pr_*(E_1 + E_2)` on the first two summands, with
/// the extra twist `(-1)^B(y, a' e_x)` when the right factor has `a'` in the
/// last coordinate. The last basis vector is `e_x`.
pub fn twisted_product_ext(e1: &Extension, e2: &Extension, q_square: &QuadraticForm) -> Result<Extension, ExtError> {
    let base = pr_star(e1, e2)?;
    let n = base.rank() + 1;
    if q_square.rank() != n {
        return Err(ExtError::DimensionMismatch { expected: n, got: q_square.rank() });
    }
    let coeff = base.coeff;
    let mut table = vec![vec![coeff.one(); n]; n];
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            table[i][j] = base.table[i][j];
        }
        table[i][n - 1] = coeff.sign(q_square.offdiag[i][n - 1]);
    }
    let e = Extension::from_table(coeff, table, CocycleKind::TwistedProduct);
    assert!(e.commutator_matches(q_square, 1), "twisted product commutator differs from (-1)^B");
    Ok(e)
}

/// An isomorphism `(c, y) -> (c beta(y) chi(y), y)` between extensions over the same lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    /// The symmetric table `d = sigma' / sigma`; `beta` is its canonical quadratic refinement.
    pub d: Vec<Vec<CoeffElem>>,
    pub chi: Character,
}

impl IsoWitness {
    /// `beta(y) = prod_i d_ii^(y_i (y_i - 1)/2) prod_{i<j} d_ij^(y_i y_j)`, so `d(y, y') = beta(y + y') / beta(y) beta(y')`.
    pub fn beta(&self, y: &[i64]) -> CoeffElem {
        let mut acc = self.chi.group.one();
        for i in 0..y.len() {
            acc = acc.mul(&self.d[i][i].pow(y[i] * (y[i] - 1) / 2));
            for j in i + 1..y.len() {
                acc = acc.mul(&self.d[i][j].pow(y[i] * y[j]));
            }
        }
        acc
    }

    pub fn apply(&self, x: &ExtElement) -> ExtElement {
        ExtElement::new(x.coeff.mul(&self.beta(&x.point)).mul(&self.chi.apply(&x.point)), x.point.clone())
    }

    /// Checks the witness is a homomorphism on a window and carries `f` to `f'`.
    pub fn verify(&self, e: &Extension, e2: &Extension, f: &[ExtElement], f2: &[ExtElement], w: i64) -> bool {
        let pts = probe_points(e.rank(), w);
        let hom = pts.iter().all(|a| {
            pts.iter().all(|b| {
                let lhs = self.apply(&e.mul(&e.lift(a), &e.lift(b)).unwrap());
                let rhs = e2.mul(&self.apply(&e.lift(a)), &self.apply(&e.lift(b))).unwrap();
                lhs == rhs
            })
        });
        hom && f.iter().zip(f2).all(|(x, y)| self.apply(x) == *y)
    }
}

/// Looks for an isomorphism `E -> E'` carrying the values `f` to `f'`.
///
/// `f[i]` and `f2[i]` are the images of the i-th basis vector of `Y^sc`,
/// which `sc_incl` embeds in `Y`.
pub fn iso_extensions(
    e: &Extension,
    e2: &Extension,
    f: &[ExtElement],
    f2: &[ExtElement],
    sc_incl: &LatticeHom,
) -> Option<IsoWitness> {
    if e.coeff != e2.coeff || e.rank() != e2.rank() || f.len() != f2.len() || f.len() != sc_incl.source.rank {
        return None;
    }
    let n = e.rank();
    let d: Vec<Vec<CoeffElem>> =
        (0..n).map(|i| (0..n).map(|j| e2.table[i][j].div(&e.table[i][j])).collect()).collect();
    if (0..n).any(|i| (0..n).any(|j| d[i][j] != d[j][i])) {
        return None;
    }
    let partial = IsoWitness { d, chi: Character::trivial(e.lattice, e.coeff) };
    let discrepancy: Vec<CoeffElem> = f
        .iter()
        .zip(f2)
        .enumerate()
        .map(|(i, (x, y))| {
            debug_assert_eq!(x.point, sc_incl.image_of_basis(i));
            y.coeff.div(&partial.apply(x).coeff)
        })
        .collect();
    let chi = solve_character(sc_incl, &Character::new(e.coeff, discrepancy)).ok()??;
    let w = IsoWitness { d: partial.d, chi };
    debug_assert!(w.verify(e, e2, f, f2, 1));
    Some(w)
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn table_ext() -> impl Strategy<Value = Extension> {
        (1usize..=3)
            .prop_flat_map(|r| prop::collection::vec(0i64..12, r * r).prop_map(move |v| (r, v)))
            .prop_map(|(r, v)| {
                let g = CoeffGroup::MuN(12);
                let table = (0..r).map(|i| (0..r).map(|j| g.residue(v[i * r + j])).collect()).collect();
                Extension::from_table(g, table, CocycleKind::ExplicitTable)
            })
    }

    fn with_points(k: usize) -> impl Strategy<Value = (Extension, Vec<Vector>)> {
        table_ext().prop_flat_map(move |e| {
            let r = e.rank();
            (Just(e), prop::collection::vec(prop::collection::vec(-6i64..=6, r), k))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn cocycle_identity((e, p) in with_points(3)) {
            let (x, y, z) = (&p[0], &p[1], &p[2]);
            let xy: Vector = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let yz: Vector = y.iter().zip(z).map(|(a, b)| a + b).collect();
            prop_assert_eq!(e.sigma(x, y).mul(&e.sigma(&xy, z)), e.sigma(x, &yz).mul(&e.sigma(y, z)));
            prop_assert!(e.sigma(&e.lattice.zero(), x).is_one());
        }

        #[test]
        fn multiplication_is_associative((e, p) in with_points(3)) {
            let l: Vec<ExtElement> = p.iter().map(|y| e.lift(y)).collect();
            let left = e.mul(&e.mul(&l[0], &l[1]).unwrap(), &l[2]).unwrap();
            let right = e.mul(&l[0], &e.mul(&l[1], &l[2]).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let inv = e.inv(&l[0]).unwrap();
            prop_assert_eq!(e.mul(&l[0], &inv).unwrap(), e.identity());
        }

        #[test]
        fn pushout_matches_baer_sum(e in table_ext(), m in 0i64..=6) {
            prop_assert!(pushout_m(&e, m).same_table(&baer_sum_n(&e, m as usize)));
        }

        #[test]
        fn standard_commutator_is_sign_of_b(
            diag in prop::collection::vec(-3i64..=3, 3),
            off in prop::collection::vec(-3i64..=3, 3),
            y1 in prop::collection::vec(-5i64..=5, 3),
            y2 in prop::collection::vec(-5i64..=5, 3),
        ) {
            let b = vec![vec![0, off[0], off[1]], vec![off[0], 0, off[2]], vec![off[1], off[2], 0]];
            let q = QuadraticForm::new(diag, b);
            let e = Extension::standard_from_q(&q, CoeffGroup::QmodZ).unwrap();
            let c = e.commutator(&e.lift(&y1), &e.lift(&y2)).unwrap();
            prop_assert_eq!(c, CoeffGroup::QmodZ.sign(q.bilinear(&y1, &y2)));
        }
    }
}
