//! Integer lattices, Smith normal form, and coefficient groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A point of `Z^rank` in the standard basis.
pub type Vector = Vec<i64>;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice map is not injective")]
    NonInjective,
    #[error("sublattice has infinite index")]
    IndexInfinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient groups differ: {0} vs {1}")]
    CoeffMismatch(CoeffGroup, CoeffGroup),
}

/// Dense matrix of arbitrary-precision integers, row major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows of machine integers.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn get_i64(&self, i: usize, j: usize) -> i64 {
        self.get(i, j).to_i64().expect("matrix entry exceeds i64")
    }

    pub fn to_rows_i64(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get_i64(i, j)).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vector {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (j, &x) in v.iter().enumerate() {
                    s += self.get(i, j) * x;
                }
                s.to_i64().expect("lattice image exceeds i64")
            })
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant of a square matrix by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    // row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * c;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * c;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = -&self.data[idx];
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Nonzero invariant factors, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let r = self.d.rows().min(self.d.cols());
        (0..r).map(|i| self.d.get(i, i).clone()).filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form with transforms.
///
/// The diagonal entries are non-negative and each divides the next.
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            if d.get(t, t).is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }

            let mut clean = true;
            let p = d.get(t, t).clone();
            for i in t + 1..rows {
                let q = d.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    d.add_row(i, t, &-&q);
                    u.add_row(i, t, &-&q);
                }
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = d.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    d.add_col(j, t, &-&q);
                    v.add_col(j, t, &-&q);
                }
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(i, j).is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    d.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
    }
    Smith { u, d, v }
}

/// The free abelian group `Z^rank`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub rank: usize,
}

impl Lattice {
    pub fn new(rank: usize) -> Self {
        Lattice { rank }
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        e
    }

    pub fn zero(&self) -> Vector {
        vec![0; self.rank]
    }
}

/// A homomorphism of lattices, stored as a `target.rank x source.rank` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeHom {
    pub source: Lattice,
    pub target: Lattice,
    pub matrix: IntMatrix,
}

impl LatticeHom {
    pub fn new(source: Lattice, target: Lattice, matrix: IntMatrix) -> Self {
        assert_eq!(matrix.rows(), target.rank);
        assert_eq!(matrix.cols(), source.rank);
        LatticeHom { source, target, matrix }
    }

    /// The map sending the i-th basis vector to `images[i]`.
    pub fn from_images(target: Lattice, images: &[Vector]) -> Self {
        let m = IntMatrix::from_columns(target.rank, images);
        LatticeHom::new(Lattice::new(images.len()), target, m)
    }

    pub fn identity(l: Lattice) -> Self {
        LatticeHom::new(l, l, IntMatrix::identity(l.rank))
    }

    pub fn apply(&self, v: &[i64]) -> Vector {
        self.matrix.apply(v)
    }

    pub fn image_of_basis(&self, i: usize) -> Vector {
        (0..self.target.rank).map(|r| self.matrix.get_i64(r, i)).collect()
    }

    pub fn compose(&self, inner: &LatticeHom) -> LatticeHom {
        assert_eq!(inner.target, self.source);
        LatticeHom::new(inner.source, self.target, self.matrix.mul(&inner.matrix))
    }
}

/// Index of `incl`'s image, `None` standing for infinite index.
pub fn sublattice_index(incl: &LatticeHom) -> Result<Option<BigInt>, LatticeError> {
    let s = smith_normal_form(&incl.matrix);
    let factors = s.invariant_factors();
    if factors.len() < incl.source.rank {
        return Err(LatticeError::NonInjective);
    }
    if factors.len() < incl.target.rank {
        return Ok(None);
    }
    Ok(Some(factors.iter().product()))
}

/// The coefficient group standing in for the multiplicative group of a separably closed field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoeffGroup {
    /// n-th roots of unity, as `Z/n`.
    MuN(u64),
    /// The divisible group `Q/Z`.
    QmodZ,
    /// `F_q^x`, cyclic of order `q - 1`.
    UnitsFq(u64),
}

impl fmt::Display for CoeffGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffGroup::MuN(n) => write!(f, "mu{n}"),
            CoeffGroup::QmodZ => write!(f, "Q/Z"),
            CoeffGroup::UnitsFq(q) => write!(f, "F{q}^x"),
        }
    }
}

impl CoeffGroup {
    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        match *self {
            CoeffGroup::MuN(n) => Some(n),
            CoeffGroup::QmodZ => None,
            CoeffGroup::UnitsFq(q) => Some(q - 1),
        }
    }

    pub fn one(&self) -> CoeffElem {
        CoeffElem { group: *self, value: Rational64::zero() }
    }

    /// The element `-1`, if the group has one of order at most two.
    ///
    /// For odd cyclic groups there is no element of order two and `-1` is
    /// taken to be the identity only when the group models `F_q^x` in
    /// characteristic two.
    pub fn minus_one(&self) -> Option<CoeffElem> {
        match *self {
            CoeffGroup::QmodZ => Some(self.from_rational(Rational64::new(1, 2))),
            CoeffGroup::MuN(n) => (n % 2 == 0).then(|| self.from_rational(Rational64::new(1, 2))),
            CoeffGroup::UnitsFq(q) => {
                if q % 2 == 1 {
                    Some(self.from_rational(Rational64::new(1, 2)))
                } else {
                    Some(self.one())
                }
            }
        }
    }

    /// `-1` raised to `e`. Panics if the group has no `-1` and `e` is odd.
    pub fn sign(&self, e: i64) -> CoeffElem {
        if e.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.minus_one().unwrap_or_else(|| panic!("{self} has no element -1"))
        }
    }

    /// The element `r / order`, i.e. residue class `r`; for `Q/Z` this is `r` itself.
    pub fn residue(&self, r: i64) -> CoeffElem {
        match self.order() {
            Some(n) => self.from_rational(Rational64::new(r, n as i64)),
            None => self.from_rational(Rational64::from_integer(r)),
        }
    }

    /// Interprets `x` (taken mod 1) as an element; panics if it is not in the group.
    pub fn from_rational(&self, x: Rational64) -> CoeffElem {
        let v = reduce_mod_one(x);
        if let Some(n) = self.order() {
            assert!((v * n as i64).is_integer(), "{x} is not in {self}");
        }
        CoeffElem { group: *self, value: v }
    }

    pub fn contains(&self, x: Rational64) -> bool {
        match self.order() {
            Some(n) => (reduce_mod_one(x) * n as i64).is_integer(),
            None => true,
        }
    }

    /// All elements, for finite groups.
    pub fn elements(&self) -> Option<Vec<CoeffElem>> {
        let n = self.order()?;
        Some((0..n as i64).map(|r| self.residue(r)).collect())
    }
}

fn reduce_mod_one(x: Rational64) -> Rational64 {
    x - x.floor()
}

/// An element of a [`CoeffGroup`], written multiplicatively.
///
/// Internally every group sits inside `Q/Z`; the value is kept in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoeffElem {
    group: CoeffGroup,
    value: Rational64,
}

impl CoeffElem {
    pub fn group(&self) -> CoeffGroup {
        self.group
    }

    /// The value in `[0, 1)`.
    pub fn value(&self) -> Rational64 {
        self.value
    }

    /// Residue class mod the group order (the numerator over the order).
    pub fn residue(&self) -> Option<u64> {
        let n = self.group.order()?;
        Some((self.value * n as i64).to_integer() as u64)
    }

    pub fn is_one(&self) -> bool {
        self.value.is_zero()
    }

    pub fn mul(&self, other: &CoeffElem) -> CoeffElem {
        assert_eq!(self.group, other.group, "coefficient groups differ");
        CoeffElem { group: self.group, value: reduce_mod_one(self.value + other.value) }
    }

    pub fn inv(&self) -> CoeffElem {
        CoeffElem { group: self.group, value: reduce_mod_one(-self.value) }
    }

    pub fn div(&self, other: &CoeffElem) -> CoeffElem {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: i64) -> CoeffElem {
        let den = *self.value.denom();
        let e = e.rem_euclid(den);
        CoeffElem { group: self.group, value: reduce_mod_one(self.value * e) }
    }

    /// Some `x` with `x^d == self`, if one exists in the group.
    pub fn root(&self, d: &BigInt) -> Option<CoeffElem> {
        if d.is_zero() {
            return self.is_one().then_some(*self);
        }
        match self.group.order() {
            None => {
                let d = d.to_i64().expect("root degree exceeds i64");
                Some(self.group.from_rational(self.value / d))
            }
            Some(n) => {
                // solve d * r == w (mod n)
                let n_big = BigInt::from(n);
                let w = BigInt::from(self.residue().unwrap());
                let g = d.extended_gcd(&n_big);
                if !(&w % &g.gcd).is_zero() {
                    return None;
                }
                let r = (g.x * (&w / &g.gcd)).mod_floor(&n_big);
                Some(self.group.residue(r.to_i64().unwrap()))
            }
        }
    }
}

impl fmt::Display for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.residue() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}", self.value),
        }
    }
}

impl Serialize for CoeffElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A homomorphism `Z^rank -> group`, given by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub domain: Lattice,
    pub group: CoeffGroup,
    pub values: Vec<CoeffElem>,
}

impl Character {
    pub fn new(group: CoeffGroup, values: Vec<CoeffElem>) -> Self {
        assert!(values.iter().all(|v| v.group() == group));
        Character { domain: Lattice::new(values.len()), group, values }
    }

    pub fn trivial(domain: Lattice, group: CoeffGroup) -> Self {
        Character { domain, group, values: vec![group.one(); domain.rank] }
    }

    pub fn apply(&self, y: &[i64]) -> CoeffElem {
        assert_eq!(y.len(), self.domain.rank);
        y.iter()
            .zip(&self.values)
            .fold(self.group.one(), |acc, (&k, v)| acc.mul(&v.pow(k)))
    }

    /// Precomposition with a lattice map.
    pub fn pullback(&self, h: &LatticeHom) -> Character {
        assert_eq!(h.target, self.domain);
        let values = (0..h.source.rank).map(|i| self.apply(&h.image_of_basis(i))).collect();
        Character::new(self.group, values)
    }
}

/// Extends a character from a finite-index sublattice to the ambient lattice.
///
/// Returns `Ok(None)` if no extension exists in the coefficient group.
pub fn extend_character(
    sub: &LatticeHom,
    values: &Character,
    ambient: &Lattice,
) -> Result<Option<Character>, LatticeError> {
    if sub.target != *ambient {
        return Err(LatticeError::DimensionMismatch { expected: ambient.rank, got: sub.target.rank });
    }
    match sublattice_index(sub)? {
        None => Err(LatticeError::IndexInfinite),
        Some(_) => solve_character(sub, values),
    }
}

/// Solves `chi . sub == values` for any injective `sub`, finite index or not.
pub fn solve_character(sub: &LatticeHom, values: &Character) -> Result<Option<Character>, LatticeError> {
    if values.domain != sub.source {
        return Err(LatticeError::DimensionMismatch { expected: sub.source.rank, got: values.domain.rank });
    }
    let s = smith_normal_form(&sub.matrix);
    if s.rank() < sub.source.rank {
        return Err(LatticeError::NonInjective);
    }
    let group = values.group;
    // chi U^{-1} D V^{-1} = values, so (chi U^{-1}) D = values V.
    let target_vals: Vec<CoeffElem> = (0..sub.source.rank)
        .map(|j| {
            (0..sub.source.rank).fold(group.one(), |acc, i| {
                let e = s.v.get(i, j).to_i64().expect("transform entry exceeds i64");
                acc.mul(&values.values[i].pow(e))
            })
        })
        .collect();
    let mut c_prime = vec![group.one(); sub.target.rank];
    for (i, w) in target_vals.iter().enumerate() {
        match w.root(s.d.get(i, i)) {
            Some(x) => c_prime[i] = x,
            None => return Ok(None),
        }
    }
    // chi = c' U
    let chi: Vec<CoeffElem> = (0..sub.target.rank)
        .map(|j| {
            (0..sub.target.rank).fold(group.one(), |acc, i| {
                let e = s.u.get(i, j).to_i64().expect("transform entry exceeds i64");
                acc.mul(&c_prime[i].pow(e))
            })
        })
        .collect();
    let chi = Character::new(group, chi);
    debug_assert_eq!(&chi.pullback(sub), values);
    Ok(Some(chi))
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-20i64..=20, c), r).prop_map(|rows| IntMatrix::from_rows(&rows))
        })
    }

    fn full_rank_square() -> impl Strategy<Value = IntMatrix> {
        (1usize..=4)
            .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-6i64..=6, n), n))
            .prop_map(|rows| IntMatrix::from_rows(&rows))
            .prop_filter("full rank", |m| !m.det().is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn smith_form_is_a_unimodular_diagonalization(m in matrix()) {
            let s = smith_normal_form(&m);
            prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
            prop_assert!(s.u.det().abs().is_one());
            prop_assert!(s.v.det().abs().is_one());
            prop_assert!(s.d.is_diagonal());
            let f = s.invariant_factors();
            prop_assert!(f.iter().all(|x| x.is_positive()));
            prop_assert!(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        }

        #[test]
        fn invariant_factors_multiply_to_the_determinant(m in full_rank_square()) {
            let s = smith_normal_form(&m);
            let prod = s.invariant_factors().iter().fold(BigInt::one(), |a, b| a * b);
            prop_assert_eq!(prod, m.det().abs());
        }

        #[test]
        fn characters_extend_from_finite_index_sublattices(
            m in full_rank_square(),
            vals in prop::collection::vec((-30i64..30, 1i64..13), 4),
        ) {
            let n = m.rows();
            let ambient = Lattice::new(n);
            let images: Vec<Vector> = (0..n).map(|j| (0..n).map(|i| m.get_i64(i, j)).collect()).collect();
            let sub = LatticeHom::from_images(ambient, &images);
            let g = CoeffGroup::QmodZ;
            let values = Character::new(g, vals[..n].iter().map(|&(a, b)| g.from_rational(Rational64::new(a, b))).collect());
            let chi = extend_character(&sub, &values, &ambient).unwrap();
            prop_assert!(chi.is_some());
            prop_assert_eq!(chi.unwrap().pullback(&sub), values);
        }
    }
}
