//! Laurent series, the residue symbol, tame Hilbert symbols and covers of split tori.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::field::{prime_power, Field, GaloisField};
use crate::qform::QuadraticForm;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("zero input")]
    ZeroInput,
    #[error("not enough precision: need {needed} terms, have {have}")]
    InsufficientPrecision { needed: usize, have: usize },
    #[error("elements live over different fields")]
    FieldMismatch,
    #[error("n = {n} does not divide {q} - 1")]
    NotTame { n: u64, q: u64 },
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
}

/// Minimum number of series terms kept; `BDCOVER_PRECISION` raises it.
pub const MIN_PRECISION: usize = 12;

/// Working precision for series: `max(12, BDCOVER_PRECISION)`.
pub fn default_precision() -> usize {
    std::env::var("BDCOVER_PRECISION")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .map_or(MIN_PRECISION, |p| p.max(MIN_PRECISION))
}

// ---------------------------------------------------------------------------
// Laurent series.

/// A truncated Laurent series `sum_{i >= v} c_i tau^i`, known up to `tau^(v + coeffs.len())`.
///
/// A nonzero series has a nonzero leading coefficient. The zero series has no
/// coefficients and `valuation` is ignored.
#[derive(Clone, Debug)]
pub struct LaurentSeries<F: Field> {
    pub field: F,
    pub valuation: i64,
    pub coeffs: Vec<F::Elem>,
}

impl<F: Field> PartialEq for LaurentSeries<F> {
    fn eq(&self, o: &Self) -> bool {
        self.is_zero() && o.is_zero() || (self.valuation == o.valuation && self.coeffs == o.coeffs)
    }
}

impl<F: Field> LaurentSeries<F> {
    /// Normalizes leading zeros away; each one moved into the valuation costs a term of precision.
    pub fn new(field: F, valuation: i64, coeffs: Vec<F::Elem>) -> Self {
        let lead = coeffs.iter().position(|c| !field.is_zero(c));
        match lead {
            None => LaurentSeries { field, valuation: 0, coeffs: Vec::new() },
            Some(k) => LaurentSeries { valuation: valuation + k as i64, coeffs: coeffs[k..].to_vec(), field },
        }
    }

    /// A polynomial in `tau` (exact), kept to `precision` terms.
    pub fn from_poly(field: F, valuation: i64, coeffs: Vec<F::Elem>, precision: usize) -> Self {
        let mut c = coeffs;
        let lead = c.iter().position(|x| !field.is_zero(x)).unwrap_or(c.len());
        let total = lead + precision;
        c.resize(total.max(c.len()), field.zero());
        c.truncate(total);
        LaurentSeries::new(field, valuation, c)
    }

    pub fn monomial(field: F, c: F::Elem, v: i64, precision: usize) -> Self {
        LaurentSeries::from_poly(field, v, vec![c], precision)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.first()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return LaurentSeries { field: self.field.clone(), valuation: 0, coeffs: Vec::new() };
        }
        let n = self.precision().min(o.precision());
        let f = &self.field;
        let mut c = vec![f.zero(); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] = f.add(&c[i + j], &f.mul(&self.coeffs[i], &o.coeffs[j]));
            }
        }
        LaurentSeries::new(f.clone(), self.valuation + o.valuation, c)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let f = &self.field;
        let v = self.valuation.min(o.valuation);
        // known up to the smaller of the two ends
        let end = (self.valuation + self.precision() as i64).min(o.valuation + o.precision() as i64);
        let len = (end - v).max(0) as usize;
        let get = |s: &Self, e: i64| -> F::Elem {
            let k = e - s.valuation;
            if k >= 0 && (k as usize) < s.coeffs.len() {
                s.coeffs[k as usize].clone()
            } else {
                f.zero()
            }
        };
        let c = (0..len as i64).map(|i| f.add(&get(self, v + i), &get(o, v + i))).collect();
        LaurentSeries::new(f.clone(), v, c)
    }

    pub fn neg(&self) -> Self {
        LaurentSeries { field: self.field.clone(), valuation: self.valuation, coeffs: self.coeffs.iter().map(|c| self.field.neg(c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn inv(&self) -> Result<Self, SymbolError> {
        let f = &self.field;
        let lead = self.leading().ok_or(SymbolError::ZeroInput)?;
        let li = f.inv(lead).expect("leading coefficient is nonzero");
        let n = self.precision();
        // b_0 = 1/a_0, b_k = -(sum_{j=1..k} a_j b_{k-j}) / a_0
        let mut b = vec![li.clone()];
        for k in 1..n {
            let mut s = f.zero();
            for j in 1..=k {
                s = f.add(&s, &f.mul(&self.coeffs[j], &b[k - j]));
            }
            b.push(f.neg(&f.mul(&s, &li)));
        }
        Ok(LaurentSeries::new(f.clone(), -self.valuation, b))
    }

    pub fn pow(&self, e: i64) -> Result<Self, SymbolError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let one = LaurentSeries::monomial(self.field.clone(), self.field.one(), 0, self.precision().max(1));
        let mut acc = one;
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// The coefficient of `tau^0`.
    pub fn constant_term(&self) -> Result<F::Elem, SymbolError> {
        if self.is_zero() || self.valuation > 0 {
            return Ok(self.field.zero());
        }
        let k = (-self.valuation) as usize;
        self.coeffs.get(k).cloned().ok_or(SymbolError::InsufficientPrecision { needed: k + 1, have: self.precision() })
    }
}

/// `Res(f, g) = (-1)^(v(f) v(g)) (f^v(g) / g^v(f))(0)`.
pub fn residue_symbol<F: Field>(f: &LaurentSeries<F>, g: &LaurentSeries<F>) -> Result<F::Elem, SymbolError> {
    if f.is_zero() || g.is_zero() {
        return Err(SymbolError::ZeroInput);
    }
    let (vf, vg) = (f.valuation, g.valuation);
    let ratio = f.pow(vg)?.mul(&g.pow(vf)?.inv()?);
    let c = ratio.constant_term()?;
    let field = &f.field;
    Ok(if (vf * vg).rem_euclid(2) == 1 { field.neg(&c) } else { c })
}

// ---------------------------------------------------------------------------
// Roots of unity and local fields.

/// `zeta_n^idx`, with `0 <= idx < n`; the group law is addition of indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RootOfUnityIndex {
    pub n: u64,
    pub idx: u64,
}

impl RootOfUnityIndex {
    pub fn new(n: u64, idx: i64) -> Self {
        RootOfUnityIndex { n, idx: idx.rem_euclid(n as i64) as u64 }
    }
    pub fn one(n: u64) -> Self {
        RootOfUnityIndex { n, idx: 0 }
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        RootOfUnityIndex::new(self.n, (self.idx + o.idx) as i64)
    }
    pub fn pow(&self, e: i64) -> Self {
        RootOfUnityIndex::new(self.n, (self.idx as i64).wrapping_mul(e.rem_euclid(self.n as i64)))
    }
    pub fn inv(&self) -> Self {
        self.pow(-1)
    }
    pub fn is_one(&self) -> bool {
        self.idx == 0
    }
}

impl fmt::Display for RootOfUnityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta_{}^{}", self.n, self.idx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LocalKind {
    /// `Q_p`, `p` an odd prime.
    PAdic { p: u64 },
    /// `F_q((t))`.
    FqLaurent { q: u64 },
}

/// A local field with tame `n`-th roots of unity: `n | q* - 1` for the residue cardinality `q*`.
#[derive(Clone, Debug)]
pub struct TameLocalField {
    pub kind: LocalKind,
    pub n: u64,
    pub residue: GaloisField,
    /// p-adic digits (`Q_p`) or series terms (`F_q((t))`) kept for units.
    pub precision: usize,
}

impl PartialEq for TameLocalField {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind && self.n == o.n
    }
}

pub const PADIC_DIGITS: usize = 8;

impl TameLocalField {
    pub fn new(kind: LocalKind, n: u64) -> Result<Self, SymbolError> {
        let q = match kind {
            LocalKind::PAdic { p } => {
                if p == 2 || prime_power(p).map(|(_, k)| k) != Some(1) {
                    return Err(SymbolError::UnsupportedField(format!("Q_{p}: need an odd prime")));
                }
                p
            }
            LocalKind::FqLaurent { q } => q,
        };
        let residue = GaloisField::new(q).map_err(|e| SymbolError::UnsupportedField(e.to_string()))?;
        if n == 0 || (q - 1) % n != 0 {
            return Err(SymbolError::NotTame { n, q });
        }
        let precision = match kind {
            LocalKind::PAdic { .. } => PADIC_DIGITS,
            LocalKind::FqLaurent { .. } => default_precision(),
        };
        Ok(TameLocalField { kind, n, residue, precision })
    }

    pub fn residue_order(&self) -> u64 {
        self.residue.order()
    }

    /// The uniformizer `p` or `t`.
    pub fn uniformizer(&self) -> LocalElem {
        match self.kind {
            LocalKind::PAdic { p } => LocalElem::PAdic(PAdic { p, v: 1, unit: 1, digits: self.precision }),
            LocalKind::FqLaurent { .. } => {
                LocalElem::Series(LaurentSeries::monomial(self.residue.clone(), 1, 1, self.precision))
            }
        }
    }

    pub fn one(&self) -> LocalElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> LocalElem {
        match self.kind {
            LocalKind::PAdic { p } => LocalElem::PAdic(PAdic::from_rational(p, x, 1, self.precision)),
            LocalKind::FqLaurent { .. } => {
                let c = self.residue.from_i64(x);
                LocalElem::Series(LaurentSeries::monomial(self.residue.clone(), c, 0, self.precision))
            }
        }
    }

    /// Parses an element: `u*p^v`, `p^v`, an integer or `a/b` for `Q_p`;
    /// `[c0,c1,...]` optionally followed by `*t^v` for `F_q((t))`.
    pub fn parse_elem(&self, s: &str) -> Result<LocalElem, SymbolError> {
        let err = || SymbolError::Parse(s.to_string());
        let s = s.trim();
        match self.kind {
            LocalKind::PAdic { p } => {
                let (unit, v) = match s.split_once("p^") {
                    Some((head, v)) => {
                        let v: i64 = v.trim().parse().map_err(|_| err())?;
                        let head = head.trim().trim_end_matches('*').trim();
                        (if head.is_empty() { "1" } else { head }, v)
                    }
                    None => (s, 0),
                };
                let (num, den) = match unit.split_once('/') {
                    Some((a, b)) => (a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?),
                    None => (unit.parse().map_err(|_| err())?, 1i64),
                };
                if num == 0 || den == 0 {
                    return Err(SymbolError::ZeroInput);
                }
                let mut x = PAdic::from_rational(p, num, den, self.precision);
                x.v += v;
                Ok(LocalElem::PAdic(x))
            }
            LocalKind::FqLaurent { .. } => {
                let (list, v) = match s.split_once("t^") {
                    Some((head, v)) => (head.trim().trim_end_matches('*').trim(), v.trim().parse::<i64>().map_err(|_| err())?),
                    None => (s, 0),
                };
                let inner = list.strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(err)?;
                let q = self.residue.order();
                let coeffs: Vec<u16> = inner
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().ok().filter(|&c| c < q).map(|c| c as u16).ok_or_else(err))
                    .collect::<Result<_, _>>()?;
                let x = LaurentSeries::from_poly(self.residue.clone(), v, coeffs, self.precision);
                if x.is_zero() {
                    return Err(SymbolError::ZeroInput);
                }
                Ok(LocalElem::Series(x))
            }
        }
    }
}

impl FromStr for TameLocalField {
    type Err = SymbolError;

    /// `"Qp:5,n:4"` or `"Fq:9,n:8"`.
    fn from_str(s: &str) -> Result<Self, SymbolError> {
        let err = || SymbolError::Parse(s.to_string());
        let (field, n) = s.split_once(',').ok_or_else(err)?;
        let n: u64 = n.trim().strip_prefix("n:").ok_or_else(err)?.trim().parse().map_err(|_| err())?;
        let (tag, val) = field.split_once(':').ok_or_else(err)?;
        let val: u64 = val.trim().parse().map_err(|_| err())?;
        let kind = match tag.trim() {
            "Qp" => LocalKind::PAdic { p: val },
            "Fq" => LocalKind::FqLaurent { q: val },
            _ => return Err(err()),
        };
        TameLocalField::new(kind, n)
    }
}

/// `p^v u` with `u` a unit known modulo `p^digits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PAdic {
    pub p: u64,
    pub v: i64,
    pub unit: u64,
    pub digits: usize,
}

fn modpow(p: u64, k: usize) -> u128 {
    (p as u128).pow(k as u32)
}

fn inv_mod(a: u128, m: u128) -> u128 {
    // extended Euclid on signed values
    let (mut r0, mut r1) = (a as i128 % m as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m as i128) as u128
}

impl PAdic {
    pub fn from_rational(p: u64, num: i64, den: i64, digits: usize) -> Self {
        assert!(num != 0 && den != 0);
        let (mut a, mut b, mut v) = (num as i128, den as i128, 0i64);
        while a % p as i128 == 0 {
            a /= p as i128;
            v += 1;
        }
        while b % p as i128 == 0 {
            b /= p as i128;
            v -= 1;
        }
        let m = modpow(p, digits);
        let a = a.rem_euclid(m as i128) as u128;
        let b = b.rem_euclid(m as i128) as u128;
        PAdic { p, v, unit: (a * inv_mod(b, m) % m) as u64, digits }
    }

    fn modulus(&self) -> u128 {
        modpow(self.p, self.digits)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let digits = self.digits.min(o.digits);
        let m = modpow(self.p, digits);
        PAdic { p: self.p, v: self.v + o.v, unit: ((self.unit as u128 * o.unit as u128) % m) as u64, digits }
    }

    pub fn inv(&self) -> Self {
        PAdic { p: self.p, v: -self.v, unit: inv_mod(self.unit as u128, self.modulus()) as u64, digits: self.digits }
    }

    /// `self + o`, or `None` when the sum vanishes to the known precision.
    pub fn add(&self, o: &Self) -> Option<Self> {
        let (lo, hi) = if self.v <= o.v { (self, o) } else { (o, self) };
        let shift = (hi.v - lo.v) as usize;
        let digits = lo.digits.min(hi.digits + shift);
        let m = modpow(self.p, digits);
        let shifted = if shift >= digits { 0 } else { hi.unit as u128 * modpow(self.p, shift) % m };
        let mut s = (lo.unit as u128 % m + shifted) % m;
        if s == 0 {
            return None;
        }
        let (mut v, mut d) = (lo.v, digits);
        while s % self.p as u128 == 0 {
            s /= self.p as u128;
            v += 1;
            d -= 1;
        }
        Some(PAdic { p: self.p, v, unit: (s % modpow(self.p, d)) as u64, digits: d })
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PAdic { unit: ((m - self.unit as u128 % m) % m) as u64, ..*self }
    }
}

/// A nonzero element of a tame local field.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalElem {
    PAdic(PAdic),
    Series(LaurentSeries<GaloisField>),
}

impl LocalElem {
    pub fn valuation(&self) -> i64 {
        match self {
            LocalElem::PAdic(x) => x.v,
            LocalElem::Series(s) => s.valuation,
        }
    }

    /// The residue of the unit part `x / pi^v(x)`.
    pub fn residue_unit(&self) -> u16 {
        match self {
            LocalElem::PAdic(x) => (x.unit % x.p) as u16,
            LocalElem::Series(s) => *s.leading().expect("nonzero element"),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, SymbolError> {
        match (self, o) {
            (LocalElem::PAdic(a), LocalElem::PAdic(b)) if a.p == b.p => Ok(LocalElem::PAdic(a.mul(b))),
            (LocalElem::Series(a), LocalElem::Series(b)) if a.field == b.field => Ok(LocalElem::Series(a.mul(b))),
            _ => Err(SymbolError::FieldMismatch),
        }
    }

    pub fn inv(&self) -> Self {
        match self {
            LocalElem::PAdic(a) => LocalElem::PAdic(a.inv()),
            LocalElem::Series(a) => LocalElem::Series(a.inv().expect("nonzero element")),
        }
    }

    /// `1 - self`, or `None` when it vanishes to the known precision.
    pub fn one_minus(&self) -> Option<Self> {
        match self {
            LocalElem::PAdic(a) => {
                let one = PAdic::from_rational(a.p, 1, 1, a.digits);
                one.add(&a.neg()).map(LocalElem::PAdic)
            }
            LocalElem::Series(a) => {
                let one = LaurentSeries::monomial(a.field.clone(), 1, 0, a.precision().max(1));
                let d = one.sub(a);
                (!d.is_zero()).then_some(LocalElem::Series(d))
            }
        }
    }
}

/// The tame symbol `(-1)^(v(a)v(b)) a^v(b) / b^v(a)` in the residue field.
pub fn tame_symbol(a: &LocalElem, b: &LocalElem, k: &TameLocalField) -> u16 {
    let f = &k.residue;
    let (va, vb) = (a.valuation(), b.valuation());
    let t = f.fmul(f.pow(&a.residue_unit(), vb), f.pow(&f.finv(b.residue_unit()), va));
    if (va * vb).rem_euclid(2) == 1 {
        f.fneg(t)
    } else {
        t
    }
}

/// The `n`-th tame Hilbert symbol as a power of `zeta_n = g^((q*-1)/n)`, `g` the generator of the residue field.
pub fn tame_hilbert(a: &LocalElem, b: &LocalElem, k: &TameLocalField) -> RootOfUnityIndex {
    let t = tame_symbol(a, b, k);
    // t^((q-1)/n) = g^(log t (q-1)/n) = zeta_n^(log t)
    let log = k.residue.log(t).expect("tame symbol is a unit") as i64;
    RootOfUnityIndex::new(k.n, log)
}

// ---------------------------------------------------------------------------
// Covers of split tori.

/// An element `(zeta, t)` of the cover of `T(K) = (K^x)^rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusCoverElement {
    pub zeta: RootOfUnityIndex,
    pub point: Vec<LocalElem>,
}

impl TorusCoverElement {
    pub fn identity(k: &TameLocalField, rank: usize) -> Self {
        TorusCoverElement { zeta: RootOfUnityIndex::one(k.n), point: vec![k.one(); rank] }
    }

    /// The element `(1, e_i(u))`.
    pub fn basis_lift(k: &TameLocalField, rank: usize, i: usize, u: LocalElem) -> Self {
        let mut x = TorusCoverElement::identity(k, rank);
        x.point[i] = u;
        x
    }
}

/// `sigma(s, t) = prod_i (s_i, t_i)^Q(e_i) prod_{i<j} (s_i, t_j)^B(e_i, e_j)`.
pub fn torus_cocycle(s: &[LocalElem], t: &[LocalElem], q: &QuadraticForm, k: &TameLocalField) -> RootOfUnityIndex {
    let mut acc = RootOfUnityIndex::one(k.n);
    for i in 0..s.len() {
        if q.diag[i] != 0 {
            acc = acc.mul(&tame_hilbert(&s[i], &t[i], k).pow(q.diag[i]));
        }
        for j in i + 1..s.len() {
            if q.offdiag[i][j] != 0 {
                acc = acc.mul(&tame_hilbert(&s[i], &t[j], k).pow(q.offdiag[i][j]));
            }
        }
    }
    acc
}

pub fn torus_cover_mul(
    x: &TorusCoverElement,
    y: &TorusCoverElement,
    q: &QuadraticForm,
    k: &TameLocalField,
) -> Result<TorusCoverElement, SymbolError> {
    let r = q.rank();
    for p in [&x.point, &y.point] {
        if p.len() != r {
            return Err(SymbolError::RankMismatch { expected: r, got: p.len() });
        }
    }
    if x.zeta.n != k.n || y.zeta.n != k.n {
        return Err(SymbolError::FieldMismatch);
    }
    let point = x.point.iter().zip(&y.point).map(|(a, b)| a.mul(b)).collect::<Result<Vec<_>, _>>()?;
    let zeta = x.zeta.mul(&y.zeta).mul(&torus_cocycle(&x.point, &y.point, q, k));
    Ok(TorusCoverElement { zeta, point })
}

pub fn torus_cover_inv(x: &TorusCoverElement, q: &QuadraticForm, k: &TameLocalField) -> TorusCoverElement {
    let point: Vec<LocalElem> = x.point.iter().map(|a| a.inv()).collect();
    let zeta = x.zeta.mul(&torus_cocycle(&x.point, &point, q, k)).inv();
    TorusCoverElement { zeta, point }
}

/// `x y x^-1 y^-1`, which lies over the identity of `T`.
pub fn torus_commutator(
    x: &TorusCoverElement,
    y: &TorusCoverElement,
    q: &QuadraticForm,
    k: &TameLocalField,
) -> Result<RootOfUnityIndex, SymbolError> {
    let xy = torus_cover_mul(x, y, q, k)?;
    let xyx = torus_cover_mul(&xy, &torus_cover_inv(x, q, k), q, k)?;
    let c = torus_cover_mul(&xyx, &torus_cover_inv(y, q, k), q, k)?;
    Ok(c.zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn q_series(v: i64, c: &[i64]) -> LaurentSeries<Rationals> {
        LaurentSeries::from_poly(Rationals, v, c.iter().map(|&x| rat(x)).collect(), 12)
    }

    #[test]
    fn residue_examples() {
        let tau = q_series(1, &[1]);
        assert_eq!(residue_symbol(&tau, &tau).unwrap(), rat(-1));
        let one_minus_tau = q_series(0, &[1, -1]);
        assert_eq!(residue_symbol(&tau, &one_minus_tau).unwrap(), rat(1));
        let u = q_series(0, &[3, 1, 4]);
        let w = q_series(0, &[2, 7]);
        assert_eq!(residue_symbol(&u, &w).unwrap(), rat(1));
        assert_eq!(residue_symbol(&q_series(0, &[]), &tau), Err(SymbolError::ZeroInput));
    }

    #[test]
    fn residue_matches_leading_coefficients() {
        // v(f) = 2, v(g) = -1: sign +1, value 3^-1 / 2^2
        let f = q_series(2, &[3, 1, 5]);
        let g = q_series(-1, &[2, 0, 1]);
        assert_eq!(residue_symbol(&f, &g).unwrap(), BigRational::new(BigInt::from(1), BigInt::from(12)));
        // v(f) = 1, v(g) = 1: sign -1, value 2 / 5
        let f = q_series(1, &[2, 1]);
        let g = q_series(1, &[5, 3]);
        assert_eq!(residue_symbol(&f, &g).unwrap(), BigRational::new(BigInt::from(-2), BigInt::from(5)));
    }

    #[test]
    fn series_inverse() {
        let f = q_series(0, &[1, -1]);
        let g = f.inv().unwrap();
        assert!(g.coeffs.iter().all(|c| *c == rat(1)));
        assert_eq!(f.mul(&g), q_series(0, &[1]));
    }

    #[test]
    fn hilbert_examples() {
        let k: TameLocalField = "Qp:5,n:4".parse().unwrap();
        let five = k.parse_elem("p^1").unwrap();
        let two = k.parse_elem("2").unwrap();
        assert_eq!(tame_hilbert(&five, &five, &k).idx, 2);
        assert_eq!(tame_hilbert(&two, &five, &k).idx, 1);
        assert_eq!(k.parse_elem("10").unwrap(), k.parse_elem("2*p^1").unwrap());
    }

    #[test]
    fn tameness_is_enforced() {
        assert!(matches!("Qp:5,n:3".parse::<TameLocalField>(), Err(SymbolError::NotTame { .. })));
        assert!("Fq:9,n:8".parse::<TameLocalField>().is_ok());
        assert!("Qp:9,n:2".parse::<TameLocalField>().is_err());
    }

    #[test]
    fn torus_commutator_example() {
        let k: TameLocalField = "Qp:5,n:4".parse().unwrap();
        let q = QuadraticForm::new(vec![1, 1], vec![vec![0, 2], vec![2, 0]]);
        let x = TorusCoverElement::basis_lift(&k, 2, 0, k.parse_elem("2").unwrap());
        let y = TorusCoverElement::basis_lift(&k, 2, 1, k.parse_elem("5").unwrap());
        assert_eq!(torus_commutator(&x, &y, &q, &k).unwrap().idx, 2);
        let id = TorusCoverElement::identity(&k, 2);
        assert_eq!(torus_cover_mul(&id, &x, &q, &k).unwrap(), x);
        assert_eq!(torus_cover_mul(&x, &id, &q, &k).unwrap(), x);
    }

    #[test]
    fn padic_arithmetic() {
        let a = PAdic::from_rational(5, 3, 7, 8);
        let b = PAdic::from_rational(5, 7, 3, 8);
        assert_eq!(a.mul(&b), PAdic::from_rational(5, 1, 1, 8));
        let s = PAdic::from_rational(5, 1, 1, 8).add(&PAdic::from_rational(5, 4, 1, 8)).unwrap();
        assert_eq!((s.v, s.unit), (1, 1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat_series() -> impl Strategy<Value = LaurentSeries<Rationals>> {
            (-3i64..=3, 1i64..=9, prop::collection::vec(-9i64..=9, 0..6)).prop_map(|(v, lead, rest)| {
                let mut c = vec![rat(lead)];
                c.extend(rest.into_iter().map(rat));
                LaurentSeries::from_poly(Rationals, v, c, 12)
            })
        }

        fn f7_series() -> impl Strategy<Value = LaurentSeries<GaloisField>> {
            (-3i64..=3, 1u16..7, prop::collection::vec(0u16..7, 0..6)).prop_map(|(v, lead, rest)| {
                let mut c = vec![lead];
                c.extend(rest);
                LaurentSeries::from_poly(GaloisField::new(7).unwrap(), v, c, 12)
            })
        }

        fn q5() -> TameLocalField {
            "Qp:5,n:4".parse().unwrap()
        }

        fn f9() -> TameLocalField {
            "Fq:9,n:8".parse().unwrap()
        }

        fn padic_elem() -> impl Strategy<Value = LocalElem> {
            (-3i64..=3, 1i64..2000).prop_filter_map("unit", |(v, u)| {
                (u % 5 != 0).then(|| k_elem(&q5(), &format!("{u}*p^{v}")))
            })
        }

        fn f9_elem() -> impl Strategy<Value = LocalElem> {
            (-3i64..=3, 1u16..9, prop::collection::vec(0u16..9, 0..5)).prop_map(|(v, lead, rest)| {
                let mut c = vec![lead.to_string()];
                c.extend(rest.iter().map(|x| x.to_string()));
                k_elem(&f9(), &format!("[{}]*t^{v}", c.join(",")))
            })
        }

        fn k_elem(k: &TameLocalField, s: &str) -> LocalElem {
            k.parse_elem(s).unwrap()
        }

        fn steinberg_holds(a: &LocalElem, k: &TameLocalField) -> bool {
            match a.one_minus() {
                Some(b) => tame_hilbert(a, &b, k).is_one(),
                None => true,
            }
        }

        fn bimult_holds(a: &LocalElem, a2: &LocalElem, b: &LocalElem, k: &TameLocalField) -> bool {
            let lhs = tame_hilbert(&a.mul(a2).unwrap(), b, k);
            let rhs = tame_hilbert(a, b, k).mul(&tame_hilbert(a2, b, k));
            let lhs2 = tame_hilbert(b, &a.mul(a2).unwrap(), k);
            let rhs2 = tame_hilbert(b, a, k).mul(&tame_hilbert(b, a2, k));
            lhs == rhs && lhs2 == rhs2
        }

        fn antisymmetry_holds(a: &LocalElem, b: &LocalElem, k: &TameLocalField) -> bool {
            // (a,b)(b,a) = 1 for the tame symbol
            tame_hilbert(a, b, k).mul(&tame_hilbert(b, a, k)).is_one()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            #[test]
            fn residue_steinberg_rationals(f in rat_series()) {
                let g = LaurentSeries::monomial(Rationals, rat(1), 0, 12).sub(&f);
                prop_assume!(!g.is_zero());
                prop_assert_eq!(residue_symbol(&f, &g).unwrap(), rat(1));
            }

            #[test]
            fn residue_steinberg_f7(f in f7_series()) {
                let g = LaurentSeries::monomial(f.field.clone(), 1, 0, 12).sub(&f);
                prop_assume!(!g.is_zero());
                prop_assert_eq!(residue_symbol(&f, &g).unwrap(), 1);
            }

            #[test]
            fn residue_bimultiplicative_rationals(f1 in rat_series(), f2 in rat_series(), g in rat_series()) {
                let lhs = residue_symbol(&f1.mul(&f2), &g).unwrap();
                prop_assert_eq!(lhs, residue_symbol(&f1, &g).unwrap() * residue_symbol(&f2, &g).unwrap());
            }

            #[test]
            fn residue_bimultiplicative_f7(f1 in f7_series(), f2 in f7_series(), g in f7_series()) {
                let k = f1.field.clone();
                let lhs = residue_symbol(&f1.mul(&f2), &g).unwrap();
                prop_assert_eq!(lhs, k.fmul(residue_symbol(&f1, &g).unwrap(), residue_symbol(&f2, &g).unwrap()));
            }

            #[test]
            fn hilbert_q5(a in padic_elem(), a2 in padic_elem(), b in padic_elem()) {
                let k = q5();
                prop_assert!(steinberg_holds(&a, &k));
                prop_assert!(bimult_holds(&a, &a2, &b, &k));
                prop_assert!(antisymmetry_holds(&a, &b, &k));
            }

            #[test]
            fn hilbert_f9(a in f9_elem(), a2 in f9_elem(), b in f9_elem()) {
                let k = f9();
                prop_assert!(steinberg_holds(&a, &k));
                prop_assert!(bimult_holds(&a, &a2, &b, &k));
                prop_assert!(antisymmetry_holds(&a, &b, &k));
            }

            #[test]
            fn torus_cover_associative(
                diag in prop::collection::vec(-3i64..=3, 2),
                b01 in -3i64..=3,
                pts in prop::collection::vec(padic_elem(), 6),
            ) {
                let k = q5();
                let q = QuadraticForm::new(diag, vec![vec![0, b01], vec![b01, 0]]);
                let el = |i: usize| TorusCoverElement { zeta: RootOfUnityIndex::new(4, i as i64), point: pts[2 * i..2 * i + 2].to_vec() };
                let (x, y, z) = (el(0), el(1), el(2));
                let l = torus_cover_mul(&torus_cover_mul(&x, &y, &q, &k).unwrap(), &z, &q, &k).unwrap();
                let r = torus_cover_mul(&x, &torus_cover_mul(&y, &z, &q, &k).unwrap(), &q, &k).unwrap();
                prop_assert_eq!(l, r);
                let xi = torus_cover_inv(&x, &q, &k);
                prop_assert!(torus_cover_mul(&x, &xi, &q, &k).unwrap().zeta.is_one());
            }

            #[test]
            fn torus_commutator_is_symbol_power(
                diag in prop::collection::vec(-3i64..=3, 3),
                off in prop::collection::vec(-3i64..=3, 3),
                u in padic_elem(),
                w in padic_elem(),
            ) {
                let k = q5();
                let b = vec![vec![0, off[0], off[1]], vec![off[0], 0, off[2]], vec![off[1], off[2], 0]];
                let q = QuadraticForm::new(diag, b.clone());
                for i in 0..3 {
                    for j in 0..3 {
                        if i == j { continue; }
                        let x = TorusCoverElement::basis_lift(&k, 3, i, u.clone());
                        let y = TorusCoverElement::basis_lift(&k, 3, j, w.clone());
                        let c = torus_commutator(&x, &y, &q, &k).unwrap();
                        prop_assert_eq!(c, tame_hilbert(&u, &w, &k).pow(b[i][j]));
                    }
                }
            }
        }
    }
}
