//! Exact base fields: the rationals and small finite fields.

use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {0} is too large (limit 256)")]
    TooLarge(u64),
}

/// Field arithmetic over an element type that carries no context of its own.
pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::Elem, e: i64) -> Self::Elem {
        let base = if e < 0 { self.inv(a).expect("negative power of zero") } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Returns `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// A finite field `F_q`, `q <= 256`, with full addition and multiplication tables.
///
/// Elements are integers in `0..q` encoding polynomials in base `p`; the
/// multiplicative generator is the smallest element of order `q - 1`.
#[derive(Clone)]
pub struct GaloisField {
    inner: Arc<GfTables>,
}

struct GfTables {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    log: Vec<u32>,
    exp: Vec<u16>,
}

impl Debug for GaloisField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({})", self.inner.q)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.q == other.inner.q
    }
}

impl Eq for GaloisField {}

fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // modulus is monic of degree k
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            let idx = d - k + i;
            prod[idx] = (prod[idx] + (p - c) * m) % p;
        }
    }
    prod.truncate(k);
    prod
}

fn digits(x: u64, p: u64, k: u32) -> Vec<u64> {
    let mut v = Vec::with_capacity(k as usize);
    let mut x = x;
    for _ in 0..k {
        v.push(x % p);
        x /= p;
    }
    v
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

// Monic irreducible of degree k over F_p, smallest in lexicographic encoding.
fn find_irreducible(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = p.pow(k);
    'outer: for low in 0..count {
        let mut f = digits(low, p, k);
        f.push(1);
        if f[0] == 0 {
            continue;
        }
        // trial division by monic polynomials of degree 1..=k/2
        for deg in 1..=k / 2 {
            for g_low in 0..p.pow(deg) {
                let mut g = digits(g_low, p, deg);
                g.push(1);
                if poly_rem(&f, &g, p).iter().all(|&c| c == 0) {
                    continue 'outer;
                }
            }
        }
        return f;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if c != 0 {
            for (i, &x) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * x) % p;
            }
        }
        r.pop();
    }
    r
}

impl GaloisField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if q > 256 {
            return Err(FieldError::TooLarge(q));
        }
        let modulus = find_irreducible(p, k);
        let n = q as usize;
        let mut add = vec![0u16; n * n];
        let mut mul = vec![0u16; n * n];
        for a in 0..q {
            let da = digits(a, p, k);
            for b in 0..q {
                let db = digits(b, p, k);
                let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&s, p) as u16;
                mul[(a * q + b) as usize] = undigits(&poly_mulmod(&da, &db, &modulus, p), p) as u16;
            }
        }
        let neg: Vec<u16> = (0..q)
            .map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap() as u16)
            .collect();
        let inv: Vec<u16> = (0..q)
            .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap() as u16 })
            .collect();
        let order = |g: u64| {
            let mut x = g;
            let mut o = 1;
            while x != 1 {
                x = mul[(x * q + g) as usize] as u64;
                o += 1;
            }
            o
        };
        let gen = (1..q).find(|&g| order(g) == q - 1).unwrap();
        let mut exp = vec![0u16; n - 1];
        let mut log = vec![0u32; n];
        let mut x = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x as u16;
            log[x as usize] = i as u32;
            x = mul[(x * q + gen) as usize] as u64;
        }
        Ok(GaloisField { inner: Arc::new(GfTables { p, k, q, modulus, add, mul, neg, inv, log, exp }) })
    }

    pub fn order(&self) -> u64 {
        self.inner.q
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.k
    }

    /// Coefficients of the defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn generator(&self) -> u16 {
        self.inner.exp[if self.inner.q > 2 { 1 } else { 0 }]
    }

    /// Discrete logarithm to the base [`GaloisField::generator`]; `None` for zero.
    pub fn log(&self, a: u16) -> Option<u32> {
        (a != 0).then(|| self.inner.log[a as usize])
    }

    pub fn exp(&self, e: i64) -> u16 {
        let m = (self.inner.q - 1) as i64;
        self.inner.exp[e.rem_euclid(m) as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.inner.q as u16
    }

    pub fn units(&self) -> impl Iterator<Item = u16> {
        1..self.inner.q as u16
    }

    /// Absolute trace to the prime field.
    pub fn trace(&self, a: u16) -> u16 {
        let mut acc = 0u16;
        let mut x = a;
        for _ in 0..self.inner.k {
            acc = self.add(&acc, &x);
            x = self.pow(&x, self.inner.p as i64);
        }
        acc
    }

    #[inline]
    pub fn fadd(&self, a: u16, b: u16) -> u16 {
        self.inner.add[a as usize * self.inner.q as usize + b as usize]
    }

    #[inline]
    pub fn fmul(&self, a: u16, b: u16) -> u16 {
        self.inner.mul[a as usize * self.inner.q as usize + b as usize]
    }

    #[inline]
    pub fn fneg(&self, a: u16) -> u16 {
        self.inner.neg[a as usize]
    }

    #[inline]
    pub fn fsub(&self, a: u16, b: u16) -> u16 {
        self.fadd(a, self.fneg(b))
    }

    #[inline]
    pub fn finv(&self, a: u16) -> u16 {
        assert!(a != 0, "inverse of zero");
        self.inner.inv[a as usize]
    }
}

impl Field for GaloisField {
    type Elem = u16;

    fn zero(&self) -> u16 {
        0
    }
    fn one(&self) -> u16 {
        1
    }
    fn add(&self, a: &u16, b: &u16) -> u16 {
        self.fadd(*a, *b)
    }
    fn neg(&self, a: &u16) -> u16 {
        self.fneg(*a)
    }
    fn mul(&self, a: &u16, b: &u16) -> u16 {
        self.fmul(*a, *b)
    }
    fn inv(&self, a: &u16) -> Option<u16> {
        (*a != 0).then(|| self.finv(*a))
    }
    fn from_i64(&self, n: i64) -> u16 {
        n.rem_euclid(self.inner.p as i64) as u16
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert!(GaloisField::new(6).is_err());
    }

    #[test]
    fn field_axioms_small() {
        for q in [2, 3, 4, 5, 7, 8, 9, 25] {
            let f = GaloisField::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.fadd(a, f.fneg(a)), 0);
                if a != 0 {
                    assert_eq!(f.fmul(a, f.finv(a)), 1);
                }
                for b in f.elements() {
                    for c in f.elements() {
                        let lhs = f.fmul(a, f.fadd(b, c));
                        let rhs = f.fadd(f.fmul(a, b), f.fmul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            let seen: std::collections::HashSet<u16> = (0..q as i64 - 1).map(|e| f.exp(e)).collect();
            assert_eq!(seen.len() as u64, q - 1);
        }
    }

    #[test]
    fn generator_of_f5_is_two() {
        let f = GaloisField::new(5).unwrap();
        assert_eq!(f.generator(), 2);
        assert_eq!(f.log(4), Some(2));
    }
}
