//! Split classical groups over `F_q` as explicit matrix groups.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::matrix::{fq, FqMatrix};
use super::GeometryError;
use crate::field::GaloisField;
use crate::roots::Family;

/// A vector space with a nondegenerate form `<x, y> = x J y^T`, `J^T = -epsilon J`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormedSpace {
    pub field: GaloisField,
    pub dim: usize,
    pub form: FqMatrix,
    /// `1` for alternating forms, `-1` for symmetric ones.
    pub epsilon: i8,
}

impl FormedSpace {
    pub fn new(field: GaloisField, form: FqMatrix, epsilon: i8) -> Result<Self, GeometryError> {
        if !form.is_square() || form.det(&field) == 0 {
            return Err(GeometryError::Degenerate("form is singular".into()));
        }
        let expect = form.scale(fq(&field, -(epsilon as i64)), &field);
        if form.transpose() != expect {
            return Err(GeometryError::Degenerate(format!("form is not of symmetry type {epsilon}")));
        }
        if epsilon == 1 && (0..form.rows).any(|i| form.get(i, i) != 0) {
            return Err(GeometryError::Degenerate("alternating form has nonzero diagonal".into()));
        }
        Ok(FormedSpace { dim: form.rows, field, form, epsilon })
    }

    /// `J[i][2m-1-i] = 1` for `i < m`, `-1` otherwise.
    pub fn symplectic(field: GaloisField, m: usize) -> Self {
        let n = 2 * m;
        let mut j = FqMatrix::zeros(n, n);
        for i in 0..n {
            j.set(i, n - 1 - i, if i < m { 1 } else { fq(&field, -1) });
        }
        FormedSpace::new(field, j, 1).expect("standard symplectic form")
    }

    /// Antidiagonal symmetric form; needs odd `q`.
    pub fn split_orthogonal(field: GaloisField, dim: usize) -> Result<Self, GeometryError> {
        if field.characteristic() == 2 {
            return Err(GeometryError::UnsupportedFamily("orthogonal groups need odd q".into()));
        }
        let mut j = FqMatrix::zeros(dim, dim);
        for i in 0..dim {
            j.set(i, dim - 1 - i, 1);
        }
        FormedSpace::new(field, j, -1)
    }

    pub fn pair(&self, x: &[u16], y: &[u16]) -> u16 {
        let f = &self.field;
        let mut acc = 0;
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.dim {
                let c = self.form.get(i, j);
                if c != 0 && y[j] != 0 {
                    acc = f.fadd(acc, f.fmul(x[i], f.fmul(c, y[j])));
                }
            }
        }
        acc
    }

    pub fn preserves(&self, g: &FqMatrix) -> bool {
        let f = &self.field;
        g.rows == self.dim && g.is_square() && g.mul(&self.form, f).mul(&g.transpose(), f) == self.form
    }

    /// `{v : <v, s> = 0 for every row s}`.
    pub fn perp(&self, sub: &FqMatrix) -> FqMatrix {
        let f = &self.field;
        if sub.rows == 0 {
            return FqMatrix::identity(self.dim);
        }
        self.form.mul(&sub.transpose(), f).left_kernel(f).row_space(f)
    }

    pub fn is_totally_isotropic(&self, sub: &FqMatrix) -> bool {
        let f = &self.field;
        sub.mul(&self.form, f).mul(&sub.transpose(), f).is_zero()
    }
}

/// `G(F_q)` given by generators: `Sp_2m` (family C), split `SO_2m+1` (B), split `SO_2m` (D), `GL_m` (A).
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    pub family: Family,
    pub m: usize,
    pub field: GaloisField,
    pub dim: usize,
    /// `None` for `GL_m`.
    pub space: Option<FormedSpace>,
    pub generators: Vec<FqMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub family: String,
    pub m: usize,
    pub q: u64,
    pub dim: usize,
    pub generators: usize,
    pub expected_order: u128,
}

pub fn build_group(family: Family, m: usize, q: u64) -> Result<MatrixGroup, GeometryError> {
    let field = GaloisField::new(q)?;
    if m == 0 {
        return Err(GeometryError::UnsupportedFamily("rank 0".into()));
    }
    let (dim, space) = match family {
        Family::A => (m, None),
        Family::C => (2 * m, Some(FormedSpace::symplectic(field.clone(), m))),
        Family::B => (2 * m + 1, Some(FormedSpace::split_orthogonal(field.clone(), 2 * m + 1)?)),
        Family::D => (2 * m, Some(FormedSpace::split_orthogonal(field.clone(), 2 * m)?)),
    };
    let generators = match &space {
        None => gl_generators(&field, m),
        Some(s) => form_generators(s),
    };
    let g = MatrixGroup { family, m, field, dim, space, generators };
    for x in &g.generators {
        debug_assert!(g.contains(x), "generator outside the group");
    }
    Ok(g)
}

/// Additive generators of `F_q` over `F_p`: `1, g, ..., g^(k-1)`.
fn additive_basis(f: &GaloisField) -> Vec<u16> {
    (0..f.degree() as i64).map(|e| f.exp(e)).collect()
}

fn gl_generators(f: &GaloisField, m: usize) -> Vec<FqMatrix> {
    let mut gens = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                for &t in &additive_basis(f) {
                    let mut e = FqMatrix::identity(m);
                    e.set(i, j, t);
                    gens.push(e);
                }
            }
        }
    }
    if f.order() > 2 {
        let mut d = FqMatrix::identity(m);
        d.set(0, 0, f.generator());
        gens.push(d);
    }
    gens
}

/// Root elements `exp(t X_ij)` with `X_ij = E_ij - s_i s_j E_(j', i')` and the diagonal torus.
fn form_generators(s: &FormedSpace) -> Vec<FqMatrix> {
    let f = &s.field;
    let n = s.dim;
    let sign = |i: usize| s.form.get(i, n - 1 - i);
    let mut seen = HashSet::new();
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (jb, ib) = (n - 1 - j, n - 1 - i);
            let mut x = FqMatrix::zeros(n, n);
            if j == ib {
                if s.epsilon == -1 {
                    continue;
                }
                x.set(i, j, 1);
            } else {
                x.set(i, j, 1);
                x.set(jb, ib, f.fneg(f.fmul(sign(i), sign(j))));
            }
            // X_ij and X_(j', i') span the same root space
            if !seen.insert((i, j).min((jb, ib))) {
                continue;
            }
            for &t in &additive_basis(f) {
                gens.push(exp_nilpotent(&x.scale(t, f), f));
            }
        }
    }
    if f.order() > 2 {
        let g = f.generator();
        for i in 0..n / 2 {
            let mut d = FqMatrix::identity(n);
            d.set(i, i, g);
            d.set(n - 1 - i, n - 1 - i, f.finv(g));
            gens.push(d);
        }
    }
    gens
}

/// `1 + X + X^2/2` for `X^3 = 0`.
fn exp_nilpotent(x: &FqMatrix, f: &GaloisField) -> FqMatrix {
    let x2 = x.mul(x, f);
    debug_assert!(x2.mul(x, f).is_zero());
    let mut e = FqMatrix::identity(x.rows).add(x, f);
    if !x2.is_zero() {
        assert!(f.characteristic() != 2, "X^2 != 0 in characteristic 2");
        e = e.add(&x2.scale(f.finv(2), f), f);
    }
    e
}

impl MatrixGroup {
    pub fn contains(&self, g: &FqMatrix) -> bool {
        if g.rows != self.dim || !g.is_square() {
            return false;
        }
        match &self.space {
            None => g.det(&self.field) != 0,
            Some(s) => s.preserves(g) && (s.epsilon == 1 || g.det(&self.field) == 1),
        }
    }

    pub fn identity(&self) -> FqMatrix {
        FqMatrix::identity(self.dim)
    }

    pub fn mul(&self, a: &FqMatrix, b: &FqMatrix) -> FqMatrix {
        a.mul(b, &self.field)
    }

    pub fn inv(&self, a: &FqMatrix) -> FqMatrix {
        a.inverse(&self.field).expect("group elements are invertible")
    }

    /// `|G(F_q)|` from the standard order formulas.
    pub fn expected_order(&self) -> u128 {
        let q = self.field.order() as u128;
        let m = self.m as u32;
        let prod = |r: std::ops::RangeInclusive<u32>| r.map(|i| q.pow(2 * i) - 1).product::<u128>();
        match self.family {
            Family::A => (0..m).map(|i| q.pow(m) - q.pow(i)).product(),
            Family::B | Family::C => q.pow(m * m) * prod(1..=m),
            Family::D => q.pow(m * (m - 1)) * (q.pow(m) - 1) * prod(1..=m - 1),
        }
    }

    /// All elements, by closure under the generators (sorted).
    pub fn elements(&self, limit: usize) -> Result<Vec<FqMatrix>, GeometryError> {
        closure(&self.generators, &self.identity(), limit, |a, b| a.mul(b, &self.field))
    }

    pub fn summary(&self) -> GroupSummary {
        GroupSummary {
            family: self.family.to_string(),
            m: self.m,
            q: self.field.order(),
            dim: self.dim,
            generators: self.generators.len(),
            expected_order: self.expected_order(),
        }
    }
}

/// The subgroup generated by `gens`, sorted.
pub fn closure<F>(gens: &[FqMatrix], identity: &FqMatrix, limit: usize, mul: F) -> Result<Vec<FqMatrix>, GeometryError>
where
    F: Fn(&FqMatrix, &FqMatrix) -> FqMatrix,
{
    let mut seen: HashSet<FqMatrix> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity.clone());
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = mul(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return Err(GeometryError::TooLarge { states: seen.len() as u128, limit: limit as u128 });
                }
                queue.push_back(y);
            }
        }
    }
    let mut v: Vec<FqMatrix> = seen.into_iter().collect();
    v.sort();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(family: Family, m: usize, q: u64) -> (usize, u128) {
        let g = build_group(family, m, q).unwrap();
        let els = g.elements(200_000).unwrap();
        assert!(els.iter().all(|x| g.contains(x)));
        (els.len(), g.expected_order())
    }

    #[test]
    fn small_group_orders() {
        assert_eq!(order(Family::C, 1, 2), (6, 6));
        assert_eq!(order(Family::C, 1, 3), (24, 24));
        assert_eq!(order(Family::A, 1, 5), (4, 4));
        // SO_3(F_3) is PGL_2(F_3), of order 24
        assert_eq!(order(Family::B, 1, 3), (24, 24));
    }

    #[test]
    fn generators_reach_the_full_group() {
        for (family, m, q) in [
            (Family::C, 1, 4),
            (Family::C, 1, 5),
            (Family::C, 2, 2),
            (Family::C, 2, 3),
            (Family::B, 1, 5),
            (Family::B, 2, 3),
            (Family::D, 1, 3),
            (Family::D, 2, 3),
            (Family::A, 2, 3),
            (Family::A, 3, 2),
            (Family::A, 2, 4),
        ] {
            let (n, e) = order(family, m, q);
            assert_eq!(n as u128, e, "{family}{m} over F_{q}");
        }
    }

    #[test]
    fn membership_rejects_non_isometries() {
        let g = build_group(Family::C, 1, 3).unwrap();
        let d = FqMatrix::from_rows(&[vec![2, 0], vec![0, 2]], 2);
        assert!(g.contains(&d));
        let bad = FqMatrix::from_rows(&[vec![2, 0], vec![0, 1]], 2);
        assert!(!g.contains(&bad));
        let so = build_group(Family::B, 1, 3).unwrap();
        let minus = FqMatrix::identity(3).scale(2, &so.field);
        assert!(!so.contains(&minus), "det -1 is excluded from SO");
    }

    #[test]
    fn orthogonal_needs_odd_q() {
        assert!(matches!(build_group(Family::B, 1, 2), Err(GeometryError::UnsupportedFamily(_))));
    }
}
